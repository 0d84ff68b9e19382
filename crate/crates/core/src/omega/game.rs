//! The stochastic game of a BMDP and Rabin games.
//!
//! In the game, player 1 picks an action `a` in `s` and moves to the
//! intermediate state `(s, a)`, where player 2 picks a vertex of the row of
//! `a`. Intermediate states belong to no Rabin set.

use std::collections::HashMap;

use crate::arena::Arena;
use crate::error::{Error, Result};
use crate::model::{
    Action, Bmdp, Distribution, Mdp, Player, PositionalPolicy, Sense, Skeleton, StateId, StationaryPolicy,
    StochasticGame, ValueVector,
};
use crate::omega::mdp::{rabin_max_arena, rabin_min_arena};
use crate::polytope::bfs_vertices;

/// Below this many player-1 strategies, the result of strategy improvement
/// is checked against all of them.
pub const EXHAUSTIVE_LIMIT: f64 = 4096.0;

const GAP: f64 = 1e-9;
const MAX_ROUNDS: usize = 10_000;

/// Builds the game: original states `0..n` (player 1), then one state per
/// action (player 2). Original actions keep their indices and lead to their
/// intermediate state; the vertex actions `v0, v1, ...` follow.
pub fn build_game(model: &Bmdp) -> Result<StochasticGame> {
    let sk = model.skeleton();
    let n = sk.num_states();
    let m = sk.num_actions();
    let mut names: Vec<String> = sk.state_names().to_vec();
    let mut actions: Vec<Action> = sk.actions().to_vec();
    let mut trans: Vec<Distribution> = (0..m).map(|a| Distribution::dirac(StateId(n + a))).collect();
    for (a, act) in sk.actions().iter().enumerate() {
        names.push(format!("{}:{}", sk.state_name(act.owner), act.name));
        let vertices = bfs_vertices(model.row(crate::model::ActionId(a)))?;
        for (k, v) in vertices.into_iter().enumerate() {
            actions.push(Action {
                name: format!("v{k}"),
                owner: StateId(n + a),
            });
            trans.push(v);
        }
    }
    let initial = sk.initial();
    let skeleton = Skeleton::new(names, initial, actions)?;
    let mdp = Mdp::new(skeleton, trans, model.acceptance().clone())?;
    let owner = (0..n + m).map(|s| if s < n { Player::One } else { Player::Two }).collect();
    StochasticGame::new(mdp, owner)
}

/// Solution of a Rabin game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSolution {
    pub values: ValueVector,
    /// Choices at player-1 states.
    pub player1: PositionalPolicy,
    /// Choices at player-2 states; randomized only where player 2 minimizes
    /// and must keep visiting several states.
    pub player2: StationaryPolicy,
    pub rounds: usize,
    /// Whether the final check over all player-1 strategies changed the
    /// result.
    pub exhaustive: bool,
}

/// Player 1 maximizes the probability of the Rabin objective; player 2
/// maximizes it as well (`Sense::Max`) or minimizes it (`Sense::Min`).
pub fn sg_rabin(game: &StochasticGame, player2: Sense) -> Result<GameSolution> {
    let mdp = game.mdp();
    let sk = mdp.skeleton();
    let n = sk.num_states();
    match player2 {
        Sense::Max => {
            let arena = Arena::from_mdp(mdp, Sense::Max);
            let (values, pick) = rabin_max_arena(&arena, mdp.acceptance())?;
            let choice = |s: usize| arena.choices[s].get(pick[s]).map(|c| c.action);
            let p1 = (0..n)
                .map(|s| if game.owners()[s] == Player::One { choice(s) } else { None })
                .collect();
            let p2 = (0..n)
                .map(|s| match (game.owners()[s], choice(s)) {
                    (Player::Two, Some(a)) => vec![(a, 1.0)],
                    _ => Vec::new(),
                })
                .collect();
            Ok(GameSolution {
                values: ValueVector(values),
                player1: PositionalPolicy::from_choices(p1),
                player2: StationaryPolicy::from_weights(p2),
                rounds: 0,
                exhaustive: false,
            })
        }
        Sense::Min => StrategyImprovement::new(game).run(),
    }
}

type Evaluation = (Vec<f64>, Vec<Vec<(crate::model::ActionId, f64)>>);

struct StrategyImprovement<'g> {
    game: &'g StochasticGame,
    /// Player-1 states and their available actions.
    p1: Vec<(usize, Vec<crate::model::ActionId>)>,
    cache: HashMap<Vec<usize>, std::rc::Rc<Evaluation>>,
}

impl<'g> StrategyImprovement<'g> {
    fn new(game: &'g StochasticGame) -> Self {
        let sk = game.mdp().skeleton();
        let p1 = sk
            .states()
            .filter(|&s| game.owner(s) == Player::One && !sk.available(s).is_empty())
            .map(|s| (s.0, sk.available(s).to_vec()))
            .collect();
        StrategyImprovement {
            game,
            p1,
            cache: HashMap::new(),
        }
    }

    /// Values of player 1 fixing `strategy` against a minimizing player 2.
    fn eval(&mut self, strategy: &[usize]) -> Result<std::rc::Rc<Evaluation>> {
        if let Some(e) = self.cache.get(strategy) {
            return Ok(e.clone());
        }
        let mdp = self.game.mdp();
        let sk = mdp.skeleton();
        let mut chosen = vec![None; sk.num_states()];
        for (k, (s, acts)) in self.p1.iter().enumerate() {
            chosen[*s] = Some(acts[strategy[k]]);
        }
        let arena = Arena::from_mdp_filtered(mdp, Sense::Max, |a| {
            let owner = sk.owner(a).0;
            chosen[owner].is_none_or(|c| c == a)
        });
        let (values, weights) = rabin_min_arena(&arena, mdp.acceptance())?;
        let weights = weights
            .into_iter()
            .enumerate()
            .map(|(s, w)| w.into_iter().map(|(i, p)| (arena.choices[s][i].action, p)).collect())
            .collect();
        let e = std::rc::Rc::new((values, weights));
        self.cache.insert(strategy.to_vec(), e.clone());
        Ok(e)
    }

    fn dominates(new: &[f64], old: &[f64]) -> bool {
        new.iter().zip(old).all(|(a, b)| *a >= b - GAP) && new.iter().zip(old).any(|(a, b)| *a > b + GAP)
    }

    fn q(&self, v: &[f64], k: usize, j: usize) -> f64 {
        self.game.mdp().trans(self.p1[k].1[j]).expectation(v)
    }

    fn run(mut self) -> Result<GameSolution> {
        let mut strategy = vec![0usize; self.p1.len()];
        let mut current = self.eval(&strategy)?;
        let mut rounds = 0;
        let mut trace: Vec<f64> = Vec::new();
        loop {
            rounds += 1;
            if rounds > MAX_ROUNDS {
                return Err(Error::Internal(format!(
                    "strategy improvement exceeded {MAX_ROUNDS} rounds; last values at the first states: {:?}",
                    &trace[..trace.len().min(8)]
                )));
            }
            let v = current.0.clone();
            trace = v.clone();
            // Strictly improving switches, best action per state.
            let mut switches = Vec::new();
            for k in 0..self.p1.len() {
                let s = self.p1[k].0;
                let qs: Vec<f64> = (0..self.p1[k].1.len()).map(|j| self.q(&v, k, j)).collect();
                let best = qs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if best > v[s] + GAP {
                    let j = qs.iter().position(|&q| q >= best - GAP).expect("maximum exists");
                    if j != strategy[k] {
                        switches.push((k, j));
                    }
                }
            }
            let mut adopted = None;
            if !switches.is_empty() {
                let mut all = strategy.clone();
                for &(k, j) in &switches {
                    all[k] = j;
                }
                let e = self.eval(&all)?;
                if Self::dominates(&e.0, &v) {
                    adopted = Some((all, e));
                } else {
                    for &(k, j) in &switches {
                        let mut one = strategy.clone();
                        one[k] = j;
                        let e = self.eval(&one)?;
                        if Self::dominates(&e.0, &v) {
                            adopted = Some((one, e));
                            break;
                        }
                    }
                }
            }
            if adopted.is_none() {
                // Switches that keep the local value may still help.
                'escape: for k in 0..self.p1.len() {
                    let s = self.p1[k].0;
                    for j in 0..self.p1[k].1.len() {
                        if j == strategy[k] || self.q(&v, k, j) < v[s] - GAP {
                            continue;
                        }
                        let mut one = strategy.clone();
                        one[k] = j;
                        let e = self.eval(&one)?;
                        if Self::dominates(&e.0, &v) {
                            adopted = Some((one, e));
                            break 'escape;
                        }
                    }
                }
            }
            match adopted {
                Some((s, e)) => {
                    assert!(
                        e.0.iter().zip(&v).all(|(a, b)| *a >= b - GAP),
                        "strategy improvement must not decrease values"
                    );
                    strategy = s;
                    current = e;
                }
                None => break,
            }
        }

        let mut exhaustive = false;
        let count: f64 = self.p1.iter().map(|(_, a)| a.len() as f64).product();
        if count <= EXHAUSTIVE_LIMIT {
            let mut idx = vec![0usize; self.p1.len()];
            loop {
                let e = self.eval(&idx)?;
                if Self::dominates(&e.0, &current.0) {
                    strategy = idx.clone();
                    current = e;
                    exhaustive = true;
                }
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < self.p1[k].1.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }

        let n = self.game.mdp().num_states();
        let mut p1 = PositionalPolicy::empty(n);
        for (k, (s, acts)) in self.p1.iter().enumerate() {
            p1.set(StateId(*s), acts[strategy[k]]);
        }
        let p2 = (0..n)
            .map(|s| {
                if self.game.owners()[s] == Player::Two {
                    current.1[s].clone()
                } else {
                    Vec::new()
                }
            })
            .collect();
        Ok(GameSolution {
            values: ValueVector(current.0.clone()),
            player1: p1,
            player2: StationaryPolicy::from_weights(p2),
            rounds,
            exhaustive,
        })
    }
}
