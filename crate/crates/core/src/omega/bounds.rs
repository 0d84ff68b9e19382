//! Lower and upper bounds of the Rabin objective on a BMDP.

use std::collections::BTreeSet;

use crate::arena::Arena;
use crate::error::{Error, Result};
use crate::graph::{bmdp_mec_decomposition, EndComponent};
use crate::model::{
    instantiate, mask_of, Bmdp, Distribution, NaturePolicy, PositionalPolicy, Sense, StateId, ValueVector,
};
use crate::omega::game::{build_game, sg_rabin};
use crate::omega::mdp::steer;
use crate::omega::{make_absorbing, GameResult};
use crate::reach::{solve_reach, DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS};

/// Lower bound: the controller maximizes against a minimizing nature.
///
/// Solved on the explicit game; nature's choice for each action is the
/// mixture of the vertices player 2 uses at the intermediate state.
pub fn bmdp_lower(model: &Bmdp) -> Result<GameResult> {
    game_bound(model, Sense::Min)
}

/// Upper bound computed on the explicit game with a cooperating player 2.
/// Agrees with [`bmdp_upper`] but costs one game state per action and one
/// game action per vertex.
pub fn bmdp_upper_game(model: &Bmdp) -> Result<GameResult> {
    game_bound(model, Sense::Max)
}

fn game_bound(model: &Bmdp, nature: Sense) -> Result<GameResult> {
    let sk = model.skeleton();
    let n = sk.num_states();
    let game = build_game(model)?;
    let sol = sg_rabin(&game, nature)?;
    let gmdp = game.mdp();
    let controller = PositionalPolicy::from_choices((0..n).map(|s| sol.player1.get(StateId(s))).collect());
    let mut choice = Vec::with_capacity(sk.num_actions());
    for a in 0..sk.num_actions() {
        let weights = sol.player2.weights(StateId(n + a));
        let d = if weights.is_empty() {
            // Unreachable from anywhere that matters; any vertex will do.
            gmdp.trans(gmdp.skeleton().available(StateId(n + a))[0]).clone()
        } else {
            let parts: Vec<(f64, &Distribution)> = weights.iter().map(|&(v, w)| (w, gmdp.trans(v))).collect();
            Distribution::mix(&parts)?
        };
        choice.push(d);
    }
    let nature = NaturePolicy::new(choice);
    let witness = instantiate(model, &nature)?;
    Ok(GameResult {
        values: ValueVector(sol.values.0[..n].to_vec()),
        controller,
        nature,
        witness,
        iterations: sol.rounds,
    })
}

/// Intermediate results of the upper-bound procedure for one Rabin pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAnalysis {
    /// MECs of the model with the pair's `F` states made absorbing.
    pub mecs: Vec<EndComponent>,
    /// Those MECs that meet the pair's `I` set.
    pub winning: Vec<EndComponent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpperDetails {
    pub pairs: Vec<PairAnalysis>,
    /// Union of all winning MECs.
    pub target: BTreeSet<StateId>,
}

/// Upper bound: controller and nature cooperate.
pub fn bmdp_upper(model: &Bmdp) -> Result<GameResult> {
    bmdp_upper_detailed(model).map(|(r, _)| r)
}

/// [`bmdp_upper`] together with the per-pair MEC analysis.
///
/// For each pair, the `F` states are made absorbing and the MECs meeting `I`
/// are collected; the bound is the maximal probability of reaching their
/// union. No game is built.
pub fn bmdp_upper_detailed(model: &Bmdp) -> Result<(GameResult, UpperDetails)> {
    bmdp_upper_with(model, DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS)
}

/// [`bmdp_upper_detailed`] with a custom convergence threshold and iteration
/// limit for the final reachability step.
pub fn bmdp_upper_with(model: &Bmdp, epsilon: f64, max_iterations: usize) -> Result<(GameResult, UpperDetails)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidQuery("epsilon must be positive".into()));
    }
    let sk = model.skeleton();
    let n = sk.num_states();
    let mut pairs = Vec::new();
    let mut target = BTreeSet::new();
    for pair in &model.acceptance().pairs {
        let fin: Vec<StateId> = pair.fin.iter().copied().collect();
        let absorbing = make_absorbing(model, &fin);
        let mecs = bmdp_mec_decomposition(&absorbing);
        let winning: Vec<EndComponent> = mecs
            .iter()
            .filter(|ec| ec.states.iter().any(|s| pair.inf.contains(s)))
            .cloned()
            .collect();
        for ec in &winning {
            target.extend(ec.states.iter().copied());
        }
        pairs.push(PairAnalysis { mecs, winning });
    }

    let arena = Arena::from_bmdp(model, Sense::Max, Sense::Max);
    let in_w = mask_of(n, &target);
    let sol = solve_reach(&arena, &in_w, epsilon, max_iterations)?;
    let mut pick = sol.pick.clone();
    let mut dists = sol.dists.clone();

    // Inside W: stay in the winning MEC and move towards its I states.
    let mut done = vec![false; n];
    for (pair, analysis) in model.acceptance().pairs.iter().zip(&pairs) {
        let inf = mask_of(n, &pair.inf);
        for ec in &analysis.winning {
            let states: Vec<usize> = ec.states.iter().map(|s| s.0).collect();
            let choices: Vec<(usize, usize)> = states
                .iter()
                .flat_map(|&s| {
                    let acts = &ec.actions;
                    arena.choices[s]
                        .iter()
                        .enumerate()
                        .filter(move |(_, c)| acts.contains(&c.action))
                        .map(move |(i, _)| (s, i))
                })
                .collect();
            let within = mask_of(n, &ec.states);
            let order = steer(&arena, &states, &choices, &inf);
            let mut distance = vec![usize::MAX; n];
            for &(s, _, d) in &order {
                distance[s] = d;
            }
            for &(s, i, d) in &order {
                if done[s] {
                    continue;
                }
                // 2 on closer states, 1 elsewhere in the MEC, 0 outside.
                let values: Vec<f64> = (0..n)
                    .map(|t| {
                        if within[t] && distance[t] < d {
                            2.0
                        } else if within[t] {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                pick[s] = i;
                dists[s][i] = arena.choices[s][i].row.optimize(&values, Sense::Max);
                done[s] = true;
            }
        }
    }

    let controller = PositionalPolicy::from_choices(
        pick.iter()
            .enumerate()
            .map(|(s, &i)| arena.choices[s].get(i).map(|c| c.action))
            .collect(),
    );
    let resolved = crate::reach::ArenaSolution {
        values: sol.values.clone(),
        pick,
        dists,
        iterations: sol.iterations,
    };
    let nature = resolved.nature(&arena, sk.num_actions());
    let witness = instantiate(model, &nature)?;
    let result = GameResult {
        values: ValueVector(sol.values),
        controller,
        nature,
        witness,
        iterations: sol.iterations,
    };
    Ok((result, UpperDetails { pairs, target }))
}
