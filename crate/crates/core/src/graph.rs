//! Structural analyses: SCCs, maximal end components (point and interval
//! semantics), bottom SCCs and qualitative reachability.

use std::collections::BTreeSet;

use crate::arena::{Arena, RowRef, POS_TOL};
use crate::model::{ActionId, Bmdp, MarkovChain, Mdp, Sense, StateId, StochasticGame};

/// A set of states together with actions that keep the process inside.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EndComponent {
    pub states: BTreeSet<StateId>,
    pub actions: BTreeSet<ActionId>,
}

/// Strongly connected components of the subgraph induced by `nodes`.
///
/// Iterative Tarjan. `succ(v, out)` appends the successors of `v`; successors
/// outside `nodes` are ignored. Components are returned in reverse
/// topological order (sinks first).
pub(crate) fn sccs(n: usize, nodes: &[usize], mut succ: impl FnMut(usize, &mut Vec<usize>)) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let mut inside = vec![false; n];
    for &v in nodes {
        inside[v] = true;
    }
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    let mut buf = Vec::new();
    // Call stack of (node, successor list, next position).
    let mut frames: Vec<(usize, Vec<usize>, usize)> = Vec::new();

    for &root in nodes {
        if index[root] != UNSEEN {
            continue;
        }
        let mut pending = Some(root);
        loop {
            if let Some(v) = pending.take() {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
                buf.clear();
                succ(v, &mut buf);
                let mut next: Vec<usize> = buf.iter().copied().filter(|&w| inside[w]).collect();
                next.sort_unstable();
                next.dedup();
                frames.push((v, next, 0));
            }
            let Some(frame) = frames.last_mut() else { break };
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == UNSEEN {
                    pending = Some(w);
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(parent) = frames.last() {
                let p = parent.0;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Maximal end components of `arena` restricted to `allowed` states.
///
/// A choice can stay in a candidate set `T` if some consistent distribution
/// is supported inside `T`; edges are the successors such a distribution can
/// reach. Candidates are refined by SCC splitting and pruning until stable.
/// Returns `(states, [(state, choice index)])` per MEC.
pub(crate) fn arena_mecs(arena: &Arena<'_>, allowed: &[bool]) -> Vec<(Vec<usize>, Vec<(usize, usize)>)> {
    let n = arena.len();
    let mut alive: Vec<Vec<bool>> = arena.choices.iter().map(|c| vec![true; c.len()]).collect();
    let mut partition: Vec<Vec<usize>> = vec![(0..n).filter(|&s| allowed[s]).collect()];
    let mut mask = vec![false; n];
    loop {
        let mut changed = false;
        let mut next = Vec::new();
        for block in partition {
            for &s in &block {
                mask[s] = true;
            }
            let mut kept = Vec::with_capacity(block.len());
            for &s in &block {
                for (i, c) in arena.choices[s].iter().enumerate() {
                    if alive[s][i] && !c.row.can_stay(&mask) {
                        alive[s][i] = false;
                    }
                }
                if alive[s].iter().any(|&a| a) {
                    kept.push(s);
                } else {
                    changed = true;
                }
            }
            if kept.len() < block.len() {
                for &s in &block {
                    mask[s] = false;
                }
                if !kept.is_empty() {
                    next.push(kept);
                }
                continue;
            }
            let comps = sccs(n, &block, |s, out| {
                for (i, c) in arena.choices[s].iter().enumerate() {
                    if alive[s][i] {
                        c.row.stay_successors(&mask, out);
                    }
                }
            });
            for &s in &block {
                mask[s] = false;
            }
            if comps.len() > 1 {
                changed = true;
            }
            next.extend(comps);
        }
        partition = next;
        if !changed {
            break;
        }
    }
    let mut out: Vec<_> = partition
        .into_iter()
        .map(|states| {
            let choices = states
                .iter()
                .flat_map(|&s| {
                    alive[s]
                        .iter()
                        .enumerate()
                        .filter(|(_, &a)| a)
                        .map(move |(i, _)| (s, i))
                })
                .collect();
            (states, choices)
        })
        .collect();
    out.sort();
    out
}

fn to_end_components(arena: &Arena<'_>, raw: Vec<(Vec<usize>, Vec<(usize, usize)>)>) -> Vec<EndComponent> {
    raw.into_iter()
        .map(|(states, choices)| EndComponent {
            states: states.into_iter().map(StateId).collect(),
            actions: choices
                .into_iter()
                .map(|(s, i)| arena.choices[s][i].action)
                .collect(),
        })
        .collect()
}

/// All maximal end components of an MDP.
pub fn mec_decomposition(mdp: &Mdp) -> Vec<EndComponent> {
    let arena = Arena::from_mdp(mdp, Sense::Max);
    let raw = arena_mecs(&arena, &vec![true; arena.len()]);
    to_end_components(&arena, raw)
}

/// Maximal end components of a BMDP under interval semantics.
///
/// An action at `s` stays in `T` iff every successor outside `T` has lower
/// bound 0 and the upper bounds inside `T` sum to at least 1. These are the
/// MECs of the induced stochastic game projected onto the original states.
pub fn bmdp_mec_decomposition(model: &Bmdp) -> Vec<EndComponent> {
    let arena = Arena::from_bmdp(model, Sense::Max, Sense::Max);
    let raw = arena_mecs(&arena, &vec![true; arena.len()]);
    to_end_components(&arena, raw)
}

/// Bottom strongly connected components of a Markov chain.
pub fn bsccs(mc: &MarkovChain) -> Vec<Vec<StateId>> {
    bsccs_of(mc.transitions())
        .into_iter()
        .map(|c| c.into_iter().map(StateId).collect())
        .collect()
}

pub(crate) fn bsccs_of(trans: &[crate::model::Distribution]) -> Vec<Vec<usize>> {
    let n = trans.len();
    let nodes: Vec<usize> = (0..n).collect();
    let comps = sccs(n, &nodes, |s, out| out.extend(trans[s].support().map(|t| t.0)));
    let mut comp_of = vec![0; n];
    for (i, c) in comps.iter().enumerate() {
        for &s in c {
            comp_of[s] = i;
        }
    }
    let mut out: Vec<Vec<usize>> = comps
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            c.iter()
                .all(|&s| trans[s].support().all(|t| comp_of[t.0] == *i))
        })
        .map(|(_, c)| c.clone())
        .collect();
    out.sort();
    out
}

fn row_positive(row: &RowRef<'_>, nature: Sense, y: &[bool]) -> bool {
    match nature {
        Sense::Max => row.max_mass(y) > POS_TOL,
        Sense::Min => row.min_mass(y) > POS_TOL,
    }
}

fn row_apre(row: &RowRef<'_>, nature: Sense, x: &[bool], y: &[bool]) -> bool {
    match row {
        RowRef::Point(d) => d.support().all(|t| x[t.0]) && d.support().any(|t| y[t.0]),
        RowRef::Interval(_) => match nature {
            Sense::Max => row.can_stay(x) && row.stay_max_mass(x, y) > POS_TOL,
            Sense::Min => row.must_stay(x) && row.min_mass(y) > POS_TOL,
        },
    }
}

fn quantify(chooser: Sense, n_choices: usize, mut f: impl FnMut(usize) -> bool) -> bool {
    match chooser {
        Sense::Max => (0..n_choices).any(&mut f),
        Sense::Min => n_choices > 0 && (0..n_choices).all(f),
    }
}

/// States from which the target is reached with positive probability under
/// optimal play.
pub(crate) fn positive_reach(arena: &Arena<'_>, target: &[bool]) -> Vec<bool> {
    let n = arena.len();
    let mut y = target.to_vec();
    loop {
        let mut changed = false;
        for s in 0..n {
            if y[s] {
                continue;
            }
            let cs = &arena.choices[s];
            if quantify(arena.chooser[s], cs.len(), |i| row_positive(&cs[i].row, arena.nature, &y)) {
                y[s] = true;
                changed = true;
            }
        }
        if !changed {
            return y;
        }
    }
}

/// States from which the target is reached with probability 1 under optimal
/// play (`νX. μY. target ∪ Apre(X, Y)`).
pub(crate) fn almost_sure_reach(arena: &Arena<'_>, target: &[bool]) -> Vec<bool> {
    let n = arena.len();
    let mut x = vec![true; n];
    loop {
        let mut y = target.to_vec();
        loop {
            let mut changed = false;
            for s in 0..n {
                if y[s] || !x[s] {
                    continue;
                }
                let cs = &arena.choices[s];
                if quantify(arena.chooser[s], cs.len(), |i| row_apre(&cs[i].row, arena.nature, &x, &y)) {
                    y[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if y == x {
            return x;
        }
        x = y;
    }
}

/// Exact 0/1 classification for reachability in a stochastic game.
///
/// Returns `(prob0, prob1)`: states whose optimal value of reaching `target`
/// is exactly 0, respectively exactly 1, when player 1 optimizes in `player1`
/// and player 2 in `player2`.
pub fn qualitative_reach(
    game: &StochasticGame,
    target: &BTreeSet<StateId>,
    player1: Sense,
    player2: Sense,
) -> (BTreeSet<StateId>, BTreeSet<StateId>) {
    let arena = Arena::from_game(game, player1, player2);
    let t = crate::model::mask_of(arena.len(), target);
    let pos = positive_reach(&arena, &t);
    let one = almost_sure_reach(&arena, &t);
    let prob0 = (0..arena.len()).filter(|&s| !pos[s]).map(StateId).collect();
    let prob1 = (0..arena.len()).filter(|&s| one[s]).map(StateId).collect();
    (prob0, prob1)
}
