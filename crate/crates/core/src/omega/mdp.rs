//! Rabin objectives on point MDPs.
//!
//! The maximum is the probability of reaching a MEC that avoids some `F_i`
//! and meets `I_i`. The minimum is one minus the maximal probability of
//! reaching an end component that satisfies the complementary Streett
//! condition when all of its states are visited infinitely often.

use crate::arena::{Arena, POS_TOL};
use crate::error::Result;
use crate::graph::arena_mecs;
use crate::model::{mask_of, Mdp, PositionalPolicy, RabinAcceptance, Sense, StationaryPolicy, ValueVector};
use crate::reach::{solve_reach, DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS};

/// Maximal acceptance probability and a positional policy attaining it.
pub fn mdp_rabin_max(mdp: &Mdp) -> Result<(ValueVector, PositionalPolicy)> {
    let arena = Arena::from_mdp(mdp, Sense::Max);
    let (values, pick) = rabin_max_arena(&arena, mdp.acceptance())?;
    let policy = PositionalPolicy::from_choices(
        pick.iter()
            .enumerate()
            .map(|(s, &i)| arena.choices[s].get(i).map(|c| c.action))
            .collect(),
    );
    Ok((ValueVector(values), policy))
}

/// Minimal acceptance probability and a minimizing policy.
///
/// Inside the end components used by the minimizer the policy picks
/// uniformly among the component's actions so that every state of the
/// component is visited infinitely often; elsewhere it is deterministic.
pub fn mdp_rabin_min(mdp: &Mdp) -> Result<(ValueVector, StationaryPolicy)> {
    let arena = Arena::from_mdp(mdp, Sense::Max);
    let (values, weights) = rabin_min_arena(&arena, mdp.acceptance())?;
    let policy = StationaryPolicy::from_weights(
        weights
            .into_iter()
            .enumerate()
            .map(|(s, w)| w.into_iter().map(|(i, p)| (arena.choices[s][i].action, p)).collect())
            .collect(),
    );
    Ok((ValueVector(values), policy))
}

/// Choices steering towards `goal` inside an end component `(states,
/// choices)`: every state gets a choice with positive probability of moving
/// to a state closer to `goal`, and all choices stay inside the component.
/// Returns `(state, choice, distance)` ordered by distance.
pub(crate) fn steer(arena: &Arena<'_>, states: &[usize], choices: &[(usize, usize)], goal: &[bool]) -> Vec<(usize, usize, usize)> {
    let n = arena.len();
    let within = mask_of_indices(n, states);
    let mut layered: Vec<bool> = (0..n).map(|s| within[s] && goal[s]).collect();
    let mut out: Vec<(usize, usize, usize)> = Vec::new();
    for &s in states {
        if layered[s] {
            if let Some(&(_, i)) = choices.iter().find(|&&(t, _)| t == s) {
                out.push((s, i, 0));
            }
        }
    }
    for layer in 1.. {
        let mut newly = Vec::new();
        for &s in states {
            if layered[s] {
                continue;
            }
            if let Some(&(_, i)) = choices
                .iter()
                .find(|&&(t, i)| t == s && arena.choices[s][i].row.stay_max_mass(&within, &layered) > POS_TOL)
            {
                newly.push((s, i, layer));
            }
        }
        if newly.is_empty() {
            break;
        }
        for &(s, _, _) in &newly {
            layered[s] = true;
        }
        out.extend(newly);
    }
    out
}

fn mask_of_indices(n: usize, states: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &s in states {
        m[s] = true;
    }
    m
}

/// Maximal acceptance on an arena with point rows; returns values and a
/// choice index per state.
pub(crate) fn rabin_max_arena(arena: &Arena<'_>, acc: &RabinAcceptance) -> Result<(Vec<f64>, Vec<usize>)> {
    let n = arena.len();
    let mut in_w = vec![false; n];
    let mut steering = vec![usize::MAX; n];
    for pair in &acc.pairs {
        let fin = mask_of(n, &pair.fin);
        let inf = mask_of(n, &pair.inf);
        let allowed: Vec<bool> = fin.iter().map(|&f| !f).collect();
        for (states, choices) in arena_mecs(arena, &allowed) {
            if !states.iter().any(|&s| inf[s]) || states.iter().all(|&s| in_w[s]) {
                continue;
            }
            for (s, i, _) in steer(arena, &states, &choices, &inf) {
                if !in_w[s] {
                    steering[s] = i;
                }
            }
            for &s in &states {
                in_w[s] = true;
            }
        }
    }
    let sol = solve_reach(arena, &in_w, DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS)?;
    let mut pick = sol.pick;
    for s in 0..n {
        if in_w[s] {
            pick[s] = steering[s];
        }
    }
    Ok((sol.values, pick))
}

/// End components in which the minimizer can visit every state infinitely
/// often without satisfying any pair.
fn streett_components(arena: &Arena<'_>, allowed: &[bool], acc: &RabinAcceptance, out: &mut Vec<(Vec<usize>, Vec<(usize, usize)>)>) {
    let n = arena.len();
    for (states, choices) in arena_mecs(arena, allowed) {
        let inside = mask_of_indices(n, &states);
        let bad: Vec<usize> = acc
            .pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.inf.iter().any(|s| inside[s.0]) && !p.fin.iter().any(|s| inside[s.0]))
            .map(|(i, _)| i)
            .collect();
        if bad.is_empty() {
            out.push((states, choices));
            continue;
        }
        let mut sub = inside;
        for &i in &bad {
            for s in &acc.pairs[i].inf {
                sub[s.0] = false;
            }
        }
        if sub.iter().any(|&b| b) {
            streett_components(arena, &sub, acc, out);
        }
    }
}

/// Minimal acceptance on an arena with point rows; returns values and a
/// weighted choice set per state.
#[allow(clippy::type_complexity)]
pub(crate) fn rabin_min_arena(arena: &Arena<'_>, acc: &RabinAcceptance) -> Result<(Vec<f64>, Vec<Vec<(usize, f64)>>)> {
    let n = arena.len();
    let mut comps = Vec::new();
    streett_components(arena, &vec![true; n], acc, &mut comps);
    let mut good = vec![false; n];
    let mut weights: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (states, choices) in &comps {
        for &s in states {
            good[s] = true;
        }
        for &(s, i) in choices {
            weights[s].push((i, 0.0));
        }
    }
    for w in weights.iter_mut() {
        let k = w.len() as f64;
        for e in w.iter_mut() {
            e.1 = 1.0 / k;
        }
    }
    let max_arena = Arena {
        choices: arena.choices.clone(),
        chooser: vec![Sense::Max; n],
        nature: arena.nature,
    };
    let sol = solve_reach(&max_arena, &good, DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS)?;
    for s in 0..n {
        if !good[s] && sol.pick[s] != usize::MAX {
            weights[s] = vec![(sol.pick[s], 1.0)];
        }
    }
    let values = sol.values.iter().map(|v| (1.0 - v).clamp(0.0, 1.0)).collect();
    Ok((values, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{
        induce_mc, Action, Distribution, RabinPair, Skeleton, StateId,
    };
    use crate::omega::mc_rabin;

    #[test]
    fn choice_models() {
        let (v, pol) = mdp_rabin_max(&fixtures::choice_best()).unwrap();
        assert!((v.0[0] - 1.0).abs() < 1e-9);
        let sk = fixtures::choice_best();
        assert_eq!(pol.get(StateId(1)), sk.skeleton().action_by_name(StateId(1), "b"));
        let (v, _) = mdp_rabin_max(&fixtures::choice_worst()).unwrap();
        assert!((v.0[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn everything_accepted() {
        let m = fixtures::choice_best();
        let all: Vec<StateId> = m.skeleton().states().collect();
        let m = m.with_acceptance(RabinAcceptance::new(vec![RabinPair::new([], all)]));
        assert!(mdp_rabin_max(&m).unwrap().0 .0.iter().all(|&v| v == 1.0));
        assert!(mdp_rabin_min(&m).unwrap().0 .0.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn nothing_accepted() {
        let m = fixtures::choice_best().with_acceptance(RabinAcceptance::default());
        assert!(mdp_rabin_min(&m).unwrap().0 .0.iter().all(|&v| v == 0.0));
        assert!(mdp_rabin_max(&m).unwrap().0 .0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn minimizer_keeps_visiting_q2() {
        let m = fixtures::choice_best();
        let (v, pol) = mdp_rabin_min(&m).unwrap();
        assert!(v.0[0].abs() < 1e-9);
        let c = m.skeleton().action_by_name(StateId(1), "c").unwrap();
        assert!(pol.weights(StateId(1)).iter().any(|&(a, w)| a == c && w > 0.0));
    }

    /// A hub `c` that may go to `a` or `b`; each of `a`, `b` alone is
    /// accepted, but visiting both infinitely often is not.
    #[test]
    fn minimizer_needs_randomization() {
        let sk = Skeleton::new(
            vec!["c".into(), "a".into(), "b".into()],
            StateId(0),
            vec![
                Action { name: "to_a".into(), owner: StateId(0) },
                Action { name: "to_b".into(), owner: StateId(0) },
                Action { name: "back".into(), owner: StateId(1) },
                Action { name: "back".into(), owner: StateId(2) },
            ],
        )
        .unwrap();
        let acc = RabinAcceptance::new(vec![
            RabinPair::new([StateId(2)], [StateId(1)]),
            RabinPair::new([StateId(1)], [StateId(2)]),
        ]);
        let mdp = Mdp::new(
            sk,
            vec![
                Distribution::dirac(StateId(1)),
                Distribution::dirac(StateId(2)),
                Distribution::dirac(StateId(0)),
                Distribution::dirac(StateId(0)),
            ],
            acc,
        )
        .unwrap();
        let (v, pol) = mdp_rabin_min(&mdp).unwrap();
        assert_eq!(v.0, vec![0.0, 0.0, 0.0]);
        assert_eq!(pol.weights(StateId(0)).len(), 2);
        // Every deterministic choice is accepted surely.
        for a in [0, 1] {
            let p = PositionalPolicy::from_choices(vec![
                Some(crate::model::ActionId(a)),
                Some(crate::model::ActionId(2)),
                Some(crate::model::ActionId(3)),
            ]);
            assert_eq!(mc_rabin(&induce_mc(&mdp, &p).unwrap()).unwrap().0[0], 1.0);
        }
        let (v, _) = mdp_rabin_max(&mdp).unwrap();
        assert_eq!(v.0, vec![1.0, 1.0, 1.0]);
    }

    /// Oracle: exact evaluation of every positional policy.
    fn policies(mdp: &Mdp) -> Vec<PositionalPolicy> {
        let sk = mdp.skeleton();
        let mut out = vec![PositionalPolicy::empty(sk.num_states())];
        for s in sk.states() {
            let mut next = Vec::new();
            for p in &out {
                for &a in sk.available(s) {
                    let mut q = p.clone();
                    q.set(s, a);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn max_matches_enumeration_on_choice_models() {
        for m in [fixtures::choice_best(), fixtures::choice_worst()] {
            let (v, pol) = mdp_rabin_max(&m).unwrap();
            let mut best = vec![0.0f64; 3];
            for p in policies(&m) {
                let w = mc_rabin(&induce_mc(&m, &p).unwrap()).unwrap();
                for s in 0..3 {
                    best[s] = best[s].max(w.0[s]);
                }
            }
            for s in 0..3 {
                assert!((v.0[s] - best[s]).abs() < 1e-9);
            }
            let own = mc_rabin(&induce_mc(&m, &pol).unwrap()).unwrap();
            assert!(own.max_diff(&v) < 1e-9);
        }
    }

    #[test]
    fn min_matches_enumeration_on_choice_best() {
        let m = fixtures::choice_best();
        let (v, _) = mdp_rabin_min(&m).unwrap();
        let mut worst = vec![1.0f64; 3];
        for p in policies(&m) {
            let w = mc_rabin(&induce_mc(&m, &p).unwrap()).unwrap();
            for s in 0..3 {
                worst[s] = worst[s].min(w.0[s]);
            }
        }
        for s in 0..3 {
            assert!((v.0[s] - worst[s]).abs() < 1e-9);
        }
    }
}
