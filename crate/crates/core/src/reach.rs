//! Quantitative reachability on Markov chains, MDPs and BMDPs.
//!
//! Values are computed in three steps: the exact 0/1 states are found by
//! graph fixpoints, value iteration from below gives approximate values, and
//! a strategy-improvement pass with exact Markov-chain evaluation turns them
//! into the exact values of an optimal strategy pair.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::arena::{Arena, Choice, RowRef, POS_TOL};
use crate::error::{Error, Result};
use crate::graph;
use crate::model::{
    mask_of, Bmdp, Distribution, MarkovChain, Mdp, NaturePolicy, PositionalPolicy, Sense, StateId,
    ValueVector,
};

pub const DEFAULT_EPSILON: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

/// Switches must improve a value by more than this.
const IMPROVE_TOL: f64 = 1e-12;
const MAX_ROUNDS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ReachQuery {
    pub target: BTreeSet<StateId>,
    pub controller: Sense,
    /// Ignored for point models.
    pub nature: Sense,
    pub epsilon: f64,
    pub max_iterations: usize,
}

impl ReachQuery {
    pub fn new(target: impl IntoIterator<Item = StateId>, controller: Sense, nature: Sense) -> Self {
        ReachQuery {
            target: target.into_iter().collect(),
            controller,
            nature,
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    fn check(&self, n: usize) -> Result<Vec<bool>> {
        if self.target.is_empty() {
            return Err(Error::InvalidQuery("target set is empty".into()));
        }
        if let Some(s) = self.target.iter().find(|s| s.0 >= n) {
            return Err(Error::InvalidQuery(format!("target state {s} does not exist")));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidQuery("epsilon must be positive".into()));
        }
        Ok(mask_of(n, &self.target))
    }
}

/// Exact probabilities of reaching `target` in a Markov chain.
pub fn mc_reach_exact(mc: &MarkovChain, target: &BTreeSet<StateId>) -> Result<ValueVector> {
    let n = mc.num_states();
    let t = mask_of(n, target);
    let succ: Vec<Option<&Distribution>> = mc.transitions().iter().map(Some).collect();
    chain_values(&succ, &t, &vec![false; n]).map(ValueVector)
}

/// Optimal reachability probabilities and an optimal positional policy.
pub fn mdp_reach(mdp: &Mdp, query: &ReachQuery) -> Result<(ValueVector, PositionalPolicy)> {
    let t = query.check(mdp.num_states())?;
    let arena = Arena::from_mdp(mdp, query.controller);
    let sol = solve_reach(&arena, &t, query.epsilon, query.max_iterations)?;
    let policy = sol.policy(&arena);
    Ok((ValueVector(sol.values), policy))
}

/// Optimal robust reachability on a BMDP.
///
/// The controller optimizes in `query.controller`, nature resolves every
/// interval row in `query.nature` at each step. The returned nature policy
/// picks a vertex of every row.
pub fn bmdp_reach(model: &Bmdp, query: &ReachQuery) -> Result<(ValueVector, PositionalPolicy, NaturePolicy)> {
    let t = query.check(model.num_states())?;
    let arena = Arena::from_bmdp(model, query.controller, query.nature);
    let sol = solve_reach(&arena, &t, query.epsilon, query.max_iterations)?;
    let policy = sol.policy(&arena);
    let nature = sol.nature(&arena, model.skeleton().num_actions());
    Ok((ValueVector(sol.values), policy, nature))
}

/// Result of [`solve_reach`].
#[derive(Clone, Debug)]
pub(crate) struct ArenaSolution {
    pub values: Vec<f64>,
    /// Choice index per state, `usize::MAX` for states without choices.
    pub pick: Vec<usize>,
    /// Resolved distribution of every choice.
    pub dists: Vec<Vec<Distribution>>,
    pub iterations: usize,
}

impl ArenaSolution {
    pub fn policy(&self, arena: &Arena<'_>) -> PositionalPolicy {
        PositionalPolicy::from_choices(
            self.pick
                .iter()
                .enumerate()
                .map(|(s, &i)| arena.choices[s].get(i).map(|c| c.action))
                .collect(),
        )
    }

    pub fn nature(&self, arena: &Arena<'_>, num_actions: usize) -> NaturePolicy {
        let mut out = vec![None; num_actions];
        for (cs, ds) in arena.choices.iter().zip(&self.dists) {
            for (c, d) in cs.iter().zip(ds) {
                out[c.action.0] = Some(d.clone());
            }
        }
        NaturePolicy::new(out.into_iter().map(|d| d.expect("every action resolved")).collect())
    }
}

/// Optimal values of reaching `target` in `arena` (the target may be empty).
pub(crate) fn solve_reach(arena: &Arena<'_>, target: &[bool], epsilon: f64, max_iterations: usize) -> Result<ArenaSolution> {
    let pos = graph::positive_reach(arena, target);
    let one = graph::almost_sure_reach(arena, target);
    let (x, iterations) = value_iteration(arena, &pos, &one, epsilon, max_iterations)?;
    let (values, pick, dists) = polish(arena, target, &x)?;
    Ok(ArenaSolution {
        values,
        pick,
        dists,
        iterations,
    })
}

fn best_value(arena: &Arena<'_>, s: usize, x: &[f64]) -> f64 {
    let sense = arena.chooser[s];
    let mut best = sense.worst();
    for c in &arena.choices[s] {
        let v = c.row.value(x, arena.nature);
        if sense.improves(v, best, 0.0) {
            best = v;
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Jacobi value iteration from below, with the qualitative sets fixed.
fn value_iteration(
    arena: &Arena<'_>,
    pos: &[bool],
    one: &[bool],
    epsilon: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = arena.len();
    let mut x: Vec<f64> = (0..n).map(|s| if one[s] { 1.0 } else { 0.0 }).collect();
    let unknown: Vec<usize> = (0..n).filter(|&s| pos[s] && !one[s]).collect();
    let mut residual = 0.0;
    for it in 1..=max_iterations {
        let mut next = x.clone();
        residual = 0.0;
        for &s in &unknown {
            let v = best_value(arena, s, &x).clamp(0.0, 1.0);
            debug_assert!(v >= x[s] - 1e-9, "value iteration must not decrease");
            residual = f64::max(residual, (v - x[s]).abs());
            next[s] = v;
        }
        x = next;
        if residual < epsilon {
            return Ok((x, it));
        }
    }
    Err(Error::Convergence {
        iterations: max_iterations,
        residual,
        last: ValueVector(x),
    })
}

fn argbest(sense: Sense, qs: impl Iterator<Item = f64>) -> Option<(usize, f64)> {
    let qs: Vec<f64> = qs.collect();
    let best = qs.iter().copied().fold(sense.worst(), |b, q| if sense.improves(q, b, 0.0) { q } else { b });
    qs.iter()
        .position(|&q| !sense.improves(best, q, IMPROVE_TOL))
        .map(|i| (i, best))
}

/// Exact values of the strategy pair obtained after fixing the maximizing
/// decisions by strategy improvement and solving the minimizing ones exactly.
#[allow(clippy::type_complexity)]
fn polish(arena: &Arena<'_>, target: &[bool], x: &[f64]) -> Result<(Vec<f64>, Vec<usize>, Vec<Vec<Distribution>>)> {
    let n = arena.len();
    let nature_max = arena.nature == Sense::Max;
    let max_state: Vec<bool> = (0..n).map(|s| arena.chooser[s] == Sense::Max).collect();
    let mut pick: Vec<usize> = (0..n)
        .map(|s| {
            argbest(arena.chooser[s], arena.choices[s].iter().map(|c| c.row.value(x, arena.nature)))
                .map_or(usize::MAX, |(i, _)| i)
        })
        .collect();
    let mut dists: Vec<Vec<Distribution>> = arena
        .choices
        .iter()
        .map(|cs| cs.iter().map(|c| c.row.optimize(x, arena.nature)).collect())
        .collect();

    for _ in 0..MAX_ROUNDS {
        let inner_choices: Vec<Vec<Choice<'_>>> = (0..n)
            .map(|s| {
                let make = |i: usize| Choice {
                    action: arena.choices[s][i].action,
                    row: if nature_max {
                        RowRef::Point(&dists[s][i])
                    } else {
                        arena.choices[s][i].row
                    },
                };
                if max_state[s] {
                    if pick[s] == usize::MAX {
                        Vec::new()
                    } else {
                        vec![make(pick[s])]
                    }
                } else {
                    (0..arena.choices[s].len()).map(make).collect()
                }
            })
            .collect();
        let inner = Arena {
            choices: inner_choices,
            chooser: vec![Sense::Min; n],
            nature: Sense::Min,
        };
        let (v, inner_pick, inner_dists) = solve_min(&inner, target, x)?;

        let mut changed = false;
        for s in 0..n {
            if target[s] || arena.choices[s].is_empty() {
                continue;
            }
            if nature_max {
                for (i, c) in arena.choices[s].iter().enumerate() {
                    let best = c.row.value(&v, Sense::Max);
                    if best > dists[s][i].expectation(&v) + IMPROVE_TOL {
                        dists[s][i] = c.row.optimize(&v, Sense::Max);
                        changed = true;
                    }
                }
            }
            if max_state[s] {
                let qs = arena.choices[s].iter().map(|c| c.row.value(&v, arena.nature));
                if let Some((i, best)) = argbest(Sense::Max, qs) {
                    if best > v[s] + IMPROVE_TOL && i != pick[s] {
                        pick[s] = i;
                        if nature_max {
                            dists[s][i] = arena.choices[s][i].row.optimize(&v, Sense::Max);
                        }
                        changed = true;
                    }
                }
            }
        }
        if changed {
            continue;
        }

        for s in 0..n {
            if max_state[s] {
                if !nature_max {
                    for (i, c) in arena.choices[s].iter().enumerate() {
                        dists[s][i] = if i == pick[s] {
                            inner_dists[s][0].clone()
                        } else {
                            c.row.optimize(&v, Sense::Min)
                        };
                    }
                }
            } else {
                pick[s] = inner_pick[s];
                if !nature_max {
                    dists[s] = inner_dists[s].clone();
                }
            }
        }
        return Ok((v, pick, dists));
    }
    Err(Error::Internal("strategy improvement for reachability did not stabilize".into()))
}

/// Exact minimal reachability in an arena where every decision minimizes.
#[allow(clippy::type_complexity)]
fn solve_min(arena: &Arena<'_>, target: &[bool], x: &[f64]) -> Result<(Vec<f64>, Vec<usize>, Vec<Vec<Distribution>>)> {
    let n = arena.len();
    // States from which the target can be avoided surely.
    let pos = graph::positive_reach(arena, target);
    let zero: Vec<bool> = pos.iter().map(|&p| !p).collect();
    let leave: Vec<f64> = pos.iter().map(|&p| if p { 1.0 } else { 0.0 }).collect();

    let mut pick = vec![usize::MAX; n];
    let mut dists: Vec<Vec<Distribution>> = Vec::with_capacity(n);
    for s in 0..n {
        let cs = &arena.choices[s];
        if zero[s] {
            dists.push(cs.iter().map(|c| c.row.optimize(&leave, Sense::Min)).collect());
            pick[s] = cs
                .iter()
                .position(|c| c.row.min_mass(&pos) <= POS_TOL)
                .unwrap_or(if cs.is_empty() { usize::MAX } else { 0 });
        } else {
            dists.push(cs.iter().map(|c| c.row.optimize(x, Sense::Min)).collect());
            pick[s] = argbest(Sense::Min, cs.iter().map(|c| c.row.value(x, Sense::Min))).map_or(usize::MAX, |(i, _)| i);
        }
    }

    for _ in 0..MAX_ROUNDS {
        let succ: Vec<Option<&Distribution>> = (0..n).map(|s| dists[s].get(pick[s])).collect();
        let v = chain_values(&succ, target, &zero)?;
        let mut changed = false;
        for s in 0..n {
            if zero[s] || target[s] {
                continue;
            }
            let cs = &arena.choices[s];
            for (i, c) in cs.iter().enumerate() {
                if c.row.is_point() {
                    continue;
                }
                if c.row.value(&v, Sense::Min) < dists[s][i].expectation(&v) - IMPROVE_TOL {
                    dists[s][i] = c.row.optimize(&v, Sense::Min);
                    changed = true;
                }
            }
            if let Some((i, best)) = argbest(Sense::Min, cs.iter().map(|c| c.row.value(&v, Sense::Min))) {
                if best < v[s] - IMPROVE_TOL && i != pick[s] {
                    pick[s] = i;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok((v, pick, dists));
        }
    }
    Err(Error::Internal("strategy improvement for reachability did not stabilize".into()))
}

/// Exact reachability in the chain with successor distributions `succ`;
/// states in `zero` are treated as never reaching the target.
pub(crate) fn chain_values(succ: &[Option<&Distribution>], target: &[bool], zero: &[bool]) -> Result<Vec<f64>> {
    let n = succ.len();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, d) in succ.iter().enumerate() {
        if let Some(d) = d {
            for t in d.support() {
                pred[t.0].push(s);
            }
        }
    }
    let mut reach = target.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    while let Some(t) = stack.pop() {
        for &s in &pred[t] {
            if !reach[s] && !zero[s] {
                reach[s] = true;
                stack.push(s);
            }
        }
    }
    let unknown: Vec<usize> = (0..n).filter(|&s| reach[s] && !target[s]).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &s) in unknown.iter().enumerate() {
        slot[s] = k;
    }
    let mut values: Vec<f64> = (0..n).map(|s| if target[s] { 1.0 } else { 0.0 }).collect();
    if unknown.is_empty() {
        return Ok(values);
    }
    let m = unknown.len();
    let mut a = DMatrix::<f64>::identity(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (k, &s) in unknown.iter().enumerate() {
        let d = succ[s].expect("states reaching the target have successors");
        for &(t, p) in d.entries() {
            if target[t.0] {
                b[k] += p;
            } else if slot[t.0] != usize::MAX {
                a[(k, slot[t.0])] -= p;
            }
        }
    }
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Internal("singular reachability system".into()))?;
    for (k, &s) in unknown.iter().enumerate() {
        values[s] = x[k].clamp(0.0, 1.0);
    }
    Ok(values)
}
