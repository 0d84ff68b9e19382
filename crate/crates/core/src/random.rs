//! Seeded random models for property tests and benchmarks.
//!
//! All numbers are multiples of 0.05 so that vertex coordinates are exact
//! enough to compare across solvers.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    Action, Bmdp, IntervalRow, ProbInterval, RabinAcceptance, RabinPair, Skeleton, StateId,
};

const GRID: u32 = 20;

/// Size limits for [`random_bmdp`].
#[derive(Clone, Copy, Debug)]
pub struct RandomShape {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_successors: usize,
    pub max_pairs: usize,
    /// Probability that a row keeps its point distribution (`lo = hi`).
    pub point_rows: f64,
    /// Probability that a non-initial state only has a self-loop. Without
    /// such traps small random models almost always have 0/1 values.
    pub absorbing: f64,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            max_states: 4,
            max_actions: 2,
            max_successors: 3,
            max_pairs: 2,
            point_rows: 0.2,
            absorbing: 0.4,
        }
    }
}

/// Random point distribution over `k` successors in units of `1/GRID`, each
/// entry at least one unit.
fn grid_point(rng: &mut impl Rng, k: usize) -> Vec<u32> {
    let mut cuts: Vec<u32> = (1..GRID).collect();
    cuts.shuffle(rng);
    let mut cuts = cuts[..k - 1].to_vec();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain([GRID]) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// A random valid BMDP.
///
/// Every row is built around a point distribution `p` on the grid; each
/// bound is then widened by 0 to 4 grid units (clamped to `[0, 1]`), with a
/// one in five chance of dropping `lo` to 0 so that successors may vanish.
pub fn random_bmdp(rng: &mut impl Rng, shape: RandomShape) -> Bmdp {
    let n = rng.gen_range(2.min(shape.max_states)..=shape.max_states);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut actions = Vec::new();
    let mut rows = Vec::new();
    for s in 0..n {
        if s > 0 && rng.gen_bool(shape.absorbing) {
            actions.push(Action {
                name: "loop".into(),
                owner: StateId(s),
            });
            rows.push(IntervalRow::new([(StateId(s), ProbInterval::point(1.0))]).expect("self-loop"));
            continue;
        }
        for k in 0..rng.gen_range(1..=shape.max_actions) {
            actions.push(Action {
                name: format!("a{k}"),
                owner: StateId(s),
            });
            // Prefer branching rows: single successors make values 0 or 1.
            let most = shape.max_successors.min(n);
            let fanout = if most > 1 && rng.gen_bool(0.8) { rng.gen_range(2..=most) } else { rng.gen_range(1..=most) };
            let mut succ: Vec<usize> = (0..n).collect();
            succ.shuffle(rng);
            succ.truncate(fanout);
            let p = grid_point(rng, fanout);
            let point = rng.gen_bool(shape.point_rows);
            let entries = succ.iter().zip(&p).map(|(&t, &u)| {
                let (lo, hi) = if point {
                    (u, u)
                } else {
                    let lo = if rng.gen_bool(0.2) { 0 } else { u.saturating_sub(rng.gen_range(0..=4)) };
                    (lo, (u + rng.gen_range(0..=4)).min(GRID))
                };
                (StateId(t), ProbInterval::new(lo as f64 / GRID as f64, hi as f64 / GRID as f64))
            });
            rows.push(IntervalRow::new(entries.collect::<Vec<_>>()).expect("distinct successors"));
        }
    }
    let acc = random_acceptance(rng, n, shape.max_pairs);
    let sk = Skeleton::new(states, StateId(0), actions).expect("generated skeleton is valid");
    Bmdp::new(sk, rows, acc).expect("generated rows are feasible")
}

/// A random BMDP whose rows are all points.
pub fn random_point_bmdp(rng: &mut impl Rng, shape: RandomShape) -> Bmdp {
    random_bmdp(rng, RandomShape { point_rows: 1.0, ..shape })
}

/// Between 1 and `max_pairs` pairs; each state lands in `F`, `I` or neither.
pub fn random_acceptance(rng: &mut impl Rng, n: usize, max_pairs: usize) -> RabinAcceptance {
    let pairs = (0..rng.gen_range(1..=max_pairs.max(1)))
        .map(|_| {
            let mut fin = Vec::new();
            let mut inf = Vec::new();
            for s in 0..n {
                match rng.gen_range(0..3) {
                    0 => fin.push(StateId(s)),
                    1 => inf.push(StateId(s)),
                    _ => {}
                }
            }
            RabinPair::new(fin, inf)
        })
        .collect();
    RabinAcceptance::new(pairs)
}
