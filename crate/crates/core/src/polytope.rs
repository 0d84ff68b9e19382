//! Vertices of `{p : Σ p = 1, lo ≤ p ≤ hi}` and greedy extreme points.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{ActionId, Bmdp, Distribution, IntervalRow, Sense, StateId, PROB_TOL};

/// Coordinate tolerance used to deduplicate vertices.
pub const VERTEX_TOL: f64 = 1e-12;

/// Rows with more successors are refused by [`bfs_vertices`].
pub const MAX_ENUM_SUCCESSORS: usize = 20;

/// The basic feasible solutions of one action's row.
#[derive(Clone, Debug, PartialEq)]
pub struct BfsSet {
    pub action: ActionId,
    pub vertices: Vec<Distribution>,
}

pub fn bfs_set(model: &Bmdp, action: ActionId) -> Result<BfsSet> {
    Ok(BfsSet {
        action,
        vertices: bfs_vertices(model.row(action))?,
    })
}

/// Enumerates the vertices of the row polytope.
///
/// Each vertex has at most one coordinate strictly inside its interval: for
/// every free coordinate `j` and every assignment of the others to a bound,
/// `p(j) = 1 - Σ others` is kept when it lies within `[lo(j), hi(j)]`.
/// Vertices are deduplicated and ordered lexicographically by coordinate
/// (successors in ascending index order).
pub fn bfs_vertices(row: &IntervalRow) -> Result<Vec<Distribution>> {
    if !row.is_feasible() {
        return Err(Error::InfeasibleRow {
            lo_sum: row.lo_sum(),
            hi_sum: row.hi_sum(),
        });
    }
    let e = row.entries();
    let n = e.len();
    if n > MAX_ENUM_SUCCESSORS {
        return Err(Error::RowTooLarge(n));
    }
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut coords = vec![0.0; n];
    for free in 0..n {
        for bits in 0u64..(1u64 << (n - 1)) {
            let mut rest = 0.0;
            let mut bit = 0;
            for (k, &(_, b)) in e.iter().enumerate() {
                if k == free {
                    continue;
                }
                coords[k] = if bits >> bit & 1 == 1 { b.hi } else { b.lo };
                rest += coords[k];
                bit += 1;
            }
            let b = e[free].1;
            let p = 1.0 - rest;
            if p < b.lo - PROB_TOL || p > b.hi + PROB_TOL {
                continue;
            }
            coords[free] = snap(p, b.lo, b.hi);
            found.push(coords.clone());
        }
    }
    found.sort_by(|a, b| lex_cmp(a, b));
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(found.len());
    for v in found {
        let dup = vertices
            .last()
            .is_some_and(|last| last.iter().zip(&v).all(|(x, y)| (x - y).abs() <= VERTEX_TOL));
        if !dup {
            vertices.push(v);
        }
    }
    Ok(vertices
        .into_iter()
        .map(|v| Distribution::from_sorted_unchecked(e.iter().zip(v).map(|(&(s, _), p)| (s, p))))
        .collect())
}

fn snap(p: f64, lo: f64, hi: f64) -> f64 {
    if (p - lo).abs() <= PROB_TOL {
        lo
    } else if (p - hi).abs() <= PROB_TOL {
        hi
    } else {
        p.clamp(lo, hi)
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Successor order for the greedy fill: best value first, ties by index.
fn greedy_order(row: &IntervalRow, values: &[f64], sense: Sense) -> Vec<usize> {
    let e = row.entries();
    let mut order: Vec<usize> = (0..e.len()).collect();
    order.sort_by(|&i, &j| {
        let (vi, vj) = (values[e[i].0 .0], values[e[j].0 .0]);
        let by_value = match sense {
            Sense::Max => vj.total_cmp(&vi),
            Sense::Min => vi.total_cmp(&vj),
        };
        by_value.then(e[i].0.cmp(&e[j].0))
    });
    order
}

fn greedy_fill(row: &IntervalRow, values: &[f64], sense: Sense) -> Vec<f64> {
    let e = row.entries();
    let mut p: Vec<f64> = e.iter().map(|(_, b)| b.lo).collect();
    let mut remaining = 1.0 - p.iter().sum::<f64>();
    for i in greedy_order(row, values, sense) {
        if remaining <= VERTEX_TOL {
            break;
        }
        let add = (e[i].1.hi - e[i].1.lo).min(remaining);
        p[i] += add;
        remaining -= add;
    }
    p
}

/// The distribution within the row's bounds that maximizes (or minimizes)
/// `Σ p(s)·values(s)`.
///
/// Starts every successor at its lower bound and raises successors toward
/// their upper bound in order of value (ties by ascending index) until the
/// mass reaches 1. The result is always a vertex of the row polytope.
pub fn extreme_distribution(row: &IntervalRow, values: &[f64], sense: Sense) -> Result<Distribution> {
    if !row.is_feasible() {
        return Err(Error::InfeasibleRow {
            lo_sum: row.lo_sum(),
            hi_sum: row.hi_sum(),
        });
    }
    let p = greedy_fill(row, values, sense);
    Ok(Distribution::from_sorted_unchecked(
        row.entries().iter().zip(p).map(|(&(s, _), q)| (s, q)),
    ))
}

/// Objective value of [`extreme_distribution`] without materializing it.
pub fn extreme_value(row: &IntervalRow, values: &[f64], sense: Sense) -> f64 {
    let p = greedy_fill(row, values, sense);
    row.entries()
        .iter()
        .zip(p)
        .map(|(&(s, _), q)| q * values[s.0])
        .sum()
}

/// Coordinates of `dist` over the row's successors, in row order.
pub fn coordinates(row: &IntervalRow, dist: &Distribution) -> Vec<f64> {
    row.entries().iter().map(|&(s, _)| dist.prob(s)).collect()
}

/// Successor states of the row, in coordinate order.
pub fn successors(row: &IntervalRow) -> Vec<StateId> {
    row.entries().iter().map(|&(s, _)| s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProbInterval;
    use proptest::prelude::*;

    fn row(bounds: &[(f64, f64)]) -> IntervalRow {
        IntervalRow::new(
            bounds
                .iter()
                .enumerate()
                .map(|(i, &(lo, hi))| (StateId(i), ProbInterval::new(lo, hi))),
        )
        .unwrap()
    }

    fn assert_vertices(r: &IntervalRow, expected: &[&[f64]]) {
        let got: Vec<Vec<f64>> = bfs_vertices(r).unwrap().iter().map(|d| coordinates(r, d)).collect();
        assert_eq!(got.len(), expected.len(), "{got:?}");
        for (g, e) in got.iter().zip(expected) {
            for (x, y) in g.iter().zip(e.iter()) {
                assert!((x - y).abs() <= 1e-12, "{got:?} vs {expected:?}");
            }
        }
    }

    #[test]
    fn five_corner_points() {
        let r = row(&[(0.0, 0.9), (0.1, 0.4), (0.3, 0.7)]);
        assert_vertices(
            &r,
            &[
                &[0.0, 0.3, 0.7],
                &[0.0, 0.4, 0.6],
                &[0.2, 0.1, 0.7],
                &[0.3, 0.4, 0.3],
                &[0.6, 0.1, 0.3],
            ],
        );
    }

    #[test]
    fn point_row_has_one_vertex() {
        assert_vertices(&row(&[(0.5, 0.5), (0.5, 0.5)]), &[&[0.5, 0.5]]);
    }

    #[test]
    fn two_successor_row() {
        // Worked by hand: free q1 with q2 at 0 gives (1, 0); free q2 with q1
        // at 0.5 gives (0.5, 0.5); the remaining assignments fall outside.
        assert_vertices(&row(&[(0.5, 1.0), (0.0, 1.0)]), &[&[0.5, 0.5], &[1.0, 0.0]]);
    }

    #[test]
    fn infeasible_row_is_an_error() {
        let r = row(&[(0.0, 0.4), (0.0, 0.5)]);
        assert!(matches!(bfs_vertices(&r), Err(Error::InfeasibleRow { .. })));
        assert!(extreme_distribution(&r, &[0.0, 0.0], Sense::Max).is_err());
    }

    #[test]
    fn greedy_max_and_min() {
        let r = row(&[(0.0, 0.9), (0.1, 0.4), (0.3, 0.7)]);
        let v = [1.0, 0.0, 0.0];
        let max = extreme_distribution(&r, &v, Sense::Max).unwrap();
        let c = coordinates(&r, &max);
        assert!((c[0] - 0.6).abs() < 1e-12 && (c[1] - 0.1).abs() < 1e-12 && (c[2] - 0.3).abs() < 1e-12);
        // Ties between q2 and q3 resolve toward the lower index.
        let min = extreme_distribution(&r, &v, Sense::Min).unwrap();
        let c = coordinates(&r, &min);
        assert!(c[0].abs() < 1e-12 && (c[1] - 0.4).abs() < 1e-12 && (c[2] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn constant_values_give_constant_objective() {
        let r = row(&[(0.0, 0.9), (0.1, 0.4), (0.3, 0.7)]);
        let v = [0.25; 3];
        for sense in [Sense::Max, Sense::Min] {
            assert!((extreme_value(&r, &v, sense) - 0.25).abs() < 1e-12);
            let d = extreme_distribution(&r, &v, sense).unwrap();
            // Lexicographic greedy: q1 raised first.
            let c = coordinates(&r, &d);
            assert!((c[0] - 0.6).abs() < 1e-12);
        }
    }

    fn feasible_row() -> impl Strategy<Value = IntervalRow> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 1..=6).prop_map(|raw| {
            // Bounds around a normalized center always satisfy Σlo ≤ 1 ≤ Σhi.
            let total: f64 = raw.iter().map(|r| r.0).sum::<f64>().max(1e-6);
            let bounds: Vec<(f64, f64)> = raw
                .iter()
                .map(|&(c, w1, w2)| {
                    let c = c / total;
                    let lo = (c - w1 * 0.5).max(0.0);
                    let hi = (c + w2 * 0.5).min(1.0);
                    ((lo * 20.0).floor() / 20.0, (hi * 20.0).ceil() / 20.0)
                })
                .collect();
            row(&bounds)
        })
    }

    proptest! {
        #[test]
        fn greedy_matches_best_vertex(r in feasible_row(), vals in prop::collection::vec(0.0f64..1.0, 6)) {
            let vertices = bfs_vertices(&r).unwrap();
            prop_assert!(!vertices.is_empty());
            for sense in [Sense::Max, Sense::Min] {
                let best = vertices
                    .iter()
                    .map(|d| d.expectation(&vals))
                    .fold(sense.worst(), |acc, x| if sense.improves(x, acc, 0.0) { x } else { acc });
                prop_assert!((extreme_value(&r, &vals, sense) - best).abs() <= 1e-12);
            }
        }

        #[test]
        fn vertices_have_one_free_coordinate(r in feasible_row()) {
            for d in bfs_vertices(&r).unwrap() {
                let total: f64 = d.entries().iter().map(|e| e.1).sum();
                prop_assert!((total - 1.0).abs() <= PROB_TOL);
                prop_assert!(r.contains(&d));
                let free = r
                    .entries()
                    .iter()
                    .filter(|&&(s, b)| {
                        let p = d.prob(s);
                        b.lo + 1e-12 < p && p < b.hi - 1e-12
                    })
                    .count();
                prop_assert!(free <= 1);
            }
        }

        #[test]
        fn point_rows_have_exactly_one_vertex(r in feasible_row()) {
            let d = extreme_distribution(&r, &[0.0; 6], Sense::Max).unwrap();
            let point = IntervalRow::point(&d);
            prop_assert_eq!(bfs_vertices(&point).unwrap().len(), 1);
        }
    }
}
