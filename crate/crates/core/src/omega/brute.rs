//! Exhaustive evaluation over positional strategies of both players.

use crate::error::{Error, Result};
use crate::model::{Bmdp, Distribution, Sense, StateId, ValueVector};
use crate::omega::chain_rabin;
use crate::polytope::bfs_vertices;

/// Largest number of strategy combinations [`brute_force_value`] accepts.
pub const BRUTE_FORCE_LIMIT: f64 = 1e6;

/// Distributions nature may pick for one row.
///
/// A maximizing nature only needs vertices. A minimizing nature sometimes has
/// to keep several successors alive at once (to visit a whole end component),
/// so the barycenter of every face spanned by vertices with a common support
/// bound is added as well.
fn candidates(vertices: Vec<Distribution>, nature: Sense) -> Result<Vec<Distribution>> {
    if nature == Sense::Max || vertices.len() == 1 {
        return Ok(vertices);
    }
    let succ: Vec<StateId> = {
        let mut s: Vec<StateId> = vertices.iter().flat_map(|v| v.support()).collect();
        s.sort();
        s.dedup();
        s
    };
    let mut out = vertices.clone();
    for mask in 1u32..(1u32 << succ.len()) {
        let inside = |s: StateId| succ.iter().position(|&t| t == s).is_some_and(|k| mask >> k & 1 == 1);
        let face: Vec<(f64, &Distribution)> = vertices
            .iter()
            .filter(|v| v.support().all(inside))
            .map(|v| (1.0, v))
            .collect();
        if face.len() < 2 {
            continue;
        }
        let center = Distribution::mix(&face)?;
        let dup = out.iter().any(|d| {
            d.entries().len() == center.entries().len()
                && d.entries()
                    .iter()
                    .zip(center.entries())
                    .all(|(a, b)| a.0 == b.0 && (a.1 - b.1).abs() < 1e-12)
        });
        if !dup {
            out.push(center);
        }
    }
    Ok(out)
}

/// Optimal acceptance values found by trying every positional controller
/// policy against every positional nature choice.
///
/// The controller maximizes; `nature` says whether the environment helps
/// (upper bound) or hinders (lower bound). Refuses models with more than
/// [`BRUTE_FORCE_LIMIT`] combinations.
pub fn brute_force_value(model: &Bmdp, nature: Sense) -> Result<ValueVector> {
    let sk = model.skeleton();
    let n = sk.num_states();
    let mut cands: Vec<Vec<Distribution>> = Vec::with_capacity(sk.num_actions());
    for row in model.rows() {
        cands.push(candidates(bfs_vertices(row)?, nature)?);
    }
    let combinations: f64 = sk
        .states()
        .map(|s| sk.available(s).iter().map(|a| cands[a.0].len() as f64).sum::<f64>())
        .product();
    if combinations > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            combinations,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let mut best = vec![0.0f64; n];
    let mut controller = vec![0usize; n];
    loop {
        // Nature's best response to this controller policy.
        let mut response = vec![nature.worst(); n];
        let mut pick = vec![0usize; n];
        loop {
            let succ: Vec<&Distribution> = (0..n)
                .map(|s| &cands[sk.available(StateId(s))[controller[s]].0][pick[s]])
                .collect();
            let v = chain_rabin(&succ, model.acceptance())?;
            for s in 0..n {
                response[s] = match nature {
                    Sense::Max => response[s].max(v[s]),
                    Sense::Min => response[s].min(v[s]),
                };
            }
            if !advance(&mut pick, |s| cands[sk.available(StateId(s))[controller[s]].0].len()) {
                break;
            }
        }
        for s in 0..n {
            best[s] = best[s].max(response[s]);
        }
        if !advance(&mut controller, |s| sk.available(StateId(s)).len()) {
            break;
        }
    }
    Ok(ValueVector(best))
}

/// Odometer step over `digits[s] < radix(s)`; false once it wraps around.
fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for s in 0..digits.len() {
        digits[s] += 1;
        if digits[s] < radix(s) {
            return true;
        }
        digits[s] = 0;
    }
    false
}
