//! Randomized check that reported bounds contain the optimal value of
//! sampled consistent MDPs.
//!
//! Sampling uses `ChaCha8Rng::seed_from_u64(seed)`. For every trial and every
//! action (in index order) one of two things happens: with probability 1/4 a
//! single vertex of the row is drawn uniformly; otherwise every vertex gets
//! the weight `-ln u` for a fresh uniform `u` in `(0, 1]` and the vertices are
//! mixed with the normalized weights.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::check::{reach_as_rabin, Objective};
use crate::error::{Error, Result};
use crate::model::{Bmdp, Distribution, Mdp};
use crate::omega::mdp_rabin_max;
use crate::polytope::bfs_vertices;
use crate::report::CheckReport;

/// Slack allowed on either side of the reported interval.
pub const BRACKET_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub trial: usize,
    pub state: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub sample: Mdp,
}

#[derive(Clone, Debug)]
pub struct BracketOutcome {
    pub trials: usize,
    pub violations: Vec<Counterexample>,
}

impl BracketOutcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Draws consistent MDPs of one model.
pub struct Sampler {
    vertices: Vec<Vec<Distribution>>,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(model: &Bmdp, seed: u64) -> Result<Self> {
        Ok(Sampler {
            vertices: model.rows().iter().map(bfs_vertices).collect::<Result<_>>()?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn sample(&mut self, model: &Bmdp) -> Result<Mdp> {
        let mut trans = Vec::with_capacity(self.vertices.len());
        for vs in &self.vertices {
            let d = if vs.len() == 1 || self.rng.gen_bool(0.25) {
                vs[self.rng.gen_range(0..vs.len())].clone()
            } else {
                let w: Vec<f64> = vs.iter().map(|_| -(1.0 - self.rng.gen::<f64>()).ln()).collect();
                let parts: Vec<(f64, &Distribution)> = w.iter().copied().zip(vs).collect();
                if w.iter().sum::<f64>() > 0.0 {
                    Distribution::mix(&parts)?
                } else {
                    vs[0].clone()
                }
            };
            trans.push(d);
        }
        Mdp::new(model.skeleton().clone(), trans, model.acceptance().clone())
    }
}

/// Samples `trials` consistent MDPs and checks that the optimal value of
/// each lies within the report's bounds. A missing lower bound counts as 0,
/// a missing upper bound as 1.
pub fn validate_bracket(model: &Bmdp, report: &CheckReport, trials: usize, seed: u64) -> Result<BracketOutcome> {
    let sk = model.skeleton();
    if report.states != sk.state_names() {
        return Err(Error::SkeletonMismatch("report states differ from the model's".into()));
    }
    let objective: Objective = report.objective.parse().map_err(Error::InvalidQuery)?;
    let model = match objective.targets(model)? {
        Some(t) => reach_as_rabin(model, &t),
        None => model.clone(),
    };
    let n = sk.num_states();
    let lower = report.lower.as_ref().map_or(vec![0.0; n], |b| b.values.clone());
    let upper = report.upper.as_ref().map_or(vec![1.0; n], |b| b.values.clone());
    let mut sampler = Sampler::new(&model, seed)?;
    let mut violations = Vec::new();
    for trial in 0..trials {
        let sample = sampler.sample(&model)?;
        let (values, _) = mdp_rabin_max(&sample)?;
        for s in 0..n {
            let v = values.0[s];
            if v < lower[s] - BRACKET_TOL || v > upper[s] + BRACKET_TOL {
                violations.push(Counterexample {
                    trial,
                    state: sk.state_names()[s].clone(),
                    value: v,
                    lower: lower[s],
                    upper: upper[s],
                    sample: sample.clone(),
                });
            }
        }
    }
    Ok(BracketOutcome { trials, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::{check, CheckOptions};
    use crate::fixtures;
    use crate::model::is_consistent;

    #[test]
    fn choice_model_is_bracketed() {
        let m = fixtures::choice();
        let r = check(&m, &CheckOptions::default()).unwrap().report;
        let out = validate_bracket(&m, &r, 100, 1).unwrap();
        assert!(out.passed(), "{:?}", out.violations.first().map(|c| (c.trial, &c.state, c.value)));
    }

    #[test]
    fn samples_are_consistent_and_deterministic() {
        let m = fixtures::grid_acc1();
        let mut a = Sampler::new(&m, 9).unwrap();
        let mut b = Sampler::new(&m, 9).unwrap();
        for _ in 0..20 {
            let x = a.sample(&m).unwrap();
            assert!(is_consistent(&x, &m).unwrap());
            assert_eq!(x, b.sample(&m).unwrap());
        }
    }

    #[test]
    fn point_model_samples_are_identical() {
        let m = fixtures::choice_worst().to_point_bmdp();
        let r = check(&m, &CheckOptions::default()).unwrap().report;
        assert!((r.lower_at_initial().unwrap() - r.upper_at_initial().unwrap()).abs() < 1e-9);
        assert!(validate_bracket(&m, &r, 20, 4).unwrap().passed());
    }

    #[test]
    fn corrupted_report_fails() {
        let m = fixtures::choice();
        let mut r = check(&m, &CheckOptions::default()).unwrap().report;
        for v in &mut r.upper.as_mut().unwrap().values {
            *v /= 2.0;
        }
        let out = validate_bracket(&m, &r, 100, 1).unwrap();
        assert!(!out.passed());
        assert!(out.violations.iter().any(|c| c.state == "q0" && c.value > c.upper));
    }

    #[test]
    fn reach_reports() {
        let m = fixtures::grid_acc1();
        let opts = CheckOptions {
            objective: Objective::Reach(vec!["q2".into()]),
            ..Default::default()
        };
        let r = check(&m, &opts).unwrap().report;
        assert!(validate_bracket(&m, &r, 50, 2).unwrap().passed());
    }
}
