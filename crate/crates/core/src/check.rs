//! The analysis behind the `check` command.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{instantiate, Bmdp, Mdp, RabinAcceptance, RabinPair, Sense, StateId};
use crate::omega::{
    bmdp_lower, bmdp_upper_game, bmdp_upper_with, brute_force_value, make_absorbing, GameResult,
};
use crate::reach::{bmdp_reach, ReachQuery, DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS};
use crate::report::{BoundReport, CheckReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
    Both,
}

impl Bound {
    fn lower(self) -> bool {
        self != Bound::Upper
    }

    fn upper(self) -> bool {
        self != Bound::Lower
    }
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lower" => Ok(Bound::Lower),
            "upper" => Ok(Bound::Upper),
            "both" => Ok(Bound::Both),
            _ => Err(format!("unknown bound `{s}` (expected upper, lower or both)")),
        }
    }
}

/// How the bounds are computed.
///
/// `Auto` uses the game for the lower bound and end components for the upper
/// bound. `Game` solves both on the game. `Mec` only changes the upper bound
/// (there is no MEC procedure for the lower one). `Brute` enumerates
/// strategies and reports no policies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Game,
    Mec,
    Brute,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Method::Auto),
            "game" => Ok(Method::Game),
            "mec" => Ok(Method::Mec),
            "brute" => Ok(Method::Brute),
            _ => Err(format!("unknown method `{s}` (expected auto, game, mec or brute)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    /// The model's own acceptance condition.
    Rabin,
    /// Reaching one of the named states.
    Reach(Vec<String>),
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "rabin" {
            return Ok(Objective::Rabin);
        }
        match s.strip_prefix("reach:") {
            Some(list) => {
                let names: Vec<String> = list.split(',').filter(|t| !t.is_empty()).map(String::from).collect();
                if names.is_empty() {
                    Err("reach objective needs at least one state".into())
                } else {
                    Ok(Objective::Reach(names))
                }
            }
            None => Err(format!("unknown objective `{s}` (expected rabin or reach:<states>)")),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Rabin => write!(f, "rabin"),
            Objective::Reach(t) => write!(f, "reach:{}", t.join(",")),
        }
    }
}

impl Objective {
    /// Target states of a reachability objective.
    pub fn targets(&self, model: &Bmdp) -> Result<Option<BTreeSet<StateId>>> {
        match self {
            Objective::Rabin => Ok(None),
            Objective::Reach(names) => names
                .iter()
                .map(|n| {
                    model
                        .skeleton()
                        .state_by_name(n)
                        .ok_or_else(|| Error::InvalidQuery(format!("unknown state `{n}`")))
                })
                .collect::<Result<BTreeSet<_>>>()
                .map(Some),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub bound: Bound,
    pub objective: Objective,
    pub method: Method,
    pub epsilon: f64,
    /// Limit for value iteration in reachability and MEC upper bounds.
    pub max_iterations: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            bound: Bound::Both,
            objective: Objective::Rabin,
            method: Method::Auto,
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

/// Report plus the full results behind it (absent for brute force).
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub report: CheckReport,
    pub lower: Option<GameResult>,
    pub upper: Option<GameResult>,
}

/// Reachability as a Rabin objective: targets become absorbing and must be
/// visited infinitely often.
pub fn reach_as_rabin(model: &Bmdp, targets: &BTreeSet<StateId>) -> Bmdp {
    let t: Vec<StateId> = targets.iter().copied().collect();
    make_absorbing(model, &t).with_acceptance(RabinAcceptance::new(vec![RabinPair::new([], t)]))
}

fn reach_bound(model: &Bmdp, targets: &BTreeSet<StateId>, nature: Sense, opts: &CheckOptions) -> Result<GameResult> {
    let q = ReachQuery::new(targets.iter().copied(), Sense::Max, nature)
        .with_epsilon(opts.epsilon)
        .with_max_iterations(opts.max_iterations);
    let (values, controller, nature) = bmdp_reach(model, &q)?;
    let witness: Mdp = instantiate(model, &nature)?;
    Ok(GameResult {
        values,
        controller,
        nature,
        witness,
        iterations: 0,
    })
}

pub fn check(model: &Bmdp, opts: &CheckOptions) -> Result<CheckOutcome> {
    let sk = model.skeleton();
    let targets = opts.objective.targets(model)?;
    let mut report = CheckReport {
        objective: opts.objective.to_string(),
        states: sk.state_names().to_vec(),
        initial: sk.state_name(sk.initial()).to_string(),
        lower: None,
        upper: None,
    };
    let mut outcome = (None, None);
    for nature in [Sense::Min, Sense::Max] {
        let wanted = match nature {
            Sense::Min => opts.bound.lower(),
            Sense::Max => opts.bound.upper(),
        };
        if !wanted {
            continue;
        }
        let start = Instant::now();
        let (method, result) = if opts.method == Method::Brute {
            let values = match &targets {
                Some(t) => brute_force_value(&reach_as_rabin(model, t), nature)?,
                None => brute_force_value(model, nature)?,
            };
            let millis = start.elapsed().as_secs_f64() * 1e3;
            let b = BoundReport::new("brute", values.0, 0, millis);
            match nature {
                Sense::Min => report.lower = Some(b),
                Sense::Max => report.upper = Some(b),
            }
            continue;
        } else if let Some(t) = &targets {
            ("value-iteration", reach_bound(model, t, nature, opts)?)
        } else if nature == Sense::Min {
            ("game", bmdp_lower(model)?)
        } else if opts.method == Method::Game {
            ("game", bmdp_upper_game(model)?)
        } else {
            ("mec", bmdp_upper_with(model, opts.epsilon, opts.max_iterations)?.0)
        };
        let millis = start.elapsed().as_secs_f64() * 1e3;
        let b = BoundReport::new(method, result.values.0.clone(), result.iterations, millis).with_strategies(
            sk,
            &result.controller,
            &result.nature,
        );
        match nature {
            Sense::Min => {
                report.lower = Some(b);
                outcome.0 = Some(result);
            }
            Sense::Max => {
                report.upper = Some(b);
                outcome.1 = Some(result);
            }
        }
    }
    Ok(CheckOutcome {
        report,
        lower: outcome.0,
        upper: outcome.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn at_initial(o: &CheckOutcome) -> (f64, f64) {
        (o.report.lower_at_initial().unwrap(), o.report.upper_at_initial().unwrap())
    }

    #[test]
    fn parses_options() {
        assert_eq!("both".parse::<Bound>(), Ok(Bound::Both));
        assert_eq!("brute".parse::<Method>(), Ok(Method::Brute));
        assert_eq!("reach:q1,q2".parse::<Objective>(), Ok(Objective::Reach(vec!["q1".into(), "q2".into()])));
        assert!("reach:".parse::<Objective>().is_err());
        assert!("buchi".parse::<Objective>().is_err());
    }

    #[test]
    fn every_method_agrees_on_the_grid() {
        for m in [fixtures::grid_acc1(), fixtures::grid_acc2()] {
            let base = at_initial(&check(&m, &CheckOptions::default()).unwrap());
            for method in [Method::Game, Method::Mec, Method::Brute] {
                let o = check(&m, &CheckOptions { method, ..Default::default() }).unwrap();
                let (l, u) = at_initial(&o);
                assert!((l - base.0).abs() < 1e-9 && (u - base.1).abs() < 1e-9, "{method:?}");
            }
        }
    }

    #[test]
    fn reachability() {
        let opts = CheckOptions {
            objective: Objective::Reach(vec!["q2".into()]),
            ..Default::default()
        };
        let m = fixtures::grid_acc1();
        let (l, u) = at_initial(&check(&m, &opts).unwrap());
        assert!((l - 0.1).abs() < 1e-6 && (u - 0.7).abs() < 1e-6);
        let brute = CheckOptions { method: Method::Brute, ..opts };
        let (l, u) = at_initial(&check(&m, &brute).unwrap());
        assert!((l - 0.1).abs() < 1e-9 && (u - 0.7).abs() < 1e-9);
    }

    #[test]
    fn single_bound() {
        let o = check(&fixtures::choice(), &CheckOptions { bound: Bound::Upper, ..Default::default() }).unwrap();
        assert!(o.report.lower.is_none() && o.lower.is_none());
        assert!((o.report.upper_at_initial().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unknown_target() {
        let opts = CheckOptions {
            objective: Objective::Reach(vec!["nowhere".into()]),
            ..Default::default()
        };
        assert!(matches!(check(&fixtures::choice(), &opts), Err(Error::InvalidQuery(_))));
    }
}
