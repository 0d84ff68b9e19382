//! Results of a `check` run as a table for people and as key-value text for
//! tools.
//!
//! The key-value form has one `key = value` pair per line. Values are written
//! with 12 significant digits. Keys:
//!
//! ```text
//! objective = rabin
//! initial = q0
//! states = q0 q1 q2
//! lower.method = game
//! lower.iterations = 2
//! lower.millis = 0.41
//! lower.value.q0 = 5.00000000000e-1
//! lower.controller.q0 = a
//! lower.nature = q0 a -> q1:5.00000000000e-1 q2:5.00000000000e-1
//! ```
//!
//! `lower.nature` may repeat, once per action. The same keys exist with the
//! prefix `upper.`.

use std::fmt::Write as _;

use crate::format::{ErrorKind, PResult, ParseError};
use crate::model::{Distribution, NaturePolicy, PositionalPolicy, Skeleton, PROB_TOL};

/// One computed bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub method: String,
    /// Per state, in the order of [`CheckReport::states`].
    pub values: Vec<f64>,
    pub iterations: usize,
    pub millis: f64,
    /// `(state, action)`; empty when the method produces no strategies.
    pub controller: Vec<(String, String)>,
    /// `(state, action, distribution)`.
    pub nature: Vec<(String, String, Vec<(String, f64)>)>,
}

impl BoundReport {
    pub fn new(method: &str, values: Vec<f64>, iterations: usize, millis: f64) -> Self {
        BoundReport {
            method: method.to_string(),
            values,
            iterations,
            millis,
            controller: Vec::new(),
            nature: Vec::new(),
        }
    }

    /// Attaches strategies, naming states and actions through `sk`.
    pub fn with_strategies(mut self, sk: &Skeleton, controller: &PositionalPolicy, nature: &NaturePolicy) -> Self {
        self.controller = sk
            .states()
            .filter_map(|s| controller.get(s).map(|a| (sk.state_name(s).to_string(), sk.action_name(a).to_string())))
            .collect();
        self.nature = sk
            .actions()
            .iter()
            .enumerate()
            .map(|(i, act)| {
                let d: &Distribution = nature.get(crate::model::ActionId(i));
                (
                    sk.state_name(act.owner).to_string(),
                    act.name.clone(),
                    d.entries().iter().map(|&(t, p)| (sk.state_name(t).to_string(), p)).collect(),
                )
            })
            .collect();
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    /// `rabin` or `reach:s1,s2,...`.
    pub objective: String,
    pub states: Vec<String>,
    pub initial: String,
    pub lower: Option<BoundReport>,
    pub upper: Option<BoundReport>,
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

impl CheckReport {
    fn initial_index(&self) -> usize {
        self.states.iter().position(|s| *s == self.initial).unwrap_or(0)
    }

    pub fn lower_at_initial(&self) -> Option<f64> {
        self.lower.as_ref().map(|b| b.values[self.initial_index()])
    }

    pub fn upper_at_initial(&self) -> Option<f64> {
        self.upper.as_ref().map(|b| b.values[self.initial_index()])
    }

    /// States where the lower bound exceeds the upper bound by more than
    /// `1e-7`.
    pub fn inverted_states(&self) -> Vec<&str> {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => self
                .states
                .iter()
                .zip(l.values.iter().zip(&u.values))
                .filter(|(_, (l, u))| **l > **u + 1e-7)
                .map(|(s, _)| s.as_str())
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Machine-readable key-value text.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "objective = {}", self.objective);
        let _ = writeln!(out, "initial = {}", self.initial);
        let _ = writeln!(out, "states = {}", self.states.join(" "));
        for (prefix, bound) in [("lower", &self.lower), ("upper", &self.upper)] {
            let Some(b) = bound else { continue };
            let _ = writeln!(out, "{prefix}.method = {}", b.method);
            let _ = writeln!(out, "{prefix}.iterations = {}", b.iterations);
            let _ = writeln!(out, "{prefix}.millis = {:.3}", b.millis);
            for (s, v) in self.states.iter().zip(&b.values) {
                let _ = writeln!(out, "{prefix}.value.{s} = {}", num(*v));
            }
            for (s, a) in &b.controller {
                let _ = writeln!(out, "{prefix}.controller.{s} = {a}");
            }
            for (s, a, d) in &b.nature {
                let _ = write!(out, "{prefix}.nature = {s} {a} ->");
                for (t, p) in d {
                    let _ = write!(out, " {t}:{}", num(*p));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parses the output of [`to_key_value`](Self::to_key_value).
    pub fn from_key_value(text: &str) -> PResult<CheckReport> {
        let mut objective = None;
        let mut initial = None;
        let mut states: Option<Vec<String>> = None;
        let mut bounds: [Option<BoundReport>; 2] = [None, None];
        let mut values: [Vec<(String, f64)>; 2] = [Vec::new(), Vec::new()];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |msg: String| ParseError::at(ErrorKind::Syntax, line, 1, msg);
            let (key, value) = trimmed
                .split_once(" = ")
                .ok_or_else(|| err(format!("expected `key = value`, found `{trimmed}`")))?;
            let value = value.trim();
            match key {
                "objective" => objective = Some(value.to_string()),
                "initial" => initial = Some(value.to_string()),
                "states" => states = Some(value.split_whitespace().map(String::from).collect()),
                _ => {
                    let (slot, rest) = if let Some(r) = key.strip_prefix("lower.") {
                        (0, r)
                    } else if let Some(r) = key.strip_prefix("upper.") {
                        (1, r)
                    } else {
                        return Err(err(format!("unknown key `{key}`")));
                    };
                    let b = bounds[slot].get_or_insert_with(|| BoundReport::new("", Vec::new(), 0, 0.0));
                    let number = |v: &str| v.parse::<f64>().map_err(|_| err(format!("bad number `{v}`")));
                    if rest == "method" {
                        b.method = value.to_string();
                    } else if rest == "iterations" {
                        b.iterations = value.parse().map_err(|_| err(format!("bad count `{value}`")))?;
                    } else if rest == "millis" {
                        b.millis = number(value)?;
                    } else if let Some(s) = rest.strip_prefix("value.") {
                        values[slot].push((s.to_string(), number(value)?));
                    } else if let Some(s) = rest.strip_prefix("controller.") {
                        b.controller.push((s.to_string(), value.to_string()));
                    } else if rest == "nature" {
                        let (head, tail) = value
                            .split_once("->")
                            .ok_or_else(|| err("expected `state action -> succ:p ...`".into()))?;
                        let mut head = head.split_whitespace();
                        let (Some(s), Some(a), None) = (head.next(), head.next(), head.next()) else {
                            return Err(err("expected `state action` before `->`".into()));
                        };
                        let mut dist = Vec::new();
                        for item in tail.split_whitespace() {
                            let (t, p) = item.rsplit_once(':').ok_or_else(|| err(format!("bad entry `{item}`")))?;
                            dist.push((t.to_string(), number(p)?));
                        }
                        let total: f64 = dist.iter().map(|e| e.1).sum();
                        if (total - 1.0).abs() > PROB_TOL {
                            return Err(err(format!("distribution sums to {total}")));
                        }
                        b.nature.push((s.to_string(), a.to_string(), dist));
                    } else {
                        return Err(err(format!("unknown key `{key}`")));
                    }
                }
            }
        }
        let missing = |what: &str| ParseError::at(ErrorKind::Missing, 0, 0, format!("report has no `{what}` line"));
        let states = states.ok_or_else(|| missing("states"))?;
        let mut out = CheckReport {
            objective: objective.ok_or_else(|| missing("objective"))?,
            initial: initial.ok_or_else(|| missing("initial"))?,
            states,
            lower: None,
            upper: None,
        };
        for (slot, bound) in bounds.into_iter().enumerate() {
            let Some(mut b) = bound else { continue };
            let mut vals = vec![f64::NAN; out.states.len()];
            for (s, v) in &values[slot] {
                let k = out.states.iter().position(|t| t == s).ok_or_else(|| {
                    ParseError::at(ErrorKind::UnknownReference, 0, 0, format!("value for unknown state `{s}`"))
                })?;
                vals[k] = *v;
            }
            if let Some(k) = vals.iter().position(|v| v.is_nan()) {
                return Err(missing(&format!("value.{}", out.states[k])));
            }
            b.values = vals;
            if slot == 0 {
                out.lower = Some(b);
            } else {
                out.upper = Some(b);
            }
        }
        Ok(out)
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let width = self.states.iter().map(|s| s.len()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = write!(out, "{:width$}", "state");
        if self.lower.is_some() {
            let _ = write!(out, "  {:>14}", "lower");
        }
        if self.upper.is_some() {
            let _ = write!(out, "  {:>14}", "upper");
        }
        out.push('\n');
        for (k, s) in self.states.iter().enumerate() {
            let mark = if *s == self.initial { "*" } else { " " };
            let _ = write!(out, "{:width$}", s);
            for b in [&self.lower, &self.upper].into_iter().flatten() {
                let _ = write!(out, "  {:>14.9}", b.values[k]);
            }
            let _ = writeln!(out, " {mark}");
        }
        let _ = writeln!(out, "\nobjective {}, initial state {}", self.objective, self.initial);
        for (name, b) in [("lower", &self.lower), ("upper", &self.upper)] {
            if let Some(b) = b {
                let _ = writeln!(
                    out,
                    "{name}: {:.9} at {} (method {}, {} iterations, {:.3} ms)",
                    b.values[self.initial_index()],
                    self.initial,
                    b.method,
                    b.iterations,
                    b.millis
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CheckReport {
        let mut lower = BoundReport::new("game", vec![0.5, 1.0, 1.0 / 3.0], 2, 0.25);
        lower.controller = vec![("q0".into(), "a".into())];
        lower.nature = vec![("q0".into(), "a".into(), vec![("q1".into(), 0.3), ("q.2".into(), 0.7)])];
        CheckReport {
            objective: "reach:q1,q.2".into(),
            states: vec!["q0".into(), "q1".into(), "q.2".into()],
            initial: "q0".into(),
            lower: Some(lower),
            upper: Some(BoundReport::new("mec", vec![1.0, 1.0, 0.123456789012345], 7, 1.5)),
        }
    }

    #[test]
    fn key_value_round_trip() {
        let r = sample();
        let back = CheckReport::from_key_value(&r.to_key_value()).unwrap();
        assert_eq!(back.objective, r.objective);
        assert_eq!(back.states, r.states);
        assert_eq!(back.lower.as_ref().unwrap().controller, r.lower.as_ref().unwrap().controller);
        for (a, b) in [(&back.lower, &r.lower), (&back.upper, &r.upper)] {
            let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
            assert_eq!(a.method, b.method);
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() <= 1e-11 * y.abs().max(1e-300), "{x} vs {y}");
            }
        }
        assert_eq!(back.to_key_value(), r.to_key_value());
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.5), "5.00000000000e-1");
        assert_eq!(num(0.123456789012345), "1.23456789012e-1");
    }

    #[test]
    fn table_marks_initial_state() {
        let t = sample().to_table();
        assert!(t.lines().nth(1).unwrap().ends_with('*'));
        assert!(t.contains("lower: 0.500000000 at q0"));
    }

    #[test]
    fn malformed_reports() {
        assert_eq!(CheckReport::from_key_value("objective rabin").unwrap_err().kind, ErrorKind::Syntax);
        assert_eq!(CheckReport::from_key_value("objective = rabin\n").unwrap_err().kind, ErrorKind::Missing);
        let text = sample().to_key_value().replace("lower.value.q1 = 1.00000000000e0\n", "");
        assert_eq!(CheckReport::from_key_value(&text).unwrap_err().kind, ErrorKind::Missing);
    }

    #[test]
    fn inverted_bounds_are_reported() {
        let mut r = sample();
        r.upper.as_mut().unwrap().values[2] = 0.1;
        assert_eq!(r.inverted_states(), ["q.2"]);
    }
}
