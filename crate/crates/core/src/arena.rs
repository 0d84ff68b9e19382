//! Uniform view over MDPs, stochastic games and interval models.
//!
//! Each state offers a list of choices; a choice is either a fixed
//! distribution or an interval row resolved by nature. The chooser of a
//! state optimizes in its own sense, nature in a global one.

use crate::model::{
    ActionId, Bmdp, Distribution, IntervalRow, Mdp, Player, Sense, StochasticGame, PROB_TOL,
};
use crate::polytope;

/// Masses at or below this threshold count as zero.
pub(crate) const POS_TOL: f64 = PROB_TOL;

#[derive(Clone, Copy, Debug)]
pub(crate) enum RowRef<'a> {
    Point(&'a Distribution),
    Interval(&'a IntervalRow),
}

impl<'a> RowRef<'a> {
    fn sums(row: &IntervalRow, mask: &[bool]) -> (f64, f64, f64, f64) {
        // (lo inside, hi inside, lo outside, hi outside)
        let mut r = (0.0, 0.0, 0.0, 0.0);
        for &(t, b) in row.entries() {
            if mask[t.0] {
                r.0 += b.lo;
                r.1 += b.hi;
            } else {
                r.2 += b.lo;
                r.3 += b.hi;
            }
        }
        r
    }

    /// Largest probability of `mask` over all consistent distributions.
    pub fn max_mass(&self, mask: &[bool]) -> f64 {
        match *self {
            RowRef::Point(d) => point_mass(d, mask),
            RowRef::Interval(row) => {
                let (_, hi_in, lo_out, _) = Self::sums(row, mask);
                hi_in.min(1.0 - lo_out).clamp(0.0, 1.0)
            }
        }
    }

    /// Smallest probability of `mask` over all consistent distributions.
    pub fn min_mass(&self, mask: &[bool]) -> f64 {
        match *self {
            RowRef::Point(d) => point_mass(d, mask),
            RowRef::Interval(row) => {
                let (lo_in, _, _, hi_out) = Self::sums(row, mask);
                lo_in.max(1.0 - hi_out).clamp(0.0, 1.0)
            }
        }
    }

    /// Some consistent distribution is supported inside `within`.
    pub fn can_stay(&self, within: &[bool]) -> bool {
        match *self {
            RowRef::Point(d) => d.support().all(|t| within[t.0]),
            RowRef::Interval(row) => {
                let (_, hi_in, _, _) = Self::sums(row, within);
                row.entries().iter().all(|&(t, b)| within[t.0] || b.lo <= 0.0) && hi_in >= 1.0 - PROB_TOL
            }
        }
    }

    /// Every consistent distribution is supported inside `within`.
    pub fn must_stay(&self, within: &[bool]) -> bool {
        match *self {
            RowRef::Point(d) => d.support().all(|t| within[t.0]),
            RowRef::Interval(_) => {
                let outside: Vec<bool> = within.iter().map(|b| !b).collect();
                self.max_mass(&outside) <= POS_TOL
            }
        }
    }

    /// Largest probability of `target` among distributions supported inside
    /// `within`. Only meaningful when [`Self::can_stay`] holds.
    pub fn stay_max_mass(&self, within: &[bool], target: &[bool]) -> f64 {
        match *self {
            RowRef::Point(d) => point_mass(d, target),
            RowRef::Interval(row) => {
                let mut hi_hit = 0.0;
                let mut lo_miss = 0.0;
                for &(t, b) in row.entries() {
                    if !within[t.0] {
                        continue;
                    }
                    if target[t.0] {
                        hi_hit += b.hi;
                    } else {
                        lo_miss += b.lo;
                    }
                }
                f64::min(hi_hit, 1.0 - lo_miss).clamp(0.0, 1.0)
            }
        }
    }

    /// Successors reachable with positive probability by some distribution
    /// supported inside `within`.
    pub fn stay_successors(&self, within: &[bool], out: &mut Vec<usize>) {
        match *self {
            RowRef::Point(d) => out.extend(d.support().map(|t| t.0).filter(|&t| within[t])),
            RowRef::Interval(row) => {
                let lo_in: f64 = row
                    .entries()
                    .iter()
                    .filter(|(t, _)| within[t.0])
                    .map(|(_, b)| b.lo)
                    .sum();
                for &(t, b) in row.entries() {
                    if within[t.0] && b.hi.min(1.0 - (lo_in - b.lo)) > POS_TOL {
                        out.push(t.0);
                    }
                }
            }
        }
    }

    /// Optimal expectation of `values` when nature plays `nature`.
    pub fn value(&self, values: &[f64], nature: Sense) -> f64 {
        match *self {
            RowRef::Point(d) => d.expectation(values),
            RowRef::Interval(row) => polytope::extreme_value(row, values, nature),
        }
    }

    /// Distribution realizing [`Self::value`].
    pub fn optimize(&self, values: &[f64], nature: Sense) -> Distribution {
        match *self {
            RowRef::Point(d) => d.clone(),
            RowRef::Interval(row) => polytope::extreme_distribution(row, values, nature)
                .expect("arena rows are feasible"),
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, RowRef::Point(_))
    }
}

fn point_mass(d: &Distribution, mask: &[bool]) -> f64 {
    d.entries().iter().filter(|(t, _)| mask[t.0]).map(|&(_, p)| p).sum()
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Choice<'a> {
    pub action: ActionId,
    pub row: RowRef<'a>,
}

#[derive(Clone, Debug)]
pub(crate) struct Arena<'a> {
    pub choices: Vec<Vec<Choice<'a>>>,
    pub chooser: Vec<Sense>,
    pub nature: Sense,
}

impl<'a> Arena<'a> {
    pub fn from_mdp(mdp: &'a Mdp, sense: Sense) -> Self {
        Self::from_mdp_filtered(mdp, sense, |_| true)
    }

    pub fn from_mdp_filtered(mdp: &'a Mdp, sense: Sense, allow: impl Fn(ActionId) -> bool) -> Self {
        let sk = mdp.skeleton();
        let choices = sk
            .states()
            .map(|s| {
                sk.available(s)
                    .iter()
                    .copied()
                    .filter(|&a| allow(a))
                    .map(|a| Choice {
                        action: a,
                        row: RowRef::Point(mdp.trans(a)),
                    })
                    .collect()
            })
            .collect();
        Arena {
            choices,
            chooser: vec![sense; sk.num_states()],
            nature: Sense::Max,
        }
    }

    pub fn from_game(game: &'a StochasticGame, p1: Sense, p2: Sense) -> Self {
        let mut arena = Self::from_mdp(game.mdp(), p1);
        for (s, &o) in game.owners().iter().enumerate() {
            if o == Player::Two {
                arena.chooser[s] = p2;
            }
        }
        arena
    }

    pub fn from_bmdp(model: &'a Bmdp, controller: Sense, nature: Sense) -> Self {
        let sk = model.skeleton();
        let choices = sk
            .states()
            .map(|s| {
                sk.available(s)
                    .iter()
                    .map(|&a| Choice {
                        action: a,
                        row: RowRef::Interval(model.row(a)),
                    })
                    .collect()
            })
            .collect();
        Arena {
            choices,
            chooser: vec![controller; sk.num_states()],
            nature,
        }
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }
}
