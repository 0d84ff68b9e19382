//! Immutable representations of MDPs, bounded-parameter MDPs, Markov chains,
//! stochastic games, Rabin acceptance and policies.
//!
//! States and actions are interned to dense indices; names are only kept for
//! I/O. Every action is owned by exactly one state.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// Absolute tolerance for probability sums and bound comparisons.
pub const PROB_TOL: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Optimization direction of a player.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Max,
    Min,
}

impl Sense {
    /// True if `a` is strictly better than `b` by more than `tol`.
    #[inline]
    pub fn improves(self, a: f64, b: f64, tol: f64) -> bool {
        match self {
            Sense::Max => a > b + tol,
            Sense::Min => a < b - tol,
        }
    }

    #[inline]
    pub fn worst(self) -> f64 {
        match self {
            Sense::Max => f64::NEG_INFINITY,
            Sense::Min => f64::INFINITY,
        }
    }

    pub fn flip(self) -> Sense {
        match self {
            Sense::Max => Sense::Min,
            Sense::Min => Sense::Max,
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Max => "max",
            Sense::Min => "min",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ProbInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ProbInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        ProbInterval { lo, hi }
    }

    pub fn point(p: f64) -> Self {
        ProbInterval { lo: p, hi: p }
    }

    pub const ZERO: ProbInterval = ProbInterval { lo: 0.0, hi: 0.0 };

    pub fn contains(&self, p: f64) -> bool {
        self.lo - PROB_TOL <= p && p <= self.hi + PROB_TOL
    }
}

/// A probability distribution with strictly positive, sorted entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    entries: Vec<(StateId, f64)>,
}

impl Distribution {
    /// Builds a distribution, dropping zero entries. Fails on negative
    /// entries, duplicate states, or a total that is not 1 within [`PROB_TOL`].
    pub fn new(entries: impl IntoIterator<Item = (StateId, f64)>) -> Result<Self> {
        let mut kept: Vec<(StateId, f64)> = Vec::new();
        for (s, p) in entries {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("entry {p} for state {s}")));
            }
            if p > 0.0 {
                kept.push((s, p));
            }
        }
        let mut entries = kept;
        entries.sort_by_key(|&(s, _)| s);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution("duplicate successor".into()));
        }
        let total: f64 = entries.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Distribution { entries })
    }

    /// Sorted entries whose sum is already known to be 1 up to rounding;
    /// zero entries are dropped.
    pub(crate) fn from_sorted_unchecked(entries: impl IntoIterator<Item = (StateId, f64)>) -> Self {
        Distribution {
            entries: entries.into_iter().filter(|&(_, p)| p > 0.0).collect(),
        }
    }

    pub fn dirac(s: StateId) -> Self {
        Distribution {
            entries: vec![(s, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(StateId, f64)] {
        &self.entries
    }

    pub fn prob(&self, s: StateId) -> f64 {
        self.entries
            .binary_search_by_key(&s, |&(t, _)| t)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.iter().map(|&(s, _)| s)
    }

    /// Expected value of `values` (indexed by state).
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.entries.iter().map(|&(s, p)| p * values[s.0]).sum()
    }

    /// Convex combination of weighted distributions.
    pub fn mix(parts: &[(f64, &Distribution)]) -> Result<Self> {
        let mut acc: std::collections::BTreeMap<StateId, f64> = Default::default();
        let total: f64 = parts.iter().map(|&(w, _)| w).sum();
        for &(w, d) in parts {
            for &(s, p) in d.entries() {
                *acc.entry(s).or_default() += w / total * p;
            }
        }
        Distribution::new(acc)
    }
}

/// Interval bounds for the successors of one state-action pair. Successors
/// that do not appear have the interval `[0, 0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalRow {
    entries: Vec<(StateId, ProbInterval)>,
}

impl IntervalRow {
    pub fn new(entries: impl IntoIterator<Item = (StateId, ProbInterval)>) -> Result<Self> {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_by_key(|&(s, _)| s);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidModel("duplicate successor in interval row".into()));
        }
        Ok(IntervalRow { entries })
    }

    /// The row whose only consistent distribution is `dist`.
    pub fn point(dist: &Distribution) -> Self {
        IntervalRow {
            entries: dist
                .entries()
                .iter()
                .map(|&(s, p)| (s, ProbInterval::point(p)))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(StateId, ProbInterval)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bounds(&self, s: StateId) -> ProbInterval {
        self.entries
            .binary_search_by_key(&s, |&(t, _)| t)
            .map(|i| self.entries[i].1)
            .unwrap_or(ProbInterval::ZERO)
    }

    pub fn lo_sum(&self) -> f64 {
        self.entries.iter().map(|(_, b)| b.lo).sum()
    }

    pub fn hi_sum(&self) -> f64 {
        self.entries.iter().map(|(_, b)| b.hi).sum()
    }

    /// `Σ lo ≤ 1 ≤ Σ hi` within [`PROB_TOL`].
    pub fn is_feasible(&self) -> bool {
        self.lo_sum() <= 1.0 + PROB_TOL && self.hi_sum() >= 1.0 - PROB_TOL
    }

    pub fn is_point(&self) -> bool {
        self.entries.iter().all(|(_, b)| b.lo == b.hi)
    }

    /// Whether `dist` respects every bound of this row.
    pub fn contains(&self, dist: &Distribution) -> bool {
        self.first_violation(dist).is_none()
    }

    pub(crate) fn first_violation(&self, dist: &Distribution) -> Option<(StateId, f64, ProbInterval)> {
        for &(s, p) in dist.entries() {
            let b = self.bounds(s);
            if !b.contains(p) {
                return Some((s, p, b));
            }
        }
        for &(s, b) in &self.entries {
            let p = dist.prob(s);
            if !b.contains(p) {
                return Some((s, p, b));
            }
        }
        None
    }

    /// Replace the bounds by the point row of `dist` if it is one.
    pub fn as_point(&self) -> Option<Distribution> {
        if !self.is_point() {
            return None;
        }
        Distribution::new(self.entries.iter().map(|&(s, b)| (s, b.lo))).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub owner: StateId,
}

/// States, initial state and actions shared by all model kinds.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    states: Vec<String>,
    initial: StateId,
    actions: Vec<Action>,
    available: Vec<Vec<ActionId>>,
}

impl Skeleton {
    pub fn new(states: Vec<String>, initial: StateId, actions: Vec<Action>) -> Result<Self> {
        let n = states.len();
        if initial.0 >= n {
            return Err(Error::InvalidModel("initial state out of range".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &states {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate state `{name}`")));
            }
        }
        let mut available = vec![Vec::new(); n];
        let mut seen_actions = std::collections::HashSet::new();
        for (i, a) in actions.iter().enumerate() {
            if a.owner.0 >= n {
                return Err(Error::InvalidModel(format!("action `{}` has no owner", a.name)));
            }
            if !seen_actions.insert((a.owner, a.name.as_str())) {
                return Err(Error::InvalidModel(format!(
                    "duplicate action `{}` in state `{}`",
                    a.name, states[a.owner.0]
                )));
            }
            available[a.owner.0].push(ActionId(i));
        }
        Ok(Skeleton {
            states,
            initial,
            actions,
            available,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, a: ActionId) -> &Action {
        &self.actions[a.0]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.0].name
    }

    pub fn owner(&self, a: ActionId) -> StateId {
        self.actions[a.0].owner
    }

    pub fn available(&self, s: StateId) -> &[ActionId] {
        &self.available[s.0]
    }

    pub fn action_by_name(&self, s: StateId, name: &str) -> Option<ActionId> {
        self.available[s.0]
            .iter()
            .copied()
            .find(|&a| self.actions[a.0].name == name)
    }

    /// Same states, actions and ownership (names are ignored).
    pub fn same_shape(&self, other: &Skeleton) -> bool {
        self.states.len() == other.states.len()
            && self.actions.len() == other.actions.len()
            && self
                .actions
                .iter()
                .zip(&other.actions)
                .all(|(a, b)| a.owner == b.owner)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RabinPair {
    pub fin: BTreeSet<StateId>,
    pub inf: BTreeSet<StateId>,
}

impl RabinPair {
    pub fn new(fin: impl IntoIterator<Item = StateId>, inf: impl IntoIterator<Item = StateId>) -> Self {
        RabinPair {
            fin: fin.into_iter().collect(),
            inf: inf.into_iter().collect(),
        }
    }

    /// Accepting for a run whose infinitely-visited set is `inf_set`.
    pub fn accepts(&self, inf_set: &[bool]) -> bool {
        self.fin.iter().all(|s| !inf_set[s.0]) && self.inf.iter().any(|s| inf_set[s.0])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RabinAcceptance {
    pub pairs: Vec<RabinPair>,
}

impl RabinAcceptance {
    pub fn new(pairs: Vec<RabinPair>) -> Self {
        RabinAcceptance { pairs }
    }

    pub fn accepts(&self, inf_set: &[bool]) -> bool {
        self.pairs.iter().any(|p| p.accepts(inf_set))
    }
}

pub(crate) fn mask_of<'a>(n: usize, set: impl IntoIterator<Item = &'a StateId>) -> Vec<bool> {
    let mut m = vec![false; n];
    for s in set {
        m[s.0] = true;
    }
    m
}

/// A point-probability MDP.
#[derive(Clone, Debug, PartialEq)]
pub struct Mdp {
    skeleton: Skeleton,
    trans: Vec<Distribution>,
    acc: RabinAcceptance,
}

impl Mdp {
    pub fn new(skeleton: Skeleton, trans: Vec<Distribution>, acc: RabinAcceptance) -> Result<Self> {
        if trans.len() != skeleton.num_actions() {
            return Err(Error::InvalidModel("one distribution per action expected".into()));
        }
        for (a, d) in trans.iter().enumerate() {
            if let Some(&(s, _)) = d.entries().iter().find(|(s, _)| s.0 >= skeleton.num_states()) {
                return Err(Error::InvalidModel(format!("action {a} leads to unknown state {s}")));
            }
        }
        Ok(Mdp { skeleton, trans, acc })
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn num_states(&self) -> usize {
        self.skeleton.num_states()
    }

    pub fn trans(&self, a: ActionId) -> &Distribution {
        &self.trans[a.0]
    }

    pub fn transitions(&self) -> &[Distribution] {
        &self.trans
    }

    pub fn acceptance(&self) -> &RabinAcceptance {
        &self.acc
    }

    pub fn with_acceptance(&self, acc: RabinAcceptance) -> Mdp {
        Mdp {
            skeleton: self.skeleton.clone(),
            trans: self.trans.clone(),
            acc,
        }
    }

    /// The BMDP with point intervals whose only consistent MDP is `self`.
    pub fn to_point_bmdp(&self) -> Bmdp {
        Bmdp {
            skeleton: self.skeleton.clone(),
            rows: self.trans.iter().map(IntervalRow::point).collect(),
            acc: self.acc.clone(),
        }
    }
}

/// A bounded-parameter MDP: transition probabilities are closed intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct Bmdp {
    skeleton: Skeleton,
    rows: Vec<IntervalRow>,
    acc: RabinAcceptance,
}

impl Bmdp {
    pub fn new(skeleton: Skeleton, rows: Vec<IntervalRow>, acc: RabinAcceptance) -> Result<Self> {
        if rows.len() != skeleton.num_actions() {
            return Err(Error::InvalidModel("one interval row per action expected".into()));
        }
        Ok(Bmdp { skeleton, rows, acc })
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn num_states(&self) -> usize {
        self.skeleton.num_states()
    }

    pub fn row(&self, a: ActionId) -> &IntervalRow {
        &self.rows[a.0]
    }

    pub fn rows(&self) -> &[IntervalRow] {
        &self.rows
    }

    pub fn acceptance(&self) -> &RabinAcceptance {
        &self.acc
    }

    pub fn with_acceptance(&self, acc: RabinAcceptance) -> Bmdp {
        Bmdp {
            skeleton: self.skeleton.clone(),
            rows: self.rows.clone(),
            acc,
        }
    }

    pub(crate) fn with_rows(&self, rows: Vec<IntervalRow>) -> Bmdp {
        Bmdp {
            skeleton: self.skeleton.clone(),
            rows,
            acc: self.acc.clone(),
        }
    }

    /// The unique consistent MDP, if every row is a point row.
    pub fn point_mdp(&self) -> Option<Mdp> {
        let trans = self.rows.iter().map(IntervalRow::as_point).collect::<Option<Vec<_>>>()?;
        Mdp::new(self.skeleton.clone(), trans, self.acc.clone()).ok()
    }

    pub fn is_imc(&self) -> bool {
        self.skeleton.states().all(|s| self.skeleton.available(s).len() == 1)
    }
}

/// A Markov chain: one successor distribution per state.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChain {
    states: Vec<String>,
    initial: StateId,
    trans: Vec<Distribution>,
    acc: RabinAcceptance,
}

impl MarkovChain {
    pub fn new(states: Vec<String>, initial: StateId, trans: Vec<Distribution>, acc: RabinAcceptance) -> Result<Self> {
        if trans.len() != states.len() || initial.0 >= states.len() {
            return Err(Error::InvalidModel("one distribution per state expected".into()));
        }
        Ok(MarkovChain {
            states,
            initial,
            trans,
            acc,
        })
    }

    /// Unnamed chain over `0..trans.len()`.
    #[cfg(test)]
    pub(crate) fn anonymous(trans: Vec<Distribution>, acc: RabinAcceptance) -> Self {
        MarkovChain {
            states: (0..trans.len()).map(|i| i.to_string()).collect(),
            initial: StateId(0),
            trans,
            acc,
        }
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn trans(&self, s: StateId) -> &Distribution {
        &self.trans[s.0]
    }

    pub fn transitions(&self) -> &[Distribution] {
        &self.trans
    }

    pub fn acceptance(&self) -> &RabinAcceptance {
        &self.acc
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

/// An MDP whose states are partitioned between two players.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticGame {
    mdp: Mdp,
    owner: Vec<Player>,
}

impl StochasticGame {
    pub fn new(mdp: Mdp, owner: Vec<Player>) -> Result<Self> {
        if owner.len() != mdp.num_states() {
            return Err(Error::InvalidModel("ownership must cover every state".into()));
        }
        Ok(StochasticGame { mdp, owner })
    }

    pub fn mdp(&self) -> &Mdp {
        &self.mdp
    }

    pub fn owner(&self, s: StateId) -> Player {
        self.owner[s.0]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owner
    }
}

/// Memoryless deterministic policy; `None` for states it does not control.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalPolicy {
    choice: Vec<Option<ActionId>>,
}

impl PositionalPolicy {
    pub fn empty(n: usize) -> Self {
        PositionalPolicy { choice: vec![None; n] }
    }

    pub fn from_choices(choice: Vec<Option<ActionId>>) -> Self {
        PositionalPolicy { choice }
    }

    pub fn get(&self, s: StateId) -> Option<ActionId> {
        self.choice.get(s.0).copied().flatten()
    }

    pub fn set(&mut self, s: StateId, a: ActionId) {
        self.choice[s.0] = Some(a);
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn choices(&self) -> &[Option<ActionId>] {
        &self.choice
    }
}

/// Memoryless randomized policy: a weighted action set per state.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryPolicy {
    weights: Vec<Vec<(ActionId, f64)>>,
}

impl StationaryPolicy {
    pub fn from_weights(weights: Vec<Vec<(ActionId, f64)>>) -> Self {
        StationaryPolicy { weights }
    }

    pub fn weights(&self, s: StateId) -> &[(ActionId, f64)] {
        &self.weights[s.0]
    }

    pub fn is_positional(&self) -> bool {
        self.weights.iter().all(|w| w.len() <= 1)
    }
}

/// Nature's positional choice: one distribution per action (i.e. per
/// state-action pair, since actions are owned by single states).
#[derive(Clone, Debug, PartialEq)]
pub struct NaturePolicy {
    choice: Vec<Distribution>,
}

impl NaturePolicy {
    pub fn new(choice: Vec<Distribution>) -> Self {
        NaturePolicy { choice }
    }

    pub fn get(&self, a: ActionId) -> &Distribution {
        &self.choice[a.0]
    }

    pub fn choices(&self) -> &[Distribution] {
        &self.choice
    }
}

/// Per-state probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueVector(pub Vec<f64>);

impl ValueVector {
    pub fn get(&self, s: StateId) -> f64 {
        self.0[s.0]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest absolute pointwise difference.
    pub fn max_diff(&self, other: &ValueVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<StateId> for ValueVector {
    type Output = f64;
    fn index(&self, s: StateId) -> &f64 {
        &self.0[s.0]
    }
}

/// A single invariant violation found by [`validate_bmdp`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    IntervalOrder { action: ActionId, successor: StateId, lo: f64, hi: f64 },
    IntervalRange { action: ActionId, successor: StateId, lo: f64, hi: f64 },
    UnknownSuccessor { action: ActionId, successor: StateId },
    RowInfeasible { action: ActionId, lo_sum: f64, hi_sum: f64 },
    NoActions { state: StateId },
    ActionOwnership { action: ActionId },
    RabinOverlap { pair: usize, state: StateId },
    RabinUnknownState { pair: usize, state: StateId },
}

impl Violation {
    /// Human-readable message using the model's names.
    pub fn describe(&self, sk: &Skeleton) -> String {
        let act = |a: ActionId| {
            let own = sk.owner(a);
            format!("{} in state {}", sk.action_name(a), sk.state_name(own))
        };
        let st = |s: StateId| {
            sk.state_names()
                .get(s.0)
                .cloned()
                .unwrap_or_else(|| s.to_string())
        };
        match *self {
            Violation::IntervalOrder { action, successor, lo, hi } => {
                format!("action {}: interval [{lo}, {hi}] to {} has lo > hi", act(action), st(successor))
            }
            Violation::IntervalRange { action, successor, lo, hi } => {
                format!("action {}: interval [{lo}, {hi}] to {} leaves [0, 1]", act(action), st(successor))
            }
            Violation::UnknownSuccessor { action, successor } => {
                format!("action {}: unknown successor {successor}", act(action))
            }
            Violation::RowInfeasible { action, lo_sum, hi_sum } => format!(
                "action {}: bounds need sum lo <= 1 <= sum hi, got {lo_sum} and {hi_sum}",
                act(action)
            ),
            Violation::NoActions { state } => format!("state {} has no actions", st(state)),
            Violation::ActionOwnership { action } => {
                format!("action {action} is not listed exactly once under its owner")
            }
            Violation::RabinOverlap { pair, state } => {
                format!("rabin pair {pair}: state {} is in both sets", st(state))
            }
            Violation::RabinUnknownState { pair, state } => {
                format!("rabin pair {pair}: unknown state {state}")
            }
        }
    }
}

/// Reports every violated model invariant; an empty list means valid.
pub fn validate_bmdp(model: &Bmdp) -> Vec<Violation> {
    let sk = model.skeleton();
    let n = sk.num_states();
    let mut out = Vec::new();
    for s in sk.states() {
        if sk.available(s).is_empty() {
            out.push(Violation::NoActions { state: s });
        }
    }
    let mut listed = vec![0usize; sk.num_actions()];
    for s in sk.states() {
        for &a in sk.available(s) {
            listed[a.0] += 1;
            if sk.owner(a) != s {
                out.push(Violation::ActionOwnership { action: a });
            }
        }
    }
    for (i, &count) in listed.iter().enumerate() {
        if count != 1 {
            out.push(Violation::ActionOwnership { action: ActionId(i) });
        }
    }
    for (i, row) in model.rows().iter().enumerate() {
        let action = ActionId(i);
        for &(successor, b) in row.entries() {
            if successor.0 >= n {
                out.push(Violation::UnknownSuccessor { action, successor });
            }
            if b.lo > b.hi {
                out.push(Violation::IntervalOrder { action, successor, lo: b.lo, hi: b.hi });
            }
            if !(0.0..=1.0).contains(&b.lo) || !(0.0..=1.0).contains(&b.hi) {
                out.push(Violation::IntervalRange { action, successor, lo: b.lo, hi: b.hi });
            }
        }
        if !row.is_feasible() {
            out.push(Violation::RowInfeasible {
                action,
                lo_sum: row.lo_sum(),
                hi_sum: row.hi_sum(),
            });
        }
    }
    for (pair, p) in model.acceptance().pairs.iter().enumerate() {
        for &state in p.fin.iter().chain(&p.inf) {
            if state.0 >= n {
                out.push(Violation::RabinUnknownState { pair, state });
            }
        }
        for &state in p.fin.intersection(&p.inf) {
            out.push(Violation::RabinOverlap { pair, state });
        }
    }
    out
}

/// True iff every transition probability of `mdp` lies within the bounds of
/// `model` (tolerance [`PROB_TOL`]).
pub fn is_consistent(mdp: &Mdp, model: &Bmdp) -> Result<bool> {
    if !mdp.skeleton().same_shape(model.skeleton()) {
        return Err(Error::SkeletonMismatch(format!(
            "{} states / {} actions vs {} states / {} actions",
            mdp.num_states(),
            mdp.skeleton().num_actions(),
            model.num_states(),
            model.skeleton().num_actions()
        )));
    }
    Ok(mdp
        .transitions()
        .iter()
        .zip(model.rows())
        .all(|(d, row)| row.contains(d)))
}

/// Materializes the consistent MDP selected by `nature`.
pub fn instantiate(model: &Bmdp, nature: &NaturePolicy) -> Result<Mdp> {
    let m = model.skeleton().num_actions();
    if nature.choices().len() != m {
        return Err(Error::InvalidModel(format!(
            "nature policy covers {} of {m} actions",
            nature.choices().len()
        )));
    }
    for (i, (d, row)) in nature.choices().iter().zip(model.rows()).enumerate() {
        if let Some((state, prob, b)) = row.first_violation(d) {
            return Err(Error::BoundViolation {
                action: ActionId(i),
                state,
                prob,
                lo: b.lo,
                hi: b.hi,
            });
        }
    }
    Mdp::new(
        model.skeleton().clone(),
        nature.choices().to_vec(),
        model.acceptance().clone(),
    )
}

/// The Markov chain obtained by fixing `policy` in `mdp`.
pub fn induce_mc(mdp: &Mdp, policy: &PositionalPolicy) -> Result<MarkovChain> {
    let sk = mdp.skeleton();
    let mut trans = Vec::with_capacity(sk.num_states());
    for s in sk.states() {
        let a = policy.get(s).ok_or(Error::MissingChoice(s))?;
        if a.0 >= sk.num_actions() || sk.owner(a) != s {
            return Err(Error::UnavailableAction { state: s, action: a });
        }
        trans.push(mdp.trans(a).clone());
    }
    MarkovChain::new(
        sk.state_names().to_vec(),
        sk.initial(),
        trans,
        mdp.acceptance().clone(),
    )
}
