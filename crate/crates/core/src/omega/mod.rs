//! Rabin objectives: MDP solving, the BMDP to stochastic game reduction,
//! lower and upper bounds on BMDPs and a brute-force oracle.

mod bounds;
mod brute;
mod game;
mod mdp;

pub use bounds::{
    bmdp_lower, bmdp_upper, bmdp_upper_detailed, bmdp_upper_game, bmdp_upper_with, PairAnalysis, UpperDetails,
};
pub use brute::{brute_force_value, BRUTE_FORCE_LIMIT};
pub use game::{build_game, sg_rabin, GameSolution, EXHAUSTIVE_LIMIT};
pub use mdp::{mdp_rabin_max, mdp_rabin_min};

use crate::error::Result;
use crate::graph::bsccs_of;
use crate::model::{
    Bmdp, Distribution, IntervalRow, MarkovChain, Mdp, NaturePolicy, PositionalPolicy, RabinAcceptance,
    StateId, ValueVector,
};
use crate::reach::chain_values;

/// Values of a bound together with the strategies realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct GameResult {
    pub values: ValueVector,
    pub controller: PositionalPolicy,
    pub nature: NaturePolicy,
    /// `instantiate(model, nature)`.
    pub witness: Mdp,
    /// Strategy-improvement rounds (lower bound) or value-iteration sweeps
    /// (upper bound).
    pub iterations: usize,
}

/// Probability of acceptance from each state of a Markov chain.
pub fn mc_rabin(mc: &MarkovChain) -> Result<ValueVector> {
    let succ: Vec<&Distribution> = mc.transitions().iter().collect();
    chain_rabin(&succ, mc.acceptance()).map(ValueVector)
}

/// Probability of acceptance when `policy` is played in `mdp`.
pub fn evaluate_policy(mdp: &Mdp, policy: &PositionalPolicy) -> Result<ValueVector> {
    mc_rabin(&crate::model::induce_mc(mdp, policy)?)
}

/// A BSCC is accepting iff some pair misses `F` and meets `I` inside it;
/// the value is the probability of reaching an accepting BSCC.
pub(crate) fn chain_rabin(succ: &[&Distribution], acc: &RabinAcceptance) -> Result<Vec<f64>> {
    let n = succ.len();
    let owned: Vec<Distribution> = succ.iter().map(|d| (*d).clone()).collect();
    let mut good = vec![false; n];
    let mut inside = vec![false; n];
    for b in bsccs_of(&owned) {
        for &s in &b {
            inside[s] = true;
        }
        if acc.accepts(&inside) {
            for &s in &b {
                good[s] = true;
            }
        }
        for &s in &b {
            inside[s] = false;
        }
    }
    let opt: Vec<Option<&Distribution>> = succ.iter().map(|&d| Some(d)).collect();
    chain_values(&opt, &good, &vec![false; n])
}

/// The model with every action of `states` replaced by a self-loop.
pub fn make_absorbing(model: &Bmdp, states: &[StateId]) -> Bmdp {
    let sk = model.skeleton();
    let mut rows = model.rows().to_vec();
    for &s in states {
        for &a in sk.available(s) {
            rows[a.0] = IntervalRow::point(&Distribution::dirac(s));
        }
    }
    model.with_rows(rows)
}
