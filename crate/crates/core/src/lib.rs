//! Lower and upper bounds for Rabin objectives on bounded-parameter MDPs.
//!
//! A BMDP attaches an interval to every transition probability. The upper
//! bound is the best acceptance probability over all consistent MDPs and
//! controllers; the lower bound is what a controller can guarantee when an
//! adversary resolves the intervals. The lower bound is computed on a
//! stochastic game whose second player picks vertices of the interval
//! polytopes; the upper bound only needs end components and robust
//! reachability.

mod arena;
pub mod bracket;
pub mod check;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod model;
pub mod omega;
pub mod polytope;
pub mod product;
pub mod random;
pub mod reach;
pub mod report;

pub use error::{Error, Result};
pub use model::{
    ActionId, Bmdp, Distribution, IntervalRow, MarkovChain, Mdp, NaturePolicy, PositionalPolicy, ProbInterval,
    RabinAcceptance, RabinPair, Sense, StateId, StochasticGame, ValueVector,
};
