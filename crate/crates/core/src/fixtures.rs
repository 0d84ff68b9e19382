//! Small example models shipped with the crate, taken from the files in the
//! repository's `fixtures/` directory.

use crate::format::{parse_dra, parse_model, Model};
use crate::model::{Bmdp, Mdp};
use crate::product::{Dra, LabelledBmdp};

pub const CHOICE: &str = include_str!("../../../fixtures/choice.bmdp");
pub const CHOICE_LABELLED: &str = include_str!("../../../fixtures/choice-labelled.bmdp");
pub const CHOICE_BEST: &str = include_str!("../../../fixtures/choice-best.bmdp");
pub const CHOICE_WORST: &str = include_str!("../../../fixtures/choice-worst.bmdp");
pub const THREE_SUCCESSORS: &str = include_str!("../../../fixtures/three-successors.bmdp");
pub const GRID_ACC1: &str = include_str!("../../../fixtures/grid-acc1.bmdp");
pub const GRID_ACC2: &str = include_str!("../../../fixtures/grid-acc2.bmdp");
pub const ALTERNATING: &str = include_str!("../../../fixtures/alternating.bmdp");
pub const EVENTUALLY_Y_OR_Z: &str = include_str!("../../../fixtures/eventually-y-or-z.dra");
pub const XYXZ: &str = include_str!("../../../fixtures/xyxz.dra");

fn plain(text: &str) -> Bmdp {
    match parse_model(text).expect("bundled model parses") {
        Model::Plain(m) => m,
        Model::Labelled(_) => panic!("expected an unlabelled model"),
    }
}

fn labelled(text: &str) -> LabelledBmdp {
    match parse_model(text).expect("bundled model parses") {
        Model::Labelled(m) => m,
        Model::Plain(_) => panic!("expected a labelled model"),
    }
}

/// Three states `q0 q1 q2`, actions `a b c d`, acceptance `({q2}, {q1})`.
pub fn choice() -> Bmdp {
    plain(CHOICE)
}

pub fn choice_labelled() -> LabelledBmdp {
    labelled(CHOICE_LABELLED)
}

/// Instantiation of [`choice`] where `q1` is reached surely.
pub fn choice_best() -> Mdp {
    plain(CHOICE_BEST).point_mdp().expect("point model")
}

/// Instantiation of [`choice`] where `q2` traps half of the runs.
pub fn choice_worst() -> Mdp {
    plain(CHOICE_WORST).point_mdp().expect("point model")
}

/// `q0` has one row with bounds `[0,0.9] [0.1,0.4] [0.3,0.7]`.
pub fn three_successors() -> Bmdp {
    plain(THREE_SUCCESSORS)
}

/// Six-state grid robot, red states `q3 q5`, green state `q1`.
pub fn grid_acc1() -> Bmdp {
    plain(GRID_ACC1)
}

pub fn grid_acc2() -> Bmdp {
    plain(GRID_ACC2)
}

/// Interval chain that may produce `x y x z` forever.
pub fn alternating() -> LabelledBmdp {
    labelled(ALTERNATING)
}

pub fn eventually_y_or_z() -> Dra {
    parse_dra(EVENTUALLY_Y_OR_Z).expect("bundled automaton parses")
}

/// Accepts only `(xyxz)^ω`.
pub fn xyxz() -> Dra {
    parse_dra(XYXZ).expect("bundled automaton parses")
}
