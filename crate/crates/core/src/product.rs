//! Labelled models, deterministic Rabin automata and their product.
//!
//! The automaton reads the label of the state being left: from `(s, q)` the
//! product moves to `(s', T(q, λ(s)))`. Only the part reachable from the
//! initial pair is built.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{
    Action, Bmdp, IntervalRow, RabinAcceptance, RabinPair, Skeleton, StateId,
};

/// A finite, nonempty set of letters in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
}

impl Alphabet {
    pub fn new(letters: Vec<String>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::AlphabetMismatch("alphabet is empty".into()));
        }
        let unique: BTreeSet<&String> = letters.iter().collect();
        if unique.len() != letters.len() {
            return Err(Error::AlphabetMismatch("duplicate letter".into()));
        }
        Ok(Alphabet { letters })
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, letter: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == letter)
    }
}

/// A BMDP whose acceptance is replaced by one letter per state.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledBmdp {
    model: Bmdp,
    labels: Vec<String>,
}

impl LabelledBmdp {
    /// The acceptance of `model` is dropped.
    pub fn new(model: Bmdp, labels: Vec<String>) -> Result<Self> {
        if labels.len() != model.num_states() {
            return Err(Error::InvalidModel(format!(
                "{} labels for {} states",
                labels.len(),
                model.num_states()
            )));
        }
        Ok(LabelledBmdp {
            model: model.with_acceptance(RabinAcceptance::default()),
            labels,
        })
    }

    pub fn model(&self) -> &Bmdp {
        &self.model
    }

    pub fn label(&self, s: StateId) -> &str {
        &self.labels[s.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Letters used by the labelling, in order of first use.
    pub fn alphabet(&self) -> Alphabet {
        let mut letters: Vec<String> = Vec::new();
        for l in &self.labels {
            if !letters.contains(l) {
                letters.push(l.clone());
            }
        }
        Alphabet { letters }
    }
}

/// Deterministic Rabin automaton with a total transition function.
#[derive(Clone, Debug, PartialEq)]
pub struct Dra {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    // trans[q][letter]
    trans: Vec<Vec<StateId>>,
    acc: RabinAcceptance,
}

impl Dra {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        trans: Vec<Vec<StateId>>,
        acc: RabinAcceptance,
    ) -> Result<Self> {
        let n = states.len();
        if initial.0 >= n {
            return Err(Error::InvalidModel("initial automaton state out of range".into()));
        }
        if trans.len() != n || trans.iter().any(|t| t.len() != alphabet.len()) {
            return Err(Error::InvalidModel("transition function is not total".into()));
        }
        if trans.iter().flatten().any(|q| q.0 >= n) {
            return Err(Error::InvalidModel("transition to unknown automaton state".into()));
        }
        for (i, p) in acc.pairs.iter().enumerate() {
            if p.fin.iter().chain(&p.inf).any(|q| q.0 >= n) {
                return Err(Error::InvalidModel(format!("rabin pair {i} names an unknown state")));
            }
            if p.fin.intersection(&p.inf).next().is_some() {
                return Err(Error::InvalidModel(format!("rabin pair {i} is not disjoint")));
            }
        }
        Ok(Dra {
            alphabet,
            states,
            initial,
            trans,
            acc,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn acceptance(&self) -> &RabinAcceptance {
        &self.acc
    }

    pub fn step(&self, q: StateId, letter: usize) -> StateId {
        self.trans[q.0][letter]
    }

    fn letter(&self, l: &str) -> Result<usize> {
        self.alphabet
            .index_of(l)
            .ok_or_else(|| Error::UnknownLetter(l.to_string()))
    }
}

/// Whether the automaton accepts `prefix · cycle^ω`.
pub fn dra_accepts_lasso<S: AsRef<str>>(dra: &Dra, prefix: &[S], cycle: &[S]) -> Result<bool> {
    if cycle.is_empty() {
        return Err(Error::InvalidQuery("lasso cycle must be nonempty".into()));
    }
    let prefix = prefix.iter().map(|l| dra.letter(l.as_ref())).collect::<Result<Vec<_>>>()?;
    let cycle = cycle.iter().map(|l| dra.letter(l.as_ref())).collect::<Result<Vec<_>>>()?;
    let mut q = dra.initial();
    for &l in &prefix {
        q = dra.step(q, l);
    }
    let mut seen: HashMap<(StateId, usize), usize> = HashMap::new();
    let mut trace = Vec::new();
    let mut pos = 0;
    let start = loop {
        if let Some(&i) = seen.get(&(q, pos)) {
            break i;
        }
        seen.insert((q, pos), trace.len());
        trace.push(q);
        q = dra.step(q, cycle[pos]);
        pos = (pos + 1) % cycle.len();
    };
    let mut inf = vec![false; dra.num_states()];
    for q in &trace[start..] {
        inf[q.0] = true;
    }
    Ok(dra.acceptance().accepts(&inf))
}

/// The reachable product of a labelled BMDP with a DRA.
///
/// Product states are named `s.q`; each keeps the action names of `s`.
/// Acceptance is the automaton's, lifted to every product state with the
/// corresponding automaton component.
pub fn build_product(model: &LabelledBmdp, dra: &Dra) -> Result<Bmdp> {
    let letter_of = model
        .labels()
        .iter()
        .map(|l| {
            dra.alphabet().index_of(l).ok_or_else(|| {
                Error::AlphabetMismatch(format!("label `{l}` is not in the automaton alphabet"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let base = model.model();
    let sk = base.skeleton();

    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let init = (sk.initial(), dra.initial());
    index.insert(init, 0);
    pairs.push(init);
    queue.push_back(init);
    while let Some((s, q)) = queue.pop_front() {
        let next_q = dra.step(q, letter_of[s.0]);
        for &a in sk.available(s) {
            for &(t, b) in base.row(a).entries() {
                if b.hi <= 0.0 {
                    continue;
                }
                let key = (t, next_q);
                if !index.contains_key(&key) {
                    index.insert(key, pairs.len());
                    pairs.push(key);
                    queue.push_back(key);
                }
            }
        }
    }

    let names = pairs
        .iter()
        .map(|&(s, q)| format!("{}.{}", sk.state_name(s), dra.states()[q.0]))
        .collect();
    let mut actions = Vec::new();
    let mut rows = Vec::new();
    for (i, &(s, q)) in pairs.iter().enumerate() {
        let next_q = dra.step(q, letter_of[s.0]);
        for &a in sk.available(s) {
            actions.push(Action {
                name: sk.action_name(a).to_string(),
                owner: StateId(i),
            });
            let entries = base
                .row(a)
                .entries()
                .iter()
                .filter_map(|&(t, b)| index.get(&(t, next_q)).map(|&j| (StateId(j), b)));
            rows.push(IntervalRow::new(entries)?);
        }
    }
    let acc = RabinAcceptance::new(
        dra.acceptance()
            .pairs
            .iter()
            .map(|p| {
                let lift = |set: &BTreeSet<StateId>| {
                    pairs
                        .iter()
                        .enumerate()
                        .filter(|(_, (_, q))| set.contains(q))
                        .map(|(i, _)| StateId(i))
                        .collect::<Vec<_>>()
                };
                RabinPair::new(lift(&p.fin), lift(&p.inf))
            })
            .collect(),
    );
    let skeleton = Skeleton::new(names, StateId(0), actions)?;
    Bmdp::new(skeleton, rows, acc)
}
