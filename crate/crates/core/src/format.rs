//! Line-oriented text formats for models and automata.
//!
//! Model files:
//!
//! ```text
//! bmdp                      # or labelled-bmdp
//! states q0 q1 q2
//! init q0
//! label q0 x                # labelled models only, one per state
//! action q0 a
//!   to q1 [0.5, 1.0]
//!   to q2 [0.0, 1.0]
//! rabin { q2 } { q1 }       # plain models only, one line per pair
//! ```
//!
//! Automaton files:
//!
//! ```text
//! dra
//! alphabet x y z
//! states s0 s1
//! init s0
//! trans s0 x s1             # one line per (state, letter)
//! rabin { s0 } { s1 }
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use crate::model::{
    validate_bmdp, Action, Bmdp, Distribution, IntervalRow, Mdp, ProbInterval, RabinAcceptance,
    RabinPair, Skeleton, StateId,
};
use crate::product::{Alphabet, Dra, LabelledBmdp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    UnknownReference,
    Duplicate,
    Missing,
    /// The text parsed but the model breaks an invariant.
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(kind: ErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            line,
            column,
            message: message.into(),
        }
    }

    fn new(kind: ErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            line: pos.line,
            column: pos.col,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

pub(crate) type PResult<T> = std::result::Result<T, ParseError>;

#[derive(Copy, Clone, Debug, Default)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Clone, Debug)]
struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

fn is_symbol(c: char) -> bool {
    matches!(c, '{' | '}' | '[' | ']' | ',')
}

fn tokenize(line: &str, lineno: usize) -> Vec<Token<'_>> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let pos = Pos {
            line: lineno,
            col: line[..i].chars().count() + 1,
        };
        if c.is_whitespace() {
            chars.next();
        } else if is_symbol(c) {
            chars.next();
            out.push(Token {
                text: &line[i..i + c.len_utf8()],
                pos,
            });
        } else {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if d.is_whitespace() || is_symbol(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push(Token {
                text: &line[i..end],
                pos,
            });
        }
    }
    out
}

/// Non-empty tokenized lines.
fn lines(text: &str) -> Vec<Vec<Token<'_>>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| tokenize(l, i + 1))
        .filter(|t| !t.is_empty())
        .collect()
}

struct Cursor<'a, 't> {
    toks: &'t [Token<'a>],
    i: usize,
}

impl<'a, 't> Cursor<'a, 't> {
    fn new(toks: &'t [Token<'a>]) -> Self {
        Cursor { toks, i: 1 }
    }

    fn end_pos(&self) -> Pos {
        let last = self.toks.last().expect("non-empty line");
        Pos {
            line: last.pos.line,
            col: last.pos.col + last.text.chars().count(),
        }
    }

    fn next(&mut self, what: &str) -> PResult<&'t Token<'a>> {
        let t = self
            .toks
            .get(self.i)
            .ok_or_else(|| ParseError::new(ErrorKind::Syntax, self.end_pos(), format!("expected {what}")))?;
        self.i += 1;
        Ok(t)
    }

    fn ident(&mut self, what: &str) -> PResult<&'t Token<'a>> {
        let t = self.next(what)?;
        if t.text.chars().all(is_symbol) {
            return Err(ParseError::new(
                ErrorKind::Syntax,
                t.pos,
                format!("expected {what}, found `{}`", t.text),
            ));
        }
        Ok(t)
    }

    fn expect(&mut self, sym: &str) -> PResult<()> {
        let t = self.next(&format!("`{sym}`"))?;
        if t.text != sym {
            return Err(ParseError::new(
                ErrorKind::Syntax,
                t.pos,
                format!("expected `{sym}`, found `{}`", t.text),
            ));
        }
        Ok(())
    }

    fn number(&mut self) -> PResult<f64> {
        let t = self.ident("a number")?;
        match t.text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(ParseError::new(
                ErrorKind::Syntax,
                t.pos,
                format!("`{}` is not a number", t.text),
            )),
        }
    }

    /// `{ a b c }`
    fn set(&mut self) -> PResult<Vec<&'t Token<'a>>> {
        self.expect("{")?;
        let mut out = Vec::new();
        loop {
            let t = self.next("`}`")?;
            if t.text == "}" {
                return Ok(out);
            }
            if t.text.chars().all(is_symbol) {
                return Err(ParseError::new(ErrorKind::Syntax, t.pos, format!("unexpected `{}`", t.text)));
            }
            out.push(t);
        }
    }

    fn rest(&mut self) -> &'t [Token<'a>] {
        let r = &self.toks[self.i..];
        self.i = self.toks.len();
        r
    }

    fn done(&self) -> PResult<()> {
        match self.toks.get(self.i) {
            None => Ok(()),
            Some(t) => Err(ParseError::new(
                ErrorKind::Syntax,
                t.pos,
                format!("unexpected `{}`", t.text),
            )),
        }
    }
}

struct Names {
    names: Vec<String>,
    index: HashMap<String, usize>,
    pos: Pos,
}

impl Names {
    fn declare(toks: &[Token<'_>], what: &str) -> PResult<Names> {
        let mut names = Vec::new();
        let mut index = HashMap::new();
        for t in toks {
            if t.text.chars().all(is_symbol) {
                return Err(ParseError::new(ErrorKind::Syntax, t.pos, format!("unexpected `{}`", t.text)));
            }
            if index.insert(t.text.to_string(), names.len()).is_some() {
                return Err(ParseError::new(
                    ErrorKind::Duplicate,
                    t.pos,
                    format!("{what} `{}` declared twice", t.text),
                ));
            }
            names.push(t.text.to_string());
        }
        Ok(Names {
            names,
            index,
            pos: Pos::default(),
        })
    }

    fn get(&self, t: &Token<'_>, what: &str) -> PResult<StateId> {
        self.index
            .get(t.text)
            .map(|&i| StateId(i))
            .ok_or_else(|| ParseError::new(ErrorKind::UnknownReference, t.pos, format!("unknown {what} `{}`", t.text)))
    }
}

fn once<T>(slot: &mut Option<T>, value: T, pos: Pos, what: &str) -> PResult<()> {
    if slot.is_some() {
        return Err(ParseError::new(ErrorKind::Duplicate, pos, format!("`{what}` given twice")));
    }
    *slot = Some(value);
    Ok(())
}

fn required<'n>(names: &'n Option<Names>, t: &Token<'_>) -> PResult<&'n Names> {
    names
        .as_ref()
        .ok_or_else(|| ParseError::new(ErrorKind::Missing, t.pos, "`states` must come first"))
}

fn parse_pair(c: &mut Cursor<'_, '_>, names: &Names, what: &str) -> PResult<RabinPair> {
    let fin = c.set()?;
    let inf = c.set()?;
    c.done()?;
    let fin = fin.iter().map(|t| names.get(t, what)).collect::<PResult<Vec<_>>>()?;
    let inf = inf.iter().map(|t| names.get(t, what)).collect::<PResult<Vec<_>>>()?;
    Ok(RabinPair::new(fin, inf))
}

/// A parsed model file.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Plain(Bmdp),
    Labelled(LabelledBmdp),
}

impl Model {
    pub fn bmdp(&self) -> &Bmdp {
        match self {
            Model::Plain(m) => m,
            Model::Labelled(m) => m.model(),
        }
    }
}

struct RawModel {
    model: Model,
    action_lines: Vec<usize>,
    rabin_lines: Vec<usize>,
}

/// Parses a model file without checking model invariants.
pub fn parse_model_raw(text: &str) -> PResult<Model> {
    parse_model_inner(text).map(|r| r.model)
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> PResult<Model> {
    let raw = parse_model_inner(text)?;
    let bmdp = raw.model.bmdp();
    if let Some(v) = validate_bmdp(bmdp).first() {
        use crate::model::Violation::*;
        let line = match *v {
            IntervalOrder { action, .. }
            | IntervalRange { action, .. }
            | UnknownSuccessor { action, .. }
            | RowInfeasible { action, .. }
            | ActionOwnership { action } => raw.action_lines.get(action.0).copied().unwrap_or(0),
            RabinOverlap { pair, .. } | RabinUnknownState { pair, .. } => {
                raw.rabin_lines.get(pair).copied().unwrap_or(0)
            }
            NoActions { .. } => 0,
        };
        return Err(ParseError {
            kind: ErrorKind::Invalid,
            line,
            column: 1,
            message: v.describe(bmdp.skeleton()),
        });
    }
    Ok(raw.model)
}

fn parse_model_inner(text: &str) -> PResult<RawModel> {
    let lines = lines(text);
    let Some(first) = lines.first() else {
        return Err(ParseError::new(
            ErrorKind::Syntax,
            Pos { line: 1, col: 1 },
            "empty input, expected `bmdp` or `labelled-bmdp`",
        ));
    };
    let labelled = match first[0].text {
        "bmdp" => false,
        "labelled-bmdp" => true,
        other => {
            return Err(ParseError::new(
                ErrorKind::Syntax,
                first[0].pos,
                format!("expected `bmdp` or `labelled-bmdp`, found `{other}`"),
            ))
        }
    };
    Cursor::new(first).done()?;

    let mut states: Option<Names> = None;
    let mut init: Option<StateId> = None;
    let mut labels: BTreeMap<StateId, String> = BTreeMap::new();
    let mut actions: Vec<Action> = Vec::new();
    let mut action_lines = Vec::new();
    let mut rows: Vec<Vec<(StateId, ProbInterval)>> = Vec::new();
    let mut seen_actions: HashMap<(StateId, String), ()> = HashMap::new();
    let mut pairs = Vec::new();
    let mut rabin_lines = Vec::new();

    for toks in &lines[1..] {
        let head = &toks[0];
        let mut c = Cursor::new(toks);
        match head.text {
            "states" => {
                let mut names = Names::declare(c.rest(), "state")?;
                if names.names.is_empty() {
                    return Err(ParseError::new(ErrorKind::Syntax, c.end_pos(), "expected state names"));
                }
                names.pos = head.pos;
                once(&mut states, names, head.pos, "states")?;
            }
            "init" => {
                let names = required(&states, head)?;
                let s = names.get(c.ident("a state")?, "state")?;
                c.done()?;
                once(&mut init, s, head.pos, "init")?;
            }
            "label" if labelled => {
                let names = required(&states, head)?;
                let s = names.get(c.ident("a state")?, "state")?;
                let letter = c.ident("a letter")?;
                c.done()?;
                if labels.insert(s, letter.text.to_string()).is_some() {
                    return Err(ParseError::new(ErrorKind::Duplicate, head.pos, "state labelled twice"));
                }
            }
            "action" => {
                let names = required(&states, head)?;
                let s = names.get(c.ident("a state")?, "state")?;
                let name = c.ident("an action name")?;
                c.done()?;
                if seen_actions.insert((s, name.text.to_string()), ()).is_some() {
                    return Err(ParseError::new(
                        ErrorKind::Duplicate,
                        name.pos,
                        format!("action `{}` declared twice in this state", name.text),
                    ));
                }
                actions.push(Action {
                    name: name.text.to_string(),
                    owner: s,
                });
                action_lines.push(head.pos.line);
                rows.push(Vec::new());
            }
            "to" => {
                let names = required(&states, head)?;
                let Some(row) = rows.last_mut() else {
                    return Err(ParseError::new(ErrorKind::Syntax, head.pos, "`to` outside of an action"));
                };
                let succ_tok = c.ident("a state")?;
                let succ = names.get(succ_tok, "state")?;
                c.expect("[")?;
                let lo = c.number()?;
                c.expect(",")?;
                let hi = c.number()?;
                c.expect("]")?;
                c.done()?;
                if row.iter().any(|&(t, _)| t == succ) {
                    return Err(ParseError::new(
                        ErrorKind::Duplicate,
                        succ_tok.pos,
                        format!("successor `{}` listed twice", succ_tok.text),
                    ));
                }
                row.push((succ, ProbInterval::new(lo, hi)));
            }
            "rabin" if !labelled => {
                let names = required(&states, head)?;
                pairs.push(parse_pair(&mut c, names, "state")?);
                rabin_lines.push(head.pos.line);
            }
            other => {
                return Err(ParseError::new(
                    ErrorKind::Syntax,
                    head.pos,
                    format!("unexpected `{other}`"),
                ))
            }
        }
    }

    let eof = Pos {
        line: text.lines().count().max(1),
        col: 1,
    };
    let states = states.ok_or_else(|| ParseError::new(ErrorKind::Missing, eof, "missing `states`"))?;
    let init = init.ok_or_else(|| ParseError::new(ErrorKind::Missing, eof, "missing `init`"))?;
    let skeleton = Skeleton::new(states.names.clone(), init, actions)
        .map_err(|e| ParseError::new(ErrorKind::Invalid, states.pos, e.to_string()))?;
    let rows = rows
        .into_iter()
        .map(|r| IntervalRow::new(r).expect("duplicates rejected while parsing"))
        .collect();
    let bmdp = Bmdp::new(skeleton, rows, RabinAcceptance::new(pairs))
        .map_err(|e| ParseError::new(ErrorKind::Invalid, eof, e.to_string()))?;
    let model = if labelled {
        let mut out = Vec::with_capacity(states.names.len());
        for (i, name) in states.names.iter().enumerate() {
            match labels.remove(&StateId(i)) {
                Some(l) => out.push(l),
                None => {
                    return Err(ParseError::new(
                        ErrorKind::Missing,
                        eof,
                        format!("state `{name}` has no label"),
                    ))
                }
            }
        }
        Model::Labelled(LabelledBmdp::new(bmdp, out).expect("one label per state"))
    } else {
        Model::Plain(bmdp)
    };
    Ok(RawModel {
        model,
        action_lines,
        rabin_lines,
    })
}

/// Parses an automaton file; the transition function must be total.
pub fn parse_dra(text: &str) -> PResult<Dra> {
    let lines = lines(text);
    let Some(first) = lines.first() else {
        return Err(ParseError::new(
            ErrorKind::Syntax,
            Pos { line: 1, col: 1 },
            "empty input, expected `dra`",
        ));
    };
    if first[0].text != "dra" {
        return Err(ParseError::new(
            ErrorKind::Syntax,
            first[0].pos,
            format!("expected `dra`, found `{}`", first[0].text),
        ));
    }
    Cursor::new(first).done()?;

    let mut alphabet: Option<Names> = None;
    let mut states: Option<Names> = None;
    let mut init: Option<StateId> = None;
    let mut trans: HashMap<(StateId, usize), StateId> = HashMap::new();
    let mut pairs = Vec::new();

    for toks in &lines[1..] {
        let head = &toks[0];
        let mut c = Cursor::new(toks);
        match head.text {
            "alphabet" => {
                let names = Names::declare(c.rest(), "letter")?;
                if names.names.is_empty() {
                    return Err(ParseError::new(ErrorKind::Syntax, c.end_pos(), "expected letters"));
                }
                once(&mut alphabet, names, head.pos, "alphabet")?;
            }
            "states" => {
                let names = Names::declare(c.rest(), "state")?;
                if names.names.is_empty() {
                    return Err(ParseError::new(ErrorKind::Syntax, c.end_pos(), "expected state names"));
                }
                once(&mut states, names, head.pos, "states")?;
            }
            "init" => {
                let names = required(&states, head)?;
                let q = names.get(c.ident("a state")?, "state")?;
                c.done()?;
                once(&mut init, q, head.pos, "init")?;
            }
            "trans" => {
                let names = required(&states, head)?;
                let letters = alphabet
                    .as_ref()
                    .ok_or_else(|| ParseError::new(ErrorKind::Missing, head.pos, "`alphabet` must come first"))?;
                let from = names.get(c.ident("a state")?, "state")?;
                let letter = letters.get(c.ident("a letter")?, "letter")?.0;
                let to = names.get(c.ident("a state")?, "state")?;
                c.done()?;
                if trans.insert((from, letter), to).is_some() {
                    return Err(ParseError::new(
                        ErrorKind::Duplicate,
                        head.pos,
                        format!(
                            "duplicate transition for ({}, {})",
                            names.names[from.0], letters.names[letter]
                        ),
                    ));
                }
            }
            "rabin" => {
                let names = required(&states, head)?;
                pairs.push(parse_pair(&mut c, names, "state")?);
            }
            other => {
                return Err(ParseError::new(
                    ErrorKind::Syntax,
                    head.pos,
                    format!("unexpected `{other}`"),
                ))
            }
        }
    }

    let eof = Pos {
        line: text.lines().count().max(1),
        col: 1,
    };
    let alphabet = alphabet.ok_or_else(|| ParseError::new(ErrorKind::Missing, eof, "missing `alphabet`"))?;
    let states = states.ok_or_else(|| ParseError::new(ErrorKind::Missing, eof, "missing `states`"))?;
    let init = init.ok_or_else(|| ParseError::new(ErrorKind::Missing, eof, "missing `init`"))?;
    let mut table = Vec::with_capacity(states.names.len());
    for (q, qname) in states.names.iter().enumerate() {
        let mut row = Vec::with_capacity(alphabet.names.len());
        for (l, lname) in alphabet.names.iter().enumerate() {
            match trans.get(&(StateId(q), l)) {
                Some(&t) => row.push(t),
                None => {
                    return Err(ParseError::new(
                        ErrorKind::Missing,
                        eof,
                        format!("missing transition for ({qname}, {lname})"),
                    ))
                }
            }
        }
        table.push(row);
    }
    let letters = Alphabet::new(alphabet.names).expect("letters are unique and nonempty");
    Dra::new(letters, states.names, init, table, RabinAcceptance::new(pairs))
        .map_err(|e| ParseError::new(ErrorKind::Invalid, eof, e.to_string()))
}

fn write_set(out: &mut String, names: &[String], set: &std::collections::BTreeSet<StateId>) {
    out.push('{');
    for s in set {
        out.push(' ');
        out.push_str(&names[s.0]);
    }
    out.push_str(" }");
}

fn write_rabin(out: &mut String, names: &[String], acc: &RabinAcceptance) {
    for p in &acc.pairs {
        out.push_str("rabin ");
        write_set(out, names, &p.fin);
        out.push(' ');
        write_set(out, names, &p.inf);
        out.push('\n');
    }
}

fn write_model(out: &mut String, model: &Bmdp, labels: Option<&[String]>) {
    let sk = model.skeleton();
    let names = sk.state_names();
    out.push_str(if labels.is_some() { "labelled-bmdp\n" } else { "bmdp\n" });
    out.push_str("states");
    for n in names {
        out.push(' ');
        out.push_str(n);
    }
    let _ = writeln!(out, "\ninit {}", sk.state_name(sk.initial()));
    if let Some(labels) = labels {
        for (n, l) in names.iter().zip(labels) {
            let _ = writeln!(out, "label {n} {l}");
        }
    }
    for s in sk.states() {
        for &a in sk.available(s) {
            let _ = writeln!(out, "\naction {} {}", names[s.0], sk.action_name(a));
            for &(t, b) in model.row(a).entries() {
                let _ = writeln!(out, "  to {} [{:?}, {:?}]", names[t.0], b.lo, b.hi);
            }
        }
    }
    if labels.is_none() && !model.acceptance().pairs.is_empty() {
        out.push('\n');
        write_rabin(out, names, model.acceptance());
    }
}

/// Serializes a model in the format read by [`parse_model`].
pub fn write_bmdp(model: &Bmdp) -> String {
    let mut out = String::new();
    write_model(&mut out, model, None);
    out
}

pub fn write_labelled(model: &LabelledBmdp) -> String {
    let mut out = String::new();
    write_model(&mut out, model.model(), Some(model.labels()));
    out
}

/// A point MDP written with point intervals.
pub fn write_mdp(mdp: &Mdp) -> String {
    write_bmdp(&mdp.to_point_bmdp())
}

pub fn write_dra(dra: &Dra) -> String {
    let mut out = String::from("dra\nalphabet");
    for l in dra.alphabet().letters() {
        out.push(' ');
        out.push_str(l);
    }
    out.push_str("\nstates");
    for q in dra.states() {
        out.push(' ');
        out.push_str(q);
    }
    let _ = writeln!(out, "\ninit {}", dra.states()[dra.initial().0]);
    for q in 0..dra.num_states() {
        for (l, letter) in dra.alphabet().letters().iter().enumerate() {
            let t = dra.step(StateId(q), l);
            let _ = writeln!(out, "trans {} {} {}", dra.states()[q], letter, dra.states()[t.0]);
        }
    }
    write_rabin(&mut out, dra.states(), dra.acceptance());
    out
}

/// `state action` per state with a choice.
pub fn write_controller(sk: &Skeleton, policy: &crate::model::PositionalPolicy) -> String {
    let mut out = String::new();
    for s in sk.states() {
        if let Some(a) = policy.get(s) {
            let _ = writeln!(out, "{} {}", sk.state_name(s), sk.action_name(a));
        }
    }
    out
}

/// `state action -> succ:p ...` per action.
pub fn write_nature(sk: &Skeleton, nature: &crate::model::NaturePolicy) -> String {
    let mut out = String::new();
    for s in sk.states() {
        for &a in sk.available(s) {
            let _ = write!(out, "{} {} ->", sk.state_name(s), sk.action_name(a));
            write_distribution(&mut out, sk, nature.get(a));
            out.push('\n');
        }
    }
    out
}

fn write_distribution(out: &mut String, sk: &Skeleton, d: &Distribution) {
    for &(t, p) in d.entries() {
        let _ = write!(out, " {}:{:?}", sk.state_name(t), p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn choice_model_parses() {
        let m = fixtures::choice();
        let sk = m.skeleton();
        assert_eq!(sk.num_states(), 3);
        assert_eq!(sk.num_actions(), 4);
        assert_eq!(
            m.acceptance().pairs,
            vec![RabinPair::new([StateId(2)], [StateId(1)])]
        );
        let a = sk.action_by_name(StateId(0), "a").unwrap();
        assert_eq!(m.row(a).bounds(StateId(1)), ProbInterval::new(0.5, 1.0));
    }

    #[test]
    fn empty_input() {
        let e = parse_model("").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        let e = parse_model("# only a comment\n\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
    }

    #[test]
    fn undeclared_successor() {
        let text = "bmdp\nstates q0\ninit q0\naction q0 a\n  to q9 [1, 1]\n";
        let e = parse_model(text).unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnknownReference);
        assert_eq!((e.line, e.column), (5, 6));
        assert!(e.message.contains("q9"));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_model("bmdp\nstates q0\ninit q0\naction q0 a\n  to q0 [1 1]\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        assert_eq!((e.line, e.column), (5, 12));
        let e = parse_model("bmdp\nstates q0 q0\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Duplicate);
        let e = parse_model("bmdp\nstates q0\ninit q0\n  to q0 [1, 1]\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        let e = parse_model("bmdp\nstates q0\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Missing);
    }

    #[test]
    fn validation_failures_are_forwarded() {
        let text = "bmdp\nstates q0 q1\ninit q0\naction q0 a\n  to q1 [0.0, 0.9]\naction q1 b\n  to q1 [1, 1]\n";
        let e = parse_model(text).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Invalid);
        assert_eq!(e.line, 4);
        assert!(parse_model_raw(text).is_ok());
    }

    #[test]
    fn round_trip() {
        for text in [
            fixtures::CHOICE,
            fixtures::GRID_ACC1,
            fixtures::GRID_ACC2,
            fixtures::ALTERNATING,
            fixtures::CHOICE_LABELLED,
        ] {
            let m = parse_model(text).unwrap();
            let again = match &m {
                Model::Plain(b) => parse_model(&write_bmdp(b)).unwrap(),
                Model::Labelled(l) => parse_model(&write_labelled(l)).unwrap(),
            };
            assert_eq!(m, again);
        }
    }

    #[test]
    fn dra_files() {
        let dra = fixtures::eventually_y_or_z();
        assert_eq!(dra.num_states(), 2);
        assert_eq!(dra.acceptance().pairs.len(), 2);
        assert_eq!(parse_dra(&write_dra(&dra)).unwrap(), dra);
    }

    #[test]
    fn dra_totality_and_duplicates() {
        let missing = fixtures::EVENTUALLY_Y_OR_Z.replace("trans s0 z s0\n", "");
        let e = parse_dra(&missing).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Missing);
        assert!(e.message.contains("(s0, z)"));
        let dup = fixtures::EVENTUALLY_Y_OR_Z.replace("trans s0 x s1\n", "trans s0 x s1\ntrans s0 x s0\n");
        let e = parse_dra(&dup).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Duplicate);
    }

    #[test]
    fn labelled_model_needs_every_label() {
        let text = "labelled-bmdp\nstates a b\ninit a\nlabel a x\naction a go\n  to b [1, 1]\naction b go\n  to a [1, 1]\n";
        assert_eq!(parse_model(text).unwrap_err().kind, ErrorKind::Missing);
        let text = "labelled-bmdp\nstates a\ninit a\nlabel a x\nrabin { } { a }\n";
        assert_eq!(parse_model(text).unwrap_err().kind, ErrorKind::Syntax);
    }

    #[test]
    fn policies_are_written_by_name() {
        let left = fixtures::choice_best();
        let sk = left.skeleton();
        let nature = crate::model::NaturePolicy::new(left.transitions().to_vec());
        let text = write_nature(sk, &nature);
        assert!(text.contains("q1 c -> q1:0.5 q2:0.5"));
        let pol = crate::model::PositionalPolicy::from_choices(vec![
            sk.action_by_name(StateId(0), "a"),
            sk.action_by_name(StateId(1), "b"),
            None,
        ]);
        assert_eq!(write_controller(sk, &pol), "q0 a\nq1 b\n");
    }
}
