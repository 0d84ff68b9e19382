//! Command-line driver. [`run`] takes the arguments and output streams so
//! the whole tool can be exercised in-process.
//!
//! Exit codes: 0 success, 1 invalid model or failed check, 2 unreadable or
//! malformed input, 3 no convergence, 4 usage error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use bmdp_core::bracket::validate_bracket;
use bmdp_core::check::{check, Bound, CheckOptions, Method, Objective};
use bmdp_core::format::{
    parse_dra, parse_model, parse_model_raw, write_bmdp, write_controller, write_mdp, write_nature, ErrorKind,
    Model, ParseError,
};
use bmdp_core::model::{validate_bmdp, Player};
use bmdp_core::omega::{build_game, GameResult};
use bmdp_core::polytope::{bfs_vertices, coordinates};
use bmdp_core::product::{build_product, Dra};
use bmdp_core::report::CheckReport;
use bmdp_core::{Bmdp, Error};
use clap::{Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

/// Bounds on the probability of Rabin objectives in interval MDPs.
#[derive(Parser, Debug)]
#[command(name = "bmdp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute lower and/or upper bounds.
    Check {
        model: PathBuf,
        /// Automaton for a labelled model; the product is analysed.
        #[arg(long)]
        dra: Option<PathBuf>,
        #[arg(long, default_value = "both")]
        bound: Bound,
        /// `rabin` or `reach:<s1,s2,...>`.
        #[arg(long, default_value = "rabin")]
        objective: Objective,
        #[arg(long, default_value_t = bmdp_core::reach::DEFAULT_EPSILON)]
        epsilon: f64,
        /// Iteration limit for value iteration.
        #[arg(long, default_value_t = bmdp_core::reach::DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
        #[arg(long, default_value = "auto")]
        method: Method,
        /// Controller and nature choices. With `--bound both` the bound name
        /// is inserted before the extension.
        #[arg(long)]
        policy_out: Option<PathBuf>,
        /// Consistent MDP realizing the bound, as a point-interval model.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Key-value report.
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Report every broken model invariant.
    Validate { model: PathBuf },
    /// Vertices of one action's interval polytope.
    Bfs {
        model: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        action: String,
    },
    /// Write the stochastic game whose second player resolves the intervals.
    Game {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the product of a labelled model with an automaton.
    Product {
        model: PathBuf,
        #[arg(long)]
        dra: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a report against randomly sampled consistent MDPs.
    Bracket {
        model: PathBuf,
        #[arg(long)]
        dra: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure together with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Convergence { .. } => EXIT_CONVERGENCE,
            Error::InvalidQuery(_) | Error::TooLarge { .. } | Error::AlphabetMismatch(_) => EXIT_USAGE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

fn parse_failure(path: &Path, e: ParseError) -> Failure {
    let code = if e.kind == ErrorKind::Invalid { EXIT_INVALID } else { EXIT_PARSE };
    Failure::new(code, format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    parse_model(&read(path)?).map_err(|e| parse_failure(path, e))
}

fn load_dra(path: &Path) -> Result<Dra, Failure> {
    parse_dra(&read(path)?).map_err(|e| parse_failure(path, e))
}

/// The model to analyse: plain models as is, labelled ones through the
/// product with `dra`.
fn analysed(model: Model, dra: Option<&Path>) -> Result<Bmdp, Failure> {
    match (model, dra) {
        (Model::Plain(m), None) => Ok(m),
        (Model::Labelled(m), Some(d)) => Ok(build_product(&m, &load_dra(d)?)?),
        (Model::Plain(_), Some(_)) => Err(Failure::new(EXIT_USAGE, "--dra needs a labelled model")),
        (Model::Labelled(_), None) => Err(Failure::new(EXIT_USAGE, "labelled models need --dra")),
    }
}

/// `out.bmdp` becomes `out.lower.bmdp`.
fn tagged(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

fn policy_text(model: &Bmdp, r: &GameResult) -> String {
    let sk = model.skeleton();
    format!("{}{}", write_controller(sk, &r.controller), write_nature(sk, &r.nature))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot write output: {e}")))
}

fn to_file_or(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => emit(out, text),
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Check {
            model,
            dra,
            bound,
            objective,
            epsilon,
            max_iterations,
            method,
            policy_out,
            witness_out,
            report_out,
        } => {
            if !(epsilon > 0.0) {
                return Err(Failure::new(EXIT_USAGE, "--epsilon must be positive"));
            }
            let m = analysed(load_model(&model)?, dra.as_deref())?;
            let opts = CheckOptions {
                bound,
                objective,
                method,
                epsilon,
                max_iterations,
            };
            let outcome = check(&m, &opts)?;
            emit(out, &outcome.report.to_table())?;
            if let Some(p) = &report_out {
                write_file(p, &outcome.report.to_key_value())?;
            }
            let results = [("lower", &outcome.lower), ("upper", &outcome.upper)];
            let wanted = results.iter().filter(|(_, r)| r.is_some()).count();
            if method == Method::Brute && (policy_out.is_some() || witness_out.is_some()) {
                let _ = writeln!(err, "warning: brute force produces no policies or witnesses");
            }
            for (tag, r) in results {
                let Some(r) = r else { continue };
                let path = |p: &PathBuf| if wanted > 1 { tagged(p, tag) } else { p.clone() };
                if let Some(p) = &policy_out {
                    write_file(&path(p), &policy_text(&m, r))?;
                }
                if let Some(p) = &witness_out {
                    write_file(&path(p), &write_mdp(&r.witness))?;
                }
            }
            let bad = outcome.report.inverted_states();
            if !bad.is_empty() {
                return Err(Failure::new(
                    EXIT_INVALID,
                    format!("lower bound above upper bound at {}", bad.join(" ")),
                ));
            }
            Ok(EXIT_OK)
        }
        Command::Validate { model } => {
            let text = read(&model)?;
            let parsed = parse_model_raw(&text).map_err(|e| parse_failure(&model, e))?;
            let m = parsed.bmdp();
            let violations = validate_bmdp(m);
            if violations.is_empty() {
                let sk = m.skeleton();
                emit(
                    out,
                    &format!(
                        "valid: {} states, {} actions, {} rabin pairs\n",
                        sk.num_states(),
                        sk.num_actions(),
                        m.acceptance().pairs.len()
                    ),
                )?;
                Ok(EXIT_OK)
            } else {
                let mut text = String::new();
                for v in &violations {
                    let _ = writeln!(text, "{}", v.describe(m.skeleton()));
                }
                emit(out, &text)?;
                Ok(EXIT_INVALID)
            }
        }
        Command::Bfs { model, state, action } => {
            let parsed = load_model(&model)?;
            let m = parsed.bmdp();
            let sk = m.skeleton();
            let s = sk
                .state_by_name(&state)
                .ok_or_else(|| Failure::new(EXIT_USAGE, format!("unknown state `{state}`")))?;
            let a = sk
                .action_by_name(s, &action)
                .ok_or_else(|| Failure::new(EXIT_USAGE, format!("state {state} has no action `{action}`")))?;
            let row = m.row(a);
            let mut text = String::from("successors");
            for &(t, _) in row.entries() {
                let _ = write!(text, " {}", sk.state_name(t));
            }
            text.push('\n');
            for v in bfs_vertices(row)? {
                let coords: Vec<String> = coordinates(row, &v).iter().map(|p| p.to_string()).collect();
                let _ = writeln!(text, "{}", coords.join(" "));
            }
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Game { model, out: path } => {
            let parsed = load_model(&model)?;
            let game = build_game(parsed.bmdp())?;
            let sk = game.mdp().skeleton();
            let mut text = String::from("# player 2:");
            for s in sk.states().filter(|&s| game.owner(s) == Player::Two) {
                let _ = write!(text, " {}", sk.state_name(s));
            }
            text.push('\n');
            text += &write_mdp(game.mdp());
            to_file_or(out, path.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Product { model, dra, out: path } => {
            let m = analysed(load_model(&model)?, Some(&dra))?;
            to_file_or(out, path.as_deref(), &write_bmdp(&m))?;
            Ok(EXIT_OK)
        }
        Command::Bracket {
            model,
            dra,
            report,
            trials,
            seed,
        } => {
            let m = analysed(load_model(&model)?, dra.as_deref())?;
            let r = CheckReport::from_key_value(&read(&report)?).map_err(|e| parse_failure(&report, e))?;
            let outcome = validate_bracket(&m, &r, trials, seed)?;
            if outcome.passed() {
                emit(out, &format!("pass: {trials} trials, no value outside the bounds\n"))?;
                return Ok(EXIT_OK);
            }
            let mut text = format!("fail: {} violations in {trials} trials\n", outcome.violations.len());
            for c in outcome.violations.iter().take(10) {
                let _ = writeln!(
                    text,
                    "trial {} state {}: value {} outside [{}, {}]",
                    c.trial, c.state, c.value, c.lower, c.upper
                );
            }
            let first = &outcome.violations[0];
            let _ = write!(text, "# sampled model of trial {}\n{}", first.trial, write_mdp(&first.sample));
            emit(out, &text)?;
            Ok(EXIT_INVALID)
        }
    }
}

/// Runs the tool on `args` (without the program name) and returns the exit
/// code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("bmdp")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            let _ = write!(err, "{e}");
            return match e.kind() {
                K::DisplayHelp | K::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
