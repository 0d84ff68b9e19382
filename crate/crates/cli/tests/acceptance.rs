//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use bmdp_core::bracket::validate_bracket;
use bmdp_core::check::{check, CheckOptions};
use bmdp_core::format::{parse_model, Model};
use bmdp_core::graph::EndComponent;
use bmdp_core::omega::{bmdp_lower, bmdp_upper, bmdp_upper_detailed, brute_force_value, build_game, mdp_rabin_max, sg_rabin};
use bmdp_core::random::{random_bmdp, random_point_bmdp, RandomShape};
use bmdp_core::report::CheckReport;
use bmdp_core::{Bmdp, Sense, StateId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CORPUS_SEED: u64 = 0x5eed_b0d5;
const CORPUS_SIZE: usize = 400;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// Runs the CLI in-process; returns exit code and stdout.
fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = bmdp_cli::run(args.iter().copied(), &mut out, &mut err);
    if code != 0 {
        eprintln!("{}", String::from_utf8_lossy(&err));
    }
    (code, String::from_utf8(out).unwrap())
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_report(p: &Path) -> CheckReport {
    CheckReport::from_key_value(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn corpus() -> Vec<Bmdp> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE).map(|_| random_bmdp(&mut rng, RandomShape::default())).collect()
}

fn criterion_1(dir: &Path) -> Outcome {
    let report = dir.join("c1.kv");
    let witness = dir.join("c1-witness.bmdp");
    let policy = dir.join("c1-policy.txt");
    let start = Instant::now();
    let (code, _) = cli(&[
        "check",
        path_str(&fixture("choice.bmdp")),
        "--bound",
        "both",
        "--objective",
        "rabin",
        "--report-out",
        path_str(&report),
        "--witness-out",
        path_str(&witness),
        "--policy-out",
        path_str(&policy),
    ]);
    let elapsed = start.elapsed();
    if code != 0 {
        return outcome(false, format!("exit code {code}"));
    }
    let r = read_report(&report);
    let (lo, hi) = (r.lower_at_initial().unwrap(), r.upper_at_initial().unwrap());

    let text = std::fs::read_to_string(dir.join("c1-witness.lower.bmdp")).unwrap();
    let Model::Plain(w) = parse_model(&text).unwrap() else { unreachable!() };
    let sk = w.skeleton();
    let q2 = sk.state_by_name("q2").unwrap();
    let d = sk.action_by_name(q2, "d").unwrap();
    let stuck = near(w.row(d).bounds(q2).lo, 1.0, 1e-12);
    let plays_b = std::fs::read_to_string(dir.join("c1-policy.upper.txt"))
        .unwrap()
        .lines()
        .any(|l| l == "q1 b");

    let ok = near(lo, 0.5, 1e-6) && near(hi, 1.0, 1e-6) && elapsed < Duration::from_secs(1) && stuck && plays_b;
    outcome(
        ok,
        format!(
            "lower {lo:.9}, upper {hi:.9} at q0 in {:.1} ms; witness T(q2,d,q2)=1: {stuck}; upper plays b in q1: {plays_b}",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn criterion_2() -> Outcome {
    let (code, out) = cli(&["bfs", path_str(&fixture("three-successors.bmdp")), "--state", "q0", "--action", "a"]);
    if code != 0 {
        return outcome(false, format!("exit code {code}"));
    }
    let got: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    let want = [
        [0.0, 0.3, 0.7],
        [0.2, 0.1, 0.7],
        [0.6, 0.1, 0.3],
        [0.3, 0.4, 0.3],
        [0.0, 0.4, 0.6],
    ];
    let same = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| near(*x, *y, 1e-12));
    let ok = got.len() == want.len()
        && want.iter().all(|w| got.iter().any(|g| same(g, w)))
        && got.iter().all(|g| want.iter().any(|w| same(g, w)));
    outcome(ok, format!("{} vertices returned", got.len()))
}

fn criterion_3(dir: &Path) -> Outcome {
    let cases = [
        ("grid-acc1.bmdp", "rabin", 0.0, 0.7),
        ("grid-acc2.bmdp", "rabin", 0.4, 0.7),
        ("grid-acc1.bmdp", "reach:q2", 0.1, 0.7),
    ];
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (file, objective, lo, hi)) in cases.iter().enumerate() {
        let report = dir.join(format!("c3-{i}.kv"));
        let (code, _) = cli(&[
            "check",
            path_str(&fixture(file)),
            "--bound",
            "both",
            "--objective",
            objective,
            "--report-out",
            path_str(&report),
        ]);
        if code != 0 {
            return outcome(false, format!("{file} {objective}: exit code {code}"));
        }
        let r = read_report(&report);
        let (l, u) = (r.lower_at_initial().unwrap(), r.upper_at_initial().unwrap());
        ok &= near(l, *lo, 1e-6) && near(u, *hi, 1e-6);
        parts.push(format!("{file} {objective} ({l:.6}, {u:.6})"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    outcome(ok, format!("{}; {:.1} ms total", parts.join(", "), elapsed.as_secs_f64() * 1e3))
}

fn criterion_4() -> Outcome {
    let m = bmdp_core::fixtures::grid_acc1();
    let sk = m.skeleton();
    let (_, details) = bmdp_upper_detailed(&m).unwrap();
    let named = |ec: &EndComponent| {
        let s: Vec<&str> = ec.states.iter().map(|&s| sk.state_name(s)).collect();
        let a: Vec<&str> = ec.actions.iter().map(|&a| sk.action_name(a)).collect();
        format!("({{{}}}, {{{}}})", s.join(","), a.join(","))
    };
    let pair = &details.pairs[0];
    let winning: Vec<String> = pair.winning.iter().map(named).collect();
    let mut all: Vec<String> = pair.mecs.iter().map(named).collect();
    all.sort();
    let ok = details.pairs.len() == 1
        && winning == ["({q1,q4}, {d1,u4})"]
        && all == ["({q1,q4}, {d1,u4})", "({q3}, {s3})", "({q5}, {s5})"];
    outcome(ok, format!("winning {}; all MECs {}", winning.join(" "), all.join(" ")))
}

fn criterion_5(dir: &Path) -> Outcome {
    let report = dir.join("c5.kv");
    let (code, _) = cli(&[
        "check",
        path_str(&fixture("alternating.bmdp")),
        "--dra",
        path_str(&fixture("xyxz.dra")),
        "--bound",
        "upper",
        "--report-out",
        path_str(&report),
    ]);
    if code != 0 {
        return outcome(false, format!("exit code {code}"));
    }
    let r = read_report(&report);
    let hi = r.upper_at_initial().unwrap();
    outcome(near(hi, 1.0, 1e-6), format!("upper {hi:.9} at {}", r.initial))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_6(models: &[Bmdp]) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    // How much of the corpus is not just 0/1 values.
    let (mut gaps, mut fractional) = (0, 0);
    for m in models {
        let lo = bmdp_lower(m).unwrap().values;
        let hi = bmdp_upper(m).unwrap().values;
        let inner = |v: f64| v > 1e-6 && v < 1.0 - 1e-6;
        gaps += usize::from(hi.0[0] - lo.0[0] > 1e-6);
        fractional += usize::from(inner(lo.0[0]) || inner(hi.0[0]));
        let blo = brute_force_value(m, Sense::Min).unwrap();
        let bhi = brute_force_value(m, Sense::Max).unwrap();
        let d = max_diff(&lo.0, &blo.0).max(max_diff(&hi.0, &bhi.0));
        worst = worst.max(d);
        failures += usize::from(d > 1e-6);
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(300),
        format!(
            "{} models ({gaps} with lower < upper, {fractional} with a fractional bound at the initial state), \
             {failures} mismatches, max deviation {worst:.2e}, {:.2} s",
            models.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_7(models: &[Bmdp]) -> Outcome {
    let mut violations = 0;
    let mut samples = 0;
    for (i, m) in models.iter().enumerate() {
        let report = check(m, &CheckOptions::default()).unwrap().report;
        let out = validate_bracket(m, &report, 50, CORPUS_SEED + i as u64).unwrap();
        samples += out.trials;
        violations += out.violations.len();
    }
    outcome(violations == 0, format!("{samples} instantiations, {violations} violations"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 8);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let m = random_point_bmdp(&mut rng, RandomShape::default());
        let (exact, _) = mdp_rabin_max(&m.point_mdp().unwrap()).unwrap();
        let lo = bmdp_lower(&m).unwrap().values;
        let hi = bmdp_upper(&m).unwrap().values;
        worst = worst.max(max_diff(&lo.0, &exact.0)).max(max_diff(&hi.0, &exact.0));
    }
    outcome(worst <= 1e-9, format!("50 point models, max deviation {worst:.2e}"))
}

fn criterion_9(models: &[Bmdp]) -> Outcome {
    let mut worst: f64 = 0.0;
    for m in models {
        let hi = bmdp_upper(m).unwrap().values;
        let g = sg_rabin(&build_game(m).unwrap(), Sense::Max).unwrap();
        worst = worst.max(max_diff(&hi.0, &g.values.0[..m.num_states()]));
    }
    outcome(worst <= 1e-6, format!("{} models, max deviation {worst:.2e}", models.len()))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let models = corpus();
    assert!(models.iter().all(|m| m.skeleton().initial() == StateId(0)));
    let results = [
        ("1", "choice model bounds, witness and policy", criterion_1(dir.path())),
        ("2", "corner points of a three-successor row", criterion_2()),
        ("3", "grid case study", criterion_3(dir.path())),
        ("4", "winning MEC of the grid", criterion_4()),
        ("5", "adversarial upper bound on the product", criterion_5(dir.path())),
        ("6", "bounds match exhaustive search", criterion_6(&models)),
        ("7", "sampled instantiations stay within the bounds", criterion_7(&models)),
        ("8", "point intervals collapse both bounds", criterion_8()),
        ("9", "MEC upper bound equals game upper bound", criterion_9(&models)),
    ];
    let mut failed = 0;
    for (id, name, r) in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {id} {tag}: {name}: {}", r.detail);
        failed += usize::from(!r.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
