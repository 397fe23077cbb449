//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kcsp_core::analysis::{char_root, ppsz_bound_base};
use kcsp_core::corpus::{small_corpus, structured};
use kcsp_core::experiment::{
    estimate_iteration_success, node_growth_experiment, verify_campaign, Campaign, GrowthFamily,
};
use kcsp_core::generators::{gen_coloring, gen_uniform};
use kcsp_core::oracle::{enumerate_solutions, DEFAULT_CAP};
use kcsp_core::rng::derive_seed;
use kcsp_core::{repeat_count, solve_dpll, solve_ppsz, success_lower_bound, CspInstance, PpszOutcome, Verdict};

const TRIANGLE: [(u32, u32); 3] = [(1, 2), (2, 3), (1, 3)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn is_sat(inst: &CspInstance) -> bool {
    !enumerate_solutions(inst, DEFAULT_CAP).unwrap().is_empty()
}

/// Number of distinct k-ary nogoods over `n` variables and domain `d`.
fn possible_nogoods(n: usize, d: u32, k: usize) -> usize {
    let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    binom * (d as usize).pow(k as u32)
}

/// Nogood count scaled around the satisfiability threshold
/// `n ln d / -ln(1 - d^-k)`.
fn near_threshold(n: usize, d: u32, k: usize, scale: f64) -> usize {
    let q = (d as f64).powi(-(k as i32));
    let m = scale * n as f64 * (d as f64).ln() / -(1.0 - q).ln();
    (m.round() as usize).min(possible_nogoods(n, d, k) * 3 / 4)
}

/// Seeded `(n, d, k, m)` with `n in 4..=12`, `d in 2..=4`, `k in 2..=3` and
/// `d^n <= 2^16`.
fn random_uniform(i: u64) -> (CspInstance, (usize, u32, usize, usize)) {
    let mut draw = 0u64;
    loop {
        let s = derive_seed(0xacce, &[i, draw]);
        draw += 1;
        let n = 4 + (s % 9) as usize;
        let d = 2 + ((s >> 8) % 3) as u32;
        let k = 2 + ((s >> 16) % 2) as usize;
        if (d as u64).pow(n as u32) > 1 << 16 {
            continue;
        }
        let scale = 0.6 + 0.8 * ((s >> 24) % 1000) as f64 / 1000.0;
        let m = near_threshold(n, d, k, scale);
        return (gen_uniform(n, d, k, m, s).unwrap(), (n, d, k, m));
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut instances: Vec<(String, CspInstance)> =
        (0..500).map(|i| (format!("uniform #{i} {:?}", random_uniform(i).1), random_uniform(i).0)).collect();
    instances.extend(structured().into_iter().map(|e| (e.name, e.instance)));
    let total = instances.len();
    let (mut agree, mut sat) = (0, 0);
    let mut first_bad = None;
    for (name, inst) in &instances {
        let truth = is_sat(inst);
        sat += truth as usize;
        if solve_dpll(inst).is_sat() == truth {
            agree += 1;
        } else if first_bad.is_none() {
            first_bad = Some(name.clone());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        agree == total && within(elapsed, 60),
        format!(
            "{agree}/{total} verdicts agree ({sat} SAT), {:.2}s < 60s{}",
            elapsed.as_secs_f64(),
            first_bad.map(|n| format!(", first mismatch {n}")).unwrap_or_default()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let campaign = Campaign::Lemma2 { n_values: vec![2, 3, 4], d_values: vec![2, 3, 4], subsets: 1000 };
    let r = verify_campaign(&campaign, 2).unwrap();
    let elapsed = start.elapsed();
    let failures = r.aggregate["failures"];
    outcome(
        failures == 0.0 && r.verdict == Verdict::Pass && within(elapsed, 30),
        format!("{} subsets, {failures} failures, {:.2}s < 30s", r.aggregate["checks"], elapsed.as_secs_f64()),
    )
}

fn criterion_3() -> Outcome {
    let corpus = small_corpus(7);
    let instances = corpus.len();
    let r = verify_campaign(&Campaign::Lemma1 { corpus, max_vars: 7 }, 3).unwrap();
    let failures = r.aggregate["failures"];
    outcome(
        failures == 0.0 && r.verdict == Verdict::Pass && r.aggregate["checks"] > 0.0,
        format!("{} solutions over {instances} instances, {failures} failures", r.aggregate["checks"]),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut instances = vec![("triangle-k3-d3".to_string(), gen_coloring(&TRIANGLE, 3, 3).unwrap())];
    let mut i = 0u64;
    while instances.len() < 21 {
        let s = derive_seed(0xf100, &[i]);
        i += 1;
        let n = 4 + (s % 5) as usize;
        let d = 2 + ((s >> 8) % 2) as u32;
        let k = 2 + ((s >> 16) % 2) as usize;
        let m = near_threshold(n, d, k, 0.5 + 0.5 * ((s >> 24) % 1000) as f64 / 1000.0);
        let inst = gen_uniform(n, d, k, m, s).unwrap();
        if is_sat(&inst) {
            instances.push((format!("uniform n={n} d={d} k={k} m={m} seed={s}"), inst));
        }
    }
    let anchor = success_lower_bound(3, 3, 2);
    let mut passed = 0;
    let mut worst_margin = f64::INFINITY;
    let mut first_bad = None;
    for (idx, (name, inst)) in instances.iter().enumerate() {
        let r = estimate_iteration_success(inst, 100_000, 4 + idx as u64).unwrap();
        let margin = r.aggregate["mean"] - r.aggregate["threshold"];
        worst_margin = worst_margin.min(margin);
        if r.verdict == Verdict::Pass {
            passed += 1;
        } else if first_bad.is_none() {
            first_bad = Some(name.clone());
        }
    }
    let elapsed = start.elapsed();
    let anchor_ok = (anchor - 0.0170).abs() < 5e-5;
    outcome(
        passed == instances.len() && anchor_ok && within(elapsed, 300),
        format!(
            "{passed}/{} instances with p_hat >= bound - 3se (min margin {worst_margin:.4}), \
             K3 d=3 bound {anchor:.5}, {:.2}s < 300s{}",
            instances.len(),
            elapsed.as_secs_f64(),
            first_bad.map(|n| format!(", first failure {n}")).unwrap_or_default()
        ),
    )
}

fn criterion_5() -> Outcome {
    let k3 = gen_coloring(&TRIANGLE, 3, 3).unwrap();
    let solved = (0..1000u64)
        .filter(|&seed| {
            let stats = solve_ppsz(&k3, None, seed).unwrap();
            matches!(&stats.outcome, PpszOutcome::Sat(v) if k3.satisfies_values(v))
        })
        .count();
    let unsat: Vec<_> = small_corpus(usize::MAX).into_iter().filter(|e| !is_sat(&e.instance)).collect();
    let failures = unsat
        .iter()
        .filter(|e| solve_ppsz(&e.instance, None, 5).unwrap().outcome == PpszOutcome::Failure)
        .count();
    outcome(
        solved >= 999 && failures == unsat.len() && !unsat.is_empty(),
        format!("K3 d=3 solved in {solved}/1000 seeds, FAILURE on {failures}/{} UNSAT corpus instances", unsat.len()),
    )
}

fn criterion_6() -> Outcome {
    let phi = char_root(2, 2).unwrap().lambda;
    let trib = char_root(2, 3).unwrap().lambda;
    let anchors_ok = (phi - 1.6180339887).abs() <= 1e-9 && (trib - 1.8392867552).abs() <= 1e-9;
    let mut sandwich_ok = 0;
    let mut max_residual = 0.0f64;
    for d in 2..=10u32 {
        for k in 2..=10u32 {
            let r = char_root(d, k).unwrap();
            let (df, kf) = (d as f64, k as i32);
            // sandwich in deficit form: (d-1)/d^k < d - lambda < 1/d^(k-1)
            let lo = (df - 1.0) / df.powi(kf);
            let hi = 1.0 / df.powi(kf - 1);
            if lo < r.deficit && r.deficit < hi && r.lower_sandwich <= r.lambda && r.lambda <= r.upper_sandwich {
                sandwich_ok += 1;
            }
            max_residual = max_residual.max(r.residual_g.abs());
        }
    }
    outcome(
        anchors_ok && sandwich_ok == 81,
        format!(
            "char_root(2,2)={phi:.10}, char_root(2,3)={trib:.10}, sandwich holds on {sandwich_ok}/81 grid points \
             (max |g| {max_residual:.1e})"
        ),
    )
}

fn criterion_7() -> Outcome {
    let a = repeat_count(3, 2, 3).unwrap();
    let b = repeat_count(6, 3, 2).unwrap();
    let max_err = (1..=6u32)
        .map(|k| (ppsz_bound_base(2, k) - 2f64.powf(1.0 - 1.0 / k as f64)).abs())
        .fold(0.0, f64::max);
    outcome(
        a == 48 && b == 9072 && max_err <= 1e-12,
        format!("repeat_count(3,2,3)={a}, repeat_count(6,3,2)={b}, max |base(2,k) - 2^(1-1/k)| = {max_err:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let n_values: Vec<usize> = (8..=14).collect();
    let r = node_growth_experiment(GrowthFamily { d: 2, k: 2, ratio: 4.0 }, &n_values, 30, 8).unwrap();
    let elapsed = start.elapsed();
    let slope = r.aggregate.get("slope").copied().unwrap_or(f64::NAN);
    let threshold = r.aggregate["threshold"];
    outcome(
        r.verdict == Verdict::Pass && slope <= threshold && within(elapsed, 120),
        format!(
            "slope {slope:.4} <= {threshold:.4} over {} n values, {:.2}s < 120s",
            r.aggregate["fit_points"],
            elapsed.as_secs_f64()
        ),
    )
}

/// Runs the binary with `args`, where `{out}` is replaced by `out`, and
/// returns the bytes of `out` (or stdout when no `{out}` appears).
fn run_cli(args: &[&str], out: &Path) -> (Option<i32>, Vec<u8>) {
    let out_str = out.to_str().unwrap();
    let argv: Vec<String> = args.iter().map(|a| a.replace("{out}", out_str)).collect();
    let _ = std::fs::remove_file(out);
    let result = Command::new(env!("CARGO_BIN_EXE_kcsp")).args(&argv).output().unwrap();
    let bytes = if args.iter().any(|a| a.contains("{out}")) {
        std::fs::read(out).unwrap_or_default()
    } else {
        result.stdout
    };
    (result.status.code(), bytes)
}

fn criterion_9() -> Outcome {
    let dir = std::env::temp_dir().join(format!("kcsp-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let inst: PathBuf = dir.join("k3d3.csp");
    let status = Command::new(env!("CARGO_BIN_EXE_kcsp"))
        .args(["gen", "coloring", "--edges", "1-2,2-3,1-3", "--vertices", "3", "--d", "3", "--out"])
        .arg(&inst)
        .status()
        .unwrap();
    if !status.success() {
        return outcome(false, "could not generate the fixture instance");
    }
    let i = inst.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["gen", "uniform", "--n", "8", "--d", "3", "--k", "2", "--m", "40", "--seed", "9", "--out", "{out}"],
        vec!["gen", "model-rb", "--n", "6", "--alpha", "0.8", "--r", "0.7", "--p", "0.25", "--k", "2", "--seed", "9", "--out", "{out}"],
        vec!["gen", "coloring", "--edges", "1-2,2-3,3-4,1-4", "--vertices", "4", "--d", "3", "--out", "{out}"],
        vec!["gen", "latin", "--size", "3", "--out", "{out}"],
        vec!["gen", "nqueens", "--size", "6", "--out", "{out}"],
        vec!["solve", "--alg", "dpll", "--stats", "{out}", i],
        vec!["solve", "--alg", "ppsz", "--seed", "9", "--stats", "{out}", i],
        vec!["solve", "--alg", "brute", "--stats", "{out}", i],
        vec!["oracle", "--out", "{out}", i],
        vec!["verify", "lemma1", "--max-vars", "5", "--seed", "9", "--out", "{out}"],
        vec!["verify", "lemma2", "--grid-n", "2..3", "--grid-d", "2..3", "--subsets", "50", "--seed", "9", "--out", "{out}"],
        vec!["analyze", "--d", "2..4", "--k", "2..4", "--alpha", "0.5", "--n", "100", "--out", "{out}"],
        vec!["bench", "prob", "--trials", "2000", "--seed", "9", "--out", "{out}", i],
        vec!["bench", "prob", "--trials", "2000", "--seed", "9", "--format", "csv", "--out", "{out}", i],
        vec!["bench", "growth", "--n", "8..10", "--instances", "5", "--seed", "9", "--out", "{out}"],
        vec!["bench", "growth", "--n", "8..10", "--instances", "5", "--seed", "9", "--format", "csv", "--out", "{out}"],
    ];
    let mut identical = 0;
    let mut first_bad = None;
    for (idx, case) in cases.iter().enumerate() {
        let out = dir.join(format!("out-{idx}"));
        let (code_a, a) = run_cli(case, &out);
        let (code_b, b) = run_cli(case, &out);
        if code_a == Some(0) && code_a == code_b && !a.is_empty() && a == b {
            identical += 1;
        } else if first_bad.is_none() {
            first_bad = Some(case.join(" "));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        identical == cases.len(),
        format!(
            "{identical}/{} invocations byte-identical across reruns{}",
            cases.len(),
            first_bad.map(|c| format!(", first difference: {c}")).unwrap_or_default()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("dpll verdicts match the oracle", criterion_1),
        ("isolation-weight inequality, exact", criterion_2),
        ("narrow-choice average, exact", criterion_3),
        ("per-iteration success floor", criterion_4),
        ("ppsz end-to-end", criterion_5),
        ("characteristic roots", criterion_6),
        ("closed-form anchors", criterion_7),
        ("dpll node growth", criterion_8),
        ("cli determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", idx + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        failed += !o.pass as usize;
        println!(
            "{} {label}: {name}: {} [{:.2}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
