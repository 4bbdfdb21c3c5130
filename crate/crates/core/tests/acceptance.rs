//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Run with `cargo test --test acceptance` (the test profile is optimized, so
//! the runtime budgets are measured on optimized code).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lp_tikhonov::experiments::canonical::{conjugate_regime, oversmoothing_regime, sparse_regime};
use lp_tikhonov::experiments::suites::{oracle_compare, run_inequality_suites};
use lp_tikhonov::experiments::{render_report, run_sweep, ReportFormat, SweepConfig, SweepReport};

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn slope(report: &SweepReport, pick: impl Fn(&SweepReport) -> Option<f64>) -> f64 {
    pick(report).unwrap_or(f64::NAN)
}

fn sweep(config: &SweepConfig) -> (SweepReport, Duration) {
    let (report, elapsed) = timed(|| run_sweep(config));
    (report.expect("canonical sweep runs"), elapsed)
}

fn inequality_suites() -> Outcome {
    let (outcomes, elapsed) = timed(|| run_inequality_suites(10_000, 1).expect("suites run"));
    let failing: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{}({} failures)", o.name, o.failures))
        .collect();
    let worst = outcomes.iter().map(|o| o.worst_ratio).fold(0.0, f64::max);
    Outcome {
        passed: failing.is_empty() && elapsed < Duration::from_secs(10),
        detail: format!(
            "{} suites x 10000 cases, worst lhs/rhs={worst:.12}, failing=[{}], {:.2}s (budget 10s)",
            outcomes.len(),
            failing.join(", "),
            elapsed.as_secs_f64()
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let (cmp, elapsed) = timed(|| oracle_compare(500, 100, 2).expect("comparison runs"));
    let coord_failures: usize = cmp.coordinates.iter().map(|c| c.failures).sum();
    let worst_excess = cmp.coordinates.iter().map(|c| c.worst_excess).fold(f64::NEG_INFINITY, f64::max);
    Outcome {
        passed: cmp.passed && elapsed < Duration::from_secs(60),
        detail: format!(
            "{} (p, sigma) pairs x 500 coordinates: {coord_failures} failures, worst excess {worst_excess:.3e}; \
             100 instances: {} failures, worst rel gap {:.3e}; {:.2}s (budget 60s)",
            cmp.coordinates.len(),
            cmp.instance_failures,
            cmp.worst_instance_rel_gap,
            elapsed.as_secs_f64()
        ),
    }
}

fn sparse_rate() -> Outcome {
    let (report, elapsed) = sweep(&sparse_regime());
    let s = slope(&report, |r| SweepReport::slope(&r.slopes.slope_err_tau));
    Outcome {
        passed: s >= 0.9 && elapsed < Duration::from_secs(60),
        detail: format!(
            "slope_err_tau={s:.4} (need >= 0.9, predicted {}) at n={}, {:.2}s (budget 60s)",
            report.predicted.gamma1,
            report.metadata.n,
            elapsed.as_secs_f64()
        ),
    }
}

fn conjugate_rate(report: &SweepReport, elapsed: Duration) -> Outcome {
    let s = slope(report, |r| SweepReport::slope(&r.slopes.slope_err_tau));
    Outcome {
        passed: s >= 0.4 && elapsed < Duration::from_secs(120),
        detail: format!(
            "slope_err_tau={s:.4} (need >= 0.4, predicted {}), {:.2}s (budget 120s)",
            report.predicted.gamma1,
            elapsed.as_secs_f64()
        ),
    }
}

fn oversmoothing(report: &SweepReport, elapsed: Duration) -> Outcome {
    let s = slope(report, |r| SweepReport::slope(&r.slopes.slope_err_tau));
    let growth = slope(report, |r| SweepReport::slope(&r.slopes.slope_penalty));
    let floor = -(report.predicted.gamma2 + 0.15);
    Outcome {
        passed: s >= 0.56 && growth >= floor && elapsed < Duration::from_secs(120),
        detail: format!(
            "slope_err_tau={s:.4} (need >= 0.56), R_0 growth slope={growth:.4} (need >= {floor:.4}), {:.2}s (budget 120s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn p_independence(reports: &[(f64, SweepReport)]) -> Outcome {
    let slopes: Vec<(f64, f64)> = reports
        .iter()
        .map(|(p, r)| (*p, slope(r, |r| SweepReport::slope(&r.slopes.slope_err_tau))))
        .collect();
    let spread = slopes.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max)
        - slopes.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let listed: Vec<String> = slopes.iter().map(|(p, s)| format!("p={p}: {s:.4}")).collect();
    Outcome {
        passed: spread <= 0.1,
        detail: format!("{} ; max pairwise gap {spread:.4} (need <= 0.1)", listed.join(", ")),
    }
}

fn post_processing(plain: &SweepReport) -> Outcome {
    let config = SweepConfig {
        post_process: true,
        ..conjugate_regime()
    };
    let (report, elapsed) = sweep(&config);
    let s_err = slope(plain, |r| SweepReport::slope(&r.slopes.slope_err_tau));
    let s_post = slope(&report, |r| SweepReport::slope(&r.slopes.slope_post_err));
    let n = report.metadata.n as f64;
    let last = report.rows.last().expect("rows");
    let post_support = last.post_support.unwrap_or(f64::NAN);
    let rate_ok = s_post >= s_err - 0.05;
    let sparse_ok = post_support < n / 10.0;
    Outcome {
        passed: rate_ok && sparse_ok,
        detail: format!(
            "slope_post_err={s_post:.4} vs slope_err_tau={s_err:.4} (need >= {:.4}: {}); \
             post_support at delta={:e} is {post_support} of n={n} (need < {}: {}); {:.2}s",
            s_err - 0.05,
            if rate_ok { "ok" } else { "no" },
            last.delta,
            n / 10.0,
            if sparse_ok { "ok" } else { "no" },
            elapsed.as_secs_f64()
        ),
    }
}

fn plateau(report: &SweepReport) -> Outcome {
    let check = |name: &str, values: Vec<f64>| {
        let k = values.len();
        let head = values[..3].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tail = values[k - 3..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ok = tail.is_finite() && tail <= 2.0 * head;
        (ok, format!("{name}: small-delta max {tail:.4} vs 2 x large-delta max {:.4}", 2.0 * head))
    };
    let (a, da) = check("tikfun", report.rows.iter().map(|r| r.tikfun_ratio).collect());
    let (b, db) = check("weak_norm", report.rows.iter().map(|r| r.weak_norm_ratio).collect());
    Outcome {
        passed: a && b,
        detail: format!("{da}; {db}"),
    }
}

fn determinism() -> Outcome {
    let render_with = |threads: usize, config: &SweepConfig| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
        pool.install(|| render_report(&run_sweep(config).expect("sweep"), ReportFormat::Json).expect("json"))
    };
    let configs = [
        ("sparse", sparse_regime()),
        ("oversmoothing p=0.5", oversmoothing_regime(0.5)),
        (
            "conjugate+post",
            SweepConfig {
                post_process: true,
                ..conjugate_regime()
            },
        ),
    ];
    let mut details = Vec::new();
    let mut passed = true;
    for (name, config) in &configs {
        let one = render_with(1, config);
        let four = render_with(4, config);
        let same = one.as_bytes() == four.as_bytes();
        passed &= same;
        details.push(format!("{name}: {}", if same { "identical" } else { "DIFFERENT" }));
    }
    Outcome {
        passed,
        detail: format!("JSON with 1 vs 4 threads -> {}", details.join(", ")),
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    results.push((1, inequality_suites()));
    results.push((2, oracle_equivalence()));
    results.push((3, sparse_rate()));

    let (conjugate, conjugate_time) = sweep(&conjugate_regime());
    results.push((4, conjugate_rate(&conjugate, conjugate_time)));

    let mut over = Vec::new();
    let mut over_p0_time = Duration::ZERO;
    for p in [0.0, 0.5, 1.0] {
        let (report, elapsed) = sweep(&oversmoothing_regime(p));
        if p == 0.0 {
            over_p0_time = elapsed;
        }
        over.push((p, report));
    }
    results.push((5, oversmoothing(&over[0].1, over_p0_time)));
    results.push((6, p_independence(&over)));
    results.push((7, post_processing(&conjugate)));
    results.push((8, plateau(&over[0].1)));
    results.push((9, determinism()));

    println!();
    for (id, outcome) in &results {
        println!(
            "criterion {id} [PRIMARY] {}: {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    let failed = results.iter().filter(|(_, o)| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
