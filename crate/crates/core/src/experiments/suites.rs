//! Randomized verification suites: the analytic inequalities on random
//! inputs, and the exact solver against the brute-force oracle.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{gen_truth, DiagonalOperator, RegProblem, TruthKind};
use crate::oracle::{oracle_prox, oracle_tikhonov, GridSpec};
use crate::params::SpaceParams;
use crate::rng::{derive_seed, rng_from_seed};
use crate::sequences::{check_interpolation, InequalityCheck, TruncatedSequence};
use crate::thresholding::{bernstein_bound_check, jackson_bound_check, ThresholdRule};
use crate::tikhonov::{prox_coordinate, scalar_objective, solve, RegConfig, SolverSettings};

/// Absolute-plus-relative slack for solver-vs-oracle scalar comparisons.
pub const COORDINATE_TOL: f64 = 1e-9;

/// Relative agreement required between full-solver and oracle objectives.
pub const INSTANCE_REL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest `lhs / rhs` seen (0 when every rhs vanished).
    pub worst_ratio: f64,
    pub passed: bool,
}

impl SuiteOutcome {
    fn from_checks(name: &str, checks: Vec<Vec<InequalityCheck>>) -> Self {
        let cases = checks.len();
        let failures = checks.iter().filter(|c| c.iter().any(|x| !x.holds)).count();
        let worst_ratio = checks
            .iter()
            .flatten()
            .filter(|c| c.rhs > 0.0)
            .map(|c| c.ratio())
            .fold(0.0, f64::max);
        SuiteOutcome {
            name: name.to_string(),
            cases,
            failures,
            worst_ratio,
            passed: failures == 0,
        }
    }
}

/// Random admissible `(p, q, τ, a, σ = a)`, with the corners `p = 0`,
/// `q = 0`, `p = q`, `q = τ` and `τ = 1` drawn on purpose.
pub fn random_params(rng: &mut ChaCha8Rng) -> SpaceParams {
    let tau = if rng.gen_bool(0.2) { 1.0 } else { rng.gen_range(1.0..4.0) };
    let a = tau + rng.gen_range(0.05..4.0);
    let q = match rng.gen_range(0..10) {
        0 | 1 => 0.0,
        2 => tau,
        _ => rng.gen_range(0.0..=tau),
    };
    let p = match rng.gen_range(0..10) {
        0 | 1 => 0.0,
        2 => q,
        _ => rng.gen_range(0.0..=q),
    };
    SpaceParams::new(p, q, tau, a, a).expect("sampled indices are ordered")
}

/// Random sequence with exact zeros, entries exactly at `±beta`, and
/// magnitudes spread over four decades.
pub fn random_sequence(rng: &mut ChaCha8Rng, beta: f64) -> TruncatedSequence {
    let n = rng.gen_range(1..=64);
    let entries = (0..n)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            match rng.gen_range(0..20) {
                0..=4 => 0.0,
                5 | 6 => sign * beta,
                _ => sign * 10f64.powf(rng.gen_range(-3.0..1.0)),
            }
        })
        .collect();
    TruncatedSequence::new(entries).expect("finite entries")
}

fn random_beta(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-2.0..0.5))
}

fn per_case<T: Send>(cases: usize, seed: u64, suite: u64, f: impl Fn(&mut ChaCha8Rng) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..cases)
        .into_par_iter()
        .map(|i| f(&mut rng_from_seed(derive_seed(seed, &[suite, i as u64]))))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Interpolation, Jackson (at `t = τ` and `t = a`), Bernstein and two-sided
/// operator bounds, `cases` random instances each.
pub fn run_inequality_suites(cases: usize, seed: u64) -> Result<Vec<SuiteOutcome>> {
    let interpolation = per_case(cases, seed, 1, |rng| {
        let mut sp = random_params(rng);
        if sp.p >= sp.tau {
            let p = sp.tau * rng.gen_range(0.0..1.0);
            sp = SpaceParams::new(p, sp.q, sp.tau, sp.a, sp.sigma)?;
        }
        let beta = random_beta(rng);
        Ok(vec![check_interpolation(&random_sequence(rng, beta), &sp)?])
    })?;
    let jackson = per_case(cases, seed, 2, |rng| {
        let sp = random_params(rng);
        let rule = ThresholdRule::new(random_beta(rng))?;
        let u = random_sequence(rng, rule.beta());
        Ok(vec![
            jackson_bound_check(&u, rule, sp.q, sp.tau)?,
            jackson_bound_check(&u, rule, sp.q, sp.a)?,
        ])
    })?;
    let bernstein = per_case(cases, seed, 3, |rng| {
        let sp = random_params(rng);
        let rule = ThresholdRule::new(random_beta(rng))?;
        let u = random_sequence(rng, rule.beta());
        Ok(vec![bernstein_bound_check(&u, rule, sp.p, sp.q)?])
    })?;
    let two_sided = per_case(cases, seed, 4, |rng| {
        let a = rng.gen_range(1.0..8.0);
        let u = random_sequence(rng, 1.0);
        let lo = rng.gen_range(0.1..2.0);
        let weights = (0..u.len()).map(|_| lo * rng.gen_range(1.0..3.0)).collect();
        let op = DiagonalOperator::new(weights, a)?;
        let (lower, upper) = op.two_sided_check(&u)?;
        Ok(vec![lower, upper])
    })?;
    Ok(vec![
        SuiteOutcome::from_checks("interpolation", interpolation),
        SuiteOutcome::from_checks("jackson", jackson),
        SuiteOutcome::from_checks("bernstein", bernstein),
        SuiteOutcome::from_checks("two_sided", two_sided),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateComparison {
    pub p: f64,
    pub sigma: f64,
    pub cases: usize,
    pub failures: usize,
    /// Largest `f(t_solver) − f(t_oracle)`; negative means the solver always won.
    pub worst_excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub coordinates: Vec<CoordinateComparison>,
    pub instances: usize,
    pub instance_failures: usize,
    /// Largest `|T_solver − T_oracle| / |T_oracle|` over the full instances.
    pub worst_instance_rel_gap: f64,
    pub passed: bool,
}

pub const ORACLE_P_VALUES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
pub const ORACLE_SIGMAS: [f64; 2] = [2.0, 4.0];

/// Grid points for the scalar comparisons.
const COORDINATE_GRID_POINTS: usize = 2001;

/// Solver vs oracle on `coords` random scalar problems per `(p, σ)` pair and
/// on `instances` random full problems with six coordinates.
pub fn oracle_compare(coords: usize, instances: usize, seed: u64) -> Result<OracleComparison> {
    let settings = SolverSettings::default();
    let mut coordinates = Vec::new();
    for (pi, &p) in ORACLE_P_VALUES.iter().enumerate() {
        for (si, &sigma) in ORACLE_SIGMAS.iter().enumerate() {
            let excess = per_case(coords, seed, 100 + (pi * 10 + si) as u64, |rng| {
                let v = if rng.gen_bool(0.2) {
                    rng.gen_range(-1e-2..1e-2)
                } else {
                    rng.gen_range(-3.0..3.0)
                };
                let w = rng.gen_range(1.0..2.0);
                let alpha = 10f64.powf(rng.gen_range(-8.0..0.5));
                let t_solver = prox_coordinate(v, w, alpha, p, sigma, &settings)?;
                let grid = GridSpec::covering(v, w, COORDINATE_GRID_POINTS)?;
                let t_oracle = oracle_prox(v, w, alpha, p, sigma, &grid)?;
                let f_solver = scalar_objective(t_solver, v, w, alpha, p, sigma);
                let f_oracle = scalar_objective(t_oracle, v, w, alpha, p, sigma);
                let excess = f_solver - f_oracle;
                Ok((excess, excess > COORDINATE_TOL * (1.0 + f_oracle.abs())))
            })?;
            coordinates.push(CoordinateComparison {
                p,
                sigma,
                cases: coords,
                failures: excess.iter().filter(|e| e.1).count(),
                worst_excess: excess.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }

    let gaps = per_case(instances, seed, 200, |rng| {
        let (problem, config) = random_instance(rng, &settings)?;
        let solution = solve(&problem, &config)?;
        let (_, oracle_value) = oracle_tikhonov(&problem, &config)?;
        let gap = (solution.objective - oracle_value).abs() / oracle_value.abs().max(f64::MIN_POSITIVE);
        Ok(gap)
    })?;
    let instance_failures = gaps.iter().filter(|g| g.is_nan() || **g > INSTANCE_REL_TOL).count();
    let worst_instance_rel_gap = gaps.iter().cloned().fold(0.0, f64::max);
    let passed = instance_failures == 0 && coordinates.iter().all(|c| c.failures == 0);
    Ok(OracleComparison {
        coordinates,
        instances,
        instance_failures,
        worst_instance_rel_gap,
        passed,
    })
}

/// Random separable six-coordinate instance with `σ = a ∈ {2, 4}` and
/// `p ∈ {0, 0.5, 1}`.
fn random_instance(rng: &mut ChaCha8Rng, settings: &SolverSettings) -> Result<(RegProblem, RegConfig)> {
    let a = if rng.gen_bool(0.5) { 2.0 } else { 4.0 };
    let tau = rng.gen_range(1.0..(a - 0.25));
    let p = [0.0, 0.5, 1.0][rng.gen_range(0..3)];
    let q = rng.gen_range(p..=tau);
    let params = SpaceParams::new(p, q, tau, a, a)?;
    let n = 6;
    let kind = if q == 0.0 || rng.gen_bool(0.5) {
        TruthKind::Sparse { nonzeros: rng.gen_range(0..=n) }
    } else {
        TruthKind::Mixed { nonzeros: rng.gen_range(0..=2) }
    };
    let truth = gen_truth(kind, n, &params, 0.3, rng.gen())?;
    let op = DiagonalOperator::random(n, a, rng.gen())?;
    let delta = 10f64.powf(rng.gen_range(-3.0..-0.5));
    let problem = RegProblem::generate(op, truth, delta, rng.gen())?;
    let alpha = 10f64.powf(rng.gen_range(-6.0..0.0));
    Ok((problem, RegConfig::new(params, alpha, *settings)?))
}
