//! Exact minimization of the Tikhonov functional
//!
//! ```text
//! T_α^δ(u) = ‖Au − v^δ‖_V^σ + α R_p(u)
//! ```
//!
//! for the diagonal model with `σ = a`. In that regime the functional splits
//! into independent scalar problems `f(t) = |w t − v|^σ + α|t|^p`, and the
//! global minimizer is the vector of coordinate-wise global minimizers:
//!
//! * `p = 0`: two candidates, `t = 0` and `t = v/w`;
//! * `p ≥ 1`: `f` is convex, its stationary point is found by safeguarded
//!   Newton iteration on the derivative;
//! * `0 < p < 1`: `f` is nonconvex; a geometric grid on `(0, v/w]` locates the
//!   best bracket, golden-section search refines it and the result competes
//!   with `t = 0`.
//!
//! Also here: the a priori rule `α_δ`, the rate exponents, hard-threshold
//! post-processing and the bounded-ratio checks used by the sweep harness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RegProblem;
use crate::params::SpaceParams;
use crate::sequences::{check_same_len, power_sum, InequalityCheck, TruncatedSequence};
use crate::thresholding::{hard_threshold, ThresholdRule};

/// Smallest noise level accepted by the exponent arithmetic.
pub const MIN_DELTA: f64 = 1e-12;

/// Coordinates per rayon task in [`solve`].
const PAR_CHUNK: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    /// Number of geometric grid points bracketing the nonconvex search.
    pub solver_grid: usize,
    /// Relative bracket width (in units of `|v/w|`) at which 1-d searches stop.
    pub tol_1d: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            solver_grid: 128,
            tol_1d: 1e-12,
            max_iter: 200,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.solver_grid < 64 {
            return Err(Error::InvalidParams(format!(
                "solver_grid must be >= 64, got {}",
                self.solver_grid
            )));
        }
        if !(self.tol_1d > 0.0 && self.tol_1d.is_finite()) {
            return Err(Error::InvalidParams(format!("tol_1d must be > 0, got {}", self.tol_1d)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParams("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegConfig {
    pub params: SpaceParams,
    pub alpha: f64,
    pub solver: SolverSettings,
}

impl RegConfig {
    pub fn new(params: SpaceParams, alpha: f64, solver: SolverSettings) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "regularization parameter must be finite and > 0, got {alpha}"
            )));
        }
        solver.validate()?;
        Ok(RegConfig {
            params,
            alpha,
            solver,
        })
    }

    /// Configuration with `α = α_δ` from [`alpha_apriori`].
    pub fn apriori(params: SpaceParams, delta: f64, solver: SolverSettings) -> Result<Self> {
        Self::new(params, alpha_apriori(delta, &params)?, solver)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegSolution {
    pub u_reg: TruncatedSequence,
    pub objective: f64,
    /// `‖Au − v^δ‖_V^σ`
    pub misfit: f64,
    /// `α·R_p(u)`
    pub penalty: f64,
    pub support_size: usize,
}

fn misfit_of(problem: &RegProblem, u: &TruncatedSequence, sigma: f64) -> Result<f64> {
    let residual = problem.op.apply(u)?.sub(&problem.v_noisy)?;
    let a = problem.op.a();
    // ‖r‖_a^σ = (Σ|r_k|^a)^{σ/a}
    Ok(power_sum(residual.entries(), a).powf(sigma / a))
}

/// `T_α^δ(u) = ‖Au − v^δ‖_a^σ + α·R_p(u)`.
pub fn tikhonov_value(problem: &RegProblem, u: &TruncatedSequence, config: &RegConfig) -> Result<f64> {
    check_same_len(problem.len(), u.len())?;
    let misfit = misfit_of(problem, u, config.params.sigma)?;
    Ok(misfit + config.alpha * u.penalty(config.params.p)?)
}

/// Scalar objective `|w t − v|^σ + α|t|^p` with `|t|^0 = [t ≠ 0]`.
pub fn scalar_objective(t: f64, v: f64, w: f64, alpha: f64, p: f64, sigma: f64) -> f64 {
    let penalty = if p == 0.0 {
        if t != 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        t.abs().powf(p)
    };
    (w * t - v).abs().powf(sigma) + alpha * penalty
}

/// Global minimizer of `|w t − v|^σ + α|t|^p` over real `t`.
///
/// Failures carry coordinate index 0; [`solve`] rewrites it.
pub fn prox_coordinate(
    v: f64,
    w: f64,
    alpha: f64,
    p: f64,
    sigma: f64,
    settings: &SolverSettings,
) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("data value {v} is not finite")));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidInput(format!("weight must be finite and > 0, got {w}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParams(format!("alpha must be finite and > 0, got {alpha}")));
    }
    if !(p >= 0.0 && p.is_finite() && sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParams(format!("need p >= 0 and sigma > 0, got p={p}, sigma={sigma}")));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    // f(−t; −v) = f(t; v), so solve for |v| and restore the sign
    let sign = v.signum();
    let v = v.abs();
    let t = if p == 0.0 {
        if v.powf(sigma) > alpha {
            v / w
        } else {
            0.0
        }
    } else if p >= 1.0 && sigma >= 1.0 {
        convex_prox(v, w, alpha, p, sigma, settings)?
    } else {
        nonconvex_prox(v, w, alpha, p, sigma, settings)?
    };
    Ok(sign * t)
}

/// Root of an increasing function on `[lo, hi]` with `φ(lo) < 0 < φ(hi)`,
/// Newton steps falling back to bisection whenever a step leaves the bracket.
fn safeguarded_newton(
    phi: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    max_iter: usize,
) -> Result<f64> {
    if lo == 0.0 {
        // roots below the smallest positive double round to 0
        if phi(f64::MIN_POSITIVE).0 >= 0.0 {
            return Ok(0.0);
        }
        lo = f64::MIN_POSITIVE;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let (value, slope) = phi(x);
        if value == 0.0 {
            return Ok(x);
        }
        if value < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - value / slope;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else if hi > 4.0 * lo {
            // bisect in log scale across wide brackets
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 2.0 * f64::EPSILON * next.abs() || hi - lo <= 2.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::SolverNonConvergence {
        coordinate: 0,
        iterations: max_iter,
    })
}

/// Convex branch (`p ≥ 1`, `σ ≥ 1`, `v > 0`). The minimizer lies in
/// `[0, v/w]`; the stationarity condition `αp t^{p−1} = σw (v − wt)^{σ−1}`
/// is solved in `t` when the root sits in the lower half of the interval and
/// in the residual `r = v − wt` otherwise, so the small quantity is never
/// obtained by cancellation.
fn convex_prox(v: f64, w: f64, alpha: f64, p: f64, sigma: f64, settings: &SolverSettings) -> Result<f64> {
    let t_max = v / w;
    // g(t) = αp t^{p−1} − σw (v − wt)^{σ−1}, increasing on [0, v/w]
    let g = |t: f64| alpha * p * t.powf(p - 1.0) - sigma * w * (v - w * t).powf(sigma - 1.0);
    let g_lo = if p == 1.0 { alpha - sigma * w * v.powf(sigma - 1.0) } else { g(0.0) };
    if g_lo >= 0.0 {
        return Ok(0.0);
    }
    let g_hi = if sigma == 1.0 { alpha * p * t_max.powf(p - 1.0) - w } else { g(t_max) };
    if g_hi <= 0.0 {
        return Ok(t_max);
    }
    let mid = 0.5 * t_max;
    if g(mid) >= 0.0 {
        safeguarded_newton(
            |t| {
                let res = v - w * t;
                (
                    alpha * p * t.powf(p - 1.0) - sigma * w * res.powf(sigma - 1.0),
                    alpha * p * (p - 1.0) * t.powf(p - 2.0)
                        + sigma * (sigma - 1.0) * w * w * res.powf(sigma - 2.0),
                )
            },
            0.0,
            mid,
            settings.max_iter,
        )
    } else {
        let r_hi = v - w * mid;
        // h(r) = σw r^{σ−1} − αp ((v − r)/w)^{p−1}, increasing in r
        let r = safeguarded_newton(
            |r| {
                let t = (v - r) / w;
                (
                    sigma * w * r.powf(sigma - 1.0) - alpha * p * t.powf(p - 1.0),
                    sigma * (sigma - 1.0) * w * r.powf(sigma - 2.0)
                        + alpha * p * (p - 1.0) * t.powf(p - 2.0) / w,
                )
            },
            0.0,
            r_hi,
            settings.max_iter,
        )?;
        Ok((v - r) / w)
    }
}

/// Nonconvex branch (`0 < p < 1`, or `σ < 1`), `v > 0`.
fn nonconvex_prox(v: f64, w: f64, alpha: f64, p: f64, sigma: f64, settings: &SolverSettings) -> Result<f64> {
    let t_max = v / w;
    let f = |t: f64| (v - w * t).abs().powf(sigma) + alpha * t.powf(p);
    let m = settings.solver_grid;
    // t_i = t_max · ε^{(m−1−i)/(m−1)}, from t_max·ε up to t_max
    let log_floor = f64::EPSILON.ln();
    let grid: Vec<f64> = (0..m)
        .map(|i| {
            if i + 1 == m {
                t_max
            } else {
                t_max * (log_floor * (m - 1 - i) as f64 / (m - 1) as f64).exp()
            }
        })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    // a shallow well can hide between grid points whose values all exceed
    // f(0), so every discrete local minimum is refined, not just the best
    let (mut t_star, mut f_star) = (0.0, f64::INFINITY);
    for i in 0..m {
        let left_ok = i == 0 || vals[i] <= vals[i - 1];
        let right_ok = i + 1 == m || vals[i] <= vals[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let lo = if i == 0 { 0.0 } else { grid[i - 1] };
        let hi = if i + 1 == m { t_max } else { grid[i + 1] };
        let (t_ref, val_ref) = golden_section(&f, lo, hi, settings.tol_1d * t_max, settings.max_iter)?;
        let (t_cand, f_cand) = if val_ref < vals[i] { (t_ref, val_ref) } else { (grid[i], vals[i]) };
        if f_cand < f_star {
            t_star = t_cand;
            f_star = f_cand;
        }
    }
    // f(0) = v^σ; ties go to the sparser candidate
    Ok(if f_star < v.powf(sigma) { t_star } else { 0.0 })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<(f64, f64)> {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if hi - lo <= tol || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) });
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    Err(Error::SolverNonConvergence {
        coordinate: 0,
        iterations: max_iter,
    })
}

/// Global minimizer of `T_α^δ` in the separable regime `σ = a`.
pub fn solve(problem: &RegProblem, config: &RegConfig) -> Result<RegSolution> {
    let params = &config.params;
    if params.sigma != problem.op.a() {
        return Err(Error::InvalidParams(format!(
            "exact solver needs sigma = a (separable misfit), got sigma={} and operator index {}",
            params.sigma,
            problem.op.a()
        )));
    }
    config.solver.validate()?;
    check_same_len(problem.len(), problem.v_noisy.len())?;
    let coords: Vec<Result<f64>> = problem
        .v_noisy
        .entries()
        .par_iter()
        .zip(problem.op.weights().par_iter())
        .with_min_len(PAR_CHUNK)
        .enumerate()
        .map(|(k, (&v, &w))| {
            prox_coordinate(v, w, config.alpha, params.p, params.sigma, &config.solver)
                .map_err(|e| e.with_coordinate(k))
        })
        .collect();
    let entries = coords.into_iter().collect::<Result<Vec<f64>>>()?;
    let u_reg = TruncatedSequence::new(entries)?;
    let misfit = misfit_of(problem, &u_reg, params.sigma)?;
    let penalty = config.alpha * u_reg.penalty(params.p)?;
    Ok(RegSolution {
        objective: misfit + penalty,
        misfit,
        penalty,
        support_size: u_reg.support_size(),
        u_reg,
    })
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= MIN_DELTA && delta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "noise level must lie in [{MIN_DELTA:e}, inf), got {delta}"
        )));
    }
    Ok(())
}

/// A priori choice `α_δ = δ^{σ + (q−p)a/(a−q)}`.
pub fn alpha_apriori(delta: f64, params: &SpaceParams) -> Result<f64> {
    check_delta(delta)?;
    Ok(((params.sigma + params.gamma2()) * delta.ln()).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub gamma1: f64,
    pub gamma2: f64,
}

pub fn gamma_rates(params: &SpaceParams) -> Rates {
    Rates {
        gamma1: params.gamma1(),
        gamma2: params.gamma2(),
    }
}

/// Post-processing threshold `β_δ = δ^{a/(a−q)}`.
pub fn post_process_rule(delta: f64, params: &SpaceParams) -> Result<ThresholdRule> {
    check_delta(delta)?;
    ThresholdRule::new((params.a / (params.a - params.q) * delta.ln()).exp())
}

/// `H_{β_δ}(u_reg)`.
pub fn post_process(u_reg: &TruncatedSequence, delta: f64, params: &SpaceParams) -> Result<TruncatedSequence> {
    Ok(hard_threshold(u_reg, post_process_rule(delta, params)?))
}

/// Bound shape `α^κ + δ^σ` for the minimum of the Tikhonov functional.
pub fn tikfun_scale(alpha: f64, delta: f64, params: &SpaceParams) -> f64 {
    alpha.powf(params.kappa()) + delta.powf(params.sigma)
}

/// Bound shape `α^{(a−q)/N} + δ` for `‖u_α^δ − u†‖_a`.
pub fn weak_norm_scale(alpha: f64, delta: f64, params: &SpaceParams) -> f64 {
    alpha.powf((params.a - params.q) / params.exponent_n()) + delta
}

/// Bound shape `α^{κ−1} + δ^σ/α` for `R_p(u_α^δ)`.
pub fn penalty_scale(alpha: f64, delta: f64, params: &SpaceParams) -> f64 {
    alpha.powf(params.kappa() - 1.0) + delta.powf(params.sigma) / alpha
}

/// `T_α^δ(u_α^δ) ≤ c_cal·(α^κ + δ^σ)`.
pub fn tikfun_bound_check(
    problem: &RegProblem,
    solution: &RegSolution,
    config: &RegConfig,
    c_cal: f64,
) -> InequalityCheck {
    InequalityCheck::new(
        solution.objective,
        c_cal * tikfun_scale(config.alpha, problem.delta, &config.params),
    )
}

/// `‖u_α^δ − u†‖_a ≤ c_cal·(α^{(a−q)/N} + δ)`.
pub fn weak_norm_bound_check(
    problem: &RegProblem,
    solution: &RegSolution,
    config: &RegConfig,
    c_cal: f64,
) -> Result<InequalityCheck> {
    let err = solution.u_reg.sub(&problem.u_dagger)?.norm(config.params.a)?;
    Ok(InequalityCheck::new(
        err,
        c_cal * weak_norm_scale(config.alpha, problem.delta, &config.params),
    ))
}

/// `R_p(u_α^δ) ≤ c_cal·(α^{κ−1} + δ^σ/α)`.
pub fn penalty_bound_check(
    problem: &RegProblem,
    solution: &RegSolution,
    config: &RegConfig,
    c_cal: f64,
) -> Result<InequalityCheck> {
    Ok(InequalityCheck::new(
        solution.u_reg.penalty(config.params.p)?,
        c_cal * penalty_scale(config.alpha, problem.delta, &config.params),
    ))
}

/// Empirical stand-in for an existential constant: twice the largest ratio
/// seen on a pilot sweep.
pub fn calibrate_constant(pilot_ratios: &[f64]) -> Result<f64> {
    let max = pilot_ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max.is_finite() && max > 0.0) {
        return Err(Error::InvalidInput("pilot ratios must contain a finite positive value".into()));
    }
    Ok(2.0 * max)
}
