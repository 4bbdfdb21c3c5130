//! Brute-force reference minimizers.
//!
//! Nothing in here calls into the solver's 1-d routines: the scalar objective
//! is evaluated on a dense grid (uniform over the whole bracket, geometric
//! towards 0 where `|t|^p` has unbounded slope, plus 0 and `v/w`), and the
//! best grid point is polished by an independent ternary search.

use crate::error::{Error, Result};
use crate::model::RegProblem;
use crate::sequences::TruncatedSequence;
use crate::tikhonov::{tikhonov_value, RegConfig};

pub const MIN_GRID_POINTS: usize = 1000;

/// Largest instance [`oracle_tikhonov`] accepts.
pub const MAX_ORACLE_LEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!("degenerate grid [{lo}, {hi}]")));
        }
        if points < MIN_GRID_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {points}"
            )));
        }
        Ok(GridSpec { lo, hi, points })
    }

    /// `[min(0, c) − |c|, max(0, c) + |c|]` with `c = v/w`, or `[−1, 1]` for `v = 0`.
    pub fn covering(v: f64, w: f64, points: usize) -> Result<Self> {
        let c = v / w;
        if c == 0.0 {
            return Self::new(-1.0, 1.0, points);
        }
        Self::new(c.min(0.0) - c.abs(), c.max(0.0) + c.abs(), points)
    }
}

fn objective(t: f64, v: f64, w: f64, alpha: f64, p: f64, sigma: f64) -> f64 {
    let reg = match (p == 0.0, t == 0.0) {
        (_, true) => 0.0,
        (true, false) => alpha,
        (false, false) => alpha * t.abs().powf(p),
    };
    (w * t - v).abs().powf(sigma) + reg
}

/// Grid minimizer of `|w t − v|^σ + α|t|^p`.
pub fn oracle_prox(v: f64, w: f64, alpha: f64, p: f64, sigma: f64, grid: &GridSpec) -> Result<f64> {
    if !(v.is_finite() && w > 0.0 && alpha > 0.0 && p >= 0.0 && sigma > 0.0) {
        return Err(Error::InvalidInput(format!(
            "oracle arguments out of range: v={v}, w={w}, alpha={alpha}, p={p}, sigma={sigma}"
        )));
    }
    let c = v / w;
    if grid.lo > c.min(0.0) - c.abs() || grid.hi < c.max(0.0) + c.abs() {
        return Err(Error::InvalidInput(format!(
            "grid [{}, {}] does not cover the search interval around 0 and {c}",
            grid.lo, grid.hi
        )));
    }

    let mut ts: Vec<f64> = Vec::with_capacity(2 * grid.points + 2);
    let span = grid.hi - grid.lo;
    for i in 0..grid.points {
        ts.push(grid.lo + span * i as f64 / (grid.points - 1) as f64);
    }
    let scale = c.abs().max(f64::MIN_POSITIVE);
    let decades = 18.0;
    let geo = grid.points / 2;
    for j in 0..geo {
        let x = scale * 10f64.powf(-decades * j as f64 / geo as f64);
        ts.push(x);
        ts.push(-x);
    }
    ts.push(0.0);
    ts.push(c);
    ts.retain(|t| *t >= grid.lo && *t <= grid.hi);
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();

    let f = |t: f64| objective(t, v, w, alpha, p, sigma);
    // zero wins ties
    let mut best_t = 0.0;
    let mut best_f = f(0.0);
    let mut best_i = ts.iter().position(|t| *t == 0.0).unwrap();
    for (i, &t) in ts.iter().enumerate() {
        let ft = f(t);
        if ft < best_f {
            best_t = t;
            best_f = ft;
            best_i = i;
        }
    }
    if p == 0.0 {
        return Ok(best_t);
    }

    let left = ts[best_i.saturating_sub(1)];
    let right = ts[(best_i + 1).min(ts.len() - 1)];
    let (t_ref, f_ref) = ternary_refine(&f, left, right);
    Ok(if f_ref < best_f { t_ref } else { best_t })
}

fn ternary_refine(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..300 {
        if hi - lo <= 1e-15 * hi.abs().max(lo.abs()) {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mid = 0.5 * (lo + hi);
    [lo, mid, hi]
        .into_iter()
        .map(|t| (t, f(t)))
        .fold((mid, f64::INFINITY), |acc, cand| if cand.1 < acc.1 { cand } else { acc })
}

/// Grid points per coordinate used by [`oracle_tikhonov`].
pub const ORACLE_TIKHONOV_POINTS: usize = 4001;

/// Coordinate-wise oracle minimizer of `T_α^δ` for instances with at most
/// [`MAX_ORACLE_LEN`] coordinates. Returns the minimizer and its functional value.
pub fn oracle_tikhonov(problem: &RegProblem, config: &RegConfig) -> Result<(TruncatedSequence, f64)> {
    let n = problem.len();
    if n > MAX_ORACLE_LEN {
        return Err(Error::InvalidInput(format!(
            "oracle_tikhonov is exhaustive and limited to n <= {MAX_ORACLE_LEN}, got {n}"
        )));
    }
    let params = &config.params;
    if params.sigma != problem.op.a() {
        return Err(Error::InvalidParams("oracle_tikhonov relies on separability (sigma = a)".into()));
    }
    let mut entries = Vec::with_capacity(n);
    for (&v, &w) in problem.v_noisy.entries().iter().zip(problem.op.weights()) {
        let grid = GridSpec::covering(v, w, ORACLE_TIKHONOV_POINTS)?;
        entries.push(oracle_prox(v, w, config.alpha, params.p, params.sigma, &grid)?);
    }
    let u_best = TruncatedSequence::new(entries)?;
    let value = tikhonov_value(problem, &u_best, config)?;
    Ok((u_best, value))
}
