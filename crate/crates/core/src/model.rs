//! Synthetic forward problems `A u = v` with `A = diag(w)` acting into `V = ℓ_a`.
//!
//! With `d₁ = min w_k` and `d₂ = max w_k` the operator satisfies the two-sided
//! estimate `d₁‖u‖_a ≤ ‖Au‖_V ≤ d₂‖u‖_a` exactly. At finite truncation length
//! the range is closed; these instances simulate the infinite-dimensional
//! scheme, they do not reproduce its ill-posedness.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SpaceParams;
use crate::rng::{derive_seed, rng_from_seed};
use crate::sequences::{check_same_len, power_sum, InequalityCheck, TruncatedSequence};

/// Range of the seeded weight draw.
pub const DEFAULT_WEIGHT_RANGE: (f64, f64) = (1.0, 2.0);

/// Range of the nonzero magnitudes in sparse truths.
pub const SPARSE_VALUE_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    weights: Vec<f64>,
    d1: f64,
    d2: f64,
    a: f64,
}

impl DiagonalOperator {
    pub fn new(weights: Vec<f64>, a: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("operator needs at least one weight".into()));
        }
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "weight {} at index {k} is not finite and positive",
                weights[k]
            )));
        }
        if !(a.is_finite() && a >= 1.0) {
            return Err(Error::InvalidParams(format!("image-space index a must be >= 1, got {a}")));
        }
        let d1 = weights.iter().cloned().fold(f64::INFINITY, f64::min);
        let d2 = weights.iter().cloned().fold(0.0, f64::max);
        Ok(DiagonalOperator { weights, d1, d2, a })
    }

    /// Weights drawn uniformly from [`DEFAULT_WEIGHT_RANGE`].
    pub fn random(n: usize, a: f64, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let (lo, hi) = DEFAULT_WEIGHT_RANGE;
        let weights = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
        Self::new(weights, a)
    }

    pub fn identity(n: usize, a: f64) -> Result<Self> {
        Self::new(vec![1.0; n], a)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn apply(&self, u: &TruncatedSequence) -> Result<TruncatedSequence> {
        check_same_len(self.len(), u.len())?;
        TruncatedSequence::new(
            self.weights
                .iter()
                .zip(u.entries())
                .map(|(w, x)| w * x)
                .collect(),
        )
    }

    /// `‖y‖_V = ‖y‖_a` for an image-space element.
    pub fn image_norm(&self, y: &TruncatedSequence) -> Result<f64> {
        check_same_len(self.len(), y.len())?;
        y.norm(self.a)
    }

    /// Both halves of `d₁‖u‖_a ≤ ‖Au‖_V ≤ d₂‖u‖_a`, in that order.
    pub fn two_sided_check(&self, u: &TruncatedSequence) -> Result<(InequalityCheck, InequalityCheck)> {
        let image = self.image_norm(&self.apply(u)?)?;
        let norm_a = u.norm(self.a)?;
        Ok((
            InequalityCheck::new(self.d1 * norm_a, image),
            InequalityCheck::new(image, self.d2 * norm_a),
        ))
    }
}

pub fn apply_operator(op: &DiagonalOperator, u: &TruncatedSequence) -> Result<TruncatedSequence> {
    op.apply(u)
}

/// Families of true solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TruthKind {
    /// `u_k = k^{−(1/q + margin)}`, in `ℓ_q` but not in `ℓ_{q'}` for
    /// `q' ≤ 1/(1/q + margin)`.
    PowerDecay,
    /// Exactly `nonzeros` entries with magnitudes in [`SPARSE_VALUE_RANGE`] at
    /// seeded positions.
    Sparse { nonzeros: usize },
    /// The first `nonzeros` entries drawn as in `Sparse`, followed by the
    /// power-decay tail.
    Mixed { nonzeros: usize },
}

/// Decay exponent `1/q + margin` of the power-decay family.
pub fn decay_exponent(params: &SpaceParams, decay_margin: f64) -> f64 {
    1.0 / params.q + decay_margin
}

pub fn gen_truth(
    kind: TruthKind,
    n: usize,
    params: &SpaceParams,
    decay_margin: f64,
    seed: u64,
) -> Result<TruncatedSequence> {
    if n == 0 {
        return Err(Error::InvalidInput("truncation length must be >= 1".into()));
    }
    let needs_tail = matches!(kind, TruthKind::PowerDecay | TruthKind::Mixed { .. });
    if needs_tail {
        if params.q == 0.0 {
            return Err(Error::InvalidParams(
                "power-decay truth needs q > 0; use a sparse truth for q = 0".into(),
            ));
        }
        if !(decay_margin > 0.0 && decay_margin.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "decay margin must be > 0, got {decay_margin}"
            )));
        }
    }
    let exponent = decay_exponent(params, decay_margin);
    let power = |k: usize| ((k + 1) as f64).powf(-exponent);
    let mut rng = rng_from_seed(seed);
    let (lo, hi) = SPARSE_VALUE_RANGE;
    let entries = match kind {
        TruthKind::PowerDecay => (0..n).map(power).collect(),
        TruthKind::Sparse { nonzeros } => {
            if nonzeros > n {
                return Err(Error::InvalidInput(format!(
                    "cannot place {nonzeros} nonzeros in length {n}"
                )));
            }
            let mut entries = vec![0.0; n];
            for k in rand::seq::index::sample(&mut rng, n, nonzeros) {
                entries[k] = rng.gen_range(lo..=hi);
            }
            entries
        }
        TruthKind::Mixed { nonzeros } => {
            if nonzeros > n {
                return Err(Error::InvalidInput(format!(
                    "cannot place {nonzeros} head entries in length {n}"
                )));
            }
            (0..n)
                .map(|k| if k < nonzeros { rng.gen_range(lo..=hi) } else { power(k) })
                .collect()
        }
    };
    TruncatedSequence::new(entries)
}

/// `‖(u†_k)_{k>n}‖_τ` of the untruncated truth: zero for sparse truths, and for
/// power decay `(Σ_{k>n} k^{−sτ})^{1/τ}` via the midpoint integral
/// `∫_{n+1/2}^∞ t^{−sτ} dt`.
pub fn truth_tail_norm(
    kind: TruthKind,
    n: usize,
    params: &SpaceParams,
    decay_margin: f64,
) -> Result<f64> {
    match kind {
        TruthKind::Sparse { .. } => Ok(0.0),
        TruthKind::PowerDecay | TruthKind::Mixed { .. } => {
            if params.q == 0.0 {
                return Err(Error::InvalidParams("power-decay truth needs q > 0".into()));
            }
            let x = decay_exponent(params, decay_margin) * params.tau;
            if x <= 1.0 {
                return Err(Error::InvalidParams(format!(
                    "power-decay truth is not in l_tau (exponent {x} <= 1)"
                )));
            }
            let tail_sum = (n as f64 + 0.5).powf(1.0 - x) / (x - 1.0);
            Ok(tail_sum.powf(1.0 / params.tau))
        }
    }
}

/// `v^δ = v + δ·η/‖η‖_a` with `η` i.i.d. standard normal, so that
/// `‖v^δ − v‖_a = δ` up to roundoff.
pub fn gen_noise(v_clean: &TruncatedSequence, delta: f64, a: f64, seed: u64) -> Result<TruncatedSequence> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!("noise level must be finite and > 0, got {delta}")));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParams(format!("noise norm index must be > 0, got {a}")));
    }
    let n = v_clean.len();
    let mut attempt = 0u64;
    loop {
        let mut rng = rng_from_seed(if attempt == 0 {
            seed
        } else {
            derive_seed(seed, &[attempt])
        });
        let eta: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let eta_norm = power_sum(&eta, a).powf(1.0 / a);
        if eta_norm > 0.0 && eta_norm.is_finite() {
            let scale = delta / eta_norm;
            return TruncatedSequence::new(
                v_clean
                    .entries()
                    .iter()
                    .zip(&eta)
                    .map(|(v, e)| v + scale * e)
                    .collect(),
            );
        }
        attempt += 1;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegProblem {
    pub op: DiagonalOperator,
    pub u_dagger: TruncatedSequence,
    pub v_clean: TruncatedSequence,
    pub v_noisy: TruncatedSequence,
    pub delta: f64,
    pub seed: u64,
}

impl RegProblem {
    /// Builds `v = A u†` and calibrated noisy data at level `delta`.
    pub fn generate(op: DiagonalOperator, u_dagger: TruncatedSequence, delta: f64, seed: u64) -> Result<Self> {
        let v_clean = op.apply(&u_dagger)?;
        let v_noisy = gen_noise(&v_clean, delta, op.a(), seed)?;
        Ok(RegProblem {
            op,
            u_dagger,
            v_clean,
            v_noisy,
            delta,
            seed,
        })
    }

    /// Assembles a problem from stored parts and verifies `‖v^δ − v‖_V ≤ δ`.
    pub fn from_parts(
        op: DiagonalOperator,
        u_dagger: TruncatedSequence,
        v_noisy: TruncatedSequence,
        delta: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidInput(format!("noise level must be > 0, got {delta}")));
        }
        check_same_len(op.len(), v_noisy.len())?;
        let v_clean = op.apply(&u_dagger)?;
        let actual = op.image_norm(&v_noisy.sub(&v_clean)?)?;
        if actual > delta * (1.0 + 1e-9) {
            return Err(Error::InvalidInput(format!(
                "data misfit {actual:e} exceeds stated noise level {delta:e}"
            )));
        }
        Ok(RegProblem {
            op,
            u_dagger,
            v_clean,
            v_noisy,
            delta,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.op.len()
    }

    pub fn is_empty(&self) -> bool {
        self.op.is_empty()
    }

    pub fn to_record(&self, params: &SpaceParams) -> ProblemRecord {
        ProblemRecord {
            params: *params,
            weights: self.op.weights().to_vec(),
            u_dagger: self.u_dagger.clone(),
            v_noisy: self.v_noisy.clone(),
            delta: self.delta,
            seed: self.seed,
        }
    }
}

/// On-disk layout of a problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRecord {
    pub weights: Vec<f64>,
    pub u_dagger: TruncatedSequence,
    pub v_noisy: TruncatedSequence,
    pub delta: f64,
    pub seed: u64,
    pub params: SpaceParams,
}

impl ProblemRecord {
    pub fn into_problem(self) -> Result<(RegProblem, SpaceParams)> {
        let op = DiagonalOperator::new(self.weights, self.params.a)?;
        let problem = RegProblem::from_parts(op, self.u_dagger, self.v_noisy, self.delta, self.seed)?;
        Ok((problem, self.params))
    }
}
