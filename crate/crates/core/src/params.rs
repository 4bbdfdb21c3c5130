//! The index tuple `(p, q, τ, a, σ)` shared by every part of the crate.
//!
//! * `p` – penalty index, the regularizer is `R_p(u) = ‖u‖_p^p` (`R_0 = ‖·‖_0`);
//! * `q` – smoothness index of the true solution, `u† ∈ ℓ_q`;
//! * `tau` – index of the norm in which the error is measured;
//! * `a` – index of the weaker norm in the two-sided stability estimate;
//! * `sigma` – exponent of the misfit term.
//!
//! The ordering `0 ≤ p ≤ q ≤ τ < a` with `τ ≥ 1` and `σ > 0` is enforced on
//! construction and on deserialization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpaceParams")]
pub struct SpaceParams {
    pub p: f64,
    pub q: f64,
    pub tau: f64,
    pub a: f64,
    pub sigma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpaceParams {
    p: f64,
    q: f64,
    tau: f64,
    a: f64,
    sigma: f64,
}

impl TryFrom<RawSpaceParams> for SpaceParams {
    type Error = Error;

    fn try_from(raw: RawSpaceParams) -> Result<Self> {
        SpaceParams::new(raw.p, raw.q, raw.tau, raw.a, raw.sigma)
    }
}

impl SpaceParams {
    pub fn new(p: f64, q: f64, tau: f64, a: f64, sigma: f64) -> Result<Self> {
        let all = [p, q, tau, a, sigma];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite index in (p, q, tau, a, sigma) = {all:?}"
            )));
        }
        if !(0.0 <= p && p <= q && q <= tau && tau < a) {
            return Err(Error::InvalidParams(format!(
                "need 0 <= p <= q <= tau < a, got p={p}, q={q}, tau={tau}, a={a}"
            )));
        }
        if tau < 1.0 {
            return Err(Error::InvalidParams(format!("need tau >= 1, got {tau}")));
        }
        if sigma <= 0.0 {
            return Err(Error::InvalidParams(format!("need sigma > 0, got {sigma}")));
        }
        Ok(SpaceParams {
            p,
            q,
            tau,
            a,
            sigma,
        })
    }

    /// `N = (a − q)σ + (q − p)a`, positive whenever the ordering holds.
    pub fn exponent_n(&self) -> f64 {
        (self.a - self.q) * self.sigma + (self.q - self.p) * self.a
    }

    /// `κ = (a − q)σ / N ∈ (0, 1]`.
    pub fn kappa(&self) -> f64 {
        (self.a - self.q) * self.sigma / self.exponent_n()
    }

    /// Interpolation weight `θ = (a − τ)/(a − p)`. Only defined in `(0, 1)`
    /// when `p < τ`.
    pub fn theta(&self) -> Result<f64> {
        if self.p >= self.tau {
            return Err(Error::DegenerateParams(format!(
                "interpolation needs p < tau, got p={}, tau={}",
                self.p, self.tau
            )));
        }
        Ok((self.a - self.tau) / (self.a - self.p))
    }

    /// Error-rate exponent `γ₁ = (a/τ)·(τ − q)/(a − q)`.
    pub fn gamma1(&self) -> f64 {
        self.a / self.tau * (self.tau - self.q) / (self.a - self.q)
    }

    /// Penalty-growth exponent `γ₂ = (q − p)a/(a − q)`.
    pub fn gamma2(&self) -> f64 {
        (self.q - self.p) * self.a / (self.a - self.q)
    }

    /// Oversmoothing: the penalty domain `ℓ_p` is strictly smaller than `ℓ_q ∋ u†`.
    pub fn is_oversmoothing(&self) -> bool {
        self.p < self.q
    }

    /// True when the misfit exponent matches the image-space index, which
    /// makes the Tikhonov functional separable for diagonal operators.
    pub fn is_separable(&self) -> bool {
        self.sigma == self.a
    }
}
