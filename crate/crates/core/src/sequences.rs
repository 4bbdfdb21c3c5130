//! Finitely truncated sequences, `ℓs` (quasi-)norms and the penalties `R_p`.
//!
//! A [`TruncatedSequence`] of length `n` stands for the infinite sequence
//! `(u_1, …, u_n, 0, 0, …)`. All sums run serially in ascending index order so
//! that every value is bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SpaceParams;

/// Relative slack for every analytic-inequality check.
pub const INEQUALITY_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TruncatedSequence {
    entries: Vec<f64>,
}

impl TryFrom<Vec<f64>> for TruncatedSequence {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        TruncatedSequence::new(entries)
    }
}

impl From<TruncatedSequence> for Vec<f64> {
    fn from(u: TruncatedSequence) -> Self {
        u.entries
    }
}

impl TruncatedSequence {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput(
                "sequence must have truncation length >= 1".into(),
            ));
        }
        if let Some(k) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry {} at index {k}",
                entries[k]
            )));
        }
        Ok(TruncatedSequence { entries })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    /// `‖u‖_s`; for `s = 0` the number of nonzero entries.
    pub fn norm(&self, s: f64) -> Result<f64> {
        check_index(s, "norm index s")?;
        if s == 0.0 {
            return Ok(self.support_size() as f64);
        }
        Ok(power_sum(&self.entries, s).powf(1.0 / s))
    }

    /// `R_p(u) = Σ|u_k|^p`, and `R_0(u) = ‖u‖_0`.
    pub fn penalty(&self, p: f64) -> Result<f64> {
        check_index(p, "penalty index p")?;
        if p == 0.0 {
            return Ok(self.support_size() as f64);
        }
        Ok(power_sum(&self.entries, p))
    }

    /// Number of entries that are exactly nonzero.
    pub fn support_size(&self) -> usize {
        self.entries.iter().filter(|&&x| x != 0.0).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &TruncatedSequence) -> Result<TruncatedSequence> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn add(&self, other: &TruncatedSequence) -> Result<TruncatedSequence> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn scale(&self, c: f64) -> Result<TruncatedSequence> {
        TruncatedSequence::new(self.entries.iter().map(|x| c * x).collect())
    }

    fn zip_with(
        &self,
        other: &TruncatedSequence,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<TruncatedSequence> {
        check_same_len(self.len(), other.len())?;
        TruncatedSequence::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        )
    }
}

pub(crate) fn check_same_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

fn check_index(s: f64, what: &str) -> Result<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidInput(format!("{what} must be finite and >= 0, got {s}")));
    }
    Ok(())
}

/// `Σ|x_k|^s` for `s > 0`, ascending index order.
pub(crate) fn power_sum(xs: &[f64], s: f64) -> f64 {
    let mut acc = 0.0;
    for x in xs {
        acc += x.abs().powf(s);
    }
    acc
}

pub fn norm_s(u: &TruncatedSequence, s: f64) -> Result<f64> {
    u.norm(s)
}

pub fn penalty_rp(u: &TruncatedSequence, p: f64) -> Result<f64> {
    u.penalty(p)
}

/// Outcome of a numerical inequality check `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    /// `lhs ≤ rhs·(1 + INEQUALITY_SLACK)`.
    pub fn new(lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + INEQUALITY_SLACK),
        }
    }

    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Interpolation inequality `‖u‖_τ^τ ≤ R_p(u)^θ · ‖u‖_a^{a(1−θ)}` with
/// `θ = (a − τ)/(a − p)`.
pub fn check_interpolation(u: &TruncatedSequence, params: &SpaceParams) -> Result<InequalityCheck> {
    let theta = params.theta()?;
    let lhs = power_sum(u.entries(), params.tau);
    let rp = u.penalty(params.p)?;
    // ‖u‖_a^{a(1−θ)} = (Σ|u_k|^a)^{1−θ}
    let rhs = rp.powf(theta) * power_sum(u.entries(), params.a).powf(1.0 - theta);
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Outcome of [`radon_riesz_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadonRieszOutcome {
    /// Hypotheses observed and `‖u_n − u‖_p` observed to converge.
    Holds,
    /// Hypotheses observed but `‖u_n − u‖_p` does not converge.
    Violated,
    /// Componentwise or norm convergence not observed on the family.
    NotApplicable,
}

/// A finite family of values "converges" when every value in its last
/// quarter is at most 10× the final value and the final value is below `tol`.
pub fn observed_convergence(values: &[f64], tol: f64) -> bool {
    let Some(&last) = values.last() else {
        return false;
    };
    let start = values.len() - values.len().div_ceil(4);
    last < tol && values[start..].iter().all(|&v| v <= 10.0 * last)
}

/// Probes the Radon–Riesz property on a finite family: if `u_n → u`
/// componentwise and `‖u_n‖_p → ‖u‖_p`, then `‖u_n − u‖_p → 0`.
pub fn radon_riesz_probe(
    family: &[TruncatedSequence],
    u: &TruncatedSequence,
    p: f64,
    tol: f64,
) -> Result<RadonRieszOutcome> {
    if family.is_empty() {
        return Err(Error::InvalidInput("radon-riesz probe needs a non-empty family".into()));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("probe index p must be > 0, got {p}")));
    }
    let norm_u = u.norm(p)?;
    let mut componentwise = Vec::with_capacity(family.len());
    let mut norm_gap = Vec::with_capacity(family.len());
    let mut distance = Vec::with_capacity(family.len());
    for un in family {
        let diff = un.sub(u)?;
        componentwise.push(diff.max_abs());
        norm_gap.push((un.norm(p)? - norm_u).abs());
        distance.push(diff.norm(p)?);
    }
    if !(observed_convergence(&componentwise, tol) && observed_convergence(&norm_gap, tol)) {
        return Ok(RadonRieszOutcome::NotApplicable);
    }
    Ok(if observed_convergence(&distance, tol) {
        RadonRieszOutcome::Holds
    } else {
        RadonRieszOutcome::Violated
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(xs: &[f64]) -> TruncatedSequence {
        TruncatedSequence::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(TruncatedSequence::new(vec![]).is_err());
        assert!(TruncatedSequence::new(vec![1.0, f64::NAN]).is_err());
        assert!(TruncatedSequence::new(vec![f64::INFINITY]).is_err());
        assert!(serde_json::from_str::<TruncatedSequence>("[]").is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_s(&seq(&[0.0, 0.0, 0.0]), 2.0).unwrap(), 0.0);
        assert_eq!(norm_s(&seq(&[3.0, 4.0]), 2.0).unwrap(), 5.0);
        assert_eq!(norm_s(&seq(&[1.0, -2.0, 0.0, 0.5]), 0.0).unwrap(), 3.0);
        assert!(norm_s(&seq(&[1.0]), -1.0).is_err());
        assert!(norm_s(&seq(&[1.0]), f64::NAN).is_err());
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(penalty_rp(&seq(&[1.0, 0.5, 0.25]), 1.0).unwrap(), 1.75);
        assert_eq!(penalty_rp(&seq(&[2.0, 0.0, -2.0]), 0.0).unwrap(), 2.0);
        assert_eq!(penalty_rp(&seq(&[4.0]), 0.5).unwrap(), 2.0);
    }

    #[test]
    fn zero_test_is_exact() {
        let u = seq(&[1e-300, 0.0, -0.0, 5e-324]);
        assert_eq!(u.penalty(0.0).unwrap(), 2.0);
    }

    #[test]
    fn interpolation_zero_and_single_spike() {
        let sp = SpaceParams::new(1.0, 1.0, 2.0, 4.0, 4.0).unwrap();
        let c = sp.theta().unwrap();
        assert_eq!(c, 2.0 / 3.0);

        let z = check_interpolation(&seq(&[0.0; 5]), &sp).unwrap();
        assert_eq!((z.lhs, z.rhs, z.holds), (0.0, 0.0, true));

        let spike = check_interpolation(&seq(&[-1.7, 0.0, 0.0]), &sp).unwrap();
        assert!(spike.holds);
        assert!((spike.lhs - 1.7f64.powi(2)).abs() < 1e-14);
        assert!((spike.rhs / spike.lhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_degenerate() {
        let sp = SpaceParams::new(2.0, 2.0, 2.0, 4.0, 4.0).unwrap();
        assert!(matches!(
            check_interpolation(&seq(&[1.0]), &sp),
            Err(Error::DegenerateParams(_))
        ));
    }

    #[test]
    fn exponent_identity() {
        for &(p, tau, a) in &[(0.0, 2.0, 4.0), (1.0, 2.0, 4.0), (0.5, 1.5, 3.0), (0.25, 1.0, 7.5)] {
            let sp = SpaceParams::new(p, p, tau, a, a).unwrap();
            let th = sp.theta().unwrap();
            assert!((p * th + a * (1.0 - th) - tau).abs() <= 4.0 * f64::EPSILON * tau);
        }
    }

    #[test]
    fn radon_riesz_examples() {
        let u = seq(&[1.0, -0.5, 0.25, 0.0]);
        let same: Vec<_> = (0..20).map(|_| u.clone()).collect();
        assert_eq!(radon_riesz_probe(&same, &u, 1.0, 1e-6).unwrap(), RadonRieszOutcome::Holds);

        let scaled: Vec<_> = (1..=2000)
            .map(|n| u.scale(1.0 - 1.0 / n as f64).unwrap())
            .collect();
        assert_eq!(radon_riesz_probe(&scaled, &u, 1.5, 1e-2).unwrap(), RadonRieszOutcome::Holds);

        let far = u.scale(3.0).unwrap();
        let alternating: Vec<_> = (0..40)
            .map(|n| if n % 2 == 0 { far.clone() } else { u.clone() })
            .collect();
        assert_eq!(
            radon_riesz_probe(&alternating, &u, 1.0, 1e-6).unwrap(),
            RadonRieszOutcome::NotApplicable
        );

        assert!(radon_riesz_probe(&[], &u, 1.0, 1e-6).is_err());
    }

    #[test]
    fn lp_tends_to_l0_for_entries_bounded_away_from_zero() {
        let u = seq(&[0.0, 0.5, -0.75, 0.0, 2.0, 1.0, 0.0, -0.5]);
        let l0 = u.penalty(0.0).unwrap();
        assert!((u.penalty(1e-3).unwrap() - l0).abs() < 0.05);
    }

    fn entries(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(
            prop_oneof![Just(0.0), -10.0f64..10.0, -1e-3f64..1e-3],
            1..max_len,
        )
    }

    proptest! {
        #[test]
        fn norms_are_monotone_in_index(xs in entries(40), s in 0.05f64..6.0, ds in 0.0f64..6.0) {
            let u = seq(&xs);
            let t = s + ds;
            let ns = u.norm(s).unwrap();
            let nt = u.norm(t).unwrap();
            prop_assert!(nt <= ns * (1.0 + INEQUALITY_SLACK), "‖u‖_{} = {} > ‖u‖_{} = {}", t, nt, s, ns);
        }

        #[test]
        fn triangle_inequality_for_p_at_least_one(
            (xs, ys) in (1usize..30).prop_flat_map(|n| (
                prop::collection::vec(-5.0f64..5.0, n),
                prop::collection::vec(-5.0f64..5.0, n),
            )),
            p in 1.0f64..8.0,
        ) {
            let (u, v) = (seq(&xs), seq(&ys));
            let lhs = u.add(&v).unwrap().norm(p).unwrap();
            let rhs = u.norm(p).unwrap() + v.norm(p).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + INEQUALITY_SLACK));
        }

        #[test]
        fn penalty_is_subadditive_below_one(
            (xs, ys) in (1usize..30).prop_flat_map(|n| (
                prop::collection::vec(prop_oneof![Just(0.0), -5.0f64..5.0], n),
                prop::collection::vec(prop_oneof![Just(0.0), -5.0f64..5.0], n),
            )),
            p in 0.0f64..1.0,
        ) {
            let (u, v) = (seq(&xs), seq(&ys));
            let lhs = u.add(&v).unwrap().penalty(p).unwrap();
            let rhs = u.penalty(p).unwrap() + v.penalty(p).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + INEQUALITY_SLACK));
        }

        #[test]
        fn interpolation_holds_on_random_input(
            xs in prop::collection::vec(-1.0f64..1.0, 50..51),
        ) {
            let sp = SpaceParams::new(1.0, 1.0, 2.0, 4.0, 4.0).unwrap();
            prop_assert!(check_interpolation(&seq(&xs), &sp).unwrap().holds);
        }

        #[test]
        fn small_p_penalty_approaches_support_size(
            xs in prop::collection::vec(prop_oneof![Just(0.0), 0.5f64..2.0, -2.0f64..-0.5], 1..40),
        ) {
            let u = seq(&xs);
            prop_assert!((u.penalty(1e-3).unwrap() - u.penalty(0.0).unwrap()).abs() < 0.05);
        }
    }
}
