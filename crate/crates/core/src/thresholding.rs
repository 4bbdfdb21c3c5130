//! Hard thresholding `H_β`, the auxiliary elements `û_α = H_{β(α)}(u†)` and
//! numerical checks of the Jackson- and Bernstein-type estimates
//!
//! ```text
//! ‖H_β(u) − u‖_t^t ≤ R_q(u) β^{t−q},      R_p(H_β(u)) ≤ R_q(u) β^{−(q−p)}.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SpaceParams;
use crate::sequences::{power_sum, InequalityCheck, TruncatedSequence};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    beta: f64,
}

impl ThresholdRule {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "threshold level must be finite and > 0, got {beta}"
            )));
        }
        Ok(ThresholdRule { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Keeps entries with `|u_k| ≥ β` (the boundary is kept) and zeroes the rest.
pub fn hard_threshold(u: &TruncatedSequence, rule: ThresholdRule) -> TruncatedSequence {
    let beta = rule.beta;
    let entries = u
        .entries()
        .iter()
        .map(|&x| if x.abs() >= beta { x } else { 0.0 })
        .collect();
    TruncatedSequence::new(entries).expect("thresholding preserves length and finiteness")
}

/// `β(α) = α^{a/N}`, evaluated as `exp((a/N)·ln α)`.
pub fn beta_of_alpha(alpha: f64, params: &SpaceParams) -> Result<ThresholdRule> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "regularization parameter must be finite and > 0, got {alpha}"
        )));
    }
    ThresholdRule::new((params.a / params.exponent_n() * alpha.ln()).exp())
}

/// Auxiliary element `û_α = H_{β(α)}(u†)`.
pub fn auxiliary_element(
    u_dagger: &TruncatedSequence,
    alpha: f64,
    params: &SpaceParams,
) -> Result<TruncatedSequence> {
    Ok(hard_threshold(u_dagger, beta_of_alpha(alpha, params)?))
}

fn r_index(u: &[f64], s: f64) -> f64 {
    if s == 0.0 {
        u.iter().filter(|&&x| x != 0.0).count() as f64
    } else {
        power_sum(u, s)
    }
}

/// Jackson-type estimate `‖H_β(u) − u‖_t^t ≤ R_q(u)·β^{t−q}` for `0 ≤ q ≤ t`, `t ≥ 1`.
pub fn jackson_bound_check(
    u: &TruncatedSequence,
    rule: ThresholdRule,
    q: f64,
    t: f64,
) -> Result<InequalityCheck> {
    if !(q >= 0.0 && q <= t && t >= 1.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "jackson estimate needs 0 <= q <= t, t >= 1; got q={q}, t={t}"
        )));
    }
    let residual = hard_threshold(u, rule).sub(u)?;
    let lhs = power_sum(residual.entries(), t);
    let rhs = r_index(u.entries(), q) * rule.beta.powf(t - q);
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Bernstein-type estimate `R_p(H_β(u)) ≤ R_q(u)·β^{−(q−p)}` for `0 ≤ p ≤ q`.
pub fn bernstein_bound_check(
    u: &TruncatedSequence,
    rule: ThresholdRule,
    p: f64,
    q: f64,
) -> Result<InequalityCheck> {
    if !(p >= 0.0 && p <= q && q.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "bernstein estimate needs 0 <= p <= q; got p={p}, q={q}"
        )));
    }
    let lhs = r_index(hard_threshold(u, rule).entries(), p);
    let rhs = r_index(u.entries(), q) * rule.beta.powf(-(q - p));
    Ok(InequalityCheck::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(xs: &[f64]) -> TruncatedSequence {
        TruncatedSequence::new(xs.to_vec()).unwrap()
    }

    fn geometric(len: usize) -> TruncatedSequence {
        TruncatedSequence::new((0..len).map(|k| 0.5f64.powi(k as i32)).collect()).unwrap()
    }

    #[test]
    fn boundary_is_kept() {
        let out = hard_threshold(&seq(&[3.0, 1.0, 0.5]), ThresholdRule::new(1.0).unwrap());
        assert_eq!(out.entries(), &[3.0, 1.0, 0.0]);
        let out = hard_threshold(&seq(&[-1.0, 0.999_999]), ThresholdRule::new(1.0).unwrap());
        assert_eq!(out.entries(), &[-1.0, 0.0]);
    }

    #[test]
    fn extreme_thresholds() {
        let u = seq(&[0.3, -2.0, 0.0, 1.1]);
        let all_gone = hard_threshold(&u, ThresholdRule::new(2.5).unwrap());
        assert_eq!(all_gone.support_size(), 0);
        let untouched = hard_threshold(&u, ThresholdRule::new(0.3).unwrap());
        assert_eq!(untouched, u);
    }

    #[test]
    fn rule_rejects_nonpositive() {
        assert!(ThresholdRule::new(0.0).is_err());
        assert!(ThresholdRule::new(-1.0).is_err());
        assert!(ThresholdRule::new(f64::INFINITY).is_err());
    }

    #[test]
    fn beta_of_alpha_examples() {
        let sp = SpaceParams::new(0.0, 1.0, 2.0, 4.0, 4.0).unwrap();
        assert_eq!(beta_of_alpha(1.0, &sp).unwrap().beta(), 1.0);
        let b = beta_of_alpha(1e-4, &sp).unwrap().beta();
        assert!((b - 0.1).abs() < 1e-15, "{b}");

        let sp = SpaceParams::new(1.0, 1.0, 2.0, 4.0, 4.0).unwrap();
        let b = beta_of_alpha(4096.0, &sp).unwrap().beta();
        assert!((b - 16.0).abs() < 1e-12, "{b}");
        assert!(beta_of_alpha(0.0, &sp).is_err());
    }

    #[test]
    fn auxiliary_element_examples() {
        let sp = SpaceParams::new(0.0, 1.0, 2.0, 4.0, 4.0).unwrap();
        let u = TruncatedSequence::new((1..=50).map(|k| (k as f64).powf(-1.2)).collect()).unwrap();
        let aux = auxiliary_element(&u, 1e-4, &sp).unwrap();
        let kept: Vec<usize> = aux
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(k, _)| k + 1)
            .collect();
        // k^-1.2 >= 0.1 <=> k <= 10^(1/1.2) ≈ 6.81
        assert_eq!(kept, vec![1, 2, 3, 4, 5, 6]);

        // β(1) = 1 > max|u| removes everything
        let small = seq(&[0.5, -0.9, 0.0]);
        assert_eq!(auxiliary_element(&small, 1.0, &sp).unwrap().support_size(), 0);

        let sparse = seq(&[0.0, 2.0, 0.0, -3.0]);
        assert_eq!(auxiliary_element(&sparse, 1.0, &sp).unwrap(), sparse);
    }

    #[test]
    fn jackson_examples() {
        let rule = ThresholdRule::new(0.3).unwrap();
        let z = jackson_bound_check(&seq(&[0.0; 4]), rule, 1.0, 2.0).unwrap();
        assert_eq!((z.lhs, z.rhs, z.holds), (0.0, 0.0, true));

        let u = geometric(30);
        let c = jackson_bound_check(&u, rule, 1.0, 2.0).unwrap();
        // entries 1/4, 1/8, ... are removed; Σ_{k>=2} 4^{-k} = 1/12
        let tail: f64 = (2..30).map(|k| 0.25f64.powi(k)).sum();
        assert!((c.lhs - tail).abs() < 1e-15);
        assert!((c.lhs - 1.0 / 12.0).abs() < 1e-15);
        let r1: f64 = (0..30).map(|k| 0.5f64.powi(k)).sum();
        assert!((c.rhs - r1 * 0.3).abs() < 1e-14);
        assert!(c.holds);

        let below_min = jackson_bound_check(&seq(&[1.0, -2.0, 0.0]), ThresholdRule::new(1.0).unwrap(), 0.5, 3.0)
            .unwrap();
        assert_eq!(below_min.lhs, 0.0);
        assert!(below_min.holds);

        assert!(jackson_bound_check(&u, rule, 2.5, 2.0).is_err());
        assert!(jackson_bound_check(&u, rule, 0.5, 0.8).is_err());
    }

    #[test]
    fn bernstein_examples() {
        let rule = ThresholdRule::new(0.3).unwrap();
        let u = geometric(30);
        let c = bernstein_bound_check(&u, rule, 0.0, 1.0).unwrap();
        assert_eq!(c.lhs, 2.0);
        let r1: f64 = (0..30).map(|k| 0.5f64.powi(k)).sum();
        assert!((c.rhs - r1 / 0.3).abs() < 1e-12);
        assert!(c.holds);

        let same = bernstein_bound_check(&u, rule, 1.5, 1.5).unwrap();
        assert_eq!(same.rhs, u.penalty(1.5).unwrap());
        assert!(same.holds);

        let z = bernstein_bound_check(&seq(&[0.0, 0.0]), rule, 0.0, 0.0).unwrap();
        assert_eq!((z.lhs, z.rhs, z.holds), (0.0, 0.0, true));

        assert!(bernstein_bound_check(&u, rule, 1.0, 0.5).is_err());
    }

    fn with_boundary() -> impl Strategy<Value = (Vec<f64>, f64)> {
        (0.01f64..3.0).prop_flat_map(|beta| {
            (
                prop::collection::vec(
                    prop_oneof![
                        Just(0.0),
                        Just(beta),
                        Just(-beta),
                        -5.0f64..5.0,
                        -1e-2f64..1e-2,
                    ],
                    1..40,
                ),
                Just(beta),
            )
        })
    }

    proptest! {
        #[test]
        fn idempotent((xs, beta) in with_boundary()) {
            let rule = ThresholdRule::new(beta).unwrap();
            let once = hard_threshold(&seq(&xs), rule);
            prop_assert_eq!(hard_threshold(&once, rule), once);
        }

        #[test]
        fn support_shrinks_with_beta((xs, b1) in with_boundary(), extra in 0.0f64..2.0) {
            let u = seq(&xs);
            let small = hard_threshold(&u, ThresholdRule::new(b1).unwrap());
            let large = hard_threshold(&u, ThresholdRule::new(b1 + extra).unwrap());
            prop_assert!(large.support_size() <= small.support_size());
        }

        #[test]
        fn support_subset_and_values_unchanged((xs, beta) in with_boundary()) {
            let out = hard_threshold(&seq(&xs), ThresholdRule::new(beta).unwrap());
            for (x, y) in xs.iter().zip(out.entries()) {
                prop_assert!(*y == 0.0 || y == x);
                if *x == 0.0 { prop_assert_eq!(*y, 0.0); }
            }
        }

        #[test]
        fn jackson_and_bernstein_hold(
            (xs, beta) in with_boundary(),
            p_frac in prop_oneof![Just(0.0), 0.0f64..1.0],
            q_frac in prop_oneof![Just(0.0), 0.0f64..1.0],
            t in prop_oneof![Just(1.0), 1.0f64..6.0],
        ) {
            let q = q_frac * t;
            let p = p_frac * q;
            let u = seq(&xs);
            let rule = ThresholdRule::new(beta).unwrap();
            prop_assert!(jackson_bound_check(&u, rule, q, t).unwrap().holds);
            prop_assert!(bernstein_bound_check(&u, rule, p, q).unwrap().holds);
        }
    }
}
