//! The reference sweep configurations exercised by the acceptance suite.

use crate::experiments::config::SweepConfig;
use crate::model::TruthKind;
use crate::params::SpaceParams;

pub const CANONICAL_SEED: u64 = 20_240_611;
pub const CANONICAL_N: usize = 1 << 14;

fn base(params: SpaceParams, truth_kind: TruthKind) -> SweepConfig {
    SweepConfig {
        n: Some(CANONICAL_N),
        seed: CANONICAL_SEED,
        ..SweepConfig::new(params, truth_kind)
    }
}

/// `(p, q, τ, a, σ) = (0, 0, 2, 4, 4)` with a sparse truth; `γ₁ = 1`.
pub fn sparse_regime() -> SweepConfig {
    base(
        SpaceParams::new(0.0, 0.0, 2.0, 4.0, 4.0).expect("valid indices"),
        TruthKind::Sparse { nonzeros: 32 },
    )
}

/// `(1, 4/3, 2, 4, 4)` with a power-decay truth; `γ₁ = 1/2`.
pub fn conjugate_regime() -> SweepConfig {
    base(
        SpaceParams::new(1.0, 4.0 / 3.0, 2.0, 4.0, 4.0).expect("valid indices"),
        TruthKind::PowerDecay,
    )
}

/// `(p, 1, 2, 4, 4)` with a power-decay truth; `γ₁ = 2/3` for every `p ≤ 1`.
pub fn oversmoothing_regime(p: f64) -> SweepConfig {
    base(
        SpaceParams::new(p, 1.0, 2.0, 4.0, 4.0).expect("valid indices"),
        TruthKind::PowerDecay,
    )
}
