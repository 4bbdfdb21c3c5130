use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{truth_tail_norm, TruthKind};
use crate::params::SpaceParams;
use crate::tikhonov::{SolverSettings, MIN_DELTA};

/// Tail of `u†` beyond the truncation must stay below this fraction of the
/// smallest noise level.
pub const TAIL_FRACTION: f64 = 1e-2;

/// Smallest truncation tried by the automatic choice.
pub const MIN_AUTO_N: usize = 64;

/// Eight noise levels, geometric from 1e-1 down to 1e-4.
pub fn default_deltas() -> Vec<f64> {
    (0..8).map(|i| 10f64.powf(-1.0 - 3.0 * i as f64 / 7.0)).collect()
}

fn default_trials() -> usize {
    5
}

fn default_margin() -> f64 {
    0.2
}

fn default_max_n() -> usize {
    1 << 14
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub params: SpaceParams,
    pub truth_kind: TruthKind,
    /// Truncation length; chosen automatically when absent.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials_per_delta: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub post_process: bool,
    #[serde(default = "default_margin")]
    pub decay_margin: f64,
    /// Cap for the automatic truncation choice.
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Store elapsed seconds in the report metadata. Off by default so that
    /// reports are byte-reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
}

/// Truncation length actually used and how well it dominates the tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub n: usize,
    /// `‖(u†_k)_{k>n}‖_τ` of the untruncated truth.
    pub tail_norm: f64,
    /// `TAIL_FRACTION · min δ`.
    pub tail_budget: f64,
    pub tail_dominated: bool,
}

impl SweepConfig {
    pub fn new(params: SpaceParams, truth_kind: TruthKind) -> Self {
        SweepConfig {
            params,
            truth_kind,
            n: None,
            deltas: default_deltas(),
            trials_per_delta: default_trials(),
            seed: 0,
            post_process: false,
            decay_margin: default_margin(),
            max_n: default_max_n(),
            solver: SolverSettings::default(),
            record_wall_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.deltas.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "a sweep needs at least 3 noise levels to fit slopes, got {}",
                self.deltas.len()
            )));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d >= MIN_DELTA && **d <= 1.0)) {
            return Err(Error::InvalidInput(format!(
                "noise levels must lie in [{MIN_DELTA:e}, 1], got {d}"
            )));
        }
        if self.deltas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput("noise levels must be strictly decreasing".into()));
        }
        if self.trials_per_delta == 0 {
            return Err(Error::InvalidInput("trials_per_delta must be >= 1".into()));
        }
        if self.n == Some(0) || self.max_n == 0 {
            return Err(Error::InvalidInput("truncation length must be >= 1".into()));
        }
        if !self.params.is_separable() {
            return Err(Error::InvalidParams(format!(
                "sweeps use the exact separable solver and need sigma = a, got sigma={} a={}",
                self.params.sigma, self.params.a
            )));
        }
        self.solver.validate()
    }

    fn min_delta(&self) -> f64 {
        self.deltas.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Fixed `n` if given, otherwise the smallest power of two (from
    /// [`MIN_AUTO_N`], capped at `max_n`) whose truth tail is dominated.
    pub fn resolve_truncation(&self) -> Result<Truncation> {
        let budget = TAIL_FRACTION * self.min_delta();
        let tail = |n| truth_tail_norm(self.truth_kind, n, &self.params, self.decay_margin);
        let n = match self.n {
            Some(n) => n,
            None => {
                let floor = match self.truth_kind {
                    TruthKind::Sparse { nonzeros } | TruthKind::Mixed { nonzeros } => nonzeros,
                    TruthKind::PowerDecay => 1,
                };
                let mut n = floor.max(MIN_AUTO_N).next_power_of_two();
                while n < self.max_n && tail(n)? >= budget {
                    n *= 2;
                }
                n.min(self.max_n.max(floor))
            }
        };
        let tail_norm = tail(n)?;
        Ok(Truncation {
            n,
            tail_norm,
            tail_budget: budget,
            tail_dominated: tail_norm < budget,
        })
    }
}
