use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::delay::DelaySchedule;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayMode {
    /// `tau_ij(t) = t`.
    #[default]
    Zero,
    /// Off-diagonal reads as stale as allowed: `tau_ij(t) = max(0, t - Delta + 1)`.
    Max,
    /// Off-diagonal `tau_ij(t)` uniform in `[max(0, t - Delta + 1), t]`,
    /// independently per entry, so reads may go backwards in time.
    RandomNonfifo,
}

impl fmt::Display for DelayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DelayMode::Zero => "zero",
            DelayMode::Max => "max",
            DelayMode::RandomNonfifo => "random_nonfifo",
        })
    }
}

impl FromStr for DelayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(DelayMode::Zero),
            "max" => Ok(DelayMode::Max),
            "random_nonfifo" | "random-nonfifo" => Ok(DelayMode::RandomNonfifo),
            other => Err(Error::param(
                "delays",
                format!("unknown delay mode {other:?}; expected zero|max|random_nonfifo"),
            )),
        }
    }
}

pub(crate) fn delays_with(
    rng: &mut ChaCha8Rng,
    n: usize,
    delta: usize,
    horizon: usize,
    mode: DelayMode,
) -> Result<DelaySchedule> {
    if delta == 0 {
        return Err(Error::param("delta", "must be at least 1"));
    }
    let tau = (0..horizon)
        .map(|t| {
            let floor = (t + 1).saturating_sub(delta);
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match mode {
                            _ if i == j => t,
                            DelayMode::Zero => t,
                            DelayMode::Max => floor,
                            DelayMode::RandomNonfifo => rng.gen_range(floor..=t),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    DelaySchedule::new(n, delta, tau)
}

/// Seeded delay table satisfying B1-B3 with bound `delta`.
pub fn gen_delays(n: usize, delta: usize, horizon: usize, mode: DelayMode, seed: u64) -> Result<DelaySchedule> {
    delays_with(&mut ChaCha8Rng::seed_from_u64(seed), n, delta, horizon, mode)
}
