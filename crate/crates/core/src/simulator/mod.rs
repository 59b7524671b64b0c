//! Finite-size channel instances and exhaustive valid-codeword counting.

mod count;
mod experiment;
mod instance;

pub use count::{
    count_partition, count_valid_fast, count_valid_naive, count_valid_partitioned, FAST_USER_LIMIT,
    NAIVE_USER_LIMIT,
};
pub use experiment::{
    chips_for_load, run_simulation, run_trial, trial_seed, PlanPoint, SimulationPlan,
    SimulationSummary, TrialResult,
};
pub use instance::{
    correlate, generate_spreading, is_valid, matched_filter, Codeword, CorrelationMatrix,
    SpreadingMatrix,
};

/// How a zero matched-filter output is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TiePolicy {
    /// `x_k·h_k > 0` for every user; a slicer cannot decide on zero.
    #[default]
    Strict,
    /// `x_k·h_k ≥ 0` for every user.
    Inclusive,
}

impl TiePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Strict => "strict",
            Self::Inclusive => "inclusive",
        }
    }

    #[inline]
    pub(crate) fn accepts(self, margin: i64) -> bool {
        match self {
            Self::Strict => margin > 0,
            Self::Inclusive => margin >= 0,
        }
    }
}

impl core::fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for TiePolicy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" | "STRICT" => Ok(Self::Strict),
            "inclusive" | "INCLUSIVE" => Ok(Self::Inclusive),
            _ => Err(crate::Error::Malformed("tie policy must be strict or inclusive")),
        }
    }
}
