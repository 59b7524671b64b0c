//! Thread-pool execution of simulation plans.
//!
//! Every trial is a pure function of its `(point, trial)` seed and results
//! are reassembled in plan order, so output does not depend on the number
//! of workers or on scheduling.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use cdma_capacity::simulator::count_partition;
use cdma_capacity::{
    CorrelationMatrix, SimulationPlan, SimulationSummary, TiePolicy, TrialResult,
};
use rayon::prelude::*;

use crate::LabError;

/// Environment variable consulted when `--workers` is not given.
pub const WORKERS_ENV: &str = "CDMA_LAB_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    /// All available hardware threads.
    #[default]
    Auto,
    Fixed(NonZeroUsize),
}

impl Workers {
    pub fn resolve(self) -> usize {
        match self {
            Self::Auto => std::thread::available_parallelism().map_or(1, NonZeroUsize::get),
            Self::Fixed(n) => n.get(),
        }
    }
}

impl FromStr for Workers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        s.parse::<NonZeroUsize>()
            .map(Self::Fixed)
            .map_err(|_| format!("workers must be `auto` or a positive integer, got `{s}`"))
    }
}

impl fmt::Display for Workers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Fixed(n) => write!(f, "{n}"),
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, LabError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Usage(format!("cannot start worker pool: {e}")))
}

/// Runs every trial of `plan` on `workers` threads.
pub fn run_simulation(plan: &SimulationPlan, workers: usize) -> Result<Vec<SimulationSummary>, LabError> {
    let jobs: Vec<(usize, usize)> = (0..plan.points.len())
        .flat_map(|p| (0..plan.trials).map(move |t| (p, t)))
        .collect();
    let results: Vec<cdma_capacity::Result<TrialResult>> =
        pool(workers)?.install(|| jobs.par_iter().map(|&(p, t)| plan.run_trial(p, t)).collect());

    let mut results = results.into_iter();
    let mut summaries = Vec::with_capacity(plan.points.len());
    for point in 0..plan.points.len() {
        let trials = results
            .by_ref()
            .take(plan.trials)
            .collect::<cdma_capacity::Result<Vec<_>>>()?;
        summaries.push(plan.summarize(point, trials));
    }
    Ok(summaries)
}

/// Splits one count into `2^width` partitions and evaluates them on
/// `workers` threads.
pub fn count_valid_parallel(
    w: &CorrelationMatrix,
    policy: TiePolicy,
    width: u32,
    workers: usize,
) -> Result<u64, LabError> {
    let width = width.min(w.users() as u32 - 1);
    let half: cdma_capacity::Result<u64> = pool(workers)?.install(|| {
        (0..1_u64 << width)
            .into_par_iter()
            .map(|index| count_partition(w, policy, width, index))
            .sum()
    });
    Ok(2 * half?)
}

#[cfg(test)]
mod tests {
    use cdma_capacity::{correlate, count_valid_fast, generate_spreading};

    use super::*;

    #[test]
    fn worker_parsing() {
        assert_eq!("auto".parse::<Workers>().unwrap(), Workers::Auto);
        assert_eq!("3".parse::<Workers>().unwrap().resolve(), 3);
        assert!("0".parse::<Workers>().is_err());
        assert!("many".parse::<Workers>().is_err());
        assert!(Workers::Auto.resolve() >= 1);
    }

    #[test]
    fn parallel_matches_sequential() {
        let plan = SimulationPlan::new(10, &[0.5, 1.0, 2.0], 9, 123, TiePolicy::Strict).unwrap();
        let sequential =
            cdma_capacity::run_simulation(10, &[0.5, 1.0, 2.0], 9, 123, TiePolicy::Strict).unwrap();
        for workers in [1, 2, 8] {
            assert_eq!(run_simulation(&plan, workers).unwrap(), sequential);
        }
    }

    #[test]
    fn parallel_partitions_match_serial_count() {
        let w = correlate(&generate_spreading(14, 11, 3).unwrap());
        let serial = count_valid_fast(&w, TiePolicy::Inclusive).unwrap();
        for (width, workers) in [(0, 1), (3, 2), (6, 8), (40, 4)] {
            assert_eq!(count_valid_parallel(&w, TiePolicy::Inclusive, width, workers).unwrap(), serial);
        }
    }
}
