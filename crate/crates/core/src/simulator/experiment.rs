//! Seeded Monte Carlo trials over random spreading instances.

use alloc::vec::Vec;

use super::count::{count_valid_fast, FAST_USER_LIMIT};
use super::instance::{correlate, generate_spreading};
use super::TiePolicy;
use crate::stats::{mean, sample_std};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub trial_index: usize,
    pub seed: u64,
    pub valid_count: u64,
    /// `log₂(valid_count) / K`.
    pub capacity_bits: f64,
}

/// One random instance: draw `S`, correlate, count, take `log₂(count)/K`.
pub fn run_trial(users: usize, chips: usize, seed: u64, policy: TiePolicy) -> Result<TrialResult> {
    let s = generate_spreading(users, chips, seed)?;
    let valid_count = count_valid_fast(&correlate(&s), policy)?;
    if valid_count == 0 {
        return Err(Error::EmptyCodebook(valid_count));
    }
    Ok(TrialResult {
        trial_index: 0,
        seed,
        valid_count,
        capacity_bits: libm::log2(valid_count as f64) / users as f64,
    })
}

/// Chip count for a requested load: `N = round(K/β)` with ties to even.
pub fn chips_for_load(users: usize, beta: f64) -> Result<usize> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain("beta must be positive and finite"));
    }
    let chips = libm::rint(users as f64 / beta);
    if chips < 1.0 {
        return Err(Error::Domain("load rounds to zero chips"));
    }
    Ok(chips as usize)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at grid point `point`:
/// `m(m(m(master) ⊕ point) ⊕ trial)` with `m` the SplitMix64 finaliser
/// (golden-ratio increment, then the 30/27/31 xor-shift multiply rounds).
pub fn trial_seed(master_seed: u64, point: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ point as u64) ^ trial as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanPoint {
    pub index: usize,
    pub beta_requested: f64,
    pub chips: usize,
    /// `K/N` after rounding `N`.
    pub beta_effective: f64,
}

/// Validated description of a simulation: every `(point, trial)` pair maps
/// to a fixed seed, so trials can run in any order on any number of threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    pub users: usize,
    pub points: Vec<PlanPoint>,
    pub trials: usize,
    pub master_seed: u64,
    pub policy: TiePolicy,
}

impl SimulationPlan {
    pub fn new(
        users: usize,
        betas: &[f64],
        trials: usize,
        master_seed: u64,
        policy: TiePolicy,
    ) -> Result<Self> {
        if users == 0 {
            return Err(Error::Domain("need at least one user"));
        }
        if users > FAST_USER_LIMIT {
            return Err(Error::Resource {
                users,
                limit: FAST_USER_LIMIT,
            });
        }
        if trials == 0 {
            return Err(Error::Domain("need at least one trial"));
        }
        if betas.is_empty() {
            return Err(Error::Domain("need at least one load"));
        }
        let points = betas
            .iter()
            .enumerate()
            .map(|(index, &beta)| {
                let chips = chips_for_load(users, beta)?;
                Ok(PlanPoint {
                    index,
                    beta_requested: beta,
                    chips,
                    beta_effective: users as f64 / chips as f64,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            users,
            points,
            trials,
            master_seed,
            policy,
        })
    }

    pub fn seed(&self, point: usize, trial: usize) -> u64 {
        trial_seed(self.master_seed, point, trial)
    }

    pub fn run_trial(&self, point: usize, trial: usize) -> Result<TrialResult> {
        let p = &self.points[point];
        let mut result = run_trial(self.users, p.chips, self.seed(point, trial), self.policy)?;
        result.trial_index = trial;
        Ok(result)
    }

    /// Aggregates the trials of one point, which must be in trial order.
    pub fn summarize(&self, point: usize, trials: Vec<TrialResult>) -> SimulationSummary {
        let p = &self.points[point];
        let caps: Vec<f64> = trials.iter().map(|t| t.capacity_bits).collect();
        SimulationSummary {
            point_index: p.index,
            users: self.users,
            chips: p.chips,
            beta_requested: p.beta_requested,
            beta_effective: p.beta_effective,
            tie_policy: self.policy,
            master_seed: self.master_seed,
            mean_capacity_bits: mean(&caps),
            std_capacity_bits: sample_std(&caps),
            trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub point_index: usize,
    pub users: usize,
    pub chips: usize,
    pub beta_requested: f64,
    pub beta_effective: f64,
    pub tie_policy: TiePolicy,
    pub master_seed: u64,
    pub mean_capacity_bits: f64,
    /// Sample (`n − 1`) standard deviation; zero for a single trial.
    pub std_capacity_bits: f64,
    pub trials: Vec<TrialResult>,
}

impl SimulationSummary {
    pub fn trial_count(&self) -> usize {
        self.trials.len()
    }
}

/// Runs every trial of every point on the calling thread.
pub fn run_simulation(
    users: usize,
    betas: &[f64],
    trials: usize,
    master_seed: u64,
    policy: TiePolicy,
) -> Result<Vec<SimulationSummary>> {
    let plan = SimulationPlan::new(users, betas, trials, master_seed, policy)?;
    (0..plan.points.len())
        .map(|point| {
            let results = (0..plan.trials)
                .map(|trial| plan.run_trial(point, trial))
                .collect::<Result<Vec<_>>>()?;
            Ok(plan.summarize(point, results))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user_trial() {
        let t = run_trial(1, 1, 3, TiePolicy::Strict).unwrap();
        assert_eq!(t.valid_count, 2);
        assert_eq!(t.capacity_bits, 1.0);
    }

    #[test]
    fn trials_are_deterministic() {
        let a = run_trial(12, 9, 77, TiePolicy::Inclusive).unwrap();
        let b = run_trial(12, 9, 77, TiePolicy::Inclusive).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chip_rounding() {
        assert_eq!(chips_for_load(25, 1.0).unwrap(), 25);
        assert_eq!(chips_for_load(25, 0.8).unwrap(), 31);
        // 10/4 = 2.5 rounds to even.
        assert_eq!(chips_for_load(10, 4.0).unwrap(), 2);
        // 14/4 = 3.5 rounds to even.
        assert_eq!(chips_for_load(14, 4.0).unwrap(), 4);
        assert!(chips_for_load(2, 10.0).is_err());
        assert!(chips_for_load(2, 0.0).is_err());
    }

    #[test]
    fn plan_reports_effective_load() {
        let plan = SimulationPlan::new(25, &[1.0, 0.8], 3, 1, TiePolicy::Strict).unwrap();
        assert_eq!(plan.points[0].chips, 25);
        assert_eq!(plan.points[0].beta_effective, 1.0);
        assert_eq!(plan.points[1].chips, 31);
        assert!((plan.points[1].beta_effective - 0.806_451_612_903_225_8).abs() < 1e-15);
        assert!(matches!(
            SimulationPlan::new(31, &[1.0], 1, 1, TiePolicy::Strict),
            Err(Error::Resource { .. })
        ));
        assert!(SimulationPlan::new(5, &[1.0], 0, 1, TiePolicy::Strict).is_err());
        assert!(SimulationPlan::new(5, &[], 1, 1, TiePolicy::Strict).is_err());
    }

    #[test]
    fn seeds_differ_across_points_and_trials() {
        let mut seen: Vec<u64> = Vec::new();
        for p in 0..4 {
            for t in 0..50 {
                seen.push(trial_seed(42, p, t));
            }
        }
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 200);
        assert_ne!(trial_seed(1, 0, 0), trial_seed(2, 0, 0));
    }

    #[test]
    fn summary_statistics_recompute() {
        let out = run_simulation(8, &[1.0, 2.0], 12, 5, TiePolicy::Strict).unwrap();
        assert_eq!(out.len(), 2);
        for s in &out {
            let caps: Vec<f64> = s.trials.iter().map(|t| t.capacity_bits).collect();
            assert_eq!(s.mean_capacity_bits, mean(&caps));
            assert_eq!(s.std_capacity_bits, sample_std(&caps));
            assert_eq!(s.beta_effective, s.users as f64 / s.chips as f64);
            assert!(s.trials.iter().enumerate().all(|(i, t)| t.trial_index == i));
        }
    }
}
