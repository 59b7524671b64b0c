//! Joins finite-size simulation means to the asymptotic curve on the
//! effective load `K/N`.

use crate::tables::{SimulationRow, TheoryRow};

/// Loads closer than this (relative) count as the same grid point.
const SAME_LOAD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheorySource {
    /// The theory file has a row at this load.
    Exact,
    /// Linear in `ln β` between the two neighbouring theory rows.
    Interpolated,
}

impl TheorySource {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Interpolated => "interpolated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub beta_effective: f64,
    pub c_infinity_bits: f64,
    pub mean_c_k_bits: f64,
    pub std_c_k_bits: f64,
    /// `mean − C_∞`.
    pub deviation_bits: f64,
    /// `|deviation| / std`; zero when both vanish, infinite when only the
    /// spread does.
    pub deviation_in_sigmas: f64,
    pub source: TheorySource,
}

/// Theory capacity at `beta`, or `None` when `beta` lies outside the
/// theory rows.
pub fn theory_at(theory: &[TheoryRow], beta: f64) -> Option<(f64, TheorySource)> {
    if let Some(row) = theory
        .iter()
        .find(|r| (r.beta - beta).abs() <= SAME_LOAD * beta.abs())
    {
        return Some((row.capacity_bits, TheorySource::Exact));
    }
    let below = theory
        .iter()
        .filter(|r| r.beta < beta)
        .max_by(|a, b| a.beta.total_cmp(&b.beta))?;
    let above = theory
        .iter()
        .filter(|r| r.beta > beta)
        .min_by(|a, b| a.beta.total_cmp(&b.beta))?;
    let frac = (beta.ln() - below.beta.ln()) / (above.beta.ln() - below.beta.ln());
    let value = below.capacity_bits + frac * (above.capacity_bits - below.capacity_bits);
    Some((value, TheorySource::Interpolated))
}

/// Errors with the offending load when a simulation row has no theory
/// counterpart.
pub fn compare(theory: &[TheoryRow], simulations: &[SimulationRow]) -> Result<Vec<ComparisonRow>, f64> {
    simulations
        .iter()
        .map(|sim| {
            let beta = sim.beta_effective;
            let (c_inf, source) = theory_at(theory, beta).ok_or(beta)?;
            let deviation = sim.mean_capacity_bits - c_inf;
            let sigmas = if deviation == 0.0 {
                0.0
            } else {
                deviation.abs() / sim.std_capacity_bits
            };
            Ok(ComparisonRow {
                beta_effective: beta,
                c_infinity_bits: c_inf,
                mean_c_k_bits: sim.mean_capacity_bits,
                std_c_k_bits: sim.std_capacity_bits,
                deviation_bits: deviation,
                deviation_in_sigmas: sigmas,
                source,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim(beta: f64, mean: f64, std: f64) -> SimulationRow {
        SimulationRow {
            users: 25,
            beta_effective: beta,
            tie_policy: "strict".into(),
            mean_capacity_bits: mean,
            std_capacity_bits: std,
        }
    }

    fn theory() -> Vec<TheoryRow> {
        vec![
            TheoryRow { beta: 0.5, capacity_bits: 0.8716 },
            TheoryRow { beta: 1.0, capacity_bits: 0.7165 },
            TheoryRow { beta: 2.0, capacity_bits: 0.5374 },
        ]
    }

    #[test]
    fn deviation_arithmetic() {
        let rows = compare(&theory(), &[sim(1.0, 0.70, 0.02)]).unwrap();
        let r = rows[0];
        assert_eq!(r.source, TheorySource::Exact);
        assert!((r.deviation_bits + 0.0165).abs() < 1e-12);
        assert!((r.deviation_in_sigmas - 0.825).abs() < 1e-9);
    }

    #[test]
    fn interpolates_in_log_load() {
        let beta = 2.0_f64.sqrt();
        let (value, source) = theory_at(&theory(), beta).unwrap();
        assert_eq!(source, TheorySource::Interpolated);
        assert!((value - 0.5 * (0.7165 + 0.5374)).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_is_unmatched() {
        assert_eq!(compare(&theory(), &[sim(3.0, 0.4, 0.1)]), Err(3.0));
        assert!(theory_at(&theory(), 0.1).is_none());
    }

    #[test]
    fn self_comparison_is_zero() {
        let sims: Vec<SimulationRow> = theory().iter().map(|t| sim(t.beta, t.capacity_bits, 0.0)).collect();
        for r in compare(&theory(), &sims).unwrap() {
            assert_eq!(r.deviation_bits, 0.0);
            assert_eq!(r.deviation_in_sigmas, 0.0);
        }
    }

    #[test]
    fn zero_spread_with_offset_is_infinite() {
        let r = compare(&theory(), &[sim(1.0, 0.7, 0.0)]).unwrap()[0];
        assert!(r.deviation_in_sigmas.is_infinite());
    }
}
