//! Large-system capacity from the saddle point of the exponent
//!
//! ```text
//! g(a, b, β) = (1/β)·(b − ½ + (1−b)²/(2a) + ½·ln a) + ln(2·Q(t)),   t = (b − 1)/√(aβ)
//! ```
//!
//! The stationary point has `b* = 0` and `a*` solving
//! `a = β⁻¹ / (β⁻¹ + Q'(t)/Q(t) / √(aβ))` with `t = −1/√(aβ)`. The capacity in
//! nats per symbol per user is `g(a*, 0, β)`.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::gaussian::{ln_tail, ratio};
use crate::{Error, Result};

/// Damping never drops below this during oscillation fallback.
const MIN_DAMPING: f64 = 1.0 / 1024.0;

/// Which algebraic form of the `a*` fixed-point condition to iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FixedPointMap {
    /// `a ← 1 − √(aβ)·Q'(t)/Q(t)`: the condition with its denominator
    /// cleared. Positive for every `a > 0` and contracting (slope below ½) on
    /// all loads tried, so plain iteration from `a = 1` converges.
    #[default]
    Cleared,
    /// `a ← β⁻¹ / (β⁻¹ + Q'(t)/Q(t)/√(aβ))` as written. Has a pole below
    /// the root and a slope well below −1 once β exceeds a few units, so it
    /// only converges for moderate loads.
    Quotient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once `|Δa| < tolerance · max(1, a)`.
    pub tolerance: f64,
    pub max_iterations: u32,
    pub initial_a: f64,
    /// Relaxation `a ← (1−d)·a + d·f(a)`. Halved whenever the iterates
    /// start to oscillate without shrinking.
    pub damping: f64,
    pub map: FixedPointMap,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 500,
            initial_a: 1.0,
            damping: 1.0,
            map: FixedPointMap::Cleared,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1"));
        }
        if !(self.initial_a > 0.0 && self.initial_a.is_finite()) {
            return Err(Error::InvalidConfig("initial_a must be positive"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig("damping must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// The saddle point at one load together with the capacity it yields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleSolution {
    pub beta: f64,
    pub a_star: f64,
    /// Always exactly zero.
    pub b_star: f64,
    /// `−1/√(a*·β)`.
    pub t_star: f64,
    pub capacity_nats: f64,
    pub capacity_bits: f64,
    pub iterations: u32,
    /// Size of the last accepted step `|Δa|`.
    pub residual: f64,
    pub grad_a: f64,
    pub grad_b: f64,
    /// Relaxation factor in effect when the iteration stopped.
    pub damping: f64,
}

fn check_point(a: f64, b: f64, beta: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain("a must be positive and finite"));
    }
    if !b.is_finite() {
        return Err(Error::Domain("b must be finite"));
    }
    check_beta(beta)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain("beta must be positive and finite"));
    }
    Ok(())
}

fn aux_t(a: f64, b: f64, beta: f64) -> f64 {
    (b - 1.0) / libm::sqrt(a * beta)
}

/// `g(a, b, β)` in nats.
pub fn g_value(a: f64, b: f64, beta: f64) -> Result<f64> {
    check_point(a, b, beta)?;
    Ok(g_unchecked(a, b, beta))
}

fn g_unchecked(a: f64, b: f64, beta: f64) -> f64 {
    let one_minus_b = 1.0 - b;
    let energy = b - 0.5 + one_minus_b * one_minus_b / (2.0 * a) + 0.5 * libm::log(a);
    energy / beta + LN_2 + ln_tail(aux_t(a, b, beta))
}

/// Exact partial derivatives `(∂g/∂a, ∂g/∂b)`.
pub fn g_gradient(a: f64, b: f64, beta: f64) -> Result<(f64, f64)> {
    check_point(a, b, beta)?;
    Ok(gradient_unchecked(a, b, beta))
}

fn gradient_unchecked(a: f64, b: f64, beta: f64) -> (f64, f64) {
    let t = aux_t(a, b, beta);
    let r = ratio(t);
    let one_minus_b = 1.0 - b;
    let da = (1.0 - one_minus_b * one_minus_b / a) / (2.0 * a * beta) - t * r / (2.0 * a);
    let db = (1.0 - one_minus_b / a) / beta + r / libm::sqrt(a * beta);
    (da, db)
}

/// The stationarity conditions in their conventional form:
/// `β⁻¹((1−b)²/a − 1) + t·Q'/Q` and `β⁻¹(1 − (1−b)/a) + Q'/Q/√(aβ)`.
///
/// The second entry is `∂g/∂b`. The first is `−2a·∂g/∂a`; it vanishes at the
/// same points but is not the derivative itself.
pub fn saddle_conditions(a: f64, b: f64, beta: f64) -> Result<(f64, f64)> {
    check_point(a, b, beta)?;
    let t = aux_t(a, b, beta);
    let r = ratio(t);
    let one_minus_b = 1.0 - b;
    Ok((
        (one_minus_b * one_minus_b / a - 1.0) / beta + t * r,
        (1.0 - one_minus_b / a) / beta + r / libm::sqrt(a * beta),
    ))
}

fn apply_map(map: FixedPointMap, a: f64, beta: f64) -> f64 {
    let root = libm::sqrt(a * beta);
    let r = ratio(-1.0 / root);
    match map {
        FixedPointMap::Cleared => 1.0 - root * r,
        FixedPointMap::Quotient => {
            let inv_beta = 1.0 / beta;
            inv_beta / (inv_beta + r / root)
        }
    }
}

/// Finds `a*` by relaxed fixed-point iteration and evaluates the capacity
/// at `(a*, 0)`.
pub fn solve_saddle(beta: f64, cfg: &SolverConfig) -> Result<SaddleSolution> {
    check_beta(beta)?;
    cfg.validate()?;

    let mut a = cfg.initial_a;
    let mut damping = cfg.damping;
    let mut prev_step = 0.0_f64;
    for iteration in 1..=cfg.max_iterations {
        let mapped = apply_map(cfg.map, a, beta);
        if !(mapped > 0.0 && mapped.is_finite()) {
            // The quotient form crossed its pole; the iteration cannot recover.
            return Err(Error::NonConvergence {
                beta,
                iterations: iteration,
                last_a: a,
                residual: prev_step.abs(),
            });
        }
        let next = (1.0 - damping) * a + damping * mapped;
        let step = next - a;
        if step.abs() < cfg.tolerance * a.max(1.0) {
            return Ok(finish(beta, next, iteration, step.abs(), damping));
        }
        if step * prev_step < 0.0 && step.abs() >= prev_step.abs() {
            damping = (damping * 0.5).max(MIN_DAMPING);
        }
        prev_step = step;
        a = next;
    }
    Err(Error::NonConvergence {
        beta,
        iterations: cfg.max_iterations,
        last_a: a,
        residual: prev_step.abs(),
    })
}

fn finish(beta: f64, a_star: f64, iterations: u32, residual: f64, damping: f64) -> SaddleSolution {
    let capacity_nats = g_unchecked(a_star, 0.0, beta);
    let (grad_a, grad_b) = gradient_unchecked(a_star, 0.0, beta);
    SaddleSolution {
        beta,
        a_star,
        b_star: 0.0,
        t_star: -1.0 / libm::sqrt(a_star * beta),
        capacity_nats,
        capacity_bits: capacity_nats / LN_2,
        iterations,
        residual,
        grad_a,
        grad_b,
        damping,
    }
}

/// Asymptotic capacity `C_∞(β)`; the returned solution carries it in both
/// nats and bits.
pub fn capacity(beta: f64, cfg: &SolverConfig) -> Result<SaddleSolution> {
    solve_saddle(beta, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// Set of loads to sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaGrid {
    /// `points` values from `min` to `max` inclusive.
    Range {
        min: f64,
        max: f64,
        points: usize,
        spacing: Spacing,
    },
    /// Loads taken verbatim, in the given order.
    Explicit(Vec<f64>),
}

impl BetaGrid {
    /// 60 logarithmically spaced loads on `[0.05, 10]`.
    pub fn figure_default() -> Self {
        Self::Range {
            min: 0.05,
            max: 10.0,
            points: 60,
            spacing: Spacing::Logarithmic,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            Self::Explicit(ref betas) => {
                if betas.is_empty() {
                    return Err(Error::Domain("beta grid is empty"));
                }
                for &beta in betas {
                    check_beta(beta)?;
                }
                Ok(betas.clone())
            }
            Self::Range {
                min,
                max,
                points,
                spacing,
            } => {
                check_beta(min)?;
                check_beta(max)?;
                if points == 0 {
                    return Err(Error::Domain("beta grid is empty"));
                }
                if points == 1 {
                    return Ok(alloc::vec![min]);
                }
                if max <= min {
                    return Err(Error::Domain("beta grid needs max > min"));
                }
                let last = (points - 1) as f64;
                let mut values: Vec<f64> = (0..points)
                    .map(|i| {
                        let frac = i as f64 / last;
                        match spacing {
                            Spacing::Linear => min + frac * (max - min),
                            Spacing::Logarithmic => {
                                libm::exp(libm::log(min) + frac * (libm::log(max) - libm::log(min)))
                            }
                        }
                    })
                    .collect();
                values[0] = min;
                values[points - 1] = max;
                Ok(values)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub beta: f64,
    pub outcome: Result<SaddleSolution>,
}

/// Capacity over a grid of loads. Failed points stay in the list.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    pub grid: BetaGrid,
    pub points: Vec<CurvePoint>,
}

impl CapacityCurve {
    pub fn solutions(&self) -> impl Iterator<Item = &SaddleSolution> {
        self.points.iter().filter_map(|p| p.outcome.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &CurvePoint> {
        self.points.iter().filter(|p| p.outcome.is_err())
    }

    pub fn all_converged(&self) -> bool {
        self.failures().next().is_none()
    }

    /// Numerical check: along increasing β, capacity never rises and `a*`
    /// never falls. Only solved points take part.
    pub fn is_monotone(&self) -> bool {
        let mut sorted: Vec<&SaddleSolution> = self.solutions().collect();
        sorted.sort_by(|x, y| x.beta.total_cmp(&y.beta));
        sorted.windows(2).all(|w| {
            w[1].capacity_bits <= w[0].capacity_bits && w[1].a_star >= w[0].a_star
        })
    }
}

/// Solves every grid point. With `warm_start`, each solve starts from the
/// previous point's `a*`; results agree with cold starts to within the
/// solver tolerance.
pub fn sweep(grid: &BetaGrid, cfg: &SolverConfig, warm_start: bool) -> Result<CapacityCurve> {
    cfg.validate()?;
    let betas = grid.values()?;
    let mut points = Vec::with_capacity(betas.len());
    let mut start = cfg.initial_a;
    for beta in betas {
        let point_cfg = SolverConfig {
            initial_a: if warm_start { start } else { cfg.initial_a },
            ..*cfg
        };
        let outcome = solve_saddle(beta, &point_cfg);
        if let Ok(sol) = &outcome {
            start = sol.a_star;
        }
        points.push(CurvePoint { beta, outcome });
    }
    Ok(CapacityCurve {
        grid: grid.clone(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn g_at_unit_point_is_half_inverse_load() {
        for &beta in &[0.1, 1.0, 3.0, 50.0] {
            let g = g_value(1.0, 1.0, beta).unwrap();
            assert!(rel(g, 0.5 / beta) < 1e-15, "beta = {beta}");
        }
    }

    #[test]
    fn g_reference_values() {
        // 30-digit evaluations of the defining formula.
        assert!(rel(g_value(1.0, 0.0, 0.1).unwrap(), 0.692_364_172_960_488_4) < 1e-13);
        assert!(rel(g_value(2.0, 0.3, 0.7).unwrap(), 0.753_113_727_370_488_4) < 1e-13);
    }

    #[test]
    fn gradient_reference_values() {
        let (_, db) = g_gradient(1.0, 1.0, 1.0).unwrap();
        assert!(rel(db, 0.202_115_439_197_134_64) < 1e-13);
        let (da, db) = g_gradient(2.0, 0.3, 0.7).unwrap();
        assert!(rel(da, 0.201_129_027_406_291_66) < 1e-12);
        assert!(rel(db, 0.537_063_830_076_768_6) < 1e-12);
    }

    #[test]
    fn conditions_are_scaled_gradient() {
        for &(a, b, beta) in &[(2.0, 0.3, 0.7), (1.3, -0.4, 4.0), (0.6, 1.7, 0.2)] {
            let (da, db) = g_gradient(a, b, beta).unwrap();
            let (ca, cb) = saddle_conditions(a, b, beta).unwrap();
            assert!(rel(ca, -2.0 * a * da) < 1e-12);
            assert_eq!(cb, db);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(g_value(0.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(g_value(1.0, 0.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(g_gradient(-1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(
            solve_saddle(0.0, &SolverConfig::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn config_validation() {
        let base = SolverConfig::default();
        for bad in [
            SolverConfig { tolerance: 0.0, ..base },
            SolverConfig { max_iterations: 0, ..base },
            SolverConfig { initial_a: 0.0, ..base },
            SolverConfig { damping: 0.0, ..base },
            SolverConfig { damping: 1.5, ..base },
        ] {
            assert!(matches!(solve_saddle(1.0, &bad), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn small_load_limit() {
        let sol = solve_saddle(0.001, &SolverConfig::default()).unwrap();
        // a* − 1 is of order e^{-500} here and rounds to exactly 1.
        assert!(sol.a_star >= 1.0 && sol.a_star < 1.0001);
        assert_eq!(sol.capacity_bits, 1.0);
    }

    #[test]
    fn unit_load_saddle() {
        let sol = solve_saddle(1.0, &SolverConfig::default()).unwrap();
        assert!((sol.a_star - 1.41748).abs() < 5e-4);
        assert!((sol.t_star + 0.83999).abs() < 3e-4);
        assert_eq!(sol.b_star, 0.0);
        assert!(sol.grad_a.abs() < 1e-8 && sol.grad_b.abs() < 1e-8);
        assert!((sol.capacity_nats - 0.49662).abs() < 1e-4);
        assert!((sol.capacity_bits - 0.7165).abs() < 1e-3);
        assert_eq!(sol.capacity_nats, g_value(sol.a_star, sol.b_star, 1.0).unwrap());
    }

    #[test]
    fn quotient_form_agrees_at_moderate_load() {
        let quotient = SolverConfig {
            map: FixedPointMap::Quotient,
            ..SolverConfig::default()
        };
        let q = solve_saddle(1.0, &quotient).unwrap();
        assert!(q.iterations < 20);
        let c = solve_saddle(1.0, &SolverConfig::default()).unwrap();
        assert!((q.a_star - c.a_star).abs() < 1e-10);
    }

    #[test]
    fn quotient_form_fails_loudly_at_heavy_load() {
        let quotient = SolverConfig {
            map: FixedPointMap::Quotient,
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve_saddle(100.0, &quotient),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn oscillation_halves_damping() {
        // Starting above the pole, the quotient map oscillates at β = 5 with
        // slope ≈ −1.17 and needs relaxation to settle.
        let cfg = SolverConfig {
            map: FixedPointMap::Quotient,
            initial_a: 3.9,
            ..SolverConfig::default()
        };
        let sol = solve_saddle(5.0, &cfg).unwrap();
        assert!(sol.damping < 1.0);
        let reference = solve_saddle(5.0, &SolverConfig::default()).unwrap();
        assert!((sol.a_star - reference.a_star).abs() < 1e-9);
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let cfg = SolverConfig {
            max_iterations: 3,
            ..SolverConfig::default()
        };
        match solve_saddle(10.0, &cfg) {
            Err(Error::NonConvergence {
                iterations, last_a, ..
            }) => {
                assert_eq!(iterations, 3);
                assert!(last_a > 1.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn grid_values() {
        let v = BetaGrid::figure_default().values().unwrap();
        assert_eq!(v.len(), 60);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[59], 10.0);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        let lin = BetaGrid::Range {
            min: 1.0,
            max: 2.0,
            points: 5,
            spacing: Spacing::Linear,
        };
        assert_eq!(lin.values().unwrap(), [1.0, 1.25, 1.5, 1.75, 2.0]);
        assert!(BetaGrid::Explicit(Vec::new()).values().is_err());
        assert!(BetaGrid::Explicit(alloc::vec![1.0, -2.0]).values().is_err());
    }

    #[test]
    fn sweep_single_point_matches_capacity() {
        let cfg = SolverConfig::default();
        let curve = sweep(&BetaGrid::Explicit(alloc::vec![1.0]), &cfg, true).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.points[0].outcome, capacity(1.0, &cfg));
    }

    #[test]
    fn sweep_collects_failures() {
        let cfg = SolverConfig {
            map: FixedPointMap::Quotient,
            ..SolverConfig::default()
        };
        let curve = sweep(&BetaGrid::Explicit(alloc::vec![0.5, 100.0, 1.0]), &cfg, false).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert!(!curve.all_converged());
        assert_eq!(curve.failures().count(), 1);
        assert_eq!(curve.failures().next().unwrap().beta, 100.0);
    }
}
