//! Standard normal tail `Q(x) = P(Z > x)` and the log-derivative `Q'(t)/Q(t)`
//! that drives the saddle-point map.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

/// Above this argument `q_ratio` switches to the continued fraction for the
/// Mills ratio; `φ(t)/Q(t)` loses relative accuracy as `Q` shrinks.
const MILLS_SWITCH: f64 = 8.0;
const MILLS_DEPTH: u32 = 64;

/// `Q(x) = ½·erfc(x/√2)`.
pub fn gaussian_tail(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain("gaussian_tail needs a finite argument"));
    }
    Ok(tail(x))
}

/// `Q'(t)/Q(t) = −φ(t)/Q(t)`. Strictly negative for finite `t` until `φ`
/// underflows far in the left tail, where it reaches `-0.0`.
pub fn q_ratio(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain("q_ratio needs a finite argument"));
    }
    Ok(ratio(t))
}

pub(crate) fn tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `ln Q(x)`, finite far into the right tail where `Q` itself underflows.
pub(crate) fn ln_tail(x: f64) -> f64 {
    if x > MILLS_SWITCH {
        -0.5 * x * x - 0.5 * libm::log(2.0 * PI) - libm::log(mills_denominator(x))
    } else {
        libm::log(tail(x))
    }
}

pub(crate) fn density(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * PI)
}

pub(crate) fn ratio(t: f64) -> f64 {
    if t > MILLS_SWITCH {
        -mills_denominator(t)
    } else {
        -density(t) / tail(t)
    }
}

/// `φ(t)/Q(t)` from the continued fraction
/// `Q(t)/φ(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...))))`, evaluated bottom-up.
fn mills_denominator(t: f64) -> f64 {
    let mut v = t;
    for n in (1..=MILLS_DEPTH).rev() {
        v = t + f64::from(n) / v;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values from 30-digit erfc evaluations.
    #[test]
    fn tail_reference_values() {
        assert_eq!(gaussian_tail(0.0).unwrap(), 0.5);
        assert!(rel(gaussian_tail(-1.0).unwrap(), 0.841_344_746_068_542_9) < 1e-15);
        assert!(rel(gaussian_tail(1.0).unwrap(), 0.158_655_253_931_457_05) < 1e-14);
        assert!(rel(gaussian_tail(3.0).unwrap(), 1.349_898_031_630_094_5e-3) < 1e-13);
        assert!(rel(gaussian_tail(10.0).unwrap(), 7.619_853_024_160_526e-24) < 1e-12);
        assert!(rel(gaussian_tail(30.0).unwrap(), 4.906_713_927_148_187e-198) < 1e-12);
        assert_eq!(gaussian_tail(-30.0).unwrap(), 1.0);
        assert!(gaussian_tail(10.0).unwrap() < 1e-23);
    }

    #[test]
    fn tail_rejects_non_finite() {
        assert!(matches!(gaussian_tail(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(gaussian_tail(f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(q_ratio(f64::NEG_INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn ratio_reference_values() {
        assert!(rel(q_ratio(0.0).unwrap(), -0.797_884_560_802_865_4) < 1e-15);
        assert!(rel(q_ratio(-1.0).unwrap(), -0.287_599_970_939_178_4) < 1e-14);
        assert!(rel(q_ratio(2.0).unwrap(), -2.373_215_532_822_841) < 1e-13);
        assert!(rel(q_ratio(9.0).unwrap(), -9.108_523_105_002_869) < 1e-14);
        assert!(rel(q_ratio(20.0).unwrap(), -20.049_753_068_527_85) < 1e-15);
        assert!(rel(q_ratio(50.0).unwrap(), -50.019_984_031_905_64) < 1e-15);
        let far_left = q_ratio(-20.0).unwrap();
        assert!(far_left < 0.0 && far_left.abs() < 1e-80);
        assert!(rel(far_left, -5.520_948_362_159_763e-88) < 1e-12);
    }

    #[test]
    fn ratio_branches_agree_at_switch() {
        assert!(rel(q_ratio(7.9).unwrap(), -8.022_817_246_208_781) < 1e-12);
        assert!(rel(q_ratio(8.0).unwrap(), -8.121_368_112_236_113) < 1e-12);
        assert!(rel(q_ratio(8.1).unwrap(), -8.219_951_901_046_749) < 1e-14);
        let below = -density(8.0) / tail(8.0);
        let cf = ratio(8.0 + 1e-12);
        assert!(rel(cf, below) < 1e-10);
    }

    #[test]
    fn log_tail_matches_direct_and_extends_past_underflow() {
        for &x in &[-5.0, -1.0, 0.0, 2.5, 7.99, 8.01, 12.0, 30.0] {
            let direct = libm::log(tail(x));
            assert!((ln_tail(x) - direct).abs() < 1e-11 * direct.abs().max(1.0), "x = {x}");
        }
        // ln Q(40) = -804.608442013754...
        assert!(rel(ln_tail(40.0), -804.608_442_013_753_8) < 1e-14);
    }

    #[test]
    fn ratio_is_negative() {
        let mut t = -30.0;
        while t < 60.0 {
            assert!(q_ratio(t).unwrap() < 0.0, "t = {t}");
            t += 0.37;
        }
    }
}
