//! Locale-independent number formatting for CSV columns.

/// Significant digits in every floating-point CSV column.
pub const SIGNIFICANT_DIGITS: i32 = 12;

/// Fixed-point decimal with 12 significant digits, e.g. `0.716426643130`.
/// Non-finite values print as `nan`, `inf` and `-inf`.
pub fn sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_significant_digits() {
        assert_eq!(sig(0.716_426_643_129_884_1), "0.716426643130");
        assert_eq!(sig(1.0), "1.00000000000");
        assert_eq!(sig(64.389_394_426_146_13), "64.3893944261");
        assert_eq!(sig(-0.839_923_675_692_372_7), "-0.839923675692");
        assert_eq!(sig(2.5e-13), "0.000000000000250000000000");
        assert_eq!(sig(123_456_789_012_345.0), "123456789012345");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(f64::INFINITY), "inf");
        assert_eq!(sig(f64::NAN), "nan");
    }

    proptest::proptest! {
        #[test]
        fn round_trips_to_twelve_digits(mantissa in 1.0_f64..10.0, exp in -20_i32..15, neg: bool) {
            let x = if neg { -mantissa } else { mantissa } * 10_f64.powi(exp);
            let text = sig(x);
            proptest::prop_assert!(!text.contains('e') && !text.contains(' '));
            let back: f64 = text.parse().unwrap();
            proptest::prop_assert!(((back - x) / x).abs() < 1e-11);
        }
    }
}
