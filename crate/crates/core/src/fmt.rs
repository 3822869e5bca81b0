//! Fixed-significance decimal formatting for emitted numbers.

/// Significant digits for machine output; enough to round-trip any `f64`.
pub const ROUND_TRIP_DIGITS: usize = 17;

/// Format `x` with at most `digits` significant digits.
///
/// Plain decimal notation is used for exponents in `[-5, digits)`, otherwise
/// scientific notation (`1.5e-7`). Trailing zeros are trimmed. Non-finite
/// values render as `NaN`, `inf` or `-inf`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1, "need at least one significant digit");
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(fmt_sig(0.0, 17), "0");
        assert_eq!(fmt_sig(-0.0, 17), "0");
        assert_eq!(fmt_sig(0.25, 17), "0.25");
        assert_eq!(fmt_sig(1.0, 17), "1");
        assert_eq!(fmt_sig(-3.5, 17), "-3.5");
        assert_eq!(fmt_sig(1e-7, 6), "1e-7");
        assert_eq!(fmt_sig(1e-7, 17), "9.9999999999999995e-8");
        assert_eq!(fmt_sig(1.5e20, 17), "1.5e20");
        assert_eq!(fmt_sig(std::f64::consts::PI, 6), "3.14159");
        assert_eq!(fmt_sig(9.99999999, 3), "10");
        assert_eq!(fmt_sig(123456.0, 3), "1.23e5");
        assert_eq!(fmt_sig(f64::NAN, 17), "NaN");
        assert_eq!(fmt_sig(f64::NEG_INFINITY, 17), "-inf");
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = fmt_sig(x, ROUND_TRIP_DIGITS);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits(), "{} -> {}", x, s);
        }
    }
}
