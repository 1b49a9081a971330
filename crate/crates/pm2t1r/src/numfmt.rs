//! Deterministic number formatting shared by report and CSV writers.
//!
//! Floating output is printed with 9 significant digits in the style of
//! `printf("%.9g")`: fixed notation in a readable exponent range, scientific
//! notation outside it, trailing zeros trimmed. The formatter is a pure
//! function of the value's bits, which is what makes repeated runs
//! byte-identical.

/// Formats `x` with 9 significant digits, `%.9g` style.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned(); // covers -0.0 as well
    }
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_owned();
    }
    // Decimal exponent from the scientific rendering: rounding to 9
    // significant digits can bump the exponent (9.9999e2 -> 1e3), so take it
    // from the already-rounded string rather than from log10.
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("f64 scientific format always contains an exponent");
    let exp: i32 = exp.parse().expect("exponent is a valid integer");
    if !(-4..9).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x))
}

/// Formats a complex value as `a`, `a+bi` or `a-bi` with 9 significant
/// digits per component. Pure real values collapse to the real part alone.
pub fn sig9_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        return sig9(re);
    }
    let im_s = sig9(im);
    if im_s.starts_with('-') {
        format!("{}{}i", sig9(re), im_s)
    } else {
        format!("{}+{}i", sig9(re), im_s)
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_owned();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_range_values() {
        assert_eq!(sig9(428.7202943233046), "428.720294");
        assert_eq!(sig9(-84.59), "-84.59");
        assert_eq!(sig9(0.3045205261), "0.304520526");
        assert_eq!(sig9(1000.0), "1000");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(-0.0), "0");
    }

    #[test]
    fn scientific_range_values() {
        assert_eq!(sig9(1.23456789e12), "1.23456789e12");
        assert_eq!(sig9(-4.2e-7), "-4.2e-7");
        assert_eq!(sig9(3.0e9), "3e9");
    }

    #[test]
    fn rounding_can_bump_the_exponent() {
        // 999_999_999.6 rounds to 1e9 at 9 significant digits, which must
        // switch to scientific notation rather than print ten digits.
        assert_eq!(sig9(999_999_999.6), "1e9");
        assert_eq!(sig9(999_999_999.4), "999999999");
    }

    #[test]
    fn complex_rendering() {
        assert_eq!(sig9_complex(-0.78646061, 0.38728179), "-0.78646061+0.38728179i");
        assert_eq!(sig9_complex(-0.78646061, -0.38728179), "-0.78646061-0.38728179i");
        assert_eq!(sig9_complex(1.5, 0.0), "1.5");
    }

    #[test]
    fn deterministic() {
        let xs = [1.0 / 3.0, std::f64::consts::PI, 2.0f64.sqrt() * 1e-5];
        for x in xs {
            assert_eq!(sig9(x), sig9(x));
        }
    }
}
