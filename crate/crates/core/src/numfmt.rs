//! Number formatting shared by the text outputs.

/// Formats `x` with 12 significant digits in the style of C's `%.12g`:
/// fixed notation for exponents in `[-5, 12)`, scientific otherwise, with
/// trailing zeros removed.
pub fn sig12(x: f64) -> String {
    sig(x, 12)
}

pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_like_percent_g() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12((11f64).ln() / 5.0), "0.47957905456");
        assert_eq!(sig12(13.970621481723), "13.9706214817");
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(1e-7), "1e-7");
        assert_eq!(sig12(-2.5e13), "-2.5e13");
        assert_eq!(sig12(100.0), "100");
    }
}
