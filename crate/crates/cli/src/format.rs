/// `%g`-style formatting with `digits` significant digits: fixed notation
/// for moderate exponents, scientific otherwise, trailing zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn six_digits() {
        assert_eq!(sig(698.9949493661167, 6), "698.995");
        assert_eq!(sig(923.7436867076459, 6), "923.744");
        assert_eq!(sig(1119.378906634, 6), "1119.38");
        assert_eq!(sig(500.0, 6), "500");
        assert_eq!(sig(0.0, 6), "0");
        assert_eq!(sig(-0.25, 6), "-0.25");
        assert_eq!(sig(1234567.0, 6), "1.23457e6");
        assert_eq!(sig(0.000001234, 6), "1.234e-6");
        assert_eq!(sig(999999.5, 6), "1e6");
        assert_eq!(sig(698.9949493661167, 10), "698.9949494");
    }
}
