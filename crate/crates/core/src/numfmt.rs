/// Formats `v` with 9 significant digits, dropping trailing zeros.
///
/// Plain decimal notation is used for exponents in `-5..9`, scientific
/// notation otherwise. Infinities print as `inf` / `-inf`.
pub fn format_sig9(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.8e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..9).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (8 - exp).max(0) as usize;
    let plain = format!("{:.*}", decimals, v.abs());
    let plain = trim_zeros(&plain);
    // Rounding can produce "-0".
    if plain == "0" {
        return plain.to_string();
    }
    if v < 0.0 {
        format!("-{}", plain)
    } else {
        plain.to_string()
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
    fn integers_and_fractions() {
        assert_eq!(format_sig9(5.0), "5");
        assert_eq!(format_sig9(-3.0), "-3");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(-0.0), "0");
        assert_eq!(format_sig9(std::f64::consts::E.recip()), "0.367879441");
        assert_eq!(format_sig9(-1.1752011936438014), "-1.17520119");
        assert_eq!(format_sig9(2.000000001), "2");
        assert_eq!(format_sig9(1234.5), "1234.5");
    }

    #[test]
    fn extreme_magnitudes() {
        assert_eq!(format_sig9(1e-9), "1e-9");
        assert_eq!(format_sig9(-2.5e12), "-2.5e12");
        assert_eq!(format_sig9(f64::INFINITY), "inf");
        assert_eq!(format_sig9(0.00012), "0.00012");
    }
}
