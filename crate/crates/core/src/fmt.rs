//! Locale-independent number formatting with 17 significant digits.

/// Formats like C's `%.17g`; non-finite values print as `nan`, `inf`, `-inf`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", v);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-5..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

/// Formats a boolean as `true`/`false`.
pub fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
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
    use super::num;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(num(0.1), "0.10000000000000001");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(1e-7), "9.9999999999999995e-08");
        assert_eq!(num(1e20), "1e+20");
        assert_eq!(num(123456.0), "123456");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn round_trips() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, -7.25e-300, 6.02e23, 0.1 + 0.2] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }
}
