use num_complex::Complex64;

/// Parses `a+bi` or `a-bi`, with optional `e` exponents on either part.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let bad = || format!("malformed complex literal {text:?}; expected a+bi or a-bi");
    let body = text.trim().strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    // The split is the last sign that is neither leading nor part of an exponent.
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let (re, im) = body.split_at(split);
    let number = |s: &str| -> Result<f64, String> {
        let s = s.strip_prefix('+').unwrap_or(s);
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit() || b".eE+-".contains(&b)) {
            return Err(bad());
        }
        s.parse::<f64>().map_err(|_| bad())
    };
    let value = Complex64::new(number(re)?, number(im)?);
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_plain_and_exponent_forms() {
        assert_eq!(parse_complex("2+0i").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("0+0i").unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(parse_complex("-1.5-2.25i").unwrap(), Complex64::new(-1.5, -2.25));
        assert_eq!(parse_complex("1e-3+2E2i").unwrap(), Complex64::new(1e-3, 200.0));
        assert_eq!(parse_complex("-1.5e-3-2e+2i").unwrap(), Complex64::new(-1.5e-3, -200.0));
        assert_eq!(parse_complex(" 3.-4.5i ").unwrap(), Complex64::new(3.0, -4.5));
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in ["", "i", "2", "2i", "2+i", "+i", "a+bi", "1+2j", "1++2i", "1+2", "1e400+0i", "nan+0i"] {
            assert!(parse_complex(bad).is_err(), "{bad:?} should be rejected");
        }
    }
}
