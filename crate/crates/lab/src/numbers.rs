//! Locale-independent parsing of numeric flag values.
//!
//! Accepted: optional sign, ASCII digits, one `.`, optional exponent (`1e-5`).
//! Rejected: `inf`, `nan`, hex, digit grouping, decimal commas, empty strings.

fn is_decimal(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next().unwrap_or("");
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || !digits(frac) || int.len() + frac.len() == 0 {
        return false;
    }
    match exponent {
        None => true,
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            !e.is_empty() && digits(e)
        }
    }
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if !is_decimal(t) {
        return Err(format!("'{s}' is not a decimal number"));
    }
    let v: f64 = t.parse().map_err(|e| format!("'{s}': {e}"))?;
    if !v.is_finite() {
        return Err(format!("'{s}' is out of range"));
    }
    Ok(v)
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("'{s}' is not a non-negative integer"));
    }
    t.parse().map_err(|e| format!("'{s}': {e}"))
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    let v = parse_u64(s)?;
    usize::try_from(v).map_err(|_| format!("'{s}' is too large"))
}

fn parse_list<const N: usize>(s: &str, what: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("'{s}': expected {what}"));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_f64(p)?;
    }
    Ok(out)
}

/// `x,y`
pub fn parse_point(s: &str) -> Result<[f64; 2], String> {
    parse_list::<2>(s, "x,y")
}

/// `lo,hi`
pub fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let r = parse_list::<2>(s, "lo,hi")?;
    if r[0] >= r[1] {
        return Err(format!("'{s}': lower end must be below upper end"));
    }
    Ok(r)
}

/// `x_min,x_max,y_min,y_max`
pub fn parse_window(s: &str) -> Result<[f64; 4], String> {
    let w = parse_list::<4>(s, "x_min,x_max,y_min,y_max")?;
    if w[0] >= w[1] || w[2] >= w[3] {
        return Err(format!("'{s}': window is empty"));
    }
    Ok(w)
}

/// `WxH` or a single `N` for a square raster.
pub fn parse_resolution(s: &str) -> Result<[usize; 2], String> {
    let t = s.trim();
    let (w, h) = match t.split_once(['x', 'X']) {
        Some((w, h)) => (parse_usize(w)?, parse_usize(h)?),
        None => {
            let n = parse_usize(t)?;
            (n, n)
        }
    };
    if w == 0 || h == 0 {
        return Err(format!("'{s}': resolution must be positive"));
    }
    Ok([w, h])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_plain_decimals() {
        assert_eq!(parse_f64("2").unwrap(), 2.0);
        assert_eq!(parse_f64("-0.25").unwrap(), -0.25);
        assert_eq!(parse_f64(".5").unwrap(), 0.5);
        assert_eq!(parse_f64("3.").unwrap(), 3.0);
        assert_eq!(parse_f64("+1e-5").unwrap(), 1e-5);
    }

    #[test]
    fn rejects_non_decimal_forms() {
        for bad in ["", ".", "inf", "-inf", "NaN", "0x10", "1,5", "1 000", "1_000", "1e", "e5", "--1", "1.2.3", "1e400"] {
            assert!(parse_f64(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn integers_are_digits_only() {
        assert_eq!(parse_u64("42").unwrap(), 42);
        for bad in ["-1", "1.0", "1e3", "", "0x2"] {
            assert!(parse_u64(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn compound_values() {
        assert_eq!(parse_point("0.3,0.6").unwrap(), [0.3, 0.6]);
        assert_eq!(parse_window("-0.25,1.25,-0.25,1.25").unwrap(), [-0.25, 1.25, -0.25, 1.25]);
        assert!(parse_window("1,0,0,1").is_err());
        assert_eq!(parse_resolution("512").unwrap(), [512, 512]);
        assert_eq!(parse_resolution("640x480").unwrap(), [640, 480]);
        assert!(parse_resolution("0x4").is_err());
        assert!(parse_range("2,1").is_err());
    }
}
