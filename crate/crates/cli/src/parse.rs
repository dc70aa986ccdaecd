//! Exact parsers for numeric arguments. Decimal digits only.

use num_rational::Ratio;

pub fn decimal(s: &str) -> Result<u64, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a decimal integer, got {s:?}"));
    }
    s.parse()
        .map_err(|_| format!("{s} does not fit in 64 bits"))
}

pub fn positive(s: &str) -> Result<u64, String> {
    match decimal(s)? {
        0 => Err("expected a positive integer".into()),
        n => Ok(n),
    }
}

/// `a..b`, inclusive on both ends.
pub fn range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range a..b, got {s:?}"))?;
    let (a, b) = (positive(a)?, positive(b)?);
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

/// `a/b` or `a`, both positive.
pub fn ratio(s: &str) -> Result<Ratio<u64>, String> {
    match s.split_once('/') {
        Some((a, b)) => Ok(Ratio::new(positive(a)?, positive(b)?)),
        None => Ok(Ratio::from_integer(positive(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        assert_eq!(decimal("40"), Ok(40));
        for bad in ["", "1e5", "-3", "+3", " 4", "0x10", "99999999999999999999"] {
            assert!(decimal(bad).is_err(), "{bad}");
        }
        assert!(positive("0").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(range("1..1000"), Ok((1, 1000)));
        assert_eq!(range("7..7"), Ok((7, 7)));
        assert!(range("5..4").is_err());
        assert!(range("1...4").is_err());
        assert!(range("0..4").is_err());
    }

    #[test]
    fn ratios() {
        assert_eq!(ratio("4/2"), Ok(Ratio::from_integer(2)));
        assert_eq!(ratio("3/2"), Ok(Ratio::new(3, 2)));
        assert_eq!(ratio("7"), Ok(Ratio::from_integer(7)));
        assert!(ratio("1/0").is_err());
        assert!(ratio("0/2").is_err());
    }
}
