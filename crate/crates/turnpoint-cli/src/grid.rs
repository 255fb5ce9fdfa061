//! Parsing of grid flags: complex numbers, comma lists and order ranges.

use std::str::FromStr;

use turnpoint::Cplx;

/// `3`, `-0.5i`, `1.5-2i`.
pub fn parse_complex(text: &str) -> Result<Cplx, String> {
    let trimmed = text.trim();
    Cplx::from_str(trimmed).map_err(|_| format!("`{trimmed}` is not a complex number"))
}

pub fn parse_real(text: &str) -> Result<f64, String> {
    let trimmed = text.trim();
    let value: f64 = trimmed.parse().map_err(|_| format!("`{trimmed}` is not a number"))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{trimmed}` is not finite"))
    }
}

/// Comma-separated, non-empty.
pub fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if text.trim().is_empty() {
        return Err("empty list".into());
    }
    text.split(',').map(item).collect()
}

/// `a..b` (inclusive) or a comma list of non-negative integers.
pub fn parse_orders(text: &str) -> Result<Vec<usize>, String> {
    let int = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("`{}` is not an order", s.trim()));
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (int(lo)?, int(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        return Ok((lo..=hi).collect());
    }
    parse_list(text, int)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("-10").unwrap(), Cplx::new(-10.0, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Cplx::new(0.0, 2.0));
        assert_eq!(parse_complex(" 1.5-2i").unwrap(), Cplx::new(1.5, -2.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_orders("0..5").unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(parse_orders("0..=2").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_orders("0,1").unwrap(), vec![0, 1]);
        assert!(parse_orders("3..1").is_err());
        assert_eq!(parse_list("10,20,40", parse_real).unwrap(), vec![10.0, 20.0, 40.0]);
        assert!(parse_list("", parse_real).is_err());
        assert!(parse_real("inf").is_err());
    }
}
