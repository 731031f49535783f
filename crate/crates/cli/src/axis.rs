//! Sweep axes: `a:b:step`, `a:b` (10 evenly spaced points), comma lists, or a single value.

use crate::config::{parse_f64, Length};
use crate::CliError;

pub const DEFAULT_POINTS: usize = 10;

fn expand(a: f64, b: f64, step: Option<f64>) -> Result<Vec<f64>, CliError> {
    match step {
        Some(s) => {
            if !(s > 0.0) || b < a {
                return Err(CliError::Usage(format!("range {a}:{b}:{s} needs a <= b and a positive step")));
            }
            let n = ((b - a) / s + 1e-9).floor() as usize;
            if n > 100_000 {
                return Err(CliError::Usage("range has too many points".into()));
            }
            Ok((0..=n).map(|i| a + i as f64 * s).collect())
        }
        None => {
            if b < a {
                return Err(CliError::Usage(format!("range {a}:{b} needs a <= b")));
            }
            let d = (b - a) / (DEFAULT_POINTS - 1) as f64;
            Ok((0..DEFAULT_POINTS).map(|i| if i == DEFAULT_POINTS - 1 { b } else { a + i as f64 * d }).collect())
        }
    }
}

/// Parses a numeric axis.
pub fn parse_numbers(s: &str) -> Result<Vec<f64>, CliError> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        return match parts.as_slice() {
            [a, b] => expand(parse_f64(a)?, parse_f64(b)?, None),
            [a, b, st] => expand(parse_f64(a)?, parse_f64(b)?, Some(parse_f64(st)?)),
            _ => Err(CliError::Usage(format!("bad range {s:?}"))),
        };
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_f64).collect::<Result<Vec<_>, _>>().and_then(non_empty)
}

fn non_empty<T>(v: Vec<T>) -> Result<Vec<T>, CliError> {
    if v.is_empty() {
        Err(CliError::Usage("empty axis".into()))
    } else {
        Ok(v)
    }
}

/// Parses an axis of antenna counts; every value must be an integer ≥ 1.
pub fn parse_counts(s: &str) -> Result<Vec<usize>, CliError> {
    parse_numbers(s)?
        .into_iter()
        .map(|v| {
            let r = v.round();
            if (v - r).abs() > 1e-9 || r < 1.0 {
                Err(CliError::Usage(format!("antenna counts must be positive integers, got {v}")))
            } else {
                Ok(r as usize)
            }
        })
        .collect()
}

/// Parses an axis of lengths; range endpoints must share a unit.
pub fn parse_lengths(s: &str) -> Result<Vec<Length>, CliError> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<Length> = s.split(':').map(Length::parse).collect::<Result<_, _>>()?;
        let (a, b) = (parts[0], parts[1]);
        let step = parts.get(2).copied();
        if parts.len() > 3 {
            return Err(CliError::Usage(format!("bad range {s:?}")));
        }
        let raw = |l: Length| match l {
            Length::Meters(v) | Length::Wavelengths(v) => v,
        };
        let wavelengths = matches!(a, Length::Wavelengths(_));
        let same = |l: Length| matches!(l, Length::Wavelengths(_)) == wavelengths;
        // A bare step takes the endpoints' unit.
        let step_ok = step.is_none_or(|st| same(st) || matches!(st, Length::Meters(_)));
        if !same(b) || !step_ok {
            return Err(CliError::Usage(format!("range {s:?} mixes meters and wavelengths")));
        }
        let values = expand(raw(a), raw(b), step.map(raw))?;
        return Ok(values
            .into_iter()
            .map(|v| if wavelengths { Length::Wavelengths(v) } else { Length::Meters(v) })
            .collect());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(Length::parse).collect::<Result<Vec<_>, _>>().and_then(non_empty)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepped_range() {
        let v = parse_counts("10:400:10").unwrap();
        assert_eq!(v.len(), 40);
        assert_eq!((v[0], v[39]), (10, 400));
    }

    #[test]
    fn default_point_count() {
        let v = parse_numbers("0:15").unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!((v[0], v[9]), (0.0, 15.0));
    }

    #[test]
    fn length_ranges() {
        let v = parse_lengths("0.5λ:5λ").unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v[9], Length::Wavelengths(5.0));
        let v = parse_lengths("1lam:3lam:1").unwrap();
        assert_eq!(v, vec![Length::Wavelengths(1.0), Length::Wavelengths(2.0), Length::Wavelengths(3.0)]);
        assert!(parse_lengths("1lam:3").is_err());
        assert_eq!(parse_lengths("1.0λ").unwrap(), vec![Length::Wavelengths(1.0)]);
    }

    #[test]
    fn lists_and_errors() {
        assert_eq!(parse_numbers("0,1.5").unwrap(), vec![0.0, 1.5]);
        assert!(parse_counts("2.5").is_err());
        assert!(parse_numbers("").is_err());
        assert!(parse_numbers("5:1").is_err());
    }
}
