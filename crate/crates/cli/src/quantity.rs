//! Numbers with optional unit suffixes, and sweep lists.
//!
//! A bare number is read in Gaussian-cgs. A suffix converts from SI or a
//! scaled unit: `1e-7`, `1e-7cm`, `1nm`, `1e-9 m`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Temperature,
    Mass,
    /// Angular frequency.
    Frequency,
    NumberDensity,
    /// Electric dipole moment.
    Dipole,
    Velocity,
    Dimensionless,
}

impl Dimension {
    /// (suffix, factor to cgs).
    fn suffixes(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Length => &[
                ("cm", 1.0),
                ("mm", 0.1),
                ("um", 1e-4),
                ("nm", 1e-7),
                ("m", 100.0),
            ],
            Dimension::Temperature => &[("K", 1.0)],
            Dimension::Mass => &[("g", 1.0), ("kg", 1e3), ("u", 1.660_539_066_60e-24)],
            Dimension::Frequency => &[
                ("rad/s", 1.0),
                ("s^-1", 1.0),
                ("Hz", 2.0 * std::f64::consts::PI),
            ],
            Dimension::NumberDensity => &[("cm^-3", 1.0), ("m^-3", 1e-6)],
            // 1 C m = 2.99792458e11 statC cm; 1 debye = 1e-18 statC cm.
            Dimension::Dipole => &[
                ("statC*cm", 1.0),
                ("esu*cm", 1.0),
                ("D", 1e-18),
                ("C*m", 2.997_924_58e11),
            ],
            Dimension::Velocity => &[("cm/s", 1.0), ("m/s", 100.0)],
            Dimension::Dimensionless => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

/// Parse `value[suffix]` into cgs.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, ParseError> {
    let s = text.trim();
    // Longest suffix first so "mm" is not read as "m".
    let mut suffixes = dim.suffixes().to_vec();
    suffixes.sort_by_key(|(sfx, _)| std::cmp::Reverse(sfx.len()));
    let (number, factor) = suffixes
        .iter()
        .find_map(|(sfx, f)| s.strip_suffix(sfx).map(|n| (n.trim_end(), *f)))
        .unwrap_or((s, 1.0));
    let value: f64 = number
        .parse()
        .map_err(|_| ParseError(format!("cannot read '{text}' as a {dim:?} quantity")))?;
    if !value.is_finite() {
        return Err(ParseError(format!("'{text}' is not finite")));
    }
    Ok(value * factor)
}

/// A sweep: `start:stop:logN`, `start:stop:linN`, a comma list, or one value.
/// The result is non-empty and ascending.
pub fn parse_sweep(text: &str, dim: Dimension) -> Result<Vec<f64>, ParseError> {
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|v| parse_quantity(v, dim))
            .collect::<Result<Vec<_>, _>>()?,
        [start, stop, spec] => {
            let a = parse_quantity(start, dim)?;
            let b = parse_quantity(stop, dim)?;
            let (log, count) = if let Some(n) = spec.strip_prefix("log") {
                (true, n)
            } else if let Some(n) = spec.strip_prefix("lin") {
                (false, n)
            } else {
                return Err(ParseError(format!(
                    "sweep spacing must be logN or linN, got '{spec}'"
                )));
            };
            let n: usize = count
                .parse()
                .map_err(|_| ParseError(format!("bad sweep count '{count}'")))?;
            grid(a, b, n, log)?
        }
        _ => {
            return Err(ParseError(format!(
                "sweep must be start:stop:logN, start:stop:linN or a list, got '{text}'"
            )))
        }
    };
    if values.is_empty() {
        return Err(ParseError("sweep is empty".into()));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(ParseError(format!("sweep '{text}' is not sorted ascending")));
    }
    Ok(values)
}

fn grid(a: f64, b: f64, n: usize, log: bool) -> Result<Vec<f64>, ParseError> {
    if n == 0 {
        return Err(ParseError("sweep count must be at least 1".into()));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    if log && !(a > 0.0 && b > 0.0) {
        return Err(ParseError("log sweep needs positive endpoints".into()));
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            // Pin the endpoints exactly.
            if i == 0 {
                a
            } else if i == n - 1 {
                b
            } else if log {
                a * (b / a).powf(step(i))
            } else {
                a + (b - a) * step(i)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        assert_eq!(parse_quantity("1e-7", Dimension::Length).unwrap(), 1e-7);
        assert!((parse_quantity("1nm", Dimension::Length).unwrap() - 1e-7).abs() < 1e-22);
        assert!((parse_quantity("2 m", Dimension::Length).unwrap() - 200.0).abs() < 1e-12);
        assert!((parse_quantity("3mm", Dimension::Length).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(parse_quantity("300K", Dimension::Temperature).unwrap(), 300.0);
        assert_eq!(parse_quantity("1kg", Dimension::Mass).unwrap(), 1e3);
        assert!(parse_quantity("1 furlong", Dimension::Length).is_err());
        assert!(parse_quantity("inf", Dimension::Length).is_err());
    }

    #[test]
    fn sweeps() {
        let s = parse_sweep("1e-9:1e-6:log25", Dimension::Length).unwrap();
        assert_eq!(s.len(), 25);
        assert_eq!(s[0], 1e-9);
        assert_eq!(s[24], 1e-6);
        assert!((s[8] - 1e-8).abs() < 1e-20);
        let l = parse_sweep("0:1:lin5", Dimension::Dimensionless).unwrap();
        assert_eq!(l, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_sweep("3,300", Dimension::Temperature).unwrap(), vec![3.0, 300.0]);
        assert!(parse_sweep("300,3", Dimension::Temperature).is_err());
        assert!(parse_sweep("1:2:geo3", Dimension::Length).is_err());
        assert!(parse_sweep("0:1:log3", Dimension::Length).is_err());
        assert!(parse_sweep("1:2:lin0", Dimension::Length).is_err());
    }
}
