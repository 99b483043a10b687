use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::ffpoly::{factor, PolyFq};

/// Parses a complex literal such as `0.1`, `-0.2i`, `0.1+0.2i` or `1e-3-4i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(parse_err(s, "empty shift"));
    }
    let real = |x: &str| -> Result<f64> {
        x.parse::<f64>()
            .map_err(|_| parse_err(s, format!("bad number {x:?}")))
    };
    let imag = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => real(x),
        }
    };
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(real(&t)?, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub(crate) fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// An ordered list of complex shifts `gamma_1, ..., gamma_k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ShiftSet {
    shifts: Vec<Complex64>,
}

impl ShiftSet {
    pub fn new(shifts: Vec<Complex64>) -> Self {
        Self { shifts }
    }

    pub fn real(shifts: &[f64]) -> Self {
        Self::new(shifts.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn shifts(&self) -> &[Complex64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// Sum of the shifts, written `C` in exponents such as `q^{-2gC}`.
    pub fn total(&self) -> Complex64 {
        self.shifts.iter().sum()
    }

    /// `C^-`: every shift negated.
    pub fn negated(&self) -> Self {
        Self::new(self.shifts.iter().map(|z| -z).collect())
    }

    /// `(C \ R) u R^-` for the subset `R` given as a bit mask.
    pub fn reflect_subset(&self, mask: u64) -> Self {
        Self::new(
            self.shifts
                .iter()
                .enumerate()
                .map(|(i, &z)| if mask >> i & 1 == 1 { -z } else { z })
                .collect(),
        )
    }

    /// Sum of the shifts selected by `mask`.
    pub fn subset_total(&self, mask: u64) -> Complex64 {
        self.shifts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, z)| z)
            .sum()
    }

    /// Numerator shifts: `|Re alpha| < 1/4`.
    pub fn check_numerator(&self) -> Result<()> {
        for z in &self.shifts {
            if !(z.re.abs() < 0.25) || !z.im.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "numerator shift {} outside |Re alpha| < 1/4",
                    format_complex(*z)
                )));
            }
        }
        Ok(())
    }

    /// Denominator shifts: `0 < Re beta < 1/2`.
    pub fn check_denominator(&self) -> Result<()> {
        for z in &self.shifts {
            if !(z.re > 0.0 && z.re < 0.5) || !z.im.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "denominator shift {} outside 0 < Re beta < 1/2",
                    format_complex(*z)
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for ShiftSet {
    type Err = Error;

    /// Comma-separated complex literals.
    fn from_str(s: &str) -> Result<Self> {
        let shifts = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        if shifts.is_empty() {
            return Err(parse_err(s, "no shifts given"));
        }
        Ok(Self::new(shifts))
    }
}

impl fmt::Display for ShiftSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.shifts.iter().map(|&z| format_complex(z)).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// A monic twist `h = h1 h2^2` with `h1` square-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistPoly {
    pub h: PolyFq,
    pub h1: PolyFq,
    pub h2: PolyFq,
    /// Distinct primes of `h` with their multiplicities.
    pub primes: Vec<(PolyFq, u32)>,
}

impl TwistPoly {
    pub fn new(h: &PolyFq) -> Result<Self> {
        if !h.is_monic() {
            return Err(Error::NotMonic(h.to_string()));
        }
        let field = h.field();
        let primes = if h.is_constant() {
            Vec::new()
        } else {
            factor(h)?.factors
        };
        let mut h1 = PolyFq::one(field);
        let mut h2 = PolyFq::one(field);
        for (p, e) in &primes {
            if e % 2 == 1 {
                h1 = h1.mul_unchecked(p);
            }
            for _ in 0..e / 2 {
                h2 = h2.mul_unchecked(p);
            }
        }
        Ok(Self {
            h: h.clone(),
            h1,
            h2,
            primes,
        })
    }

    pub fn one(field: crate::ffpoly::FieldParams) -> Self {
        Self::new(&PolyFq::one(field)).expect("1 is monic")
    }

    pub fn divides_h1(&self, p: &PolyFq) -> bool {
        self.primes.iter().any(|(r, e)| r == p && e % 2 == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::FieldParams;

    #[test]
    fn complex_literals() {
        let cases = [
            ("0.1", Complex64::new(0.1, 0.0)),
            ("-0.05", Complex64::new(-0.05, 0.0)),
            ("0.1+0.2i", Complex64::new(0.1, 0.2)),
            ("0.1-0.2i", Complex64::new(0.1, -0.2)),
            ("-0.2i", Complex64::new(0.0, -0.2)),
            ("i", Complex64::new(0.0, 1.0)),
            ("1e-3-4e-2i", Complex64::new(1e-3, -4e-2)),
            (" 0.3 + 1i ", Complex64::new(0.3, 1.0)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn shift_set_parse_and_reflect() {
        let a: ShiftSet = "0.1, -0.05+0.2i".parse().unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.reflect_subset(0b10).shifts()[1], Complex64::new(0.05, -0.2));
        assert_eq!(a.subset_total(0b11), a.total());
        assert!(a.check_numerator().is_ok());
        assert!(ShiftSet::real(&[0.3]).check_denominator().is_ok());
        assert!(ShiftSet::real(&[0.0]).check_denominator().is_err());
        assert!(ShiftSet::real(&[0.3]).check_numerator().is_err());
    }

    #[test]
    fn twist_decomposition() {
        let f = FieldParams::new(5).unwrap();
        // x^3 (x+1) = x (x+1) * x^2
        let h = PolyFq::new(f, &[0, 0, 0, 1]).mul(&PolyFq::new(f, &[1, 1])).unwrap();
        let t = TwistPoly::new(&h).unwrap();
        assert_eq!(t.h1, PolyFq::new(f, &[0, 1, 1]));
        assert_eq!(t.h2, PolyFq::new(f, &[0, 1]));
        let back = t.h1.mul(&t.h2).unwrap().mul(&t.h2).unwrap();
        assert_eq!(back, h);
        assert!(t.divides_h1(&PolyFq::new(f, &[1, 1])));
    }
}
