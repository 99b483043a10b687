use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{jacobi_euclid, GaussSumEvaluator};
use crate::error::{Error, Result};
use crate::ffpoly::{enumerate_monic, factor, PolyFq};
use crate::sum::ComplexSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1Sides {
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L3Sides {
    pub direct: Complex64,
    pub closed: Complex64,
}

/// `sum_{r in M_m} chi_f(r)`, with `chi_f(r) = (r/f)`.
fn monic_char_sum(f: &PolyFq, m: usize) -> i64 {
    if f.is_constant() {
        return enumerate_monic(f.field(), m).len() as i64;
    }
    enumerate_monic(f.field(), m)
        .map(|r| jacobi_euclid(&r, f) as i64)
        .sum()
}

/// Degrees of all monic `C` supported on the primes of `f` with
/// `2 d(C) <= max`, with multiplicity.
fn supported_degrees(f: &PolyFq, max: usize) -> Result<Vec<usize>> {
    let prime_degrees: Vec<usize> = if f.is_constant() {
        Vec::new()
    } else {
        factor(f)?.factors.iter().map(|(p, _)| p.deg()).collect()
    };
    let mut out = vec![0usize];
    for d in prime_degrees {
        let mut next = Vec::new();
        for &base in &out {
            let mut deg = base;
            while 2 * deg <= max {
                next.push(deg);
                deg += d;
            }
        }
        out = next;
    }
    Ok(out)
}

/// Both sides of the identity expressing `sum_{D in H_{2g+1}} chi_D(f)` as
/// character sums over `M_m`, each computed by enumeration.
pub fn char_sum_l1_sides(f: &PolyFq, g: usize) -> Result<L1Sides> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_string()));
    }
    let field = f.field();
    let n = 2 * g + 1;
    let lhs: i64 = enumerate_monic(field, n)
        .filter(|d| d.is_squarefree_unchecked())
        .map(|d| {
            if f.is_constant() {
                1
            } else {
                jacobi_euclid(&d, f) as i64
            }
        })
        .sum();

    let mut cache: HashMap<usize, i64> = HashMap::new();
    let mut sum_at = |m: usize| *cache.entry(m).or_insert_with(|| monic_char_sum(f, m));
    let q = field.q() as i64;
    let mut rhs = 0i64;
    for c in supported_degrees(f, n)? {
        rhs += sum_at(n - 2 * c);
        if 2 * c + 1 <= 2 * g {
            rhs -= q * sum_at(2 * g - 1 - 2 * c);
        }
    }
    Ok(L1Sides { lhs, rhs })
}

/// `sum_{r in M_m} chi_f(r)` directly and through Gauss sums of `chi_f`.
pub fn char_sum_l3(f: &PolyFq, m: usize) -> Result<L3Sides> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_string()));
    }
    if f.is_constant() {
        return Err(Error::InvalidArgument("modulus must be nonconstant".into()));
    }
    let field = f.field();
    let n = f.deg();
    let direct = Complex64::new(monic_char_sum(f, m) as f64, 0.0);
    let ev = GaussSumEvaluator::new(f)?;
    let q = field.q() as f64;
    let norm = f.norm();

    let sum_over_degree = |d: usize| -> Result<ComplexSum> {
        let mut acc = ComplexSum::new();
        for v in enumerate_monic(field, d) {
            acc.add(ev.eval(&v)?.value);
        }
        Ok(acc)
    };
    let sum_upto = |top: isize| -> Result<Complex64> {
        let mut acc = ComplexSum::new();
        for d in 0..=top.max(-1) {
            acc.merge(&sum_over_degree(d as usize)?);
        }
        Ok(acc.value())
    };

    let closed = if n % 2 == 0 {
        let g0 = ev.eval(&PolyFq::zero(field))?.value;
        let a = sum_upto(n as isize - m as isize - 2)?;
        let b = sum_upto(n as isize - m as isize - 1)?;
        (g0 + a * q - b) * (q.powi(m as i32) / norm)
    } else if m + 1 <= n {
        sum_over_degree(n - m - 1)?.value() * (q.powf(m as f64 + 0.5) / norm)
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(L3Sides { direct, closed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::FieldParams;

    fn f5() -> FieldParams {
        FieldParams::new(5).unwrap()
    }

    fn p(c: &[i64]) -> PolyFq {
        PolyFq::new(f5(), c)
    }

    #[test]
    fn l1_examples() {
        let s = char_sum_l1_sides(&p(&[0, 1]), 1).unwrap();
        assert_eq!(s.lhs, s.rhs);
        let s = char_sum_l1_sides(&PolyFq::one(f5()), 1).unwrap();
        assert_eq!(s.lhs, 125 - 25);
        assert_eq!(s.rhs, s.lhs);
        let s = char_sum_l1_sides(&p(&[0, 0, 1]), 2).unwrap();
        assert_eq!(s.lhs, s.rhs);
    }

    #[test]
    fn l1_exhaustive() {
        for deg in 0..=4 {
            for f in enumerate_monic(f5(), deg) {
                for g in 1..=2 {
                    let s = char_sum_l1_sides(&f, g).unwrap();
                    assert_eq!(s.lhs, s.rhs, "f={f:?} g={g}");
                }
            }
        }
    }

    #[test]
    fn l3_examples() {
        let s = char_sum_l3(&p(&[1, 0, 1]), 1).unwrap();
        assert!((s.direct - s.closed).norm() < 1e-9);
        let s = char_sum_l3(&p(&[1, 1, 0, 1]), 1).unwrap();
        assert!((s.direct - s.closed).norm() < 1e-9);
    }

    #[test]
    fn l3_exhaustive() {
        for deg in 1..=4 {
            for f in enumerate_monic(f5(), deg) {
                for m in 0..=4 {
                    let s = char_sum_l3(&f, m).unwrap();
                    assert!(
                        (s.direct - s.closed).norm() < 1e-9,
                        "f={f:?} m={m}: {} vs {}",
                        s.direct,
                        s.closed
                    );
                }
            }
        }
    }
}
