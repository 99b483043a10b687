//! Quadratic residue and Jacobi symbols, additive characters and Gauss sums.

mod gauss;
mod lemmas;

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffpoly::{factor, is_irreducible, PolyFq};

pub use gauss::{
    exp_of_fraction, gauss_sum_closed, gauss_sum_direct, ExpLinear, GaussSumEvaluator,
    GaussSumValue, RootsOfUnity,
};
pub use lemmas::{char_sum_l1_sides, char_sum_l3, L1Sides, L3Sides};

/// A value of a quadratic symbol: `-1`, `0` or `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolValue(i8);

impl SymbolValue {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1);
    pub const MINUS_ONE: Self = Self(-1);

    pub fn new(v: i8) -> Self {
        Self(v.signum())
    }

    #[inline]
    pub fn value(self) -> i8 {
        self.0
    }

    pub fn pow(self, e: u32) -> Self {
        match (self.0, e) {
            (_, 0) => Self::ONE,
            (-1, e) if e % 2 == 0 => Self::ONE,
            (v, _) => Self(v),
        }
    }
}

impl Mul for SymbolValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `(f / P) = f^{(|P| - 1)/2} mod P` for a monic irreducible `P`.
pub fn residue_symbol(f: &PolyFq, prime: &PolyFq) -> Result<SymbolValue> {
    if f.field() != prime.field() {
        return Err(Error::FieldMismatch(f.q(), prime.q()));
    }
    if !prime.is_monic() {
        return Err(Error::NotMonic(prime.to_string()));
    }
    if !is_irreducible(prime) {
        return Err(Error::NotIrreducible(prime.to_string()));
    }
    Ok(residue_symbol_unchecked(f, prime))
}

pub(crate) fn residue_symbol_unchecked(f: &PolyFq, prime: &PolyFq) -> SymbolValue {
    let field = f.field();
    let r = f.rem_unchecked(prime);
    if r.is_zero() {
        return SymbolValue::ZERO;
    }
    let norm = field
        .power(prime.deg() as u32)
        .expect("prime norm exceeds u128");
    let v = r.powmod_unchecked((norm - 1) / 2, prime);
    debug_assert!(v.deg() == 0);
    if v.coeff(0) == 1 {
        SymbolValue::ONE
    } else {
        SymbolValue::MINUS_ONE
    }
}

/// Jacobi symbol `(f / Q)` from its definition: the product of residue
/// symbols over the factorization of the monic modulus `Q`.
pub fn jacobi_symbol(f: &PolyFq, modulus: &PolyFq) -> Result<SymbolValue> {
    if f.field() != modulus.field() {
        return Err(Error::FieldMismatch(f.q(), modulus.q()));
    }
    if modulus.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if modulus.is_constant() {
        return Ok(SymbolValue::ONE);
    }
    if !modulus.is_monic() {
        return Err(Error::NotMonic(modulus.to_string()));
    }
    let fx = factor(modulus)?;
    Ok(fx
        .factors
        .iter()
        .fold(SymbolValue::ONE, |acc, (p, e)| {
            acc * residue_symbol_unchecked(f, p).pow(*e)
        }))
}

/// Jacobi symbol `(a / b)` by the Euclidean algorithm, flipping with
/// reciprocity `(A/B) = (B/A)` (valid for `q = 1 mod 4`) and pulling out
/// leading units via `(c/B) = legendre(c)^{d(B)}`.
pub fn jacobi_reciprocity(a: &PolyFq, modulus: &PolyFq) -> Result<SymbolValue> {
    if a.field() != modulus.field() {
        return Err(Error::FieldMismatch(a.q(), modulus.q()));
    }
    if modulus.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if modulus.is_constant() {
        return Ok(SymbolValue::ONE);
    }
    if !modulus.is_monic() {
        return Err(Error::NotMonic(modulus.to_string()));
    }
    Ok(SymbolValue(jacobi_euclid(a, modulus)))
}

pub(crate) fn jacobi_euclid(a: &PolyFq, b: &PolyFq) -> i8 {
    let field = a.field();
    let mut a = a.rem_unchecked(b);
    let mut b = b.clone();
    let mut sign = 1i8;
    loop {
        if b.deg() == 0 {
            return sign;
        }
        if a.is_zero() {
            return 0;
        }
        let (c, monic) = a.make_monic();
        if b.deg() % 2 == 1 {
            sign *= field.legendre(c);
        }
        if monic.deg() == 0 {
            return sign;
        }
        let r = b.rem_unchecked(&monic);
        b = monic;
        a = r;
    }
}

/// The quadratic character `chi_D(f) = (D / f)` for monic `f`.
pub fn chi(d: &PolyFq, f: &PolyFq) -> Result<SymbolValue> {
    jacobi_reciprocity(d, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::{enumerate_monic, FieldParams};

    fn f5() -> FieldParams {
        FieldParams::new(5).unwrap()
    }

    fn p(c: &[i64]) -> PolyFq {
        PolyFq::new(f5(), c)
    }

    fn monics_upto(n: usize) -> Vec<PolyFq> {
        (0..=n).flat_map(|d| enumerate_monic(f5(), d)).collect()
    }

    #[test]
    fn residue_symbol_examples() {
        let x = p(&[0, 1]);
        assert_eq!(residue_symbol(&p(&[2]), &x).unwrap(), SymbolValue::MINUS_ONE);
        assert_eq!(residue_symbol(&p(&[4]), &x).unwrap(), SymbolValue::ONE);
        assert_eq!(residue_symbol(&x, &x).unwrap(), SymbolValue::ZERO);
        assert!(matches!(
            residue_symbol(&x, &p(&[1, 0, 1])),
            Err(Error::NotIrreducible(_))
        ));
    }

    #[test]
    fn jacobi_examples() {
        let x = p(&[0, 1]);
        let q = p(&[1, 0, 1]);
        let direct = jacobi_symbol(&x, &q).unwrap();
        let by_parts = residue_symbol(&x, &p(&[2, 1])).unwrap()
            * residue_symbol(&x, &p(&[3, 1])).unwrap();
        assert_eq!(direct, by_parts);
        assert_eq!(direct, jacobi_symbol(&q, &x).unwrap());
        assert_eq!(direct, SymbolValue::ONE);
        assert_eq!(jacobi_symbol(&p(&[1, 1]), &p(&[1, 1, 0, 1])).unwrap().value().abs(), 1);
        assert_eq!(jacobi_symbol(&p(&[2, 2]), &p(&[1, 2, 1])).unwrap(), SymbolValue::ZERO);
        let d = p(&[1, 1, 0, 1]);
        let f = p(&[1, 0, 1]);
        assert_eq!(
            jacobi_symbol(&d, &f.mul(&f).unwrap()).unwrap(),
            SymbolValue::ONE
        );
        assert!(jacobi_symbol(&x, &PolyFq::zero(f5())).is_err());
        assert_eq!(jacobi_symbol(&x, &p(&[3])).unwrap(), SymbolValue::ONE);
    }

    #[test]
    fn multiplicativity_in_modulus() {
        let all = monics_upto(3);
        let fs: Vec<PolyFq> = monics_upto(2);
        for a in all.iter().filter(|a| a.deg() >= 1) {
            for b in all.iter().filter(|b| b.deg() >= 1) {
                let ab = a.mul(b).unwrap();
                for f in &fs {
                    assert_eq!(
                        jacobi_symbol(f, &ab).unwrap(),
                        jacobi_symbol(f, a).unwrap() * jacobi_symbol(f, b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn reciprocity_exhaustive_degree_3() {
        let all = monics_upto(3);
        for a in &all {
            for b in &all {
                if a.gcd(b).unwrap().deg() != 0 {
                    continue;
                }
                assert_eq!(
                    jacobi_symbol(a, b).unwrap(),
                    jacobi_symbol(b, a).unwrap(),
                    "{a:?} {b:?}"
                );
            }
        }
    }

    #[test]
    fn euclid_path_matches_definition() {
        let mods = monics_upto(3);
        let nums: Vec<PolyFq> = (0..625u64)
            .map(|k| {
                let digits: Vec<i64> = (0..4).map(|i| ((k / 5u64.pow(i)) % 5) as i64).collect();
                p(&digits)
            })
            .collect();
        for m in &mods {
            for a in &nums {
                assert_eq!(
                    jacobi_symbol(a, m).unwrap(),
                    jacobi_reciprocity(a, m).unwrap(),
                    "({a:?} / {m:?})"
                );
            }
        }
    }
}
