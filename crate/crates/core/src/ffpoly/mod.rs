//! Exact arithmetic in `F_q[x]` for a prime `q = 1 (mod 4)`.
//!
//! Polynomials store their coefficients in ascending order, reduced into
//! `[0, q)`, with trailing zeros trimmed. The zero polynomial has no
//! coefficients.

mod arith;
mod enumerate;
mod factor;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use arith::{arith_functions, integer_mobius, ArithValues};
pub use enumerate::{enumerate_monic, family_size, MonicIter};
pub use factor::{factor, is_irreducible, prime_count, prime_count_f64, Factorization, PrimeTable};

/// The prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    q: u32,
}

impl FieldParams {
    pub fn new(q: u64) -> Result<Self> {
        if q < 5 || q % 4 != 1 || q > u32::MAX as u64 || !is_prime(q) {
            return Err(Error::InvalidModulus(q));
        }
        Ok(Self { q: q as u32 })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a % self.q != 0);
        self.pow(a, self.q as u64 - 2)
    }

    /// Legendre symbol of a residue: 0, +1 or -1.
    pub fn legendre(&self, a: u32) -> i8 {
        let a = a % self.q;
        if a == 0 {
            return 0;
        }
        if self.pow(a, (self.q as u64 - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// `q^n` as an exact integer.
    pub fn power(&self, n: u32) -> Result<u128> {
        (self.q as u128)
            .checked_pow(n)
            .ok_or(Error::Overflow("q^n"))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A polynomial over `F_q`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyFq {
    field: FieldParams,
    coeffs: Vec<u32>,
}

impl PolyFq {
    /// Builds a polynomial from ascending coefficients, reducing them mod `q`.
    pub fn new(field: FieldParams, coeffs: &[i64]) -> Self {
        let coeffs = coeffs.iter().map(|&c| field.reduce(c)).collect();
        Self::from_residues(field, coeffs)
    }

    /// Builds a polynomial from residues already in `[0, q)`.
    pub fn from_residues(field: FieldParams, coeffs: Vec<u32>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < field.q));
        let mut p = Self { field, coeffs };
        p.trim();
        p
    }

    pub fn zero(field: FieldParams) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: FieldParams) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: FieldParams, c: u32) -> Self {
        Self::from_residues(field, vec![c % field.q])
    }

    /// The monomial `x`.
    pub fn x(field: FieldParams) -> Self {
        Self::from_residues(field, vec![0, 1])
    }

    /// `c x^n`.
    pub fn monomial(field: FieldParams, c: u32, n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[n] = c % field.q;
        Self::from_residues(field, coeffs)
    }

    /// The monic polynomial of degree `n` with canonical index `index`: the
    /// base-`q` digits of `index` give the coefficients of `x^0 .. x^{n-1}`.
    pub fn monic_from_index(field: FieldParams, n: usize, mut index: u64) -> Self {
        let q = field.q as u64;
        let mut coeffs = Vec::with_capacity(n + 1);
        for _ in 0..n {
            coeffs.push((index % q) as u32);
            index /= q;
        }
        coeffs.push(1);
        Self { field, coeffs }
    }

    /// Inverse of [`PolyFq::monic_from_index`]; `None` for non-monic input.
    pub fn monic_index(&self) -> Option<u64> {
        if !self.is_monic() {
            return None;
        }
        let q = self.field.q as u64;
        let n = self.coeffs.len() - 1;
        Some(
            self.coeffs[..n]
                .iter()
                .rev()
                .fold(0u64, |acc, &c| acc * q + c as u64),
        )
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    #[inline]
    pub fn field(&self) -> FieldParams {
        self.field
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.q
    }

    #[inline]
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    #[inline]
    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Degree, or `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; for callers that have
    /// already excluded zero.
    #[inline]
    pub(crate) fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    #[inline]
    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// The norm `|f| = q^{d(f)}` as a float.
    pub fn norm(&self) -> f64 {
        (self.field.q as f64).powi(self.deg() as i32)
    }

    /// Value at a point of `F_q`.
    pub fn eval(&self, a: u32) -> u32 {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, a), c))
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            Err(Error::FieldMismatch(self.field.q, other.field.q))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Self::from_residues(f, coeffs)
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Self::from_residues(f, coeffs)
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let q = self.field.q as u64;
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % q;
            }
        }
        Self::from_residues(self.field, acc.into_iter().map(|c| c as u32).collect())
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        Self::from_residues(f, self.coeffs.iter().map(|&c| f.sub(0, c)).collect())
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        Self::from_residues(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// The monic associate of a nonzero polynomial, with the removed unit.
    pub fn make_monic(&self) -> (u32, Self) {
        let lc = self.leading();
        if lc == 0 || lc == 1 {
            return (lc.max(1), self.clone());
        }
        (lc, self.scale(self.field.inv(lc)))
    }

    /// Quotient and remainder.
    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check_field(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.divmod_unchecked(divisor))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        self.divmod(divisor).map(|(_, r)| r)
    }

    pub(crate) fn divmod_unchecked(&self, divisor: &Self) -> (Self, Self) {
        let f = self.field;
        let dd = divisor.deg();
        if self.coeffs.len() <= dd {
            return (Self::zero(f), self.clone());
        }
        let inv_lc = f.inv(divisor.leading());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = f.mul(rem[i + dd], inv_lc);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = f.sub(rem[i + j], f.mul(c, b));
            }
        }
        rem.truncate(dd);
        (Self::from_residues(f, quot), Self::from_residues(f, rem))
    }

    pub(crate) fn rem_unchecked(&self, divisor: &Self) -> Self {
        self.divmod_unchecked(divisor).1
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.gcd_unchecked(other))
    }

    pub(crate) fn gcd_unchecked(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem_unchecked(&b);
            a = b;
            b = r;
        }
        a.make_monic().1
    }

    /// Formal derivative `d/dx`.
    pub fn derivative(&self) -> Self {
        let f = self.field;
        if self.coeffs.len() <= 1 {
            return Self::zero(f);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| f.mul(c, ((i + 1) as u64 % f.q as u64) as u32))
            .collect();
        Self::from_residues(f, coeffs)
    }

    /// `self^exp mod modulus`.
    pub fn powmod(&self, exp: u128, modulus: &Self) -> Result<Self> {
        self.check_field(modulus)?;
        if modulus.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.powmod_unchecked(exp, modulus))
    }

    pub(crate) fn powmod_unchecked(&self, mut exp: u128, modulus: &Self) -> Self {
        let mut base = self.rem_unchecked(modulus);
        let mut acc = Self::one(self.field).rem_unchecked(modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&base).rem_unchecked(modulus);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_unchecked(&base).rem_unchecked(modulus);
            }
        }
        acc
    }

    /// Square-freeness via `gcd(f, f') = 1`; a nonconstant `f` with `f' = 0`
    /// is a `p`-th power and therefore not square-free.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.is_squarefree_unchecked())
    }

    pub(crate) fn is_squarefree_unchecked(&self) -> bool {
        if self.deg() == 0 {
            return true;
        }
        let d = self.derivative();
        if d.is_zero() {
            return false;
        }
        self.gcd_unchecked(&d).deg() == 0
    }

    /// Multiplicity of `p` in `self` (`usize::MAX` when `self` is zero).
    pub(crate) fn valuation(&self, p: &Self) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let mut v = 0;
        let mut cur = self.clone();
        loop {
            let (quot, r) = cur.divmod_unchecked(p);
            if !r.is_zero() {
                return v;
            }
            v += 1;
            cur = quot;
        }
    }

    /// Parses either an ascending coefficient list `"c0,c1,...,cn"` or a
    /// symbolic expression such as `"x^3+2*x+1"`.
    pub fn parse(field: FieldParams, s: &str) -> Result<Self> {
        parse::parse_poly(field, s)
    }

    /// Symbolic rendering, e.g. `x^3 + 2*x + 1`.
    pub fn to_symbolic(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".into(),
                (1, c) => format!("{c}*x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}*x^{i}"),
            };
            terms.push(t);
        }
        terms.join(" + ")
    }
}

/// Canonical emission: the ascending coefficient list.
impl fmt::Display for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyFq[q={}]({})", self.field.q, self.to_symbolic())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldParams {
        FieldParams::new(5).unwrap()
    }

    fn p(c: &[i64]) -> PolyFq {
        PolyFq::new(f5(), c)
    }

    #[test]
    fn field_params_validation() {
        assert!(FieldParams::new(5).is_ok());
        assert!(FieldParams::new(13).is_ok());
        assert!(FieldParams::new(3).is_err());
        assert!(FieldParams::new(7).is_err());
        assert!(FieldParams::new(9).is_err());
        assert!(FieldParams::new(1).is_err());
    }

    #[test]
    fn gcd_of_split_quadratic() {
        // x^2 + 1 = (x + 2)(x + 3) over F_5
        let a = p(&[1, 0, 1]);
        let b = p(&[2, 1]);
        assert_eq!(p(&[2, 1]).mul(&p(&[3, 1])).unwrap(), a);
        assert_eq!(a.gcd(&b).unwrap(), b);
    }

    #[test]
    fn derivative_vanishes_in_characteristic_p() {
        assert!(p(&[0, 0, 0, 0, 0, 1]).derivative().is_zero());
        assert_eq!(p(&[1, 2, 3]).derivative(), p(&[2, 6]));
    }

    #[test]
    fn powmod_x_squared() {
        let r = PolyFq::x(f5()).powmod(2, &p(&[1, 0, 1])).unwrap();
        assert_eq!(r, PolyFq::constant(f5(), 4));
    }

    #[test]
    fn divmod_reconstructs() {
        let a = p(&[3, 1, 4, 1, 2, 1]);
        let b = p(&[2, 0, 3]);
        let (quot, r) = a.divmod(&b).unwrap();
        assert!(r.deg() < b.deg());
        assert_eq!(quot.mul(&b).unwrap().add(&r).unwrap(), a);
    }

    #[test]
    fn division_by_zero_and_mixed_fields() {
        let a = p(&[1, 1]);
        assert!(matches!(
            a.divmod(&PolyFq::zero(f5())),
            Err(Error::DivisionByZero)
        ));
        let b = PolyFq::new(FieldParams::new(13).unwrap(), &[1, 1]);
        assert!(matches!(a.add(&b), Err(Error::FieldMismatch(5, 13))));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn squarefree_cases() {
        assert!(p(&[1, 0, 1]).is_squarefree().unwrap());
        assert!(!p(&[1, 2, 1]).is_squarefree().unwrap());
        // x^5 + 1 = (x + 1)^5
        assert!(!p(&[1, 0, 0, 0, 0, 1]).is_squarefree().unwrap());
        assert!(PolyFq::zero(f5()).is_squarefree().is_err());
    }

    #[test]
    fn monic_index_encoding() {
        let f = PolyFq::monic_from_index(f5(), 3, 7);
        assert_eq!(f, p(&[2, 1, 0, 1]));
        assert_eq!(f.monic_index(), Some(7));
        assert_eq!(PolyFq::monic_from_index(f5(), 0, 0), PolyFq::one(f5()));
    }

    #[test]
    fn display_is_ascending_list() {
        assert_eq!(p(&[2, 1, 0, 1]).to_string(), "2,1,0,1");
        assert_eq!(p(&[2, 1, 0, 1]).to_symbolic(), "x^3 + x + 2");
    }
}
