//! Exact L-polynomials `L(u, chi_D)` for `D` in `H_{2g+1}`, their shifted
//! values, zeros and the exact identities they satisfy.

mod explicit;
mod symbols;
mod zeros;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{jacobi_euclid, SymbolValue};
use crate::conjecture::{q_pow_neg, tau_general, ShiftSet};
use crate::error::{Error, Result};
use crate::ffpoly::{enumerate_monic, FieldParams, PolyFq};
use crate::sum::ComplexSum;

pub use explicit::{
    explicit_formula_residual, explicit_formula_sides, lambda_sums_direct,
    lambda_sums_from_coefficients, ExplicitSides, TrigPoly,
};
pub use symbols::PrimeSymbolTables;
pub use zeros::{zeros, ZeroSet};

/// How the coefficients `c_0 .. c_{2g}` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientMode {
    /// Newton recursion from prime symbols for `n <= g`, the rest from the
    /// functional equation.
    Recursion,
    /// `c_n = sum_{f in M_n} chi_D(f)` for every `n <= 2g`.
    Direct,
}

/// `L(u, chi_D) = sum_{n <= 2g} c_n u^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolynomial {
    pub q: u32,
    pub g: usize,
    pub c: Vec<i128>,
    pub source: PolyFq,
}

/// Checks `D` is monic, square-free and of odd degree `2g + 1 >= 3`, and
/// returns `g`.
pub fn family_genus(d: &PolyFq) -> Result<usize> {
    let deg = d.degree().unwrap_or(0);
    if !d.is_monic() || deg < 3 || deg % 2 == 0 || !d.is_squarefree_unchecked() {
        return Err(Error::NotInFamily {
            poly: d.to_string(),
            degree: deg,
        });
    }
    Ok((deg - 1) / 2)
}

fn checked_pow(q: u32, e: usize) -> Result<i128> {
    (0..e).try_fold(1i128, |acc, _| {
        acc.checked_mul(q as i128)
            .ok_or(Error::Overflow("power of q"))
    })
}

impl LPolynomial {
    /// Builds the polynomial from per-degree prime sums
    /// `sums[e] = sum_{d(P)=e} chi_D(P)`, `nonzero[e] = #{P : chi_D(P) != 0}`
    /// for `e <= g`, via `n c_n = sum_{m<=n} b_m c_{n-m}` with
    /// `b_m = sum_{e | m} e sum_{d(P)=e} chi_D(P)^{m/e}`.
    pub fn from_prime_sums(
        field: FieldParams,
        g: usize,
        sums: &[i64],
        nonzero: &[i64],
        source: PolyFq,
    ) -> Result<Self> {
        let q = field.q();
        let b = explicit::b_from_prime_sums(sums, nonzero, g);
        let mut c = vec![0i128; 2 * g + 1];
        c[0] = 1;
        for n in 1..=g {
            let mut acc = 0i128;
            for m in 1..=n {
                let t = b[m]
                    .checked_mul(c[n - m])
                    .ok_or(Error::Overflow("L-polynomial coefficient"))?;
                acc = acc
                    .checked_add(t)
                    .ok_or(Error::Overflow("L-polynomial coefficient"))?;
            }
            debug_assert_eq!(acc % n as i128, 0);
            c[n] = acc / n as i128;
        }
        for n in 0..g {
            c[2 * g - n] = checked_pow(q, g - n)?
                .checked_mul(c[n])
                .ok_or(Error::Overflow("L-polynomial coefficient"))?;
        }
        Ok(Self { q, g, c, source })
    }

    /// The degree `2g` of the polynomial.
    pub fn degree(&self) -> usize {
        2 * self.g
    }

    /// Horner evaluation at a complex `u`.
    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.c
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &cn| acc * u + cn as f64)
    }

    /// Horner evaluation at a real `u`.
    pub fn eval_real(&self, u: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &cn| acc * u + cn as f64)
    }

    pub fn csv_header(g: usize) -> Vec<String> {
        let mut h = vec!["q".to_string(), "g".to_string()];
        h.extend((0..=2 * g + 1).map(|i| format!("d_{i}")));
        h.extend((0..=2 * g).map(|i| format!("c_{i}")));
        h
    }

    /// `q, g, D coefficients (ascending, padded to 2g+2), c_0 .. c_{2g}`.
    pub fn csv_record(&self) -> Vec<String> {
        let mut r = vec![self.q.to_string(), self.g.to_string()];
        r.extend((0..=2 * self.g + 1).map(|i| self.source.coeff(i).to_string()));
        r.extend(self.c.iter().map(|c| c.to_string()));
        r
    }
}

/// `chi_D(P)` for every monic irreducible `P` with `d(P) <= max_d`.
pub fn chi_on_primes(d: &PolyFq, max_d: usize) -> Result<Vec<(PolyFq, SymbolValue)>> {
    if d.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !d.is_monic() {
        return Err(Error::NotMonic(d.to_string()));
    }
    if !d.is_squarefree_unchecked() {
        return Err(Error::NotSquarefree(d.to_string()));
    }
    let tables = PrimeSymbolTables::shared(d.field(), max_d, d.coeffs().len())?;
    let symbols = tables.symbols(d)?;
    Ok(tables
        .primes()
        .cloned()
        .zip(symbols.into_iter().map(SymbolValue::new))
        .collect())
}

/// The L-polynomial of `D` by the prime recursion.
pub fn l_coefficients(d: &PolyFq) -> Result<LPolynomial> {
    l_coefficients_with(d, CoefficientMode::Recursion)
}

pub fn l_coefficients_with(d: &PolyFq, mode: CoefficientMode) -> Result<LPolynomial> {
    let g = family_genus(d)?;
    let field = d.field();
    match mode {
        CoefficientMode::Recursion => {
            let tables = PrimeSymbolTables::shared(field, g, 2 * g + 2)?;
            let mut sums = vec![0i64; g + 1];
            let mut nonzero = vec![0i64; g + 1];
            tables.degree_sums(d, &mut sums, &mut nonzero)?;
            LPolynomial::from_prime_sums(field, g, &sums, &nonzero, d.clone())
        }
        CoefficientMode::Direct => {
            let c = (0..=2 * g)
                .map(|n| {
                    enumerate_monic(field, n)
                        .map(|f| jacobi_euclid(d, &f) as i128)
                        .sum()
                })
                .collect();
            Ok(LPolynomial {
                q: field.q(),
                g,
                c,
                source: d.clone(),
            })
        }
    }
}

/// `max_{n <= g} |c_{2g-n} - q^{g-n} c_n|`.
pub fn verify_functional_equation(l: &LPolynomial) -> Result<u128> {
    let g = l.g;
    if l.c.len() != 2 * g + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} coefficients, found {}",
            2 * g + 1,
            l.c.len()
        )));
    }
    let mut worst = 0u128;
    for n in 0..=g {
        let scaled = checked_pow(l.q, g - n)?
            .checked_mul(l.c[n])
            .ok_or(Error::Overflow("functional equation check"))?;
        let r = l.c[2 * g - n]
            .checked_sub(scaled)
            .ok_or(Error::Overflow("functional equation check"))?;
        worst = worst.max(r.unsigned_abs());
    }
    Ok(worst)
}

/// `L(1/2 + alpha + i t, chi_D)`, i.e. the polynomial at
/// `u = q^{-1/2 - alpha - i t}`.
pub fn evaluate_shifted(l: &LPolynomial, alpha: Complex64, t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t) + alpha;
    if s.im == 0.0 {
        let u = (l.q as f64).powf(-s.re);
        return Complex64::new(l.eval_real(u), 0.0);
    }
    l.eval(q_pow_neg(l.q as f64, s))
}

/// The two-sum expansion of `prod_j L(1/2 + alpha_j, chi_D)`, summed by
/// enumerating `f in M_{<= kg}` with `tau_A` and `tau_{A^-}` weights.
pub fn approx_fe_product(d: &PolyFq, shifts: &ShiftSet) -> Result<Complex64> {
    let g = family_genus(d)?;
    let k = shifts.len();
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one shift".into()));
    }
    let field = d.field();
    let q = field.q() as f64;
    let neg = shifts.negated();
    let mut first = ComplexSum::new();
    let mut second = ComplexSum::new();
    for n in 0..=k * g {
        let scale = q.powf(-(n as f64) / 2.0);
        for f in enumerate_monic(field, n) {
            let chi = jacobi_euclid(d, &f);
            if chi == 0 {
                continue;
            }
            let w = chi as f64 * scale;
            first.add(tau_general(shifts, &f)? * w);
            if n + 1 <= k * g {
                second.add(tau_general(&neg, &f)? * w);
            }
        }
    }
    let reflect = q_pow_neg(q, shifts.total() * (2 * g) as f64);
    Ok(first.value() + reflect * second.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f5() -> FieldParams {
        FieldParams::new(5).unwrap()
    }

    pub(crate) fn random_family_member(rng: &mut ChaCha8Rng, field: FieldParams, g: usize) -> PolyFq {
        let n = 2 * g + 1;
        let top = field.power(n as u32).unwrap() as u64;
        loop {
            let d = PolyFq::monic_from_index(field, n, rng.gen_range(0..top));
            if d.is_squarefree_unchecked() {
                return d;
            }
        }
    }

    #[test]
    fn basic_coefficients() {
        let d = PolyFq::new(f5(), &[1, 1, 0, 1]); // x^3 + x + 1
        let l = l_coefficients(&d).unwrap();
        assert_eq!(l.c[0], 1);
        assert_eq!(l.c[2], 5);
        assert_eq!(verify_functional_equation(&l).unwrap(), 0);
        // c_1 = sum over a of legendre(D(a))
        let c1: i128 = (0..5u32)
            .map(|a| f5().legendre(d.eval(a)) as i128)
            .sum();
        assert_eq!(l.c[1], c1);
        assert!(l_coefficients(&PolyFq::new(f5(), &[1, 2, 1])).is_err());
        assert!(l_coefficients(&PolyFq::new(f5(), &[0, 0, 0, 1])).is_err());
    }

    #[test]
    fn recursion_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in 1..=3 {
            for _ in 0..10 {
                let d = random_family_member(&mut rng, f5(), g);
                let a = l_coefficients_with(&d, CoefficientMode::Recursion).unwrap();
                let b = l_coefficients_with(&d, CoefficientMode::Direct).unwrap();
                assert_eq!(a, b, "{d:?}");
                assert_eq!(verify_functional_equation(&b).unwrap(), 0);
            }
        }
    }

    #[test]
    fn perturbed_sequence_is_detected() {
        let d = PolyFq::new(f5(), &[2, 0, 1, 0, 3, 1]);
        let mut l = l_coefficients(&d).unwrap();
        l.c[1] += 1;
        assert!(verify_functional_equation(&l).unwrap() > 0);
    }

    #[test]
    fn chi_on_primes_values() {
        let d = PolyFq::new(f5(), &[0, 1, 0, 0, 0, 1]); // x^5 + x, divisible by x
        let syms = chi_on_primes(&d, 3).unwrap();
        let (p0, s0) = &syms[0];
        assert_eq!(p0, &PolyFq::x(f5()));
        assert_eq!(*s0, SymbolValue::ZERO);
        for (p, s) in &syms {
            assert_eq!(crate::characters::jacobi_symbol(&d, p).unwrap(), *s);
        }
        let d = PolyFq::new(f5(), &[2, 1, 0, 0, 0, 1]);
        let syms = chi_on_primes(&d, 1).unwrap();
        assert_eq!(syms[0].1.value(), f5().legendre(2));
        assert!(chi_on_primes(&PolyFq::new(f5(), &[1, 2, 1]), 2).is_err());
    }

    #[test]
    fn shifted_values() {
        let d = PolyFq::new(f5(), &[1, 3, 0, 2, 0, 1]);
        let l = l_coefficients(&d).unwrap();
        let big = evaluate_shifted(&l, Complex64::new(40.0, 0.0), 0.0);
        assert!((big - 1.0).norm() < 1e-12);
        let centre = evaluate_shifted(&l, Complex64::new(0.0, 0.0), 0.0);
        assert_eq!(centre.im, 0.0);
        let via_complex = l.eval(Complex64::new(5f64.powf(-0.5), 0.0));
        assert!((centre - via_complex).norm() < 1e-12);
    }

    #[test]
    fn approx_fe_matches_horner() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_family_member(&mut rng, f5(), 2);
        let l = l_coefficients(&d).unwrap();
        for shifts in [
            ShiftSet::real(&[0.0]),
            ShiftSet::real(&[0.1, 0.1]),
            ShiftSet::new(vec![Complex64::new(-0.15, 0.3), Complex64::new(0.05, -1.0)]),
        ] {
            let fe = approx_fe_product(&d, &shifts).unwrap();
            let horner: Complex64 = shifts
                .shifts()
                .iter()
                .map(|&a| evaluate_shifted(&l, a, 0.0))
                .product();
            assert!((fe - horner).norm() <= 1e-9 * horner.norm().max(1e-300), "{shifts}");
        }
        let fe = approx_fe_product(&d, &ShiftSet::real(&[30.0])).unwrap();
        assert!((fe - 1.0).norm() < 1e-9);
    }

    #[test]
    fn csv_row_layout() {
        let d = PolyFq::new(f5(), &[1, 1, 0, 1]);
        let l = l_coefficients(&d).unwrap();
        let rec = l.csv_record();
        assert_eq!(rec.len(), LPolynomial::csv_header(1).len());
        assert_eq!(&rec[..6], &["5", "1", "1", "1", "0", "1"]);
    }
}
