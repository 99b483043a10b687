use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{jacobi_euclid, residue_symbol_unchecked};
use crate::error::{Error, Result};
use crate::ffpoly::{is_irreducible, FieldParams, PolyFq};
use crate::sum::ComplexSum;

/// `exp(2 pi i k / q)` for `k = 0..q`.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    q: u32,
    table: Arc<Vec<Complex64>>,
}

impl RootsOfUnity {
    pub fn new(q: u32) -> Self {
        let table = (0..q)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / q as f64))
            .collect();
        Self {
            q,
            table: Arc::new(table),
        }
    }

    #[inline]
    pub fn get(&self, k: u32) -> Complex64 {
        self.table[(k % self.q) as usize]
    }

    /// `sum_k weights[k] e(k/q)`.
    pub fn combine(&self, weights: &[i64]) -> Complex64 {
        weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0)
            .map(|(k, &w)| self.table[k] * w as f64)
            .collect::<ComplexSum>()
            .value()
    }
}

/// Coefficient of `1/x` in the expansion of `num / den` at infinity.
fn inverse_x_coefficient(num: &PolyFq, den: &PolyFq) -> u32 {
    let field = den.field();
    let n = den.deg();
    if n == 0 {
        return 0;
    }
    let r = num.rem_unchecked(den);
    field.mul(r.coeff(n - 1), field.inv(den.leading()))
}

/// `e(num/den)`: the additive character at the `1/x` coefficient.
pub fn exp_of_fraction(num: &PolyFq, den: &PolyFq) -> Result<Complex64> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if num.field() != den.field() {
        return Err(Error::FieldMismatch(num.q(), den.q()));
    }
    let k = inverse_x_coefficient(num, den);
    Ok(Complex64::from_polar(
        1.0,
        2.0 * PI * k as f64 / num.q() as f64,
    ))
}

/// `u -> e(uV/f)` for a fixed `V` and `f`. The `1/x` coefficient is linear
/// in the coefficients of `u mod f`, so it is tabulated once as weights.
#[derive(Debug, Clone)]
pub struct ExpLinear {
    field: FieldParams,
    modulus: PolyFq,
    weights: Vec<u32>,
    roots: RootsOfUnity,
}

impl ExpLinear {
    pub fn new(v: &PolyFq, f: &PolyFq) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if v.field() != f.field() {
            return Err(Error::FieldMismatch(v.q(), f.q()));
        }
        let field = f.field();
        let n = f.deg();
        let mut weights = Vec::with_capacity(n);
        let mut xi_v = v.rem_unchecked(f);
        let x = PolyFq::x(field);
        for _ in 0..n {
            weights.push(inverse_x_coefficient(&xi_v, f));
            xi_v = xi_v.mul_unchecked(&x).rem_unchecked(f);
        }
        Ok(Self {
            field,
            modulus: f.clone(),
            weights,
            roots: RootsOfUnity::new(field.q()),
        })
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// The exponent `k` with `e(uV/f) = exp(2 pi i k / q)`.
    pub fn exponent(&self, u: &PolyFq) -> u32 {
        let r = u.rem_unchecked(&self.modulus);
        self.exponent_of_digits(r.coeffs())
    }

    fn exponent_of_digits(&self, digits: &[u32]) -> u32 {
        digits
            .iter()
            .zip(&self.weights)
            .fold(0, |acc, (&d, &w)| self.field.add(acc, self.field.mul(d, w)))
    }

    pub fn at(&self, u: &PolyFq) -> Complex64 {
        self.roots.get(self.exponent(u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussSumValue {
    pub value: Complex64,
}

impl GaussSumValue {
    pub fn real(x: f64) -> Self {
        Self {
            value: Complex64::new(x, 0.0),
        }
    }

    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

/// Gauss sums `G(V, chi_f)` for one monic modulus `f`, all sharing a table
/// of `chi_f(u) = (u/f)` over the residues `u mod f`.
///
/// Each sum is formed by bucketing the exact integer character values by
/// the exponent of `e(uV/f)`, so only `q` floating terms are combined.
#[derive(Debug, Clone)]
pub struct GaussSumEvaluator {
    field: FieldParams,
    modulus: PolyFq,
    chi: Vec<i8>,
    roots: RootsOfUnity,
}

impl GaussSumEvaluator {
    pub fn new(f: &PolyFq) -> Result<Self> {
        if !f.is_monic() {
            return Err(Error::NotMonic(f.to_string()));
        }
        if f.is_constant() {
            return Err(Error::InvalidArgument(
                "Gauss sum modulus must be nonconstant".into(),
            ));
        }
        let field = f.field();
        let n = f.deg();
        let size = field.power(n as u32)?;
        if size > 1 << 24 {
            return Err(Error::BudgetExceeded {
                count: size,
                budget: 1 << 24,
            });
        }
        let q = field.q() as u64;
        let chi = (0..size as u64)
            .map(|k| {
                let digits: Vec<u32> = (0..n)
                    .scan(k, |rest, _| {
                        let d = (*rest % q) as u32;
                        *rest /= q;
                        Some(d)
                    })
                    .collect();
                jacobi_euclid(&PolyFq::from_residues(field, digits), f)
            })
            .collect();
        Ok(Self {
            field,
            modulus: f.clone(),
            chi,
            roots: RootsOfUnity::new(field.q()),
        })
    }

    pub fn modulus(&self) -> &PolyFq {
        &self.modulus
    }

    /// Integer weights `w_k = sum_{u : e(uV/f) = e(k/q)} chi_f(u)`.
    pub fn buckets(&self, v: &PolyFq) -> Result<Vec<i64>> {
        let lin = ExpLinear::new(v, &self.modulus)?;
        let q = self.field.q() as usize;
        let n = self.modulus.deg();
        let mut buckets = vec![0i64; q];
        let mut digits = vec![0u32; n];
        for &c in &self.chi {
            if c != 0 {
                buckets[lin.exponent_of_digits(&digits) as usize] += c as i64;
            }
            for d in digits.iter_mut() {
                *d += 1;
                if *d < q as u32 {
                    break;
                }
                *d = 0;
            }
        }
        Ok(buckets)
    }

    pub fn eval(&self, v: &PolyFq) -> Result<GaussSumValue> {
        let buckets = self.buckets(v)?;
        Ok(GaussSumValue {
            value: self.roots.combine(&buckets),
        })
    }
}

/// `G(V, chi_f) = sum_{u mod f} chi_f(u) e(uV/f)` by direct summation.
pub fn gauss_sum_direct(v: &PolyFq, f: &PolyFq) -> Result<GaussSumValue> {
    if v.field() != f.field() {
        return Err(Error::FieldMismatch(v.q(), f.q()));
    }
    GaussSumEvaluator::new(f)?.eval(v)
}

/// Closed form of `G(V, chi_{P^j})` by the valuation of `V` at `P`.
pub fn gauss_sum_closed(v: &PolyFq, prime: &PolyFq, j: u32) -> Result<GaussSumValue> {
    if v.field() != prime.field() {
        return Err(Error::FieldMismatch(v.q(), prime.q()));
    }
    if !prime.is_monic() {
        return Err(Error::NotMonic(prime.to_string()));
    }
    if !is_irreducible(prime) {
        return Err(Error::NotIrreducible(prime.to_string()));
    }
    if j == 0 {
        return Err(Error::InvalidArgument("Gauss sum exponent j must be >= 1".into()));
    }
    let norm = prime.norm();
    let j64 = j as u64;
    let alpha = if v.is_zero() {
        u64::MAX
    } else {
        v.valuation(prime) as u64
    };
    let value = if j64 <= alpha {
        if j % 2 == 1 {
            0.0
        } else {
            norm.powi(j as i32) - norm.powi(j as i32 - 1)
        }
    } else if j64 == alpha + 1 {
        if j % 2 == 0 {
            -norm.powi(j as i32 - 1)
        } else {
            let mut v1 = v.clone();
            for _ in 0..alpha {
                v1 = v1.divmod_unchecked(prime).0;
            }
            let sym = residue_symbol_unchecked(&v1, prime).value() as f64;
            sym * norm.powf(j as f64 - 0.5)
        }
    } else {
        0.0
    };
    Ok(GaussSumValue::real(value))
}
