use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{family_genus, l_coefficients, zeros, LPolynomial, ZeroSet};
use crate::characters::jacobi_euclid;
use crate::error::{Error, Result};
use crate::ffpoly::{PolyFq, PrimeTable};
use crate::sum::NeumaierSum;

/// A real even trigonometric polynomial `h(theta) = sum_{|n| <= N} hhat(n) e(n theta)`,
/// stored by `hhat(0) .. hhat(N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("trigonometric polynomial needs hhat(0)".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Fourier coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// The support bound `N`.
    pub fn support(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `hhat(n)` for any integer `n` (zero outside the support).
    pub fn hat(&self, n: i64) -> f64 {
        self.coeffs
            .get(n.unsigned_abs() as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = NeumaierSum::new();
        s.add(self.coeffs[0]);
        for (n, &c) in self.coeffs.iter().enumerate().skip(1) {
            if c != 0.0 {
                s.add(2.0 * c * (2.0 * PI * n as f64 * theta).cos());
            }
        }
        s.value()
    }
}

pub(crate) fn b_from_prime_sums(sums: &[i64], nonzero: &[i64], n_max: usize) -> Vec<i128> {
    let mut b = vec![0i128; n_max + 1];
    for (m, bm) in b.iter_mut().enumerate().skip(1) {
        for e in (1..=m).filter(|e| m % e == 0) {
            let s = if (m / e) % 2 == 1 { sums[e] } else { nonzero[e] };
            *bm += e as i128 * s as i128;
        }
    }
    b
}

/// `lambda_n = sum_{f in M_n} Lambda(f) chi_D(f)` for `n <= n_max`, from the
/// symbols `chi_D(P)` of every prime of degree up to `n_max`.
pub fn lambda_sums_direct(d: &PolyFq, n_max: usize) -> Result<Vec<i128>> {
    if !d.is_monic() {
        return Err(Error::NotMonic(d.to_string()));
    }
    let table = PrimeTable::shared(d.field(), n_max.max(1))?;
    let mut sums = vec![0i64; n_max + 1];
    let mut nonzero = vec![0i64; n_max + 1];
    for (e, p) in table.iter().filter(|(e, _)| *e <= n_max) {
        let s = jacobi_euclid(d, p);
        sums[e] += s as i64;
        nonzero[e] += (s != 0) as i64;
    }
    Ok(b_from_prime_sums(&sums, &nonzero, n_max))
}

/// The same sums from the coefficients alone, by Newton's identities
/// `lambda_n = n c_n - sum_{m<n} lambda_m c_{n-m}` (with `c_n = 0` past `2g`).
pub fn lambda_sums_from_coefficients(l: &LPolynomial, n_max: usize) -> Result<Vec<i128>> {
    let c = |n: usize| l.c.get(n).copied().unwrap_or(0);
    let mut lam = vec![0i128; n_max + 1];
    for n in 1..=n_max {
        let mut acc = (n as i128)
            .checked_mul(c(n))
            .ok_or(Error::Overflow("prime power sums"))?;
        for m in 1..n {
            let t = lam[m]
                .checked_mul(c(n - m))
                .ok_or(Error::Overflow("prime power sums"))?;
            acc = acc.checked_sub(t).ok_or(Error::Overflow("prime power sums"))?;
        }
        lam[n] = acc;
    }
    Ok(lam)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSides {
    /// `sum_j h(theta_j)`.
    pub zero_side: f64,
    /// `2g hhat(0) - 2 sum_{n>=1} hhat(n) lambda_n q^{-n/2}`.
    pub prime_side: f64,
}

impl ExplicitSides {
    pub fn residual(&self) -> f64 {
        (self.zero_side - self.prime_side).abs()
    }
}

/// Zero sum and prime sum of the explicit formula, `lambdas` covering at
/// least the support of `h`.
pub fn explicit_formula_sides(
    l: &LPolynomial,
    zeros: &ZeroSet,
    h: &TrigPoly,
    lambdas: &[i128],
) -> Result<ExplicitSides> {
    let n_max = h.support();
    if lambdas.len() <= n_max {
        return Err(Error::InvalidArgument(format!(
            "prime sums cover degree {} but the support is {}",
            lambdas.len().saturating_sub(1),
            n_max
        )));
    }
    let zero_side: NeumaierSum = zeros.thetas.iter().map(|&t| h.eval(t)).collect();
    let q = l.q as f64;
    let mut prime_side = NeumaierSum::new();
    prime_side.add(2.0 * l.g as f64 * h.hat(0));
    for n in 1..=n_max {
        let c = h.hat(n as i64);
        if c != 0.0 {
            prime_side.add(-2.0 * c * lambdas[n] as f64 * q.powf(-(n as f64) / 2.0));
        }
    }
    Ok(ExplicitSides {
        zero_side: zero_side.value(),
        prime_side: prime_side.value(),
    })
}

/// `|sum_j h(theta_{D,j}) - 2g hhat(0) + 2 sum_f hhat(d(f)) Lambda(f) chi_D(f) / sqrt|f||`.
pub fn explicit_formula_residual(d: &PolyFq, h: &TrigPoly) -> Result<f64> {
    family_genus(d)?;
    let l = l_coefficients(d)?;
    let z = zeros(&l)?;
    let lambdas = lambda_sums_direct(d, h.support())?;
    Ok(explicit_formula_sides(&l, &z, h, &lambdas)?.residual())
}
