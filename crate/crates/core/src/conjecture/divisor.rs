use num_complex::Complex64;

use super::shifts::{format_complex, ShiftSet};
use crate::error::{Error, Result};
use crate::ffpoly::{enumerate_monic, factor, PolyFq};

/// `q^{-z}` for complex `z`.
#[inline]
pub fn q_pow_neg(q: f64, z: Complex64) -> Complex64 {
    (-z * q.ln()).exp()
}

/// `zeta_q(s) = 1 / (1 - q^{1-s})`.
pub fn zeta_q(q: f64, s: Complex64) -> Result<Complex64> {
    let denom = Complex64::new(1.0, 0.0) - q_pow_neg(q, s - 1.0);
    if denom.norm() < 1e-14 {
        return Err(Error::Pole(format_complex(s)));
    }
    Ok(denom.inv())
}

/// `Z(u) = 1 / (1 - q u)`.
pub fn zeta_u(q: f64, u: Complex64) -> Result<Complex64> {
    let denom = Complex64::new(1.0, 0.0) - u * q;
    if denom.norm() < 1e-14 {
        return Err(Error::Pole(format!("u = {}", format_complex(u))));
    }
    Ok(denom.inv())
}

/// Complete homogeneous symmetric polynomials `h_0 .. h_n` of `xs`, the
/// coefficients of `prod_i (1 - x_i t)^{-1}`.
pub fn complete_homogeneous(xs: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); n + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for &x in xs {
        for j in 1..=n {
            let prev = h[j - 1];
            h[j] += x * prev;
        }
    }
    h
}

/// Coefficients of `prod_i (1 - x_i t)` up to `t^n`.
pub fn signed_elementary(xs: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for &x in xs {
        for j in (1..=n).rev() {
            let prev = e[j - 1];
            e[j] -= x * prev;
        }
    }
    e
}

/// `(tau_C(P^j), mu_C(P^j))` for a prime of degree `d`: the `x^j`
/// coefficients of `prod_i (1 - x q^{-d gamma_i})^{-1}` and
/// `prod_i (1 - x q^{-d gamma_i})`.
pub fn tau_mu_prime_power(
    shifts: &ShiftSet,
    q: f64,
    d: usize,
    j: usize,
) -> (Complex64, Complex64) {
    let xs = prime_shift_powers(shifts, q, d);
    (
        complete_homogeneous(&xs, j)[j],
        signed_elementary(&xs, j)[j],
    )
}

pub(crate) fn prime_shift_powers(shifts: &ShiftSet, q: f64, d: usize) -> Vec<Complex64> {
    shifts
        .shifts()
        .iter()
        .map(|&g| q_pow_neg(q, g * d as f64))
        .collect()
}

/// `tau_C(f)`, multiplicatively from the factorization of `f`.
pub fn tau_general(shifts: &ShiftSet, f: &PolyFq) -> Result<Complex64> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_string()));
    }
    if f.is_constant() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let q = f.q() as f64;
    let mut acc = Complex64::new(1.0, 0.0);
    for (p, e) in factor(f)?.factors {
        acc *= tau_mu_prime_power(shifts, q, p.deg(), e as usize).0;
    }
    Ok(acc)
}

/// `tau_C(f)` by summing over every ordered factorization `f = f_1 ... f_k`.
pub fn tau_brute_force(shifts: &ShiftSet, f: &PolyFq) -> Result<Complex64> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_string()));
    }
    if shifts.is_empty() {
        return Ok(if f.is_constant() {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    Ok(tau_rec(shifts.shifts(), f))
}

fn tau_rec(shifts: &[Complex64], f: &PolyFq) -> Complex64 {
    let q = f.q() as f64;
    let (&gamma, rest) = shifts.split_first().expect("nonempty");
    if rest.is_empty() {
        return q_pow_neg(q, gamma * f.deg() as f64);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 0..=f.deg() {
        for f1 in enumerate_monic(f.field(), d) {
            let (quot, r) = f.divmod_unchecked(&f1);
            if r.is_zero() {
                acc += q_pow_neg(q, gamma * d as f64) * tau_rec(rest, &quot);
            }
        }
    }
    acc
}
