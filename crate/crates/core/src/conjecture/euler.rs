use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::divisor::{q_pow_neg, zeta_q};
use super::shifts::{format_complex, ShiftSet, TwistPoly};
use crate::error::{Error, Result};
use crate::ffpoly::{prime_count_f64, FieldParams};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const MAX_PRIME_DEGREE_CAP: usize = 200;

/// Shifts closer than this to a pole of `zeta_q` are rejected.
const CONFLUENCE: f64 = 1e-6;
/// Relative size below which inner prime-power series are cut.
const SERIES_EPS: f64 = 1e-18;

/// How deep to take an Euler product over prime degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Smallest depth whose tail estimate is below this absolute tolerance.
    Tolerance(f64),
    /// Fixed maximal prime degree.
    Degree(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Tolerance(DEFAULT_TOLERANCE)
    }
}

impl Truncation {
    fn scaled(self, factor: f64) -> Self {
        match self {
            Truncation::Tolerance(t) if factor > 0.0 && factor.is_finite() => {
                Truncation::Tolerance(t / factor)
            }
            other => other,
        }
    }
}

/// Depth actually used and an absolute bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerTruncation {
    pub max_prime_degree: usize,
    pub tail_estimate: f64,
}

impl EulerTruncation {
    fn exact() -> Self {
        Self {
            max_prime_degree: 0,
            tail_estimate: 0.0,
        }
    }

    fn absorb(&mut self, other: EulerTruncation, weight: f64) {
        self.max_prime_degree = self.max_prime_degree.max(other.max_prime_degree);
        self.tail_estimate += weight * other.tail_estimate;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerValue {
    pub value: Complex64,
    pub truncation: EulerTruncation,
}

/// `ln(1 - z) + z`, accurate for small `z`.
fn log1m_plus(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r < 0.25 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pw = z;
        let mut n = 1;
        loop {
            pw *= z;
            n += 1;
            let term = pw / n as f64;
            acc -= term;
            if term.norm() <= 1e-18 * r * r {
                break;
            }
        }
        acc
    } else {
        (Complex64::new(1.0, 0.0) - z).ln() + z
    }
}

/// `ln(1 + z) - z`.
fn log1p_minus(z: Complex64) -> Complex64 {
    log1m_plus(-z)
}

/// Number of terms after which `sum_n binom(n+k-1, k-1) rho^n` has a tail
/// below `SERIES_EPS` relative to `floor`.
fn series_len(k: usize, rho: f64, floor: f64, what: &str) -> Result<usize> {
    if k == 0 {
        return Ok(0);
    }
    if !(rho < 1.0) {
        return Err(Error::Divergent(format!(
            "{what}: prime-power series ratio {rho:.4} >= 1"
        )));
    }
    let target = SERIES_EPS * floor.max(1e-300);
    let mut binom = 1.0f64;
    let mut pw = 1.0f64;
    for n in 0..200_000usize {
        if n > 0 {
            binom *= (n + k - 1) as f64 / n as f64;
            pw *= rho;
        }
        if binom * pw / (1.0 - rho) < target {
            return Ok(n);
        }
    }
    Err(Error::Divergent(format!(
        "{what}: prime-power series did not settle (ratio {rho:.6})"
    )))
}

/// Coefficients `a_n = g_n t^n` of `prod_i (1 - b_i t) / prod_i (1 - c_i t)`
/// for `n <= n_max`, given the already scaled `c_i t` and `b_i t`.
fn ratio_series(ct: &[Complex64], bt: &[Complex64], n_max: usize) -> Vec<Complex64> {
    let mut a = vec![Complex64::new(0.0, 0.0); n_max + 1];
    a[0] = Complex64::new(1.0, 0.0);
    for &b in bt {
        for n in (1..=n_max).rev() {
            let prev = a[n - 1];
            a[n] -= b * prev;
        }
    }
    for &c in ct {
        for n in 1..=n_max {
            let prev = a[n - 1];
            a[n] += c * prev;
        }
    }
    a
}

/// Geometric decay rate of `pi_q(d) |ln F_d|` and the constant in front.
struct Rate {
    r: f64,
    k_const: f64,
}

impl Rate {
    /// `Lambda = kappa |u| / sqrt(q)` with `kappa = max q^{-Re shift}`; the
    /// degree-`d` log factor is `O(Lambda^{4d} + Lambda^{2d} q^{-d})`.
    fn new(q: f64, gammas: &[Complex64], betas: &[Complex64], u_abs: f64) -> Self {
        let kappa = gammas
            .iter()
            .chain(betas)
            .map(|z| q.powf(-z.re))
            .fold(1e-300f64, f64::max);
        let lam2 = (kappa * u_abs).powi(2) / q;
        let k = gammas.len().max(betas.len()) as f64;
        Self {
            r: (q * lam2 * lam2).max(lam2),
            k_const: 32.0 * (k + 1.0).powi(4),
        }
    }

    fn tail(&self, d: usize) -> f64 {
        self.k_const * self.r.powi(d as i32 + 1) / (1.0 - self.r)
    }
}

/// `prod_{d >= 1} F_d^{pi_q(d)}` from the logs of the degree factors.
fn degree_product(
    q: f64,
    rate: Rate,
    policy: Truncation,
    what: &str,
    mut log_factor: impl FnMut(usize) -> Result<Complex64>,
) -> Result<EulerValue> {
    if !(rate.r < 1.0) {
        return Err(Error::Divergent(format!(
            "{what}: degree factors decay at rate {:.4} >= 1",
            rate.r
        )));
    }
    let (tol, fixed) = match policy {
        Truncation::Tolerance(t) => {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument(format!("tolerance {t} must be positive")));
            }
            (t, None)
        }
        Truncation::Degree(d) => {
            if d == 0 || d > MAX_PRIME_DEGREE_CAP {
                return Err(Error::InvalidArgument(format!(
                    "prime degree cutoff {d} outside 1..={MAX_PRIME_DEGREE_CAP}"
                )));
            }
            (0.0, Some(d))
        }
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 1..=MAX_PRIME_DEGREE_CAP {
        let lf = log_factor(d)?;
        if lf != Complex64::new(0.0, 0.0) {
            acc += prime_count_f64(q, d) * lf;
        }
        if !acc.is_finite() {
            return Err(Error::Divergent(format!("{what}: non-finite log at degree {d}")));
        }
        let value = acc.exp();
        let tail = value.norm() * rate.tail(d).exp_m1();
        let done = match fixed {
            Some(max) => d == max,
            None => tail < tol,
        };
        if done {
            return Ok(EulerValue {
                value,
                truncation: EulerTruncation {
                    max_prime_degree: d,
                    tail_estimate: tail,
                },
            });
        }
    }
    Err(Error::TruncationUnreachable {
        tol,
        cap: MAX_PRIME_DEGREE_CAP,
    })
}

/// `ln` of the degree-`d` factor of
/// `prod_{i<=j} (1 - c_i c_j t^2) prod_{i<j} (1 - b_i b_j t^2) prod_{i,j} (1 - b_i c_j t^2)^{-1}
///  * (1 + (1 + 1/x)^{-1} sum_{n >= 2 even} g_n t^n)`,
/// where `x = q^d`, `c_i = x^{-gamma_i}`, `b_i = x^{-beta_i}`, `t = u^d x^{-1/2}`
/// and `g_n` are the coefficients of `prod (1 - b_i t) / prod (1 - c_i t)`.
/// The `t^2` terms of the two parts cancel and are removed analytically.
fn log_factor(
    ln_q: f64,
    d: usize,
    gammas: &[Complex64],
    betas: &[Complex64],
    ln_u: Option<Complex64>,
) -> Result<Complex64> {
    let Some(ln_u) = ln_u else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let df = d as f64;
    let inv_x = (-df * ln_q).exp();
    let t = (df * ln_u - 0.5 * df * ln_q).exp();
    let ct: Vec<Complex64> = gammas.iter().map(|g| (-df * ln_q * g).exp() * t).collect();
    let bt: Vec<Complex64> = betas.iter().map(|b| (-df * ln_q * b).exp() * t).collect();

    let mut pairs = Complex64::new(0.0, 0.0);
    for i in 0..ct.len() {
        for j in i..ct.len() {
            pairs += log1m_plus(ct[i] * ct[j]);
        }
    }
    for i in 0..bt.len() {
        for j in i + 1..bt.len() {
            pairs += log1m_plus(bt[i] * bt[j]);
        }
    }
    for b in &bt {
        for c in &ct {
            pairs -= log1m_plus(b * c);
        }
    }

    let rho = ct.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = rho * rho + bt.iter().map(|z| z.norm()).fold(0.0, f64::max).powi(2);
    let n_max = series_len(ct.len(), rho, lead * lead, &format!("degree {d} factor"))?
        .max(bt.len() + ct.len())
        .max(4);
    let a = ratio_series(&ct, &bt, n_max);
    let g2 = a[2];
    let s4: Complex64 = a.iter().skip(4).step_by(2).sum();
    // x/(x+1) and 1/(x+1)
    let w = 1.0 / (1.0 + inv_x);
    let inv_x1 = inv_x * w;
    let eps = w * (g2 + s4);
    Ok(pairs + log1p_minus(eps) - inv_x1 * g2 + w * s4)
}

fn ln_u(u: Complex64) -> Option<Complex64> {
    (u != Complex64::new(0.0, 0.0)).then(|| u.ln())
}

/// The degree-grouped Euler product shared by `A_C(u)` (no `betas`) and
/// the arithmetic factor of the ratios main term (`u = 1`).
fn euler_engine(
    field: FieldParams,
    gammas: &[Complex64],
    betas: &[Complex64],
    u: Complex64,
    policy: Truncation,
    what: &str,
) -> Result<EulerValue> {
    if !u.is_finite() || gammas.iter().chain(betas).any(|z| !z.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what}: non-finite input")));
    }
    let q = field.q() as f64;
    let ln_q = q.ln();
    let lu = ln_u(u);
    if lu.is_none() {
        return Ok(EulerValue {
            value: Complex64::new(1.0, 0.0),
            truncation: EulerTruncation::exact(),
        });
    }
    let rate = Rate::new(q, gammas, betas, u.norm());
    degree_product(q, rate, policy, what, |d| log_factor(ln_q, d, gammas, betas, lu))
}

/// `A_C(u) = prod_P prod_{i<=j} (1 - u^{2d(P)} |P|^{-1-gamma_i-gamma_j})
/// (1 + (1 + 1/|P|)^{-1} sum_{j>=1} tau_C(P^{2j}) |P|^{-j} u^{2j d(P)})`.
pub fn a_c(field: FieldParams, c: &ShiftSet, u: Complex64, trunc: Truncation) -> Result<EulerValue> {
    euler_engine(field, c.shifts(), &[], u, trunc, &format!("A_C for C = {c}"))
}

/// `B_C(h; u)`, a finite product over the primes dividing `h`.
pub fn b_c(c: &ShiftSet, h: &TwistPoly, u: Complex64) -> Result<Complex64> {
    let q = h.h.q() as f64;
    let ln_q = q.ln();
    let mut acc = Complex64::new(1.0, 0.0);
    for (p, e) in &h.primes {
        let d = p.deg();
        let df = d as f64;
        let inv_x = (-df * ln_q).exp();
        let t = u.powi(d as i32) * (-0.5 * df * ln_q).exp();
        let cs: Vec<Complex64> = c.shifts().iter().map(|g| (-df * ln_q * g).exp()).collect();
        let ct: Vec<Complex64> = cs.iter().map(|z| z * t).collect();
        let rho = ct.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let n_max = series_len(ct.len(), rho, 1.0, &format!("B_C at P = {p}"))?.max(2);
        let a = ratio_series(&ct, &[], n_max);
        let even: Complex64 = a.iter().step_by(2).sum();
        let odd = if t == Complex64::new(0.0, 0.0) {
            cs.iter().sum()
        } else {
            a.iter().skip(1).step_by(2).sum::<Complex64>() / t
        };
        let base = inv_x + even;
        if base.norm() < 1e-300 {
            return Err(Error::Divergent(format!("B_C factor at P = {p} vanishes")));
        }
        let part = if e % 2 == 1 { odd } else { even };
        acc *= part / base;
    }
    Ok(acc)
}

fn check_confluence(s: Complex64) -> Result<()> {
    if s.norm() < CONFLUENCE {
        return Err(Error::Pole(format!(
            "1 + {} (confluent shifts are not supported)",
            format_complex(s)
        )));
    }
    Ok(())
}

/// `prod_{i<=j} zeta_q(1 + gamma_i + gamma_j)`.
fn zeta_pairs(q: f64, gammas: &[Complex64]) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..gammas.len() {
        for j in i..gammas.len() {
            let s = gammas[i] + gammas[j];
            check_confluence(s)?;
            acc *= zeta_q(q, s + 1.0)?;
        }
    }
    Ok(acc)
}

/// `S~_C(h) = A_C(1) B_C(h; 1) prod_{i<=j} zeta_q(1 + gamma_i + gamma_j)`.
pub fn s_tilde(c: &ShiftSet, h: &TwistPoly, trunc: Truncation) -> Result<EulerValue> {
    let field = h.h.field();
    let pre = zeta_pairs(field.q() as f64, c.shifts())? * b_c(c, h, Complex64::new(1.0, 0.0))?;
    let a = a_c(field, c, Complex64::new(1.0, 0.0), trunc.scaled(pre.norm()))?;
    let mut truncation = EulerTruncation::exact();
    truncation.absorb(a.truncation, pre.norm());
    Ok(EulerValue {
        value: pre * a.value,
        truncation,
    })
}

fn check_mask_width(k: usize) -> Result<()> {
    if k == 0 || k > 16 {
        return Err(Error::InvalidArgument(format!(
            "number of shifts {k} must be between 1 and 16"
        )));
    }
    Ok(())
}

/// Main term of the twisted moment
/// `|h1|^{-1/2} sum_{R subset A} q^{-2g R} S~_{(A \ R) u R^-}(h)`.
pub fn twisted_main(a: &ShiftSet, h: &TwistPoly, g: usize, trunc: Truncation) -> Result<EulerValue> {
    check_mask_width(a.len())?;
    a.check_numerator()?;
    let field = h.h.field();
    let q = field.q() as f64;
    let n_terms = 1u64 << a.len();
    let sqrt_h1 = h.h1.norm().sqrt();
    let mut value = Complex64::new(0.0, 0.0);
    let mut truncation = EulerTruncation::exact();
    for mask in 0..n_terms {
        let c = a.reflect_subset(mask);
        let weight = q_pow_neg(q, 2.0 * g as f64 * a.subset_total(mask)) / sqrt_h1;
        let pre = zeta_pairs(q, c.shifts())? * b_c(&c, h, Complex64::new(1.0, 0.0))? * weight;
        let e = a_c(
            field,
            &c,
            Complex64::new(1.0, 0.0),
            trunc.scaled(n_terms as f64 * pre.norm()),
        )?;
        value += pre * e.value;
        truncation.absorb(e.truncation, pre.norm());
    }
    Ok(EulerValue { value, truncation })
}

/// `S_C` of the ratios main term for numerator set `C` and denominator `B`.
pub fn s_ratio(field: FieldParams, c: &ShiftSet, b: &ShiftSet, trunc: Truncation) -> Result<EulerValue> {
    let q = field.q() as f64;
    let (gs, bs) = (c.shifts(), b.shifts());
    let mut pre = zeta_pairs(q, gs)?;
    for i in 0..bs.len() {
        for j in i + 1..bs.len() {
            let s = bs[i] + bs[j];
            check_confluence(s)?;
            pre *= zeta_q(q, s + 1.0)?;
        }
    }
    for bi in bs {
        for gj in gs {
            // 1 / zeta_q(1 + beta + gamma)
            pre *= Complex64::new(1.0, 0.0) - q_pow_neg(q, bi + gj);
        }
    }
    let e = euler_engine(
        field,
        gs,
        bs,
        Complex64::new(1.0, 0.0),
        trunc.scaled(pre.norm()),
        &format!("S_C for C = {c}, B = {b}"),
    )?;
    let mut truncation = EulerTruncation::exact();
    truncation.absorb(e.truncation, pre.norm());
    Ok(EulerValue {
        value: pre * e.value,
        truncation,
    })
}

/// Ratios main term `sum_{R subset A} q^{-2g R} S_{(A \ R) u R^-}` with the
/// shift windows `|Re alpha| < 1/4`, `0 < Re beta < 1/2` enforced.
pub fn ratios_main(
    field: FieldParams,
    a: &ShiftSet,
    b: &ShiftSet,
    g: usize,
    trunc: Truncation,
) -> Result<EulerValue> {
    a.check_numerator()?;
    b.check_denominator()?;
    ratios_main_unchecked(field, a, b, g, trunc)
}

/// `ratios_main` without the shift windows; convergence is still checked.
pub fn ratios_main_unchecked(
    field: FieldParams,
    a: &ShiftSet,
    b: &ShiftSet,
    g: usize,
    trunc: Truncation,
) -> Result<EulerValue> {
    check_mask_width(a.len())?;
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "numerator has {} shifts but denominator has {}",
            a.len(),
            b.len()
        )));
    }
    let q = field.q() as f64;
    let n_terms = 1u64 << a.len();
    let mut value = Complex64::new(0.0, 0.0);
    let mut truncation = EulerTruncation::exact();
    for mask in 0..n_terms {
        let c = a.reflect_subset(mask);
        let weight = q_pow_neg(q, 2.0 * g as f64 * a.subset_total(mask));
        let s = s_ratio(field, &c, b, trunc.scaled(n_terms as f64 * weight.norm()))?;
        value += weight * s.value;
        truncation.absorb(s.truncation, weight.norm());
    }
    Ok(EulerValue { value, truncation })
}

/// `A(alpha, beta) = prod_P (1 - |P|^{-1-alpha-beta})^{-1}
/// (1 - |P|^{-alpha-beta} / (|P|+1) - |P|^{-1-2 alpha} / (|P|+1))`.
pub fn a_k1(field: FieldParams, alpha: Complex64, beta: Complex64, trunc: Truncation) -> Result<EulerValue> {
    let q = field.q() as f64;
    let ln_q = q.ln();
    let rate = Rate::new(q, &[alpha], &[beta], 1.0);
    degree_product(
        q,
        rate,
        trunc,
        &format!("A({}, {})", format_complex(alpha), format_complex(beta)),
        |d| {
            let df = d as f64;
            let inv_x = (-df * ln_q).exp();
            let inv_x1 = inv_x / (1.0 + inv_x);
            let y = (-df * ln_q * (alpha + beta + 1.0)).exp();
            let z1 = (-df * ln_q * (alpha + beta)).exp() * inv_x1;
            let z2 = (-df * ln_q * (2.0 * alpha + 1.0)).exp() * inv_x1;
            // -ln(1-y) + ln(1-z1-z2), with the first-order parts combined:
            // y - z1 = |P|^{-alpha-beta} / (|P| (|P|+1)).
            let y_minus_z1 = (-df * ln_q * (alpha + beta)).exp() * inv_x * inv_x1;
            Ok(-log1m_plus(y) + log1m_plus(z1 + z2) + y_minus_z1 - z2)
        },
    )
}

/// The single-quotient main term
/// `A(a,b) zeta_q(1+2a)/zeta_q(1+a+b) + q^{-2ga} A(-a,b) zeta_q(1-2a)/zeta_q(1-a+b)`.
pub fn ratio_k1_closed(
    field: FieldParams,
    alpha: Complex64,
    beta: Complex64,
    g: usize,
    trunc: Truncation,
) -> Result<EulerValue> {
    let q = field.q() as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut truncation = EulerTruncation::exact();
    for (sign, weight) in [
        (1.0, Complex64::new(1.0, 0.0)),
        (-1.0, q_pow_neg(q, 2.0 * g as f64 * alpha)),
    ] {
        let a = sign * alpha;
        check_confluence(2.0 * a)?;
        let pre = weight * zeta_q(q, 1.0 + 2.0 * a)? * (Complex64::new(1.0, 0.0) - q_pow_neg(q, a + beta));
        let e = a_k1(field, a, beta, trunc.scaled(2.0 * pre.norm()))?;
        value += pre * e.value;
        truncation.absorb(e.truncation, pre.norm());
    }
    Ok(EulerValue { value, truncation })
}
