use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LPolynomial;
use crate::error::{Error, Result};

/// Zero angles `theta_j` in turns, from `L(u) = prod_j (1 - u sqrt(q) e(-theta_j))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    /// Angles in `[0, 1)`, ascending.
    pub thetas: Vec<f64>,
    /// `max_j | |u_j| sqrt(q) - 1 |` before projecting onto the circle.
    pub radii_residual: f64,
    /// The roots `v_j = u_j sqrt(q)` as found.
    pub roots: Vec<Complex64>,
}

impl ZeroSet {
    /// `sum_j e(-n theta_j)`.
    pub fn power_sum(&self, n: i64) -> Complex64 {
        self.thetas
            .iter()
            .map(|&t| Complex64::from_polar(1.0, -2.0 * PI * n as f64 * t))
            .sum()
    }
}

/// Scales rows and columns by powers of two so their norms are comparable.
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            while cc < r / radix {
                f *= radix;
                cc *= radix * radix;
            }
            while cc > r * radix {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn horner_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Coefficients of `p(v + s)` from those of `p(v)`.
fn taylor_shift(a: &[f64], s: f64) -> Vec<f64> {
    let mut b = a.to_vec();
    if s == 0.0 {
        return b;
    }
    let n = b.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            b[j] += s * b[j + 1];
        }
    }
    b
}

/// Eigenvalues of the balanced companion matrix of `a`, moved back by
/// `shift`; `None` if the Schur iteration stalls.
fn companion_eigenvalues(a: &[f64], shift: f64) -> Option<Vec<Complex64>> {
    let n = a.len() - 1;
    let lead = a[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -a[i] / lead;
    }
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)?;
    Some(
        schur
            .complex_eigenvalues()
            .iter()
            .map(|z| Complex64::new(z.re + shift, z.im))
            .collect(),
    )
}

fn derivative(a: &[f64]) -> Vec<f64> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn newton(a: &[f64], mut r: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let (p, dp) = horner_with_derivative(a, r);
        if dp.norm() == 0.0 || !dp.is_finite() {
            break;
        }
        let next = r - p / dp;
        if horner_with_derivative(a, next).0.norm() <= p.norm() {
            r = next;
        } else {
            break;
        }
    }
    r
}

/// Newton refinement. Eigenvalues within `CLUSTER` of each other are taken
/// as one multiple root: their centroid is refined on the derivative of
/// matching order, where the root is simple.
fn polish(a: &[f64], eig: &[Complex64]) -> Vec<Complex64> {
    const CLUSTER: f64 = 1e-5;
    let n = eig.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (eig[i] - eig[j]).norm() < CLUSTER {
                let (li, lj) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == li {
                        *l = lj;
                    }
                }
            }
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| label[i] == root).collect();
        if members.is_empty() {
            continue;
        }
        let m = members.len();
        let centroid = members.iter().map(|&i| eig[i]).sum::<Complex64>() / m as f64;
        let refined = if m == 1 {
            newton(a, centroid, 2)
        } else {
            let mut da = a.to_vec();
            for _ in 1..m {
                da = derivative(&da);
            }
            newton(&da, centroid, 2)
        };
        for &i in &members {
            out[i] = refined;
        }
    }
    out
}

/// The `2g` zeros of `L`, via the eigenvalues of the balanced companion
/// matrix of the monic polynomial `sum_n c_n q^{-n/2} v^n`, each refined
/// by two Newton steps.
pub fn zeros(l: &LPolynomial) -> Result<ZeroSet> {
    let n = l.degree();
    if n == 0 {
        return Ok(ZeroSet {
            thetas: Vec::new(),
            radii_residual: 0.0,
            roots: Vec::new(),
        });
    }
    let sq = (l.q as f64).sqrt();
    let a: Vec<f64> = l
        .c
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 / sq.powi(k as i32))
        .collect();
    let eig = [0.0, 0.1, -0.23, 0.37]
        .iter()
        .find_map(|&shift| companion_eigenvalues(&taylor_shift(&a, shift), shift))
        .ok_or_else(|| Error::RootFinding {
            poly: l.source.to_string(),
            reason: "Schur iteration did not converge".into(),
        })?;
    let roots = polish(&a, &eig);
    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    for r in &roots {
        let (p, _) = horner_with_derivative(&a, *r);
        if !p.is_finite() || p.norm() > 1e-6 * scale {
            return Err(Error::RootFinding {
                poly: l.source.to_string(),
                reason: format!("residual {} at root {}", p.norm(), r),
            });
        }
    }
    let radii_residual = roots
        .iter()
        .map(|r| (r.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut thetas: Vec<f64> = roots
        .iter()
        .map(|r| {
            let t = r.arg() / (2.0 * PI);
            let t = t.rem_euclid(1.0);
            if t >= 1.0 {
                0.0
            } else {
                t
            }
        })
        .collect();
    thetas.sort_by(f64::total_cmp);
    Ok(ZeroSet {
        thetas,
        radii_residual,
        roots,
    })
}
