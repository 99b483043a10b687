//! Statement-level checks of the negative-moment machinery: majorant
//! coefficients `b_beta(n)`, the lower bound for `log |L|`, a cosine sum
//! estimate and negative-moment scans.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conjecture::{ShiftSet, Truncation};
use crate::ensemble::{
    average_vec, empirical_statistic, fold_chunks, EnsembleReport, EnsembleSpec, Member, SampleMode, Statistic,
};
use crate::error::{Error, Result};
use crate::ffpoly::FieldParams;
use crate::lfun::{evaluate_shifted, lambda_sums_from_coefficients, LPolynomial};
use crate::sum::NeumaierSum;

/// Calibrated bound for `|trig_sum diff|` over the reference grid.
pub const TRIG_SUM_BOUND: f64 = 3.0;
/// Calibrated lower bound `-C0` for the gap in the lower bound for `log |L|`.
pub const LB_GAP_FLOOR: f64 = -0.5;
/// Calibrated bound for the negative first moment divided by `log g`.
pub const NEGMOMENT_RATIO_BOUND: f64 = 3.0;

/// `tbar = min(t mod 2 pi, 2 pi - (t mod 2 pi))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TBar {
    pub t: f64,
    pub tbar: f64,
}

impl TBar {
    pub fn new(t: f64) -> Self {
        let r = t.rem_euclid(2.0 * PI);
        Self {
            t,
            tbar: r.min(2.0 * PI - r),
        }
    }
}

/// Coefficients of the optimal majorant used in the lower bound for
/// `log |L(1/2 + beta + it)|`, for `0 <= n <= N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantCoeffs {
    pub n_trunc: usize,
    pub beta: f64,
    pub b: Vec<f64>,
}

impl MajorantCoeffs {
    pub fn new(q: f64, n_trunc: usize, beta: f64) -> Result<Self> {
        let b = (0..=n_trunc)
            .map(|n| b_beta(q, n, n_trunc, beta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n_trunc, beta, b })
    }
}

fn check_b_args(n: usize, n_trunc: usize, beta: f64) -> Result<()> {
    if n_trunc == 0 || n > n_trunc {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= n <= N with N >= 1, got n = {n}, N = {n_trunc}"
        )));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be positive")));
    }
    Ok(())
}

/// Number of `j` terms after which `(j+1) q^{-j (N+1) beta}` is negligible.
fn b_terms(q: f64, n_trunc: usize, beta: f64) -> usize {
    let step = (n_trunc + 1) as f64 * beta * q.ln();
    let mut j = 1usize;
    while ((j + 1) as f64).ln() - j as f64 * step > (1e-18f64).ln() {
        j += 1;
    }
    j + 1
}

/// The series for `b_beta(n)` cut after `terms` values of `j`, including
/// the `q^{-2(...)}` corrections.
pub fn b_beta_partial(q: f64, n: usize, n_trunc: usize, beta: f64, terms: usize) -> f64 {
    let big = (n_trunc + 1) as f64;
    let nf = n as f64;
    let mut acc = NeumaierSum::new();
    for j in 0..terms {
        let jf = j as f64;
        let a = nf + jf * big;
        let c = (jf + 2.0) * big - nf;
        let first = (q.powf(-a * beta) - q.powf(-2.0 * a)) / a;
        let second = (q.powf(-c * beta) - q.powf(-2.0 * c)) / c;
        acc.add((jf + 1.0) * (first - second));
    }
    acc.value()
}

/// `b_beta(n)` for `1 <= n <= N`; for `n = 0` the constant coefficient
/// `-(2/(N+1)) log((1 - q^{-(N+1) beta}) / (1 - q^{-2(N+1)}))`.
pub fn b_beta(q: f64, n: usize, n_trunc: usize, beta: f64) -> Result<f64> {
    check_b_args(n, n_trunc, beta)?;
    let big = (n_trunc + 1) as f64;
    if n == 0 {
        let ratio = (-(q.powf(-big * beta))).ln_1p() - (-(q.powf(-2.0 * big))).ln_1p();
        return Ok(-2.0 / big * ratio);
    }
    Ok(b_beta_partial(q, n, n_trunc, beta, b_terms(q, n_trunc, beta)))
}

/// `(2g/(N+1)) log((1 - q^{-(N+1) beta}) / (1 - q^{-2(N+1)}))`.
pub fn lemma_lb_constant(q: f64, g: usize, n_trunc: usize, beta: f64) -> f64 {
    let big = (n_trunc + 1) as f64;
    let ratio = (-(q.powf(-big * beta))).ln_1p() - (-(q.powf(-2.0 * big))).ln_1p();
    2.0 * g as f64 / big * ratio
}

/// Precomputed pieces of the lower bound for fixed `(q, g, beta, t, N)`.
#[derive(Debug, Clone)]
pub struct LowerBound {
    pub beta: f64,
    pub t: f64,
    pub n_trunc: usize,
    constant: f64,
    /// `b_beta(n) q^{-n/2}` as a complex weight including `q^{-i n t}`.
    weights: Vec<Complex64>,
}

impl LowerBound {
    pub fn new(field: FieldParams, g: usize, beta: f64, t: f64, n_trunc: usize) -> Result<Self> {
        let q = field.q() as f64;
        let coeffs = MajorantCoeffs::new(q, n_trunc, beta)?;
        let weights = (0..=n_trunc)
            .map(|n| {
                if n == 0 {
                    return Complex64::new(0.0, 0.0);
                }
                let nf = n as f64;
                coeffs.b[n] * q.powf(-nf / 2.0) * Complex64::from_polar(1.0, -nf * t * q.ln())
            })
            .collect();
        Ok(Self {
            beta,
            t,
            n_trunc,
            constant: lemma_lb_constant(q, g, n_trunc, beta),
            weights,
        })
    }

    /// `log |L(1/2+beta+it)| - constant - Re sum_{d(f) <= N} b_beta(d(f))
    /// Lambda(f) chi_D(f) |f|^{-1/2-it}`; `None` when `L` vanishes there.
    pub fn gap(&self, l: &LPolynomial) -> Result<Option<f64>> {
        let v = evaluate_shifted(l, Complex64::new(self.beta, 0.0), self.t).norm();
        if v < crate::ensemble::ZERO_L {
            return Ok(None);
        }
        let lam = lambda_sums_from_coefficients(l, self.n_trunc)?;
        let mut s = NeumaierSum::new();
        for n in 1..=self.n_trunc {
            s.add((self.weights[n] * lam[n] as f64).re);
        }
        Ok(Some(v.ln() - self.constant - s.value()))
    }
}

/// The gap for a single `D`.
pub fn lemma_lb_gap(d: &crate::ffpoly::PolyFq, beta: f64, t: f64, n_trunc: usize) -> Result<Option<f64>> {
    let l = crate::lfun::l_coefficients(d)?;
    LowerBound::new(d.field(), l.g, beta, t, n_trunc)?.gap(&l)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbScanRow {
    pub q: u32,
    pub g: usize,
    pub beta: f64,
    pub n_trunc: usize,
    pub t: f64,
    pub min_gap: f64,
    pub mean_gap: f64,
    pub members: u64,
    pub n_excluded: u64,
    pub mode: String,
    pub seed: Option<u64>,
}

/// Minimum and mean gap over the ensemble for every `(beta, N)` pair.
pub fn lemma_lb_scan(spec: &EnsembleSpec, betas: &[f64], ns: &[usize], t: f64) -> Result<Vec<LbScanRow>> {
    let mut bounds = Vec::new();
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    for &beta in betas {
        for &n in &ns {
            bounds.push(LowerBound::new(spec.field, spec.g, beta, t, n)?);
        }
    }
    #[derive(Clone)]
    struct St {
        min: f64,
        sum: NeumaierSum,
        used: u64,
        excluded: u64,
    }
    let init = || {
        vec![
            St {
                min: f64::INFINITY,
                sum: NeumaierSum::new(),
                used: 0,
                excluded: 0,
            };
            bounds.len()
        ]
    };
    let chunks = fold_chunks(spec, init, |st, m: &Member| {
        for (s, b) in st.iter_mut().zip(&bounds) {
            match b.gap(&m.l)? {
                Some(gap) => {
                    s.min = s.min.min(gap);
                    s.sum.add(gap);
                    s.used += 1;
                }
                None => s.excluded += 1,
            }
        }
        Ok(())
    })?;
    let mut total = init();
    for c in &chunks {
        for (t, s) in total.iter_mut().zip(c) {
            t.min = t.min.min(s.min);
            t.sum.merge(&s.sum);
            t.used += s.used;
            t.excluded += s.excluded;
        }
    }
    Ok(bounds
        .iter()
        .zip(total)
        .map(|(b, s)| LbScanRow {
            q: spec.field.q(),
            g: spec.g,
            beta: b.beta,
            n_trunc: b.n_trunc,
            t: b.t,
            min_gap: s.min,
            mean_gap: s.sum.value() / s.used.max(1) as f64,
            members: s.used,
            n_excluded: s.excluded,
            mode: spec.mode.to_string(),
            seed: spec.mode.seed(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigSumRecord {
    pub q: u32,
    pub g: u64,
    pub a: f64,
    pub theta: f64,
    pub lhs: f64,
    pub predicted: f64,
    pub diff: f64,
}

/// `sum_{n=1}^{g} cos(n theta) / (n q^{a n})` against
/// `log min(1/a, g, 1/thetabar)`.
pub fn trig_sum(q: u32, g: u64, a: f64, theta: f64) -> Result<TrigSumRecord> {
    if !(a > 0.0) || g == 0 {
        return Err(Error::InvalidArgument(format!("need a > 0 and g >= 1, got a = {a}, g = {g}")));
    }
    let qf = q as f64;
    let decay = (-a * qf.ln()).exp();
    let mut lhs = NeumaierSum::new();
    let mut w = 1.0;
    for n in 1..=g {
        w *= decay;
        lhs.add((n as f64 * theta).cos() * w / n as f64);
    }
    let tbar = TBar::new(theta).tbar;
    let inv_tbar = if tbar == 0.0 { f64::INFINITY } else { 1.0 / tbar };
    let predicted = (1.0 / a).min((g as f64).min(inv_tbar)).ln();
    let lhs = lhs.value();
    Ok(TrigSumRecord {
        q,
        g,
        a,
        theta,
        lhs,
        predicted,
        diff: lhs - predicted,
    })
}

/// The reference grid `a in {1e-3, 1e-2, 1e-1, 1}`, `theta in {0, 0.01, 0.1,
/// 1, 3}`, `g in {10, 100, 10^4}`, `q in {5, 13}`.
pub fn trig_sum_grid() -> Result<Vec<TrigSumRecord>> {
    let mut rows = Vec::new();
    for q in [5u32, 13] {
        for g in [10u64, 100, 10_000] {
            for a in [1e-3, 1e-2, 1e-1, 1.0] {
                for theta in [0.0, 0.01, 0.1, 1.0, 3.0] {
                    rows.push(trig_sum(q, g, a, theta)?);
                }
            }
        }
    }
    Ok(rows)
}

/// Which entry of `min(1/beta_j, 1/tbar_j)` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeBranch {
    Beta,
    T,
}

impl std::fmt::Display for ShapeBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ShapeBranch::Beta => "beta",
            ShapeBranch::T => "t",
        })
    }
}

pub fn shape_branch(beta: f64, t: f64) -> ShapeBranch {
    let tbar = TBar::new(t).tbar;
    if tbar > beta {
        ShapeBranch::T
    } else {
        ShapeBranch::Beta
    }
}

/// `(1/beta)^{k^2 m^2 / 2} prod_j min(1/beta_j, 1/tbar_j)^{-m/2}
/// (log g)^{km(km+1)/2}` with `beta = min_j beta_j`.
pub fn negmoment_shape(betas: &[f64], ts: &[f64], m: f64, g: usize) -> Result<f64> {
    if betas.is_empty() || betas.len() != ts.len() {
        return Err(Error::InvalidArgument(format!(
            "{} shifts but {} heights",
            betas.len(),
            ts.len()
        )));
    }
    if betas.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::InvalidArgument("shifts must be positive".into()));
    }
    let k = betas.len() as f64;
    let beta = betas.iter().copied().fold(f64::INFINITY, f64::min);
    let mut acc = (1.0 / beta).powf(k * k * m * m / 2.0);
    for (&b, &t) in betas.iter().zip(ts) {
        let tbar = TBar::new(t).tbar;
        let inv_t = if tbar == 0.0 { f64::INFINITY } else { 1.0 / tbar };
        acc *= (1.0 / b).min(inv_t).powf(-m / 2.0);
    }
    let km = k * m;
    Ok(acc * (g as f64).ln().powf(km * (km + 1.0) / 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegMomentRow {
    pub statistic: String,
    pub q: u32,
    pub g: usize,
    pub params: String,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub predicted_re: f64,
    pub predicted_im: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub predicted_error_scale: f64,
    pub n_excluded: u64,
    pub mode: String,
    pub seed: Option<u64>,
    pub runtime_s: f64,
    pub std_err: f64,
    pub beta: f64,
    pub m: f64,
    pub k: usize,
    pub t: String,
    pub branch: String,
    /// `empirical / shape`.
    pub ratio: f64,
    /// Whether `beta >= g^{-1/(2km)}`.
    pub beta_above_threshold: bool,
}

impl NegMomentRow {
    fn from_report(r: &EnsembleReport, beta: f64, m: f64, ts: &[f64]) -> Self {
        let row = r.row();
        let k = ts.len();
        let branch = ts
            .iter()
            .map(|&t| shape_branch(beta, t).to_string())
            .collect::<Vec<_>>()
            .join(";");
        Self {
            statistic: row.statistic,
            q: row.q,
            g: row.g,
            params: row.params,
            empirical_re: row.empirical_re,
            empirical_im: row.empirical_im,
            predicted_re: row.predicted_re,
            predicted_im: row.predicted_im,
            abs_err: row.abs_err,
            rel_err: row.rel_err,
            predicted_error_scale: row.predicted_error_scale,
            n_excluded: row.n_excluded,
            mode: row.mode,
            seed: row.seed,
            runtime_s: row.runtime_s,
            std_err: row.std_err,
            beta,
            m,
            k,
            t: ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";"),
            branch,
            ratio: r.empirical.re / r.predicted.re,
            beta_above_threshold: beta >= (r.g as f64).powf(-1.0 / (2.0 * k as f64 * m)),
        }
    }
}

/// Negative moments `E |prod_j L(1/2 + beta + i t_j)|^{-m}` over a grid of
/// genera and shifts, each compared with the upper-bound shape. Genera
/// within the exhaustive budget are enumerated; the rest use `fallback`.
pub fn negmoment_scan(
    field: FieldParams,
    genera: &[usize],
    betas: &[f64],
    m: f64,
    ts: &[f64],
    mode: SampleMode,
    threads: usize,
) -> Result<Vec<NegMomentRow>> {
    let mut rows = Vec::new();
    for &g in genera {
        let spec = EnsembleSpec::new(field, g, mode)?.with_threads(threads);
        if betas.len() == 1 {
            let stat = Statistic::NegMoment {
                b: ShiftSet::real(&vec![betas[0]; ts.len()]),
                t: ts.to_vec(),
                m,
            };
            let r = empirical_statistic(&spec, &stat, Truncation::default())?;
            rows.push(NegMomentRow::from_report(&r, betas[0], m, ts));
            continue;
        }
        // one pass over the family for the whole shift grid
        let avgs = average_vec(&spec, betas.len(), |mem| {
            Ok(betas
                .iter()
                .map(|&beta| {
                    let mut acc = 1.0;
                    for &t in ts {
                        let v = evaluate_shifted(&mem.l, Complex64::new(beta, 0.0), t).norm();
                        if v < crate::ensemble::ZERO_L {
                            return None;
                        }
                        acc *= v.powf(-m);
                    }
                    Some(Complex64::new(acc, 0.0))
                })
                .collect())
        })?;
        for (&beta, avg) in betas.iter().zip(avgs) {
            let stat = Statistic::NegMoment {
                b: ShiftSet::real(&vec![beta; ts.len()]),
                t: ts.to_vec(),
                m,
            };
            let shape = negmoment_shape(&vec![beta; ts.len()], ts, m, g)?;
            let r = EnsembleReport::new(
                stat.id(),
                &spec,
                stat.params(),
                avg.mean,
                Complex64::new(shape, 0.0),
                f64::NAN,
                avg.std_err,
                avg.n_excluded,
            );
            rows.push(NegMomentRow::from_report(&r, beta, m, ts));
        }
    }
    Ok(rows)
}
