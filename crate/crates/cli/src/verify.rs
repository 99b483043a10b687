//! Exact-identity suites behind `verify --checks`.

use clap::ValueEnum;
use ffratios::characters::{char_sum_l1_sides, char_sum_l3, gauss_sum_closed, GaussSumEvaluator};
use ffratios::ensemble::{empirical_statistic, fold_chunks, Member, Statistic};
use ffratios::ffpoly::{enumerate_monic, PrimeTable};
use ffratios::lfun::{explicit_formula_sides, lambda_sums_from_coefficients, verify_functional_equation, zeros, TrigPoly};
use ffratios::{FieldParams, PolyFq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Functional equation of every L-polynomial (integer residual).
    Fe,
    /// Zeros on the circle |u| = q^{-1/2}.
    Rh,
    /// Explicit formula for random even trigonometric polynomials.
    Explicit,
    /// Closed form of Gauss sums modulo prime powers.
    Gauss,
    /// Sum of chi_D(f) over the family as character sums.
    L1,
    /// Character sums over M_m through Gauss sums.
    L3,
    /// Average of chi_D(f^2) over the family.
    L5,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Fe => "fe",
            Check::Rh => "rh",
            Check::Explicit => "explicit",
            Check::Gauss => "gauss",
            Check::L1 => "l1",
            Check::L3 => "l3",
            Check::L5 => "l5",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub check: String,
    pub q: u32,
    pub g: usize,
    pub mode: String,
    pub seed: Option<u64>,
    pub cases: u64,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn row(cfg: &RunConfig, check: Check, cases: u64, max_residual: f64, threshold: f64) -> VerifyRow {
    VerifyRow {
        check: check.name().into(),
        q: cfg.field.q(),
        g: cfg.g,
        mode: cfg.mode.to_string(),
        seed: cfg.mode.seed(),
        cases,
        max_residual,
        threshold,
        pass: max_residual <= threshold,
    }
}

/// Folds `f` over the family and returns `(cases, max residual)`.
fn family_max<F>(cfg: &RunConfig, f: F) -> Result<(u64, f64), CliError>
where
    F: Fn(&Member) -> ffratios::Result<(u64, f64)> + Sync,
{
    let spec = cfg.spec()?;
    let chunks = fold_chunks(
        &spec,
        || (0u64, 0f64),
        |acc: &mut (u64, f64), m: &Member| {
            let (n, r) = f(m)?;
            acc.0 += n;
            acc.1 = acc.1.max(r);
            Ok(())
        },
    )?;
    Ok(chunks.iter().fold((0, 0.0), |a, c| (a.0 + c.0, a.1.max(c.1))))
}

/// Ten even trigonometric polynomials with support at most `2g`.
pub fn random_trig_polys(g: usize, seed: u64, count: usize) -> Vec<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=2 * g);
            TrigPoly::new((0..=n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).expect("finite")
        })
        .collect()
}

/// Every polynomial of degree at most `d`, zero included.
fn all_polys(field: FieldParams, d: usize) -> Vec<PolyFq> {
    let q = field.q() as u64;
    let total = q.pow(d as u32 + 1);
    (0..total)
        .map(|mut i| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..=d {
                c.push((i % q) as u32);
                i /= q;
            }
            PolyFq::from_residues(field, c)
        })
        .collect()
}

fn gauss_suite(field: FieldParams) -> Result<(u64, f64), CliError> {
    let table = PrimeTable::shared(field, 2)?;
    let vs = all_polys(field, 3);
    let mut cases = 0u64;
    let mut worst = 0f64;
    for (_, p) in table.iter().filter(|(d, _)| *d <= 2) {
        let mut pj = PolyFq::one(field);
        for j in 1..=3u32 {
            pj = pj.mul(p)?;
            let ev = GaussSumEvaluator::new(&pj)?;
            for v in &vs {
                let direct = ev.eval(v)?.value;
                let closed = gauss_sum_closed(v, p, j)?.value;
                worst = worst.max((direct - closed).norm());
                cases += 1;
            }
        }
    }
    let x = PolyFq::x(field);
    let g1 = GaussSumEvaluator::new(&x)?.eval(&PolyFq::one(field))?.value;
    worst = worst.max((g1 - num_complex::Complex64::new((field.q() as f64).sqrt(), 0.0)).norm());
    Ok((cases + 1, worst))
}

fn l1_suite(cfg: &RunConfig) -> Result<(u64, f64), CliError> {
    let mut cases = 0u64;
    let mut worst = 0f64;
    for d in 0..=4 {
        for f in enumerate_monic(cfg.field, d) {
            let s = char_sum_l1_sides(&f, cfg.g)?;
            worst = worst.max((s.lhs - s.rhs).unsigned_abs() as f64);
            cases += 1;
        }
    }
    Ok((cases, worst))
}

fn l3_suite(cfg: &RunConfig) -> Result<(u64, f64), CliError> {
    let mut cases = 0u64;
    let mut worst = 0f64;
    for d in 1..=4 {
        for f in enumerate_monic(cfg.field, d) {
            for m in 0..=4 {
                let s = char_sum_l3(&f, m)?;
                worst = worst.max((s.direct - s.closed).norm());
                cases += 1;
            }
        }
    }
    Ok((cases, worst))
}

fn l5_suite(cfg: &RunConfig) -> Result<(u64, f64, f64), CliError> {
    let spec = cfg.spec()?;
    let x = PolyFq::x(cfg.field);
    let x1 = PolyFq::new(cfg.field, &[1, 1]);
    let both = x.mul(&x1)?;
    let mut worst = 0f64;
    for f in [x, x1, both] {
        let r = empirical_statistic(&spec, &Statistic::ChiSquareAvg { f }, cfg.truncation())?;
        worst = worst.max(r.abs_err);
    }
    let q = cfg.field.q() as f64;
    Ok((3, worst, 10.0 * q.powf(-2.0 * cfg.g as f64)))
}

pub fn run_checks(cfg: &RunConfig, checks: &[Check]) -> Result<Vec<VerifyRow>, CliError> {
    let mut rows = Vec::new();
    for &check in checks {
        let r = match check {
            Check::Fe => {
                let (n, r) = family_max(cfg, |m| Ok((1, verify_functional_equation(&m.l)? as f64)))?;
                row(cfg, check, n, r, 0.0)
            }
            Check::Rh => {
                let (n, r) = family_max(cfg, |m| Ok((1, zeros(&m.l)?.radii_residual)))?;
                row(cfg, check, n, r, 1e-6)
            }
            Check::Explicit => {
                let hs = random_trig_polys(cfg.g, cfg.seed(), 10);
                let (n, r) = family_max(cfg, |m| {
                    let z = zeros(&m.l)?;
                    let lam = lambda_sums_from_coefficients(&m.l, 2 * cfg.g)?;
                    let mut worst = 0f64;
                    for h in &hs {
                        worst = worst.max(explicit_formula_sides(&m.l, &z, h, &lam)?.residual());
                    }
                    Ok((hs.len() as u64, worst))
                })?;
                row(cfg, check, n, r, 1e-8)
            }
            Check::Gauss => {
                let (n, r) = gauss_suite(cfg.field)?;
                row(cfg, check, n, r, 1e-9)
            }
            Check::L1 => {
                let (n, r) = l1_suite(cfg)?;
                row(cfg, check, n, r, 0.0)
            }
            Check::L3 => {
                let (n, r) = l3_suite(cfg)?;
                row(cfg, check, n, r, 1e-9)
            }
            Check::L5 => {
                let (n, r, t) = l5_suite(cfg)?;
                row(cfg, check, n, r, t)
            }
        };
        rows.push(r);
    }
    Ok(rows)
}
