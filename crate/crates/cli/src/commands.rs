use std::fs::File;
use std::io::{self, BufReader, Write};

use clap::ValueEnum;
use ffratios::bounds::{
    lemma_lb_scan, negmoment_scan, trig_sum_grid, LB_GAP_FLOOR, NEGMOMENT_RATIO_BOUND, TRIG_SUM_BOUND,
};
use ffratios::conjecture::{PhiHat, ShiftSet};
use ffratios::ensemble::{empirical_statistic, write_reports, EnsembleReport, ReportRow, Statistic};
use ffratios::ffpoly::prime_count;
use ffratios::lfun::{family_genus, l_coefficients, verify_functional_equation, zeros};
use ffratios::PolyFq;
use serde::Serialize;

use crate::config::RunConfig;
use crate::verify::{run_checks, Check};
use crate::CliError;

/// Whether every row met its threshold.
pub type Outcome = bool;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Cosine sum against its logarithmic size.
    Trig,
    /// Lower bound for log |L| over the family.
    Lb,
    /// Negative moments against their upper-bound shape.
    Scan,
}

pub fn emit<T: Serialize>(cfg: &RunConfig, rows: &[T]) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let f = File::create(path)?;
            write_reports(rows, cfg.format, io::BufWriter::new(f))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_reports(rows, cfg.format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn parse_poly(cfg: &RunConfig, text: &str) -> Result<PolyFq, CliError> {
    PolyFq::parse(cfg.field, text).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_shifts(text: &str) -> Result<ShiftSet, CliError> {
    text.parse::<ShiftSet>().map_err(|e| CliError::Usage(e.to_string()))
}

/// Report row with the truncation tolerance added to the parameters.
fn report_row(cfg: &RunConfig, r: &EnsembleReport) -> ReportRow {
    let mut row = r.row();
    row.params = format!("{} trunc_tol={:e}", row.params, cfg.trunc_tol);
    row
}

#[derive(Serialize)]
struct PrimeRow {
    q: u32,
    degree: usize,
    count: String,
}

pub fn primes(cfg: &RunConfig, max_degree: Option<usize>) -> Result<Outcome, CliError> {
    let top = max_degree.unwrap_or(2 * cfg.g + 1);
    let rows = (1..=top)
        .map(|d| {
            Ok(PrimeRow {
                q: cfg.field.q(),
                degree: d,
                count: prime_count(cfg.field, d)?.to_string(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(cfg, &rows)?;
    Ok(true)
}

#[derive(Serialize)]
struct LpolyRow {
    d: String,
    q: u32,
    g: usize,
    coefficients: String,
    fe_residual: String,
    radii_residual: f64,
    thetas: String,
}

pub fn lpoly(cfg: &RunConfig, d: &str) -> Result<Outcome, CliError> {
    let d = parse_poly(cfg, d)?;
    let g = family_genus(&d)?;
    let l = l_coefficients(&d)?;
    let fe = verify_functional_equation(&l)?;
    let z = zeros(&l)?;
    let join = |v: Vec<String>| v.join(";");
    let row = LpolyRow {
        d: d.to_symbolic(),
        q: cfg.field.q(),
        g,
        coefficients: join(l.c.iter().map(|c| c.to_string()).collect()),
        fe_residual: fe.to_string(),
        radii_residual: z.radii_residual,
        thetas: join(z.thetas.iter().map(|t| t.to_string()).collect()),
    };
    emit(cfg, &[row])?;
    Ok(fe == 0)
}

pub fn verify(cfg: &RunConfig, checks: &[Check]) -> Result<Outcome, CliError> {
    let rows = run_checks(cfg, checks)?;
    emit(cfg, &rows)?;
    Ok(rows.iter().all(|r| r.pass))
}

fn run_statistic(cfg: &RunConfig, stat: Statistic) -> Result<Outcome, CliError> {
    let r = empirical_statistic(&cfg.spec()?, &stat, cfg.truncation())?;
    emit(cfg, &[report_row(cfg, &r)])?;
    Ok(true)
}

pub fn ratios(cfg: &RunConfig, alpha: &str, beta: &str) -> Result<Outcome, CliError> {
    let a = parse_shifts(alpha)?;
    let b = parse_shifts(beta)?;
    run_statistic(cfg, Statistic::Ratio { a, b })
}

pub fn twisted(cfg: &RunConfig, alpha: &str, h: &str) -> Result<Outcome, CliError> {
    let a = parse_shifts(alpha)?;
    let h = parse_poly(cfg, h)?;
    run_statistic(cfg, Statistic::Twisted { a, h })
}

pub fn density(cfg: &RunConfig, phihat: &std::path::Path, n: usize) -> Result<Outcome, CliError> {
    let f = File::open(phihat)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", phihat.display())))?;
    let full = PhiHat::from_csv(cfg.g, BufReader::new(f))?;
    if full.support() < n {
        return Err(ffratios::Error::InvalidArgument(format!(
            "{} holds samples up to n = {} but --N is {n}",
            phihat.display(),
            full.support()
        ))
        .into());
    }
    let phi = PhiHat::new(cfg.g, full.samples()[..=n].to_vec())?;
    run_statistic(cfg, Statistic::Density { phi })
}

pub fn negmom(cfg: &RunConfig, betas: &[f64], m: f64, ts: &[f64]) -> Result<Outcome, CliError> {
    let rows = negmoment_scan(cfg.field, &[cfg.g], betas, m, ts, cfg.mode, cfg.threads)?;
    emit(cfg, &rows)?;
    Ok(true)
}

pub struct BoundsArgs<'a> {
    pub betas: Option<&'a [f64]>,
    pub n_trunc: Option<&'a [usize]>,
    pub genera: Option<&'a [usize]>,
    pub m: f64,
    pub ts: &'a [f64],
}

pub fn boundslab(cfg: &RunConfig, suite: Suite, args: BoundsArgs<'_>) -> Result<Outcome, CliError> {
    match suite {
        Suite::Trig => {
            let rows = trig_sum_grid()?;
            emit(cfg, &rows)?;
            Ok(rows.iter().all(|r| r.diff.abs() <= TRIG_SUM_BOUND))
        }
        Suite::Lb => {
            let betas = args.betas.unwrap_or(&[0.1, 0.3]);
            let default_n = [2, 4, 2 * cfg.g];
            let ns = args.n_trunc.unwrap_or(&default_n);
            let t = args.ts.first().copied().unwrap_or(0.0);
            let rows = lemma_lb_scan(&cfg.spec()?, betas, ns, t)?;
            emit(cfg, &rows)?;
            Ok(rows.iter().all(|r| r.min_gap >= LB_GAP_FLOOR))
        }
        Suite::Scan => {
            let betas = args.betas.unwrap_or(&[0.2, 0.3, 0.4]);
            let default_g = [cfg.g];
            let genera = args.genera.unwrap_or(&default_g);
            let mut rows = Vec::new();
            for &g in genera {
                cfg.spec_for_genus(g)?;
                rows.extend(negmoment_scan(cfg.field, &[g], betas, args.m, args.ts, cfg.mode, cfg.threads)?);
            }
            emit(cfg, &rows)?;
            // the frozen bound is calibrated for the first moment at t = 0
            let calibrated = args.m == 1.0 && args.ts == [0.0];
            Ok(!calibrated || rows.iter().all(|r| r.ratio <= NEGMOMENT_RATIO_BOUND && r.n_excluded == 0))
        }
    }
}
