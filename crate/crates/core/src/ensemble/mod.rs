//! Exhaustive or sampled runs over `H_{2g+1}` with deterministic chunked
//! reductions, and the empirical statistics paired with their predictions.

mod report;
mod stats;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::ffpoly::{family_size, FieldParams, PolyFq};
use crate::lfun::{LPolynomial, PrimeSymbolTables};
use crate::sum::{ComplexSum, NeumaierSum};

pub use report::{write_reports, EnsembleReport, OutputFormat, ReportRow};
pub use stats::{ZERO_L, 
    chi_square_avg_predicted, density_routes, empirical_statistic, predicted_error_scale,
    DensityRoutes, Statistic,
};

/// Largest `q^{2g+1}` walked in exhaustive mode.
pub const EXHAUSTIVE_BUDGET: u128 = 10_000_000;
pub const DEFAULT_CHUNK: usize = 4096;

/// How members of `H_{2g+1}` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleMode {
    /// Every square-free monic `D` in canonical index order.
    Exhaustive,
    /// `count` draws, uniform over monic polynomials of degree `2g+1` with
    /// non-square-free draws rejected, from a ChaCha8 stream seeded by
    /// `seed` (`ChaCha8Rng::seed_from_u64`).
    Sampled { count: u64, seed: u64 },
}

impl SampleMode {
    pub fn seed(&self) -> Option<u64> {
        match self {
            SampleMode::Exhaustive => None,
            SampleMode::Sampled { seed, .. } => Some(*seed),
        }
    }
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleMode::Exhaustive => write!(f, "exhaustive"),
            SampleMode::Sampled { count, .. } => write!(f, "sample:{count}"),
        }
    }
}

impl FromStr for SampleMode {
    type Err = Error;

    /// `exhaustive` or `sample:<count>`; the seed is set separately.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exhaustive" {
            return Ok(SampleMode::Exhaustive);
        }
        if let Some(n) = s.strip_prefix("sample:") {
            let count: u64 = n
                .trim()
                .parse()
                .map_err(|_| parse_err(s, "sample count must be a positive integer"))?;
            if count == 0 {
                return Err(parse_err(s, "sample count must be positive"));
            }
            return Ok(SampleMode::Sampled { count, seed: 0 });
        }
        Err(parse_err(s, "expected exhaustive or sample:<count>"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub field: FieldParams,
    pub g: usize,
    pub mode: SampleMode,
    /// Members per work unit; fixes the reduction tree.
    pub chunk_size: usize,
    /// Worker threads, `0` for the rayon default. Never affects results.
    pub threads: usize,
}

impl EnsembleSpec {
    pub fn new(field: FieldParams, g: usize, mode: SampleMode) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidArgument("genus must be at least 1".into()));
        }
        let spec = Self {
            field,
            g,
            mode,
            chunk_size: DEFAULT_CHUNK,
            threads: 0,
        };
        spec.candidates()?;
        Ok(spec)
    }

    pub fn exhaustive(field: FieldParams, g: usize) -> Result<Self> {
        Self::new(field, g, SampleMode::Exhaustive)
    }

    pub fn sampled(field: FieldParams, g: usize, count: u64, seed: u64) -> Result<Self> {
        Self::new(field, g, SampleMode::Sampled { count, seed })
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size.max(1);
        self
    }

    pub fn degree(&self) -> usize {
        2 * self.g + 1
    }

    /// `q^{2g+1}`, the number of monic candidates.
    fn candidates(&self) -> Result<u64> {
        let total = self.field.power(self.degree() as u32)?;
        if self.mode == SampleMode::Exhaustive && total > EXHAUSTIVE_BUDGET {
            return Err(Error::BudgetExceeded {
                count: total,
                budget: EXHAUSTIVE_BUDGET,
            });
        }
        u64::try_from(total).map_err(|_| Error::Overflow("number of candidates"))
    }

    /// Number of members visited: `|H_{2g+1}|` or the sample count.
    pub fn member_count(&self) -> u128 {
        match self.mode {
            SampleMode::Exhaustive => family_size(self.field, self.degree()),
            SampleMode::Sampled { count, .. } => count as u128,
        }
    }

    /// Canonical indices of the sampled members, in draw order.
    fn sample_indices(&self, count: u64, seed: u64) -> Result<Vec<u64>> {
        let top = self.candidates()?;
        let n = self.degree();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count as usize);
        while (out.len() as u64) < count {
            let idx = rng.gen_range(0..top);
            if PolyFq::monic_from_index(self.field, n, idx).is_squarefree_unchecked() {
                out.push(idx);
            }
        }
        Ok(out)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
    }
}

/// The members of `H_{2g+1}` in the order fixed by the spec.
pub fn iterate_h(spec: &EnsembleSpec) -> Result<Box<dyn Iterator<Item = PolyFq>>> {
    let field = spec.field;
    let n = spec.degree();
    match spec.mode {
        SampleMode::Exhaustive => {
            let top = spec.candidates()?;
            Ok(Box::new(
                (0..top)
                    .map(move |i| PolyFq::monic_from_index(field, n, i))
                    .filter(|d| d.is_squarefree_unchecked()),
            ))
        }
        SampleMode::Sampled { count, seed } => {
            let idx = spec.sample_indices(count, seed)?;
            Ok(Box::new(
                idx.into_iter()
                    .map(move |i| PolyFq::monic_from_index(field, n, i)),
            ))
        }
    }
}

/// One member with its L-polynomial.
#[derive(Debug, Clone)]
pub struct Member {
    pub l: LPolynomial,
}

impl Member {
    pub fn d(&self) -> &PolyFq {
        &self.l.source
    }
}

/// Runs `step` over every member, chunk by chunk. Each chunk starts from
/// `init()` and sees its members in order; chunk states come back in chunk
/// order, so the caller's merge is independent of the thread count.
pub fn fold_chunks<T, I, S>(spec: &EnsembleSpec, init: I, step: S) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> T + Sync,
    S: Fn(&mut T, &Member) -> Result<()> + Sync,
{
    let field = spec.field;
    let g = spec.g;
    let n = spec.degree();
    let tables = PrimeSymbolTables::shared(field, g, n + 1)?;
    let (indices, total): (Option<Vec<u64>>, u64) = match spec.mode {
        SampleMode::Exhaustive => (None, spec.candidates()?),
        SampleMode::Sampled { count, seed } => {
            let idx = spec.sample_indices(count, seed)?;
            let len = idx.len() as u64;
            (Some(idx), len)
        }
    };
    let chunk = spec.chunk_size.max(1) as u64;
    let n_chunks = total.div_ceil(chunk);
    let run_chunk = |c: u64| -> Result<T> {
        let mut state = init();
        let mut sums = vec![0i64; g + 1];
        let mut nonzero = vec![0i64; g + 1];
        let lo = c * chunk;
        let hi = (lo + chunk).min(total);
        for pos in lo..hi {
            let idx = match &indices {
                None => pos,
                Some(v) => v[pos as usize],
            };
            let d = PolyFq::monic_from_index(field, n, idx);
            if indices.is_none() && !d.is_squarefree_unchecked() {
                continue;
            }
            tables.degree_sums_digits(d.coeffs(), &mut sums, &mut nonzero);
            let l = LPolynomial::from_prime_sums(field, g, &sums, &nonzero, d)?;
            let m = Member { l };
            step(&mut state, &m).map_err(|e| Error::Functional {
                poly: m.d().to_string(),
                source: Box::new(e),
            })?;
        }
        Ok(state)
    };
    let pool = spec.pool()?;
    let results: Vec<Result<T>> =
        pool.install(|| (0..n_chunks).into_par_iter().map(run_chunk).collect());
    results.into_iter().collect()
}

/// Mean of a complex-valued functional with exclusions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Average {
    pub mean: Complex64,
    /// Standard error of the mean (zero in exhaustive mode, where the mean
    /// is exact up to rounding).
    pub std_err: f64,
    pub n_used: u64,
    pub n_excluded: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    sum: ComplexSum,
    sq: NeumaierSum,
    used: u64,
    excluded: u64,
}

impl Acc {
    fn push(&mut self, v: Option<Complex64>) {
        match v {
            Some(z) => {
                self.sum.add(z);
                self.sq.add(z.norm_sqr());
                self.used += 1;
            }
            None => self.excluded += 1,
        }
    }

    fn merge(&mut self, o: &Acc) {
        self.sum.merge(&o.sum);
        self.sq.merge(&o.sq);
        self.used += o.used;
        self.excluded += o.excluded;
    }

    fn finish(&self, sampled: bool) -> Average {
        let n = self.used as f64;
        let mean = if self.used > 0 {
            self.sum.value() / n
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        };
        let std_err = if sampled && self.used > 1 {
            let var = (self.sq.value() / n - mean.norm_sqr()).max(0.0) * n / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Average {
            mean,
            std_err,
            n_used: self.used,
            n_excluded: self.excluded,
        }
    }
}

/// Means of several functionals evaluated together; `f` returns one entry
/// per output, `None` marking an excluded member.
pub fn average_vec<F>(spec: &EnsembleSpec, outputs: usize, f: F) -> Result<Vec<Average>>
where
    F: Fn(&Member) -> Result<Vec<Option<Complex64>>> + Sync,
{
    let chunks = fold_chunks(
        spec,
        || vec![Acc::default(); outputs],
        |accs, m| {
            let vals = f(m)?;
            if vals.len() != outputs {
                return Err(Error::InvalidArgument(format!(
                    "functional returned {} values, expected {outputs}",
                    vals.len()
                )));
            }
            for (a, v) in accs.iter_mut().zip(vals) {
                a.push(v);
            }
            Ok(())
        },
    )?;
    let mut total = vec![Acc::default(); outputs];
    for c in &chunks {
        for (t, a) in total.iter_mut().zip(c) {
            t.merge(a);
        }
    }
    let sampled = matches!(spec.mode, SampleMode::Sampled { .. });
    Ok(total.iter().map(|a| a.finish(sampled)).collect())
}

/// `(1/|H|) sum_D f(D)` over the members of the spec.
pub fn average<F>(spec: &EnsembleSpec, f: F) -> Result<Average>
where
    F: Fn(&Member) -> Result<Option<Complex64>> + Sync,
{
    let mut v = average_vec(spec, 1, |m| Ok(vec![f(m)?]))?;
    Ok(v.remove(0))
}
