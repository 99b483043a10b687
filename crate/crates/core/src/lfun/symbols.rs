use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::characters::jacobi_euclid;
use crate::error::{Error, Result};
use crate::ffpoly::{FieldParams, PolyFq, PrimeTable};

/// Residue tables beyond this size fall back to the Euclidean symbol.
const MAX_TABLE: u64 = 4096;
const MAX_PRIME_DEGREE: usize = 24;

struct PrimeEntry {
    prime: PolyFq,
    degree: usize,
    /// `x^i mod P` as digit rows, `input_len * degree` entries.
    rows: Vec<u32>,
    /// Quadratic character of `F_q[x]/P` indexed by the base-`q` digits of
    /// a residue; empty when the table would be too large.
    chi: Vec<i8>,
}

/// Precomputed data for evaluating `chi_D(P)` for every prime `P` of degree
/// at most `max_degree` and every `D` with at most `input_len` coefficients:
/// `D mod P` is a fixed linear map of the coefficients of `D`, and the
/// symbol is then a table lookup.
pub struct PrimeSymbolTables {
    field: FieldParams,
    max_degree: usize,
    input_len: usize,
    entries: Vec<PrimeEntry>,
}

impl std::fmt::Debug for PrimeSymbolTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeSymbolTables")
            .field("q", &self.field.q())
            .field("max_degree", &self.max_degree)
            .field("input_len", &self.input_len)
            .field("primes", &self.entries.len())
            .finish()
    }
}

impl PrimeSymbolTables {
    pub fn build(field: FieldParams, max_degree: usize, input_len: usize) -> Result<Self> {
        if max_degree > MAX_PRIME_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "prime degree {max_degree} exceeds the supported {MAX_PRIME_DEGREE}"
            )));
        }
        let table = PrimeTable::shared(field, max_degree.max(1))?;
        let x = PolyFq::x(field);
        let mut entries = Vec::with_capacity(table.len());
        for d in 1..=max_degree {
            for p in table.primes_of_degree(d) {
                let mut rows = Vec::with_capacity(input_len * d);
                let mut xi = PolyFq::one(field);
                for _ in 0..input_len {
                    rows.extend((0..d).map(|k| xi.coeff(k)));
                    xi = xi.mul_unchecked(&x).rem_unchecked(p);
                }
                let size = field.power(d as u32)? as u64;
                let chi = if size <= MAX_TABLE {
                    residue_character(field, p, size)
                } else {
                    Vec::new()
                };
                entries.push(PrimeEntry {
                    prime: p.clone(),
                    degree: d,
                    rows,
                    chi,
                });
            }
        }
        Ok(Self {
            field,
            max_degree,
            input_len,
            entries,
        })
    }

    /// A process-wide cached instance.
    pub fn shared(field: FieldParams, max_degree: usize, input_len: usize) -> Result<Arc<Self>> {
        type Key = (u32, usize, usize);
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<PrimeSymbolTables>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (field.q(), max_degree, input_len);
        if let Some(t) = cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(t));
        }
        let built = Arc::new(Self::build(field, max_degree, input_len)?);
        Ok(Arc::clone(
            cache.lock().unwrap().entry(key).or_insert(built),
        ))
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    /// The primes covered, in (degree, index) order.
    pub fn primes(&self) -> impl Iterator<Item = &PolyFq> {
        self.entries.iter().map(|e| &e.prime)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn symbol_of(&self, entry: &PrimeEntry, digits: &[u32]) -> i8 {
        let q = self.field.q() as u64;
        let d = entry.degree;
        let mut acc = [0u64; MAX_PRIME_DEGREE];
        for (i, &c) in digits.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let row = &entry.rows[i * d..(i + 1) * d];
            for (a, &r) in acc[..d].iter_mut().zip(row) {
                *a += c as u64 * r as u64;
            }
        }
        if !entry.chi.is_empty() {
            let idx = acc[..d]
                .iter()
                .rev()
                .fold(0u64, |i, &a| i * q + a % q);
            entry.chi[idx as usize]
        } else {
            let r: Vec<u32> = acc[..d].iter().map(|&a| (a % q) as u32).collect();
            jacobi_euclid(&PolyFq::from_residues(self.field, r), &entry.prime)
        }
    }

    fn check_input(&self, d: &PolyFq) -> Result<()> {
        if d.field() != self.field {
            return Err(Error::FieldMismatch(d.q(), self.field.q()));
        }
        if d.coeffs().len() > self.input_len {
            return Err(Error::InvalidArgument(format!(
                "polynomial of degree {} exceeds the table input length {}",
                d.coeffs().len().saturating_sub(1),
                self.input_len
            )));
        }
        Ok(())
    }

    /// `chi_D(P)` for every covered prime, in table order.
    pub fn symbols(&self, d: &PolyFq) -> Result<Vec<i8>> {
        self.check_input(d)?;
        Ok(self
            .entries
            .iter()
            .map(|e| self.symbol_of(e, d.coeffs()))
            .collect())
    }

    /// For each degree `e` in `1..=max_degree`: `sums[e] = sum_{d(P)=e}
    /// chi_D(P)` and `nonzero[e] = #{P : d(P)=e, P does not divide D}`.
    /// Index 0 of both outputs is unused.
    pub fn degree_sums(&self, d: &PolyFq, sums: &mut [i64], nonzero: &mut [i64]) -> Result<()> {
        self.check_input(d)?;
        self.degree_sums_digits(d.coeffs(), sums, nonzero);
        Ok(())
    }

    pub(crate) fn degree_sums_digits(&self, digits: &[u32], sums: &mut [i64], nonzero: &mut [i64]) {
        sums[..=self.max_degree].fill(0);
        nonzero[..=self.max_degree].fill(0);
        for e in &self.entries {
            let s = self.symbol_of(e, digits);
            sums[e.degree] += s as i64;
            nonzero[e.degree] += (s != 0) as i64;
        }
    }
}

/// `chi[idx(a)] = (a / P)` over all residues `a mod P`, by marking squares.
fn residue_character(field: FieldParams, p: &PolyFq, size: u64) -> Vec<i8> {
    let q = field.q() as u64;
    let d = p.deg();
    let mut chi = vec![-1i8; size as usize];
    chi[0] = 0;
    let index_of = |r: &PolyFq| {
        (0..d)
            .rev()
            .fold(0u64, |i, k| i * q + r.coeff(k) as u64)
    };
    for k in 1..size {
        let digits: Vec<u32> = (0..d)
            .scan(k, |rest, _| {
                let v = (*rest % q) as u32;
                *rest /= q;
                Some(v)
            })
            .collect();
        let a = PolyFq::from_residues(field, digits);
        let sq = a.mul_unchecked(&a).rem_unchecked(p);
        chi[index_of(&sq) as usize] = 1;
    }
    chi
}
