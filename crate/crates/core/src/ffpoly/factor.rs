use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{enumerate_monic, integer_mobius, FieldParams, PolyFq};
use crate::error::{Error, Result};

/// `f = unit * prod prime^exponent` with distinct monic irreducible primes,
/// ordered by (degree, canonical index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u32,
    pub factors: Vec<(PolyFq, u32)>,
}

impl Factorization {
    pub fn multiply_back(&self, field: FieldParams) -> PolyFq {
        let mut acc = PolyFq::constant(field, self.unit);
        for (p, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul_unchecked(p);
            }
        }
        acc
    }

    /// Number of distinct primes.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

/// Rabin's irreducibility test.
pub fn is_irreducible(f: &PolyFq) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let (_, f) = f.make_monic();
    let field = f.field();
    let q = field.q() as u128;
    let x = PolyFq::x(field);
    // frob[i] = x^{q^i} mod f
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(x.rem_unchecked(&f));
    for i in 1..=n {
        let next = frob[i - 1].powmod_unchecked(q, &f);
        frob.push(next);
    }
    if frob[n] != x.rem_unchecked(&f) {
        return false;
    }
    prime_divisors(n).into_iter().all(|r| {
        let h = frob[n / r].sub_unchecked(&x);
        h.gcd_unchecked(&f).deg() == 0
    })
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `pi_q(d) = (1/d) sum_{e | d} mu(e) q^{d/e}`, exact.
pub fn prime_count(field: FieldParams, d: usize) -> Result<u128> {
    if d == 0 {
        return Err(Error::InvalidArgument("prime degree must be >= 1".into()));
    }
    let mut total: i128 = 0;
    for e in (1..=d).filter(|e| d % e == 0) {
        let mu = integer_mobius(e as u64) as i128;
        if mu == 0 {
            continue;
        }
        let pw = field.power((d / e) as u32)?;
        let pw = i128::try_from(pw).map_err(|_| Error::Overflow("prime count"))?;
        total += mu * pw;
    }
    Ok((total / d as i128) as u128)
}

/// Floating-point `pi_q(d)` for degrees beyond the exact integer range.
pub fn prime_count_f64(q: f64, d: usize) -> f64 {
    let mut total = 0.0;
    // largest terms last so the dominant q^d is added to an accurate remainder
    let mut divisors: Vec<usize> = (1..=d).filter(|e| d % e == 0).collect();
    divisors.reverse();
    for e in divisors {
        let mu = integer_mobius(e as u64) as f64;
        if mu != 0.0 {
            total += mu * q.powi((d / e) as i32);
        }
    }
    total / d as f64
}

/// Monic irreducibles listed explicitly up to `max_degree`, with the closed
/// form counts alongside.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    field: FieldParams,
    max_degree: usize,
    by_degree: Vec<Vec<PolyFq>>,
    counts: Vec<u128>,
}

impl PrimeTable {
    pub fn build(field: FieldParams, max_degree: usize) -> Result<Self> {
        let mut by_degree = vec![Vec::new()];
        let mut counts = vec![0];
        for d in 1..=max_degree {
            let primes: Vec<PolyFq> = if d == 1 {
                enumerate_monic(field, 1).collect()
            } else {
                enumerate_monic(field, d).filter(is_irreducible).collect()
            };
            counts.push(prime_count(field, d)?);
            debug_assert_eq!(primes.len() as u128, counts[d]);
            by_degree.push(primes);
        }
        Ok(Self {
            field,
            max_degree,
            by_degree,
            counts,
        })
    }

    /// A process-wide cached table covering at least `max_degree`.
    pub fn shared(field: FieldParams, max_degree: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<PrimeTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap().get(&field.q()) {
            if t.max_degree >= max_degree {
                return Ok(Arc::clone(t));
            }
        }
        let table = Arc::new(Self::build(field, max_degree)?);
        let mut guard = cache.lock().unwrap();
        let entry = guard.entry(field.q()).or_insert_with(|| Arc::clone(&table));
        if entry.max_degree < max_degree {
            *entry = Arc::clone(&table);
        }
        Ok(table)
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Primes of degree `d` (empty beyond `max_degree`).
    pub fn primes_of_degree(&self, d: usize) -> &[PolyFq] {
        self.by_degree.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, d: usize) -> u128 {
        self.counts.get(d).copied().unwrap_or(0)
    }

    /// Primes in (degree, index) order together with their degrees.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &PolyFq)> {
        self.by_degree
            .iter()
            .enumerate()
            .flat_map(|(d, ps)| ps.iter().map(move |p| (d, p)))
    }

    pub fn len(&self) -> usize {
        self.by_degree.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Trial division by the tabulated primes up to half the degree; the
    /// cofactor left over is prime.
    pub fn factor(&self, f: &PolyFq) -> Result<Factorization> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if f.field() != self.field {
            return Err(Error::FieldMismatch(f.q(), self.field.q()));
        }
        let half = f.deg() / 2;
        if half > self.max_degree {
            return Err(Error::InvalidArgument(format!(
                "prime table reaches degree {}, factoring degree {} needs {}",
                self.max_degree,
                f.deg(),
                half
            )));
        }
        let (unit, mut rest) = f.make_monic();
        let mut factors = Vec::new();
        'degrees: for d in 1..=half {
            for p in &self.by_degree[d] {
                if rest.deg() < 2 * d {
                    break 'degrees;
                }
                let divides = if d == 1 {
                    rest.eval(self.field.sub(0, p.coeff(0))) == 0
                } else {
                    rest.rem_unchecked(p).is_zero()
                };
                if !divides {
                    continue;
                }
                let mut e = 0;
                loop {
                    let (quot, r) = rest.divmod_unchecked(p);
                    if !r.is_zero() {
                        break;
                    }
                    rest = quot;
                    e += 1;
                }
                factors.push((p.clone(), e));
            }
        }
        if rest.deg() > 0 {
            factors.push((rest, 1));
        }
        factors.sort_by_key(|(p, _)| (p.deg(), p.monic_index()));
        Ok(Factorization { unit, factors })
    }
}

/// Factors `f` using the shared prime table for its field.
pub fn factor(f: &PolyFq) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let table = PrimeTable::shared(f.field(), (f.deg() / 2).max(1))?;
    table.factor(f)
}
