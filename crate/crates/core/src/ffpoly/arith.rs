use num_rational::Ratio;

use super::{factor, Factorization, PolyFq};
use crate::error::{Error, Result};

/// Möbius, von Mangoldt and `nu` of a monic polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithValues {
    pub mobius: i8,
    /// `Λ(P^k) = d(P)`, measured in degree units.
    pub von_mangoldt: u32,
    /// `nu(f) = prod_P 1 / ord_P(f)!`.
    pub nu: Ratio<u64>,
}

impl ArithValues {
    pub fn from_factorization(fx: &Factorization) -> Self {
        let mobius = if fx.is_squarefree() {
            if fx.factors.len() % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            0
        };
        let von_mangoldt = match fx.factors.as_slice() {
            [(p, _)] => p.deg() as u32,
            _ => 0,
        };
        let denom: u64 = fx
            .factors
            .iter()
            .map(|&(_, e)| (1..=e as u64).product::<u64>())
            .product();
        Self {
            mobius,
            von_mangoldt,
            nu: Ratio::new(1, denom),
        }
    }
}

pub fn arith_functions(f: &PolyFq) -> Result<ArithValues> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_string()));
    }
    Ok(ArithValues::from_factorization(&factor(f)?))
}

/// Möbius function of a positive integer.
pub fn integer_mobius(mut n: u64) -> i8 {
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}
