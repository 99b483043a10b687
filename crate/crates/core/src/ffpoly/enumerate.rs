use super::{FieldParams, PolyFq};

/// Iterator over the `q^n` monic polynomials of degree `n` in canonical
/// index order.
#[derive(Debug, Clone)]
pub struct MonicIter {
    field: FieldParams,
    degree: usize,
    next: u64,
    end: u64,
}

impl Iterator for MonicIter {
    type Item = PolyFq;

    fn next(&mut self) -> Option<PolyFq> {
        if self.next >= self.end {
            return None;
        }
        let f = PolyFq::monic_from_index(self.field, self.degree, self.next);
        self.next += 1;
        Some(f)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for MonicIter {}

pub fn enumerate_monic(field: FieldParams, degree: usize) -> MonicIter {
    let end = (field.q() as u64)
        .checked_pow(degree as u32)
        .expect("q^n exceeds u64 range");
    MonicIter {
        field,
        degree,
        next: 0,
        end,
    }
}

/// `|H_n|`: the number of monic square-free polynomials of degree `n`.
pub fn family_size(field: FieldParams, n: usize) -> u128 {
    let q = field.q() as u128;
    match n {
        0 => 1,
        1 => q,
        _ => q.pow(n as u32) - q.pow(n as u32 - 1),
    }
}
