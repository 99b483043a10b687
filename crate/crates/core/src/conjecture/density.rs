use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::ffpoly::{prime_count, FieldParams};
use crate::lfun::TrigPoly;
use crate::sum::NeumaierSum;

/// Samples `Phihat(n / (2g))` for `n = 0..=N`; `Phihat` is even and vanishes
/// beyond `N / (2g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiHat {
    g: usize,
    samples: Vec<f64>,
}

impl PhiHat {
    pub fn new(g: usize, samples: Vec<f64>) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidArgument("genus must be positive".into()));
        }
        if samples.is_empty() || samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(
                "Phihat needs finite samples starting at n = 0".into(),
            ));
        }
        Ok(Self { g, samples })
    }

    /// Samples `f(n / (2g))` of a function on the real line.
    pub fn from_fn(g: usize, support: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let two_g = 2.0 * g as f64;
        Self::new(g, (0..=support).map(|n| f(n as f64 / two_g)).collect())
    }

    /// Two-column CSV `n,value`, with rows `n = 0, 1, ..., N` in order. A
    /// header line is allowed.
    pub fn from_csv<R: Read>(g: usize, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut samples = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(parse_err(&format!("{rec:?}"), "expected two columns n,value"));
            }
            let (n, v) = (&rec[0], &rec[1]);
            let Ok(n) = n.parse::<usize>() else {
                if row == 0 && samples.is_empty() {
                    continue;
                }
                return Err(parse_err(n, "grid index must be a non-negative integer"));
            };
            if n != samples.len() {
                return Err(parse_err(
                    &n.to_string(),
                    format!("expected grid index {}, samples must be consecutive from 0", samples.len()),
                ));
            }
            let v: f64 = v.parse().map_err(|_| parse_err(v, "not a number"))?;
            samples.push(v);
        }
        Self::new(g, samples)
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    /// The support bound `N`.
    pub fn support(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `Phihat(n / (2g))`, zero beyond the support.
    pub fn at_half_grid(&self, n: usize) -> f64 {
        self.samples.get(n).copied().unwrap_or(0.0)
    }

    /// `Phihat(n / g)`.
    pub fn at_grid(&self, n: usize) -> f64 {
        self.at_half_grid(2 * n)
    }

    /// The periodic test function `F(theta) = sum_m Phi(2g(theta + m))`, a
    /// trigonometric polynomial with coefficients `Phihat(n/(2g)) / (2g)`.
    pub fn trig_poly(&self) -> TrigPoly {
        let scale = 1.0 / (2 * self.g) as f64;
        TrigPoly::new(self.samples.iter().map(|s| s * scale).collect())
            .expect("samples are finite and nonempty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPrediction {
    pub value: f64,
    /// Set when `N >= 4g`, outside the range where the formula is an
    /// asymptotic.
    pub outside_window: bool,
}

/// `Phihat(0) - (1/g) sum_{n=1}^{g} Phihat(n/g) - Phihat(1) / (g (q-1))
///  + (1/g) sum_{n=1}^{N/2} Phihat(n/g) q^{-n} sum_{d(P) | n} d(P) / (|P| + 1)`.
pub fn density_main(field: FieldParams, phi: &PhiHat) -> Result<DensityPrediction> {
    let g = phi.genus();
    let n_support = phi.support();
    let q = field.q() as f64;
    let gf = g as f64;
    let mut acc = NeumaierSum::new();
    acc.add(phi.at_half_grid(0));
    for n in 1..=g {
        acc.add(-phi.at_grid(n) / gf);
    }
    acc.add(-phi.at_grid(g) / (gf * (q - 1.0)));
    for n in 1..=n_support / 2 {
        let v = phi.at_grid(n);
        if v == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for d in (1..=n).filter(|d| n % d == 0) {
            let count = prime_count(field, d)? as f64;
            inner += d as f64 * count / (q.powi(d as i32) + 1.0);
        }
        acc.add(v * q.powi(-(n as i32)) * inner / gf);
    }
    Ok(DensityPrediction {
        value: acc.value(),
        outside_window: n_support >= 4 * g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(y: f64) -> f64 {
        (1.0 - y.abs()).max(0.0)
    }

    #[test]
    fn constant_only() {
        let field = FieldParams::new(5).unwrap();
        let phi = PhiHat::new(3, vec![0.7]).unwrap();
        let p = density_main(field, &phi).unwrap();
        assert_eq!(p.value, 0.7);
        assert!(!p.outside_window);
    }

    #[test]
    fn first_prime_term() {
        // with samples only at n/(2g) = 0 and 1/g, the value is
        // Phihat(0) - Phihat(1/g)/g + (1/g) Phihat(1/g) q^{-1} q/(q+1)
        let field = FieldParams::new(5).unwrap();
        let g = 3;
        let phi = PhiHat::new(g, vec![1.0, 0.0, 0.4]).unwrap();
        let p = density_main(field, &phi).unwrap();
        let want = 1.0 - 0.4 / 3.0 + 0.4 / 3.0 * (1.0 / 5.0) * (5.0 / 6.0);
        assert!((p.value - want).abs() < 1e-15);
    }

    #[test]
    fn triangle_window_flag_and_grid() {
        let field = FieldParams::new(5).unwrap();
        let phi = PhiHat::from_fn(3, 6, triangle).unwrap();
        assert_eq!(phi.at_grid(1), 1.0 - 1.0 / 3.0);
        assert_eq!(phi.at_grid(3), 0.0);
        assert!(!density_main(field, &phi).unwrap().outside_window);
        let wide = PhiHat::from_fn(3, 12, |y| triangle(y / 2.0)).unwrap();
        assert!(density_main(field, &wide).unwrap().outside_window);
        let h = phi.trig_poly();
        assert_eq!(h.support(), 6);
        assert!((h.hat(2) - phi.at_half_grid(2) / 6.0).abs() < 1e-16);
    }

    #[test]
    fn csv_samples() {
        let text = "n,value\n0,1.0\n1,0.5\n2,0.25\n";
        let phi = PhiHat::from_csv(2, text.as_bytes()).unwrap();
        assert_eq!(phi.samples(), &[1.0, 0.5, 0.25]);
        assert!(PhiHat::from_csv(2, "0,1\n2,0.5\n".as_bytes()).is_err());
        assert!(PhiHat::from_csv(2, "0,1,3\n".as_bytes()).is_err());
    }
}
