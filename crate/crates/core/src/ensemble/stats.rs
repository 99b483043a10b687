use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{average, fold_chunks, EnsembleReport, EnsembleSpec, Member};
use crate::bounds::negmoment_shape;
use crate::characters::jacobi_euclid;
use crate::conjecture::{
    density_main, ratios_main, twisted_main, PhiHat, ShiftSet, Truncation, TwistPoly,
};
use crate::error::{Error, Result};
use crate::ffpoly::{factor, PolyFq};
use crate::lfun::{evaluate_shifted, explicit_formula_sides, lambda_sums_from_coefficients, zeros};
use crate::sum::NeumaierSum;

/// L-values below this modulus are treated as zeros of a denominator.
pub const ZERO_L: f64 = 1e-14;

/// Ensemble statistics with a predicted counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Statistic {
    /// `prod_j L(1/2 + alpha_j) / prod_j L(1/2 + beta_j)`.
    Ratio { a: ShiftSet, b: ShiftSet },
    /// `prod_j L(1/2 + alpha_j) chi_D(h)`.
    Twisted { a: ShiftSet, h: PolyFq },
    /// `prod_j |L(1/2 + beta_j + i t_j)|^{-m}`.
    NegMoment { b: ShiftSet, t: Vec<f64>, m: f64 },
    /// `sum_j F(theta_j)` for the periodic test function built from `Phihat`.
    Density { phi: PhiHat },
    /// `chi_D(f^2)`.
    ChiSquareAvg { f: PolyFq },
}

impl Statistic {
    pub fn id(&self) -> &'static str {
        match self {
            Statistic::Ratio { .. } => "ratio",
            Statistic::Twisted { .. } => "twisted",
            Statistic::NegMoment { .. } => "negmoment",
            Statistic::Density { .. } => "density",
            Statistic::ChiSquareAvg { .. } => "chi_square_avg",
        }
    }

    pub fn params(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        match self {
            Statistic::Ratio { a, b } => format!("A={a} B={b}"),
            Statistic::Twisted { a, h } => format!("A={a} h={}", h.to_symbolic()),
            Statistic::NegMoment { b, t, m } => format!("B={b} t={} m={m}", join(t)),
            Statistic::Density { phi } => {
                format!("N={} phihat={}", phi.support(), join(phi.samples()))
            }
            Statistic::ChiSquareAvg { f } => format!("f={}", f.to_symbolic()),
        }
    }
}

fn max_abs_re(s: &ShiftSet) -> f64 {
    s.shifts().iter().map(|z| z.re.abs()).fold(0.0, f64::max)
}

/// The proven error-term size with the epsilons dropped;
/// NaN where no error term is stated.
pub fn predicted_error_scale(stat: &Statistic, q: u32, g: usize) -> f64 {
    let q = q as f64;
    let g = g as f64;
    match stat {
        Statistic::Ratio { a, b } => {
            let alpha = max_abs_re(a);
            let beta = b.shifts().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            let exponent = match a.len() {
                1 if a.shifts()[0].re >= 0.0 => beta * (3.0 + 2.0 * alpha),
                1 => beta * (3.0 - 4.0 * alpha),
                2 => beta * ((1.0 - 4.0 * alpha) / (1.0 + beta)).min((1.0 - 2.0 * alpha) / (2.0 + beta)),
                3 => beta * ((0.25 - 4.0 * alpha) / beta).min((0.5 - 4.0 * alpha) / (3.0 + beta)),
                _ => return f64::NAN,
            };
            q.powf(-g * exponent)
        }
        Statistic::Twisted { a, h } => {
            let alpha = max_abs_re(a);
            let hn = h.norm();
            match a.len() {
                1 => q.powf(-1.5 * g + 2.0 * g * alpha),
                2 => hn.sqrt() * q.powf(-(1.0 - 2.0 * alpha) * g) + q.powf(-(1.0 - 4.0 * alpha) * g),
                3 => {
                    let h1 = TwistPoly::new(h).map(|t| t.h1.norm()).unwrap_or(1.0);
                    hn.sqrt() * q.powf(-(0.5 - 4.0 * alpha) * g)
                        + q.powf(-(1.0 - 6.0 * alpha) * g)
                        + h1.powf(-0.75) * q.powf(-(0.25 - 4.0 * alpha) * g)
                }
                _ => f64::NAN,
            }
        }
        Statistic::NegMoment { .. } => f64::NAN,
        Statistic::Density { phi } => q.powf(phi.support() as f64 / 2.0 - 2.0 * g),
        Statistic::ChiSquareAvg { .. } => q.powf(-2.0 * g),
    }
}

/// `prod_{P | f} (1 + 1/|P|)^{-1}`.
pub fn chi_square_avg_predicted(f: &PolyFq) -> Result<f64> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_string()));
    }
    if f.is_constant() {
        return Ok(1.0);
    }
    Ok(factor(f)?
        .factors
        .iter()
        .map(|(p, _)| 1.0 / (1.0 + 1.0 / p.norm()))
        .product())
}

fn product_at(m: &Member, shifts: &ShiftSet) -> Complex64 {
    shifts
        .shifts()
        .iter()
        .map(|&a| evaluate_shifted(&m.l, a, 0.0))
        .product()
}

/// Empirical average of `stat` over the spec's members with its predicted
/// value.
pub fn empirical_statistic(spec: &EnsembleSpec, stat: &Statistic, trunc: Truncation) -> Result<EnsembleReport> {
    let field = spec.field;
    let g = spec.g;
    let (predicted, avg) = match stat {
        Statistic::Ratio { a, b } => {
            let predicted = ratios_main(field, a, b, g, trunc)?.value;
            let avg = average(spec, |m| {
                let den = product_at(m, b);
                Ok((den.norm() >= ZERO_L).then(|| product_at(m, a) / den))
            })?;
            (predicted, avg)
        }
        Statistic::Twisted { a, h } => {
            if h.field() != field {
                return Err(Error::FieldMismatch(h.q(), field.q()));
            }
            let tw = TwistPoly::new(h)?;
            let predicted = twisted_main(a, &tw, g, trunc)?.value;
            let avg = average(spec, |m| {
                let chi = jacobi_euclid(m.d(), h);
                Ok(Some(if chi == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    product_at(m, a) * chi as f64
                }))
            })?;
            (predicted, avg)
        }
        Statistic::NegMoment { b, t, m } => {
            if b.len() != t.len() || b.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "{} denominator shifts but {} heights",
                    b.len(),
                    t.len()
                )));
            }
            if !(*m >= 0.0) {
                return Err(Error::InvalidArgument(format!("moment exponent {m} must be >= 0")));
            }
            b.check_denominator()?;
            let betas: Vec<f64> = b.shifts().iter().map(|z| z.re).collect();
            let predicted = Complex64::new(negmoment_shape(&betas, t, *m, g)?, 0.0);
            let avg = average(spec, |mem| {
                let mut acc = 1.0;
                for (&beta, &tj) in b.shifts().iter().zip(t) {
                    let v = evaluate_shifted(&mem.l, beta, tj).norm();
                    if v < ZERO_L {
                        return Ok(None);
                    }
                    acc *= v.powf(-*m);
                }
                Ok(Some(Complex64::new(acc, 0.0)))
            })?;
            (predicted, avg)
        }
        Statistic::Density { phi } => {
            check_density_genus(phi, g)?;
            let predicted = Complex64::new(density_main(field, phi)?.value, 0.0);
            let h = phi.trig_poly();
            let avg = average(spec, |m| {
                let z = zeros(&m.l)?;
                let s: NeumaierSum = z.thetas.iter().map(|&t| h.eval(t)).collect();
                Ok(Some(Complex64::new(s.value(), 0.0)))
            })?;
            (predicted, avg)
        }
        Statistic::ChiSquareAvg { f } => {
            let predicted = Complex64::new(chi_square_avg_predicted(f)?, 0.0);
            let avg = average(spec, |m| {
                let s = jacobi_euclid(m.d(), f);
                Ok(Some(Complex64::new((s * s) as f64, 0.0)))
            })?;
            (predicted, avg)
        }
    };
    Ok(EnsembleReport::new(
        stat.id(),
        spec,
        stat.params(),
        avg.mean,
        predicted,
        predicted_error_scale(stat, field.q(), g),
        avg.std_err,
        avg.n_excluded,
    ))
}

fn check_density_genus(phi: &PhiHat, g: usize) -> Result<()> {
    if phi.genus() != g {
        return Err(Error::InvalidArgument(format!(
            "Phihat sampled on the grid n/(2*{}) but the ensemble has genus {g}",
            phi.genus()
        )));
    }
    Ok(())
}

/// The one-level density statistic computed two ways for every member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRoutes {
    /// Mean of `sum_j F(theta_j)` over the zeros.
    pub via_zeros: f64,
    /// Mean of the prime side of the explicit formula.
    pub via_explicit: f64,
    /// Largest per-member difference of the two.
    pub max_discrepancy: f64,
    pub members: u64,
}

pub fn density_routes(spec: &EnsembleSpec, phi: &PhiHat) -> Result<DensityRoutes> {
    check_density_genus(phi, spec.g)?;
    let h = phi.trig_poly();
    let n = h.support();
    let chunks = fold_chunks(
        spec,
        || (NeumaierSum::new(), NeumaierSum::new(), 0.0f64, 0u64),
        |st, m| {
            let z = zeros(&m.l)?;
            let lam = lambda_sums_from_coefficients(&m.l, n)?;
            let sides = explicit_formula_sides(&m.l, &z, &h, &lam)?;
            st.0.add(sides.zero_side);
            st.1.add(sides.prime_side);
            st.2 = st.2.max(sides.residual());
            st.3 += 1;
            Ok(())
        },
    )?;
    let (mut a, mut b, mut worst, mut count) = (NeumaierSum::new(), NeumaierSum::new(), 0.0f64, 0u64);
    for c in &chunks {
        a.merge(&c.0);
        b.merge(&c.1);
        worst = worst.max(c.2);
        count += c.3;
    }
    Ok(DensityRoutes {
        via_zeros: a.value() / count as f64,
        via_explicit: b.value() / count as f64,
        max_discrepancy: worst,
        members: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::FieldParams;

    fn f5() -> FieldParams {
        FieldParams::new(5).unwrap()
    }

    #[test]
    fn chi_square_average_small_genus() {
        let spec = EnsembleSpec::exhaustive(f5(), 2).unwrap();
        let f = PolyFq::x(f5());
        let r = empirical_statistic(&spec, &Statistic::ChiSquareAvg { f }, Truncation::default()).unwrap();
        assert!((r.predicted.re - 5.0 / 6.0).abs() < 1e-15);
        assert!(r.abs_err <= 10.0 * 5f64.powi(-4), "{}", r.abs_err);
    }

    #[test]
    fn negative_moment_at_zero_exponent() {
        let spec = EnsembleSpec::exhaustive(f5(), 1).unwrap();
        let stat = Statistic::NegMoment {
            b: ShiftSet::real(&[0.3]),
            t: vec![0.0],
            m: 0.0,
        };
        let r = empirical_statistic(&spec, &stat, Truncation::default()).unwrap();
        assert_eq!(r.empirical, Complex64::new(1.0, 0.0));
        let tiny = Statistic::NegMoment {
            b: ShiftSet::real(&[0.3]),
            t: vec![0.0],
            m: 1e-6,
        };
        let r = empirical_statistic(&spec, &tiny, Truncation::default()).unwrap();
        assert!((r.empirical.re - 1.0).abs() < 1e-5);
        assert_eq!(r.n_excluded, 0);
    }

    #[test]
    fn density_routes_agree_per_member() {
        let spec = EnsembleSpec::exhaustive(f5(), 2).unwrap();
        let phi = PhiHat::from_fn(2, 4, |y| (1.0 - y.abs()).max(0.0)).unwrap();
        let r = density_routes(&spec, &phi).unwrap();
        assert_eq!(r.members, 2_500);
        assert!(r.max_discrepancy < 1e-8);
        let rep = empirical_statistic(&spec, &Statistic::Density { phi: phi.clone() }, Truncation::default()).unwrap();
        assert!((rep.empirical.re - r.via_zeros).abs() < 1e-12);
        let wrong = PhiHat::from_fn(3, 4, |y| (1.0 - y.abs()).max(0.0)).unwrap();
        assert!(density_routes(&spec, &wrong).is_err());
    }

    #[test]
    fn twisted_trivial_twist_matches_moment() {
        // h = 1: the twisted statistic is the plain first moment
        let spec = EnsembleSpec::exhaustive(f5(), 2).unwrap();
        let a = ShiftSet::real(&[0.2]);
        let r = empirical_statistic(
            &spec,
            &Statistic::Twisted { a: a.clone(), h: PolyFq::one(f5()) },
            Truncation::default(),
        )
        .unwrap();
        let direct = average(&spec, |m| Ok(Some(product_at(m, &a)))).unwrap();
        assert_eq!(r.empirical, direct.mean);
        assert!(r.rel_err < 0.05, "{r:?}");
    }

    #[test]
    fn error_scales() {
        let a = ShiftSet::real(&[0.1]);
        let b = ShiftSet::real(&[0.3]);
        let s = predicted_error_scale(&Statistic::Ratio { a: a.clone(), b: b.clone() }, 5, 4);
        assert!((s - 5f64.powf(-4.0 * 0.3 * 3.2)).abs() < 1e-15);
        let s = predicted_error_scale(&Statistic::Ratio { a: a.negated(), b }, 5, 4);
        assert!((s - 5f64.powf(-4.0 * 0.3 * 2.6)).abs() < 1e-15);
        let s = predicted_error_scale(&Statistic::Twisted { a, h: PolyFq::x(f5()) }, 5, 3);
        assert!((s - 5f64.powf(-4.5 + 0.6)).abs() < 1e-15);
    }
}
