//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ffratios::bounds::{lemma_lb_scan, negmoment_scan, trig_sum_grid, LB_GAP_FLOOR, NEGMOMENT_RATIO_BOUND};
use ffratios::characters::{chi, char_sum_l1_sides, char_sum_l3, gauss_sum_closed, GaussSumEvaluator};
use ffratios::conjecture::{
    a_c, b_c, density_main, q_pow_neg, ratio_k1_closed, ratios_main, twisted_main, zeta_q, PhiHat, ShiftSet,
    Truncation, TwistPoly,
};
use ffratios::ensemble::{
    average_vec, density_routes, empirical_statistic, iterate_h, write_reports, EnsembleSpec, OutputFormat,
    SampleMode, Statistic,
};
use ffratios::ffpoly::{enumerate_monic, PrimeTable};
use ffratios::lfun::{
    approx_fe_product, evaluate_shifted, explicit_formula_residual, l_coefficients, l_coefficients_with,
    verify_functional_equation, zeros, CoefficientMode, TrigPoly,
};
use ffratios::{FieldParams, PolyFq, Result};

fn f5() -> FieldParams {
    FieldParams::new(5).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sampled(g: usize, count: u64, seed: u64) -> Vec<PolyFq> {
    iterate_h(&EnsembleSpec::sampled(f5(), g, count, seed).unwrap())
        .unwrap()
        .collect()
}

type Outcome = Result<(bool, String)>;

fn functional_equation() -> Outcome {
    let mut total = 0u64;
    let mut worst = 0u128;
    for g in 1..=3 {
        for d in iterate_h(&EnsembleSpec::exhaustive(f5(), g)?)? {
            worst = worst.max(verify_functional_equation(&l_coefficients(&d)?)?);
            total += 1;
        }
    }
    Ok((worst == 0 && total == 100 + 2_500 + 62_500, format!("{total} D, max residual {worst}")))
}

fn coefficient_oracle() -> Outcome {
    let mut ds = sampled(1, 34, 1);
    ds.extend(sampled(2, 33, 2));
    ds.extend(sampled(3, 33, 3));
    let mut mismatches = 0;
    for d in &ds {
        let rec = l_coefficients_with(d, CoefficientMode::Recursion)?;
        let dir = l_coefficients_with(d, CoefficientMode::Direct)?;
        mismatches += (rec.c != dir.c) as usize;
    }
    Ok((mismatches == 0, format!("{} D, {mismatches} mismatches", ds.len())))
}

fn rh_on_circle() -> Outcome {
    let mut worst = 0f64;
    let ds = sampled(3, 1000, 33);
    for d in &ds {
        worst = worst.max(zeros(&l_coefficients(d)?)?.radii_residual);
    }
    Ok((worst < 1e-6, format!("{} D, max radii residual {worst:.3e}", ds.len())))
}

fn explicit_formula() -> Outcome {
    let g = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let hs: Vec<TrigPoly> = (0..10)
        .map(|_| {
            let n = rng.gen_range(0..=2 * g);
            TrigPoly::new((0..=n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).unwrap()
        })
        .collect();
    let mut worst = 0f64;
    let ds = sampled(g, 100, 4);
    for d in &ds {
        for h in &hs {
            worst = worst.max(explicit_formula_residual(d, h)?);
        }
    }
    Ok((worst < 1e-8, format!("{} D x {} h, max residual {worst:.3e}", ds.len(), hs.len())))
}

fn approximate_functional_equation() -> Outcome {
    let grids: Vec<Vec<Complex64>> = vec![
        vec![c(-0.2, 0.0)],
        vec![c(0.0, 0.0)],
        vec![c(0.1, 0.0)],
        vec![c(0.2, 0.0)],
        vec![c(0.1, 0.3)],
        vec![c(0.1, 0.0), c(-0.2, 0.0)],
        vec![c(0.2, 0.0), c(0.05, 0.0)],
        vec![c(-0.1, 0.2), c(0.15, -0.1)],
        vec![c(0.1, 0.0), c(0.0, 0.0), c(-0.1, 0.0)],
        vec![c(0.2, 0.0), c(-0.05, 0.1), c(0.15, 0.0)],
    ];
    let mut worst = 0f64;
    let mut cases = 0;
    for d in sampled(2, 3, 5) {
        let l = l_coefficients(&d)?;
        for shifts in &grids {
            let direct: Complex64 = shifts.iter().map(|&a| evaluate_shifted(&l, a, 0.0)).product();
            let afe = approx_fe_product(&d, &ShiftSet::new(shifts.clone()))?;
            worst = worst.max((afe - direct).norm() / direct.norm());
            cases += 1;
        }
    }
    Ok((worst <= 1e-9, format!("{cases} cases, max relative difference {worst:.3e}")))
}

fn gauss_sums() -> Outcome {
    let field = f5();
    let q = field.q() as u64;
    let vs: Vec<PolyFq> = (0..q.pow(4))
        .map(|mut i| {
            let coeffs: Vec<i64> = (0..4)
                .map(|_| {
                    let r = (i % q) as i64;
                    i /= q;
                    r
                })
                .collect();
            PolyFq::new(field, &coeffs)
        })
        .collect();
    let mut worst = 0f64;
    let mut cases = 0u64;
    for (_, p) in PrimeTable::shared(field, 2)?.iter().filter(|(d, _)| *d <= 2) {
        let mut pj = PolyFq::one(field);
        for j in 1..=3 {
            pj = pj.mul(p)?;
            let ev = GaussSumEvaluator::new(&pj)?;
            for v in &vs {
                let direct = ev.eval(v)?.value;
                worst = worst.max((direct - gauss_sum_closed(v, p, j)?.value).norm());
                cases += 1;
            }
        }
    }
    let g1 = GaussSumEvaluator::new(&PolyFq::x(field))?
        .eval(&PolyFq::one(field))?
        .value;
    let g1_err = (g1 - c(5f64.sqrt(), 0.0)).norm();
    Ok((
        worst <= 1e-9 && g1_err <= 1e-12,
        format!("{cases} cases, max difference {worst:.3e}; |G(1, chi_x) - sqrt 5| = {g1_err:.3e}"),
    ))
}

fn lemmas_l1_l3() -> Outcome {
    let field = f5();
    let mut l1_bad = 0;
    let mut l1_cases = 0;
    for g in 1..=2 {
        for d in 0..=4 {
            for f in enumerate_monic(field, d) {
                let s = char_sum_l1_sides(&f, g)?;
                l1_bad += (s.lhs != s.rhs) as usize;
                l1_cases += 1;
            }
        }
    }
    let mut l3_worst = 0f64;
    let mut l3_cases = 0;
    for d in 1..=4 {
        for f in enumerate_monic(field, d) {
            for m in 0..=4 {
                let s = char_sum_l3(&f, m)?;
                l3_worst = l3_worst.max((s.direct - s.closed).norm());
                l3_cases += 1;
            }
        }
    }
    Ok((
        l1_bad == 0 && l3_worst <= 1e-9,
        format!("L1 {l1_cases} cases, {l1_bad} unequal; L3 {l3_cases} cases, max difference {l3_worst:.3e}"),
    ))
}

fn lemma_l5() -> Outcome {
    let field = f5();
    let x = PolyFq::x(field);
    let x1 = PolyFq::new(field, &[1, 1]);
    let fs = [x.clone(), x1.clone(), x.mul(&x1)?];
    // prod_{P | f} (1 + 1/|P|)^{-1} with |x| = |x + 1| = 5
    let one = 1.0 / (1.0 + 1.0 / 5.0);
    let predicted = [one, one, one * one];
    let mut errs = Vec::new();
    let mut ok = true;
    for g in 2..=4 {
        let spec = EnsembleSpec::exhaustive(field, g)?;
        let avgs = average_vec(&spec, fs.len(), |m| {
            fs.iter()
                .map(|f| Ok(Some(c(chi(m.d(), &f.mul(f)?)?.value() as f64, 0.0))))
                .collect()
        })?;
        let err: Vec<f64> = avgs.iter().zip(&predicted).map(|(a, p)| (a.mean.re - p).abs()).collect();
        ok &= err.iter().all(|&e| e <= 10.0 * 5f64.powi(-2 * g as i32));
        errs.push(err);
    }
    for w in errs.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            ok &= *b * 5.0 <= *a;
        }
    }
    let fmt = |v: &Vec<f64>| v.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join("/");
    Ok((
        ok,
        format!(
            "errors g=2: {}, g=3: {}, g=4: {}",
            fmt(&errs[0]),
            fmt(&errs[1]),
            fmt(&errs[2])
        ),
    ))
}

fn ratios_decay() -> Outcome {
    let stat = Statistic::Ratio {
        a: ShiftSet::real(&[0.1]),
        b: ShiftSet::real(&[0.3]),
    };
    let r3 = empirical_statistic(&EnsembleSpec::exhaustive(f5(), 3)?, &stat, Truncation::default())?;
    let r4 = empirical_statistic(&EnsembleSpec::exhaustive(f5(), 4)?, &stat, Truncation::default())?;
    Ok((
        r4.rel_err < r3.rel_err && r4.rel_err <= 0.02,
        format!("rel_err g=3 {:.3e}, g=4 {:.3e}", r3.rel_err, r4.rel_err),
    ))
}

fn cross_paths() -> Outcome {
    let field = f5();
    let trunc = Truncation::default();
    let mut worst = 0f64;
    for alpha in [0.05, -0.05, 0.1, -0.1] {
        for beta in [0.1, 0.2, 0.3] {
            let g = 3;
            let m = ratios_main(field, &ShiftSet::real(&[alpha]), &ShiftSet::real(&[beta]), g, trunc)?.value;
            let k = ratio_k1_closed(field, c(alpha, 0.0), c(beta, 0.0), g, trunc)?.value;
            worst = worst.max((m - k).norm() / k.norm().max(1.0));
        }
    }
    // reflections of A_C, B_C and zeta under gamma -> -gamma
    let h = TwistPoly::new(&PolyFq::new(field, &[0, 2, 3, 1]).mul(&PolyFq::new(field, &[1, 1]))?)?;
    let mut refl = 0f64;
    let mut note = |a: Complex64, b: Complex64| refl = refl.max((a - b).norm() / b.norm().max(1.0));
    for alpha in [c(0.1, 0.0), c(-0.08, 0.0), c(0.05, 0.2)] {
        let a = ShiftSet::new(vec![alpha]);
        let u = q_pow_neg(5.0, -alpha);
        let um = q_pow_neg(5.0, alpha);
        note(a_c(field, &a, u, trunc)?.value, a_c(field, &a.negated(), um, trunc)?.value);
        note(
            b_c(&a, &h, u)?,
            q_pow_neg(h.h1.norm(), 2.0 * alpha) * b_c(&a.negated(), &h, um)?,
        );
        note(
            zeta_q(5.0, 1.0 - 2.0 * alpha)?,
            -q_pow_neg(5.0, 2.0 * alpha) * zeta_q(5.0, 1.0 + 2.0 * alpha)?,
        );
    }
    for (g1, g2) in [(c(0.1, 0.0), c(-0.05, 0.0)), (c(0.03, 0.1), c(0.08, -0.2))] {
        let cs = ShiftSet::new(vec![g1, g2]);
        let rev = ShiftSet::new(vec![-g2, -g1]);
        let u = q_pow_neg(5.0, -(g1 + g2) / 2.0);
        let um = q_pow_neg(5.0, (g1 + g2) / 2.0);
        note(a_c(field, &cs, u, trunc)?.value, a_c(field, &rev, um, trunc)?.value);
        note(b_c(&cs, &h, u)?, q_pow_neg(h.h1.norm(), g1 + g2) * b_c(&rev, &h, um)?);
    }
    Ok((
        worst <= 1e-10 && refl <= 1e-10,
        format!("12-point grid max difference {worst:.3e}; reflections max {refl:.3e}"),
    ))
}

fn twisted_moments() -> Outcome {
    let field = f5();
    let alphas = [0.1, -0.1];
    let hs = [
        PolyFq::x(field),
        PolyFq::new(field, &[1, 1]),
        PolyFq::new(field, &[0, 0, 1]),
    ];
    let mut errs = Vec::new();
    let mut scales = Vec::new();
    for g in [3usize, 4] {
        let spec = EnsembleSpec::exhaustive(field, g)?;
        let avgs = average_vec(&spec, alphas.len() * hs.len(), |m| {
            let mut out = Vec::new();
            for &alpha in &alphas {
                let l = evaluate_shifted(&m.l, c(alpha, 0.0), 0.0);
                for h in &hs {
                    out.push(Some(l * chi(m.d(), h)?.value() as f64));
                }
            }
            Ok(out)
        })?;
        let mut row = Vec::new();
        let mut srow = Vec::new();
        for (i, &alpha) in alphas.iter().enumerate() {
            for (j, h) in hs.iter().enumerate() {
                let main = twisted_main(&ShiftSet::real(&[alpha]), &TwistPoly::new(h)?, g, Truncation::default())?;
                row.push((avgs[i * hs.len() + j].mean - main.value).norm());
                let gf = g as f64;
                srow.push(5f64.powf(-1.5 * gf + 2.0 * gf * alpha.abs()));
            }
        }
        errs.push(row);
        scales.push(srow);
    }
    let mut ok = true;
    let mut detail = Vec::new();
    for k in 0..errs[0].len() {
        ok &= errs[1][k] < errs[0][k];
        for gi in 0..2 {
            let ratio = errs[gi][k] / scales[gi][k];
            ok &= (0.01..=100.0).contains(&ratio);
        }
        detail.push(format!("{:.1e}->{:.1e}", errs[0][k], errs[1][k]));
    }
    Ok((ok, format!("abs err g=3->4: {}", detail.join(" "))))
}

fn one_level_density() -> Outcome {
    let field = f5();
    let g = 3;
    let spec = EnsembleSpec::exhaustive(field, g)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [4usize, 6, 8] {
        let width = n as f64 / (2 * g) as f64;
        let phi = PhiHat::from_fn(g, n, |y| (1.0 - y.abs() / width).max(0.0))?;
        let routes = density_routes(&spec, &phi)?;
        let main = density_main(field, &phi)?.value;
        let err = (routes.via_zeros - main).abs();
        let bound = 10.0 * 5f64.powf(n as f64 / 2.0 - 2.0 * g as f64);
        let agree = (routes.via_zeros - routes.via_explicit).abs().max(routes.max_discrepancy);
        ok &= err <= bound && agree <= 1e-8;
        detail.push(format!("N={n}: err {err:.2e} (bound {bound:.2e}), routes {agree:.1e}"));
    }
    Ok((ok, detail.join("; ")))
}

fn negative_moments() -> Outcome {
    let rows = negmoment_scan(f5(), &[2, 3, 4], &[0.2, 0.3, 0.4], 1.0, &[0.0], SampleMode::Exhaustive, 0)?;
    let worst = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let excluded: u64 = rows.iter().map(|r| r.n_excluded).sum();
    Ok((
        rows.len() == 9 && worst <= NEGMOMENT_RATIO_BOUND && excluded == 0,
        format!("max ratio {worst:.3} (frozen bound {NEGMOMENT_RATIO_BOUND}), excluded {excluded}"),
    ))
}

fn lower_bound() -> Outcome {
    let mut worst = f64::INFINITY;
    for g in 1..=3 {
        let spec = EnsembleSpec::exhaustive(f5(), g)?;
        for r in lemma_lb_scan(&spec, &[0.1, 0.3], &[2, 4, 2 * g], 0.0)? {
            worst = worst.min(r.min_gap);
        }
    }
    Ok((
        worst >= LB_GAP_FLOOR,
        format!("min gap {worst:.4} (frozen floor {LB_GAP_FLOOR})"),
    ))
}

fn cosine_sum() -> Outcome {
    let start = Instant::now();
    let rows = trig_sum_grid()?;
    let elapsed = start.elapsed().as_secs_f64();
    let worst = rows.iter().map(|r| r.diff.abs()).fold(0.0, f64::max);
    Ok((
        rows.len() == 120 && worst <= 3.0 && elapsed < 1.0,
        format!("{} points, max |diff| {worst:.3}, {elapsed:.3}s", rows.len()),
    ))
}

fn determinism() -> Outcome {
    let csv_for = |threads: usize| -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let sampled = EnsembleSpec::sampled(f5(), 3, 4000, 17)?.with_threads(threads);
        let exhaustive = EnsembleSpec::exhaustive(f5(), 2)?.with_threads(threads);
        let reports = vec![
            empirical_statistic(
                &sampled,
                &Statistic::Ratio {
                    a: ShiftSet::real(&[0.1]),
                    b: ShiftSet::real(&[0.3]),
                },
                Truncation::default(),
            )?
            .row(),
            empirical_statistic(
                &exhaustive,
                &Statistic::Twisted {
                    a: ShiftSet::real(&[0.1, -0.05]),
                    h: PolyFq::new(f5(), &[1, 1]),
                },
                Truncation::default(),
            )?
            .row(),
        ];
        write_reports(&reports, OutputFormat::Csv, &mut out)?;
        write_reports(&lemma_lb_scan(&exhaustive, &[0.3], &[4], 0.5)?, OutputFormat::Csv, &mut out)?;
        Ok(out)
    };
    let one = csv_for(1)?;
    let same = [4, 8].iter().map(|&t| csv_for(t)).collect::<Result<Vec<_>>>()?;
    let ok = same.iter().all(|o| *o == one);
    Ok((ok, format!("{} bytes of CSV compared across 1/4/8 threads", one.len())))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("functional equation", functional_equation),
        ("coefficient oracle", coefficient_oracle),
        ("zeros on the circle", rh_on_circle),
        ("explicit formula", explicit_formula),
        ("approximate functional equation", approximate_functional_equation),
        ("Gauss sums", gauss_sums),
        ("character sum identities L1/L3", lemmas_l1_l3),
        ("average of chi_D(f^2)", lemma_l5),
        ("ratios k=1 decay", ratios_decay),
        ("ratios cross paths and reflections", cross_paths),
        ("twisted first moment", twisted_moments),
        ("one-level density", one_level_density),
        ("negative moments", negative_moments),
        ("lower bound for log |L|", lower_bound),
        ("cosine sum", cosine_sum),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failures += !pass as usize;
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 16 criteria passed", 16 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
