//! Exit criteria, one test per criterion. Each prints a single PASS/FAIL
//! line before asserting.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schottky_core::fup::{
    equivariance_residual_for_word, fit_beta, norm_scan, separated_norm, stationary_point_check,
    Bump, RadialCutoff,
};
use schottky_core::mobius::{sphere_distance, ExtendedPoint};
use schottky_core::partition::{
    box_counting_dimension, contraction_fit, fit_multiplicity_constant, multiplicity_check,
};
use schottky_core::transfer::{
    bowen_dimension, eigenfunction_at_zero, find_zeros, zeta_det, Rect, TransferOperator,
    ZeroSearchOptions, ZetaEvaluator,
};
use schottky_core::words::words_of_length;
use schottky_core::{
    elementary_schottky, enumerate_partition, symmetric_schottky, SchottkyData, Word,
};

fn report(n: usize, pass: bool, detail: String) {
    println!(
        "criterion {n}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn families() -> Vec<(&'static str, SchottkyData)> {
    vec![
        ("elementary l=2", elementary_schottky(2.0).unwrap()),
        ("symmetric r=2", symmetric_schottky(2, 0.8).unwrap()),
    ]
}

fn dyadic_ladder() -> Vec<f64> {
    (6..=12).map(|k| 2f64.powi(-k)).collect()
}

#[test]
fn criterion_1_elementary_zero_lattice() {
    let e = elementary_schottky(2.0).unwrap();
    let start = Instant::now();
    let found = find_zeros(
        &e,
        Rect::new(-0.5, 1.0, -10.0, 10.0).unwrap(),
        24,
        &ZeroSearchOptions::default(),
    )
    .unwrap();
    let secs = start.elapsed().as_secs_f64();
    // {iπm} inside the rectangle, each a double zero of the squared product
    let lattice: Vec<Complex64> = (-3..=3)
        .map(|m| Complex64::new(0.0, PI * m as f64))
        .collect();
    let mut worst = 0.0f64;
    let mut matched = vec![false; lattice.len()];
    let mut extra = 0;
    for z in &found.zeros {
        match lattice.iter().position(|p| (z.s - p).norm() <= 1e-6) {
            Some(i) => {
                worst = worst.max((z.s - lattice[i]).norm());
                if matched[i] {
                    extra += 1;
                }
                matched[i] = true;
            }
            None => extra += 1,
        }
    }
    let missing = matched.iter().filter(|m| !**m).count();
    let pass = extra == 0
        && missing == 0
        && found.unresolved.is_empty()
        && found.total_winding == 2 * lattice.len()
        && found.all_verified()
        && secs <= 60.0;
    report(
        1,
        pass,
        format!(
            "{} zeros, winding {}, max |ds| {worst:.1e}, extra {extra}, missing {missing}, {secs:.1} s",
            found.zeros.len(),
            found.total_winding
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_determinant_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for (_, data) in families() {
        let coarse = ZetaEvaluator::new(&data, 24).unwrap();
        let fine = ZetaEvaluator::new(&data, 48).unwrap();
        for _ in 0..20 {
            let s = Complex64::new(rng.random_range(0.0..1.0), rng.random_range(-10.0..10.0));
            worst = worst.max((coarse.det(s) - fine.det(s)).norm());
        }
    }
    let pass = worst <= 1e-10;
    report(
        2,
        pass,
        format!("max |det24 - det48| = {worst:.2e} over 40 points"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_refined_operators() {
    let mut worst_power = 0.0f64;
    let s = Complex64::new(0.5, 3.0);
    let m = 20;
    for (_, data) in families() {
        let base = TransferOperator::standard(&data, m).unwrap().matrix(s);
        for n in [3, 4] {
            let refined = TransferOperator::new(&data, &words_of_length(&data, n), m)
                .unwrap()
                .matrix(s);
            let mut power = base.clone();
            for _ in 2..n {
                power = &power * &base;
            }
            worst_power = worst_power.max((refined - power).norm());
        }
    }

    // zeros of both families: the elementary lattice and a window of the
    // symmetric family
    let opts = ZeroSearchOptions::default();
    let mut worst_fixed = 0.0f64;
    let mut count = 0;
    let windows = [
        (
            elementary_schottky(2.0).unwrap(),
            Rect::new(-0.5, 1.0, -10.0, 10.0).unwrap(),
        ),
        (
            symmetric_schottky(2, 0.8).unwrap(),
            Rect::new(-0.3, 1.0, 0.5, 3.0).unwrap(),
        ),
    ];
    for (data, rect) in &windows {
        let words = enumerate_partition(data, 0.1).unwrap().bar(data);
        for z in find_zeros(data, *rect, 24, &opts)
            .unwrap()
            .zeros
            .iter()
            .filter(|z| z.verified)
        {
            let u = eigenfunction_at_zero(data, z.s, 24).unwrap();
            worst_fixed = worst_fixed.max(u.refined_residual(data, &words).unwrap());
            count += 1;
        }
    }
    let pass = worst_power <= 1e-8 && worst_fixed <= 1e-5 && count > 0;
    report(
        3,
        pass,
        format!(
            "power identity {worst_power:.1e}, fixed point {worst_fixed:.1e} over {count} zeros"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_dimension() {
    let e = bowen_dimension(&elementary_schottky(2.0).unwrap(), 1e-9).unwrap();
    let d = symmetric_schottky(2, 0.8).unwrap();
    let b = bowen_dimension(&d, 1e-9).unwrap();
    let boxes = box_counting_dimension(&d, 1_000_000).unwrap();
    let det = zeta_det(&d, Complex64::new(b.delta, 0.0), 24)
        .unwrap()
        .norm();
    let pass = e.delta <= 1e-6 && (b.delta - boxes.dimension).abs() <= 1e-2 && det <= 1e-6;
    report(
        4,
        pass,
        format!(
            "elementary {:.1e}, bowen {:.8}, box count {:.6}, |det| {det:.1e}",
            e.delta, b.delta, boxes.dimension
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_conformal_identities_and_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_line = 0.0f64;
    let mut worst_circle = 0.0f64;
    for (_, data) in families() {
        for g in data.generators() {
            let [_, _, c, d] = g.entries();
            let mut done = 0;
            while done < 1000 {
                let x: f64 = rng.random_range(-4.0..4.0);
                let y: f64 = rng.random_range(-4.0..4.0);
                if (x - y).abs() < 0.05 || (c * x + d).abs() < 0.05 || (c * y + d).abs() < 0.05 {
                    continue;
                }
                done += 1;
                let (gx, gy) = (g.apply_real(x), g.apply_real(y));
                let lhs = (gx - gy).powi(-2) * g.derivative_real(x).abs();
                let rhs = (x - y).powi(-2) / g.derivative_real(y).abs();
                worst_line = worst_line.max((lhs - rhs).abs() / rhs);
                let (px, py) = (ExtendedPoint::real(x), ExtendedPoint::real(y));
                let lhs = sphere_distance(g.apply(px), g.apply(py));
                let rhs = (g.sphere_derivative(px) * g.sphere_derivative(py)).sqrt()
                    * sphere_distance(px, py);
                worst_circle = worst_circle.max((lhs - rhs).abs() / rhs);
            }
        }
    }

    let e = elementary_schottky(2.0).unwrap();
    let s = Complex64::new(0.5, 256.0);
    let ladder: Vec<(usize, f64)> = [512, 1024, 2048, 4096]
        .iter()
        .map(|&n| {
            (
                n,
                equivariance_residual_for_word(&e, &Word::letter(0), s, n, 64)
                    .unwrap()
                    .residual,
            )
        })
        .collect();
    // below 1e-12 the residual is rounding and no longer halves
    let floor = 1e-12;
    let refines = ladder
        .windows(2)
        .all(|p| p[1].1 * 4.0 <= p[0].1 || (p[0].1 <= floor && p[1].1 <= floor));
    let at_4096 = ladder.last().unwrap().1;
    let pass = worst_line <= 1e-12 && worst_circle <= 1e-12 && at_4096 <= 1e-6 && refines;
    let ladder_text: Vec<String> = ladder.iter().map(|(n, r)| format!("{n}:{r:.1e}")).collect();
    report(
        5,
        pass,
        format!(
            "line identity {worst_line:.1e}, circle identity {worst_circle:.1e}, equivariance {}",
            ladder_text.join(" ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_trivial_fup_decay() {
    let e = elementary_schottky(2.0).unwrap();
    let chi = RadialCutoff::for_data(&e);
    let scan = norm_scan(&e, &dyadic_ladder(), 0.8, 1.0, &chi, 0, false).unwrap();
    let fit = fit_beta(
        &scan
            .iter()
            .map(|m| (m.h, m.restricted_norm))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let whole = fit_beta(&scan.iter().map(|m| (m.h, m.whole_norm)).collect::<Vec<_>>()).unwrap();
    let in_window = (0.4..=0.55).contains(&fit.beta_fit);
    let control = whole.beta_fit <= 0.05;
    let pass = in_window && control;
    report(
        6,
        pass,
        format!(
            "beta {:.4} (residual {:.3}, {} points, window [0.4, 0.55]), whole-circle beta {:.2e}",
            fit.beta_fit, fit.residual, fit.points_used, whole.beta_fit
        ),
    );
    assert!(control, "whole-circle control");
    assert!(
        in_window,
        "fitted exponent {} outside [0.4, 0.55]",
        fit.beta_fit
    );
}

#[test]
fn criterion_7_nonelementary_fup_positivity() {
    let d = symmetric_schottky(2, 0.8).unwrap();
    let chi = RadialCutoff::for_data(&d);
    let scan = norm_scan(&d, &dyadic_ladder(), 0.8, 1.0, &chi, 0, false).unwrap();
    let fit = fit_beta(
        &scan
            .iter()
            .map(|m| (m.h, m.restricted_norm))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let pass = fit.beta_fit > 0.0 && fit.residual <= 0.1;
    report(
        7,
        pass,
        format!(
            "beta {:.4}, residual {:.3}, {} points",
            fit.beta_fit, fit.residual, fit.points_used
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_appendix_identities() {
    let xs: Vec<f64> = (0..10).map(|i| -2.25 + 0.5 * i as f64).collect();
    let xis = [-12.5, -6.3, -3.1, -1.9, -0.7, 0.7, 1.9, 3.1, 6.3, 12.5];
    let mut worst_grad = 0.0f64;
    let mut worst_hess = 0.0f64;
    let mut points = 0;
    for &x in &xs {
        for &xi in &xis {
            let c = stationary_point_check(x, xi).unwrap();
            worst_grad = worst_grad.max(c.residual());
            worst_hess = worst_hess.max(c.hessian_rel_err);
            points += 1;
        }
    }
    let e = elementary_schottky(2.0).unwrap();
    let (c1, c2) = (Bump::for_letter(&e, 0), Bump::for_letter(&e, 1));
    let norms: Vec<f64> = dyadic_ladder()
        .iter()
        .map(|&h| separated_norm(Complex64::new(0.5, 1.0 / h), &c1, &c2, 0).unwrap())
        .collect();
    let (lo, hi) = norms
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let pass = points == 100 && worst_grad <= 1e-10 && worst_hess <= 1e-4 && hi <= 2.0 * lo;
    report(
        8,
        pass,
        format!(
            "gradient {worst_grad:.1e}, hessian {worst_hess:.1e} on {points} points, cutoff norm in [{lo:.4}, {hi:.4}]"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_9_combinatorics() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut partitions_ok = true;
    let mut rates = Vec::new();
    let mut multiplicity_ok = true;
    let mut constants = Vec::new();
    for (_, data) in families() {
        for _ in 0..50 {
            let tau = 10f64.powf(rng.random_range(-3.0..-0.5));
            let z = enumerate_partition(&data, tau).unwrap();
            let mut ivs: Vec<_> = z
                .words
                .iter()
                .map(|w| schottky_core::word_interval(&data, w).unwrap())
                .collect();
            ivs.sort_by(|a, b| a.left.total_cmp(&b.left));
            let disjoint = ivs.windows(2).all(|p| p[0].right < p[1].left);
            let prefix_free = z
                .words
                .iter()
                .all(|a| z.words.iter().all(|b| a == b || !a.is_prefix_of(b)));
            partitions_ok &= disjoint && prefix_free && z.check(&data).is_ok();
        }
        rates.push(contraction_fit(&data, 8).unwrap().rate);

        // one constant fitted on the coarse scales must cover the fine ones
        let c1s = [2.0, 4.0, 8.0, 16.0];
        let reports = |ks: std::ops::RangeInclusive<i32>| {
            ks.flat_map(|k| c1s.iter().map(move |&c1| (k, c1)))
                .map(|(k, c1)| multiplicity_check(&data, 2f64.powi(-k), c1).unwrap())
                .collect::<Vec<_>>()
        };
        let c = fit_multiplicity_constant(&reports(4..=8));
        multiplicity_ok &= c.is_finite()
            && reports(9..=12)
                .iter()
                .all(|r| r.max_count as f64 <= c * r.c1.ln());
        constants.push(c);
    }
    let pass = partitions_ok && rates.iter().all(|&r| r < 1.0) && multiplicity_ok;
    report(
        9,
        pass,
        format!("partitions ok {partitions_ok}, contraction rates {rates:.3?}, multiplicity constants {constants:.3?}"),
    );
    assert!(pass);
}
