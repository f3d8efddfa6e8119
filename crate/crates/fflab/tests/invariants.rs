//! Cross-module consistency checks: derivative chains against finite
//! differences, scaling radii, the quartic string equation, closed
//! A-function values against quadrature, and the normality/constants
//! implications that tie the modules together.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fflab::analysis::{build_grid, normality_check, DEFAULT_L, GRID_COUNT};
use fflab::fekete::fejer_constants;
use fflab::induced::{a_over_rho, closed_a_over_rho, induced};
use fflab::interp::{grunwald_kernel, LagrangeBasis};
use fflab::orthopoly::Recurrence;
use fflab::weights::Weight;

fn families_with_ranges() -> Vec<(Weight, f64, f64)> {
    vec![
        (Weight::hermite(), -3.0, 3.0),
        (Weight::laguerre(1.0).unwrap(), 0.1, 8.0),
        (Weight::jacobi(1.0, 1.0).unwrap(), -0.9, 0.9),
        (Weight::freud(4).unwrap(), -2.0, 2.0),
        (Weight::even_poly(vec![0.5, 0.0, 0.25]).unwrap(), -1.8, 1.8),
    ]
}

#[test]
fn potential_derivatives_match_finite_differences_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (w, lo, hi) in families_with_ranges() {
        for _ in 0..100 {
            let x = rng.gen_range(lo..hi);
            let h = 1e-6 * (1.0 + x.abs());
            let fd1 = (w.q(x + h) - w.q(x - h)) / (2.0 * h);
            let fd2 = (w.q1(x + h) - w.q1(x - h)) / (2.0 * h);
            let scale1 = 1.0 + w.q1(x).abs();
            let scale2 = 1.0 + w.q2(x).abs();
            assert!(
                (fd1 - w.q1(x)).abs() <= 1e-6 * scale1,
                "{}: Q' at {x}: fd {fd1} vs {}",
                w.label(),
                w.q1(x)
            );
            assert!(
                (fd2 - w.q2(x)).abs() <= 1e-5 * scale2,
                "{}: Q'' at {x}: fd {fd2} vs {}",
                w.label(),
                w.q2(x)
            );
        }
    }
}

#[test]
fn scaling_radii_grow_with_the_degree() {
    for w in [
        Weight::hermite(),
        Weight::freud(4).unwrap(),
        Weight::laguerre(0.5).unwrap(),
    ] {
        let mut prev = 0.0;
        for u in 1..=40 {
            let a = w.mrs_number(u as f64).unwrap();
            assert!(
                a > prev,
                "{}: a_{u} = {a} not above a_{} = {prev}",
                w.label(),
                u - 1
            );
            prev = a;
        }
    }
    // Bounded support: the radius saturates at the support radius.
    let w = Weight::jacobi(0.5, 1.5).unwrap();
    assert_eq!(w.mrs_number(3.0).unwrap(), 1.0);
    assert_eq!(w.mrs_number(30.0).unwrap(), 1.0);
}

#[test]
fn orthogonal_zeros_live_inside_the_scaling_radius() {
    for w in [Weight::hermite(), Weight::freud(4).unwrap()] {
        let rec = Recurrence::compute(&w, 20).unwrap();
        for n in 2..=20 {
            let z = rec.zeros(n).unwrap();
            let a_n = w.mrs_number(n as f64).unwrap();
            let top = z.last().unwrap().abs().max(z[0].abs());
            assert!(
                top < a_n,
                "{}: n = {n}: max zero {top} vs a_n = {a_n}",
                w.label()
            );
        }
    }
}

#[test]
fn tail_modification_is_bitwise_inside_and_closed_form_outside() {
    let w = Weight::freud(4).unwrap();
    let wt = w.tilde(2.0).unwrap();
    for &x in &[-1.0_f64, -0.73, 0.0, 0.31, 1.0] {
        assert_eq!(wt.log_w(x).to_bits(), w.log_w(x).to_bits(), "x = {x}");
    }
    for &x in &[2.0_f64, 2.5, 4.0, -3.2] {
        let r = x.abs();
        let expect = -(w.q(r) - r.ln() + w.q1(r).ln());
        assert_eq!(wt.log_w(x).to_bits(), expect.to_bits(), "x = {x}");
    }
}

#[test]
fn quartic_recurrence_satisfies_the_string_equation() {
    let w = Weight::freud(4).unwrap();
    let rec = Recurrence::compute(&w, 21).unwrap();
    let b2 = |k: usize| rec.beta[k] * rec.beta[k];
    for n in 1..=20 {
        let lhs = 4.0 * b2(n) * (if n >= 1 { b2(n - 1) } else { 0.0 } + b2(n) + b2(n + 1));
        assert!(
            (lhs - n as f64).abs() < 1e-6,
            "n = {n}: 4 b_n^2 (b_(n-1)^2 + b_n^2 + b_(n+1)^2) = {lhs}"
        );
    }
}

#[test]
fn a_function_hand_examples() {
    let w = Weight::hermite();
    let rec = Recurrence::compute(&w, 5).unwrap();
    let v = a_over_rho(&w, &rec, 4, 0.7).unwrap();
    assert!((v - 2.0).abs() < 1e-6, "hermite: {v}");

    let w = Weight::laguerre(1.0).unwrap();
    let rec = Recurrence::compute(&w, 4).unwrap();
    let v = a_over_rho(&w, &rec, 3, 2.0).unwrap();
    assert!((v - 0.5).abs() < 1e-6, "laguerre(1): {v}");

    let w = Weight::laguerre(0.0).unwrap();
    let rec = Recurrence::compute(&w, 4).unwrap();
    let v = closed_a_over_rho(&w, &rec, 3, 4.0).unwrap().unwrap();
    assert!((v - 0.25).abs() < 1e-12, "laguerre(0) closed: {v}");

    let w = Weight::jacobi(1.0, 1.0).unwrap();
    let rec = Recurrence::compute(&w, 4).unwrap();
    let v = a_over_rho(&w, &rec, 3, 0.0).unwrap();
    assert!((v - 9.0).abs() < 1e-6, "jacobi(1,1): {v}");
}

#[test]
fn quadrature_matches_closed_forms_at_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let cases: Vec<(Weight, f64, f64)> = vec![
        (Weight::hermite(), 0.05, 2.5),
        (Weight::laguerre(0.0).unwrap(), 0.1, 6.0),
        (Weight::laguerre(1.0).unwrap(), 0.1, 6.0),
        (Weight::jacobi(1.0, 1.0).unwrap(), -0.85, 0.85),
        (Weight::freud(4).unwrap(), 0.05, 2.0),
    ];
    for (w, lo, hi) in cases {
        let rec = Recurrence::compute(&w, 11).unwrap();
        for _ in 0..20 {
            let n = rng.gen_range(2..=10_usize);
            let x = rng.gen_range(lo..hi);
            let quad = a_over_rho(&w, &rec, n, x).unwrap();
            let closed = closed_a_over_rho(&w, &rec, n, x)
                .unwrap()
                .expect("family has a closed form");
            assert!(
                (quad - closed).abs() <= 1e-6 * closed.abs(),
                "{}: n = {n}, x = {x}: {quad} vs {closed}",
                w.label()
            );
        }
    }
}

#[test]
fn hermite_induced_constants_equal_the_base_constants() {
    let w = Weight::hermite();
    let rec = Arc::new(Recurrence::compute(&w, 9).unwrap());
    for n in 2..=8 {
        let wn = induced(&w, &rec, n).unwrap();
        let z = rec.zeros(n).unwrap();
        let cb = fejer_constants(&w, &z);
        let ci = fejer_constants(&wn, &z);
        for (a, b) in cb.iter().zip(&ci) {
            assert!((a - b).abs() <= 1e-12, "n = {n}: {a} vs {b}");
        }
    }
}

#[test]
fn normality_pass_implies_vanishing_constants() {
    // Forward direction: every configuration that passes the kernel
    // bound has (numerically) zero constants. Exercised over passing
    // and failing configurations alike; failures make the implication
    // vacuous.
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let w = Weight::hermite();
    let rec = Recurrence::compute(&w, 10).unwrap();
    let mut tested_a_pass = false;
    for n in 3..=10 {
        let zeros = rec.zeros(n).unwrap();
        let mut configs = vec![zeros.clone()];
        // A jittered copy: almost always fails the kernel bound.
        let jit: Vec<f64> = zeros
            .iter()
            .map(|&z| z + rng.gen_range(-0.05..0.05))
            .collect();
        configs.push(jit);
        for nodes in configs {
            let a_n = w.mrs_number(nodes.len() as f64).unwrap();
            let grid = build_grid(&w, &nodes, Some(DEFAULT_L * a_n), 2001).unwrap();
            let rep = normality_check(&w, &nodes, DEFAULT_L, &grid).unwrap();
            if rep.pass {
                tested_a_pass = true;
                let c = fejer_constants(&w, &nodes);
                let r = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                assert!(r < 1e-8, "n = {n}: normal but max |C| = {r}");
            }
        }
    }
    assert!(tested_a_pass, "no passing configuration was exercised");
}

#[test]
fn vanishing_constants_imply_normality_for_induced_hermite() {
    // Reverse direction at instances where the even-coefficient
    // hypothesis holds: the induced hermite weight.
    let w = Weight::hermite();
    let rec = Arc::new(Recurrence::compute(&w, 11).unwrap());
    for n in 3..=10 {
        let wn = induced(&w, &rec, n).unwrap();
        assert!(wn.has_nonneg_even_coeffs());
        let z = rec.zeros(n).unwrap();
        let c = fejer_constants(&wn, &z);
        let r = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(r < 1e-10, "n = {n}: constants not zero ({r})");
        let a_n = wn.mrs_number(n as f64).unwrap();
        let grid = build_grid(&wn, &z, Some(DEFAULT_L * a_n), 2001).unwrap();
        let rep = normality_check(&wn, &z, DEFAULT_L, &grid).unwrap();
        assert!(rep.pass, "n = {n}: {rep:?}");
    }
}

#[test]
fn grid_doubling_leaves_kernel_sups_stable() {
    // Hermite induced weight at its zero set.
    let w = Weight::hermite();
    let rec = Arc::new(Recurrence::compute(&w, 7).unwrap());
    let wn = induced(&w, &rec, 6).unwrap();
    let z = rec.zeros(6).unwrap();
    let a_n = wn.mrs_number(6.0).unwrap();
    let sup_at = |count: usize| {
        let grid = build_grid(&wn, &z, Some(DEFAULT_L * a_n), count).unwrap();
        normality_check(&wn, &z, DEFAULT_L, &grid).unwrap().kernel_sup
    };
    let s1 = sup_at(GRID_COUNT);
    let s2 = sup_at(2 * GRID_COUNT);
    assert!(
        (s1 - s2).abs() <= 1e-3 * s1.abs(),
        "kernel sup moved under doubling: {s1} vs {s2}"
    );

    // Quartic weight with the tail modification at a ten-node set.
    let w = Weight::freud(4).unwrap();
    let (wt, _) = w.tilde_auto(2.0).unwrap();
    let rec = Recurrence::compute(&w, 10).unwrap();
    let z = rec.zeros(10).unwrap();
    let basis = LagrangeBasis::new(&z).unwrap();
    let a_n = w.mrs_number(10.0).unwrap();
    let sup_at = |count: usize| {
        let grid = build_grid(&wt, &z, Some(1.5 * a_n), count).unwrap();
        let mut sup = 0.0_f64;
        for &x in &grid {
            sup = sup.max(grunwald_kernel(&basis, &wt, x).unwrap().value);
        }
        sup
    };
    let s1 = sup_at(GRID_COUNT);
    let s2 = sup_at(2 * GRID_COUNT);
    assert!(
        (s1 - s2).abs() <= 1e-3 * s1.abs(),
        "modified-weight kernel sup moved under doubling: {s1} vs {s2}"
    );
}
