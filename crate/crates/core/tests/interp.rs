use rearr_core::interp::*;
use rearr_core::RearrangementProfile;

#[test]
fn calderon_exponent_checks() {
    assert!(CalderonExponents::new(2.0, 1.0, 1.0, 2.0).is_err());
    assert!(CalderonExponents::new(1.0, 2.0, 2.0, 2.0).is_err());
    let e = CalderonExponents::new(1.0, 3.0, 1.5, f64::INFINITY).unwrap();
    assert!((e.alpha() - 1.0).abs() < 1e-15);
}

#[test]
fn bounds_reject_out_of_range_points() {
    let f = RearrangementProfile::constant(1.0, 2.0).unwrap();
    assert!(gradient_bound(&f, 3, 0.0).is_err());
    assert!(gradient_bound(&f, 3, 2.0).is_err());
    assert!(gradient_bound(&f, 2, 1.0).is_err());
    assert!(gradient_bound_maximal(&f, 3, 2.5).is_err());
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rearr_core::rearrange::{decreasing_rearrangement, maximal_average};
use rearr_core::reference::{f0, f0_star_profile, f1_star_profile, gradient_bound_maximal_f1, sample_shells, B0};
use rearr_core::{Extended, GridFunction};

fn random_step(rng: &mut ChaCha8Rng, omega: f64) -> RearrangementProfile {
    let k = rng.random_range(1..12usize);
    let cells: Vec<(f64, f64)> = (0..k).map(|_| (rng.random_range(0.05..1.0), rng.random_range(-4.0..4.0))).collect();
    let total: f64 = cells.iter().map(|c| c.0).sum();
    let scaled: Vec<(f64, f64)> = cells.iter().map(|&(m, v)| (m * omega / total, v)).collect();
    decreasing_rearrangement(&GridFunction::from_pairs(&scaled, "r").unwrap())
}

fn rel(a: Extended, b: f64) -> f64 {
    ((a.to_f64() - b) / b).abs()
}

#[test]
fn zero_data_give_zero() {
    let z = RearrangementProfile::zero(2.0).unwrap();
    let e = CalderonExponents::new(1.0, 3.0, 1.5, f64::INFINITY).unwrap();
    assert_eq!(calderon_apply(&z, &e, 0.7).unwrap(), Extended::Finite(0.0));
    assert_eq!(gradient_bound(&z, 3, 0.7).unwrap(), Extended::Finite(0.0));
    assert_eq!(gradient_bound_maximal(&z, 3, 0.7).unwrap(), Extended::Finite(0.0));
    assert_eq!(k_functional_l1_ln1(&z, 3, 0.7).unwrap(), Extended::Finite(0.0));
    assert_eq!(k_functional_weak_linf(&z, 3, 0.7).unwrap(), Extended::Finite(0.0));
}

#[test]
fn calderon_indicator_closed_form() {
    let g = RearrangementProfile::indicator(1.0, 2.0).unwrap();
    let e = CalderonExponents::new(1.0, 3.0, 1.5, f64::INFINITY).unwrap();
    assert!(rel(calderon_apply(&g, &e, 1.0).unwrap(), 1.0) < 1e-13);
    // t = 1/2: t^{−2/3}·t + 3(1 − t^{1/3})
    let want = 3.0 - 2.0 * 0.5f64.cbrt();
    assert!(rel(calderon_apply(&g, &e, 0.5).unwrap(), want) < 1e-13);
}

#[test]
fn calderon_identity_on_closed_forms() {
    let e = CalderonExponents::new(1.0, 3.0, 1.5, f64::INFINITY).unwrap();
    for p in [f0_star_profile(), f1_star_profile()] {
        for i in 1..50 {
            let t = B0 * i as f64 / 50.0;
            let a = calderon_apply(&p, &e, t).unwrap().to_f64();
            let b = gradient_bound(&p, 3, t).unwrap().to_f64();
            assert!(((a - b) / b).abs() < 1e-10, "t = {t}: {a} vs {b}");
        }
    }
}

#[test]
fn gradient_bound_two_step_oracle() {
    // a on [0, x₁), b on [x₁, Ω); n = 3
    let (a, b, x1, omega) = (3.0, 0.5, 0.4, 1.3);
    let p = RearrangementProfile::from_steps(vec![x1, omega], vec![a, b], omega).unwrap();
    let oracle = |s: f64| {
        if s < x1 {
            a * s.cbrt() + 3.0 * a * (x1.cbrt() - s.cbrt()) + 3.0 * b * (omega.cbrt() - x1.cbrt())
        } else {
            (a * x1 + b * (s - x1)) / s.powf(2.0 / 3.0) + 3.0 * b * (omega.cbrt() - s.cbrt())
        }
    };
    for i in 1..100 {
        let s = omega * i as f64 / 100.0;
        assert!(rel(gradient_bound(&p, 3, s).unwrap(), oracle(s)) < 1e-10, "s = {s}");
    }
}

#[test]
fn maximal_bound_examples() {
    // f** ≡ c, so the bound is 3c(Ω^{1/3} − s^{1/3})
    let c = RearrangementProfile::constant(2.0, 1.5).unwrap();
    for s in [0.01f64, 0.3, 1.2] {
        let want = 6.0 * (1.5f64.cbrt() - s.cbrt());
        assert!(rel(gradient_bound_maximal(&c, 3, s).unwrap(), want) < 1e-12);
    }
    let f1 = f1_star_profile();
    for i in 1..20 {
        let s = B0 * i as f64 / 20.0;
        assert!(rel(gradient_bound_maximal(&f1, 3, s).unwrap(), gradient_bound_maximal_f1(s)) < 1e-10);
    }
}

#[test]
fn maximal_bound_against_midpoint_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let p = random_step(&mut rng, 1.0);
        let s: f64 = rng.random_range(0.05..0.9);
        // r = u³ maps ∫_s^1 f**(r) r^{−2/3} dr to 3∫ f**(u³) du
        let (lo, hi, m) = (s.cbrt(), 1.0, 20_000);
        let h = (hi - lo) / m as f64;
        let quad: f64 = (0..m).map(|i| 3.0 * maximal_average(&p, (lo + (i as f64 + 0.5) * h).powi(3)).unwrap()).sum::<f64>() * h;
        assert!(rel(gradient_bound_maximal(&p, 3, s).unwrap(), quad) < 1e-6);
    }
}

#[test]
fn k_functional_examples() {
    let p = RearrangementProfile::from_steps(vec![0.2, 1.0], vec![4.0, 1.0], 1.0).unwrap();
    let l1 = 0.8 + 0.8;
    assert!(rel(k_functional_l1_ln1(&p, 3, 1.0).unwrap(), l1) < 1e-14);
    assert!(rel(k_functional_l1_ln1(&p, 3, 5.0).unwrap(), l1) < 1e-14);

    let e = RearrangementProfile::indicator(1.0, 2.0).unwrap();
    let want = 0.5f64.powf(1.5) + 1.5 * (1.0 - 0.5f64.sqrt());
    assert!(rel(k_functional_l1_ln1(&e, 3, 0.5).unwrap(), want) < 1e-13);

    let c = RearrangementProfile::constant(3.0, 10.0).unwrap();
    for s in [0.01, 0.1, 0.5] {
        assert!(rel(k_functional_weak_linf(&c, 3, s).unwrap(), 3.0 * s) < 1e-12);
    }
}

#[test]
fn k_functional_monotone_and_concave() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let p = random_step(&mut rng, 2.0);
        let top = 1.2 * 2f64.powf(2.0 / 3.0);
        let vals: Vec<f64> =
            (1..=200).map(|i| k_functional_l1_ln1(&p, 3, top * i as f64 / 200.0).unwrap().to_f64()).collect();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        for w in vals.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-9, "{w:?}");
        }
    }
}

#[test]
fn maximal_chain_constant_is_mesh_stable() {
    // ratio of the f*-bound to |Ω|^{−1/n'}‖f‖₁ + (1/n')∫ f** r^{−1/n'}
    let chain_constant = |shells: usize| {
        let g = sample_shells(|r| f0(r).abs(), 3, 1.0, shells, 2.0).unwrap();
        let p = decreasing_rearrangement(&g);
        let l1 = p.integral(0.0, B0);
        let mut worst: f64 = 0.0;
        for i in 1..100 {
            let s = B0 * i as f64 / 100.0;
            let lhs = gradient_bound(&p, 3, s).unwrap().to_f64();
            let rhs = B0.powf(-2.0 / 3.0) * l1 + gradient_bound_maximal(&p, 3, s).unwrap().to_f64() * 2.0 / 3.0;
            worst = worst.max(lhs / rhs);
        }
        worst
    };
    let (a, b) = (chain_constant(2000), chain_constant(4000));
    assert!(a.is_finite() && a > 0.0);
    assert!(((a - b) / b).abs() <= 0.10, "{a} vs {b}");
}

#[test]
fn bounds_are_subadditive_under_truncation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let p = random_step(&mut rng, 1.0);
        let level: f64 = rng.random_range(0.0..4.0);
        let (lo, hi) = p.split_at_level(level).unwrap();
        for i in 1..20 {
            let s = i as f64 / 20.0;
            for bound in [gradient_bound, gradient_bound_maximal] {
                let whole = bound(&p, 3, s).unwrap().to_f64();
                let parts = bound(&lo, 3, s).unwrap().to_f64() + bound(&hi, 3, s).unwrap().to_f64();
                assert!(whole <= parts * (1.0 + 1e-12) + 1e-14);
            }
        }
    }
}
