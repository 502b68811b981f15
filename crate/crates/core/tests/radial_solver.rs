use std::f64::consts::PI;

use proptest::prelude::*;
use rearr_core::radial::{
    gradient_rearrangement, solve_radial, vl_inverse_probe, weak_residual, BoundaryCondition, MeshSpec, RadialFn,
    RadialProblem, RadialSolution,
};
use rearr_core::reference::{u0, B0};
use rearr_core::Extended;

fn u0_problem(nodes: usize) -> RadialProblem {
    RadialProblem::new(
        3,
        1.0,
        BoundaryCondition::Dirichlet,
        RadialFn::constant(1.0),
        RadialFn::from_spec("f0", &[]).unwrap(),
        MeshSpec::new(nodes, 1.5),
    )
}

fn max_error(sol: &RadialSolution, exact: impl Fn(f64) -> f64, from: f64) -> f64 {
    sol.nodes.iter().zip(&sol.u).filter(|(r, _)| **r >= from).map(|(r, u)| (u - exact(*r)).abs()).fold(0.0, f64::max)
}

#[test]
fn recovers_the_cone_solution() {
    let sol = solve_radial(&u0_problem(2000)).unwrap();
    let err = max_error(&sol, u0, 0.0);
    assert!(err <= 1e-3, "max error {err}");
    assert_eq!(*sol.u.last().unwrap(), 0.0);
    assert!(sol.residual_norm < 1e-8, "{}", sol.residual_norm);
    let profile = gradient_rearrangement(&sol, 3).unwrap();
    for i in 0..200 {
        let s = B0 * (0.01 + 0.98 * (i as f64 + 0.5) / 200.0);
        assert!((profile.eval(s) - 1.0).abs() <= 0.01, "s = {s}: {}", profile.eval(s));
    }
}

#[test]
fn laplace_case_with_f1() {
    let p = RadialProblem::new(
        3,
        1.0,
        BoundaryCondition::Dirichlet,
        RadialFn::zero(),
        RadialFn::from_spec("f1", &[]).unwrap(),
        MeshSpec::new(500, 1.5),
    );
    let sol = solve_radial(&p).unwrap();
    // fluxes are exact for a linear solution and there is no lumped term
    assert!(max_error(&sol, u0, 0.0) < 1e-10);
}

#[test]
fn neumann_manufactured_solution_is_second_order() {
    let f = RadialFn::custom("manufactured", |r| PI * PI * (PI * r).cos() + 2.0 * PI * (PI * r).sin() / r + (PI * r).cos(), 0.0);
    let p = RadialProblem::new(3, 1.0, BoundaryCondition::Neumann, RadialFn::constant(1.0), f, MeshSpec::new(41, 1.0));
    let mut errors = vec![];
    let mut mesh = p.mesh;
    for _ in 0..4 {
        let sol = solve_radial(&p.with_mesh(mesh)).unwrap();
        assert_eq!(*sol.du.last().unwrap(), 0.0);
        errors.push(max_error(&sol, |r| (PI * r).cos(), 0.1));
        mesh = mesh.doubled();
    }
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "errors {errors:?}");
    }
}

#[test]
fn gradient_profile_of_half_square() {
    let nodes = MeshSpec::new(4001, 1.0).nodes_on(1.0);
    let u: Vec<f64> = nodes.iter().map(|r| 0.5 * r * r).collect();
    let sol = RadialSolution { du: nodes.clone(), nodes, u, residual_norm: 0.0 };
    let profile = gradient_rearrangement(&sol, 3).unwrap();
    for i in 1..100 {
        let s = B0 * i as f64 / 100.0;
        let exact = (1.0 - s / B0).cbrt();
        assert!((profile.eval(s) - exact).abs() < 1e-3, "s = {s}");
    }

    let zero = solve_radial(&u0_problem(100).with_f(RadialFn::zero())).unwrap();
    let profile = gradient_rearrangement(&zero, 3).unwrap();
    assert_eq!(profile.eval(0.0), 0.0);
}

#[test]
fn weak_residual_decays_quadratically() {
    let p = u0_problem(101).with_f(RadialFn::from_spec("random", &[5.0, 4.0]).unwrap());
    let p = RadialProblem { v: RadialFn::from_spec("power_sum", &[1.0, -0.5]).unwrap(), ..p };
    let coarse = solve_radial(&p).unwrap();
    let fine = solve_radial(&p.with_mesh(p.mesh.doubled())).unwrap();
    for k in 0..20 {
        // φ(r) = (1 − r²) cos(k r), vanishing at R = 1
        let kf = k as f64;
        let phi = move |r: f64| (1.0 - r * r) * (kf * r).cos();
        let dphi = move |r: f64| -2.0 * r * (kf * r).cos() - (1.0 - r * r) * kf * (kf * r).sin();
        let rc = weak_residual(&p, &coarse, phi, dphi).abs();
        let rf = weak_residual(&p, &fine, phi, dphi).abs();
        let h2 = 1e-4;
        assert!(rc <= 50.0 * h2 * (1.0 + kf), "k = {k}: {rc}");
        assert!(rf <= rc / 3.0 || rf < 1e-9, "k = {k}: coarse {rc}, fine {rf}");
    }
}

#[test]
fn inverse_probe_on_the_cone() {
    // ‖u₀‖₁ = π/3, ‖f₀‖₁ = 13π/3
    let ratio = vl_inverse_probe(&u0_problem(2000), 1.0).unwrap().finite().unwrap();
    assert!((ratio - 1.0 / 13.0).abs() < 1e-4, "{ratio}");
    let p = u0_problem(400).with_f(RadialFn::from_spec("power_sum", &[-4.0, -1.0, 2.0, 1.0, -2.0, 0.0]).unwrap());
    let doubled = vl_inverse_probe(&p, 1.0).unwrap().finite().unwrap();
    let single = vl_inverse_probe(&u0_problem(400), 1.0).unwrap().finite().unwrap();
    assert!((doubled / single - 1.0).abs() < 1e-12);
    // f₀ ∉ L³ while u₀ is bounded
    assert_eq!(vl_inverse_probe(&u0_problem(400), 3.0).unwrap(), Extended::Finite(0.0));
    assert!(vl_inverse_probe(&u0_problem(400).with_f(RadialFn::zero()), 1.0).is_err());
}

#[test]
fn inverse_probe_battery_is_mesh_stable() {
    let v = RadialFn::from_spec("power_sum", &[1.0, -0.5]).unwrap();
    let mut max = [0.0f64; 2];
    for seed in 0..10 {
        for p_exp in [1.0, 2.0, 3.0] {
            let base = RadialProblem::new(
                3,
                1.0,
                BoundaryCondition::Dirichlet,
                v.clone(),
                RadialFn::from_spec("random", &[seed as f64, 5.0]).unwrap(),
                MeshSpec::new(200, 1.5),
            );
            for (j, p) in [base.clone(), base.with_mesh(base.mesh.doubled())].iter().enumerate() {
                let r = vl_inverse_probe(p, p_exp).unwrap().finite().unwrap();
                max[j] = max[j].max(r);
            }
        }
    }
    assert!((max[1] - max[0]).abs() / max[1] <= 0.05, "{max:?}");
}

#[test]
fn config_round_trip_and_rejections() {
    let text = r#"
n = 3
R = 1.0
bc = "neumann"
V = { kind = "constant", params = [1.0] }
f = { kind = "f0" }
mesh = { nodes = 300 }
"#;
    let p = RadialProblem::from_toml(text).unwrap();
    assert_eq!(p.mesh.gamma, 1.5);
    let again = RadialProblem::from_toml(&toml::to_string(&p).unwrap()).unwrap();
    assert_eq!(toml::to_string(&again).unwrap(), toml::to_string(&p).unwrap());
    assert!(RadialProblem::from_toml(&text.replace("[1.0]", "[0.0]").replace("\"constant\"", "\"zero\", params = []#")).is_err());
    assert!(RadialProblem::from_toml(&text.replace("f0", "mystery")).is_err());
    let singular = u0_problem(100).with_f(RadialFn::from_spec("power_sum", &[1.0, -3.5]).unwrap());
    assert!(solve_radial(&singular).is_err());

    let sol = solve_radial(&u0_problem(10)).unwrap();
    let mut buf = Vec::new();
    sol.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("r,u,du\n"));
    assert_eq!(text.lines().count(), 11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximum_principle(
        v0 in 0.0..5.0f64,
        v1 in 0.0..5.0f64,
        gamma_v in -1.5..2.0f64,
        coefs in prop::collection::vec(0.0..2.0f64, 1..4),
        nodes in 20usize..300,
    ) {
        let mut f = vec![];
        for (k, c) in coefs.iter().enumerate() {
            f.extend([-c, k as f64 - 1.0]);
        }
        let p = RadialProblem::new(
            3,
            2.0,
            BoundaryCondition::Dirichlet,
            RadialFn::from_spec("power_sum", &[v0, 0.0, v1, gamma_v]).unwrap(),
            RadialFn::from_spec("power_sum", &f).unwrap(),
            MeshSpec::new(nodes, 1.5),
        );
        let sol = solve_radial(&p).unwrap();
        prop_assert!(sol.u.iter().all(|&u| u <= 0.0));
    }
}
