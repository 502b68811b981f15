use std::f64::consts::PI;
use std::fs;

use rearr_core::radial::FnSpec;
use rearr_core::reference::B0;
use rearr_core::verify::{run_batch, verify_case, CaseExponents, SGrid};
use rearr_core::{BoundaryCondition, Claim, Error, Extended, MeshSpec, RadialFn, RadialProblem, VerificationCase, Verdict};

fn cone_problem(nodes: usize) -> RadialProblem {
    RadialProblem::new(
        3,
        1.0,
        BoundaryCondition::Dirichlet,
        RadialFn::constant(1.0),
        RadialFn::from_spec("f0", &[]).unwrap(),
        MeshSpec::new(nodes, 1.5),
    )
}

fn case(id: &str, claim: Claim, problem: RadialProblem) -> VerificationCase {
    VerificationCase {
        id: id.into(),
        claim,
        problem,
        s_grid: SGrid::default(),
        seed: 0,
        battery: 0,
        exponents: CaseExponents::default(),
        g: None,
    }
}

#[test]
fn zero_data_gives_zero_constant() {
    let c = case("zero", Claim::GradientRearrangement, cone_problem(200).with_f(RadialFn::zero()));
    let r = verify_case(&c).unwrap();
    assert_eq!(r.empirical_c, Extended::Finite(0.0));
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.ratio_curve.iter().all(|p| p.lhs == Extended::Finite(0.0)));
}

#[test]
fn sharp_case_reports_two_sided_constants() {
    let mut c = case("sharp", Claim::SharpExample, cone_problem(1000));
    c.s_grid = SGrid { points: 100, lo: 0.5001, hi: 0.999 };
    let r = verify_case(&c).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    assert!(r.metrics["identity_max_rel_err"].to_f64() <= 1e-4);
    assert!(r.metrics["inverse_c"].is_finite() && r.empirical_c.is_finite());
    assert!(r.ratio_curve.iter().all(|p| p.s > 0.5 * B0 && p.s < B0));

    c.s_grid.lo = 0.1;
    assert!(verify_case(&c).is_err());
}

#[test]
fn counterexample_rhs_and_growth() {
    let p = RadialProblem::new(
        3,
        1.0,
        BoundaryCondition::Dirichlet,
        RadialFn::zero(),
        RadialFn::from_spec("f1", &[]).unwrap(),
        MeshSpec::new(1000, 1.5),
    );
    let r = verify_case(&case("f1", Claim::MaximalAverageCounterexample, p)).unwrap();
    let rhs = r.metrics["rhs_at_half"].to_f64();
    let exact = 3.0 * B0.cbrt() * 2f64.ln();
    assert!((rhs / exact - 1.0).abs() < 1e-4, "{rhs} vs {exact}");
    assert!(r.metrics["divergence_factor"].to_f64() >= 100.0);
    // the bound decreases in s while |∇u₀|* stays at 1
    assert!(r.ratio_curve.windows(2).all(|w| w[1].rhs.to_f64() < w[0].rhs.to_f64()));
    assert!(r.ratio_curve.iter().all(|pt| (pt.lhs.to_f64() - 1.0).abs() < 0.01));
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn weak_gradient_norm_of_the_cone() {
    let mut c = case("ii", Claim::LorentzCaseIi, cone_problem(2000));
    c.exponents.k = Some(1.0);
    let r = verify_case(&c).unwrap();
    let f = &r.battery[0];
    // sup s^{2/3}·1 = |B₀|^{2/3} and ‖f₀‖₁ = 13π/3
    assert!((f.lhs.to_f64() / B0.powf(2.0 / 3.0) - 1.0).abs() < 1e-3, "{:?}", f.lhs);
    assert!((f.rhs.to_f64() / (13.0 * PI / 3.0) - 1.0).abs() < 1e-6, "{:?}", f.rhs);
}

#[test]
fn constant_data_norm_in_closed_form() {
    let mut c = case("v", Claim::LorentzCaseV, cone_problem(500).with_f(RadialFn::constant(2.0)));
    c.exponents.p = Some(2.0);
    let r = verify_case(&c).unwrap();
    let rhs = r.battery[0].rhs.to_f64();
    assert!((rhs / (2.0 * B0.cbrt()) - 1.0).abs() < 1e-10, "{rhs}");
    assert!(r.empirical_c.is_finite());
}

#[test]
fn singular_data_outside_the_space_gives_zero_ratio() {
    // f₀ ~ 2/r is not in L³ on the unit ball of ℝ³
    let mut c = case("v-f0", Claim::LorentzCaseV, cone_problem(300));
    c.exponents.p = Some(2.0);
    let r = verify_case(&c).unwrap();
    assert_eq!(r.battery[0].rhs, Extended::Infinite);
    assert_eq!(r.battery[0].ratio, Extended::Finite(0.0));
}

#[test]
fn inadmissible_exponents_are_rejected() {
    let mut c = case("bad", Claim::LorentzCaseIii, cone_problem(100));
    c.exponents.q = Some(3.0);
    assert!(matches!(verify_case(&c), Err(Error::Case { .. })));
    let mut c = case("bad", Claim::LorentzCaseViii, cone_problem(100));
    c.exponents = CaseExponents { p: None, q: Some(f64::INFINITY), k: Some(2.0) };
    assert!(verify_case(&c).is_err());
    let mut c = case("bad", Claim::LorentzCaseI, cone_problem(100));
    c.exponents.p = Some(1.5);
    assert!(verify_case(&c).is_err());
}

#[test]
fn difference_ratio_is_symmetric() {
    let f = RadialFn::from_spec("random", &[3.0, 4.0]).unwrap();
    let g = FnSpec { kind: "f0".into(), params: vec![] };
    let mut a = case("fg", Claim::DifferenceWeakBound, cone_problem(400).with_f(f.clone()));
    a.g = Some(g.clone());
    let mut b = case("gf", Claim::DifferenceWeakBound, cone_problem(400).with_f(RadialFn::try_from(g).unwrap()));
    b.g = Some(f.spec().clone());
    let (ra, rb) = (verify_case(&a).unwrap(), verify_case(&b).unwrap());
    assert_eq!(ra.empirical_c, rb.empirical_c);

    let mut same = case("same", Claim::DifferenceWeakBound, cone_problem(100));
    same.g = Some(FnSpec { kind: "f0".into(), params: vec![] });
    assert!(verify_case(&same).is_err());
}

#[test]
fn config_hash_tracks_the_config() {
    let a = case("h", Claim::GradientRearrangement, cone_problem(100));
    let mut b = a.clone();
    assert_eq!(a.config_hash(), b.config_hash());
    b.seed = 1;
    assert_ne!(a.config_hash(), b.config_hash());
    assert_eq!(a.config_hash().len(), 64);
}

const SMALL_BATCH: &str = r#"
[[case]]
id = "a"
claim = "gradient-rearrangement"
seed = 3
battery = 2
problem = { n = 3, R = 1.0, bc = "dirichlet", V = { kind = "constant", params = [1.0] }, f = { kind = "f0" }, mesh = { nodes = 300 } }

[[case]]
id = "b"
claim = "linfty-bound"
seed = 4
battery = 2
problem = { n = 3, R = 1.0, bc = "neumann", V = { kind = "constant", params = [2.0] }, f = { kind = "random", params = [1.0, 3.0] }, mesh = { nodes = 300 } }
"#;

#[test]
fn batch_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("batch.toml");
    fs::write(&cfg, SMALL_BATCH).unwrap();
    let (o1, o2) = (dir.path().join("one"), dir.path().join("two"));
    let a = run_batch(&cfg, &o1).unwrap();
    let b = run_batch(&cfg, &o2).unwrap();
    assert_eq!(a.exit_code, 0);
    assert_eq!(b.exit_code, 0);
    for name in ["a.json", "b.json", "summary.csv", "gate.json"] {
        assert_eq!(fs::read(o1.join(name)).unwrap(), fs::read(o2.join(name)).unwrap(), "{name}");
    }
    let summary = fs::read_to_string(o1.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "id,claim,empirical_C,drift,verdict");
    assert!(lines[1].starts_with("a,gradient-rearrangement,") && lines[1].ends_with(",pass"));
    assert!(lines[2].starts_with("b,linfty-bound,"));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(o1.join("a.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["ratio_curve"].as_array().unwrap().len(), 200);
    assert!(json["statement"].as_str().unwrap().starts_with("consistent with"));
}

#[test]
fn empty_batch_passes_vacuously() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    fs::write(&cfg, "").unwrap();
    let out = run_batch(&cfg, &dir.path().join("out")).unwrap();
    assert_eq!(out.exit_code, 0);
    assert!(out.reports.is_empty());
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert_eq!(summary, "id,claim,empirical_C,drift,verdict\n");
}

#[test]
fn duplicate_ids_and_parse_errors_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dup.toml");
    let one = SMALL_BATCH.split("[[case]]").nth(1).unwrap();
    fs::write(&cfg, format!("[[case]]{one}[[case]]{one}")).unwrap();
    assert!(matches!(run_batch(&cfg, &dir.path().join("out")), Err(Error::Config(m)) if m.contains("duplicate")));
    fs::write(&cfg, "[[case]]\nid = 3").unwrap();
    assert!(matches!(run_batch(&cfg, &dir.path().join("out")), Err(Error::Config(_))));
    assert!(matches!(run_batch(&dir.path().join("missing.toml"), &dir.path().join("out")), Err(Error::Config(_))));
}

#[test]
fn failing_case_still_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fail.toml");
    let broken = SMALL_BATCH.replace("id = \"b\"", "id = \"broken\"").replace(
        "f = { kind = \"random\", params = [1.0, 3.0] }",
        "f = { kind = \"power_sum\", params = [1.0, -3.5] }",
    );
    fs::write(&cfg, broken).unwrap();
    let out = run_batch(&cfg, &dir.path().join("out")).unwrap();
    assert_eq!(out.exit_code, 1);
    assert!(out.reports[0].is_ok() && out.reports[1].is_err());
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/broken.json")).unwrap()).unwrap();
    assert_eq!(json["verdict"], "fail");
    assert!(json["error"].as_str().unwrap().contains("broken"));
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert!(summary.lines().any(|l| l == "broken,linfty-bound,,,fail"));
}
