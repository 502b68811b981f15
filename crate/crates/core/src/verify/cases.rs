use std::collections::BTreeMap;

use crate::error::{domain, Result};
use crate::extended::Extended;
use crate::interp::{conjugate, gradient_bound, gradient_bound_maximal};
use crate::quad::{integrate, integrate_from_zero, TailHint};
use crate::radial::{
    gradient_rearrangement, shell_grid, solve_radial, value_grid, MeshSpec, RadialFn, RadialProblem, RadialSolution,
};
use crate::rearrange::{decreasing_rearrangement, median, RearrangementProfile};
use crate::reference;
use crate::ri_spaces::{lorentz_quasinorm, lorentz_zygmund_quasinorm, LorentzExponents, LorentzZygmundExponents};

use super::{check, drift, ratio, BatteryPoint, CaseExponents, Claim, CurvePoint, Verdict, VerificationCase, VerificationReport};
use super::{MAX_DRIFT, SCHEMA_VERSION};

/// Shells used to rearrange the data `f`, independent of the solver mesh so
/// that refinement drift measures the solver alone.
const DATA_SHELLS: usize = 20_000;
const DATA_GAMMA: f64 = 2.0;

/// Terms in each random smooth datum of a battery.
const RANDOM_TERMS: f64 = 5.0;

/// Identity tolerance for the closed-form right-hand side of the sharp case.
const IDENTITY_TOL: f64 = 1e-4;

/// Required growth of the ratio between `s = |Ω|/2` and `s = 0.999|Ω|`.
const COUNTEREXAMPLE_FACTOR: f64 = 100.0;

/// A rearrangement-invariant quasi-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Space {
    Lorentz(LorentzExponents),
    Zygmund(LorentzZygmundExponents),
    /// `L^∞`, read off the nodal derivative for gradients.
    Sup,
}

impl Space {
    pub fn norm(&self, p: &RearrangementProfile) -> Extended {
        match self {
            Space::Lorentz(e) => lorentz_quasinorm(p, *e),
            Space::Zygmund(e) => lorentz_zygmund_quasinorm(p, *e),
            Space::Sup => Extended::from_f64(p.eval(0.0)),
        }
    }

    /// Whether a profile behaving like `s^a` at the origin has infinite norm.
    fn diverges_for(&self, a: f64) -> bool {
        const EPS: f64 = 1e-12;
        let (q, k, beta) = match self {
            Space::Lorentz(e) => (e.q(), e.s(), 0.0),
            Space::Zygmund(e) => (e.q(), e.k(), e.beta()),
            Space::Sup => (f64::INFINITY, f64::INFINITY, 0.0),
        };
        let critical = -1.0 / q;
        if a < critical - EPS {
            return true;
        }
        if a > critical + EPS {
            return false;
        }
        if k.is_infinite() {
            beta > 0.0
        } else {
            beta * k >= -1.0
        }
    }

    pub fn label(&self) -> String {
        let show = |x: f64| if x.is_infinite() { "inf".to_string() } else { format!("{x}") };
        match self {
            Space::Lorentz(e) => format!("L^({},{})", show(e.q()), show(e.s())),
            Space::Zygmund(e) => format!("L^({},{})(log L)^{}", show(e.q()), show(e.k()), e.beta()),
            Space::Sup => "L^inf".into(),
        }
    }
}

fn lorentz(q: f64, s: f64) -> Result<Space> {
    Ok(Space::Lorentz(LorentzExponents::new(q, s)?))
}

fn need(x: Option<f64>, name: &str, case: u8) -> Result<f64> {
    x.ok_or_else(|| domain(format!("Lorentz case {case} needs exponent `{name}`")))
}

/// Left (gradient) and right (data) spaces of Lorentz-scale case `which`
/// (1–8) in dimension `n`.
pub fn lorentz_case_spaces(which: u8, n: u32, e: &CaseExponents) -> Result<(Space, Space)> {
    let nf = f64::from(n);
    let np = conjugate(n);
    let inf = f64::INFINITY;
    match which {
        1 => {
            let p = need(e.p, "p", which)?;
            check((1.0..np).contains(&p), || format!("case 1 needs p ∈ [1, n′), got {p}"))?;
            Ok((lorentz(p, p)?, lorentz(1.0, 1.0)?))
        }
        2 => {
            let k = need(e.k, "k", which)?;
            check(k > 0.0 && k <= 1.0, || format!("case 2 needs k ∈ (0, 1], got {k}"))?;
            Ok((lorentz(np, inf)?, lorentz(1.0, k)?))
        }
        3 => {
            let q = need(e.q, "q", which)?;
            check(q > 1.0 && q < nf, || format!("case 3 needs q ∈ (1, n), got {q}"))?;
            let t = nf * q / (nf - q);
            Ok((lorentz(t, t)?, lorentz(q, q)?))
        }
        4 => {
            let q = need(e.q, "q", which)?;
            let k = need(e.k, "k", which)?;
            check(q > 1.0 && q < nf && k > 0.0, || format!("case 4 needs q ∈ (1, n), k ∈ (0, ∞], got {q}, {k}"))?;
            Ok((lorentz(nf * q / (nf - q), k)?, lorentz(q, k)?))
        }
        5 => {
            let p = need(e.p, "p", which)?;
            check(p >= 1.0 && p.is_finite(), || format!("case 5 needs p ∈ [1, ∞), got {p}"))?;
            Ok((lorentz(p, p)?, lorentz(nf, nf)?))
        }
        6 => {
            let k = need(e.k, "k", which)?;
            check(k > 1.0, || format!("case 6 needs k ∈ (1, ∞], got {k}"))?;
            Ok((Space::Zygmund(LorentzZygmundExponents::new(inf, k, -1.0)?), lorentz(nf, k)?))
        }
        7 => {
            let q = need(e.q, "q", which)?;
            check(q > nf, || format!("case 7 needs q ∈ (n, ∞], got {q}"))?;
            Ok((Space::Sup, lorentz(q, q)?))
        }
        8 => {
            let q = need(e.q, "q", which)?;
            let k = need(e.k, "k", which)?;
            let ok = (q == nf && k > 0.0 && k <= 1.0) || (q > nf && k > 0.0);
            check(ok, || format!("case 8 needs q = n with k ∈ (0, 1], or q ∈ (n, ∞], got {q}, {k}"))?;
            Ok((Space::Sup, lorentz(q, k)?))
        }
        _ => Err(domain(format!("no Lorentz case {which}"))),
    }
}

/// `|f|*` from exact shell averages of `|f|` on a fine graded mesh of
/// `B(0, R)`.
pub fn data_profile(f: &RadialFn, n: u32, radius: f64) -> Result<RearrangementProfile> {
    let nodes = MeshSpec::new(DATA_SHELLS + 1, DATA_GAMMA).nodes_on(radius);
    let m = f64::from(n - 1);
    let h = |r: f64| f.eval(r).abs() * r.powf(m);
    let mut values = Vec::with_capacity(DATA_SHELLS);
    for (i, w) in nodes.windows(2).enumerate() {
        let mass =
            if i == 0 { integrate_from_zero(h, w[1], TailHint::power(f.lead_exp() + m)) } else { integrate(h, w[0], w[1]) };
        if !mass.is_finite() {
            return Err(domain(format!("datum {} is not integrable", f.spec().kind)));
        }
        values.push(mass * (m + 1.0) / (w[1].powf(m + 1.0) - w[0].powf(m + 1.0)));
    }
    Ok(decreasing_rearrangement(&shell_grid(&nodes, &values, n, "data")?))
}

/// Norm of the data, with `+∞` decided from the leading power at the origin
/// rather than from the (always finite) sampled profile.
fn data_norm(space: &Space, f: &RadialFn, profile: &RearrangementProfile, n: u32) -> Extended {
    let lead = f.lead_exp();
    if lead < 0.0 && space.diverges_for(lead / f64::from(n)) {
        return Extended::Infinite;
    }
    space.norm(profile)
}

fn gradient_sup(sol: &RadialSolution) -> f64 {
    sol.du.iter().chain(sol.midpoint_slopes().iter()).fold(0.0, |m, d| m.max(d.abs()))
}

struct Datum {
    label: String,
    f: RadialFn,
    profile: RearrangementProfile,
}

fn datum(label: String, f: RadialFn, p: &RadialProblem) -> Result<Datum> {
    let profile = data_profile(&f, p.n, p.radius)?;
    Ok(Datum { label, f, profile })
}

fn random_datum(seed: u64, i: usize) -> Result<RadialFn> {
    RadialFn::from_spec("random", &[(seed * 1000 + i as u64) as f64, RANDOM_TERMS])
}

fn battery(case: &VerificationCase) -> Result<Vec<Datum>> {
    let p = &case.problem;
    let mut out = vec![datum("f".into(), p.f.clone(), p)?];
    for i in 0..case.battery {
        out.push(datum(format!("random-{i}"), random_datum(case.seed, i)?, p)?);
    }
    Ok(out)
}

#[derive(Default)]
struct Eval {
    c: Extended,
    curve: Vec<CurvePoint>,
    battery: Vec<BatteryPoint>,
    metrics: BTreeMap<String, Extended>,
}

fn max_ext(xs: impl IntoIterator<Item = Extended>) -> Extended {
    xs.into_iter().fold(Extended::Finite(0.0), Extended::max)
}

fn sweep(
    s_points: &[f64],
    lhs: impl Fn(f64) -> Result<Extended>,
    rhs: impl Fn(f64) -> Result<Extended>,
) -> Result<Vec<CurvePoint>> {
    s_points
        .iter()
        .map(|&s| {
            let (l, r) = (lhs(s)?, rhs(s)?);
            Ok(CurvePoint { s, lhs: l, rhs: r, ratio: ratio(l, r) })
        })
        .collect()
}

fn worst(curve: &[CurvePoint]) -> Option<&CurvePoint> {
    curve.iter().fold(None, |best: Option<&CurvePoint>, p| match best {
        Some(b) if b.ratio.to_f64() >= p.ratio.to_f64() => Some(b),
        _ => Some(p),
    })
}

fn gradient_rearrangement_eval(case: &VerificationCase, data: &[Datum], mesh: MeshSpec) -> Result<Eval> {
    let p = case.problem.with_mesh(mesh);
    let s_points = case.s_grid.points_on(p.domain_measure());
    let mut ev = Eval::default();
    for d in data {
        let sol = solve_radial(&p.with_f(d.f.clone()))?;
        let g = gradient_rearrangement(&sol, p.n)?;
        let curve = sweep(&s_points, |s| Ok(Extended::from_f64(g.eval(s))), |s| gradient_bound(&d.profile, p.n, s))?;
        if let Some(w) = worst(&curve) {
            ev.battery.push(BatteryPoint { data: d.label.clone(), lhs: w.lhs, rhs: w.rhs, ratio: w.ratio });
            ev.c = ev.c.max(w.ratio);
        }
        if ev.curve.is_empty() {
            ev.curve = curve;
        }
    }
    Ok(ev)
}

fn sharp_eval(case: &VerificationCase, data: &[Datum], mesh: MeshSpec) -> Result<Eval> {
    let p = case.problem.with_mesh(mesh);
    let s_points = case.s_grid.points_on(p.domain_measure());
    let d = &data[0];
    let sol = solve_radial(&p.with_f(d.f.clone()))?;
    let g = gradient_rearrangement(&sol, p.n)?;
    let curve = sweep(&s_points, |s| Ok(Extended::from_f64(g.eval(s))), |s| gradient_bound(&d.profile, p.n, s))?;
    let inverse = max_ext(curve.iter().map(|c| ratio(c.rhs, c.lhs)));
    let mut ev = Eval { c: max_ext(curve.iter().map(|c| c.ratio)), curve, ..Default::default() };
    ev.metrics.insert("inverse_c".into(), inverse);
    Ok(ev)
}

/// Largest relative gap between the closed-form right-hand side for `f₀`
/// and its quadrature on `(|B₀|/2, |B₀|)`.
fn sharp_identity_error() -> Result<f64> {
    let profile = reference::f0_star_profile();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let s = reference::B0 * (0.5 + 0.5 * (i as f64 + 0.5) / 100.0);
        let q = gradient_bound(&profile, 3, s)?.to_f64();
        let exact = reference::gradient_bound_f0(s);
        worst = worst.max(((q - exact) / exact).abs());
    }
    Ok(worst)
}

fn counterexample_eval(case: &VerificationCase, data: &[Datum], mesh: MeshSpec) -> Result<Eval> {
    let p = case.problem.with_mesh(mesh);
    let omega = p.domain_measure();
    let d = &data[0];
    let sol = solve_radial(&p.with_f(d.f.clone()))?;
    let g = gradient_rearrangement(&sol, p.n)?;
    let lhs = |s: f64| Ok(Extended::from_f64(g.eval(s)));
    let rhs = |s: f64| gradient_bound_maximal(&d.profile, p.n, s);
    let curve = sweep(&case.s_grid.points_on(omega), lhs, rhs)?;
    let probe = sweep(&[0.5 * omega, 0.999 * omega], lhs, rhs)?;
    let factor = ratio(probe[1].ratio, probe[0].ratio);
    let mut ev = Eval { c: max_ext(curve.iter().map(|c| c.ratio)), curve, ..Default::default() };
    ev.metrics.insert("ratio_at_half".into(), probe[0].ratio);
    ev.metrics.insert("ratio_at_0.999".into(), probe[1].ratio);
    ev.metrics.insert("divergence_factor".into(), factor);
    ev.metrics.insert("rhs_at_half".into(), probe[0].rhs);
    Ok(ev)
}

fn norm_battery_eval(
    case: &VerificationCase,
    data: &[Datum],
    mesh: MeshSpec,
    left: &Space,
    right: &Space,
) -> Result<Eval> {
    let p = case.problem.with_mesh(mesh);
    let ln1 = lorentz(f64::from(p.n), 1.0)?;
    let mut ev = Eval::default();
    let mut sup_check = Extended::Finite(0.0);
    for d in data {
        let sol = solve_radial(&p.with_f(d.f.clone()))?;
        let lhs = match left {
            Space::Sup => Extended::from_f64(gradient_sup(&sol)),
            space => space.norm(&gradient_rearrangement(&sol, p.n)?),
        };
        let rhs = data_norm(right, &d.f, &d.profile, p.n);
        let r = ratio(lhs, rhs);
        ev.c = ev.c.max(r);
        ev.battery.push(BatteryPoint { data: d.label.clone(), lhs, rhs, ratio: r });
        if *left == Space::Sup {
            sup_check = sup_check.max(ratio(lhs, data_norm(&ln1, &d.f, &d.profile, p.n)));
        }
    }
    if *left == Space::Sup {
        ev.metrics.insert("linfty_by_ln1".into(), sup_check);
    }
    Ok(ev)
}

fn difference(f: &RadialFn, g: &RadialFn) -> RadialFn {
    let (f2, g2) = (f.clone(), g.clone());
    let label = format!("{}-{}", f.spec().kind, g.spec().kind);
    RadialFn::custom(&label, move |r| f2.eval(r) - g2.eval(r), f.lead_exp().min(g.lead_exp()))
}

struct Pair {
    label: String,
    f: RadialFn,
    g: RadialFn,
    l1: f64,
}

fn pairs(case: &VerificationCase) -> Result<Vec<Pair>> {
    let p = &case.problem;
    let g0 = match &case.g {
        Some(spec) => RadialFn::try_from(spec.clone())?,
        None => RadialFn::zero(),
    };
    let mut raw = vec![("f-g".to_string(), p.f.clone(), g0)];
    for i in 0..case.battery {
        raw.push((format!("random-{i}"), random_datum(case.seed, 2 * i)?, random_datum(case.seed, 2 * i + 1)?));
    }
    raw.into_iter()
        .map(|(label, f, g)| {
            let l1 = data_profile(&difference(&f, &g), p.n, p.radius)?.integral(0.0, p.domain_measure());
            check(l1 > 0.0, || format!("pair {label}: f = g leaves the ratio undefined"))?;
            Ok(Pair { label, f, g, l1 })
        })
        .collect()
}

fn difference_eval(case: &VerificationCase, pairs: &[Pair], mesh: MeshSpec) -> Result<Eval> {
    let p = case.problem.with_mesh(mesh);
    let n = p.n;
    let weak_grad = lorentz(conjugate(n), f64::INFINITY)?;
    let weak_val = lorentz(f64::from(n) / f64::from(n - 2), f64::INFINITY)?;
    let mut ev = Eval::default();
    let mut centred_c = Extended::Finite(0.0);
    for pair in pairs {
        let u = solve_radial(&p.with_f(pair.f.clone()))?;
        let v = solve_radial(&p.with_f(pair.g.clone()))?;
        let slopes: Vec<f64> =
            u.midpoint_slopes().iter().zip(v.midpoint_slopes()).map(|(a, b)| (a - b).abs()).collect();
        let grad = decreasing_rearrangement(&shell_grid(&u.nodes, &slopes, n, "grad difference")?);
        let lhs = weak_grad.norm(&grad);
        let rhs = Extended::Finite(pair.l1);
        let r = ratio(lhs, rhs);
        ev.c = ev.c.max(r);
        ev.battery.push(BatteryPoint { data: pair.label.clone(), lhs, rhs, ratio: r });

        let w = value_grid(&u, n)?.zip_with(&value_grid(&v, n)?, |a, b| a - b)?;
        let med = median(&w);
        let centred = decreasing_rearrangement(&w.map(|x| x - med)?);
        centred_c = centred_c.max(ratio(weak_val.norm(&centred), rhs));
    }
    ev.metrics.insert("median_centred_ratio".into(), centred_c);
    Ok(ev)
}

fn regime(fs: &[&RadialFn], n: u32) -> String {
    if fs.iter().all(|f| 2.0 * f.lead_exp() + f64::from(n) > 0.0) {
        "L² regime".into()
    } else {
        "L¹ data beyond L²; approximation limit assumed".into()
    }
}

fn describe(claim: Claim) -> String {
    match claim {
        Claim::GradientRearrangement => "the pointwise bound of |∇u|* by f*".into(),
        Claim::SharpExample => "two-sided sharpness of the pointwise bound on (|Ω|/2, |Ω|)".into(),
        Claim::MaximalAverageCounterexample => "failure of the pointwise bound by f**".into(),
        Claim::LinftyBound => "the bound of ‖∇u‖_∞ by ‖f‖_{L^{n,1}}".into(),
        Claim::DifferenceWeakBound => "the weak-type bound of ∇u − ∇v by ‖f − g‖₁".into(),
        other => format!("the Lorentz-scale gradient estimate, case {}", other.lorentz_case().unwrap_or(0)),
    }
}

pub(super) fn evaluate(case: &VerificationCase) -> Result<VerificationReport> {
    let mesh = case.problem.mesh;
    let fine = mesh.doubled();
    let n = case.problem.n;
    let mut spaces = String::new();
    let (coarse, refined, extra_ok, regime_label) = match case.claim {
        Claim::GradientRearrangement => {
            let data = battery(case)?;
            let fs: Vec<&RadialFn> = data.iter().map(|d| &d.f).collect();
            let label = regime(&fs, n);
            (gradient_rearrangement_eval(case, &data, mesh)?, gradient_rearrangement_eval(case, &data, fine)?, true, label)
        }
        Claim::SharpExample => {
            check(case.s_grid.lo >= 0.5, || format!("sharp case samples (|Ω|/2, |Ω|), got lo = {}", case.s_grid.lo))?;
            let data = vec![datum("f".into(), case.problem.f.clone(), &case.problem)?];
            let mut a = sharp_eval(case, &data, mesh)?;
            let b = sharp_eval(case, &data, fine)?;
            let identity = sharp_identity_error()?;
            let inv_drift = drift(a.metrics["inverse_c"], b.metrics["inverse_c"]);
            a.metrics.insert("identity_max_rel_err".into(), Extended::Finite(identity));
            a.metrics.insert("inverse_drift".into(), inv_drift);
            let ok = identity <= IDENTITY_TOL
                && a.metrics["inverse_c"].is_finite()
                && inv_drift.finite().is_some_and(|d| d <= MAX_DRIFT);
            (a, b, ok, regime(&[&case.problem.f], n))
        }
        Claim::MaximalAverageCounterexample => {
            let data = vec![datum("f".into(), case.problem.f.clone(), &case.problem)?];
            let a = counterexample_eval(case, &data, mesh)?;
            let b = counterexample_eval(case, &data, fine)?;
            let ok = a.metrics["divergence_factor"].finite().is_some_and(|x| x >= COUNTEREXAMPLE_FACTOR);
            (a, b, ok, regime(&[&case.problem.f], n))
        }
        Claim::LinftyBound => {
            let data = battery(case)?;
            let fs: Vec<&RadialFn> = data.iter().map(|d| &d.f).collect();
            let label = regime(&fs, n);
            let right = lorentz(f64::from(n), 1.0)?;
            let a = norm_battery_eval(case, &data, mesh, &Space::Sup, &right)?;
            let b = norm_battery_eval(case, &data, fine, &Space::Sup, &right)?;
            (a, b, true, label)
        }
        Claim::DifferenceWeakBound => {
            let ps = pairs(case)?;
            let fs: Vec<&RadialFn> = ps.iter().flat_map(|p| [&p.f, &p.g]).collect();
            let label = regime(&fs, n);
            (difference_eval(case, &ps, mesh)?, difference_eval(case, &ps, fine)?, true, label)
        }
        claim => {
            let which = claim.lorentz_case().expect("remaining claims are Lorentz cases");
            let (left, right) = lorentz_case_spaces(which, n, &case.exponents)?;
            let data = battery(case)?;
            let fs: Vec<&RadialFn> = data.iter().map(|d| &d.f).collect();
            let label = regime(&fs, n);
            let a = norm_battery_eval(case, &data, mesh, &left, &right)?;
            let b = norm_battery_eval(case, &data, fine, &left, &right)?;
            spaces = format!(" ({} by {})", left.label(), right.label());
            (a, b, true, label)
        }
    };
    let d = drift(coarse.c, refined.c);
    let mut metrics = coarse.metrics;
    metrics.insert("empirical_c_refined".into(), refined.c);
    let pass = coarse.c.is_finite() && d.finite().is_some_and(|x| x <= MAX_DRIFT) && extra_ok;
    let verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    let statement = if pass {
        format!("consistent with {}{spaces}", describe(case.claim))
    } else {
        format!("not consistent with {}{spaces} on this battery", describe(case.claim))
    };
    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        id: case.id.clone(),
        claim: case.claim,
        verdict,
        statement,
        empirical_c: coarse.c,
        refinement_drift: d,
        mesh_nodes: [mesh.nodes, fine.nodes],
        regime: regime_label,
        ratio_curve: coarse.curve,
        battery: coarse.battery,
        metrics,
        config_hash: case.config_hash(),
    })
}
