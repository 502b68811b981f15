//! Finite-volume solver for radial solutions of `−Δu + Vu = f` on `B(0, R)`
//! in ℝⁿ, written as `−(r^{n−1}u′)′ + r^{n−1}Vu = r^{n−1}f`.
//!
//! Nodes sit at `r_i = R (i/N)^γ`; control volumes run between neighbouring
//! midpoints, so the flux `r^{n−1}u′` is differenced at the midpoints and
//! vanishes at `r = 0`. Right-hand sides are integrated exactly over each
//! control volume (in closed form for power sums), which keeps data like
//! `1/r` harmless. The potential term is lumped at the node.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::extended::Extended;
use crate::potentials::unit_sphere_area;
use crate::quad::{eval_terms, integrate, integrate_from_zero, power_sum_integral, TailHint};
use crate::rearrange::{decreasing_rearrangement, Cell, GridFunction, PowerTerm, RearrangementProfile};
use crate::sum::ExactSum;

/// Config form of a radial function: a kind name plus numeric parameters.
///
/// | kind        | params                         | value                       |
/// |-------------|--------------------------------|-----------------------------|
/// | `zero`      | none                           | 0                           |
/// | `constant`  | `c`                            | `c`                         |
/// | `power_sum` | `c₁, e₁, c₂, e₂, …`            | `Σ c_k r^{e_k}`             |
/// | `f0`        | none                           | `−2/r + r − 1`              |
/// | `f1`        | none                           | `−2/r`                      |
/// | `random`    | `seed, terms`                  | `Σ_{k<terms} a_k r^{2k}`, `a_k ∈ [−1, 1]` |
/// | `tabulated` | `r₀, v₀, r₁, v₁, …`            | piecewise linear, constant outside |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Clone)]
enum Form {
    Power(Vec<PowerTerm>),
    Tabulated(Vec<f64>, Vec<f64>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>, f64),
}

/// A radial function `g(|x|)`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "FnSpec", into = "FnSpec")]
pub struct RadialFn {
    spec: FnSpec,
    form: Form,
}

impl std::fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RadialFn({}, {:?})", self.spec.kind, self.spec.params)
    }
}

/// Equality of the config form; custom closures compare by label.
impl PartialEq for RadialFn {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl From<RadialFn> for FnSpec {
    fn from(g: RadialFn) -> Self {
        g.spec
    }
}

impl TryFrom<FnSpec> for RadialFn {
    type Error = Error;

    fn try_from(spec: FnSpec) -> Result<Self> {
        let p = &spec.params;
        let want = |k: usize| {
            if p.len() == k {
                Ok(())
            } else {
                Err(Error::Config(format!("`{}` takes {k} params, got {}", spec.kind, p.len())))
            }
        };
        let form = match spec.kind.as_str() {
            "zero" => {
                want(0)?;
                Form::Power(vec![])
            }
            "constant" => {
                want(1)?;
                Form::Power(vec![PowerTerm::new(p[0], 0.0)])
            }
            "power_sum" => {
                if p.is_empty() || p.len() % 2 != 0 {
                    return Err(Error::Config("`power_sum` takes coefficient/exponent pairs".into()));
                }
                Form::Power(p.chunks(2).map(|c| PowerTerm::new(c[0], c[1])).collect())
            }
            "f0" => {
                want(0)?;
                Form::Power(vec![PowerTerm::new(-2.0, -1.0), PowerTerm::new(1.0, 1.0), PowerTerm::new(-1.0, 0.0)])
            }
            "f1" => {
                want(0)?;
                Form::Power(vec![PowerTerm::new(-2.0, -1.0)])
            }
            "random" => {
                want(2)?;
                if !(p[0] >= 0.0 && p[0].fract() == 0.0 && p[1] >= 1.0 && p[1].fract() == 0.0) {
                    return Err(Error::Config("`random` takes an integer seed and a positive term count".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(p[0] as u64);
                Form::Power((0..p[1] as usize).map(|k| PowerTerm::new(rng.random_range(-1.0..1.0), 2.0 * k as f64)).collect())
            }
            "tabulated" => {
                if p.len() < 4 || p.len() % 2 != 0 {
                    return Err(Error::Config("`tabulated` takes at least two (r, value) pairs".into()));
                }
                let (r, v): (Vec<f64>, Vec<f64>) = p.chunks(2).map(|c| (c[0], c[1])).unzip();
                if r.windows(2).any(|w| !(w[1] > w[0])) || r[0] < 0.0 {
                    return Err(Error::Config("`tabulated` radii must be nonnegative and increasing".into()));
                }
                Form::Tabulated(r, v)
            }
            other => return Err(Error::Config(format!("unknown radial function kind `{other}`"))),
        };
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!("`{}` params must be finite", spec.kind)));
        }
        Ok(Self { spec, form })
    }
}

impl RadialFn {
    pub fn from_spec(kind: &str, params: &[f64]) -> Result<Self> {
        FnSpec { kind: kind.into(), params: params.to_vec() }.try_into()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_spec("constant", &[c]).expect("finite constant")
    }

    pub fn zero() -> Self {
        Self::from_spec("zero", &[]).expect("zero")
    }

    /// An arbitrary closure behaving like `r^lead_exp` near the origin.
    pub fn custom(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static, lead_exp: f64) -> Self {
        Self {
            spec: FnSpec { kind: format!("custom:{label}"), params: vec![] },
            form: Form::Custom(Arc::new(f), lead_exp),
        }
    }

    pub fn spec(&self) -> &FnSpec {
        &self.spec
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.form {
            Form::Power(t) => eval_terms(t, r),
            Form::Tabulated(rs, vs) => {
                let i = rs.partition_point(|&x| x <= r);
                if i == 0 {
                    vs[0]
                } else if i == rs.len() {
                    vs[vs.len() - 1]
                } else {
                    let w = (r - rs[i - 1]) / (rs[i] - rs[i - 1]);
                    vs[i - 1] + w * (vs[i] - vs[i - 1])
                }
            }
            Form::Custom(f, _) => f(r),
        }
    }

    /// Leading exponent at `r = 0`.
    pub fn lead_exp(&self) -> f64 {
        match &self.form {
            Form::Power(t) => t.iter().filter(|t| t.coef != 0.0).map(|t| t.exp).fold(f64::INFINITY, f64::min).min(0.0),
            Form::Tabulated(..) => 0.0,
            Form::Custom(_, e) => *e,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.form, Form::Power(t) if t.iter().all(|t| t.coef == 0.0))
    }

    /// `∫_a^b g(r) r^m dr`.
    fn moment(&self, m: f64, a: f64, b: f64) -> f64 {
        match &self.form {
            Form::Power(t) => {
                let shifted: Vec<PowerTerm> = t.iter().map(|t| PowerTerm::new(t.coef, t.exp + m)).collect();
                power_sum_integral(&shifted, a, b)
            }
            Form::Tabulated(..) => integrate(|r| self.eval(r) * r.powf(m), a, b),
            Form::Custom(..) => {
                if a == 0.0 {
                    // split sign-indefinite data into parts the tail model can handle
                    let pos = integrate_from_zero(|r| self.eval(r).max(0.0) * r.powf(m), b, TailHint::power(self.lead_exp() + m));
                    let neg = integrate_from_zero(|r| (-self.eval(r)).max(0.0) * r.powf(m), b, TailHint::power(self.lead_exp() + m));
                    pos - neg
                } else {
                    integrate(|r| self.eval(r) * r.powf(m), a, b)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    /// Number of nodes, including `r = 0` and `r = R`.
    pub nodes: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    1.5
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self { nodes: 2000, gamma: default_gamma() }
    }
}

impl MeshSpec {
    pub fn new(nodes: usize, gamma: f64) -> Self {
        Self { nodes, gamma }
    }

    /// Same grading with twice as many intervals.
    pub fn doubled(&self) -> Self {
        Self { nodes: 2 * self.nodes - 1, gamma: self.gamma }
    }

    pub fn nodes_on(&self, radius: f64) -> Vec<f64> {
        let n = self.nodes - 1;
        let mut r: Vec<f64> = (0..=n).map(|i| radius * (i as f64 / n as f64).powf(self.gamma)).collect();
        r[n] = radius;
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub n: u32,
    #[serde(rename = "R")]
    pub radius: f64,
    pub bc: BoundaryCondition,
    #[serde(rename = "V")]
    pub v: RadialFn,
    pub f: RadialFn,
    #[serde(default)]
    pub mesh: MeshSpec,
}

impl RadialProblem {
    pub fn new(n: u32, radius: f64, bc: BoundaryCondition, v: RadialFn, f: RadialFn, mesh: MeshSpec) -> Self {
        Self { n, radius, bc, v, f, mesh }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let p: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn with_mesh(&self, mesh: MeshSpec) -> Self {
        Self { mesh, ..self.clone() }
    }

    pub fn with_f(&self, f: RadialFn) -> Self {
        Self { f, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(domain(format!("dimension must be at least 3, got {}", self.n)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(domain(format!("radius must be positive, got {}", self.radius)));
        }
        if self.mesh.nodes < 3 || !(self.mesh.gamma >= 1.0) {
            return Err(domain("mesh needs at least 3 nodes and grading exponent γ ≥ 1"));
        }
        if self.bc == BoundaryCondition::Neumann && self.v.is_zero() {
            return Err(domain("V ≡ 0 with a Neumann condition has no unique solution"));
        }
        Ok(())
    }

    /// `|B(0, R)|`.
    pub fn domain_measure(&self) -> f64 {
        unit_sphere_area(self.n as usize) / f64::from(self.n) * self.radius.powi(self.n as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub nodes: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub residual_norm: f64,
}

impl RadialSolution {
    /// `(u_{i+1} − u_i)/(r_{i+1} − r_i)`, the derivative at interval midpoints.
    pub fn midpoint_slopes(&self) -> Vec<f64> {
        self.nodes.windows(2).zip(self.u.windows(2)).map(|(r, u)| (u[1] - u[0]) / (r[1] - r[0])).collect()
    }

    /// Piecewise linear interpolant of the nodal values.
    pub fn interpolate(&self, r: f64) -> f64 {
        let i = self.nodes.partition_point(|&x| x <= r).clamp(1, self.nodes.len() - 1);
        let (a, b) = (self.nodes[i - 1], self.nodes[i]);
        let w = ((r - a) / (b - a)).clamp(0.0, 1.0);
        self.u[i - 1] + w * (self.u[i] - self.u[i - 1])
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "u", "du"])?;
        for ((r, u), du) in self.nodes.iter().zip(&self.u).zip(&self.du) {
            w.write_record([r.to_string(), u.to_string(), du.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut x = vec![0.0; n];
    for i in 0..n {
        let denom = b[i] - if i > 0 { a[i] * cp[i - 1] } else { 0.0 };
        if denom == 0.0 || !denom.is_finite() {
            return Err(domain("singular tridiagonal system"));
        }
        cp[i] = c[i] / denom;
        dp[i] = (d[i] - if i > 0 { a[i] * dp[i - 1] } else { 0.0 }) / denom;
    }
    for i in (0..n).rev() {
        x[i] = dp[i] - if i + 1 < n { cp[i] * x[i + 1] } else { 0.0 };
    }
    Ok(x)
}

pub fn solve_radial(p: &RadialProblem) -> Result<RadialSolution> {
    p.validate()?;
    let r = p.mesh.nodes_on(p.radius);
    let last = r.len() - 1;
    let m = f64::from(p.n - 1);
    // control-volume faces: 0, interval midpoints, R
    let mut faces = Vec::with_capacity(r.len() + 1);
    faces.push(0.0);
    faces.extend(r.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    faces.push(p.radius);
    let k: Vec<f64> = (0..last).map(|i| faces[i + 1].powf(m) / (r[i + 1] - r[i])).collect();
    let mut vint = Vec::with_capacity(r.len());
    let mut fint = Vec::with_capacity(r.len());
    for i in 0..=last {
        let (a, b) = (faces[i], faces[i + 1]);
        let vi = p.v.moment(m, a, b);
        let fi = p.f.moment(m, a, b);
        if !vi.is_finite() || vi < 0.0 {
            return Err(domain(format!("V must be nonnegative and integrable, got {vi} on [{a}, {b}]")));
        }
        if !fi.is_finite() {
            return Err(domain(format!("f is not integrable against r^{{n−1}} on [{a}, {b}]")));
        }
        vint.push(vi);
        fint.push(fi);
    }
    let unknowns = match p.bc {
        BoundaryCondition::Dirichlet => last,
        BoundaryCondition::Neumann => last + 1,
    };
    let mut lo = vec![0.0; unknowns];
    let mut di = vec![0.0; unknowns];
    let mut up = vec![0.0; unknowns];
    for i in 0..unknowns {
        let kl = if i > 0 { k[i - 1] } else { 0.0 };
        let kr = if i < last { k[i] } else { 0.0 };
        lo[i] = -kl;
        up[i] = if i + 1 < unknowns { -kr } else { 0.0 };
        di[i] = kl + kr + vint[i];
    }
    let mut u = thomas(&lo, &di, &up, &fint[..unknowns])?;
    if p.bc == BoundaryCondition::Dirichlet {
        u.push(0.0);
    }

    let omega = unit_sphere_area(p.n as usize);
    let mut res = ExactSum::new();
    for i in 0..unknowns {
        let mut row = di[i] * u[i] - fint[i];
        if i > 0 {
            row += lo[i] * u[i - 1];
        }
        if i + 1 < unknowns {
            row += up[i] * u[i + 1];
        }
        let vol = (faces[i + 1].powf(m + 1.0) - faces[i].powf(m + 1.0)) / (m + 1.0);
        res.add(row * row / vol);
    }
    let residual_norm = (omega * res.value()).sqrt();

    let mut du = vec![0.0; r.len()];
    for i in 1..last {
        let (h1, h2) = (r[i] - r[i - 1], r[i + 1] - r[i]);
        du[i] = -h2 / (h1 * (h1 + h2)) * u[i - 1] + (h2 - h1) / (h1 * h2) * u[i] + h1 / (h2 * (h1 + h2)) * u[i + 1];
    }
    du[last] = match p.bc {
        BoundaryCondition::Neumann => 0.0,
        BoundaryCondition::Dirichlet => {
            let (h1, h2) = (r[last - 1] - r[last - 2], r[last] - r[last - 1]);
            h2 / (h1 * (h1 + h2)) * u[last - 2] - (h1 + h2) / (h1 * h2) * u[last - 1]
                + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * u[last]
        }
    };
    Ok(RadialSolution { nodes: r, u, du, residual_norm })
}

/// Values at interval midpoints on the shells between consecutive nodes,
/// with the exact shell volumes as cell measures.
pub fn shell_grid(nodes: &[f64], values: &[f64], n: u32, label: &str) -> Result<GridFunction> {
    let omega = unit_sphere_area(n as usize) / f64::from(n);
    let cells = nodes
        .windows(2)
        .zip(values)
        .map(|(w, &v)| Cell::new(omega * (w[1].powi(n as i32) - w[0].powi(n as i32)), v))
        .collect();
    GridFunction::with_total(cells, omega * nodes[nodes.len() - 1].powi(n as i32), label)
}

/// `|u′|` on shells, sampled at interval midpoints.
pub fn gradient_grid(sol: &RadialSolution, n: u32) -> Result<GridFunction> {
    let slopes: Vec<f64> = sol.midpoint_slopes().iter().map(|s| s.abs()).collect();
    shell_grid(&sol.nodes, &slopes, n, "|grad u|")
}

/// `u` on shells, sampled at interval midpoints.
pub fn value_grid(sol: &RadialSolution, n: u32) -> Result<GridFunction> {
    let mids: Vec<f64> = sol.u.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    shell_grid(&sol.nodes, &mids, n, "u")
}

/// `|∇u|*` for a radial solution.
pub fn gradient_rearrangement(sol: &RadialSolution, n: u32) -> Result<RearrangementProfile> {
    Ok(decreasing_rearrangement(&gradient_grid(sol, n)?))
}

/// `‖g‖_{L^p(B(0,R))}` for a radial `g` sampled interval by interval.
fn radial_lp_norm(g: impl Fn(f64) -> f64, lead: f64, nodes: &[f64], n: u32, p: f64) -> f64 {
    let m = f64::from(n - 1);
    let h = |r: f64| g(r).abs().powf(p) * r.powf(m);
    let mut acc = ExactSum::new();
    for (i, w) in nodes.windows(2).enumerate() {
        let part = if i == 0 { integrate_from_zero(h, w[1], TailHint::power(p * lead + m)) } else { integrate(h, w[0], w[1]) };
        if !part.is_finite() {
            return f64::INFINITY;
        }
        acc.add(part);
    }
    (unit_sphere_area(n as usize) * acc.value()).powf(1.0 / p)
}

/// `‖V u‖_{L^p} / ‖f‖_{L^p}` for the computed solution `u`.
pub fn vl_inverse_probe(p: &RadialProblem, exponent: f64) -> Result<Extended> {
    if !(exponent >= 1.0 && exponent <= f64::from(p.n)) {
        return Err(domain(format!("exponent must lie in [1, n], got {exponent}")));
    }
    if p.f.is_zero() {
        return Err(domain("f ≡ 0 leaves the ratio undefined"));
    }
    let sol = solve_radial(p)?;
    let num = radial_lp_norm(|r| p.v.eval(r) * sol.interpolate(r), p.v.lead_exp(), &sol.nodes, p.n, exponent);
    let den = radial_lp_norm(|r| p.f.eval(r), p.f.lead_exp(), &sol.nodes, p.n, exponent);
    if den == 0.0 {
        return Err(domain("‖f‖ vanishes"));
    }
    if den.is_infinite() {
        return Ok(if num.is_infinite() { Extended::Infinite } else { Extended::Finite(0.0) });
    }
    Ok(Extended::from_f64(num / den))
}

/// `ω(∫ u_h′ φ′ r^{n−1} + ∫ V u_h φ r^{n−1} − ∫ f φ r^{n−1})` for the
/// piecewise linear interpolant `u_h` and a radial test function `φ`.
pub fn weak_residual(
    p: &RadialProblem,
    sol: &RadialSolution,
    phi: impl Fn(f64) -> f64,
    dphi: impl Fn(f64) -> f64,
) -> f64 {
    let m = f64::from(p.n - 1);
    let slopes = sol.midpoint_slopes();
    let mut acc = ExactSum::new();
    for (i, w) in sol.nodes.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        acc.add(slopes[i] * integrate(|r| dphi(r) * r.powf(m), a, b));
        acc.add(integrate(|r| (p.v.eval(r) * sol.interpolate(r) - p.f.eval(r)) * phi(r) * r.powf(m), a, b));
    }
    unit_sphere_area(p.n as usize) * acc.value()
}
