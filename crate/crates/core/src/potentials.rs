//! Reverse Hölder quotients of nonnegative potentials on balls, and family
//! scans that bound the class constant from below.
//!
//! For a ball `B` and `q ∈ (1, ∞]` the quotient is
//! `(⨍_B V^q)^{1/q} / ⨍_B V`, with the essential supremum in place of the
//! `q`-mean when `q = ∞`.
//!
//! Radial potentials are integrated in origin-centred coordinates: the ball
//! splits into full spheres `|x| < ρ − d` (exact power antiderivatives) and
//! spherical caps `|d − ρ| < |x| < d + ρ` (adaptive quadrature against the
//! cap area), where `d` is the distance of the centre to the origin.
//! Polynomial potentials use tensor Gauss–Legendre rules in ball-centred
//! spherical coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::extended::Extended;
use crate::quad::{gauss_legendre, integrate, integrate_from_zero, log_grid, power_integral, TailHint};

/// `|B(0,1)|` in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface measure of the unit sphere `S^{n−1} ⊂ ℝⁿ`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// `c · Π x_i^{powers[i]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Constant { value: f64 },
    /// `coef · |x|^gamma`.
    AbsPower { coef: f64, gamma: f64 },
    /// `|P(x)|^alpha` for a polynomial `P` in three variables.
    PolyPower { poly: Vec<Monomial>, alpha: f64 },
    /// `values[i]` for `|x| ∈ [radii[i−1], radii[i])`, the last value beyond.
    TabulatedRadial { radii: Vec<f64>, values: Vec<f64> },
}

impl Potential {
    /// `|x₁|^alpha`.
    pub fn first_coordinate_power(alpha: f64) -> Self {
        Potential::PolyPower { poly: vec![Monomial { coef: 1.0, powers: vec![1, 0, 0] }], alpha }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Potential::Constant { value } => {
                if !(value.is_finite() && *value >= 0.0) {
                    return Err(domain(format!("constant potential must be finite and nonnegative, got {value}")));
                }
            }
            Potential::AbsPower { coef, gamma } => {
                if !(coef.is_finite() && *coef >= 0.0) {
                    return Err(domain(format!("coefficient must be nonnegative, got {coef}")));
                }
                if !(*gamma > -(n as f64)) {
                    return Err(domain(format!("|x|^{gamma} is not locally integrable in dimension {n}")));
                }
            }
            Potential::PolyPower { poly, alpha } => {
                if n != 3 {
                    return Err(domain("polynomial potentials are implemented in dimension 3"));
                }
                if !(*alpha > 0.0) || poly.is_empty() || poly.iter().any(|m| m.powers.len() != 3 || !m.coef.is_finite()) {
                    return Err(domain("polynomial potential needs α > 0 and monomials in three variables"));
                }
            }
            Potential::TabulatedRadial { radii, values } => {
                if radii.is_empty() || radii.len() != values.len() {
                    return Err(domain("tabulated potential needs matching, nonempty radii and values"));
                }
                let mut prev = 0.0;
                for (&r, &v) in radii.iter().zip(values) {
                    if !(r > prev) || !(v.is_finite() && v >= 0.0) {
                        return Err(domain("tabulated potential needs increasing radii and nonnegative values"));
                    }
                    prev = r;
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Potential::Constant { value } => *value,
            Potential::AbsPower { coef, gamma } => coef * norm(x).powf(*gamma),
            Potential::PolyPower { poly, alpha } => poly_eval(poly, x).abs().powf(*alpha),
            Potential::TabulatedRadial { radii, values } => tabulated_at(radii, values, norm(x)),
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn poly_eval(poly: &[Monomial], x: &[f64]) -> f64 {
    poly.iter().map(|m| m.coef * m.powers.iter().zip(x).map(|(&p, &xi)| xi.powi(p as i32)).product::<f64>()).sum()
}

fn tabulated_at(radii: &[f64], values: &[f64], r: f64) -> f64 {
    let i = radii.partition_point(|&e| e <= r);
    values[i.min(values.len() - 1)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("ball centre must be a finite point"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }
}

/// Centres on a regular grid in `[−half_width, half_width]ⁿ` crossed with
/// log-spaced radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub label: String,
    pub dim: usize,
    pub per_axis: usize,
    pub half_width: f64,
    pub radii: Vec<f64>,
}

impl BallFamily {
    pub fn grid(label: &str, dim: usize, per_axis: usize, half_width: f64, r_min: f64, r_max: f64, n_radii: usize) -> Self {
        Self { label: label.into(), dim, per_axis, half_width, radii: log_grid(r_min, r_max, n_radii) }
    }

    /// `5ⁿ` centres in `[−2, 2]ⁿ`, 9 radii in `[10⁻², 4]`.
    pub fn default_family(dim: usize) -> Self {
        Self::grid("default", dim, 5, 2.0, 1e-2, 4.0, 9)
    }

    /// `9ⁿ` centres in `[−2, 2]ⁿ`, 17 radii in `[10⁻², 4]`; contains the
    /// default family.
    pub fn doubled(dim: usize) -> Self {
        Self::grid("doubled", dim, 9, 2.0, 1e-2, 4.0, 17)
    }

    pub fn balls(&self) -> Vec<Ball> {
        let axis: Vec<f64> = if self.per_axis == 1 {
            vec![0.0]
        } else {
            (0..self.per_axis)
                .map(|i| -self.half_width + 2.0 * self.half_width * i as f64 / (self.per_axis - 1) as f64)
                .collect()
        };
        let mut centers: Vec<Vec<f64>> = vec![vec![]];
        for _ in 0..self.dim {
            centers = centers
                .into_iter()
                .flat_map(|c| {
                    axis.iter().map(move |&a| {
                        let mut c = c.clone();
                        c.push(a);
                        c
                    })
                })
                .collect();
        }
        centers
            .into_iter()
            .flat_map(|c| self.radii.iter().map(move |&r| Ball { center: c.clone(), radius: r }))
            .collect()
    }
}

/// `∫_0^{θ0} sin^{n−2}θ dθ` for `cos θ0 = c`.
fn cap_angle_integral(n: usize, c: f64) -> f64 {
    let c = c.clamp(-1.0, 1.0);
    match n {
        2 => c.acos(),
        3 => 1.0 - c,
        _ => integrate(|t: f64| t.sin().powi(n as i32 - 2), 0.0, c.acos()),
    }
}

/// Surface measure of `S(0, r) ∩ B(c, ρ)` with `|c| = d > 0`.
fn cap_area(n: usize, r: f64, d: f64, rho: f64) -> f64 {
    let cos0 = (r * r + d * d - rho * rho) / (2.0 * r * d);
    let omega = if n == 2 { 2.0 } else { unit_sphere_area(n - 1) };
    omega * r.powi(n as i32 - 1) * cap_angle_integral(n, cos0)
}

/// `∫_B g(|x|) dx` for a radial integrand given by its profile `g`, the
/// near-origin power `lead` of `g`, and the radii where `g` jumps.
fn radial_ball_integral(
    n: usize,
    ball: &Ball,
    g: &dyn Fn(f64) -> f64,
    exact_full: &dyn Fn(f64, f64) -> f64,
    lead: f64,
    breaks: &[f64],
) -> f64 {
    let d = norm(&ball.center);
    let rho = ball.radius;
    let mut total = 0.0;
    if d < rho {
        total += exact_full(0.0, rho - d);
    }
    if d == 0.0 {
        return total;
    }
    let (lo, hi) = ((d - rho).abs(), d + rho);
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    pts.push(hi);
    let h = |r: f64| if r <= 0.0 { 0.0 } else { g(r) * cap_area(n, r, d, rho) };
    for w in pts.windows(2) {
        if w[0] <= 1e-12 * rho {
            total += integrate_from_zero(h, w[1], TailHint::power(lead + n as f64 - 1.0));
        } else {
            total += integrate(h, w[0], w[1]);
        }
    }
    total
}

/// `∫_B V^p dx`.
pub fn ball_integral(v: &Potential, ball: &Ball, p: f64) -> f64 {
    let n = ball.dim();
    let area = unit_sphere_area(n);
    match v {
        Potential::Constant { value } => value.powf(p) * ball.volume(),
        Potential::AbsPower { coef, gamma } => {
            let c = coef.powf(p);
            let e = gamma * p;
            let g = |r: f64| c * r.powf(e);
            let full = |a: f64, b: f64| c * area * power_integral(e + n as f64 - 1.0, a, b);
            radial_ball_integral(n, ball, &g, &full, e, &[])
        }
        Potential::TabulatedRadial { radii, values } => {
            let g = |r: f64| tabulated_at(radii, values, r).powf(p);
            let full = |a: f64, b: f64| {
                let mut acc = 0.0;
                let mut start: f64 = 0.0;
                for (i, &end) in radii.iter().chain(std::iter::once(&f64::INFINITY)).enumerate() {
                    let (lo, hi) = (start.max(a), end.min(b));
                    if hi > lo {
                        let val = values[i.min(values.len() - 1)].powf(p);
                        acc += val * area * power_integral(n as f64 - 1.0, lo, hi);
                    }
                    start = end;
                }
                acc
            };
            radial_ball_integral(n, ball, &g, &full, 0.0, radii)
        }
        Potential::PolyPower { poly, alpha } => poly_ball_integral(poly, alpha * p, ball),
    }
}

/// Tensor Gauss–Legendre rule in ball-centred spherical coordinates,
/// doubled until two successive estimates agree to `1e−6`.
fn poly_ball_integral(poly: &[Monomial], power: f64, ball: &Ball) -> f64 {
    let mut prev = f64::NAN;
    let mut m = 8;
    loop {
        let est = spherical_rule(ball, m, |x| poly_eval(poly, x).abs().powf(power));
        if (est - prev).abs() <= 1e-6 * est.abs() || m >= 64 {
            return est;
        }
        prev = est;
        m *= 2;
    }
}

fn spherical_rule(ball: &Ball, m: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let (xr, wr) = gauss_legendre(m);
    let (xt, wt) = gauss_legendre(m);
    let n_phi = 2 * m;
    let rho = ball.radius;
    let c = &ball.center;
    let mut acc = crate::sum::ExactSum::new();
    for (ur, wur) in xr.iter().zip(&wr) {
        let r = 0.5 * rho * (ur + 1.0);
        let w_r = 0.5 * rho * wur * r * r;
        for (ct, wct) in xt.iter().zip(&wt) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n_phi as f64;
                let x = [c[0] + r * st * phi.cos(), c[1] + r * st * phi.sin(), c[2] + r * ct];
                acc.add(w_r * wct * f(&x));
            }
        }
    }
    acc.value() * 2.0 * std::f64::consts::PI / n_phi as f64
}

/// `ess sup_B V`.
fn ball_sup(v: &Potential, ball: &Ball) -> f64 {
    let d = norm(&ball.center);
    let (r_min, r_max) = ((d - ball.radius).max(0.0), d + ball.radius);
    match v {
        Potential::Constant { value } => *value,
        Potential::AbsPower { coef, gamma } => {
            if *coef == 0.0 {
                0.0
            } else if *gamma < 0.0 {
                if r_min == 0.0 {
                    f64::INFINITY
                } else {
                    coef * r_min.powf(*gamma)
                }
            } else {
                coef * r_max.powf(*gamma)
            }
        }
        Potential::TabulatedRadial { radii, values } => {
            let mut best: f64 = 0.0;
            let mut start = 0.0;
            for (i, &end) in radii.iter().chain(std::iter::once(&f64::INFINITY)).enumerate() {
                if end > r_min && start < r_max {
                    best = best.max(values[i.min(values.len() - 1)]);
                }
                start = end;
            }
            best
        }
        Potential::PolyPower { poly, alpha } => poly_ball_sup(poly, ball).powf(*alpha),
    }
}

/// `max_B |P|` by a spherical grid scan followed by a shrinking pattern
/// search projected onto the ball.
fn poly_ball_sup(poly: &[Monomial], ball: &Ball) -> f64 {
    let c = &ball.center;
    let rho = ball.radius;
    let f = |x: &[f64]| poly_eval(poly, x).abs();
    let mut best = (f(c), c.clone());
    let (nr, nt, np) = (12, 24, 48);
    for i in 1..=nr {
        let r = rho * i as f64 / nr as f64;
        for j in 0..=nt {
            let t = std::f64::consts::PI * j as f64 / nt as f64;
            for k in 0..np {
                let p = 2.0 * std::f64::consts::PI * k as f64 / np as f64;
                let x = vec![c[0] + r * t.sin() * p.cos(), c[1] + r * t.sin() * p.sin(), c[2] + r * t.cos()];
                let v = f(&x);
                if v > best.0 {
                    best = (v, x);
                }
            }
        }
    }
    let project = |mut x: Vec<f64>| {
        let off: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
        let len = norm(&off);
        if len > rho {
            for (xi, (o, ci)) in x.iter_mut().zip(off.iter().zip(c)) {
                *xi = ci + o * rho / len;
            }
        }
        x
    };
    let mut step = rho / nr as f64;
    while step > 1e-12 * rho {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut x = best.1.clone();
                x[axis] += sign * step;
                let x = project(x);
                let v = f(&x);
                if v > best.0 {
                    best = (v, x);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best.0
}

/// One reverse Hölder quotient. `vanishing` marks balls where `V ≡ 0`, for
/// which the quotient is 1 by convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhQuotient {
    pub value: Extended,
    pub vanishing: bool,
}

pub fn rh_quotient(v: &Potential, ball: &Ball, q: f64) -> Result<RhQuotient> {
    if !(q > 1.0) {
        return Err(domain(format!("reverse Hölder exponent must exceed 1, got {q}")));
    }
    v.validate(ball.dim())?;
    let vol = ball.volume();
    let mean = ball_integral(v, ball, 1.0) / vol;
    let top = if q.is_infinite() { ball_sup(v, ball) } else { (ball_integral(v, ball, q) / vol).powf(1.0 / q) };
    if mean == 0.0 {
        return Ok(if top == 0.0 {
            RhQuotient { value: Extended::Finite(1.0), vanishing: true }
        } else {
            RhQuotient { value: Extended::Infinite, vanishing: false }
        });
    }
    Ok(RhQuotient { value: Extended::from_f64(top / mean), vanishing: false })
}

/// Family scan result. `max_quotient` is a lower bound for the class constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhReport {
    pub potential: Potential,
    pub q: Extended,
    pub family: BallFamily,
    pub max_quotient: Extended,
    pub argmax_ball: Ball,
    pub lower_bound: bool,
    pub balls: usize,
    pub vanishing_balls: usize,
}

pub fn rh_constant_estimate(v: &Potential, q: f64, family: &BallFamily) -> Result<RhReport> {
    let balls = family.balls();
    if balls.is_empty() {
        return Err(domain("ball family is empty"));
    }
    let quotients = balls.par_iter().map(|b| rh_quotient(v, b, q)).collect::<Result<Vec<_>>>()?;
    let (i, best) = quotients
        .iter()
        .enumerate()
        .fold((0, quotients[0]), |acc, (i, x)| if x.value.to_f64() > acc.1.value.to_f64() { (i, *x) } else { acc });
    Ok(RhReport {
        potential: v.clone(),
        q: Extended::from_f64(q),
        family: family.clone(),
        max_quotient: best.value,
        argmax_ball: balls[i].clone(),
        lower_bound: true,
        balls: balls.len(),
        vanishing_balls: quotients.iter().filter(|x| x.vanishing).count(),
    })
}
