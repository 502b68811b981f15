//! Closed forms for the two model problems on the unit ball of ℝ³:
//! `u₀(r) = r − 1` solves `−Δu + u = f₀` and `−Δu = f₁` with zero boundary
//! values, where `f₀ = −2/r + r − 1` and `f₁ = −2/r`.

use crate::rearrange::{Cell, GridFunction, PowerTerm, RearrangementProfile};
use crate::Result;

/// `|B(0,1)| = 4π/3` in ℝ³.
pub const B0: f64 = 4.0 * std::f64::consts::PI / 3.0;

pub fn u0(r: f64) -> f64 {
    r - 1.0
}

pub fn f0(r: f64) -> f64 {
    -2.0 / r + r - 1.0
}

pub fn f1(r: f64) -> f64 {
    -2.0 / r
}

/// `f₀*(s) = 2(s/|B₀|)^{−1/3} − (s/|B₀|)^{1/3} + 1`.
pub fn f0_star(s: f64) -> f64 {
    let x = (s / B0).cbrt();
    2.0 / x - x + 1.0
}

/// `f₁*(s) = 2(s/|B₀|)^{−1/3}`.
pub fn f1_star(s: f64) -> f64 {
    2.0 * (B0 / s).cbrt()
}

pub fn f0_star_profile() -> RearrangementProfile {
    let b = B0.cbrt();
    RearrangementProfile::power_sum(
        vec![PowerTerm::new(2.0 * b, -1.0 / 3.0), PowerTerm::new(-1.0 / b, 1.0 / 3.0), PowerTerm::new(1.0, 0.0)],
        B0,
    )
    .expect("valid closed-form profile")
}

pub fn f1_star_profile() -> RearrangementProfile {
    RearrangementProfile::power_sum(vec![PowerTerm::new(2.0 * B0.cbrt(), -1.0 / 3.0)], B0).expect("valid closed-form profile")
}

/// The pointwise gradient bound evaluated on `f₀*` in closed form:
/// `(9/2)|B₀|^{1/3} + 2|B₀|^{1/3} log(|B₀|/s) + (3/4)|B₀|^{−1/3} s^{2/3} − 2 s^{1/3}`.
pub fn gradient_bound_f0(s: f64) -> f64 {
    let b = B0.cbrt();
    4.5 * b + 2.0 * b * (B0 / s).ln() + 0.75 / b * s.powf(2.0 / 3.0) - 2.0 * s.cbrt()
}

/// The maximal-function bound evaluated on `f₁*`: `3|B₀|^{1/3} log(|B₀|/s)`.
pub fn gradient_bound_maximal_f1(s: f64) -> f64 {
    3.0 * B0.cbrt() * (B0 / s).ln()
}

/// Samples a radial function at shell midpoints of the graded mesh
/// `r_i = R (i/m)^γ` in ℝⁿ, with exact shell volumes as cell measures.
pub fn sample_shells(f: impl Fn(f64) -> f64, n: u32, radius: f64, shells: usize, gamma: f64) -> Result<GridFunction> {
    let omega = crate::potentials::unit_sphere_area(n as usize) / f64::from(n);
    let node = |i: usize| radius * (i as f64 / shells as f64).powf(gamma);
    let cells = (0..shells)
        .map(|i| {
            let (a, b) = (node(i), node(i + 1));
            Cell::new(omega * (b.powi(n as i32) - a.powi(n as i32)), f(0.5 * (a + b)))
        })
        .collect();
    let total = omega * radius.powi(n as i32);
    GridFunction::with_total(cells, total, "shells")
}
