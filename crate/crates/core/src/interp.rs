//! The Calderón operator, the two gradient bounds built from `f*` and `f**`,
//! and the K-functionals of the couples `(L¹, L^{n,1})` and
//! `(L^{n',∞}, L^∞)`.
//!
//! Every upper limit is truncated at `|Ω|`, since profiles vanish there.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::extended::Extended;
use crate::rearrange::{PowerTerm, RearrangementProfile};

/// Conjugate exponent `n' = n/(n−1)`.
pub fn conjugate(n: u32) -> f64 {
    let n = f64::from(n);
    n / (n - 1.0)
}

fn check_dimension(n: u32) -> Result<()> {
    if n < 3 {
        return Err(domain(format!("dimension must be at least 3, got {n}")));
    }
    Ok(())
}

/// Exponents of `S^{p0,p1}_{q0,q1}` with the derived slope
/// `α = (1/q0 − 1/q1)/(1/p0 − 1/p1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalderonExponents {
    pub p0: f64,
    pub p1: f64,
    pub q0: f64,
    pub q1: f64,
    alpha: f64,
}

impl CalderonExponents {
    pub fn new(p0: f64, p1: f64, q0: f64, q1: f64) -> Result<Self> {
        if !(p0 >= 1.0 && p0 < p1) {
            return Err(domain(format!("need 1 ≤ p0 < p1 ≤ ∞, got p0 = {p0}, p1 = {p1}")));
        }
        if !(q0 >= 1.0 && q1 >= 1.0) || q0 == q1 {
            return Err(domain(format!("need q0, q1 ∈ [1, ∞] with q0 ≠ q1, got {q0}, {q1}")));
        }
        let alpha = (1.0 / q0 - 1.0 / q1) / (1.0 / p0 - 1.0 / p1);
        Ok(Self { p0, p1, q0, q1, alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `t^{−1/q0} ∫_0^{t^α} s^{1/p0} g(s) ds/s + t^{−1/q1} ∫_{t^α}^{|Ω|} s^{1/p1} g(s) ds/s`.
pub fn calderon_apply(g: &RearrangementProfile, e: &CalderonExponents, t: f64) -> Result<Extended> {
    if !(t > 0.0) {
        return Err(domain(format!("Calderón operator needs t > 0, got {t}")));
    }
    let omega = g.total_measure();
    let split = t.powf(e.alpha);
    let head = g.integral_weighted(0.0, split.min(omega), &[PowerTerm::new(1.0, 1.0 / e.p0 - 1.0)]);
    let mut value = scale(t.powf(-1.0 / e.q0), head);
    if split < omega {
        let tail = g.integral_weighted(split, omega, &[PowerTerm::new(1.0, 1.0 / e.p1 - 1.0)]);
        value += scale(t.powf(-1.0 / e.q1), tail);
    }
    Ok(Extended::from_f64(value))
}

/// `c·x` with `0·x = 0` for every `x`, including `+∞`.
fn scale(c: f64, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        c * x
    }
}

fn check_interior(f: &RearrangementProfile, s: f64) -> Result<()> {
    let omega = f.total_measure();
    if !(s > 0.0 && s < omega) {
        return Err(domain(format!("s must lie in (0, {omega}), got {s}")));
    }
    Ok(())
}

/// `s^{−1/n'} ∫_0^s f*(r) dr + ∫_s^{|Ω|} f*(r) r^{−1/n'} dr`, the pointwise
/// bound for `|∇u|*(s)` in terms of `f*`.
pub fn gradient_bound(f: &RearrangementProfile, n: u32, s: f64) -> Result<Extended> {
    check_dimension(n)?;
    check_interior(f, s)?;
    let inv = 1.0 / conjugate(n);
    let head = scale(s.powf(-inv), f.integral(0.0, s));
    let tail = f.integral_weighted(s, f.total_measure(), &[PowerTerm::new(1.0, -inv)]);
    Ok(Extended::from_f64(head + tail))
}

/// `∫_s^{|Ω|} f**(r) r^{−1/n'} dr`.
///
/// Exchanging the order of integration gives
/// `F(s)·W(s) + ∫_s^{|Ω|} f*(t) W(t) dt` with `F(s) = ∫_0^s f*` and
/// `W(x) = n'(x^{−1/n'} − |Ω|^{−1/n'})`, which is exact for power pieces.
pub fn gradient_bound_maximal(f: &RearrangementProfile, n: u32, s: f64) -> Result<Extended> {
    check_dimension(n)?;
    check_interior(f, s)?;
    let np = conjugate(n);
    let omega = f.total_measure();
    let w_terms = [PowerTerm::new(np, -1.0 / np), PowerTerm::new(-np * omega.powf(-1.0 / np), 0.0)];
    let w_at_s = np * (s.powf(-1.0 / np) - omega.powf(-1.0 / np));
    let head = scale(w_at_s, f.integral(0.0, s));
    let tail = f.integral_weighted(s, omega, &w_terms);
    Ok(Extended::from_f64(head + tail))
}

/// `∫_0^{min(s^{n'},|Ω|)} f* + s ∫_{s^{n'}}^{|Ω|} f*(t) t^{−1/n'} dt`, the
/// Holmstedt expression for `K(s, f; L¹, L^{n,1})`.
pub fn k_functional_l1_ln1(f: &RearrangementProfile, n: u32, s: f64) -> Result<Extended> {
    if !(s > 0.0) {
        return Err(domain(format!("K-functional needs s > 0, got {s}")));
    }
    let np = conjugate(n);
    let omega = f.total_measure();
    let split = s.powf(np);
    let head = f.integral(0.0, split.min(omega));
    let tail = if split < omega {
        scale(s, f.integral_weighted(split, omega, &[PowerTerm::new(1.0, -1.0 / np)]))
    } else {
        0.0
    };
    Ok(Extended::from_f64(head + tail))
}

/// `sup_{t ∈ (0, min(s^{n'}, |Ω|)]} t^{1/n'} g*(t)`, the expression for
/// `K(s, g; L^{n',∞}, L^∞)`.
pub fn k_functional_weak_linf(g: &RearrangementProfile, n: u32, s: f64) -> Result<Extended> {
    if !(s > 0.0) {
        return Err(domain(format!("K-functional needs s > 0, got {s}")));
    }
    let np = conjugate(n);
    Ok(Extended::from_f64(g.weighted_sup(s.powf(np), 1.0 / np, 0.0)))
}
