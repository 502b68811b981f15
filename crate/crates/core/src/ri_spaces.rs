//! Lorentz, Lorentz–Zygmund and first-order Lorentz–Sobolev quasi-norms,
//! computed from decreasing rearrangements.
//!
//! Divergent norms come back as [`Extended::Infinite`]; exponent validation
//! happens once, in the exponent constructors.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::extended::Extended;
use crate::rearrange::RearrangementProfile;

/// Exponents `(q, s)` of `L^{q,s}`: `q ∈ [1, ∞]`, `s ∈ (0, ∞]`, and `q = ∞`
/// only together with `s = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzExponents {
    q: f64,
    s: f64,
}

impl LorentzExponents {
    pub fn new(q: f64, s: f64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(domain(format!("Lorentz exponent q must lie in [1, ∞], got {q}")));
        }
        if !(s > 0.0) {
            return Err(domain(format!("Lorentz exponent s must lie in (0, ∞], got {s}")));
        }
        if q.is_infinite() && s.is_finite() {
            return Err(domain("q = ∞ is only admissible with s = ∞"));
        }
        Ok(Self { q, s })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// Exponents `(q, k, β)` of `L^{q,k}(log L)^β`: either `q ∈ (1, ∞]`,
/// `k ∈ (0, ∞]`, `β` real, or `q = 1`, `k ∈ (0, 1]`, `β ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzZygmundExponents {
    q: f64,
    k: f64,
    beta: f64,
}

impl LorentzZygmundExponents {
    pub fn new(q: f64, k: f64, beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(domain(format!("β must be finite, got {beta}")));
        }
        if !(k > 0.0) {
            return Err(domain(format!("k must lie in (0, ∞], got {k}")));
        }
        let admissible = if q > 1.0 {
            true
        } else if q == 1.0 {
            k <= 1.0 && beta >= 0.0
        } else {
            false
        };
        if !admissible {
            return Err(domain(format!("(q, k, β) = ({q}, {k}, {beta}) is not an admissible Lorentz–Zygmund triple")));
        }
        Ok(Self { q, k, beta })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `‖u‖_{L^{q,s}}`: `(∫ (t^{1/q−1/s} u*)^s dt)^{1/s}`, or `sup t^{1/q} u*(t)`
/// when `s = ∞`.
pub fn lorentz_quasinorm(p: &RearrangementProfile, e: LorentzExponents) -> Extended {
    log_weighted_norm(p, e.q, e.s, 0.0)
}

/// `‖u‖_{L^{q,k}(log L)^β}` with weight `(1 + log(|Ω|/s))^β`.
pub fn lorentz_zygmund_quasinorm(p: &RearrangementProfile, e: LorentzZygmundExponents) -> Extended {
    log_weighted_norm(p, e.q, e.k, e.beta)
}

fn log_weighted_norm(p: &RearrangementProfile, q: f64, k: f64, beta: f64) -> Extended {
    let omega = p.total_measure();
    if k.is_infinite() {
        return Extended::from_f64(p.weighted_sup(omega, 1.0 / q, beta));
    }
    let integral = p.integral_power(0.0, omega, 1.0 / q - 1.0 / k, beta, k);
    Extended::from_f64(integral.powf(1.0 / k))
}

/// `‖u‖_{L^{q,s}} + ‖∇u‖_{L^{q,s}}` from the profiles of `|u|` and `|∇u|`.
pub fn lorentz_sobolev_norm(
    u_profile: &RearrangementProfile,
    grad_profile: &RearrangementProfile,
    e: LorentzExponents,
) -> Result<Extended> {
    let (a, b) = (u_profile.total_measure(), grad_profile.total_measure());
    if ((a - b) / a).abs() > 1e-12 {
        return Err(domain(format!("profiles live on domains of different measure ({a} vs {b})")));
    }
    let sum = lorentz_quasinorm(u_profile, e).to_f64() + lorentz_quasinorm(grad_profile, e).to_f64();
    Ok(Extended::from_f64(sum))
}
