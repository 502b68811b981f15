use rearr_core::quad::*;
use rearr_core::PowerTerm;
use approx::assert_relative_eq;

#[test]
fn gauss_kronrod_handles_smooth_and_endpoint_singular() {
    assert_relative_eq!(integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI), 2.0, max_relative = 1e-12);
    assert_relative_eq!(integrate(|x: f64| x.sqrt(), 0.0, 1.0), 2.0 / 3.0, max_relative = 1e-10);
}

#[test]
fn singular_power_at_origin() {
    let v = integrate_from_zero(|s: f64| s.powf(-0.9), 2.0, TailHint::power(-0.9));
    assert_relative_eq!(v, 2f64.powf(0.1) / 0.1, max_relative = 1e-9);
    assert!(integrate_from_zero(|s: f64| 1.0 / s, 1.0, TailHint::power(-1.0)).is_infinite());
}

#[test]
fn log_weighted_tail_converges() {
    // ∫_0^1 ds / (s (1 + ln(1/s))²) = 1
    let f = |s: f64| 1.0 / (s * (1.0 + (1.0 / s).ln()).powi(2));
    let v = integrate_from_zero(f, 1.0, TailHint::power_log(-1.0, -2.0, 1.0));
    assert_relative_eq!(v, 1.0, max_relative = 1e-9);
}

#[test]
fn exact_power_sums() {
    let terms = [PowerTerm::new(2.0, -1.0 / 3.0), PowerTerm::new(1.0, 0.0)];
    assert_relative_eq!(power_sum_integral(&terms, 0.0, 1.0), 4.0, max_relative = 1e-14);
    let bad = [PowerTerm::new(1.0, -1.0), PowerTerm::new(-5.0, -2.0)];
    assert_eq!(power_sum_integral(&bad, 0.0, 1.0), f64::NEG_INFINITY);
}

#[test]
fn legendre_rule_is_exact_for_polynomials() {
    let (x, w) = gauss_legendre(5);
    let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
    assert_relative_eq!(v, 2.0 / 9.0, max_relative = 1e-13);
}

#[test]
fn golden_section_finds_interior_max() {
    let (v, t) = sup_on_log_grid(|t: f64| t * (-t).exp(), 1e-3, 10.0, 64);
    assert_relative_eq!(t, 1.0, max_relative = 1e-6);
    assert_relative_eq!(v, (-1f64).exp(), max_relative = 1e-12);
}
