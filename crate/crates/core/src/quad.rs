//! Quadrature and one-dimensional supremum search.
//!
//! * [`integrate`]: adaptive Gauss–Kronrod (7/15) on a finite interval.
//! * [`integrate_from_zero`]: integrals over `(0, b]` of integrands with a
//!   power/log singularity at the origin, via `s = b·e^{-x}` and an analytic
//!   tail model.
//! * [`power_integral`] and [`power_sum_integral`]: exact antiderivatives of
//!   power functions, with divergence reported as `±∞`.
//! * [`sup_on_log_grid`]: log-grid scan with golden-section refinement.

use crate::rearrange::PowerTerm;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const REL_TOL: f64 = 1e-11;
/// Absolute floor of the error target; tolerances are otherwise relative.
const ABS_TOL: f64 = 1e-300;
const MAX_SUBDIVISIONS: usize = 2000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Global adaptive scheme: repeatedly bisect the subinterval with the largest
/// error estimate until the summed error meets the tolerance or the
/// subdivision budget is spent.
fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (est, err) = gk15(f, a, b);
    let mut parts = vec![(a, b, est, err)];
    let mut total_err = err;
    for _ in 0..MAX_SUBDIVISIONS {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let tol = (rel_tol * total.abs()).max(ABS_TOL);
        if !(total_err > tol) {
            break;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, e) = parts[i];
        let m = 0.5 * (lo + hi);
        if !(m > lo && m < hi) {
            // interval exhausted at machine precision; accept its estimate
            total_err -= e;
            parts[i].3 = 0.0;
            continue;
        }
        let (l, le) = gk15(f, lo, m);
        let (r, re) = gk15(f, m, hi);
        total_err += le + re - e;
        parts[i] = (lo, m, l, le);
        parts.push((m, hi, r, re));
    }
    let mut acc = crate::sum::ExactSum::new();
    for p in &parts {
        acc.add(p.2);
    }
    acc.value()
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate_tol(f, a, b, REL_TOL)
}

/// Adaptive Gauss–Kronrod quadrature with relative tolerance `rel_tol`.
pub fn integrate_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    adapt(&f, a, b, rel_tol)
}

/// Near-origin behaviour of an integrand: `f(s) ≈ C·s^power·L(s)^log_power`
/// with `L(s) = 1 + ln(log_scale / s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailHint {
    pub power: f64,
    pub log_power: f64,
    pub log_scale: f64,
}

impl TailHint {
    pub fn power(power: f64) -> Self {
        Self { power, log_power: 0.0, log_scale: 1.0 }
    }

    pub fn power_log(power: f64, log_power: f64, log_scale: f64) -> Self {
        Self { power, log_power, log_scale }
    }

    /// Whether `∫_0 s^power L^log_power ds` diverges.
    pub fn diverges(&self) -> bool {
        let a = self.power + 1.0;
        a < -EXP_EPS || (a.abs() <= EXP_EPS && self.log_power >= -1.0)
    }
}

/// Exponents closer than this are treated as equal.
pub const EXP_EPS: f64 = 1e-12;

/// `∫_0^b f(s) ds` for a nonnegative integrand with an integrable singularity
/// at the origin described by `hint`. Returns `+∞` when the hint says the
/// integral diverges.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: F, b: f64, hint: TailHint) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    if hint.diverges() {
        return f64::INFINITY;
    }
    let a = hint.power + 1.0;
    let h = |x: f64| {
        let s = b * (-x).exp();
        if s <= 0.0 {
            0.0
        } else {
            f(s) * s
        }
    };
    let tail = |x: f64| {
        let hx = h(x);
        if hx == 0.0 {
            return 0.0;
        }
        let s = b * (-x).exp();
        let l = 1.0 + (hint.log_scale / s).ln();
        if a.abs() <= EXP_EPS {
            hx * l / (-hint.log_power - 1.0)
        } else {
            let denom = a - hint.log_power / l;
            if denom > 0.0 {
                hx / denom
            } else {
                hx / a
            }
        }
    };
    // keep b·e^{-x} a normal float
    let x_max = (b / 1e-300).ln().max(1.0);
    let mut acc = 0.0;
    let mut x0: f64 = 0.0;
    let mut width = 1.0;
    loop {
        let x1 = (x0 + width).min(x_max);
        acc += integrate(h, x0, x1);
        let t = tail(x1);
        if x1 >= x_max || t.abs() <= 1e-13 * acc.abs() {
            return acc + t;
        }
        x0 = x1;
        width *= 2.0;
    }
}

/// `∫_a^b s^e ds`, with `+∞` when `a = 0` and `e ≤ -1`.
pub fn power_integral(e: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let e1 = e + 1.0;
    if e1.abs() <= EXP_EPS {
        if a <= 0.0 {
            f64::INFINITY
        } else {
            (b / a).ln()
        }
    } else if a <= 0.0 {
        if e1 > 0.0 {
            b.powf(e1) / e1
        } else {
            f64::INFINITY
        }
    } else {
        (b.powf(e1) - a.powf(e1)) / e1
    }
}

/// `∫_a^b Σ cᵢ s^{eᵢ} ds`. When `a = 0` and the most singular term with a
/// nonzero coefficient is non-integrable, the result is `±∞` by the sign of
/// that coefficient.
pub fn power_sum_integral(terms: &[PowerTerm], a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a <= 0.0 {
        let merged = merge_terms(terms);
        if let Some(lead) = merged.iter().find(|t| t.coef != 0.0) {
            if lead.exp + 1.0 <= EXP_EPS {
                return lead.coef.signum() * f64::INFINITY;
            }
        }
        return merged.iter().map(|t| t.coef * power_integral(t.exp, a, b)).sum();
    }
    terms.iter().map(|t| t.coef * power_integral(t.exp, a, b)).sum()
}

/// Terms sorted by exponent with equal exponents combined.
pub fn merge_terms(terms: &[PowerTerm]) -> Vec<PowerTerm> {
    let mut sorted: Vec<PowerTerm> = terms.to_vec();
    sorted.sort_by(|x, y| x.exp.total_cmp(&y.exp));
    let mut out: Vec<PowerTerm> = Vec::with_capacity(sorted.len());
    for t in sorted {
        match out.last_mut() {
            Some(last) if (last.exp - t.exp).abs() <= EXP_EPS => last.coef += t.coef,
            _ => out.push(t),
        }
    }
    out
}

/// Product of two power sums.
pub fn multiply_terms(lhs: &[PowerTerm], rhs: &[PowerTerm]) -> Vec<PowerTerm> {
    let mut out = Vec::with_capacity(lhs.len() * rhs.len());
    for x in lhs {
        for y in rhs {
            out.push(PowerTerm::new(x.coef * y.coef, x.exp + y.exp));
        }
    }
    out
}

pub fn eval_terms(terms: &[PowerTerm], s: f64) -> f64 {
    terms.iter().map(|t| t.coef * s.powf(t.exp)).sum()
}

/// `m` points log-spaced on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && m >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..m)
        .map(|i| {
            if i == m - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (m - 1) as f64).exp()
            }
        })
        .collect()
}

/// Maximise `f` over `[lo, hi]` (both positive) by scanning `m` log-spaced
/// points and refining with golden-section search in the two cells adjacent
/// to the grid argmax. Returns `(max, argmax)`.
pub fn sup_on_log_grid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, m: usize) -> (f64, f64) {
    let grid = log_grid(lo, hi, m);
    let mut best = (f64::NEG_INFINITY, lo);
    let mut best_i = 0;
    for (i, &t) in grid.iter().enumerate() {
        let v = f(t);
        if v > best.0 || (v.is_nan() && !best.0.is_nan()) {
            best = (v, t);
            best_i = i;
        }
    }
    if !best.0.is_finite() {
        return best;
    }
    let left = grid[best_i.saturating_sub(1)];
    let right = grid[(best_i + 1).min(m - 1)];
    if right > left {
        let (v, t) = golden_max(|u: f64| f(u.exp()), left.ln(), right.ln(), 80);
        if v > best.0 {
            best = (v, t.exp());
        }
    }
    best
}

/// Golden-section maximisation of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (fc, c)
    } else {
        (fd, d)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
