//! Weighted Hardy inequalities on `(0, |Ω|]`: numerical evaluation of the
//! four sup-conditions characterising them, and randomized probes of the
//! inequalities themselves.
//!
//! The conditions, with `p'` the conjugate of `p`:
//!
//! * [`HardyCondition::Average`]:
//!   `sup_r [∫_r^{|Ω|} w^q]^{1/q} [∫_0^r v^{−p'}]^{1/p'}`, characterising
//!   `‖w ∫_0^s f‖_q ≤ C ‖v f‖_p`;
//! * [`HardyCondition::Tail`]:
//!   `sup_r [∫_0^r w^q]^{1/q} [∫_r^{|Ω|} v^{−p'}]^{1/p'}`, characterising
//!   `‖w ∫_s^{|Ω|} f‖_q ≤ C ‖v f‖_p`;
//! * [`HardyCondition::RearrangedAverage`]:
//!   `sup_t {∫_0^t s^{p1/n} w + t^{p1} ∫_t^{|Ω|} w s^{−p1/n'}}^{1/p1} {∫_0^t v}^{−1/p0}`,
//!   characterising `‖s^{−1/n'} ∫_0^s f*‖_{L^{p1}(w)} ≤ C ‖f*‖_{L^{p0}(v)}`;
//! * [`HardyCondition::RearrangedTail`]:
//!   `sup_t {∫_0^t (t−s)^{p1/n} w}^{1/p1} {∫_0^t v}^{−1/p0}`,
//!   characterising `‖∫_s^{|Ω|} f* t^{−1/n'}‖_{L^{p1}(w)} ≤ C ‖f*‖_{L^{p0}(v)}`.
//!
//! Exponents equal to `∞` turn the corresponding integral into an essential
//! supremum.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::extended::Extended;
use crate::interp::conjugate;
use crate::quad::{self, integrate, integrate_from_zero, power_integral, TailHint};
use crate::rearrange::{log_weight, weight_sup};

/// Lower end of the log grid used for sup scans, relative to `|Ω|`.
const SCAN_FLOOR: f64 = 1e-12;
/// Extra decades scanned below [`SCAN_FLOOR`] to classify divergence at 0.
const EXTENSION_DECADES: usize = 36;
/// Deepest breakpoint used by the probe generator, in decades below `|Ω|`.
const MAX_PROBE_DEPTH: f64 = 150.0;

/// A nonnegative weight on `(0, |Ω|]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    /// `coef · s^power · (1 + log(|Ω|/s))^log_power`.
    PowerLog {
        coef: f64,
        power: f64,
        #[serde(default)]
        log_power: f64,
    },
    /// `values[i]` on `[ends[i−1], ends[i])`, `ends[−1] = 0`.
    Tabulated { ends: Vec<f64>, values: Vec<f64> },
    Zero,
}

impl Weight {
    pub fn power(coef: f64, power: f64) -> Self {
        Weight::PowerLog { coef, power, log_power: 0.0 }
    }

    pub fn power_log(coef: f64, power: f64, log_power: f64) -> Self {
        Weight::PowerLog { coef, power, log_power }
    }

    pub fn constant(c: f64) -> Self {
        Self::power(c, 0.0)
    }

    fn validate(&self, omega: f64) -> Result<()> {
        match self {
            Weight::PowerLog { coef, power, log_power } => {
                if !(coef.is_finite() && *coef >= 0.0 && power.is_finite() && log_power.is_finite()) {
                    return Err(domain(format!("weight {self:?} is not evaluable")));
                }
            }
            Weight::Tabulated { ends, values } => {
                if ends.len() != values.len() || ends.is_empty() {
                    return Err(domain("tabulated weight needs matching, nonempty ends and values"));
                }
                let mut prev = 0.0;
                for (&e, &v) in ends.iter().zip(values) {
                    if !(e > prev) || !(v >= 0.0) || !v.is_finite() {
                        return Err(domain("tabulated weight needs increasing ends and finite nonnegative values"));
                    }
                    prev = e;
                }
                if prev < omega * (1.0 - 1e-12) {
                    return Err(domain("tabulated weight must cover (0, |Ω|]"));
                }
            }
            Weight::Zero => {}
        }
        Ok(())
    }

    pub fn eval(&self, s: f64, omega: f64) -> f64 {
        match self {
            Weight::PowerLog { coef, power, log_power } => {
                if *coef == 0.0 {
                    return 0.0;
                }
                let mut v = coef * s.powf(*power);
                if *log_power != 0.0 {
                    v *= log_weight(omega, s).powf(*log_power);
                }
                v
            }
            Weight::Tabulated { ends, values } => {
                let i = ends.partition_point(|&e| e <= s);
                values.get(i).or(values.last()).copied().unwrap_or(0.0)
            }
            Weight::Zero => 0.0,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Weight::PowerLog { coef, .. } => *coef == 0.0,
            Weight::Tabulated { values, .. } => values.iter().all(|&v| v == 0.0),
            Weight::Zero => true,
        }
    }

    /// `(power, log_power)` of the weight near the origin.
    fn lead(&self) -> (f64, f64) {
        match self {
            Weight::PowerLog { power, log_power, .. } => (*power, *log_power),
            _ => (0.0, 0.0),
        }
    }

    pub(crate) fn breakpoints(&self) -> &[f64] {
        match self {
            Weight::Tabulated { ends, .. } => ends,
            _ => &[],
        }
    }

    /// `∫_a^b s^e w(s)^r ds`.
    pub fn integral_pow(&self, a: f64, b: f64, r: f64, e: f64, omega: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Weight::PowerLog { coef, power, log_power } => {
                if *coef == 0.0 {
                    return zero_weight_integral(r, e, a, b);
                }
                let c = coef.powf(r);
                let (ex, lp) = (power * r + e, log_power * r);
                if lp == 0.0 {
                    return c * power_integral(ex, a, b);
                }
                let g = |s: f64| s.powf(ex) * log_weight(omega, s).powf(lp);
                if a <= 0.0 {
                    c * integrate_from_zero(g, b, TailHint::power_log(ex, lp, omega))
                } else {
                    c * integrate(g, a, b)
                }
            }
            Weight::Tabulated { ends, values } => {
                let mut acc = 0.0;
                let mut start: f64 = 0.0;
                for (&end, &v) in ends.iter().zip(values) {
                    let (lo, hi) = (start.max(a), end.min(b));
                    if hi > lo {
                        let piece = if v == 0.0 {
                            zero_weight_integral(r, e, lo, hi)
                        } else {
                            v.powf(r) * power_integral(e, lo, hi)
                        };
                        acc += piece;
                    }
                    start = end;
                }
                acc
            }
            Weight::Zero => zero_weight_integral(r, e, a, b),
        }
    }

    /// `ess sup_{(a,b)} w^r`, with the limit at the origin when `a = 0`.
    pub fn sup_pow(&self, a: f64, b: f64, r: f64, omega: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Weight::PowerLog { coef, power, log_power } => {
                if *coef == 0.0 {
                    return if r > 0.0 { 0.0 } else { f64::INFINITY };
                }
                coef.powf(r) * weight_sup(a, b, power * r, log_power * r, omega)
            }
            Weight::Tabulated { ends, values } => {
                let mut best: f64 = 0.0;
                let mut start: f64 = 0.0;
                for (&end, &v) in ends.iter().zip(values) {
                    if end > a && start < b {
                        let x = if v == 0.0 {
                            if r > 0.0 {
                                0.0
                            } else {
                                f64::INFINITY
                            }
                        } else {
                            v.powf(r)
                        };
                        best = best.max(x);
                    }
                    start = end;
                }
                best
            }
            Weight::Zero => {
                if r > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `∫_0^t (t − s)^e w(s) ds`.
    pub fn kernel_integral(&self, t: f64, e: f64, omega: f64) -> f64 {
        match self {
            Weight::PowerLog { coef, power, log_power } => {
                if *coef == 0.0 {
                    return 0.0;
                }
                let g = |s: f64| (t - s).powf(e) * self.eval(s, omega);
                let half = 0.5 * t;
                let head = integrate_from_zero(g, half, TailHint::power_log(*power, *log_power, omega));
                head + integrate(g, half, t)
            }
            Weight::Tabulated { ends, values } => {
                let mut acc = 0.0;
                let mut start: f64 = 0.0;
                for (&end, &v) in ends.iter().zip(values) {
                    if start >= t {
                        break;
                    }
                    let hi = end.min(t);
                    acc += v * ((t - start).powf(e + 1.0) - (t - hi).powf(e + 1.0)) / (e + 1.0);
                    start = end;
                }
                acc
            }
            Weight::Zero => 0.0,
        }
    }
}

/// `∫_a^b s^e 0^r ds` under the conventions `0^r = 0` for `r > 0`,
/// `0^r = ∞` for `r < 0`, `0^0 = 1`.
fn zero_weight_integral(r: f64, e: f64, a: f64, b: f64) -> f64 {
    if r > 0.0 {
        0.0
    } else if r < 0.0 {
        f64::INFINITY
    } else {
        power_integral(e, a, b)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::PowerLog { coef, power, log_power } if *log_power == 0.0 => write!(f, "{coef}*s^{power}"),
            Weight::PowerLog { coef, power, log_power } => write!(f, "{coef}*s^{power}*L^{log_power}"),
            Weight::Tabulated { ends, .. } => write!(f, "tabulated[{}]", ends.len()),
            Weight::Zero => f.write_str("0"),
        }
    }
}

/// Which of the four sup-conditions to evaluate. The string labels `4.3`
/// through `4.6` are the identifiers used on the command line and in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HardyCondition {
    #[serde(rename = "4.3")]
    Average,
    #[serde(rename = "4.4")]
    Tail,
    #[serde(rename = "4.5")]
    RearrangedAverage,
    #[serde(rename = "4.6")]
    RearrangedTail,
}

impl HardyCondition {
    pub const ALL: [HardyCondition; 4] =
        [HardyCondition::Average, HardyCondition::Tail, HardyCondition::RearrangedAverage, HardyCondition::RearrangedTail];

    pub fn label(&self) -> &'static str {
        match self {
            HardyCondition::Average => "4.3",
            HardyCondition::Tail => "4.4",
            HardyCondition::RearrangedAverage => "4.5",
            HardyCondition::RearrangedTail => "4.6",
        }
    }

    fn is_rearranged(&self) -> bool {
        matches!(self, HardyCondition::RearrangedAverage | HardyCondition::RearrangedTail)
    }
}

impl fmt::Display for HardyCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for HardyCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HardyCondition::ALL
            .into_iter()
            .find(|c| c.label() == s.trim())
            .ok_or_else(|| invalid(format!("unknown Hardy condition `{s}`; expected 4.3, 4.4, 4.5 or 4.6")))
    }
}

/// Exponents of the inequality being characterised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HardyExponents {
    /// `1 ≤ p ≤ q ≤ ∞`, for [`HardyCondition::Average`] and
    /// [`HardyCondition::Tail`].
    Lebesgue { p: f64, q: f64 },
    /// `p0 ∈ (0, 1]`, `p1 ∈ [p0, ∞)`, for the rearranged conditions.
    Rearranged { p0: f64, p1: f64 },
}

impl HardyExponents {
    pub fn lebesgue(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && q >= p) {
            return Err(domain(format!("need 1 ≤ p ≤ q ≤ ∞, got p = {p}, q = {q}")));
        }
        Ok(HardyExponents::Lebesgue { p, q })
    }

    pub fn rearranged(p0: f64, p1: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0 <= 1.0 && p1 >= p0 && p1.is_finite()) {
            return Err(domain(format!("need p0 ∈ (0, 1], p1 ∈ [p0, ∞), got p0 = {p0}, p1 = {p1}")));
        }
        Ok(HardyExponents::Rearranged { p0, p1 })
    }
}

/// Weights, exponents and domain measure of one Hardy inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyWeights {
    pub w: Weight,
    pub v: Weight,
    pub exponents: HardyExponents,
    pub omega: f64,
}

impl HardyWeights {
    pub fn new(w: Weight, v: Weight, exponents: HardyExponents, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(domain(format!("|Ω| must be positive, got {omega}")));
        }
        w.validate(omega)?;
        v.validate(omega)?;
        // re-run the exponent checks for values built by hand or deserialized
        match exponents {
            HardyExponents::Lebesgue { p, q } => HardyExponents::lebesgue(p, q)?,
            HardyExponents::Rearranged { p0, p1 } => HardyExponents::rearranged(p0, p1)?,
        };
        Ok(Self { w, v, exponents, omega })
    }

    fn check_condition(&self, cond: HardyCondition) -> Result<()> {
        let ok = match self.exponents {
            HardyExponents::Lebesgue { .. } => !cond.is_rearranged(),
            HardyExponents::Rearranged { .. } => cond.is_rearranged(),
        };
        if !ok {
            return Err(domain(format!("condition {cond} does not match exponents {:?}", self.exponents)));
        }
        Ok(())
    }
}

/// `[∫_a^b w^r]^{1/r}`, or `ess sup w` when `r = ∞`.
fn weight_norm(w: &Weight, a: f64, b: f64, r: f64, omega: f64) -> f64 {
    if r.is_infinite() {
        w.sup_pow(a, b, 1.0, omega)
    } else {
        w.integral_pow(a, b, r, 0.0, omega).powf(1.0 / r)
    }
}

/// `[∫_a^b v^{−p'}]^{1/p'}` with `p'` the conjugate of `p`.
fn dual_weight_norm(v: &Weight, a: f64, b: f64, p: f64, omega: f64) -> f64 {
    if p == 1.0 {
        v.sup_pow(a, b, -1.0, omega)
    } else if p.is_infinite() {
        v.integral_pow(a, b, -1.0, 0.0, omega)
    } else {
        let pp = p / (p - 1.0);
        v.integral_pow(a, b, -pp, 0.0, omega).powf(1.0 / pp)
    }
}

/// Product with `0·∞ = 0`.
fn product(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Value of the condition's bracket at the point `r` (or `t`).
fn condition_at(cond: HardyCondition, hw: &HardyWeights, n: u32, r: f64) -> f64 {
    let omega = hw.omega;
    match (cond, hw.exponents) {
        (HardyCondition::Average, HardyExponents::Lebesgue { p, q }) => {
            product(weight_norm(&hw.w, r, omega, q, omega), dual_weight_norm(&hw.v, 0.0, r, p, omega))
        }
        (HardyCondition::Tail, HardyExponents::Lebesgue { p, q }) => {
            product(weight_norm(&hw.w, 0.0, r, q, omega), dual_weight_norm(&hw.v, r, omega, p, omega))
        }
        (HardyCondition::RearrangedAverage, HardyExponents::Rearranged { p0, p1 }) => {
            let nf = f64::from(n);
            let np = conjugate(n);
            let head = hw.w.integral_pow(0.0, r, 1.0, p1 / nf, omega);
            let tail = product(r.powf(p1), hw.w.integral_pow(r, omega, 1.0, -p1 / np, omega));
            let v_mass = hw.v.integral_pow(0.0, r, 1.0, 0.0, omega);
            product((head + tail).powf(1.0 / p1), v_mass.powf(-1.0 / p0))
        }
        (HardyCondition::RearrangedTail, HardyExponents::Rearranged { p0, p1 }) => {
            let kernel = hw.w.kernel_integral(r, p1 / f64::from(n), omega);
            let v_mass = hw.v.integral_pow(0.0, r, 1.0, 0.0, omega);
            product(kernel.powf(1.0 / p1), v_mass.powf(-1.0 / p0))
        }
        _ => f64::NAN,
    }
}

/// Estimates the supremum of one of the four conditions over `(0, |Ω|]`.
///
/// The bracket is scanned on `grid` log-spaced points in
/// `[10⁻¹²|Ω|, |Ω|]` with golden-section refinement around the best point,
/// then on 36 further decades towards the origin. Growth that is monotone and
/// not decaying over that extension is reported as `+∞`.
pub fn hardy_condition(cond: HardyCondition, hw: &HardyWeights, n: u32, grid: usize) -> Result<Extended> {
    if grid < 64 {
        return Err(domain(format!("grid must have at least 64 points, got {grid}")));
    }
    if n < 2 {
        return Err(domain(format!("dimension must be at least 2, got {n}")));
    }
    hw.check_condition(cond)?;
    if hw.w.is_zero() {
        return Ok(Extended::Finite(0.0));
    }
    let omega = hw.omega;
    let f = |r: f64| condition_at(cond, hw, n, r);
    let (main, _) = quad::sup_on_log_grid(f, omega * SCAN_FLOOR, omega, grid);
    if main.is_nan() {
        return Err(domain(format!("condition {cond} is not evaluable for these weights")));
    }
    if main.is_infinite() {
        return Ok(Extended::Infinite);
    }
    let tail: Vec<f64> = (1..=EXTENSION_DECADES).map(|k| f(omega * SCAN_FLOOR * 10f64.powi(-(k as i32)))).collect();
    if tail.iter().any(|x| !x.is_finite()) {
        return Ok(Extended::Infinite);
    }
    if grows_without_bound(f(omega * SCAN_FLOOR), &tail) {
        return Ok(Extended::Infinite);
    }
    let best = tail.iter().copied().fold(main, f64::max);
    Ok(Extended::Finite(best))
}

/// Monotone increase over the last ten decades whose last step is at least
/// 0.8 of the step ten decades earlier, and a net gain over the scan floor
/// above 1%. Growth like `log(1/r)^{1/4}` or faster is caught; tails that
/// converge like `1/log(1/r)` or faster are not.
fn grows_without_bound(at_floor: f64, tail: &[f64]) -> bool {
    let m = tail.len();
    let window = &tail[m - 11..];
    let increasing = window.windows(2).all(|w| w[1] > w[0]);
    let first_step = window[1] - window[0];
    let last_step = window[10] - window[9];
    increasing && last_step >= 0.8 * first_step && tail[m - 1] > 1.01 * at_floor
}

/// A nonnegative step function `values[i]` on `[ends[i−1], ends[i])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    pub ends: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFunction {
    fn steps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ends
            .iter()
            .zip(&self.values)
            .enumerate()
            .map(|(i, (&e, &v))| (if i == 0 { 0.0 } else { self.ends[i - 1] }, e, v))
    }

    /// `1` on `[0, measure)`, `0` up to `omega`.
    pub fn indicator(measure: f64, omega: f64) -> Self {
        if measure >= omega {
            return Self { ends: vec![omega], values: vec![1.0] };
        }
        Self { ends: vec![measure, omega], values: vec![1.0, 0.0] }
    }
}

/// Splits `[a, b]` at the given interior points and integrates `g` over each
/// part; the part starting at 0 uses the origin tail model `hint`.
fn integrate_pieces(g: &dyn Fn(f64) -> f64, a: f64, b: f64, cuts: &[f64], hint: TailHint) -> f64 {
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
    pts.push(b);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        if w[0] <= 0.0 {
            acc += integrate_from_zero(g, w[1], hint);
        } else {
            acc += integrate(g, w[0], w[1]);
        }
    }
    acc
}

/// Left- and right-hand sides of the inequality characterised by `cond`, for
/// the step function `f` (assumed nonincreasing for the rearranged
/// conditions).
pub fn hardy_sides(cond: HardyCondition, hw: &HardyWeights, n: u32, f: &StepFunction) -> Result<(f64, f64)> {
    hw.check_condition(cond)?;
    let omega = hw.omega;
    let np = conjugate(n);
    let steps: Vec<(f64, f64, f64)> = f.steps().filter(|s| s.0 < omega).map(|(a, b, c)| (a, b.min(omega), c)).collect();
    if steps.is_empty() {
        return Err(invalid("step function must start below |Ω|"));
    }
    let (w_pow, w_log) = hw.w.lead();
    let w = |s: f64| hw.w.eval(s, omega);

    // cumulative ∫_0^{a_i} f and ∫_{b_i}^{|Ω|} f, ∫_{b_i}^{|Ω|} f t^{-1/n'}
    let mut head = Vec::with_capacity(steps.len());
    let mut acc = 0.0;
    for &(a, b, c) in &steps {
        head.push(acc);
        acc += c * (b - a);
    }
    let mut tail = vec![0.0; steps.len()];
    let mut tail_weighted = vec![0.0; steps.len()];
    let (mut t0, mut t1) = (0.0, 0.0);
    for i in (0..steps.len()).rev() {
        tail[i] = t0;
        tail_weighted[i] = t1;
        let (a, b, c) = steps[i];
        t0 += c * (b - a);
        t1 += c * power_integral(-1.0 / np, a, b);
    }

    let mut lhs = 0.0;
    let mut rhs = 0.0;
    match (cond, hw.exponents) {
        (HardyCondition::Average | HardyCondition::Tail, HardyExponents::Lebesgue { p, q }) => {
            if p.is_infinite() || q.is_infinite() {
                return Err(domain("inequality sides need finite exponents"));
            }
            for (i, &(a, b, c)) in steps.iter().enumerate() {
                let g: Box<dyn Fn(f64) -> f64> = if cond == HardyCondition::Average {
                    let h0 = head[i];
                    Box::new(move |s: f64| (w(s) * (h0 + c * (s - a))).powf(q))
                } else {
                    let t = tail[i];
                    Box::new(move |s: f64| (w(s) * (t + c * (b - s))).powf(q))
                };
                let lead = if cond == HardyCondition::Average { q * (1.0 + w_pow) } else { q * w_pow };
                lhs += integrate_pieces(&g, a, b, hw.w.breakpoints(), TailHint::power_log(lead, q * w_log, omega));
                if c > 0.0 {
                    rhs += c.powf(p) * hw.v.integral_pow(a, b, p, 0.0, omega);
                }
            }
            Ok((lhs.powf(1.0 / q), rhs.powf(1.0 / p)))
        }
        (HardyCondition::RearrangedAverage | HardyCondition::RearrangedTail, HardyExponents::Rearranged { p0, p1 }) => {
            let nf = f64::from(n);
            for (i, &(a, b, c)) in steps.iter().enumerate() {
                let g: Box<dyn Fn(f64) -> f64> = if cond == HardyCondition::RearrangedAverage {
                    let h0 = head[i];
                    Box::new(move |s: f64| (s.powf(-1.0 / np) * (h0 + c * (s - a))).powf(p1) * w(s))
                } else {
                    let t = tail_weighted[i];
                    Box::new(move |s: f64| (t + c * nf * (b.powf(1.0 / nf) - s.powf(1.0 / nf))).powf(p1) * w(s))
                };
                let lead = if cond == HardyCondition::RearrangedAverage { p1 / nf + w_pow } else { w_pow };
                lhs += integrate_pieces(&g, a, b, hw.w.breakpoints(), TailHint::power_log(lead, w_log, omega));
                if c > 0.0 {
                    rhs += c.powf(p0) * hw.v.integral_pow(a, b, 1.0, 0.0, omega);
                }
            }
            Ok((lhs.powf(1.0 / p1), rhs.powf(1.0 / p0)))
        }
        _ => Err(domain(format!("condition {cond} does not match exponents"))),
    }
}

/// Outcome of a randomized probe of one Hardy inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub condition: HardyCondition,
    pub weights: HardyWeights,
    pub n: u32,
    pub sup_estimate: Extended,
    /// Largest LHS/RHS over all trials.
    pub max_ratio: Extended,
    /// Largest LHS/RHS over the first half of the trials.
    pub max_ratio_half: Extended,
    /// `max_ratio / max_ratio_half`.
    pub doubling_growth: Extended,
    pub trials: usize,
    pub seed: u64,
    pub depth_decades: f64,
    /// Breakpoints and values of the maximizing trial.
    pub argmax: Option<StepFunction>,
}

impl ProbeReport {
    /// Finite ratios whose maximum grows by less than a factor of 2 when the
    /// number of trials doubles.
    pub fn bounded(&self) -> bool {
        self.max_ratio.is_finite() && self.doubling_growth.finite().is_some_and(|g| g < 2.0)
    }
}

/// Random nonnegative step function for trial `i`. Breakpoints are
/// log-uniform in `[|Ω|·10^{−d}, |Ω|]`, and half of the trials also place one
/// at `|Ω|·10^{−d}`. The depth `d = depth_decades · log₂(i + 2)` widens with
/// the trial index, so doubling the number of trials pushes the search
/// `depth_decades` decades closer to the origin.
fn random_step_function(seed: u64, i: usize, depth_decades: f64, omega: f64, nonincreasing: bool) -> StepFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let depth = (depth_decades * ((i + 2) as f64).log2()).min(MAX_PROBE_DEPTH);
    let k = rng.random_range(1..=6usize);
    // one breakpoint sits at the current depth, the others are log-uniform
    let mut ends: Vec<f64> = (0..k - 1).map(|_| omega * 10f64.powf(-rng.random_range(0.0..depth))).collect();
    if rng.random_bool(0.5) {
        ends.push(omega * 10f64.powf(-depth));
    }
    ends.push(omega);
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut values: Vec<f64> = ends
        .iter()
        .map(|_| if rng.random_bool(0.15) { 0.0 } else { 10f64.powf(rng.random_range(-3.0..3.0)) })
        .collect();
    if nonincreasing {
        values.sort_by(|a, b| b.total_cmp(a));
    }
    StepFunction { ends, values }
}

/// Probes `cond` with `trials` random step functions and reports the largest
/// LHS/RHS ratio. Identical arguments give bit-identical reports, and a run
/// with `2T` trials repeats the `T`-trial run as its prefix.
pub fn hardy_inequality_probe(
    cond: HardyCondition,
    hw: &HardyWeights,
    n: u32,
    trials: usize,
    seed: u64,
    depth_decades: f64,
) -> Result<ProbeReport> {
    if trials < 2 {
        return Err(domain("probe needs at least 2 trials"));
    }
    if !(depth_decades > 0.0) {
        return Err(domain(format!("depth_decades must be positive, got {depth_decades}")));
    }
    let sup_estimate = hardy_condition(cond, hw, n, 512)?;
    let mut max_ratio: f64 = 0.0;
    let mut max_half: f64 = 0.0;
    let mut argmax = None;
    for i in 0..trials {
        let f = random_step_function(seed, i, depth_decades, hw.omega, cond.is_rearranged());
        let (lhs, rhs) = hardy_sides(cond, hw, n, &f)?;
        let ratio = if lhs == 0.0 {
            continue;
        } else if rhs == 0.0 {
            f64::INFINITY
        } else {
            lhs / rhs
        };
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = Some(f);
        }
        if i < trials / 2 {
            max_half = max_half.max(ratio);
        }
    }
    let growth = if max_ratio == 0.0 {
        1.0
    } else if max_half == 0.0 {
        f64::INFINITY
    } else {
        max_ratio / max_half
    };
    Ok(ProbeReport {
        condition: cond,
        weights: hw.clone(),
        n,
        sup_estimate,
        max_ratio: Extended::from_f64(max_ratio),
        max_ratio_half: Extended::from_f64(max_half),
        doubling_growth: Extended::from_f64(growth),
        trials,
        seed,
        depth_decades,
        argmax,
    })
}

/// Weight pairs used to establish the Lorentz-scale gradient estimates, and
/// one engineered pair whose condition diverges. Each entry is
/// `(name, condition, weights)` on a domain of measure `omega`, `n = 3`.
pub fn proof_weight_pairs(omega: f64) -> Vec<(String, HardyCondition, HardyWeights)> {
    use HardyCondition::*;
    let leb = |p, q| HardyExponents::lebesgue(p, q).expect("admissible");
    let rea = |p0, p1| HardyExponents::rearranged(p0, p1).expect("admissible");
    let hw = |w, v, e| HardyWeights::new(w, v, e, omega).expect("valid weights");
    let third = 1.0 / 3.0;
    vec![
        ("lorentz-iii/average".into(), Average, hw(Weight::power(1.0, -2.0 * third), Weight::constant(1.0), leb(2.0, 6.0))),
        ("lorentz-iii/tail".into(), Tail, hw(Weight::constant(1.0), Weight::power(1.0, 2.0 * third), leb(2.0, 6.0))),
        ("lorentz-iv/rearranged-average".into(), RearrangedAverage, hw(Weight::power(1.0, -5.0 / 6.0), Weight::power(1.0, -0.5), rea(1.0, 1.0))),
        ("lorentz-iv/rearranged-tail".into(), RearrangedTail, hw(Weight::power(1.0, -5.0 / 6.0), Weight::power(1.0, -0.5), rea(1.0, 1.0))),
        ("lorentz-iv-k2/average".into(), Average, hw(Weight::power(1.0, -1.0), Weight::constant(1.0), leb(2.0, 2.0))),
        ("lorentz-iv-k2/tail".into(), Tail, hw(Weight::power(1.0, -third), Weight::power(1.0, 2.0 * third), leb(2.0, 2.0))),
        ("lorentz-v/average".into(), Average, hw(Weight::power(1.0, -2.0 * third), Weight::constant(1.0), leb(3.0, 4.0))),
        ("lorentz-v/tail".into(), Tail, hw(Weight::constant(1.0), Weight::power(1.0, 2.0 * third), leb(3.0, 4.0))),
        ("zygmund-vi/average".into(), Average, hw(Weight::power_log(1.0, -7.0 / 6.0, -1.0), Weight::power(1.0, -1.0 / 6.0), leb(2.0, 2.0))),
        ("zygmund-vi/tail".into(), Tail, hw(Weight::power_log(1.0, -0.5, -1.0), Weight::power(1.0, 0.5), leb(2.0, 2.0))),
    ]
}

/// A pair whose average condition diverges at the origin:
/// `w = s^{-1}`, `v = s^{1/2}`, `p = q = 1`.
pub fn divergent_weight_pair(omega: f64) -> (HardyCondition, HardyWeights) {
    let hw = HardyWeights::new(
        Weight::power(1.0, -1.0),
        Weight::power(1.0, 0.5),
        HardyExponents::lebesgue(1.0, 1.0).expect("admissible"),
        omega,
    )
    .expect("valid weights");
    (HardyCondition::Average, hw)
}
