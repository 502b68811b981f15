//! Distribution functions, decreasing and increasing rearrangements, maximal
//! averages and medians of functions given on measured cells.
//!
//! A [`GridFunction`] is a list of `(measure, value)` cells. Its decreasing
//! rearrangement is a [`RearrangementProfile`]: a nonincreasing,
//! right-continuous function on `(0, |Ω|]` that vanishes for `s ≥ |Ω|`.
//! Profiles come in two representations sharing one API:
//!
//! * step profiles, produced exactly from cell data (value `vᵢ` on
//!   `[sᵢ₋₁, sᵢ)`), and
//! * analytic profiles, made of pieces that are either power sums
//!   `Σ c·s^e` (integrated with exact antiderivatives) or arbitrary callables
//!   tagged with their leading exponent at the origin (integrated by
//!   quadrature).

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::quad::{
    self, eval_terms, integrate, integrate_from_zero, merge_terms, multiply_terms, power_integral,
    power_sum_integral, TailHint, EXP_EPS,
};
use crate::sum::{exact_sum, ExactSum};

/// Relative tolerance between the declared total measure and the cell sum.
pub const MEASURE_REL_TOL: f64 = 1e-12;

/// Number of log-spaced points used to scan suprema over analytic pieces.
pub const SUP_GRID_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub measure: f64,
    pub value: f64,
}

impl Cell {
    pub fn new(measure: f64, value: f64) -> Self {
        Self { measure, value }
    }
}

/// A measurable function sampled on a measured partition of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    cells: Vec<Cell>,
    total_measure: f64,
    label: String,
}

impl GridFunction {
    /// Builds a grid function whose total measure is the exact sum of the cell
    /// measures.
    pub fn new(cells: Vec<Cell>, label: impl Into<String>) -> Result<Self> {
        let total = exact_sum(cells.iter().map(|c| c.measure));
        Self::with_total(cells, total, label)
    }

    /// Builds a grid function on a domain of declared measure `total`; the
    /// cell measures must add up to it within [`MEASURE_REL_TOL`].
    pub fn with_total(cells: Vec<Cell>, total: f64, label: impl Into<String>) -> Result<Self> {
        if cells.is_empty() {
            return Err(invalid("grid function needs at least one cell"));
        }
        for (i, c) in cells.iter().enumerate() {
            if !(c.measure > 0.0) || !c.measure.is_finite() {
                return Err(invalid(format!("cell {i}: measure must be positive and finite, got {}", c.measure)));
            }
            if !c.value.is_finite() {
                return Err(invalid(format!("cell {i}: value must be finite, got {}", c.value)));
            }
        }
        if !(total > 0.0) || !total.is_finite() {
            return Err(invalid(format!("total measure must be positive, got {total}")));
        }
        let sum = exact_sum(cells.iter().map(|c| c.measure));
        if ((sum - total) / total).abs() > MEASURE_REL_TOL {
            return Err(invalid(format!("cell measures sum to {sum}, declared total is {total}")));
        }
        Ok(Self { cells, total_measure: total, label: label.into() })
    }

    pub fn from_pairs(pairs: &[(f64, f64)], label: impl Into<String>) -> Result<Self> {
        Self::new(pairs.iter().map(|&(m, v)| Cell::new(m, v)).collect(), label)
    }

    pub fn constant(total: f64, value: f64) -> Result<Self> {
        Self::new(vec![Cell::new(total, value)], "constant")
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Pointwise image under `f`, keeping the cell structure.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let cells = self.cells.iter().map(|c| Cell::new(c.measure, f(c.value))).collect();
        Self::with_total(cells, self.total_measure, self.label.clone())
    }

    /// Pointwise combination of two functions on the same cell structure.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.cells.len() != other.cells.len()
            || self.cells.iter().zip(&other.cells).any(|(a, b)| a.measure != b.measure)
        {
            return Err(domain("grid functions live on different cell structures"));
        }
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| Cell::new(a.measure, f(a.value, b.value)))
            .collect();
        Self::with_total(cells, self.total_measure, self.label.clone())
    }

    /// `Σ measureᵢ·|valueᵢ|^p`.
    pub fn abs_power_integral(&self, p: f64) -> f64 {
        exact_sum(self.cells.iter().map(|c| c.measure * c.value.abs().powf(p)))
    }

    /// Reads `measure,value` CSV.
    pub fn read_csv<R: Read>(reader: R, label: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["measure", "value"] {
            return Err(invalid(format!("expected header `measure,value`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let cells = rdr.deserialize::<Cell>().collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(cells, label)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for c in &self.cells {
            wtr.serialize(c)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// `coef · s^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coef: f64,
    pub exp: f64,
}

impl PowerTerm {
    pub const fn new(coef: f64, exp: f64) -> Self {
        Self { coef, exp }
    }
}

/// A closed-form profile piece with its leading exponent at the origin
/// (`f(s) ~ C·s^lead_exp` as `s → 0⁺`, `C > 0`).
#[derive(Clone)]
pub struct AnalyticFn {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lead_exp: f64,
}

impl AnalyticFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, lead_exp: f64) -> Self {
        Self { f: Arc::new(f), lead_exp }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    pub fn lead_exp(&self) -> f64 {
        self.lead_exp
    }
}

impl fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFn").field("lead_exp", &self.lead_exp).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Shape {
    PowerSum(Vec<PowerTerm>),
    Analytic(AnalyticFn),
}

#[derive(Debug, Clone)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub shape: Shape,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum ShapeRef<'a> {
    Const(f64),
    Terms(&'a [PowerTerm]),
    Func(&'a AnalyticFn),
}

impl ShapeRef<'_> {
    fn eval(&self, s: f64) -> f64 {
        match *self {
            ShapeRef::Const(v) => v,
            ShapeRef::Terms(t) => eval_terms(t, s).max(0.0),
            ShapeRef::Func(f) => f.eval(s).max(0.0),
        }
    }

    /// `(coefficient, exponent)` of the dominant term at the origin, or
    /// `None` for the zero function.
    fn lead(&self) -> Option<(f64, f64)> {
        match *self {
            ShapeRef::Const(v) => (v != 0.0).then_some((v, 0.0)),
            ShapeRef::Terms(t) => merge_terms(t).into_iter().find(|t| t.coef != 0.0).map(|t| (t.coef, t.exp)),
            ShapeRef::Func(f) => Some((1.0, f.lead_exp)),
        }
    }

    /// Value at the left end of the piece (a limit when `a = 0`).
    fn eval_start(&self, a: f64) -> f64 {
        if a > 0.0 {
            return self.eval(a);
        }
        match self.lead() {
            None => 0.0,
            Some((c, e)) if e < -EXP_EPS => {
                if c > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Some(_) => match *self {
                ShapeRef::Const(v) => v,
                ShapeRef::Terms(t) => {
                    merge_terms(t).iter().filter(|t| t.exp.abs() <= EXP_EPS).map(|t| t.coef).sum::<f64>().max(0.0)
                }
                ShapeRef::Func(f) => f.eval(0.0).max(0.0),
            },
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Step { ends: Vec<f64>, values: Vec<f64> },
    Pieces(Vec<Piece>),
}

/// A nonincreasing right-continuous function on `(0, |Ω|]`, the decreasing
/// rearrangement `u*` of some function on a domain of measure `|Ω|`.
#[derive(Debug, Clone)]
pub struct RearrangementProfile {
    repr: Repr,
    total_measure: f64,
}

/// `1 + ln(Ω/s)`.
pub(crate) fn log_weight(omega: f64, s: f64) -> f64 {
    1.0 + (omega / s).ln()
}

impl RearrangementProfile {
    /// A step profile with value `values[i]` on `[ends[i-1], ends[i])`
    /// (`ends[-1] = 0`).
    pub fn from_steps(ends: Vec<f64>, values: Vec<f64>, total_measure: f64) -> Result<Self> {
        if ends.len() != values.len() {
            return Err(invalid("breakpoints and values differ in length"));
        }
        if !(total_measure > 0.0) || !total_measure.is_finite() {
            return Err(invalid(format!("total measure must be positive, got {total_measure}")));
        }
        let mut prev = 0.0;
        for (&e, &v) in ends.iter().zip(&values) {
            if !(e > prev) {
                return Err(invalid("breakpoints must be strictly increasing and positive"));
            }
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid(format!("profile values must be finite and nonnegative, got {v}")));
            }
            prev = e;
        }
        if prev > total_measure * (1.0 + MEASURE_REL_TOL) {
            return Err(invalid("last breakpoint exceeds the total measure"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(invalid("profile values must be nonincreasing"));
        }
        Ok(Self { repr: Repr::Step { ends, values }, total_measure })
    }

    /// An analytic profile built from contiguous pieces starting at 0.
    /// Monotonicity of the pieces is the caller's responsibility.
    pub fn from_pieces(pieces: Vec<Piece>, total_measure: f64) -> Result<Self> {
        if !(total_measure > 0.0) || !total_measure.is_finite() {
            return Err(invalid(format!("total measure must be positive, got {total_measure}")));
        }
        let mut prev = 0.0;
        for p in &pieces {
            if p.start != prev || !(p.end > p.start) {
                return Err(invalid("pieces must be contiguous, nonempty and start at 0"));
            }
            prev = p.end;
        }
        if prev > total_measure * (1.0 + MEASURE_REL_TOL) {
            return Err(invalid("pieces extend past the total measure"));
        }
        Ok(Self { repr: Repr::Pieces(pieces), total_measure })
    }

    /// A single power-sum piece on `(0, |Ω|)`.
    pub fn power_sum(terms: Vec<PowerTerm>, total_measure: f64) -> Result<Self> {
        Self::from_pieces(vec![Piece { start: 0.0, end: total_measure, shape: Shape::PowerSum(terms) }], total_measure)
    }

    /// A single closed-form piece on `(0, |Ω|)`.
    pub fn analytic(f: impl Fn(f64) -> f64 + Send + Sync + 'static, lead_exp: f64, total_measure: f64) -> Result<Self> {
        Self::from_pieces(
            vec![Piece { start: 0.0, end: total_measure, shape: Shape::Analytic(AnalyticFn::new(f, lead_exp)) }],
            total_measure,
        )
    }

    pub fn constant(value: f64, total_measure: f64) -> Result<Self> {
        if value == 0.0 {
            return Self::zero(total_measure);
        }
        Self::from_steps(vec![total_measure], vec![value], total_measure)
    }

    pub fn zero(total_measure: f64) -> Result<Self> {
        Self::from_steps(vec![total_measure], vec![0.0], total_measure)
    }

    /// `1` on `[0, measure)`, `0` after.
    pub fn indicator(measure: f64, total_measure: f64) -> Result<Self> {
        if measure >= total_measure {
            return Self::constant(1.0, total_measure);
        }
        Self::from_steps(vec![measure, total_measure], vec![1.0, 0.0], total_measure)
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn is_step(&self) -> bool {
        matches!(self.repr, Repr::Step { .. })
    }

    /// Right ends of the steps, for step profiles.
    pub fn breakpoints(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Step { ends, .. } => Some(ends),
            Repr::Pieces(_) => None,
        }
    }

    /// Step values, for step profiles.
    pub fn values(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Step { values, .. } => Some(values),
            Repr::Pieces(_) => None,
        }
    }

    pub(crate) fn piece_count(&self) -> usize {
        match &self.repr {
            Repr::Step { ends, .. } => ends.len(),
            Repr::Pieces(p) => p.len(),
        }
    }

    pub(crate) fn piece(&self, i: usize) -> (f64, f64, ShapeRef<'_>) {
        match &self.repr {
            Repr::Step { ends, values } => {
                let start = if i == 0 { 0.0 } else { ends[i - 1] };
                (start, ends[i], ShapeRef::Const(values[i]))
            }
            Repr::Pieces(p) => {
                let shape = match &p[i].shape {
                    Shape::PowerSum(t) => ShapeRef::Terms(t),
                    Shape::Analytic(f) => ShapeRef::Func(f),
                };
                (p[i].start, p[i].end, shape)
            }
        }
    }

    fn ends_iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.piece_count()).map(|i| self.piece(i).1)
    }

    /// Index of the first piece whose end is `> s` (right-continuous lookup).
    fn locate(&self, s: f64) -> usize {
        match &self.repr {
            Repr::Step { ends, .. } => ends.partition_point(|&e| e <= s),
            Repr::Pieces(p) => p.partition_point(|pc| pc.end <= s),
        }
    }

    /// `u*(s)`. For `s ≤ 0` returns the limit at `0⁺` (the essential
    /// supremum), possibly `+∞`; for `s ≥ |Ω|` returns 0.
    pub fn eval(&self, s: f64) -> f64 {
        if s >= self.total_measure {
            return 0.0;
        }
        let i = self.locate(s.max(0.0));
        if i >= self.piece_count() {
            return 0.0;
        }
        let (start, _, shape) = self.piece(i);
        if s <= 0.0 {
            shape.eval_start(start)
        } else {
            shape.eval(s)
        }
    }

    /// Left limit `u*(s⁻)`; equals `u*(0⁺)` for `s ≤ 0`.
    pub fn eval_left(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.eval(0.0);
        }
        if s > self.total_measure {
            return 0.0;
        }
        let i = match &self.repr {
            Repr::Step { ends, .. } => ends.partition_point(|&e| e < s),
            Repr::Pieces(p) => p.partition_point(|pc| pc.end < s),
        };
        if i >= self.piece_count() {
            return 0.0;
        }
        self.piece(i).2.eval(s)
    }

    /// `|{s : u*(s) > t}|`, which equals the distribution function of any
    /// function this profile rearranges.
    pub fn distribution(&self, t: f64) -> f64 {
        if let Repr::Step { ends, values } = &self.repr {
            let j = values.partition_point(|&v| v > t);
            return if j == 0 { 0.0 } else { ends[j - 1] };
        }
        for i in 0..self.piece_count() {
            let (a, b, shape) = self.piece(i);
            if shape.eval_start(a) <= t {
                return a;
            }
            let end_val = shape.eval(b * (1.0 - 1e-15));
            if end_val > t {
                continue;
            }
            let (mut lo, mut hi) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if shape.eval(mid) > t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return hi;
        }
        self.ends_iter().last().unwrap_or(0.0)
    }

    /// `∫_a^b u*(s) ds`, truncated to `(0, |Ω|)`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.integral_weighted(a, b, &[PowerTerm::new(1.0, 0.0)])
    }

    /// `∫_a^b u*(s)·w(s) ds` for a power-sum weight `w`.
    pub fn integral_weighted(&self, a: f64, b: f64, weight: &[PowerTerm]) -> f64 {
        let a = a.max(0.0);
        let b = b.min(self.total_measure);
        if b <= a {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in self.locate(a)..self.piece_count() {
            let (ps, pe, shape) = self.piece(i);
            if ps >= b {
                break;
            }
            acc += piece_weighted(shape, ps.max(a), pe.min(b), weight);
        }
        acc
    }

    /// `∫_a^b (s^γ·L(s)^β·u*(s))^k ds` with `L(s) = 1 + ln(|Ω|/s)`.
    pub fn integral_power(&self, a: f64, b: f64, gamma: f64, beta: f64, k: f64) -> f64 {
        let a = a.max(0.0);
        let b = b.min(self.total_measure);
        if b <= a {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in self.locate(a)..self.piece_count() {
            let (ps, pe, shape) = self.piece(i);
            if ps >= b {
                break;
            }
            acc += piece_power(shape, ps.max(a), pe.min(b), gamma, beta, k, self.total_measure);
        }
        acc
    }

    /// `sup_{t ∈ (0, T]} t^γ·L(t)^β·u*(t)` with `T = min(upto, |Ω|)`.
    pub fn weighted_sup(&self, upto: f64, gamma: f64, beta: f64) -> f64 {
        let t_max = upto.min(self.total_measure);
        let omega = self.total_measure;
        let mut best: f64 = 0.0;
        for i in 0..self.piece_count() {
            let (a, b, shape) = self.piece(i);
            if a >= t_max {
                break;
            }
            let b = b.min(t_max);
            let v = match shape {
                ShapeRef::Const(v) => {
                    if v == 0.0 {
                        0.0
                    } else {
                        v * weight_sup(a, b, gamma, beta, omega)
                    }
                }
                _ => {
                    let w = |t: f64| t.powf(gamma) * log_weight(omega, t).powf(beta) * shape.eval(t);
                    let lo = if a > 0.0 { a } else { b * 1e-15 };
                    let (scan, _) = quad::sup_on_log_grid(w, lo, b, SUP_GRID_POINTS);
                    let at_zero = if a > 0.0 { 0.0 } else { limit_at_zero(shape, gamma, beta) };
                    scan.max(at_zero)
                }
            };
            best = best.max(v);
            if best.is_infinite() {
                return best;
            }
        }
        best
    }

    /// The profile of `λ·u`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let l = lambda.abs();
        let repr = match &self.repr {
            Repr::Step { ends, values } => Repr::Step { ends: ends.clone(), values: values.iter().map(|v| v * l).collect() },
            Repr::Pieces(pieces) => Repr::Pieces(
                pieces
                    .iter()
                    .map(|p| Piece {
                        start: p.start,
                        end: p.end,
                        shape: match &p.shape {
                            Shape::PowerSum(t) => {
                                Shape::PowerSum(t.iter().map(|t| PowerTerm::new(t.coef * l, t.exp)).collect())
                            }
                            Shape::Analytic(f) => {
                                let f = f.clone();
                                let lead = f.lead_exp;
                                Shape::Analytic(AnalyticFn::new(move |s| l * f.eval(s), lead))
                            }
                        },
                    })
                    .collect(),
            ),
        };
        Self { repr, total_measure: self.total_measure }
    }

    /// Splits a step profile at `level` into `min(u*, level)` and
    /// `(u* − level)₊`; both are again decreasing rearrangements.
    pub fn split_at_level(&self, level: f64) -> Result<(Self, Self)> {
        let (Some(ends), Some(values)) = (self.breakpoints(), self.values()) else {
            return Err(domain("level splitting is only defined for step profiles"));
        };
        let low: Vec<f64> = values.iter().map(|v| v.min(level)).collect();
        let high: Vec<f64> = values.iter().map(|v| (v - level).max(0.0)).collect();
        Ok((
            Self::from_steps(ends.to_vec(), low, self.total_measure)?,
            Self::from_steps(ends.to_vec(), high, self.total_measure)?,
        ))
    }

    /// Writes a step profile as `s,value` rows: each row is the left end of a
    /// step and its value, followed by a closing `(|Ω|, 0)` row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let (Some(ends), Some(values)) = (self.breakpoints(), self.values()) else {
            return Err(domain("only step profiles serialize to CSV"));
        };
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["s", "value"])?;
        let mut start = 0.0;
        for (&e, &v) in ends.iter().zip(values) {
            wtr.write_record([start.to_string(), v.to_string()])?;
            start = e;
        }
        wtr.write_record([self.total_measure.to_string(), "0".to_string()])?;
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            s: f64,
            value: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["s", "value"] {
            return Err(invalid("expected header `s,value`"));
        }
        let rows = rdr.deserialize::<Row>().collect::<std::result::Result<Vec<_>, _>>()?;
        if rows.len() < 2 || rows[0].s != 0.0 {
            return Err(invalid("profile CSV needs a first row at s = 0 and a closing row"));
        }
        let total = rows[rows.len() - 1].s;
        let ends = rows[1..].iter().map(|r| r.s).collect();
        let values = rows[..rows.len() - 1].iter().map(|r| r.value).collect();
        Self::from_steps(ends, values, total)
    }
}

/// `∫_a^b shape(s)·w(s) ds` on one piece.
fn piece_weighted(shape: ShapeRef<'_>, a: f64, b: f64, weight: &[PowerTerm]) -> f64 {
    match shape {
        ShapeRef::Const(v) => {
            if v == 0.0 {
                0.0
            } else {
                v * power_sum_integral(weight, a, b)
            }
        }
        ShapeRef::Terms(t) => power_sum_integral(&multiply_terms(t, weight), a, b),
        ShapeRef::Func(f) => {
            let g = |s: f64| f.eval(s) * eval_terms(weight, s);
            if a <= 0.0 {
                let w_lead = merge_terms(weight).into_iter().find(|t| t.coef != 0.0).map_or(0.0, |t| t.exp);
                integrate_from_zero(g, b, TailHint::power(f.lead_exp + w_lead))
            } else {
                integrate(g, a, b)
            }
        }
    }
}

/// `∫_a^b (s^γ L^β shape)^k ds` on one piece.
fn piece_power(shape: ShapeRef<'_>, a: f64, b: f64, gamma: f64, beta: f64, k: f64, omega: f64) -> f64 {
    let Some((lead_coef, lead_exp)) = shape.lead() else {
        return 0.0;
    };
    if beta == 0.0 {
        match shape {
            ShapeRef::Const(v) => return v.powf(k) * power_integral(gamma * k, a, b),
            ShapeRef::Terms(t) => {
                let merged = merge_terms(t);
                let nonzero: Vec<_> = merged.iter().filter(|t| t.coef != 0.0).collect();
                if nonzero.len() == 1 && nonzero[0].coef > 0.0 {
                    return nonzero[0].coef.powf(k) * power_integral((gamma + nonzero[0].exp) * k, a, b);
                }
            }
            ShapeRef::Func(_) => {}
        }
    }
    let g = |s: f64| (s.powf(gamma) * log_weight(omega, s).powf(beta) * shape.eval(s)).powf(k);
    if a <= 0.0 {
        if lead_coef <= 0.0 {
            return integrate_from_zero(g, b, TailHint::power(0.0));
        }
        integrate_from_zero(g, b, TailHint::power_log((gamma + lead_exp) * k, beta * k, omega))
    } else {
        integrate(g, a, b)
    }
}

/// `lim_{t→0⁺} t^γ L(t)^β shape(t)`.
fn limit_at_zero(shape: ShapeRef<'_>, gamma: f64, beta: f64) -> f64 {
    let Some((c, e)) = shape.lead() else {
        return 0.0;
    };
    if c <= 0.0 {
        return 0.0;
    }
    let e0 = gamma + e;
    if e0 < -EXP_EPS {
        f64::INFINITY
    } else if e0 > EXP_EPS {
        0.0
    } else if beta > 0.0 {
        f64::INFINITY
    } else if beta < 0.0 {
        0.0
    } else {
        c
    }
}

/// `sup_{t ∈ [a, b]} t^γ L(t)^β`, with the `t → 0⁺` limit when `a = 0`.
pub(crate) fn weight_sup(a: f64, b: f64, gamma: f64, beta: f64, omega: f64) -> f64 {
    let w = |t: f64| t.powf(gamma) * log_weight(omega, t).powf(beta);
    let mut best = w(b);
    let at_a = if a > 0.0 { w(a) } else { limit_at_zero(ShapeRef::Const(1.0), gamma, beta) };
    best = best.max(at_a);
    if gamma != 0.0 && beta != 0.0 {
        // d/dt ln w = (γL − β)/(tL) vanishes at L = β/γ
        let t_star = omega * (1.0 - beta / gamma).exp();
        if t_star > a && t_star < b {
            best = best.max(w(t_star));
        }
    }
    best
}

/// `μ_u(t) = |{x : |u(x)| > t}|`.
pub fn distribution_function(u: &GridFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain(format!("distribution function needs t ≥ 0, got {t}")));
    }
    Ok(exact_sum(u.cells.iter().filter(|c| c.value.abs() > t).map(|c| c.measure)))
}

/// Sorts cells by `|value|` descending and stacks their measures; cells with
/// equal `|value|` merge into one step.
pub fn decreasing_rearrangement(u: &GridFunction) -> RearrangementProfile {
    let mut pairs: Vec<(f64, f64)> = u.cells.iter().map(|c| (c.value.abs(), c.measure)).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut ends = Vec::new();
    let mut values = Vec::new();
    let mut acc = ExactSum::new();
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            acc.add(pairs[i].1);
            i += 1;
        }
        ends.push(acc.value());
        values.push(v);
    }
    if let Some(last) = ends.last_mut() {
        *last = u.total_measure;
    }
    RearrangementProfile { repr: Repr::Step { ends, values }, total_measure: u.total_measure }
}

/// The increasing rearrangement `u_*(s) = u*(|Ω| − s)`, taken left-continuous
/// in the argument of `u*` so that `u_*` is right-continuous.
#[derive(Debug, Clone)]
pub struct IncreasingProfile {
    source: RearrangementProfile,
}

impl IncreasingProfile {
    pub fn eval(&self, s: f64) -> f64 {
        let omega = self.source.total_measure;
        if !(0.0..=omega).contains(&s) {
            return 0.0;
        }
        if let (Some(ends), Some(values)) = (self.source.breakpoints(), self.source.values()) {
            // step i occupies [Ω − ends[i], Ω − ends[i-1]); compare in reflected
            // coordinates so that breakpoints round the same way as `steps`
            let i = ends.partition_point(|&e| omega - e > s);
            return values.get(i.min(values.len() - 1)).copied().unwrap_or(0.0);
        }
        self.source.eval_left(omega - s)
    }

    pub fn total_measure(&self) -> f64 {
        self.source.total_measure
    }

    pub fn source(&self) -> &RearrangementProfile {
        &self.source
    }

    /// `(start, end, value)` steps in increasing order of `s`, for step
    /// sources.
    pub fn steps(&self) -> Option<Vec<(f64, f64, f64)>> {
        let ends = self.source.breakpoints()?;
        let values = self.source.values()?;
        let omega = self.source.total_measure;
        let mut out = Vec::with_capacity(ends.len());
        for i in (0..ends.len()).rev() {
            let start = if i == 0 { 0.0 } else { ends[i - 1] };
            out.push((omega - ends[i], omega - start, values[i]));
        }
        Some(out)
    }
}

pub fn increasing_rearrangement(p: &RearrangementProfile) -> IncreasingProfile {
    IncreasingProfile { source: p.clone() }
}

/// `f**(s) = (1/s) ∫_0^s f*(t) dt`.
pub fn maximal_average(p: &RearrangementProfile, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain(format!("maximal average needs s > 0, got {s}")));
    }
    Ok(p.integral(0.0, s) / s)
}

/// `sup{t : |{u ≥ t}| ≥ |Ω|/2}`.
pub fn median(u: &GridFunction) -> f64 {
    let mut pairs: Vec<(f64, f64)> = u.cells.iter().map(|c| (c.value, c.measure)).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let half = 0.5 * u.total_measure;
    let mut acc = ExactSum::new();
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            acc.add(pairs[i].1);
            i += 1;
        }
        if acc.value() >= half {
            return v;
        }
    }
    // only reachable through rounding in a declared total
    pairs.last().map_or(0.0, |p| p.0)
}

/// `(u₊, u₋)` with `u₊ = (|u| + u)/2`, `u₋ = (|u| − u)/2`.
pub fn positive_negative_parts(u: &GridFunction) -> (GridFunction, GridFunction) {
    let plus = u.map(|v| v.max(0.0)).expect("cell structure unchanged");
    let minus = u.map(|v| (-v).max(0.0)).expect("cell structure unchanged");
    (plus.with_label(format!("{}+", u.label)), minus.with_label(format!("{}-", u.label)))
}

/// `∫_0^{|Ω|} a(s)·b(s) ds` for two step functions given as
/// `(start, end, value)` lists covering `[0, |Ω|]`.
fn step_product_integral(a: &[(f64, f64, f64)], b: &[(f64, f64, f64)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut acc = ExactSum::new();
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            acc.add((hi - lo) * a[i].2 * b[j].2);
        }
        if a[i].1 <= b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    acc.value()
}

fn decreasing_steps(p: &RearrangementProfile) -> Option<Vec<(f64, f64, f64)>> {
    let ends = p.breakpoints()?;
    let values = p.values()?;
    Some(
        ends.iter()
            .zip(values)
            .enumerate()
            .map(|(i, (&e, &v))| (if i == 0 { 0.0 } else { ends[i - 1] }, e, v))
            .collect(),
    )
}

/// The three terms `(∫u*v_*, ∫|uv|, ∫u*v*)` of the Hardy–Littlewood
/// inequality for two functions on the same cell structure.
pub fn hardy_littlewood_terms(u: &GridFunction, v: &GridFunction) -> Result<(f64, f64, f64)> {
    let uv = u.zip_with(v, |a, b| a * b)?;
    let middle = uv.abs_power_integral(1.0);
    let us = decreasing_rearrangement(u);
    let vs = decreasing_rearrangement(v);
    let us_steps = decreasing_steps(&us).expect("step profile");
    let vs_steps = decreasing_steps(&vs).expect("step profile");
    let v_inc = increasing_rearrangement(&vs).steps().expect("step profile");
    Ok((step_product_integral(&us_steps, &v_inc), middle, step_product_integral(&us_steps, &vs_steps)))
}
