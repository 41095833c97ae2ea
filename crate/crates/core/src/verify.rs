//! Grid and seeded randomized verifiers for the algebraic laws of a
//! two-place function.
//!
//! Equality laws (symmetry, bisymmetry, associativity) and the strict-mean
//! inequality are first probed on `cfg.samples` random tuples. When a probe
//! fails, the check escalates to a deterministic 21-point-per-axis grid and
//! reports the lexicographically least tuple of maximal violation (up to
//! rounding), so
//! witnesses are stable across seeds. The remaining checks are grid-only.
//!
//! For strictness-type properties (strict increase, strict mean,
//! cancellativity) a probe fails when the relevant gap is at most the strict
//! threshold, and `max_violation` is the largest shortfall
//! `threshold − gap` seen.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::TwoPlaceFunction;
use crate::sampling::{draw, sample_stream};
use crate::tolerance::ToleranceConfig;

/// Points per axis of the escalation grid.
pub const ESCALATION_GRID: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Reflexive,
    Symmetric,
    Bisymmetric,
    Associative,
    PartialStrictIncrease,
    StrictMean,
    Cancellative,
    NeutralElement,
    /// Strict increase of an extracted generator table.
    GeneratorMonotone,
}

impl Property {
    pub fn name(&self) -> &'static str {
        match self {
            Property::Reflexive => "reflexive",
            Property::Symmetric => "symmetric",
            Property::Bisymmetric => "bisymmetric",
            Property::Associative => "associative",
            Property::PartialStrictIncrease => "partial_strict_increase",
            Property::StrictMean => "strict_mean",
            Property::Cancellative => "cancellative",
            Property::NeutralElement => "neutral_element",
            Property::GeneratorMonotone => "generator_monotone",
        }
    }
}

/// Inputs at which a law fails, with both evaluated sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Witness {
    fn new(inputs: Vec<f64>, lhs: f64, rhs: f64) -> Self {
        Witness { inputs, lhs, rhs, note: None }
    }

    fn noted(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub max_violation: f64,
    pub samples_used: usize,
    pub config: ToleranceConfig,
}

struct Probe {
    lhs: f64,
    rhs: f64,
    violation: f64,
    failing: bool,
}

impl Probe {
    fn equality(lhs: f64, rhs: f64, cfg: &ToleranceConfig) -> Self {
        let violation = (lhs - rhs).abs();
        Probe { lhs, rhs, violation, failing: violation > cfg.eq_tol }
    }

    /// Fails when `gap ≤ threshold`.
    fn strict(lhs: f64, rhs: f64, gap: f64, cfg: &ToleranceConfig) -> Self {
        let threshold = cfg.strict_threshold();
        let failing = gap <= threshold;
        Probe { lhs, rhs, violation: if failing { threshold - gap } else { 0.0 }, failing }
    }
}

/// `a > b` beyond rounding, so that grid points whose violations agree up
/// to a few ulps count as tied and the earliest one is kept.
fn exceeds(a: f64, b: f64) -> bool {
    a - b > 8.0 * f64::EPSILON * a.abs().max(b.abs())
}

/// Random tuples first; on failure, a full `ESCALATION_GRID^K` scan picks the
/// canonical witness.
fn randomized<const K: usize>(
    f: &TwoPlaceFunction,
    cfg: &ToleranceConfig,
    property: Property,
    probe: impl Fn([f64; K]) -> Result<Option<Probe>>,
) -> Result<PropertyReport> {
    cfg.validate()?;
    let domain = f.domain();
    let mut rng = sample_stream(cfg.seed, f.label(), property.name());
    let mut max_violation = 0.0f64;
    let mut worst: Option<([f64; K], Probe)> = None;
    for _ in 0..cfg.samples {
        let point: [f64; K] = std::array::from_fn(|_| draw(&mut rng, &domain));
        let Some(p) = probe(point)? else { continue };
        max_violation = max_violation.max(p.violation);
        if p.failing && worst.as_ref().is_none_or(|(_, w)| p.violation > w.violation) {
            worst = Some((point, p));
        }
    }
    let mut samples_used = cfg.samples;
    let Some(random_worst) = worst else {
        return Ok(PropertyReport { property, passed: true, witness: None, max_violation, samples_used, config: *cfg });
    };

    let grid = domain.grid(ESCALATION_GRID)?;
    let mut best: Option<([f64; K], Probe)> = None;
    let mut idx = [0usize; K];
    'grid: loop {
        let point: [f64; K] = std::array::from_fn(|i| grid[idx[i]]);
        samples_used += 1;
        if let Some(p) = probe(point)? {
            max_violation = max_violation.max(p.violation);
            if p.failing && best.as_ref().is_none_or(|(_, b)| exceeds(p.violation, b.violation)) {
                best = Some((point, p));
            }
        }
        // lexicographic odometer, last coordinate fastest
        for k in (0..K).rev() {
            idx[k] += 1;
            if idx[k] < grid.len() {
                continue 'grid;
            }
            idx[k] = 0;
        }
        break;
    }
    let (point, p) = best.unwrap_or(random_worst);
    Ok(PropertyReport {
        property,
        passed: false,
        witness: Some(Witness::new(point.to_vec(), p.lhs, p.rhs)),
        max_violation,
        samples_used,
        config: *cfg,
    })
}

/// `F(x, x) = x` on the `grid_n` grid.
pub fn check_reflexive(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    cfg.validate()?;
    let grid = f.domain().grid(cfg.grid_n)?;
    let mut max_violation = 0.0f64;
    let mut worst = None;
    for &x in &grid {
        let fx = f.eval(x, x)?;
        let v = (fx - x).abs();
        if v > max_violation {
            max_violation = v;
            worst = Some(Witness::new(vec![x], fx, x));
        }
    }
    let passed = max_violation <= cfg.eq_tol;
    Ok(PropertyReport {
        property: Property::Reflexive,
        passed,
        witness: if passed { None } else { worst },
        max_violation,
        samples_used: grid.len(),
        config: *cfg,
    })
}

/// `F(x, y) = F(y, x)` on random pairs.
pub fn check_symmetric(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    randomized(f, cfg, Property::Symmetric, |[x, y]| {
        Ok(Some(Probe::equality(f.eval(x, y)?, f.eval(y, x)?, cfg)))
    })
}

/// `F(F(x,y), F(u,v)) = F(F(x,u), F(y,v))` on random quadruples.
pub fn check_bisymmetric(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    randomized(f, cfg, Property::Bisymmetric, |[x, y, u, v]| {
        let lhs = f.eval(f.eval(x, y)?, f.eval(u, v)?)?;
        let rhs = f.eval(f.eval(x, u)?, f.eval(y, v)?)?;
        Ok(Some(Probe::equality(lhs, rhs, cfg)))
    })
}

/// `F(F(x,y), z) = F(x, F(y,z))` on random triples.
pub fn check_associative(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    randomized(f, cfg, Property::Associative, |[x, y, z]| {
        let lhs = f.eval(f.eval(x, y)?, z)?;
        let rhs = f.eval(x, f.eval(y, z)?)?;
        Ok(Some(Probe::equality(lhs, rhs, cfg)))
    })
}

/// `min{x,y} < F(x,y) < max{x,y}` for `x ≠ y`, by more than the strict
/// threshold. The witness' `rhs` is the bound that was not cleared.
pub fn check_strict_mean(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    randomized(f, cfg, Property::StrictMean, |[x, y]| {
        if x == y {
            return Ok(None);
        }
        let v = f.eval(x, y)?;
        let (lo, hi) = (x.min(y), x.max(y));
        let (gap, bound) = if v - lo <= hi - v { (v - lo, lo) } else { (hi - v, hi) };
        Ok(Some(Probe::strict(v, bound, gap, cfg)))
    })
}

/// Every section `x ↦ F(x, y0)` and `y ↦ F(x0, y)` on the grid increases
/// by more than the strict threshold between consecutive points.
///
/// The witness is the first offending pair in scan order (x-sections for
/// ascending `y0`, then y-sections for ascending `x0`), as
/// `[x_a, y_a, x_b, y_b]` with `lhs = F(a)`, `rhs = F(b)`.
pub fn check_partial_strict_increase(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    cfg.validate()?;
    let grid = f.domain().grid(cfg.grid_n)?;
    let n = grid.len();
    let threshold = cfg.strict_threshold();
    let mut max_violation = 0.0f64;
    let mut first: Option<Witness> = None;
    let mut pairs = 0;
    for (first_slot, note) in [(true, "section x ↦ F(x, y0)"), (false, "section y ↦ F(x0, y)")] {
        for &fixed in &grid {
            let point = |i: usize| if first_slot { (grid[i], fixed) } else { (fixed, grid[i]) };
            let mut prev = {
                let (x, y) = point(0);
                f.eval(x, y)?
            };
            for i in 1..n {
                let (x, y) = point(i);
                let cur = f.eval(x, y)?;
                pairs += 1;
                let rise = cur - prev;
                if rise <= threshold {
                    max_violation = max_violation.max(threshold - rise);
                    if first.is_none() {
                        let (xa, ya) = point(i - 1);
                        first = Some(Witness::new(vec![xa, ya, x, y], prev, cur).noted(note));
                    }
                }
                prev = cur;
            }
        }
    }
    Ok(PropertyReport {
        property: Property::PartialStrictIncrease,
        passed: first.is_none(),
        witness: first,
        max_violation,
        samples_used: pairs,
        config: *cfg,
    })
}

/// Searches grid triples `(x, y, a)` with `x < y` for `F(x,a) = F(y,a)` or
/// `F(a,x) = F(a,y)` within `eq_tol`. The witness is the first hit, as the
/// two evaluation points `[x1, y1, x2, y2]`.
pub fn check_cancellative(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    cfg.validate()?;
    let grid = f.domain().grid(cfg.grid_n)?;
    let n = grid.len();
    // table[i][k] = F(grid[i], grid[k])
    let mut table = vec![vec![0.0; n]; n];
    for (i, &x) in grid.iter().enumerate() {
        for (k, &y) in grid.iter().enumerate() {
            table[i][k] = f.eval(x, y)?;
        }
    }
    let mut max_violation = 0.0f64;
    let mut first: Option<Witness> = None;
    let mut triples = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                triples += 1;
                let slots = [
                    (table[i][k], table[j][k], [grid[i], grid[k], grid[j], grid[k]], "first slot"),
                    (table[k][i], table[k][j], [grid[k], grid[i], grid[k], grid[j]], "second slot"),
                ];
                for (lhs, rhs, inputs, note) in slots {
                    let diff = (lhs - rhs).abs();
                    if diff <= cfg.eq_tol {
                        max_violation = max_violation.max(cfg.eq_tol - diff);
                        if first.is_none() {
                            first = Some(Witness::new(inputs.to_vec(), lhs, rhs).noted(note));
                        }
                    }
                }
            }
        }
    }
    Ok(PropertyReport {
        property: Property::Cancellative,
        passed: first.is_none(),
        witness: first,
        max_violation,
        samples_used: triples,
        config: *cfg,
    })
}

/// Result of [`find_neutral_element`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeutralSearch {
    pub element: Option<f64>,
    pub report: PropertyReport,
}

const NEUTRAL_REFINE_STEPS: usize = 100;

/// Locates `e` with `F(x, e) = F(e, x) = x` for all grid `x`.
///
/// Grid candidates are ranked by the residual
/// `max_x max(|F(x,e) − x|, |F(e,x) − x|)`; the best one is refined by
/// ternary shrinking over its neighbouring cells. `e` is returned iff the
/// best residual seen is at most `eq_tol`.
pub fn find_neutral_element(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<NeutralSearch> {
    cfg.validate()?;
    let domain = f.domain();
    let grid = domain.grid(cfg.grid_n)?;
    let mut evaluations = 0usize;
    let mut residual = |e: f64| -> Result<(f64, Witness)> {
        let mut worst = (-1.0, Witness::new(vec![e, grid[0]], 0.0, 0.0));
        for &x in &grid {
            let (right, left) = (f.eval(x, e)?, f.eval(e, x)?);
            evaluations += 2;
            for side in [right, left] {
                let r = (side - x).abs();
                if r > worst.0 {
                    worst = (r, Witness::new(vec![e, x], side, x));
                }
            }
        }
        Ok(worst)
    };

    let mut best: Option<(f64, f64, Witness)> = None;
    for &e in &grid {
        let (r, w) = residual(e)?;
        if best.as_ref().is_none_or(|b| r < b.1) {
            best = Some((e, r, w));
        }
    }
    let (mut best_e, mut best_r, mut best_w) = best.expect("grid is non-empty");
    if best_r > cfg.eq_tol {
        let step = domain.width() / (grid.len() - 1) as f64;
        let (mut lo, mut hi) = (domain.clamp(best_e - step), domain.clamp(best_e + step));
        for _ in 0..NEUTRAL_REFINE_STEPS {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let (r1, w1) = residual(m1)?;
            let (r2, w2) = residual(m2)?;
            for (m, r, w) in [(m1, r1, w1), (m2, r2, w2)] {
                if r < best_r {
                    (best_e, best_r, best_w) = (m, r, w);
                }
            }
            if r1 <= r2 {
                hi = m2;
            } else {
                lo = m1;
            }
            if best_r <= cfg.eq_tol {
                break;
            }
        }
    }
    let passed = best_r <= cfg.eq_tol;
    Ok(NeutralSearch {
        element: passed.then_some(best_e),
        report: PropertyReport {
            property: Property::NeutralElement,
            passed,
            witness: if passed { None } else { Some(best_w) },
            max_violation: best_r,
            samples_used: evaluations,
            config: *cfg,
        },
    })
}

/// Dispatches to the check for `property`. Neutral-element search reports
/// only its [`PropertyReport`]; [`Property::GeneratorMonotone`] needs a
/// table and is rejected here.
pub fn run_check(f: &TwoPlaceFunction, property: Property, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    match property {
        Property::Reflexive => check_reflexive(f, cfg),
        Property::Symmetric => check_symmetric(f, cfg),
        Property::Bisymmetric => check_bisymmetric(f, cfg),
        Property::Associative => check_associative(f, cfg),
        Property::PartialStrictIncrease => check_partial_strict_increase(f, cfg),
        Property::StrictMean => check_strict_mean(f, cfg),
        Property::Cancellative => check_cancellative(f, cfg),
        Property::NeutralElement => find_neutral_element(f, cfg).map(|s| s.report),
        Property::GeneratorMonotone => Err(Error::InvalidArgument(
            "generator monotonicity is checked on an extracted table".into(),
        )),
    }
}

/// Re-evaluates a failed report's witness and tells whether the violation
/// is reproduced. Passing reports have nothing to reproduce and yield `false`.
pub fn recheck_witness(f: &TwoPlaceFunction, report: &PropertyReport) -> Result<bool> {
    let Some(w) = &report.witness else { return Ok(false) };
    let cfg = &report.config;
    let arity_error = || Error::InvalidArgument(format!("malformed {} witness", report.property.name()));
    let at = |i: usize| w.inputs.get(i).copied().ok_or_else(arity_error);
    Ok(match report.property {
        Property::Reflexive => {
            let x = at(0)?;
            (f.eval(x, x)? - x).abs() > cfg.eq_tol
        }
        Property::Symmetric => {
            let (x, y) = (at(0)?, at(1)?);
            (f.eval(x, y)? - f.eval(y, x)?).abs() > cfg.eq_tol
        }
        Property::Bisymmetric => {
            let (x, y, u, v) = (at(0)?, at(1)?, at(2)?, at(3)?);
            let lhs = f.eval(f.eval(x, y)?, f.eval(u, v)?)?;
            let rhs = f.eval(f.eval(x, u)?, f.eval(y, v)?)?;
            (lhs - rhs).abs() > cfg.eq_tol
        }
        Property::Associative => {
            let (x, y, z) = (at(0)?, at(1)?, at(2)?);
            (f.eval(f.eval(x, y)?, z)? - f.eval(x, f.eval(y, z)?)?).abs() > cfg.eq_tol
        }
        Property::StrictMean => {
            let (x, y) = (at(0)?, at(1)?);
            let v = f.eval(x, y)?;
            x != y && (v - x.min(y)).min(x.max(y) - v) <= cfg.strict_threshold()
        }
        Property::PartialStrictIncrease => {
            let (a, b) = (f.eval(at(0)?, at(1)?)?, f.eval(at(2)?, at(3)?)?);
            b - a <= cfg.strict_threshold()
        }
        Property::Cancellative => {
            let (p, q) = ((at(0)?, at(1)?), (at(2)?, at(3)?));
            p != q && (f.eval(p.0, p.1)? - f.eval(q.0, q.1)?).abs() <= cfg.eq_tol
        }
        Property::NeutralElement => {
            let (e, x) = (at(0)?, at(1)?);
            (f.eval(x, e)? - x).abs().max((f.eval(e, x)? - x).abs()) > cfg.eq_tol
        }
        Property::GeneratorMonotone => w.rhs - w.lhs <= cfg.strict_threshold(),
    })
}

/// Which step of the impossibility argument a [`Refutation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefutationKind {
    /// An evaluation left the codomain.
    ClosureViolated,
    /// `F(x, x) ≠ x` at one of `a`, `b`, `F(a, b)`.
    ReflexivityViolated,
    /// `F(a, b)` is not strictly between `a` and `b`.
    StrictMeanViolated,
    /// `F(a, F(a,b)) = F(a, b)` although `F(a,b) < b`: the section
    /// `y ↦ F(a, y)` is not strictly increasing.
    StrictnessViolated,
    /// `F(F(a,a), b) ≠ F(a, F(a,b))`.
    AssociativityViolated,
}

/// Structured proof that `F` is not simultaneously reflexive, associative
/// and partially strictly increasing, found at the pair `(a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refutation {
    pub kind: RefutationKind,
    pub a: f64,
    pub b: f64,
    pub inputs: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub message: String,
    pub eq_tol: f64,
}

/// Agreement required when re-evaluating a refutation.
pub const REPRODUCTION_TOL: f64 = 1e-12;

impl Refutation {
    /// Re-evaluates the recorded quantities and confirms both that they are
    /// reproduced to [`REPRODUCTION_TOL`] and that the stated failure holds.
    pub fn reproduce(&self, f: &TwoPlaceFunction) -> Result<bool> {
        let close = |a: f64, b: f64| (a - b).abs() <= REPRODUCTION_TOL;
        let tol = self.eq_tol;
        Ok(match self.kind {
            RefutationKind::ClosureViolated => {
                matches!(f.eval(self.inputs[0], self.inputs[1]), Err(Error::Closure { .. }))
            }
            RefutationKind::ReflexivityViolated => {
                let x = self.inputs[0];
                let v = f.eval(x, x)?;
                close(v, self.lhs) && (v - x).abs() > tol
            }
            RefutationKind::StrictMeanViolated => {
                let m = f.eval(self.a, self.b)?;
                close(m, self.lhs) && !(self.a + tol < m && m < self.b - tol)
            }
            RefutationKind::StrictnessViolated => {
                let m = f.eval(self.a, self.b)?;
                let am = f.eval(self.a, m)?;
                close(am, self.lhs) && close(m, self.rhs) && (am - m).abs() <= tol && m < self.b
            }
            RefutationKind::AssociativityViolated => {
                let (a, b) = (self.a, self.b);
                let lhs = f.eval(f.eval(a, a)?, b)?;
                let rhs = f.eval(a, f.eval(a, b)?)?;
                close(lhs, self.lhs) && close(rhs, self.rhs) && (lhs - rhs).abs() > tol
            }
        })
    }
}

/// Refutes "reflexive + associative + partially strictly increasing" at
/// `(a, b)`, following `F(a, F(a,b)) = F(F(a,a), b) = F(a,b)`.
///
/// Checks run in the order closure, reflexivity (at `a`, `b`, `F(a,b)`),
/// strict mean, strictness; when all of them hold, the identity above can
/// only fail through associativity, which is then reported.
pub fn prop1_witness(f: &TwoPlaceFunction, a: f64, b: f64, cfg: &ToleranceConfig) -> Result<Refutation> {
    cfg.validate()?;
    let domain = f.domain();
    if !(a < b) || !domain.contains(a) || !domain.contains(b) {
        return Err(Error::InvalidArgument(format!("need a < b inside {domain}, got a={a}, b={b}")));
    }
    let tol = cfg.eq_tol;
    let refute = |kind, inputs: Vec<f64>, lhs, rhs, message: String| Refutation {
        kind,
        a,
        b,
        inputs,
        lhs,
        rhs,
        message,
        eq_tol: tol,
    };
    let closure = |err: Error| match err {
        Error::Closure { x, y, value, ref codomain, .. } => Ok(refute(
            RefutationKind::ClosureViolated,
            vec![x, y],
            value,
            codomain.clamp(value),
            format!("closure violated: F({x}, {y}) = {value} leaves {codomain}"),
        )),
        other => Err(other),
    };
    let m = match f.eval(a, b) {
        Ok(m) => m,
        Err(err) => return closure(err),
    };
    for x in [a, b, m] {
        let v = match f.eval(x, x) {
            Ok(v) => v,
            Err(err) => return closure(err),
        };
        if (v - x).abs() > tol {
            return Ok(refute(
                RefutationKind::ReflexivityViolated,
                vec![x],
                v,
                x,
                format!("reflexivity violated: F({x}, {x}) = {v} ≠ {x}"),
            ));
        }
    }
    if !(a + tol < m && m < b - tol) {
        let bound = if (m - a).abs() <= (b - m).abs() { a } else { b };
        return Ok(refute(
            RefutationKind::StrictMeanViolated,
            vec![a, b],
            m,
            bound,
            format!("strict mean violated at ({a}, {b}): F = {m} is not strictly between"),
        ));
    }
    let am = match f.eval(a, m) {
        Ok(v) => v,
        Err(err) => return closure(err),
    };
    if (am - m).abs() <= tol {
        return Ok(refute(
            RefutationKind::StrictnessViolated,
            vec![a, m, b],
            am,
            m,
            format!("strictness violated at ({a}, {m}) vs ({a}, {b}): both sections take the value {m}"),
        ));
    }
    let aa = match f.eval(a, a) {
        Ok(v) => v,
        Err(err) => return closure(err),
    };
    let lhs = match f.eval(aa, b) {
        Ok(v) => v,
        Err(err) => return closure(err),
    };
    Ok(refute(
        RefutationKind::AssociativityViolated,
        vec![a, a, b],
        lhs,
        am,
        format!("associativity violated: F(F({a}, {a}), {b}) = {lhs} but F({a}, F({a}, {b})) = {am}"),
    ))
}

/// The curve `g_a(z) = F(F(a,z), F(z,a))` on the grid, with a jump heuristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aczel3Profile {
    pub a: f64,
    pub z: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest `|g_a(z_{i+1}) − g_a(z_i)|`.
    pub max_jump: f64,
    /// `(z_i, z_{i+1})` where `max_jump` occurs.
    pub jump_between: (f64, f64),
    /// Whether `g_a` agrees with the section `z ↦ F(a, z)` within `eq_tol`.
    pub matches_section: bool,
    pub section_max_diff: f64,
}

/// Tabulates `g_a` on the `grid_n` grid. Evidence only; no verdict.
pub fn aczel3_profile(f: &TwoPlaceFunction, a: f64, cfg: &ToleranceConfig) -> Result<Aczel3Profile> {
    cfg.validate()?;
    if !f.domain().contains(a) {
        return Err(Error::InvalidArgument(format!("a = {a} outside {}", f.domain())));
    }
    let z = f.domain().grid(cfg.grid_n)?;
    let mut values = Vec::with_capacity(z.len());
    let mut section_max_diff = 0.0f64;
    for &zi in &z {
        let az = f.eval(a, zi)?;
        let g = f.eval(az, f.eval(zi, a)?)?;
        section_max_diff = section_max_diff.max((g - az).abs());
        values.push(g);
    }
    let (mut max_jump, mut jump_between) = (0.0f64, (z[0], z[1]));
    for i in 1..z.len() {
        let jump = (values[i] - values[i - 1]).abs();
        if jump > max_jump {
            max_jump = jump;
            jump_between = (z[i - 1], z[i]);
        }
    }
    Ok(Aczel3Profile {
        a,
        z,
        values,
        max_jump,
        jump_between,
        matches_section: section_max_diff <= cfg.eq_tol,
        section_max_diff,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use approx::assert_relative_eq;

    use super::*;
    use crate::interval::Interval;
    use crate::means::catalog_get;

    fn cat(name: &str) -> TwoPlaceFunction {
        catalog_get(name, Interval::unit(), &BTreeMap::new()).unwrap()
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default().with_samples(2_000).with_grid(21)
    }

    #[test]
    fn arithmetic_mean_has_the_mean_laws() {
        let f = cat("arithmetic");
        for p in [
            Property::Reflexive,
            Property::Symmetric,
            Property::Bisymmetric,
            Property::PartialStrictIncrease,
            Property::StrictMean,
            Property::Cancellative,
        ] {
            let r = run_check(&f, p, &cfg()).unwrap();
            assert!(r.passed, "{p:?}: {r:?}");
            assert!(r.witness.is_none());
        }
    }

    #[test]
    fn arithmetic_associativity_witness_is_canonical() {
        // |F(F(x,y),z) − F(x,F(y,z))| = |x − z| / 4, maximal at x=0, z=1
        let r = check_associative(&cat("arithmetic"), &cfg()).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!(w.inputs, vec![0.0, 0.0, 1.0]);
        assert_relative_eq!(r.max_violation, 0.25, epsilon = 1e-15);
        assert_relative_eq!(w.lhs, 0.5, epsilon = 1e-15);
        assert_relative_eq!(w.rhs, 0.25, epsilon = 1e-15);
        assert_eq!(r.samples_used, 2_000 + 21usize.pow(3));
    }

    #[test]
    fn max_is_not_a_strict_mean() {
        let f = cat("max");
        let r = check_strict_mean(&f, &cfg()).unwrap();
        assert!(!r.passed);
        // every off-diagonal point violates by zero; the first one wins
        assert_eq!(r.witness.as_ref().unwrap().inputs, vec![0.0, 0.05]);
        assert!(recheck_witness(&f, &r).unwrap());
        assert!(check_associative(&f, &cfg()).unwrap().passed);
    }

    #[test]
    fn projection_is_neither_symmetric_nor_strictly_increasing() {
        let f = cat("projection_x");
        let sym = check_symmetric(&f, &cfg()).unwrap();
        assert!(!sym.passed);
        assert!(recheck_witness(&f, &sym).unwrap());
        let psi = check_partial_strict_increase(&f, &cfg()).unwrap();
        assert!(!psi.passed);
        let w = psi.witness.unwrap();
        // x-sections increase; the first flat pair is in the y-section at x0 = 0
        assert_eq!(w.inputs, vec![0.0, 0.0, 0.0, 0.05]);
        assert!(!check_cancellative(&f, &cfg()).unwrap().passed);
    }

    #[test]
    fn neutral_elements_of_lattice_operations() {
        let max = find_neutral_element(&cat("max"), &cfg()).unwrap();
        assert_eq!(max.element, Some(0.0));
        let min = find_neutral_element(&cat("min"), &cfg()).unwrap();
        assert_eq!(min.element, Some(1.0));
        let none = find_neutral_element(&cat("arithmetic"), &cfg()).unwrap();
        assert_eq!(none.element, None);
        assert!(!none.report.passed);
        assert!(recheck_witness(&cat("arithmetic"), &none.report).unwrap());
    }

    #[test]
    fn neutral_element_off_grid_is_refined() {
        let e = 0.3141;
        let f = TwoPlaceFunction::new(Interval::unit(), "shifted", crate::Provenance::Expression, move |x, y| {
            if x.max(y) <= e {
                x.min(y)
            } else if x.min(y) >= e {
                x.max(y)
            } else {
                x + y - e
            }
        });
        let found = find_neutral_element(&f, &cfg().with_eq_tol(1e-6)).unwrap();
        assert!((found.element.unwrap() - e).abs() < 1e-6);
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let f = cat("projection_x");
        let a = check_symmetric(&f, &cfg().with_seed(5)).unwrap();
        let b = check_symmetric(&f, &cfg().with_seed(5)).unwrap();
        assert_eq!(a, b);
        // the escalated witness does not depend on the seed
        let c = check_symmetric(&f, &cfg().with_seed(6)).unwrap();
        assert_eq!(a.witness, c.witness);
    }

    #[test]
    fn generator_monotone_needs_a_table() {
        assert!(run_check(&cat("min"), Property::GeneratorMonotone, &cfg()).is_err());
    }

    #[test]
    fn prop1_on_arithmetic_breaks_associativity() {
        let f = cat("arithmetic");
        let r = prop1_witness(&f, 0.2, 0.8, &cfg()).unwrap();
        assert_eq!(r.kind, RefutationKind::AssociativityViolated);
        assert_relative_eq!(r.lhs, 0.5, epsilon = 1e-15);
        assert_relative_eq!(r.rhs, 0.35, epsilon = 1e-15);
        assert!(r.reproduce(&f).unwrap());
    }

    #[test]
    fn prop1_on_max_breaks_strict_mean() {
        let f = cat("max");
        let r = prop1_witness(&f, 0.2, 0.8, &cfg()).unwrap();
        assert_eq!(r.kind, RefutationKind::StrictMeanViolated);
        assert_eq!((r.lhs, r.rhs), (0.8, 0.8));
        assert!(r.reproduce(&f).unwrap());
    }

    #[test]
    fn prop1_rejects_bad_pairs() {
        assert!(prop1_witness(&cat("max"), 0.8, 0.2, &cfg()).is_err());
        assert!(prop1_witness(&cat("max"), 0.2, 1.5, &cfg()).is_err());
    }

    #[test]
    fn aczel3_profile_of_arithmetic_is_its_section() {
        let p = aczel3_profile(&cat("arithmetic"), 0.2, &cfg()).unwrap();
        assert!(p.matches_section);
        assert_eq!(p.z.len(), 21);
        assert_relative_eq!(p.max_jump, 0.025, epsilon = 1e-12);
    }
}
