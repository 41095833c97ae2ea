//! Recovering the generator of a bisymmetric mean.
//!
//! Starting from `f(0) = a`, `f(1) = b`, the generator is filled in on the
//! dyadic rationals of `[0, 1]` level by level through
//! `f((d1 + d2) / 2) = F(f(d1), f(d2))`. For a reflexive, symmetric,
//! bisymmetric, partially strictly increasing `F` the result does not depend
//! on the decomposition, is strictly increasing, and its image is dense in
//! `[a, b]`; the diagnostics here measure each of those numerically.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicRational, MAX_EXACT_EXP};
use crate::error::{Error, Result};
use crate::function::TwoPlaceFunction;
use crate::interval::Interval;
use crate::means::Generator;
use crate::tolerance::ToleranceConfig;
use crate::verify::{Property, PropertyReport, Witness};

pub const MAX_DEPTH: u32 = 20;
pub const MAX_CROSS_CHECK_DEPTH: u32 = 12;
pub const DEFAULT_JUMP_FACTOR: f64 = 4.0;

/// Values of the generator at every `k / 2^depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorTable {
    interval: Interval,
    depth: u32,
    values: Vec<f64>,
}

impl GeneratorTable {
    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Number of intervals between nodes, `2^depth`.
    pub fn segments(&self) -> usize {
        1 << self.depth
    }

    /// Values in dyadic order; index `k` holds `f(k / 2^depth)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, k: usize) -> DyadicRational {
        DyadicRational::new(k as u64, self.depth).expect("table index within 2^depth")
    }

    pub fn get(&self, d: DyadicRational) -> Option<f64> {
        if d.exp() > self.depth {
            return None;
        }
        self.values.get((d.num() as usize) << (self.depth - d.exp())).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (DyadicRational, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, &v)| (self.node(k), v))
    }

    /// CSV with header `num,exp,t,value`, rows sorted by `t`, numbers in
    /// shortest round-trip decimal form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("num,exp,t,value\n");
        for (d, v) in self.entries() {
            let t = d.to_f64().expect("table depth is at most MAX_DEPTH");
            out.push_str(&format!("{},{},{},{}\n", d.num(), d.exp(), t, v));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::TableFormat(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "num,exp,t,value" => {}
            other => return Err(bad(format!("expected header `num,exp,t,value`, got {other:?}"))),
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let [num, exp, t, value] = cols[..] else {
                return Err(bad(format!("row {}: expected 4 columns", i + 1)));
            };
            let parse_err = |what: &str| bad(format!("row {}: bad {what}", i + 1));
            let d = DyadicRational::new(
                num.parse().map_err(|_| parse_err("num"))?,
                exp.parse().map_err(|_| parse_err("exp"))?,
            )?;
            let t: f64 = t.parse().map_err(|_| parse_err("t"))?;
            let value: f64 = value.parse().map_err(|_| parse_err("value"))?;
            if d.to_f64()? != t {
                return Err(bad(format!("row {}: t = {t} does not match {d}", i + 1)));
            }
            rows.push((d, value));
        }
        let depth = rows.iter().map(|(d, _)| d.exp()).max().unwrap_or(0);
        if depth == 0 || depth > MAX_DEPTH || rows.len() != (1 << depth) + 1 {
            return Err(bad(format!("{} rows do not form a complete dyadic level", rows.len())));
        }
        let mut values = Vec::with_capacity(rows.len());
        for (k, (d, v)) in rows.into_iter().enumerate() {
            if d != DyadicRational::new(k as u64, depth)? {
                return Err(bad(format!("row {} is {d}, expected {k}/2^{depth}", k + 1)));
            }
            values.push(v);
        }
        let interval = Interval::new(values[0], values[values.len() - 1])?;
        Ok(GeneratorTable { interval, depth, values })
    }
}

/// Builds the generator table of `f` at `depth` with exactly
/// `2^depth − 1` evaluations of `f`.
pub fn extract_generator(f: &TwoPlaceFunction, depth: u32) -> Result<GeneratorTable> {
    if !(1..=MAX_DEPTH).contains(&depth) {
        return Err(Error::DepthOutOfRange { depth, min: 1, max: MAX_DEPTH });
    }
    let interval = f.domain();
    let n = 1usize << depth;
    let mut values = vec![f64::NAN; n + 1];
    values[0] = interval.lo();
    values[n] = interval.hi();
    for level in 1..=depth {
        let step = 1usize << (depth - level);
        for k in (step..n).step_by(2 * step) {
            values[k] = f.eval(values[k - step], values[k + step])?;
        }
    }
    Ok(GeneratorTable { interval, depth, values })
}

/// Path-independence of the dyadic recursion at one depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub depth: u32,
    pub max_discrepancy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_target: Option<DyadicRational>,
    pub paths_checked: usize,
    /// `max_discrepancy ≤ eq_tol`.
    pub passed: bool,
}

/// For every target `t = k/2^depth` and every decomposition
/// `t = (d1 + d2) / 2` into nodes of the same level, compares
/// `F(f(d1), f(d2))` with the table value `f(t)`.
pub fn cross_check_consistency(f: &TwoPlaceFunction, depth: u32, cfg: &ToleranceConfig) -> Result<ConsistencyReport> {
    cfg.validate()?;
    if !(1..=MAX_CROSS_CHECK_DEPTH).contains(&depth) {
        return Err(Error::DepthOutOfRange { depth, min: 1, max: MAX_CROSS_CHECK_DEPTH });
    }
    let table = extract_generator(f, depth)?;
    let v = table.values();
    let n = table.segments();
    let mut max_discrepancy = 0.0f64;
    let mut worst = None;
    let mut paths_checked = 0;
    for k in 1..n {
        for j in 1..=k.min(n - k) {
            paths_checked += 1;
            let d = (f.eval(v[k - j], v[k + j])? - v[k]).abs();
            if d > max_discrepancy {
                max_discrepancy = d;
                worst = Some(k);
            }
        }
    }
    Ok(ConsistencyReport {
        depth,
        max_discrepancy,
        worst_target: worst.map(|k| table.node(k)),
        paths_checked,
        passed: max_discrepancy <= cfg.eq_tol,
    })
}

/// Consecutive table values must increase by more than the strict
/// threshold; the first offending pair is the witness, as
/// `inputs = [t_k, t_{k+1}]` with `lhs = f(t_k)`, `rhs = f(t_{k+1})`.
pub fn table_monotone_check(table: &GeneratorTable, cfg: &ToleranceConfig) -> Result<PropertyReport> {
    cfg.validate()?;
    let threshold = cfg.strict_threshold();
    let mut max_violation = 0.0f64;
    let mut first = None;
    for (k, w) in table.values().windows(2).enumerate() {
        let rise = w[1] - w[0];
        if rise <= threshold {
            max_violation = max_violation.max(threshold - rise);
            if first.is_none() {
                let t = |i| table.node(i).to_f64().expect("table depth within exact range");
                first = Some(Witness { inputs: vec![t(k), t(k + 1)], lhs: w[0], rhs: w[1], note: None });
            }
        }
    }
    Ok(PropertyReport {
        property: Property::GeneratorMonotone,
        passed: first.is_none(),
        witness: first,
        max_violation,
        samples_used: table.segments(),
        config: *cfg,
    })
}

/// Largest gap between consecutive table values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub depth: u32,
    pub max_gap: f64,
    pub gap_location: (DyadicRational, DyadicRational),
    pub jump_detected: bool,
    /// `jump_factor · (b − a) · 2^(−depth/2)`.
    pub threshold: f64,
    /// Value left of the largest gap.
    #[serde(rename = "X")]
    pub x: f64,
    /// Value right of the largest gap.
    #[serde(rename = "Y")]
    pub y: f64,
}

/// Reports the largest value gap between adjacent nodes and flags a jump
/// when it exceeds `jump_factor · (b − a) · 2^(−depth/2)`.
///
/// Continuous generators have gaps shrinking like `2^(−depth)` (or a power
/// of it), so they fall below the threshold, whereas a jump of the
/// generator keeps a gap of fixed size at every depth.
pub fn gap_analysis(table: &GeneratorTable, jump_factor: f64) -> Result<GapReport> {
    if !(jump_factor > 0.0 && jump_factor.is_finite()) {
        return Err(Error::InvalidArgument(format!("jump factor must be positive, got {jump_factor}")));
    }
    let v = table.values();
    let mut best = (0usize, f64::NEG_INFINITY);
    for (k, w) in v.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if !(gap > 0.0) {
            return Err(Error::NonMonotoneTable { left: table.node(k), right: table.node(k + 1) });
        }
        if gap > best.1 {
            best = (k, gap);
        }
    }
    let (k, max_gap) = best;
    let threshold = jump_factor * table.interval().width() * 2f64.powf(-f64::from(table.depth()) / 2.0);
    Ok(GapReport {
        depth: table.depth(),
        max_gap,
        gap_location: (table.node(k), table.node(k + 1)),
        jump_detected: max_gap > threshold,
        threshold,
        x: v[k],
        y: v[k + 1],
    })
}

fn require_strictly_increasing(table: &GeneratorTable) -> Result<()> {
    match table.values().windows(2).position(|w| !(w[1] > w[0])) {
        Some(k) => Err(Error::NonMonotoneTable { left: table.node(k), right: table.node(k + 1) }),
        None => Ok(()),
    }
}

/// Piecewise-linear generator through the table nodes, with its exact
/// piecewise-linear inverse.
pub fn interpolate_generator(table: &GeneratorTable) -> Result<Generator> {
    require_strictly_increasing(table)?;
    let values: Arc<[f64]> = table.values().into();
    let inv_values = Arc::clone(&values);
    let n = table.segments();
    let scale = n as f64;
    let forward = move |t: f64| {
        let s = t.clamp(0.0, 1.0) * scale;
        let k = (s.floor() as usize).min(n - 1);
        values[k] + (values[k + 1] - values[k]) * (s - k as f64)
    };
    let inverse = move |x: f64| {
        let k = inv_values.partition_point(|&v| v <= x).clamp(1, n) - 1;
        let frac = ((x - inv_values[k]) / (inv_values[k + 1] - inv_values[k])).clamp(0.0, 1.0);
        (k as f64 + frac) / scale
    };
    Generator::new(format!("pl(depth={})", table.depth()), Interval::unit(), forward, inverse)
}

/// Continues the dyadic recursion below the table on demand.
struct DyadicExtension {
    f: TwoPlaceFunction,
    values: Arc<[f64]>,
    segments: usize,
    extra_levels: u32,
}

/// A bracket `[lt, ht]` of parameters with values `[lv, hv]`.
#[derive(Clone, Copy)]
struct Bracket {
    lt: f64,
    ht: f64,
    lv: f64,
    hv: f64,
}

impl DyadicExtension {
    fn resolved(b: &Bracket) -> bool {
        b.hv - b.lv <= 4.0 * f64::EPSILON * b.lv.abs().max(b.hv.abs())
    }

    fn cell(&self, k: usize) -> Bracket {
        let scale = self.segments as f64;
        Bracket {
            lt: k as f64 / scale,
            ht: (k + 1) as f64 / scale,
            lv: self.values[k],
            hv: self.values[k + 1],
        }
    }

    /// Halves `b` until `go_left(mid_t, mid_v)` has been asked
    /// `extra_levels` times or the bracket is resolved. `None` when `F`
    /// fails to evaluate.
    fn descend(&self, mut b: Bracket, go_left: impl Fn(f64, f64) -> Option<bool>) -> Option<Bracket> {
        for _ in 0..self.extra_levels {
            if Self::resolved(&b) {
                break;
            }
            let mt = 0.5 * (b.lt + b.ht);
            let mv = self.f.eval(b.lv, b.hv).ok()?;
            if !(b.lv < mv && mv < b.hv) {
                break;
            }
            match go_left(mt, mv) {
                Some(true) => (b.ht, b.hv) = (mt, mv),
                Some(false) => (b.lt, b.lv) = (mt, mv),
                None => return Some(Bracket { lt: mt, ht: mt, lv: mv, hv: mv }),
            }
        }
        Some(b)
    }

    fn forward(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let k = ((t * self.segments as f64).floor() as usize).min(self.segments - 1);
        let go_left = |mt: f64, _| if t == mt { None } else { Some(t < mt) };
        match self.descend(self.cell(k), go_left) {
            Some(b) if b.ht == b.lt => b.lv,
            Some(b) => b.lv + (b.hv - b.lv) * ((t - b.lt) / (b.ht - b.lt)),
            None => f64::NAN,
        }
    }

    fn inverse(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x).clamp(1, self.segments) - 1;
        let go_left = |_, mv: f64| if x == mv { None } else { Some(x < mv) };
        match self.descend(self.cell(k), go_left) {
            Some(b) if b.hv == b.lv => b.lt,
            Some(b) => b.lt + (b.ht - b.lt) * ((x - b.lv) / (b.hv - b.lv)).clamp(0.0, 1.0),
            None => f64::NAN,
        }
    }
}

/// Extends the table to all of `[0, 1]` by running the dyadic recursion
/// further on demand: `f(t)` is computed by bisecting the table cell that
/// contains `t` with `F`, down to the 52nd dyadic level or until the value
/// bracket reaches rounding level, then interpolating linearly inside the
/// final bracket. The inverse bisects the same way on values.
///
/// Evaluations cost `O(52 − depth)` calls of `F`; the deeper table only
/// saves work.
pub fn extend_generator(table: &GeneratorTable, f: &TwoPlaceFunction) -> Result<Generator> {
    require_strictly_increasing(table)?;
    if f.domain() != table.interval() {
        return Err(Error::InvalidArgument(format!(
            "table interval {} differs from the domain {} of {}",
            table.interval(),
            f.domain(),
            f.label()
        )));
    }
    let ext = Arc::new(DyadicExtension {
        f: f.clone(),
        values: table.values().into(),
        segments: table.segments(),
        extra_levels: MAX_EXACT_EXP - table.depth(),
    });
    let inv = Arc::clone(&ext);
    Generator::new(
        format!("dyadic({}, depth={})", f.label(), table.depth()),
        Interval::unit(),
        move |t| ext.forward(t),
        move |x| inv.inverse(x),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub sup_error: f64,
    pub argmax: (f64, f64),
    pub grid_n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
}

impl ReconstructionReport {
    pub fn at_depth(mut self, depth: u32) -> Self {
        self.depth = Some(depth);
        self
    }
}

/// `sup |F(x, y) − f((f⁻¹(x) + f⁻¹(y)) / 2)|` over the `grid_n × grid_n`
/// grid of `F`'s domain.
pub fn reconstruct_and_compare(
    f: &TwoPlaceFunction,
    gen: &Generator,
    cfg: &ToleranceConfig,
) -> Result<ReconstructionReport> {
    cfg.validate()?;
    let range = gen.range();
    if !range.contains_interval(&f.domain(), 1e-12 * range.width()) {
        return Err(Error::Inversion(format!(
            "domain {} of {} is not inside the generator range {range}",
            f.domain(),
            f.label()
        )));
    }
    let grid = f.domain().grid(cfg.grid_n)?;
    let params: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let t = gen.inverse(x);
            if t.is_finite() {
                Ok(t)
            } else {
                Err(Error::Inversion(format!("{} could not invert {x}", gen.label())))
            }
        })
        .collect::<Result<_>>()?;
    let mut sup_error = 0.0f64;
    let mut argmax = (grid[0], grid[0]);
    for (i, &x) in grid.iter().enumerate() {
        for (j, &y) in grid.iter().enumerate() {
            let rebuilt = gen.forward(0.5 * (params[i] + params[j]));
            if !rebuilt.is_finite() {
                return Err(Error::Inversion(format!("{} failed at ({x}, {y})", gen.label())));
            }
            let err = (f.eval(x, y)? - rebuilt).abs();
            if err > sup_error {
                sup_error = err;
                argmax = (x, y);
            }
        }
    }
    Ok(ReconstructionReport { sup_error, argmax, grid_n: grid.len(), depth: None })
}

/// `reference⁻¹(f_table(d)) ≈ alpha · d + beta` by least squares over the
/// table nodes; `residual` is the largest deviation in the reference's
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub alpha: f64,
    pub beta: f64,
    pub residual: f64,
}

pub fn affine_match(table: &GeneratorTable, reference: &Generator) -> Result<AffineFit> {
    let range = reference.range();
    let slack = 1e-9 * range.width();
    let mut points = Vec::with_capacity(table.values().len());
    for (d, v) in table.entries() {
        if !range.contains_within(v, slack) {
            return Err(Error::Inversion(format!(
                "table value {v} at {d} outside the range {range} of {}",
                reference.label()
            )));
        }
        let u = reference.inverse(range.clamp(v));
        if !u.is_finite() {
            return Err(Error::Inversion(format!("{} could not invert {v}", reference.label())));
        }
        points.push((d.to_f64()?, u));
    }
    let n = points.len() as f64;
    let mean_d = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_u = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sdd: f64 = points.iter().map(|p| (p.0 - mean_d).powi(2)).sum();
    let sdu: f64 = points.iter().map(|p| (p.0 - mean_d) * (p.1 - mean_u)).sum();
    let alpha = sdu / sdd;
    let beta = mean_u - alpha * mean_d;
    let residual = points.iter().map(|&(d, u)| (u - (alpha * d + beta)).abs()).fold(0.0, f64::max);
    Ok(AffineFit { alpha, beta, residual })
}
