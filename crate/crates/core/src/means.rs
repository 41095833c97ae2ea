//! Constructors for concrete two-place operations.
//!
//! * quasi-arithmetic means `f((f⁻¹(x) + f⁻¹(y)) / 2)` from a [`Generator`];
//! * affine conjugates `f(A f⁻¹(x) + B f⁻¹(y) + C)`, which cover weighted
//!   means (`A + B = 1`, `C = 0`) and translative operations (`A = B = 1`);
//! * min/max operations driven by a decreasing [`GapFunction`];
//! * a catalog of named means and non-examples, see [`catalog_get`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Provenance, TwoPlaceFunction};
use crate::interval::Interval;

pub type MapFn = dyn Fn(f64) -> f64 + Send + Sync;

const GENERATOR_CHECK_POINTS: usize = 129;
const ROUND_TRIP_TOL: f64 = 1e-9;
/// Relative slack (in units of the parameter interval) before a generator
/// argument counts as escaping.
const PARAM_SLACK: f64 = 1e-9;

/// A strictly monotone map `f: J → I` with an explicit inverse.
#[derive(Clone)]
pub struct Generator {
    label: String,
    domain: Interval,
    range: Interval,
    increasing: bool,
    forward: Arc<MapFn>,
    inverse: Arc<MapFn>,
}

impl Generator {
    /// Validates strict monotonicity and `inverse ∘ forward = id` on a grid
    /// of `domain`; the range is read off the endpoint images.
    pub fn new<F, G>(label: impl Into<String>, domain: Interval, forward: F, inverse: G) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let label = label.into();
        let bad = |reason: String| Error::Generator { label: label.clone(), reason };
        let (f_lo, f_hi) = (forward(domain.lo()), forward(domain.hi()));
        if !f_lo.is_finite() || !f_hi.is_finite() || f_lo == f_hi {
            return Err(bad(format!("endpoint images {f_lo}, {f_hi} must be finite and distinct")));
        }
        let increasing = f_hi > f_lo;
        let range = Interval::new(f_lo.min(f_hi), f_lo.max(f_hi))?;
        let gen = Generator {
            label: label.clone(),
            domain,
            range,
            increasing,
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
        };
        let grid = domain.grid(GENERATOR_CHECK_POINTS)?;
        let values: Vec<f64> = grid.iter().map(|&t| gen.forward(t)).collect();
        for (w, t) in values.windows(2).zip(grid.windows(2)) {
            let step_ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
            if !step_ok {
                return Err(bad(format!("not strictly monotone between t={} and t={}", t[0], t[1])));
            }
        }
        gen.check_round_trip(ROUND_TRIP_TOL)?;
        Ok(gen)
    }

    pub fn identity(iv: Interval) -> Self {
        Generator {
            label: "identity".into(),
            domain: iv,
            range: iv,
            increasing: true,
            forward: Arc::new(|t| t),
            inverse: Arc::new(|x| x),
        }
    }

    /// Piecewise-linear increasing generator through `(t, value)` knots.
    ///
    /// Two consecutive knots may share a `t`, producing a jump of the
    /// generator there; the inverse maps the whole gap onto that `t`.
    pub fn from_knots(label: impl Into<String>, knots: &[(f64, f64)]) -> Result<Self> {
        let label = label.into();
        let bad = |reason: &str| Error::Generator { label: label.clone(), reason: reason.into() };
        if knots.len() < 2 {
            return Err(bad("need at least two knots"));
        }
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(bad("knots must be finite"));
        }
        for w in knots.windows(2) {
            if w[1].0 < w[0].0 || w[1].1 <= w[0].1 {
                return Err(bad("knots must be sorted with strictly increasing values"));
            }
        }
        for w in knots.windows(3) {
            if w[0].0 == w[2].0 {
                return Err(bad("at most two knots may share a parameter"));
            }
        }
        let n = knots.len();
        if knots[0].0 == knots[1].0 || knots[n - 2].0 == knots[n - 1].0 {
            return Err(bad("jumps are not allowed at the endpoints"));
        }
        let domain = Interval::new(knots[0].0, knots[n - 1].0)?;
        let fwd_knots: Arc<[(f64, f64)]> = knots.into();
        let inv_knots = Arc::clone(&fwd_knots);
        let forward = move |t: f64| {
            let k = &fwd_knots;
            let i = k.partition_point(|p| p.0 <= t).clamp(1, k.len() - 1) - 1;
            let (a, b) = (k[i], k[i + 1]);
            if a.0 == b.0 {
                return b.1;
            }
            a.1 + (b.1 - a.1) * ((t - a.0) / (b.0 - a.0)).clamp(0.0, 1.0)
        };
        let inverse = move |x: f64| {
            let k = &inv_knots;
            let i = k.partition_point(|p| p.1 <= x).clamp(1, k.len() - 1) - 1;
            let (a, b) = (k[i], k[i + 1]);
            if a.0 == b.0 {
                return a.0;
            }
            a.0 + (b.0 - a.0) * ((x - a.1) / (b.1 - a.1)).clamp(0.0, 1.0)
        };
        Generator::new(label, domain, forward, inverse)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The parameter interval `J`.
    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// The image `f(J)`.
    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn forward(&self, t: f64) -> f64 {
        (self.forward)(t)
    }

    pub fn inverse(&self, x: f64) -> f64 {
        (self.inverse)(x)
    }

    pub fn check_round_trip(&self, tol: f64) -> Result<()> {
        for t in self.domain.grid(GENERATOR_CHECK_POINTS)? {
            let back = self.inverse(self.forward(t));
            if !((back - t).abs() <= tol * t.abs().max(1.0)) {
                return Err(Error::Generator {
                    label: self.label.clone(),
                    reason: format!("inverse(forward({t})) = {back}"),
                });
            }
        }
        Ok(())
    }

    /// `s ↦ f(scale·s + shift)`, defined on the preimage of `J`.
    pub fn reparametrized(&self, scale: f64, shift: f64) -> Result<Generator> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidArgument(format!("bad affine map s ↦ {scale}·s + {shift}")));
        }
        let (a, b) = ((self.domain.lo() - shift) / scale, (self.domain.hi() - shift) / scale);
        let domain = Interval::new(a.min(b), a.max(b))?;
        let (fwd, inv) = (Arc::clone(&self.forward), Arc::clone(&self.inverse));
        Generator::new(
            format!("{}∘({scale}·s+{shift})", self.label),
            domain,
            move |s| fwd(scale * s + shift),
            move |x| (inv(x) - shift) / scale,
        )
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("range", &self.range)
            .field("increasing", &self.increasing)
            .finish_non_exhaustive()
    }
}

/// `F(x, y) = f((f⁻¹(x) + f⁻¹(y)) / 2)` on the generator's range.
pub fn quasi_arithmetic(gen: &Generator) -> Result<TwoPlaceFunction> {
    gen.check_round_trip(ROUND_TRIP_TOL)?;
    let g = gen.clone();
    let param = gen.domain();
    Ok(TwoPlaceFunction::new(
        gen.range(),
        format!("quasi_arithmetic({})", gen.label()),
        Provenance::Catalog,
        move |x, y| g.forward(param.clamp(0.5 * (g.inverse(x) + g.inverse(y)))),
    ))
}

/// `F(x, y) = f(A f⁻¹(x) + B f⁻¹(y) + C)` on `domain ⊆ f(J)`.
///
/// The operation may leave `domain`; its codomain is the generator's range,
/// and evaluation fails once the argument of `f` escapes `J`.
pub fn affine_conjugate(gen: &Generator, a: f64, b: f64, c: f64, domain: Interval) -> Result<TwoPlaceFunction> {
    let label = format!("affine_conjugate({}, A={a}, B={b}, C={c})", gen.label());
    conjugate_form(gen, [a, b, c], domain, label)
}

/// Weighted quasi-arithmetic mean `f(r f⁻¹(x) + (1−r) f⁻¹(y))`.
pub fn weighted(gen: &Generator, r: f64) -> Result<TwoPlaceFunction> {
    let label = format!("weighted({}, r={r})", gen.label());
    conjugate_form(gen, [r, 1.0 - r, 0.0], gen.range(), label)
}

/// Translative form `F(x, y) = f(f⁻¹(x) + f⁻¹(y))` on `domain`.
pub fn translative(gen: &Generator, domain: Interval) -> Result<TwoPlaceFunction> {
    let label = format!("translative({})", gen.label());
    conjugate_form(gen, [1.0, 1.0, 0.0], domain, label)
}

fn conjugate_form(gen: &Generator, [a, b, c]: [f64; 3], domain: Interval, label: String) -> Result<TwoPlaceFunction> {
    if a * b == 0.0 || !(a * b).is_finite() || !c.is_finite() {
        return Err(Error::BadParameters { name: label, reason: format!("need finite A·B ≠ 0, got A={a}, B={b}") });
    }
    let range = gen.range();
    if !range.contains_interval(&domain, PARAM_SLACK * range.width()) {
        return Err(Error::BadParameters {
            name: label,
            reason: format!("domain {domain} is not inside the generator range {range}"),
        });
    }
    let param = gen.domain();
    let slack = PARAM_SLACK * param.width();
    // affine in the parameters with monotone f⁻¹: extremes sit at the corners
    for x in [domain.lo(), domain.hi()] {
        for y in [domain.lo(), domain.hi()] {
            let t = a * gen.inverse(x) + b * gen.inverse(y) + c;
            if !param.contains_within(t, slack) {
                return Err(Error::BadParameters {
                    name: label,
                    reason: format!("F({x}, {y}) needs f({t}), outside the parameter interval {param}"),
                });
            }
        }
    }
    let g = gen.clone();
    TwoPlaceFunction::fallible(domain, label, Provenance::Catalog, move |x, y| {
        let t = a * g.inverse(x) + b * g.inverse(y) + c;
        if !param.contains_within(t, slack) {
            return Err(format!("generator argument {t} leaves {param}"));
        }
        Ok(g.forward(param.clamp(t)))
    })
    .with_codomain(range)
}

/// Resolution on the curve where `y = g(x)` and `x = g(g(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    #[default]
    PreferMin,
    PreferMax,
}

/// A monotone decreasing `g: I → I` with fixed point `e`.
#[derive(Clone)]
pub struct GapFunction {
    label: String,
    g: Arc<MapFn>,
    e: f64,
    tie_rule: TieRule,
}

impl GapFunction {
    pub fn new<G>(label: impl Into<String>, g: G, e: f64, tie_rule: TieRule) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        GapFunction { label: label.into(), g: Arc::new(g), e, tie_rule }
    }

    /// Piecewise-linear decreasing `g` through `(lo, hi)`, `(e, e)`, `(hi, lo)`.
    /// With `e` at the centre this is the reflection `x ↦ lo + hi − x`.
    pub fn piecewise_linear(iv: Interval, e: f64, tie_rule: TieRule) -> Result<Self> {
        let (lo, hi) = (iv.lo(), iv.hi());
        if !(lo < e && e < hi) {
            return Err(Error::GapFunction(format!("fixed point {e} must lie inside {iv}")));
        }
        let reflection = (e - 0.5 * (lo + hi)).abs() <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0);
        let label = format!("gap(e={e})");
        if reflection {
            return Ok(GapFunction::new(label, move |x| lo + hi - x, e, tie_rule));
        }
        Ok(GapFunction::new(
            label,
            move |x| {
                if x <= e {
                    hi + (e - hi) * (x - lo) / (e - lo)
                } else {
                    e + (lo - e) * (x - e) / (hi - e)
                }
            },
            e,
            tie_rule,
        ))
    }

    pub fn g(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn fixed_point(&self) -> f64 {
        self.e
    }

    pub fn tie_rule(&self) -> TieRule {
        self.tie_rule
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Checks that `g` maps `iv` into itself, is non-increasing on a grid and
    /// fixes `e`.
    pub fn validate_on(&self, iv: &Interval) -> Result<()> {
        let slack = 1e-12 * iv.width();
        if !iv.contains(self.e) {
            return Err(Error::GapFunction(format!("fixed point {} outside {iv}", self.e)));
        }
        if (self.g(self.e) - self.e).abs() > 1e-9 {
            return Err(Error::GapFunction(format!("g(e) = {} differs from e = {}", self.g(self.e), self.e)));
        }
        let values: Vec<(f64, f64)> = iv.grid(101)?.into_iter().map(|x| (x, self.g(x))).collect();
        if let Some((x, gx)) = values.iter().find(|(_, gx)| !iv.contains_within(*gx, slack)) {
            return Err(Error::GapFunction(format!("g({x}) = {gx} leaves {iv}")));
        }
        if let Some(w) = values.windows(2).find(|w| w[1].1 > w[0].1) {
            return Err(Error::GapFunction(format!("g increases between {} and {}", w[0].0, w[1].0)));
        }
        Ok(())
    }

    /// The exact min/max case split.
    pub fn apply(&self, x: f64, y: f64) -> f64 {
        let gx = self.g(x);
        let take_min = if y < gx {
            true
        } else if y > gx {
            false
        } else {
            let g2 = self.g(gx);
            if x < g2 {
                true
            } else if x > g2 {
                false
            } else {
                self.tie_rule == TieRule::PreferMin
            }
        };
        if take_min {
            x.min(y)
        } else {
            x.max(y)
        }
    }
}

impl fmt::Debug for GapFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GapFunction")
            .field("label", &self.label)
            .field("e", &self.e)
            .field("tie_rule", &self.tie_rule)
            .finish_non_exhaustive()
    }
}

/// The min/max operation with gap function `gf`; `gf.fixed_point()` is its
/// neutral element.
pub fn gap_minmax(gf: &GapFunction, iv: Interval) -> Result<TwoPlaceFunction> {
    gf.validate_on(&iv)?;
    let gf = gf.clone();
    let label = format!("gap_minmax({}, {:?})", gf.label(), gf.tie_rule());
    Ok(TwoPlaceFunction::new(iv, label, Provenance::Catalog, move |x, y| gf.apply(x, y)))
}

/// F from a tabulated, possibly discontinuous, increasing generator
/// (see [`Generator::from_knots`]), in quasi-arithmetic form.
pub fn tabulated(label: impl Into<String>, knots: &[(f64, f64)]) -> Result<TwoPlaceFunction> {
    let label = label.into();
    let gen = Generator::from_knots(label.clone(), knots)?;
    let param = gen.domain();
    Ok(TwoPlaceFunction::new(gen.range(), label, Provenance::Tabulated, move |x, y| {
        gen.forward(param.clamp(0.5 * (gen.inverse(x) + gen.inverse(y))))
    }))
}

/// One row of the built-in catalog.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { name: "arithmetic", params: "", summary: "(x + y) / 2" },
    CatalogEntry { name: "geometric", params: "", summary: "sqrt(x·y), needs lo ≥ 0" },
    CatalogEntry { name: "harmonic", params: "", summary: "2xy / (x + y), needs lo > 0" },
    CatalogEntry { name: "power", params: "p", summary: "((x^p + y^p) / 2)^(1/p); p = 0 is geometric" },
    CatalogEntry { name: "projection_x", params: "", summary: "x" },
    CatalogEntry { name: "projection_y", params: "", summary: "y" },
    CatalogEntry { name: "min", params: "", summary: "min(x, y)" },
    CatalogEntry { name: "max", params: "", summary: "max(x, y)" },
    CatalogEntry {
        name: "gini",
        params: "p=2, q=1",
        summary: "((x^p + y^p) / (x^q + y^q))^(1/(p−q)), needs lo > 0; not bisymmetric, increasing on [1, 2] for (2, 1)",
    },
    CatalogEntry { name: "probabilistic_sum", params: "", summary: "x + y − xy on [lo, 1] ⊆ [0, 1]" },
    CatalogEntry {
        name: "gap_minmax",
        params: "e=mid, tie=0",
        summary: "min/max split by the decreasing line through (lo,hi), (e,e), (hi,lo); tie=1 prefers max",
    },
];

struct Params<'a> {
    name: &'a str,
    map: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn bad(&self, reason: impl Into<String>) -> Error {
        Error::BadParameters { name: self.name.to_string(), reason: reason.into() }
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        if let Some(k) = self.map.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(self.bad(format!("unknown parameter `{k}`")));
        }
        if let Some((k, v)) = self.map.iter().find(|(_, v)| !v.is_finite()) {
            return Err(self.bad(format!("parameter `{k}` = {v} is not finite")));
        }
        Ok(())
    }

    fn get(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match (self.map.get(key), default) {
            (Some(v), _) => Ok(*v),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(self.bad(format!("missing parameter `{key}`"))),
        }
    }
}

/// Looks up a named operation restricted to `iv`.
pub fn catalog_get(name: &str, iv: Interval, params: &BTreeMap<String, f64>) -> Result<TwoPlaceFunction> {
    let p = Params { name, map: params };
    let (lo, hi) = (iv.lo(), iv.hi());
    let f = match name {
        "arithmetic" => {
            p.allow(&[])?;
            TwoPlaceFunction::new(iv, "arithmetic", Provenance::Catalog, |x, y| 0.5 * (x + y))
        }
        "geometric" => {
            p.allow(&[])?;
            if lo < 0.0 {
                return Err(p.bad(format!("needs a non-negative interval, got {iv}")));
            }
            geometric(iv)
        }
        "harmonic" => {
            p.allow(&[])?;
            if lo <= 0.0 {
                return Err(p.bad(format!("needs a positive interval, got {iv}")));
            }
            TwoPlaceFunction::new(iv, "harmonic", Provenance::Catalog, |x, y| 2.0 * x * y / (x + y))
        }
        "power" => {
            p.allow(&["p"])?;
            let exponent = p.get("p", None)?;
            if exponent == 0.0 {
                if lo < 0.0 {
                    return Err(p.bad(format!("p = 0 needs a non-negative interval, got {iv}")));
                }
                geometric(iv).with_label("power(p=0)")
            } else {
                if lo < 0.0 || (exponent < 0.0 && lo == 0.0) {
                    return Err(p.bad(format!("p = {exponent} is undefined on {iv}")));
                }
                TwoPlaceFunction::new(iv, format!("power(p={exponent})"), Provenance::Catalog, move |x, y| {
                    (0.5 * (x.powf(exponent) + y.powf(exponent))).powf(exponent.recip())
                })
            }
        }
        "projection_x" => {
            p.allow(&[])?;
            TwoPlaceFunction::new(iv, "projection_x", Provenance::Catalog, |x, _| x)
        }
        "projection_y" => {
            p.allow(&[])?;
            TwoPlaceFunction::new(iv, "projection_y", Provenance::Catalog, |_, y| y)
        }
        "min" => {
            p.allow(&[])?;
            TwoPlaceFunction::new(iv, "min", Provenance::Catalog, f64::min)
        }
        "max" => {
            p.allow(&[])?;
            TwoPlaceFunction::new(iv, "max", Provenance::Catalog, f64::max)
        }
        "gini" => {
            p.allow(&["p", "q"])?;
            let (gp, gq) = (p.get("p", Some(2.0))?, p.get("q", Some(1.0))?);
            if gp == gq {
                return Err(p.bad("needs p ≠ q"));
            }
            if lo <= 0.0 {
                return Err(p.bad(format!("needs a positive interval, got {iv}")));
            }
            let power = (gp - gq).recip();
            TwoPlaceFunction::new(iv, format!("gini(p={gp},q={gq})"), Provenance::Catalog, move |x, y| {
                ((x.powf(gp) + y.powf(gp)) / (x.powf(gq) + y.powf(gq))).powf(power)
            })
        }
        "probabilistic_sum" => {
            p.allow(&[])?;
            if lo < 0.0 || hi != 1.0 {
                return Err(p.bad(format!("closed only on [lo, 1] with lo ≥ 0, got {iv}")));
            }
            TwoPlaceFunction::new(iv, "probabilistic_sum", Provenance::Catalog, |x, y| x + y - x * y)
        }
        "gap_minmax" => {
            p.allow(&["e", "tie"])?;
            let e = p.get("e", Some(0.5 * (lo + hi)))?;
            let tie = match p.get("tie", Some(0.0))? {
                0.0 => TieRule::PreferMin,
                1.0 => TieRule::PreferMax,
                t => return Err(p.bad(format!("tie must be 0 (min) or 1 (max), got {t}"))),
            };
            let gf = GapFunction::piecewise_linear(iv, e, tie).map_err(|err| p.bad(err.to_string()))?;
            gap_minmax(&gf, iv)?
        }
        other => return Err(Error::UnknownMean(other.to_string())),
    };
    f.check_closure(17).map_err(|err| p.bad(err.to_string()))?;
    Ok(f)
}

fn geometric(iv: Interval) -> TwoPlaceFunction {
    TwoPlaceFunction::new(iv, "geometric", Provenance::Catalog, |x, y| (x * y).sqrt())
}
