use std::collections::BTreeMap;

use approx::assert_relative_eq;
use proptest::prelude::*;

use bisym_core::means::{
    affine_conjugate, catalog_get, gap_minmax, quasi_arithmetic, translative, GapFunction, Generator, TieRule,
};
use bisym_core::verify::{
    check_associative, check_bisymmetric, check_partial_strict_increase, check_reflexive, check_strict_mean,
    check_symmetric, find_neutral_element,
};
use bisym_core::{Interval, ToleranceConfig, TwoPlaceFunction};

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn quick() -> ToleranceConfig {
    ToleranceConfig::default().with_samples(400).with_grid(21)
}

fn exp_generator(k: f64) -> Generator {
    Generator::new(format!("exp({k}t)"), Interval::unit(), move |t| (k * t).exp(), move |x| x.ln() / k).unwrap()
}

fn passes_mean_laws(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<(), String> {
    for r in [
        check_reflexive(f, cfg),
        check_symmetric(f, cfg),
        check_bisymmetric(f, cfg),
        check_partial_strict_increase(f, cfg),
        check_strict_mean(f, cfg),
    ] {
        let r = r.map_err(|e| e.to_string())?;
        if !r.passed {
            return Err(format!("{}: {:?}", f.label(), r));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quasi_arithmetic_means_are_means(k in prop_oneof![-4.0f64..-0.2, 0.2f64..4.0], seed in any::<u64>()) {
        let f = quasi_arithmetic(&exp_generator(k)).unwrap();
        passes_mean_laws(&f, &quick().with_seed(seed)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn power_means_are_means(p in prop_oneof![-3.0f64..-0.25, 0.25f64..3.0], lo in 0.5f64..4.0, w in 0.5f64..8.0) {
        let mut params = BTreeMap::new();
        params.insert("p".to_string(), p);
        let f = catalog_get("power", iv(lo, lo + w), &params).unwrap();
        passes_mean_laws(&f, &quick()).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn affine_conjugates_are_bisymmetric(
        a in 0.1f64..0.6,
        b in 0.1f64..0.6,
        c in -0.1f64..0.1,
        exact in any::<bool>(),
    ) {
        let (a, b, c) = if exact { (a, 1.0 - a, 0.0) } else { (a, b, c) };
        let f = affine_conjugate(&Generator::identity(iv(-5.0, 5.0)), a, b, c, Interval::unit()).unwrap();
        let cfg = quick();
        prop_assert!(check_bisymmetric(&f, &cfg).unwrap().passed);
        // reflexive iff A + B = 1 and C = 0; the non-exact draws miss that by far more than eq_tol
        let reflexive_expected = exact || ((a + b - 1.0).abs() < 1e-12 && c.abs() < 1e-12);
        prop_assert_eq!(check_reflexive(&f, &cfg).unwrap().passed, reflexive_expected);
    }

    #[test]
    fn quasi_arithmetic_is_gauge_invariant(k in 0.2f64..3.0, scale in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0], shift in -2.0f64..2.0) {
        let gen = exp_generator(k);
        let f = quasi_arithmetic(&gen).unwrap();
        let g = quasi_arithmetic(&gen.reparametrized(scale, shift).unwrap()).unwrap();
        for x in f.domain().grid(21).unwrap() {
            for y in f.domain().grid(21).unwrap() {
                let (u, v) = (f.eval(x, y).unwrap(), g.eval(x, y).unwrap());
                prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0), "F({x},{y}): {u} vs {v}");
            }
        }
    }

    #[test]
    fn gap_minmax_structure(e in 0.2f64..0.8, prefer_max in any::<bool>()) {
        let tie = if prefer_max { TieRule::PreferMax } else { TieRule::PreferMin };
        let gf = GapFunction::piecewise_linear(Interval::unit(), e, tie).unwrap();
        let f = gap_minmax(&gf, Interval::unit()).unwrap();
        let cfg = quick();
        prop_assert!(check_reflexive(&f, &cfg).unwrap().passed);
        prop_assert!(check_associative(&f, &cfg).unwrap().passed);
        // random pairs avoid the tie curve almost surely
        prop_assert!(check_symmetric(&f, &cfg).unwrap().passed);
        // sections never decrease
        let grid = Interval::unit().grid(41).unwrap();
        for &a in &grid {
            for w in grid.windows(2) {
                prop_assert!(f.eval(w[1], a).unwrap() >= f.eval(w[0], a).unwrap());
                prop_assert!(f.eval(a, w[1]).unwrap() >= f.eval(a, w[0]).unwrap());
            }
        }
        for x in Interval::unit().grid(101).unwrap() {
            prop_assert_eq!(f.eval(x, e).unwrap(), x);
            prop_assert_eq!(f.eval(e, x).unwrap(), x);
        }
        let found = find_neutral_element(&f, &cfg.with_grid(101)).unwrap();
        let step = 0.01;
        prop_assert!((found.element.unwrap() - e).abs() <= step, "{:?} vs {e}", found.element);
    }
}

#[test]
fn translative_forms_are_associative_and_bisymmetric() {
    let product = translative(
        &Generator::new("exp", iv(-40.0, 0.0), f64::exp, f64::ln).unwrap(),
        iv(0.1, 1.0),
    )
    .unwrap();
    let sum = translative(&Generator::identity(iv(-10.0, 10.0)), Interval::unit()).unwrap();
    for f in [product, sum] {
        let cfg = quick();
        assert!(check_associative(&f, &cfg).unwrap().passed, "{}", f.label());
        assert!(check_bisymmetric(&f, &cfg).unwrap().passed, "{}", f.label());
        assert!(!check_reflexive(&f, &cfg).unwrap().passed, "{}", f.label());
    }
}

#[test]
fn catalog_means_on_their_safe_intervals() {
    let none = BTreeMap::new();
    for (name, lo, hi) in [("arithmetic", 0.0, 1.0), ("geometric", 1.0, 16.0), ("harmonic", 1.0, 2.0)] {
        passes_mean_laws(&catalog_get(name, iv(lo, hi), &none).unwrap(), &quick()).unwrap();
    }
    // gini(2,1) is a strictly increasing symmetric mean on [1,2] but not bisymmetric
    let gini = catalog_get("gini", iv(1.0, 2.0), &none).unwrap();
    let cfg = quick();
    assert!(check_reflexive(&gini, &cfg).unwrap().passed);
    assert!(check_symmetric(&gini, &cfg).unwrap().passed);
    assert!(check_partial_strict_increase(&gini, &cfg).unwrap().passed);
    assert!(!check_bisymmetric(&gini, &cfg).unwrap().passed);
}

#[test]
fn sixteen_to_the_t_generates_the_geometric_mean() {
    let gen = Generator::new("16^t", Interval::unit(), |t| 16f64.powf(t), |x| x.log2() / 4.0).unwrap();
    let from_gen = quasi_arithmetic(&gen).unwrap();
    let geo = catalog_get("geometric", iv(1.0, 16.0), &BTreeMap::new()).unwrap();
    for x in iv(1.0, 16.0).grid(31).unwrap() {
        for y in iv(1.0, 16.0).grid(31).unwrap() {
            assert_relative_eq!(from_gen.eval(x, y).unwrap(), geo.eval(x, y).unwrap(), max_relative = 1e-13);
        }
    }
}
