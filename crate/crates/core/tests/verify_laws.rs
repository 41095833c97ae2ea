use std::collections::BTreeMap;

use proptest::prelude::*;

use bisym_core::means::{catalog_get, gap_minmax, GapFunction, TieRule};
use bisym_core::verify::{
    check_associative, check_bisymmetric, check_reflexive, check_symmetric, find_neutral_element, recheck_witness,
    run_check, Property,
};
use bisym_core::{Interval, Provenance, ToleranceConfig, TwoPlaceFunction};

const PROPERTIES: [Property; 8] = [
    Property::Reflexive,
    Property::Symmetric,
    Property::Bisymmetric,
    Property::Associative,
    Property::PartialStrictIncrease,
    Property::StrictMean,
    Property::Cancellative,
    Property::NeutralElement,
];

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn quick() -> ToleranceConfig {
    ToleranceConfig::default().with_samples(300).with_grid(21)
}

/// Every catalog entry on an interval where it is defined, with a couple of
/// parameter variants.
fn catalog_instances() -> Vec<TwoPlaceFunction> {
    let p = |pairs: &[(&str, f64)]| pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>();
    let cases: Vec<(&str, f64, f64, BTreeMap<String, f64>)> = vec![
        ("arithmetic", 0.0, 1.0, p(&[])),
        ("geometric", 1.0, 16.0, p(&[])),
        ("harmonic", 1.0, 2.0, p(&[])),
        ("power", 0.0, 1.0, p(&[("p", 2.0)])),
        ("power", 0.0, 1.0, p(&[("p", 3.0)])),
        ("power", 1.0, 4.0, p(&[("p", -1.5)])),
        ("projection_x", 0.0, 1.0, p(&[])),
        ("projection_y", 0.0, 1.0, p(&[])),
        ("min", 0.0, 1.0, p(&[])),
        ("max", 0.0, 1.0, p(&[])),
        ("gini", 1.0, 2.0, p(&[])),
        ("probabilistic_sum", 0.0, 1.0, p(&[])),
        ("gap_minmax", 0.0, 1.0, p(&[])),
        ("gap_minmax", 0.0, 1.0, p(&[("tie", 1.0)])),
        ("gap_minmax", 0.0, 1.0, p(&[("e", 0.3)])),
    ];
    cases.into_iter().map(|(name, lo, hi, params)| catalog_get(name, iv(lo, hi), &params).unwrap()).collect()
}

#[test]
fn monotone_sections_of_reflexive_symmetric_means_increase() {
    let cfg = quick();
    let grid = Interval::unit().grid(21).unwrap();
    for f in catalog_instances() {
        let passes = check_reflexive(&f, &cfg).unwrap().passed && check_symmetric(&f, &cfg).unwrap().passed;
        if !passes {
            continue;
        }
        let g = f.domain().grid(21).unwrap();
        for &y0 in &g {
            let section: Vec<f64> = g.iter().map(|&x| f.eval(x, y0).unwrap()).collect();
            let strictly_decreasing = section.windows(2).all(|w| w[1] < w[0] - cfg.eq_tol);
            assert!(!strictly_decreasing, "{} has a decreasing section at y0={y0}", f.label());
        }
    }
    // the negative case: decreasing sections rule out reflexivity
    let flip = TwoPlaceFunction::new(Interval::unit(), "1-(x+y)/2", Provenance::Expression, |x, y| 1.0 - 0.5 * (x + y));
    assert!(check_symmetric(&flip, &cfg).unwrap().passed);
    assert!(grid.windows(2).all(|w| flip.eval(w[1], 0.3).unwrap() < flip.eval(w[0], 0.3).unwrap()));
    assert!(!check_reflexive(&flip, &cfg).unwrap().passed);
}

fn folklore_holds(f: &TwoPlaceFunction, cfg: &ToleranceConfig) -> Result<(), String> {
    let neutral = find_neutral_element(f, cfg).unwrap();
    if neutral.element.is_some() && check_bisymmetric(f, cfg).unwrap().passed {
        let assoc = check_associative(f, cfg).unwrap();
        let sym = check_symmetric(f, cfg).unwrap();
        if !(assoc.passed && sym.passed) {
            return Err(format!("{}: associative {}, symmetric {}", f.label(), assoc.passed, sym.passed));
        }
    }
    Ok(())
}

#[test]
fn bisymmetry_with_neutral_element_forces_associativity_on_catalog() {
    let cfg = quick().with_grid(101);
    let mut applicable = 0;
    for f in catalog_instances() {
        folklore_holds(&f, &cfg).unwrap();
        if find_neutral_element(&f, &cfg).unwrap().element.is_some() {
            applicable += 1;
        }
    }
    // min, max and the gap_minmax variants have neutral elements
    assert!(applicable >= 5, "only {applicable} instances had a neutral element");
}

#[test]
fn failed_witnesses_reproduce() {
    let cfg = quick();
    let mut failures = 0;
    for f in catalog_instances() {
        for p in PROPERTIES {
            let r = run_check(&f, p, &cfg).unwrap();
            if !r.passed {
                failures += 1;
                assert!(recheck_witness(&f, &r).unwrap(), "{} {:?}: {:?}", f.label(), p, r.witness);
            }
        }
    }
    assert!(failures > 20);
}

#[test]
fn reports_are_bit_identical_and_order_independent() {
    let cfg = quick().with_seed(99);
    for f in catalog_instances() {
        let forward: Vec<_> = PROPERTIES.iter().map(|&p| run_check(&f, p, &cfg).unwrap()).collect();
        let mut backward: Vec<_> = PROPERTIES.iter().rev().map(|&p| run_check(&f, p, &cfg).unwrap()).collect();
        backward.reverse();
        assert_eq!(forward, backward, "{}", f.label());
        for (a, b) in forward.iter().zip(&backward) {
            assert_eq!(a.max_violation.to_bits(), b.max_violation.to_bits());
        }
    }
}

/// `φ ∘ F ∘ (φ⁻¹ × φ⁻¹)` for the increasing affine `φ: [lo,hi] → [α·lo+β, α·hi+β]`.
fn conjugate(f: &TwoPlaceFunction, alpha: f64, beta: f64) -> TwoPlaceFunction {
    let d = f.domain();
    let g = f.clone();
    TwoPlaceFunction::fallible(
        iv(alpha * d.lo() + beta, alpha * d.hi() + beta),
        format!("{}-conjugated", f.label()),
        Provenance::Expression,
        move |u, v| {
            let back = |w: f64| d.clamp((w - beta) / alpha);
            g.eval(back(u), back(v)).map(|z| alpha * z + beta).map_err(|e| e.to_string())
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn verdicts_survive_affine_rescaling(alpha in 0.5f64..20.0, beta in -5.0f64..5.0, seed in any::<u64>()) {
        let cfg = quick().with_seed(seed);
        for f in catalog_instances() {
            let g = conjugate(&f, alpha, beta);
            for p in PROPERTIES {
                let (a, b) = (run_check(&f, p, &cfg).unwrap(), run_check(&g, p, &cfg).unwrap());
                prop_assert_eq!(a.passed, b.passed, "{} {:?}: {:?} vs {:?}", f.label(), p, a, b);
            }
        }
    }

    #[test]
    fn folklore_on_random_gap_minmax(e in 0.1f64..0.9, prefer_max in any::<bool>(), seed in any::<u64>()) {
        let tie = if prefer_max { TieRule::PreferMax } else { TieRule::PreferMin };
        let f = gap_minmax(&GapFunction::piecewise_linear(Interval::unit(), e, tie).unwrap(), Interval::unit()).unwrap();
        folklore_holds(&f, &quick().with_seed(seed).with_grid(101)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn witnesses_reproduce_for_any_seed(seed in any::<u64>()) {
        let cfg = quick().with_seed(seed);
        let f = catalog_get("gini", iv(1.0, 2.0), &BTreeMap::new()).unwrap();
        for p in [Property::Bisymmetric, Property::Associative] {
            let r = run_check(&f, p, &cfg).unwrap();
            prop_assert!(!r.passed);
            prop_assert!(recheck_witness(&f, &r).unwrap());
        }
    }
}
