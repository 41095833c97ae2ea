use std::path::Path;
use std::process::Command;

use bisym_cli::{run_command, ResultEntry, RunReport};
use bisym_core::verify::Property;

fn bisym(args: &[&str]) -> (i32, Option<RunReport>) {
    run_command(std::iter::once("bisym").chain(args.iter().copied()))
}

fn exe(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bisym")).args(args).current_dir(cwd).output().unwrap()
}

fn verdicts(r: &RunReport) -> Vec<(String, Option<bool>)> {
    r.results
        .iter()
        .map(|e| match e {
            ResultEntry::Property(p) => (p.property.name().to_string(), Some(p.passed)),
            other => (format!("{other:?}").chars().take(12).collect(), other.passed(&r.config)),
        })
        .collect()
}

#[test]
fn arithmetic_passes_requested_checks() {
    let (code, report) = bisym(&["verify", "--mean", "catalog:arithmetic", "--interval", "0,1", "--checks", "refl,sym,bisym"]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    assert_eq!(report.results.len(), 3);
    assert_eq!(report.verdict, "all 3 checks passed");
}

#[test]
fn gini_fails_bisymmetry_with_a_quadruple() {
    let (code, report) = bisym(&[
        "verify", "--mean", "catalog:gini", "--param", "p=2", "--param", "q=1", "--interval", "1,2", "--checks", "bisym",
        "--seed", "42",
    ]);
    assert_eq!(code, 1);
    let ResultEntry::Property(p) = &report.unwrap().results[0] else { panic!("expected a property report") };
    assert_eq!(p.property, Property::Bisymmetric);
    let w = p.witness.as_ref().unwrap();
    assert_eq!(w.inputs.len(), 4);
    assert!((w.lhs - w.rhs).abs() > 1e-6);
}

#[test]
fn expression_and_catalog_arithmetic_agree() {
    let checks = "refl,sym,bisym,assoc,strict-inc,strict-mean,cancel,neutral";
    let run = |mean: &str| bisym(&["verify", "--mean", mean, "--interval", "0,1", "--checks", checks, "--grid", "21"]);
    let (c1, r1) = run("catalog:arithmetic");
    let (c2, r2) = run("expr:(x+y)/2");
    assert_eq!(c1, c2);
    assert_eq!(verdicts(&r1.unwrap()), verdicts(&r2.unwrap()));
}

#[test]
fn projection_symmetry_witness() {
    let (code, report) = bisym(&["verify", "--mean", "catalog:projection_x", "--interval", "0,1", "--checks", "sym"]);
    assert_eq!(code, 1);
    let ResultEntry::Property(p) = &report.unwrap().results[0] else { panic!() };
    let w = p.witness.as_ref().unwrap();
    assert_eq!(w.inputs, vec![0.0, 1.0]);
    assert_eq!((w.lhs, w.rhs), (0.0, 1.0));
}

#[test]
fn usage_and_evaluation_errors_exit_with_two() {
    assert_eq!(bisym(&["verify"]).0, 2);
    assert_eq!(bisym(&["verify", "--mean", "catalog:nope", "--interval", "0,1"]).0, 2);
    assert_eq!(bisym(&["verify", "--mean", "arithmetic", "--interval", "0,1"]).0, 2);
    assert_eq!(bisym(&["verify", "--mean", "catalog:arithmetic", "--interval", "1,0"]).0, 2);
    assert_eq!(bisym(&["verify", "--mean", "catalog:arithmetic", "--interval", "0,1", "--checks", "foo"]).0, 2);
    assert_eq!(bisym(&["verify", "--mean", "expr:x+", "--interval", "0,1"]).0, 2);
    // closure violation of a user expression
    assert_eq!(bisym(&["verify", "--mean", "expr:x+y", "--interval", "0,1"]).0, 2);
    // runtime division by zero
    assert_eq!(bisym(&["verify", "--mean", "expr:x*y/(x+y)", "--interval", "0,1"]).0, 2);
    assert_eq!(bisym(&["extract", "--mean", "catalog:arithmetic", "--interval", "0,1", "--depth", "0"]).0, 2);
    assert_eq!(bisym(&["falsify", "--mean", "catalog:max", "--interval", "0,1", "--pair", "0.9,0.1"]).0, 2);
    assert_eq!(bisym(&["--help"]).0, 0);
}

#[test]
fn negative_intervals_parse() {
    let (code, report) = bisym(&["verify", "--mean", "catalog:arithmetic", "--interval", "-2,-1", "--checks", "refl"]);
    assert_eq!(code, 0);
    assert!(report.is_some());
}

#[test]
fn extract_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = exe(
        &["extract", "--mean", "catalog:geometric", "--interval", "1,16", "--depth", "2", "--table", "t.csv", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(csv, "num,exp,t,value\n0,0,0,1\n1,2,0.25,2\n1,1,0.5,4\n3,2,0.75,8\n1,0,1,16\n");
    let report = RunReport::from_json(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let gap = report.results.iter().find_map(|r| match r {
        ResultEntry::Gap(g) => Some(g.clone()),
        _ => None,
    });
    let gap = gap.unwrap();
    assert_eq!((gap.x, gap.y), (8.0, 16.0));
    let json = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(json.contains("\"X\": 8.0") && json.contains("\"Y\": 16.0"));
}

#[test]
fn extract_of_projection_is_unverified() {
    let (code, report) = bisym(&["extract", "--mean", "catalog:projection_x", "--interval", "0,1", "--depth", "3", "--cross-check"]);
    assert_eq!(code, 1);
    let report = report.unwrap();
    assert!(report.verdict.starts_with("hypotheses unverified"));
    assert!(!report.results.iter().any(|r| matches!(r, ResultEntry::Gap(_))));
}

#[test]
fn reconstruct_reports_depth_and_error() {
    let (code, report) = bisym(&["reconstruct", "--mean", "catalog:harmonic", "--interval", "1,2", "--depth", "8", "--grid", "21"]);
    assert_eq!(code, 0);
    let rec = report.unwrap().results.into_iter().find_map(|r| match r {
        ResultEntry::Reconstruction(r) => Some(r),
        _ => None,
    });
    let rec = rec.unwrap();
    assert_eq!(rec.depth, Some(8));
    assert_eq!(rec.grid_n, 21);
    assert!(rec.sup_error < 1e-12);

    let (code, _) = bisym(&[
        "reconstruct", "--mean", "catalog:gini", "--interval", "1,2", "--depth", "8", "--grid", "21", "--method", "linear",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn falsify_reports_a_reproduced_refutation() {
    let (code, report) = bisym(&["falsify", "--mean", "catalog:max", "--interval", "0,1", "--pair", "0.2,0.9", "--profile-at", "0.2"]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    let ResultEntry::Refutation { refutation, reproduced } = &report.results[0] else { panic!() };
    assert!(reproduced);
    assert_eq!(refutation.lhs, 0.9);
    assert!(matches!(report.results[1], ResultEntry::Profile(_)));
}

#[test]
fn catalog_lists_builtins() {
    let (code, report) = bisym(&["catalog"]);
    assert_eq!(code, 0);
    let ResultEntry::Catalog { entries } = &report.unwrap().results[0] else { panic!() };
    assert!(entries.iter().any(|e| e.name == "gap_minmax"));
}

#[test]
fn reports_round_trip_through_json() {
    for args in [
        vec!["verify", "--mean", "catalog:gini", "--interval", "1,2", "--checks", "bisym,neutral,cancel", "--grid", "21"],
        vec!["extract", "--mean", "catalog:power", "--param", "p=3", "--interval", "0,1", "--depth", "6", "--cross-check"],
        vec!["falsify", "--mean", "catalog:gap_minmax", "--interval", "0,1", "--pair", "0.2,0.9", "--profile-at", "0.2"],
        vec!["catalog"],
    ] {
        let report = bisym(&args).1.unwrap();
        let json = report.to_json();
        let back = RunReport::from_json(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), json);
    }
}

#[test]
fn passing_property_json_shape() {
    let report = bisym(&["verify", "--mean", "catalog:arithmetic", "--interval", "0,1", "--checks", "refl"]).1.unwrap();
    let compact = serde_json::to_string(&report.results[0]).unwrap();
    assert!(compact.starts_with(r#"{"kind":"property","property":"reflexive","passed":true,"max_violation":0.0,"#), "{compact}");
}

#[test]
fn identical_invocations_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "extract", "--mean", "catalog:harmonic", "--interval", "1,2", "--depth", "9", "--cross-check", "--seed", "3",
        "--table", "t.csv", "--out", "r.json",
    ];
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    exe(&args, dir.path());
    let (csv1, json1) = (read("t.csv"), read("r.json"));
    exe(&args, dir.path());
    assert_eq!(read("t.csv"), csv1);
    assert_eq!(read("r.json"), json1);
}

#[test]
fn unwritable_output_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = exe(&["catalog", "--out", "missing/dir/r.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}
