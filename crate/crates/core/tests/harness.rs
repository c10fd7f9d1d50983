use std::path::PathBuf;

use inexact_krylov::harness::{
    audit, emit_table, run_experiment, ExperimentSpec, MethodId, ProblemSource, TableFormat, CSV_HEADER,
};
use inexact_krylov::oracle::OracleKind;
use inexact_krylov::solvers::Mode;

fn golden_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(
        vec![ProblemSource::Synthetic { n: 40, kappas: vec![1e1, 1e3] }],
        vec![1e-3, 1e-5],
    );
    spec.seeds = vec![1, 2];
    spec
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/synth_n40.csv")
}

#[test]
fn csv_output_is_reproducible() {
    let spec = golden_spec();
    let first = emit_table(&run_experiment(&spec).unwrap(), TableFormat::Csv).unwrap();
    let second = emit_table(&run_experiment(&spec).unwrap(), TableFormat::Csv).unwrap();
    assert_eq!(first, second);
    // 2 kappas x 2 eps x 6 methods x 2 seeds
    assert_eq!(first.lines().count(), 1 + 48);
    assert_eq!(first.lines().next().unwrap(), CSV_HEADER);

    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_path().parent().unwrap()).unwrap();
        std::fs::write(golden_path(), &first).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path()).unwrap();
    assert_eq!(first, golden);
}

#[test]
fn rows_follow_canonical_order() {
    let mut spec = golden_spec();
    spec.methods = vec![MethodId::ICgr, MethodId::Fom, MethodId::ICgr, MethodId::Cg];
    let rows = run_experiment(&spec).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 3 * 2);
    let first_block: Vec<(&str, u64)> = rows[..6].iter().map(|r| (r.method.name(), r.seed)).collect();
    assert_eq!(first_block, [("FOM", 1), ("FOM", 2), ("CG", 1), ("CG", 2), ("iCGR", 1), ("iCGR", 2)]);
    assert!(rows[..12].iter().all(|r| r.kappa == 1e1));
    assert!(rows.iter().all(|r| r.termination != "MaxIterations"));
}

#[test]
fn text_table_lists_every_row() {
    let spec = ExperimentSpec::new(vec![ProblemSource::Synthetic { n: 30, kappas: vec![1e2] }], vec![1e-3]);
    let rows = run_experiment(&spec).unwrap();
    let text = emit_table(&rows, TableFormat::Text).unwrap();
    for m in MethodId::ALL {
        assert!(text.lines().any(|l| l.trim_start().starts_with(&format!("{} ", m.name()))), "{m:?}");
    }
}

#[test]
fn audit_passes_on_synthetic_grid() {
    let mut spec = ExperimentSpec::new(
        vec![ProblemSource::Synthetic { n: 60, kappas: vec![1e1, 1e2, 1e3] }],
        vec![1e-3, 1e-5],
    );
    spec.mode = Mode::Practical;
    for oracle in [OracleKind::Continuous, OracleKind::MultiPrecision] {
        spec.oracle = oracle;
        let report = audit(&spec).unwrap();
        assert!(report.passed(), "{}", report.render());
        assert!(report.entries.iter().any(|e| e.check == "gap_identity"));
        assert!(report.entries.iter().any(|e| e.check == "budget"));
    }
}

#[test]
fn matrix_market_sources_run() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let spec = ExperimentSpec::new(
        vec![ProblemSource::MatrixMarket {
            paths: vec![data.join("bcsstm02_like.mtx"), data.join("small_general.mtx")],
            rhs_seed: 1,
        }],
        vec![1e-3],
    );
    let rows = run_experiment(&spec).unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0].problem, "bcsstm02_like");
    assert!((rows[0].kappa - 8.8).abs() <= 1e-6);
    for r in &rows {
        assert!(r.r_sol_err <= 1e-3, "{r:?}");
    }

    let missing = ExperimentSpec::new(
        vec![ProblemSource::MatrixMarket { paths: vec![data.join("nope.mtx")], rhs_seed: 1 }],
        vec![1e-3],
    );
    assert!(run_experiment(&missing).is_err());
}

#[test]
fn inexact_variants_cost_no_more_than_exact() {
    let mut spec = ExperimentSpec::new(
        vec![ProblemSource::Synthetic { n: 100, kappas: vec![1e1, 1e2, 1e3] }],
        vec![1e-3, 1e-5],
    );
    spec.seeds = vec![1, 2, 3];
    for oracle in [OracleKind::Continuous, OracleKind::MultiPrecision] {
        spec.oracle = oracle;
        let rows = run_experiment(&spec).unwrap();
        for r in rows.iter().filter(|r| r.method.is_inexact()) {
            let twin = rows
                .iter()
                .find(|e| {
                    !e.method.is_inexact()
                        && e.method.method() == r.method.method()
                        && e.method.reorth() == r.method.reorth()
                        && e.problem == r.problem
                        && e.eps == r.eps
                        && e.seed == r.seed
                })
                .unwrap();
            assert!(r.cost <= twin.cost, "{r:?} vs {twin:?}");
        }
    }
}

#[test]
fn theoretical_rows_meet_the_target() {
    let mut spec = ExperimentSpec::new(
        vec![ProblemSource::Synthetic { n: 80, kappas: vec![1e1, 1e2, 1e3, 1e4] }],
        vec![1e-3, 1e-5, 1e-7],
    );
    spec.mode = Mode::Theoretical;
    spec.oracle = OracleKind::MultiPrecision;
    let rows = run_experiment(&spec).unwrap();
    let mut checked = 0;
    for r in rows.iter().filter(|r| r.termination == "DelayTest" || r.termination == "DualNormTest") {
        assert!(r.r_sol_err <= r.eps, "{r:?}");
        checked += 1;
    }
    assert!(checked >= rows.len() / 2);
}
