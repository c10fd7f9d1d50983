use std::path::PathBuf;
use std::process::{Command, Output};

fn ikrylov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ikrylov")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name).display().to_string()
}

#[test]
fn csv_grid_on_stdout() {
    let o = ikrylov(&["--problem", "synth:n=40,kappa=1e1/1e2", "--eps", "1e-3,1e-5", "--method", "CG,iCG"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,problem,kappa,n_it,cost,r_res_gap,r_sol_err,r_val_err,termination,seed");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1].starts_with("CG,synth-n40-k1e1,1.00000e+01,"));
    assert!(!text.contains('\r'));
}

#[test]
fn reorth_and_text_format() {
    let o = ikrylov(&[
        "--problem",
        "synth:n=30,kappa=1e2",
        "--method",
        "cg,icg",
        "--reorth",
        "--format",
        "text",
        "--oracle",
        "multiprecision",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("CGR") && text.contains("iCGR"));
    assert!(!text.lines().any(|l| l.trim_start().starts_with("CG ")));
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.cfg");
    let out = dir.path().join("rows.csv");
    std::fs::write(
        &cfg,
        format!(
            "# small grid\nproblem = synth:n=30,kappa=10\nproblem = mm:{}\neps = 1e-5\nmethod = FOM,iFOM\nseed = 1,2\nout = {}\n",
            fixture("bcsstm02_like.mtx"),
            out.display()
        ),
    )
    .unwrap();
    let o = ikrylov(&["--config", cfg.to_str().unwrap(), "--eps", "1e-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    // 2 problems x 1 eps x 2 methods x 2 seeds
    assert_eq!(csv.lines().count(), 1 + 8);
    assert!(csv.contains(",bcsstm02_like,"));

    let again = dir.path().join("again.csv");
    let o = ikrylov(&["--config", cfg.to_str().unwrap(), "--eps", "1e-3", "--out", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn audit_reports_and_passes() {
    let o = ikrylov(&["--problem", "synth:n=50,kappa=1e1/1e3", "--eps", "1e-3,1e-5", "--audit"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    for check in ["residual_gap", "budget", "value_error", "gap_identity"] {
        assert!(text.contains(check), "{check}");
    }
}

#[test]
fn config_errors_exit_with_one() {
    let bad: [&[&str]; 7] = [
        &[],
        &["--problem", "synth:n=20", "--eps", "0"],
        &["--problem", "synth:n=20", "--method", "gmres"],
        &["--problem", "mm:/definitely/not/here.mtx"],
        &["--problem", "synth:n=20", "--config", "/definitely/not/here.cfg"],
        &["--problem", "synth:n=20", "--bogus"],
        &["--problem", "synth:n=20", "--audit", "perhaps"],
    ];
    for args in bad {
        let o = ikrylov(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_exits_cleanly() {
    let o = ikrylov(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("--perturb-estimates"));
}
