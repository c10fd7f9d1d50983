//! Experiment grids over problems, accuracies, methods and seeds, with CSV and
//! text table output and an end-to-end audit of the theoretical guarantees.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metrics::evaluate;
use crate::oracle::{Oracle, OracleKind};
use crate::problems::{
    gen_synthetic, parse_matrix_market, perturb_estimates, QuadraticProblem, SpectrumSpec,
};
use crate::solvers::{
    solve, FirstEstimate, Method, Mode, PhiPolicy, SolveReport, SolverConfig, TerminationReason,
};

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    Synthetic { n: usize, kappas: Vec<f64> },
    MatrixMarket { paths: Vec<PathBuf>, rhs_seed: u64 },
}

/// Parses `synth:n=200,kappa=1e1/1e2` (kappas separated by `/` or given
/// repeatedly) or `mm:path/to/matrix.mtx`.
impl FromStr for ProblemSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("mm:") {
            if path.is_empty() {
                return Err(Error::Config("mm: needs a file path".into()));
            }
            return Ok(Self::MatrixMarket { paths: vec![PathBuf::from(path)], rhs_seed: 1 });
        }
        let Some(args) = s.strip_prefix("synth:").or_else(|| (s == "synth").then_some("")) else {
            return Err(Error::Config(format!("unknown problem '{s}' (expected synth:... or mm:...)")));
        };
        let mut n = 200;
        let mut kappas = Vec::new();
        for kv in args.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) =
                kv.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value in '{kv}'")))?;
            let bad = |what: &str| Error::Config(format!("invalid {what} '{v}'"));
            match k.trim() {
                "n" => n = v.trim().parse().map_err(|_| bad("n"))?,
                "kappa" => {
                    for part in v.split('/') {
                        kappas.push(part.trim().parse::<f64>().map_err(|_| bad("kappa"))?);
                    }
                }
                other => return Err(Error::Config(format!("unknown synthetic key '{other}'"))),
            }
        }
        if kappas.is_empty() {
            kappas = vec![1e1, 1e2, 1e3, 1e4];
        }
        for &kappa in &kappas {
            SpectrumSpec::new(n, kappa).validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(Self::Synthetic { n, kappas })
    }
}

/// The six algorithm variants, in canonical table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    Fom,
    IFom,
    Cg,
    Cgr,
    ICg,
    ICgr,
}

impl MethodId {
    pub const ALL: [MethodId; 6] = [Self::Fom, Self::IFom, Self::Cg, Self::Cgr, Self::ICg, Self::ICgr];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fom => "FOM",
            Self::IFom => "iFOM",
            Self::Cg => "CG",
            Self::Cgr => "CGR",
            Self::ICg => "iCG",
            Self::ICgr => "iCGR",
        }
    }

    pub fn is_inexact(self) -> bool {
        matches!(self, Self::IFom | Self::ICg | Self::ICgr)
    }

    pub fn method(self) -> Method {
        match self {
            Self::Fom | Self::IFom => Method::Fom,
            _ => Method::Cg,
        }
    }

    pub fn reorth(self) -> bool {
        matches!(self, Self::Cgr | Self::ICgr)
    }

    /// The reorthogonalized counterpart of a CG variant.
    pub fn with_reorth(self) -> Self {
        match self {
            Self::Cg => Self::Cgr,
            Self::ICg => Self::ICgr,
            other => other,
        }
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub problems: Vec<ProblemSource>,
    pub eps_list: Vec<f64>,
    pub methods: Vec<MethodId>,
    /// Mode of the inexact methods; the exact baselines always run in `Mode::Exact`.
    pub mode: Mode,
    /// Oracle of the inexact methods.
    pub oracle: OracleKind,
    pub perturb_estimates: bool,
    pub delay: usize,
    /// Defaults to `3n` per problem.
    pub k_max_user: Option<usize>,
    pub seeds: Vec<u64>,
    pub phi_policy: PhiPolicy,
    pub first_estimate: FirstEstimate,
}

impl ExperimentSpec {
    /// Six methods, practical mode, continuous oracle, perturbed estimates.
    pub fn new(problems: Vec<ProblemSource>, eps_list: Vec<f64>) -> Self {
        Self {
            problems,
            eps_list,
            methods: MethodId::ALL.to_vec(),
            mode: Mode::Practical,
            oracle: OracleKind::Continuous,
            perturb_estimates: true,
            delay: 10,
            k_max_user: None,
            seeds: vec![1],
            phi_policy: PhiPolicy::Managed,
            first_estimate: FirstEstimate::InverseSqrtLambdaMax,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::Config(format!("empty {what} list")));
        if self.problems.is_empty() {
            return empty("problem");
        }
        for p in &self.problems {
            match p {
                ProblemSource::Synthetic { kappas, .. } if kappas.is_empty() => return empty("kappa"),
                ProblemSource::MatrixMarket { paths, .. } if paths.is_empty() => return empty("path"),
                _ => {}
            }
        }
        if self.eps_list.is_empty() {
            return empty("eps");
        }
        if self.methods.is_empty() {
            return empty("method");
        }
        if self.seeds.is_empty() {
            return empty("seed");
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(Error::Config(format!("eps = {e} must lie in (0, 1)")));
        }
        if self.delay == 0 {
            return Err(Error::Config("delay must be at least 1".into()));
        }
        if self.k_max_user == Some(0) {
            return Err(Error::Config("kmax must be at least 1".into()));
        }
        if self.mode == Mode::Exact && self.methods.iter().any(|m| m.is_inexact()) {
            return Err(Error::Config("inexact methods need the theoretical or practical mode".into()));
        }
        Ok(())
    }

    fn canonical_methods(&self) -> Vec<MethodId> {
        let mut m = self.methods.clone();
        m.sort();
        m.dedup();
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub method: MethodId,
    pub problem: String,
    /// Nominal condition number for synthetic problems, computed otherwise.
    pub kappa: f64,
    pub eps: f64,
    pub n_it: usize,
    pub cost: f64,
    pub r_res_gap: f64,
    pub r_sol_err: f64,
    pub r_val_err: f64,
    pub termination: String,
    pub seed: u64,
}

struct Instance {
    label: String,
    kappa: f64,
    problem: QuadraticProblem,
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Problem instances indexed by `[problem][seed]`.
fn load_instances(spec: &ExperimentSpec) -> Result<Vec<Vec<Arc<Instance>>>> {
    let mut out = Vec::new();
    for source in &spec.problems {
        match source {
            ProblemSource::Synthetic { n, kappas } => {
                for &kappa in kappas {
                    let sp = SpectrumSpec::new(*n, kappa);
                    sp.validate()?;
                    let built = par_map(&spec.seeds, |&seed| gen_synthetic(sp, seed));
                    let mut row = Vec::new();
                    for p in built {
                        let problem = p?;
                        row.push(Arc::new(Instance { label: problem.name.clone(), kappa, problem }));
                    }
                    out.push(row);
                }
            }
            ProblemSource::MatrixMarket { paths, rhs_seed } => {
                for path in paths {
                    let a = parse_matrix_market(path)?;
                    let name = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string());
                    let problem = QuadraticProblem::from_matrix(name.clone(), a, *rhs_seed)?;
                    let inst = Arc::new(Instance {
                        label: name,
                        kappa: problem.spectral_true().condition(),
                        problem,
                    });
                    out.push(vec![inst; spec.seeds.len()]);
                }
            }
        }
    }
    Ok(out)
}

struct Cell {
    instance: Arc<Instance>,
    eps: f64,
    method: MethodId,
    seed: u64,
}

struct CellOutcome {
    row: ResultRow,
    config: Option<SolverConfig>,
    report: Option<SolveReport>,
}

fn cells(spec: &ExperimentSpec) -> Result<Vec<Cell>> {
    spec.validate()?;
    let instances = load_instances(spec)?;
    let methods = spec.canonical_methods();
    let mut cells = Vec::new();
    for per_seed in &instances {
        for &eps in &spec.eps_list {
            for &method in &methods {
                for (inst, &seed) in per_seed.iter().zip(&spec.seeds) {
                    cells.push(Cell { instance: Arc::clone(inst), eps, method, seed });
                }
            }
        }
    }
    Ok(cells)
}

fn run_cell(cell: &Cell, spec: &ExperimentSpec, diagnostics: bool) -> CellOutcome {
    let problem = &cell.instance.problem;
    let mut row = ResultRow {
        method: cell.method,
        problem: cell.instance.label.clone(),
        kappa: cell.instance.kappa,
        eps: cell.eps,
        n_it: 0,
        cost: f64::NAN,
        r_res_gap: f64::NAN,
        r_sol_err: f64::NAN,
        r_val_err: f64::NAN,
        termination: String::new(),
        seed: cell.seed,
    };
    let (mode, kind) =
        if cell.method.is_inexact() { (spec.mode, spec.oracle) } else { (Mode::Exact, OracleKind::Exact) };
    let truth = problem.spectral_true();
    let est = if mode == Mode::Practical && spec.perturb_estimates {
        perturb_estimates(truth, cell.seed)
    } else {
        truth
    };
    let config = SolverConfig {
        eps: cell.eps,
        delay: spec.delay,
        k_max_user: spec.k_max_user.unwrap_or(3 * problem.order()),
        mode,
        method: cell.method.method(),
        reorth: cell.method.reorth(),
        phi_policy: spec.phi_policy,
        first_estimate: spec.first_estimate,
        seed: cell.seed,
        diagnostics,
    };
    let mut oracle = Oracle::for_problem(kind, problem, est, cell.seed);
    let outcome = solve(problem, &mut oracle, &est, &config).and_then(|rep| {
        let ev = evaluate(problem, &rep.x_final, &rep.r_recurred, rep.q_recurred)?;
        Ok((rep, ev))
    });
    match outcome {
        Ok((rep, ev)) => {
            row.n_it = rep.n_it;
            row.cost = rep.total_cost;
            row.r_res_gap = ev.r_res_gap;
            row.r_sol_err = ev.r_sol_err;
            row.r_val_err = ev.r_val_err;
            row.termination = rep.termination_reason.name().to_string();
            CellOutcome { row, config: Some(config), report: Some(rep) }
        }
        Err(e) => {
            row.termination = e.kind().to_string();
            CellOutcome { row, config: Some(config), report: None }
        }
    }
}

/// Solves every (problem, eps, method, seed) cell. Rows come out in canonical
/// order whatever the execution order; solver failures become rows labelled
/// with the error kind.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    let cells = cells(spec)?;
    Ok(par_map(&cells, |c| run_cell(c, spec, false).row))
}

/// C-style `%.{digits}e`, e.g. `2.20000e+01`.
pub fn sci(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.digits$e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Text,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "text" | "txt" => Ok(Self::Text),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

pub const CSV_HEADER: &str = "method,problem,kappa,n_it,cost,r_res_gap,r_sol_err,r_val_err,termination,seed";

pub fn emit_table(rows: &[ResultRow], format: TableFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Config("no rows to emit".into()));
    }
    Ok(match format {
        TableFormat::Csv => emit_csv(rows),
        TableFormat::Text => emit_text(rows),
    })
}

fn emit_csv(rows: &[ResultRow]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let record_err = "writing to memory cannot fail";
    w.write_record(CSV_HEADER.split(',')).expect(record_err);
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            r.problem.clone(),
            sci(r.kappa, 5),
            r.n_it.to_string(),
            sci(r.cost, 5),
            sci(r.r_res_gap, 5),
            sci(r.r_sol_err, 5),
            sci(r.r_val_err, 5),
            r.termination.clone(),
            r.seed.to_string(),
        ])
        .expect(record_err);
    }
    let bytes = w.into_inner().expect(record_err);
    String::from_utf8(bytes).expect("records are UTF-8")
}

/// One block per `eps`, one group per problem, method rows inside, with the
/// two-digit scientific notation of published tables.
fn emit_text(rows: &[ResultRow]) -> String {
    let multi_seed = rows.iter().any(|r| r.seed != rows[0].seed);
    let mut header = vec![
        "method",
        "problem",
        "kappa",
        "n_it",
        "cost",
        "r.res.gap",
        "r.sol.err",
        "r.val.err",
        "termination",
    ];
    if multi_seed {
        header.push("seed");
    }
    let mut eps_order: Vec<f64> = Vec::new();
    for r in rows {
        if !eps_order.contains(&r.eps) {
            eps_order.push(r.eps);
        }
    }

    let mut out = String::new();
    for eps in eps_order {
        let block: Vec<&ResultRow> = rows.iter().filter(|r| r.eps == eps).collect();
        let mut lines: Vec<Option<Vec<String>>> = Vec::new();
        let mut prev: Option<(&str, u64)> = None;
        for r in &block {
            let first = prev != Some((r.problem.as_str(), if multi_seed { r.seed } else { 0 }));
            if first && prev.is_some() {
                lines.push(None);
            }
            prev = Some((r.problem.as_str(), if multi_seed { r.seed } else { 0 }));
            let mut cells = vec![
                r.method.name().to_string(),
                if first { r.problem.clone() } else { String::new() },
                if first { sci(r.kappa, 1) } else { String::new() },
                r.n_it.to_string(),
                sci(r.cost, 1),
                sci(r.r_res_gap, 1),
                sci(r.r_sol_err, 1),
                sci(r.r_val_err, 1),
                r.termination.clone(),
            ];
            if multi_seed {
                cells.push(r.seed.to_string());
            }
            lines.push(Some(cells));
        }
        let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for cells in lines.iter().flatten() {
            for (w, c) in width.iter_mut().zip(cells) {
                *w = (*w).max(c.len());
            }
        }
        let right = |i: usize| (2..8).contains(&i) || i == 9;
        let render = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if right(i) {
                        format!("{c:>w$}", w = width[i])
                    } else {
                        format!("{c:<w$}", w = width[i])
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let total: usize = width.iter().sum::<usize>() + 2 * (width.len() - 1);
        let _ = writeln!(out, "eps = {}", sci(eps, 1));
        let head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
        let _ = writeln!(out, "{}", render(&head));
        let _ = writeln!(out, "{}", "-".repeat(total));
        for line in &lines {
            match line {
                Some(cells) => {
                    let _ = writeln!(out, "{}", render(cells));
                }
                None => {
                    let _ = writeln!(out, "{}", "-".repeat(total));
                }
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditEntry {
    pub check: &'static str,
    pub cell: String,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
}

impl AuditEntry {
    fn new(check: &'static str, cell: &str, measured: f64, bound: f64) -> Self {
        Self { check, cell: cell.to_string(), measured, bound, passed: measured <= bound }
    }

    /// `bound - measured`; negative on failure.
    pub fn slack(&self) -> f64 {
        self.bound - self.measured
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{} {:<18} {:<40} measured {} bound {} slack {}",
                if e.passed { "PASS" } else { "FAIL" },
                e.check,
                e.cell,
                sci(e.measured, 2),
                sci(e.bound, 2),
                sci(e.slack(), 2)
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.entries.len(), failed);
        out
    }
}

fn audit_cell(outcome: &CellOutcome, problem: &QuadraticProblem, report: &mut AuditReport) {
    let row = &outcome.row;
    let cell = format!("{} {} eps={} seed={}", row.method.name(), row.problem, sci(row.eps, 0), row.seed);
    let (Some(rep), Some(cfg)) = (&outcome.report, &outcome.config) else {
        report.entries.push(AuditEntry {
            check: "solve",
            cell,
            measured: f64::NAN,
            bound: 0.0,
            passed: false,
        });
        return;
    };
    let eps = row.eps;
    let inexact = row.method.is_inexact();
    if rep.termination_reason == TerminationReason::DualNormTest {
        report.entries.push(AuditEntry::new("decrease", &cell, row.r_sol_err, eps));
    }
    if inexact {
        report.entries.push(AuditEntry::new("residual_gap", &cell, row.r_res_gap, 0.25 * eps));
        if cfg.phi_policy == PhiPolicy::Managed && rep.n_it <= rep.k_max {
            report.entries.push(AuditEntry::new("budget", &cell, rep.budget_spent, 1.0 + 1e-12));
        }
    }
    let s = eps.sqrt();
    report.entries.push(AuditEntry::new("value_error", &cell, row.r_val_err, s * (1.0 + s)));
    if let (Some(audit), false) = (&rep.cg_audit, cfg.reorth) {
        let worst = audit.gap_identity.iter().cloned().fold(0.0, f64::max);
        report.entries.push(AuditEntry::new("gap_identity", &cell, worst, 1e-10 * problem.rhs().norm2()));
    }
}

/// Runs the grid with inexact methods in theoretical mode and checks the
/// decrease, residual-gap, budget, value-error and gap-identity guarantees.
pub fn audit(spec: &ExperimentSpec) -> Result<AuditReport> {
    let spec = ExperimentSpec { mode: Mode::Theoretical, ..spec.clone() };
    let cells = cells(&spec)?;
    let outcomes = par_map(&cells, |c| run_cell(c, &spec, true));
    let mut report = AuditReport::default();
    for (c, o) in cells.iter().zip(&outcomes) {
        audit_cell(o, &c.instance.problem, &mut report);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec::new(vec![ProblemSource::Synthetic { n: 40, kappas: vec![1e2] }], vec![1e-3])
    }

    #[test]
    fn sci_formatting() {
        assert_eq!(sci(22.0, 5), "2.20000e+01");
        assert_eq!(sci(1.5e-30, 5), "1.50000e-30");
        assert_eq!(sci(0.0, 5), "0.00000e+00");
        assert_eq!(sci(-3.25e120, 1), "-3.2e+120");
        assert_eq!(sci(f64::NAN, 5), "nan");
    }

    #[test]
    fn problem_parsing() {
        assert_eq!(
            "synth:n=200,kappa=1e2".parse::<ProblemSource>().unwrap(),
            ProblemSource::Synthetic { n: 200, kappas: vec![1e2] }
        );
        assert_eq!(
            "synth:n=50,kappa=1e1/1e3,kappa=10".parse::<ProblemSource>().unwrap(),
            ProblemSource::Synthetic { n: 50, kappas: vec![1e1, 1e3, 10.0] }
        );
        assert_eq!(
            "synth".parse::<ProblemSource>().unwrap(),
            ProblemSource::Synthetic { n: 200, kappas: vec![1e1, 1e2, 1e3, 1e4] }
        );
        assert_eq!(
            "mm:data/nos4.mtx".parse::<ProblemSource>().unwrap(),
            ProblemSource::MatrixMarket { paths: vec!["data/nos4.mtx".into()], rhs_seed: 1 }
        );
        for bad in ["synth:n=x", "synth:kappa=0.5", "synth:m=3", "synth:n", "mm:", "foo:bar"] {
            assert!(matches!(bad.parse::<ProblemSource>(), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn method_parsing() {
        assert_eq!("icgr".parse::<MethodId>().unwrap(), MethodId::ICgr);
        assert_eq!(" FOM".parse::<MethodId>().unwrap(), MethodId::Fom);
        assert!("gmres".parse::<MethodId>().is_err());
        assert_eq!(MethodId::ICg.with_reorth(), MethodId::ICgr);
        assert_eq!(MethodId::IFom.with_reorth(), MethodId::IFom);
    }

    #[test]
    fn six_methods_six_rows() {
        let rows = run_experiment(&small_spec()).unwrap();
        assert_eq!(rows.len(), 6);
        let names: Vec<&str> = rows.iter().map(|r| r.method.name()).collect();
        assert_eq!(names, ["FOM", "iFOM", "CG", "CGR", "iCG", "iCGR"]);
        let csv = emit_table(&rows[..1], TableFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(emit_table(&[], TableFormat::Csv).is_err());
    }

    #[test]
    fn invalid_specs_are_config_errors() {
        let mut s = small_spec();
        s.eps_list.clear();
        assert!(matches!(run_experiment(&s), Err(Error::Config(_))));
        let mut s = small_spec();
        s.eps_list = vec![1.5];
        assert!(run_experiment(&s).is_err());
        let mut s = small_spec();
        s.mode = Mode::Exact;
        assert!(run_experiment(&s).is_err());
        let s = ExperimentSpec::new(
            vec![ProblemSource::MatrixMarket { paths: vec!["/nonexistent.mtx".into()], rhs_seed: 1 }],
            vec![1e-3],
        );
        assert!(matches!(run_experiment(&s), Err(Error::Io { .. })));
    }

    #[test]
    fn text_table_groups_problems() {
        let mut spec = small_spec();
        spec.problems = vec![ProblemSource::Synthetic { n: 30, kappas: vec![1e1, 1e2] }];
        spec.methods = vec![MethodId::Cg, MethodId::ICg];
        let rows = run_experiment(&spec).unwrap();
        let text = emit_table(&rows, TableFormat::Text).unwrap();
        assert!(text.starts_with("eps = 1.0e-03\n"));
        assert_eq!(text.matches("synth-n30").count(), 2);
        assert!(text.contains("r.res.gap"));
    }
}
