use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use inexact_krylov::harness::{audit, emit_table, run_experiment};
use inexact_krylov::{Error, Result};

mod settings;

use settings::{Plan, Settings};

/// Runs inexact-product FOM/CG experiment grids and prints result tables.
///
/// Every option may also be set in a `key = value` file given with
/// `--config`; options on the command line take precedence.
#[derive(Parser, Debug)]
#[command(name = "ikrylov", version)]
struct Cli {
    /// `key = value` file with defaults for any option below.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// `synth:n=200,kappa=1e1/1e2` or `mm:path.mtx`; repeatable.
    #[arg(long, value_name = "SOURCE")]
    problem: Vec<String>,
    /// Comma-separated target accuracies.
    #[arg(long, value_name = "LIST")]
    eps: Option<String>,
    /// Comma-separated subset of FOM,iFOM,CG,CGR,iCG,iCGR, or `all`.
    #[arg(long, value_name = "LIST")]
    method: Option<String>,
    /// `practical` or `theoretical`, for the inexact methods.
    #[arg(long)]
    mode: Option<String>,
    /// `continuous` or `multiprecision`.
    #[arg(long)]
    oracle: Option<String>,
    /// Replace CG by CGR and iCG by iCGR.
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    reorth: Option<String>,
    /// Delay of the practical termination test.
    #[arg(long)]
    delay: Option<String>,
    /// Iteration cap; defaults to 3n.
    #[arg(long)]
    kmax: Option<String>,
    /// Comma-separated seeds.
    #[arg(long, value_name = "LIST")]
    seed: Option<String>,
    /// Perturb the spectral estimates in practical mode (default true).
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    perturb_estimates: Option<String>,
    /// Output file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// `csv` or `text`.
    #[arg(long)]
    format: Option<String>,
    /// Check the theoretical guarantees instead of printing a table.
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    audit: Option<String>,
}

impl Cli {
    fn settings(self) -> Result<Settings> {
        let base = match &self.config {
            Some(path) => Settings::read_file(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        for p in self.problem {
            flags.push("problem", p);
        }
        let singles = [
            ("eps", self.eps),
            ("method", self.method),
            ("mode", self.mode),
            ("oracle", self.oracle),
            ("reorth", self.reorth),
            ("delay", self.delay),
            ("kmax", self.kmax),
            ("seed", self.seed),
            ("perturb-estimates", self.perturb_estimates),
            ("out", self.out),
            ("format", self.format),
            ("audit", self.audit),
        ];
        for (key, value) in singles {
            if let Some(v) = value {
                flags.push(key, v);
            }
        }
        Ok(base.overridden_by(flags))
    }
}

enum Failure {
    Config(Error),
    Audit,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

fn write_output(plan: &Plan, text: &str) -> Result<()> {
    match &plan.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io { path: path.clone(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
    }
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let plan = Plan::from_settings(&cli.settings()?)?;
    if plan.audit {
        let report = audit(&plan.spec)?;
        write_output(&plan, &report.render())?;
        return if report.passed() { Ok(()) } else { Err(Failure::Audit) };
    }
    let rows = run_experiment(&plan.spec)?;
    write_output(&plan, &emit_table(&rows, plan.format)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("ikrylov: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Audit) => {
            eprintln!("ikrylov: audit failed");
            ExitCode::from(2)
        }
    }
}
