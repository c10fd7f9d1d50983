//! WebAssembly entry points for the browser demo. Each operation has a plain
//! Rust form returning JSON (tested natively) and a thin `wasm_bindgen`
//! wrapper.

use inexact_krylov::budget::k_max_spectral;
use inexact_krylov::dense::SpectralEstimates;
use inexact_krylov::harness::{run_experiment, ExperimentSpec, MethodId, ProblemSource};
use inexact_krylov::metrics::evaluate;
use inexact_krylov::oracle::{Oracle, OracleKind};
use inexact_krylov::problems::{gen_synthetic, perturb_estimates, SpectrumSpec};
use inexact_krylov::solvers::{solve, Mode, SolverConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps a dense solve interactive in the browser.
pub const MAX_ORDER: usize = 400;

#[derive(Serialize)]
struct IterationJson {
    k: usize,
    omega_requested: f64,
    omega_hat: f64,
    cost: f64,
    level: Option<&'static str>,
    q: f64,
    r_2norm: f64,
    r_dual_norm: f64,
    phi: f64,
    error_energy: Option<f64>,
}

#[derive(Serialize)]
struct TraceJson {
    problem: String,
    method: &'static str,
    mode: &'static str,
    oracle: &'static str,
    n_it: usize,
    total_cost: f64,
    termination: &'static str,
    k_max: usize,
    budget_spent: f64,
    q_star: f64,
    r_res_gap: f64,
    r_sol_err: f64,
    r_val_err: f64,
    iterations: Vec<IterationJson>,
}

#[derive(Serialize)]
struct RowJson {
    method: &'static str,
    n_it: usize,
    cost: f64,
    r_res_gap: f64,
    r_sol_err: f64,
    r_val_err: f64,
    termination: String,
}

#[derive(Serialize)]
struct KmaxPoint {
    kappa: f64,
    k_max: usize,
}

fn parse_mode(mode: &str) -> Result<Mode, String> {
    match mode.to_ascii_lowercase().as_str() {
        "practical" => Ok(Mode::Practical),
        "theoretical" => Ok(Mode::Theoretical),
        other => Err(format!("unknown mode '{other}'")),
    }
}

fn parse_oracle(oracle: &str) -> Result<OracleKind, String> {
    match oracle.to_ascii_lowercase().as_str() {
        "continuous" => Ok(OracleKind::Continuous),
        "multiprecision" => Ok(OracleKind::MultiPrecision),
        other => Err(format!("unknown oracle '{other}'")),
    }
}

fn check_order(n: usize) -> Result<(), String> {
    if n > MAX_ORDER {
        return Err(format!("n = {n} exceeds the demo limit {MAX_ORDER}"));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// One solve on a synthetic problem with the full per-iteration trace.
/// Exact methods (FOM, CG, CGR) ignore `mode` and `oracle`.
pub fn solve_trace_json(
    n: usize,
    kappa: f64,
    eps: f64,
    method: &str,
    mode: &str,
    oracle: &str,
    seed: u64,
) -> Result<String, String> {
    check_order(n)?;
    let method: MethodId = method.parse().map_err(|e: inexact_krylov::Error| e.to_string())?;
    let (mode, kind) = if method.is_inexact() {
        (parse_mode(mode)?, parse_oracle(oracle)?)
    } else {
        (Mode::Exact, OracleKind::Exact)
    };
    let p = gen_synthetic(SpectrumSpec::new(n, kappa), seed).map_err(|e| e.to_string())?;
    let est =
        if mode == Mode::Practical { perturb_estimates(p.spectral_true(), seed) } else { p.spectral_true() };
    let mut cfg = SolverConfig::new(eps, n, mode, method.method()).map_err(|e| e.to_string())?;
    cfg.reorth = method.reorth();
    cfg.seed = seed;
    cfg.diagnostics = true;
    let mut o = Oracle::for_problem(kind, &p, est, seed);
    let rep = solve(&p, &mut o, &est, &cfg).map_err(|e| e.to_string())?;
    let ev = evaluate(&p, &rep.x_final, &rep.r_recurred, rep.q_recurred).map_err(|e| e.to_string())?;
    to_json(&TraceJson {
        problem: p.name.clone(),
        method: method.name(),
        mode: mode.name(),
        oracle: kind.name(),
        n_it: rep.n_it,
        total_cost: rep.total_cost,
        termination: rep.termination_reason.name(),
        k_max: rep.k_max,
        budget_spent: rep.budget_spent,
        q_star: p.q_star(),
        r_res_gap: ev.r_res_gap,
        r_sol_err: ev.r_sol_err,
        r_val_err: ev.r_val_err,
        iterations: rep
            .trace
            .iter()
            .map(|t| IterationJson {
                k: t.k,
                omega_requested: t.omega_requested,
                omega_hat: t.omega_hat,
                cost: t.cost,
                level: t.level.map(|l| l.name()),
                q: t.q_k,
                r_2norm: t.r_2norm,
                r_dual_norm: t.r_dual_norm,
                phi: t.phi_k,
                error_energy: t.error_energy_norm,
            })
            .collect(),
    })
}

/// All six methods on one synthetic problem in practical mode with perturbed estimates.
pub fn compare_methods_json(
    n: usize,
    kappa: f64,
    eps: f64,
    oracle: &str,
    seed: u64,
) -> Result<String, String> {
    check_order(n)?;
    let mut spec = ExperimentSpec::new(vec![ProblemSource::Synthetic { n, kappas: vec![kappa] }], vec![eps]);
    spec.oracle = parse_oracle(oracle)?;
    spec.seeds = vec![seed];
    let rows = run_experiment(&spec).map_err(|e| e.to_string())?;
    let out: Vec<RowJson> = rows
        .into_iter()
        .map(|r| RowJson {
            method: r.method.name(),
            n_it: r.n_it,
            cost: r.cost,
            r_res_gap: r.r_res_gap,
            r_sol_err: r.r_sol_err,
            r_val_err: r.r_val_err,
            termination: r.termination,
        })
        .collect();
    to_json(&out)
}

/// Expected iteration count on a log-spaced grid of condition numbers.
pub fn k_max_curve_json(eps: f64, kappa_lo: f64, kappa_hi: f64, points: usize) -> Result<String, String> {
    if !(kappa_lo >= 1.0 && kappa_hi >= kappa_lo && (2..=1000).contains(&points)) {
        return Err("need 1 <= kappa_lo <= kappa_hi and 2..=1000 points".into());
    }
    let (a, b) = (kappa_lo.log10(), kappa_hi.log10());
    let curve = (0..points)
        .map(|i| {
            let kappa = 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64);
            let est = SpectralEstimates::new(1.0 / kappa, 1.0, 1.0, 1).map_err(|e| e.to_string())?;
            let k_max = k_max_spectral(eps, &est).map_err(|e| e.to_string())?;
            Ok(KmaxPoint { kappa, k_max })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&curve)
}

#[wasm_bindgen]
pub fn solve_trace(
    n: usize,
    kappa: f64,
    eps: f64,
    method: &str,
    mode: &str,
    oracle: &str,
    seed: u32,
) -> Result<String, JsError> {
    solve_trace_json(n, kappa, eps, method, mode, oracle, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare_methods(n: usize, kappa: f64, eps: f64, oracle: &str, seed: u32) -> Result<String, JsError> {
    compare_methods_json(n, kappa, eps, oracle, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn k_max_curve(eps: f64, kappa_lo: f64, kappa_hi: f64, points: usize) -> Result<String, JsError> {
    k_max_curve_json(eps, kappa_lo, kappa_hi, points).map_err(|e| JsError::new(&e))
}
