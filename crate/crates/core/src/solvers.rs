//! Inexact-product FOM and CG.
//!
//! Both solvers start from `x_0 = 0` and request one product per iteration
//! from a [`ProductOracle`]. The requested accuracy comes from one of three
//! modes:
//!
//! * `Exact`: full-accuracy products, dual-norm termination.
//! * `Theoretical`: primal-dual accuracy bounds computed from true norms
//!   (the problem's Cholesky factor is used), dual-norm termination.
//! * `Practical`: two-norm bounds computed from spectral estimates and the
//!   running quadratic value, delay-based termination.

use crate::budget::{phi_hat_cg, phi_hat_fom, BudgetState};
use crate::dense::{
    axpy, dot, dual_norm, energy_norm, hessenberg_solve, norm2, HessenbergMatrix, SpectralEstimates, Vector,
    EPS_M,
};
use crate::error::{Error, Result};
use crate::oracle::{AccuracyRequest, NormMode, PrecisionLevel, ProductOracle};
use crate::problems::QuadraticProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Theoretical,
    Practical,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Theoretical => "theoretical",
            Self::Practical => "practical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Fom,
    Cg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiPolicy {
    /// Adaptive weights recycling unused accuracy.
    Managed,
    /// `phi_j = n` throughout.
    ConstantN,
}

/// How `||b||_{A^-1}` is estimated at `x = 0`, before any quadratic value exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstEstimate {
    /// `||b||_2 / sqrt(lambda_max)`
    InverseSqrtLambdaMax,
    /// `sqrt(2 ||b||_2 lambda_max)`, i.e. `|q|` replaced by `||b||_2 lambda_max`.
    TwoNormTimesLambdaMax,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub eps: f64,
    pub delay: usize,
    pub k_max_user: usize,
    pub mode: Mode,
    pub method: Method,
    pub reorth: bool,
    pub phi_policy: PhiPolicy,
    pub first_estimate: FirstEstimate,
    pub seed: u64,
    /// Keep iterate errors, the FOM basis and CG injections in the report.
    pub diagnostics: bool,
}

impl SolverConfig {
    pub fn new(eps: f64, n: usize, mode: Mode, method: Method) -> Result<Self> {
        let cfg = Self {
            eps,
            delay: 10,
            k_max_user: 3 * n,
            mode,
            method,
            reorth: false,
            phi_policy: PhiPolicy::Managed,
            first_estimate: FirstEstimate::InverseSqrtLambdaMax,
            seed: 0,
            diagnostics: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidAccuracy(self.eps));
        }
        if self.delay == 0 {
            return Err(Error::Config("delay must be at least 1".into()));
        }
        if self.k_max_user == 0 {
            return Err(Error::Config("k_max_user must be at least 1".into()));
        }
        Ok(())
    }

    pub fn eps_pi(&self) -> f64 {
        0.5 * self.eps.sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TerminationReason {
    DelayTest,
    DualNormTest,
    ResidualSmall,
    MaxIterations,
    Breakdown,
}

impl TerminationReason {
    pub fn name(self) -> &'static str {
        match self {
            Self::DelayTest => "DelayTest",
            Self::DualNormTest => "DualNormTest",
            Self::ResidualSmall => "ResidualSmall",
            Self::MaxIterations => "MaxIterations",
            Self::Breakdown => "Breakdown",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// 1-based count of products so far.
    pub k: usize,
    pub omega_requested: f64,
    pub omega_hat: f64,
    pub cost: f64,
    pub level: Option<PrecisionLevel>,
    pub q_k: f64,
    /// Euclidean norm of the recurred residual after this iteration.
    pub r_2norm: f64,
    pub r_dual_norm: f64,
    pub phi_k: f64,
    /// `||x_k - x_*||_A`, diagnostics only.
    pub error_energy_norm: Option<f64>,
}

/// Arnoldi data of a finished FOM run.
#[derive(Clone, Debug, PartialEq)]
pub struct FomBasis {
    pub v: Vec<Vector>,
    /// Column `j` holds `h[0..=j+1][j]`.
    pub h_columns: Vec<Vec<f64>>,
}

/// Steps and injected errors `E_j p_j` of a CG run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CgAudit {
    pub alphas: Vec<f64>,
    pub injections: Vec<Vector>,
    /// `||r(x_k) - r_k + sum_{j<k} alpha_j E_j p_j||_2` after each iteration.
    pub gap_identity: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub x_final: Vector,
    pub n_it: usize,
    pub total_cost: f64,
    pub termination_reason: TerminationReason,
    pub trace: Vec<IterationRecord>,
    pub r_recurred: Vector,
    pub q_recurred: f64,
    pub k_max: usize,
    /// `sum 1/phi_hat` over the iterations charged to the budget.
    pub budget_spent: f64,
    pub fom_basis: Option<FomBasis>,
    pub cg_audit: Option<CgAudit>,
}

fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(v) => Err(Error::OutOfRange { value: *v, lo: 0.0, hi: f64::INFINITY }),
        None => Ok(()),
    }
}

/// `min(1, eps_pi ||b||_{A^-1} / (phi ||v||_A ||H^-1|| ||r_prev||))`
pub fn omega_fom_theoretical(
    eps_pi: f64,
    b_dual: f64,
    v_a_norm: f64,
    hinv_est: f64,
    r_prev_2: f64,
    phi: f64,
) -> Result<f64> {
    if r_prev_2 == 0.0 {
        return Err(Error::DegenerateResidual);
    }
    check_positive(&[eps_pi, b_dual, v_a_norm, hinv_est, r_prev_2, phi])?;
    Ok((eps_pi * b_dual / (phi * v_a_norm * hinv_est * r_prev_2)).min(1.0))
}

/// `eps_pi ||b||_{A^-1} ||p||_A / (phi ||r||^2 + eps_pi ||b||_{A^-1} ||p||_A)`
pub fn omega_cg_theoretical(eps_pi: f64, b_dual: f64, p_a_norm: f64, r_2: f64, phi: f64) -> Result<f64> {
    if r_2 == 0.0 {
        return Err(Error::DegenerateResidual);
    }
    check_positive(&[eps_pi, b_dual, p_a_norm, r_2, phi])?;
    let a = eps_pi * b_dual * p_a_norm;
    Ok(a / (phi * r_2 * r_2 + a))
}

/// Two-norm accuracy relative to `lambda_min`, with `||b||_{A^-1} ~ sqrt(2|q|)`,
/// `||v||_A ~ sqrt(Tr(A)/n) ||v||` and `||H^-1|| ~ 1/lambda_min`.
pub fn omega_fom_practical(
    eps_pi: f64,
    q_abs: f64,
    est: &SpectralEstimates,
    r_prev_2: f64,
    v_2: f64,
    phi: f64,
) -> Result<f64> {
    if r_prev_2 == 0.0 {
        return Err(Error::DegenerateResidual);
    }
    check_positive(&[eps_pi, q_abs, r_prev_2, v_2, phi])?;
    let n = est.n as f64;
    Ok((eps_pi * n.sqrt() * (2.0 * q_abs).sqrt() * est.lambda_min_est
        / (phi * r_prev_2 * est.trace.sqrt() * v_2))
        .min(1.0))
}

pub fn omega_cg_practical(
    eps_pi: f64,
    q_abs: f64,
    est: &SpectralEstimates,
    r_2: f64,
    p_2: f64,
    phi: f64,
) -> Result<f64> {
    if r_2 == 0.0 {
        return Err(Error::DegenerateResidual);
    }
    check_positive(&[eps_pi, q_abs, r_2, p_2, phi])?;
    let a = eps_pi * (2.0 * q_abs).sqrt() * est.trace.sqrt() * p_2;
    Ok(a / ((est.n as f64).sqrt() * phi * r_2 * r_2 + a))
}

/// Source of the norms entering the accuracy formulas.
enum Gauge<'a> {
    True { problem: &'a QuadraticProblem, b_dual: f64 },
    Estimated { est: SpectralEstimates, b_first: f64 },
}

impl<'a> Gauge<'a> {
    fn new(
        problem: &'a QuadraticProblem,
        est: &SpectralEstimates,
        mode: Mode,
        first: FirstEstimate,
    ) -> Result<Self> {
        let b2 = problem.rhs().norm2();
        Ok(match mode {
            Mode::Practical => Gauge::Estimated {
                est: *est,
                b_first: match first {
                    FirstEstimate::InverseSqrtLambdaMax => b2 / est.lambda_max_est.sqrt(),
                    FirstEstimate::TwoNormTimesLambdaMax => (2.0 * b2 * est.lambda_max_est).sqrt(),
                },
            },
            _ => Gauge::True { problem, b_dual: dual_norm(problem.cholesky(), problem.rhs())? },
        })
    }

    /// `||b||_{A^-1}` given the latest recurred quadratic value, if any.
    fn b_dual(&self, q_latest: Option<f64>) -> f64 {
        match self {
            Gauge::True { b_dual, .. } => *b_dual,
            Gauge::Estimated { b_first, .. } => match q_latest {
                Some(q) if q != 0.0 => (2.0 * q.abs()).sqrt(),
                _ => *b_first,
            },
        }
    }

    fn a_norm(&self, u: &[f64]) -> Result<f64> {
        match self {
            Gauge::True { problem, .. } => energy_norm(problem.matrix(), u),
            Gauge::Estimated { est, .. } => Ok((est.trace / est.n as f64).sqrt() * norm2(u)),
        }
    }

    fn norm_mode(&self) -> NormMode {
        match self {
            Gauge::True { .. } => NormMode::PrimalDual,
            Gauge::Estimated { .. } => NormMode::TwoNormRelative,
        }
    }
}

/// Shared per-run bookkeeping for both methods.
struct Driver<'a> {
    problem: &'a QuadraticProblem,
    config: &'a SolverConfig,
    est: SpectralEstimates,
    gauge: Gauge<'a>,
    budget: BudgetState,
    q_hist: Vec<f64>,
    b_dual_true: f64,
}

impl<'a> Driver<'a> {
    fn new(
        problem: &'a QuadraticProblem,
        budget: BudgetState,
        est: &SpectralEstimates,
        config: &'a SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        if est.n != problem.order() {
            return Err(Error::DimensionMismatch { expected: problem.order(), found: est.n });
        }
        Ok(Self {
            problem,
            config,
            est: *est,
            gauge: Gauge::new(problem, est, config.mode, config.first_estimate)?,
            budget,
            q_hist: vec![0.0],
            b_dual_true: dual_norm(problem.cholesky(), problem.rhs())?,
        })
    }

    fn phi(&self) -> f64 {
        match self.config.phi_policy {
            PhiPolicy::Managed => self.budget.phi_current,
            PhiPolicy::ConstantN => self.problem.order() as f64,
        }
    }

    fn request(&self, omega: f64) -> Result<AccuracyRequest> {
        match self.config.mode {
            Mode::Exact => Ok(AccuracyRequest::exact()),
            _ => AccuracyRequest::new(omega, self.gauge.norm_mode()),
        }
    }

    fn charge(&mut self, phi_hat: impl FnOnce() -> Result<f64>) -> Result<()> {
        if self.config.mode != Mode::Exact && self.config.phi_policy == PhiPolicy::Managed {
            self.budget.update(phi_hat()?);
        }
        Ok(())
    }

    /// Mode-specific stopping rule after `k` products with recurred value `q`
    /// and recurred residual dual norm `r_dual`.
    fn converged(&self, k: usize, q: f64, r_dual: f64) -> Option<TerminationReason> {
        match self.config.mode {
            Mode::Practical => {
                let d = self.config.delay;
                (k > d && self.q_hist[k - d] - q <= 0.25 * self.config.eps * q.abs())
                    .then_some(TerminationReason::DelayTest)
            }
            _ => {
                (r_dual <= self.config.eps_pi() * self.b_dual_true).then_some(TerminationReason::DualNormTest)
            }
        }
    }

    fn error_energy(&self, x: &[f64]) -> Result<f64> {
        let mut e = x.to_vec();
        axpy(-1.0, self.problem.x_star(), &mut e);
        energy_norm(self.problem.matrix(), &e)
    }

    fn spent(&self) -> f64 {
        match (self.config.mode, self.config.phi_policy) {
            (Mode::Exact, _) | (_, PhiPolicy::ConstantN) => 0.0,
            _ => self.budget.spent(),
        }
    }
}

fn empty_report(n: usize, k_max: usize) -> SolveReport {
    SolveReport {
        x_final: Vector::zeros(n),
        n_it: 0,
        total_cost: 0.0,
        termination_reason: TerminationReason::ResidualSmall,
        trace: Vec::new(),
        r_recurred: Vector::zeros(n),
        q_recurred: 0.0,
        k_max,
        budget_spent: 0.0,
        fom_basis: None,
        cg_audit: None,
    }
}

/// `sum_j c_j v_j` over the first `c.len()` basis vectors.
fn combine(v: &[Vec<f64>], c: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (vj, cj) in v.iter().zip(c) {
        axpy(*cj, vj, &mut x);
    }
    x
}

/// Inexact FOM with modified Gram-Schmidt Arnoldi.
pub fn solve_fom(
    problem: &QuadraticProblem,
    oracle: &mut dyn ProductOracle,
    budget: BudgetState,
    estimates: &SpectralEstimates,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let n = problem.order();
    let b = problem.rhs();
    let beta = b.norm2();
    let k_max = budget.k_max;
    if beta == 0.0 {
        return Ok(empty_report(n, k_max));
    }
    let mut drv = Driver::new(problem, budget, estimates, config)?;
    let eps_pi = config.eps_pi();
    let hinv = 1.0 / drv.est.lambda_min_est;

    let mut v: Vec<Vec<f64>> = vec![b.iter().map(|e| e / beta).collect()];
    let mut z = vec![beta];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut y = Vec::new();
    let mut w = Vec::new();
    let mut r_prev = beta;
    let mut trace = Vec::new();
    let mut reason = TerminationReason::MaxIterations;

    for k in 1..=config.k_max_user {
        let vk = &v[k - 1];
        let phi = drv.phi();
        let q_latest = (k > 1).then(|| drv.q_hist[k - 1]);
        let b_est = drv.gauge.b_dual(q_latest);
        let v_a = drv.gauge.a_norm(vk)?;
        let omega = match config.mode {
            Mode::Exact => 0.0,
            _ => omega_fom_theoretical(eps_pi, b_est, v_a, hinv, r_prev, phi)?,
        };
        let out = oracle.apply(vk, drv.request(omega)?)?;

        w = out.product.into_inner();
        let w_norm0 = norm2(&w);
        let mut col = vec![0.0; k + 1];
        for (i, vi) in v.iter().enumerate() {
            let h = dot(vi, &w);
            axpy(-h, vi, &mut w);
            col[i] = h;
        }
        let h_next = norm2(&w);
        col[k] = h_next;
        cols.push(col);

        let hk = HessenbergMatrix::from_columns(k, &cols);
        let mut rhs = vec![0.0; k];
        rhs[0] = beta;
        y = hessenberg_solve(&hk, &rhs)?.into_inner();
        let q = -0.5 * dot(&z, &y);
        let r_norm = h_next * y[k - 1].abs();

        // V_{k+1} H~_k y - b, with h_{k+1,k} v_{k+1} = w
        let hy = hk.matvec(&y)?;
        let mut r = combine(&v, &hy, n);
        axpy(y[k - 1], &w, &mut r);
        axpy(-1.0, b, &mut r);
        let r_dual = dual_norm(problem.cholesky(), &r)?;

        let error_energy_norm =
            if config.diagnostics { Some(drv.error_energy(&combine(&v, &y, n))?) } else { None };
        trace.push(IterationRecord {
            k,
            omega_requested: omega,
            omega_hat: out.omega_hat,
            cost: out.cost,
            level: out.level,
            q_k: q,
            r_2norm: r_norm,
            r_dual_norm: r_dual,
            phi_k: phi,
            error_energy_norm,
        });

        let stop = drv.converged(k, q, r_dual);
        drv.q_hist.push(q);
        if let Some(why) = stop {
            reason = why;
            break;
        }
        // at k = n the Krylov space is the whole space and w is rounding noise
        if k == n || h_next <= n as f64 * EPS_M * w_norm0 {
            reason = TerminationReason::Breakdown;
            break;
        }
        if r_norm <= EPS_M * beta {
            reason = TerminationReason::ResidualSmall;
            break;
        }
        let omega_hat = out.omega_hat;
        drv.charge(|| phi_hat_fom(eps_pi, b_est, omega_hat, v_a, hinv, r_prev))?;

        let v_next: Vec<f64> = w.iter().map(|e| e / h_next).collect();
        z.push(dot(&v_next, b));
        v.push(v_next);
        r_prev = r_norm;
    }

    let k = y.len();
    let x = combine(&v, &y, n);
    let hy = HessenbergMatrix::from_columns(k, &cols).matvec(&y)?;
    let mut r = combine(&v, &hy, n);
    axpy(y[k - 1], &w, &mut r);
    axpy(-1.0, b, &mut r);

    Ok(SolveReport {
        x_final: Vector::new(x)?,
        n_it: trace.len(),
        total_cost: trace.iter().map(|t| t.cost).sum(),
        termination_reason: reason,
        q_recurred: *drv.q_hist.last().unwrap_or(&0.0),
        k_max,
        budget_spent: drv.spent(),
        fom_basis: config.diagnostics.then(|| FomBasis {
            v: v.iter().map(|c| Vector::from_raw(c.clone())).collect(),
            h_columns: cols.clone(),
        }),
        cg_audit: None,
        trace,
        r_recurred: Vector::new(r)?,
    })
}

/// Inexact CG, optionally reorthogonalizing each residual against all
/// previous normalized residuals.
pub fn solve_cg(
    problem: &QuadraticProblem,
    oracle: &mut dyn ProductOracle,
    budget: BudgetState,
    estimates: &SpectralEstimates,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let n = problem.order();
    let b = problem.rhs();
    let beta0 = b.norm2();
    let k_max = budget.k_max;
    if beta0 == 0.0 {
        return Ok(empty_report(n, k_max));
    }
    let mut drv = Driver::new(problem, budget, estimates, config)?;
    let eps_pi = config.eps_pi();

    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = b.iter().map(|e| -e).collect();
    let mut p = b.to_vec();
    let mut beta = beta0;
    let mut u: Vec<Vec<f64>> =
        if config.reorth { vec![b.iter().map(|e| e / beta0).collect()] } else { Vec::new() };
    let mut audit = CgAudit::default();
    let mut injected_sum = vec![0.0; n];
    let mut trace = Vec::new();
    let mut reason = TerminationReason::MaxIterations;

    for k in 0..config.k_max_user {
        let phi = drv.phi();
        let q_latest = (k > 0).then(|| drv.q_hist[k]);
        let b_est = drv.gauge.b_dual(q_latest);
        let p_a = drv.gauge.a_norm(&p)?;
        let omega = match config.mode {
            Mode::Exact => 0.0,
            _ => omega_cg_theoretical(eps_pi, b_est, p_a, beta, phi)?,
        };
        let out = oracle.apply(&p, drv.request(omega)?)?;
        let c = out.product.as_slice();
        let curvature = dot(&p, c);
        if !(curvature > 0.0) {
            return Err(Error::IndefiniteCurvature { iteration: k, value: curvature });
        }
        let alpha = beta * beta / curvature;
        axpy(alpha, &p, &mut x);
        let q = -0.5 * dot(b, &x);
        axpy(alpha, c, &mut r);
        if config.reorth {
            for ui in &u {
                let s = dot(ui, &r);
                axpy(-s, ui, &mut r);
            }
        }
        let beta_next = norm2(&r);
        if config.reorth && beta_next > 0.0 {
            u.push(r.iter().map(|e| e / beta_next).collect());
        }
        if config.diagnostics {
            axpy(alpha, &out.injected_error, &mut injected_sum);
            let mut g = problem.matrix().matvec(&x)?.into_inner();
            axpy(-1.0, b, &mut g);
            axpy(-1.0, &r, &mut g);
            axpy(1.0, &injected_sum, &mut g);
            audit.gap_identity.push(norm2(&g));
            audit.alphas.push(alpha);
            audit.injections.push(out.injected_error.clone());
        }
        let r_dual = dual_norm(problem.cholesky(), &r)?;
        trace.push(IterationRecord {
            k: k + 1,
            omega_requested: omega,
            omega_hat: out.omega_hat,
            cost: out.cost,
            level: out.level,
            q_k: q,
            r_2norm: beta_next,
            r_dual_norm: r_dual,
            phi_k: phi,
            error_energy_norm: if config.diagnostics { Some(drv.error_energy(&x)?) } else { None },
        });

        let stop = drv.converged(k + 1, q, r_dual);
        drv.q_hist.push(q);
        if let Some(why) = stop {
            reason = why;
            break;
        }
        if beta_next <= EPS_M * beta0 {
            reason = TerminationReason::ResidualSmall;
            break;
        }
        let omega_hat = out.omega_hat;
        drv.charge(|| phi_hat_cg(eps_pi, b_est, omega_hat, p_a, beta))?;

        let ratio = (beta_next / beta).powi(2);
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = -ri + ratio * *pi;
        }
        beta = beta_next;
    }

    Ok(SolveReport {
        x_final: Vector::new(x)?,
        n_it: trace.len(),
        total_cost: trace.iter().map(|t| t.cost).sum(),
        termination_reason: reason,
        q_recurred: *drv.q_hist.last().unwrap_or(&0.0),
        k_max,
        budget_spent: drv.spent(),
        fom_basis: None,
        cg_audit: config.diagnostics.then_some(audit),
        trace,
        r_recurred: Vector::new(r)?,
    })
}

/// Runs `config.method`, deriving the budget from `estimates`.
pub fn solve(
    problem: &QuadraticProblem,
    oracle: &mut dyn ProductOracle,
    estimates: &SpectralEstimates,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let k_spec = crate::budget::k_max_spectral(config.eps, estimates)?;
    let budget = BudgetState::init(config.k_max_user, k_spec);
    match config.method {
        Method::Fom => solve_fom(problem, oracle, budget, estimates, config),
        Method::Cg => solve_cg(problem, oracle, budget, estimates, config),
    }
}

/// `r(x_k) - r_k + sum_j alpha_j E_j p_j`, which vanishes up to rounding for
/// CG without reorthogonalization.
pub fn residual_gap_audit(
    problem: &QuadraticProblem,
    x: &[f64],
    r_recurred: &[f64],
    alphas: &[f64],
    injections: &[Vector],
) -> Result<Vector> {
    let mut g = problem.matrix().matvec(x)?.into_inner();
    axpy(-1.0, problem.rhs(), &mut g);
    axpy(-1.0, r_recurred, &mut g);
    for (alpha, e) in alphas.iter().zip(injections) {
        axpy(*alpha, e, &mut g);
    }
    Vector::new(g)
}
