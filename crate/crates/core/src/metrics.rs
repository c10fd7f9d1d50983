//! Ground-truth quality measures of a solve, all relative to `|q(x_*)|`.

use crate::dense::{axpy, check_len, dual_norm, Vector};
use crate::error::Result;
use crate::problems::QuadraticProblem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    /// `1/2 ||r(x) - r||^2_{A^-1} / |q_*|`
    pub r_res_gap: f64,
    /// `(q(x) - q_*) / |q_*|`
    pub r_sol_err: f64,
    /// `|q(x) - q| / |q_*|`
    pub r_val_err: f64,
}

/// `A x - b` with an exact product.
pub fn true_residual(problem: &QuadraticProblem, x: &[f64]) -> Result<Vector> {
    let mut r = problem.matrix().matvec(x)?.into_inner();
    axpy(-1.0, problem.rhs(), &mut r);
    Vector::new(r)
}

pub fn evaluate(
    problem: &QuadraticProblem,
    x: &[f64],
    r_recurred: &[f64],
    q_recurred: f64,
) -> Result<EvalResult> {
    check_len(problem.order(), r_recurred.len())?;
    let q_abs = problem.q_star().abs();
    let mut gap = true_residual(problem, x)?.into_inner();
    axpy(-1.0, r_recurred, &mut gap);
    let g = dual_norm(problem.cholesky(), &gap)?;
    let qx = problem.objective(x)?;
    Ok(EvalResult {
        r_res_gap: 0.5 * g * g / q_abs,
        r_sol_err: (qx - problem.q_star()) / q_abs,
        r_val_err: (qx - q_recurred).abs() / q_abs,
    })
}
