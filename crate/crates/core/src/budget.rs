//! Inaccuracy budget management.
//!
//! The weights `phi_j` split the allowed residual-gap growth across iterations
//! under the constraint `sum 1/phi_j <= 1`. Only the running weight for the
//! next iteration and the unspent fraction `Phi = 1 - sum 1/phi_hat` are kept.
//! When a product turns out more accurate than requested, its actual spend
//! `1/phi_hat` is smaller than planned and the surplus is redistributed over
//! the remaining expected iterations.

use crate::dense::SpectralEstimates;
use crate::error::{Error, Result};

/// Expected iteration count from the classical CG convergence rate,
/// `ceil(log(eps) / log(rho))` with `rho = (sqrt(kappa) - 1) / (sqrt(kappa) + 1)`.
pub fn k_max_spectral(eps: f64, est: &SpectralEstimates) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidAccuracy(eps));
    }
    let kappa = est.condition();
    if kappa <= 1.0 + 1e-12 {
        return Ok(1);
    }
    let s = kappa.sqrt();
    let rho = (s - 1.0) / (s + 1.0);
    let k = (eps.ln() / rho.ln()).ceil();
    Ok((k as usize).max(1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetState {
    pub k_max: usize,
    /// Weight for the next iteration.
    pub phi_current: f64,
    /// `1 - sum 1/phi_hat` over the iterations spent so far.
    pub phi_remaining: f64,
    pub iterations_used: usize,
}

impl BudgetState {
    pub fn init(k_max_user: usize, k_max_spec: usize) -> Self {
        let k_max = k_max_user.min(k_max_spec).max(1);
        Self { k_max, phi_current: k_max as f64, phi_remaining: 1.0, iterations_used: 0 }
    }

    /// Accumulated spend `sum 1/phi_hat`.
    pub fn spent(&self) -> f64 {
        1.0 - self.phi_remaining
    }

    /// Records the spend of one iteration and recomputes the weight for the
    /// next one. Past `k_max`, or once the budget is exhausted, the weight is
    /// frozen.
    pub fn update(&mut self, phi_hat: f64) {
        debug_assert!(phi_hat > 0.0);
        self.phi_remaining -= 1.0 / phi_hat;
        self.iterations_used += 1;
        if self.iterations_used < self.k_max && self.phi_remaining > 0.0 {
            self.phi_current = (self.k_max - self.iterations_used) as f64 / self.phi_remaining;
        }
    }
}

pub fn budget_init(k_max_user: usize, k_max_spec: usize) -> BudgetState {
    BudgetState::init(k_max_user, k_max_spec)
}

pub fn budget_update(mut state: BudgetState, phi_hat: f64) -> BudgetState {
    state.update(phi_hat);
    state
}

/// Weight actually consumed by a FOM product of accuracy `omega_hat`:
/// `eps_pi ||b||_{A^-1} / (omega_hat ||v||_A ||H^-1|| ||r_prev||)`.
pub fn phi_hat_fom(
    eps_pi: f64,
    b_dual_norm_est: f64,
    omega_hat: f64,
    v_a_norm_est: f64,
    hinv_norm_est: f64,
    r_prev_2norm: f64,
) -> Result<f64> {
    if r_prev_2norm == 0.0 {
        return Err(Error::DegenerateResidual);
    }
    Ok(eps_pi * b_dual_norm_est / (omega_hat * v_a_norm_est * hinv_norm_est * r_prev_2norm))
}

/// Weight actually consumed by a CG product of accuracy `omega_hat`:
/// `(1 - omega_hat) eps_pi ||b||_{A^-1} ||p||_A / (omega_hat ||r||^2)`.
pub fn phi_hat_cg(
    eps_pi: f64,
    b_dual_norm_est: f64,
    omega_hat: f64,
    p_a_norm_est: f64,
    r_2norm: f64,
) -> Result<f64> {
    if r_2norm == 0.0 {
        return Err(Error::DegenerateResidual);
    }
    Ok((1.0 - omega_hat) * eps_pi * b_dual_norm_est * p_a_norm_est / (omega_hat * r_2norm * r_2norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn est(kappa: f64) -> SpectralEstimates {
        SpectralEstimates::new(1.0 / kappa, 1.0, 10.0, 100).unwrap()
    }

    #[test]
    fn k_max_examples() {
        // log(1e-3)/log(9/11) = 34.42..., log(1e-3)/log(99/101) = 345.4...
        let direct = |eps: f64, kappa: f64| {
            let s: f64 = kappa.sqrt();
            (eps.ln() / ((s - 1.0) / (s + 1.0)).ln()).ceil() as usize
        };
        assert_eq!(direct(1e-3, 1e2), 35);
        assert_eq!(direct(1e-3, 1e4), 346);
        assert_eq!(k_max_spectral(1e-3, &est(1e2)).unwrap(), 35);
        assert_eq!(k_max_spectral(1e-3, &est(1e4)).unwrap(), 346);
        assert_eq!(k_max_spectral(1e-3, &est(1.0)).unwrap(), 1);
        assert!(matches!(k_max_spectral(1.0, &est(10.0)), Err(Error::InvalidAccuracy(_))));
        assert!(k_max_spectral(0.0, &est(10.0)).is_err());
    }

    #[test]
    fn init_examples() {
        let s = budget_init(3000, 35);
        assert_eq!((s.k_max, s.phi_current, s.phi_remaining, s.iterations_used), (35, 35.0, 1.0, 0));
        assert_eq!(budget_init(1, 100).k_max, 1);
        assert_eq!(budget_init(10, 10).k_max, 10);
    }

    #[test]
    fn phi_hat_examples() {
        assert_eq!(phi_hat_fom(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap(), 1.0);
        let base = phi_hat_fom(0.3, 1.2, 0.2, 0.7, 5.0, 0.1).unwrap();
        assert_relative_eq!(phi_hat_fom(0.3, 1.2, 0.1, 0.7, 5.0, 0.1).unwrap(), 2.0 * base);
        let eps_pi = 0.5 * 1e-3f64.sqrt();
        // 0.0158 / (1e-3 * 1 * 10 * 0.1) = 15.8
        assert_relative_eq!(
            phi_hat_fom(eps_pi, 1.0, 1e-3, 1.0, 10.0, 0.1).unwrap(),
            15.811,
            max_relative = 1e-4
        );
        assert!(matches!(phi_hat_fom(1.0, 1.0, 1.0, 1.0, 1.0, 0.0), Err(Error::DegenerateResidual)));

        // 0.5 * 0.0158 * 1 * 1 / (0.5 * 0.01) = 1.58
        assert_relative_eq!(phi_hat_cg(eps_pi, 1.0, 0.5, 1.0, 0.1).unwrap(), 1.5811, max_relative = 1e-4);
        let a = phi_hat_cg(eps_pi, 1.0, 0.3, 1.0, 0.1).unwrap();
        assert_relative_eq!(phi_hat_cg(eps_pi, 1.0, 0.3, 1.0, 0.2).unwrap(), a / 4.0, max_relative = 1e-14);
        assert!(phi_hat_cg(eps_pi, 1.0, 1.0 - 1e-12, 1.0, 0.1).unwrap() < 1e-9);
        assert!(matches!(phi_hat_cg(1.0, 1.0, 0.5, 1.0, 0.0), Err(Error::DegenerateResidual)));
    }

    #[test]
    fn update_examples() {
        let s = budget_update(budget_init(10, 10), 10.0);
        assert_relative_eq!(s.phi_remaining, 0.9, max_relative = 1e-15);
        assert_relative_eq!(s.phi_current, 10.0, max_relative = 1e-14);

        let s = budget_update(budget_init(10, 10), 1e300);
        assert_eq!(s.phi_remaining, 1.0);
        assert_eq!(s.phi_current, 9.0);

        let mut s = budget_init(10, 10);
        s.update(2.0);
        s.update(2.0);
        assert!(s.phi_remaining <= 0.0);
        let frozen = s.phi_current;
        s.update(2.0);
        assert_eq!(s.phi_current, frozen);
    }

    proptest! {
        #[test]
        fn uniform_spending_keeps_phi(k_max in 2usize..500, steps in 1usize..500) {
            let mut s = budget_init(k_max, k_max);
            for _ in 0..steps.min(k_max - 1) {
                let phi = s.phi_current;
                s.update(phi);
                prop_assert!((s.phi_current - k_max as f64).abs() <= 1e-9 * k_max as f64);
            }
        }

        #[test]
        fn spending_no_more_than_allowed_respects_budget(
            k_max in 1usize..200,
            slack in proptest::collection::vec(1.0f64..100.0, 1..200),
        ) {
            // phi_hat >= phi means each product was at least as accurate as requested
            let mut s = budget_init(k_max, k_max);
            let mut total = 0.0;
            for f in slack.iter().take(k_max) {
                let phi_hat = s.phi_current * f;
                total += 1.0 / phi_hat;
                s.update(phi_hat);
            }
            prop_assert!(total <= 1.0 + 1e-12);
            prop_assert!(s.phi_current > 0.0);
        }

        #[test]
        fn k_max_monotone(e1 in 1e-12f64..0.9, e2 in 1e-12f64..0.9, k1 in 1.0f64..1e8, k2 in 1.0f64..1e8) {
            let (elo, ehi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let (klo, khi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
            prop_assert!(k_max_spectral(elo, &est(klo)).unwrap() >= k_max_spectral(ehi, &est(klo)).unwrap());
            prop_assert!(k_max_spectral(elo, &est(klo)).unwrap() <= k_max_spectral(elo, &est(khi)).unwrap());
        }
    }
}
