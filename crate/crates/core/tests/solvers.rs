use inexact_krylov::dense::{cholesky, dual_norm, SpectralEstimates, SymMatrix, Vector, EPS_M};
use inexact_krylov::oracle::{Oracle, OracleKind};
use inexact_krylov::problems::{gen_synthetic, QuadraticProblem, SpectrumSpec};
use inexact_krylov::solvers::{solve, Method, Mode, SolveReport, SolverConfig, TerminationReason};
use proptest::prelude::*;

fn run(
    p: &QuadraticProblem,
    kind: OracleKind,
    mode: Mode,
    method: Method,
    reorth: bool,
    eps: f64,
) -> SolveReport {
    let est = p.spectral_true();
    let mut cfg = SolverConfig::new(eps, p.order(), mode, method).unwrap();
    cfg.reorth = reorth;
    cfg.diagnostics = true;
    let mut oracle = Oracle::for_problem(kind, p, est, 7);
    solve(p, &mut oracle, &est, &cfg).unwrap()
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|e| e.to_bits()).collect()
}

#[test]
fn zero_injection_fom_is_bitwise_exact() {
    for kappa in [1e1, 1e2, 1e3] {
        let p = gen_synthetic(SpectrumSpec::new(80, kappa), 4).unwrap();
        let exact = run(&p, OracleKind::Exact, Mode::Exact, Method::Fom, false, 1e-5);
        for mode in [Mode::Theoretical, Mode::Practical] {
            let zero = run(&p, OracleKind::ZeroInjection, mode, Method::Fom, false, 1e-5);
            let (a, b) = (exact.fom_basis.as_ref().unwrap(), zero.fom_basis.as_ref().unwrap());
            let k = a.h_columns.len().min(b.h_columns.len());
            assert!(k >= 5);
            for j in 0..k {
                assert_eq!(bits(&a.v[j]), bits(&b.v[j]));
                assert_eq!(bits(&a.h_columns[j]), bits(&b.h_columns[j]));
                assert_eq!(exact.trace[j].q_k.to_bits(), zero.trace[j].q_k.to_bits());
            }
            assert!(zero.total_cost < exact.total_cost);
        }
    }
}

#[test]
fn zero_injection_cg_is_bitwise_exact() {
    for reorth in [false, true] {
        let p = gen_synthetic(SpectrumSpec::new(80, 1e3), 5).unwrap();
        let exact = run(&p, OracleKind::Exact, Mode::Exact, Method::Cg, reorth, 1e-5);
        for mode in [Mode::Theoretical, Mode::Practical] {
            let zero = run(&p, OracleKind::ZeroInjection, mode, Method::Cg, reorth, 1e-5);
            let (a, b) = (exact.cg_audit.as_ref().unwrap(), zero.cg_audit.as_ref().unwrap());
            let k = a.alphas.len().min(b.alphas.len());
            assert_eq!(bits(&a.alphas[..k]), bits(&b.alphas[..k]));
            for j in 0..k {
                assert_eq!(exact.trace[j].q_k.to_bits(), zero.trace[j].q_k.to_bits());
                assert_eq!(exact.trace[j].r_2norm.to_bits(), zero.trace[j].r_2norm.to_bits());
                assert!(b.injections[j].iter().all(|e| *e == 0.0));
            }
            if exact.n_it == zero.n_it {
                assert_eq!(bits(&exact.x_final), bits(&zero.x_final));
            }
        }
    }
}

#[test]
fn exact_fom_and_cgr_share_iterates() {
    for kappa in [1e1, 1e2, 1e3] {
        let p = gen_synthetic(SpectrumSpec::new(200, kappa), 1).unwrap();
        let fom = run(&p, OracleKind::Exact, Mode::Exact, Method::Fom, false, 1e-3);
        let cgr = run(&p, OracleKind::Exact, Mode::Exact, Method::Cg, true, 1e-3);
        assert_eq!(fom.n_it, cgr.n_it);
        for (f, c) in fom.trace.iter().zip(&cgr.trace) {
            let (ef, ec) = (f.error_energy_norm.unwrap(), c.error_energy_norm.unwrap());
            assert!((ef - ec).abs() <= 1e-8 * ef, "kappa {kappa:e} k {}: {ef} vs {ec}", f.k);
        }
    }
}

#[test]
fn theoretical_runs_meet_the_dual_norm_test() {
    let p = gen_synthetic(SpectrumSpec::new(100, 1e3), 2).unwrap();
    let b_dual = dual_norm(p.cholesky(), p.rhs()).unwrap();
    for (method, reorth) in [(Method::Fom, false), (Method::Cg, false), (Method::Cg, true)] {
        let rep = run(&p, OracleKind::Continuous, Mode::Theoretical, method, reorth, 1e-4);
        assert_eq!(rep.termination_reason, TerminationReason::DualNormTest);
        let last = rep.trace.last().unwrap();
        assert!(last.r_dual_norm <= 0.5 * 1e-2 * b_dual);
        assert!(rep.trace.iter().all(|t| t.omega_hat == t.omega_requested.max(EPS_M)));
    }
}

fn random_spd(n: usize, diag: &[f64], off: &[f64]) -> QuadraticProblem {
    // diagonally dominant, hence SPD
    let a = SymMatrix::from_lower_fn(n, |i, j| if i == j { diag[i] + n as f64 } else { off[i * 10 + j] });
    let b = Vector::new((0..n).map(|i| 1.0 + i as f64).collect()).unwrap();
    let chol = cholesky(&a).unwrap();
    let est = inexact_krylov::problems::estimate_spectrum(&a, &chol, 1);
    let est = SpectralEstimates::new(est.lambda_min_est, est.lambda_max_est, a.trace(), n).unwrap();
    QuadraticProblem::new("spd", a, b, est).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_methods_solve_small_spd_systems(
        n in 2usize..10,
        diag in proptest::collection::vec(0.0f64..5.0, 10),
        off in proptest::collection::vec(-1.0f64..1.0, 100),
    ) {
        let p = random_spd(n, &diag, &off);
        for (method, reorth) in [(Method::Fom, false), (Method::Cg, false), (Method::Cg, true)] {
            let rep = run(&p, OracleKind::Exact, Mode::Exact, method, reorth, 1e-10);
            prop_assert!(rep.n_it <= n + 1);
            let sol_err = (p.objective(&rep.x_final).unwrap() - p.q_star()) / p.q_star().abs();
            prop_assert!(sol_err <= 1e-9, "{method:?} {sol_err}");
        }
    }

    #[test]
    fn exact_cg_error_decreases(seed in 0u64..200, kappa in 2.0f64..1e3) {
        let p = gen_synthetic(SpectrumSpec::new(30, kappa), seed).unwrap();
        // without reorthogonalization -b'x/2 drifts from q(x) once orthogonality is lost,
        // while the energy error stays monotone
        let cg = run(&p, OracleKind::Exact, Mode::Exact, Method::Cg, false, 1e-6);
        for w in cg.trace.windows(2) {
            prop_assert!(w[1].error_energy_norm.unwrap() <= w[0].error_energy_norm.unwrap() * (1.0 + 1e-8));
        }
        let cgr = run(&p, OracleKind::Exact, Mode::Exact, Method::Cg, true, 1e-6);
        for w in cgr.trace.windows(2) {
            prop_assert!(w[1].q_k <= w[0].q_k + 1e-12 * p.q_star().abs());
        }
    }
}
