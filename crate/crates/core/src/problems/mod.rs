//! Test problems: synthetic log-spaced spectra and Matrix Market matrices,
//! each packaged with its reference solution.

mod matrix_market;

pub use matrix_market::{
    parse_matrix_market, parse_matrix_market_str, read_matrix_market, write_matrix_market, MatrixMarket,
    MmFormat, MmSymmetry,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::{
    axpy, cholesky, dot, norm2, random_orthogonal, solve_spd, CholeskyFactor, SpectralEstimates, SymMatrix,
    Vector,
};
use crate::error::{Error, Result};

/// Largest condition number accepted by the synthetic generator.
pub const MAX_KAPPA: f64 = 1e15;

/// Spectrum of a synthetic problem: `n` eigenvalues equidistant in `log10`
/// between `lambda_max / kappa` and `lambda_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumSpec {
    pub n: usize,
    pub kappa: f64,
    pub lambda_max: f64,
}

impl SpectrumSpec {
    pub fn new(n: usize, kappa: f64) -> Self {
        Self { n, kappa, lambda_max: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!("order {} < 2", self.n)));
        }
        if !(self.kappa >= 1.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidSpec(format!("condition number {:e} < 1", self.kappa)));
        }
        if self.kappa >= MAX_KAPPA {
            return Err(Error::InvalidSpec(format!("condition number {:e} too close to 1/eps", self.kappa)));
        }
        if !(self.lambda_max > 0.0) || !self.lambda_max.is_finite() {
            return Err(Error::InvalidSpec(format!("lambda_max = {:e}", self.lambda_max)));
        }
        Ok(())
    }

    /// Eigenvalues in decreasing order, `lambda_i = lambda_max * 10^(-(i-1) log10(kappa) / (n-1))`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let step = self.kappa.log10() / (self.n - 1) as f64;
        (0..self.n).map(|i| self.lambda_max * 10f64.powf(-(i as f64) * step)).collect()
    }
}

/// A convex quadratic `q(x) = 1/2 x'Ax - b'x` together with its exact minimizer.
#[derive(Clone, Debug)]
pub struct QuadraticProblem {
    pub name: String,
    a: SymMatrix,
    b: Vector,
    chol: CholeskyFactor,
    x_star: Vector,
    q_star: f64,
    spectral_true: SpectralEstimates,
}

impl QuadraticProblem {
    pub fn new(
        name: impl Into<String>,
        a: SymMatrix,
        b: Vector,
        spectral_true: SpectralEstimates,
    ) -> Result<Self> {
        crate::dense::check_len(a.order(), b.len())?;
        let chol = cholesky(&a)?;
        let mut x_star = solve_spd(&chol, &b)?;
        // one step of iterative refinement
        let mut r = b.to_vec();
        axpy(-1.0, &a.matvec_unchecked(&x_star), &mut r);
        let dx = solve_spd(&chol, &r)?;
        axpy(1.0, &dx, &mut x_star);
        let q_star = -0.5 * dot(&b, &x_star);
        Ok(Self { name: name.into(), a, b, chol, x_star, q_star, spectral_true })
    }

    /// Wraps an SPD matrix with a seeded random normalized right-hand side;
    /// spectral information is obtained by power and inverse iteration.
    pub fn from_matrix(name: impl Into<String>, a: SymMatrix, rhs_seed: u64) -> Result<Self> {
        let chol = cholesky(&a)?;
        let spectral = estimate_spectrum(&a, &chol, rhs_seed);
        let b = random_unit_vector(a.order(), rhs_seed, 1);
        Self::new(name, a, b, spectral)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &Vector {
        &self.b
    }

    pub fn cholesky(&self) -> &CholeskyFactor {
        &self.chol
    }

    pub fn x_star(&self) -> &Vector {
        &self.x_star
    }

    /// `q(x_*) = -1/2 b'x_*`, negative whenever `b != 0`.
    pub fn q_star(&self) -> f64 {
        self.q_star
    }

    pub fn spectral_true(&self) -> SpectralEstimates {
        self.spectral_true
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    /// `q(x)` evaluated with an exact product.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let ax = self.a.matvec(x)?;
        Ok(0.5 * dot(x, &ax) - dot(&self.b, x))
    }
}

fn random_unit_vector(n: usize, seed: u64, stream: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nrm = norm2(&v);
    v.iter_mut().for_each(|e| *e /= nrm);
    Vector::from_raw(v)
}

/// Builds `A = Q diag(lambda) Q'` with a seeded random orthogonal `Q` and a
/// seeded random right-hand side of unit Euclidean norm.
pub fn gen_synthetic(spec: SpectrumSpec, seed: u64) -> Result<QuadraticProblem> {
    spec.validate()?;
    let lambdas = spec.eigenvalues();
    let q = random_orthogonal(spec.n, seed);
    let a = SymMatrix::from_spectrum(&q, &lambdas)?;
    let b = random_unit_vector(spec.n, seed, 1);
    let spectral =
        SpectralEstimates::new(spec.lambda_max / spec.kappa, spec.lambda_max, lambdas.iter().sum(), spec.n)?;
    let name = format!("synth-n{}-k{:.0e}", spec.n, spec.kappa);
    QuadraticProblem::new(name, a, b, spectral)
}

/// Extreme eigenvalues by power iteration on `A` and inverse iteration
/// through the Cholesky factor, stopped on a small eigen-residual.
pub fn estimate_spectrum(a: &SymMatrix, chol: &CholeskyFactor, seed: u64) -> SpectralEstimates {
    const MAX_ITER: usize = 5000;
    const RTOL: f64 = 1e-8;
    let n = a.order();
    let start = random_unit_vector(n, seed, 7);

    let rayleigh_power = |apply: &dyn Fn(&[f64]) -> Vec<f64>| {
        let mut v = start.to_vec();
        let mut mu = 0.0;
        for _ in 0..MAX_ITER {
            let w = apply(&v);
            mu = dot(&v, &w);
            let nrm = norm2(&w);
            if nrm == 0.0 {
                break;
            }
            // ||A v - mu v|| bounds the distance of mu to the spectrum
            let res = w.iter().zip(&v).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt();
            v = w.into_iter().map(|e| e / nrm).collect();
            if res <= RTOL * mu.abs() {
                break;
            }
        }
        mu
    };

    let lambda_max = rayleigh_power(&|v| a.matvec_unchecked(v));
    let inv_min = rayleigh_power(&|v| {
        solve_spd(chol, v).map(Vector::into_inner).unwrap_or_else(|_| vec![0.0; v.len()])
    });
    let lambda_min = if inv_min > 0.0 { 1.0 / inv_min } else { lambda_max };
    let lambda_max = lambda_max.max(lambda_min);
    SpectralEstimates { lambda_min_est: lambda_min, lambda_max_est: lambda_max, trace: a.trace(), n }
}

/// Scales `value` up or down by `1 + u`.
pub(crate) fn perturb_value(value: f64, u: f64, multiply: bool) -> f64 {
    if multiply {
        value * (1.0 + u)
    } else {
        value / (1.0 + u)
    }
}

/// Random relative perturbation of the extreme-eigenvalue estimates by a
/// factor in `[1, 2]`, applied upwards or downwards with equal probability.
pub fn perturb_estimates(true_est: SpectralEstimates, seed: u64) -> SpectralEstimates {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    perturb_estimates_with(true_est, &mut rng)
}

pub fn perturb_estimates_with<R: Rng + ?Sized>(
    true_est: SpectralEstimates,
    rng: &mut R,
) -> SpectralEstimates {
    let mut draw = |v: f64| {
        let u: f64 = rng.random();
        let up: bool = rng.random_bool(0.5);
        perturb_value(v, u, up)
    };
    let lo = draw(true_est.lambda_min_est);
    let hi = draw(true_est.lambda_max_est);
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    SpectralEstimates { lambda_min_est: lo, lambda_max_est: hi, ..true_est }
}
