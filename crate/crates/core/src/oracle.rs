//! Inexact matrix-vector products with a requested accuracy.
//!
//! An oracle answers `(A + E) p` where the error `E` respects a requested
//! bound `omega`, either relative to the smallest eigenvalue in the Euclidean
//! norm (`||E||_2 <= omega * lambda_min`) or in the primal-dual norm
//! `||E||_{A^-1,A} <= omega`. The error is realized as a random-direction
//! vector `e = E p` whose size saturates the bound, which corresponds to the
//! rank-one perturbation `E = e (Mp)' / (p'Mp)` with `M = I` or `M = A`.
//! Each product is charged a cost in units of full-accuracy products.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::{
    check_len, dual_norm, energy_norm, norm2, CholeskyFactor, SpectralEstimates, SymMatrix, Vector, EPS_M,
};
use crate::error::{Error, Result};
use crate::problems::QuadraticProblem;

/// The norm in which a requested accuracy is expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    /// `||E||_2 / lambda_min(A) <= omega`
    TwoNormRelative,
    /// `||E||_{A^-1,A} <= omega`
    PrimalDual,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccuracyRequest {
    pub omega: f64,
    pub norm_mode: NormMode,
}

impl AccuracyRequest {
    pub fn new(omega: f64, norm_mode: NormMode) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::OutOfRange { value: omega, lo: 0.0, hi: 1.0 });
        }
        Ok(Self { omega, norm_mode })
    }

    pub fn exact() -> Self {
        Self { omega: 0.0, norm_mode: NormMode::TwoNormRelative }
    }
}

/// Floating-point formats available to the multi-precision oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrecisionLevel {
    Double,
    Single,
    Half,
}

impl PrecisionLevel {
    pub const ALL: [PrecisionLevel; 3] = [Self::Double, Self::Single, Self::Half];

    /// Relative accuracy: unit roundoff, its square root and its fourth root.
    pub fn accuracy(self) -> f64 {
        match self {
            Self::Double => EPS_M,
            Self::Single => EPS_M.sqrt(),
            Self::Half => EPS_M.sqrt().sqrt(),
        }
    }

    pub fn cost(self) -> f64 {
        match self {
            Self::Double => 1.0,
            Self::Single => 0.25,
            Self::Half => 0.0625,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Double => "double",
            Self::Single => "single",
            Self::Half => "half",
        }
    }

    /// Cheapest level whose accuracy still meets `omega`; double if none does.
    pub fn select(omega: f64) -> Self {
        [Self::Half, Self::Single].into_iter().find(|level| level.accuracy() <= omega).unwrap_or(Self::Double)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductOutcome {
    /// `(A + E) p`
    pub product: Vector,
    /// Accuracy actually delivered, never above the request (except for the `EPS_M` floor).
    pub omega_hat: f64,
    /// `E p`, kept for audits.
    pub injected_error: Vector,
    pub cost: f64,
    pub level: Option<PrecisionLevel>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CostLedger {
    pub total: f64,
    pub per_iteration: Vec<f64>,
}

impl CostLedger {
    pub fn charge(&mut self, cost: f64) {
        debug_assert!(cost >= 0.0);
        self.total += cost;
        self.per_iteration.push(cost);
    }
}

/// Cost of a product of accuracy `omega_hat` relative to a full-accuracy
/// product, `log(omega_hat) / log(EPS_M)`.
pub fn cost_continuous(omega_hat: f64) -> Result<f64> {
    if !(EPS_M..=1.0).contains(&omega_hat) {
        return Err(Error::OutOfRange { value: omega_hat, lo: EPS_M, hi: 1.0 });
    }
    Ok((omega_hat.ln() / EPS_M.ln()).clamp(0.0, 1.0))
}

pub fn product_exact(a: &SymMatrix, p: &[f64]) -> Result<ProductOutcome> {
    let product = a.matvec(p)?;
    Ok(ProductOutcome {
        product,
        omega_hat: EPS_M,
        injected_error: Vector::zeros(p.len()),
        cost: 1.0,
        level: Some(PrecisionLevel::Double),
    })
}

/// What the error injector needs to know about the operator.
#[derive(Clone, Copy, Debug)]
pub struct OperatorInfo<'a> {
    pub matrix: &'a SymMatrix,
    /// Required for [`NormMode::PrimalDual`] requests.
    pub cholesky: Option<&'a CholeskyFactor>,
    /// The estimates the solver works with; `lambda_min_est` scales two-norm errors.
    pub estimates: SpectralEstimates,
}

/// `A p + e` with `e` of the largest size allowed by `omega_hat`. At
/// `omega_hat <= EPS_M` the product is returned untouched.
fn inject<R: rand::Rng + ?Sized>(
    op: &OperatorInfo<'_>,
    p: &[f64],
    omega_hat: f64,
    mode: NormMode,
    rng: &mut R,
) -> Result<(Vector, Vector)> {
    let n = op.matrix.order();
    check_len(n, p.len())?;
    let pnorm = norm2(p);
    if pnorm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let ap = op.matrix.matvec(p)?;
    if omega_hat <= EPS_M {
        return Ok((ap, Vector::zeros(n)));
    }
    let mut u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let unorm = norm2(&u);
    u.iter_mut().for_each(|e| *e /= unorm);
    let eta = match mode {
        NormMode::TwoNormRelative => omega_hat * op.estimates.lambda_min_est * pnorm,
        NormMode::PrimalDual => {
            let chol = op
                .cholesky
                .ok_or_else(|| Error::Config("primal-dual accuracy requires the Cholesky factor".into()))?;
            omega_hat * energy_norm(op.matrix, p)? / dual_norm(chol, &u)?
        }
    };
    u.iter_mut().for_each(|e| *e *= eta);
    let mut product = ap.into_inner();
    for (y, e) in product.iter_mut().zip(&u) {
        *y += e;
    }
    Ok((Vector::from_raw(product), Vector::from_raw(u)))
}

/// Continuously adjustable accuracy: the request is granted as is (floored at
/// `EPS_M`) and charged `log(omega_hat)/log(EPS_M)`.
pub fn product_continuous<R: rand::Rng + ?Sized>(
    op: &OperatorInfo<'_>,
    p: &[f64],
    request: AccuracyRequest,
    rng: &mut R,
) -> Result<ProductOutcome> {
    let omega_hat = request.omega.max(EPS_M);
    let (product, injected_error) = inject(op, p, omega_hat, request.norm_mode, rng)?;
    Ok(ProductOutcome { product, omega_hat, injected_error, cost: cost_continuous(omega_hat)?, level: None })
}

/// Accuracy restricted to double, single or half precision; the cheapest
/// level meeting the request is used and reported back.
pub fn product_multiprecision<R: rand::Rng + ?Sized>(
    op: &OperatorInfo<'_>,
    p: &[f64],
    request: AccuracyRequest,
    rng: &mut R,
) -> Result<ProductOutcome> {
    let level = PrecisionLevel::select(request.omega);
    let omega_hat = level.accuracy();
    let (product, injected_error) = inject(op, p, omega_hat, request.norm_mode, rng)?;
    Ok(ProductOutcome { product, omega_hat, injected_error, cost: level.cost(), level: Some(level) })
}

/// Anything that can answer inexact product requests for a solver.
pub trait ProductOracle {
    fn apply(&mut self, p: &[f64], request: AccuracyRequest) -> Result<ProductOutcome>;
    fn ledger(&self) -> &CostLedger;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// Full accuracy, cost 1 per product.
    Exact,
    /// Reports and charges like [`OracleKind::Continuous`] but adds no error.
    ZeroInjection,
    Continuous,
    MultiPrecision,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::ZeroInjection => "zero-injection",
            Self::Continuous => "continuous",
            Self::MultiPrecision => "multiprecision",
        }
    }
}

/// A seeded oracle bound to one problem and one solve.
pub struct Oracle<'a> {
    kind: OracleKind,
    op: OperatorInfo<'a>,
    rng: ChaCha8Rng,
    ledger: CostLedger,
}

impl<'a> Oracle<'a> {
    pub fn new(kind: OracleKind, op: OperatorInfo<'a>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(11);
        Self { kind, op, rng, ledger: CostLedger::default() }
    }

    /// Oracle over a test problem, scaling two-norm errors with `estimates`.
    pub fn for_problem(
        kind: OracleKind,
        problem: &'a QuadraticProblem,
        estimates: SpectralEstimates,
        seed: u64,
    ) -> Self {
        let op = OperatorInfo { matrix: problem.matrix(), cholesky: Some(problem.cholesky()), estimates };
        Self::new(kind, op, seed)
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }
}

impl ProductOracle for Oracle<'_> {
    fn apply(&mut self, p: &[f64], request: AccuracyRequest) -> Result<ProductOutcome> {
        let outcome = match self.kind {
            OracleKind::Exact => product_exact(self.op.matrix, p)?,
            OracleKind::ZeroInjection => {
                let omega_hat = request.omega.max(EPS_M);
                ProductOutcome {
                    cost: cost_continuous(omega_hat)?,
                    omega_hat,
                    level: None,
                    ..product_exact(self.op.matrix, p)?
                }
            }
            OracleKind::Continuous => product_continuous(&self.op, p, request, &mut self.rng)?,
            OracleKind::MultiPrecision => product_multiprecision(&self.op, p, request, &mut self.rng)?,
        };
        self.ledger.charge(outcome.cost);
        Ok(outcome)
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }
}
