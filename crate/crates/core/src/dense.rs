//! Dense symmetric linear algebra.
//!
//! Everything here works on small-to-moderate dense problems (a few thousand
//! unknowns at most). Matrices are stored row-major with full storage; the
//! symmetric type keeps both triangles equal by construction.

use std::ops::{Deref, DerefMut};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Unit roundoff of binary64 arithmetic.
pub const EPS_M: f64 = f64::EPSILON / 2.0;

/// A dense real vector with finite entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    /// The `i`-th canonical basis vector of length `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1.0;
        v
    }

    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Square dense matrix, row-major. Used for orthogonal factors.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.n).map(|i| self.get(i, j)).collect())
    }

    /// `||Q^T Q - I||_F`
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let s: f64 = (0..n).map(|i| self.get(i, a) * self.get(i, b)).sum();
                let d = if a == b { s - 1.0 } else { s };
                acc += d * d;
            }
        }
        acc.sqrt()
    }
}

/// Dense symmetric matrix. Both triangles are stored and kept identical.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from its lower triangle; `f(i, j)` is called for `j <= i`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(n >= 1, "matrix order must be at least 1");
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from full row-major storage, requiring exact symmetry.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("matrix order must be at least 1".into()));
        }
        check_len(n * n, data.len())?;
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        for i in 0..n {
            for j in 0..i {
                let diff = (data[i * n + j] - data[j * n + i]).abs();
                if diff != 0.0 {
                    return Err(Error::NotSymmetric { row: i, col: j, diff });
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_lower_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self::from_lower_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// `Q diag(eigenvalues) Q^T`, accumulated on the lower triangle and mirrored.
    pub fn from_spectrum(q: &DenseMatrix, eigenvalues: &[f64]) -> Result<Self> {
        check_len(q.order(), eigenvalues.len())?;
        let n = q.order();
        Ok(Self::from_lower_fn(n, |i, j| {
            let ri = &q.data[i * n..(i + 1) * n];
            let rj = &q.data[j * n..(j + 1) * n];
            ri.iter().zip(rj).zip(eigenvalues).map(|((a, b), l)| a * l * b).sum()
        }))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    /// Number of structurally nonzero entries in the lower triangle, diagonal included.
    pub fn lower_nnz(&self) -> usize {
        (0..self.n).map(|i| self.row(i)[..=i].iter().filter(|v| **v != 0.0).count()).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vector> {
        check_len(self.n, x.len())?;
        Ok(Vector(self.matvec_unchecked(x)))
    }

    pub(crate) fn matvec_unchecked(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }
}

/// Lower-triangular Cholesky factor `L` with `L L^T = A`.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
}

impl CholeskyFactor {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.l[i * self.n + j]
        }
    }

    /// Solves `L z = v`.
    pub fn forward_solve(&self, v: &[f64]) -> Result<Vector> {
        check_len(self.n, v.len())?;
        let n = self.n;
        let mut z = vec![0.0; n];
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            z[i] = (v[i] - dot(row, &z[..i])) / self.l[i * n + i];
        }
        Ok(Vector(z))
    }

    /// Solves `L^T x = z`.
    pub fn backward_solve(&self, z: &[f64]) -> Result<Vector> {
        check_len(self.n, z.len())?;
        let n = self.n;
        let mut x = z.to_vec();
        for i in (0..n).rev() {
            let xi = x[i] / self.l[i * n + i];
            x[i] = xi;
            for k in 0..i {
                x[k] -= self.l[i * n + k] * xi;
            }
        }
        Ok(Vector(x))
    }

    /// `||L L^T - A||_F`
    pub fn reconstruction_error(&self, a: &SymMatrix) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let m = i.min(j);
                let s: f64 = (0..=m).map(|k| self.get(i, k) * self.get(j, k)).sum();
                let d = s - a.get(i, j);
                acc += d * d;
            }
        }
        acc.sqrt()
    }
}

pub fn cholesky(a: &SymMatrix) -> Result<CholeskyFactor> {
    let n = a.order();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let s = a.get(j, j) - dot(&l[j * n..j * n + j], &l[j * n..j * n + j]);
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: s });
        }
        let d = s.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let v = (a.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j])) / d;
            l[i * n + j] = v;
        }
    }
    Ok(CholeskyFactor { n, l })
}

/// Solves `A x = b` given the Cholesky factor of `A`.
pub fn solve_spd(factor: &CholeskyFactor, b: &[f64]) -> Result<Vector> {
    let z = factor.forward_solve(b)?;
    factor.backward_solve(&z)
}

/// `||v||_{A^{-1}} = ||L^{-1} v||_2`
pub fn dual_norm(factor: &CholeskyFactor, v: &[f64]) -> Result<f64> {
    Ok(factor.forward_solve(v)?.norm2())
}

/// `||v||_A = sqrt(v^T A v)`
pub fn energy_norm(a: &SymMatrix, v: &[f64]) -> Result<f64> {
    let av = a.matvec(v)?;
    let form = dot(v, &av);
    if form < 0.0 {
        let tol = a.order() as f64 * EPS_M * a.frobenius_norm() * dot(v, v);
        if form < -tol {
            return Err(Error::NegativeQuadraticForm { value: form });
        }
        return Ok(0.0);
    }
    Ok(form.sqrt())
}

/// Square upper Hessenberg matrix (`h[i][j] = 0` for `i > j + 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct HessenbergMatrix {
    k: usize,
    data: Vec<f64>,
}

impl HessenbergMatrix {
    pub fn zeros(k: usize) -> Self {
        Self { k, data: vec![0.0; k * k] }
    }

    /// Builds the leading `k x k` block from columns, where column `j` holds
    /// `h[0..=min(j+1, k-1)][j]`. Entries below the first subdiagonal are ignored.
    pub fn from_columns(k: usize, columns: &[Vec<f64>]) -> Self {
        let mut h = Self::zeros(k);
        for (j, col) in columns.iter().take(k).enumerate() {
            for (i, v) in col.iter().enumerate().take((j + 2).min(k)) {
                h.data[i * k + j] = *v;
            }
        }
        h
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut h = Self::zeros(k);
        for i in 0..k {
            for j in i.saturating_sub(1)..k {
                h.data[i * k + j] = f(i, j);
            }
        }
        h
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i <= j + 1, "entry ({i}, {j}) lies below the first subdiagonal");
        self.data[i * self.k + j] = value;
    }

    pub fn matvec(&self, y: &[f64]) -> Result<Vector> {
        check_len(self.k, y.len())?;
        Ok(Vector((0..self.k).map(|i| dot(&self.data[i * self.k..(i + 1) * self.k], y)).collect()))
    }
}

/// Solves `H y = rhs` by Gaussian elimination with partial pivoting restricted
/// to the single subdiagonal, then back substitution. O(k^2).
pub fn hessenberg_solve(h: &HessenbergMatrix, rhs: &[f64]) -> Result<Vector> {
    let k = h.order();
    check_len(k, rhs.len())?;
    let mut m = h.data.clone();
    let mut y = rhs.to_vec();
    for j in 0..k.saturating_sub(1) {
        let (top, below) = (m[j * k + j], m[(j + 1) * k + j]);
        if below.abs() > top.abs() {
            for c in j..k {
                m.swap(j * k + c, (j + 1) * k + c);
            }
            y.swap(j, j + 1);
        }
        let pivot = m[j * k + j];
        if pivot == 0.0 {
            return Err(Error::SingularMatrix { column: j });
        }
        let factor = m[(j + 1) * k + j] / pivot;
        if factor != 0.0 {
            m[(j + 1) * k + j] = 0.0;
            for c in j + 1..k {
                m[(j + 1) * k + c] -= factor * m[j * k + c];
            }
            y[j + 1] -= factor * y[j];
        }
    }
    for i in (0..k).rev() {
        let pivot = m[i * k + i];
        if pivot == 0.0 {
            return Err(Error::SingularMatrix { column: i });
        }
        let s = dot(&m[i * k + i + 1..(i + 1) * k], &y[i + 1..]);
        y[i] = (y[i] - s) / pivot;
    }
    Ok(Vector(y))
}

/// Random orthogonal matrix from the Householder QR factorization of a seeded
/// standard Gaussian matrix, with column signs fixed so that `diag(R) > 0`.
pub fn random_orthogonal(n: usize, seed: u64) -> DenseMatrix {
    assert!(n >= 1, "matrix order must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // column-major working copy
    let mut a: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut r_diag = vec![0.0; n];

    for j in 0..n {
        let x = &a[j * n + j..(j + 1) * n];
        let xnorm = norm2(x);
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm = norm2(&v);
        if vnorm > 0.0 {
            v.iter_mut().for_each(|e| *e /= vnorm);
            for c in j..n {
                let col = &mut a[c * n + j..(c + 1) * n];
                let s = 2.0 * dot(&v, col);
                axpy(-s, &v, col);
            }
        } else {
            v.iter_mut().for_each(|e| *e = 0.0);
        }
        r_diag[j] = a[j * n + j];
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1}, applied to the identity from the right-most factor.
    let mut q = vec![0.0; n * n];
    for c in 0..n {
        q[c * n + c] = 1.0;
    }
    for j in (0..n).rev() {
        let v = &reflectors[j];
        for c in 0..n {
            let col = &mut q[c * n + j..(c + 1) * n];
            let s = 2.0 * dot(v, col);
            if s != 0.0 {
                axpy(-s, v, col);
            }
        }
    }

    let mut data = vec![0.0; n * n];
    for c in 0..n {
        let sign = if r_diag[c] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            data[r * n + c] = sign * q[c * n + r];
        }
    }
    DenseMatrix { n, data }
}

/// Extreme-eigenvalue and trace information handed to the solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEstimates {
    pub lambda_min_est: f64,
    pub lambda_max_est: f64,
    pub trace: f64,
    pub n: usize,
}

impl SpectralEstimates {
    pub fn new(lambda_min_est: f64, lambda_max_est: f64, trace: f64, n: usize) -> Result<Self> {
        if !(lambda_min_est > 0.0 && lambda_min_est.is_finite()) {
            return Err(Error::InvalidEstimates(format!("lambda_min = {lambda_min_est:e}")));
        }
        if !(lambda_max_est >= lambda_min_est && lambda_max_est.is_finite()) {
            return Err(Error::InvalidEstimates(format!(
                "lambda_max = {lambda_max_est:e} < lambda_min = {lambda_min_est:e}"
            )));
        }
        if !(trace > 0.0 && trace.is_finite()) {
            return Err(Error::InvalidEstimates(format!("trace = {trace:e}")));
        }
        if n == 0 {
            return Err(Error::InvalidEstimates("order must be positive".into()));
        }
        Ok(Self { lambda_min_est, lambda_max_est, trace, n })
    }

    pub fn condition(&self) -> f64 {
        self.lambda_max_est / self.lambda_min_est
    }
}
