//! Dense Hermitian matrices and the positivity machinery built on them.
//!
//! [`HermitianMatrix`] keeps its Hermitian symmetry exact: every constructor
//! symmetrises, so `m[(i, j)] == conj(m[(j, i)])` holds bit-for-bit and the
//! diagonal is real. Two positivity tests are provided: the eigenvalue test,
//! used everywhere in production, and the principal-minor test, which is
//! exponential in the dimension and kept as an independent cross-check.

use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest dimension accepted by [`principal_minors`] (2^12 - 1 minors).
pub const MAX_MINOR_DIM: usize = 12;

/// Default lower bound on the smallest eigenvalue for a matrix to count as PSD.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

const EIGEN_SWEEPS_PER_DIM: usize = 1000;

/// A dense complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<Complex64>,
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector belonging to `values[k]`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    /// Builds a matrix from its lower triangle: `f(i, j)` is queried for
    /// `j <= i` only, the diagonal keeps the real part, and the upper
    /// triangle is filled by conjugation.
    pub fn from_lower_fn<F>(n: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(f(i, i).re, 0.0);
            for j in 0..i {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        Self { m }
    }

    /// Accepts a square matrix that is Hermitian up to `tol` (max-abs
    /// deviation) and returns its Hermitian part.
    pub fn from_matrix(m: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let deviation = hermitian_deviation(&m);
        if deviation.is_nan() || deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrize(m))
    }

    /// Hermitian part `(m + m†) / 2` of a square matrix.
    pub(crate) fn symmetrize(m: DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        debug_assert_eq!(n, m.ncols());
        Self::from_lower_fn(n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_lower_fn(n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// The rank-one matrix `|v><v|`.
    pub fn outer(v: &DVector<Complex64>) -> Self {
        Self::from_lower_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// Writes `value` at `(i, j)` and its conjugate at `(j, i)`. On the
    /// diagonal only the real part is kept.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        if i == j {
            self.m[(i, i)] = Complex64::new(value.re, 0.0);
        } else {
            self.m[(i, j)] = value;
            self.m[(j, i)] = value.conj();
        }
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Real inner product `Re tr(self† other)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: &self.m * Complex64::new(s, 0.0),
        }
    }

    /// Principal submatrix on the given (sorted, distinct) indices.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        Self {
            m: DMatrix::from_fn(k, k, |r, c| self.m[(indices[r], indices[c])]),
        }
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        let n = self.dim();
        if n == 0 {
            return Ok(HermitianEigen {
                values: Vec::new(),
                vectors: DMatrix::zeros(0, 0),
            });
        }
        let max_iter = EIGEN_SWEEPS_PER_DIM * n;
        let eig = SymmetricEigen::try_new(self.m.clone(), f64::EPSILON, max_iter).ok_or(
            Error::ConvergenceFailure {
                iterations: max_iter,
            },
        )?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(HermitianEigen { values, vectors })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .first()
            .copied()
            .unwrap_or(f64::INFINITY))
    }
}

impl HermitianEigen {
    /// `V diag(f(values)) V†`.
    pub fn reconstruct<F: Fn(f64) -> f64>(&self, f: F) -> HermitianMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &v) in self.values.iter().enumerate() {
            let w = Complex64::new(f(v), 0.0);
            for r in 0..n {
                scaled[(r, c)] *= w;
            }
        }
        HermitianMatrix::symmetrize(scaled * self.vectors.adjoint())
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.m[idx]
    }
}

impl<'a> Add<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;

    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl<'a> Sub<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;

    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn mul(self, s: f64) -> HermitianMatrix {
        self.scale(s)
    }
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_minor_dim(n: usize) -> Result<()> {
    if n > MAX_MINOR_DIM {
        Err(Error::DimensionTooLarge {
            n,
            max: MAX_MINOR_DIM,
        })
    } else {
        Ok(())
    }
}

/// All `2^n - 1` principal minors, keyed by their index subset. Subsets are
/// enumerated in increasing bitmask order, so `{0}`, `{1}`, `{0, 1}`, ...
pub fn principal_minors(m: &HermitianMatrix) -> Result<Vec<(Vec<usize>, f64)>> {
    let n = m.dim();
    check_minor_dim(n)?;
    let mut out = Vec::with_capacity((1usize << n).saturating_sub(1));
    for mask in 1usize..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        // Hermitian submatrices have real determinants; drop the rounding residue.
        let det = m.submatrix(&subset).m.determinant().re;
        out.push((subset, det));
    }
    Ok(out)
}

/// PSD test through non-negativity of every principal minor.
pub fn is_psd_minors(m: &HermitianMatrix, tol: f64) -> Result<bool> {
    Ok(principal_minors(m)?.iter().all(|(_, det)| *det >= -tol))
}

/// PSD test through the smallest eigenvalue.
pub fn is_psd_eigen(m: &HermitianMatrix, tol: f64) -> Result<bool> {
    Ok(m.min_eigenvalue()? >= -tol)
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to zero.
pub fn psd_project(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = m.eigen()?;
    if eig.values.first().is_none_or(|&v| v >= 0.0) {
        return Ok(m.clone());
    }
    Ok(eig.reconstruct(|v| v.max(0.0)))
}

/// Parameters of the bordered matrix family `M_d(alpha, beta, xi, eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdParams {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub xi: Complex64,
    /// Off-diagonal entry of the lower-right block; unused when `d == 2`.
    pub eta: f64,
}

impl MdParams {
    pub fn new(d: usize, alpha: f64, beta: f64, xi: Complex64, eta: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadDomain(format!("M_d requires d >= 2, got {d}")));
        }
        Ok(Self {
            d,
            alpha,
            beta,
            xi,
            eta,
        })
    }

    pub fn real(d: usize, alpha: f64, beta: f64, xi: f64, eta: f64) -> Result<Self> {
        Self::new(d, alpha, beta, Complex64::new(xi, 0.0), eta)
    }
}

/// `alpha` in the corner, `xi` down the first column (conjugated along the
/// first row), `beta` on the remaining diagonal and `eta` everywhere else.
pub fn build_md(p: &MdParams) -> HermitianMatrix {
    HermitianMatrix::from_lower_fn(p.d, |i, j| match (i, j) {
        (0, 0) => Complex64::new(p.alpha, 0.0),
        (_, 0) => p.xi,
        (i, j) if i == j => Complex64::new(p.beta, 0.0),
        _ => Complex64::new(p.eta, 0.0),
    })
}

/// Closed-form determinant of [`build_md`]:
/// `(beta - eta)^(d-2) * (alpha * (beta + (d-2) eta) - (d-1) |xi|^2)`.
pub fn det_md(p: &MdParams) -> f64 {
    let d = p.d;
    let xi2 = p.xi.norm_sqr();
    if d == 2 {
        return p.alpha * p.beta - xi2;
    }
    let k = (d - 2) as f64;
    (p.beta - p.eta).powi((d - 2) as i32) * (p.alpha * (p.beta + k * p.eta) - (d - 1) as f64 * xi2)
}

/// Simultaneous cyclic shift of rows and columns: output `(i, j)` is
/// `m((i - l) mod n, (j - l) mod n)`.
pub fn cyclic_permute(m: &HermitianMatrix, l: usize) -> HermitianMatrix {
    let n = m.dim();
    if n == 0 {
        return m.clone();
    }
    let shift = n - l % n;
    HermitianMatrix {
        m: DMatrix::from_fn(n, n, |i, j| m.m[((i + shift) % n, (j + shift) % n)]),
    }
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> HermitianMatrix {
        HermitianMatrix::from_lower_fn(n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    pub fn random_psd<R: Rng>(rng: &mut R, n: usize, rank: usize) -> HermitianMatrix {
        let g = DMatrix::from_fn(n, rank, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        HermitianMatrix::symmetrize(&g * g.adjoint())
    }

    /// Cofactor expansion along the first row; independent of LU.
    pub fn cofactor_det(m: &DMatrix<Complex64>) -> Complex64 {
        let n = m.nrows();
        match n {
            0 => Complex64::new(1.0, 0.0),
            1 => m[(0, 0)],
            _ => {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..n {
                    let minor = m.clone().remove_row(0).remove_column(c);
                    let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                    acc += m[(0, c)] * cofactor_det(&minor) * sign;
                }
                acc
            }
        }
    }
}
