//! Two-qudit state representations.
//!
//! Basis ordering is fixed crate-wide: `|ij>` is index `i * d + j`, and
//! `|ijk>` is index `(i * d + j) * d + k`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{HermitianMatrix, DEFAULT_PSD_TOL};

/// Tolerance on normalisation and on sign of probability-like entries.
pub const STATE_TOL: f64 = 1e-12;

/// `z^k = exp(2 pi i k / d)` for `k = 0..d`.
pub fn roots_of_unity(d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64))
        .collect()
}

fn non_negative(value: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -STATE_TOL {
        Ok(0.0)
    } else {
        Err(Error::InvalidState(format!(
            "{what} is negative ({value:e})"
        )))
    }
}

fn check_qudit_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::BadDomain(format!(
            "local dimension must be >= 2, got {d}"
        )))
    } else {
        Ok(())
    }
}

/// Weights `A[l][m]` of a Bell-diagonal state.
#[derive(Debug, Clone, PartialEq)]
pub struct BellCoefficients {
    d: usize,
    grid: Vec<f64>,
}

impl BellCoefficients {
    pub fn new(d: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidState(format!(
                "Bell coefficient grid must be {d}x{d}"
            )));
        }
        Self::from_flat(d, rows.iter().flatten().copied().collect())
    }

    /// Row-major grid, `grid[l * d + m] = A[l][m]`.
    pub fn from_flat(d: usize, grid: Vec<f64>) -> Result<Self> {
        check_qudit_dim(d)?;
        if grid.len() != d * d {
            return Err(Error::InvalidState(format!(
                "expected {} Bell coefficients, got {}",
                d * d,
                grid.len()
            )));
        }
        let grid = grid
            .into_iter()
            .map(|v| non_negative(v, "Bell coefficient"))
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = grid.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "Bell coefficients sum to {total}, not 1"
            )));
        }
        Ok(Self { d, grid })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, l: usize, m: usize) -> f64 {
        self.grid[l * self.d + m]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.grid.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    /// Column sum `A_{*m}`.
    pub fn marginal(&self, m: usize) -> Result<f64> {
        if m >= self.d {
            return Err(Error::IndexOutOfRange {
                index: m,
                dim: self.d,
            });
        }
        Ok((0..self.d).map(|l| self.get(l, m)).sum())
    }

    /// Largest entrywise difference between two grids of equal size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.grid
            .iter()
            .zip(&other.grid)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Column sum `A_{*m}` of a Bell grid.
pub fn marginal(a: &BellCoefficients, m: usize) -> Result<f64> {
    a.marginal(m)
}

/// A density matrix on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: HermitianMatrix,
}

impl DensityMatrix {
    /// Validates unit trace (to [`STATE_TOL`]) and positivity (to `1e-9`).
    pub fn new(dims: Vec<usize>, matrix: HermitianMatrix) -> Result<Self> {
        let n: usize = dims.iter().product();
        if n != matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.dim(),
            });
        }
        let trace = matrix.trace();
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}, not 1")));
        }
        let min = matrix.min_eigenvalue()?;
        if min < -DEFAULT_PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// Accepts a matrix whose trace is within `tol` of one and rescales it
    /// to unit trace before validating.
    pub fn normalized(dims: Vec<usize>, matrix: HermitianMatrix, tol: f64) -> Result<Self> {
        let trace = matrix.trace();
        if trace.is_nan() || (trace - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace is {trace}, not 1")));
        }
        Self::new(dims, matrix.scale(1.0 / trace))
    }

    /// Skips validation; used for assembled states that are verified
    /// separately.
    pub(crate) fn unchecked(dims: Vec<usize>, matrix: HermitianMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Local dimension `d` when the state lives on two qudits of equal size.
    pub fn qudit_dim(&self) -> Result<usize> {
        match self.dims.as_slice() {
            [a, b] if a == b && *a >= 2 => Ok(*a),
            _ => Err(Error::BadDims {
                dims: self.dims.clone(),
            }),
        }
    }

    /// Trace over the last tensor factor.
    pub fn partial_trace_last(&self) -> Result<DensityMatrix> {
        let (&last, rest) = self.dims.split_last().ok_or(Error::BadDims {
            dims: self.dims.clone(),
        })?;
        if rest.is_empty() {
            return Err(Error::BadDims {
                dims: self.dims.clone(),
            });
        }
        let outer: usize = rest.iter().product();
        let m = self.matrix.as_matrix();
        let reduced = HermitianMatrix::from_lower_fn(outer, |i, j| {
            (0..last).map(|k| m[(i * last + k, j * last + k)]).sum()
        });
        Ok(DensityMatrix {
            dims: rest.to_vec(),
            matrix: reduced,
        })
    }
}

/// Bell vector `d^{-1/2} sum_k z^{lk} |k>|k - m>`.
pub fn bell_vector(d: usize, l: usize, m: usize) -> Result<DVector<Complex64>> {
    check_qudit_dim(d)?;
    for idx in [l, m] {
        if idx >= d {
            return Err(Error::IndexOutOfRange { index: idx, dim: d });
        }
    }
    let z = roots_of_unity(d);
    let norm = 1.0 / (d as f64).sqrt();
    let mut v = DVector::zeros(d * d);
    for k in 0..d {
        v[k * d + (k + d - m) % d] = z[(l * k) % d] * norm;
    }
    Ok(v)
}

pub fn bell_diag_to_density(a: &BellCoefficients) -> DensityMatrix {
    let d = a.d();
    let mut acc = DMatrix::<Complex64>::zeros(d * d, d * d);
    for l in 0..d {
        for m in 0..d {
            let w = a.get(l, m);
            if w == 0.0 {
                continue;
            }
            let v = bell_vector(d, l, m).expect("indices in range");
            acc += (&v * v.adjoint()) * Complex64::new(w, 0.0);
        }
    }
    DensityMatrix {
        dims: vec![d, d],
        matrix: HermitianMatrix::symmetrize(acc),
    }
}

/// Diagonal of `rho` in the Bell basis. On Bell-diagonal input this
/// inverts [`bell_diag_to_density`]; otherwise it is the Bell-basis
/// dephasing of the state.
pub fn density_to_bell_diag(rho: &DensityMatrix) -> Result<BellCoefficients> {
    let d = rho.qudit_dim()?;
    let m = rho.matrix().as_matrix();
    let mut grid = Vec::with_capacity(d * d);
    for l in 0..d {
        for mm in 0..d {
            let v = bell_vector(d, l, mm)?;
            grid.push((v.adjoint() * m * &v)[(0, 0)].re);
        }
    }
    BellCoefficients::from_flat(d, grid)
}

/// Compact form of a U2-invariant two-qudit state: the coherence block
/// `btilde = (a_{ii,pp})` and the diagonal weights `lambda[i][j] = a_{ij,ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct U2InvariantState {
    d: usize,
    btilde: HermitianMatrix,
    lambda: Vec<f64>,
}

impl U2InvariantState {
    pub fn new(btilde: HermitianMatrix, lambda: &[Vec<f64>]) -> Result<Self> {
        let d = btilde.dim();
        if lambda.len() != d || lambda.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidState(format!("lambda must be {d}x{d}")));
        }
        Self::from_flat(btilde, lambda.iter().flatten().copied().collect())
    }

    pub fn from_flat(btilde: HermitianMatrix, lambda: Vec<f64>) -> Result<Self> {
        let d = btilde.dim();
        check_qudit_dim(d)?;
        if lambda.len() != d * d {
            return Err(Error::InvalidState(format!(
                "lambda must hold {} entries",
                d * d
            )));
        }
        let mut lambda = lambda
            .into_iter()
            .map(|v| non_negative(v, "diagonal weight"))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..d {
            let diag = btilde[(i, i)].re;
            let gap = (lambda[i * d + i] - diag).abs();
            if gap > STATE_TOL {
                return Err(Error::InvalidState(format!(
                    "lambda[{i}][{i}] differs from btilde({i},{i}) by {gap:e}"
                )));
            }
            lambda[i * d + i] = diag;
        }
        let total: f64 = lambda.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {total}, not 1")));
        }
        let min = btilde.min_eigenvalue()?;
        if min < -DEFAULT_PSD_TOL {
            return Err(Error::InvalidState(format!(
                "coherence block is not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { d, btilde, lambda })
    }

    /// Twirl of the Bell-diagonal state with weights `a`; equal to that
    /// state whenever it is already U2-invariant.
    pub fn from_bell(a: &BellCoefficients) -> Self {
        let d = a.d();
        let z = roots_of_unity(d);
        let scale = 1.0 / d as f64;
        let btilde = HermitianMatrix::from_lower_fn(d, |i, p| {
            let diff = (i + d - p) % d;
            (0..d)
                .map(|l| z[(l * diff) % d] * a.get(l, 0))
                .sum::<Complex64>()
                * scale
        });
        let mut lambda = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                lambda[i * d + j] = if i == j {
                    btilde[(i, i)].re
                } else {
                    a.marginal((i + d - j) % d).expect("index in range") * scale
                };
            }
        }
        Self { d, btilde, lambda }
    }

    pub fn from_geniso(p: &GenIsoParams) -> Self {
        let d = p.d;
        let df = d as f64;
        let x = p.x();
        let diff = p.a - p.b;
        let btilde = HermitianMatrix::from_lower_fn(d, |i, j| {
            Complex64::new(if i == j { x / df } else { diff / df }, 0.0)
        });
        let off = (1.0 - x).max(0.0) / (df * (df - 1.0));
        let lambda = (0..d * d)
            .map(|k| if k / d == k % d { x / df } else { off })
            .collect();
        Self { d, btilde, lambda }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn btilde(&self) -> &HermitianMatrix {
        &self.btilde
    }

    pub fn lambda(&self, i: usize, j: usize) -> f64 {
        self.lambda[i * self.d + j]
    }

    pub fn lambda_rows(&self) -> Vec<Vec<f64>> {
        self.lambda.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    /// Full `d^2 x d^2` density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.d;
        let mut m = DMatrix::<Complex64>::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                m[(i * d + j, i * d + j)] = Complex64::new(self.lambda(i, j), 0.0);
            }
            for p in 0..d {
                m[(i * d + i, p * d + p)] = self.btilde[(i, p)];
            }
        }
        DensityMatrix {
            dims: vec![d, d],
            matrix: HermitianMatrix::symmetrize(m),
        }
    }

    /// Bell weights of a circulant state, inverting [`Self::from_bell`]:
    /// `A_l0` are the Fourier eigenvalues of `btilde` and `A_lm = lambda[m][0]`
    /// for `m != 0`. `None` if the state is not circulant within `tol` or the
    /// weights fail validation.
    pub fn to_bell(&self, tol: f64) -> Option<BellCoefficients> {
        if self.circulant_deviation() > tol {
            return None;
        }
        let d = self.d;
        let z = roots_of_unity(d);
        let mut grid = vec![0.0; d * d];
        for l in 0..d {
            grid[l * d] = (0..d)
                .map(|delta| z[(l * delta) % d].conj() * self.btilde[(delta, 0)])
                .sum::<Complex64>()
                .re;
            for m in 1..d {
                grid[l * d + m] = self.lambda(m, 0);
            }
        }
        BellCoefficients::from_flat(d, grid).ok()
    }

    /// Largest deviation of `btilde` and `lambda` from circulant form, i.e.
    /// from depending on `(i - p) mod d` only.
    pub fn circulant_deviation(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for p in 0..d {
                let diff = (i + d - p) % d;
                worst = worst.max((self.btilde[(i, p)] - self.btilde[(diff, 0)]).norm());
                worst = worst.max((self.lambda(i, p) - self.lambda(diff, 0)).abs());
            }
        }
        worst
    }
}

/// The stored coherence block.
pub fn btilde_of(state: &U2InvariantState) -> HermitianMatrix {
    state.btilde().clone()
}

/// Haar average over `U (x) U*` with `U` diagonal unitary: keeps the
/// entries `a_{ii,pp}` and `a_{ij,ij}` and discards the rest.
pub fn twirl_u2(rho: &DensityMatrix) -> Result<U2InvariantState> {
    let d = rho.qudit_dim()?;
    let m = rho.matrix();
    let btilde = HermitianMatrix::from_lower_fn(d, |i, p| m[(i * d + i, p * d + p)]);
    let lambda = (0..d * d).map(|k| m[(k, k)].re).collect();
    U2InvariantState::from_flat(btilde, lambda)
}

/// Whether `A[l][m] = A_{*m} / d` for every `m != 0` and every `l`.
pub fn is_u2_invariant_bell(a: &BellCoefficients, tol: f64) -> bool {
    let d = a.d();
    (1..d).all(|m| {
        let mean = a.marginal(m).expect("index in range") / d as f64;
        (0..d).all(|l| (a.get(l, m) - mean).abs() <= tol)
    })
}

/// Generalised-isotropic parameters: `A_00 = a`, `A_l0 = b` for `l != 0`,
/// and the remaining weight spread evenly over the columns `m != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenIsoParams {
    pub d: usize,
    pub a: f64,
    pub b: f64,
}

impl GenIsoParams {
    pub fn new(d: usize, a: f64, b: f64) -> Result<Self> {
        check_qudit_dim(d)?;
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::BadDomain("a and b must be finite".into()));
        }
        let a = non_negative(a, "a").map_err(|_| Error::BadDomain(format!("a = {a} < 0")))?;
        let b = non_negative(b, "b").map_err(|_| Error::BadDomain(format!("b = {b} < 0")))?;
        let x = a + (d - 1) as f64 * b;
        if x > 1.0 + STATE_TOL {
            return Err(Error::BadDomain(format!("x = a + (d-1) b = {x} exceeds 1")));
        }
        Ok(Self { d, a, b })
    }

    /// Parameters from the column weight `x` and the difference `a - b`.
    pub fn from_x_diff(d: usize, x: f64, diff: f64) -> Result<Self> {
        check_qudit_dim(d)?;
        let df = d as f64;
        Self::new(d, (x + (df - 1.0) * diff) / df, (x - diff) / df)
    }

    /// `x = a + (d - 1) b`, the weight of the `m = 0` Bell column.
    pub fn x(&self) -> f64 {
        self.a + (self.d - 1) as f64 * self.b
    }

    pub fn diff(&self) -> f64 {
        self.a - self.b
    }

    /// Recognises the generalised-isotropic pattern in a Bell grid.
    pub fn detect(a: &BellCoefficients, tol: f64) -> Option<Self> {
        let d = a.d();
        let b = a.get(1, 0);
        let rest = a.get(0, 1);
        let columns_ok = (1..d).all(|l| (a.get(l, 0) - b).abs() <= tol);
        let rest_ok = (0..d).all(|l| (1..d).all(|m| (a.get(l, m) - rest).abs() <= tol));
        if columns_ok && rest_ok {
            Self::new(d, a.get(0, 0), b).ok()
        } else {
            None
        }
    }
}

pub fn geniso_coeffs(p: &GenIsoParams) -> BellCoefficients {
    let d = p.d;
    let df = d as f64;
    let rest = ((1.0 - p.x()) / (df * (df - 1.0))).max(0.0);
    let grid = (0..d * d)
        .map(|k| match (k / d, k % d) {
            (0, 0) => p.a,
            (_, 0) => p.b,
            _ => rest,
        })
        .collect();
    BellCoefficients { d, grid }
}

/// Isotropic state parameters: `A_00 = a00`, every other weight equal.
pub fn isotropic_params(d: usize, a00: f64) -> Result<GenIsoParams> {
    check_qudit_dim(d)?;
    if !(0.0..=1.0).contains(&a00) {
        return Err(Error::BadDomain(format!("a00 = {a00} outside [0, 1]")));
    }
    GenIsoParams::new(d, a00, (1.0 - a00) / ((d * d - 1) as f64))
}

pub fn isotropic_coeffs(d: usize, a00: f64) -> Result<BellCoefficients> {
    Ok(geniso_coeffs(&isotropic_params(d, a00)?))
}
