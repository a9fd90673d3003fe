//! Explicit symmetric extensions.
//!
//! An extension lives on `A (x) B (x) E`. In the canonical form the only
//! nonzero entries are the mirrored blocks `B_k` on `{|ppk>, |pkp>}`, the
//! absorbers `D_ij` on `|ijj>`, and nothing on the `C_ijk` blocks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::criteria::{geniso_verdict, Status};
use crate::error::{Error, Result};
use crate::matcore::{build_md, cyclic_permute, HermitianMatrix, MdParams};
use crate::solver::Decomposition;
use crate::states::{DensityMatrix, GenIsoParams, U2InvariantState};

/// Absorber values in `[-ABSORBER_TOL, 0)` are clipped to zero.
pub const ABSORBER_TOL: f64 = 1e-9;

/// Largest local dimension for which `rho_ABE` is materialised.
pub const MAX_DENSE_DIM: usize = 8;

const BISECTION_TOL: f64 = 1e-12;

fn index3(d: usize, i: usize, j: usize, k: usize) -> usize {
    (i * d + j) * d + k
}

/// Basis of the `k`-th mirrored block: `|ppk>` for every `p` (with `|kkk>`
/// at position `k`), then `|pkp>` for `p != k` in increasing order.
fn block_basis(d: usize, k: usize) -> Vec<(usize, usize)> {
    let mut basis: Vec<(usize, usize)> = (0..d).map(|p| (p, index3(d, p, p, k))).collect();
    basis.extend((0..d).filter(|&p| p != k).map(|p| (p, index3(d, p, k, p))));
    basis
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionBlocks {
    pub d: usize,
    /// `(2d - 1) x (2d - 1)` mirrored blocks.
    pub bk_full: Vec<HermitianMatrix>,
    /// `d_values[i][j]` sits on `|ijj>`; the diagonal `i == j` is unused and zero.
    pub d_values: Vec<Vec<f64>>,
    /// Diagonal of the `C_ijk` blocks, indexed `(i * d + j) * d + k`; zero here.
    pub c_values: Vec<f64>,
}

/// The `(2d - 1) x (2d - 1)` block repeating `b` on both index families.
pub fn mirrored_block(b: &HermitianMatrix, k: usize) -> HermitianMatrix {
    let d = b.dim();
    let basis = block_basis(d, k);
    HermitianMatrix::from_lower_fn(basis.len(), |r, c| b[(basis[r].0, basis[c].0)])
}

pub fn extension_blocks(state: &U2InvariantState, dec: &Decomposition) -> Result<ExtensionBlocks> {
    let d = state.d();
    if dec.d != d || dec.blocks.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: dec.d,
        });
    }
    let mut d_values = vec![vec![0.0; d]; d];
    for (i, row) in d_values.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let value = state.lambda(i, j) - dec.blocks[j][(i, i)].re;
            if value < -ABSORBER_TOL {
                return Err(Error::NegativeAbsorber { i, j, value });
            }
            *slot = value.max(0.0);
        }
    }
    Ok(ExtensionBlocks {
        d,
        bk_full: dec
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| mirrored_block(b, k))
            .collect(),
        d_values,
        c_values: vec![0.0; d * d * d],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub d: usize,
    pub rho_abe: DensityMatrix,
}

impl Extension {
    /// Wraps an arbitrary tripartite matrix; no condition is checked.
    pub fn new(rho_abe: DensityMatrix) -> Result<Self> {
        match rho_abe.dims() {
            [a, b, e] if a == b && b == e => Ok(Self { d: *a, rho_abe }),
            dims => Err(Error::BadDims {
                dims: dims.to_vec(),
            }),
        }
    }
}

/// Builds `rho_ABE` from a decomposition. Validity of the result is left to
/// [`verify_extension`].
pub fn assemble_extension(state: &U2InvariantState, dec: &Decomposition) -> Result<Extension> {
    let blocks = extension_blocks(state, dec)?;
    assemble_from_blocks(&blocks)
}

pub fn assemble_from_blocks(blocks: &ExtensionBlocks) -> Result<Extension> {
    let d = blocks.d;
    if d > MAX_DENSE_DIM {
        return Err(Error::BadDomain(format!(
            "dense extensions are limited to d <= {MAX_DENSE_DIM}"
        )));
    }
    let n = d * d * d;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (k, full) in blocks.bk_full.iter().enumerate() {
        let basis = block_basis(d, k);
        for (r, &(_, row)) in basis.iter().enumerate() {
            for (c, &(_, col)) in basis.iter().enumerate() {
                m[(row, col)] = full[(r, c)];
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let idx = index3(d, i, j, j);
                m[(idx, idx)] = Complex64::new(blocks.d_values[i][j], 0.0);
            }
            for k in 0..d {
                let c = blocks.c_values[index3(d, i, j, k)];
                if c != 0.0 {
                    let idx = index3(d, i, j, k);
                    m[(idx, idx)] = Complex64::new(c, 0.0);
                }
            }
        }
    }
    Ok(Extension {
        d,
        rho_abe: DensityMatrix::unchecked(vec![d, d, d], HermitianMatrix::symmetrize(m)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    /// `||rho - S_BE rho S_BE||_F`.
    pub symmetry_residual: f64,
    /// `||Tr_E rho - rho_AB||_F`.
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

pub fn verify_extension(
    rho_ab: &DensityMatrix,
    ext: &Extension,
    tol: f64,
) -> Result<ExtensionReport> {
    let d = rho_ab.qudit_dim()?;
    if ext.d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: ext.d,
        });
    }
    let rho = ext.rho_abe.matrix();
    let n = d * d * d;
    let swap = |idx: usize| {
        let (i, j, k) = (idx / (d * d), (idx / d) % d, idx % d);
        index3(d, i, k, j)
    };
    let mut sym_sq = 0.0;
    for r in 0..n {
        for c in 0..n {
            sym_sq += (rho[(r, c)] - rho[(swap(r), swap(c))]).norm_sqr();
        }
    }
    let symmetry_residual = sym_sq.sqrt();
    let trace_residual = ext
        .rho_abe
        .partial_trace_last()?
        .matrix()
        .distance(rho_ab.matrix());
    let min_eigenvalue = rho.min_eigenvalue()?;
    Ok(ExtensionReport {
        symmetry_residual,
        trace_residual,
        min_eigenvalue,
        pass: symmetry_residual <= tol && trace_residual <= tol && min_eigenvalue >= -tol,
    })
}

/// Parameters of the closed-form certificate `B_0 = M_d(alpha, beta, xi, eta) / d`
/// with `alpha = (1 - sigma) x` and `beta = sigma x / (d - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateSearchParams {
    pub sigma: f64,
    /// `eta = tau * x`.
    pub tau: f64,
    /// `mu = (d - 2)(d - 1) tau`.
    pub mu: f64,
    /// `nu = mu + sigma`.
    pub nu: f64,
    pub xi: f64,
    pub eta: f64,
}

fn search_params(d: usize, x: f64, sigma: f64, xi: f64, eta: f64) -> CertificateSearchParams {
    let tau = if x > 0.0 { eta / x } else { 0.0 };
    let mu = (d as f64 - 2.0) * (d as f64 - 1.0) * tau;
    CertificateSearchParams {
        sigma,
        tau,
        mu,
        nu: mu + sigma,
        xi,
        eta,
    }
}

/// Chooses `(sigma, xi, eta)` with `2 xi + (d - 2) eta = a - b`, a PSD
/// `M_d`, and diagonal caps respected.
pub fn geniso_certificate_params(p: &GenIsoParams) -> Result<CertificateSearchParams> {
    let d = p.d;
    if d < 3 {
        return Err(Error::BadDomain(
            "closed-form certificates need d >= 3; use the solver for qubits".into(),
        ));
    }
    let verdict = geniso_verdict(p)?;
    if verdict.status != Status::Extendible {
        return Err(Error::NotExtendible(
            verdict
                .witness
                .unwrap_or_else(|| "closed-form verdict".into()),
        ));
    }
    let df = d as f64;
    let dm1 = df - 1.0;
    let x = p.x().min(1.0);
    let t = p.diff();
    if x == 0.0 {
        return Ok(search_params(d, x, 0.0, 0.0, 0.0));
    }
    let sigma = (dm1 / df).min((1.0 - x) / x).max(0.0);
    let beta = sigma * x / dm1;

    if t >= 0.0 {
        let xi_max = x * (sigma * (1.0 - sigma) / dm1).max(0.0).sqrt();
        let xi = (t - (df - 2.0) * beta) / 2.0;
        if xi.abs() <= xi_max {
            return Ok(search_params(d, x, sigma, xi, beta));
        }
        let top = 2.0 * xi_max + (df - 2.0) * beta;
        // Between the zero point and the top of the range, M_d is convex in
        // (xi, eta) at fixed (alpha, beta).
        let theta = (t / top).min(1.0);
        return Ok(search_params(d, x, sigma, theta * xi_max, theta * beta));
    }

    let g = |nu: f64| -2.0 * ((1.0 - sigma) * nu).sqrt() + nu - sigma;
    let hi = dm1 * sigma;
    let lo = (1.0 - sigma).clamp(0.0, hi);
    let target = dm1 * t / x;
    let at = |nu: f64| {
        let xi = -(x / dm1) * ((1.0 - sigma) * nu).sqrt();
        let eta = x * (nu - sigma) / ((df - 2.0) * dm1);
        (xi, eta)
    };
    let g_lo = g(lo);
    if target < g_lo {
        if target >= g_lo - 1e-12 {
            let (xi, eta) = at(lo);
            return Ok(search_params(d, x, sigma, xi, eta));
        }
        return Err(Error::NumericalFailure(format!(
            "target {target} below the reachable minimum {g_lo}"
        )));
    }
    if g(hi) >= target {
        // g is increasing on [lo, hi].
        let (mut a, mut b) = (lo, hi);
        while b - a > BISECTION_TOL {
            let mid = 0.5 * (a + b);
            if g(mid) < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        let (xi, eta) = at(0.5 * (a + b));
        return Ok(search_params(d, x, sigma, xi, eta));
    }
    let theta = target / g_lo;
    let (xi, eta) = at(lo);
    Ok(search_params(d, x, sigma, theta * xi, theta * eta))
}

/// Circulant decomposition for an extendible generalised-isotropic state.
pub fn geniso_certificate(p: &GenIsoParams) -> Result<Decomposition> {
    let c = geniso_certificate_params(p)?;
    let x = p.x().min(1.0);
    let dm1 = p.d as f64 - 1.0;
    let md = MdParams::real(p.d, (1.0 - c.sigma) * x, c.sigma * x / dm1, c.xi, c.eta)?;
    let b0 = build_md(&md).scale(1.0 / p.d as f64);
    Decomposition::new((0..p.d).map(|l| cyclic_permute(&b0, l)).collect())
}

/// Average over all permutations fixing index `0`; the result has `M_d` form.
pub fn row_col_symmetrize(b0: &HermitianMatrix) -> HermitianMatrix {
    let d = b0.dim();
    if d < 2 {
        return b0.clone();
    }
    let rest = (d - 1) as f64;
    let beta = (1..d).map(|i| b0[(i, i)].re).sum::<f64>() / rest;
    let xi = (1..d).map(|i| b0[(i, 0)]).sum::<Complex64>() / rest;
    let eta = if d > 2 {
        let mut acc = 0.0;
        for i in 1..d {
            for j in 1..d {
                if i != j {
                    acc += b0[(i, j)].re;
                }
            }
        }
        acc / (rest * (rest - 1.0))
    } else {
        0.0
    };
    let alpha = b0[(0, 0)].re;
    HermitianMatrix::from_lower_fn(d, |i, j| match (i, j) {
        (0, 0) => Complex64::new(alpha, 0.0),
        (_, 0) => xi,
        (i, j) if i == j => Complex64::new(beta, 0.0),
        _ => Complex64::new(eta, 0.0),
    })
}
