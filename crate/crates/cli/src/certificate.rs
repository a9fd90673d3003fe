//! Certificate files: the decomposition blocks plus enough metadata to
//! re-check them.

use serde::{Deserialize, Serialize};
use symext::solver::Decomposition;
use symext::HermitianMatrix;

use crate::error::{CliError, CliResult};
use crate::spec::{complex_matrix, complex_rows, ComplexPair, DENSE_TOL};

pub const FORMAT: &str = "symext-certificate";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub residual_tol: f64,
    pub psd_tol: f64,
    pub verify_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub format: String,
    pub tool_version: String,
    pub d: usize,
    /// `geniso`, `circulant` or `general`.
    pub family: String,
    /// `closed` or `solver`.
    pub source: String,
    pub tolerances: Tolerances,
    /// `blocks[k]` is `B_k` as rows of `[re, im]` pairs.
    pub blocks: Vec<Vec<Vec<ComplexPair>>>,
}

impl CertificateFile {
    pub fn new(dec: &Decomposition, family: &str, source: &str, tolerances: Tolerances) -> Self {
        CertificateFile {
            format: FORMAT.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            d: dec.d,
            family: family.into(),
            source: source.into(),
            tolerances,
            blocks: dec.blocks.iter().map(complex_rows).collect(),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cert: Self =
            serde_json::from_str(text).map_err(|e| CliError::CorruptCertificate(e.to_string()))?;
        if cert.format != FORMAT {
            return Err(CliError::CorruptCertificate(format!(
                "format is {:?}, expected {FORMAT:?}",
                cert.format
            )));
        }
        Ok(cert)
    }

    /// Rebuilds the blocks; shape or hermiticity defects are corruption.
    pub fn decomposition(&self) -> CliResult<Decomposition> {
        let corrupt = |e: CliError| CliError::CorruptCertificate(e.to_string());
        if self.blocks.len() != self.d {
            return Err(CliError::CorruptCertificate(format!(
                "{} blocks for d = {}",
                self.blocks.len(),
                self.d
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let m = complex_matrix(rows, self.d, &format!("block {k}")).map_err(corrupt)?;
                HermitianMatrix::from_matrix(m, DENSE_TOL)
                    .map_err(|e| CliError::CorruptCertificate(format!("block {k}: {e}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        Decomposition::new(blocks).map_err(|e| CliError::CorruptCertificate(e.to_string()))
    }
}
