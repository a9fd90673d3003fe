//! State specification files.
//!
//! A spec is `{"kind": ..., "d": ..., "params": {...}}`. Complex numbers are
//! `[re, im]` pairs and matrices are lists of rows.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use symext::criteria::{geniso_verdict, isotropic_verdict, Verdict};
use symext::states::{
    is_u2_invariant_bell, isotropic_params, twirl_u2, BellCoefficients, DensityMatrix,
    GenIsoParams, U2InvariantState,
};
use symext::HermitianMatrix;

use crate::error::{CliError, CliResult};

/// Tolerance on hermiticity and trace of dense payloads.
pub const DENSE_TOL: f64 = 1e-9;

/// Tolerance for recognising circulant and generalised-isotropic structure
/// in inputs that do not declare it.
pub const STRUCTURE_TOL: f64 = 1e-9;

pub type ComplexPair = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Geniso,
    Isotropic,
    BellDiagonal,
    Dense,
    U2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub kind: Kind,
    pub d: usize,
    pub params: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenisoPayload {
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IsotropicPayload {
    a00: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BellPayload {
    grid: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensePayload {
    matrix: Vec<Vec<ComplexPair>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct U2Payload {
    btilde: Vec<Vec<ComplexPair>>,
    lambda: Vec<Vec<f64>>,
}

/// A closed-form criterion that applies to the declared family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Geniso(GenIsoParams),
    Isotropic { d: usize, a00: f64 },
}

impl ClosedForm {
    pub fn verdict(&self) -> CliResult<Verdict> {
        Ok(match *self {
            ClosedForm::Geniso(p) => geniso_verdict(&p)?,
            ClosedForm::Isotropic { d, a00 } => isotropic_verdict(d, a00)?,
        })
    }

    pub fn params(&self) -> CliResult<GenIsoParams> {
        Ok(match *self {
            ClosedForm::Geniso(p) => p,
            ClosedForm::Isotropic { d, a00 } => isotropic_params(d, a00)?,
        })
    }
}

/// A spec turned into library objects.
#[derive(Debug, Clone)]
pub struct ResolvedState {
    pub kind: Kind,
    /// The input itself when it is U2-invariant, otherwise its twirl.
    pub state: U2InvariantState,
    /// Closed form of a declared `geniso` or `isotropic` spec.
    pub declared: Option<ClosedForm>,
    /// Generalised-isotropic structure recognised in the U2-invariant state.
    pub detected: Option<GenIsoParams>,
    /// Bell weights when the U2-invariant state is circulant.
    pub bell: Option<BellCoefficients>,
    /// The input was not U2-invariant; verdicts on `state` only transfer
    /// when they are `NotExtendible`.
    pub twirled: bool,
}

impl ResolvedState {
    /// Closed form to use when one is requested: the declared family first,
    /// then a recognised pattern.
    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.declared
            .or_else(|| self.detected.map(ClosedForm::Geniso))
    }
}

fn payload<T: DeserializeOwned>(params: &Value, kind: Kind) -> CliResult<T> {
    serde_json::from_value(params.clone())
        .map_err(|e| CliError::Malformed(format!("params for kind {kind:?}: {e}")))
}

fn check_rows<T>(rows: &[Vec<T>], n: usize, what: &str) -> CliResult<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Invalid(format!("{what} must be {n}x{n}")));
    }
    Ok(())
}

pub fn complex_matrix(
    rows: &[Vec<ComplexPair>],
    n: usize,
    what: &str,
) -> CliResult<DMatrix<Complex64>> {
    check_rows(rows, n, what)?;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

pub fn complex_rows(m: &HermitianMatrix) -> Vec<Vec<ComplexPair>> {
    let n = m.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

impl StateSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn geniso(d: usize, a: f64, b: f64) -> Self {
        let params = serde_json::to_value(GenisoPayload { a, b }).expect("serializes");
        StateSpec {
            kind: Kind::Geniso,
            d,
            params,
        }
    }

    pub fn bell_diagonal(a: &BellCoefficients) -> Self {
        let params = serde_json::to_value(BellPayload { grid: a.rows() }).expect("serializes");
        StateSpec {
            kind: Kind::BellDiagonal,
            d: a.d(),
            params,
        }
    }

    pub fn u2(state: &U2InvariantState) -> Self {
        let params = serde_json::to_value(U2Payload {
            btilde: complex_rows(state.btilde()),
            lambda: state.lambda_rows(),
        })
        .expect("serializes");
        StateSpec {
            kind: Kind::U2,
            d: state.d(),
            params,
        }
    }

    pub fn dense(d: usize, m: &HermitianMatrix) -> Self {
        let params = serde_json::to_value(DensePayload {
            matrix: complex_rows(m),
        })
        .expect("serializes");
        StateSpec {
            kind: Kind::Dense,
            d,
            params,
        }
    }

    /// Bell weights of a `bell_diagonal` spec, validated.
    pub fn bell_grid(&self) -> CliResult<Option<BellCoefficients>> {
        if self.kind != Kind::BellDiagonal {
            return Ok(None);
        }
        let p: BellPayload = payload(&self.params, self.kind)?;
        check_rows(&p.grid, self.d, "grid")?;
        Ok(Some(BellCoefficients::new(self.d, &p.grid)?))
    }

    /// Dense density matrix of a `dense` spec, validated and trace-normalised.
    pub fn dense_matrix(&self) -> CliResult<Option<DensityMatrix>> {
        if self.kind != Kind::Dense {
            return Ok(None);
        }
        let p: DensePayload = payload(&self.params, self.kind)?;
        let n = self.d * self.d;
        let m = HermitianMatrix::from_matrix(complex_matrix(&p.matrix, n, "matrix")?, DENSE_TOL)?;
        Ok(Some(DensityMatrix::normalized(
            vec![self.d, self.d],
            m,
            DENSE_TOL,
        )?))
    }

    pub fn resolve(&self) -> CliResult<ResolvedState> {
        let d = self.d;
        let (state, declared, twirled) = match self.kind {
            Kind::Geniso => {
                let p: GenisoPayload = payload(&self.params, self.kind)?;
                let g = GenIsoParams::new(d, p.a, p.b)?;
                (
                    U2InvariantState::from_geniso(&g),
                    Some(ClosedForm::Geniso(g)),
                    false,
                )
            }
            Kind::Isotropic => {
                let p: IsotropicPayload = payload(&self.params, self.kind)?;
                let g = isotropic_params(d, p.a00)?;
                let closed = ClosedForm::Isotropic { d, a00: p.a00 };
                (U2InvariantState::from_geniso(&g), Some(closed), false)
            }
            Kind::BellDiagonal => {
                let a = self.bell_grid()?.expect("kind checked");
                let invariant = is_u2_invariant_bell(&a, STRUCTURE_TOL);
                (U2InvariantState::from_bell(&a), None, !invariant)
            }
            Kind::Dense => {
                let rho = self.dense_matrix()?.expect("kind checked");
                let state = twirl_u2(&rho)?;
                let changed =
                    state.to_density().matrix().max_abs_diff(rho.matrix()) > STRUCTURE_TOL;
                (state, None, changed)
            }
            Kind::U2 => {
                let p: U2Payload = payload(&self.params, self.kind)?;
                let bt = HermitianMatrix::from_matrix(
                    complex_matrix(&p.btilde, d, "btilde")?,
                    DENSE_TOL,
                )?;
                check_rows(&p.lambda, d, "lambda")?;
                (U2InvariantState::new(bt, &p.lambda)?, None, false)
            }
        };
        let bell = state.to_bell(STRUCTURE_TOL);
        let detected = bell
            .as_ref()
            .and_then(|a| GenIsoParams::detect(a, STRUCTURE_TOL));
        Ok(ResolvedState {
            kind: self.kind,
            state,
            declared,
            detected,
            bell,
            twirled,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geniso_spec_roundtrip() {
        let spec = StateSpec::geniso(3, 0.5, 0.1);
        let back = StateSpec::parse(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        let r = back.resolve().unwrap();
        assert!(matches!(r.declared, Some(ClosedForm::Geniso(_))));
        assert!(r.detected.is_some());
        assert!(!r.twirled);
    }

    #[test]
    fn unknown_fields_are_malformed() {
        let text = r#"{"kind":"geniso","d":3,"params":{"a":0.5,"b":0.1,"c":1}}"#;
        let err = StateSpec::parse(text).unwrap().resolve().unwrap_err();
        assert!(matches!(err, CliError::Malformed(_)));
        let text = r#"{"kind":"nope","d":3,"params":{}}"#;
        assert!(matches!(
            StateSpec::parse(text),
            Err(CliError::Malformed(_))
        ));
    }

    #[test]
    fn out_of_domain_is_invalid() {
        let err = StateSpec::geniso(3, 0.5, 0.5).resolve().unwrap_err();
        assert!(matches!(err, CliError::Invalid(_)));
    }

    #[test]
    fn non_hermitian_dense_is_invalid() {
        let mut m = vec![vec![[0.0, 0.0]; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = [0.25, 0.0];
        }
        m[0][1] = [0.1, 0.0];
        let spec = StateSpec {
            kind: Kind::Dense,
            d: 2,
            params: serde_json::json!({ "matrix": m }),
        };
        assert!(matches!(spec.resolve(), Err(CliError::Invalid(_))));
    }

    #[test]
    fn non_invariant_bell_grid_is_twirled() {
        let grid = vec![vec![0.4, 0.1], vec![0.3, 0.2]];
        let spec = StateSpec {
            kind: Kind::BellDiagonal,
            d: 2,
            params: serde_json::json!({ "grid": grid }),
        };
        let r = spec.resolve().unwrap();
        assert!(r.twirled);
        let a = r.bell.unwrap();
        assert!((a.get(0, 1) - 0.15).abs() < 1e-15);
        assert!((a.get(1, 1) - 0.15).abs() < 1e-15);
    }
}
