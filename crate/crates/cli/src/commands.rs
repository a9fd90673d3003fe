use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use symext::criteria::{geniso_verdict, Status, Verdict};
use symext::extender::{assemble_extension, geniso_certificate, verify_extension, MAX_DENSE_DIM};
use symext::solver::{
    decompose_circulant, decompose_general, verify_decomposition, Decomposition,
    DecompositionReport, SolveOutcome, SolverOptions,
};
use symext::states::{geniso_coeffs, is_u2_invariant_bell, BellCoefficients, GenIsoParams};
use symext::Error;

use crate::certificate::{CertificateFile, Tolerances};
use crate::error::{exit, CliError, CliResult};
use crate::output::{deliver, to_json};
use crate::spec::{Kind, ResolvedState, StateSpec, STRUCTURE_TOL};

/// Largest number of grid points per scan axis.
pub const MAX_RESOLUTION: usize = 501;

/// Slack when deciding whether a grid point lies in the valid region.
const REGION_SLACK: f64 = 1e-12;

/// What a command hands back to `main`.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Closed,
    Solver,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverFlags {
    pub tol: f64,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for SolverFlags {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverFlags {
            tol: o.psd_tol,
            max_iterations: o.max_iterations,
            residual_tol: o.residual_tol,
            seed: o.seed,
        }
    }
}

impl SolverFlags {
    pub fn options(&self) -> CliResult<SolverOptions> {
        let o = SolverOptions {
            max_iterations: self.max_iterations,
            residual_tol: self.residual_tol,
            psd_tol: self.tol,
            seed: self.seed,
        };
        o.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(o)
    }
}

pub fn status_code(s: Status) -> i32 {
    match s {
        Status::Extendible => exit::EXTENDIBLE,
        Status::NotExtendible => exit::NOT_EXTENDIBLE,
        Status::Undecided => exit::UNDECIDED,
    }
}

/// One verdict as printed by `check`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub status: &'static str,
    pub method: &'static str,
    /// `geniso`, `qubit`, `isotropic`, `circulant` or `general`.
    pub form: &'static str,
    pub margin: f64,
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl Record {
    fn new(v: Verdict, method: &'static str, form: &'static str, twirled: bool) -> Self {
        let (status, witness) = if twirled && v.status == Status::Extendible {
            let w = "the U2 twirl of the input is extendible, which does not decide the input";
            (Status::Undecided, Some(w.to_string()))
        } else {
            (v.status, v.witness)
        };
        Record {
            status: status.as_str(),
            method,
            form,
            margin: v.margin,
            witness,
            iterations: None,
            residual: None,
        }
    }

    fn status(&self) -> Status {
        match self.status {
            "Extendible" => Status::Extendible,
            "NotExtendible" => Status::NotExtendible,
            _ => Status::Undecided,
        }
    }
}

#[derive(Serialize)]
struct BothRecord {
    status: &'static str,
    method: &'static str,
    margin: f64,
    witness: Option<String>,
    agree: bool,
    closed: Record,
    solver: Record,
}

fn closed_record(r: &ResolvedState) -> CliResult<Record> {
    let cf = r.closed_form().ok_or_else(|| {
        CliError::Unavailable("no closed form applies to this state; use --method solver".into())
    })?;
    let form = match cf {
        crate::spec::ClosedForm::Isotropic { .. } => "isotropic",
        crate::spec::ClosedForm::Geniso(p) if p.d == 2 => "qubit",
        crate::spec::ClosedForm::Geniso(_) => "geniso",
    };
    Ok(Record::new(cf.verdict()?, "closed", form, r.twirled))
}

/// Runs the circulant solver when the state allows it, else the general one.
pub fn solve(r: &ResolvedState, opts: &SolverOptions) -> CliResult<(SolveOutcome, &'static str)> {
    if r.bell.is_some() {
        Ok((decompose_circulant(&r.state, opts)?, "circulant"))
    } else {
        Ok((decompose_general(&r.state, opts)?, "general"))
    }
}

fn solver_record(r: &ResolvedState, opts: &SolverOptions) -> CliResult<Record> {
    let (out, form) = solve(r, opts)?;
    let mut rec = Record::new(out.verdict, "solver", form, r.twirled);
    rec.iterations = Some(out.iterations);
    rec.residual = Some(out.residual);
    Ok(rec)
}

pub fn check(
    spec: &StateSpec,
    method: Method,
    flags: &SolverFlags,
    out: Option<&Path>,
) -> CliResult<Outcome> {
    let r = spec.resolve()?;
    let opts = flags.options()?;
    let method = match method {
        Method::Auto if r.declared.is_some() => Method::Closed,
        Method::Auto => Method::Solver,
        m => m,
    };
    let mut warnings = Vec::new();
    let (text, status) = match method {
        Method::Closed => {
            let rec = closed_record(&r)?;
            (to_json(&rec), rec.status())
        }
        Method::Solver => {
            let rec = solver_record(&r, &opts)?;
            (to_json(&rec), rec.status())
        }
        _ => {
            let closed = closed_record(&r)?;
            let solver = solver_record(&r, &opts)?;
            let (c, s) = (closed.status(), solver.status());
            let agree = c == s;
            let status = if agree || s == Status::Undecided {
                c
            } else if c == Status::Undecided {
                s
            } else {
                Status::Undecided
            };
            if !agree {
                warnings.push(format!(
                    "closed form says {} but solver says {}",
                    closed.status, solver.status
                ));
            }
            let rec = BothRecord {
                status: status.as_str(),
                method: "both",
                margin: closed.margin,
                witness: closed.witness.clone(),
                agree,
                closed,
                solver,
            };
            (to_json(&rec), status)
        }
    };
    Ok(Outcome {
        code: status_code(status),
        stdout: deliver(text, out)?,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub d: usize,
    pub x_steps: usize,
    pub diff_steps: usize,
    pub oracle: bool,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub x: f64,
    pub a_minus_b: f64,
    pub a: f64,
    pub b: f64,
    pub closed: Verdict,
    pub solver: Option<(Status, f64)>,
}

/// Grid points `(x, a - b)` of the valid region, in row-major grid order.
pub fn scan_points(p: &ScanParams) -> CliResult<Vec<GenIsoParams>> {
    if p.d < 2 {
        return Err(CliError::Usage(format!("scan needs d >= 2, got {}", p.d)));
    }
    for n in [p.x_steps, p.diff_steps] {
        if !(2..=MAX_RESOLUTION).contains(&n) {
            return Err(CliError::Usage(format!(
                "resolution must be between 2 and {MAX_RESOLUTION}, got {n}"
            )));
        }
    }
    let dm1 = (p.d - 1) as f64;
    let lo = -1.0 / dm1;
    let mut points = Vec::new();
    for i in 0..p.x_steps {
        let x = i as f64 / (p.x_steps - 1) as f64;
        for j in 0..p.diff_steps {
            let t = lo + (1.0 - lo) * j as f64 / (p.diff_steps - 1) as f64;
            if t < -x / dm1 - REGION_SLACK || t > x + REGION_SLACK {
                continue;
            }
            points.push(GenIsoParams::from_x_diff(p.d, x, t)?);
        }
    }
    Ok(points)
}

pub fn scan_rows(p: &ScanParams, flags: &SolverFlags) -> CliResult<Vec<ScanRow>> {
    let opts = flags.options()?;
    let points = scan_points(p)?;
    let row = |g: &GenIsoParams| -> CliResult<ScanRow> {
        let solver = if p.oracle {
            let state = symext::states::U2InvariantState::from_geniso(g);
            let out = decompose_circulant(&state, &opts)?;
            Some((out.verdict.status, out.residual))
        } else {
            None
        };
        Ok(ScanRow {
            x: g.x(),
            a_minus_b: g.diff(),
            a: g.a,
            b: g.b,
            closed: geniso_verdict(g)?,
            solver,
        })
    };
    if !p.oracle {
        return points.iter().map(row).collect();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = p.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| points.par_iter().map(row).collect())
}

fn finite(v: f64) -> CliResult<String> {
    if v.is_finite() {
        Ok(v.to_string())
    } else {
        Err(CliError::Internal(format!(
            "non-finite value {v} in scan output"
        )))
    }
}

pub fn scan_csv(p: &ScanParams, rows: &[ScanRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "x",
        "a_minus_b",
        "a",
        "b",
        "closed_verdict",
        "closed_margin",
    ];
    if p.oracle {
        header.extend(["solver_verdict", "solver_residual"]);
    }
    let csv_err = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![
            finite(r.x)?,
            finite(r.a_minus_b)?,
            finite(r.a)?,
            finite(r.b)?,
            r.closed.status.as_str().to_string(),
            finite(r.closed.margin)?,
        ];
        if let Some((s, res)) = r.solver {
            rec.push(s.as_str().to_string());
            rec.push(finite(res)?);
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn scan(p: &ScanParams, flags: &SolverFlags, out: Option<&Path>) -> CliResult<Outcome> {
    let rows = scan_rows(p, flags)?;
    let text = scan_csv(p, &rows)?;
    Ok(Outcome {
        code: exit::EXTENDIBLE,
        stdout: deliver(text, out)?,
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertMethod {
    Auto,
    Closed,
    Solver,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub sum_residual: f64,
    pub min_eigenvalue: f64,
    pub max_cap_excess: f64,
    pub sum_ok: bool,
    pub psd_ok: bool,
    pub caps_ok: bool,
    pub pass: bool,
}

impl From<DecompositionReport> for DecompositionSummary {
    fn from(r: DecompositionReport) -> Self {
        DecompositionSummary {
            sum_residual: r.sum_residual,
            min_eigenvalue: r.min_eigenvalue,
            max_cap_excess: r.max_cap_excess,
            sum_ok: r.sum_ok,
            psd_ok: r.psd_ok,
            caps_ok: r.caps_ok,
            pass: r.pass,
        }
    }
}

/// The three conditions on the assembled extension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionSummary {
    pub positivity_min_eigenvalue: f64,
    pub symmetry_residual: f64,
    pub partial_trace_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub tol: f64,
    pub decomposition: DecompositionSummary,
    pub extension: Option<ExtensionSummary>,
    pub error: Option<String>,
}

fn dense_limit(d: usize) -> CliResult<()> {
    if d > MAX_DENSE_DIM {
        return Err(CliError::Unavailable(format!(
            "certificates are limited to d <= {MAX_DENSE_DIM}, got {d}"
        )));
    }
    Ok(())
}

fn require_invariant(r: &ResolvedState) -> CliResult<()> {
    if r.twirled {
        return Err(CliError::Unavailable(
            "certificates need a U2-invariant input; twirl it first".into(),
        ));
    }
    Ok(())
}

/// Checks a decomposition and its assembled extension against the state.
pub fn verify_report(r: &ResolvedState, dec: &Decomposition, tol: f64) -> CliResult<VerifyReport> {
    let decomposition: DecompositionSummary = verify_decomposition(&r.state, dec, tol)?.into();
    let rho = r.state.to_density();
    let (extension, error) = match assemble_extension(&r.state, dec) {
        Ok(ext) => {
            let e = verify_extension(&rho, &ext, tol)?;
            let summary = ExtensionSummary {
                positivity_min_eigenvalue: e.min_eigenvalue,
                symmetry_residual: e.symmetry_residual,
                partial_trace_residual: e.trace_residual,
                pass: e.pass,
            };
            (Some(summary), None)
        }
        Err(e @ Error::NegativeAbsorber { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let pass = decomposition.pass && extension.as_ref().is_some_and(|e| e.pass);
    Ok(VerifyReport {
        pass,
        tol,
        decomposition,
        extension,
        error,
    })
}

fn refusal(status: Status, why: String) -> Outcome {
    Outcome {
        code: status_code(status),
        stdout: String::new(),
        warnings: vec![why],
    }
}

pub fn certify(
    spec: &StateSpec,
    method: CertMethod,
    flags: &SolverFlags,
    out: &Path,
) -> CliResult<Outcome> {
    let r = spec.resolve()?;
    require_invariant(&r)?;
    let d = r.state.d();
    dense_limit(d)?;
    let opts = flags.options()?;
    let closed = r.closed_form().filter(|_| d >= 3);
    let use_closed = match method {
        CertMethod::Auto => closed.is_some(),
        CertMethod::Closed if closed.is_none() => {
            return Err(CliError::Unavailable(
                "closed-form certificates need a generalised-isotropic state with d >= 3".into(),
            ))
        }
        CertMethod::Closed => true,
        CertMethod::Solver => false,
    };
    let (dec, family, source) = if use_closed {
        let cf = closed.expect("checked above");
        let v = cf.verdict()?;
        if v.status != Status::Extendible {
            let w = v.witness.unwrap_or_default();
            return Ok(refusal(v.status, format!("state is not extendible: {w}")));
        }
        match geniso_certificate(&cf.params()?) {
            Ok(dec) => (dec, "geniso", "closed"),
            Err(Error::NotExtendible(w)) => {
                return Ok(refusal(
                    Status::NotExtendible,
                    format!("state is not extendible: {w}"),
                ))
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        let (outcome, form) = solve(&r, &opts)?;
        match (outcome.verdict.status, outcome.decomposition) {
            (Status::Extendible, Some(dec)) => (dec, form, "solver"),
            (status, _) => {
                let w = outcome.verdict.witness.unwrap_or_default();
                let why = match status {
                    Status::NotExtendible => format!("state is not extendible: {w}"),
                    _ => format!(
                        "solver did not converge (residual {:e} after {} iterations); \
                         try a larger --max-iterations",
                        outcome.residual, outcome.iterations
                    ),
                };
                return Ok(refusal(status, why));
            }
        }
    };
    let verify_tol = 10.0 * opts.residual_tol;
    let report = verify_report(&r, &dec, verify_tol)?;
    if !report.pass {
        return Err(CliError::Internal(format!(
            "constructed certificate failed verification: {}",
            to_json(&report)
        )));
    }
    let tolerances = Tolerances {
        residual_tol: opts.residual_tol,
        psd_tol: opts.psd_tol,
        verify_tol,
    };
    let cert = CertificateFile::new(&dec, family, source, tolerances);
    crate::output::write_atomic(out, to_json(&cert).as_bytes())?;
    Ok(Outcome {
        code: exit::EXTENDIBLE,
        stdout: to_json(&report),
        warnings: Vec::new(),
    })
}

pub fn verify(
    spec: &StateSpec,
    cert: &CertificateFile,
    tol: f64,
    out: Option<&Path>,
) -> CliResult<Outcome> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let r = spec.resolve()?;
    require_invariant(&r)?;
    dense_limit(r.state.d())?;
    if cert.d != r.state.d() {
        return Err(CliError::CorruptCertificate(format!(
            "certificate is for d = {}, state has d = {}",
            cert.d,
            r.state.d()
        )));
    }
    let dec = cert.decomposition()?;
    let report = verify_report(&r, &dec, tol)?;
    let code = if report.pass {
        exit::EXTENDIBLE
    } else {
        exit::NOT_EXTENDIBLE
    };
    Ok(Outcome {
        code,
        stdout: deliver(to_json(&report), out)?,
        warnings: Vec::new(),
    })
}

/// Compact form of the U2 twirl of a spec.
pub fn twirl_spec(spec: &StateSpec) -> CliResult<StateSpec> {
    match spec.kind {
        Kind::BellDiagonal => {
            let a = spec.bell_grid()?.expect("kind checked");
            if is_u2_invariant_bell(&a, STRUCTURE_TOL) {
                return Ok(StateSpec::bell_diagonal(&a));
            }
            let d = a.d();
            let mut rows = a.rows();
            for m in 1..d {
                let mean = a.marginal(m)? / d as f64;
                for row in rows.iter_mut() {
                    row[m] = mean;
                }
            }
            Ok(StateSpec::bell_diagonal(&BellCoefficients::new(d, &rows)?))
        }
        Kind::Geniso | Kind::Isotropic => {
            let r = spec.resolve()?;
            let p = r.declared.expect("declared family").params()?;
            Ok(StateSpec::bell_diagonal(&geniso_coeffs(&p)))
        }
        Kind::Dense | Kind::U2 => {
            let r = spec.resolve()?;
            Ok(match &r.bell {
                Some(a) => StateSpec::bell_diagonal(a),
                None => StateSpec::u2(&r.state),
            })
        }
    }
}

pub fn twirl(spec: &StateSpec, out: Option<&Path>) -> CliResult<Outcome> {
    let twirled = twirl_spec(spec)?;
    Ok(Outcome {
        code: exit::EXTENDIBLE,
        stdout: deliver(twirled.to_json(), out)?,
        warnings: Vec::new(),
    })
}
