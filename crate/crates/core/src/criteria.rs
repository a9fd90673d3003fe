//! Closed-form extendibility verdicts.
//!
//! All inequalities are non-strict, and a difference within [`TIE_TOL`] of a
//! boundary counts as inside (the qubit polynomial uses [`QUBIT_POLY_TOL`]). Margins are positive inside the extendible
//! region.

use std::fmt;

use crate::error::{Error, Result};
use crate::matcore::MdParams;
use crate::states::{GenIsoParams, U2InvariantState};

/// Double-precision ties at a boundary resolve toward `Extendible`.
pub const TIE_TOL: f64 = 1e-14;

/// Slack on the qubit polynomial, whose terms are O(1) and cancel.
pub const QUBIT_POLY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Extendible,
    NotExtendible,
    /// Only produced by numerical paths or by necessary-only tests.
    Undecided,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Extendible => "Extendible",
            Status::NotExtendible => "NotExtendible",
            Status::Undecided => "Undecided",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<String>,
    /// Signed distance to the boundary of the tested inequality.
    pub margin: f64,
}

impl Verdict {
    fn from_margin(margin: f64, witness: String) -> Self {
        let status = if margin >= -TIE_TOL {
            Status::Extendible
        } else {
            Status::NotExtendible
        };
        Verdict {
            status,
            witness: Some(witness),
            margin,
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::BadDomain(format!("x = {x} outside [0, 1]")))
    }
}

fn check_d(d: usize) -> Result<f64> {
    if d < 2 {
        Err(Error::BadDomain(format!(
            "local dimension must be >= 2, got {d}"
        )))
    } else {
        Ok(d as f64)
    }
}

/// Tests `|a_{ii,pp}| <= sum_k sqrt(a_{ik,ik} a_{pk,pk})` for every pair.
/// Failure proves the state is not extendible; success proves nothing.
pub fn necessary_corollary(state: &U2InvariantState, tol: f64) -> Verdict {
    let d = state.d();
    let mut worst = f64::INFINITY;
    let mut pair = (0, 0);
    for i in 0..d {
        for p in 0..i {
            let lhs = state.btilde()[(i, p)].norm();
            let rhs: f64 = (0..d)
                .map(|k| (state.lambda(i, k) * state.lambda(p, k)).sqrt())
                .sum();
            if rhs - lhs < worst {
                worst = rhs - lhs;
                pair = (i, p);
            }
        }
    }
    let (i, p) = pair;
    if worst < -tol {
        Verdict {
            status: Status::NotExtendible,
            witness: Some(format!(
                "|a_{{{i}{i},{p}{p}}}| exceeds sum_k sqrt(a_{{{i}k,{i}k}} a_{{{p}k,{p}k}}) by {:e}",
                -worst
            )),
            margin: worst,
        }
    } else {
        Verdict {
            status: Status::Undecided,
            witness: Some(format!(
                "tightest pair ({i},{p}) holds with slack {worst:e}"
            )),
            margin: worst,
        }
    }
}

/// Positivity of `M_d(alpha, beta, xi, eta)` from its scalar parameters.
///
/// `M_d` splits into the eigenvalue `beta - eta` (multiplicity `d - 2`) and
/// the block `R = [[alpha, sqrt(d-1) xi], [sqrt(d-1) xi*, beta + (d-2) eta]]`.
/// `R` is PSD iff `alpha >= 0`, `eta >= -beta / (d-2)` and
/// `alpha (beta + (d-2) eta) >= (d-1) |xi|^2`, which together with
/// `eta <= beta` are the closed-form conditions (`det M_d` is `(beta - eta)^(d-2) det R`).
/// The tolerance is applied to these eigenvalues rather than to `det M_d`,
/// whose `(beta - eta)^(d-2)` factor would otherwise mask negative `det R`.
pub fn md_psd_check(p: &MdParams, tol: f64) -> bool {
    let dm1 = (p.d - 1) as f64;
    let lower = p.beta + (p.d as f64 - 2.0) * p.eta;
    let half_sum = 0.5 * (p.alpha + lower);
    let half_gap = 0.5 * (p.alpha - lower);
    let reduced_min = half_sum - (half_gap * half_gap + dm1 * p.xi.norm_sqr()).sqrt();
    let bulk_ok = p.d == 2 || p.beta - p.eta >= -tol;
    bulk_ok && reduced_min >= -tol
}

/// `f(sigma) = 2 sqrt(sigma (1 - sigma) / (d - 1)) + (d - 2) sigma / (d - 1)`,
/// the largest `(a - b) / x` reachable with the lower block weight `sigma`.
pub fn f_sigma(d: usize, sigma: f64) -> f64 {
    let dm1 = d as f64 - 1.0;
    2.0 * (sigma * (1.0 - sigma) / dm1).max(0.0).sqrt() + (d as f64 - 2.0) * sigma / dm1
}

/// Largest extendible `a - b` at fixed `x`.
pub fn ab_max(d: usize, x: f64) -> Result<f64> {
    let df = check_d(d)?;
    check_x(x)?;
    if x <= df / (2.0 * df - 1.0) {
        return Ok(x);
    }
    let dm1 = df - 1.0;
    Ok(2.0 * ((1.0 - x) * (2.0 * x - 1.0) / dm1).sqrt() + (df - 2.0) * (1.0 - x) / dm1)
}

/// Smallest extendible `a - b` at fixed `x`.
///
/// Up to `x = d / (d + 1)` this is the edge `a = 0` of the parameter
/// domain. Beyond it the diagonal caps `(B_k)_{ii} <= (1 - x) / (d (d - 1))`
/// bind and the bound moves inward to
/// `-2 sqrt((1 - x)(2x - 1) / (d - 1)) + (d - 2)(1 - x) / (d - 1)`,
/// reaching `0` at `x = 1`.
pub fn ab_min(d: usize, x: f64) -> Result<f64> {
    let df = check_d(d)?;
    check_x(x)?;
    let dm1 = df - 1.0;
    if x <= df / (df + 1.0) {
        return Ok(-x / dm1);
    }
    Ok(-2.0 * ((1.0 - x) * (2.0 * x - 1.0) / dm1).sqrt() + (df - 2.0) * (1.0 - x) / dm1)
}

/// Verdict for a generalised-isotropic state. Qubits go to [`qubit_verdict`].
pub fn geniso_verdict(p: &GenIsoParams) -> Result<Verdict> {
    if p.d == 2 {
        return qubit_verdict(p.a, p.b);
    }
    let d = p.d;
    let x = p.x().min(1.0);
    let t = p.diff();
    let hi = ab_max(d, x)?;
    let lo = ab_min(d, x)?;
    let upper = hi - t;
    let lower = t - lo;
    let (margin, witness) = if upper <= lower {
        (upper, format!("a-b = {t} vs ab_max(x = {x}) = {hi}"))
    } else {
        (lower, format!("a-b = {t} vs ab_min(x = {x}) = {lo}"))
    };
    Ok(Verdict::from_margin(margin, witness))
}

/// Qubit generalised-isotropic verdict:
/// `-9a^2 - 14ab - 9b^2 + 12a + 12b - 4 >= 0`, i.e.
/// `(a - b)^2 <= 4 (1 - x)(2x - 1)` with `x = a + b`.
pub fn qubit_verdict(a: f64, b: f64) -> Result<Verdict> {
    let p = GenIsoParams::new(2, a, b)?;
    let poly = qubit_polynomial(p.a, p.b);
    let x = p.x().min(1.0);
    let t = p.diff().abs();
    let radicand = 4.0 * (1.0 - x) * (2.0 * x - 1.0);
    let margin = if radicand >= 0.0 {
        radicand.sqrt() - t
    } else {
        -(radicand.abs().sqrt() + t)
    };
    let status = if poly >= -QUBIT_POLY_TOL {
        Status::Extendible
    } else {
        Status::NotExtendible
    };
    Ok(Verdict {
        status,
        witness: Some(format!("qubit polynomial = {poly:e}")),
        margin,
    })
}

pub fn qubit_polynomial(a: f64, b: f64) -> f64 {
    -9.0 * a * a - 14.0 * a * b - 9.0 * b * b + 12.0 * a + 12.0 * b - 4.0
}

/// Isotropic states: `a00 <= (d + 1) / (2d)` for `d >= 3`, and
/// `a00 in [1/4, 3/4]` for qubits.
pub fn isotropic_verdict(d: usize, a00: f64) -> Result<Verdict> {
    let df = check_d(d)?;
    if !(0.0..=1.0).contains(&a00) {
        return Err(Error::BadDomain(format!("a00 = {a00} outside [0, 1]")));
    }
    if d == 2 {
        let margin = (a00 - 0.25).min(0.75 - a00);
        return Ok(Verdict::from_margin(
            margin,
            format!("a00 = {a00} vs [1/4, 3/4]"),
        ));
    }
    let threshold = (df + 1.0) / (2.0 * df);
    Ok(Verdict::from_margin(
        threshold - a00,
        format!("a00 = {a00} vs threshold {threshold}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{build_md, det_md, is_psd_eigen, test_util::rng};
    use crate::states::{
        bell_diag_to_density, geniso_coeffs, isotropic_params, twirl_u2, BellCoefficients,
    };
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::Rng;

    fn pure_bell(d: usize) -> U2InvariantState {
        let mut grid = vec![0.0; d * d];
        grid[0] = 1.0;
        U2InvariantState::from_bell(&BellCoefficients::from_flat(d, grid).unwrap())
    }

    #[test]
    fn corollary_examples() {
        let v = necessary_corollary(&pure_bell(3), 1e-12);
        assert_eq!(v.status, Status::NotExtendible);
        assert_relative_eq!(v.margin, -1.0 / 3.0, epsilon = 1e-12);

        let mixed = U2InvariantState::from_bell(
            &BellCoefficients::from_flat(3, vec![1.0 / 9.0; 9]).unwrap(),
        );
        assert_eq!(necessary_corollary(&mixed, 1e-12).status, Status::Undecided);

        let p = GenIsoParams::new(3, 0.5, 0.1).unwrap();
        let v = necessary_corollary(&U2InvariantState::from_geniso(&p), 1e-12);
        assert_eq!(v.status, Status::Undecided);
        // |a-b|/d against d * sqrt(lambda_ii lambda_pi) + (d-2) * lambda_off.
        let x = p.x();
        let off = (1.0 - x) / 6.0;
        let expect = 2.0 * (x / 3.0 * off).sqrt() + off - 0.4 / 3.0;
        assert_relative_eq!(v.margin, expect, epsilon = 1e-12);
    }

    #[test]
    fn corollary_never_rejects_extendible_geniso() {
        for d in 3..=5 {
            for i in 0..=40 {
                let x = i as f64 / 40.0;
                for j in 0..=40 {
                    let t =
                        -1.0 / (d as f64 - 1.0) + j as f64 / 40.0 * (1.0 + 1.0 / (d as f64 - 1.0));
                    let Ok(p) = GenIsoParams::from_x_diff(d, x, t) else {
                        continue;
                    };
                    let v = geniso_verdict(&p).unwrap();
                    if v.status == Status::Extendible {
                        let c = necessary_corollary(&U2InvariantState::from_geniso(&p), 1e-12);
                        assert_ne!(c.status, Status::NotExtendible, "d={d} x={x} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn md_check_examples() {
        let boundary = MdParams::real(4, 1.0, 1.0, 0.0, -0.5).unwrap();
        assert!(md_psd_check(&boundary, 1e-12));
        let bad_xi = MdParams::real(3, 1.0, 1.0, 1.01, 0.0).unwrap();
        assert!(!md_psd_check(&bad_xi, 1e-9));
        let qubit = MdParams::new(2, 1.0, 4.0, Complex64::new(0.0, 2.0), 0.0).unwrap();
        assert!(md_psd_check(&qubit, 1e-12));

        // Tiny beta - eta hides a clearly negative reduced determinant.
        let masked = MdParams::new(
            5,
            0.3613314531634837,
            0.003952505603492584,
            Complex64::new(-0.036831201295489946, -0.005382246249396203),
            0.0029451257069804254,
        )
        .unwrap();
        assert!(det_md(&masked).abs() < 1e-9);
        assert!(!md_psd_check(&masked, 1e-9));
    }

    #[test]
    fn md_check_matches_closed_form_conditions() {
        let mut r = rng(14);
        for _ in 0..5000 {
            let d = r.random_range(3..=7);
            let p = MdParams::new(
                d,
                r.random_range(-0.2..1.0),
                r.random_range(-0.2..1.0),
                Complex64::new(r.random_range(-0.5..0.5), r.random_range(-0.5..0.5)),
                r.random_range(-0.5..1.0),
            )
            .unwrap();
            let closed = p.alpha >= 0.0
                && p.beta >= 0.0
                && p.xi.norm() <= (p.alpha.max(0.0) * p.beta.max(0.0)).sqrt()
                && p.eta >= -p.beta / (d - 2) as f64
                && p.eta <= p.beta
                && det_md(&p) >= 0.0;
            assert_eq!(md_psd_check(&p, 0.0), closed, "{p:?}");
        }
    }

    #[test]
    fn md_check_matches_eigenvalues() {
        let mut r = rng(11);
        for _ in 0..2000 {
            let d = r.random_range(3..=6);
            let alpha = r.random_range(-0.2..1.0);
            let beta = r.random_range(-0.2..1.0);
            let xi = Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            let eta = r.random_range(-1.0..1.0);
            let p = MdParams::new(d, alpha, beta, xi, eta).unwrap();
            assert_eq!(
                md_psd_check(&p, 1e-9),
                is_psd_eigen(&build_md(&p), 1e-9).unwrap(),
                "{p:?}"
            );
        }
    }

    #[test]
    fn f_identities() {
        for d in 3..=8 {
            assert_eq!(2.0 / d as f64 + (d as f64 - 2.0) / d as f64, 1.0);
            assert_relative_eq!(
                f_sigma(d, (d as f64 - 1.0) / d as f64),
                1.0,
                epsilon = 1e-15
            );
            let mut prev = f_sigma(d, 0.0);
            for k in 1..=1000 {
                let s = k as f64 / 1000.0 * (d as f64 - 1.0) / d as f64;
                let v = f_sigma(d, s);
                assert!(v >= prev - 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn ab_max_examples() {
        for d in 3..=8 {
            let x0 = d as f64 / (2.0 * d as f64 - 1.0);
            assert_eq!(ab_max(d, x0).unwrap(), x0);
            let sigma = (1.0 - x0) / x0;
            assert_relative_eq!(x0 * f_sigma(d, sigma), x0, epsilon = 1e-12);
            assert_eq!(ab_max(d, 1.0).unwrap(), 0.0);
        }
        let expect = 2.0 * (0.3f64 * 0.4 / 2.0).sqrt() + 0.5 * 0.3;
        assert_relative_eq!(ab_max(3, 0.7).unwrap(), expect, epsilon = 1e-15);
        assert!((ab_max(3, 0.7).unwrap() - 0.6399).abs() < 1e-4);
        assert!(ab_max(3, 1.2).is_err());
        assert!(ab_max(1, 0.5).is_err());
    }

    #[test]
    fn ab_max_is_x_times_max_of_f() {
        for d in 3..=6 {
            for i in 1..=50 {
                let x = i as f64 / 50.0;
                let hi = 1f64.min((1.0 - x) / x).min((d as f64 - 1.0) / d as f64);
                let best = (0..=20000)
                    .map(|k| x * f_sigma(d, hi * k as f64 / 20000.0))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!((ab_max(d, x).unwrap() - best).abs() < 1e-6, "d={d} x={x}");
            }
        }
    }

    #[test]
    fn ab_min_examples() {
        assert_relative_eq!(ab_min(3, 0.6).unwrap(), -0.3, epsilon = 1e-15);
        assert_eq!(ab_min(3, 0.0).unwrap(), 0.0);
        for d in 3..=8 {
            assert!(ab_min(d, 1.0).unwrap().abs() < 1e-15);
            let x0 = d as f64 / (d as f64 + 1.0);
            let df = d as f64;
            let dm1 = df - 1.0;
            let radical =
                -2.0 * ((1.0 - x0) * (2.0 * x0 - 1.0) / dm1).sqrt() + (df - 2.0) * (1.0 - x0) / dm1;
            assert_relative_eq!(radical, -x0 / dm1, epsilon = 1e-12);
        }
    }

    #[test]
    fn ab_min_never_excludes_valid_a_below_b_at_moderate_x() {
        let mut r = rng(12);
        for _ in 0..2000 {
            let d = r.random_range(3..=6);
            let df = d as f64;
            let b = r.random_range(0.0..1.0 / (df - 1.0));
            let a = r.random_range(0.0..(1.0 - (df - 1.0) * b).max(0.0));
            let p = GenIsoParams::new(d, a, b).unwrap();
            assert!(p.diff() >= -p.x() / (df - 1.0) - 1e-15);
            if p.x() <= df / (df + 1.0) && a < b {
                assert_eq!(geniso_verdict(&p).unwrap().status, Status::Extendible);
            }
        }
    }

    #[test]
    fn high_weight_states_with_a_below_b_can_fail() {
        // At x = 1 every coherence block must be diagonal, so b > 0 with
        // a = 1 - (d-1) b has |a_{ii,pp}| = b/d > 0 = the allowed value.
        let p = GenIsoParams::new(3, 0.0, 0.5).unwrap();
        assert_eq!(geniso_verdict(&p).unwrap().status, Status::NotExtendible);
        let c = necessary_corollary(&U2InvariantState::from_geniso(&p), 1e-12);
        assert_eq!(c.status, Status::NotExtendible);
    }

    #[test]
    fn geniso_examples() {
        let mixed = GenIsoParams::new(3, 1.0 / 9.0, 1.0 / 9.0).unwrap();
        assert_eq!(geniso_verdict(&mixed).unwrap().status, Status::Extendible);
        let pure = GenIsoParams::new(3, 1.0, 0.0).unwrap();
        let v = geniso_verdict(&pure).unwrap();
        assert_eq!(v.status, Status::NotExtendible);
        assert_relative_eq!(v.margin, -1.0, epsilon = 1e-15);
        let v = geniso_verdict(&GenIsoParams::new(3, 0.5, 0.1).unwrap()).unwrap();
        assert_eq!(v.status, Status::Extendible);
        assert!((v.margin - (0.6399 - 0.4)).abs() < 1e-4);
        let zero = GenIsoParams::new(4, 0.0, 0.0).unwrap();
        assert_eq!(geniso_verdict(&zero).unwrap().status, Status::Extendible);
    }

    #[test]
    fn geniso_convexity_along_fixed_x() {
        for d in 3..=6 {
            for i in 0..=30 {
                let x = i as f64 / 30.0;
                let ts: Vec<f64> = (0..=60)
                    .map(|j| -x / (d as f64 - 1.0) + j as f64 / 60.0 * (x + x / (d as f64 - 1.0)))
                    .collect();
                let ok: Vec<bool> = ts
                    .iter()
                    .map(|&t| {
                        let p = GenIsoParams::from_x_diff(d, x, t).unwrap();
                        geniso_verdict(&p).unwrap().status == Status::Extendible
                    })
                    .collect();
                let first = ok.iter().position(|&v| v);
                let last = ok.iter().rposition(|&v| v);
                if let (Some(f), Some(l)) = (first, last) {
                    assert!(ok[f..=l].iter().all(|&v| v), "gap at d={d} x={x}");
                }
            }
        }
    }

    #[test]
    fn qubit_examples() {
        assert_eq!(
            qubit_verdict(0.25, 0.25).unwrap().status,
            Status::Extendible
        );
        let v = qubit_verdict(0.75, 1.0 / 12.0).unwrap();
        assert_eq!(v.status, Status::Extendible);
        assert!(v.margin.abs() < 1e-12);
        let v = qubit_verdict(1.0, 0.0).unwrap();
        assert_eq!(v.status, Status::NotExtendible);
        assert_relative_eq!(qubit_polynomial(1.0, 0.0), -1.0);
        assert!(qubit_verdict(0.7, 0.7).is_err());
    }

    #[test]
    fn qubit_polynomial_matches_radical_form() {
        let n = 200;
        for i in 0..=n {
            for j in 0..=n - i {
                let a = i as f64 / n as f64;
                let b = j as f64 / n as f64;
                let x = a + b;
                let radicand = 4.0 * (1.0 - x) * (2.0 * x - 1.0);
                let radical = radicand >= 0.0 && (a - b).abs() <= radicand.sqrt() + 1e-12;
                let v = qubit_verdict(a, b).unwrap();
                // The polynomial and radical forms differ only by rounding
                // right on the boundary curve.
                if v.margin.abs() > 1e-9 {
                    assert_eq!(v.status == Status::Extendible, radical, "a={a} b={b}");
                    assert_eq!(v.margin > 0.0, radical);
                }
            }
        }
    }

    #[test]
    fn isotropic_examples() {
        assert_eq!(
            isotropic_verdict(3, 2.0 / 3.0).unwrap().status,
            Status::Extendible
        );
        assert_eq!(
            isotropic_verdict(3, 2.0 / 3.0 + 1e-9).unwrap().status,
            Status::NotExtendible
        );
        let p = isotropic_params(3, 2.0 / 3.0).unwrap();
        assert_relative_eq!(p.x(), 0.75, epsilon = 1e-15);
        assert_eq!(
            isotropic_verdict(2, 0.2).unwrap().status,
            Status::NotExtendible
        );
        assert_eq!(
            isotropic_verdict(2, 0.9).unwrap().status,
            Status::NotExtendible
        );
        for d in 2..=8 {
            let v = isotropic_verdict(d, 1.0 / (d * d) as f64).unwrap();
            assert_eq!(v.status, Status::Extendible);
        }
        assert!(isotropic_verdict(3, -0.1).is_err());
    }

    #[test]
    fn isotropic_agrees_with_geniso() {
        let mut r = rng(13);
        for d in 2..=6 {
            for _ in 0..500 {
                let a00: f64 = r.random_range(0.0..1.0);
                let iso = isotropic_verdict(d, a00).unwrap();
                let gen = geniso_verdict(&isotropic_params(d, a00).unwrap()).unwrap();
                if iso.margin.abs() > 1e-9 {
                    assert_eq!(iso.status, gen.status, "d={d} a00={a00}");
                }
            }
        }
    }

    #[test]
    fn pure_bell_state_is_rejected_everywhere() {
        for d in 2..=6 {
            assert_eq!(
                necessary_corollary(&pure_bell(d), 1e-12).status,
                Status::NotExtendible
            );
            let p = GenIsoParams::new(d, 1.0, 0.0).unwrap();
            assert_eq!(geniso_verdict(&p).unwrap().status, Status::NotExtendible);
        }
    }

    #[test]
    fn twirled_geniso_has_same_verdict_inputs() {
        let p = GenIsoParams::new(4, 0.3, 0.12).unwrap();
        let s = twirl_u2(&bell_diag_to_density(&geniso_coeffs(&p))).unwrap();
        assert!(
            s.btilde()
                .max_abs_diff(U2InvariantState::from_geniso(&p).btilde())
                < 1e-12
        );
    }

    proptest! {
        #[test]
        fn ab_bounds_are_ordered(d in 3usize..8, x in 0.0f64..=1.0) {
            let lo = ab_min(d, x).unwrap();
            let hi = ab_max(d, x).unwrap();
            prop_assert!(lo <= hi + 1e-15);
            prop_assert!(lo >= -x / (d as f64 - 1.0) - 1e-15);
            prop_assert!(hi <= x + 1e-15);
        }

        #[test]
        fn a_below_b_passes_when_x_is_moderate(d in 3usize..7, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let df = d as f64;
            let x = u * df / (df + 1.0);
            let t = -v * x / (df - 1.0);
            let p = GenIsoParams::from_x_diff(d, x, t).unwrap();
            prop_assert_eq!(geniso_verdict(&p).unwrap().status, Status::Extendible);
        }
    }
}
