//! Dual cumulants: construction from a variance function, verification of
//! `-ℓ'_{μ*}(-ℓ'_μ(s)) = s`, the Tweedie conjugacy rule and nonexistence tests.

mod certificate;

pub use certificate::{
    candidates, hankel_determinant, laplace_test_hankel, laplace_test_log_convexity,
    laplace_test_moment_matrix, laplace_test_taylor_moments, log_second_derivative, rechecks, scan_hankel, CertificateKind,
    NonexistenceCertificate, TestOutcome,
};

use std::sync::Arc;

use serde::Serialize;

use crate::error::domain;
use crate::levy::LevyRepresentation;
use crate::nef::{mean_at, Cumulant, Divisibility, FamilySpec, VarianceFunction};
use crate::numerics::{integrate, solve_monotone, Interval, QuadratureSpec};
use crate::{Error, Result};

/// Integration constants for a dual cumulant: `ℓ*'(m0) = s0`, `ℓ*(m0) = l0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anchor {
    pub m0: f64,
    pub s0: f64,
    pub l0: f64,
}

/// `ℓ*(m) = l0 + s0 (m - m0) + ∫_{m0}^m (m - t)/V(t) dt`, so that `ℓ*'' = 1/V`.
///
/// The double integral collapses to one quadrature after integrating by parts.
pub fn dual_cumulant_from_variance(v: &VarianceFunction, anchor: Anchor) -> Result<Cumulant> {
    let vf = v.closed().cloned().ok_or_else(|| Error::Param("variance function must be closed-form".into()))?;
    let dom = v.mean_domain;
    if !dom.contains_interior(anchor.m0) {
        return Err(domain(format!("anchor m0 = {} outside mean domain {dom}", anchor.m0)));
    }
    let Anchor { m0, s0, l0 } = anchor;
    let v1 = vf.clone();
    let v2 = vf.clone();
    Ok(Cumulant::new(dom, move |m| l0 + s0 * (m - m0) + oriented_integral(m0, m, &|t| (m - t) / v1(t)))
        .with_first(move |m| s0 + oriented_integral(m0, m, &|t| 1.0 / v2(t)))
        .with_second(move |m| 1.0 / vf(m)))
}

/// `∫_a^b g`, NaN when the quadrature fails.
fn oriented_integral(a: f64, b: f64, g: &dyn Fn(f64) -> f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    integrate(g, &Interval::closed(lo, hi), &QuadratureSpec::with_tol(1e-13, 1e-12))
        .map(|x| sign * x)
        .unwrap_or(f64::NAN)
}

/// Base family recovered from a closed-form dual cumulant by Legendre
/// conjugation: with `m(s)` solving `-ℓ*'(m) = s`, `ℓ(s) = -ℓ*(m) - s m`,
/// `ℓ'(s) = -m(s)` and `ℓ''(s) = 1/ℓ*''(m(s))`.
pub fn legendre_base(dual: &Cumulant, base_domain: Interval) -> Cumulant {
    let d = dual.clone();
    let mean_of = Arc::new(move |s: f64| -> f64 {
        let dd = d.clone();
        let dom = dd.domain;
        solve_monotone(move |m| dd.mean(m).unwrap_or(f64::NAN), s, &dom).unwrap_or(f64::NAN)
    });
    let (d1, d2) = (dual.clone(), dual.clone());
    let (mo1, mo2, mo3) = (mean_of.clone(), mean_of.clone(), mean_of);
    Cumulant::new(base_domain, move |s| {
        let m = mo1(s);
        -d1.value(m).unwrap_or(f64::NAN) - s * m
    })
    .with_first(move |s| -mo2(s))
    .with_second(move |s| 1.0 / d2.second(mo3(s)).unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPairReport {
    pub family_id: String,
    pub dual_id: String,
    pub grid: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Residuals of `-ℓ'_f(-ℓ'_g(m)) = m`, present when `f` is steep.
    pub reverse_grid: Vec<f64>,
    pub reverse_residuals: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Verify `-ℓ'_g(-ℓ'_f(s)) = s` on `grid`, and the reverse relation on the
/// default grid of `S(g)` when `f` is steep.
pub fn check_duality(f: &FamilySpec, g: &FamilySpec, grid: &[f64], tol: f64) -> Result<DualPairReport> {
    let mut residuals = Vec::with_capacity(grid.len());
    for &s in grid {
        let m = mean_at(f, s)?;
        let back = g.cumulant.mean(m)?;
        residuals.push((back - s).abs());
    }
    let (mut reverse_grid, mut reverse_residuals) = (Vec::new(), Vec::new());
    if f.steep {
        reverse_grid = g.cumulant.domain.grid(grid.len().max(2));
        for &m in &reverse_grid {
            let s = g.cumulant.mean(m)?;
            let back = f.cumulant.mean(s)?;
            reverse_residuals.push((back - m).abs());
        }
    }
    let max_residual = residuals.iter().chain(reverse_residuals.iter()).cloned().fold(0.0, f64::max);
    let bad = residuals.iter().chain(reverse_residuals.iter()).any(|r| r.is_nan());
    Ok(DualPairReport {
        family_id: f.name.clone(),
        dual_id: g.name.clone(),
        grid: grid.to_vec(),
        residuals,
        max_residual,
        reverse_grid,
        reverse_residuals,
        tolerance: tol,
        pass: !bad && max_residual <= tol,
    })
}

/// Dual of the power-variance family `V(m) = m^p/λ^{p-1}` for `p ∈ (1,2)`.
///
/// The dual has power `q = p/(p-1)` and `V*(x) = (p/q)^q x^q/λ`.
pub fn tweedie_dual(p: f64, lambda: f64) -> Result<FamilySpec> {
    if !(p > 1.0 && p < 2.0) {
        return Err(domain(format!("tweedie_dual needs 1 < p < 2, got {p}")));
    }
    power_variance_dual(p, lambda)
}

/// Dual of `V(m) = m^p/λ^{p-1}` for any `p > 1`, `p ≠ 2`:
/// `ℓ*(m) = λ^{p-1} m^{2-p}/((p-1)(p-2))`, which needs no affine correction.
pub(crate) fn power_variance_dual(p: f64, lambda: f64) -> Result<FamilySpec> {
    if !(p > 1.0 && p != 2.0 && p.is_finite()) || !(lambda > 0.0) {
        return Err(Error::Param(format!("power-variance dual needs p > 1, p ≠ 2, λ > 0 (p = {p}, λ = {lambda})")));
    }
    let q = p / (p - 1.0);
    let c = lambda.powf(p - 1.0) / ((p - 1.0) * (p - 2.0));
    let lp = lambda.powf(p - 1.0);
    let coef = (p / q).powf(q) / lambda;
    let cumulant = Cumulant::new(Interval::positive(), move |m| c * m.powf(2.0 - p))
        .with_first(move |m| -lp * m.powf(1.0 - p) / (p - 1.0))
        .with_second(move |m| lp * m.powf(-p));
    let variance = VarianceFunction::new(Interval::positive(), move |x| coef * x.powf(q));
    Ok(FamilySpec::new("tweedie_dual", cumulant, variance)
        .param("p", p)
        .param("q", q)
        .param("lambda", lambda)
        .with_mean_inverse(move |x| ((p - 1.0) * x / lp).powf(-1.0 / (p - 1.0)))
        .with_divisibility(Divisibility::Infinite)
        .with_formulas(
            format!("{c}·m^{}", 2.0 - p),
            format!("{coef}·x^{q}"),
        ))
}

/// Symmetric coefficients of a power-variance pair: `V(m) = A m^p` is dual to
/// `V*(x) = B x^q` with `A = (R/q)^p` and `B = (pR/q²)^q`.
///
/// The relation `B = (p-1)^q A^{q/p}` holds for every `R > 0`.
pub fn ab_pair(p: f64, r: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p != 2.0) || !(r > 0.0) {
        return Err(Error::Param(format!("ab_pair needs p > 1, p ≠ 2, R > 0 (p = {p}, R = {r})")));
    }
    let q = p / (p - 1.0);
    Ok(((r / q).powf(p), (p * r / (q * q)).powf(q)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualLinkReport {
    pub family_id: String,
    pub grid: Vec<f64>,
    /// `|ℓ*''(m) V(m) - 1|` with the dual's own second derivative.
    pub residuals: Vec<f64>,
    /// Same, with `ℓ*''(m) = σ² + ∫ e^{-mx} x² ν(dx)` from a Lévy representation.
    pub levy_residuals: Option<Vec<f64>>,
    pub max_residual: f64,
}

/// Check `ℓ*''(m) = 1/V(m)` on a grid of means.
pub fn dual_link_check(
    f: &FamilySpec,
    dual: &FamilySpec,
    grid: &[f64],
    levy: Option<&LevyRepresentation>,
) -> Result<DualLinkReport> {
    let mut residuals = Vec::with_capacity(grid.len());
    let mut levy_res = levy.map(|_| Vec::with_capacity(grid.len()));
    for &m in grid {
        let v = crate::nef::variance_at(f, m)?;
        residuals.push((dual.cumulant.second(m)? * v - 1.0).abs());
        if let (Some(rep), Some(out)) = (levy, levy_res.as_mut()) {
            out.push((rep.exponent_second(m)? * v - 1.0).abs());
        }
    }
    let max_residual = residuals
        .iter()
        .chain(levy_res.iter().flatten())
        .cloned()
        .fold(0.0, f64::max);
    Ok(DualLinkReport { family_id: f.name.clone(), grid: grid.to_vec(), residuals, levy_residuals: levy_res, max_residual })
}
