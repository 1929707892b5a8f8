//! Evidence that a candidate function is not a Laplace transform.

use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::{second_derivative, taylor_coeffs, Interval, TaylorSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// A Gram matrix of the candidate (or of its tilted moments) has a negative determinant.
    MomentMatrix,
    /// An even Taylor coefficient at 0 is zero or negative.
    TaylorMoment,
    /// `(log B)''` is negative somewhere.
    LogConvexity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonexistenceCertificate {
    pub kind: CertificateKind,
    pub candidate: String,
    /// Points (or contour parameters) at which the violation is evaluated.
    pub witness: Vec<Vec<f64>>,
    pub value: f64,
    /// The positivity requirement is `value > threshold`; the certificate has `value ≤ threshold`.
    pub threshold: f64,
    pub conclusion: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TestOutcome {
    Certificate(NonexistenceCertificate),
    Pass { value: f64, detail: String },
}

impl TestOutcome {
    pub fn certificate(&self) -> Option<&NonexistenceCertificate> {
        match self {
            TestOutcome::Certificate(c) => Some(c),
            TestOutcome::Pass { .. } => None,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            TestOutcome::Certificate(c) => c.value,
            TestOutcome::Pass { value, .. } => *value,
        }
    }
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `det [[B(2m), B(m+m')], [B(m+m'), B(2m')]]`, which is `≥ 0` for any Laplace
/// transform by Cauchy–Schwarz. Certificate if `det < -1e-12·B(2m)B(2m')`.
pub fn laplace_test_moment_matrix(
    name: &str,
    b: &dyn Fn(&[f64]) -> f64,
    m: &[f64],
    mp: &[f64],
) -> TestOutcome {
    let two = |x: &[f64]| x.iter().map(|v| 2.0 * v).collect::<Vec<_>>();
    let a = b(&two(m));
    let d = b(&two(mp));
    let c = b(&add(m, mp));
    let det = a * d - c * c;
    let threshold = -1e-12 * (a * d).abs();
    if det < threshold {
        TestOutcome::Certificate(NonexistenceCertificate {
            kind: CertificateKind::MomentMatrix,
            candidate: name.to_string(),
            witness: vec![m.to_vec(), mp.to_vec()],
            value: det,
            threshold,
            conclusion: format!(
                "det [[B(2m),B(m+m')],[B(m+m'),B(2m')]] = {det:e} < 0, but this is the Gram determinant of \
                 e^{{-<m,x>}} and e^{{-<m',x>}} for any measure, so {name} is not a Laplace transform"
            ),
        })
    } else {
        TestOutcome::Pass { value: det, detail: "moment determinant is non-negative".into() }
    }
}

/// Taylor coefficients of `B` at 0: for `B = ∫e^{-mx}P(dx)` with `P` a
/// probability, `(-1)^k k! c_k = ∫ x^k P(dx)`, so even coefficients must be
/// positive unless `P = δ₀` (then `B ≡ 1`). Certificate if some even `c_k ≤ 1e-10`
/// while the function is not constant.
pub fn laplace_test_taylor_moments(
    name: &str,
    b: &dyn Fn(Complex64) -> Complex64,
    spec: &TaylorSpec,
) -> Result<TestOutcome> {
    const TOL: f64 = 1e-10;
    let c = taylor_coeffs(b, spec)?;
    if (c[0] - 1.0).abs() > 1e-9 {
        return Err(Error::Param(format!("candidate {name} must satisfy B(0) = 1, got {}", c[0])));
    }
    let nondegenerate = c.iter().skip(1).any(|x| x.abs() > TOL);
    let setup = vec![spec.contour_radius, spec.sample_count as f64, spec.max_order as f64];
    if nondegenerate {
        for k in (2..=spec.max_order).step_by(2) {
            if c[k] <= TOL {
                let moment = c[k] * (1..=k).map(|i| i as f64).product::<f64>();
                return Ok(TestOutcome::Certificate(NonexistenceCertificate {
                    kind: CertificateKind::TaylorMoment,
                    candidate: name.to_string(),
                    witness: vec![setup.clone(), vec![k as f64]],
                    value: c[k],
                    threshold: TOL,
                    conclusion: format!(
                        "Taylor coefficient c_{k} = {:e} gives ∫x^{k} dP = {moment:e} ≤ 0 for a non-degenerate P, \
                         so {name} is not a Laplace transform",
                        c[k]
                    ),
                }));
            }
        }
    }
    Ok(TestOutcome::Pass {
        value: c.iter().skip(2).step_by(2).cloned().fold(f64::INFINITY, f64::min),
        detail: format!("even Taylor coefficients up to order {} are positive", spec.max_order),
    })
}

/// `(log B)''(x)` by a five-point difference with step `h`.
pub fn log_second_derivative(b: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    second_derivative(|t| b(t).ln(), x, h)
}

/// Log-convexity scan: `(log B)''` by five-point differences on 200 points of `scan`.
/// The witness records the point and the difference step.
pub fn laplace_test_log_convexity(name: &str, b: &dyn Fn(f64) -> f64, scan: &Interval) -> TestOutcome {
    let n = 200;
    let mut worst = (f64::INFINITY, f64::NAN, f64::NAN);
    for i in 0..n {
        let x = scan.lo + scan.width() * (i as f64 + 0.5) / n as f64;
        let h = (1e-3 * x.abs().max(1.0)).min(0.25 * scan.distance_to_boundary(x));
        let d2 = log_second_derivative(b, x, h);
        if d2 < worst.0 || worst.1.is_nan() {
            worst = (d2, x, h);
        }
    }
    let (d2, x, h) = worst;
    let threshold = -1e-10;
    if d2 < threshold {
        TestOutcome::Certificate(NonexistenceCertificate {
            kind: CertificateKind::LogConvexity,
            candidate: name.to_string(),
            witness: vec![vec![x, h]],
            value: d2,
            threshold,
            conclusion: format!(
                "(log B)''({x}) = {d2:e} < 0, but log-Laplace transforms are convex wherever finite, \
                 so {name} is not a Laplace transform"
            ),
        })
    } else {
        TestOutcome::Pass { value: d2, detail: "log B is convex on the scan".into() }
    }
}

/// Determinant of the Gram matrix of `1, X - E X, (X - E X)²` under the law
/// tilted to `m0`, from the Taylor expansion of `log B` at `m0`.
///
/// With `c_k` the coefficients of `u ↦ log B(m0 + u)`, the cumulants of the
/// tilted law are `κ_k = (-1)^k k! c_k` and the determinant is
/// `κ₂κ₄ - κ₃² + 2κ₂³`, which is non-negative for every probability.
/// Returns the determinant and the sum of the magnitudes of its terms.
pub fn hankel_determinant(log_b: &dyn Fn(Complex64) -> Complex64, m0: f64, radius: f64) -> Result<(f64, f64)> {
    let spec = TaylorSpec { max_order: 4, contour_radius: radius, sample_count: 256 };
    let c = taylor_coeffs(|u| log_b(Complex64::new(m0, 0.0) + u), &spec)?;
    let k2 = 2.0 * c[2];
    let k3 = -6.0 * c[3];
    let k4 = 24.0 * c[4];
    let det = k2 * k4 - k3 * k3 + 2.0 * k2 * k2 * k2;
    let scale = (k2 * k4).abs() + k3 * k3 + 2.0 * (k2 * k2 * k2).abs();
    Ok((det, scale))
}

/// Moment-matrix test on the tilted law at `m0` (see [`hankel_determinant`]).
pub fn laplace_test_hankel(
    name: &str,
    log_b: &dyn Fn(Complex64) -> Complex64,
    m0: f64,
    radius: f64,
) -> Result<TestOutcome> {
    let (det, scale) = hankel_determinant(log_b, m0, radius)?;
    let threshold = -1e-12 * scale;
    Ok(if det < threshold {
        TestOutcome::Certificate(NonexistenceCertificate {
            kind: CertificateKind::MomentMatrix,
            candidate: name.to_string(),
            witness: vec![vec![m0, radius]],
            value: det,
            threshold,
            conclusion: format!(
                "the law tilted to m0 = {m0} would have centred moments with \
                 det [[1,0,μ2],[0,μ2,μ3],[μ2,μ3,μ4]] = {det:e} < 0, so {name} is not a Laplace transform"
            ),
        })
    } else {
        TestOutcome::Pass { value: det, detail: format!("tilted moment determinant at m0 = {m0} is non-negative") }
    })
}

/// Scan tilt points `m0` (contour radius a fixed fraction of `m0`) and return
/// the outcome at the point with the most negative normalised determinant.
pub fn scan_hankel(
    name: &str,
    log_b: &dyn Fn(Complex64) -> Complex64,
    points: &[f64],
    radius_fraction: f64,
) -> Result<TestOutcome> {
    let mut best: Option<(f64, f64)> = None;
    for &m0 in points {
        let r = radius_fraction * m0.abs().max(1e-3);
        let (det, scale) = hankel_determinant(log_b, m0, r)?;
        let ratio = if scale > 0.0 { det / scale } else { 0.0 };
        if best.is_none_or(|(_, b)| ratio < b) {
            best = Some((m0, ratio));
        }
    }
    let (m0, _) = best.ok_or_else(|| Error::Param("empty scan".into()))?;
    laplace_test_hankel(name, log_b, m0, radius_fraction * m0.abs().max(1e-3))
}

/// Candidate Laplace transforms that the nonexistence tests are run against.
pub mod candidates {
    use num_complex::Complex64;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    /// `2r/(r+1) e^{r-1}` with `r = √(1+m²)`.
    pub fn h1(m: Complex64) -> Complex64 {
        let r = (one() + m * m).sqrt();
        r * 2.0 / (r + 1.0) * (r - 1.0).exp()
    }

    /// `e^{h(0,m)}` for `V(m) = 1 + m² + √(1+m²)`: `2 e^{r-1}/(1+r)`.
    pub fn bilateral_exponential_rate_exp(m: Complex64) -> Complex64 {
        let r = (one() + m * m).sqrt();
        (r - 1.0).exp() * 2.0 / (r + 1.0)
    }

    /// `e^{m arctan m}/√(1+m²)`.
    pub fn h2(m: Complex64) -> Complex64 {
        (m * m.atan() - 0.5 * (one() + m * m).ln()).exp()
    }

    /// `e^{√(1+m²) - 1}`.
    pub fn h3(m: Complex64) -> Complex64 {
        ((one() + m * m).sqrt() - 1.0).exp()
    }

    /// `e^{-m²/4}/√m`, the dual candidate obtained from `V(m) = 2m²/(1-m²)`.
    pub fn vinogradov_paris(m: f64) -> f64 {
        (-0.25 * m * m).exp() / m.sqrt()
    }

    /// `e^{-m²/2}/√m`, the candidate in its printed form.
    pub fn vinogradov_paris_printed(m: f64) -> f64 {
        (-0.5 * m * m).exp() / m.sqrt()
    }

    /// `log B*(m) = C m^{2-p}` with `C = λ^{p-1}/((1-p)(2-p))`, the candidate
    /// dual of the power-variance family with `p < 0`.
    pub fn tweedie_negative_log(p: f64, lambda: f64, m: Complex64) -> Complex64 {
        let c = lambda.powf(p - 1.0) / ((1.0 - p) * (2.0 - p));
        m.powf(2.0 - p) * c
    }
}

/// Re-evaluate a certificate's witness with the given evaluator; the evaluator
/// must reproduce `value` for the certificate to stand.
pub fn rechecks(cert: &NonexistenceCertificate, recomputed: f64) -> bool {
    let scale = cert.value.abs().max(f64::MIN_POSITIVE);
    ((recomputed - cert.value) / scale).abs() <= 1e-10 && recomputed <= cert.threshold
}
