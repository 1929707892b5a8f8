//! Duality on ℝⁿ and on symmetric matrices: Wishart self-duality, the
//! multinomial dual, the NM-ga₀ duals for n = 2, 3, and nonexistence tests for
//! the multivariate negative binomial, NM-ga_k and hyperbolic candidates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::duality::{laplace_test_moment_matrix, laplace_test_taylor_moments, CertificateKind, NonexistenceCertificate, TestOutcome};
use crate::error::domain;
use crate::nef::multi::{CumulantNd, FamilySpecNd};
use crate::numerics::TaylorSpec;
use crate::{Error, Result};

pub const MAX_ORDER: usize = 6;

/// A real symmetric matrix of order at most 6.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrixPoint {
    m: DMatrix<f64>,
}

impl SymMatrixPoint {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || n != m.ncols() || n > MAX_ORDER {
            return Err(Error::Param(format!("need a square matrix of order 1..={MAX_ORDER}, got {}x{}", n, m.ncols())));
        }
        if m != m.transpose() {
            return Err(Error::Param("matrix is not symmetric".into()));
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Param("rows must all have the matrix order as length".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    /// `Q Λ Qᵀ` with `Q` orthogonal from the QR factor of a Gaussian matrix and
    /// `Λ` uniform on `[0.5, 2]`.
    pub fn random_spd(n: usize, rng: &mut impl Rng) -> Result<Self> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::Param(format!("order {n} outside 1..={MAX_ORDER}")));
        }
        let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let q = g.qr().q();
        let lam = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.gen_range(0.5..2.0)));
        Self::new(symmetrize_exact(&(&q * lam * q.transpose())))
    }

    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn is_spd(&self) -> bool {
        self.m.clone().cholesky().is_some()
    }

    /// `log det` and inverse through a Cholesky factor.
    fn spd_parts(&self) -> Result<(f64, DMatrix<f64>)> {
        let ch = self.m.clone().cholesky().ok_or(Error::NotSpd)?;
        let logdet = 2.0 * ch.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
        Ok((logdet, symmetrize_exact(&ch.inverse())))
    }
}

/// Copy the upper triangle onto the lower one.
fn symmetrize_exact(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] })
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// `ℓ(s) = -p log det s`, the cumulant of the Wishart measure with shape `p`.
pub fn wishart_cumulant(p: f64, s: &SymMatrixPoint) -> Result<f64> {
    Ok(-p * s.spd_parts()?.0)
}

/// Mean `-ℓ'(s) = p s^{-1}`.
pub fn wishart_mean(p: f64, s: &SymMatrixPoint) -> Result<SymMatrixPoint> {
    SymMatrixPoint::new(s.spd_parts()?.1 * p)
}

/// `‖-ℓ'(-ℓ'(s)) - s‖∞ = ‖p (p s^{-1})^{-1} - s‖∞`.
pub fn wishart_selfdual_check(p: f64, s: &SymMatrixPoint) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Param(format!("shape p = {p} must be positive")));
    }
    let m = wishart_mean(p, s)?;
    let back = wishart_mean(p, &m)?;
    Ok(max_abs(&(back.matrix() - s.matrix())))
}

/// Largest self-duality residual over `count` seeded SPD points.
pub fn wishart_grid_check(n: usize, p: f64, count: usize, rng: &mut impl Rng) -> Result<f64> {
    (0..count).try_fold(0.0f64, |acc, _| Ok(acc.max(wishart_selfdual_check(p, &SymMatrixPoint::random_spd(n, rng)?)?)))
}

/// Coordinates with `sᵢ > 0` and `Σ sᵢ < 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let total: f64 = coords.iter().sum();
        if coords.is_empty() || coords.iter().any(|&x| !(x > 0.0)) || !(total < 1.0) {
            return Err(domain(format!("{coords:?} is not in the open simplex")));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `B*(m) = Π mᵢ^{mᵢ} (1 - Σmᵢ)^{1 - Σmᵢ}`.
pub fn multinomial_dual_laplace(m: &SimplexPoint) -> f64 {
    let total: f64 = m.coords.iter().sum();
    (m.coords.iter().map(|&x| xlogx(x)).sum::<f64>() + xlogx(1.0 - total)).exp()
}

/// `log Δ` with `Δ = 1 + Σ e^{-sᵢ}`, the cumulant of `δ₀ + Σ δ_{eᵢ}`.
pub fn multinomial_cumulant(n: usize) -> CumulantNd {
    CumulantNd::new(n, |_| true, |s| s.iter().map(|x| (-x).exp()).sum::<f64>().ln_1p()).with_gradient(|s| {
        let delta = 1.0 + s.iter().map(|x| (-x).exp()).sum::<f64>();
        s.map(|x| -(-x).exp() / delta)
    })
}

/// `V_{F(μ*)}(s) = Δ (D^{-1} + J)` with `D = diag(e^{-sᵢ})` and `J` all ones.
pub fn multinomial_dual_variance(s: &[f64]) -> Result<DMatrix<f64>> {
    if s.is_empty() || s.iter().any(|x| !x.is_finite()) {
        return Err(domain(format!("s = {s:?}")));
    }
    let n = s.len();
    let delta = 1.0 + s.iter().map(|x| (-x).exp()).sum::<f64>();
    Ok(DMatrix::from_fn(n, n, |i, j| delta * (if i == j { s[i].exp() } else { 0.0 } + 1.0)))
}

/// `4 cosh²(s/2)`, the one-dimensional case of [`multinomial_dual_variance`].
pub fn multinomial_dual_variance_1d(s: f64) -> f64 {
    4.0 * (0.5 * s).cosh().powi(2)
}

/// Jacobian of a gradient by central differences with one Richardson step,
/// symmetrized.
pub fn richardson_jacobian(
    g: &dyn Fn(&DVector<f64>) -> Result<DVector<f64>>,
    s: &DVector<f64>,
    h: f64,
) -> Result<DMatrix<f64>> {
    let n = s.len();
    let raw = |h: f64| -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let (mut a, mut b) = (s.clone(), s.clone());
            a[j] += h;
            b[j] -= h;
            out.set_column(j, &((g(&a)? - g(&b)?) / (2.0 * h)));
        }
        Ok(out)
    };
    let (a, b) = (raw(h)?, raw(0.5 * h)?);
    let j = (b * 4.0 - a) / 3.0;
    Ok((&j + j.transpose()) * 0.5)
}

/// Hessian by central differences with one Richardson step.
pub fn richardson_hessian(f: &dyn Fn(&DVector<f64>) -> Result<f64>, s: &DVector<f64>, h: f64) -> Result<DMatrix<f64>> {
    let n = s.len();
    let at = |i: usize, j: usize, di: f64, dj: f64| -> Result<f64> {
        let mut p = s.clone();
        p[i] += di;
        p[j] += dj;
        f(&p)
    };
    let raw = |h: f64| -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(n, n);
        let f0 = f(s)?;
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    (at(i, i, h, 0.0)? - 2.0 * f0 + at(i, i, -h, 0.0)?) / (h * h)
                } else {
                    (at(i, j, h, h)? - at(i, j, h, -h)? - at(i, j, -h, h)? + at(i, j, -h, -h)?) / (4.0 * h * h)
                };
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Ok(out)
    };
    let (a, b) = (raw(h)?, raw(0.5 * h)?);
    Ok((b * 4.0 - a) / 3.0)
}

fn inverse(m: DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.try_inverse().ok_or(Error::SingularMatrix)
}

/// `‖V - H^{-1}‖∞ / ‖V‖∞` with `V` the closed form and `H` the numeric Hessian of `log Δ`.
pub fn multinomial_variance_check(s: &[f64]) -> Result<f64> {
    let v = multinomial_dual_variance(s)?;
    let c = multinomial_cumulant(s.len());
    let h = richardson_jacobian(&|p| c.gradient(p), &DVector::from_column_slice(s), 1e-3)?;
    Ok(max_abs(&(&v - inverse(h)?)) / max_abs(&v))
}

/// Mass of the measure on the line `{a t}` whose Laplace transform is
/// `e^{-f(s)} f(s)^{f(s)}`, `f(s) = ⟨a, s⟩ + b`: it is `e^{-by}` times the
/// Landau law pushed along `a`, so the mass is `e^{-b} b^b` (1 at `b = 0`).
pub fn landau_line_mass(a: &[f64], b: f64) -> Result<f64> {
    if a.iter().all(|&x| x == 0.0) {
        return Err(domain("the direction a must be nonzero"));
    }
    if b < 0.0 || !b.is_finite() {
        return Err(domain(format!("b = {b}: the line measure has unbounded mass for b < 0")));
    }
    Ok((-b + xlogx(b)).exp())
}

/// `e^{-f} f^f` at `f = ⟨a, s⟩ + b > 0`.
pub fn landau_line_laplace(a: &[f64], b: f64, s: &[f64]) -> Result<f64> {
    let f = a.iter().zip(s).map(|(x, y)| x * y).sum::<f64>() + b;
    if !(f >= 0.0) {
        return Err(domain(format!("⟨a,s⟩ + b = {f} < 0")));
    }
    Ok((-f + xlogx(f)).exp())
}

/// `Π mᵢ^{mᵢ} / (1 + Σmᵢ)^{1 + Σmᵢ}`, with `0⁰ = 1`.
pub fn negbin_dual_candidate(m: &[f64]) -> Result<f64> {
    if m.iter().any(|&x| !(x >= 0.0)) {
        return Err(domain(format!("m = {m:?} must be non-negative")));
    }
    let total: f64 = m.iter().sum();
    Ok((m.iter().map(|&x| xlogx(x)).sum::<f64>() - xlogx(1.0 + total)).exp())
}

/// The witness pair used against the negative binomial candidate in ℝ³.
pub const NEGBIN_WITNESS: ([f64; 3], [f64; 3]) = ([0.0, 1.0, 0.0], [1.0, 1.0, 0.0]);

/// `-19339 / (3³·4⁷·5⁵)`, the determinant value commonly quoted at [`NEGBIN_WITNESS`].
pub const NEGBIN_QUOTED_DET: f64 = -19339.0 / (27.0 * 16384.0 * 3125.0);

/// Moment-matrix test of the negative binomial candidate at [`NEGBIN_WITNESS`].
///
/// The determinant there is `4/27 · 16/3125 - (1/64)² = 177769/345600000 > 0`,
/// so no certificate results. More generally a 2×2 determinant of this form is
/// `B(2m)B(2m') - B(m+m')²`, which is non-negative whenever `log B` is convex.
pub fn negbin_certificate() -> TestOutcome {
    let (m, mp) = NEGBIN_WITNESS;
    laplace_test_moment_matrix(
        "multivariate negative binomial dual",
        &|x| negbin_dual_candidate(x).unwrap_or(f64::NAN),
        &m,
        &mp,
    )
}

/// `Π_{i ≤ k} e^{-mᵢ} mᵢ^{mᵢ} / m_{k+1}^{1 + m₁ + … + m_k} · exp(½ Σ_{j > k+1} m_j²/m_{k+1})`.
///
/// At `k = n - 1` this is the candidate obtained by integrating
/// `ℓ*'(m) = (log(mᵢ/m_n), (1 + Σmᵢ)/m_n)`; the factor `e^{-mᵢ}` is needed for
/// the first components.
pub fn nmga_dual_candidate(k: usize, n: usize, m: &[f64]) -> Result<f64> {
    check_nmga(k, n)?;
    if m.len() != n {
        return Err(Error::Param(format!("expected {n} coordinates, got {}", m.len())));
    }
    let lead = m[k];
    if !(lead > 0.0) || m[..k].iter().any(|&x| !(x >= 0.0)) {
        return Err(domain(format!("m = {m:?} outside the candidate's domain")));
    }
    let sum_k: f64 = m[..k].iter().sum();
    let gauss: f64 = m[k + 1..].iter().map(|x| x * x).sum::<f64>() / (2.0 * lead);
    Ok((m[..k].iter().map(|&x| xlogx(x) - x).sum::<f64>() - (1.0 + sum_k) * lead.ln() + gauss).exp())
}

/// The `k = n - 1` candidate without the `e^{-mᵢ}` factors, as commonly printed.
pub fn nbgas_printed(m: &[f64]) -> Result<f64> {
    let n = m.len();
    if n < 2 || !(m[n - 1] > 0.0) || m[..n - 1].iter().any(|&x| !(x >= 0.0)) {
        return Err(domain(format!("m = {m:?}")));
    }
    let sum: f64 = m[..n - 1].iter().sum();
    Ok((m[..n - 1].iter().map(|&x| xlogx(x)).sum::<f64>() - (1.0 + sum) * m[n - 1].ln()).exp())
}

fn check_nmga(k: usize, n: usize) -> Result<()> {
    if !(2..=MAX_ORDER).contains(&n) || k >= n {
        return Err(Error::Param(format!("NM-ga_k needs 2 ≤ n ≤ {MAX_ORDER} and 0 ≤ k < n (k = {k}, n = {n})")));
    }
    Ok(())
}

/// `B(r, t) = -12r((t+1)³ + (t+1)²(1+6r²)) + r²(14(t+1)² + 24(t+1)r² + 36r⁴)`,
/// the polynomial commonly quoted for the n = 4 NM-ga₀ candidate along `s = -2r·1`.
pub fn nmga0_quoted_polynomial(r: f64, t: f64) -> f64 {
    let tau = t + 1.0;
    -12.0 * r * (tau.powi(3) + tau * tau * (1.0 + 6.0 * r * r)) + r * r * (14.0 * tau * tau + 24.0 * tau * r * r + 36.0 * r.powi(4))
}

/// `E(‖X - rY·1‖² A) (t+1)⁴ / L` for `L(s, t) = e^{‖s‖²/(2(t+1))}/(t+1)` on
/// `(-1, ∞) × ℝ³`, from the second partial derivatives of `L`:
/// `2uτ² + 3τ³ + 2r⟨s,1⟩τ(2τ + u) + 3r²(2τ² + 4uτ + u²)` with `τ = t+1`,
/// `u = ‖s‖²/2`. A negative value would rule `L` out as a Laplace transform.
pub fn nmga0_quadratic_form(r: f64, s: &[f64; 3], t: f64) -> Result<f64> {
    let tau = t + 1.0;
    if !(tau > 0.0) {
        return Err(domain(format!("t = {t} must exceed -1")));
    }
    let u = 0.5 * s.iter().map(|x| x * x).sum::<f64>();
    let dot: f64 = s.iter().sum();
    Ok(2.0 * u * tau * tau
        + 3.0 * tau.powi(3)
        + 2.0 * r * dot * tau * (2.0 * tau + u)
        + 3.0 * r * r * (2.0 * tau * tau + 4.0 * u * tau + u * u))
}

/// Nonexistence test for NM-ga_k.
///
/// For `k ≥ 1` the moment matrix is evaluated at `m = e_{k+1}`,
/// `m' = e_1 + e_{k+1}` (the remaining coordinates set to 0). For `k = 0, n = 4`
/// the quadratic form of [`nmga0_quadratic_form`] is scanned along
/// `s = -2r·1`, `t = 0`, `r ∈ (0, 1]`; the quoted polynomial is reported next to it.
pub fn nmga_certificate(k: usize, n: usize) -> Result<TestOutcome> {
    check_nmga(k, n)?;
    if k == 0 {
        if n != 4 {
            return Err(Error::Param(format!("the k = 0 test is defined for n = 4 only (n = {n})")));
        }
        let mut worst = (f64::INFINITY, f64::NAN);
        for i in 1..=100 {
            let r = 0.01 * i as f64;
            let q = nmga0_quadratic_form(r, &[-2.0 * r; 3], 0.0)?;
            if q < worst.0 {
                worst = (q, r);
            }
        }
        let quoted = nmga0_quoted_polynomial(0.1, 0.0);
        if worst.0 < 0.0 {
            return Ok(TestOutcome::Certificate(NonexistenceCertificate {
                kind: CertificateKind::MomentMatrix,
                candidate: "NM-ga_0 (n = 4) dual".into(),
                witness: vec![vec![worst.1, 0.0]],
                value: worst.0,
                threshold: 0.0,
                conclusion: "E(‖X - rY·1‖² A) < 0 is impossible for a measure".into(),
            }));
        }
        return Ok(TestOutcome::Pass {
            value: worst.0,
            detail: format!(
                "min over r ∈ (0,1] of E(‖X - rY·1‖² A)(t+1)⁴/L at t = 0 is {:e} (r = {}); the quoted polynomial \
                 gives B(0.1, 0) = {quoted}, but the form recomputed from the derivatives of L is non-negative",
                worst.0, worst.1
            ),
        });
    }
    let mut m = vec![0.0; n];
    m[k] = 1.0;
    let mut mp = m.clone();
    mp[0] = 1.0;
    Ok(laplace_test_moment_matrix(
        &format!("NM-ga_{k} (n = {n}) dual"),
        &|x| nmga_dual_candidate(k, n, x).unwrap_or(f64::NAN),
        &m,
        &mp,
    ))
}

/// `-log Δ` with `Δ = s₁ - ½ Σ_{j ≥ 2} s_j²`, the NM-ga₀ cumulant.
pub fn nmga0_cumulant(n: usize) -> CumulantNd {
    let delta = |s: &DVector<f64>| s[0] - 0.5 * s.iter().skip(1).map(|x| x * x).sum::<f64>();
    CumulantNd::new(n, move |s| delta(s) > 0.0, move |s| -delta(s).ln()).with_gradient(move |s| {
        let d = delta(s);
        DVector::from_fn(s.len(), |i, _| if i == 0 { -1.0 / d } else { s[i] / d })
    })
}

/// Dual of NM-ga₀ for `n ∈ {2, 3}`: `ℓ*(m) = -log m₁ + ½ Σ_{j≥2} m_j²/m₁` on
/// `m₁ > 0`, with variance `Δ [[s₁ + ½Σs_j², s₂, …], [s₂, 1, 0], …]` in its mean `s`.
pub fn nmga0_dual(n: usize) -> Result<FamilySpecNd> {
    if !(n == 2 || n == 3) {
        return Err(Error::Param(format!("the NM-ga_0 dual exists for n = 2, 3 only (n = {n})")));
    }
    let cum = CumulantNd::new(
        n,
        |m| m[0] > 0.0,
        |m| -m[0].ln() + 0.5 * m.iter().skip(1).map(|x| x * x).sum::<f64>() / m[0],
    )
    .with_gradient(|m| {
        let q = 0.5 * m.iter().skip(1).map(|x| x * x).sum::<f64>();
        DVector::from_fn(m.len(), |i, _| if i == 0 { -1.0 / m[0] - q / (m[0] * m[0]) } else { m[i] / m[0] })
    });
    let mut anchor = DVector::zeros(n);
    anchor[0] = 1.0;
    Ok(FamilySpecNd::new(format!("nmga0_dual_{n}"), cum, anchor).with_variance(|s| nmga0_dual_variance(s, 1.0)))
}

/// `Δ(s) · [[s₁ + ½Σs_j², c s₂, c s₃], [c s₂, 1, 0], [c s₃, 0, 1]]`; `c = 1` is
/// the inverse Hessian of `-log Δ`, `c = ½` the commonly quoted off-diagonal.
pub fn nmga0_dual_variance(s: &DVector<f64>, c: f64) -> DMatrix<f64> {
    let n = s.len();
    let q = 0.5 * s.iter().skip(1).map(|x| x * x).sum::<f64>();
    let delta = s[0] - q;
    DMatrix::from_fn(n, n, |i, j| {
        delta
            * match (i, j) {
                (0, 0) => s[0] + q,
                (0, j) => c * s[j],
                (i, 0) => c * s[i],
                (i, j) if i == j => 1.0,
                _ => 0.0,
            }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nmga0Check {
    pub n: usize,
    pub s: Vec<f64>,
    /// Relative gap between the closed variance and the numeric inverse Hessian.
    pub residual: f64,
    /// Same for the quoted matrix with halved off-diagonal entries.
    pub quoted_residual: f64,
    /// `‖-∇ℓ*(-∇ℓ(s)) - s‖∞`.
    pub duality_residual: f64,
}

pub fn nmga0_variance_check(n: usize, s: &[f64]) -> Result<Nmga0Check> {
    let dual = nmga0_dual(n)?;
    let base = nmga0_cumulant(n);
    let sv = DVector::from_column_slice(s);
    if !base.contains(&sv) {
        return Err(domain(format!("s = {s:?} outside s₁ > ½Σs_j²")));
    }
    let step = 1e-3 * base_distance(s).min(1.0);
    let h = richardson_jacobian(&|p| base.gradient(p), &sv, step)?;
    let hinv = inverse(h)?;
    let v = nmga0_dual_variance(&sv, 1.0);
    let vq = nmga0_dual_variance(&sv, 0.5);
    let m = -base.gradient(&sv)?;
    let back = -dual.cumulant.gradient(&m)?;
    Ok(Nmga0Check {
        n,
        s: s.to_vec(),
        residual: max_abs(&(&v - &hinv)) / max_abs(&v),
        quoted_residual: max_abs(&(&vq - &hinv)) / max_abs(&vq),
        duality_residual: (back - sv).amax(),
    })
}

/// `Δ(s)` scaled to a step bound: a step of this size keeps `s ± h` inside `Δ > 0`.
fn base_distance(s: &[f64]) -> f64 {
    let delta = s[0] - 0.5 * s[1..].iter().map(|x| x * x).sum::<f64>();
    delta / (1.0 + s[1..].iter().map(|x| x.abs()).sum::<f64>())
}

/// `Π_{i<n} mᵢ^{mᵢ} / (S² + m_n²)^{S/2} · exp(m_n arctan(m_n/S))`, `S = 1 + Σ_{i<n} mᵢ`.
pub fn hyperbolic_dual_candidate(m: &[f64]) -> Result<f64> {
    let n = m.len();
    if n < 2 || m[..n - 1].iter().any(|&x| !(x >= 0.0)) || !m[n - 1].is_finite() {
        return Err(domain(format!("m = {m:?}")));
    }
    let big_s = 1.0 + m[..n - 1].iter().sum::<f64>();
    let x = m[n - 1];
    Ok((m[..n - 1].iter().map(|&v| xlogx(v)).sum::<f64>() - 0.5 * big_s * (big_s * big_s + x * x).ln()
        + x * (x / big_s).atan())
    .exp())
}

/// The candidate on the section `m₁ = … = m_{n-1} = 0`, continued to complex `m_n`.
pub fn hyperbolic_section(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    (z * z.atan() - 0.5 * (one + z * z).ln()).exp()
}

/// Taylor-moment test on the section `m₁ = … = m_{n-1} = 0`.
pub fn hyperbolic_certificate() -> Result<TestOutcome> {
    laplace_test_taylor_moments("hyperbolic dual (section m_i = 0)", &hyperbolic_section, &TaylorSpec::for_singularity(1.0, 10))
}

/// `ℓ_a(s) = ℓ(a s)` and `ℓ*_a(m) = ℓ*(a^{-ᵀ} m)`: the images of `μ` under
/// `x ↦ aᵀx` and of `μ*` under `x ↦ a^{-1}x`. The transported variance is
/// `V_a(m) = aᵀ V(a^{-ᵀ} m) a`.
pub fn affine_transform_dual(
    f: &FamilySpecNd,
    dual: &FamilySpecNd,
    a: &DMatrix<f64>,
) -> Result<(FamilySpecNd, FamilySpecNd)> {
    let n = f.cumulant.dim;
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::Param(format!("matrix must be {n}x{n}")));
    }
    let a_inv = a.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    if !a_inv.iter().all(|x| x.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    let a_inv_t = a_inv.transpose();

    let base = {
        let (c1, c2, c3) = (f.cumulant.clone(), f.cumulant.clone(), f.cumulant.clone());
        let (a1, a2, a3) = (a.clone(), a.clone(), a.clone());
        let cum = CumulantNd::new(n, move |s| c1.contains(&(&a1 * s)), move |s| c2.value(&(&a2 * s)).unwrap_or(f64::NAN))
            .with_gradient(move |s| {
                c3.gradient(&(&a3 * s)).map(|g| a3.transpose() * g).unwrap_or_else(|_| DVector::from_element(s.len(), f64::NAN))
            });
        let mut spec = FamilySpecNd::new(format!("{}_a", f.name), cum, &a_inv * &f.anchor);
        if let Some(v) = f.variance.clone() {
            let (a, ait) = (a.clone(), a_inv_t.clone());
            spec = spec.with_variance(move |m| a.transpose() * v(&(&ait * m)) * &a);
        }
        spec
    };
    let dual_t = {
        let (c1, c2, c3) = (dual.cumulant.clone(), dual.cumulant.clone(), dual.cumulant.clone());
        let (b1, b2, b3) = (a_inv_t.clone(), a_inv_t.clone(), a_inv_t.clone());
        let cum = CumulantNd::new(n, move |m| c1.contains(&(&b1 * m)), move |m| c2.value(&(&b2 * m)).unwrap_or(f64::NAN))
            .with_gradient(move |m| {
                c3.gradient(&(&b3 * m)).map(|g| b3.transpose() * g).unwrap_or_else(|_| DVector::from_element(m.len(), f64::NAN))
            });
        FamilySpecNd::new(format!("{}_a_inv", dual.name), cum, a.transpose() * &dual.anchor)
    };
    Ok((base, dual_t))
}

/// `‖-∇ℓ*(-∇ℓ(s)) - s‖∞`.
pub fn duality_residual_nd(f: &FamilySpecNd, dual: &FamilySpecNd, s: &DVector<f64>) -> Result<f64> {
    let m = f.cumulant.mean(s)?;
    let back = dual.cumulant.mean(&m)?;
    Ok((back - s).amax())
}

#[cfg(test)]
mod tests;
