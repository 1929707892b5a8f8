//! Natural exponential families in the bilateral convention.
//!
//! A family is given by its cumulant `ℓ(s) = log ∫ e^{-sx} μ(dx)` on an open
//! interval `S`; the mean is `m = -ℓ'(s)` and the variance function is
//! `V(m) = ℓ''(φ(m))` where `φ` inverts the mean map. The classical
//! parametrisation is recovered with `k(θ) = ℓ(-θ)`.

pub mod multi;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::domain;
use crate::numerics::{self, derivative, second_derivative, solve_monotone, Interval};
use crate::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn scalar_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

/// Relative step for first differences when no closed form is available.
const FIRST_STEP: f64 = 1e-6;
/// Relative step for five-point second differences of the cumulant itself.
const SECOND_STEP: f64 = 1e-3;

/// A one-dimensional cumulant function with optional closed-form derivatives.
#[derive(Clone)]
pub struct Cumulant {
    pub domain: Interval,
    value: ScalarFn,
    first: Option<ScalarFn>,
    second: Option<ScalarFn>,
}

impl fmt::Debug for Cumulant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cumulant")
            .field("domain", &self.domain)
            .field("closed_first", &self.first.is_some())
            .field("closed_second", &self.second.is_some())
            .finish()
    }
}

impl Cumulant {
    pub fn new(domain: Interval, value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { domain, value: Arc::new(value), first: None, second: None }
    }

    pub fn with_first(mut self, d1: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.first = Some(Arc::new(d1));
        self
    }

    pub fn with_second(mut self, d2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.second = Some(Arc::new(d2));
        self
    }

    pub fn has_closed_first(&self) -> bool {
        self.first.is_some()
    }

    pub fn has_closed_second(&self) -> bool {
        self.second.is_some()
    }

    fn check(&self, s: f64) -> Result<()> {
        if self.domain.contains_interior(s) {
            Ok(())
        } else {
            Err(domain(format!("s = {s} outside cumulant domain {}", self.domain)))
        }
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok((self.value)(s))
    }

    /// `B(s) = e^{ℓ(s)}`.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        self.value(s).map(f64::exp)
    }

    /// Classical cumulant `k(θ) = ℓ(-θ)`.
    pub fn theta_cumulant(&self, theta: f64) -> Result<f64> {
        self.value(-theta)
    }

    pub fn first(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(match &self.first {
            Some(d1) => d1(s),
            None => {
                let h = numerics::step_inside(&self.domain, s, FIRST_STEP);
                derivative(&*self.value, s, h)
            }
        })
    }

    pub fn second(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(match (&self.second, &self.first) {
            (Some(d2), _) => d2(s),
            (None, Some(d1)) => {
                let h = numerics::step_inside(&self.domain, s, FIRST_STEP);
                derivative(&**d1, s, h)
            }
            (None, None) => self.numeric_second(s)?,
        })
    }

    /// Second derivative by finite differences, ignoring a closed `ℓ''`; used as an oracle.
    ///
    /// Differentiates a closed `ℓ'` when there is one (five-point stencil),
    /// since values of `ℓ` can carry cancellation error near domain edges.
    pub fn numeric_second(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        let h = numerics::step_inside(&self.domain, s, SECOND_STEP);
        Ok(match &self.first {
            Some(d1) => five_point_derivative(&**d1, s, h),
            None => second_derivative(&*self.value, s, h),
        })
    }

    /// `-ℓ'(s)`.
    pub fn mean(&self, s: f64) -> Result<f64> {
        self.first(s).map(|d| -d)
    }

    pub fn raw_value(&self) -> ScalarFn {
        self.value.clone()
    }
}

/// Variance function `V` on the mean domain.
#[derive(Clone)]
pub struct VarianceFunction {
    pub mean_domain: Interval,
    closed: Option<ScalarFn>,
}

impl fmt::Debug for VarianceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VarianceFunction")
            .field("mean_domain", &self.mean_domain)
            .field("closed", &self.closed.is_some())
            .finish()
    }
}

impl VarianceFunction {
    pub fn new(mean_domain: Interval, v: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { mean_domain, closed: Some(Arc::new(v)) }
    }

    /// A mean domain without a closed-form `V`; values come from the cumulant.
    pub fn implicit(mean_domain: Interval) -> Self {
        Self { mean_domain, closed: None }
    }

    pub fn is_closed(&self) -> bool {
        self.closed.is_some()
    }

    pub fn closed(&self) -> Option<&ScalarFn> {
        self.closed.as_ref()
    }

    /// Closed-form value; errors if the function is implicit or `m` is outside the domain.
    pub fn eval(&self, m: f64) -> Result<f64> {
        if !self.mean_domain.contains_interior(m) {
            return Err(domain(format!("m = {m} outside mean domain {}", self.mean_domain)));
        }
        match &self.closed {
            Some(v) => Ok(v(m)),
            None => Err(domain("variance function has no closed form")),
        }
    }
}

fn five_point_derivative(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Which powers `B^λ` are known to be Laplace transforms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Divisibility {
    /// Infinitely divisible: every `λ > 0`.
    Infinite,
    /// Only positive integer multiples of the step.
    Lattice(f64),
    /// Nothing known beyond `λ = 1`.
    Unknown,
}

impl Divisibility {
    pub fn admits(&self, lambda: f64) -> bool {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return false;
        }
        match *self {
            Divisibility::Infinite => true,
            Divisibility::Lattice(step) => {
                let k = lambda / step;
                (k - k.round()).abs() < 1e-12 * k.max(1.0) && k.round() >= 1.0
            }
            Divisibility::Unknown => lambda == 1.0,
        }
    }

    fn scaled(&self, lambda: f64) -> Self {
        match *self {
            Divisibility::Lattice(step) => Divisibility::Lattice(step / lambda),
            d => d,
        }
    }
}

/// A named one-dimensional natural exponential family.
#[derive(Clone)]
pub struct FamilySpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub cumulant: Cumulant,
    pub variance: VarianceFunction,
    mean_inverse: Option<ScalarFn>,
    pub dual_ref: Option<String>,
    pub steep: bool,
    pub divisibility: Divisibility,
    /// Human-readable formulas: cumulant and variance function.
    pub formula: String,
    pub variance_formula: String,
}

impl fmt::Debug for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilySpec")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("cumulant", &self.cumulant)
            .field("variance", &self.variance)
            .field("dual_ref", &self.dual_ref)
            .field("steep", &self.steep)
            .finish()
    }
}

impl FamilySpec {
    pub fn new(name: impl Into<String>, cumulant: Cumulant, variance: VarianceFunction) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            cumulant,
            variance,
            mean_inverse: None,
            dual_ref: None,
            steep: true,
            divisibility: Divisibility::Infinite,
            formula: String::new(),
            variance_formula: String::new(),
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_mean_inverse(mut self, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.mean_inverse = Some(Arc::new(phi));
        self
    }

    pub fn has_closed_mean_inverse(&self) -> bool {
        self.mean_inverse.is_some()
    }

    pub fn with_dual_ref(mut self, dual: impl Into<String>) -> Self {
        self.dual_ref = Some(dual.into());
        self
    }

    pub fn non_steep(mut self) -> Self {
        self.steep = false;
        self
    }

    pub fn with_divisibility(mut self, d: Divisibility) -> Self {
        self.divisibility = d;
        self
    }

    pub fn with_formulas(mut self, ell: impl Into<String>, v: impl Into<String>) -> Self {
        self.formula = ell.into();
        self.variance_formula = v.into();
        self
    }

    /// Mean domain membership check plus `V(m) > 0` and consistency of the
    /// mean map with the mean domain at five interior points.
    pub fn validate(&self) -> Result<()> {
        let pts = self.cumulant.domain.grid(5);
        for s in pts {
            let m = mean_at(self, s)?;
            if !self.variance.mean_domain.contains(m) {
                return Err(domain(format!(
                    "{}: mean {m} at s = {s} outside declared mean domain {}",
                    self.name, self.variance.mean_domain
                )));
            }
            let v = self.cumulant.second(s)?;
            if !(v > 0.0) {
                return Err(domain(format!("{}: ℓ''({s}) = {v} is not positive", self.name)));
            }
        }
        Ok(())
    }
}

/// `m = -ℓ'(s)`.
pub fn mean_at(f: &FamilySpec, s: f64) -> Result<f64> {
    f.cumulant.mean(s)
}

/// `s = φ(m)`, the inverse of the mean map.
pub fn mean_inverse(f: &FamilySpec, m: f64) -> Result<f64> {
    if !f.variance.mean_domain.contains_interior(m) {
        return Err(domain(format!("m = {m} outside mean domain {} of {}", f.variance.mean_domain, f.name)));
    }
    if let Some(phi) = &f.mean_inverse {
        return Ok(phi(m));
    }
    let c = &f.cumulant;
    solve_monotone(|s| c.mean(s).unwrap_or(f64::NAN), m, &c.domain)
}

/// `V(m)`: closed form when registered, otherwise `ℓ''(φ(m))`.
pub fn variance_at(f: &FamilySpec, m: f64) -> Result<f64> {
    if f.variance.is_closed() {
        return f.variance.eval(m);
    }
    let s = mean_inverse(f, m)?;
    f.cumulant.second(s)
}

/// `ℓ''(φ(m))` by finite differences, bypassing closed `ℓ''` and `V`.
pub fn numeric_variance_at(f: &FamilySpec, m: f64) -> Result<f64> {
    let s = mean_inverse(f, m)?;
    f.cumulant.numeric_second(s)
}

/// Exponential tilt normalised at `s0`: `ℓ_new(s) = ℓ(s + s0) - ℓ(s0)` on `S - s0`.
pub fn tilt(f: &FamilySpec, s0: f64) -> Result<FamilySpec> {
    let c = &f.cumulant;
    let base = c.value(s0)?;
    let shift = |g: &ScalarFn| -> ScalarFn {
        let g = g.clone();
        Arc::new(move |s| g(s + s0))
    };
    let v = c.value.clone();
    let cumulant = Cumulant {
        domain: c.domain.shifted(-s0),
        value: Arc::new(move |s| v(s + s0) - base),
        first: c.first.as_ref().map(shift),
        second: c.second.as_ref().map(shift),
    };
    let mut out = f.clone();
    out.name = format!("tilt({}, {s0})", f.name);
    out.cumulant = cumulant;
    out.mean_inverse = f.mean_inverse.as_ref().map(|phi| {
        let phi = phi.clone();
        Arc::new(move |m| phi(m) - s0) as ScalarFn
    });
    out.dual_ref = None;
    Ok(out)
}

/// Convolution with `δ_{m0}`: `ℓ_new(s) = ℓ(s) - s·m0`; means shift by `m0`.
pub fn translate(f: &FamilySpec, m0: f64) -> Result<FamilySpec> {
    if !m0.is_finite() {
        return Err(domain("translation must be finite"));
    }
    let c = &f.cumulant;
    let v = c.value.clone();
    let cumulant = Cumulant {
        domain: c.domain,
        value: Arc::new(move |s| v(s) - s * m0),
        first: c.first.as_ref().map(|d1| {
            let d1 = d1.clone();
            Arc::new(move |s| d1(s) - m0) as ScalarFn
        }),
        second: c.second.clone(),
    };
    let variance = VarianceFunction {
        mean_domain: f.variance.mean_domain.shifted(m0),
        closed: f.variance.closed.as_ref().map(|vf| {
            let vf = vf.clone();
            Arc::new(move |m| vf(m - m0)) as ScalarFn
        }),
    };
    let mut out = f.clone();
    out.name = format!("translate({}, {m0})", f.name);
    out.cumulant = cumulant;
    out.variance = variance;
    out.mean_inverse = f.mean_inverse.as_ref().map(|phi| {
        let phi = phi.clone();
        Arc::new(move |m| phi(m - m0)) as ScalarFn
    });
    out.dual_ref = None;
    Ok(out)
}

/// `ℓ_new = λ ℓ`, i.e. the family generated by `μ^{*λ}`.
pub fn jorgensen_scale(f: &FamilySpec, lambda: f64) -> Result<FamilySpec> {
    if !f.divisibility.admits(lambda) {
        return Err(Error::Jorgensen { family: f.name.clone(), lambda });
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    let scale = |g: &ScalarFn| -> ScalarFn {
        let g = g.clone();
        Arc::new(move |s| lambda * g(s))
    };
    let c = &f.cumulant;
    let cumulant = Cumulant {
        domain: c.domain,
        value: scale(&c.value),
        first: c.first.as_ref().map(scale),
        second: c.second.as_ref().map(scale),
    };
    let variance = VarianceFunction {
        mean_domain: f.variance.mean_domain.scaled(lambda),
        closed: f.variance.closed.as_ref().map(|vf| {
            let vf = vf.clone();
            Arc::new(move |m| lambda * vf(m / lambda)) as ScalarFn
        }),
    };
    let mut out = f.clone();
    out.name = format!("{}^{lambda}", f.name);
    out.cumulant = cumulant;
    out.variance = variance;
    out.mean_inverse = f.mean_inverse.as_ref().map(|phi| {
        let phi = phi.clone();
        Arc::new(move |m| phi(m / lambda)) as ScalarFn
    });
    out.divisibility = f.divisibility.scaled(lambda);
    Ok(out)
}

/// Dual side of a Jørgensen rescaling: `ℓ_{(μ_λ)*}(m) = λ ℓ_{μ*}(m/λ)`.
///
/// The dual cumulant lives on the mean domain of the base family, which is
/// dilated by `λ` under the rescaling.
pub fn jorgensen_scale_dual(dual: &FamilySpec, lambda: f64) -> Result<FamilySpec> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Jorgensen { family: dual.name.clone(), lambda });
    }
    let c = &dual.cumulant;
    let v = c.value.clone();
    let cumulant = Cumulant {
        domain: c.domain.scaled(lambda),
        value: Arc::new(move |m| lambda * v(m / lambda)),
        first: c.first.as_ref().map(|d1| {
            let d1 = d1.clone();
            Arc::new(move |m| d1(m / lambda)) as ScalarFn
        }),
        second: c.second.as_ref().map(|d2| {
            let d2 = d2.clone();
            Arc::new(move |m| d2(m / lambda) / lambda) as ScalarFn
        }),
    };
    // means of the dual are unchanged; V scales by λ
    let variance = VarianceFunction {
        mean_domain: dual.variance.mean_domain,
        closed: dual.variance.closed.as_ref().map(|vf| {
            let vf = vf.clone();
            Arc::new(move |x| lambda * vf(x)) as ScalarFn
        }),
    };
    let mut out = dual.clone();
    out.name = format!("({})_{lambda}", dual.name);
    out.cumulant = cumulant;
    out.variance = variance;
    out.mean_inverse = dual.mean_inverse.as_ref().map(|phi| {
        let phi = phi.clone();
        Arc::new(move |x| lambda * phi(x)) as ScalarFn
    });
    out.divisibility = Divisibility::Unknown;
    Ok(out)
}

/// Whether `g` is an affine modification of a shift of `f`:
/// `ℓ_g(s) = -s m0 + b + ℓ_f(s + s0)` on the grid (residual ≤ 1e-8).
///
/// For fixed `s0` the pair `(m0, b)` is a linear least-squares problem, so the
/// fit reduces to a one-dimensional search over `s0` (scan, then golden section).
pub fn tfamily_equivalent(f: &FamilySpec, g: &FamilySpec, grid: &[f64]) -> bool {
    tfamily_fit(f, g, grid).map(|fit| fit.residual <= 1e-8).unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TFit {
    pub m0: f64,
    pub b: f64,
    pub s0: f64,
    pub residual: f64,
}

pub fn tfamily_fit(f: &FamilySpec, g: &FamilySpec, grid: &[f64]) -> Option<TFit> {
    if grid.len() < 3 {
        return None;
    }
    let gvals: Vec<f64> = grid.iter().map(|&s| g.cumulant.value(s).ok()).collect::<Option<_>>()?;
    let fd = f.cumulant.domain;
    let gmin = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let gmax = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // admissible shifts keep every grid point inside the domain of f
    let lo = if fd.lo.is_finite() { fd.lo - gmin } else { -50.0 };
    let hi = if fd.hi.is_finite() { fd.hi - gmax } else { 50.0 };
    let (lo, hi) = (lo.max(-50.0), hi.min(50.0));
    if !(lo < hi) {
        return None;
    }
    // least squares in (m0, b) for the given s0, over the given points
    let fit_at = |s0: f64, pts: &[usize]| -> Option<(f64, f64, f64)> {
        let mut rows = Vec::with_capacity(pts.len());
        for &i in pts {
            let fv = f.cumulant.value(grid[i] + s0).ok()?;
            rows.push((grid[i], gvals[i] - fv));
        }
        let n = rows.len() as f64;
        let sx: f64 = rows.iter().map(|r| r.0).sum();
        let sy: f64 = rows.iter().map(|r| r.1).sum();
        let sxx: f64 = rows.iter().map(|r| r.0 * r.0).sum();
        let sxy: f64 = rows.iter().map(|r| r.0 * r.1).sum();
        let det = n * sxx - sx * sx;
        if det.abs() < 1e-300 {
            return None;
        }
        let slope = (n * sxy - sx * sy) / det;
        let b = (sy - slope * sx) / n;
        let res = rows.iter().map(|r| (r.1 - slope * r.0 - b).abs()).fold(0.0, f64::max);
        Some((-slope, b, res))
    };
    let all: Vec<usize> = (0..grid.len()).collect();
    let objective = |s0: f64| -> f64 {
        let inside = (lo + 1e-9 * (hi - lo)..=hi - 1e-9 * (hi - lo)).contains(&s0);
        if !inside {
            return f64::INFINITY;
        }
        fit_at(s0, &all).map(|r| r.2).unwrap_or(f64::INFINITY)
    };
    // coarse scan followed by golden-section refinement around the best cell
    let cells = 400;
    let xs: Vec<f64> = (0..=cells).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / (cells as f64 + 1.0)).collect();
    let (mut best_i, mut best_v) = (0, f64::INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = objective(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    if !best_v.is_finite() {
        return None;
    }
    let mut a = xs[best_i.saturating_sub(1)];
    let mut b = xs[(best_i + 1).min(cells)];
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    for _ in 0..200 {
        if objective(c) < objective(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    let s0 = 0.5 * (a + b);
    let cand = [s0, xs[best_i]];
    let s0 = cand.into_iter().min_by(|x, y| objective(*x).partial_cmp(&objective(*y)).unwrap()).unwrap();
    let (m0, b, residual) = fit_at(s0, &all)?;
    Some(TFit { m0, b, s0, residual })
}
