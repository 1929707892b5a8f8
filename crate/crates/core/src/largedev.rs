//! Cramér large deviations: the rate `h(m0, m) = ∫_{m0}^m (m - t)/V(t) dt`,
//! its link with the dual cumulant, exact binomial tails and Monte Carlo tails.

use std::cell::RefCell;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::domain;
use crate::nef::{variance_at, FamilySpec, VarianceFunction};
use crate::numerics::{integrate, Interval, QuadratureSpec};
use crate::{Error, Result};

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-14, 1e-13)
}

/// `∫_{m0}^m (m - t) g(t) dt` for either ordering of the endpoints; always ≥ 0
/// when `g > 0`.
fn rate_integral(g: &dyn Fn(f64) -> Result<f64>, m0: f64, m: f64) -> Result<f64> {
    if m == m0 {
        return Ok(0.0);
    }
    let (lo, hi) = if m0 < m { (m0, m) } else { (m, m0) };
    let err = RefCell::new(None);
    let val = integrate(
        |t| match g(t) {
            Ok(v) => (m - t) * v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        &Interval::closed(lo, hi),
        &quad_spec(),
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    // (m - t) has the sign of (m - m0) on the interval, so flip back when m < m0.
    val.map(|v| if m0 < m { v } else { -v })
}

/// Rate `h(m0, m)` from a closed-form variance function.
pub fn rate(v: &VarianceFunction, m0: f64, m: f64) -> Result<f64> {
    let dom = v.mean_domain;
    for x in [m0, m] {
        if !dom.contains_interior(x) {
            return Err(domain(format!("mean {x} outside {dom}")));
        }
    }
    rate_integral(&|t| v.eval(t).map(|vt| 1.0 / vt), m0, m)
}

/// Rate for a family, using `V` in closed form when available and `ℓ''(φ(m))`
/// otherwise.
pub fn family_rate(f: &FamilySpec, m0: f64, m: f64) -> Result<f64> {
    let dom = f.variance.mean_domain;
    for x in [m0, m] {
        if !dom.contains_interior(x) {
            return Err(domain(format!("mean {x} outside {dom}")));
        }
    }
    rate_integral(&|t| variance_at(f, t).map(|vt| 1.0 / vt), m0, m)
}

type ClosedRate = std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `m ↦ h(m0, m)` backed by quadrature, with an optional closed form to
/// compare against.
#[derive(Clone)]
pub struct RateFunction {
    pub m0: f64,
    pub variance: VarianceFunction,
    closed_form: Option<ClosedRate>,
}

impl std::fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RateFunction")
            .field("m0", &self.m0)
            .field("variance", &self.variance)
            .field("closed_form", &self.closed_form.is_some())
            .finish()
    }
}

impl RateFunction {
    pub fn new(variance: VarianceFunction, m0: f64) -> Result<Self> {
        if !variance.mean_domain.contains_interior(m0) {
            return Err(domain(format!("m0 = {m0} outside {}", variance.mean_domain)));
        }
        if !variance.is_closed() {
            return Err(Error::Param("rate function needs a closed-form variance".into()));
        }
        Ok(Self { m0, variance, closed_form: None })
    }

    pub fn with_closed_form(mut self, h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.closed_form = Some(std::sync::Arc::new(h));
        self
    }

    pub fn eval(&self, m: f64) -> Result<f64> {
        rate(&self.variance, self.m0, m)
    }

    pub fn closed(&self, m: f64) -> Option<f64> {
        self.closed_form.as_ref().map(|h| h(m))
    }

    /// Limit `Pr(X̄_n > m)^{1/n} → e^{-h(m0, m)}`.
    pub fn alpha(&self, m: f64) -> Result<f64> {
        Ok((-self.eval(m)?).exp())
    }

    /// Smallest second difference of `h` on the grid (sorted); convexity means
    /// this is not meaningfully negative.
    pub fn min_second_difference(&self, grid: &[f64]) -> Result<f64> {
        let mut g = grid.to_vec();
        g.sort_by(f64::total_cmp);
        let h: Vec<f64> = g.iter().map(|&m| self.eval(m)).collect::<Result<_>>()?;
        let mut min = f64::INFINITY;
        for i in 1..g.len().saturating_sub(1) {
            let (a, b) = (g[i] - g[i - 1], g[i + 1] - g[i]);
            // divided second difference scaled back to a plain one
            let d = ((h[i + 1] - h[i]) / b - (h[i] - h[i - 1]) / a) * 0.5 * (a + b);
            min = min.min(d);
        }
        Ok(min)
    }
}

/// `α(m)` for the symmetric ±1 walk, from `h(0, m) = ½[(1+m)log(1+m) + (1-m)log(1-m)]`.
pub fn alpha_symmetric_bernoulli(m: f64) -> f64 {
    (-(0.5 * ((1.0 + m) * (1.0 + m).ln() + (1.0 - m) * (1.0 - m).ln()))).exp()
}

/// The closed form `(1+m)^{-1-m}(1-m)^{-1+m}` as usually printed; it is the
/// square of [`alpha_symmetric_bernoulli`].
pub fn alpha_symmetric_bernoulli_printed(m: f64) -> f64 {
    (1.0 + m).powf(-1.0 - m) * (1.0 - m).powf(-1.0 + m)
}

/// `α(m) = ½ e^{1-√(1+m²)} (1 + √(1+m²))` for the bilateral exponential law.
pub fn alpha_bilateral_exponential(m: f64) -> f64 {
    let r = m.hypot(1.0);
    0.5 * (1.0 - r).exp() * (1.0 + r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePairResidual {
    pub m0: f64,
    pub m: f64,
    pub quadrature: f64,
    pub closed: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateLinkReport {
    pub family_id: String,
    pub rows: Vec<RatePairResidual>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare `h(m0, m)` by quadrature with the dual-cumulant combination
/// `ℓ*(m) - ℓ*(m0) - (m - m0) ℓ*'(m0)`.
///
/// Equivalently `e^{h(m0,m)} = B_{P*}(m) e^{-m s0 + c}` with `s0 = ℓ*'(m0)` and
/// `c = m0 s0 - ℓ*(m0)`. Residuals are absolute, scaled by `max(1, |h|)`.
pub fn dual_link(f: &FamilySpec, dual: &FamilySpec, pairs: &[(f64, f64)], tol: f64) -> Result<RateLinkReport> {
    let dc = &dual.cumulant;
    let mut rows = Vec::with_capacity(pairs.len());
    for &(m0, m) in pairs {
        let quadrature = family_rate(f, m0, m)?;
        let s0 = dc.first(m0)?;
        let closed = dc.value(m)? - dc.value(m0)? - (m - m0) * s0;
        let residual = (quadrature - closed).abs() / quadrature.abs().max(1.0);
        rows.push(RatePairResidual { m0, m, quadrature, closed, residual });
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(RateLinkReport { family_id: f.name.clone(), rows, max_residual, tolerance: tol, pass: max_residual <= tol })
}

/// Ten `(m0, m)` pairs spread over a mean domain.
pub fn default_pairs(mean_domain: &Interval) -> Vec<(f64, f64)> {
    let g = mean_domain.grid(5);
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in (i + 1)..g.len() {
            // alternate the orientation so both m > m0 and m < m0 are covered
            if (i + j) % 2 == 0 {
                out.push((g[i], g[j]));
            } else {
                out.push((g[j], g[i]));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    ExactBinomial,
    MonteCarlo,
}

/// `Pr(X̄_n > m)^{1/n}` with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub n: u64,
    pub m: f64,
    pub value: f64,
    pub method: TailMethod,
    pub stderr: Option<f64>,
    pub hits: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub warning: Option<String>,
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Exact `Pr(X̄_n > m)^{1/n}` for i.i.d. `±1` steps with probability ½ each.
///
/// The event is `2k - n > n m` with `k` the number of `+1` steps; the
/// comparison carries a relative slack of 1e-12 so that `n m` landing a hair
/// below an integer through rounding does not admit the boundary term.
pub fn exact_binomial_tail(n: u64, m: f64) -> Result<TailEstimate> {
    if n == 0 {
        return Err(Error::Param("n must be at least 1".into()));
    }
    if !(m > -1.0 && m < 1.0) {
        return Err(domain(format!("m = {m} outside (-1, 1)")));
    }
    let nf = n as f64;
    let threshold = nf * m + 1e-12 * nf.max(1.0);
    let ln2 = std::f64::consts::LN_2;
    // log C(n, k) accumulated through the ratio C(n, k+1)/C(n, k)
    let mut log_c = 0.0;
    let mut terms = Vec::new();
    for k in 0..=n {
        if (2 * k) as f64 - nf > threshold {
            terms.push(log_c - nf * ln2);
        }
        if k < n {
            log_c += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
        }
    }
    // rounding in the sum can lift a near-certain tail a hair above 1
    let log_tail = log_sum_exp(&terms).min(0.0);
    Ok(TailEstimate {
        n,
        m,
        value: (log_tail / nf).exp(),
        method: TailMethod::ExactBinomial,
        stderr: None,
        hits: None,
        trials: None,
        seed: None,
        warning: None,
    })
}

/// A probability law on ℝ that can be sampled from a caller-owned generator.
pub trait Sampler: Sync {
    fn name(&self) -> &str;
    fn mean(&self) -> f64;
    fn sample(&self, rng: &mut dyn RngCore) -> f64;
}

/// `Pr(X = ±1) = ½`.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricBernoulli;

impl Sampler for SymmetricBernoulli {
    fn name(&self) -> &str {
        "symmetric_bernoulli"
    }
    fn mean(&self) -> f64 {
        0.0
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        if rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
}

/// Poisson by sequential inversion of the cdf.
#[derive(Debug, Clone, Copy)]
pub struct Poisson {
    pub mean: f64,
}

impl Sampler for Poisson {
    fn name(&self) -> &str {
        "poisson"
    }
    fn mean(&self) -> f64 {
        self.mean
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rng.gen();
        let mut p = (-self.mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        while u > cdf && p > 0.0 {
            k += 1;
            p *= self.mean / k as f64;
            cdf += p;
        }
        k as f64
    }
}

/// Gamma with shape `λ` and unit rate.
#[derive(Debug, Clone, Copy)]
pub struct GammaLaw {
    dist: Gamma<f64>,
    shape: f64,
}

impl GammaLaw {
    pub fn new(shape: f64) -> Result<Self> {
        let dist = Gamma::new(shape, 1.0).map_err(|e| Error::Param(format!("gamma shape {shape}: {e}")))?;
        Ok(Self { dist, shape })
    }
}

impl Sampler for GammaLaw {
    fn name(&self) -> &str {
        "gamma"
    }
    fn mean(&self) -> f64 {
        self.shape
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.dist.sample(rng)
    }
}

/// Density `½ e^{-|x|}`: an exponential with a random sign.
#[derive(Debug, Clone, Copy)]
pub struct BilateralExponential;

impl Sampler for BilateralExponential {
    fn name(&self) -> &str {
        "bilateral_exponential"
    }
    fn mean(&self) -> f64 {
        0.0
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let e: f64 = Exp1.sample(rng);
        if rng.gen::<bool>() {
            e
        } else {
            -e
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Gaussian {
    pub sigma: f64,
}

impl Sampler for Gaussian {
    fn name(&self) -> &str {
        "gaussian"
    }
    fn mean(&self) -> f64 {
        0.0
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.sigma * z
    }
}

/// Sampler for the probability member of a catalog family, by name.
pub fn sampler_for(name: &str, param: Option<f64>) -> Result<Box<dyn Sampler + Send>> {
    Ok(match name {
        "symmetric_bernoulli" => Box::new(SymmetricBernoulli),
        "poisson" => Box::new(Poisson { mean: param.unwrap_or(1.0) }),
        "gamma" => Box::new(GammaLaw::new(param.unwrap_or(1.0))?),
        "bilateral_exponential" => Box::new(BilateralExponential),
        "gaussian" => Box::new(Gaussian { sigma: param.unwrap_or(1.0) }),
        "dilogarithm" => Box::new(crate::dilog::CompoundPoissonSampler::dilog()),
        "sinh_family" => Box::new(crate::dilog::CompoundPoissonSampler::alpha()),
        other => return Err(Error::UnknownFamily(format!("{other} (no sampler)"))),
    })
}

/// Trials per sub-stream. Fixed so that results do not depend on the thread count.
const CHUNK: u64 = 1 << 14;

/// Empirical `Pr(X̄_n > m)^{1/n}` over `trials` independent walks.
///
/// Chunk `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, and
/// only the hit counts are summed, so the estimate is bit-reproducible. The
/// standard error is the binomial one pushed through `p ↦ p^{1/n}`. With no
/// hits the value is 0 and a warning is attached.
pub fn monte_carlo_tail(sampler: &dyn Sampler, n: u64, m: f64, trials: u64, seed: u64) -> Result<TailEstimate> {
    if n == 0 || trials == 0 {
        return Err(Error::Param("n and trials must be at least 1".into()));
    }
    if !m.is_finite() {
        return Err(domain(format!("m = {m}")));
    }
    let chunks = trials.div_ceil(CHUNK);
    let threshold = n as f64 * m;
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(trials - c * CHUNK);
            let mut h = 0u64;
            for _ in 0..count {
                let sum: f64 = (0..n).map(|_| sampler.sample(&mut rng)).sum();
                if sum > threshold {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let p = hits as f64 / trials as f64;
    let nf = n as f64;
    let (value, stderr, warning) = if hits == 0 {
        (0.0, None, Some(format!("no hits in {trials} trials; rare-event regime beyond the trial budget")))
    } else {
        let se_p = (p * (1.0 - p) / trials as f64).sqrt();
        let v = p.powf(1.0 / nf);
        (v, Some(v / (nf * p) * se_p), None)
    };
    Ok(TailEstimate {
        n,
        m,
        value,
        method: TailMethod::MonteCarlo,
        stderr,
        hits: Some(hits),
        trials: Some(trials),
        seed: Some(seed),
        warning,
    })
}

/// One row of a tail-convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub n: u64,
    pub exact: Option<f64>,
    pub mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub alpha_limit: f64,
}

/// Exact ±1 tails at each `n`, next to the limit `α(m)`.
pub fn binomial_table(ns: &[u64], m: f64) -> Result<Vec<TailRow>> {
    let limit = alpha_symmetric_bernoulli(m);
    ns.iter()
        .map(|&n| {
            Ok(TailRow { n, exact: Some(exact_binomial_tail(n, m)?.value), mc: None, mc_stderr: None, alpha_limit: limit })
        })
        .collect()
}
