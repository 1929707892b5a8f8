//! Lattice laws built from the dilogarithm: the law `μ` with generating
//! function `exp Σ (zⁿ - 1)/n²`, the difference `σ = Y - Y'`, the density of
//! `W = Z + Y - Y'`, the odd-jump law `α`, and compound-Poisson samplers.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog;
use crate::error::domain;
use crate::largedev::Sampler;
use crate::nef::{mean_at, numeric_variance_at, variance_at, FamilySpec};
use crate::numerics::{integrate, Interval, QuadratureSpec};
use crate::{Error, Result};

/// Weights on `offset, offset + 1, …` plus a bound on the mass left out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePmf {
    pub offset: i64,
    pub weights: Vec<f64>,
    pub truncation_mass: f64,
}

impl LatticePmf {
    fn from_weights(weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        Self { offset: 0, weights, truncation_mass: (1.0 - total).max(0.0) }
    }

    /// Weight at `n`, zero outside the table.
    pub fn get(&self, n: i64) -> f64 {
        usize::try_from(n - self.offset).ok().and_then(|i| self.weights.get(i)).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `(n, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights.iter().enumerate().map(move |(i, &w)| (self.offset + i as i64, w))
    }

    /// `Σ w(n) zⁿ` over the table.
    pub fn generating(&self, z: f64) -> f64 {
        // Horner from the top; offset handled by a final power
        let poly = self.weights.iter().rev().fold(0.0, |acc, &w| acc * z + w);
        poly * z.powi(self.offset as i32)
    }
}

/// `n w(n) = Σ_k c_k w(n-k)`: the weights of `exp(Σ_k c_k z^k / k)` times `w(0)`.
fn log_derivative_recursion(w0: f64, n_max: usize, c: impl Fn(usize) -> f64) -> Vec<f64> {
    let cs: Vec<f64> = (0..=n_max).map(|k| if k == 0 { 0.0 } else { c(k) }).collect();
    let mut w = vec![0.0; n_max + 1];
    w[0] = w0;
    for n in 1..=n_max {
        let acc: f64 = (1..=n).map(|k| cs[k] * w[n - k]).sum();
        w[n] = acc / n as f64;
    }
    w
}

/// `μ(0) = e^{-π²/6}` and `n μ(n) = Σ_{k ≤ n} μ(n-k)/k`.
pub fn dilog_pmf(n_max: usize) -> LatticePmf {
    LatticePmf::from_weights(log_derivative_recursion((-PI * PI / 6.0).exp(), n_max, |k| 1.0 / k as f64))
}

/// `α(0) = e^{-π²/4}` and `n α(n) = Σ_{odd k ≤ n} (2/k) α(n-k)`.
pub fn alpha_pmf(n_max: usize) -> LatticePmf {
    LatticePmf::from_weights(log_derivative_recursion((-PI * PI / 4.0).exp(), n_max, |k| {
        if k % 2 == 1 {
            2.0 / k as f64
        } else {
            0.0
        }
    }))
}

/// Characteristic function of `σ = Y - Y'`: `e^{-t(2π - t)/2}` on `[0, 2π]`,
/// extended periodically.
pub fn sigma_charfn(t: f64) -> f64 {
    let t = t.rem_euclid(2.0 * PI);
    (-0.5 * t * (2.0 * PI - t)).exp()
}

/// `Pr(σ = n) = ((-1)ⁿ/π) ∫_0^π e^{(s² - π²)/2} cos(ns) ds`.
pub fn sigma_pmf(n: i64) -> Result<f64> {
    let k = n.unsigned_abs() as f64;
    let spec = QuadratureSpec::with_tol(1e-14, 1e-12);
    let v = integrate(|s| (0.5 * (s * s - PI * PI)).exp() * (k * s).cos(), &Interval::closed(0.0, PI), &spec)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * v / PI)
}

/// `Pr(σ = n) = Σ_k μ(k) μ(k - n)` from a truncated `μ` table.
pub fn sigma_pmf_convolution(n: i64, mu: &LatticePmf) -> f64 {
    let shift = n.unsigned_abs() as usize;
    let w = &mu.weights;
    (shift..w.len()).map(|k| w[k] * w[k - shift]).sum()
}

/// Density of `W = Z + Y - Y'` with `Z` standard normal, from the closed-form
/// inversion of `e^{-t²/2} χ_σ(t)` over the periods `[2kπ, 2(k+1)π]`:
/// `f(x) = (1/2π) Σ_k (e_k - e_{k+1})/((2k+1)π + ix)`, `e_k = e^{-2k²π² - 2iπkx}`.
pub fn w_density(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("x = {x}")));
    }
    let e = |k: f64| Complex64::from_polar((-2.0 * k * k * PI * PI).exp(), -2.0 * PI * k * x);
    // terms k and -k-1 are conjugate; |k| ≤ 3 leaves e^{-32π²} behind
    const K: i64 = 3;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -K - 1..=K {
        let kf = k as f64;
        sum += (e(kf) - e(kf + 1.0)) / Complex64::new((2.0 * kf + 1.0) * PI, x);
    }
    let sum = sum / (2.0 * PI);
    let threshold = 1e-12;
    if sum.im.abs() > threshold {
        return Err(Error::Analyticity { residue: sum.im.abs(), threshold });
    }
    Ok(sum.re)
}

/// `Σ_n σ(n) φ(x - n)` over `|n| ≤ n_max`, with the σ weights supplied.
pub fn w_density_convolution(x: f64, sigma: &dyn Fn(i64) -> f64, n_max: i64) -> f64 {
    let phi = |y: f64| (-0.5 * y * y).exp() / (2.0 * PI).sqrt();
    (-n_max..=n_max).map(|n| sigma(n) * phi(x - n as f64)).sum()
}

/// `ℓ(s) = Li₂(re^{-s}) + Li₂(re^{s}) - 2Li₂(r)` on `|s| < -log r`.
pub fn sigma_r_cumulant(r: f64, s: f64) -> Result<f64> {
    sigma_r_family(r)?.cumulant.value(s)
}

/// `V(m) = 2/(1-r²) √(r²+a²)(√(r²+a²) + √(1+a²))` with `a = sinh(m/2)`.
pub fn sigma_r_variance(r: f64, m: f64) -> Result<f64> {
    variance_at(&sigma_r_family(r)?, m)
}

fn sigma_r_family(r: f64) -> Result<FamilySpec> {
    let params = [("r".to_string(), r)].into_iter().collect();
    Ok(catalog::get("sigma_r", &params)?.family)
}

/// Largest relative gap between the closed-form variance and the numeric
/// `ℓ''(φ(m))` of the σ_r family on a grid of means.
pub fn sigma_r_variance_check(r: f64, grid: &[f64]) -> Result<f64> {
    let f = sigma_r_family(r)?;
    grid.iter().try_fold(0.0f64, |acc, &m| {
        let a = variance_at(&f, m)?;
        let b = numeric_variance_at(&f, m)?;
        Ok(acc.max(((a - b) / a).abs()))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfDualFamily {
    Dilog,
    Alpha,
}

impl std::str::FromStr for SelfDualFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dilog" | "dilogarithm" => Ok(Self::Dilog),
            "alpha" | "sinh_family" => Ok(Self::Alpha),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl SelfDualFamily {
    pub fn family(self) -> FamilySpec {
        let name = match self {
            Self::Dilog => "dilogarithm",
            Self::Alpha => "sinh_family",
        };
        catalog::get_default(name).expect("registered family").family
    }
}

/// `|e^{-s} + e^{-m} - 1|` for the dilogarithm law and
/// `|e^{-m} + e^{-s} + e^{-s-m} - 1|` for `α`, with `m` the mean at `s`.
pub fn self_duality_relation(family: SelfDualFamily, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain(format!("s = {s} must be positive")));
    }
    let m = mean_at(&family.family(), s)?;
    let (u, v) = ((-s).exp(), (-m).exp());
    Ok(match family {
        SelfDualFamily::Dilog => (u + v - 1.0).abs(),
        SelfDualFamily::Alpha => (u + v + u * v - 1.0).abs(),
    })
}

/// Truncated Cauchy product of two tables starting at 0.
fn convolve(a: &[f64], b: &[f64], n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .map(|n| {
            (0..=n)
                .filter(|&k| k < a.len() && n - k < b.len())
                .map(|k| a[k] * b[n - k])
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvolutionReport {
    pub n_max: usize,
    pub max_abs_diff: f64,
    /// Mass of `μ^{*4}` beyond the table, bounded by the mass `μ` misses.
    pub truncation_bound: f64,
}

/// With `X ~ α*α` and `Y ~ μ` independent, `X + 2Y ~ μ^{*4}`; compare the two
/// pmfs on `0..=n_max`. Tables at order `n_max` are exact there.
pub fn convolution_identity(n_max: usize) -> ConvolutionReport {
    let mu = dilog_pmf(n_max);
    let al = alpha_pmf(n_max);
    let alpha2 = convolve(&al.weights, &al.weights, n_max);
    let mut two_y = vec![0.0; n_max + 1];
    for (k, &w) in mu.weights.iter().enumerate() {
        if 2 * k <= n_max {
            two_y[2 * k] = w;
        }
    }
    let lhs = convolve(&alpha2, &two_y, n_max);
    let mu2 = convolve(&mu.weights, &mu.weights, n_max);
    let rhs = convolve(&mu2, &mu2, n_max);
    let max_abs_diff = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ConvolutionReport { n_max, max_abs_diff, truncation_bound: 4.0 * mu.truncation_mass }
}

/// `N(0,1) * μ`: `ℓ_η(s) = s²/2 - π²/6 + Li₂(e^{-s})`.
pub fn eta_family() -> FamilySpec {
    catalog::get_default("eta").expect("registered family").family
}

/// Largest relative gap between the numeric `ℓ_η''(φ(m))` and `e^m + 1`.
pub fn eta_variance_check(grid: &[f64]) -> Result<f64> {
    let f = eta_family();
    grid.iter().try_fold(0.0f64, |acc, &m| {
        let want = m.exp() + 1.0;
        let got = numeric_variance_at(&f, m)?;
        Ok(acc.max(((got - want) / want).abs()))
    })
}

/// `ψ₁(x) = Σ_{j ≥ 0} 1/(x+j)²` for `x > 0`, by upward recursion into the
/// asymptotic series.
fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let z = 1.0 / (x * x);
    acc + 1.0 / x + z / 2.0 + z / x * (1.0 / 6.0 - z * (1.0 / 30.0 - z * (1.0 / 42.0 - z * (1.0 / 30.0 - z * 5.0 / 66.0))))
}

/// Compound Poisson law `Σ_{i ≤ N} J_i` with `N ~ Poisson(λ)` and integer jumps.
#[derive(Debug, Clone)]
pub struct CompoundPoissonSampler {
    name: &'static str,
    lambda: f64,
    /// `cdf[i]` is `Pr(J ≤ jump(i))`.
    cdf: Vec<f64>,
    odd: bool,
}

const TABLE: usize = 4096;

impl CompoundPoissonSampler {
    /// Jumps `n ≥ 1` with probability `(6/π²)/n²`, `λ = π²/6`.
    pub fn dilog() -> Self {
        // Pr(J > n) = (6/π²) ψ₁(n + 1)
        let c = 6.0 / (PI * PI);
        let cdf = (1..=TABLE).map(|n| 1.0 - c * trigamma(n as f64 + 1.0)).collect();
        Self { name: "dilogarithm", lambda: PI * PI / 6.0, cdf, odd: false }
    }

    /// Jumps `2n - 1` with probability `(8/π²)/(2n-1)²`, `λ = π²/4`.
    pub fn alpha() -> Self {
        // Pr(J > 2n - 1) = (8/π²) Σ_{j ≥ n} 1/(2j+1)² = (2/π²) ψ₁(n + ½)
        let c = 2.0 / (PI * PI);
        let cdf = (1..=TABLE).map(|n| 1.0 - c * trigamma(n as f64 + 0.5)).collect();
        Self { name: "sinh_family", lambda: PI * PI / 4.0, cdf, odd: true }
    }

    /// Tail probability beyond table index `i` (1-based).
    fn tail(&self, i: f64) -> f64 {
        if self.odd {
            2.0 / (PI * PI) * trigamma(i + 0.5)
        } else {
            6.0 / (PI * PI) * trigamma(i + 1.0)
        }
    }

    fn jump_value(&self, i: u64) -> i64 {
        if self.odd {
            2 * i as i64 - 1
        } else {
            i as i64
        }
    }

    fn jump(&self, rng: &mut dyn RngCore) -> i64 {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|&c| c < u);
        if idx < self.cdf.len() {
            return self.jump_value(idx as u64 + 1);
        }
        // beyond the table: smallest i with tail(i) ≤ 1 - u, by bisection
        let v = 1.0 - u;
        let (mut lo, mut hi) = (TABLE as u64, (TABLE as u64).max(1) * 2);
        while self.tail(hi as f64) > v {
            lo = hi;
            hi = hi.saturating_mul(2);
            if hi > 1 << 60 {
                break;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail(mid as f64) > v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.jump_value(hi)
    }

    /// One draw.
    pub fn sample_int(&self, rng: &mut dyn RngCore) -> i64 {
        let count = crate::largedev::Poisson { mean: self.lambda }.sample(rng) as u64;
        (0..count).map(|_| self.jump(rng)).sum()
    }

    /// Jump probability covered by the inversion table; the rest goes through
    /// the tail bisection.
    pub fn table_mass(&self) -> f64 {
        *self.cdf.last().unwrap_or(&0.0)
    }
}

impl Sampler for CompoundPoissonSampler {
    fn name(&self) -> &str {
        self.name
    }
    fn mean(&self) -> f64 {
        f64::INFINITY
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.sample_int(rng) as f64
    }
}

/// Draws per sub-stream.
const CHUNK: usize = 1 << 14;

/// `count` draws; chunk `i` uses `ChaCha8Rng::seed_from_u64(seed)` on stream `i`.
pub fn sample(family: SelfDualFamily, count: usize, seed: u64) -> Vec<i64> {
    let sampler = match family {
        SelfDualFamily::Dilog => CompoundPoissonSampler::dilog(),
        SelfDualFamily::Alpha => CompoundPoissonSampler::alpha(),
    };
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(count - c * CHUNK);
            let s = &sampler;
            (0..n).map(move |_| s.sample_int(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

#[cfg(test)]
mod tests;
