//! Taylor coefficients at the origin by averaging over a circle.

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorSpec {
    pub max_order: usize,
    pub contour_radius: f64,
    pub sample_count: usize,
}

impl TaylorSpec {
    /// Radius half-way to the nearest singularity, 256 samples (more if the order needs it).
    pub fn for_singularity(distance: f64, max_order: usize) -> Self {
        Self { max_order, contour_radius: 0.5 * distance, sample_count: 256.max(4 * max_order) }
    }
}

/// Coefficients `c₀..c_K` of a function analytic on a disk around 0 and real on the real axis.
pub fn taylor_coeffs<F: Fn(Complex64) -> Complex64>(f: F, spec: &TaylorSpec) -> Result<Vec<f64>> {
    let n = spec.sample_count;
    let rho = spec.contour_radius;
    if !(rho > 0.0) || n < 4 * spec.max_order.max(1) {
        return Err(Error::Param(format!("invalid Taylor spec {spec:?}")));
    }
    let samples: Vec<(f64, Complex64)> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            (theta, f(Complex64::from_polar(rho, theta)))
        })
        .collect();
    let fmax = samples.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    if !fmax.is_finite() {
        return Err(Error::Domain("non-finite value on the Taylor contour".into()));
    }
    let threshold = 1e-10 * fmax.max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(spec.max_order + 1);
    for k in 0..=spec.max_order {
        let mut acc = Complex64::new(0.0, 0.0);
        for (theta, v) in &samples {
            acc += v * Complex64::from_polar(1.0, -(k as f64) * theta);
        }
        acc /= n as f64;
        // `acc` is c_k ρ^k: compare the imaginary part on the contour's own scale
        if acc.im.abs() > threshold {
            return Err(Error::Analyticity { residue: acc.im.abs(), threshold });
        }
        out.push(acc.re / rho.powi(k as i32));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_coefficients() {
        let spec = TaylorSpec { max_order: 10, contour_radius: 1.0, sample_count: 256 };
        let c = taylor_coeffs(|z| z.exp(), &spec).unwrap();
        let mut fact = 1.0;
        for (k, ck) in c.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((ck - 1.0 / fact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn non_real_function_is_rejected() {
        let spec = TaylorSpec { max_order: 4, contour_radius: 0.5, sample_count: 64 };
        let r = taylor_coeffs(|z| z * Complex64::i(), &spec);
        assert!(matches!(r, Err(Error::Analyticity { .. })));
    }
}
