//! Cumulants on open subsets of ℝⁿ.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::domain;
use crate::{Error, Result};

pub type VecFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type HessFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
pub type Region = Arc<dyn Fn(&DVector<f64>) -> bool + Send + Sync>;

const FIRST_STEP: f64 = 1e-6;
const SECOND_STEP: f64 = 1e-4;

#[derive(Clone)]
pub struct CumulantNd {
    pub dim: usize,
    region: Region,
    value: VecFn,
    gradient: Option<GradFn>,
    hessian: Option<HessFn>,
}

impl fmt::Debug for CumulantNd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulantNd")
            .field("dim", &self.dim)
            .field("closed_gradient", &self.gradient.is_some())
            .field("closed_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl CumulantNd {
    pub fn new(
        dim: usize,
        region: impl Fn(&DVector<f64>) -> bool + Send + Sync + 'static,
        value: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { dim, region: Arc::new(region), value: Arc::new(value), gradient: None, hessian: None }
    }

    pub fn with_gradient(mut self, g: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn contains(&self, s: &DVector<f64>) -> bool {
        s.len() == self.dim && s.iter().all(|x| x.is_finite()) && (self.region)(s)
    }

    fn check(&self, s: &DVector<f64>) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(domain(format!("point {:?} outside cumulant domain", s.as_slice())))
        }
    }

    pub fn value(&self, s: &DVector<f64>) -> Result<f64> {
        self.check(s)?;
        Ok((self.value)(s))
    }

    pub fn gradient(&self, s: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(s)?;
        if let Some(g) = &self.gradient {
            return Ok(g(s));
        }
        let mut out = DVector::zeros(self.dim);
        for i in 0..self.dim {
            let h = FIRST_STEP * s[i].abs().max(1.0);
            let (mut a, mut b) = (s.clone(), s.clone());
            a[i] += h;
            b[i] -= h;
            out[i] = (self.value(&a)? - self.value(&b)?) / (2.0 * h);
        }
        Ok(out)
    }

    pub fn hessian(&self, s: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check(s)?;
        if let Some(h) = &self.hessian {
            return Ok(h(s));
        }
        if self.gradient.is_some() {
            let mut out = DMatrix::zeros(self.dim, self.dim);
            for j in 0..self.dim {
                let h = FIRST_STEP * s[j].abs().max(1.0);
                let (mut a, mut b) = (s.clone(), s.clone());
                a[j] += h;
                b[j] -= h;
                let col = (self.gradient(&a)? - self.gradient(&b)?) / (2.0 * h);
                out.set_column(j, &col);
            }
            return Ok(symmetrize(out));
        }
        self.numeric_hessian(s)
    }

    /// Hessian from values only (oracle for closed forms).
    pub fn numeric_hessian(&self, s: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check(s)?;
        let n = self.dim;
        let f = |p: &DVector<f64>| self.value(p);
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let hi = SECOND_STEP * s[i].abs().max(1.0);
                let hj = SECOND_STEP * s[j].abs().max(1.0);
                let at = |di: f64, dj: f64| -> Result<f64> {
                    let mut p = s.clone();
                    p[i] += di;
                    p[j] += dj;
                    f(&p)
                };
                let v = if i == j {
                    let g = |t: f64| -> Result<f64> {
                        let mut p = s.clone();
                        p[i] += t;
                        f(&p)
                    };
                    let (a, b, c, d, e) = (g(-2.0 * hi)?, g(-hi)?, g(0.0)?, g(hi)?, g(2.0 * hi)?);
                    (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * hi * hi)
                } else {
                    (at(hi, hj)? - at(hi, -hj)? - at(-hi, hj)? + at(-hi, -hj)?) / (4.0 * hi * hj)
                };
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Ok(out)
    }

    pub fn mean(&self, s: &DVector<f64>) -> Result<DVector<f64>> {
        self.gradient(s).map(|g| -g)
    }

    /// Solve `-∇ℓ(s) = m` by damped Newton from `start`.
    pub fn mean_inverse(&self, m: &DVector<f64>, start: &DVector<f64>) -> Result<DVector<f64>> {
        let mut s = start.clone();
        self.check(&s)?;
        let resid = |s: &DVector<f64>| -> Result<DVector<f64>> { Ok(self.mean(s)? - m) };
        let mut r = resid(&s)?;
        for _ in 0..200 {
            let rn = r.norm();
            if rn <= 1e-13 * (1.0 + m.norm()) {
                return Ok(s);
            }
            let h = self.hessian(&s)?;
            // mean(s + d) ≈ mean(s) - H d, so d = H^{-1} r
            let d = h.clone().lu().solve(&r).ok_or(Error::SingularMatrix)?;
            let mut t = 1.0;
            loop {
                let cand = &s + &d * t;
                if self.contains(&cand) {
                    let rc = resid(&cand)?;
                    if rc.norm() < rn {
                        s = cand;
                        r = rc;
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-12 {
                    return if rn <= 1e-10 * (1.0 + m.norm()) {
                        Ok(s)
                    } else {
                        Err(Error::NonConvergence(format!("damped Newton stalled at residual {rn:e}")))
                    };
                }
            }
        }
        Err(Error::NonConvergence("damped Newton exceeded 200 iterations".into()))
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// A family on ℝⁿ with an optional closed-form variance matrix.
#[derive(Clone)]
pub struct FamilySpecNd {
    pub name: String,
    pub cumulant: CumulantNd,
    pub variance: Option<HessFn>,
    /// A domain point used to start Newton iterations.
    pub anchor: DVector<f64>,
}

impl fmt::Debug for FamilySpecNd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilySpecNd").field("name", &self.name).field("cumulant", &self.cumulant).finish()
    }
}

impl FamilySpecNd {
    pub fn new(name: impl Into<String>, cumulant: CumulantNd, anchor: DVector<f64>) -> Self {
        Self { name: name.into(), cumulant, variance: None, anchor }
    }

    pub fn with_variance(mut self, v: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.variance = Some(Arc::new(v));
        self
    }

    pub fn mean_inverse(&self, m: &DVector<f64>) -> Result<DVector<f64>> {
        self.cumulant.mean_inverse(m, &self.anchor)
    }

    /// Variance matrix at mean `m`: closed form if present, else the Hessian at `φ(m)`.
    pub fn variance_at(&self, m: &DVector<f64>) -> Result<DMatrix<f64>> {
        if let Some(v) = &self.variance {
            return Ok(v(m));
        }
        let s = self.mean_inverse(m)?;
        self.cumulant.hessian(&s)
    }
}
