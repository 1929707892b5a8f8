//! Globally adaptive Gauss–Kronrod (10/21) quadrature.

use serde::Serialize;

use super::Interval;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Points where the integrand is singular or kinked. Interior hints split the
    /// domain; endpoint hints are accepted but need no special treatment because
    /// Kronrod nodes never touch the endpoints.
    pub singularity_hints: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_subdivisions: 2000, singularity_hints: Vec::new() }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn with_hints(mut self, hints: &[f64]) -> Self {
        self.singularity_hints = hints.to_vec();
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(Error::Param(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980215775,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// x = a + t/(1-t), t ∈ [0,1)
    Upper(f64),
    /// x = b - t/(1-t), t ∈ [0,1)
    Lower(f64),
}

impl Map {
    fn eval<F: Fn(f64) -> f64>(&self, f: &F, t: f64) -> Result<f64> {
        let (x, jac) = match *self {
            Map::Identity => (t, 1.0),
            Map::Upper(a) => {
                let u = 1.0 - t;
                (a + t / u, 1.0 / (u * u))
            }
            Map::Lower(b) => {
                let u = 1.0 - t;
                (b - t / u, 1.0 / (u * u))
            }
        };
        if !x.is_finite() {
            // subdivision has collapsed onto the point at infinity
            return Err(Error::NonConvergence(format!("tail mass does not vanish (sample at x = {x})")));
        }
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Domain(format!("integrand returned {y} at x = {x}")));
        }
        Ok(if y == 0.0 { 0.0 } else { y * jac })
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    map: Map,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, map: Map, a: f64, b: f64) -> Result<Segment> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = map.eval(f, c)?;
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = map.eval(f, c - dx)?;
        let f2 = map.eval(f, c + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * h;
    resabs *= h.abs();
    resasc *= h.abs();
    let mut error = ((resk - resg) * h).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment { map, a, b, value, error })
}

/// Integrate `f` over `domain`, returning the value and an error estimate.
pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    domain: &Interval,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    spec.validate()?;
    let mut cuts: Vec<f64> = spec
        .singularity_hints
        .iter()
        .copied()
        .filter(|&x| x > domain.lo && x < domain.hi)
        .collect();
    if !domain.lo.is_finite() && !domain.hi.is_finite() && cuts.is_empty() {
        cuts.push(0.0);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut points = vec![domain.lo];
    points.extend(cuts);
    points.push(domain.hi);

    let mut segs = Vec::with_capacity(spec.max_subdivisions + 4);
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let seg = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => gk21(&f, Map::Identity, lo, hi)?,
            (true, false) => gk21(&f, Map::Upper(lo), 0.0, 1.0)?,
            (false, true) => gk21(&f, Map::Lower(hi), 0.0, 1.0)?,
            (false, false) => unreachable!("doubly infinite piece after split"),
        };
        segs.push(seg);
    }

    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok((total, err));
        }
        if segs.len() >= spec.max_subdivisions {
            return Err(Error::NonConvergence(format!(
                "quadrature budget of {} subdivisions exhausted (estimate {total:e}, error {err:e})",
                spec.max_subdivisions
            )));
        }
        let (idx, worst) = segs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap())
            .map(|(i, s)| (i, *s))
            .unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::NonConvergence(format!(
                "quadrature interval collapsed near t = {mid} (estimate {total:e}, error {err:e})"
            )));
        }
        let left = gk21(&f, worst.map, worst.a, mid)?;
        let right = gk21(&f, worst.map, mid, worst.b)?;
        segs[idx] = left;
        segs.push(right);
    }
}

/// Integrate `f` over `domain` to the tolerances in `spec`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: &Interval, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_error(f, domain, spec).map(|(v, _)| v)
}

/// `∫_a^∞ f` for integrands whose tail oscillates with the given period.
///
/// Partial integrals over `K` whole periods behave like a power series in `1/K`
/// once the oscillation is averaged out, so they are extrapolated with a
/// Richardson table over `K = 16, 32, 64, ...`.
pub fn integrate_periodic_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    period: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    const START: usize = 16;
    const LEVELS: usize = 8;
    let chunk_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / 4096.0,
        rel_tol: spec.rel_tol,
        max_subdivisions: spec.max_subdivisions,
        singularity_hints: Vec::new(),
    };
    let chunk = |j: usize| -> Result<f64> {
        let lo = a + period * j as f64;
        integrate(&f, &Interval::closed(lo, lo + period), &chunk_spec)
    };
    let mut partial = 0.0;
    let mut done = 0usize;
    let mut table: Vec<Vec<f64>> = Vec::new();
    for level in 0..LEVELS {
        let k = START << level;
        while done < k {
            partial += chunk(done)?;
            done += 1;
        }
        let mut row = vec![partial];
        for j in 1..=level {
            let factor = (1u64 << j) as f64 - 1.0;
            let prev = &table[level - 1];
            let r = row[j - 1] + (row[j - 1] - prev[j - 1]) / factor;
            row.push(r);
        }
        if level >= 2 {
            let best = row[level];
            let prev_best = table[level - 1][level - 1];
            if (best - prev_best).abs() <= spec.abs_tol.max(spec.rel_tol * best.abs()) {
                return Ok(best);
            }
        }
        table.push(row);
    }
    let last = table.last().unwrap();
    Err(Error::NonConvergence(format!(
        "periodic tail extrapolation did not settle (last estimate {:e})",
        last[last.len() - 1]
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn def() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn exponential_half_line() {
        let v = integrate(|x| (-x).exp(), &Interval::positive(), &def()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frullani_at_one() {
        let v = integrate(|x| super::super::exprel(-x) * (-x).exp(), &Interval::positive(), &def()).unwrap();
        assert!((v - LN_2).abs() < 1e-11, "{v}");
    }

    #[test]
    fn squared_exprel_is_log4() {
        let v = integrate(|x| super::super::exprel(-x).powi(2), &Interval::positive(), &def()).unwrap();
        assert!((v - 4f64.ln()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn gaussian_over_real_line() {
        let v = integrate(|x| (-0.5 * x * x).exp(), &Interval::real_line(), &def()).unwrap();
        assert!((v - (2.0 * PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn endpoint_singularities() {
        let v = integrate(|x| 1.0 / x.sqrt(), &Interval::open(0.0, 1.0), &def()).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        let w = integrate(|x| -x.ln(), &Interval::open(0.0, 1.0), &def()).unwrap();
        assert!((w - 1.0).abs() < 1e-10, "{w}");
    }

    #[test]
    fn interior_kink_hint() {
        let spec = def().with_hints(&[0.3]);
        let v = integrate(|x: f64| (x - 0.3).abs(), &Interval::closed(0.0, 1.0), &spec).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-13);
    }

    #[test]
    fn divergent_integral_reports_nonconvergence() {
        let r = integrate(|x| 1.0 / x, &Interval::open(1.0, f64::INFINITY), &def());
        assert!(matches!(r, Err(Error::NonConvergence(_))), "{r:?}");
    }

    #[test]
    fn nan_sample_is_domain_error() {
        let r = integrate(|x: f64| (x - 0.5).ln(), &Interval::closed(0.0, 1.0), &def());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn sine_integral_by_periodic_tail() {
        let f = |x: f64| if x == 0.0 { 1.0 } else { x.sin() / x };
        let v = integrate_periodic_tail(f, 0.0, 2.0 * PI, &def()).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn one_minus_cos_over_square() {
        let f = |x: f64| {
            let h = 0.5 * x;
            let s = if h == 0.0 { 1.0 } else { h.sin() / h };
            0.5 * s * s
        };
        let v = integrate_periodic_tail(f, 0.0, 2.0 * PI, &def()).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-9, "{v}");
    }
}
