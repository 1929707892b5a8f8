//! Special functions.

use std::f64::consts::PI;

use crate::{Error, Result};

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Below this magnitude the exponential differences switch to their Taylor series.
const SMALL_X: f64 = 1e-4;

/// `(e^y - 1)/y`, continuous at 0.
pub fn exprel(y: f64) -> f64 {
    if y.abs() < SMALL_X {
        1.0 + y * (0.5 + y * (1.0 / 6.0 + y / 24.0))
    } else {
        y.exp_m1() / y
    }
}

/// `(e^y - 1 - y)/y²`, continuous at 0.
pub fn exprel2(y: f64) -> f64 {
    if y.abs() < SMALL_X {
        0.5 + y * (1.0 / 6.0 + y * (1.0 / 24.0 + y / 120.0))
    } else {
        (y.exp_m1() - y) / (y * y)
    }
}

fn dilog_series(x: f64) -> f64 {
    let mut sum: f64 = 0.0;
    let mut p = x;
    let mut n = 1.0;
    while p.abs() > 1e-18 * sum.abs().max(1e-300) && n < 200.0 {
        sum += p / (n * n);
        p *= x;
        n += 1.0;
    }
    sum
}

/// Real dilogarithm `Σ xⁿ/n²` on `[-1, 1]`.
///
/// The power series is used on `|x| ≤ 1/2`; the right end is brought back by
/// the reflection `Li₂(x) + Li₂(1-x) = π²/6 - log x log(1-x)` and the left end
/// by Landen's identity `Li₂(x) = -Li₂(x/(x-1)) - ½ log²(1-x)`.
pub fn dilog(x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("dilog argument {x} outside [-1, 1]")));
    }
    Ok(if x == 1.0 {
        PI * PI / 6.0
    } else if x.abs() <= 0.5 {
        dilog_series(x)
    } else if x > 0.5 {
        PI * PI / 6.0 - x.ln() * (-x).ln_1p() - dilog_series(1.0 - x)
    } else {
        let l = (-x).ln_1p();
        -dilog_series(x / (x - 1.0)) - 0.5 * l * l
    })
}
