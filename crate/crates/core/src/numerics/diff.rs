//! Finite differences.

use super::Interval;

/// Step `rel·max(1,|x|)`, capped at 1/64 of the distance to the boundary of `domain`.
pub fn step_inside(domain: &Interval, x: f64, rel: f64) -> f64 {
    let h = rel * x.abs().max(1.0);
    // near an edge the nearest singularity sets the scale; stay well inside it
    h.min(domain.distance_to_boundary(x) / 64.0)
}

/// Central first difference.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Five-point second difference.
pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let (a, b, c, d, e) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
    (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h)
}
