//! Dual measures of natural exponential families.
//!
//! Everything is written in the bilateral convention: `B(s) = ∫ e^{-sx} μ(dx)`,
//! `ℓ = log B`, mean `m = -ℓ'(s)` and variance function `V(m) = ℓ''(φ(m))`.
//! A measure `μ*` is dual to `μ` when `-ℓ'_{μ*}(-ℓ'_μ(s)) = s`.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod dilog;
pub mod duality;
mod error;
pub mod largedev;
pub mod levy;
pub mod multivar;
pub mod nef;
pub mod numerics;
pub mod varexpr;

pub use error::{Error, Result};
