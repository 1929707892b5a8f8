//! Registry of concrete families with closed-form cumulants, variance
//! functions, domains and registered duals.
//!
//! Each builder pins the additive constants of `ℓ` and `ℓ*`; they are chosen so
//! that the generating measure is a probability where one exists, and so that
//! the dual cumulant is the simplest closed form otherwise. The constants are
//! recorded in the entry notes.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::duality::{
    candidates, laplace_test_log_convexity, laplace_test_taylor_moments, legendre_base, power_variance_dual,
    scan_hankel, TestOutcome,
};
use crate::levy::{arcsine_levy_density, takacs_f, ArcsineKind, LevyRepresentation, Support};
use crate::nef::{Cumulant, Divisibility, FamilySpec, VarianceFunction};
use crate::numerics::{dilog, exprel, gamma, Interval, TaylorSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualStatus {
    SelfDual,
    DualRegistered,
    NoDualWithCertificate,
    Unknown,
    /// Absence of a dual is asserted in the literature but not proved.
    UnknownClaimedNoDual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub range: &'static str,
}

type CertificateFn = Arc<dyn Fn() -> Result<TestOutcome> + Send + Sync>;
type LevyFn = Arc<dyn Fn() -> LevyRepresentation + Send + Sync>;

#[derive(Clone)]
pub struct CatalogEntry {
    pub family: FamilySpec,
    pub dual: Option<FamilySpec>,
    pub dual_status: DualStatus,
    /// Identity in [`crate::levy`] behind the dual, if any.
    pub levy_ref: Option<&'static str>,
    pub notes: String,
    certificate: Option<CertificateFn>,
    dual_levy: Option<LevyFn>,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("family", &self.family.name)
            .field("dual", &self.dual.as_ref().map(|d| &d.name))
            .field("dual_status", &self.dual_status)
            .field("levy_ref", &self.levy_ref)
            .finish()
    }
}

impl CatalogEntry {
    fn new(family: FamilySpec, status: DualStatus, notes: impl Into<String>) -> Self {
        Self { family, dual: None, dual_status: status, levy_ref: None, notes: notes.into(), certificate: None, dual_levy: None }
    }

    fn with_dual(mut self, dual: FamilySpec) -> Self {
        self.family.dual_ref = Some(dual.name.clone());
        self.dual = Some(dual);
        self
    }

    fn self_dual(mut self) -> Self {
        self.dual_status = DualStatus::SelfDual;
        let mut d = self.family.clone();
        d.name = format!("{}_dual", self.family.name);
        self.family.dual_ref = Some(self.family.name.clone());
        self.dual = Some(d);
        self
    }

    fn with_levy(mut self, id: &'static str) -> Self {
        self.levy_ref = Some(id);
        self
    }

    fn with_dual_levy(mut self, f: impl Fn() -> LevyRepresentation + Send + Sync + 'static) -> Self {
        self.dual_levy = Some(Arc::new(f));
        self
    }

    fn with_certificate(mut self, f: impl Fn() -> Result<TestOutcome> + Send + Sync + 'static) -> Self {
        self.certificate = Some(Arc::new(f));
        self
    }

    /// Runs the attached nonexistence test, if the entry has one.
    pub fn certificate(&self) -> Option<Result<TestOutcome>> {
        self.certificate.as_ref().map(|f| f())
    }

    /// Lévy representation whose `ℓ''` is the dual's `ℓ*''`.
    pub fn dual_levy(&self) -> Option<LevyRepresentation> {
        self.dual_levy.as_ref().map(|f| f())
    }

    pub fn summary(&self) -> EntrySummary {
        let f = &self.family;
        EntrySummary {
            name: f.name.clone(),
            params: f.params.clone(),
            param_schema: schema(&f.name).map(|s| s.to_vec()).unwrap_or_default(),
            cumulant: f.formula.clone(),
            variance: f.variance_formula.clone(),
            domain: f.cumulant.domain,
            mean_domain: f.variance.mean_domain,
            steep: f.steep,
            divisibility: f.divisibility,
            dual_status: self.dual_status,
            dual: self.dual.as_ref().map(|d| DualSummary {
                name: d.name.clone(),
                cumulant: d.formula.clone(),
                variance: d.variance_formula.clone(),
                domain: d.cumulant.domain,
            }),
            levy_ref: self.levy_ref,
            has_certificate: self.certificate.is_some(),
            notes: self.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSummary {
    pub name: String,
    pub cumulant: String,
    pub variance: String,
    pub domain: Interval,
}

/// Serializable view of an entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntrySummary {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub param_schema: Vec<ParamSpec>,
    pub cumulant: String,
    pub variance: String,
    pub domain: Interval,
    pub mean_domain: Interval,
    pub steep: bool,
    pub divisibility: Divisibility,
    pub dual_status: DualStatus,
    pub dual: Option<DualSummary>,
    pub levy_ref: Option<&'static str>,
    pub has_certificate: bool,
    pub notes: String,
}

const NAMES: [&str; 23] = [
    "tweedie",
    "gamma",
    "poisson",
    "landau",
    "bernoulli",
    "symmetric_bernoulli",
    "binomial",
    "negative_binomial",
    "gaussian",
    "hyperbolic",
    "bilateral_exponential",
    "normal_inverse_gaussian",
    "abel",
    "takacs",
    "kendall_ressel",
    "inverse_gaussian",
    "strict_arcsine",
    "large_arcsine",
    "dilogarithm",
    "sinh_family",
    "eta",
    "sigma_r",
    "vinogradov_paris",
];

pub fn list() -> Vec<&'static str> {
    NAMES.to_vec()
}

const LAMBDA: ParamSpec = ParamSpec { name: "lambda", default: 1.0, range: "lambda > 0" };

fn schema(name: &str) -> Option<&'static [ParamSpec]> {
    Some(match name {
        "tweedie" => &[ParamSpec { name: "p", default: 1.5, range: "p < 0 or p > 1" }, LAMBDA],
        "gamma" | "inverse_gaussian" => &[LAMBDA],
        "binomial" => &[ParamSpec { name: "N", default: 2.0, range: "integer N >= 1" }],
        "gaussian" => &[ParamSpec { name: "sigma", default: 1.0, range: "sigma > 0" }],
        "takacs" => &[ParamSpec { name: "R", default: 2.0, range: "R > 1" }],
        "large_arcsine" => &[ParamSpec { name: "a", default: PI / 3.0, range: "0 < a < pi/2" }],
        "sigma_r" => &[ParamSpec { name: "r", default: 0.5, range: "0 < r < 1" }],
        n if NAMES.contains(&n) => &[],
        _ => return None,
    })
}

/// Resolve user parameters against the schema, filling defaults.
fn resolve(name: &str, params: &BTreeMap<String, f64>) -> Result<BTreeMap<&'static str, f64>> {
    let spec = schema(name).ok_or_else(|| Error::UnknownFamily(name.to_string()))?;
    for key in params.keys() {
        if !spec.iter().any(|p| p.name == key) {
            return Err(Error::Param(format!("{name} has no parameter `{key}`")));
        }
    }
    Ok(spec.iter().map(|p| (p.name, params.get(p.name).copied().unwrap_or(p.default))).collect())
}

/// Entry `name` with parameters overriding the documented defaults.
pub fn get(name: &str, params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    let p = resolve(name, params)?;
    let lambda = || p["lambda"];
    let positive = |key: &str, v: f64| -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Param(format!("{name}: {key} must be positive, got {v}")))
        }
    };
    match name {
        "tweedie" => tweedie(p["p"], positive("lambda", lambda())?),
        "gamma" => Ok(gamma_entry(positive("lambda", lambda())?)),
        "poisson" => Ok(poisson()),
        "landau" => Ok(landau()),
        "bernoulli" => Ok(bernoulli()),
        "symmetric_bernoulli" => Ok(symmetric_bernoulli()),
        "binomial" => binomial(p["N"]),
        "negative_binomial" => Ok(negative_binomial()),
        "gaussian" => Ok(gaussian(positive("sigma", p["sigma"])?)),
        "hyperbolic" => Ok(hyperbolic()),
        "bilateral_exponential" => Ok(bilateral_exponential()),
        "normal_inverse_gaussian" => Ok(normal_inverse_gaussian()),
        "abel" => Ok(abel()),
        "takacs" => takacs(p["R"]),
        "kendall_ressel" => Ok(kendall_ressel()),
        "inverse_gaussian" => Ok(inverse_gaussian(positive("lambda", lambda())?)),
        "strict_arcsine" => Ok(strict_arcsine()),
        "large_arcsine" => large_arcsine(p["a"]),
        "dilogarithm" => Ok(dilogarithm()),
        "sinh_family" => Ok(sinh_family()),
        "eta" => Ok(eta()),
        "sigma_r" => sigma_r(p["r"]),
        "vinogradov_paris" => Ok(vinogradov_paris()),
        _ => Err(Error::UnknownFamily(name.to_string())),
    }
}

/// Entry with default parameters.
pub fn get_default(name: &str) -> Result<CatalogEntry> {
    get(name, &BTreeMap::new())
}

/// `V(m)` of the entry's family.
pub fn variance_closed_form(name: &str, params: &BTreeMap<String, f64>, m: f64) -> Result<f64> {
    get(name, params)?.family.variance.eval(m)
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn li2(x: f64) -> f64 {
    dilog(x).unwrap_or(f64::NAN)
}

fn half_line() -> Interval {
    Interval::positive()
}

/// Tweedie scale `V(m) = m^p/λ^{p-1}` on `(0,∞)`.
fn tweedie(p: f64, lambda: f64) -> Result<CatalogEntry> {
    if !p.is_finite() || (0.0..=1.0).contains(&p) {
        return Err(Error::Param(format!("tweedie needs p < 0 or p > 1, got {p}")));
    }
    if p == 2.0 {
        return Ok(gamma_entry(lambda));
    }
    let lp = lambda.powf(p - 1.0);
    let variance = VarianceFunction::new(half_line(), move |m| m.powf(p) / lp);
    let vtext = format!("m^{p}/{lambda}^{}", p - 1.0);
    if p < 0.0 {
        let q = -p;
        let g = (q + 2.0) / (q + 1.0);
        let c = lambda * (q + 1.0).powf(g) / (q + 2.0);
        let dom = Interval::open(f64::NEG_INFINITY, 0.0);
        let cum = Cumulant::new(dom, move |s| c * (-s).powf(g))
            .with_first(move |s| -c * g * (-s).powf(g - 1.0))
            .with_second(move |s| c * g * (g - 1.0) * (-s).powf(g - 2.0));
        let family = FamilySpec::new("tweedie", cum, variance)
            .param("p", p)
            .param("lambda", lambda)
            .non_steep()
            .with_mean_inverse(move |m| -(m / (c * g)).powf(q + 1.0))
            .with_formulas(format!("{c}·(-s)^{g}"), vtext);
        let entry = CatalogEntry::new(
            family,
            DualStatus::NoDualWithCertificate,
            "stable law with index (q+2)/(q+1), q = -p, jumps on (-∞,0); support ℝ but means (0,∞). \
             A dual would have log-Laplace C m^{2-p}, whose tilted moment determinant is negative near 0.",
        )
        .with_levy("stable_gamma")
        .with_certificate(move || {
            let log_b = move |m: Complex64| candidates::tweedie_negative_log(p, lambda, m);
            let pts = [0.02, 0.05, 0.1, 0.2, 0.5, 1.0];
            scan_hankel("tweedie_dual_candidate", &log_b, &pts, 0.5)
        });
        return Ok(entry);
    }
    let dual = power_variance_dual(p, lambda)?;
    let e = 1.0 / (p - 1.0);
    let scale = lp.powf(e) * (p - 1.0).powf(-e);
    let mean = move |s: f64| scale * s.powf(-e);
    let (family, notes) = if p > 2.0 {
        let alpha = (p - 2.0) / (p - 1.0);
        let c = lambda * (p - 1.0).powf(alpha) / (p - 2.0);
        let cum = Cumulant::new(half_line(), move |s| -c * s.powf(alpha))
            .with_first(move |s| -mean(s))
            .with_second(move |s| e * mean(s) / s);
        (
            FamilySpec::new("tweedie", cum, variance).with_formulas(format!("-{c}·s^{alpha}"), vtext),
            "positive stable law with index (p-2)/(p-1); ℓ(0) = 0. Dual is the Poisson-gamma family with power p/(p-1).",
        )
    } else {
        let beta = (2.0 - p) / (p - 1.0);
        let c = lambda * (p - 1.0).powf(-beta) / (2.0 - p);
        let cum = Cumulant::new(half_line(), move |s| c * s.powf(-beta))
            .with_first(move |s| -mean(s))
            .with_second(move |s| e * mean(s) / s);
        (
            FamilySpec::new("tweedie", cum, variance).with_formulas(format!("{c}·s^-{beta}"), vtext),
            "compound Poisson sum of gamma variables; ℓ → 0 as s → ∞ so the measure carries no atom normalisation. \
             Dual is the positive stable family with power p/(p-1).",
        )
    };
    let family = family
        .param("p", p)
        .param("lambda", lambda)
        .with_mean_inverse(move |m| lp / ((p - 1.0) * m.powf(p - 1.0)));
    Ok(CatalogEntry::new(family, DualStatus::DualRegistered, notes)
        .with_dual(dual)
        .with_dual_levy(move || {
            LevyRepresentation::new("tweedie_dual", Support::Positive, move |x: f64| lp * x.powf(p - 1.0) / gamma(p))
        }))
}

fn gamma_entry(lambda: f64) -> CatalogEntry {
    let cum = Cumulant::new(half_line(), move |s| -lambda * s.ln())
        .with_first(move |s| -lambda / s)
        .with_second(move |s| lambda / (s * s));
    let family = FamilySpec::new("gamma", cum, VarianceFunction::new(half_line(), move |m| m * m / lambda))
        .param("lambda", lambda)
        .with_mean_inverse(move |m| lambda / m)
        .with_formulas(format!("-{lambda}·log s"), format!("m²/{lambda}"));
    CatalogEntry::new(family, DualStatus::SelfDual, "generated by x^{λ-1}/Γ(λ) dx, so B(s) = s^{-λ}.")
        .self_dual()
        .with_levy("frullani")
        .with_dual_levy(move || LevyRepresentation::new("gamma", Support::Positive, move |x| lambda * x))
}

fn landau_cumulant() -> Cumulant {
    Cumulant::new(half_line(), |m| xlogx(m) - m).with_first(|m| m.ln()).with_second(|m| 1.0 / m)
}

fn poisson_family() -> FamilySpec {
    let cum = Cumulant::new(Interval::real_line(), |s| (-s).exp())
        .with_first(|s| -(-s).exp())
        .with_second(|s| (-s).exp());
    FamilySpec::new("poisson", cum, VarianceFunction::new(half_line(), |m| m))
        .with_mean_inverse(|m| -m.ln())
        .with_formulas("e^{-s}", "m")
}

fn landau_family() -> FamilySpec {
    FamilySpec::new("landau", landau_cumulant(), VarianceFunction::new(Interval::real_line(), f64::exp))
        .with_mean_inverse(|m| (-m).exp())
        .with_formulas("s log s - s", "e^m")
}

fn poisson() -> CatalogEntry {
    CatalogEntry::new(
        poisson_family(),
        DualStatus::DualRegistered,
        "generated by Σ δ_n/n!, so B(s) = exp(e^{-s}). Dual is the Landau law with ℓ*(m) = m log m - m.",
    )
    .with_dual(landau_family())
    .with_levy("landau")
    .with_dual_levy(|| LevyRepresentation::new("landau", Support::Positive, |_| 1.0))
}

fn landau() -> CatalogEntry {
    CatalogEntry::new(
        landau_family(),
        DualStatus::DualRegistered,
        "the Landau law, B(s) = e^{-s} s^s; infinitely divisible with ν = x^{-2} dx on (0,∞). Dual is Poisson with ℓ* = e^{-m}.",
    )
    .with_dual(poisson_family())
    .with_levy("landau")
}

fn bernoulli() -> CatalogEntry {
    let cum = Cumulant::new(Interval::real_line(), |s: f64| (-s).exp().ln_1p())
        .with_first(|s: f64| -1.0 / (1.0 + s.exp()))
        .with_second(|s: f64| 0.25 / (0.5 * s).cosh().powi(2));
    let family = FamilySpec::new("bernoulli", cum, VarianceFunction::new(Interval::open(0.0, 1.0), |m| m * (1.0 - m)))
        .with_mean_inverse(|m| ((1.0 - m) / m).ln())
        .with_divisibility(Divisibility::Lattice(1.0))
        .with_formulas("log(1 + e^{-s})", "m - m²");
    let dual_cum = Cumulant::new(Interval::open(0.0, 1.0), |m| xlogx(m) + xlogx(1.0 - m))
        .with_first(|m: f64| (m / (1.0 - m)).ln())
        .with_second(|m| 1.0 / (m * (1.0 - m)));
    let dual = FamilySpec::new(
        "bernoulli_dual",
        dual_cum,
        VarianceFunction::new(Interval::real_line(), |x: f64| 4.0 * (0.5 * x).cosh().powi(2)),
    )
    .with_mean_inverse(|x: f64| 1.0 / (1.0 + x.exp()))
    .with_formulas("m log m + (1-m) log(1-m)", "4 cosh²(x/2)");
    CatalogEntry::new(
        family,
        DualStatus::DualRegistered,
        "generated by δ_0 + δ_1. The dual is the convolution of the Landau law with a reflected tilted Landau law.",
    )
    .with_dual(dual)
    .with_dual_levy(|| {
        LevyRepresentation::new("bernoulli_dual", Support::Real, |x: f64| if x > 0.0 { 1.0 } else { x.exp() })
    })
}

fn symmetric_bernoulli() -> CatalogEntry {
    let cum = Cumulant::new(Interval::real_line(), |s: f64| {
        let a = s.abs();
        a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
    })
    .with_first(|s: f64| s.tanh())
    .with_second(|s: f64| 1.0 / s.cosh().powi(2));
    let family = FamilySpec::new(
        "symmetric_bernoulli",
        cum,
        VarianceFunction::new(Interval::open(-1.0, 1.0), |m| 1.0 - m * m),
    )
    .with_mean_inverse(|m: f64| -m.atanh())
    .with_divisibility(Divisibility::Lattice(1.0))
    .with_formulas("log cosh s", "1 - m²");
    let dual_cum = Cumulant::new(Interval::open(-1.0, 1.0), |m| 0.5 * (xlogx(1.0 + m) + xlogx(1.0 - m)))
        .with_first(|m: f64| m.atanh())
        .with_second(|m| 1.0 / (1.0 - m * m));
    let dual = FamilySpec::new(
        "symmetric_bernoulli_dual",
        dual_cum,
        VarianceFunction::new(Interval::real_line(), |x: f64| x.cosh().powi(2)),
    )
    .with_mean_inverse(|x: f64| -x.tanh())
    .with_formulas("½[(1+m) log(1+m) + (1-m) log(1-m)]", "cosh² x");
    CatalogEntry::new(
        family,
        DualStatus::DualRegistered,
        "½(δ_{-1} + δ_1). Its dual has ℓ*'' = 1/(1-m²); the transform (1-m)^{1-m}(1+m)^{1+m} is the square of \
         the dual, i.e. the dual of the convolution square.",
    )
    .with_dual(dual)
    .with_levy("sym_binomial")
    .with_dual_levy(|| LevyRepresentation::new("symmetric_bernoulli_dual", Support::Real, |x: f64| 0.5 * (-x.abs()).exp()))
}

fn binomial(n: f64) -> Result<CatalogEntry> {
    if !(n >= 1.0 && n.fract() == 0.0 && n.is_finite()) {
        return Err(Error::Param(format!("binomial needs an integer N >= 1, got {n}")));
    }
    let cum = Cumulant::new(Interval::real_line(), move |s: f64| n * (-s).exp().ln_1p())
        .with_first(move |s: f64| -n / (1.0 + s.exp()))
        .with_second(move |s: f64| 0.25 * n / (0.5 * s).cosh().powi(2));
    let family = FamilySpec::new(
        "binomial",
        cum,
        VarianceFunction::new(Interval::open(0.0, n), move |m| m - m * m / n),
    )
    .param("N", n)
    .with_mean_inverse(move |m| ((n - m) / m).ln())
    .with_divisibility(Divisibility::Lattice(1.0 / n))
    .with_formulas(format!("{n}·log(1 + e^{{-s}})"), format!("m - m²/{n}"));
    let dual_cum = Cumulant::new(Interval::open(0.0, n), move |m| xlogx(m) + xlogx(n - m))
        .with_first(move |m: f64| (m / (n - m)).ln())
        .with_second(move |m| 1.0 / m + 1.0 / (n - m));
    let dual = FamilySpec::new(
        "binomial_dual",
        dual_cum,
        VarianceFunction::new(Interval::real_line(), move |x: f64| 4.0 / n * (0.5 * x).cosh().powi(2)),
    )
    .param("N", n)
    .with_mean_inverse(move |x: f64| n / (1.0 + x.exp()))
    .with_formulas("m log m + (N-m) log(N-m)", format!("(4/{n}) cosh²(x/2)"));
    Ok(CatalogEntry::new(
        family,
        DualStatus::DualRegistered,
        "Bernoulli rescaled by N; the dual follows from the rescaling rule ℓ ↦ Nℓ*(m/N), dropping the constant -N log N.",
    )
    .with_dual(dual)
    .with_dual_levy(move || {
        LevyRepresentation::new("binomial_dual", Support::Real, move |x: f64| if x > 0.0 { 1.0 } else { (n * x).exp() })
    }))
}

fn negative_binomial() -> CatalogEntry {
    let cum = Cumulant::new(half_line(), |s: f64| -(-(-s).exp_m1()).ln())
        .with_first(|s: f64| -1.0 / s.exp_m1())
        .with_second(|s: f64| 0.25 / (0.5 * s).sinh().powi(2));
    let family = FamilySpec::new("negative_binomial", cum, VarianceFunction::new(half_line(), |m| m + m * m))
        .with_mean_inverse(|m: f64| (1.0 / m).ln_1p())
        .with_formulas("-log(1 - e^{-s})", "m + m²");
    let dual_cum = Cumulant::new(half_line(), |m| xlogx(m) - xlogx(1.0 + m))
        .with_first(|m: f64| -(1.0 / m).ln_1p())
        .with_second(|m| 1.0 / (m * (1.0 + m)));
    let dual = FamilySpec::new(
        "negative_binomial_dual",
        dual_cum,
        VarianceFunction::new(half_line(), |x: f64| 4.0 * (0.5 * x).sinh().powi(2)),
    )
    .with_mean_inverse(|x: f64| 1.0 / x.exp_m1())
    .with_formulas("m log m - (1+m) log(1+m)", "4 sinh²(x/2)");
    CatalogEntry::new(
        family,
        DualStatus::DualRegistered,
        "generated by Σ_{n≥0} δ_n. The dual B*(m) = m^m (1+m)^{-1-m} is a type 1 infinitely divisible probability.",
    )
    .with_dual(dual)
    .with_levy("negbin_dual")
    .with_dual_levy(|| LevyRepresentation::new("negbin_dual", Support::Positive, |x: f64| -(-x).exp_m1()))
}

fn gaussian_family(name: &str, var: f64) -> FamilySpec {
    let cum = Cumulant::new(Interval::real_line(), move |s| 0.5 * var * s * s)
        .with_first(move |s| var * s)
        .with_second(move |_| var);
    FamilySpec::new(name, cum, VarianceFunction::new(Interval::real_line(), move |_| var))
        .with_mean_inverse(move |m| -m / var)
        .with_formulas(format!("{var}·s²/2"), format!("{var}"))
}

fn gaussian(sigma: f64) -> CatalogEntry {
    let var = sigma * sigma;
    let family = gaussian_family("gaussian", var).param("sigma", sigma);
    let entry = CatalogEntry::new(family, DualStatus::DualRegistered, "N(0,σ²); the dual is N(0,σ^{-2}).")
        .with_dual_levy(move || LevyRepresentation::gaussian("gaussian_dual", 1.0 / var));
    if var == 1.0 {
        entry.self_dual()
    } else {
        entry.with_dual(gaussian_family("gaussian_dual", 1.0 / var).param("sigma", 1.0 / sigma))
    }
}

fn hyperbolic() -> CatalogEntry {
    let cum = Cumulant::new(Interval::open(-FRAC_PI_2, FRAC_PI_2), |s: f64| -s.cos().ln())
        .with_first(|s: f64| s.tan())
        .with_second(|s: f64| 1.0 / s.cos().powi(2));
    let family = FamilySpec::new("hyperbolic", cum, VarianceFunction::new(Interval::real_line(), |m| 1.0 + m * m))
        .with_mean_inverse(|m: f64| -m.atan())
        .with_formulas("-log cos s", "1 + m²");
    CatalogEntry::new(
        family,
        DualStatus::NoDualWithCertificate,
        "density 1/(2 cosh(πx/2)). A dual would have B*(m) = e^{m arctan m}/√(1+m²), whose order 8 Taylor coefficient is negative.",
    )
    .with_certificate(|| laplace_test_taylor_moments("h2", &candidates::h2, &TaylorSpec::for_singularity(1.0, 10)))
}

fn bilateral_exponential() -> CatalogEntry {
    let cum = Cumulant::new(Interval::open(-1.0, 1.0), |s: f64| -(1.0 - s * s).ln())
        .with_first(|s| 2.0 * s / (1.0 - s * s))
        .with_second(|s| 2.0 * (1.0 + s * s) / (1.0 - s * s).powi(2));
    let family = FamilySpec::new(
        "bilateral_exponential",
        cum,
        VarianceFunction::new(Interval::real_line(), |m: f64| {
            let r = m.hypot(1.0);
            r * (r + 1.0)
        }),
    )
    .with_mean_inverse(|m: f64| {
        // s = (1 - √(1+m²))/m written without cancellation
        -m / (1.0 + m.hypot(1.0))
    })
    .with_formulas("-log(1 - s²)", "m² + 1 + √(1+m²)");
    CatalogEntry::new(
        family,
        DualStatus::NoDualWithCertificate,
        "½ e^{-|x|} dx. A dual would have B*(m) = 2e^{r-1}/(1+r), r = √(1+m²), whose order 4 Taylor coefficient vanishes.",
    )
    .with_certificate(|| {
        laplace_test_taylor_moments(
            "bilateral_exponential_dual_candidate",
            &candidates::bilateral_exponential_rate_exp,
            &TaylorSpec::for_singularity(1.0, 8),
        )
    })
}

fn normal_inverse_gaussian() -> CatalogEntry {
    let cum = Cumulant::new(Interval::open(-1.0, 1.0), |s: f64| 1.0 - (1.0 - s * s).sqrt())
        .with_first(|s: f64| s / (1.0 - s * s).sqrt())
        .with_second(|s: f64| (1.0 - s * s).powf(-1.5));
    let family = FamilySpec::new(
        "normal_inverse_gaussian",
        cum,
        VarianceFunction::new(Interval::real_line(), |m: f64| (1.0 + m * m).powf(1.5)),
    )
    .with_mean_inverse(|m: f64| -m / m.hypot(1.0))
    .with_formulas("1 - √(1 - s²)", "(1 + m²)^{3/2}");
    CatalogEntry::new(
        family,
        DualStatus::NoDualWithCertificate,
        "symmetric normal inverse Gaussian law. A dual would have B*(m) = e^{√(1+m²)-1}, whose order 4 Taylor coefficient vanishes.",
    )
    .with_certificate(|| {
        laplace_test_taylor_moments("h3", &candidates::h3, &TaylorSpec::for_singularity(1.0, 8))
    })
}

/// Builds a base family from a closed-form dual by Legendre conjugation.
fn cubic_entry(
    name: &str,
    dual: FamilySpec,
    base_domain: Interval,
    v: impl Fn(f64) -> f64 + Send + Sync + 'static,
    vtext: String,
    notes: String,
) -> CatalogEntry {
    let phi_src = dual.cumulant.clone();
    let phi = move |m: f64| phi_src.first(m).unwrap_or(f64::NAN);
    let base = legendre_base(&dual.cumulant, base_domain);
    let family = FamilySpec::new(name, base, VarianceFunction::new(half_line(), v))
        .with_mean_inverse(move |m| -phi(m))
        .with_formulas("-ℓ*(m) - s m with -ℓ*'(m) = s", vtext);
    let mut family = family;
    family.params = dual.params.clone();
    CatalogEntry::new(family, DualStatus::DualRegistered, notes).with_dual(dual)
}

fn abel() -> CatalogEntry {
    let cum = Cumulant::new(half_line(), |m: f64| xlogx(m) - m * m.ln_1p())
        .with_first(|m: f64| -(1.0 / m).ln_1p() + 1.0 / (1.0 + m))
        .with_second(|m| 1.0 / (m * (1.0 + m).powi(2)));
    let dual = FamilySpec::new("abel_dual", cum, VarianceFunction::implicit(half_line()))
        .with_formulas("m log m - m log(1+m)", "implicit");
    cubic_entry(
        "abel",
        dual,
        half_line(),
        |m| m * (1.0 + m).powi(2),
        "m(1+m)²".into(),
        "Abel family on the non-negative integers; only the dual transform m^m/(1+m)^m is explicit, and ℓ is \
         recovered by Legendre conjugation with ℓ → 0 as s → ∞ pinned by ℓ*(m) → 0 at m → 0."
            .into(),
    )
    .with_levy("abel_dual")
    .with_dual_levy(|| {
        LevyRepresentation::new("abel_dual", Support::Positive, |x: f64| x * x * (exprel(-x) - crate::numerics::exprel2(-x)))
    })
}

fn takacs(r: f64) -> Result<CatalogEntry> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::Param(format!("takacs needs R > 1, got {r}")));
    }
    let k = 1.0 / (r - 1.0);
    let cum = Cumulant::new(half_line(), move |m| xlogx(m) + k * (xlogx(m + 1.0) - xlogx(r * m + 1.0)))
        .with_first(move |m: f64| m.ln() + k * ((m + 1.0).ln() - r * (r * m + 1.0).ln()))
        .with_second(move |m| 1.0 / (m * (1.0 + m) * (1.0 + r * m)));
    let dual = FamilySpec::new("takacs_dual", cum, VarianceFunction::implicit(Interval::open(r * r.ln() * k, f64::INFINITY)))
        .param("R", r)
        .with_formulas("m log m + [(m+1) log(m+1) - (Rm+1) log(Rm+1)]/(R-1)", "implicit");
    let base_lo = r * r.ln() / (r - 1.0);
    Ok(cubic_entry(
        "takacs",
        dual,
        Interval::open(base_lo, f64::INFINITY),
        move |m| m * (1.0 + m) * (1.0 + r * m),
        format!("m(1+m)(1+{r}m)"),
        "Takács family on the non-negative integers. With this normalisation of the dual the base domain is \
         (R log R/(R-1), ∞); the Lévy measure of the dual has total mass log R/(R-1)."
            .into(),
    )
    .with_levy("takacs_dual")
    .with_dual_levy(move || LevyRepresentation::new("takacs_dual", Support::Positive, move |x| x * x * takacs_f(r, x))))
}

fn kendall_ressel() -> CatalogEntry {
    let cum = Cumulant::new(half_line(), |m: f64| (m + 1.0) * (1.0 / m).ln_1p())
        .with_first(|m: f64| (1.0 / m).ln_1p() - 1.0 / m)
        .with_second(|m| 1.0 / (m * m * (1.0 + m)));
    let dual = FamilySpec::new("kendall_ressel_dual", cum, VarianceFunction::implicit(half_line()))
        .with_formulas("(m+1) log((m+1)/m)", "implicit");
    cubic_entry(
        "kendall_ressel",
        dual,
        half_line(),
        |m| m * m * (1.0 + m),
        "m²(1+m)".into(),
        "Kendall–Ressel family. The dual transform ((m+1)/m)^{m+1} is that of an unbounded measure; tilting by 1 \
         and normalising gives the probability ¼((m+2)/(m+1))^{m+2}, whose Lévy density is e^{-x}(x-1+e^{-x})/x²."
            .into(),
    )
    .with_levy("kendall_ressel_dual")
    .with_dual_levy(|| LevyRepresentation::new("kendall_ressel_dual", Support::Positive, |x: f64| x - 1.0 + (-x).exp()))
}

/// `¼((m+2)/(m+1))^{m+2}`: the Kendall–Ressel dual as a probability.
pub fn kendall_ressel_dual_probability(m: f64) -> Result<f64> {
    if !(m > -1.0) {
        return Err(crate::error::domain(format!("need m > -1, got {m}")));
    }
    Ok(0.25 * ((m + 2.0) / (m + 1.0)).powf(m + 2.0))
}

fn inverse_gaussian(lambda: f64) -> CatalogEntry {
    let cum = Cumulant::new(half_line(), move |s: f64| -lambda * (2.0 * s).sqrt())
        .with_first(move |s: f64| -lambda / (2.0 * s).sqrt())
        .with_second(move |s: f64| lambda * (2.0 * s).powf(-1.5));
    let l2 = lambda * lambda;
    let family = FamilySpec::new("inverse_gaussian", cum, VarianceFunction::new(half_line(), move |m| m.powi(3) / l2))
        .param("lambda", lambda)
        .with_mean_inverse(move |m| l2 / (2.0 * m * m))
        .with_formulas(format!("-{lambda}·√(2s)"), format!("m³/{l2}"));
    let dual_cum = Cumulant::new(half_line(), move |m| l2 / (2.0 * m))
        .with_first(move |m| -l2 / (2.0 * m * m))
        .with_second(move |m| l2 / m.powi(3));
    let dual = FamilySpec::new(
        "inverse_gaussian_dual",
        dual_cum,
        VarianceFunction::new(half_line(), move |x: f64| 2f64.powf(1.5) * x.powf(1.5) / lambda),
    )
    .param("lambda", lambda)
    .with_mean_inverse(move |x: f64| lambda / (2.0 * x).sqrt())
    .with_formulas(format!("{l2}/(2m)"), format!("2^{{3/2}} x^{{3/2}}/{lambda}"));
    CatalogEntry::new(
        family,
        DualStatus::DualRegistered,
        "first passage time of Brownian motion, B(s) = e^{-λ√(2s)}; the power-variance pair with p = 3, q = 3/2.",
    )
    .with_dual(dual)
    .with_dual_levy(move || LevyRepresentation::new("inverse_gaussian_dual", Support::Positive, move |x| 0.5 * l2 * x * x))
}

fn strict_arcsine() -> CatalogEntry {
    let cum = Cumulant::new(half_line(), |m: f64| xlogx(m) - 0.5 * m * m.mul_add(m, 1.0).ln() - m.atan())
        .with_first(|m: f64| -0.5 * (1.0 / (m * m)).ln_1p())
        .with_second(|m| 1.0 / (m * (1.0 + m * m)));
    let dual = FamilySpec::new("strict_arcsine_dual", cum, VarianceFunction::implicit(half_line()))
        .with_formulas("m log(m/√(1+m²)) - arctan m", "implicit");
    cubic_entry(
        "strict_arcsine",
        dual,
        half_line(),
        |m| m * (1.0 + m * m),
        "m(1+m²)".into(),
        "strict arcsine family. The dual B*(m) = (m/√(1+m²))^m e^{-arctan m} has Lévy density (1 - cos x)/x² and type 0."
            .into(),
    )
    .with_dual_levy(|| LevyRepresentation::new("strict_arcsine_dual", Support::Positive, |x: f64| 1.0 - x.cos()))
}

/// Closed-form dual cumulant of the large arcsine family, normalised so that
/// `ℓ*(0+) = 0` and `ℓ*'(∞) = 0`.
pub fn large_arcsine_dual_cumulant(a: f64, s: f64) -> Result<f64> {
    check_arcsine_a(a)?;
    if !(s > 0.0) {
        return Err(crate::error::domain(format!("large arcsine dual needs s > 0, got {s}")));
    }
    Ok(large_arcsine_dual_value(a, s))
}

fn check_arcsine_a(a: f64) -> Result<()> {
    if a > 0.0 && a < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Param(format!("large arcsine needs 0 < a < π/2, got {a}")))
    }
}

fn large_arcsine_dual_value(a: f64, s: f64) -> f64 {
    let (sn, c) = a.sin_cos();
    let u = (s + c) / sn;
    let at = u.atan();
    xlogx(s) - s - 0.5 * (s + c) * (1.0 + 2.0 * c * s + s * s).ln() + (s + c) - sn * at - c * u * at
        + 0.5 * c * u.mul_add(u, 1.0).ln()
        + FRAC_PI_2 * c / sn * s
        + (-c + (FRAC_PI_2 - a) / sn + c * sn.ln())
}

fn large_arcsine_dual_first(a: f64, s: f64) -> f64 {
    let (sn, c) = a.sin_cos();
    let u = (s + c) / sn;
    s.ln() - 0.5 * (1.0 + 2.0 * c * s + s * s).ln() - c / sn * u.atan() + FRAC_PI_2 * c / sn
}

fn large_arcsine(a: f64) -> Result<CatalogEntry> {
    check_arcsine_a(a)?;
    let c = a.cos();
    let cum = Cumulant::new(half_line(), move |m| large_arcsine_dual_value(a, m))
        .with_first(move |m| large_arcsine_dual_first(a, m))
        .with_second(move |m| 1.0 / (m * (1.0 + 2.0 * c * m + m * m)));
    let dual = FamilySpec::new("large_arcsine_dual", cum, VarianceFunction::implicit(half_line()))
        .param("a", a)
        .with_formulas(
            "m log m - m - ½(m+cos a) log(1+2m cos a+m²) + (m+cos a) - (sin a + u cos a) arctan u \
             + ½ cos a log(1+u²) + (π/2) cot a·m + K, u = (m+cos a)/sin a",
            "implicit",
        );
    Ok(cubic_entry(
        "large_arcsine",
        dual,
        half_line(),
        move |m| m * (1.0 + 2.0 * c * m + m * m),
        format!("m(1 + 2m cos {a} + m²)"),
        "large arcsine family, 0 < a < π/2. Substituting a = 0 into V gives m(1+m)² (Abel) and a = π/2 gives \
         m(1+m²) (strict arcsine). The dual constant K makes ℓ*(0+) = 0; the linear term makes ℓ*'(∞) = 0."
            .into(),
    )
    .with_dual_levy(move || {
        LevyRepresentation::new("large_arcsine_dual", Support::Positive, move |x| {
            x * x * arcsine_levy_density(ArcsineKind::Large { a }, x).unwrap_or(f64::NAN)
        })
    }))
}

fn dilog_family(name: &str) -> FamilySpec {
    let cum = Cumulant::new(half_line(), |s: f64| -PI * PI / 6.0 + li2((-s).exp()))
        .with_first(|s: f64| (-(-s).exp()).ln_1p())
        .with_second(|s: f64| 1.0 / s.exp_m1());
    FamilySpec::new(name, cum, VarianceFunction::new(half_line(), |m: f64| m.exp_m1()))
        .with_mean_inverse(|m: f64| -(-(-m).exp()).ln_1p())
        .with_formulas("-π²/6 + Li₂(e^{-s})", "e^m - 1")
}

fn dilogarithm() -> CatalogEntry {
    CatalogEntry::new(
        dilog_family("dilogarithm"),
        DualStatus::SelfDual,
        "compound Poisson law on ℕ with Lévy measure Σ δ_n/n²; ℓ(0) = 0. Mean and parameter satisfy e^{-s} + e^{-m} = 1.",
    )
    .self_dual()
}

fn sinh_family() -> CatalogEntry {
    let cum = Cumulant::new(half_line(), |s: f64| {
        let z = (-s).exp();
        -PI * PI / 4.0 + 2.0 * li2(z) - 0.5 * li2(z * z)
    })
    .with_first(|s: f64| -2.0 * (-s).exp().atanh())
    .with_second(|s: f64| 1.0 / s.sinh());
    let family = FamilySpec::new("sinh_family", cum, VarianceFunction::new(half_line(), f64::sinh))
        .with_mean_inverse(|m: f64| -(0.5 * m).tanh().ln())
        .with_formulas("-π²/4 + 2 Li₂(e^{-s}) - ½ Li₂(e^{-2s})", "sinh m");
    CatalogEntry::new(
        family,
        DualStatus::SelfDual,
        "compound Poisson law on odd jumps with weights 1/(2n-1)²; ℓ(0) = 0. Mean and parameter satisfy \
         e^{-m} + e^{-s} + e^{-s-m} = 1.",
    )
    .self_dual()
}

fn eta() -> CatalogEntry {
    let cum = Cumulant::new(half_line(), |s: f64| 0.5 * s * s - PI * PI / 6.0 + li2((-s).exp()))
        .with_first(|s: f64| s + (-(-s).exp()).ln_1p())
        .with_second(|s: f64| 1.0 + 1.0 / s.exp_m1());
    let family = FamilySpec::new("eta", cum, VarianceFunction::new(Interval::real_line(), |m: f64| m.exp() + 1.0))
        .with_mean_inverse(|m: f64| (-m).exp().ln_1p())
        .with_formulas("s²/2 - π²/6 + Li₂(e^{-s})", "e^m + 1");
    CatalogEntry::new(
        family,
        DualStatus::UnknownClaimedNoDual,
        "N(0,1) convolved with the dilogarithm law. Absence of a dual is claimed in the literature without proof.",
    )
}

/// `ℓ(s) = Li₂(re^{-s}) + Li₂(re^{s}) - 2 Li₂(r)` for the difference of two
/// independent tilted dilogarithm variables.
fn sigma_r(r: f64) -> Result<CatalogEntry> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Param(format!("sigma_r needs 0 < r < 1, got {r}")));
    }
    let edge = -r.ln();
    let base = 2.0 * li2(r);
    let cum = Cumulant::new(Interval::open(-edge, edge), move |s: f64| li2(r * (-s).exp()) + li2(r * s.exp()) - base)
        .with_first(move |s: f64| (-r * (-s).exp()).ln_1p() - (-r * s.exp()).ln_1p())
        .with_second(move |s: f64| {
            let (x, y) = (r * (-s).exp(), r * s.exp());
            x / (1.0 - x) + y / (1.0 - y)
        });
    let r2 = r * r;
    let variance = VarianceFunction::new(Interval::real_line(), move |m: f64| {
        let a2 = (0.5 * m).sinh().powi(2);
        let (p, q) = ((r2 + a2).sqrt(), (1.0 + a2).sqrt());
        2.0 / (1.0 - r2) * p * (q + p)
    });
    let family = FamilySpec::new("sigma_r", cum, variance)
        .param("r", r)
        .with_mean_inverse(move |m: f64| {
            // sinh(m/2) = r sinh(m/2 - s)
            0.5 * m - ((0.5 * m).sinh() / r).asinh()
        })
        .with_formulas(
            format!("Li₂({r}e^{{-s}}) + Li₂({r}e^{{s}}) - 2Li₂({r})"),
            format!("2/(1-{r}²)·√({r}²+a²)(√(1+a²)+√({r}²+a²)), a = sinh(m/2)"),
        );
    Ok(CatalogEntry::new(
        family,
        DualStatus::Unknown,
        "law of Y - Y' with Y, Y' independent tilted dilogarithm variables. The dual involves elliptic integrals.",
    ))
}

fn vinogradov_paris() -> CatalogEntry {
    let dom = Interval::open(1.0, f64::INFINITY);
    let root = |s: f64| ((s - 1.0) * (s + 1.0)).sqrt();
    let cum = Cumulant::new(dom, move |s: f64| 0.5 - 0.5 * s * s + 0.5 * (s * root(s) - s.acosh()))
        .with_first(move |s: f64| -1.0 / (s + root(s)))
        .with_second(move |s: f64| s / root(s) - 1.0);
    let family = FamilySpec::new(
        "vinogradov_paris",
        cum,
        VarianceFunction::new(Interval::open(0.0, 1.0), |m| 2.0 * m * m / (1.0 - m * m)),
    )
    .non_steep()
    .with_mean_inverse(|m| 0.5 * (m + 1.0 / m))
    .with_formulas("½ - s²/2 + ½(s√(s²-1) - arccosh s)", "2m²/(1-m²)");
    CatalogEntry::new(
        family,
        DualStatus::NoDualWithCertificate,
        "non-steep family on (0,∞) with means (0,1); ℓ(1) = 0. A dual would have B*(m) = e^{-m²/4}/√m, \
         which is log-concave for m > 1.",
    )
    .with_certificate(|| {
        Ok(laplace_test_log_convexity(
            "vinogradov_paris_dual_candidate",
            &candidates::vinogradov_paris,
            &Interval::open(1.0, 5.0),
        ))
    })
}
