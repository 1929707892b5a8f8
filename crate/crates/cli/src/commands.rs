use std::collections::BTreeMap;
use std::str::FromStr;

use nefdual::catalog::{self, CatalogEntry};
use nefdual::dilog::{self, SelfDualFamily};
use nefdual::duality::{
    candidates, check_duality, dual_cumulant_from_variance, laplace_test_taylor_moments, Anchor, TestOutcome,
};
use nefdual::largedev::{self, TailMethod};
use nefdual::levy::{self, Identity};
use nefdual::multivar;
use nefdual::numerics::{Interval, TaylorSpec};
use nefdual::varexpr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::report::{CertificateRecord, CheckResult, Config, Report, Table};
use crate::{CatalogCmd, Cli, Command, DilogCmd, DualCmd, LdpCmd, LevyCmd, MultivarCmd};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] nefdual::Error),
}

impl CliError {
    /// 2 for bad input, 1 for failures during the computation.
    pub fn exit_code(&self) -> u8 {
        use nefdual::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(E::Syntax { .. } | E::Param(_) | E::UnknownFamily(_) | E::Domain(_) | E::Jorgensen { .. }) => 2,
            CliError::Lib(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub report: Report,
    pub table: Option<Table>,
    pub lines: Vec<String>,
}

impl Outcome {
    fn new(report: Report) -> Self {
        Self { report, table: None, lines: Vec::new() }
    }
}

/// Seed used by the commands that sample points when no `--seed` is given.
const DEFAULT_POINT_SEED: u64 = 0;

pub fn dispatch(cli: &Cli, command: Vec<String>, mut config: Config) -> Result<Outcome> {
    let tol = cli.global.tol;
    let seed = cli.global.seed;
    match &cli.command {
        Command::Catalog(CatalogCmd::List) => catalog_list(Report::new(command, config)),
        Command::Catalog(CatalogCmd::Show { name, params }) => {
            config.params = to_map(params);
            catalog_show(name, Report::new(command, config))
        }
        Command::Dual(DualCmd::Check { name, grid, params, order, shape }) => {
            config.params = to_map(params);
            config.grid = Some(*grid);
            config.tolerance = Some(tol.unwrap_or(1e-8));
            if name == "wishart" {
                config.seed = Some(seed.unwrap_or(DEFAULT_POINT_SEED));
                config.params.insert("order".into(), *order as f64);
                config.params.insert("shape".into(), *shape);
                wishart(*order, *shape, *grid, Report::new(command, config))
            } else {
                dual_check(name, *grid, Report::new(command, config))
            }
        }
        Command::Dual(DualCmd::Derive { variance, domain, anchor, points }) => {
            config.tolerance = Some(tol.unwrap_or(1e-6));
            config.grid = Some(*points);
            dual_derive(variance, domain, anchor.as_deref(), *points, Report::new(command, config))
        }
        Command::Dual(DualCmd::Certify { case, params }) => {
            config.params = to_map(params);
            certify(case, Report::new(command, config))
        }
        Command::Levy(LevyCmd::Verify { id, r, gamma, grid }) => {
            config.tolerance = Some(tol.unwrap_or(1e-8));
            config.grid = Some(*grid);
            config.params.insert("R".into(), *r);
            config.params.insert("gamma".into(), *gamma);
            levy_verify(id, *r, *gamma, *grid, Report::new(command, config))
        }
        Command::Ldp(LdpCmd::Rate { name, m0, m, params }) => {
            config.params = to_map(params);
            config.tolerance = Some(tol.unwrap_or(1e-8));
            ldp_rate(name, *m0, *m, Report::new(command, config))
        }
        Command::Ldp(LdpCmd::Binom { m, n_list }) => ldp_binom(*m, n_list, Report::new(command, config)),
        Command::Ldp(LdpCmd::Mc { name, m, n, trials, law_param }) => {
            let seed = seed.ok_or_else(|| CliError::Usage("`ldp mc` requires --seed".into()))?;
            if let Some(p) = law_param {
                config.params.insert("law_param".into(), *p);
            }
            ldp_mc(name, *m, *n, *trials, *law_param, seed, tol, Report::new(command, config))
        }
        Command::Dilog(cmd) => dilog_cmd(cmd, tol, seed, command, config),
        Command::Multivar(cmd) => {
            config.seed = Some(seed.unwrap_or(DEFAULT_POINT_SEED));
            match cmd {
                MultivarCmd::Wishart { order, shape, count } => {
                    config.tolerance = Some(tol.unwrap_or(1e-8));
                    config.grid = Some(*count);
                    config.params.insert("order".into(), *order as f64);
                    config.params.insert("shape".into(), *shape);
                    wishart(*order, *shape, *count, Report::new(command, config))
                }
                MultivarCmd::Multinomial { n, count } => {
                    config.tolerance = Some(tol.unwrap_or(1e-7));
                    config.grid = Some(*count);
                    config.params.insert("n".into(), *n as f64);
                    multinomial(*n, *count, Report::new(command, config))
                }
                MultivarCmd::Nmga0 { n, s, count } => {
                    config.tolerance = Some(tol.unwrap_or(1e-7));
                    config.grid = Some(*count);
                    config.params.insert("n".into(), *n as f64);
                    nmga0(*n, s.as_deref(), *count, Report::new(command, config))
                }
            }
        }
    }
}

fn to_map(params: &[(String, f64)]) -> BTreeMap<String, f64> {
    params.iter().cloned().collect()
}

fn entry(name: &str, params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    Ok(catalog::get(name, params)?)
}

fn tol_of(report: &Report) -> f64 {
    report.config.tolerance.expect("tolerance set by dispatch")
}

fn point_rng(report: &Report) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(report.config.seed.unwrap_or(DEFAULT_POINT_SEED))
}

fn residual_table(points: &[f64], residuals: &[f64]) -> Table {
    let mut t = Table::new(&["point", "residual"]);
    for (p, r) in points.iter().zip(residuals) {
        t.row(vec![(*p).into(), (*r).into()]);
    }
    t
}

// ---- catalog

fn catalog_list(mut report: Report) -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut items = Vec::new();
    let mut table = Table::new(&["name", "dual_status", "dual"]);
    for name in catalog::list() {
        let s = catalog::get_default(name)?.summary();
        let status = serde_json::to_value(s.dual_status).unwrap_or_default();
        let status = status.as_str().unwrap_or_default().to_string();
        let dual = s.dual.as_ref().map(|d| d.name.clone()).unwrap_or_default();
        lines.push(format!("{name:<26} {status:<28} {dual}"));
        table.row(vec![name.into(), status.as_str().into(), dual.as_str().into()]);
        items.push(s);
    }
    report.data = serde_json::to_value(items).unwrap_or_default();
    Ok(Outcome { report, table: Some(table), lines })
}

fn catalog_show(name: &str, mut report: Report) -> Result<Outcome> {
    let s = entry(name, &report.config.params)?.summary();
    let pretty = serde_json::to_string_pretty(&s).unwrap_or_default();
    report.data = serde_json::to_value(&s).unwrap_or_default();
    Ok(Outcome { report, table: None, lines: vec![pretty] })
}

// ---- dual

fn dual_check(name: &str, grid: usize, mut report: Report) -> Result<Outcome> {
    if grid < 2 {
        return Err(CliError::Usage("--grid needs at least 2 points".into()));
    }
    let e = entry(name, &report.config.params)?;
    let Some(dual) = &e.dual else {
        report.push(CheckResult::flag("dual_registered", 0.0, false));
        let status = serde_json::to_value(e.dual_status).unwrap_or_default();
        return Ok(Outcome {
            lines: vec![format!("{name} has no registered dual (status {status})")],
            ..Outcome::new(report)
        });
    };
    let points = e.family.cumulant.domain.grid(grid);
    let r = check_duality(&e.family, dual, &points, tol_of(&report))?;
    report.push(CheckResult::judged("duality", r.max_residual, r.max_residual, r.tolerance));
    let mut table = residual_table(&r.grid, &r.residuals);
    for (p, res) in r.reverse_grid.iter().zip(&r.reverse_residuals) {
        table.row(vec![(*p).into(), (*res).into()]);
    }
    let line = format!("{} ↔ {}: max residual {:e} over {} points", r.family_id, r.dual_id, r.max_residual, grid);
    report.data = serde_json::to_value(&r).unwrap_or_default();
    Ok(Outcome { report, table: Some(table), lines: vec![line] })
}

fn parse_bound(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| CliError::Usage(format!("bad bound `{t}`"))),
    }
}

fn parse_domain(s: &str) -> Result<Interval> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| CliError::Usage(format!("--domain expects lo:hi, got `{s}`")))?;
    Ok(Interval::new(parse_bound(lo)?, parse_bound(hi)?, true, true)?)
}

fn parse_floats(s: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("{what} expects {count} comma-separated numbers, got `{s}`")))?;
    if v.len() != count {
        return Err(CliError::Usage(format!("{what} expects {count} numbers, got {}", v.len())));
    }
    Ok(v)
}

fn dual_derive(expr: &str, domain: &str, anchor: Option<&str>, points: usize, mut report: Report) -> Result<Outcome> {
    let tol = tol_of(&report);
    let dom = parse_domain(domain)?;
    let parsed = varexpr::parse(expr)?;
    let v = parsed.to_variance(dom)?;
    let anchor = match anchor {
        Some(a) => {
            let a = parse_floats(a, 3, "--anchor")?;
            Anchor { m0: a[0], s0: a[1], l0: a[2] }
        }
        None => Anchor { m0: dom.center(), s0: 0.0, l0: 0.0 },
    };
    let dual = dual_cumulant_from_variance(&v, anchor)?;
    let mut table = Table::new(&["m", "ell_star", "ell_star_prime", "variance", "residual"]);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for m in dom.grid(points.max(2)) {
        let value = dual.value(m)?;
        let first = dual.first(m)?;
        let var = v.eval(m)?;
        // ℓ*'' by differencing the quadrature ℓ*' against the closed 1/V
        let residual = (dual.numeric_second(m)? * var - 1.0).abs();
        worst = if residual.is_nan() { f64::NAN } else { worst.max(residual) };
        table.row(vec![m.into(), value.into(), first.into(), var.into(), residual.into()]);
        rows.push(json!({ "m": m, "ell_star": value, "ell_star_prime": first, "variance": var, "residual": residual }));
    }
    report.push(CheckResult::judged("second_derivative_times_variance", worst, worst, tol));
    report.data = json!({ "expression": parsed.to_string(), "domain": dom, "anchor": anchor, "samples": rows });
    let mut lines = vec![format!("V(m) = {parsed} on {dom}; ℓ*({}) = {}, ℓ*'({}) = {}", anchor.m0, anchor.l0, anchor.m0, anchor.s0)];
    lines.extend(table.rows.iter().map(|r| format!("m = {}  ℓ*(m) = {}", r[0], r[1])));
    Ok(Outcome { report, table: Some(table), lines })
}

fn parse_nmga(case: &str) -> Option<(usize, usize)> {
    let rest = case.strip_prefix("nmga:")?;
    let (k, n) = rest.split_once(',')?;
    Some((k.trim().parse().ok()?, n.trim().parse().ok()?))
}

fn certify(case: &str, mut report: Report) -> Result<Outcome> {
    let mut data = json!({});
    let outcome = match case {
        "vinogradov_paris" => catalog_certificate(case, &report.config.params)?,
        "tweedie_neg" => {
            let mut p = report.config.params.clone();
            p.entry("p".into()).or_insert(-1.0);
            if p["p"] >= 0.0 {
                return Err(CliError::Usage("tweedie_neg needs p < 0".into()));
            }
            catalog::get("tweedie", &p)?.certificate().expect("negative power entries carry a test")?
        }
        "hyperbolic" => multivar::hyperbolic_certificate()?,
        "mnegbin" => {
            let o = multivar::negbin_certificate();
            let (m, mp) = multivar::NEGBIN_WITNESS;
            data = json!({ "witness": [m, mp], "determinant": o.value(), "quoted_determinant": multivar::NEGBIN_QUOTED_DET });
            o
        }
        "h1" => laplace_test_taylor_moments("h1", &candidates::h1, &TaylorSpec::for_singularity(1.0, 8))?,
        "h2" => laplace_test_taylor_moments("h2", &candidates::h2, &TaylorSpec::for_singularity(1.0, 10))?,
        "h3" => laplace_test_taylor_moments("h3", &candidates::h3, &TaylorSpec::for_singularity(1.0, 8))?,
        other => match parse_nmga(other) {
            Some((k, n)) => {
                if k == 0 {
                    data = json!({ "quoted_B": multivar::nmga0_quoted_polynomial(0.1, 0.0) });
                }
                multivar::nmga_certificate(k, n)?
            }
            None => {
                return Err(CliError::Usage(format!(
                    "unknown case `{other}`; expected vinogradov_paris, hyperbolic, tweedie_neg, mnegbin, nmga:k,n, h1, h2 or h3"
                )))
            }
        },
    };
    let found = outcome.certificate().is_some();
    let line = match &outcome {
        TestOutcome::Certificate(c) => format!("certificate for {}: {}", c.candidate, c.conclusion),
        TestOutcome::Pass { detail, .. } => format!("no certificate for {case}: {detail}"),
    };
    report.push(CheckResult::flag("certificate", outcome.value(), found));
    report.certificates.push(CertificateRecord { case: case.to_string(), outcome });
    report.data = data;
    Ok(Outcome { lines: vec![line], ..Outcome::new(report) })
}

fn catalog_certificate(name: &str, params: &BTreeMap<String, f64>) -> Result<TestOutcome> {
    let e = entry(name, params)?;
    e.certificate().ok_or_else(|| CliError::Usage(format!("{name} has no nonexistence test")))?.map_err(Into::into)
}

// ---- levy

fn identity_grid(id: &Identity, n: usize) -> Vec<f64> {
    if n == 20 {
        return id.grid();
    }
    let n = n.max(2);
    let t = |i: usize| i as f64 / (n - 1) as f64;
    match id {
        Identity::SymBinomial => (0..n).map(|i| -0.9 + 1.8 * t(i)).collect(),
        _ => (0..n).map(|i| 10f64.powf(-1.0 + 2.0 * t(i))).collect(),
    }
}

fn levy_verify(id: &str, r: f64, gamma: f64, grid: usize, mut report: Report) -> Result<Outcome> {
    let tol = tol_of(&report);
    let all = Identity::all(r, gamma);
    let chosen: Vec<Identity> = match id {
        "all" => all,
        "takacs_mass" | "squared_exprel" => Vec::new(),
        _ => {
            let found: Vec<_> = all.into_iter().filter(|i| i.id() == id).collect();
            if found.is_empty() {
                return Err(CliError::Usage(format!(
                    "unknown identity `{id}`; expected all, takacs_mass, squared_exprel or one of {}",
                    Identity::IDS.join(", ")
                )));
            }
            found
        }
    };
    let mut table = Table::new(&["id", "point", "residual"]);
    let mut lines = Vec::new();
    let mut checks = Vec::new();
    for ident in &chosen {
        let mut worst = 0.0f64;
        for s in identity_grid(ident, grid) {
            let c = levy::verify_identity(*ident, s, tol)?;
            worst = if c.residual.is_nan() { f64::NAN } else { worst.max(c.residual) };
            table.row(vec![ident.id().into(), s.into(), c.residual.into()]);
            checks.push(c);
        }
        lines.push(format!("{}: max residual {worst:e}", ident.id()));
        report.push(CheckResult::judged(ident.id(), worst, worst, tol));
    }
    if matches!(id, "all" | "takacs_mass" | "takacs_dual") {
        let mass = levy::takacs_mass(r)?;
        let want = r.ln() / (r - 1.0);
        report.push(CheckResult::judged("takacs_mass", mass, (mass - want).abs(), tol));
    }
    if matches!(id, "all" | "squared_exprel") {
        let v = levy::squared_exprel_integral()?;
        report.push(CheckResult::judged("squared_exprel_integral", v, (v - 4f64.ln()).abs(), tol));
    }
    report.data = json!({ "checks": checks });
    Ok(Outcome { report, table: Some(table), lines })
}

// ---- ldp

fn ldp_rate(name: &str, m0: f64, m: f64, mut report: Report) -> Result<Outcome> {
    let e = entry(name, &report.config.params)?;
    let h = largedev::family_rate(&e.family, m0, m)?;
    report.push(CheckResult::info("rate", h));
    report.push(CheckResult::info("alpha", (-h).exp()));
    let mut lines = vec![format!("h({m0}, {m}) = {h}, e^(-h) = {}", (-h).exp())];
    if let Some(dual) = &e.dual {
        let link = largedev::dual_link(&e.family, dual, &[(m0, m)], tol_of(&report))?;
        lines.push(format!("dual combination gives {} (residual {:e})", link.rows[0].closed, link.max_residual));
        report.push(CheckResult::judged("dual_link", link.rows[0].closed, link.max_residual, link.tolerance));
        report.data = serde_json::to_value(&link).unwrap_or_default();
    }
    Ok(Outcome { lines, ..Outcome::new(report) })
}

fn tail_table() -> Table {
    Table::new(&["n", "exact", "mc", "stderr", "limit"])
}

fn ldp_binom(m: f64, ns: &[u64], mut report: Report) -> Result<Outcome> {
    let rows = largedev::binomial_table(ns, m)?;
    let mut table = tail_table();
    let mut lines = Vec::new();
    for r in &rows {
        table.row(vec![(r.n as i64).into(), r.exact.into(), r.mc.into(), r.mc_stderr.into(), r.alpha_limit.into()]);
        lines.push(format!("n = {}: {} (limit {})", r.n, r.exact.unwrap_or(f64::NAN), r.alpha_limit));
    }
    if let Some(last) = rows.last() {
        report.push(CheckResult::info("alpha_limit", last.alpha_limit));
    }
    report.data = serde_json::to_value(&rows).unwrap_or_default();
    Ok(Outcome { report, table: Some(table), lines })
}

/// `e^{-h(mean, m)}` from the catalog family of the sampled law, when known.
fn mc_limit(name: &str, mean: f64, law_param: Option<f64>, m: f64) -> Option<f64> {
    if !mean.is_finite() {
        return None;
    }
    let mut params = BTreeMap::new();
    match (name, law_param) {
        ("gamma", Some(p)) => {
            params.insert("lambda".to_string(), p);
        }
        ("gaussian", Some(p)) => {
            params.insert("sigma".to_string(), p);
        }
        _ => {}
    }
    let e = catalog::get(name, &params).ok()?;
    largedev::family_rate(&e.family, mean, m).ok().map(|h| (-h).exp())
}

#[allow(clippy::too_many_arguments)]
fn ldp_mc(
    name: &str,
    m: f64,
    n: u64,
    trials: u64,
    law_param: Option<f64>,
    seed: u64,
    tol: Option<f64>,
    mut report: Report,
) -> Result<Outcome> {
    let sampler = largedev::sampler_for(name, law_param)?;
    let est = largedev::monte_carlo_tail(sampler.as_ref(), n, m, trials, seed)?;
    debug_assert_eq!(est.method, TailMethod::MonteCarlo);
    let limit = mc_limit(name, sampler.mean(), law_param, m);
    let exact = if name == "symmetric_bernoulli" { Some(largedev::exact_binomial_tail(n, m)?.value) } else { None };
    report.push(CheckResult::info("tail_root", est.value));
    if let Some(se) = est.stderr {
        report.push(CheckResult::info("stderr", se));
    }
    if let Some(l) = limit {
        match tol {
            Some(t) => report.push(CheckResult::judged("limit_gap", est.value, (est.value - l).abs(), t)),
            None => report.push(CheckResult::info("limit", l)),
        }
    }
    let mut table = tail_table();
    table.row(vec![(n as i64).into(), exact.into(), est.value.into(), est.stderr.into(), limit.into()]);
    let mut lines = vec![format!(
        "{name}: Pr(mean of {n} > {m})^(1/{n}) ≈ {} ± {} from {} hits in {trials} trials",
        est.value,
        est.stderr.unwrap_or(f64::NAN),
        est.hits.unwrap_or(0)
    )];
    if let Some(w) = &est.warning {
        lines.push(format!("warning: {w}"));
    }
    report.data = json!({ "estimate": est, "exact": exact, "limit": limit });
    Ok(Outcome { report, table: Some(table), lines })
}

// ---- dilog

fn dilog_cmd(cmd: &DilogCmd, tol: Option<f64>, seed: Option<u64>, command: Vec<String>, mut config: Config) -> Result<Outcome> {
    match cmd {
        DilogCmd::Pmf { n } => pmf_outcome("dilogarithm", dilog::dilog_pmf(*n), Report::new(command, config)),
        DilogCmd::Alpha { n } => pmf_outcome("alpha", dilog::alpha_pmf(*n), Report::new(command, config)),
        DilogCmd::Sigma { n, crosscheck } => {
            config.tolerance = Some(tol.unwrap_or(1e-8));
            sigma(*n, *crosscheck, Report::new(command, config))
        }
        DilogCmd::Wdensity { range } => {
            config.tolerance = Some(tol.unwrap_or(1e-8));
            wdensity(range, Report::new(command, config))
        }
        DilogCmd::Convcheck { n } => {
            config.tolerance = Some(tol.unwrap_or(1e-10));
            let r = dilog::convolution_identity(*n);
            let mut report = Report::new(command, config);
            report.push(CheckResult::judged("convolution_identity", r.max_abs_diff, r.max_abs_diff, tol_of(&report)));
            report.data = serde_json::to_value(&r).unwrap_or_default();
            Ok(Outcome { lines: vec![format!("max |α*α⊛2Y - μ*4| on 0..={n}: {:e}", r.max_abs_diff)], ..Outcome::new(report) })
        }
        DilogCmd::Sample { family, count } => {
            let seed = seed.ok_or_else(|| CliError::Usage("`dilog sample` requires --seed".into()))?;
            let fam = SelfDualFamily::from_str(family)?;
            sample(fam, *count, seed, Report::new(command, config))
        }
    }
}

fn pmf_outcome(label: &str, pmf: dilog::LatticePmf, mut report: Report) -> Result<Outcome> {
    let mut table = Table::new(&["n", "weight"]);
    for (n, w) in pmf.iter() {
        table.row(vec![n.into(), w.into()]);
    }
    report.push(CheckResult::info("total", pmf.total()));
    report.push(CheckResult::info("truncation_mass", pmf.truncation_mass));
    let lines = pmf.iter().take(11).map(|(n, w)| format!("Pr({label} = {n}) = {w}")).collect();
    report.data = serde_json::to_value(&pmf).unwrap_or_default();
    Ok(Outcome { report, table: Some(table), lines })
}

/// Dilogarithm table length for convolution cross-checks.
const MU_TABLE: usize = 4000;

fn sigma(n: i64, crosscheck: bool, mut report: Report) -> Result<Outcome> {
    let n = n.max(0);
    let weights: Vec<(i64, f64)> = (-n..=n).map(|k| Ok((k, dilog::sigma_pmf(k)?))).collect::<Result<_>>()?;
    let mut table = Table::new(&["n", "weight"]);
    for &(k, w) in &weights {
        table.row(vec![k.into(), w.into()]);
    }
    let atom = weights[n as usize].1;
    report.push(CheckResult::info("atom_at_zero", atom));
    let mut lines = vec![format!("Pr(Y = Y') = {atom}")];
    if crosscheck {
        let mu = dilog::dilog_pmf(MU_TABLE);
        let worst = weights
            .iter()
            .map(|&(k, w)| (w - dilog::sigma_pmf_convolution(k, &mu)).abs())
            .fold(0.0, f64::max);
        lines.push(format!("max deviation from the convolution of two μ tables: {worst:e}"));
        report.push(CheckResult::judged("convolution_crosscheck", worst, worst, tol_of(&report)));
    }
    report.data = json!({ "pmf": weights });
    Ok(Outcome { report, table: Some(table), lines })
}

fn wdensity(range: &str, mut report: Report) -> Result<Outcome> {
    let parts: Vec<&str> = range.split(':').collect();
    let bad = || CliError::Usage(format!("--range expects lo:hi:count, got `{range}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && hi > lo && count >= 2) {
        return Err(bad());
    }
    let xs: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect();
    // the Gaussian factor is below 1e-300 beyond 38 from x
    let n_max = (lo.abs().max(hi.abs()).ceil() as i64) + 40;
    let sig: Vec<f64> = (0..=n_max).map(dilog::sigma_pmf).collect::<nefdual::Result<_>>()?;
    let s = |k: i64| sig[k.unsigned_abs() as usize];
    let mut table = Table::new(&["x", "density", "convolution"]);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for &x in &xs {
        let d = dilog::w_density(x)?;
        let c = dilog::w_density_convolution(x, &s, n_max);
        worst = worst.max((d - c).abs());
        table.row(vec![x.into(), d.into(), c.into()]);
        rows.push(json!({ "x": x, "density": d, "convolution": c }));
    }
    report.push(CheckResult::judged("convolution_crosscheck", worst, worst, tol_of(&report)));
    report.data = json!({ "samples": rows });
    let lines = vec![format!("{} points on [{lo}, {hi}], max deviation from N(0,1)⊛σ: {worst:e}", count)];
    Ok(Outcome { report, table: Some(table), lines })
}

fn sample(fam: SelfDualFamily, count: usize, seed: u64, mut report: Report) -> Result<Outcome> {
    let draws = dilog::sample(fam, count, seed);
    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    for d in &draws {
        *hist.entry(*d).or_default() += 1;
    }
    let mut table = Table::new(&["n", "count"]);
    for (k, c) in &hist {
        table.row(vec![(*k).into(), (*c as i64).into()]);
    }
    let pmf = match fam {
        SelfDualFamily::Dilog => dilog::dilog_pmf(0),
        SelfDualFamily::Alpha => dilog::alpha_pmf(0),
    };
    let p0 = hist.get(&0).copied().unwrap_or(0) as f64 / count.max(1) as f64;
    report.push(CheckResult::info("empirical_p0", p0));
    report.push(CheckResult::info("pmf_p0", pmf.get(0)));
    report.data = json!({ "histogram": hist });
    let lines = vec![format!("{count} draws, Pr(0) empirical {p0} vs {}", pmf.get(0))];
    Ok(Outcome { report, table: Some(table), lines })
}

// ---- multivar

fn wishart(order: usize, shape: f64, count: usize, mut report: Report) -> Result<Outcome> {
    let tol = tol_of(&report);
    let mut rng = point_rng(&report);
    let worst = multivar::wishart_grid_check(order, shape, count, &mut rng)?;
    report.push(CheckResult::judged("wishart_self_duality", worst, worst, tol));
    let line = format!("Wishart order {order}, shape {shape}: max residual {worst:e} over {count} points");
    Ok(Outcome { lines: vec![line], ..Outcome::new(report) })
}

fn multinomial(n: usize, count: usize, mut report: Report) -> Result<Outcome> {
    let tol = tol_of(&report);
    let mut rng = point_rng(&report);
    let mut table = Table::new(&["point", "residual"]);
    let mut worst = 0.0f64;
    let mut closed_gap = 0.0f64;
    for i in 0..count {
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let r = multivar::multinomial_variance_check(&s)?;
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
        table.row(vec![(i as i64).into(), r.into()]);
        if n == 1 {
            let v = multivar::multinomial_dual_variance(&s)?[(0, 0)];
            let c = multivar::multinomial_dual_variance_1d(s[0]);
            closed_gap = closed_gap.max(((v - c) / c).abs());
        }
    }
    report.push(CheckResult::judged("inverse_hessian", worst, worst, tol));
    if n == 1 {
        report.push(CheckResult::judged("cosh_reduction", closed_gap, closed_gap, 1e-14));
    }
    let line = format!("multinomial n = {n}: max relative gap to the inverse Hessian {worst:e} over {count} points");
    Ok(Outcome { report, table: Some(table), lines: vec![line] })
}

fn nmga0(n: usize, s: Option<&[f64]>, count: usize, mut report: Report) -> Result<Outcome> {
    let tol = tol_of(&report);
    let points: Vec<Vec<f64>> = match s {
        Some(p) => vec![p.to_vec()],
        None => {
            let mut rng = point_rng(&report);
            (0..count)
                .map(|_| {
                    let tail: Vec<f64> = (1..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
                    let q = 0.5 * tail.iter().map(|x| x * x).sum::<f64>();
                    let mut p = vec![q + rng.gen_range(0.2..3.0)];
                    p.extend(tail);
                    p
                })
                .collect()
        }
    };
    let mut table = Table::new(&["point", "residual"]);
    let (mut worst, mut quoted, mut duality) = (0.0f64, 0.0f64, 0.0f64);
    let mut checks = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let c = multivar::nmga0_variance_check(n, p)?;
        worst = worst.max(c.residual);
        quoted = quoted.max(c.quoted_residual);
        duality = duality.max(c.duality_residual);
        table.row(vec![(i as i64).into(), c.residual.into()]);
        checks.push(c);
    }
    report.push(CheckResult::judged("dual_variance", worst, worst, tol));
    report.push(CheckResult::info("quoted_matrix_gap", quoted));
    report.push(CheckResult::judged("duality", duality, duality, 1e-8));
    report.data = json!({ "checks": checks });
    let line = format!("NM-ga_0 n = {n}: dual variance gap {worst:e}, halved off-diagonal gap {quoted:e}");
    Ok(Outcome { report, table: Some(table), lines: vec![line] })
}
