use super::*;
use crate::duality::check_duality;

/// `exp` of a power series with zero constant term, by the naive
/// `Σ_j S^j/j!` expansion truncated at degree `n`.
fn exp_series(c: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    out[0] = 1.0;
    let mut pow = out.clone();
    for j in 1..=n {
        let mut next = vec![0.0; n + 1];
        for a in 0..=n {
            if pow[a] == 0.0 {
                continue;
            }
            for b in 1..=(n - a) {
                next[a + b] += pow[a] * c[b];
            }
        }
        pow = next.iter().map(|x| x / j as f64).collect();
        for i in 0..=n {
            out[i] += pow[i];
        }
    }
    out
}

#[test]
fn dilog_pmf_examples() {
    let mu = dilog_pmf(500);
    assert!((mu.weights[0] - (-PI * PI / 6.0).exp()).abs() < 1e-16);
    assert!((mu.weights[1] - mu.weights[0]).abs() < 1e-16);
    assert!(mu.weights.iter().all(|&w| w >= 0.0));
    let n = 50;
    let c: Vec<f64> = (0..=n).map(|k| if k == 0 { 0.0 } else { 1.0 / (k * k) as f64 }).collect();
    let oracle = exp_series(&c, n);
    for (k, (o, w)) in oracle.iter().zip(&mu.weights).enumerate() {
        let want = o * mu.weights[0];
        assert!((w - want).abs() < 1e-12 * want.max(1e-300), "k = {k}");
    }
}

#[test]
fn alpha_pmf_examples() {
    let al = alpha_pmf(60);
    assert!((al.weights[0] - (-PI * PI / 4.0).exp()).abs() < 1e-16);
    assert!((al.weights[1] - 2.0 * al.weights[0]).abs() < 1e-16);
    let n = 50;
    let c: Vec<f64> = (0..=n).map(|k| if k % 2 == 1 { 2.0 / (k * k) as f64 } else { 0.0 }).collect();
    let oracle = exp_series(&c, n);
    for (k, (o, w)) in oracle.iter().zip(&al.weights).enumerate() {
        let want = o * al.weights[0];
        assert!((w - want).abs() < 1e-12 * want.max(1e-300), "k = {k}");
    }
    // generating function at z = 1/2
    let z: f64 = 0.5;
    let li2 = |x: f64| crate::numerics::dilog(x).unwrap();
    let want = (-PI * PI / 4.0 + 2.0 * li2(z) - 0.5 * li2(z * z)).exp();
    assert!((al.generating(z) - want).abs() < 1e-10);
}

#[test]
fn sigma_atom_and_symmetry() {
    let p0 = sigma_pmf(0).unwrap();
    assert!((p0 - 0.11751).abs() < 1e-4, "{p0}");
    for n in 1..6 {
        assert_eq!(sigma_pmf(n).unwrap(), sigma_pmf(-n).unwrap());
    }
    assert!((sigma_charfn(PI) - (-PI * PI / 2.0).exp()).abs() < 1e-16);
    assert!((sigma_charfn(1.0) - sigma_charfn(1.0 + 2.0 * PI)).abs() < 1e-15);
}

#[test]
fn sigma_cosine_path_matches_convolution() {
    let mu = dilog_pmf(4000);
    for n in -10..=10 {
        let a = sigma_pmf(n).unwrap();
        let b = sigma_pmf_convolution(n, &mu);
        assert!((a - b).abs() < 1e-8, "n = {n}: {a} vs {b}");
    }
}

#[test]
fn sigma_pmf_reproduces_charfn() {
    let pmf: Vec<(i64, f64)> = (-400..=400).map(|n| (n, sigma_pmf(n).unwrap())).collect();
    for t in [0.5, 1.0, 3.0] {
        let s: f64 = pmf.iter().map(|&(n, w)| w * (n as f64 * t).cos()).sum();
        assert!((s - sigma_charfn(t)).abs() < 1e-3, "t = {t}: {s}");
    }
}

#[test]
fn w_density_is_a_density() {
    for i in 0..200 {
        let x = -20.0 + 0.2 * i as f64;
        assert!(w_density(x).unwrap() >= 0.0);
    }
    let total = integrate(|x| w_density(x).unwrap(), &Interval::real_line(), &QuadratureSpec::with_tol(1e-12, 1e-11))
        .unwrap();
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

#[test]
fn w_density_matches_convolution() {
    let sigma: Vec<f64> = (0..=60).map(|n| sigma_pmf(n).unwrap()).collect();
    let s = |n: i64| sigma[n.unsigned_abs() as usize];
    for i in 0..21 {
        let x = -5.0 + 0.5 * i as f64;
        let a = w_density(x).unwrap();
        let b = w_density_convolution(x, &s, 60);
        assert!((a - b).abs() < 1e-8, "x = {x}: {a} vs {b}");
    }
}

#[test]
fn sigma_r_examples() {
    assert!(sigma_r_cumulant(0.5, 0.0).unwrap().abs() < 1e-15);
    assert!((sigma_r_variance(0.5, 0.0).unwrap() - 2.0).abs() < 1e-14);
    let grid: Vec<f64> = (0..20).map(|i| -4.0 + 8.0 * i as f64 / 19.0).collect();
    for r in [0.3, 0.7] {
        let res = sigma_r_variance_check(r, &grid).unwrap();
        assert!(res < 1e-6, "r = {r}: {res}");
    }
    assert!(sigma_r_cumulant(0.5, 1.0).is_err());
}

#[test]
fn self_duality_relations() {
    let ln2 = std::f64::consts::LN_2;
    assert!(self_duality_relation(SelfDualFamily::Dilog, ln2).unwrap() < 1e-15);
    let m = mean_at(&SelfDualFamily::Dilog.family(), ln2).unwrap();
    assert!((m - ln2).abs() < 1e-14);
    for i in 1..=20 {
        let s = 0.15 * i as f64;
        assert!(self_duality_relation(SelfDualFamily::Alpha, s).unwrap() < 1e-10);
        assert!(self_duality_relation(SelfDualFamily::Dilog, s).unwrap() < 1e-10);
    }
    let sym = -(2f64.sqrt() - 1.0).ln();
    let m = mean_at(&SelfDualFamily::Alpha.family(), sym).unwrap();
    assert!((m - sym).abs() < 1e-13);
    assert!(self_duality_relation(SelfDualFamily::Alpha, -1.0).is_err());
}

#[test]
fn self_dual_checks_pass() {
    let grid: Vec<f64> = (1..=50).map(|i| 0.1 * i as f64).collect();
    for fam in [SelfDualFamily::Dilog, SelfDualFamily::Alpha] {
        let f = fam.family();
        let rep = check_duality(&f, &f, &grid, 1e-9).unwrap();
        assert!(rep.pass, "{fam:?}: {}", rep.max_residual);
    }
}

#[test]
fn convolution_identity_holds() {
    let rep = convolution_identity(100);
    assert!(rep.max_abs_diff < 1e-10, "{}", rep.max_abs_diff);
    let mu = dilog_pmf(0);
    let al = alpha_pmf(0);
    let lhs = al.weights[0].powi(2) * mu.weights[0];
    assert!((lhs - (-2.0 * PI * PI / 3.0).exp()).abs() < 1e-16);
    assert!((lhs - mu.weights[0].powi(4)).abs() < 1e-16);
}

#[test]
fn eta_checks() {
    let grid: Vec<f64> = (0..20).map(|i| -3.0 + 0.3 * i as f64).collect();
    assert!(eta_variance_check(&grid).unwrap() < 1e-6);
    let f = eta_family();
    for s in [0.3, 1.0, 2.0] {
        let m = mean_at(&f, s).unwrap();
        assert!((s - (-m).exp().ln_1p()).abs() < 1e-12);
        let mu = SelfDualFamily::Dilog.family();
        let d = f.cumulant.value(s).unwrap() - 0.5 * s * s - mu.cumulant.value(s).unwrap();
        assert!(d.abs() < 1e-15);
    }
}

#[test]
fn jump_tables_normalize() {
    for s in [CompoundPoissonSampler::dilog(), CompoundPoissonSampler::alpha()] {
        let tail = 1.0 - s.table_mass();
        assert!(tail > 0.0 && tail < 1e-3);
        assert!((s.tail(0.0) - 1.0).abs() < 1e-14, "{}", s.tail(0.0));
    }
}

#[test]
fn samples_are_deterministic_and_fit_pmf() {
    let a = sample(SelfDualFamily::Dilog, 20_000, 5);
    assert_eq!(a, sample(SelfDualFamily::Dilog, 20_000, 5));
    assert_ne!(a, sample(SelfDualFamily::Dilog, 20_000, 6));
    assert!(sample(SelfDualFamily::Alpha, 1000, 1).iter().all(|&x| x >= 0));

    // χ² goodness of fit on cells 0..15 and a tail cell
    let count = 200_000;
    let xs = sample(SelfDualFamily::Dilog, count, 42);
    let mu = dilog_pmf(16);
    let cells = 16;
    let mut obs = vec![0.0; cells + 1];
    for &x in &xs {
        obs[(x as usize).min(cells)] += 1.0;
    }
    let mut probs: Vec<f64> = mu.weights[..cells].to_vec();
    probs.push(1.0 - probs.iter().sum::<f64>());
    let chi2: f64 = obs.iter().zip(&probs).map(|(o, p)| (o - count as f64 * p).powi(2) / (count as f64 * p)).sum();
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let pval = 1.0 - ChiSquared::new(cells as f64).unwrap().cdf(chi2);
    assert!(pval > 1e-3, "chi2 = {chi2}, p = {pval}");
}
