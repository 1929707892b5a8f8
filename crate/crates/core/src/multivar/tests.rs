use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn wishart_examples() {
    let i = SymMatrixPoint::identity(3).unwrap();
    assert!(wishart_selfdual_check(2.5, &i).unwrap() <= 1e-12);
    let m = wishart_mean(2.5, &i).unwrap();
    assert!((m.matrix() - DMatrix::identity(3, 3) * 2.5).amax() < 1e-14);
    // n = 1 is the gamma family: -p log s
    let s = SymMatrixPoint::from_rows(&[vec![1.7]]).unwrap();
    assert!((wishart_cumulant(3.0, &s).unwrap() + 3.0 * 1.7f64.ln()).abs() < 1e-14);
    assert!(wishart_selfdual_check(3.0, &s).unwrap() < 1e-15);
    let s = SymMatrixPoint::random_spd(3, &mut rng(1)).unwrap();
    assert!(wishart_selfdual_check(2.0, &s).unwrap() <= 1e-10);
}

#[test]
fn wishart_invariant_grid() {
    let mut r = rng(2);
    for n in 1..=4 {
        for p in [0.5, 1.0, 2.5] {
            assert!(wishart_grid_check(n, p, 10, &mut r).unwrap() <= 1e-10, "n = {n}, p = {p}");
        }
    }
}

#[test]
fn wishart_rejects_non_spd() {
    let s = SymMatrixPoint::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
    assert!(!s.is_spd());
    assert_eq!(wishart_selfdual_check(1.0, &s), Err(Error::NotSpd));
    assert!(SymMatrixPoint::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).is_err());
    assert!(SymMatrixPoint::identity(7).is_err());
}

#[test]
fn random_spd_is_symmetric_and_spd() {
    let mut r = rng(3);
    for n in 1..=6 {
        let s = SymMatrixPoint::random_spd(n, &mut r).unwrap();
        assert!(s.is_spd());
        assert_eq!(s.matrix(), &s.matrix().transpose());
    }
}

#[test]
fn multinomial_examples() {
    let v = multinomial_dual_variance(&[0.0]).unwrap();
    assert_eq!(v[(0, 0)], 4.0);
    let v = multinomial_dual_variance(&[0.0, 0.0]).unwrap();
    let want = DMatrix::from_row_slice(2, 2, &[6.0, 3.0, 3.0, 6.0]);
    assert!((v - want).amax() < 1e-15);
    for s in [-3.0, -0.4, 0.0, 1.1, 5.0] {
        let a = multinomial_dual_variance(&[s]).unwrap()[(0, 0)];
        let b = multinomial_dual_variance_1d(s);
        assert!((a - b).abs() <= 8.0 * f64::EPSILON * a, "s = {s}");
    }
    let p = SimplexPoint::new(vec![0.25, 0.25]).unwrap();
    assert!((multinomial_dual_laplace(&p) - 0.25f64.powf(0.5) * 0.5f64.powf(0.5)).abs() < 1e-15);
    assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
}

#[test]
fn multinomial_matches_inverse_hessian() {
    let mut r = rng(4);
    for n in 1..=3 {
        for _ in 0..20 {
            let s: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
            let res = multinomial_variance_check(&s).unwrap();
            assert!(res < 1e-7, "n = {n}, s = {s:?}: {res}");
            let v = multinomial_dual_variance(&s).unwrap();
            assert!(v.clone().cholesky().is_some());
            assert!(v.determinant() > 0.0);
        }
    }
}

#[test]
fn landau_line_examples() {
    assert!((landau_line_mass(&[1.0], 1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
    assert_eq!(landau_line_mass(&[1.0, 2.0], 0.0).unwrap(), 1.0);
    assert!(landau_line_mass(&[1.0], -0.5).is_err());
    assert!(landau_line_mass(&[0.0, 0.0], 1.0).is_err());
    // the line measure evaluated at s = 0 has the same mass
    let l = landau_line_laplace(&[2.0, -1.0], 1.3, &[0.0, 0.0]).unwrap();
    assert!((l - landau_line_mass(&[2.0, -1.0], 1.3).unwrap()).abs() < 1e-15);
    let s: f64 = 0.7;
    assert!((landau_line_laplace(&[1.0], 0.0, &[s]).unwrap() - (-s).exp() * s.powf(s)).abs() < 1e-15);
}

#[test]
fn negbin_candidate_examples() {
    assert!((negbin_dual_candidate(&[0.0, 1.0, 0.0]).unwrap() - 0.25).abs() < 1e-16);
    assert_eq!(negbin_dual_candidate(&[0.0, 0.0]).unwrap(), 1.0);
    // n = 1 section: s^s (1+s)^{-1-s}
    let s: f64 = 1.3;
    assert!((negbin_dual_candidate(&[s]).unwrap() - s.powf(s) * (1.0 + s).powf(-1.0 - s)).abs() < 1e-15);
    assert!((NEGBIN_QUOTED_DET + 1.3988e-5).abs() < 1e-8);
}

#[test]
fn negbin_witness_determinant_is_positive() {
    let out = negbin_certificate();
    let det = out.value();
    let exact = 177769.0 / 345600000.0;
    assert!(((det - exact) / exact).abs() < 1e-12, "{det}");
    assert!(out.certificate().is_none());
}

#[test]
fn nmga_candidate_examples() {
    // k = 1, n = 2 at (1, 1): e^{-1}·1/1² with the exponential factor
    assert!((nmga_dual_candidate(1, 2, &[1.0, 1.0]).unwrap() - (-1f64).exp()).abs() < 1e-15);
    assert!((nbgas_printed(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
    assert!(nmga_dual_candidate(0, 1, &[1.0]).is_err());
    assert!(nmga_dual_candidate(1, 3, &[1.0, 0.0, 0.0]).is_err());
}

#[test]
fn nmga_candidate_integrates_its_gradient() {
    // ∂ log B*/∂mᵢ = log(mᵢ/m_n) and ∂ log B*/∂m_n = -(1 + Σmᵢ)/m_n for k = n - 1
    let m = [0.7, 1.9, 2.3];
    let lb = |x: &[f64]| nmga_dual_candidate(2, 3, x).unwrap().ln();
    let h = 1e-6;
    for i in 0..3 {
        let (mut a, mut b) = (m, m);
        a[i] += h;
        b[i] -= h;
        let d = (lb(&a) - lb(&b)) / (2.0 * h);
        let want = if i < 2 { (m[i] / m[2]).ln() } else { -(1.0 + m[0] + m[1]) / m[2] };
        assert!((d - want).abs() < 1e-8, "i = {i}: {d} vs {want}");
    }
}

#[test]
fn nmga_polynomial_examples() {
    let b = nmga0_quoted_polynomial(0.1, 0.0);
    assert!((b + 2.3296).abs() < 1e-3, "{b}");
    let r = 1e-6;
    assert!((nmga0_quoted_polynomial(r, 0.0) / r + 24.0).abs() < 1e-4);
    // along s = -2r·1 the recomputed form is 3τ³ - 6r²τ² + 108r⁶
    for (r, t) in [(0.1, 0.0), (0.5, 1.0), (0.3, -0.5)] {
        let tau: f64 = t + 1.0;
        let want = 3.0 * tau.powi(3) - 6.0 * r * r * tau * tau + 108.0 * r.powi(6);
        let got = nmga0_quadratic_form(r, &[-2.0 * r; 3], t).unwrap();
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn nmga0_quadratic_form_matches_finite_differences() {
    // second partials of L(s, t) = e^{u/(t+1)}/(t+1)
    let l = |s: &[f64; 3], t: f64| (0.5 * s.iter().map(|x| x * x).sum::<f64>() / (t + 1.0)).exp() / (t + 1.0);
    let (s, t, r) = ([0.3, -0.2, 0.5], 0.4, 0.7);
    let h = 1e-3;
    let second = |f: &dyn Fn(f64, f64) -> f64| {
        (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)
    };
    let mut total = 0.0;
    for i in 0..3 {
        let sii = second(&|a, b| {
            let mut p = s;
            p[i] += a + b;
            l(&p, t)
        });
        let sit = second(&|a, b| {
            let mut p = s;
            p[i] += a;
            l(&p, t + b)
        });
        let tt = second(&|a, b| l(&s, t + a + b));
        total += sii - 2.0 * r * sit + r * r * tt;
    }
    let tau = t + 1.0;
    let want = nmga0_quadratic_form(r, &s, t).unwrap() * l(&s, t) / tau.powi(4);
    assert!((total - want).abs() < 1e-5 * want.abs(), "{total} vs {want}");
}

#[test]
fn nmga_certificates() {
    for (k, n) in [(1, 2), (2, 3), (1, 3), (3, 4)] {
        let out = nmga_certificate(k, n).unwrap();
        assert!(out.certificate().is_none(), "k = {k}, n = {n}");
        assert!(out.value() > 0.0);
    }
    let out = nmga_certificate(0, 4).unwrap();
    assert!(out.certificate().is_none());
    assert!(nmga_certificate(0, 3).is_err());
}

#[test]
fn nmga0_dual_variance_examples() {
    let v2 = nmga0_dual_variance(&DVector::from_vec(vec![1.0, 0.0]), 1.0);
    assert!((v2 - DMatrix::identity(2, 2)).amax() < 1e-15);
    let v3 = nmga0_dual_variance(&DVector::from_vec(vec![1.0, 0.0, 0.0]), 1.0);
    assert!((v3 - DMatrix::identity(3, 3)).amax() < 1e-15);
    assert!(nmga0_dual(4).is_err());
}

#[test]
fn nmga0_variance_check_at_random_points() {
    let mut r = rng(5);
    for n in [2, 3] {
        for _ in 0..10 {
            let tail: Vec<f64> = (1..n).map(|_| r.gen_range(-1.5..1.5)).collect();
            let q = 0.5 * tail.iter().map(|x| x * x).sum::<f64>();
            let mut s = vec![q + r.gen_range(0.2..3.0)];
            s.extend(tail);
            let c = nmga0_variance_check(n, &s).unwrap();
            assert!(c.residual < 1e-7, "{c:?}");
            assert!(c.duality_residual < 1e-12, "{c:?}");
            if s[1].abs() > 0.1 {
                assert!(c.quoted_residual > 1e-3);
            }
        }
    }
    assert!(nmga0_variance_check(2, &[0.1, 1.0]).is_err());
}

#[test]
fn hyperbolic_examples() {
    let x: f64 = 0.8;
    let v = hyperbolic_dual_candidate(&[0.0, 0.0, x]).unwrap();
    let h2 = crate::duality::candidates::h2(Complex64::new(x, 0.0)).re;
    assert!((v - h2).abs() < 1e-15);
    assert!((hyperbolic_dual_candidate(&[1.0, 0.0]).unwrap() - 0.25).abs() < 1e-15);
    let out = hyperbolic_certificate().unwrap();
    let cert = out.certificate().expect("c8 < 0");
    assert_eq!(cert.kind, CertificateKind::TaylorMoment);
    assert!(cert.value < 0.0);
}

fn bernoulli_nd() -> (FamilySpecNd, FamilySpecNd) {
    let f = FamilySpecNd::new(
        "bernoulli",
        CumulantNd::new(1, |_| true, |s| (-s[0]).exp().ln_1p())
            .with_gradient(|s| DVector::from_element(1, -1.0 / (1.0 + s[0].exp()))),
        DVector::zeros(1),
    );
    let d = FamilySpecNd::new(
        "bernoulli_dual",
        CumulantNd::new(1, |m| m[0] > 0.0 && m[0] < 1.0, |m| xlogx(m[0]) + xlogx(1.0 - m[0]))
            .with_gradient(|m| DVector::from_element(1, (m[0] / (1.0 - m[0])).ln())),
        DVector::from_element(1, 0.5),
    );
    (f, d)
}

#[test]
fn affine_identity_and_scaling() {
    let (f, d) = bernoulli_nd();
    let (g, e) = affine_transform_dual(&f, &d, &DMatrix::identity(1, 1)).unwrap();
    let s = DVector::from_element(1, 0.3);
    assert_eq!(g.cumulant.value(&s).unwrap(), f.cumulant.value(&s).unwrap());
    let (g, e2) = affine_transform_dual(&f, &d, &DMatrix::from_element(1, 1, 2.0)).unwrap();
    for i in 0..20 {
        let s = DVector::from_element(1, -3.0 + 0.3 * i as f64);
        assert!(duality_residual_nd(&g, &e2, &s).unwrap() <= 1e-8);
    }
    let _ = e;
    assert_eq!(affine_transform_dual(&f, &d, &DMatrix::zeros(1, 1)).unwrap_err(), Error::SingularMatrix);
}

#[test]
fn affine_variance_transport() {
    let base = FamilySpecNd::new("multinomial", multinomial_cumulant(2), DVector::zeros(2));
    let base = {
        let c = base.cumulant.clone();
        // closed V from the inverse of the closed dual variance
        FamilySpecNd::new("multinomial", c, DVector::zeros(2)).with_variance(|m| {
            let p0 = 1.0 - m[0] - m[1];
            let _ = p0;
            DMatrix::from_row_slice(2, 2, &[m[0] * (1.0 - m[0]), -m[0] * m[1], -m[0] * m[1], m[1] * (1.0 - m[1])])
        })
    };
    let dual = FamilySpecNd::new(
        "multinomial_dual",
        CumulantNd::new(2, |m| m[0] > 0.0 && m[1] > 0.0 && m[0] + m[1] < 1.0, |m| {
            xlogx(m[0]) + xlogx(m[1]) + xlogx(1.0 - m[0] - m[1])
        }),
        DVector::from_vec(vec![1.0 / 3.0, 1.0 / 3.0]),
    );
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.3, 2.0]);
    let (g, _) = affine_transform_dual(&base, &dual, &a).unwrap();
    for s in [[0.0, 0.0], [0.5, -0.2], [-1.0, 0.3], [0.2, 0.9], [1.0, 1.0]] {
        let sv = DVector::from_row_slice(&s);
        let m = g.cumulant.mean(&sv).unwrap();
        let h = richardson_hessian(&|p| g.cumulant.value(p), &sv, 1e-3).unwrap();
        let v = g.variance_at(&m).unwrap();
        assert!((&h - &v).amax() < 1e-8, "s = {s:?}");
    }
}
