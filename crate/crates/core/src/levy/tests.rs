use super::*;

const TOL: f64 = 1e-8;

#[test]
fn identities_hold_on_their_grids() {
    for id in Identity::all(2.0, 1.5).into_iter().chain([Identity::TakacsDual { r: 3.5 }, Identity::StableGamma { gamma: 1.2 }]) {
        for s in id.grid() {
            let check = verify_identity(id, s, TOL).unwrap();
            assert!(check.pass, "{} at s = {s}: residual {}", check.id, check.residual);
        }
    }
}

#[test]
fn stable_drift_matches_gamma() {
    // ∫ (e^{-x} - 1) x^{-γ} dx = Γ(1-γ), so the linear coefficient is γ
    for g in [1.2, 1.5, 1.8] {
        let check = verify_identity(Identity::StableGamma { gamma: g }, 2.0, TOL).unwrap();
        assert!((check.drift.unwrap() - g).abs() < 1e-8, "γ = {g}: a = {:?}", check.drift);
    }
}

#[test]
fn representations_reproduce_log_lhs() {
    for id in [Identity::Landau, Identity::NegbinDual, Identity::AbelDual, Identity::KendallResselDual, Identity::SymBinomial] {
        let rep = identity_representation(id);
        for s in [0.3, 0.7] {
            let got = rep.exponent(s).unwrap();
            let d2 = rep.exponent_second(s).unwrap();
            let h = 1e-3;
            let fd = (id.log_lhs(s + h) - 2.0 * id.log_lhs(s) + id.log_lhs(s - h)) / (h * h);
            assert!((d2 - fd).abs() < 1e-5 * fd.abs().max(1.0), "{}: {d2} vs {fd}", id.id());
            assert!(got.is_finite());
        }
    }
}

#[test]
fn types_match_known_classification() {
    let expect = [
        (Identity::Landau, LevyType::Two),
        (Identity::SymBinomial, LevyType::Two),
        (Identity::NegbinDual, LevyType::One),
        (Identity::AbelDual, LevyType::Zero),
        (Identity::StableGamma { gamma: 1.5 }, LevyType::Two),
        (Identity::Frullani, LevyType::One),
        (Identity::KendallResselDual, LevyType::Zero),
    ];
    for (id, ty) in expect {
        assert_eq!(identity_representation(id).classify_type().unwrap(), ty, "{}", id.id());
    }
}

#[test]
fn uncorrected_ressel_density_is_not_levy() {
    let rep = LevyRepresentation::new("ressel_raw", Support::Positive, |x: f64| x - 1.0 + (-x).exp());
    assert!(matches!(rep.levy_mass(), Err(Error::NonConvergence(_))));
}

#[test]
fn takacs_mass_and_log4() {
    for r in [1.5, 2.0, 5.0] {
        let got = takacs_mass(r).unwrap();
        assert!((got - r.ln() / (r - 1.0)).abs() < 1e-10);
    }
    assert!((squared_exprel_integral().unwrap() - 4f64.ln()).abs() < 1e-10);
    assert!(takacs_mass(1.0).is_err());
}

#[test]
fn strict_arcsine_second_derivative() {
    for s in [0.5, 1.0, 3.0] {
        let want = 1.0 / s - s / (1.0 + s * s);
        assert!((strict_arcsine_exponent_second(s).unwrap() - want).abs() < 1e-10);
    }
}

#[test]
fn large_arcsine_density_matches_direct_formula() {
    let a = 0.7f64;
    for x in [0.3, 1.0, 4.0, 12.0] {
        let g = 1.0 - (-x * a.cos()).exp() * (a + x * a.sin()).sin() / a.sin();
        let got = arcsine_levy_density(ArcsineKind::Large { a }, x).unwrap();
        assert!((got - g / (x * x)).abs() < 1e-12, "x = {x}");
    }
    let small = arcsine_levy_density(ArcsineKind::Large { a }, 1e-9).unwrap();
    assert!((small - 0.5).abs() < 1e-8);
    let strict = arcsine_levy_density(ArcsineKind::Strict, 2.0).unwrap();
    assert!((strict - (1.0 - 2f64.cos()) / 4.0).abs() < 1e-15);
    assert!(arcsine_levy_density(ArcsineKind::Large { a: 2.0 }, 1.0).is_err());
}

#[test]
fn domain_and_parameter_errors() {
    assert!(verify_identity(Identity::SymBinomial, 1.5, TOL).is_err());
    assert!(verify_identity(Identity::TakacsDual { r: 0.5 }, 1.0, TOL).is_err());
    assert!(verify_identity(Identity::StableGamma { gamma: 2.5 }, 1.0, TOL).is_err());
    assert!("nope".parse::<Identity>().is_err());
}

