use std::f64::consts::PI;

use heatobs::dynamics::NonlinearitySpec;
use heatobs::ensemble::{gaussian, PairEnsemble};
use heatobs::estimates::{
    backward_bound_check, chi_bound_check, chi_of, conditional_stability_check, conditional_stability_triple,
    fit_beta_c, fit_with_holdout, global_interpolation_check, gronwall_bound, gronwall_superlinear_check,
    integrate_scalar, local_energy_check, local_interpolation_check, observation_estimate_check, required_constant,
    unique_continuation_probe, SolutionPair, Triple,
};
use heatobs::obsregion::{build_region, Placement};
use heatobs::{Error, Field, GridSpec, Point};

fn spec() -> GridSpec {
    GridSpec::new(1, 256, 8.0).unwrap()
}

fn pairs(f: NonlinearitySpec, count: usize) -> Vec<SolutionPair> {
    let e = PairEnsemble { count, ..PairEnsemble::default() };
    e.pairs(&spec())
        .unwrap()
        .into_iter()
        .map(|(a, b)| SolutionPair::solve(&a, &b, f, 0.5, 0.005, 10).unwrap())
        .collect()
}

#[test]
fn chi_of_single_mode() {
    let s = GridSpec::new(1, 64, 2.0).unwrap();
    let xi = 3.0 * PI / 2.0;
    let f = Field::from_fn(s, |x| (xi * x[0]).sin()).unwrap();
    assert!((chi_of(&f).unwrap() - (1.0 + xi * xi)).abs() < 1e-10);
    assert!(chi_of(&Field::zeros(s)).is_none());
}

#[test]
fn required_constant_matches_lambert_cases() {
    // C e^{Cχ} = a/b: with a/b = e and χ = 1 the root is C = 1
    assert!((required_constant(1f64.exp(), 1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    assert!((required_constant(6.0, 2.0, 0.0).unwrap() - 3.0).abs() < 1e-12);
    let c = required_constant(50.0, 0.3, 2.5).unwrap();
    assert!((c * (c * 2.5).exp() - 50.0 / 0.3).abs() < 1e-9 * 50.0 / 0.3);
}

#[test]
fn fit_recovers_exact_law() {
    let triples: Vec<Triple> = (1..=12)
        .map(|i| {
            let a = 1.0 + i as f64;
            let b = if i % 2 == 0 { 3.0 * a } else { a / (2.0 + i as f64) };
            Triple { lhs: 2.0 * a.powf(0.7) * b.powf(0.3), a, b }
        })
        .collect();
    let (beta, c) = fit_beta_c(&triples).unwrap();
    assert!((beta - 0.3).abs() < 1e-9);
    assert!((c - 2.0).abs() < 1e-9);
    let fit = fit_with_holdout(&triples, 0.25).unwrap();
    assert_eq!((fit.train, fit.holdout), (9, 3));
    assert!(fit.pass());
    assert!(matches!(fit_beta_c(&triples[..2]), Err(Error::InsufficientData { .. })));
}

#[test]
fn chi_bounds_hold_along_cubic_ensemble() {
    for pair in pairs(NonlinearitySpec::power_odd(1.0, 3.0).unwrap(), 6) {
        assert!(chi_bound_check(&pair).unwrap().pass);
        assert!(backward_bound_check(&pair).unwrap().pass);
    }
}

#[test]
fn heat_chi_is_nonincreasing() {
    for pair in pairs(NonlinearitySpec::zero(), 4) {
        let rep = chi_bound_check(&pair).unwrap();
        assert!(rep.lhs <= 1.0 + 1e-12);
    }
}

#[test]
fn interpolation_pipeline_on_heat_ensemble() {
    let region = build_region(&spec(), 1.0, 0.25, Placement::Centered).unwrap();
    let ps = pairs(NonlinearitySpec::zero(), 10);
    let triples: Vec<Triple> = ps.iter().map(|p| global_interpolation_check(p, &region).unwrap()).collect();
    let fit = fit_with_holdout(&triples, 0.2).unwrap();
    assert!(fit.pass(), "{fit:?}");
    for t in &triples {
        assert!(t.lhs <= t.a * (1.0 + 1e-12));
    }
    let rep = observation_estimate_check(&ps[0], &region).unwrap();
    assert!(rep.pass && rep.rhs_factors["C_req"] > 0.0);
}

#[test]
fn local_quantities_are_finite() {
    let region = build_region(&spec(), 0.5, 0.125, Placement::Centered).unwrap();
    let ps = pairs(NonlinearitySpec::power_odd(1.0, 3.0).unwrap(), 2);
    for j in [0, 7, 16] {
        let rep = local_energy_check(&ps[0], &region, j, 0.5).unwrap();
        assert!(rep.pass);
        assert!(rep.rhs_factors["sup_rho0"] <= 1.0 + 1e-9);
        assert!(local_interpolation_check(&ps[1], &region, j, 0.5).unwrap().pass);
    }
    assert!(local_interpolation_check(&ps[0], &region, 0, 1.0).is_err());
}

#[test]
fn stability_rejects_supercritical_power() {
    let region = build_region(&spec(), 1.0, 0.25, Placement::Centered).unwrap();
    let ok = pairs(NonlinearitySpec::power_odd(1.0, 2.0).unwrap(), 10);
    let triples: Vec<_> = ok.iter().map(|p| conditional_stability_triple(p, &region, None).unwrap()).collect();
    for t in &triples {
        assert!(t.a_delta <= t.a_class * (1.0 + 1e-12));
    }
    assert!(conditional_stability_check(&triples, 0.2).unwrap().pass);
    let bad = pairs(NonlinearitySpec::power_odd(0.1, 5.0).unwrap(), 1);
    assert!(matches!(
        conditional_stability_triple(&bad[0], &region, None),
        Err(Error::ExponentOutOfRange { .. })
    ));
}

#[test]
fn linear_probe_is_rank_consistent() {
    let region = build_region(&spec(), 1.0, 0.25, Placement::Centered).unwrap();
    let y0 = gaussian(&spec(), &Point::new(&[0.5]), 0.2, 1.0);
    let table = unique_continuation_probe(&y0, &[1e-1, 1e-2, 1e-3], NonlinearitySpec::zero(), &region, 0.5, 0.005, 100)
        .unwrap();
    assert_eq!(table.rows.len(), 3);
    let r0 = table.rows[0].omega_mass / table.rows[0].phi_t_l2sq;
    for row in &table.rows {
        assert!(row.omega_mass > 0.0);
        assert!((row.omega_mass / row.phi_t_l2sq - r0).abs() < 1e-9 * r0);
    }
    assert!(table.report().pass);
}

#[test]
fn gronwall_linear_case_and_integrator() {
    let times = [0.5, 1.0, 2.0];
    let y = integrate_scalar(|_, y| -y, 1.0, &times, 1e-12, 1e-14).unwrap();
    for (t, v) in times.iter().zip(&y) {
        assert!((v - (-t).exp()).abs() < 1e-10);
    }
    let rep = gronwall_superlinear_check(1.0, 0.5, 2.0, 0.5, 0.5, 20).unwrap();
    assert!(rep.pass);
    assert!(gronwall_bound(1.0, 0.5, 2.0, 0.5).is_finite());
}
