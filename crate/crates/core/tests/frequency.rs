use std::f64::consts::{FRAC_PI_4, PI};

use heatobs::dynamics::{solve_semilinear, NonlinearitySpec};
use heatobs::ensemble::gaussian;
use heatobs::frequency::{
    convexity_bookkeeping, frequency, frequency_derivative_check, frequency_trace, gaussian_weight,
    log_convexity_check, logcon_constants, variational_identity_check, CutoffFamily, CutoffKind, SampledFunction,
};
use heatobs::{Field, GridSpec, Point};

#[test]
fn weight_has_fixed_mass_and_is_backward_caloric() {
    let spec = GridSpec::new(2, 128, 12.0).unwrap();
    let c = Point::new(&[0.5, -0.25]);
    let g = gaussian_weight(&spec, &c, 0.1, 0.3, 1.0).unwrap();
    let mass: f64 = g.values().iter().sum::<f64>() * spec.cell_volume();
    assert!((mass - 4.0 * PI).abs() < 1e-9);
    let k = 1e-4;
    let later = gaussian_weight(&spec, &c, 0.1, 0.3 + k, 1.0).unwrap();
    let earlier = gaussian_weight(&spec, &c, 0.1, 0.3 - k, 1.0).unwrap();
    let dt = later.sub(&earlier).unwrap().scale(0.5 / k);
    let residual = dt.add(&g.laplacian()).unwrap().max_abs();
    assert!(residual < 1e-5 * g.laplacian().max_abs(), "{residual}");
}

#[test]
fn frequency_of_centered_gaussian() {
    // η ≡ 1 on the support, so N = 1/(8s²a) with a = 1/(2s) + 1/(4h) at t = T
    let spec = GridSpec::new(1, 512, 8.0).unwrap();
    let cutoff = CutoffFamily::new(&spec, Point::origin(), 1.0, CutoffKind::Eta).unwrap();
    let (s, h) = (0.05, 0.1);
    let phi = gaussian(&spec, &Point::origin(), s, 1.0).with_time(0.5);
    let a = 1.0 / (2.0 * s) + 1.0 / (4.0 * h);
    let expected = 1.0 / (8.0 * s * s * a);
    assert!((expected - 4.0).abs() < 1e-12);
    assert!((frequency(&phi, &cutoff, h, 0.5).unwrap() - expected).abs() < 1e-9);
}

#[test]
fn frequency_scale_and_translation() {
    let spec = GridSpec::new(1, 256, 8.0).unwrap();
    let phi = Field::from_fn(spec, |x| (FRAC_PI_4 * (x[0] - 0.3)).sin() + 0.2).unwrap().with_time(0.2);
    let cutoff = CutoffFamily::new(&spec, Point::origin(), 1.0, CutoffKind::Eta).unwrap();
    let n = frequency(&phi, &cutoff, 0.1, 0.5).unwrap();
    let scaled = frequency(&phi.scale(-7.5).with_time(0.2), &cutoff, 0.1, 0.5).unwrap();
    assert!((n - scaled).abs() < 1e-12 * n);
    // shift by 2 = 32 cells
    let shifted = Field::from_fn(spec, |x| (FRAC_PI_4 * (x[0] - 2.3)).sin() + 0.2).unwrap().with_time(0.2);
    let moved = CutoffFamily::new(&spec, Point::new(&[2.0]), 1.0, CutoffKind::Eta).unwrap();
    let m = frequency(&shifted, &moved, 0.1, 0.5).unwrap();
    assert!((n - m).abs() < 1e-9 * n);
}

fn heat_pair() -> (heatobs::dynamics::Trajectory, heatobs::dynamics::Trajectory) {
    let spec = GridSpec::new(1, 256, 8.0).unwrap();
    let a = gaussian(&spec, &Point::new(&[0.3]), 0.2, 1.0);
    let b = gaussian(&spec, &Point::new(&[-0.4]), 0.3, 0.7);
    let f = NonlinearitySpec::zero();
    (
        solve_semilinear(&a, f, 0.5, 0.005, 1).unwrap(),
        solve_semilinear(&b, f, 0.5, 0.005, 1).unwrap(),
    )
}

#[test]
fn variational_identity_converges() {
    let (a, b) = heat_pair();
    let phi = a.difference(&b).unwrap();
    let cutoff = CutoffFamily::new(a.spec(), Point::new(&[0.5]), 1.0, CutoffKind::Eta).unwrap();
    let rep = variational_identity_check(&phi, &cutoff, 0.1, 0.5, 0.25).unwrap();
    assert!(rep.pass);
    assert!(rep.lhs < 1e-3, "{}", rep.lhs);
}

#[test]
fn derivative_bound_and_log_convexity_on_heat_pair() {
    let (a, b) = heat_pair();
    let phi = a.difference(&b).unwrap();
    let cutoff = CutoffFamily::new(a.spec(), Point::new(&[0.5]), 1.0, CutoffKind::Eta).unwrap();
    let trace = frequency_trace(&phi, &cutoff, 8, 0.1, (0.0, 0.5)).unwrap();
    let rep = frequency_derivative_check(&trace, &a, &b, &cutoff, 0.0).unwrap();
    assert!(rep.pass, "{}", rep.to_json());
    let (ct, cb) = logcon_constants(&trace).unwrap();
    let g = SampledFunction::new(trace.times.clone(), trace.den.clone()).unwrap();
    for (t1, t2, t3) in [(0.05, 0.2, 0.4), (0.1, 0.3, 0.5), (0.0, 0.25, 0.45)] {
        assert!(log_convexity_check(&g, t1, t2, t3, 0.1, 0.5, ct, cb).unwrap().pass);
    }
}

#[test]
fn bookkeeping_at_l_one() {
    let b = convexity_bookkeeping(1.0, 0.1, 0.0).unwrap();
    let d = 2f64.ln() / 1.5f64.ln();
    assert!((b.d_l - d).abs() < 1e-14);
    assert!((b.k_l - (2.0 * d * 0.1 + 0.2)).abs() < 1e-14);
}
