use heatobs::dynamics::{solve_semilinear, NonlinearitySpec};
use heatobs::ensemble::{band_limited, rng};
use heatobs::estimates::{fit_with_holdout, required_constant, Triple};
use heatobs::frequency::{frequency, log_convexity_check, CutoffFamily, CutoffKind, SampledFunction};
use heatobs::obsregion::{build_region, Placement};
use heatobs::semigroup::heat_propagate;
use heatobs::{Exponent, Field, GridSpec, Point};
use proptest::prelude::*;

fn random_field(dim: usize, seed: u64) -> Field {
    let m = if dim == 1 { 64 } else { 16 };
    let spec = GridSpec::new(dim, m, 3.0).unwrap();
    band_limited(&spec, &mut rng(seed), if dim == 1 { 6 } else { 3 })
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(dim in 1usize..=3, seed in any::<u64>()) {
        let f = random_field(dim, seed);
        let spectral = f.sobolev_norm(0).powi(2);
        prop_assert!((spectral - f.l2_sq()).abs() <= 1e-10 * f.l2_sq());
    }

    #[test]
    fn holder_ordering(dim in 1usize..=2, seed in any::<u64>(), p in 1.0f64..4.0, dq in 0.1f64..4.0) {
        let f = random_field(dim, seed);
        let q = p + dq;
        let vol = f.spec().box_volume();
        let np = f.lp_norm(Exponent::Finite(p)).unwrap();
        let nq = f.lp_norm(Exponent::Finite(q)).unwrap();
        prop_assert!(np <= vol.powf(1.0 / p - 1.0 / q) * nq * (1.0 + 1e-12));
        let ninf = f.lp_norm(Exponent::Infinity).unwrap();
        prop_assert!(nq <= vol.powf(1.0 / q) * ninf * (1.0 + 1e-12));
    }

    #[test]
    fn heat_contracts_and_composes(dim in 1usize..=2, seed in any::<u64>(), s in 0.01f64..0.5, t in 0.01f64..0.5) {
        let f = random_field(dim, seed);
        let ft = heat_propagate(&f, t).unwrap();
        for p in [Exponent::Finite(2.0), Exponent::Infinity] {
            prop_assert!(ft.lp_norm(p).unwrap() <= f.lp_norm(p).unwrap() * (1.0 + 1e-10));
        }
        prop_assert!((ft.mean() - f.mean()).abs() < 1e-12);
        let two = heat_propagate(&heat_propagate(&f, s).unwrap(), t).unwrap();
        let one = heat_propagate(&f, s + t).unwrap();
        prop_assert!(two.sub(&one).unwrap().max_abs() < 1e-12 * (1.0 + f.max_abs()));
    }

    #[test]
    fn zero_nonlinearity_is_exact_heat(seed in any::<u64>(), dt in 0.01f64..0.2) {
        let f = random_field(1, seed);
        let tr = solve_semilinear(&f, NonlinearitySpec::zero(), 0.4, dt, 1).unwrap();
        let exact = heat_propagate(&f, tr.final_time()).unwrap();
        prop_assert!(tr.last().sub(&exact).unwrap().max_abs() < 1e-11 * (1.0 + f.max_abs()));
    }

    #[test]
    fn defocusing_flow_composes(y in -5.0f64..5.0, s in 0.0f64..2.0, t in 0.0f64..2.0, p in 1.5f64..5.0) {
        let f = NonlinearitySpec::power_odd(1.0, p).unwrap();
        let a = f.ode_flow(f.ode_flow(y, s), t);
        let b = f.ode_flow(y, s + t);
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + y.abs()));
        prop_assert!(b.abs() <= y.abs());
    }

    #[test]
    fn mask_monotone_in_radius(seed in any::<u64>(), r1 in 0.15f64..0.5, dr in 0.0f64..0.5) {
        let spec = GridSpec::new(1, 128, 4.0).unwrap();
        let f = band_limited(&spec, &mut rng(seed), 8);
        let r2 = (r1 + dr).min(0.5);
        let small = build_region(&spec, 1.0, r1, Placement::Centered).unwrap();
        let big = build_region(&spec, 1.0, r2, Placement::Centered).unwrap();
        prop_assert!(f.masked_l2(small.mask()).unwrap() <= f.masked_l2(big.mask()).unwrap());
        prop_assert!(f.masked_l2(big.mask()).unwrap() <= f.l2_sq() * (1.0 + 1e-12));
    }

    #[test]
    fn frequency_scale_invariant(seed in any::<u64>(), c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0]) {
        let spec = GridSpec::new(1, 128, 8.0).unwrap();
        let f = band_limited(&spec, &mut rng(seed), 6).with_time(0.1);
        let cutoff = CutoffFamily::new(&spec, Point::new(&[1.0]), 1.0, CutoffKind::Eta).unwrap();
        let a = frequency(&f, &cutoff, 0.1, 0.5).unwrap();
        let b = frequency(&f.scale(c).with_time(0.1), &cutoff, 0.1, 0.5).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs());
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn convexity_exponent_matches_quadrature(t1 in 0.0f64..0.3, d2 in 0.01f64..0.3, d3 in 0.01f64..0.3, h in 0.01f64..0.5) {
        let t2 = t1 + d2;
        let t3 = t2 + d3;
        let big_t = 1.0;
        let g = SampledFunction::new(vec![0.0, big_t], vec![1.0, 1.0]).unwrap();
        let rep = log_convexity_check(&g, t1, t2, t3, h, big_t, 0.0, 0.0).unwrap();
        let w = |t: f64| 1.0 / (big_t - t + h);
        let d = simpson(w, t2, t3, 4000) / simpson(w, t1, t2, 4000);
        prop_assert!((rep.rhs_factors["D"] - d).abs() < 1e-9 * d);
        prop_assert!(rep.pass);
    }

    #[test]
    fn fitted_law_covers_training(seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng(seed);
        let triples: Vec<Triple> = (0..15)
            .map(|_| Triple { lhs: r.gen_range(0.01..1.0), a: r.gen_range(0.5..2.0), b: r.gen_range(1e-4..0.5) })
            .collect();
        let fit = fit_with_holdout(&triples, 0.2).unwrap();
        prop_assert!(fit.train_worst <= 1.0 + 1e-12);
        prop_assert!(fit.beta > 0.0 && fit.beta < 1.0 && fit.c > 0.0);
    }

    #[test]
    fn required_constant_solves_its_equation(a in 1e-3f64..1e3, b in 1e-3f64..1e3, chi in 0.0f64..20.0) {
        let c = required_constant(a, b, chi).unwrap();
        prop_assert!(((c.ln() + c * chi) - (a / b).ln()).abs() < 1e-10 * (1.0 + (a / b).ln().abs()));
    }
}
