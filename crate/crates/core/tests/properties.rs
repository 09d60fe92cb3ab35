use kpp_speedlab::asymptotics::{find_proportional_counterexample_with, reverify_proportional, SearchOptions};
use kpp_speedlab::speed::{analytic_bounds, k_of_lambda, lower_bound_certificate, rescale_identity_check};
use kpp_speedlab::{
    make_grid, minimal_speed, speed_for_ab, BoundaryKind, CrossSection, DiffusionSpec, FlowProfile, KppReaction,
    ProblemSpec, ShearFlow,
};
use proptest::prelude::*;

fn section(periodic: bool, n: usize) -> CrossSection {
    let kind = if periodic { BoundaryKind::CirclePeriodic } else { BoundaryKind::IntervalNeumann };
    make_grid(kind, 1.0, n).unwrap()
}

fn cosine(cs: &CrossSection, amplitude: f64) -> ShearFlow {
    ShearFlow::new(FlowProfile::cosine(amplitude, 1), cs).unwrap()
}

fn spec_strategy() -> impl Strategy<Value = ProblemSpec> {
    (any::<bool>(), 8usize..96, 0.1f64..5.0, 0.01f64..5.0, 0.5f64..8.0, 0.2f64..4.0).prop_map(
        |(periodic, n, alpha, beta, amplitude, mu)| {
            let cs = section(periodic, n);
            let flow = cosine(&cs, amplitude);
            ProblemSpec::new(cs, DiffusionSpec::new(alpha, beta).unwrap(), flow, KppReaction::logistic(mu).unwrap())
                .unwrap()
        },
    )
}

/// Minimizer of `k(lambda)/lambda` over a 2000-point log grid.
fn scan_minimum(spec: &ProblemSpec, lo: f64, hi: f64) -> (f64, f64) {
    (0..2000)
        .map(|i| {
            let l = (lo.ln() + (hi / lo).ln() * i as f64 / 1999.0).exp();
            (l, k_of_lambda(spec, l).unwrap().eigenvalue / l)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bounds_sandwich_k(spec in spec_strategy(), log_l in -2.0f64..2.0) {
        let l = 10f64.powf(log_l);
        let k = k_of_lambda(&spec, l).unwrap().eigenvalue;
        let (lower, upper) = analytic_bounds(&spec, l);
        let slack = 1e-10 * (1.0 + k.abs());
        prop_assert!(lower <= k + slack && k <= upper + slack, "{lower} <= {k} <= {upper}");
    }

    #[test]
    fn k_is_midpoint_convex(spec in spec_strategy(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (l1, l2) = (10f64.powf(a), 10f64.powf(b));
        let k = |l: f64| k_of_lambda(&spec, l).unwrap().eigenvalue;
        prop_assert!(k(0.5 * (l1 + l2)) <= 0.5 * (k(l1) + k(l2)) + 1e-10);
    }

    #[test]
    fn zero_flow_speed_is_closed_form(periodic in any::<bool>(), n in 4usize..200, alpha in 0.05f64..20.0, beta in 1e-3f64..50.0, mu in 0.05f64..20.0) {
        let cs = section(periodic, n);
        let flow = ShearFlow::zero(&cs);
        let spec = ProblemSpec::new(cs, DiffusionSpec::new(alpha, beta).unwrap(), flow, KppReaction::logistic(mu).unwrap()).unwrap();
        let expected = 2.0 * (alpha * mu).sqrt();
        prop_assert!((minimal_speed(&spec).unwrap().c_star - expected).abs() <= 1e-10 * expected.max(1.0));
    }

    #[test]
    fn speed_increases_with_growth_rate(spec in spec_strategy(), factor in 1.05f64..3.0) {
        let mu = spec.growth_rate();
        let faster = ProblemSpec::new(spec.cross_section.clone(), spec.diffusion, spec.flow.clone(), KppReaction::logistic(mu * factor).unwrap()).unwrap();
        prop_assert!(minimal_speed(&faster).unwrap().c_star > minimal_speed(&spec).unwrap().c_star);
    }

    #[test]
    fn speed_lies_between_the_flow_free_and_maximal_values(spec in spec_strategy()) {
        let c = minimal_speed(&spec).unwrap().c_star;
        let base = 2.0 * (spec.diffusion.axial() * spec.growth_rate()).sqrt();
        prop_assert!(c >= base * (1.0 - 1e-10));
        prop_assert!(c <= base + spec.flow.max_value() + 1e-9);
    }

    #[test]
    fn rescaling_identity_holds(b in 0.05f64..20.0, amplitude in 0.5f64..8.0) {
        let cs = section(true, 64);
        let gap = rescale_identity_check(b, &cosine(&cs, amplitude), &KppReaction::logistic(1.0).unwrap(), &cs).unwrap();
        prop_assert!(gap <= 1e-8, "gap {gap}");
    }

    #[test]
    fn speed_is_continuous_in_the_amplitude(amplitude in 0.5f64..8.0, b in 0.05f64..5.0) {
        let cs = section(true, 64);
        let f = KppReaction::logistic(1.0).unwrap();
        let c = speed_for_ab(b, &cosine(&cs, amplitude), &f, &cs).unwrap().c_star;
        let c2 = speed_for_ab(b, &cosine(&cs, amplitude * (1.0 + 1e-6)), &f, &cs).unwrap().c_star;
        // The derivative in the amplitude is at most max q1 / amplitude = 1.
        prop_assert!((c2 - c).abs() <= 1e-6 * amplitude * 1.0001);
    }

    #[test]
    fn normalized_map_decreases(b1 in 0.25f64..16.0, ratio in 1.5f64..4.0) {
        let cs = section(true, 128);
        let flow = cosine(&cs, 6.0);
        let f = KppReaction::logistic(1.0).unwrap();
        let normalized = |beta: f64| {
            let spec = ProblemSpec::new(cs.clone(), DiffusionSpec::isotropic(beta).unwrap(), flow.scaled(beta.sqrt()), f.clone()).unwrap();
            minimal_speed(&spec).unwrap().c_star / beta.sqrt()
        };
        prop_assert!(normalized(b1 * ratio) < normalized(b1));
    }

    #[test]
    fn certificate_is_a_lower_bound(delta in 0.5f64..3.0, frac in 0.05f64..0.9) {
        let cs = section(true, 256);
        let flow = cosine(&cs, 6.0);
        let f = KppReaction::logistic(1.0).unwrap();
        let cert = lower_bound_certificate(&cs, &flow, &f, delta).unwrap();
        let b = frac * cert.b0;
        let spec = ProblemSpec::new(cs.clone(), DiffusionSpec::isotropic(b).unwrap(), flow.scaled(b.sqrt()), f).unwrap();
        prop_assert!(cert.at(b).unwrap() <= minimal_speed(&spec).unwrap().c_star / b.sqrt() + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn golden_section_matches_a_log_scan(spec in spec_strategy()) {
        let r = minimal_speed(&spec).unwrap();
        let (lo, hi) = (r.lambda_star / 20.0, r.lambda_star * 20.0);
        let (l_scan, c_scan) = scan_minimum(&spec, lo, hi);
        let cell = (hi / lo).ln() / 1999.0;
        prop_assert!(r.c_star <= c_scan + 1e-12 * c_scan);
        prop_assert!((r.lambda_star / l_scan).ln().abs() <= 2.0 * cell + 1e-6, "{} vs {}", r.lambda_star, l_scan);
    }

    #[test]
    fn counterexamples_reverify(amplitude in 4.5f64..9.0) {
        let cs = section(true, 128);
        let flow = cosine(&cs, amplitude);
        let f = KppReaction::logistic(1.0).unwrap();
        let opts = SearchOptions { confirm_cells: None, ..SearchOptions::default() };
        let r = find_proportional_counterexample_with(&flow, &f, &cs, None, &opts).unwrap();
        prop_assert!(r.margin > 0.0 && r.epsilon1 < r.m1);
        prop_assert!(2.0 + r.delta < amplitude - r.delta);
        let (small, large) = reverify_proportional(&r, &flow, &f, &cs).unwrap();
        prop_assert!(((small - large) - r.margin).abs() <= 1e-8 * r.margin);
    }
}
