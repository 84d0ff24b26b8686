use proptest::prelude::*;

use replicalc::power::{self, PowerSpec};
use replicalc::replication::{self, prob_replication, ReplicationQuery, SampleSize};
use replicalc::{convolve, discretize_gaussian, DiscreteDist, Probability, RangeSpec, StudyDesign, TailDirection};

fn one(p: f64) -> Probability {
    Probability::one_sided(p).unwrap()
}

fn p_value() -> impl Strategy<Value = f64> {
    (-12.0f64..-0.01).prop_map(|e| 10f64.powf(e))
}

fn query(p3: f64, n2: SampleSize) -> ReplicationQuery {
    ReplicationQuery::new(one(p3), n2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn design_form_matches_p_value_form(p1 in p_value(), p3 in p_value(), sd in 0.1f64..50.0, n in 2u64..10_000) {
        let d = StudyDesign::from_p_value(one(p1), sd, n).unwrap();
        let a = prob_replication(&d, &query(p3, SampleSize::Finite(n))).value();
        let b = replication::prob_replication_from_p(one(p1), one(p3)).unwrap().value();
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn infinite_n2_matches_truth_form(p1 in p_value(), p3 in p_value(), n in 2u64..10_000) {
        let d = StudyDesign::from_p_value(one(p1), 3.0, n).unwrap();
        let a = prob_replication(&d, &query(p3, SampleSize::Infinite)).value();
        let b = replication::prob_replication_infinite_from_p(one(p1), one(p3)).unwrap().value();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn monotone_in_n2(b in 0.0f64..5.0, n1 in 2u64..500, n2 in 2u64..1_000_000, step in 1u64..1000) {
        let d = StudyDesign::crossover(b, 10.0, n1).unwrap();
        let q = |n| query(0.025, n);
        let small = prob_replication(&d, &q(SampleSize::Finite(n2))).value();
        let large = prob_replication(&d, &q(SampleSize::Finite(n2 + step))).value();
        let limit = prob_replication(&d, &q(SampleSize::Infinite)).value();
        prop_assert!(small <= large + 1e-15);
        prop_assert!(large <= limit + 1e-15);
    }

    #[test]
    fn truth_limit_bounds_finite_replication(p1 in 1e-12f64..0.025, p3 in 1e-6f64..0.5) {
        // For a significant original the ordering P(finite) <= P(infinite) holds,
        // and both exceed the rival's flat null threshold only when p1 <= p3.
        let finite = replication::prob_replication_from_p(one(p1), one(p3)).unwrap().value();
        let infinite = replication::prob_replication_infinite_from_p(one(p1), one(p3)).unwrap().value();
        prop_assert!(finite <= infinite + 1e-15);
        if p1 <= p3 {
            prop_assert!(infinite >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn fixed_point_of_infinite_form(p in 1e-9f64..0.999) {
        let v = replication::prob_replication_infinite_from_p(one(p), one(p)).unwrap().value();
        prop_assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn p_rep_infinite_is_complement(p in 1e-9f64..0.999) {
        let v = replication::p_rep(one(p), true).unwrap().value();
        prop_assert!((v - (1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn doubling_law(b in 0.05f64..10.0, sd in 0.1f64..50.0, target in 0.15f64..0.999, alpha in 0.001f64..0.2) {
        let spec = PowerSpec::new(b, sd, Probability::two_sided(alpha).unwrap(), target, 2).unwrap();
        let lik = power::required_n_likelihood(&spec).unwrap().exact;
        let pred = power::required_n_predictive(&spec).unwrap().exact;
        prop_assert_eq!(pred, 2.0 * lik);
    }

    #[test]
    fn multiplicity_orders_sample_sizes(b in 0.05f64..10.0, target in 0.05f64..0.999) {
        let spec = PowerSpec::new(b, 10.0, Probability::two_sided(0.05).unwrap(), target, 1).unwrap();
        let n = |m| power::required_n_predictive(&spec.with_multiplicity(m).unwrap()).unwrap().exact;
        prop_assert!(n(1) < n(2) && n(2) < n(3));
        prop_assert!((n(3) - 3.0 * n(1)).abs() <= 1e-9 * n(3));
    }

    #[test]
    fn two_variance_predictive_is_replication(b in 0.01f64..8.0, n in 2u64..5000) {
        let spec = PowerSpec::new(b, 10.0, Probability::two_sided(0.05).unwrap(), 0.8, 2).unwrap();
        let pred = power::predictive_power(n, &spec).unwrap();
        let d = StudyDesign::crossover(b, 10.0, n).unwrap();
        let rep = prob_replication(&d, &query(0.025, SampleSize::Finite(n))).value();
        prop_assert!((pred - rep).abs() < 1e-12);
    }

    #[test]
    fn power_roundtrip(b in 0.05f64..10.0, sd in 0.1f64..50.0, target in 0.05f64..0.995, m in 1u8..=3) {
        let spec = PowerSpec::new(b, sd, Probability::two_sided(0.05).unwrap(), target, m).unwrap();
        let n = power::required_n_predictive(&spec).unwrap().exact;
        prop_assert!((power::power_at(n, &spec) - target).abs() < 1e-9);
    }

    #[test]
    fn convolution_conserves_mass(
        xs in prop::collection::vec(0.0f64..1.0, 1..60),
        ys in prop::collection::vec(0.0f64..1.0, 1..60),
    ) {
        let scale = |v: Vec<f64>| {
            let total: f64 = v.iter().sum::<f64>() + 1.0;
            v.into_iter().map(|x| x / total).collect::<Vec<_>>()
        };
        let a = DiscreteDist::new(-0.3, 0.1, scale(xs)).unwrap();
        let b = DiscreteDist::new(1.2, 0.1, scale(ys)).unwrap();
        let c = convolve(&a, &b).unwrap();
        prop_assert!((c.total_mass() - a.total_mass() * b.total_mass()).abs() <= 1e-12);
    }

    #[test]
    fn tail_partition(mean in -3.0f64..7.0, sd in 0.05f64..4.0, k in 0usize..=1200) {
        let d = discretize_gaussian(mean, sd, &RangeSpec::reference()).unwrap();
        let t = d.edge(k);
        let above = d.tail_mass(t, TailDirection::AtOrAbove).unwrap();
        let below = d.tail_mass(t, TailDirection::Below).unwrap();
        prop_assert!((above + below - d.total_mass()).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn discretised_tail_tracks_kernel(mean in -1.0f64..5.0, sd in 0.5f64..1.5, k in 0usize..=1200) {
        let d = discretize_gaussian(mean, sd, &RangeSpec::reference()).unwrap();
        let t = d.edge(k);
        let exact = replicalc::normal::standard_normal_sf((t - mean) / sd);
        let phi_max = replicalc::normal::FRAC_1_SQRT_2PI / sd;
        let truncated = d.missing_mass();
        let tail = d.tail_mass(t, TailDirection::AtOrAbove).unwrap();
        prop_assert!((tail - exact).abs() <= d.delta() * phi_max + truncated);
    }
}
