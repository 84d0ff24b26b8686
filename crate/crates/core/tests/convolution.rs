mod common;

use replicalc::{convolve, discretize_gaussian, RangeSpec, TailDirection};

#[test]
fn closure_at_coarse_grid() {
    let (sum, direct) = common::convolution_example(0.01);
    let err = common::sup_norm(&sum, &direct);
    assert!(err <= 1e-6, "{err:e}");
}

#[test]
fn closure_at_fine_grid() {
    let (sum, direct) = common::convolution_example(0.001);
    let err = common::sup_norm(&sum, &direct);
    assert!(err <= 1e-8, "{err:e}");
}

#[test]
fn replication_tail_matches_closed_form() {
    let (sum, _) = common::convolution_example(0.01);
    let t = sum.nearest_edge(2.7718);
    assert!((t - 2.77).abs() < 1e-12);
    let tail = sum.tail_mass(t, TailDirection::AtOrAbove).unwrap();
    assert!((tail - 0.283).abs() < 1e-3, "{tail}");
}

#[test]
fn refinement_keeps_tails() {
    let tail = |delta| {
        let (sum, _) = common::convolution_example(delta);
        sum.tail_mass(sum.nearest_edge(2.77), TailDirection::AtOrAbove).unwrap()
    };
    assert!((tail(0.01) - tail(0.001)).abs() < 1e-4);
}

#[test]
fn convolution_output_is_reproducible() {
    let a = discretize_gaussian(0.3, 0.8, &RangeSpec::new(-3.0, 4.0, 0.01).unwrap()).unwrap();
    let b = discretize_gaussian(-1.0, 1.3, &RangeSpec::centered(5.0, 0.01).unwrap()).unwrap();
    let first = convolve(&a, &b).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let second = pool.install(|| convolve(&a, &b).unwrap());
    assert_eq!(first, second);
}
