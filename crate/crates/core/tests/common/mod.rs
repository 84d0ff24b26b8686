#![allow(dead_code)]

pub mod oracle;

use replicalc::{convolve, discretize_gaussian, DiscreteDist, RangeSpec};

/// The worked convolution example: the truth-given-data distribution
/// N(1.96, 1) on [-4, 8) convolved with unit replication noise, next to the
/// directly discretised N(1.96, 2) on the same output grid.
pub fn convolution_example(delta: f64) -> (DiscreteDist, DiscreteDist) {
    let truth = discretize_gaussian(1.96, 1.0, &RangeSpec::new(-4.0, 8.0, delta).unwrap()).unwrap();
    let noise = discretize_gaussian(0.0, 1.0, &RangeSpec::centered(6.0, delta).unwrap()).unwrap();
    let sum = convolve(&truth, &noise).unwrap();
    let hi = sum.edge(sum.len());
    let direct = discretize_gaussian(1.96, 2f64.sqrt(), &RangeSpec::new(sum.origin(), hi, delta).unwrap()).unwrap();
    (sum, direct)
}

pub fn sup_norm(a: &DiscreteDist, b: &DiscreteDist) -> f64 {
    assert_eq!(a.len(), b.len());
    assert!((a.origin() - b.origin()).abs() < 1e-9);
    a.masses()
        .iter()
        .zip(b.masses())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
