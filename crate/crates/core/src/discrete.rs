//! Discretised probability masses on a fixed-width grid.
//!
//! A [`DiscreteDist`] holds the probability of each half-open bin
//! `[origin + k*delta, origin + (k+1)*delta)`, labelled by its lower edge, the
//! way a reading of 120 on a millimetre scale means "at least 120, below 121".
//! Mass falling outside the grid is reported as missing, never renormalised
//! away; [`DiscreteDist::normalize`] does that explicitly when wanted.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::normal::{standard_normal_cdf, standard_normal_quantile, standard_normal_sf, Probability};

const EDGE_TOL: f64 = 1e-9;

/// A finite grid `[lo, hi)` cut into bins of width `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    lo: f64,
    hi: f64,
    delta: f64,
    bins: usize,
}

impl RangeSpec {
    pub fn new(lo: f64, hi: f64, delta: f64) -> Result<Self> {
        let invalid = |reason| Error::InvalidRange { lo, hi, delta, reason };
        if !(lo.is_finite() && hi.is_finite() && delta.is_finite()) {
            return Err(invalid("bounds must be finite"));
        }
        if delta <= 0.0 {
            return Err(invalid("bin width must be positive"));
        }
        if lo >= hi {
            return Err(invalid("lo must be below hi"));
        }
        let ratio = (hi - lo) / delta;
        let bins = ratio.round();
        if bins < 1.0 || (ratio - bins).abs() > EDGE_TOL * bins.max(1.0) {
            return Err(invalid("width is not a whole number of bins"));
        }
        Ok(RangeSpec {
            lo,
            hi,
            delta,
            bins: bins as usize,
        })
    }

    /// `2k + 1` bins with the middle one centred on zero, where
    /// `k = round(half_width / delta)`.
    pub fn centered(half_width: f64, delta: f64) -> Result<Self> {
        check_positive("delta", delta)?;
        let k = (half_width / delta).round().max(0.0);
        let reach = (k + 0.5) * delta;
        Self::new(-reach, reach, delta)
    }

    /// `[-4, 8)` at width 0.01: 1200 bins.
    pub fn reference() -> Self {
        Self::new(-4.0, 8.0, 0.01).expect("valid reference grid")
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn bins(&self) -> usize {
        self.bins
    }
}

/// Which side of a threshold to accumulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDirection {
    AtOrAbove,
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    origin: f64,
    delta: f64,
    masses: Vec<f64>,
}

impl DiscreteDist {
    pub fn new(origin: f64, delta: f64, masses: Vec<f64>) -> Result<Self> {
        if !origin.is_finite() {
            return Err(Error::NonFinite("origin"));
        }
        check_positive("delta", delta)?;
        if masses.is_empty() {
            return Err(Error::Dataset("distribution has no bins".into()));
        }
        if let Some(&bad) = masses.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::OutOfRange {
                name: "mass",
                value: bad,
                range: "[0, inf)",
            });
        }
        let total = accurate_sum(&masses);
        if total > 1.0 + 1e-12 {
            return Err(Error::OutOfRange {
                name: "total mass",
                value: total,
                range: "[0, 1]",
            });
        }
        Ok(DiscreteDist { origin, delta, masses })
    }

    /// All mass in the single bin `[-delta/2, delta/2)`; the identity for
    /// [`convolve`].
    pub fn point_mass_at_zero(delta: f64) -> Result<Self> {
        Self::new(-0.5 * delta, delta, vec![1.0])
    }

    /// Equal mass `1 / bins` in every bin: a proper flat prior on the grid.
    pub fn uniform(range: &RangeSpec) -> Self {
        let bins = range.bins;
        DiscreteDist {
            origin: range.lo,
            delta: range.delta,
            masses: vec![1.0 / bins as f64; bins],
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Lower edge of bin `k` (`k == len()` gives the upper end of the grid).
    pub fn edge(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.delta
    }

    pub fn total_mass(&self) -> f64 {
        accurate_sum(&self.masses)
    }

    /// Probability lost to truncation at the grid ends.
    pub fn missing_mass(&self) -> f64 {
        (1.0 - self.total_mass()).max(0.0)
    }

    pub fn normalize(&self) -> Result<Self> {
        let total = self.total_mass();
        if total <= 0.0 {
            return Err(Error::OutOfRange {
                name: "total mass",
                value: total,
                range: "(0, 1]",
            });
        }
        Ok(DiscreteDist {
            origin: self.origin,
            delta: self.delta,
            masses: self.masses.iter().map(|m| m / total).collect(),
        })
    }

    /// The bin edge closest to `x`. Thresholds that do not fall on the grid
    /// must be snapped through this before querying tails.
    pub fn nearest_edge(&self, x: f64) -> f64 {
        self.origin + ((x - self.origin) / self.delta).round() * self.delta
    }

    /// Index of the edge at `threshold`, possibly outside `0..=len()`.
    fn edge_index(&self, threshold: f64) -> Result<i64> {
        let misaligned = Error::Misaligned {
            threshold,
            origin: self.origin,
            delta: self.delta,
        };
        if !threshold.is_finite() {
            return Err(misaligned);
        }
        let k = ((threshold - self.origin) / self.delta).round();
        let edge = self.origin + k * self.delta;
        if (threshold - edge).abs() > EDGE_TOL * threshold.abs().max(1.0) {
            return Err(misaligned);
        }
        Ok(k as i64)
    }

    fn split_at(&self, threshold: f64) -> Result<usize> {
        let k = self.edge_index(threshold)?;
        Ok(k.clamp(0, self.masses.len() as i64) as usize)
    }

    /// Mass on one side of a bin edge.
    pub fn tail_mass(&self, threshold: f64, direction: TailDirection) -> Result<f64> {
        let k = self.split_at(threshold)?;
        let side = match direction {
            TailDirection::AtOrAbove => &self.masses[k..],
            TailDirection::Below => &self.masses[..k],
        };
        Ok(accurate_sum(side))
    }

    /// Mass in `[lo, hi)`; both ends must be bin edges.
    pub fn interval_mass(&self, lo: f64, hi: f64) -> Result<f64> {
        let a = self.split_at(lo)?;
        let b = self.split_at(hi)?;
        Ok(if b > a { accurate_sum(&self.masses[a..b]) } else { 0.0 })
    }

    /// Writes `bin_lower_edge,mass` rows with a single header line.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["bin_lower_edge", "mass"])?;
        for (k, m) in self.masses.iter().enumerate() {
            w.write_record([format_edge(self.edge(k)), m.to_string()])?;
        }
        w.flush()
    }
}

/// Edge labels rounded to 12 decimals so grid arithmetic noise stays out of
/// the file.
fn format_edge(x: f64) -> String {
    let rounded = (x * 1e12).round() / 1e12;
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

/// Probability of the interval `[a, b)` under `N(mean, sd^2)`, taken from the
/// tail that keeps relative precision.
fn gaussian_interval(a: f64, b: f64, mean: f64, sd: f64) -> f64 {
    let za = (a - mean) / sd;
    let zb = (b - mean) / sd;
    if za >= 0.0 {
        standard_normal_sf(za) - standard_normal_sf(zb)
    } else {
        standard_normal_cdf(zb) - standard_normal_cdf(za)
    }
}

/// Bins a Gaussian: each bin gets `Phi((x + delta - mean)/sd) - Phi((x - mean)/sd)`.
pub fn discretize_gaussian(mean: f64, sd: f64, range: &RangeSpec) -> Result<DiscreteDist> {
    if !mean.is_finite() {
        return Err(Error::NonFinite("mean"));
    }
    check_positive("sd", sd)?;
    let masses = (0..range.bins)
        .map(|k| {
            let a = range.lo + k as f64 * range.delta;
            let b = range.lo + (k + 1) as f64 * range.delta;
            gaussian_interval(a, b, mean, sd).max(0.0)
        })
        .collect();
    Ok(DiscreteDist {
        origin: range.lo,
        delta: range.delta,
        masses,
    })
}

/// Neumaier-compensated sum, so complementary tails add up to the total to
/// within an ulp or so.
fn accurate_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &x in xs {
        let t = sum + x;
        carry += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + carry
}

/// Distribution of the sum of two independent discretised quantities.
///
/// Each bin stands for its midpoint, and midpoints add, so the result's
/// origin is `a.origin + b.origin + delta / 2`. Output bin `k` sums
/// `a[i] * b[k - i]` in increasing `i`, whatever the thread count.
pub fn convolve(a: &DiscreteDist, b: &DiscreteDist) -> Result<DiscreteDist> {
    if (a.delta - b.delta).abs() > 1e-12 * a.delta.max(b.delta) {
        return Err(Error::DeltaMismatch(a.delta, b.delta));
    }
    let (x, y) = (&a.masses, &b.masses);
    let len = x.len() + y.len() - 1;
    let masses: Vec<f64> = (0..len)
        .into_par_iter()
        .with_min_len(64)
        .map(|k| {
            let lo = k.saturating_sub(y.len() - 1);
            let hi = k.min(x.len() - 1);
            (lo..=hi).map(|i| x[i] * y[k - i]).sum()
        })
        .collect();
    Ok(DiscreteDist {
        origin: a.origin + b.origin + 0.5 * a.delta,
        delta: a.delta,
        masses,
    })
}

/// Smallest replicating estimate that reaches one-sided `P <= p3` when the
/// combined standard error is `sem_combined`: `-Phi^-1(p3) * sem`.
pub fn replication_threshold(sem_combined: f64, p3: Probability) -> Result<f64> {
    check_positive("sem", sem_combined)?;
    let p = crate::error::check_open_unit("p3", p3.one_sided_value())?;
    Ok(-standard_normal_quantile(p) * sem_combined)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_validation() {
        assert_eq!(RangeSpec::reference().bins(), 1200);
        assert_eq!(RangeSpec::new(-4.0, 8.0, 0.001).unwrap().bins(), 12000);
        assert!(RangeSpec::new(1.0, 1.0, 0.1).is_err());
        assert!(RangeSpec::new(2.0, 1.0, 0.1).is_err());
        assert!(RangeSpec::new(0.0, 1.0, 0.3).is_err());
        assert!(RangeSpec::new(0.0, 1.0, 0.0).is_err());
        let c = RangeSpec::centered(6.0, 0.01).unwrap();
        assert_eq!(c.bins(), 1201);
        assert!((c.lo() + 6.005).abs() < 1e-12);
    }

    #[test]
    fn bin_masses_from_cdf_differences() {
        let d = discretize_gaussian(2.0, 1.0, &RangeSpec::reference()).unwrap();
        let below_zero = d.tail_mass(0.0, TailDirection::Below).unwrap();
        assert!((below_zero - 0.02275).abs() < 1e-5);
        let below = d.tail_mass(-0.01, TailDirection::Below).unwrap();
        assert!((below - 0.02222).abs() < 1e-5);
        assert!((d.interval_mass(-0.01, 0.0).unwrap() - 0.00053).abs() < 1e-5);
        let null = discretize_gaussian(0.0, 1.0, &RangeSpec::reference()).unwrap();
        assert!((null.interval_mass(2.0, 2.01).unwrap() - 0.00053).abs() < 1e-5);
    }

    #[test]
    fn full_support_mass() {
        let d = discretize_gaussian(0.0, 1.0, &RangeSpec::new(-8.0, 8.0, 0.01).unwrap()).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn misaligned_threshold_rejected() {
        let d = discretize_gaussian(0.0, 1.0, &RangeSpec::reference()).unwrap();
        assert!(matches!(
            d.tail_mass(2.7718, TailDirection::AtOrAbove),
            Err(Error::Misaligned { .. })
        ));
        assert!((d.nearest_edge(2.7718) - 2.77).abs() < 1e-12);
        assert!(d.tail_mass(d.nearest_edge(2.7718), TailDirection::AtOrAbove).is_ok());
    }

    #[test]
    fn thresholds_beyond_grid() {
        let d = discretize_gaussian(0.0, 1.0, &RangeSpec::reference()).unwrap();
        assert_eq!(d.tail_mass(-10.0, TailDirection::Below).unwrap(), 0.0);
        assert_eq!(d.tail_mass(-10.0, TailDirection::AtOrAbove).unwrap(), d.total_mass());
    }

    #[test]
    fn point_mass_identity() {
        let d = discretize_gaussian(1.0, 0.7, &RangeSpec::new(-3.0, 5.0, 0.01).unwrap()).unwrap();
        let id = DiscreteDist::point_mass_at_zero(0.01).unwrap();
        let out = convolve(&id, &d).unwrap();
        assert_eq!(out.masses(), d.masses());
        assert!((out.origin() - d.origin()).abs() < 1e-15);
    }

    #[test]
    fn delta_mismatch() {
        let a = DiscreteDist::point_mass_at_zero(0.01).unwrap();
        let b = DiscreteDist::point_mass_at_zero(0.02).unwrap();
        assert_eq!(convolve(&a, &b), Err(Error::DeltaMismatch(0.01, 0.02)));
    }

    #[test]
    fn uniform_prior() {
        let u = DiscreteDist::uniform(&RangeSpec::reference());
        assert_eq!(u.len(), 1200);
        assert!((u.masses()[0] - 0.00083).abs() < 5e-6);
        assert!((u.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_rescales_truncated_mass() {
        let d = discretize_gaussian(0.0, 1.0, &RangeSpec::new(-1.0, 1.0, 0.01).unwrap()).unwrap();
        assert!(d.missing_mass() > 0.3);
        let n = d.normalize().unwrap();
        assert!((n.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_masses() {
        assert!(DiscreteDist::new(0.0, 0.1, vec![0.5, -0.1]).is_err());
        assert!(DiscreteDist::new(0.0, 0.1, vec![0.7, 0.7]).is_err());
        assert!(DiscreteDist::new(0.0, 0.1, vec![]).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)] // 1.41421 is the rounded input as published
    fn threshold_examples() {
        let p = Probability::one_sided(0.025).unwrap();
        assert!((replication_threshold(1.41421, p).unwrap() - 2.7718).abs() < 1e-4);
        assert!((replication_threshold(1.0, p).unwrap() - 1.959964).abs() < 1e-6);
        let half = Probability::one_sided(0.5).unwrap();
        assert_eq!(replication_threshold(1.41421, half).unwrap(), 0.0);
    }

    #[test]
    fn csv_export() {
        let d = DiscreteDist::new(-0.02, 0.01, vec![0.25, 0.5, 0.25]).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "bin_lower_edge,mass\n-0.02,0.25\n-0.01,0.5\n0,0.25\n");
    }
}
