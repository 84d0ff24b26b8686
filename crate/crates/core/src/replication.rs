//! Closed-form replication probabilities.
//!
//! A first study observes effect `b` with variance `v1 = (s/sqrt(n1))^2`. Under
//! a flat prior the true effect is `N(b, v1)`, and a replicating study of size
//! `n2` observes `b_repl ~ N(b, v1 + v2)`. Every formula here is a normal tail
//! of that predictive distribution, differing only in the threshold the
//! replicating estimate has to clear.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};
use crate::normal::{self, standard_normal_cdf, standard_normal_quantile, Probability, Sidedness, ZScore};
use crate::study::StudyDesign;

/// One-sided threshold used when none is given: `P <= 0.025` one-sided,
/// i.e. `P <= 0.05` two-sided.
pub const DEFAULT_P3: f64 = 0.025;

/// Sample size of a replicating study. `Infinite` means the replication
/// recovers the true effect exactly (zero variance).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSize {
    Finite(u64),
    Infinite,
}

impl SampleSize {
    pub fn finite(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfRange {
                name: "n2",
                value: n as f64,
                range: "[2, inf)",
            });
        }
        Ok(SampleSize::Finite(n))
    }

    /// Variance of a mean over this many observations; zero when infinite.
    pub fn variance(self, sd: f64) -> f64 {
        match self {
            SampleSize::Finite(n) => sd * sd / n as f64,
            SampleSize::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, SampleSize::Infinite)
    }
}

/// What counts as a successful replication, and how large the replication is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationQuery {
    p3: Probability,
    n2: SampleSize,
}

impl ReplicationQuery {
    /// `p3` is converted to one-sided through its tag.
    pub fn new(p3: Probability, n2: SampleSize) -> Result<Self> {
        let one = p3.to_sidedness(Sidedness::OneSided);
        check_open_unit("p3", one.value())?;
        if let SampleSize::Finite(n) = n2 {
            SampleSize::finite(n)?;
        }
        Ok(ReplicationQuery { p3: one, n2 })
    }

    /// Replication at `P <= 0.025` one-sided with `n2` observations.
    pub fn with_default_threshold(n2: SampleSize) -> Result<Self> {
        Self::new(Probability::one_sided(DEFAULT_P3)?, n2)
    }

    pub fn p3(&self) -> Probability {
        self.p3
    }

    pub fn n2(&self) -> SampleSize {
        self.n2
    }
}

/// Which closed form produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// `Phi(b / sqrt(v1 + v2) + Phi^-1(p3))`
    VarianceSum,
    /// `Phi(b / sqrt(v1) + Phi^-1(p3))`, the `n2 -> inf` limit.
    TruthLimit,
    /// `Phi(-Phi^-1(p1) / sqrt(2) + Phi^-1(p3))`, equal sample sizes.
    FromPValue,
    /// `Phi(-Phi^-1(p1) + Phi^-1(p3))`
    FromPValueTruthLimit,
    /// Same-sign replication with equal sample sizes (Killeen's P_rep).
    SameSign,
    /// Same-sign replication against the truth: `1 - p1`.
    SameSignTruthLimit,
    /// Same-sign replication for arbitrary `n1`, `n2`.
    SameSignVarianceSum,
    /// Success judged against a null with the replication's own variance only.
    ReplicationVarianceNull,
    /// Predictive power with `m` summed variances.
    PredictivePower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub probability: Probability,
    pub formula: Formula,
}

impl ReplicationResult {
    fn new(value: f64, formula: Formula) -> Self {
        ReplicationResult {
            probability: Probability::from_formula(value),
            formula,
        }
    }

    pub fn value(&self) -> f64 {
        self.probability.value()
    }
}

fn one_sided_open(name: &'static str, p: Probability) -> Result<f64> {
    check_open_unit(name, p.one_sided_value())
}

/// Probability that a replication of size `q.n2` reaches a one-sided
/// `P <= q.p3`, given the first study `d1`.
pub fn prob_replication(d1: &StudyDesign, q: &ReplicationQuery) -> ReplicationResult {
    let v1 = d1.variance().value();
    let v2 = q.n2.variance(d1.sd());
    let shift = standard_normal_quantile(q.p3.value());
    let formula = if q.n2.is_infinite() {
        Formula::TruthLimit
    } else {
        Formula::VarianceSum
    };
    ReplicationResult::new(standard_normal_cdf(d1.effect() / (v1 + v2).sqrt() + shift), formula)
}

/// Same-size replication probability from the first study's one-sided P value.
pub fn prob_replication_from_p(p1: Probability, p3: Probability) -> Result<ReplicationResult> {
    let p1 = one_sided_open("p1", p1)?;
    let p3 = one_sided_open("p3", p3)?;
    let z = -standard_normal_quantile(p1) / SQRT_2 + standard_normal_quantile(p3);
    Ok(ReplicationResult::new(standard_normal_cdf(z), Formula::FromPValue))
}

/// Replication probability against an infinitely large replicating study.
pub fn prob_replication_infinite_from_p(p1: Probability, p3: Probability) -> Result<ReplicationResult> {
    let p1 = one_sided_open("p1", p1)?;
    let p3 = one_sided_open("p3", p3)?;
    let z = -standard_normal_quantile(p1) + standard_normal_quantile(p3);
    Ok(ReplicationResult::new(
        standard_normal_cdf(z),
        Formula::FromPValueTruthLimit,
    ))
}

/// Probability that the replication's effect has the same sign as the first
/// study's. With `infinite_n2` this is exactly `1 - p1`.
pub fn p_rep(p1: Probability, infinite_n2: bool) -> Result<ReplicationResult> {
    let p1 = one_sided_open("p1", p1)?;
    Ok(if infinite_n2 {
        ReplicationResult::new(1.0 - p1, Formula::SameSignTruthLimit)
    } else {
        let z = -standard_normal_quantile(p1) / SQRT_2;
        ReplicationResult::new(standard_normal_cdf(z), Formula::SameSign)
    })
}

/// Same-sign probability `Phi(b / sqrt(v1 + v2))` for any pair of sample sizes.
pub fn prob_same_sign(d1: &StudyDesign, n2: SampleSize) -> ReplicationResult {
    let v = d1.variance().value() + n2.variance(d1.sd());
    let formula = if n2.is_infinite() {
        Formula::SameSignTruthLimit
    } else {
        Formula::SameSignVarianceSum
    };
    ReplicationResult::new(standard_normal_cdf(d1.effect() / v.sqrt()), formula)
}

/// The optimistic rival: a replication counts when `b_repl / sqrt(v2)` clears
/// the critical value, although `b_repl` itself has variance `v1 + v2`.
/// Equal sample sizes, from a two-sided P value, at the two-sided 0.05 level.
///
/// The sign is oriented so the value is the probability of success; it rises
/// with the strength of the first result (0.83 at `z = 3.29`).
pub fn prob_replication_rival(p1: Probability) -> Result<ReplicationResult> {
    let p1 = check_open_unit("p1", p1.to_sidedness(Sidedness::TwoSided).value())?;
    let z1 = -standard_normal_quantile(0.5 * p1);
    let z = (z1 + standard_normal_quantile(DEFAULT_P3)) / SQRT_2;
    Ok(ReplicationResult::new(
        standard_normal_cdf(z),
        Formula::ReplicationVarianceNull,
    ))
}

/// General form of [`prob_replication_rival`]:
/// `Phi((b + Phi^-1(p3) sqrt(v2)) / sqrt(v1 + v2))`.
pub fn prob_replication_rival_design(d1: &StudyDesign, q: &ReplicationQuery) -> Result<ReplicationResult> {
    if q.n2.is_infinite() {
        return Err(Error::InfiniteSampleSize);
    }
    let v1 = d1.variance().value();
    let v2 = q.n2.variance(d1.sd());
    let threshold = -standard_normal_quantile(q.p3.value()) * v2.sqrt();
    let z = (d1.effect() - threshold) / (v1 + v2).sqrt();
    Ok(ReplicationResult::new(
        standard_normal_cdf(z),
        Formula::ReplicationVarianceNull,
    ))
}

/// One row of the comparison curves, evaluated at first-study statistic `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub z: f64,
    /// Same-size replication, `Phi(z / sqrt(2) - 1.96)`.
    #[serde(rename = "eq5")]
    pub same_size: f64,
    /// Rival predictor, `Phi((z - 1.96) / sqrt(2))`.
    #[serde(rename = "rival_eq15")]
    pub rival: f64,
    /// Infinitely large replication, `Phi(z - 1.96)`.
    pub infinite_n2: f64,
}

/// Evaluates the three replication curves at each grid point.
pub fn figure3_curves(z_grid: &[ZScore]) -> Vec<CurvePoint> {
    let shift = standard_normal_quantile(DEFAULT_P3);
    z_grid
        .iter()
        .map(|z| {
            let z = z.value();
            CurvePoint {
                z,
                same_size: normal::standard_normal_cdf(z / SQRT_2 + shift),
                rival: normal::standard_normal_cdf((z + shift) / SQRT_2),
                infinite_n2: normal::standard_normal_cdf(z + shift),
            }
        })
        .collect()
}
