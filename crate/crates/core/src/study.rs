//! Study descriptions and the conversions among effect size, standard error,
//! z statistic and P values.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::normal::{self, Probability, Sidedness, ZScore};

/// Crossover studies measure within-subject differences; parallel studies
/// compare two groups. The kind only changes reported total sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    #[default]
    Crossover,
    Parallel,
}

/// A completed (or imagined) study: observed effect, SD and sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyDesign {
    effect: f64,
    sd: f64,
    n: u64,
    kind: DesignKind,
}

impl StudyDesign {
    pub fn new(effect: f64, sd: f64, n: u64, kind: DesignKind) -> Result<Self> {
        if !effect.is_finite() {
            return Err(Error::NonFinite("b"));
        }
        check_positive("sd", sd)?;
        if n < 2 {
            return Err(Error::OutOfRange {
                name: "n",
                value: n as f64,
                range: "[2, inf)",
            });
        }
        Ok(StudyDesign { effect, sd, n, kind })
    }

    pub fn crossover(effect: f64, sd: f64, n: u64) -> Result<Self> {
        Self::new(effect, sd, n, DesignKind::Crossover)
    }

    /// The design whose z statistic reproduces a one-sided P value.
    pub fn from_p_value(p1: Probability, sd: f64, n: u64) -> Result<Self> {
        let p = p1.one_sided_value();
        let z = normal::quantile(p)?.value();
        let sem = sd / (n as f64).sqrt();
        Self::crossover(-z * sem, sd, n)
    }

    pub fn effect(&self) -> f64 {
        self.effect
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn sem(&self) -> f64 {
        sem(self)
    }

    pub fn variance(&self) -> Variance {
        Variance(self.sem().powi(2))
    }

    pub fn z_stat(&self) -> ZScore {
        z_stat(self)
    }
}

/// Sampling variance of an estimate, in squared outcome units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Variance(f64);

impl Variance {
    pub fn new(v: f64) -> Result<Self> {
        check_positive("variance", v).map(Variance)
    }

    /// `(sd / sqrt(n))^2`
    pub fn of_mean(sd: f64, n: u64) -> Self {
        Variance(sd * sd / n as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Standard error of the mean, `s / sqrt(n)`.
pub fn sem(d: &StudyDesign) -> f64 {
    d.sd / (d.n as f64).sqrt()
}

/// `b / sem`
pub fn z_stat(d: &StudyDesign) -> ZScore {
    // b is finite and sem > 0, so only overflow can leave the finite range.
    ZScore::new((d.effect / sem(d)).clamp(f64::MIN, f64::MAX)).expect("finite ratio")
}

/// P value of a z statistic against a null of zero.
pub fn p_from_z(z: ZScore, sidedness: Sidedness) -> Probability {
    let value = match sidedness {
        Sidedness::OneSided => normal::sf(z),
        Sidedness::TwoSided => (2.0 * normal::sf(ZScore::new(z.value().abs()).expect("finite"))).min(1.0),
    };
    Probability::new(value, sidedness).expect("tail area lies in [0, 1]")
}

/// The z statistic whose one-sided P value is `p` (inverse of [`p_from_z`]).
pub fn z_from_p(p: Probability) -> Result<ZScore> {
    let z = normal::quantile(p.one_sided_value())?;
    ZScore::new(-z.value())
}

pub fn convert_sidedness(p: Probability, to: Sidedness) -> Probability {
    p.to_sidedness(to)
}
