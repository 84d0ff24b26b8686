//! Likelihood power, predictive power and the sample sizes they require.
//!
//! Likelihood ("statistical") power treats the effect as fixed, so the test
//! statistic has one variance `v = SD^2 / n`. Predictive power averages over
//! the uncertainty in the effect as well: two variances for the first real
//! study planned from a pilot (or thought experiment) of the same size, three
//! for a same-size replication of that study.
//!
//! The effect enters through its magnitude; power is always for detecting the
//! effect in its own direction.

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, check_positive, Error, Result};
use crate::normal::{standard_normal_cdf, standard_normal_quantile, Probability, Sidedness};
use crate::study::DesignKind;

/// Planning inputs shared by the power calculations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSpec {
    effect: f64,
    sd: f64,
    alpha: Probability,
    target: f64,
    multiplicity: u8,
}

impl PowerSpec {
    /// `alpha` is converted to two-sided through its tag; `target` is the
    /// required power (multiplicity 1) or predictive probability (2 or 3).
    pub fn new(effect: f64, sd: f64, alpha: Probability, target: f64, multiplicity: u8) -> Result<Self> {
        if !effect.is_finite() {
            return Err(Error::NonFinite("b"));
        }
        check_positive("sd", sd)?;
        let alpha = alpha.to_sidedness(Sidedness::TwoSided);
        check_open_unit("alpha", alpha.value())?;
        check_open_unit("target", target)?;
        if !(1..=3).contains(&multiplicity) {
            return Err(Error::OutOfRange {
                name: "multiplicity",
                value: f64::from(multiplicity),
                range: "{1, 2, 3}",
            });
        }
        Ok(PowerSpec {
            effect,
            sd,
            alpha,
            target,
            multiplicity,
        })
    }

    /// `b = 1.96`, `SD = 10`, two-sided `alpha = 0.05`.
    pub fn reference(target: f64, multiplicity: u8) -> Result<Self> {
        Self::new(1.96, 10.0, Probability::two_sided(0.05)?, target, multiplicity)
    }

    pub fn with_multiplicity(self, multiplicity: u8) -> Result<Self> {
        Self::new(self.effect, self.sd, self.alpha, self.target, multiplicity)
    }

    pub fn with_target(self, target: f64) -> Result<Self> {
        Self::new(self.effect, self.sd, self.alpha, target, self.multiplicity)
    }

    pub fn effect(&self) -> f64 {
        self.effect
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn alpha_two_sided(&self) -> f64 {
        self.alpha.value()
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn multiplicity(&self) -> u8 {
        self.multiplicity
    }

    /// `alpha / 2`, the lowest probability any sample size can give.
    pub fn floor(&self) -> f64 {
        0.5 * self.alpha.value()
    }
}

/// A sample size computed exactly, plus the whole number of subjects needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RequiredN {
    pub exact: f64,
    pub ceil: u64,
}

impl RequiredN {
    fn from_exact(exact: f64) -> Self {
        // Absorb rounding noise so an exact 100 is not reported as 101.
        let ceil = (exact - 1e-9 * exact.max(1.0)).ceil().max(1.0) as u64;
        RequiredN { exact, ceil }
    }
}

fn required_n(spec: &PowerSpec, multiplicity: u8) -> Result<RequiredN> {
    if spec.effect == 0.0 {
        return Err(Error::UndetectableEffect);
    }
    if spec.target <= spec.floor() {
        return Err(Error::UnreachableTarget {
            target: spec.target,
            floor: spec.floor(),
        });
    }
    let gap = standard_normal_quantile(spec.target) - standard_normal_quantile(spec.floor());
    let base = (spec.sd * gap / spec.effect.abs()).powi(2);
    Ok(RequiredN::from_exact(f64::from(multiplicity) * base))
}

/// `n = (SD (Phi^-1(1 - beta) - Phi^-1(alpha / 2)) / b)^2`; the multiplicity
/// carried by `spec` is ignored.
pub fn required_n_likelihood(spec: &PowerSpec) -> Result<RequiredN> {
    required_n(spec, 1)
}

/// Sample size at which predictive power with `spec.multiplicity()` variances
/// reaches the target; `m` times the likelihood sample size.
pub fn required_n_predictive(spec: &PowerSpec) -> Result<RequiredN> {
    required_n(spec, spec.multiplicity)
}

fn power_with(n: f64, spec: &PowerSpec, multiplicity: u8) -> f64 {
    let variance = spec.sd * spec.sd / n * f64::from(multiplicity);
    standard_normal_cdf(spec.effect.abs() / variance.sqrt() + standard_normal_quantile(spec.floor()))
}

fn check_n(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            range: "[2, inf)",
        });
    }
    Ok(n as f64)
}

/// `Phi(b / (SD / sqrt(n)) + Phi^-1(alpha / 2))`
pub fn likelihood_power(n: u64, spec: &PowerSpec) -> Result<f64> {
    Ok(power_with(check_n(n)?, spec, 1))
}

/// Probability of `P <= alpha / 2` when `spec.multiplicity()` variances of size
/// `SD^2 / n` add up.
pub fn predictive_power(n: u64, spec: &PowerSpec) -> Result<f64> {
    Ok(power_with(check_n(n)?, spec, spec.multiplicity))
}

/// Power at a fractional sample size; used for round-trip checks.
pub fn power_at(n: f64, spec: &PowerSpec) -> f64 {
    power_with(n, spec, spec.multiplicity)
}

/// A parallel-group trial needs about twice the subjects per arm, four times
/// in total, for the precision of a crossover trial of `n_crossover`.
pub fn parallel_total(n_crossover: u64) -> u64 {
    4 * n_crossover
}

pub fn total_for(kind: DesignKind, n: u64) -> u64 {
    match kind {
        DesignKind::Crossover => n,
        DesignKind::Parallel => parallel_total(n),
    }
}

/// Misprinted cell in the published version of this table.
pub const MISPRINT_NOTE: &str = "printed as 0.029 in the source table; the formula gives 0.929";

/// One sample-size column of the power/replication table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Column {
    pub n: u64,
    /// Likelihood power (one variance).
    pub power: f64,
    /// `P <= alpha/2` in the first real study (two variances).
    pub first_study: f64,
    /// `P <= alpha/2` in a same-size replication (three variances).
    pub replication: f64,
    pub parallel_total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Sample sizes in the published table.
pub const TABLE2_SIZES: [u64; 4] = [100, 205, 409, 613];

pub fn table2(effect: f64, sd: f64, alpha_two_sided: f64, sizes: &[u64]) -> Result<Vec<Table2Column>> {
    let spec = PowerSpec::new(effect, sd, Probability::two_sided(alpha_two_sided)?, 0.8, 1)?;
    sizes
        .iter()
        .map(|&n| {
            let first_study = predictive_power(n, &spec.with_multiplicity(2)?)?;
            let note = (n == 613 && effect == 1.96 && sd == 10.0 && alpha_two_sided == 0.05)
                .then(|| MISPRINT_NOTE.to_string());
            Ok(Table2Column {
                n,
                power: likelihood_power(n, &spec)?,
                first_study,
                replication: predictive_power(n, &spec.with_multiplicity(3)?)?,
                parallel_total: parallel_total(n),
                note,
            })
        })
        .collect()
}
