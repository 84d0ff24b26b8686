//! Replication probabilities for studies with Gaussian sampling error.
//!
//! Given an original study (effect, SD and sample size, or just its P value)
//! the crate computes the probability that a replication reaches a chosen P
//! value threshold or an effect of the same sign, the sample sizes needed for
//! likelihood and predictive power, and a discretised convolution model of the
//! same quantities. A Monte Carlo oracle re-derives every closed form by
//! simulation, and the bundled empirical data supports the comparison reports.

pub mod discrete;
pub mod error;
pub mod mc;
pub mod normal;
pub mod power;
pub mod replication;
pub mod report;
pub mod study;

pub use discrete::{convolve, discretize_gaussian, replication_threshold, DiscreteDist, RangeSpec, TailDirection};
pub use error::{Error, Result};
pub use mc::{SimConfig, SimMode, SimReport};
pub use normal::{Probability, Sidedness, ZScore};
pub use power::{PowerSpec, RequiredN};
pub use replication::{Formula, ReplicationQuery, ReplicationResult, SampleSize};
pub use study::{DesignKind, StudyDesign, Variance};
