//! Distances and divergences between life-table age-at-death distributions.
//!
//! A life table turns age-specific death rates into survivorship, deaths,
//! and expectancy columns for a hypothetical cohort. Normalizing its deaths
//! column yields a discrete probability distribution of age at death. This
//! crate builds those tables, derives the distribution views, and compares
//! two populations with:
//!
//! * the W1 (Earth Mover's) and general Wp Wasserstein distances, computed
//!   in closed form from the step CDFs / quantile functions;
//! * the signed and absolute gap in life expectancy at birth;
//! * Kullback-Leibler divergence and a non-overlap index on the
//!   integer-age death histograms;
//! * survivorship crossing diagnostics. When the survivorship curves do
//!   not cross, W1 equals the absolute e0 gap exactly.
//!
//! An exact transportation-problem solver ([`ot`]) serves as the
//! independent ground truth for the closed forms, and [`hmd`] parses
//! Human Mortality Database 1x1 life-table files.

pub mod distances;
pub mod distribution;
pub mod hmd;
pub mod lifetable;
pub mod ot;
pub mod synthetic;

pub use distances::{
    compare, crossing_diagnostics, e0_gap, kl_divergence, non_overlap_index, w1_distance,
    wp_distance, CompareOptions, Dominance, OverlapVariant, PairReport,
};
pub use distribution::{AgeAtDeathDistribution, DistributionError, StepCdf};
pub use lifetable::{LifeTable, LifeTableError, ValidationTolerances, Violation};
pub use ot::{northwest_corner_plan, solve_exact, ExactSolution, OtError, TransportPlan};
