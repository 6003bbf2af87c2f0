//! Discrete age-at-death distributions and their step CDFs.

use std::collections::BTreeMap;

use thiserror::Error;

/// How far the mass sum may deviate from 1 before a distribution is rejected.
pub const MASS_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("distribution needs at least one atom")]
    Empty,
    #[error("locations and masses differ in length ({locations} vs {masses})")]
    LengthMismatch { locations: usize, masses: usize },
    #[error("locations must be finite and strictly increasing (index {index})")]
    LocationsNotIncreasing { index: usize },
    #[error("mass at index {index} is negative or not finite ({mass})")]
    InvalidMass { index: usize, mass: f64 },
    #[error("masses must sum to 1 within {MASS_SUM_TOLERANCE:e} (sum = {total})")]
    NotNormalized { total: f64 },
    #[error("total mass is zero")]
    ZeroTotalMass,
}

/// A discrete probability measure of age at death: point masses at
/// strictly increasing ages, summing to 1.
///
/// For a life table this is the deaths column `d(x)` normalized by the
/// radix, with each atom placed at `x + a(x)` so that the distribution
/// mean equals the area under the survival curve exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeAtDeathDistribution {
    locations: Vec<f64>,
    masses: Vec<f64>,
}

impl AgeAtDeathDistribution {
    /// Builds a distribution from already-normalized masses.
    pub fn new(locations: Vec<f64>, masses: Vec<f64>) -> Result<Self, DistributionError> {
        if locations.is_empty() {
            return Err(DistributionError::Empty);
        }
        if locations.len() != masses.len() {
            return Err(DistributionError::LengthMismatch {
                locations: locations.len(),
                masses: masses.len(),
            });
        }
        for (i, &x) in locations.iter().enumerate() {
            if !x.is_finite() || (i > 0 && x <= locations[i - 1]) {
                return Err(DistributionError::LocationsNotIncreasing { index: i });
            }
        }
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m < 0.0 {
                return Err(DistributionError::InvalidMass { index: i, mass: m });
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(DistributionError::NotNormalized { total });
        }
        Ok(Self { locations, masses })
    }

    /// Builds a distribution from nonnegative weights, normalizing them to
    /// sum to 1.
    pub fn from_weights(
        locations: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self, DistributionError> {
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(DistributionError::InvalidMass { index: i, mass: w });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(DistributionError::ZeroTotalMass);
        }
        let masses = weights.into_iter().map(|w| w / total).collect();
        Self::new(locations, masses)
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// Death ages, strictly increasing.
    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    /// Probability mass per atom, summing to 1.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Mean age at death, i.e. life expectancy at birth when the
    /// distribution was derived from a life table.
    pub fn mean(&self) -> f64 {
        self.locations
            .iter()
            .zip(&self.masses)
            .map(|(x, m)| x * m)
            .sum()
    }

    /// Re-bins atom masses onto integer ages (the year of age in which the
    /// death occurred). Used for histogram-style comparisons such as KL
    /// divergence and the non-overlap index.
    pub fn integer_age_histogram(&self) -> BTreeMap<i64, f64> {
        let mut bins = BTreeMap::new();
        for (x, m) in self.locations.iter().zip(&self.masses) {
            *bins.entry(x.floor() as i64).or_insert(0.0) += m;
        }
        bins
    }

    pub fn cdf(&self) -> StepCdf {
        StepCdf::from_distribution(self)
    }
}

/// Right-continuous piecewise-constant CDF of a discrete distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepCdf {
    pub fn from_distribution(dist: &AgeAtDeathDistribution) -> Self {
        let mut values = Vec::with_capacity(dist.len());
        let mut acc = 0.0;
        for &m in dist.masses() {
            acc += m;
            values.push(acc);
        }
        // Guard the cumulative sum against the last ulp of rounding.
        if let Some(last) = values.last_mut() {
            *last = 1.0;
        }
        Self {
            breakpoints: dist.locations().to_vec(),
            values,
        }
    }

    /// Ascending jump locations.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Cumulative probability immediately after each breakpoint.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// F(x): probability of death at or before age `x` (right-continuous).
    pub fn value_at(&self, x: f64) -> f64 {
        match self
            .breakpoints
            .partition_point(|&b| b <= x)
            .checked_sub(1)
        {
            Some(i) => self.values[i],
            None => 0.0,
        }
    }

    /// S(x) = 1 - F(x): proportion surviving past age `x`.
    pub fn survival_at(&self, x: f64) -> f64 {
        1.0 - self.value_at(x)
    }
}
