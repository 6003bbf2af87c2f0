//! Life-table construction, validation, and distribution views.
//!
//! Ages are implicit: a table with `n` age groups covers exact ages
//! `0..n-1` in one-year steps, and the last group is the open interval
//! (for HMD tables, 110+). All columns are stored per age group.

use std::fmt;

use thiserror::Error;

use crate::distribution::{AgeAtDeathDistribution, DistributionError};

/// Conventional initial cohort size.
pub const DEFAULT_RADIX: f64 = 100_000.0;
/// Default separation factor for age 0 when building from raw rates.
pub const DEFAULT_INFANT_SEPARATION: f64 = 0.14;
/// Default separation factor for all other closed intervals.
pub const DEFAULT_SEPARATION: f64 = 0.5;

#[derive(Debug, Error)]
pub enum LifeTableError {
    #[error("life table needs at least two age groups (got {0})")]
    TooFewAges(usize),
    #[error("column {column} has length {got}, expected {expected}")]
    ColumnLengthMismatch {
        column: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("death rate at age {age} must be finite and >= 0 (got {value})")]
    InvalidDeathRate { age: usize, value: f64 },
    #[error("separation factor at age {age} out of range (got {value})")]
    InvalidSeparation { age: usize, value: f64 },
    #[error("radix must be positive and finite (got {0})")]
    InvalidRadix(f64),
    #[error("terminal death rate must be positive to derive the open-interval separation factor")]
    ZeroTerminalRate,
    #[error("column {column} contains a non-finite value at age {age}")]
    NonFiniteColumn { column: &'static str, age: usize },
    #[error("deaths column has negative entry at age {age} ({value})")]
    NegativeDeaths { age: usize, value: f64 },
    #[error("table records no deaths; age-at-death distribution is undefined")]
    NoDeaths,
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

/// One validation finding: which column, at which age (None = table-wide),
/// and how large the discrepancy is.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub column: &'static str,
    pub age: Option<usize>,
    pub magnitude: f64,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.age {
            Some(age) => write!(
                f,
                "{} at age {}: {} (off by {:.6e})",
                self.column, age, self.detail, self.magnitude
            ),
            None => write!(
                f,
                "{}: {} (off by {:.6e})",
                self.column, self.detail, self.magnitude
            ),
        }
    }
}

/// Per-check tolerances for [`LifeTable::validate_with`].
///
/// Person-denominated tolerances are expressed relative to the radix so
/// that validation is invariant to the radix choice; expectancy
/// tolerances are absolute years. `expectancy_slack` and
/// `death_prob_slack` are scaled by `radix / lx` so that rows with few
/// survivors (where published rounding dominates) are judged loosely.
#[derive(Debug, Clone)]
pub struct ValidationTolerances {
    pub lx_monotone: f64,
    pub lx_step: f64,
    pub total_deaths: f64,
    pub negative_deaths: f64,
    pub death_prob: f64,
    pub death_prob_slack: f64,
    pub terminal_death_prob: f64,
    pub separation_range: f64,
    pub person_years_abs: f64,
    pub person_years_per_death: f64,
    pub person_years_above: f64,
    pub expectancy_abs: f64,
    pub expectancy_slack: f64,
}

impl ValidationTolerances {
    /// For tables built in full precision (e.g. [`LifeTable::from_rates`]).
    pub fn strict() -> Self {
        Self {
            lx_monotone: 1e-11,
            lx_step: 1e-11,
            total_deaths: 1e-11,
            negative_deaths: 1e-12,
            death_prob: 1e-11,
            death_prob_slack: 0.0,
            terminal_death_prob: 1e-12,
            separation_range: 1e-12,
            person_years_abs: 1e-11,
            person_years_per_death: 0.0,
            person_years_above: 1e-10,
            expectancy_abs: 1e-9,
            expectancy_slack: 0.0,
        }
    }

    /// For tables carrying published HMD columns, which round lx/dx/Lx/Tx
    /// to whole persons, ax and ex to 2 decimals, and qx to 5.
    pub fn published() -> Self {
        Self {
            lx_monotone: 1.5e-5,
            lx_step: 2e-5,
            total_deaths: 1e-4,
            negative_deaths: 1e-12,
            death_prob: 4e-5,
            death_prob_slack: 2e-5,
            terminal_death_prob: 1e-5,
            separation_range: 5.1e-3,
            person_years_abs: 2.5e-5,
            person_years_per_death: 5.1e-3,
            person_years_above: 6e-4,
            expectancy_abs: 1.1e-2,
            expectancy_slack: 1e-3,
        }
    }
}

impl Default for ValidationTolerances {
    fn default() -> Self {
        Self::strict()
    }
}

/// Inputs for [`LifeTable::from_columns`]. Survivors, deaths, and
/// separation factors are required; the rest are derived when absent.
#[derive(Debug, Clone, Default)]
pub struct ColumnInput {
    pub lx: Vec<f64>,
    pub dx: Vec<f64>,
    pub ax: Vec<f64>,
    pub mx: Option<Vec<f64>>,
    pub qx: Option<Vec<f64>>,
    pub person_years: Option<Vec<f64>>,
    pub person_years_above: Option<Vec<f64>>,
    pub ex: Option<Vec<f64>>,
}

/// A complete single-year life table with an open terminal interval.
#[derive(Debug, Clone, PartialEq)]
pub struct LifeTable {
    mx: Vec<f64>,
    qx: Vec<f64>,
    ax: Vec<f64>,
    lx: Vec<f64>,
    dx: Vec<f64>,
    person_years: Vec<f64>,
    person_years_above: Vec<f64>,
    ex: Vec<f64>,
    radix: f64,
}

impl LifeTable {
    /// Builds a table from central death rates and separation factors.
    ///
    /// Rates convert to death probabilities with the single-decrement
    /// formula `qx = mx / (1 + (1 - ax) * mx)`, clamped at 1; the terminal
    /// probability is 1 regardless of the terminal rate. The terminal
    /// `ax` carries the open-interval mean survival time and may exceed 1.
    pub fn from_rates(mx: &[f64], ax: &[f64], radix: f64) -> Result<Self, LifeTableError> {
        let n = mx.len();
        if n < 2 {
            return Err(LifeTableError::TooFewAges(n));
        }
        if ax.len() != n {
            return Err(LifeTableError::ColumnLengthMismatch {
                column: "ax",
                got: ax.len(),
                expected: n,
            });
        }
        if !radix.is_finite() || radix <= 0.0 {
            return Err(LifeTableError::InvalidRadix(radix));
        }
        for (age, &m) in mx.iter().enumerate() {
            if !m.is_finite() || m < 0.0 {
                return Err(LifeTableError::InvalidDeathRate { age, value: m });
            }
        }
        for (age, &a) in ax.iter().enumerate() {
            let valid = if age == n - 1 {
                a.is_finite() && a > 0.0
            } else {
                a.is_finite() && (0.0..=1.0).contains(&a)
            };
            if !valid {
                return Err(LifeTableError::InvalidSeparation { age, value: a });
            }
        }

        let mut qx = vec![0.0; n];
        for i in 0..n - 1 {
            qx[i] = (mx[i] / (1.0 + (1.0 - ax[i]) * mx[i])).min(1.0);
        }
        qx[n - 1] = 1.0;

        let mut lx = vec![0.0; n];
        let mut dx = vec![0.0; n];
        lx[0] = radix;
        for i in 0..n - 1 {
            dx[i] = lx[i] * qx[i];
            lx[i + 1] = lx[i] - dx[i];
        }
        dx[n - 1] = lx[n - 1];

        let mut person_years = vec![0.0; n];
        for i in 0..n - 1 {
            person_years[i] = lx[i + 1] + ax[i] * dx[i];
        }
        person_years[n - 1] = ax[n - 1] * dx[n - 1];

        let (person_years_above, ex) = derive_remaining(&lx, &person_years);

        Ok(Self {
            mx: mx.to_vec(),
            qx,
            ax: ax.to_vec(),
            lx,
            dx,
            person_years,
            person_years_above,
            ex,
            radix,
        })
    }

    /// [`from_rates`](Self::from_rates) with default separation factors:
    /// 0.14 at age 0, 0.5 elsewhere, and `1 / mx` in the open interval.
    pub fn from_rates_default_ax(mx: &[f64], radix: f64) -> Result<Self, LifeTableError> {
        let n = mx.len();
        if n < 2 {
            return Err(LifeTableError::TooFewAges(n));
        }
        let terminal = *mx.last().unwrap();
        if !(terminal > 0.0) {
            return Err(LifeTableError::ZeroTerminalRate);
        }
        let mut ax = vec![DEFAULT_SEPARATION; n];
        ax[0] = DEFAULT_INFANT_SEPARATION;
        ax[n - 1] = 1.0 / terminal;
        Self::from_rates(mx, &ax, radix)
    }

    /// Assembles a table from explicit columns, deriving any absent
    /// optional column from survivors, deaths, and separation factors.
    ///
    /// Radix is read from `lx[0]`. Beyond finiteness and shape this does
    /// not judge consistency; run [`validate`](Self::validate) for that,
    /// which is what lets deliberately defective tables be constructed
    /// and diagnosed.
    pub fn from_columns(cols: ColumnInput) -> Result<Self, LifeTableError> {
        let n = cols.lx.len();
        if n < 2 {
            return Err(LifeTableError::TooFewAges(n));
        }
        check_len("dx", cols.dx.len(), n)?;
        check_len("ax", cols.ax.len(), n)?;
        check_finite("lx", &cols.lx)?;
        check_finite("dx", &cols.dx)?;
        check_finite("ax", &cols.ax)?;
        let radix = cols.lx[0];
        if !radix.is_finite() || radix <= 0.0 {
            return Err(LifeTableError::InvalidRadix(radix));
        }

        let lx = cols.lx;
        let dx = cols.dx;
        let ax = cols.ax;

        let qx = match cols.qx {
            Some(v) => {
                check_len("qx", v.len(), n)?;
                check_finite("qx", &v)?;
                v
            }
            None => {
                let mut v = vec![0.0; n];
                for i in 0..n - 1 {
                    v[i] = if lx[i] > 0.0 { dx[i] / lx[i] } else { 0.0 };
                }
                v[n - 1] = 1.0;
                v
            }
        };

        let person_years = match cols.person_years {
            Some(v) => {
                check_len("Lx", v.len(), n)?;
                check_finite("Lx", &v)?;
                v
            }
            None => {
                let mut v = vec![0.0; n];
                for i in 0..n - 1 {
                    v[i] = lx[i + 1] + ax[i] * dx[i];
                }
                v[n - 1] = ax[n - 1] * dx[n - 1];
                v
            }
        };

        let mx = match cols.mx {
            Some(v) => {
                check_len("mx", v.len(), n)?;
                check_finite("mx", &v)?;
                v
            }
            None => person_years
                .iter()
                .zip(&dx)
                .map(|(&l, &d)| if l > 0.0 { d / l } else { 0.0 })
                .collect(),
        };

        let (person_years_above, ex) = match (cols.person_years_above, cols.ex) {
            (Some(t), Some(e)) => {
                check_len("Tx", t.len(), n)?;
                check_finite("Tx", &t)?;
                check_len("ex", e.len(), n)?;
                check_finite("ex", &e)?;
                (t, e)
            }
            (tx, ex) => {
                let (t_derived, e_derived) = derive_remaining(&lx, &person_years);
                let t = match tx {
                    Some(t) => {
                        check_len("Tx", t.len(), n)?;
                        check_finite("Tx", &t)?;
                        t
                    }
                    None => t_derived,
                };
                let e = match ex {
                    Some(e) => {
                        check_len("ex", e.len(), n)?;
                        check_finite("ex", &e)?;
                        e
                    }
                    None => e_derived,
                };
                (t, e)
            }
        };

        Ok(Self {
            mx,
            qx,
            ax,
            lx,
            dx,
            person_years,
            person_years_above,
            ex,
            radix,
        })
    }

    /// Number of age groups, including the open one.
    pub fn num_ages(&self) -> usize {
        self.lx.len()
    }

    /// Exact age at which the open interval starts (110 for HMD tables).
    pub fn open_age(&self) -> usize {
        self.lx.len() - 1
    }

    pub fn radix(&self) -> f64 {
        self.radix
    }

    /// Central death rates (mx).
    pub fn death_rates(&self) -> &[f64] {
        &self.mx
    }

    /// Probabilities of dying within each interval (qx).
    pub fn death_probs(&self) -> &[f64] {
        &self.qx
    }

    /// Average years lived in the interval by those dying in it (ax).
    pub fn separations(&self) -> &[f64] {
        &self.ax
    }

    /// Survivors at exact age x (lx).
    pub fn survivors(&self) -> &[f64] {
        &self.lx
    }

    /// Deaths within each interval (dx).
    pub fn deaths(&self) -> &[f64] {
        &self.dx
    }

    /// Person-years lived within each interval (Lx).
    pub fn person_years(&self) -> &[f64] {
        &self.person_years
    }

    /// Person-years lived above each exact age (Tx).
    pub fn person_years_above(&self) -> &[f64] {
        &self.person_years_above
    }

    /// Remaining life expectancy at each exact age (ex).
    pub fn expectancies(&self) -> &[f64] {
        &self.ex
    }

    /// Proportion surviving to exact age x.
    pub fn survival_fraction(&self, age: usize) -> f64 {
        self.lx[age] / self.radix
    }

    /// Life expectancy at birth as the area under the survival curve,
    /// i.e. total person-years per person: sum(Lx) / radix.
    pub fn e0(&self) -> f64 {
        self.person_years_above[0] / self.radix
    }

    /// Checks every structural invariant with strict tolerances.
    pub fn validate(&self) -> Vec<Violation> {
        self.validate_with(&ValidationTolerances::strict())
    }

    /// Checks every structural invariant, reporting one [`Violation`] per
    /// discrepancy. An empty result means the table is consistent at the
    /// given tolerances.
    pub fn validate_with(&self, tol: &ValidationTolerances) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.num_ages();
        let r = self.radix;

        for i in 0..n - 1 {
            let rise = self.lx[i + 1] - self.lx[i];
            if rise > tol.lx_monotone * r {
                out.push(Violation {
                    column: "lx",
                    age: Some(i + 1),
                    magnitude: rise,
                    detail: format!("survivors increase from {} to {}", self.lx[i], self.lx[i + 1]),
                });
            }
            let step = (self.lx[i + 1] - (self.lx[i] - self.dx[i])).abs();
            if step > tol.lx_step * r {
                out.push(Violation {
                    column: "lx",
                    age: Some(i + 1),
                    magnitude: step,
                    detail: "l(x+1) differs from l(x) - d(x)".to_string(),
                });
            }
        }

        let terminal_gap = (self.dx[n - 1] - self.lx[n - 1]).abs();
        if terminal_gap > tol.lx_step * r {
            out.push(Violation {
                column: "dx",
                age: Some(n - 1),
                magnitude: terminal_gap,
                detail: "open-interval deaths differ from survivors entering it".to_string(),
            });
        }

        for (i, &d) in self.dx.iter().enumerate() {
            if d < -tol.negative_deaths * r {
                out.push(Violation {
                    column: "dx",
                    age: Some(i),
                    magnitude: -d,
                    detail: "negative deaths".to_string(),
                });
            }
        }

        let total: f64 = self.dx.iter().sum();
        let drift = (total - r).abs();
        if drift > tol.total_deaths * r {
            out.push(Violation {
                column: "dx",
                age: None,
                magnitude: drift,
                detail: format!("deaths sum to {total}, radix is {r}"),
            });
        }

        for i in 0..n {
            let (lo, hi) = if i == n - 1 {
                (0.0, f64::INFINITY)
            } else {
                (-tol.separation_range, 1.0 + tol.separation_range)
            };
            if !self.ax[i].is_finite() || self.ax[i] < lo || self.ax[i] > hi {
                out.push(Violation {
                    column: "ax",
                    age: Some(i),
                    magnitude: self.ax[i],
                    detail: "separation factor out of range".to_string(),
                });
            }
        }

        for i in 0..n - 1 {
            let gap = (self.dx[i] - self.qx[i] * self.lx[i]).abs();
            let allowed = (tol.death_prob + tol.death_prob_slack) * r;
            if gap > allowed {
                out.push(Violation {
                    column: "qx",
                    age: Some(i),
                    magnitude: gap,
                    detail: "qx inconsistent with dx / lx".to_string(),
                });
            }
        }
        let terminal_q = (self.qx[n - 1] - 1.0).abs();
        if terminal_q > tol.terminal_death_prob {
            out.push(Violation {
                column: "qx",
                age: Some(n - 1),
                magnitude: terminal_q,
                detail: "terminal death probability must be 1".to_string(),
            });
        }

        for i in 0..n {
            let expected = if i == n - 1 {
                self.ax[i] * self.dx[i]
            } else {
                self.lx[i + 1] + self.ax[i] * self.dx[i]
            };
            let gap = (self.person_years[i] - expected).abs();
            let allowed = tol.person_years_abs * r + tol.person_years_per_death * self.dx[i].abs();
            if gap > allowed {
                out.push(Violation {
                    column: "Lx",
                    age: Some(i),
                    magnitude: gap,
                    detail: "person-years inconsistent with l(x+1) + ax * dx".to_string(),
                });
            }
        }

        let mut suffix = 0.0;
        let mut tx_expected = vec![0.0; n];
        for i in (0..n).rev() {
            suffix += self.person_years[i];
            tx_expected[i] = suffix;
        }
        for i in 0..n {
            let gap = (self.person_years_above[i] - tx_expected[i]).abs();
            if gap > tol.person_years_above * r {
                out.push(Violation {
                    column: "Tx",
                    age: Some(i),
                    magnitude: gap,
                    detail: "Tx differs from the sum of Lx at and above this age".to_string(),
                });
            }
        }

        for i in 0..n {
            if self.lx[i] > 0.0 {
                let expected = self.person_years_above[i] / self.lx[i];
                let gap = (self.ex[i] - expected).abs();
                let allowed = tol.expectancy_abs + tol.expectancy_slack * r / self.lx[i];
                if gap > allowed {
                    out.push(Violation {
                        column: "ex",
                        age: Some(i),
                        magnitude: gap,
                        detail: "expectancy inconsistent with Tx / lx".to_string(),
                    });
                }
            }
        }

        out
    }

    /// The age-at-death distribution: deaths normalized to unit mass,
    /// each atom at `x + ax`. Zero-death ages carry no atom, and atoms
    /// that land on the same location merge.
    pub fn to_distribution(&self) -> Result<AgeAtDeathDistribution, LifeTableError> {
        let mut locations: Vec<f64> = Vec::with_capacity(self.num_ages());
        let mut weights: Vec<f64> = Vec::with_capacity(self.num_ages());
        for (age, (&d, &a)) in self.dx.iter().zip(&self.ax).enumerate() {
            if d < 0.0 {
                return Err(LifeTableError::NegativeDeaths { age, value: d });
            }
            if d == 0.0 {
                continue;
            }
            let loc = age as f64 + a;
            match locations.last() {
                Some(&prev) if loc <= prev => *weights.last_mut().unwrap() += d,
                _ => {
                    locations.push(loc);
                    weights.push(d);
                }
            }
        }
        if weights.is_empty() {
            return Err(LifeTableError::NoDeaths);
        }
        Ok(AgeAtDeathDistribution::from_weights(locations, weights)?)
    }
}

fn derive_remaining(lx: &[f64], person_years: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = lx.len();
    let mut tx = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += person_years[i];
        tx[i] = acc;
    }
    let ex = lx
        .iter()
        .zip(&tx)
        .map(|(&l, &t)| if l > 0.0 { t / l } else { 0.0 })
        .collect();
    (tx, ex)
}

fn check_len(column: &'static str, got: usize, expected: usize) -> Result<(), LifeTableError> {
    if got != expected {
        return Err(LifeTableError::ColumnLengthMismatch {
            column,
            got,
            expected,
        });
    }
    Ok(())
}

fn check_finite(column: &'static str, values: &[f64]) -> Result<(), LifeTableError> {
    for (age, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(LifeTableError::NonFiniteColumn { column, age });
        }
    }
    Ok(())
}
