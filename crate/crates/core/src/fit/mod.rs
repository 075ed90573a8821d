//! Progress-curve fitting and model comparison.
//!
//! Families, all with additive Gaussian noise:
//!
//! | family        | model                    |
//! |---------------|--------------------------|
//! | exponential   | `k·exp(-λT)`             |
//! | linear        | `a - bT`                 |
//! | power         | `k·T^(-α)`               |
//! | progress_eq2  | `A·(1 + exp(r(τ - T)))`  |
//!
//! The last one is the progress curve of a walk whose forward probability
//! follows the logistic learning curve `p_f(T) = ½ + ½/(1 + exp(r(τ-T)))`.

mod collapse;
mod progress;
mod families;
mod lm;
mod series;

pub use collapse::{collapse, half_life, Collapse};
pub use progress::{derive_learning_curve, fit_progress_eq2, learning_probability, LearningCurve};
pub use families::{bic, bic_from_rss, fit_all, fit_exponential, fit_family, fit_linear, fit_power};
pub use series::{read_series_csv, write_series_csv, ProgressSeries, SeriesKind};

use serde::{Deserialize, Serialize};

use crate::num::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Exponential,
    Linear,
    Power,
    ProgressEq2,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Exponential, Family::Linear, Family::Power, Family::ProgressEq2];

    /// Parameters of the mean function, noise variance excluded.
    pub fn param_count(self) -> usize {
        match self {
            Family::ProgressEq2 => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Linear => "linear",
            Family::Power => "power",
            Family::ProgressEq2 => "progress_eq2",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s || (s == "eq2" && *f == Family::ProgressEq2))
            .ok_or_else(|| crate::Error::InvalidParameter(format!("unknown family `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", tag = "family", rename_all = "snake_case")]
pub enum FitParams<T> {
    Exponential {
        k: T,
        lambda: T,
    },
    Linear {
        a: T,
        b: T,
    },
    Power {
        k: T,
        alpha: T,
    },
    /// `asymptote_scale · amplitude` is the asymptote in data units; with
    /// normalization `amplitude = 1` and the scale holds the fitted value.
    ProgressEq2 {
        amplitude: T,
        r_learn: T,
        tau: T,
        asymptote_scale: T,
    },
}

impl<T: Real> FitParams<T> {
    pub fn family(&self) -> Family {
        match self {
            FitParams::Exponential { .. } => Family::Exponential,
            FitParams::Linear { .. } => Family::Linear,
            FitParams::Power { .. } => Family::Power,
            FitParams::ProgressEq2 { .. } => Family::ProgressEq2,
        }
    }

    pub fn predict(&self, t: T) -> T {
        match *self {
            FitParams::Exponential { k, lambda } => k * (-lambda * t).exp(),
            FitParams::Linear { a, b } => a - b * t,
            FitParams::Power { k, alpha } => k * t.powf(-alpha),
            FitParams::ProgressEq2 { amplitude, r_learn, tau, asymptote_scale } => {
                asymptote_scale * amplitude * (T::one() + (r_learn * (tau - t)).exp())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FitResult<T> {
    pub label: String,
    pub family: Family,
    pub params: FitParams<T>,
    /// Residual sum of squares in the units of the input series.
    pub rss: T,
    /// Absent when `rss = 0`.
    pub bic: Option<T>,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl<T: Real> FitResult<T> {
    pub fn predict(&self, t: T) -> T {
        self.params.predict(t)
    }

    pub(crate) fn new(
        label: &str,
        params: FitParams<T>,
        rss: T,
        n_points: usize,
        converged: bool,
        iterations: usize,
    ) -> FitResult<T> {
        let family = params.family();
        FitResult {
            label: label.to_string(),
            family,
            bic: bic_from_rss(rss, n_points, family.param_count()).ok(),
            params,
            rss,
            n_points,
            converged,
            iterations,
        }
    }
}
