use serde::{Deserialize, Serialize};

use super::ProgressSeries;
use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Collapse<T> {
    /// Each series divided by its first value.
    pub normalized: Vec<ProgressSeries<T>>,
    /// Largest coefficient of variation across series over the common range.
    pub dispersion: T,
    /// Year at which the largest spread occurs.
    pub worst_t: T,
}

/// Rescales each series by its first value and measures how well they
/// overlay. At every sample year inside the common range, series are
/// interpolated linearly and the coefficient of variation (population
/// standard deviation over mean) is taken; the dispersion is its maximum.
pub fn collapse<T: Real>(series: &[ProgressSeries<T>]) -> Result<Collapse<T>> {
    if series.len() < 2 {
        return Err(Error::InsufficientData("collapse needs at least two series".into()));
    }
    if let Some(s) = series.iter().find(|s| s.len() < 3) {
        return Err(Error::InsufficientData(format!("series {} has fewer than 3 points", s.label)));
    }
    let normalized: Vec<ProgressSeries<T>> = series.iter().map(|s| s.scaled(T::one() / s.points[0].1)).collect();
    let lo = normalized.iter().map(|s| s.points[0].0).fold(T::neg_infinity(), T::max);
    let hi = normalized.iter().map(|s| s.points[s.len() - 1].0).fold(T::infinity(), T::min);
    if lo > hi {
        return Err(Error::InsufficientData("series share no common T range".into()));
    }
    let mut grid: Vec<T> =
        normalized.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(|&t| t >= lo && t <= hi).collect();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite T"));
    grid.dedup();

    let k = T::from_count(normalized.len());
    let mut dispersion = T::zero();
    let mut worst_t = lo;
    for &t in &grid {
        let vals: Vec<T> = normalized.iter().map(|s| s.interpolate(t).expect("inside range")).collect();
        let mean = vals.iter().copied().sum::<T>() / k;
        let var = vals.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / k;
        let cv = var.sqrt() / mean;
        if cv > dispersion {
            dispersion = cv;
            worst_t = t;
        }
    }
    Ok(Collapse { normalized, dispersion, worst_t })
}

/// `ln 2 / λ`.
pub fn half_life<T: Real>(lambda: T) -> Result<T> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidParameter(format!("rate {lambda} must be positive")));
    }
    Ok(T::LN_2() / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::SeriesKind;

    fn exp_series(k: f64, lambda: f64, years: std::ops::RangeInclusive<u32>) -> ProgressSeries<f64> {
        ProgressSeries::from_fn("s", SeriesKind::Time, years.map(f64::from), |t| k * (-lambda * t).exp()).unwrap()
    }

    #[test]
    fn scalar_multiples_collapse_exactly() {
        let a = exp_series(2.0, 0.1, 1..=10);
        let b = a.scaled(7.5);
        assert!(collapse(&[a, b]).unwrap().dispersion < 1e-15);
    }

    #[test]
    fn different_rates_spread() {
        let a = exp_series(2.0, 0.1, 1..=10);
        let b = exp_series(2.0, 0.2, 1..=10);
        let c = collapse(&[a, b]).unwrap();
        assert!(c.dispersion > 0.1);
        assert_eq!(c.worst_t, 10.0);
    }

    #[test]
    fn disjoint_ranges_fail() {
        let a = exp_series(2.0, 0.1, 1..=4);
        let b = exp_series(2.0, 0.1, 6..=9);
        assert!(collapse(&[a, b]).is_err());
        assert!(collapse(&[exp_series(1.0, 0.1, 1..=5)]).is_err());
    }

    #[test]
    fn half_lives() {
        assert!((half_life(2f64.ln() / 10.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((half_life(0.1f64).unwrap() - 6.931).abs() < 1e-3);
        assert!(half_life(0.0f64).is_err());
    }
}
