//! Single change in variance, located by a Gaussian likelihood ratio and
//! tested by permutation.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{FitResult, ProgressSeries};
use crate::num::Real;
use crate::rng;

pub const MIN_POINTS: usize = 6;
pub const MIN_PERMUTATIONS: usize = 199;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ChangePointResult<T> {
    /// Size of the first segment, i.e. the 0-based position of the first
    /// point after the change. `2 ≤ index ≤ n - 2`.
    pub index: usize,
    /// `T` of the first point after the change, when the input had one.
    pub split_t: Option<T>,
    /// Log-likelihood ratio of the two-variance model.
    pub statistic: T,
    pub p_value: T,
    pub significant: bool,
    pub alpha: T,
    pub permutations: usize,
    pub n: usize,
}

/// Where segment variances are measured from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// One mean for the whole series; only the variance may change.
    #[default]
    Global,
    /// Each segment about its own mean, so a level shift also counts.
    Segment,
}

/// Best split and its statistic:
/// `n ln σ² − k ln σ₁² − (n−k) ln σ₂²`. Both centerings are shift
/// invariant. Segment variances are floored at a tiny fraction of the
/// global variance.
fn best_split<T: Real>(x: &[T], centering: Centering) -> (usize, T) {
    let n = x.len();
    let nn = T::from_count(n);
    let mean = x.iter().copied().sum::<T>() / nn;
    let d: Vec<T> = x.iter().map(|&v| v - mean).collect();
    let total: T = d.iter().map(|&v| v * v).sum();
    let sum_all: T = d.iter().copied().sum();
    let var = total / nn;
    if !(var > T::zero()) {
        return (2, T::zero());
    }
    let floor = var * T::lit(1e-12);
    let mut best = (2, T::neg_infinity());
    let (mut left, mut left_sum) = (T::zero(), T::zero());
    for k in 1..n - 1 {
        left += d[k - 1] * d[k - 1];
        left_sum += d[k - 1];
        if k < 2 {
            continue;
        }
        let (kk, rk) = (T::from_count(k), T::from_count(n - k));
        let (mut v1, mut v2) = (left / kk, (total - left) / rk);
        if centering == Centering::Segment {
            let m1 = left_sum / kk;
            let m2 = (sum_all - left_sum) / rk;
            v1 -= m1 * m1;
            v2 -= m2 * m2;
        }
        let v1 = v1.max(floor);
        let v2 = v2.max(floor);
        let stat = nn * var.ln() - kk * v1.ln() - rk * v2.ln();
        if stat > best.1 {
            best = (k, stat);
        }
    }
    (best.0, best.1.max(T::zero()))
}

/// Locates the most likely variance change and its permutation p-value
/// `(1 + #{perm ≥ observed}) / (1 + permutations)`. Permutation `i` is
/// shuffled with `rng::sub_rng(seed, i)`. Variances are taken about the
/// global mean.
pub fn detect_variance_changepoint<T: Real>(
    values: &[T],
    alpha: T,
    permutations: usize,
    seed: u64,
) -> Result<ChangePointResult<T>> {
    detect_variance_changepoint_with(values, alpha, permutations, seed, Centering::Global)
}

pub fn detect_variance_changepoint_with<T: Real>(
    values: &[T],
    alpha: T,
    permutations: usize,
    seed: u64,
    centering: Centering,
) -> Result<ChangePointResult<T>> {
    if values.len() < MIN_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} points, change-point detection needs {MIN_POINTS}",
            values.len()
        )));
    }
    if permutations < MIN_PERMUTATIONS {
        return Err(Error::InvalidParameter(format!("{permutations} permutations, need {MIN_PERMUTATIONS}")));
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    let (index, statistic) = best_split(values, centering);
    let tol = statistic.abs() * T::lit(1e-9);
    let exceed = if statistic > T::zero() {
        (0..permutations as u64)
            .into_par_iter()
            .filter(|&i| {
                let mut r = rng::sub_rng(seed, i);
                let mut shuffled = values.to_vec();
                shuffled.shuffle(&mut r);
                best_split(&shuffled, centering).1 >= statistic - tol
            })
            .count()
    } else {
        permutations
    };
    let p_value = T::from_count(exceed + 1) / T::from_count(permutations + 1);
    Ok(ChangePointResult {
        index,
        split_t: None,
        statistic,
        p_value,
        significant: p_value < alpha,
        alpha,
        permutations,
        n: values.len(),
    })
}

/// `y - ŷ` at each point of the series.
pub fn residuals<T: Real>(series: &ProgressSeries<T>, fit: &FitResult<T>) -> Vec<T> {
    series.points.iter().map(|&(t, y)| y - fit.predict(t)).collect()
}

/// Change point of the residuals of `series` about `fit`, reporting the
/// split in `T` units as well.
pub fn detect_on_residuals<T: Real>(
    series: &ProgressSeries<T>,
    fit: &FitResult<T>,
    alpha: T,
    permutations: usize,
    seed: u64,
) -> Result<ChangePointResult<T>> {
    let mut out = detect_variance_changepoint(&residuals(series, fit), alpha, permutations, seed)?;
    out.split_t = Some(series.points[out.index].0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_not_significant() {
        let out = detect_variance_changepoint(&[3.0f64; 12], 0.05, 199, 1).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert!(!out.significant);
        assert_eq!(out.p_value, 1.0);
    }

    #[test]
    fn obvious_change() {
        let mut x: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
        x.extend((0..10).map(|i| if i % 2 == 0 { 5.0 } else { -5.0 }));
        let out = detect_variance_changepoint(&x, 0.05, 499, 2).unwrap();
        assert_eq!(out.index, 10);
        assert!(out.significant);
        assert!((2..=x.len() - 2).contains(&out.index));
    }

    #[test]
    fn shift_invariant() {
        let x: Vec<f64> = (0..15).map(|i| ((i * 7919) % 13) as f64 * if i < 6 { 0.2 } else { 1.0 }).collect();
        let y: Vec<f64> = x.iter().map(|v| v + 100.0).collect();
        let a = detect_variance_changepoint(&x, 0.05, 199, 5).unwrap();
        let b = detect_variance_changepoint(&y, 0.05, 199, 5).unwrap();
        assert_eq!(a.index, b.index);
        assert!((a.statistic - b.statistic).abs() < 1e-9);
    }

    #[test]
    fn segment_centering_sees_level_shifts() {
        let x: Vec<f64> =
            (0..16).map(|i| if i < 8 { 0.0 } else { 10.0 } + if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
        let a = detect_variance_changepoint_with(&x, 0.05, 199, 3, Centering::Segment).unwrap();
        assert_eq!(a.index, 8);
        let y: Vec<f64> = x.iter().map(|v| v * 3.0 - 7.0).collect();
        let b = detect_variance_changepoint_with(&y, 0.05, 199, 3, Centering::Segment).unwrap();
        assert_eq!(a.index, b.index);
        assert!((a.statistic - b.statistic).abs() < 1e-9);
    }

    #[test]
    fn preconditions() {
        assert!(detect_variance_changepoint(&[1.0f64, 2.0, 3.0], 0.05, 199, 0).is_err());
        assert!(detect_variance_changepoint(&[1.0f64; 8], 0.05, 10, 0).is_err());
    }
}
