use super::progress::fit_progress_eq2;
use super::lm::levenberg_marquardt;
use super::{Family, FitParams, FitResult, ProgressSeries};
use crate::error::{Error, Result};
use crate::num::Real;

/// `n·ln(rss/n) + (k+1)·ln n` for `k` mean parameters plus the noise
/// variance, so deltas across families are comparable.
pub fn bic_from_rss<T: Real>(rss: T, n: usize, k: usize) -> Result<T> {
    if !(rss > T::zero()) {
        return Err(Error::Degenerate("rss = 0: likelihood unbounded".into()));
    }
    if n <= k + 1 {
        return Err(Error::InsufficientData(format!("{n} points for {} parameters", k + 1)));
    }
    let nn = T::from_count(n);
    Ok(nn * (rss / nn).ln() + T::from_count(k + 1) * nn.ln())
}

pub fn bic<T: Real>(fit: &FitResult<T>) -> Result<T> {
    bic_from_rss(fit.rss, fit.n_points, fit.family.param_count())
}

/// Intercept and slope of the least-squares line.
pub(crate) fn ols<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    (my - slope * mx, slope)
}

fn need<T: Real>(series: &ProgressSeries<T>, min: usize) -> Result<()> {
    if series.len() < min {
        return Err(Error::InsufficientData(format!(
            "series {} has {} points, need {min}",
            series.label,
            series.len()
        )));
    }
    Ok(())
}

/// `y = k·exp(-λT)`, seeded from a log-linear regression.
pub fn fit_exponential<T: Real>(series: &ProgressSeries<T>) -> Result<FitResult<T>> {
    need(series, 3)?;
    let (t, y) = (series.ts(), series.ys());
    let logy: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let (c, s) = ols(&t, &logy);
    let fit = levenberg_marquardt(&t, &y, &[c.exp(), -s], |x, th, g| {
        let e = (-th[1] * x).exp();
        g[0] = e;
        g[1] = -x * th[0] * e;
        th[0] * e
    });
    let params = FitParams::Exponential { k: fit.params[0], lambda: fit.params[1] };
    Ok(FitResult::new(&series.label, params, fit.rss, series.len(), fit.converged, fit.iterations))
}

/// `y = a - bT` by ordinary least squares.
pub fn fit_linear<T: Real>(series: &ProgressSeries<T>) -> Result<FitResult<T>> {
    need(series, 3)?;
    let (t, y) = (series.ts(), series.ys());
    let (a, slope) = ols(&t, &y);
    let params = FitParams::Linear { a, b: -slope };
    let rss = t.iter().zip(&y).map(|(&x, &v)| (v - params.predict(x)).powi(2)).sum();
    Ok(FitResult::new(&series.label, params, rss, series.len(), true, 0))
}

/// `y = k·T^(-α)`, seeded from a log–log regression. Needs `T > 0`.
pub fn fit_power<T: Real>(series: &ProgressSeries<T>) -> Result<FitResult<T>> {
    need(series, 3)?;
    let (t, y) = (series.ts(), series.ys());
    if t.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::InvalidParameter("power family needs T > 0".into()));
    }
    let logt: Vec<T> = t.iter().map(|v| v.ln()).collect();
    let logy: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let (c, s) = ols(&logt, &logy);
    let fit = levenberg_marquardt(&t, &y, &[c.exp(), -s], |x, th, g| {
        let p = x.powf(-th[1]);
        g[0] = p;
        g[1] = -x.ln() * th[0] * p;
        th[0] * p
    });
    let params = FitParams::Power { k: fit.params[0], alpha: fit.params[1] };
    Ok(FitResult::new(&series.label, params, fit.rss, series.len(), fit.converged, fit.iterations))
}

/// Dispatches on family; the progress curve is fitted unnormalized.
pub fn fit_family<T: Real>(series: &ProgressSeries<T>, family: Family) -> Result<FitResult<T>> {
    match family {
        Family::Exponential => fit_exponential(series),
        Family::Linear => fit_linear(series),
        Family::Power => fit_power(series),
        Family::ProgressEq2 => fit_progress_eq2(series, false),
    }
}

/// Exponential, linear and power fits, in that order.
pub fn fit_all<T: Real>(series: &ProgressSeries<T>) -> Result<Vec<FitResult<T>>> {
    [Family::Exponential, Family::Linear, Family::Power].into_iter().map(|f| fit_family(series, f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::SeriesKind;

    fn series(f: impl Fn(f64) -> f64) -> ProgressSeries<f64> {
        ProgressSeries::from_fn("s", SeriesKind::Time, (1..=15).map(f64::from), f).unwrap()
    }

    #[test]
    fn exponential_recovery() {
        let fit = fit_exponential(&series(|t| 5.0 * (-0.2 * t).exp())).unwrap();
        let FitParams::Exponential { k, lambda } = fit.params else { panic!() };
        assert!((k - 5.0).abs() < 1e-6 && (lambda - 0.2).abs() < 1e-6, "{fit:?}");
        assert!(fit.converged);
    }

    #[test]
    fn constant_series_is_flat_exponential() {
        let fit = fit_exponential(&series(|_| 4.0)).unwrap();
        let FitParams::Exponential { k, lambda } = fit.params else { panic!() };
        assert!(lambda.abs() < 1e-9 && (k - 4.0).abs() < 1e-9);
        assert!(fit.bic.is_none());
    }

    #[test]
    fn linear_recovery() {
        let fit = fit_linear(&series(|t| 10.0 - 0.5 * t)).unwrap();
        let FitParams::Linear { a, b } = fit.params else { panic!() };
        assert!((a - 10.0).abs() < 1e-12 && (b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn power_recovery() {
        let fit = fit_power(&series(|t| 8.0 * t.powf(-0.7))).unwrap();
        let FitParams::Power { k, alpha } = fit.params else { panic!() };
        assert!((k - 8.0).abs() < 1e-6 && (alpha - 0.7).abs() < 1e-6);
    }

    #[test]
    fn bic_formula() {
        let a = bic_from_rss(2.0f64, 20, 2).unwrap();
        let b = bic_from_rss(4.0f64, 20, 2).unwrap();
        assert!((b - a - 20.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(bic_from_rss(2.0f64, 20, 2).unwrap(), bic_from_rss(2.0, 20, 2).unwrap());
        assert!(bic_from_rss(0.0f64, 20, 2).is_err());
        assert!(bic_from_rss(1.0f64, 3, 2).is_err());
    }

    #[test]
    fn too_few_points() {
        let s = ProgressSeries::new("s", SeriesKind::Time, vec![(1.0, 2.0), (2.0, 1.0)]).unwrap();
        assert!(fit_exponential(&s).is_err());
    }

    #[test]
    fn works_in_f32() {
        let s = ProgressSeries::<f32>::from_fn("s", SeriesKind::Time, (1..=15).map(|t| t as f32), |t| {
            5.0 * (-0.2 * t).exp()
        })
        .unwrap();
        let fit = fit_exponential(&s).unwrap();
        let FitParams::Exponential { lambda, .. } = fit.params else { panic!() };
        assert!((lambda - 0.2).abs() < 1e-3);
    }
}
