use serde::{Deserialize, Serialize};

use super::lm::levenberg_marquardt;
use super::{FitParams, FitResult, ProgressSeries};
use crate::error::{Error, Result};
use crate::num::Real;

const R_GRID: usize = 80;
const TAU_GRID: usize = 161;

/// `A·(1 + exp(r(τ - T)))`, seeded by a grid over `(r, τ)` with `A` in
/// closed form, then refined by Levenberg–Marquardt.
///
/// With `normalize`, the series is divided by the fitted asymptote and
/// `(r, τ)` refitted with the amplitude pinned to 1; the asymptote is kept
/// as `asymptote_scale` and the RSS is reported in the original units. The
/// parameter count used for BIC is 3 in both modes.
pub fn fit_progress_eq2<T: Real>(series: &ProgressSeries<T>, normalize: bool) -> Result<FitResult<T>> {
    if series.len() < 4 {
        return Err(Error::InsufficientData(format!("series {} has {} points, need 4", series.label, series.len())));
    }
    let (t, y) = (series.ts(), series.ys());
    let (lo, hi) = (t[0], t[t.len() - 1]);
    let span = hi - lo;

    let mut best = (T::infinity(), T::zero(), T::zero(), T::zero());
    for i in 0..R_GRID {
        let r = T::lit(0.01) * T::lit(300.0).powf(T::from_count(i) / T::from_count(R_GRID - 1));
        for j in 0..TAU_GRID {
            let tau = lo - span + T::lit(3.0) * span * T::from_count(j) / T::from_count(TAU_GRID - 1);
            let phi: Vec<T> = t.iter().map(|&x| T::one() + (r * (tau - x)).exp()).collect();
            let (num, den) = phi.iter().zip(&y).fold((T::zero(), T::zero()), |(n, d), (&p, &v)| (n + p * v, d + p * p));
            if !(den.is_finite() && den > T::zero()) {
                continue;
            }
            let a = num / den;
            let rss: T = phi.iter().zip(&y).map(|(&p, &v)| (v - a * p).powi(2)).sum();
            if rss < best.0 {
                best = (rss, a, r, tau);
            }
        }
    }
    let full = levenberg_marquardt(&t, &y, &[best.1, best.2, best.3], |x, th, g| {
        let e = (th[1] * (th[2] - x)).exp();
        g[0] = T::one() + e;
        g[1] = th[0] * e * (th[2] - x);
        g[2] = th[0] * e * th[1];
        th[0] * (T::one() + e)
    });
    let (a, r, tau) = (full.params[0], full.params[1], full.params[2]);

    let (params, rss, converged, iterations) = if normalize {
        let yn: Vec<T> = y.iter().map(|&v| v / a).collect();
        let fit = levenberg_marquardt(&t, &yn, &[r, tau], |x, th, g| {
            let e = (th[0] * (th[1] - x)).exp();
            g[0] = e * (th[1] - x);
            g[1] = e * th[0];
            T::one() + e
        });
        let params = FitParams::ProgressEq2 {
            amplitude: T::one(),
            r_learn: fit.params[0],
            tau: fit.params[1],
            asymptote_scale: a,
        };
        (params, fit.rss * a * a, full.converged && fit.converged, full.iterations + fit.iterations)
    } else {
        let params = FitParams::ProgressEq2 { amplitude: a, r_learn: r, tau, asymptote_scale: T::one() };
        (params, full.rss, full.converged, full.iterations)
    };
    let FitParams::ProgressEq2 { r_learn, .. } = params else { unreachable!() };
    let valid = a > T::zero() && r_learn > T::zero() && rss.is_finite();
    Ok(FitResult::new(&series.label, params, rss, series.len(), converged && valid, iterations))
}

/// `p_f(T) = ½ + ½ / (1 + exp(r(τ - T)))`.
pub fn learning_probability<T: Real>(r_learn: T, tau: T, t: T) -> T {
    let half = T::lit(0.5);
    half + half / (T::one() + (r_learn * (tau - t)).exp())
}

/// Forward probability over competition years implied by a progress fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LearningCurve<T> {
    pub label: String,
    pub r_learn: T,
    pub tau: T,
    /// Fitted asymptote G in data units.
    pub asymptote: T,
    /// `(T, p_f)` for `T = 1..=horizon`.
    pub samples: Vec<(T, T)>,
}

impl<T: Real> LearningCurve<T> {
    /// Progress implied by a walk with forward probability `p_f`:
    /// `G / (2 p_f - 1)`.
    pub fn progress(&self, p_f: T) -> T {
        self.asymptote / (T::lit(2.0) * p_f - T::one())
    }
}

pub fn derive_learning_curve<T: Real>(fit: &FitResult<T>, horizon: usize) -> Result<LearningCurve<T>> {
    let FitParams::ProgressEq2 { amplitude, r_learn, tau, asymptote_scale } = fit.params else {
        return Err(Error::InvalidParameter(format!(
            "learning curves need a progress_eq2 fit, got {}",
            fit.family.name()
        )));
    };
    if !fit.converged {
        return Err(Error::Degenerate(format!("fit for {} did not converge", fit.label)));
    }
    let samples = (1..=horizon)
        .map(|i| {
            let t = T::from_count(i);
            (t, learning_probability(r_learn, tau, t))
        })
        .collect();
    Ok(LearningCurve { label: fit.label.clone(), r_learn, tau, asymptote: amplitude * asymptote_scale, samples })
}
