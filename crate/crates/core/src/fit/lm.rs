//! Levenberg–Marquardt for models with a handful of parameters.

use crate::num::Real;

pub(crate) struct LmFit<T> {
    pub params: Vec<T>,
    pub rss: T,
    pub converged: bool,
    pub iterations: usize,
}

pub(crate) const MAX_ITER: usize = 500;

/// Minimizes `Σ (y_i - f(x_i; θ))²`. `model(x, θ, grad)` returns `f` and
/// writes `∂f/∂θ` into `grad`.
pub(crate) fn levenberg_marquardt<T, F>(x: &[T], y: &[T], theta0: &[T], model: F) -> LmFit<T>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]) -> T,
{
    let k = theta0.len();
    let eps = T::epsilon();
    let xtol = eps.powf(T::lit(0.75));
    let ftol = eps * T::lit(100.0);
    let scale: T = y.iter().map(|&v| v * v).sum::<T>().max(T::min_positive_value());

    let mut theta = theta0.to_vec();
    let mut grad = vec![T::zero(); k];
    let eval = |theta: &[T], grad: &mut [T]| -> T {
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let r = yi - model(xi, theta, grad);
                r * r
            })
            .sum()
    };
    let mut rss = eval(&theta, &mut grad);
    if !rss.is_finite() {
        return LmFit { params: theta, rss, converged: false, iterations: 0 };
    }
    let mut lambda = T::lit(1e-3);

    for iter in 1..=MAX_ITER {
        if rss <= eps * eps * scale {
            return LmFit { params: theta, rss, converged: true, iterations: iter - 1 };
        }
        // Normal equations.
        let mut jtj = vec![T::zero(); k * k];
        let mut jtr = vec![T::zero(); k];
        for (&xi, &yi) in x.iter().zip(y) {
            let f = model(xi, &theta, &mut grad);
            let r = yi - f;
            for a in 0..k {
                jtr[a] += grad[a] * r;
                for b in 0..k {
                    jtj[a * k + b] += grad[a] * grad[b];
                }
            }
        }
        loop {
            let mut m = jtj.clone();
            for a in 0..k {
                let d = jtj[a * k + a];
                m[a * k + a] = d + lambda * d.max(T::lit(1e-12));
            }
            let step = match solve(&mut m, &jtr, k) {
                Some(s) => s,
                None => {
                    lambda *= T::lit(10.0);
                    if lambda > T::lit(1e20) {
                        return LmFit { params: theta, rss, converged: false, iterations: iter };
                    }
                    continue;
                }
            };
            let trial: Vec<T> = theta.iter().zip(&step).map(|(&t, &s)| t + s).collect();
            let new_rss = eval(&trial, &mut grad);
            if new_rss.is_finite() && new_rss <= rss {
                let reduction = (rss - new_rss) / rss.max(T::min_positive_value());
                let step_norm = step.iter().map(|&s| s * s).sum::<T>().sqrt();
                let theta_norm = theta.iter().map(|&t| t * t).sum::<T>().sqrt();
                theta = trial;
                rss = new_rss;
                lambda = (lambda / T::lit(10.0)).max(T::lit(1e-15));
                let tiny_step = step_norm <= xtol * (theta_norm + xtol);
                let stalled = reduction <= ftol && step_norm <= xtol.sqrt() * (theta_norm + xtol);
                if tiny_step || stalled {
                    return LmFit { params: theta, rss, converged: true, iterations: iter };
                }
                break;
            }
            lambda *= T::lit(10.0);
            if lambda > T::lit(1e20) {
                // No representable descent step remains: a minimum to working precision.
                return LmFit { params: theta, rss, converged: true, iterations: iter };
            }
        }
    }
    LmFit { params: theta, rss, converged: false, iterations: MAX_ITER }
}

/// Gaussian elimination with partial pivoting on a `k × k` system.
fn solve<T: Real>(m: &mut [T], rhs: &[T], k: usize) -> Option<Vec<T>> {
    let mut b = rhs.to_vec();
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| {
            m[i * k + col].abs().partial_cmp(&m[j * k + col].abs()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot * k + col].abs() <= T::min_positive_value() || !m[pivot * k + col].is_finite() {
            return None;
        }
        if pivot != col {
            for c in 0..k {
                m.swap(col * k + c, pivot * k + c);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..k {
            let f = m[row * k + col] / m[col * k + col];
            for c in col..k {
                let v = m[col * k + c];
                m[row * k + c] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut out = vec![T::zero(); k];
    for row in (0..k).rev() {
        let mut s = b[row];
        for c in row + 1..k {
            s -= m[row * k + c] * out[c];
        }
        out[row] = s / m[row * k + row];
    }
    Some(out)
}
