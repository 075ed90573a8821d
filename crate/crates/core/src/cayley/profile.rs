use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cube::CubeSpec;
use crate::error::{Error, Result};
use crate::num::Real;

/// One radius of a profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ShellRow<T> {
    pub r: usize,
    /// S(r), states at exactly distance r.
    pub shell: T,
    /// γ(r), states within distance r.
    pub gamma: T,
    /// H(r) = log₂ γ(r), bits.
    pub entropy: T,
    /// b(r) = S(r)/S(r-1); absent at r = 0.
    pub branching: Option<T>,
    /// Relative 95% half-width, sampling mode only.
    pub ci: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ShellProfile<T> {
    pub spec: CubeSpec,
    pub rows: Vec<ShellRow<T>>,
    /// Counts are exact (BFS) rather than estimated.
    pub exact: bool,
    /// BFS stopped early because the next level would not fit the budget.
    pub truncated: bool,
    /// BFS found an empty level, so the last γ is the group order.
    pub exhausted: bool,
}

impl<T: Real> ShellProfile<T> {
    /// Exact profile from integer shell counts, `counts[0]` being the root.
    pub fn from_counts(spec: CubeSpec, counts: &[u64]) -> ShellProfile<T> {
        let shells: Vec<T> = counts.iter().map(|&c| T::lit(c as f64)).collect();
        let mut p = Self::from_shells(spec, &shells, None);
        p.exact = true;
        p
    }

    /// Profile from (possibly estimated) shell sizes with optional relative
    /// CIs per row.
    pub fn from_shells(spec: CubeSpec, shells: &[T], ci: Option<&[T]>) -> ShellProfile<T> {
        let mut rows = Vec::with_capacity(shells.len());
        let mut gamma = T::zero();
        for (r, &s) in shells.iter().enumerate() {
            gamma += s;
            rows.push(ShellRow {
                r,
                shell: s,
                gamma,
                entropy: gamma.log2(),
                branching: (r > 0).then(|| s / shells[r - 1]),
                ci: ci.map(|c| c[r]),
            });
        }
        ShellProfile { spec, rows, exact: false, truncated: false, exhausted: false }
    }

    pub fn depth(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn shells(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.shell).collect()
    }

    /// Shell sizes rounded to integers; meaningful for exact profiles.
    pub fn shell_counts(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.shell.as_f64().round() as u64).collect()
    }

    pub fn ball(&self) -> T {
        self.rows.last().map_or(T::zero(), |r| r.gamma)
    }

    /// CSV with header `r,S,gamma,H,b,ci`; absent values are empty fields.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "S", "gamma", "H", "b", "ci"])?;
        let opt = |v: Option<T>| v.map(|x| x.to_string()).unwrap_or_default();
        for row in &self.rows {
            w.write_record([
                row.r.to_string(),
                row.shell.to_string(),
                row.gamma.to_string(),
                row.entropy.to_string(),
                opt(row.branching),
                opt(row.ci),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// `(r, H(r))` pairs.
pub fn entropy_series<T: Real>(profile: &ShellProfile<T>) -> Vec<(usize, T)> {
    profile.rows.iter().map(|r| (r.r, r.entropy)).collect()
}

/// Linear-regime summary of a profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PlateauFit<T> {
    /// Radii used, inclusive.
    pub window: (usize, usize),
    /// Least-squares slope of H(r) over the window, bits per move.
    pub slope: T,
    /// Geometric mean of b(r) over the window.
    pub plateau_b: T,
    pub log2_b: T,
}

impl<T: Real> PlateauFit<T> {
    pub fn relative_gap(&self) -> T {
        ((self.slope - self.log2_b) / self.log2_b).abs()
    }
}

/// Slope of H(r) and the mean branching factor over the pre-saturation
/// window `2..=r_peak-1`, where `r_peak` is the radius of the largest
/// shell. Needs at least two radii in the window.
pub fn plateau_branching<T: Real>(profile: &ShellProfile<T>) -> Result<PlateauFit<T>> {
    let peak = profile
        .rows
        .iter()
        .fold(None::<&ShellRow<T>>, |best, r| match best {
            Some(b) if b.shell >= r.shell => Some(b),
            _ => Some(r),
        })
        .ok_or_else(|| Error::InsufficientData("empty profile".into()))?
        .r;
    if peak < 4 {
        return Err(Error::InsufficientData(format!("largest shell at r = {peak}; need r ≥ 4 for a plateau window")));
    }
    let (lo, hi) = (2, peak - 1);
    let rows = &profile.rows[lo..=hi];
    let n = T::from_count(rows.len());
    let mean_r = rows.iter().map(|r| T::from_count(r.r)).sum::<T>() / n;
    let mean_h = rows.iter().map(|r| r.entropy).sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for row in rows {
        let dx = T::from_count(row.r) - mean_r;
        sxy += dx * (row.entropy - mean_h);
        sxx += dx * dx;
    }
    let log2_b = rows.iter().map(|r| r.branching.expect("r ≥ 1").log2()).sum::<T>() / n;
    Ok(PlateauFit { window: (lo, hi), slope: sxy / sxx, plateau_b: log2_b.exp2(), log2_b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> CubeSpec {
        CubeSpec::htm(3).unwrap()
    }

    #[test]
    fn root_only_profile() {
        let p = ShellProfile::<f64>::from_counts(spec(), &[1]);
        assert_eq!(entropy_series(&p), vec![(0, 0.0)]);
        assert_eq!(p.rows[0].branching, None);
    }

    #[test]
    fn ball_and_entropy_from_counts() {
        let p = ShellProfile::<f64>::from_counts(spec(), &[1, 18, 243]);
        assert_eq!(p.rows[2].gamma, 262.0);
        assert!((p.rows[2].entropy - 262f64.log2()).abs() < 1e-12);
        assert!((p.rows[2].entropy - 8.03).abs() < 0.01);
        assert_eq!(p.rows[2].branching, Some(13.5));
    }

    #[test]
    fn csv_layout() {
        let p = ShellProfile::<f64>::from_counts(spec(), &[1, 18]);
        let text = p.to_csv_string();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r,S,gamma,H,b,ci"));
        assert_eq!(lines.next(), Some("0,1,1,0,,"));
        assert!(lines.next().unwrap().starts_with("1,18,19,"));
    }

    #[test]
    fn pure_geometric_growth_has_matching_slope() {
        let counts: Vec<u64> = (0..12).map(|r| 3u64.pow(r)).collect();
        let mut counts = counts;
        counts.push(5);
        let p = ShellProfile::<f64>::from_counts(spec(), &counts);
        let fit = plateau_branching(&p).unwrap();
        assert_eq!(fit.window, (2, 10));
        assert!((fit.plateau_b - 3.0).abs() < 1e-9);
        assert!(fit.relative_gap() < 0.05, "{fit:?}");
    }

    #[test]
    fn generic_over_f32() {
        let p = ShellProfile::<f32>::from_counts(spec(), &[1, 18, 243]);
        assert_eq!(p.ball(), 262.0f32);
    }
}
