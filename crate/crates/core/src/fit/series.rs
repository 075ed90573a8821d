use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Seconds.
    Time,
    /// Move counts.
    Moves,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::Time => "time",
            SeriesKind::Moves => "moves",
        }
    }
}

impl std::str::FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SeriesKind> {
        match s.trim() {
            "time" => Ok(SeriesKind::Time),
            "moves" => Ok(SeriesKind::Moves),
            other => Err(Error::InvalidParameter(format!("unknown series kind `{other}`"))),
        }
    }
}

/// Annual values of one event, `T` counting competition years from 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProgressSeries<T> {
    pub label: String,
    pub kind: SeriesKind,
    pub points: Vec<(T, T)>,
}

impl<T: Real> ProgressSeries<T> {
    /// Checks that `T` is strictly increasing and every `y` positive.
    pub fn new(label: impl Into<String>, kind: SeriesKind, points: Vec<(T, T)>) -> Result<Self> {
        let label = label.into();
        if let Some(w) = points.windows(2).find(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter(format!("series {label}: T not strictly increasing at {}", w[1].0)));
        }
        if let Some(p) = points.iter().find(|p| !(p.1 > T::zero()) || !p.1.is_finite()) {
            return Err(Error::InvalidParameter(format!("series {label}: non-positive value at T = {}", p.0)));
        }
        Ok(ProgressSeries { label, kind, points })
    }

    pub fn from_fn(
        label: impl Into<String>,
        kind: SeriesKind,
        ts: impl IntoIterator<Item = T>,
        f: impl Fn(T) -> T,
    ) -> Result<Self> {
        Self::new(label, kind, ts.into_iter().map(|t| (t, f(t))).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ts(&self) -> Vec<T> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<T> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn scaled(&self, c: T) -> Self {
        ProgressSeries { points: self.points.iter().map(|&(t, y)| (t, c * y)).collect(), ..self.clone() }
    }

    pub fn shifted(&self, dt: T) -> Self {
        ProgressSeries { points: self.points.iter().map(|&(t, y)| (t + dt, y)).collect(), ..self.clone() }
    }

    /// The first `n` points.
    pub fn head(&self, n: usize) -> Self {
        ProgressSeries { points: self.points.iter().take(n).copied().collect(), ..self.clone() }
    }

    /// Linear interpolation at `t`; `None` outside the sampled range.
    pub fn interpolate(&self, t: T) -> Option<T> {
        let pts = &self.points;
        let (first, last) = (pts.first()?, pts.last()?);
        if t < first.0 || t > last.0 {
            return None;
        }
        let i = pts.partition_point(|p| p.0 < t);
        if pts[i].0 == t {
            return Some(pts[i].1);
        }
        let (a, b) = (pts[i - 1], pts[i]);
        Some(a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0))
    }
}

#[derive(Deserialize)]
struct Row {
    label: String,
    #[serde(rename = "T")]
    t: f64,
    y: f64,
    kind: String,
}

/// Reads `label,T,y,kind` rows; series appear in first-seen label order.
pub fn read_series_csv<T: Real, R: Read>(input: R) -> Result<Vec<ProgressSeries<T>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    // validated once complete
    let mut out: Vec<ProgressSeries<T>> = Vec::new();
    for (i, rec) in rdr.deserialize::<Row>().enumerate() {
        let row = rec.map_err(|e| Error::Parse { path: "series".into(), line: i + 2, msg: e.to_string() })?;
        let kind: SeriesKind = row.kind.parse()?;
        let point = (T::lit(row.t), T::lit(row.y));
        match out.iter_mut().find(|s| s.label == row.label) {
            Some(s) => s.points.push(point),
            None => out.push(ProgressSeries { label: row.label, kind, points: vec![point] }),
        }
    }
    out.into_iter().map(|s| ProgressSeries::new(s.label, s.kind, s.points)).collect()
}

pub fn write_series_csv<T: Real, W: Write>(series: &[ProgressSeries<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "T", "y", "kind"])?;
    for s in series {
        for &(t, y) in &s.points {
            w.write_record([s.label.as_str(), &t.to_string(), &y.to_string(), s.kind.name()])?;
        }
    }
    w.flush()?;
    Ok(())
}
