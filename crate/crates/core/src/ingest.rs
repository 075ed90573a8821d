//! Competition-record parsing and annual record-progression series.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{ProgressSeries, SeriesKind};
use crate::num::Real;

const EVENT_MAP: &str = include_str!("../data/event_map.csv");

/// `(code, label)` pairs of the supported events, e.g. `("333bf", "3b")`.
pub fn event_map() -> Vec<(&'static str, &'static str)> {
    EVENT_MAP.lines().skip(1).filter_map(|l| l.trim().split_once(',')).collect()
}

/// Maps an export code or an already short label to the short label.
pub fn event_label(code: &str) -> Option<&'static str> {
    event_map().into_iter().find(|(c, l)| *c == code || *l == code).map(|(_, l)| l)
}

/// Supported labels in table order.
pub fn event_labels() -> Vec<&'static str> {
    event_map().into_iter().map(|(_, l)| l).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultKind {
    Single,
    Average,
}

impl std::str::FromStr for ResultKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "single" => Ok(ResultKind::Single),
            "average" => Ok(ResultKind::Average),
            other => Err(Error::InvalidParameter(format!("unknown result kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordRow {
    pub person_id: String,
    /// Short label, e.g. `3b`.
    pub event: String,
    pub date: NaiveDate,
    /// Centiseconds.
    pub value: u64,
    pub kind: ResultKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub rows: Vec<RecordRow>,
    pub errors: Vec<RowError>,
}

impl ParseReport {
    /// The rows, or [`Error::Malformed`] if any row was rejected.
    pub fn into_rows(self) -> Result<Vec<RecordRow>> {
        match self.errors.first() {
            None => Ok(self.rows),
            Some(e) => Err(Error::Malformed(self.errors.len(), format!("line {}: {}", e.line, e.message))),
        }
    }
}

const COLUMNS: [&str; 5] = ["person_id", "event", "date", "value", "kind"];

/// Reads a CSV or TSV export (tab-separated when the extension is `.tsv`).
/// Bad rows are collected with their line numbers; with `strict` the first
/// one aborts the parse.
pub fn parse_records(path: &Path, strict: bool) -> Result<ParseReport> {
    let file = std::fs::File::open(path)?;
    let tab = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsv"));
    parse_records_from(file, &path.display().to_string(), if tab { b'\t' } else { b',' }, strict)
}

pub fn parse_records_from<R: Read>(input: R, name: &str, delimiter: u8, strict: bool) -> Result<ParseReport> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(delimiter).trim(csv::Trim::All).flexible(true).from_reader(input);
    let header = rdr.headers()?.clone();
    let mut idx = [0usize; 5];
    for (slot, col) in idx.iter_mut().zip(COLUMNS) {
        *slot = header.iter().position(|h| h == col).ok_or_else(|| Error::Parse {
            path: name.to_string(),
            line: 1,
            msg: format!("missing column `{col}`"),
        })?;
    }
    let mut report = ParseReport::default();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let parsed = rec.map_err(|e| e.to_string()).and_then(|r| parse_row(&r, &idx));
        match parsed {
            Ok(row) => report.rows.push(row),
            Err(msg) if strict => return Err(Error::Parse { path: name.to_string(), line, msg }),
            Err(message) => report.errors.push(RowError { line, message }),
        }
    }
    Ok(report)
}

fn parse_row(r: &csv::StringRecord, idx: &[usize; 5]) -> std::result::Result<RecordRow, String> {
    let field = |k: usize| r.get(idx[k]).ok_or_else(|| format!("missing field `{}`", COLUMNS[k]));
    let person_id = field(0)?.to_string();
    if person_id.is_empty() {
        return Err("empty person_id".into());
    }
    let code = field(1)?;
    let event = event_label(code).ok_or_else(|| format!("unsupported event `{code}`"))?.to_string();
    let date = NaiveDate::parse_from_str(field(2)?, "%Y-%m-%d").map_err(|e| format!("bad date: {e}"))?;
    let raw = field(3)?;
    let value: u64 = raw.parse().map_err(|_| format!("bad value `{raw}`"))?;
    if value == 0 {
        return Err("value must be positive".into());
    }
    let kind = field(4)?.parse::<ResultKind>().map_err(|e| e.to_string())?;
    Ok(RecordRow { person_id, event, date, value, kind })
}

/// Which result type to follow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindChoice {
    /// Averages when the event has any, otherwise singles.
    #[default]
    Auto,
    Single,
    Average,
}

/// How record-setting solves are condensed per calendar year.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnualRule {
    /// Mean of the records set during the year.
    #[default]
    MeanOfRecords,
    /// Best record standing at the end of the year.
    YearEndBest,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub kind: KindChoice,
    pub rule: AnnualRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AnnualSeries<T> {
    /// Values in seconds.
    pub series: ProgressSeries<T>,
    pub first_year: i32,
    pub kind: ResultKind,
    /// Distinct people among the record-setting rows.
    pub record_breakers: usize,
    /// The record-setting rows in chronological order.
    pub records: Vec<RecordRow>,
}

fn chosen_kind(rows: &[&RecordRow], choice: KindChoice) -> ResultKind {
    match choice {
        KindChoice::Single => ResultKind::Single,
        KindChoice::Average => ResultKind::Average,
        KindChoice::Auto if rows.iter().any(|r| r.kind == ResultKind::Average) => ResultKind::Average,
        KindChoice::Auto => ResultKind::Single,
    }
}

/// Rows of `event` that beat every earlier one, in date order; rows on the
/// same date keep their input order.
pub fn record_rows<'a>(rows: &'a [RecordRow], event: &str, kind: ResultKind) -> Vec<&'a RecordRow> {
    let mut chosen: Vec<&RecordRow> = rows.iter().filter(|r| r.event == event && r.kind == kind).collect();
    chosen.sort_by_key(|r| r.date);
    let mut best = u64::MAX;
    chosen.retain(|r| {
        let keep = r.value < best;
        if keep {
            best = r.value;
        }
        keep
    });
    chosen
}

/// Annual series of record-setting values for one event, `T = 1` being the
/// year of its first record. Years without a new record are absent.
pub fn extract_progress<T: Real>(rows: &[RecordRow], event: &str, opts: ExtractOptions) -> Result<AnnualSeries<T>> {
    let label = event_label(event).unwrap_or(event);
    let of_event: Vec<&RecordRow> = rows.iter().filter(|r| r.event == label).collect();
    if of_event.is_empty() {
        return Err(Error::InsufficientData(format!("no rows for event {label}")));
    }
    let kind = chosen_kind(&of_event, opts.kind);
    let records = record_rows(rows, label, kind);
    if records.is_empty() {
        return Err(Error::InsufficientData(format!("no {kind:?} rows for event {label}")));
    }
    let first_year = records[0].date.year();
    let mut by_year: BTreeMap<i32, Vec<u64>> = BTreeMap::new();
    for r in &records {
        by_year.entry(r.date.year()).or_default().push(r.value);
    }
    let points = by_year
        .into_iter()
        .map(|(year, vals)| {
            let cs = match opts.rule {
                AnnualRule::MeanOfRecords => vals.iter().sum::<u64>() as f64 / vals.len() as f64,
                AnnualRule::YearEndBest => *vals.last().expect("non-empty") as f64,
            };
            (T::from_count((year - first_year + 1) as usize), T::lit(cs / 100.0))
        })
        .collect();
    let record_breakers = records.iter().map(|r| r.person_id.as_str()).collect::<BTreeSet<_>>().len();
    Ok(AnnualSeries {
        series: ProgressSeries::new(label, SeriesKind::Time, points)?,
        first_year,
        kind,
        record_breakers,
        records: records.into_iter().cloned().collect(),
    })
}

/// `(person, event)` for every record-setting row of the given events.
pub fn record_holders(rows: &[RecordRow], events: &[&str], choice: KindChoice) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for &event in events {
        let of_event: Vec<&RecordRow> = rows.iter().filter(|r| r.event == event).collect();
        if of_event.is_empty() {
            continue;
        }
        let kind = chosen_kind(&of_event, choice);
        out.extend(record_rows(rows, event, kind).into_iter().map(|r| (r.person_id.clone(), r.event.clone())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ParseReport {
        parse_records_from(text.as_bytes(), "mem", b',', false).unwrap()
    }

    #[test]
    fn mapping_table() {
        assert_eq!(event_label("333bf"), Some("3b"));
        assert_eq!(event_label("777"), Some("7"));
        assert_eq!(event_label("4b"), Some("4b"));
        assert_eq!(event_label("222"), None);
        assert_eq!(event_labels().len(), 8);
    }

    #[test]
    fn well_formed_rows() {
        let r = parse("person_id,event,date,value,kind\na,333,2003-08-23,2000,single\nb,444,2004-01-02,9000,average\nc,333bf,2005-05-05,30000,single\n");
        assert_eq!(r.rows.len(), 3);
        assert!(r.errors.is_empty());
        assert_eq!(r.rows[2].event, "3b");
    }

    #[test]
    fn zero_value_rejected_with_line() {
        let text = "person_id,event,date,value,kind\na,333,2003-08-23,2000,single\nb,333,2003-09-01,0,single\n";
        let r = parse(text);
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.errors[0].line, 3);
        let strict = parse_records_from(text.as_bytes(), "mem", b',', true);
        assert!(matches!(strict, Err(Error::Parse { line: 3, .. })));
        assert!(r.into_rows().is_err());
    }

    #[test]
    fn missing_column() {
        assert!(parse_records_from("person_id,event,date\n".as_bytes(), "mem", b',', false).is_err());
    }

    #[test]
    fn bad_date() {
        let r = parse("person_id,event,date,value,kind\na,333,2003-13-01,2000,single\n");
        assert!(r.errors[0].message.contains("date"));
    }

    #[test]
    fn annual_mean_of_records() {
        let mut text = String::from("person_id,event,date,value,kind\n");
        for (i, v) in [1000, 1200, 900, 900, 800].iter().enumerate() {
            text.push_str(&format!("p{i},333,2005-0{}-01,{v},single\n", i + 1));
        }
        let rows = parse(&text).rows;
        let s: AnnualSeries<f64> = extract_progress(&rows, "3", ExtractOptions::default()).unwrap();
        assert_eq!(s.series.points, vec![(1.0, 9.0)]);
        assert_eq!(s.records.len(), 3);
        assert_eq!(s.record_breakers, 3);
    }

    #[test]
    fn averages_preferred() {
        let rows =
            parse("person_id,event,date,value,kind\na,333,2003-01-01,1500,single\na,333,2003-01-01,2000,average\n")
                .rows;
        let s: AnnualSeries<f64> = extract_progress(&rows, "333", ExtractOptions::default()).unwrap();
        assert_eq!(s.kind, ResultKind::Average);
        assert_eq!(s.series.points, vec![(1.0, 20.0)]);
        let opts = ExtractOptions { kind: KindChoice::Single, ..Default::default() };
        let s: AnnualSeries<f64> = extract_progress(&rows, "333", opts).unwrap();
        assert_eq!(s.series.points, vec![(1.0, 15.0)]);
    }

    #[test]
    fn no_rows_for_event() {
        assert!(extract_progress::<f64>(&[], "3", ExtractOptions::default()).is_err());
    }
}
