//! Batch runner: one declarative config, one artifact per analysis, and a
//! manifest written last.
//!
//! ```toml
//! output_dir = "out"
//! alpha = 0.05
//! events = ["3", "4", "5", "6", "7"]
//!
//! [inputs]
//! records = "records.csv"   # record holders and, failing `series`, the series
//! series = "series.csv"
//!
//! [seeds]
//! default = 1
//! changepoint = 7
//!
//! [[analyses]]
//! kind = "shells"
//! n = 2
//! depth = 14
//! ```
//!
//! Relative paths are resolved against the config file's directory.
//! Outputs contain no timestamps or absolute paths, so identical configs
//! give byte-identical bundles.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cayley::{self, bfs_shells, build_distance_table, estimate_shells, plateau_branching};
use crate::changepoint::{self, detect_variance_changepoint_with, Centering};
use crate::cube::CubeSpec;
use crate::error::{Error, Result};
use crate::fit::{self, derive_learning_curve, fit_progress_eq2, Family, FitResult, ProgressSeries};
use crate::ingest::{self, ExtractOptions, RecordRow};
use crate::network::{build_graph, detect_communities, CompetitorGraph};
use crate::walk::{self, WalkParams};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// Competition records, `person_id,event,date,value,kind`.
    pub records: Option<PathBuf>,
    /// Ready-made series, `label,T,y,kind`. Takes precedence over series
    /// extracted from `records`.
    pub series: Option<PathBuf>,
}

fn default_alpha() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub inputs: Inputs,
    /// Events to analyze; empty means every event present in the input.
    #[serde(default)]
    pub events: Vec<String>,
    pub analyses: Vec<Analysis>,
    /// Seed per analysis kind, falling back to `default`, then 0.
    #[serde(default)]
    pub seeds: BTreeMap<String, u64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub extract: ExtractOptions,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    /// Exact BFS profile, or a sampled estimate when `sample` is set.
    Shells { n: u8, depth: usize, fixed_reference: Option<bool>, budget_gib: Option<f64>, sample: Option<usize> },
    Walk {
        p_f: Vec<f64>,
        #[serde(default = "Analysis::default_r0")]
        r0: u32,
        #[serde(default = "Analysis::default_diameter")]
        diameter: u32,
        #[serde(default = "Analysis::default_trials")]
        trials: usize,
        /// Walk the 2-cube graph instead of the 1-D chain.
        #[serde(default)]
        cayley: bool,
    },
    Fit {
        #[serde(default)]
        families: Vec<Family>,
        #[serde(default = "yes")]
        normalize: bool,
    },
    Collapse {
        #[serde(default)]
        events: Vec<String>,
    },
    LearningCurve {
        #[serde(default = "Analysis::default_horizon")]
        horizon: usize,
        #[serde(default)]
        events: Vec<String>,
    },
    Changepoint {
        event: String,
        #[serde(default = "Analysis::default_perms")]
        perms: usize,
        /// Fit the exponential to the first `fit_years` points only.
        fit_years: Option<usize>,
        #[serde(default)]
        input: ChangepointInput,
        #[serde(default)]
        centering: Centering,
    },
    Network {
        #[serde(default = "yes")]
        weighted: bool,
    },
}

/// What the change-point detector scans.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangepointInput {
    /// `y - ŷ` about a single exponential.
    #[default]
    Residuals,
    Times,
    LogTimes,
}

impl Analysis {
    fn default_r0() -> u32 {
        20
    }
    fn default_diameter() -> u32 {
        100
    }
    fn default_trials() -> usize {
        10_000
    }
    fn default_horizon() -> usize {
        30
    }
    fn default_perms() -> usize {
        999
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Analysis::Shells { .. } => "shells",
            Analysis::Walk { .. } => "walk",
            Analysis::Fit { .. } => "fit",
            Analysis::Collapse { .. } => "collapse",
            Analysis::LearningCurve { .. } => "learning_curve",
            Analysis::Changepoint { .. } => "changepoint",
            Analysis::Network { .. } => "network",
        }
    }

    fn uses_seed(&self) -> bool {
        matches!(self, Analysis::Walk { .. } | Analysis::Changepoint { .. } | Analysis::Shells { sample: Some(_), .. })
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn seed_for(&self, kind: &str) -> u64 {
        self.seeds.get(kind).or_else(|| self.seeds.get("default")).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub index: usize,
    pub kind: String,
    pub seed: Option<u64>,
    pub file: Option<String>,
    pub sha256: Option<String>,
    pub error: Option<String>,
    pub summary: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub output_dir: PathBuf,
    pub tasks: Vec<TaskReport>,
}

impl PipelineReport {
    pub fn all_ok(&self) -> bool {
        self.tasks.iter().all(|t| t.error.is_none())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Loads the config at `path` and runs it relative to its directory.
pub fn run_pipeline_file(path: &Path) -> Result<PipelineReport> {
    let config = PipelineConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    run_pipeline(&config, base)
}

struct Data {
    rows: Option<Vec<RecordRow>>,
    series: Result<Vec<ProgressSeries<f64>>, String>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn load_data(config: &PipelineConfig, base: &Path) -> Result<Data> {
    let rows = match &config.inputs.records {
        Some(p) => Some(ingest::parse_records(&resolve(base, p), false)?.into_rows()?),
        None => None,
    };
    let series = if let Some(p) = &config.inputs.series {
        let all: Vec<ProgressSeries<f64>> = fit::read_series_csv(fs::File::open(resolve(base, p))?)?;
        Ok(all.into_iter().filter(|s| config.events.is_empty() || config.events.contains(&s.label)).collect())
    } else if let Some(rows) = &rows {
        let events: Vec<String> = if config.events.is_empty() {
            ingest::event_labels()
                .into_iter()
                .filter(|l| rows.iter().any(|r| r.event == *l))
                .map(String::from)
                .collect()
        } else {
            config.events.clone()
        };
        events
            .iter()
            .map(|e| ingest::extract_progress::<f64>(rows, e, config.extract).map(|a| a.series))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.to_string())
    } else {
        Err("no inputs configured".to_string())
    };
    Ok(Data { rows, series })
}

/// Runs every analysis, writes its artifact into `output_dir`, then writes
/// `manifest.json`. Failing analyses are reported in the manifest without
/// stopping the others.
pub fn run_pipeline(config: &PipelineConfig, base: &Path) -> Result<PipelineReport> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::Config(format!("alpha {} outside (0, 1)", config.alpha)));
    }
    let out_dir = resolve(base, &config.output_dir);
    fs::create_dir_all(&out_dir)?;
    let data = load_data(config, base)?;

    let tasks: Vec<TaskReport> = config
        .analyses
        .par_iter()
        .enumerate()
        .map(|(index, analysis)| {
            let kind = analysis.kind().to_string();
            let seed = analysis.uses_seed().then(|| config.seed_for(&kind));
            let result = run_task(analysis, config, &data, seed.unwrap_or(0)).and_then(|art| {
                let name = format!("{index:02}_{}.{}", art.stem, art.ext);
                fs::write(out_dir.join(&name), &art.bytes)?;
                Ok((name, sha256_hex(&art.bytes), art.summary))
            });
            match result {
                Ok((file, sha, summary)) => {
                    TaskReport { index, kind, seed, file: Some(file), sha256: Some(sha), error: None, summary }
                }
                Err(e) => TaskReport {
                    index,
                    kind,
                    seed,
                    file: None,
                    sha256: None,
                    error: Some(e.to_string()),
                    summary: Value::Null,
                },
            }
        })
        .collect();

    let seeds: BTreeMap<String, u64> = tasks.iter().filter_map(|t| t.seed.map(|s| (t.kind.clone(), s))).collect();
    // Where the bundle lands is not part of what it contains.
    let mut hashed = serde_json::to_value(config)?;
    if let Some(obj) = hashed.as_object_mut() {
        obj.remove("output_dir");
    }
    let config_json = serde_json::to_vec(&hashed)?;
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": sha256_hex(&config_json),
        "alpha": config.alpha,
        "seeds": seeds,
        "tasks": tasks,
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(out_dir.join("manifest.json"), text)?;
    Ok(PipelineReport { output_dir: out_dir, tasks })
}

struct Artifact {
    stem: String,
    ext: &'static str,
    bytes: Vec<u8>,
    summary: Value,
}

fn json_bytes(v: &Value) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

fn pick<'a>(all: &'a [ProgressSeries<f64>], events: &[String]) -> Vec<&'a ProgressSeries<f64>> {
    all.iter().filter(|s| events.is_empty() || events.contains(&s.label)).collect()
}

fn run_task(analysis: &Analysis, config: &PipelineConfig, data: &Data, seed: u64) -> Result<Artifact> {
    let series = || data.series.as_ref().map_err(|e| Error::Config(format!("series unavailable: {e}")));
    match analysis {
        Analysis::Shells { n, depth, fixed_reference, budget_gib, sample } => {
            let spec = CubeSpec::new(*n, fixed_reference.unwrap_or(*n == 2))?;
            let profile = match sample {
                Some(m) => estimate_shells::<f64>(spec, *depth, *m, seed)?,
                None => {
                    let budget = budget_gib.map_or(cayley::DEFAULT_BUDGET, |g| (g * (1u64 << 30) as f64) as u64);
                    bfs_shells::<f64>(spec, *depth, budget)?
                }
            };
            let plateau = plateau_branching(&profile).ok();
            Ok(Artifact {
                stem: format!("shells_n{n}"),
                ext: "csv",
                bytes: profile.to_csv_string().into_bytes(),
                summary: json!({
                    "spec": spec.to_string(),
                    "depth": profile.depth(),
                    "exact": profile.exact,
                    "truncated": profile.truncated,
                    "exhausted": profile.exhausted,
                    "ball": profile.ball(),
                    "plateau": plateau,
                }),
            })
        }
        Analysis::Walk { p_f, r0, diameter, trials, cayley } => {
            let table = if *cayley { Some(build_distance_table(CubeSpec::htm(2)?)?) } else { None };
            let mut runs = Vec::new();
            let mut means = BTreeMap::new();
            for &p in p_f {
                let outcome = match &table {
                    Some(t) => walk::simulate_cayley_walk(p, *trials, seed, t, walk::DEFAULT_STEP_CAP)?,
                    None => {
                        let params = WalkParams { p_f: p, r0: *r0, diameter: *diameter, trials: *trials, seed };
                        walk::simulate_chain(&params, walk::DEFAULT_STEP_CAP)?
                    }
                };
                let expected = walk::expected_fpt(outcome.mean_start, p).ok();
                means.insert(p.to_string(), outcome.mean_steps);
                runs.push(json!({ "p_f": p, "expected_fpt": expected, "outcome": outcome.to_json() }));
            }
            let doc = json!({ "cayley": cayley, "r0": r0, "diameter": diameter, "runs": runs });
            Ok(Artifact {
                stem: if *cayley { "walk_cayley".into() } else { "walk_chain".into() },
                ext: "json",
                bytes: json_bytes(&doc)?,
                summary: json!({ "mean_steps": means }),
            })
        }
        Analysis::Fit { families, normalize } => {
            let families = if families.is_empty() { Family::ALL.to_vec() } else { families.clone() };
            let mut doc = BTreeMap::new();
            let mut best = BTreeMap::new();
            for s in series()? {
                let fits: Vec<FitResult<f64>> = families
                    .iter()
                    .map(|&f| match f {
                        Family::ProgressEq2 => fit_progress_eq2(s, *normalize),
                        other => fit::fit_family(s, other),
                    })
                    .collect::<Result<_>>()?;
                let exp_bic = fits.iter().find(|f| f.family == Family::Exponential).and_then(|f| f.bic);
                let rows: Vec<Value> = fits
                    .iter()
                    .map(|f| {
                        let delta = f.bic.zip(exp_bic).map(|(b, e)| b - e);
                        json!({ "fit": f, "delta_bic_vs_exponential": delta })
                    })
                    .collect();
                if let Some(b) = fits
                    .iter()
                    .filter(|f| f.bic.is_some())
                    .min_by(|a, b| a.bic.partial_cmp(&b.bic).expect("finite bic"))
                {
                    best.insert(s.label.clone(), b.family);
                }
                if let Some(FitResult { params: fit::FitParams::Exponential { lambda, .. }, .. }) =
                    fits.iter().find(|f| f.family == Family::Exponential)
                {
                    let hl = fit::half_life(*lambda).ok();
                    doc.insert(s.label.clone(), json!({ "fits": rows, "half_life_years": hl }));
                } else {
                    doc.insert(s.label.clone(), json!({ "fits": rows }));
                }
            }
            Ok(Artifact {
                stem: "fits".into(),
                ext: "json",
                bytes: json_bytes(&json!(doc))?,
                summary: json!({ "best_family": best }),
            })
        }
        Analysis::Collapse { events } => {
            let chosen: Vec<ProgressSeries<f64>> = pick(series()?, events).into_iter().cloned().collect();
            let c = fit::collapse(&chosen)?;
            let mut buf = Vec::new();
            fit::write_series_csv(&c.normalized, &mut buf)?;
            Ok(Artifact {
                stem: "collapse".into(),
                ext: "csv",
                bytes: buf,
                summary: json!({ "dispersion": c.dispersion, "worst_t": c.worst_t, "series": chosen.len() }),
            })
        }
        Analysis::LearningCurve { horizon, events } => {
            let mut csv = String::from("label,T,p_f\n");
            let mut params = BTreeMap::new();
            for s in pick(series()?, events) {
                let f = fit_progress_eq2(s, true)?;
                let lc = derive_learning_curve(&f, *horizon)?;
                for (t, p) in &lc.samples {
                    csv.push_str(&format!("{},{t},{p}\n", lc.label));
                }
                params.insert(
                    lc.label.clone(),
                    json!({ "r_learn": lc.r_learn, "tau": lc.tau, "asymptote": lc.asymptote }),
                );
            }
            Ok(Artifact { stem: "learning_curves".into(), ext: "csv", bytes: csv.into_bytes(), summary: json!(params) })
        }
        Analysis::Changepoint { event, perms, fit_years, input, centering } => {
            let s = series()?
                .iter()
                .find(|s| s.label == *event)
                .ok_or_else(|| Error::InsufficientData(format!("no series for event {event}")))?;
            let fit = fit::fit_exponential(&s.head(fit_years.unwrap_or(s.len())))?;
            let values: Vec<f64> = match input {
                ChangepointInput::Residuals => changepoint::residuals(s, &fit),
                ChangepointInput::Times => s.ys(),
                ChangepointInput::LogTimes => s.ys().iter().map(|y| y.ln()).collect(),
            };
            let mut cp = detect_variance_changepoint_with(&values, config.alpha, *perms, seed, *centering)?;
            cp.split_t = Some(s.points[cp.index].0);
            let doc = json!({
                "event": event,
                "input": input,
                "centering": centering,
                "result": cp,
                "fit": fit,
                "values": values,
            });
            Ok(Artifact {
                stem: format!("changepoint_{event}"),
                ext: "json",
                bytes: json_bytes(&doc)?,
                summary: json!({
                    "index": cp.index,
                    "split_t": cp.split_t,
                    "p_value": cp.p_value,
                    "significant": cp.significant,
                }),
            })
        }
        Analysis::Network { weighted } => {
            let rows =
                data.rows.as_ref().ok_or_else(|| Error::Config("network analysis needs a records input".into()))?;
            let events: Vec<&str> = if config.events.is_empty() {
                ingest::event_labels()
            } else {
                config.events.iter().map(String::as_str).collect()
            };
            let holders = ingest::record_holders(rows, &events, config.extract.kind);
            let mut graph: CompetitorGraph<f64> = build_graph(&holders);
            if !weighted {
                graph = graph.unweighted();
            }
            let communities = detect_communities(&graph)?;
            let labeled = communities.labeled(&graph);
            let doc = json!({
                "weighted": weighted,
                "graph": graph,
                "communities": labeled,
                "q": communities.q,
                "edges_csv": graph.edges_csv(),
                "nodes_csv": graph.nodes_csv(),
                "dot": graph.to_dot(Some(&communities)),
            });
            Ok(Artifact {
                stem: "network".into(),
                ext: "json",
                bytes: json_bytes(&doc)?,
                summary: json!({ "q": communities.q, "communities": labeled }),
            })
        }
    }
}
