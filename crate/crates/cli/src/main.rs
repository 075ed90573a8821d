use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cubeprogress::cayley::{self, build_distance_table, plateau_branching};
use cubeprogress::changepoint::{detect_variance_changepoint_with, Centering};
use cubeprogress::cube::{CubeSpec, CubeState, MoveSequence};
use cubeprogress::fit::{self, Family, FitResult, ProgressSeries};
use cubeprogress::ingest::{self, AnnualRule, ExtractOptions, KindChoice};
use cubeprogress::network::{build_graph, detect_communities, CompetitorGraph};
use cubeprogress::pipeline;
use cubeprogress::walk::{self, WalkParams};

#[derive(Parser)]
#[command(name = "cubeprogress", version, about = "Cube Cayley graphs, walk models and progress-curve analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply moves to a cube or scramble one.
    Cube(CubeArgs),
    /// Shell profile of the Cayley graph, exact or sampled.
    Shells(ShellsArgs),
    /// Biased first-passage walk toward the solved state.
    Walk(WalkArgs),
    /// Fit decay families to progress series.
    Fit(FitArgs),
    /// Rescale series by their first value and measure the spread.
    Collapse(CollapseArgs),
    /// Learning curves p_f(T) from progress-curve fits.
    LearningCurve(LearningCurveArgs),
    /// Single change in variance, with a permutation test.
    Changepoint(ChangepointArgs),
    /// Annual record series from competition records.
    Extract(ExtractArgs),
    /// Event graph of shared record holders and its communities.
    Network(NetworkArgs),
    /// Run every analysis in a config file.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct CubeArgs {
    #[arg(long, default_value_t = 3)]
    n: u8,
    /// Keep one corner fixed (2-cube) or quotient by rotations (n ≥ 4).
    #[arg(long)]
    fixed_reference: bool,
    #[command(subcommand)]
    action: CubeAction,
}

#[derive(Subcommand)]
enum CubeAction {
    /// Apply a move sequence, e.g. "R U R' U'".
    Apply {
        moves: String,
        /// Facelet colors to start from instead of the solved cube.
        #[arg(long)]
        start: Option<String>,
    },
    /// Random sequence of `k` generators.
    Scramble {
        #[arg(long, default_value_t = 25)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ShellsArgs {
    #[arg(long)]
    n: u8,
    #[arg(long)]
    depth: usize,
    /// Defaults to true for n = 2 and false otherwise.
    #[arg(long)]
    fixed_reference: Option<bool>,
    /// Memory budget for exact BFS, e.g. 8GiB or 512MiB.
    #[arg(long, default_value = "8GiB", value_parser = parse_bytes)]
    budget: u64,
    /// Estimate by sampling this many frontier states per level.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct WalkArgs {
    /// Forward-step probabilities, comma separated.
    #[arg(long = "pf", value_delimiter = ',', required = true)]
    p_f: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    r0: u32,
    #[arg(long, default_value_t = 100)]
    diameter: u32,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Walk the 2-cube graph instead of the distance chain.
    #[arg(long)]
    cayley: bool,
    #[arg(long, default_value_t = walk::DEFAULT_STEP_CAP)]
    step_cap: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Series CSV with header label,T,y,kind.
    #[arg(long)]
    input: PathBuf,
    /// Family names, comma separated, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    family: Vec<String>,
    /// Fit the progress curve with unit asymptote.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    normalize: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CollapseArgs {
    #[arg(long)]
    input: PathBuf,
    /// Labels to include; all when absent.
    #[arg(long, value_delimiter = ',')]
    events: Vec<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LearningCurveArgs {
    /// Fit JSON as written by `fit` (an object or list of fits).
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    from: Option<PathBuf>,
    /// Series CSV to fit first.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    horizon: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CenteringArg {
    Global,
    Segment,
}

#[derive(Args)]
struct ChangepointArgs {
    /// Values, one per line, or a CSV whose last column is numeric.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 999)]
    perms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "global")]
    centering: CenteringArg,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Auto,
    Single,
    Average,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Mean,
    YearEnd,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    records: PathBuf,
    /// Event codes or labels, comma separated; all present when absent.
    #[arg(long, value_delimiter = ',')]
    events: Vec<String>,
    #[arg(long, value_enum, default_value = "auto")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "mean")]
    rule: RuleArg,
    /// Abort on the first malformed row.
    #[arg(long)]
    strict: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct NetworkArgs {
    #[arg(long)]
    records: PathBuf,
    /// Write the graph in DOT format here.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Count each shared pair once instead of by shared people.
    #[arg(long)]
    unweighted: bool,
    #[arg(long, value_enum, default_value = "auto")]
    kind: KindArg,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
}

/// `8GiB`, `512MiB`, `2GB`, `1048576`.
fn parse_bytes(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let split = s.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let value: f64 = num.parse().map_err(|_| format!("bad size `{s}`"))?;
    let scale: f64 = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 1.0,
        "k" | "kb" => 1e3,
        "m" | "mb" => 1e6,
        "g" | "gb" => 1e9,
        "t" | "tb" => 1e12,
        "kib" => 1024.0,
        "mib" => 1024f64.powi(2),
        "gib" => 1024f64.powi(3),
        "tib" => 1024f64.powi(4),
        other => return Err(format!("unknown size unit `{other}`")),
    };
    Ok((value * scale) as u64)
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn emit_json(output: Option<&Path>, v: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit(output, text.as_bytes())
}

fn read_series(path: &Path) -> Result<Vec<ProgressSeries<f64>>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(fit::read_series_csv(file)?)
}

fn kind_choice(k: KindArg) -> KindChoice {
    match k {
        KindArg::Auto => KindChoice::Auto,
        KindArg::Single => KindChoice::Single,
        KindArg::Average => KindChoice::Average,
    }
}

fn load_rows(path: &Path, strict: bool) -> Result<Vec<ingest::RecordRow>> {
    let report = ingest::parse_records(path, strict)?;
    for e in &report.errors {
        eprintln!("{}: line {}: {}", path.display(), e.line, e.message);
    }
    Ok(report.rows)
}

fn cube(args: CubeArgs) -> Result<()> {
    let spec = CubeSpec::new(args.n, args.fixed_reference)?;
    match args.action {
        CubeAction::Apply { moves, start } => {
            let seq: MoveSequence = moves.parse()?;
            let from = match start {
                Some(s) => CubeState::from_facelet_string(spec, &s)?,
                None => CubeState::solved(spec)?,
            };
            let state = from.apply_sequence(&seq)?;
            println!("{state}");
            println!("solved: {}", state.is_solved());
        }
        CubeAction::Scramble { k, seed } => {
            let (state, seq) = CubeState::solved(spec)?.scramble(k, seed);
            println!("{seq}");
            println!("{state}");
        }
    }
    Ok(())
}

fn shells(args: ShellsArgs) -> Result<()> {
    let spec = CubeSpec::new(args.n, args.fixed_reference.unwrap_or(args.n == 2))?;
    let profile = match args.sample {
        Some(m) => cayley::estimate_shells::<f64>(spec, args.depth, m, args.seed)?,
        None => cayley::bfs_shells::<f64>(spec, args.depth, args.budget)?,
    };
    if profile.truncated {
        eprintln!("memory budget reached; profile stops at depth {}", profile.depth());
    }
    if let Ok(fit) = plateau_branching(&profile) {
        eprintln!(
            "entropy slope {:.4} bits/move, plateau branching {:.4} (log2 {:.4})",
            fit.slope, fit.plateau_b, fit.log2_b
        );
    }
    emit(args.output.as_deref(), profile.to_csv_string().as_bytes())
}

fn walk_cmd(args: WalkArgs) -> Result<()> {
    let table = if args.cayley { Some(build_distance_table(CubeSpec::htm(2)?)?) } else { None };
    let mut runs = Vec::new();
    for &p in &args.p_f {
        let outcome = match &table {
            Some(t) => walk::simulate_cayley_walk(p, args.trials, args.seed, t, args.step_cap)?,
            None => {
                let params =
                    WalkParams { p_f: p, r0: args.r0, diameter: args.diameter, trials: args.trials, seed: args.seed };
                walk::simulate_chain(&params, args.step_cap)?
            }
        };
        let expected = walk::expected_fpt(outcome.mean_start, p).ok();
        runs.push(json!({ "p_f": p, "expected_fpt": expected, "outcome": outcome.to_json() }));
    }
    emit_json(args.output.as_deref(), &json!({ "cayley": args.cayley, "runs": runs }))
}

fn fit_cmd(args: FitArgs) -> Result<()> {
    let families: Vec<Family> = if args.family.iter().any(|f| f == "all") {
        Family::ALL.to_vec()
    } else {
        args.family.iter().map(|f| f.parse()).collect::<Result<_, _>>()?
    };
    let mut fits = Vec::new();
    for s in read_series(&args.input)? {
        for &family in &families {
            let r = match family {
                Family::ProgressEq2 => fit::fit_progress_eq2(&s, args.normalize),
                other => fit::fit_family(&s, other),
            };
            match r {
                Ok(f) => fits.push(f),
                Err(e) => eprintln!("{} {}: {e}", s.label, family.name()),
            }
        }
    }
    emit_json(args.output.as_deref(), &serde_json::to_value(&fits)?)
}

fn collapse_cmd(args: CollapseArgs) -> Result<()> {
    let series: Vec<_> = read_series(&args.input)?
        .into_iter()
        .filter(|s| args.events.is_empty() || args.events.contains(&s.label))
        .collect();
    let c = fit::collapse(&series)?;
    eprintln!("dispersion {:.6} (worst at T = {})", c.dispersion, c.worst_t);
    let mut buf = Vec::new();
    fit::write_series_csv(&c.normalized, &mut buf)?;
    emit(args.output.as_deref(), &buf)
}

fn learning_curve_cmd(args: LearningCurveArgs) -> Result<()> {
    let fits: Vec<FitResult<f64>> = match (&args.from, &args.input) {
        (Some(p), _) => {
            let v: serde_json::Value = serde_json::from_slice(&fs::read(p)?)?;
            let list = if v.is_array() { v } else { json!([v]) };
            serde_json::from_value::<Vec<FitResult<f64>>>(list)?
                .into_iter()
                .filter(|f| f.family == Family::ProgressEq2)
                .collect()
        }
        (None, Some(p)) => read_series(p)?.iter().map(|s| fit::fit_progress_eq2(s, true)).collect::<Result<_, _>>()?,
        (None, None) => unreachable!("clap requires one input"),
    };
    if fits.is_empty() {
        bail!("no progress-curve fits to derive from");
    }
    let mut csv = String::from("label,T,p_f\n");
    for f in &fits {
        let lc = fit::derive_learning_curve(f, args.horizon)?;
        for (t, p) in &lc.samples {
            csv.push_str(&format!("{},{t},{p}\n", lc.label));
        }
    }
    emit(args.output.as_deref(), csv.as_bytes())
}

fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let last = line.rsplit([',', '\t']).next().unwrap_or(line).trim();
        match last.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => bail!("{}: line {}: `{last}` is not a number", path.display(), i + 1),
        }
    }
    Ok(out)
}

fn changepoint_cmd(args: ChangepointArgs) -> Result<()> {
    let values = read_values(&args.input)?;
    let centering = match args.centering {
        CenteringArg::Global => Centering::Global,
        CenteringArg::Segment => Centering::Segment,
    };
    let cp = detect_variance_changepoint_with(&values, args.alpha, args.perms, args.seed, centering)?;
    emit_json(args.output.as_deref(), &serde_json::to_value(&cp)?)
}

fn extract_cmd(args: ExtractArgs) -> Result<()> {
    let rows = load_rows(&args.records, args.strict)?;
    let events: Vec<String> = if args.events.is_empty() {
        ingest::event_labels().into_iter().filter(|l| rows.iter().any(|r| r.event == *l)).map(String::from).collect()
    } else {
        args.events.clone()
    };
    let opts = ExtractOptions {
        kind: kind_choice(args.kind),
        rule: match args.rule {
            RuleArg::Mean => AnnualRule::MeanOfRecords,
            RuleArg::YearEnd => AnnualRule::YearEndBest,
        },
    };
    let mut series = Vec::new();
    for e in &events {
        let a = ingest::extract_progress::<f64>(&rows, e, opts)?;
        eprintln!("{}: first year {}, {} record breakers", a.series.label, a.first_year, a.record_breakers);
        series.push(a.series);
    }
    let mut buf = Vec::new();
    fit::write_series_csv(&series, &mut buf)?;
    emit(args.output.as_deref(), &buf)
}

fn network_cmd(args: NetworkArgs) -> Result<()> {
    let rows = load_rows(&args.records, false)?;
    let holders = ingest::record_holders(&rows, &ingest::event_labels(), kind_choice(args.kind));
    let mut graph: CompetitorGraph<f64> = build_graph(&holders);
    if args.unweighted {
        graph = graph.unweighted();
    }
    let communities = detect_communities(&graph)?;
    if let Some(p) = &args.emit {
        fs::write(p, graph.to_dot(Some(&communities))).with_context(|| format!("writing {}", p.display()))?;
    }
    emit_json(
        args.output.as_deref(),
        &json!({ "q": communities.q, "communities": communities.labeled(&graph), "graph": graph }),
    )
}

fn pipeline_cmd(args: PipelineArgs) -> Result<bool> {
    let report = pipeline::run_pipeline_file(&args.config)?;
    for t in &report.tasks {
        match (&t.file, &t.error) {
            (Some(f), _) => eprintln!("[{:02}] {} -> {f}", t.index, t.kind),
            (None, Some(e)) => eprintln!("[{:02}] {} failed: {e}", t.index, t.kind),
            (None, None) => {}
        }
    }
    eprintln!("manifest: {}", report.output_dir.join("manifest.json").display());
    Ok(report.all_ok())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Cube(a) => cube(a)?,
        Command::Shells(a) => shells(a)?,
        Command::Walk(a) => walk_cmd(a)?,
        Command::Fit(a) => fit_cmd(a)?,
        Command::Collapse(a) => collapse_cmd(a)?,
        Command::LearningCurve(a) => learning_curve_cmd(a)?,
        Command::Changepoint(a) => changepoint_cmd(a)?,
        Command::Extract(a) => extract_cmd(a)?,
        Command::Network(a) => network_cmd(a)?,
        Command::Pipeline(a) => return pipeline_cmd(a),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
