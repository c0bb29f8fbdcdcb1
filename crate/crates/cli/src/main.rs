//! `rtc`: ingest data, derive weights, pick targets, build indexes, rank
//! swaps, generate synthetic leagues, test fit, and run benchmarks.
//!
//! Results go to stdout (or `--out`) as JSON; `--pretty` renders tables.
//! Exit status: 0 success, 1 usage error, 2 data error.

mod render;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rtc_core::bench::{self, BenchConfig, ReportFormat};
use rtc_core::dataio::{self, DatasetManifest, NbParams, ObjectTable, SyntheticSpec, TeamTable};
use rtc_core::ranking::brute_force_rank_scanned;
use rtc_core::{
    compute_weights, select_target, IoCounters, NnIndex, Problem, RtcError, RtcStarSearch,
    TargetContext, WeightVector,
};

#[derive(Parser)]
#[command(name = "rtc", version, about = "Rank object exchanges that move a team toward a target")]
struct Cli {
    /// Render human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an object file (and optional team file) against a manifest.
    Ingest(IngestArgs),
    /// Attribute weights from rank correlation with final standings.
    Weights(WeightsArgs),
    /// Pick the closest elite team for a query team.
    Target(QueryArgs),
    /// Index operations.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Rank (swap-out, swap-in) pairs for a team.
    Rank(RankArgs),
    /// Generate a synthetic league (objects.csv, teams.csv, manifest.toml).
    Gen(GenArgs),
    /// Chi-square goodness-of-fit against a negative binomial.
    Gof(GofArgs),
    /// Run an experiment described by a TOML config.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum IndexCommand {
    /// Build and persist the index for one team and target.
    Build(IndexBuildArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    objects: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    teams: Option<PathBuf>,
}

#[derive(Args)]
struct WeightsArgs {
    #[arg(long)]
    teams: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    objects: PathBuf,
    #[arg(long)]
    teams: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Query team id.
    #[arg(long)]
    team: String,
    /// Use this target instead of selecting one.
    #[arg(long)]
    target: Option<String>,
    /// Candidate targets, comma separated (default: top of the standings).
    #[arg(long, value_delimiter = ',')]
    elite: Option<Vec<String>>,
    #[arg(long, default_value_t = 10)]
    elite_size: usize,
    /// Explicit weights, comma separated (default: rank correlation).
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
}

#[derive(Args)]
struct IndexBuildArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, default_value_t = 100)]
    block_size: usize,
    #[arg(long)]
    dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Bf,
    Rtcstar,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    #[arg(long, default_value_t = 100)]
    block_size: usize,
    /// Reuse (or create) persisted index files here; rtcstar only.
    #[arg(long)]
    index_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of teams; 0 writes objects only.
    #[arg(long, default_value_t = 30)]
    teams: usize,
    #[arg(long, default_value_t = 13)]
    team_size: usize,
    #[arg(long, default_value_t = dataio::DEFAULT_LAMBDA_RANGE.0)]
    lambda_min: f64,
    #[arg(long, default_value_t = dataio::DEFAULT_LAMBDA_RANGE.1)]
    lambda_max: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    dir: PathBuf,
}

#[derive(Args)]
struct GofArgs {
    #[arg(long)]
    r: f64,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Read samples from this attribute of an object file...
    #[arg(long, requires_all = ["manifest", "attribute"], conflicts_with = "count")]
    objects: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    attribute: Option<String>,
    /// ...or draw this many samples from NB(r, p).
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report format (default: from the --out extension, else JSON).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

enum CliError {
    Usage(String),
    Data(RtcError),
}

impl From<RtcError> for CliError {
    fn from(e: RtcError) -> Self {
        CliError::Data(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Ingest(a) => emit(cli, &ingest(a)?),
        Command::Weights(a) => emit(cli, &weights_cmd(a)?),
        Command::Target(a) => {
            let ctx = QueryContext::load(a)?;
            emit(cli, &ctx.echo())
        }
        Command::Index(IndexCommand::Build(a)) => emit(cli, &index_build(a)?),
        Command::Rank(a) => emit(cli, &rank(a)?),
        Command::Gen(a) => emit(cli, &gen(a)?),
        Command::Gof(a) => emit(cli, &gof(a)?),
        Command::Bench(a) => bench_cmd(cli, a),
    }
}

fn emit(cli: &Cli, value: &Value) -> CliResult<()> {
    let text = if cli.pretty {
        render::pretty(value)
    } else {
        let mut s = serde_json::to_string_pretty(value).expect("json values serialise");
        s.push('\n');
        s
    };
    write_out(cli.out.as_deref(), text.as_bytes())
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn ingest(a: &IngestArgs) -> CliResult<Value> {
    let manifest = DatasetManifest::load(&a.manifest)?;
    let table = dataio::load_object_table(&a.objects, &manifest)?;
    let mut out = json!({
        "objects": table.space.len(),
        "dimension": table.space.dimension(),
        "attributes": table.space.attribute_names(),
        "rosters": table.rosters.iter().map(|(k, v)| (k.clone(), json!(v.len()))).collect::<serde_json::Map<_, _>>(),
        "digest": hex(table.space.digest()),
    });
    if let Some(t) = &a.teams {
        let teams = dataio::load_teams(t, &manifest)?;
        out["teams"] = json!(teams.targets.len());
        out["standings"] = json!(teams.standings());
    }
    Ok(out)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn weights_cmd(a: &WeightsArgs) -> CliResult<Value> {
    let manifest = DatasetManifest::load(&a.manifest)?;
    let teams = dataio::load_teams(&a.teams, &manifest)?;
    let rep = compute_weights(&teams.stats(), &teams.ranking()?)?;
    let rows: Vec<Value> = manifest
        .attributes
        .iter()
        .zip(rep.weights.values())
        .zip(&rep.tau)
        .enumerate()
        .map(|(i, ((name, w), tau))| {
            json!({"attribute": name, "tau": tau, "weight": w, "floored": rep.floored.contains(&i)})
        })
        .collect();
    Ok(json!({ "weights": rows }))
}

/// Loaded data plus the resolved weights, team and target for one query.
struct QueryContext {
    objects: ObjectTable,
    team_id: String,
    team: rtc_core::TeamContext,
    target: TargetContext,
    weights: WeightVector,
    /// Truncated distance to the target before any exchange.
    distance: f64,
}

impl QueryContext {
    fn load(a: &QueryArgs) -> CliResult<Self> {
        let manifest = DatasetManifest::load(&a.manifest)?;
        let objects = dataio::load_object_table(&a.objects, &manifest)?;
        let teams: TeamTable = dataio::load_teams(&a.teams, &manifest)?;
        let weights = match &a.weights {
            Some(w) => {
                if w.len() != manifest.dimension() {
                    return Err(CliError::Usage(format!(
                        "--weights has {} values, manifest has {} attributes",
                        w.len(),
                        manifest.dimension()
                    )));
                }
                WeightVector::new(w.clone())?
            }
            None => compute_weights(&teams.stats(), &teams.ranking()?)?.weights,
        };
        let team = objects.team(&a.team)?;
        let (target, distance) = match &a.target {
            Some(t) => {
                let target = teams
                    .get(t)
                    .cloned()
                    .ok_or_else(|| RtcError::UnknownTeam(t.clone()))?;
                let d = rtc_core::model::gap_distance(&rtc_core::model::diff(&target, &team)?, &weights)?;
                (target, d)
            }
            None => {
                let elite_ids: Vec<String> = match &a.elite {
                    Some(e) => e.clone(),
                    None => teams
                        .standings()
                        .iter()
                        .take(a.elite_size)
                        .map(|s| s.to_string())
                        .collect(),
                };
                let elite = teams.select(&elite_ids)?;
                let sel = select_target(&a.team, &team, &elite, &weights)?;
                let target = teams.get(&sel.target_id).cloned().expect("selected from the table");
                (target, sel.distance)
            }
        };
        Ok(QueryContext {
            objects,
            team_id: a.team.clone(),
            team,
            target,
            weights,
            distance,
        })
    }

    fn problem(&self) -> CliResult<Problem<'_>> {
        Ok(Problem::new(&self.objects.space, &self.team, &self.target, &self.weights)?)
    }

    fn echo(&self) -> Value {
        json!({
            "team": self.team_id,
            "target": self.target.team_id,
            "distance": self.distance,
            "weights": self.weights.values(),
        })
    }
}

fn index_build(a: &IndexBuildArgs) -> CliResult<Value> {
    if a.block_size == 0 {
        return Err(CliError::Usage("--block-size must be at least 1".into()));
    }
    let ctx = QueryContext::load(&a.query)?;
    let problem = ctx.problem()?;
    fs::create_dir_all(&a.dir)?;
    let index = NnIndex::build_to_dir(&problem, a.block_size, &a.dir)?;
    let files: Vec<String> = (0..index.partitions())
        .map(|m| index.partition_path(&a.dir, m).display().to_string())
        .collect();
    let mut out = ctx.echo();
    out["fingerprint"] = json!(index.fingerprint().to_string());
    out["block_size"] = json!(a.block_size);
    out["partitions"] = json!(index.partitions());
    out["blocks_written"] = json!(index.build_io().blocks_written);
    out["files"] = json!(files);
    Ok(out)
}

fn rank(a: &RankArgs) -> CliResult<Value> {
    if a.block_size == 0 {
        return Err(CliError::Usage("--block-size must be at least 1".into()));
    }
    if a.index_dir.is_some() && a.method == Method::Bf {
        return Err(CliError::Usage("--index-dir only applies to --method rtcstar".into()));
    }
    let ctx = QueryContext::load(&a.query)?;
    let problem = ctx.problem()?;
    let recs = match a.method {
        Method::Bf => {
            let counters = IoCounters::default();
            let recs = brute_force_rank_scanned(&problem, a.top_k, a.block_size, &counters)?;
            eprintln!(
                "method=bf block_size={} blocks_read={}",
                a.block_size,
                counters.snapshot().blocks_read
            );
            recs
        }
        Method::Rtcstar => {
            let index = match &a.index_dir {
                Some(dir) => match NnIndex::open(dir, &problem.fingerprint()) {
                    Ok(ix) => ix,
                    Err(RtcError::StaleIndex { .. }) | Err(RtcError::Io(_)) => {
                        fs::create_dir_all(dir)?;
                        NnIndex::build_to_dir(&problem, a.block_size, dir)?
                    }
                    Err(e) => return Err(e.into()),
                },
                None => NnIndex::build(&problem, a.block_size)?,
            };
            index.reset_io();
            let (recs, stats) = RtcStarSearch::new(problem, &index, a.top_k)?.finish()?;
            eprintln!(
                "method=rtcstar block_size={} lookup_blocks={} refine_blocks={}",
                index.block_size(),
                stats.lookup_blocks,
                stats.refine_blocks
            );
            recs
        }
    };
    let label = |id| {
        ctx.objects
            .space
            .get(id)
            .map(|r| r.label.clone())
            .unwrap_or_default()
    };
    let rows: Vec<Value> = recs
        .iter()
        .map(|r| {
            json!({
                "swap_out_id": r.swap_out_id,
                "swap_out": label(r.swap_out_id),
                "swap_in_id": r.swap_in_id,
                "swap_in": label(r.swap_in_id),
                "new_distance": r.new_distance,
                "odis": r.odis,
            })
        })
        .collect();
    let mut out = ctx.echo();
    out["top_k"] = json!(a.top_k);
    out["recommendations"] = json!(rows);
    Ok(out)
}

fn gen(a: &GenArgs) -> CliResult<Value> {
    let mut spec = SyntheticSpec::standard(a.count, a.seed);
    spec.lambda_range = (a.lambda_min, a.lambda_max);
    let space = dataio::gen_synthetic(&spec)?;
    fs::create_dir_all(&a.dir)?;
    let objects_path = a.dir.join("objects.csv");
    let manifest_path = a.dir.join("manifest.toml");
    let manifest = DatasetManifest::standard(space.attribute_names().to_vec());
    let mut out = json!({
        "count": a.count,
        "seed": a.seed,
        "lambda_range": [a.lambda_min, a.lambda_max],
        "digest": hex(space.digest()),
        "objects": objects_path.display().to_string(),
        "manifest": manifest_path.display().to_string(),
    });
    if a.teams == 0 {
        dataio::write_objects(fs::File::create(&objects_path)?, &space, &Default::default())?;
    } else {
        let (objects, teams) = dataio::synthetic_league(space, a.teams, a.team_size, a.seed)?;
        dataio::write_objects(fs::File::create(&objects_path)?, &objects.space, &objects.rosters)?;
        let teams_path = a.dir.join("teams.csv");
        dataio::write_teams(fs::File::create(&teams_path)?, &teams)?;
        out["teams"] = json!(teams_path.display().to_string());
        out["team_count"] = json!(a.teams);
        out["team_size"] = json!(a.team_size);
    }
    fs::write(&manifest_path, manifest.to_toml())?;
    Ok(out)
}

fn gof(a: &GofArgs) -> CliResult<Value> {
    let params = NbParams::new(a.r, a.p)?;
    let (samples, source) = match (&a.objects, a.count) {
        (Some(objects), None) => {
            let manifest = DatasetManifest::load(a.manifest.as_ref().expect("required by clap"))?;
            let attr = a.attribute.as_ref().expect("required by clap");
            let col = manifest
                .attributes
                .iter()
                .position(|n| n == attr)
                .ok_or_else(|| RtcError::MissingColumn(attr.clone()))?;
            let space = dataio::load_objects(objects, &manifest)?;
            let samples: Vec<f64> = space.records().iter().map(|r| r.attrs.values()[col]).collect();
            (samples, json!({"objects": objects.display().to_string(), "attribute": attr}))
        }
        (None, Some(count)) => {
            let spec = SyntheticSpec {
                dimensions: vec![("x".into(), params)],
                count,
                seed: a.seed,
                lambda_range: dataio::DEFAULT_LAMBDA_RANGE,
            };
            let space = dataio::gen_synthetic(&spec)?;
            let samples = space.records().iter().map(|r| r.attrs.values()[0]).collect();
            (samples, json!({"generated": count, "seed": a.seed}))
        }
        _ => return Err(CliError::Usage("give either --objects or --count".into())),
    };
    let res = dataio::chi_square_gof(&samples, params, a.alpha)?;
    Ok(json!({
        "source": source,
        "r": a.r,
        "p": a.p,
        "alpha": a.alpha,
        "samples": samples.len(),
        "statistic": res.statistic,
        "dof": res.dof,
        "critical": res.critical,
        "p_value": res.p_value,
        "accepted": res.accepted,
    }))
}

fn bench_cmd(cli: &Cli, a: &BenchArgs) -> CliResult<()> {
    let config = BenchConfig::load(&a.config)?;
    let report = bench::run_experiment(&config)?;
    let format = match a.format {
        Some(Format::Json) => ReportFormat::Json,
        Some(Format::Csv) => ReportFormat::Csv,
        None => cli
            .out
            .as_deref()
            .map(ReportFormat::from_path)
            .unwrap_or(ReportFormat::Json),
    };
    if cli.pretty {
        let value = serde_json::to_value(&report).map_err(RtcError::from)?;
        return write_out(cli.out.as_deref(), render::pretty(&value).as_bytes());
    }
    let mut buf = Vec::new();
    bench::write_report(&report, format, &mut buf)?;
    write_out(cli.out.as_deref(), &buf)
}
