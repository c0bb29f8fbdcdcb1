//! End-to-end experiment runner and report serialization.
//!
//! A run loads (or generates) a league, derives weights from the final
//! standings, and for every query team selects a target, ranks swaps with
//! both methods, and records distances, block I/O and phase timings.
//! Query timings are the median of `timing_runs` runs after one warm-up;
//! index build is timed once and reported separately.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataio::{self, DatasetManifest, ObjectTable, SyntheticSpec, TeamTable, DEFAULT_LAMBDA_RANGE};
use crate::error::{Result, RtcError};
use crate::index::{IoCounters, NnIndex};
use crate::model::{ObjectId, WeightVector};
use crate::ranking::{brute_force_rank_scanned, Problem, RtcStarSearch, SwapRecommendation};
use crate::weighting::{compute_weights, select_target};

pub const REPORT_SCHEMA: &str = "rtc-report/1";
pub const METHODS: &str = "bf,rtcstar";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSource {
    Synthetic {
        count: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_teams")]
        teams: usize,
        #[serde(default = "default_team_size")]
        team_size: usize,
        #[serde(default = "default_lambda_range")]
        lambda_range: (f64, f64),
    },
    Csv {
        objects: PathBuf,
        teams: PathBuf,
        manifest: PathBuf,
    },
}

fn default_teams() -> usize {
    30
}
fn default_team_size() -> usize {
    13
}
fn default_lambda_range() -> (f64, f64) {
    DEFAULT_LAMBDA_RANGE
}
fn default_block_size() -> usize {
    100
}
fn default_top_k() -> usize {
    10
}
fn default_timing_runs() -> usize {
    5
}
fn default_elite_size() -> usize {
    10
}

/// Experiment configuration, usually read from TOML.
///
/// ```toml
/// block_size = 10
/// top_k = 10
/// query_teams = ["T05", "T12"]   # default: standings 11 through 20
///
/// [dataset]
/// kind = "synthetic"
/// count = 100000
/// seed = 7
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub dataset: DatasetSource,
    #[serde(default = "default_block_size")]
    pub block_size: usize,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default = "default_timing_runs")]
    pub timing_runs: usize,
    /// Top teams of the standings used as targets when `elite` is unset.
    #[serde(default = "default_elite_size")]
    pub elite_size: usize,
    #[serde(default)]
    pub elite: Option<Vec<String>>,
    #[serde(default)]
    pub query_teams: Option<Vec<String>>,
    /// Overrides the rank-correlation weights.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// Persist index partitions here instead of keeping them in memory.
    #[serde(default)]
    pub index_dir: Option<PathBuf>,
}

impl BenchConfig {
    pub fn synthetic(count: usize, seed: u64) -> Self {
        BenchConfig {
            dataset: DatasetSource::Synthetic {
                count,
                seed,
                teams: default_teams(),
                team_size: default_team_size(),
                lambda_range: DEFAULT_LAMBDA_RANGE,
            },
            block_size: default_block_size(),
            top_k: default_top_k(),
            timing_runs: default_timing_runs(),
            elite_size: default_elite_size(),
            elite: None,
            query_teams: None,
            weights: None,
            index_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| RtcError::Config(e.to_string()))
    }

    /// Parses a config file; relative dataset paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = BenchConfig::parse(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let DatasetSource::Csv {
            objects,
            teams,
            manifest,
        } = &mut cfg.dataset
        {
            for p in [objects, teams, manifest] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn dataset_id(&self) -> String {
        match &self.dataset {
            DatasetSource::Synthetic {
                count,
                seed,
                teams,
                team_size,
                lambda_range,
            } => format!(
                "synthetic:n={count},seed={seed},teams={teams}x{team_size},lambda={}..{}",
                lambda_range.0, lambda_range.1
            ),
            DatasetSource::Csv { objects, .. } => format!("csv:{}", objects.display()),
        }
    }

    pub fn seed(&self) -> u64 {
        match self.dataset {
            DatasetSource::Synthetic { seed, .. } => seed,
            DatasetSource::Csv { .. } => 0,
        }
    }

    /// Loads or generates the league described by `dataset`.
    pub fn load_league(&self) -> Result<(ObjectTable, TeamTable)> {
        match &self.dataset {
            DatasetSource::Synthetic {
                count,
                seed,
                teams,
                team_size,
                lambda_range,
            } => {
                let mut spec = SyntheticSpec::standard(*count, *seed);
                spec.lambda_range = *lambda_range;
                let space = dataio::gen_synthetic(&spec)?;
                dataio::synthetic_league(space, *teams, *team_size, *seed)
            }
            DatasetSource::Csv {
                objects,
                teams,
                manifest,
            } => {
                let m = DatasetManifest::load(manifest)?;
                Ok((
                    dataio::load_object_table(objects, &m)?,
                    dataio::load_teams(teams, &m)?,
                ))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub dataset: String,
    pub method: String,
    pub block_size: usize,
    pub top_k: usize,
    pub seed: u64,
    pub timing_runs: usize,
    pub n_objects: usize,
    pub attributes: Vec<String>,
    pub weights: Vec<f64>,
    pub elite: Vec<String>,
    pub query_teams: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamRow {
    pub team: String,
    pub target: String,
    pub members: usize,
    pub distance_before: f64,
    pub distance_after: f64,
    /// Both methods produced the same ranked list.
    pub methods_agree: bool,
    pub recommendations: Vec<SwapRecommendation>,
    pub io: BTreeMap<String, u64>,
    /// Seconds per phase.
    pub timing: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub config: ReportConfig,
    pub rows: Vec<TeamRow>,
    /// Sums of the per-row counters.
    pub io: BTreeMap<String, u64>,
    /// Sums of the per-row phase timings.
    pub timing: BTreeMap<String, f64>,
}

pub const IO_BF: &str = "bf.blocks_read";
pub const IO_LOOKUP: &str = "rtcstar.lookup.blocks_read";
pub const IO_REFINE: &str = "rtcstar.refine.blocks_read";
pub const IO_BUILD: &str = "rtcstar.build.blocks_written";
pub const T_BF: &str = "bf.query";
pub const T_BUILD: &str = "rtcstar.build";
pub const T_LOOKUP: &str = "rtcstar.lookup";
pub const T_REFINE: &str = "rtcstar.refine";
pub const T_QUERY: &str = "rtcstar.query";

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Loads the configured league and runs it.
pub fn run_experiment(config: &BenchConfig) -> Result<ExperimentReport> {
    let (objects, teams) = config.load_league()?;
    run_experiment_on(config, &objects, &teams)
}

/// Runs the experiment on an already loaded league; `config.dataset` is
/// only echoed.
pub fn run_experiment_on(
    config: &BenchConfig,
    objects: &ObjectTable,
    teams: &TeamTable,
) -> Result<ExperimentReport> {
    if config.timing_runs == 0 {
        return Err(RtcError::Config("timing_runs must be at least 1".into()));
    }
    if config.block_size == 0 {
        return Err(RtcError::Config("block_size must be at least 1".into()));
    }
    let weights = match &config.weights {
        Some(w) => WeightVector::new(w.clone())?,
        None => compute_weights(&teams.stats(), &teams.ranking()?)?.weights,
    };
    let standings = teams.standings();
    let elite_ids: Vec<String> = match &config.elite {
        Some(e) => e.clone(),
        None => standings.iter().take(config.elite_size).map(|s| s.to_string()).collect(),
    };
    let query_ids: Vec<String> = match &config.query_teams {
        Some(q) => q.clone(),
        None => standings.iter().skip(10).take(10).map(|s| s.to_string()).collect(),
    };
    let elite = teams.select(&elite_ids)?;

    let mut rows = Vec::with_capacity(query_ids.len());
    for team_id in &query_ids {
        let row = run_team(config, objects, &elite, &weights, team_id).map_err(|e| e.for_team(team_id))?;
        rows.push(row);
    }

    let mut io = BTreeMap::new();
    let mut timing = BTreeMap::new();
    for row in &rows {
        for (k, v) in &row.io {
            *io.entry(k.clone()).or_insert(0) += v;
        }
        for (k, v) in &row.timing {
            *timing.entry(k.clone()).or_insert(0.0) += v;
        }
    }
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA.to_string(),
        config: ReportConfig {
            dataset: config.dataset_id(),
            method: METHODS.to_string(),
            block_size: config.block_size,
            top_k: config.top_k,
            seed: config.seed(),
            timing_runs: config.timing_runs,
            n_objects: objects.space.len(),
            attributes: objects.space.attribute_names().to_vec(),
            weights: weights.values().to_vec(),
            elite: elite_ids,
            query_teams: query_ids,
        },
        rows,
        io,
        timing,
    })
}

fn run_team(
    config: &BenchConfig,
    objects: &ObjectTable,
    elite: &[crate::model::TargetContext],
    weights: &WeightVector,
    team_id: &str,
) -> Result<TeamRow> {
    let team = objects.team(team_id)?;
    let selection = select_target(team_id, &team, elite, weights)?;
    let target = elite
        .iter()
        .find(|t| t.team_id == selection.target_id)
        .expect("selected target is in the elite set");
    let problem = Problem::new(&objects.space, &team, target, weights)?;
    let distance_before = problem.initial_distance()?;
    let runs = config.timing_runs;
    let mut io = BTreeMap::new();
    let mut timing = BTreeMap::new();

    // brute force
    let mut bf_times = Vec::with_capacity(runs);
    let mut bf = Vec::new();
    for run in 0..=runs {
        let counters = IoCounters::default();
        let t0 = Instant::now();
        bf = brute_force_rank_scanned(&problem, config.top_k, config.block_size, &counters)?;
        let elapsed = t0.elapsed().as_secs_f64();
        if run > 0 {
            bf_times.push(elapsed);
        }
        io.insert(IO_BF.to_string(), counters.snapshot().blocks_read);
    }
    timing.insert(T_BF.to_string(), median(bf_times));

    // index build
    let t0 = Instant::now();
    let index = match &config.index_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            NnIndex::build_to_dir(&problem, config.block_size, dir)?
        }
        None => NnIndex::build(&problem, config.block_size)?,
    };
    timing.insert(T_BUILD.to_string(), t0.elapsed().as_secs_f64());
    io.insert(IO_BUILD.to_string(), index.build_io().blocks_written);

    // RTC* query phases
    let (mut lookup_t, mut refine_t, mut total_t) = (Vec::new(), Vec::new(), Vec::new());
    let mut rtc = Vec::new();
    for run in 0..=runs {
        index.reset_io();
        let t0 = Instant::now();
        let mut search = RtcStarSearch::new(problem, &index, config.top_k)?;
        search.lookup()?;
        let t1 = Instant::now();
        search.refine()?;
        let t2 = Instant::now();
        let (recs, stats) = search.finish()?;
        if run > 0 {
            lookup_t.push((t1 - t0).as_secs_f64());
            refine_t.push((t2 - t1).as_secs_f64());
            total_t.push((t2 - t0).as_secs_f64());
        }
        debug_assert_eq!(index.io().blocks_read, stats.lookup_blocks + stats.refine_blocks);
        io.insert(IO_LOOKUP.to_string(), stats.lookup_blocks);
        io.insert(IO_REFINE.to_string(), stats.refine_blocks);
        rtc = recs;
    }
    timing.insert(T_LOOKUP.to_string(), median(lookup_t));
    timing.insert(T_REFINE.to_string(), median(refine_t));
    timing.insert(T_QUERY.to_string(), median(total_t));

    if let Some(dir) = &config.index_dir {
        for m in 0..index.partitions() {
            let _ = fs::remove_file(index.partition_path(dir, m));
        }
    }

    let distance_after = bf.first().map(|r| r.new_distance).unwrap_or(distance_before);
    Ok(TeamRow {
        team: team_id.to_string(),
        target: selection.target_id,
        members: team.members().len(),
        distance_before,
        distance_after,
        methods_agree: bf == rtc,
        recommendations: bf,
        io,
        timing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    /// Picks the format from a file extension, defaulting to JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    write_report(report, format, &mut f)?;
    f.flush()?;
    Ok(())
}

pub fn write_report<W: Write>(report: &ExperimentReport, format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
            Ok(())
        }
        ReportFormat::Csv => write_csv(report, out),
    }
}

pub fn read_report<R: Read>(format: ReportFormat, input: R) -> Result<ExperimentReport> {
    match format {
        ReportFormat::Json => Ok(serde_json::from_reader(input)?),
        ReportFormat::Csv => read_csv(input),
    }
}

pub fn parse_report(path: &Path) -> Result<ExperimentReport> {
    read_report(ReportFormat::from_path(path), fs::File::open(path)?)
}

// CSV layout: one `section,team,key,v1,v2,v3,v4` line per scalar; lists in
// the config are stored as JSON in `v1`.
const CSV_HEADER: [&str; 7] = ["section", "team", "key", "v1", "v2", "v3", "v4"];

fn write_csv<W: Write>(r: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let mut line = |section: &str, team: &str, key: &str, vals: &[String]| -> Result<()> {
        let mut rec = vec![section.to_string(), team.to_string(), key.to_string()];
        rec.extend(vals.iter().cloned());
        rec.resize(CSV_HEADER.len(), String::new());
        w.write_record(&rec)?;
        Ok(())
    };
    let c = &r.config;
    line("schema", "", "schema", &[r.schema.clone()])?;
    line("config", "", "dataset", &[c.dataset.clone()])?;
    line("config", "", "method", &[c.method.clone()])?;
    line("config", "", "block_size", &[c.block_size.to_string()])?;
    line("config", "", "top_k", &[c.top_k.to_string()])?;
    line("config", "", "seed", &[c.seed.to_string()])?;
    line("config", "", "timing_runs", &[c.timing_runs.to_string()])?;
    line("config", "", "n_objects", &[c.n_objects.to_string()])?;
    line("config", "", "attributes", &[serde_json::to_string(&c.attributes)?])?;
    line("config", "", "weights", &[serde_json::to_string(&c.weights)?])?;
    line("config", "", "elite", &[serde_json::to_string(&c.elite)?])?;
    line("config", "", "query_teams", &[serde_json::to_string(&c.query_teams)?])?;
    for row in &r.rows {
        let t = row.team.as_str();
        line("row", t, "target", &[row.target.clone()])?;
        line("row", t, "members", &[row.members.to_string()])?;
        line("row", t, "distance_before", &[row.distance_before.to_string()])?;
        line("row", t, "distance_after", &[row.distance_after.to_string()])?;
        line("row", t, "methods_agree", &[row.methods_agree.to_string()])?;
        for (i, rec) in row.recommendations.iter().enumerate() {
            line(
                "rec",
                t,
                &i.to_string(),
                &[
                    rec.swap_out_id.to_string(),
                    rec.swap_in_id.to_string(),
                    rec.new_distance.to_string(),
                    rec.odis.to_string(),
                ],
            )?;
        }
        for (k, v) in &row.io {
            line("row_io", t, k, &[v.to_string()])?;
        }
        for (k, v) in &row.timing {
            line("row_timing", t, k, &[v.to_string()])?;
        }
    }
    for (k, v) in &r.io {
        line("io", "", k, &[v.to_string()])?;
    }
    for (k, v) in &r.timing {
        line("timing", "", k, &[v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn bad(row: usize, reason: impl Into<String>) -> RtcError {
    RtcError::MalformedRow {
        row,
        reason: reason.into(),
    }
}

fn num<T: std::str::FromStr>(s: &str, row: usize) -> Result<T> {
    s.parse().map_err(|_| bad(row, format!("cannot parse '{s}'")))
}

fn read_csv<R: Read>(input: R) -> Result<ExperimentReport> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut schema = None;
    let mut cfg: BTreeMap<String, String> = BTreeMap::new();
    let mut rows: Vec<TeamRow> = Vec::new();
    let mut io = BTreeMap::new();
    let mut timing = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row_no = i + 2;
        let get = |j: usize| rec.get(j).unwrap_or("");
        let (section, team, key, v1) = (get(0), get(1), get(2), get(3));
        let team_row = |rows: &mut Vec<TeamRow>| -> usize {
            if rows.last().map(|r| r.team != team).unwrap_or(true) {
                rows.push(TeamRow {
                    team: team.to_string(),
                    target: String::new(),
                    members: 0,
                    distance_before: 0.0,
                    distance_after: 0.0,
                    methods_agree: false,
                    recommendations: Vec::new(),
                    io: BTreeMap::new(),
                    timing: BTreeMap::new(),
                });
            }
            rows.len() - 1
        };
        match section {
            "schema" => schema = Some(v1.to_string()),
            "config" => {
                cfg.insert(key.to_string(), v1.to_string());
            }
            "row" => {
                let r = team_row(&mut rows);
                let row = &mut rows[r];
                match key {
                    "target" => row.target = v1.to_string(),
                    "members" => row.members = num(v1, row_no)?,
                    "distance_before" => row.distance_before = num(v1, row_no)?,
                    "distance_after" => row.distance_after = num(v1, row_no)?,
                    "methods_agree" => row.methods_agree = num(v1, row_no)?,
                    other => return Err(bad(row_no, format!("unknown row field '{other}'"))),
                }
            }
            "rec" => {
                let r = team_row(&mut rows);
                rows[r].recommendations.push(SwapRecommendation {
                    swap_out_id: ObjectId(num(v1, row_no)?),
                    swap_in_id: ObjectId(num(get(4), row_no)?),
                    new_distance: num(get(5), row_no)?,
                    odis: num(get(6), row_no)?,
                });
            }
            "row_io" => {
                let r = team_row(&mut rows);
                rows[r].io.insert(key.to_string(), num(v1, row_no)?);
            }
            "row_timing" => {
                let r = team_row(&mut rows);
                rows[r].timing.insert(key.to_string(), num(v1, row_no)?);
            }
            "io" => {
                io.insert(key.to_string(), num(v1, row_no)?);
            }
            "timing" => {
                timing.insert(key.to_string(), num(v1, row_no)?);
            }
            other => return Err(bad(row_no, format!("unknown section '{other}'"))),
        }
    }
    let schema = schema.ok_or_else(|| RtcError::MissingColumn("schema".into()))?;
    if schema != REPORT_SCHEMA {
        return Err(RtcError::Config(format!("unsupported report schema '{schema}'")));
    }
    let field = |k: &str| -> Result<&str> {
        cfg.get(k)
            .map(String::as_str)
            .ok_or_else(|| RtcError::MissingColumn(format!("config.{k}")))
    };
    let config = ReportConfig {
        dataset: field("dataset")?.to_string(),
        method: field("method")?.to_string(),
        block_size: num(field("block_size")?, 0)?,
        top_k: num(field("top_k")?, 0)?,
        seed: num(field("seed")?, 0)?,
        timing_runs: num(field("timing_runs")?, 0)?,
        n_objects: num(field("n_objects")?, 0)?,
        attributes: serde_json::from_str(field("attributes")?)?,
        weights: serde_json::from_str(field("weights")?)?,
        elite: serde_json::from_str(field("elite")?)?,
        query_teams: serde_json::from_str(field("query_teams")?)?,
    };
    Ok(ExperimentReport {
        schema,
        config,
        rows,
        io,
        timing,
    })
}
