//! Dataset ingestion (CSV + manifest), synthetic generation and
//! goodness-of-fit checking.
//!
//! CSV dialect: comma separated, mandatory header row, UTF-8, `.` as the
//! decimal separator. Columns not named by the manifest are ignored.

mod gof;
mod synthetic;

pub use gof::{chi_square_gof, chi_square_statistic, nb_pmf, GofResult};
pub use synthetic::{
    gen_synthetic, tabulated_params, standard_dimensions, synthetic_league, NbParams,
    SyntheticSpec, DEFAULT_LAMBDA_RANGE,
};

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RtcError};
use crate::model::{ObjectId, ObjectRecord, ObjectSpace, TargetContext, TeamContext};
use crate::weighting::RankedSeries;

/// Which columns of the object and team files mean what.
///
/// Stored as a small TOML file:
///
/// ```toml
/// attributes = ["FG", "3P", "3PA", "BLK", "FT", "STL", "FTA", "PTS", "AST", "DRB", "TRB"]
/// id_column = "id"
/// label_column = "player"
/// lambda_column = "MP"
/// team_column = "team"       # roster membership in the object file
/// team_id_column = "team"    # team file
/// wins_column = "wins"       # team file
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub attributes: Vec<String>,
    #[serde(default = "default_id")]
    pub id_column: String,
    #[serde(default = "default_label")]
    pub label_column: String,
    #[serde(default = "default_lambda")]
    pub lambda_column: String,
    #[serde(default)]
    pub team_column: Option<String>,
    #[serde(default = "default_team")]
    pub team_id_column: String,
    #[serde(default = "default_wins")]
    pub wins_column: String,
}

fn default_id() -> String {
    "id".into()
}
fn default_label() -> String {
    "label".into()
}
fn default_lambda() -> String {
    "lambda".into()
}
fn default_team() -> String {
    "team".into()
}
fn default_wins() -> String {
    "wins".into()
}

impl DatasetManifest {
    /// Manifest matching the files written by [`write_objects`] and
    /// [`write_teams`].
    pub fn standard(attributes: Vec<String>) -> Self {
        DatasetManifest {
            attributes,
            id_column: default_id(),
            label_column: default_label(),
            lambda_column: default_lambda(),
            team_column: Some(default_team()),
            team_id_column: default_team(),
            wins_column: default_wins(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.attributes.len()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let m: DatasetManifest =
            toml::from_str(text).map_err(|e| RtcError::Config(e.to_string()))?;
        if m.attributes.is_empty() {
            return Err(RtcError::Config("manifest lists no attributes".into()));
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        DatasetManifest::parse(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialises")
    }
}

/// Objects plus the roster membership read from the team column, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectTable {
    pub space: ObjectSpace,
    /// Team id -> member ids, in file order.
    pub rosters: BTreeMap<String, Vec<ObjectId>>,
}

impl ObjectTable {
    pub fn team(&self, team_id: &str) -> Result<TeamContext> {
        let ids = self
            .rosters
            .get(team_id)
            .ok_or_else(|| RtcError::UnknownTeam(team_id.to_string()))?;
        TeamContext::from_space(&self.space, ids)
    }
}

/// Team aggregates and final standings.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamTable {
    pub attribute_names: Vec<String>,
    pub targets: Vec<TargetContext>,
    /// Higher is better, aligned with `targets`.
    pub wins: Vec<f64>,
}

impl TeamTable {
    pub fn ranking(&self) -> Result<RankedSeries> {
        RankedSeries::new(self.wins.clone())
    }

    /// Row-major attribute matrix, one row per team.
    pub fn stats(&self) -> Vec<Vec<f64>> {
        self.targets
            .iter()
            .map(|t| t.aggregate.values().to_vec())
            .collect()
    }

    /// Team ids ordered by wins descending, then id ascending.
    pub fn standings(&self) -> Vec<&str> {
        let mut order: Vec<usize> = (0..self.targets.len()).collect();
        order.sort_by(|&a, &b| {
            self.wins[b]
                .total_cmp(&self.wins[a])
                .then_with(|| self.targets[a].team_id.cmp(&self.targets[b].team_id))
        });
        order.iter().map(|&i| self.targets[i].team_id.as_str()).collect()
    }

    pub fn get(&self, team_id: &str) -> Option<&TargetContext> {
        self.targets.iter().find(|t| t.team_id == team_id)
    }

    pub fn select(&self, ids: &[String]) -> Result<Vec<TargetContext>> {
        ids.iter()
            .map(|id| {
                self.get(id)
                    .cloned()
                    .ok_or_else(|| RtcError::UnknownTeam(id.clone()))
            })
            .collect()
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| RtcError::MissingColumn(name.to_string()))
}

fn line_of(rec: &csv::StringRecord, fallback: usize) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(fallback)
}

fn field<'r>(rec: &'r csv::StringRecord, col: usize, row: usize) -> Result<&'r str> {
    rec.get(col).map(str::trim).ok_or_else(|| RtcError::MalformedRow {
        row,
        reason: format!("missing field {}", col + 1),
    })
}

fn parse_f64(s: &str, what: &str, row: usize) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| RtcError::MalformedRow {
        row,
        reason: format!("{what}: '{s}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(RtcError::MalformedRow {
            row,
            reason: format!("{what}: non-finite value '{s}'"),
        });
    }
    Ok(v)
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

/// Reads objects (and roster membership) from CSV.
pub fn read_objects<R: Read>(input: R, manifest: &DatasetManifest) -> Result<ObjectTable> {
    let mut rdr = csv_reader(input);
    let headers = rdr.headers().map_err(|_| RtcError::EmptyFile)?.clone();
    if headers.is_empty() {
        return Err(RtcError::EmptyFile);
    }
    let id_col = column(&headers, &manifest.id_column)?;
    let label_col = column(&headers, &manifest.label_column)?;
    let lambda_col = column(&headers, &manifest.lambda_column)?;
    let team_col = manifest
        .team_column
        .as_deref()
        .map(|c| column(&headers, c))
        .transpose()?;
    let attr_cols = manifest
        .attributes
        .iter()
        .map(|a| column(&headers, a))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut rosters: BTreeMap<String, Vec<ObjectId>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = line_of(&rec, i + 2);
        let id_text = field(&rec, id_col, row)?;
        let id = id_text.parse::<u64>().map_err(|_| RtcError::MalformedRow {
            row,
            reason: format!("id '{id_text}' is not an unsigned integer"),
        })?;
        let label = field(&rec, label_col, row)?.to_string();
        let lambda = parse_f64(field(&rec, lambda_col, row)?, &manifest.lambda_column, row)?;
        if lambda <= 0.0 {
            return Err(RtcError::MalformedRow {
                row,
                reason: format!("{} must be positive, got {lambda}", manifest.lambda_column),
            });
        }
        let attrs = attr_cols
            .iter()
            .zip(&manifest.attributes)
            .map(|(&c, name)| parse_f64(field(&rec, c, row)?, name, row))
            .collect::<Result<Vec<_>>>()?;
        if let Some(tc) = team_col {
            let team = field(&rec, tc, row)?;
            if !team.is_empty() {
                rosters.entry(team.to_string()).or_default().push(ObjectId(id));
            }
        }
        records.push(ObjectRecord::new(id, label, lambda, attrs)?);
    }
    if records.is_empty() {
        return Err(RtcError::EmptyFile);
    }
    let space = ObjectSpace::new(manifest.attributes.clone(), records)?;
    Ok(ObjectTable { space, rosters })
}

pub fn load_object_table(path: &Path, manifest: &DatasetManifest) -> Result<ObjectTable> {
    read_objects(fs::File::open(path)?, manifest)
}

pub fn load_objects(path: &Path, manifest: &DatasetManifest) -> Result<ObjectSpace> {
    Ok(load_object_table(path, manifest)?.space)
}

pub fn read_teams<R: Read>(input: R, manifest: &DatasetManifest) -> Result<TeamTable> {
    let mut rdr = csv_reader(input);
    let headers = rdr.headers().map_err(|_| RtcError::EmptyFile)?.clone();
    if headers.is_empty() {
        return Err(RtcError::EmptyFile);
    }
    let id_col = column(&headers, &manifest.team_id_column)?;
    let wins_col = column(&headers, &manifest.wins_column)?;
    let attr_cols = manifest
        .attributes
        .iter()
        .map(|a| column(&headers, a))
        .collect::<Result<Vec<_>>>()?;
    let mut targets: Vec<TargetContext> = Vec::new();
    let mut wins = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = line_of(&rec, i + 2);
        let id = field(&rec, id_col, row)?.to_string();
        if targets.iter().any(|t| t.team_id == id) {
            return Err(RtcError::MalformedRow {
                row,
                reason: format!("duplicate team '{id}'"),
            });
        }
        wins.push(parse_f64(field(&rec, wins_col, row)?, &manifest.wins_column, row)?);
        let attrs = attr_cols
            .iter()
            .zip(&manifest.attributes)
            .map(|(&c, name)| parse_f64(field(&rec, c, row)?, name, row))
            .collect::<Result<Vec<_>>>()?;
        targets.push(TargetContext::new(id, attrs)?);
    }
    if targets.is_empty() {
        return Err(RtcError::EmptyFile);
    }
    Ok(TeamTable {
        attribute_names: manifest.attributes.clone(),
        targets,
        wins,
    })
}

pub fn load_teams(path: &Path, manifest: &DatasetManifest) -> Result<TeamTable> {
    read_teams(fs::File::open(path)?, manifest)
}

/// Writes objects in the standard CSV contract: `id,label,lambda,team,<attrs>`.
pub fn write_objects<W: Write>(
    out: W,
    space: &ObjectSpace,
    rosters: &BTreeMap<String, Vec<ObjectId>>,
) -> Result<()> {
    let mut team_of: BTreeMap<ObjectId, &str> = BTreeMap::new();
    for (team, ids) in rosters {
        for id in ids {
            team_of.insert(*id, team);
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id", "label", "lambda", "team"];
    header.extend(space.attribute_names().iter().map(String::as_str));
    w.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for r in space.records() {
        row.clear();
        row.push(r.id.to_string());
        row.push(r.label.clone());
        row.push(r.lambda.to_string());
        row.push(team_of.get(&r.id).copied().unwrap_or("").to_string());
        row.extend(r.attrs.values().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes teams as `team,wins,<attrs>`.
pub fn write_teams<W: Write>(out: W, teams: &TeamTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["team", "wins"];
    header.extend(teams.attribute_names.iter().map(String::as_str));
    w.write_record(&header)?;
    for (t, wins) in teams.targets.iter().zip(&teams.wins) {
        let mut row = vec![t.team_id.clone(), wins.to_string()];
        row.extend(t.aggregate.values().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
