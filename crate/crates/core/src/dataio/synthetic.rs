//! Negative-binomial synthetic object spaces and leagues built from them.
//!
//! Seeding: records are generated in chunks of [`CHUNK`]. Chunk `c` draws
//! from `ChaCha8Rng::seed_from_u64(seed)` with stream `c`, so output does not
//! depend on how chunks are scheduled.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};
use serde::{Deserialize, Serialize};

use super::{ObjectTable, TeamTable};
use crate::error::{Result, RtcError};
use crate::model::{aggregate_team, ObjectId, ObjectRecord, ObjectSpace, TargetContext};

const CHUNK: u64 = 4096;
/// Stream reserved for league assembly (roster shuffle and win noise).
const LEAGUE_STREAM: u64 = u64::MAX;

/// Default uniform range for synthetic λ (minutes played).
pub const DEFAULT_LAMBDA_RANGE: (f64, f64) = (500.0, 3000.0);

/// Negative binomial counting failures before the `r`-th success:
/// mean `r(1-p)/p`, variance `r(1-p)/p²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbParams {
    pub r: f64,
    pub p: f64,
}

impl NbParams {
    pub fn new(r: f64, p: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(RtcError::InvalidParams(format!("r must be positive, got {r}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(RtcError::InvalidParams(format!("p must lie in (0, 1), got {p}")));
        }
        Ok(NbParams { r, p })
    }

    pub fn mean(&self) -> f64 {
        self.r * (1.0 - self.p) / self.p
    }

    pub fn variance(&self) -> f64 {
        self.r * (1.0 - self.p) / (self.p * self.p)
    }

    fn sampler(&self) -> Result<Gamma<f64>> {
        let NbParams { r, p } = NbParams::new(self.r, self.p)?;
        Gamma::new(r, (1.0 - p) / p).map_err(|e| RtcError::InvalidParams(e.to_string()))
    }
}

/// Fitted marginals for nine of the basketball attributes.
pub fn tabulated_params() -> Vec<(&'static str, NbParams)> {
    [
        ("FG", 1.44, 0.008),
        ("TRB", 1.62, 0.008),
        ("BLK", 0.91, 0.004),
        ("DRB", 1.67, 0.01),
        ("FT", 1.07, 0.013),
        ("STL", 1.70, 0.045),
        ("FTA", 1.16, 0.01),
        ("PTS", 1.40, 0.003),
        ("AST", 0.93, 0.0092),
    ]
    .into_iter()
    .map(|(n, r, p)| (n, NbParams { r, p }))
    .collect()
}

/// The 11 standard dimensions in canonical order. `3P` and `3PA` have no
/// fitted values; they use r=0.6 with p=0.02 and p=0.007.
pub fn standard_dimensions() -> Vec<(String, NbParams)> {
    let table: BTreeMap<&str, NbParams> = tabulated_params().into_iter().collect();
    let extra = [("3P", NbParams { r: 0.6, p: 0.02 }), ("3PA", NbParams { r: 0.6, p: 0.007 })];
    ["FG", "3P", "3PA", "BLK", "FT", "STL", "FTA", "PTS", "AST", "DRB", "TRB"]
        .iter()
        .map(|&name| {
            let p = table
                .get(name)
                .copied()
                .or_else(|| extra.iter().find(|(n, _)| *n == name).map(|e| e.1))
                .expect("every standard dimension has parameters");
            (name.to_string(), p)
        })
        .collect()
}

/// What to generate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub dimensions: Vec<(String, NbParams)>,
    pub count: usize,
    pub seed: u64,
    pub lambda_range: (f64, f64),
}

impl SyntheticSpec {
    pub fn standard(count: usize, seed: u64) -> Self {
        SyntheticSpec {
            dimensions: standard_dimensions(),
            count,
            seed,
            lambda_range: DEFAULT_LAMBDA_RANGE,
        }
    }
}

/// Draws `spec.count` records with ids `0..count`.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<ObjectSpace> {
    if spec.count == 0 {
        return Err(RtcError::InvalidParams("count must be at least 1".into()));
    }
    if spec.dimensions.is_empty() {
        return Err(RtcError::InvalidParams("no dimensions".into()));
    }
    let (lo, hi) = spec.lambda_range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
        return Err(RtcError::InvalidParams(format!(
            "lambda range must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let gammas = spec
        .dimensions
        .iter()
        .map(|(_, p)| p.sampler())
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(spec.count);
    let count = spec.count as u64;
    for chunk in 0..count.div_ceil(CHUNK) {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(chunk);
        for id in chunk * CHUNK..((chunk + 1) * CHUNK).min(count) {
            let lambda = if lo == hi { lo } else { rng.random_range(lo..hi) };
            let attrs = gammas.iter().map(|g| sample_nb(g, &mut rng)).collect();
            records.push(ObjectRecord::new(id, format!("syn-{id}"), lambda, attrs)?);
        }
    }
    let names = spec.dimensions.iter().map(|(n, _)| n.clone()).collect();
    ObjectSpace::new(names, records)
}

/// Gamma-Poisson mixture.
fn sample_nb<R: Rng>(gamma: &Gamma<f64>, rng: &mut R) -> f64 {
    let mean = gamma.sample(rng);
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean).map(|p| p.sample(rng)).unwrap_or(0.0)
}

/// Splits `space` into `teams` rosters of `team_size` random objects
/// (the rest stay free agents) and assigns wins that grow with the roster's
/// aggregate strength plus Gaussian noise.
pub fn synthetic_league(
    space: ObjectSpace,
    teams: usize,
    team_size: usize,
    seed: u64,
) -> Result<(ObjectTable, TeamTable)> {
    if teams < 2 || team_size == 0 {
        return Err(RtcError::InvalidParams(format!(
            "a league needs at least 2 teams of at least 1 member, got {teams}x{team_size}"
        )));
    }
    if teams * team_size > space.len() {
        return Err(RtcError::InvalidParams(format!(
            "{teams} teams of {team_size} need {} objects, space has {}",
            teams * team_size,
            space.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(LEAGUE_STREAM);
    let mut ids: Vec<ObjectId> = space.records().iter().map(|r| r.id).collect();
    ids.shuffle(&mut rng);

    let mut rosters = BTreeMap::new();
    let mut targets = Vec::with_capacity(teams);
    for t in 0..teams {
        let name = format!("T{:02}", t + 1);
        let mut members: Vec<ObjectId> = ids[t * team_size..(t + 1) * team_size].to_vec();
        members.sort();
        let recs: Vec<ObjectRecord> = members
            .iter()
            .map(|id| space.get(*id).cloned().expect("id comes from the space"))
            .collect();
        targets.push(TargetContext::new(name.clone(), aggregate_team(&recs)?.into_inner())?);
        rosters.insert(name, members);
    }

    let d = space.dimension();
    let means: Vec<f64> = (0..d)
        .map(|i| targets.iter().map(|t| t.aggregate.values()[i]).sum::<f64>() / teams as f64)
        .collect();
    let noise = Normal::new(0.0, 0.03).expect("valid normal");
    let strength: Vec<f64> = targets
        .iter()
        .map(|t| {
            let s: f64 = t
                .aggregate
                .values()
                .iter()
                .zip(&means)
                .map(|(v, m)| if *m > 0.0 { v / m } else { 0.0 })
                .sum::<f64>()
                / d as f64;
            s + noise.sample(&mut rng)
        })
        .collect();
    let (lo, hi) = strength
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
    let wins = strength
        .iter()
        .map(|s| {
            if hi > lo {
                (15.0 + 50.0 * (s - lo) / (hi - lo)).round()
            } else {
                41.0
            }
        })
        .collect();
    let attribute_names = space.attribute_names().to_vec();
    Ok((
        ObjectTable { space, rosters },
        TeamTable {
            attribute_names,
            targets,
            wins,
        },
    ))
}
