//! Attribute weights from Kendall rank correlation, and target selection.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RtcError};
use crate::model::{self, TargetContext, TeamContext, WeightVector};

/// Floor applied to zero-association weights so every weight stays positive.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// One value per team, higher meaning better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSeries {
    values: Vec<f64>,
}

impl RankedSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(RtcError::InsufficientData(format!(
                "ranked series needs at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(RtcError::NonFinite { index });
        }
        Ok(RankedSeries { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Kendall's tau with tied pairs counted as neither concordant nor
/// discordant; the denominator is always `n(n-1)/2`.
///
/// Runs in O(n log n): sort by (x, y), then count inversions of y with a
/// merge sort (Knight's method).
pub fn kendall_tau(x: &RankedSeries, y: &RankedSeries) -> Result<f64> {
    if x.len() != y.len() {
        return Err(RtcError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len();
    let (concordant, discordant) = pair_counts(x.values(), y.values());
    let total = (n as u64) * (n as u64 - 1) / 2;
    Ok((concordant as f64 - discordant as f64) / total as f64)
}

/// Returns (concordant, discordant) pair counts.
fn pair_counts(x: &[f64], y: &[f64]) -> (u64, u64) {
    let n = x.len();
    // `+ 0.0` folds -0.0 into 0.0 so total_cmp agrees with `==` on ties
    let mut pairs: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a + 0.0, b + 0.0)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let total = (n as u64) * (n as u64).saturating_sub(1) / 2;
    let tied_x = tie_pairs(pairs.iter().map(|p| p.0));
    let tied_xy = tie_pairs_by(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let discordant = merge_count(&mut ys, &mut buf);
    // ys is now sorted
    let tied_y = tie_pairs(ys.iter().copied());

    let concordant = total - tied_x - tied_y + tied_xy - discordant;
    (concordant, discordant)
}

fn tie_pairs(sorted: impl Iterator<Item = f64>) -> u64 {
    let v: Vec<f64> = sorted.collect();
    tie_pairs_by(&v, |a, b| a == b)
}

fn tie_pairs_by<T>(sorted: &[T], same: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if same(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Stable merge sort counting strict inversions (i < j with v[i] > v[j]).
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], &mut buf[..mid]);
    swaps += merge_count(&mut v[mid..], &mut buf[mid..]);

    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Weights together with the raw correlations they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub weights: WeightVector,
    pub tau: Vec<f64>,
    /// Dimensions whose weight was raised to [`WEIGHT_FLOOR`].
    pub floored: Vec<usize>,
}

/// `w_i = max(|tau(column_i, ranking)|, WEIGHT_FLOOR)`.
///
/// `team_stats` is row-major: one row of `d` values per team.
pub fn compute_weights(team_stats: &[Vec<f64>], final_ranking: &RankedSeries) -> Result<WeightReport> {
    if team_stats.len() != final_ranking.len() {
        return Err(RtcError::DimensionMismatch {
            expected: final_ranking.len(),
            found: team_stats.len(),
        });
    }
    let dim = team_stats.first().map(Vec::len).unwrap_or(0);
    if dim == 0 {
        return Err(RtcError::InsufficientData("team stats have no columns".into()));
    }
    let mut tau = Vec::with_capacity(dim);
    let mut weights = Vec::with_capacity(dim);
    let mut floored = Vec::new();
    for i in 0..dim {
        let column = team_stats
            .iter()
            .map(|row| {
                row.get(i).copied().ok_or(RtcError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let t = kendall_tau(&RankedSeries::new(column)?, final_ranking)?;
        let w = t.abs();
        if w < WEIGHT_FLOOR {
            floored.push(i);
        }
        tau.push(t);
        weights.push(w.max(WEIGHT_FLOOR));
    }
    Ok(WeightReport {
        weights: WeightVector::new(weights)?,
        tau,
        floored,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSelection {
    pub team_id: String,
    pub target_id: String,
    pub distance: f64,
}

/// Picks the elite team with the smallest truncated distance from `team`.
/// Ties go to the lexicographically smaller team id.
pub fn select_target(
    team_id: &str,
    team: &TeamContext,
    elite: &[TargetContext],
    w: &WeightVector,
) -> Result<TargetSelection> {
    let mut best: Option<(f64, &TargetContext)> = None;
    for t in elite {
        let d = model::gap_distance(&model::diff(t, team)?, w)?;
        let better = match best {
            None => true,
            Some((bd, bt)) => match d.total_cmp(&bd) {
                Ordering::Less => true,
                Ordering::Equal => t.team_id < bt.team_id,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((d, t));
        }
    }
    let (distance, target) = best.ok_or(RtcError::EmptyEliteSet)?;
    Ok(TargetSelection {
        team_id: team_id.to_string(),
        target_id: target.team_id.clone(),
        distance,
    })
}
