//! Chi-square goodness-of-fit against a fully specified negative binomial.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use super::NbParams;
use crate::error::{Result, RtcError};

const MIN_SAMPLES: usize = 50;
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub critical: f64,
    pub p_value: f64,
    pub accepted: bool,
    /// Inclusive lower edge of every bin; the last bin is open-ended.
    pub bin_edges: Vec<u64>,
}

/// `P(X = k)` for failures before the `r`-th success.
pub fn nb_pmf(k: u64, params: NbParams) -> f64 {
    let NbParams { r, p } = params;
    let k = k as f64;
    (ln_gamma(k + r) - ln_gamma(r) - ln_gamma(k + 1.0) + r * p.ln() + k * (1.0 - p).ln()).exp()
}

/// `Σ (obs - exp)² / exp`.
pub fn chi_square_statistic(observed: &[f64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() {
        return Err(RtcError::DimensionMismatch {
            expected: expected.len(),
            found: observed.len(),
        });
    }
    if let Some(i) = expected.iter().position(|e| !(*e > 0.0)) {
        return Err(RtcError::InvalidArgument(format!("expected count {i} is not positive")));
    }
    Ok(observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum())
}

/// Bin probabilities with lower edges. Bins close once their expected count
/// reaches the minimum and the remaining tail can still form a bin; the
/// tail is merged into the last bin.
fn nb_bins(params: NbParams, n: f64) -> (Vec<u64>, Vec<f64>) {
    let mut edges = vec![0u64];
    let mut probs = Vec::new();
    let mut acc = 0.0;
    let mut cdf = 0.0;
    let mut k = 0u64;
    loop {
        let pk = nb_pmf(k, params);
        acc += pk;
        cdf += pk;
        k += 1;
        let tail = (1.0 - cdf).max(0.0);
        if n * tail < MIN_EXPECTED {
            probs.push(acc + tail);
            break;
        }
        if n * acc >= MIN_EXPECTED {
            probs.push(acc);
            edges.push(k);
            acc = 0.0;
        }
    }
    (edges, probs)
}

/// Tests `samples` against `NB(r, p)`. Parameters are given rather than
/// fitted, so `dof = bins - 1`. Negative or fractional samples are floored
/// into the support.
pub fn chi_square_gof(samples: &[f64], params: NbParams, alpha: f64) -> Result<GofResult> {
    let params = NbParams::new(params.r, params.p)?;
    if samples.len() < MIN_SAMPLES {
        return Err(RtcError::InsufficientData(format!(
            "goodness-of-fit needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RtcError::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
        return Err(RtcError::NonFinite { index });
    }
    let n = samples.len() as f64;
    let (edges, probs) = nb_bins(params, n);
    if probs.len() < 2 {
        return Err(RtcError::DegenerateBinning);
    }
    let mut observed = vec![0.0; probs.len()];
    for &s in samples {
        let k = s.max(0.0).floor() as u64;
        let bin = edges.partition_point(|&e| e <= k) - 1;
        observed[bin] += 1.0;
    }
    let expected: Vec<f64> = probs.iter().map(|p| p * n).collect();
    let statistic = chi_square_statistic(&observed, &expected)?;
    let dof = probs.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| RtcError::InvalidArgument(e.to_string()))?;
    let critical = dist.inverse_cdf(1.0 - alpha);
    Ok(GofResult {
        statistic,
        dof,
        critical,
        p_value: dist.sf(statistic),
        accepted: statistic <= critical,
        bin_edges: edges,
    })
}
