//! Log-log rate fitting over per-n mean distances.

use super::sweep::SweepRow;
use super::ExperimentError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceField {
    Kolmogorov,
    Levy,
    BaiBound,
}

impl DistanceField {
    fn get(&self, row: &SweepRow) -> Option<f64> {
        match self {
            DistanceField::Kolmogorov => row.kolmogorov,
            DistanceField::Levy => row.levy,
            DistanceField::BaiBound => row.bai_bound,
        }
    }
}

/// Ordinary least squares on `(ln n, ln mean distance)` plus the per-n bound
/// constants `C(n) = distance * n^{2/5}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(n, mean distance)` pairs entering the fit.
    pub per_n_means: Vec<(usize, f64)>,
    pub residual_se: f64,
    /// `(n, distance * n^{2/5})`.
    pub c_n: Vec<(usize, f64)>,
    pub c_max: f64,
}

/// Fit a decay exponent to the selected distance field. Requires at least
/// three distinct n with data.
pub fn fit_rate(rows: &[SweepRow], field: DistanceField) -> Result<RateFit, ExperimentError> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();

    let mut per_n_means = Vec::new();
    for n in ns {
        let vals: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n)
            .filter_map(|r| field.get(r))
            .collect();
        if !vals.is_empty() {
            per_n_means.push((n, vals.iter().sum::<f64>() / vals.len() as f64));
        }
    }
    if per_n_means.len() < 3 {
        return Err(ExperimentError::InsufficientData(format!(
            "need >= 3 distinct n with data, have {}",
            per_n_means.len()
        )));
    }
    if per_n_means.iter().any(|(_, d)| *d <= 0.0) {
        return Err(ExperimentError::InsufficientData(
            "nonpositive mean distance cannot enter a log-log fit".into(),
        ));
    }

    let pts: Vec<(f64, f64)> = per_n_means
        .iter()
        .map(|(n, d)| ((*n as f64).ln(), d.ln()))
        .collect();
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;

    let ss_res: f64 = pts
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let residual_se = if pts.len() > 2 {
        (ss_res / (m - 2.0)).sqrt()
    } else {
        0.0
    };

    let c_n: Vec<(usize, f64)> = per_n_means
        .iter()
        .map(|(n, d)| (*n, d * (*n as f64).powf(0.4)))
        .collect();
    let c_max = c_n.iter().map(|(_, c)| *c).fold(0.0_f64, f64::max);

    Ok(RateFit {
        slope,
        intercept,
        per_n_means,
        residual_se,
        c_n,
        c_max,
    })
}
