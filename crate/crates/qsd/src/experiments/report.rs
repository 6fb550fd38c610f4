//! Machine-readable sweep reports: fixed-column CSV, a JSON summary, and a
//! plot-ready TSV of `(ln n, ln mean distance)`.

use super::config::SweepConfig;
use super::rate::{fit_rate, DistanceField, RateFit};
use super::sweep::{verdicts, ExpectedEsdRow, SweepOutput, SweepRow, Verdicts};
use super::ExperimentError;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str = "ensemble,n,rep,seed,kolmogorov,levy,bai_bound,runtime_ms,error";

/// Environment variable that overrides the parent directory of all output
/// paths.
pub const OUT_DIR_ENV: &str = "QSD_OUT_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub ensemble: String,
    pub sigma: f64,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub pipeline: String,
    pub levy: bool,
    pub stieltjes_v: String,
    pub bai: Option<(f64, f64, f64)>,
}

impl ConfigEcho {
    pub fn from_config(config: &SweepConfig) -> Self {
        Self {
            ensemble: config.ensemble.tag(),
            sigma: config.ensemble.sigma,
            n_list: config.n_list.clone(),
            reps: config.reps,
            seed: config.seed,
            pipeline: match config.pipeline {
                super::config::Pipeline::Raw => "raw".to_string(),
                super::config::Pipeline::Truncated => "truncated".to_string(),
            },
            levy: config.levy,
            stieltjes_v: config.stieltjes_v.describe(),
            bai: config.bai.map(|b| (b.a, b.big_a, b.big_b)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerNStats {
    pub n: usize,
    pub rows: usize,
    pub failures: usize,
    pub mean_kolmogorov: f64,
    pub se_kolmogorov: f64,
    pub mean_levy: Option<f64>,
    pub mean_bai_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub config: ConfigEcho,
    pub per_n: Vec<PerNStats>,
    pub expected_esd: Vec<ExpectedEsdRow>,
    pub kolmogorov_fit: Option<RateFit>,
    pub levy_fit: Option<RateFit>,
    pub verdicts: Verdicts,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (m, 0.0);
    }
    let var =
        values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    (m, (var / values.len() as f64).sqrt())
}

/// Build the JSON summary structure for a finished sweep.
pub fn summary_json(output: &SweepOutput, config: &SweepConfig) -> Summary {
    let mut per_n = Vec::new();
    for &n in &config.n_list {
        let rows: Vec<&SweepRow> = output.rows.iter().filter(|r| r.n == n).collect();
        if rows.is_empty() {
            continue;
        }
        let ks: Vec<f64> = rows.iter().filter_map(|r| r.kolmogorov).collect();
        let (mean_k, se_k) = if ks.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            mean_and_se(&ks)
        };
        let levies: Vec<f64> = rows.iter().filter_map(|r| r.levy).collect();
        let bais: Vec<f64> = rows.iter().filter_map(|r| r.bai_bound).collect();
        per_n.push(PerNStats {
            n,
            rows: rows.len(),
            failures: rows.iter().filter(|r| r.error.is_some()).count(),
            mean_kolmogorov: mean_k,
            se_kolmogorov: se_k,
            mean_levy: (!levies.is_empty())
                .then(|| levies.iter().sum::<f64>() / levies.len() as f64),
            mean_bai_bound: (!bais.is_empty())
                .then(|| bais.iter().sum::<f64>() / bais.len() as f64),
        });
    }
    Summary {
        config: ConfigEcho::from_config(config),
        per_n,
        expected_esd: output.expected.clone(),
        kolmogorov_fit: fit_rate(&output.rows, DistanceField::Kolmogorov).ok(),
        levy_fit: fit_rate(&output.rows, DistanceField::Levy).ok(),
        verdicts: verdicts(output),
    }
}

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render rows as CSV with the fixed column order.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let error = r.error.as_deref().unwrap_or("").replace(',', ";");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.ensemble,
            r.n,
            r.rep,
            r.seed,
            opt_field(r.kolmogorov),
            opt_field(r.levy),
            opt_field(r.bai_bound),
            r.runtime_ms,
            error
        ));
    }
    out
}

/// Parse rows back from the CSV emitted by `rows_to_csv`.
pub fn read_rows_csv(path: &Path) -> Result<Vec<SweepRow>, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(ExperimentError::Config(format!(
                "unexpected CSV header {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(ExperimentError::Config(format!(
                "row {}: expected 9 fields, got {}",
                i + 2,
                fields.len()
            )));
        }
        let parse_f = |s: &str| -> Option<f64> {
            if s.is_empty() {
                None
            } else {
                s.parse().ok()
            }
        };
        let parse_u = |s: &str, name: &str| -> Result<u64, ExperimentError> {
            s.parse()
                .map_err(|_| ExperimentError::Config(format!("row {}: bad {name} '{s}'", i + 2)))
        };
        rows.push(SweepRow {
            ensemble: fields[0].to_string(),
            n: parse_u(fields[1], "n")? as usize,
            rep: parse_u(fields[2], "rep")? as usize,
            seed: parse_u(fields[3], "seed")?,
            kolmogorov: parse_f(fields[4]),
            levy: parse_f(fields[5]),
            bai_bound: parse_f(fields[6]),
            runtime_ms: parse_u(fields[7], "runtime_ms")?,
            error: (!fields[8].is_empty()).then(|| fields[8].to_string()),
        });
    }
    Ok(rows)
}

/// Plot-ready TSV: `ln n`, `ln mean kolmogorov` per n.
fn rate_tsv(output: &SweepOutput) -> String {
    let mut ns: Vec<usize> = output.rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut out = String::from("ln_n\tln_mean_kolmogorov\n");
    for n in ns {
        let vals: Vec<f64> = output
            .rows
            .iter()
            .filter(|r| r.n == n)
            .filter_map(|r| r.kolmogorov)
            .collect();
        if vals.is_empty() {
            continue;
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        out.push_str(&format!("{}\t{}\n", (n as f64).ln(), mean.ln()));
    }
    out
}

fn redirect(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let mut p = PathBuf::from(dir);
            p.push(path.file_name().unwrap_or_default());
            p
        }
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf, ExperimentError> {
    let target = redirect(path);
    if let Some(parent) = target.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| ExperimentError::Io {
                path: target.display().to_string(),
                source,
            })?;
        }
    }
    let mut f = std::fs::File::create(&target).map_err(|source| ExperimentError::Io {
        path: target.display().to_string(),
        source,
    })?;
    f.write_all(contents.as_bytes())
        .map_err(|source| ExperimentError::Io {
            path: target.display().to_string(),
            source,
        })?;
    Ok(target)
}

/// The files actually written (after any environment redirect).
#[derive(Debug, Clone, Default)]
pub struct ReportPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub tsv: Option<PathBuf>,
}

/// Write the configured report files for a finished sweep.
pub fn emit_report(
    output: &SweepOutput,
    config: &SweepConfig,
) -> Result<ReportPaths, ExperimentError> {
    let mut written = ReportPaths::default();
    if let Some(path) = &config.out_csv {
        written.csv = Some(write_file(path, &rows_to_csv(&output.rows))?);
    }
    if let Some(path) = &config.out_json {
        let summary = summary_json(output, config);
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        written.json = Some(write_file(path, &text)?);
    }
    if let Some(path) = &config.out_tsv {
        written.tsv = Some(write_file(path, &rate_tsv(output))?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::EntryLawSpec;
    use crate::experiments::config::{Pipeline, VRule};
    use crate::experiments::run_sweep;

    fn config_with_outputs(dir: &Path) -> SweepConfig {
        SweepConfig {
            ensemble: EntryLawSpec::gse(1.0).unwrap(),
            n_list: vec![4, 8],
            reps: 2,
            seed: 3,
            pipeline: Pipeline::Raw,
            levy: true,
            stieltjes_v: VRule::InvSqrt(1.0),
            bai: None,
            test_mode: false,
            out_csv: Some(dir.join("rows.csv")),
            out_json: Some(dir.join("summary.json")),
            out_tsv: Some(dir.join("fit.tsv")),
        }
    }

    /// Mask the wall-clock column, the one non-deterministic field.
    fn mask_runtime(csv: &str) -> String {
        csv.lines()
            .map(|line| {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() == 9 && fields[7].chars().all(|c| c.is_ascii_digit()) {
                    let mut f = fields.clone();
                    f[7] = "_";
                    f.join(",")
                } else {
                    line.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn csv_roundtrip_and_reproducibility() {
        let dir = std::env::temp_dir().join(format!("qsd-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let config = config_with_outputs(&dir);
        let out = run_sweep(&config).unwrap();
        let paths = emit_report(&out, &config).unwrap();
        let csv_path = paths.csv.unwrap();

        let text = std::fs::read_to_string(&csv_path).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 1 + 4);

        let parsed = read_rows_csv(&csv_path).unwrap();
        assert_eq!(parsed, out.rows);

        // identical config => identical CSV up to wall-clock timings
        let out2 = run_sweep(&config).unwrap();
        assert_eq!(
            mask_runtime(&rows_to_csv(&out.rows)),
            mask_runtime(&rows_to_csv(&out2.rows))
        );

        // JSON per-n means agree with CSV-recomputed means
        let summary = summary_json(&out, &config);
        for stats in &summary.per_n {
            let vals: Vec<f64> = parsed
                .iter()
                .filter(|r| r.n == stats.n)
                .filter_map(|r| r.kolmogorov)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((mean - stats.mean_kolmogorov).abs() < 1e-12);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn empty_rows_give_header_only_csv() {
        assert_eq!(rows_to_csv(&[]), format!("{CSV_HEADER}\n"));
    }
}
