//! Flat key-value experiment configs.
//!
//! The format is line-oriented `key = value` with `#` comments and no
//! nesting. Recognized keys:
//!
//! ```text
//! ensemble     gse | bounded-discrete | heavy-tail | degenerate (test_mode only)
//! sigma        diagonal scale, default 1.0
//! tail_index   heavy-tail only, must exceed 6 (default 7)
//! test_mode    true | false (admits the degenerate ensemble), default false
//! pipeline     raw | truncated, default raw
//! n_list       comma-separated ascending sizes, e.g. 64,128,256
//! reps         repetitions per n, >= 1
//! seed         64-bit master seed
//! distances    comma subset of kolmogorov,levy (kolmogorov always on)
//! stieltjes_v  "0.3" | "c*n^-1/2" | "c*n^-2/5", default 1*n^-1/2
//! bai_a        Bai bound parameters; give all three of bai_a, bai_A, bai_B
//! bai_A        or none. v is taken from stieltjes_v per n.
//! bai_B
//! out_csv      output paths; the QSD_OUT_DIR environment variable, when
//! out_json     set, overrides their parent directory.
//! out_tsv
//! ```

use super::ExperimentError;
use crate::ensemble::{EntryLawSpec, EntryLawKind};
use std::collections::HashMap;
use std::path::PathBuf;

/// How the imaginary part `v` of the transform sampling point scales with n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VRule {
    Const(f64),
    /// `c * n^{-1/2}`
    InvSqrt(f64),
    /// `c * n^{-2/5}`
    InvTwoFifths(f64),
}

impl VRule {
    pub fn v(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            VRule::Const(c) => *c,
            VRule::InvSqrt(c) => c * nf.powf(-0.5),
            VRule::InvTwoFifths(c) => c * nf.powf(-0.4),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            VRule::Const(c) => format!("{c}"),
            VRule::InvSqrt(c) => format!("{c}*n^-1/2"),
            VRule::InvTwoFifths(c) => format!("{c}*n^-2/5"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pipeline {
    Raw,
    /// Apply the truncation/standardization step before scaling.
    Truncated,
}

/// Bai bound parameters without `v` (which follows the per-n rule).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaiParamSpec {
    pub a: f64,
    pub big_a: f64,
    pub big_b: f64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub ensemble: EntryLawSpec,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub pipeline: Pipeline,
    pub levy: bool,
    pub stieltjes_v: VRule,
    pub bai: Option<BaiParamSpec>,
    pub test_mode: bool,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub out_tsv: Option<PathBuf>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_list.is_empty() {
            return Err(ExperimentError::Config("n_list must not be empty".into()));
        }
        if self.n_list.iter().any(|&n| n == 0) {
            return Err(ExperimentError::Config("n_list entries must be >= 1".into()));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(ExperimentError::Config(
                "n_list must be strictly ascending".into(),
            ));
        }
        if self.reps == 0 {
            return Err(ExperimentError::Config("reps must be >= 1".into()));
        }
        if self.ensemble.kind == EntryLawKind::DegenerateZero && !self.test_mode {
            return Err(ExperimentError::Config(
                "the degenerate ensemble is admitted only in test mode".into(),
            ));
        }
        self.ensemble
            .validate()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        Ok(())
    }
}

fn parse_v_rule(s: &str) -> Result<VRule, ExperimentError> {
    let bad = || ExperimentError::Config(format!("cannot parse stieltjes_v rule '{s}'"));
    let s = s.trim();
    if let Some(idx) = s.find('*') {
        let coeff: f64 = s[..idx].trim().parse().map_err(|_| bad())?;
        let rule = s[idx + 1..].trim();
        match rule {
            "n^-1/2" => Ok(VRule::InvSqrt(coeff)),
            "n^-2/5" => Ok(VRule::InvTwoFifths(coeff)),
            _ => Err(bad()),
        }
    } else if s == "n^-1/2" {
        Ok(VRule::InvSqrt(1.0))
    } else if s == "n^-2/5" {
        Ok(VRule::InvTwoFifths(1.0))
    } else {
        let c: f64 = s.parse().map_err(|_| bad())?;
        if c <= 0.0 {
            return Err(bad());
        }
        Ok(VRule::Const(c))
    }
}

/// Parse a config from text.
pub fn parse_config_str(text: &str) -> Result<SweepConfig, ExperimentError> {
    let mut keys: HashMap<String, String> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ExperimentError::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )));
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if keys.insert(key.clone(), value).is_some() {
            return Err(ExperimentError::Config(format!("duplicate key '{key}'")));
        }
    }

    const KNOWN: &[&str] = &[
        "ensemble",
        "sigma",
        "tail_index",
        "test_mode",
        "pipeline",
        "n_list",
        "reps",
        "seed",
        "distances",
        "stieltjes_v",
        "bai_a",
        "bai_A",
        "bai_B",
        "out_csv",
        "out_json",
        "out_tsv",
    ];
    for key in keys.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(ExperimentError::Config(format!("unknown key '{key}'")));
        }
    }

    let get = |k: &str| keys.get(k).map(|s| s.as_str());
    let require = |k: &str| {
        get(k).ok_or_else(|| ExperimentError::Config(format!("missing required key '{k}'")))
    };

    let sigma: f64 = match get("sigma") {
        Some(s) => s
            .parse()
            .map_err(|_| ExperimentError::Config(format!("bad sigma '{s}'")))?,
        None => 1.0,
    };
    let test_mode = match get("test_mode") {
        Some("true") | Some("on") => true,
        Some("false") | Some("off") | None => false,
        Some(other) => {
            return Err(ExperimentError::Config(format!(
                "test_mode must be true/false, got '{other}'"
            )))
        }
    };

    let ensemble = match require("ensemble")? {
        "gse" => EntryLawSpec::gse(sigma),
        "bounded-discrete" => EntryLawSpec::bounded_discrete(sigma),
        "heavy-tail" => {
            let tail: f64 = match get("tail_index") {
                Some(s) => s
                    .parse()
                    .map_err(|_| ExperimentError::Config(format!("bad tail_index '{s}'")))?,
                None => 7.0,
            };
            EntryLawSpec::heavy_tail(sigma, tail)
        }
        "degenerate" => Ok(EntryLawSpec::degenerate_zero()),
        other => {
            return Err(ExperimentError::Config(format!(
                "unknown ensemble '{other}'"
            )))
        }
    }
    .map_err(|e| ExperimentError::Config(e.to_string()))?;

    let n_list: Vec<usize> = require("n_list")?
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| ExperimentError::Config(format!("bad n_list entry '{t}'")))
        })
        .collect::<Result<_, _>>()?;
    let reps: usize = require("reps")?
        .parse()
        .map_err(|_| ExperimentError::Config("bad reps".into()))?;
    let seed: u64 = require("seed")?
        .parse()
        .map_err(|_| ExperimentError::Config("bad seed".into()))?;

    let pipeline = match get("pipeline") {
        Some("raw") | None => Pipeline::Raw,
        Some("truncated") => Pipeline::Truncated,
        Some(other) => {
            return Err(ExperimentError::Config(format!(
                "pipeline must be raw|truncated, got '{other}'"
            )))
        }
    };

    let mut levy = false;
    if let Some(list) = get("distances") {
        for item in list.split(',').map(str::trim) {
            match item {
                "kolmogorov" => {}
                "levy" => levy = true,
                other => {
                    return Err(ExperimentError::Config(format!(
                        "unknown distance '{other}'"
                    )))
                }
            }
        }
    }

    let stieltjes_v = match get("stieltjes_v") {
        Some(s) => parse_v_rule(s)?,
        None => VRule::InvSqrt(1.0),
    };

    let bai_keys = [get("bai_a"), get("bai_A"), get("bai_B")];
    let bai = match bai_keys {
        [None, None, None] => None,
        [Some(a), Some(big_a), Some(big_b)] => {
            let parse = |name: &str, s: &str| -> Result<f64, ExperimentError> {
                s.parse()
                    .map_err(|_| ExperimentError::Config(format!("bad {name} '{s}'")))
            };
            Some(BaiParamSpec {
                a: parse("bai_a", a)?,
                big_a: parse("bai_A", big_a)?,
                big_b: parse("bai_B", big_b)?,
            })
        }
        _ => {
            return Err(ExperimentError::Config(
                "give all of bai_a, bai_A, bai_B or none".into(),
            ))
        }
    };

    let config = SweepConfig {
        ensemble,
        n_list,
        reps,
        seed,
        pipeline,
        levy,
        stieltjes_v,
        bai,
        test_mode,
        out_csv: get("out_csv").map(PathBuf::from),
        out_json: get("out_json").map(PathBuf::from),
        out_tsv: get("out_tsv").map(PathBuf::from),
    };
    config.validate()?;
    Ok(config)
}

/// Parse a config file.
pub fn parse_config(path: &std::path::Path) -> Result<SweepConfig, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# sweep over small sizes
ensemble = gse
n_list = 4,8,16
reps = 2
seed = 42
distances = kolmogorov,levy
stieltjes_v = 1.0*n^-1/2
";

    #[test]
    fn parses_valid_config() {
        let cfg = parse_config_str(GOOD).unwrap();
        assert_eq!(cfg.n_list, vec![4, 8, 16]);
        assert_eq!(cfg.reps, 2);
        assert!(cfg.levy);
        assert_eq!(cfg.stieltjes_v, VRule::InvSqrt(1.0));
        assert_eq!(cfg.pipeline, Pipeline::Raw);
        assert!(cfg.bai.is_none());
    }

    #[test]
    fn rejects_unknown_key_and_unsorted_n() {
        assert!(parse_config_str("ensemble = gse\nn_list = 4\nreps = 1\nseed = 1\nbogus = 2\n")
            .is_err());
        assert!(
            parse_config_str("ensemble = gse\nn_list = 8,4\nreps = 1\nseed = 1\n").is_err()
        );
    }

    #[test]
    fn degenerate_requires_test_mode() {
        let base = "ensemble = degenerate\nn_list = 4\nreps = 1\nseed = 1\n";
        assert!(parse_config_str(base).is_err());
        let ok = format!("{base}test_mode = true\n");
        assert!(parse_config_str(&ok).is_ok());
    }

    #[test]
    fn v_rules() {
        assert_eq!(parse_v_rule("0.3").unwrap().v(100), 0.3);
        let r = parse_v_rule("2*n^-1/2").unwrap();
        assert!((r.v(4) - 1.0).abs() < 1e-15);
        let r = parse_v_rule("1*n^-2/5").unwrap();
        assert!((r.v(32) - (32.0_f64).powf(-0.4)).abs() < 1e-15);
        assert!(parse_v_rule("n^x").is_err());
    }

    #[test]
    fn bai_params_all_or_none() {
        let partial = "ensemble = gse\nn_list = 4\nreps = 1\nseed = 1\nbai_a = 2\n";
        assert!(parse_config_str(partial).is_err());
        let full =
            "ensemble = gse\nn_list = 4\nreps = 1\nseed = 1\nbai_a = 2\nbai_A = 20\nbai_B = 3\n";
        let cfg = parse_config_str(full).unwrap();
        assert_eq!(
            cfg.bai,
            Some(BaiParamSpec {
                a: 2.0,
                big_a: 20.0,
                big_b: 3.0
            })
        );
    }
}
