use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One measured quantity with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    /// `key=value` pairs joined by `;`, in a fixed order.
    pub params: String,
    pub metric: String,
    pub value: f64,
    /// Half-width of the 95% confidence interval, if any.
    pub half_width: Option<f64>,
    pub seed: u64,
    pub version: String,
}

/// Run-level provenance written into the CSV header and the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub experiment: String,
    pub seed: u64,
    pub version: String,
    pub snapshots: Option<(usize, usize)>,
    pub samples: Option<usize>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub meta: RunMeta,
    pub rows: Vec<ResultRow>,
}

pub(crate) fn params(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

impl ResultTable {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Self {
            meta: RunMeta {
                experiment: experiment.into(),
                seed,
                version: VERSION.into(),
                snapshots: None,
                samples: None,
                notes: Vec::new(),
            },
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, params: String, metric: &str, value: f64, half_width: Option<f64>) {
        self.rows.push(ResultRow {
            experiment: self.meta.experiment.clone(),
            params,
            metric: metric.into(),
            value,
            half_width,
            seed: self.meta.seed,
            version: self.meta.version.clone(),
        });
    }

    /// Rows whose parameters and metric match exactly.
    pub fn find(&self, params: &str, metric: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.params == params && r.metric == metric)
    }

    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        writeln!(out, "# experiment={}", m.experiment).unwrap();
        writeln!(out, "# seed={}", m.seed).unwrap();
        writeln!(out, "# version={}", m.version).unwrap();
        if let Some((a, b)) = m.snapshots {
            writeln!(out, "# snapshots={a}..{b}").unwrap();
        }
        if let Some(s) = m.samples {
            writeln!(out, "# samples={s}").unwrap();
        }
        for n in &m.notes {
            writeln!(out, "# note={n}").unwrap();
        }
        out.push_str("experiment,params,metric,value,half_width,seed,version\n");
        for r in &self.rows {
            let hw = r.half_width.map(|h| format!("{h:?}")).unwrap_or_default();
            writeln!(out, "{},{},{},{:?},{},{},{}", r.experiment, r.params, r.metric, r.value, hw, r.seed, r.version)
                .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<stem>.csv` and `<stem>.json`; returns both paths.
    pub fn write(&self, stem: &Path) -> Result<(PathBuf, PathBuf)> {
        if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let csv = stem.with_extension("csv");
        let json = stem.with_extension("json");
        fs::write(&csv, self.to_csv())?;
        fs::write(&json, self.to_json()?)?;
        Ok((csv, json))
    }
}

/// Mean and 95% normal-approximation half-width.
pub fn mean_ci(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, Some(1.96 * (var / n as f64).sqrt()))
}

/// Median of a sample (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
