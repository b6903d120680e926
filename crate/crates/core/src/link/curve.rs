use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::circular::CircularScenario;
use crate::error::Result;

/// Provenance written above an exported curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMeta {
    pub scenario_hash: String,
    pub scheme: String,
    pub r: f64,
    pub seed: Option<u64>,
    pub abscissa: String,
    pub ordinate: String,
}

/// First 16 hex digits of the SHA-256 of the scenario's JSON record.
pub fn scenario_hash(scenario: &CircularScenario) -> Result<String> {
    let digest = Sha256::digest(serde_json::to_vec(scenario)?);
    Ok(hex::encode(digest)[..16].to_string())
}

/// Two-column CSV with `#` metadata lines.
pub fn curve_csv(meta: &CurveMeta, points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    writeln!(out, "# scenario_hash={}", meta.scenario_hash).unwrap();
    writeln!(out, "# scheme={}", meta.scheme).unwrap();
    writeln!(out, "# r={:?}", meta.r).unwrap();
    match meta.seed {
        Some(s) => writeln!(out, "# seed={s}").unwrap(),
        None => writeln!(out, "# seed=none").unwrap(),
    }
    writeln!(out, "{},{}", meta.abscissa, meta.ordinate).unwrap();
    for (x, y) in points {
        writeln!(out, "{x:?},{y:?}").unwrap();
    }
    out
}
