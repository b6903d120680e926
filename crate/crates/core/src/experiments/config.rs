use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::circular::{Circle, CircularScenario, FadingLaw, PathLossLaw};
use crate::deployment::{Annulus, PppTierConfig};
use crate::error::{invalid, Error, Result};

pub const DESK_SNAPSHOTS: usize = 100;
pub const DESK_SAMPLES: usize = 1_000_000;
pub const PAPER_SNAPSHOTS: usize = 1000;
pub const PAPER_SAMPLES: usize = 10_000_000;

fn default_id() -> String {
    "experiment".into()
}
fn default_snapshots() -> usize {
    DESK_SNAPSHOTS
}
fn default_samples() -> usize {
    DESK_SAMPLES
}

/// `points` equally spaced values on `[0, 1]`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

fn default_r_grid() -> Vec<f64> {
    unit_grid(21)
}

/// Optional low-power overlay on the same annulus as the main tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayTier {
    pub intensity: f64,
    pub tx_power: f64,
}

/// PPP deployments for the mapping-accuracy and profile studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PppStudy {
    pub intensity: f64,
    pub expected_interferers: f64,
    pub inner_radius: f64,
    pub tx_power: f64,
    pub fading: FadingLaw,
    pub overlay: Option<OverlayTier>,
    pub circles: Vec<usize>,
    pub nodes: Vec<u32>,
    /// Fading draws per snapshot for the original-deployment oracle.
    pub fading_draws: usize,
}

impl Default for PppStudy {
    fn default() -> Self {
        Self {
            intensity: 0.1,
            expected_interferers: 1000.0,
            inner_radius: 2.0,
            tx_power: 1.0,
            fading: FadingLaw::default(),
            overlay: None,
            circles: vec![1, 2, 3, 4, 5],
            nodes: vec![10, 20],
            fading_draws: 10_000,
        }
    }
}

impl PppStudy {
    pub fn tiers(&self, expected_interferers: f64) -> Result<Vec<PppTierConfig>> {
        let annulus = Annulus::for_expected_count(self.inner_radius, expected_interferers, self.intensity)?;
        let mut tiers =
            vec![PppTierConfig { intensity: self.intensity, annulus, tx_power: self.tx_power, fading: self.fading }];
        if let Some(o) = self.overlay {
            tiers.push(PppTierConfig { intensity: o.intensity, annulus, tx_power: o.tx_power, fading: self.fading });
        }
        for t in &tiers {
            t.validate()?;
        }
        Ok(tiers)
    }
}

/// Profile peak-to-average study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PaprStudy {
    pub circles: usize,
    pub nodes: u32,
    pub expected_interferers: Vec<f64>,
}

impl Default for PaprStudy {
    fn default() -> Self {
        Self { circles: 1, nodes: 20, expected_interferers: vec![100.0, 1000.0] }
    }
}

/// Two-circle reference scenario: `R = (2, 4)`, ten nodes each with unit
/// total power and uniform profiles, phases `(−π/10, 0)`, central power 0.1,
/// `Γ[2, 1]` fading and a pure fourth-power path-loss law.
pub fn reference_scenario() -> CircularScenario {
    let f = FadingLaw::default();
    CircularScenario::new(
        0.1,
        f,
        PathLossLaw::power_law(1.0, 4.0).expect("valid law"),
        vec![
            Circle::uniform(2.0, -PI / 10.0, 10, 1.0, f).expect("valid circle"),
            Circle::uniform(4.0, 0.0, 10, 1.0, f).expect("valid circle"),
        ],
    )
    .expect("valid scenario")
}

/// SIR/rate study and the single-circle decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollaborationStudy {
    pub scenario: CircularScenario,
    pub positions: Vec<f64>,
    pub collaborators: usize,
    /// Add Monte Carlo KS rows using `samples` draws per scheme and position.
    pub mc_overlay: bool,
    /// Points of the exported logarithmic SIR grid on `[1e-3, 1e3]`.
    pub curve_points: usize,
}

impl Default for CollaborationStudy {
    fn default() -> Self {
        Self {
            scenario: reference_scenario(),
            positions: vec![0.5, 1.0],
            collaborators: 2,
            mc_overlay: false,
            curve_points: 200,
        }
    }
}

/// Full configuration of a batch run. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_id")]
    pub id: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    /// Monte Carlo draws for oracle overlays.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_r_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default)]
    pub path_loss: PathLossLaw,
    #[serde(default)]
    pub ppp: PppStudy,
    #[serde(default)]
    pub papr: PaprStudy,
    #[serde(default)]
    pub collaboration: CollaborationStudy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config takes every default")
    }
}

impl ExperimentConfig {
    pub fn from_toml(input: &str) -> Result<Self> {
        let c: Self = toml::from_str(input).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Snapshot and sample counts of the original study.
    pub fn paper_scale(mut self) -> Self {
        self.snapshots = PAPER_SNAPSHOTS;
        self.samples = PAPER_SAMPLES;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.snapshots == 0 || self.samples == 0 || self.ppp.fading_draws == 0 {
            return Err(invalid("snapshot, sample and fading-draw counts must be >= 1"));
        }
        if self.r_grid.is_empty() || self.r_grid.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(invalid("r grid must be nonempty and lie within [0, 1]"));
        }
        if self.ppp.circles.is_empty() || self.ppp.nodes.is_empty() {
            return Err(invalid("need at least one circle count and one node count"));
        }
        if self.ppp.circles.contains(&0)
            || self.ppp.nodes.contains(&0)
            || self.papr.nodes == 0
            || self.papr.circles == 0
        {
            return Err(invalid("circle and node counts must be >= 1"));
        }
        if self.collaboration.positions.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(invalid("collaboration positions must be finite and >= 0"));
        }
        self.path_loss.validate()?;
        self.ppp.tiers(self.ppp.expected_interferers)?;
        for &n in &self.papr.expected_interferers {
            self.ppp.tiers(n)?;
        }
        self.collaboration.scenario.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_desk_scale() {
        let c = ExperimentConfig::default();
        assert_eq!(c.snapshots, 100);
        assert_eq!(c.samples, 1_000_000);
        assert_eq!(c.r_grid.len(), 21);
        assert_eq!(c.r_grid[20], 1.0);
        c.validate().unwrap();
        let p = c.paper_scale();
        assert_eq!((p.snapshots, p.samples), (1000, 10_000_000));
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(ExperimentConfig::from_toml("snapshotz = 3").is_err());
        assert!(ExperimentConfig::from_toml("[ppp]\nintensty = 0.1").is_err());
        let c = ExperimentConfig::from_toml("seed = 7\n[ppp]\nintensity = 0.05\nnodes = [20, 40]").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.ppp.nodes, vec![20, 40]);
        assert_eq!(c.ppp.circles, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::default();
        c.ppp.overlay = Some(OverlayTier { intensity: 1.0, tx_power: 0.01 });
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_toml("snapshots = 0").is_err());
        assert!(ExperimentConfig::from_toml("r_grid = [1.5]").is_err());
        assert!(ExperimentConfig::from_toml("[ppp]\ncircles = []").is_err());
    }
}
