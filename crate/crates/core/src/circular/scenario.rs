use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circular::law::{FadingLaw, PathLossLaw};
use crate::error::{invalid, Error, Result};
use crate::gamma::{canonicalize, CanonicalTermSet, GammaTerm, DEFAULT_MERGE_TOL};

const PROFILE_SUM_TOL: f64 = 1e-12;

/// `N` equidistant nodes on a circle of radius `R`; node `n ∈ 1..=N` sits at
/// angle `2πn/N + φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub radius: f64,
    pub phase: f64,
    pub node_count: u32,
    pub total_power: f64,
    pub profile: Vec<f64>,
    #[serde(default)]
    pub fading: FadingLaw,
}

impl Circle {
    /// Circle with power spread evenly over its nodes.
    pub fn uniform(radius: f64, phase: f64, node_count: u32, total_power: f64, fading: FadingLaw) -> Result<Self> {
        if node_count == 0 {
            return Err(invalid("circle needs at least one node"));
        }
        let c = Self {
            radius,
            phase,
            node_count,
            total_power,
            profile: vec![1.0 / node_count as f64; node_count as usize],
            fading,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(invalid(format!("circle radius must be finite and > 0, got {}", self.radius)));
        }
        if self.node_count == 0 {
            return Err(invalid("circle needs at least one node"));
        }
        let half_sector = PI / self.node_count as f64;
        if !(self.phase.abs() <= half_sector * (1.0 + 1e-12)) {
            return Err(invalid(format!(
                "circle phase {} outside [-π/N, π/N] for N = {}",
                self.phase, self.node_count
            )));
        }
        if !(self.total_power.is_finite() && self.total_power > 0.0) {
            return Err(invalid(format!("circle power must be finite and > 0, got {}", self.total_power)));
        }
        if self.profile.len() != self.node_count as usize {
            return Err(invalid(format!("profile has {} entries for {} nodes", self.profile.len(), self.node_count)));
        }
        if let Some(p) = self.profile.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid(format!("profile weight {p} outside [0, 1]")));
        }
        let sum: f64 = self.profile.iter().sum();
        if (sum - 1.0).abs() > PROFILE_SUM_TOL {
            return Err(invalid(format!("profile sums to {sum}, expected 1")));
        }
        self.fading.validate()
    }

    /// Node position measured in nodes from the positive x-axis, reduced to
    /// `(−N/2, N/2]`. Phases within 1e-9 of a half-node offset are snapped
    /// so that mirror-image nodes get bit-identical distances.
    fn node_offset(&self, n: u32) -> f64 {
        let nn = self.node_count as f64;
        let mut q = self.phase * nn / (2.0 * PI);
        let snapped = (2.0 * q).round() / 2.0;
        if (q - snapped).abs() < 1e-9 {
            q = snapped;
        }
        let mut u = (n as f64 + q).rem_euclid(nn);
        if u > nn / 2.0 {
            u -= nn;
        }
        u
    }

    /// Angle of node `n` in `(−π, π]`.
    pub fn node_angle(&self, n: u32) -> f64 {
        2.0 * PI * self.node_offset(n) / self.node_count as f64
    }
}

/// Identifies a node: `(0, 0)` is the central base station, otherwise circle
/// `c ∈ 1..=C` and node `n ∈ 1..=N_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    pub circle: usize,
    pub node: u32,
}

impl NodeRef {
    pub const CENTRAL: NodeRef = NodeRef { circle: 0, node: 0 };

    pub fn new(circle: usize, node: u32) -> Self {
        Self { circle, node }
    }

    pub fn is_central(&self) -> bool {
        self.circle == 0
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.circle, self.node)
    }
}

/// Central base station at the origin plus concentric circles of
/// interferers, sorted by radius. The user sits at `(r, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircularScenario {
    pub central_power: f64,
    #[serde(default)]
    pub central_fading: FadingLaw,
    #[serde(default)]
    pub path_loss: PathLossLaw,
    pub circles: Vec<Circle>,
}

impl CircularScenario {
    pub fn new(
        central_power: f64,
        central_fading: FadingLaw,
        path_loss: PathLossLaw,
        circles: Vec<Circle>,
    ) -> Result<Self> {
        let s = Self { central_power, central_fading, path_loss, circles };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.central_power.is_finite() && self.central_power >= 0.0) {
            return Err(invalid(format!("central power must be finite and >= 0, got {}", self.central_power)));
        }
        self.central_fading.validate()?;
        self.path_loss.validate()?;
        for c in &self.circles {
            c.validate()?;
        }
        if self.circles.windows(2).any(|w| !(w[0].radius < w[1].radius)) {
            return Err(invalid("circle radii must be strictly increasing"));
        }
        Ok(())
    }

    pub fn circle(&self, c: usize) -> Result<&Circle> {
        if c == 0 {
            return Err(invalid("circle indices start at 1"));
        }
        self.circles.get(c - 1).ok_or_else(|| invalid(format!("circle {c} out of range (C = {})", self.circles.len())))
    }

    pub fn check_node(&self, node: NodeRef) -> Result<()> {
        if node.is_central() {
            return if node.node == 0 { Ok(()) } else { Err(invalid(format!("invalid node {node}"))) };
        }
        let circle = self.circle(node.circle)?;
        if node.node == 0 || node.node > circle.node_count {
            return Err(invalid(format!("node {node} out of range (N = {})", circle.node_count)));
        }
        Ok(())
    }

    /// Every node on every circle, in circle-then-node order.
    pub fn interferers(&self) -> Vec<NodeRef> {
        self.circles
            .iter()
            .enumerate()
            .flat_map(|(i, c)| (1..=c.node_count).map(move |n| NodeRef::new(i + 1, n)))
            .collect()
    }

    /// Distance from `node` to the user at `(r, 0)`.
    pub fn distance(&self, node: NodeRef, r: f64) -> Result<f64> {
        self.check_node(node)?;
        if node.is_central() {
            return Ok(r);
        }
        let circle = self.circle(node.circle)?;
        Ok(node_geometry(circle, node.node, r)?.1)
    }

    /// Mean-free received power `P·p·ℓ(d)` from `node`; zero for silent nodes.
    pub fn rx_power(&self, node: NodeRef, r: f64) -> Result<f64> {
        let d = self.distance(node, r)?;
        let tx = if node.is_central() {
            self.central_power
        } else {
            let c = self.circle(node.circle)?;
            c.total_power * c.profile[node.node as usize - 1]
        };
        if tx == 0.0 {
            return Ok(0.0);
        }
        Ok(tx * self.path_loss.gain(d))
    }

    pub fn fading(&self, node: NodeRef) -> Result<FadingLaw> {
        self.check_node(node)?;
        Ok(if node.is_central() { self.central_fading } else { self.circle(node.circle)?.fading })
    }

    /// Scales every transmit power by `factor`.
    pub fn scale_powers(&self, factor: f64) -> Result<Self> {
        let mut s = self.clone();
        s.central_power *= factor;
        for c in &mut s.circles {
            c.total_power *= factor;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(input: &str) -> Result<Self> {
        let s: Self = toml::from_str(input).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(input: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(input)?;
        s.validate()?;
        Ok(s)
    }
}

/// Angle and distance of node `n` of `circle` as seen from `(r, 0)`.
pub fn node_geometry(circle: &Circle, n: u32, r: f64) -> Result<(f64, f64)> {
    if n == 0 || n > circle.node_count {
        return Err(invalid(format!("node {n} out of range (N = {})", circle.node_count)));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("user eccentricity must be finite and >= 0, got {r}")));
    }
    let psi = circle.node_angle(n);
    let rc = circle.radius;
    // cos of |ψ| so that mirror images are bit-identical.
    let d2 = rc * rc + r * r - 2.0 * rc * r * psi.abs().cos();
    Ok((psi, d2.max(0.0).sqrt()))
}

/// Received power of `node` at eccentricity `r` as a Gamma term.
///
/// Fails for silent nodes (zero transmit power) and for a user on top of a
/// node under a pure power law.
pub fn rx_gamma_term(scenario: &CircularScenario, node: NodeRef, r: f64) -> Result<GammaTerm> {
    let power = scenario.rx_power(node, r)?;
    if !power.is_finite() {
        return Err(invalid(format!("user at r = {r} coincides with {node} under an unbounded path-loss law")));
    }
    scenario.fading(node)?.scaled(power)
}

/// Gamma terms of all audible nodes in `nodes`, uncanonicalized. Silent
/// nodes are skipped.
pub fn raw_terms(scenario: &CircularScenario, nodes: &[NodeRef], r: f64) -> Result<Vec<GammaTerm>> {
    let mut out = Vec::with_capacity(nodes.len());
    for &node in nodes {
        if scenario.rx_power(node, r)? == 0.0 {
            continue;
        }
        out.push(rx_gamma_term(scenario, node, r)?);
    }
    Ok(out)
}

/// Aggregate received power over `nodes` as a canonical term set. Nodes at
/// equal distance and power collapse into one scale.
pub fn aggregate_terms(scenario: &CircularScenario, nodes: &[NodeRef], r: f64) -> Result<CanonicalTermSet> {
    if nodes.is_empty() {
        return Err(invalid("node set is empty"));
    }
    let raw = raw_terms(scenario, nodes, r)?;
    if raw.is_empty() {
        return Err(invalid("every node in the set is silent"));
    }
    canonicalize(&raw, DEFAULT_MERGE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_circle(phase: f64) -> CircularScenario {
        CircularScenario::new(
            0.1,
            FadingLaw::default(),
            PathLossLaw::default(),
            vec![Circle::uniform(2.0, phase, 10, 1.0, FadingLaw::default()).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn geometry_examples() {
        let c = Circle::uniform(2.0, 0.0, 4, 1.0, FadingLaw::default()).unwrap();
        // Node 4 sits at angle 0, node 2 at π.
        assert_eq!(node_geometry(&c, 4, 1.0).unwrap(), (0.0, 1.0));
        let (psi, d) = node_geometry(&c, 2, 1.0).unwrap();
        assert_relative_eq!(psi, PI);
        assert_relative_eq!(d, 3.0, max_relative = 1e-15);
        for n in 1..=4 {
            assert_eq!(node_geometry(&c, n, 0.0).unwrap().1, 2.0);
        }
        assert!(node_geometry(&c, 0, 1.0).is_err());
        assert!(node_geometry(&c, 5, 1.0).is_err());
    }

    #[test]
    fn phase_places_first_and_last_node_symmetrically() {
        let s = one_circle(-PI / 10.0);
        let c = &s.circles[0];
        assert_relative_eq!(c.node_angle(1), PI / 10.0, max_relative = 1e-15);
        assert_relative_eq!(c.node_angle(10), -PI / 10.0, max_relative = 1e-15);
        for r in [0.0, 0.3, 0.5, 1.0, 1.7] {
            for n in 1..=10 {
                let a = s.distance(NodeRef::new(1, n), r).unwrap();
                let b = s.distance(NodeRef::new(1, 11 - n), r).unwrap();
                assert_eq!(a, b, "n = {n}, r = {r}");
            }
        }
    }

    #[test]
    fn rx_term_examples() {
        let s = one_circle(-PI / 10.0);
        let central = rx_gamma_term(&s, NodeRef::CENTRAL, 1.0).unwrap();
        assert_eq!(central.shape, 2);
        assert_relative_eq!(central.scale, 0.1, max_relative = 1e-15);
        // A node at distance 1: P·p·ℓ(1)·θ = 1·0.1·1·1.
        let c = Circle::uniform(1.0, 0.0, 10, 1.0, FadingLaw::default()).unwrap();
        let s1 = CircularScenario::new(0.1, FadingLaw::default(), PathLossLaw::default(), vec![c]).unwrap();
        let t = rx_gamma_term(&s1, NodeRef::new(1, 10), 0.0).unwrap();
        assert_eq!((t.shape, t.scale), (2, 0.1));
        let at_center: Vec<f64> = (1..=10).map(|n| rx_gamma_term(&s, NodeRef::new(1, n), 0.0).unwrap().scale).collect();
        assert!(at_center.iter().all(|&v| v == at_center[0]));
    }

    #[test]
    fn symmetric_circle_collapses_to_five_scales() {
        let s = one_circle(-PI / 10.0);
        let set = aggregate_terms(&s, &s.interferers(), 1.0).unwrap();
        assert_eq!(set.len(), 5);
        assert!(set.terms().iter().all(|t| t.shape == 4));
        let central = aggregate_terms(&s, &[NodeRef::CENTRAL], 1.0).unwrap();
        assert_eq!(central.len(), 1);
    }

    #[test]
    fn silent_nodes_skipped() {
        let mut s = one_circle(0.0);
        s.circles[0].profile = vec![0.0; 10];
        s.circles[0].profile[3] = 1.0;
        s.validate().unwrap();
        let set = aggregate_terms(&s, &s.interferers(), 0.5).unwrap();
        assert_eq!(set.len(), 1);
        assert!(rx_gamma_term(&s, NodeRef::new(1, 1), 0.5).is_err());
        s.central_power = 0.0;
        assert!(aggregate_terms(&s, &[NodeRef::CENTRAL], 0.5).is_err());
    }

    #[test]
    fn energy_accounting() {
        let mut s = one_circle(0.0);
        s.circles[0].profile = vec![0.05, 0.15, 0.1, 0.1, 0.2, 0.05, 0.05, 0.1, 0.1, 0.1];
        s.validate().unwrap();
        let c = &s.circles[0];
        let total: f64 = c.profile.iter().map(|p| c.total_power * p).sum();
        assert_relative_eq!(total, c.total_power, max_relative = 1e-15);
    }

    #[test]
    fn rejects_invalid_scenarios() {
        let mut s = one_circle(0.0);
        s.circles[0].phase = 0.5;
        assert!(s.validate().is_err());
        let mut s = one_circle(0.0);
        s.circles[0].profile[0] += 1e-9;
        assert!(s.validate().is_err());
        let mut s = one_circle(0.0);
        s.circles.push(s.circles[0].clone());
        assert!(s.validate().is_err());
        let s = one_circle(0.0);
        assert!(s.check_node(NodeRef::new(1, 11)).is_err());
        assert!(s.check_node(NodeRef::new(2, 1)).is_err());
        assert!(s.check_node(NodeRef::new(0, 1)).is_err());
    }

    #[test]
    fn unbounded_law_at_node_is_an_error() {
        let mut s = one_circle(0.0);
        s.path_loss = PathLossLaw::power_law(1.0, 4.0).unwrap();
        assert!(rx_gamma_term(&s, NodeRef::CENTRAL, 0.0).is_err());
    }

    #[test]
    fn serialization_round_trips() {
        let mut s = one_circle(-PI / 10.0);
        s.circles.push(Circle::uniform(4.0, 0.1, 7, 0.3, FadingLaw::new(3, 0.7).unwrap()).unwrap());
        s.path_loss = PathLossLaw::power_law(0.9, 3.7).unwrap();
        assert_eq!(CircularScenario::from_toml(&s.to_toml().unwrap()).unwrap(), s);
        assert_eq!(CircularScenario::from_json(&s.to_json().unwrap()).unwrap(), s);
        assert!(CircularScenario::from_toml("central_power = 1.0\ncircles = []\nbogus = 1\n").is_err());
    }
}
