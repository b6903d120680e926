use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circular::{FadingLaw, PathLossLaw};
use crate::error::{invalid, Error, Result};

/// Base station at polar position `(rho, psi)` around the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub rho: f64,
    pub psi: f64,
    pub tx_power: f64,
    pub fading: FadingLaw,
}

impl BaseStation {
    pub fn new(rho: f64, psi: f64, tx_power: f64, fading: FadingLaw) -> Result<Self> {
        let bs = Self { rho, psi, tx_power, fading };
        bs.validate()?;
        Ok(bs)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho >= 0.0) || !self.psi.is_finite() {
            return Err(invalid(format!("invalid station position ({}, {})", self.rho, self.psi)));
        }
        if !(self.tx_power.is_finite() && self.tx_power > 0.0) {
            return Err(invalid(format!("transmit power must be finite and > 0, got {}", self.tx_power)));
        }
        self.fading.validate()
    }

    /// Angle reduced to `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        self.psi.rem_euclid(2.0 * PI)
    }

    /// Distance to the point `(r, 0)`.
    pub fn distance_to(&self, r: f64) -> f64 {
        (self.rho * self.rho + r * r - 2.0 * self.rho * r * self.psi.cos()).max(0.0).sqrt()
    }
}

/// Mean received power at the origin, `P_Tx · ℓ(d) · E[G]`.
pub fn mean_rx_at_origin(bs: &BaseStation, law: &PathLossLaw) -> Result<f64> {
    if !(bs.rho > 0.0) {
        return Err(invalid("station at the origin has no defined path loss"));
    }
    Ok(bs.tx_power * law.gain(bs.rho) * bs.fading.mean())
}

/// Region `inner ≤ ρ ≤ outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        let a = Self { inner, outer };
        a.validate()?;
        Ok(a)
    }

    /// Annulus holding `expected` stations on average at intensity `lambda`.
    pub fn for_expected_count(inner: f64, expected: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && expected > 0.0) {
            return Err(invalid("intensity and expected count must be > 0"));
        }
        Self::new(inner, (expected / (PI * lambda) + inner * inner).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner.is_finite() && self.inner >= 0.0 && self.outer.is_finite() && self.outer > self.inner) {
            return Err(invalid(format!(
                "annulus needs 0 <= inner < outer < inf, got [{}, {}]",
                self.inner, self.outer
            )));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        PI * (self.outer * self.outer - self.inner * self.inner)
    }

    pub fn contains(&self, rho: f64) -> bool {
        rho >= self.inner && rho <= self.outer
    }
}

/// Homogeneous PPP tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PppTierConfig {
    pub intensity: f64,
    pub annulus: Annulus,
    pub tx_power: f64,
    #[serde(default)]
    pub fading: FadingLaw,
}

impl PppTierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.intensity.is_finite() && self.intensity > 0.0) {
            return Err(invalid(format!("tier intensity must be finite and > 0, got {}", self.intensity)));
        }
        if !(self.tx_power.is_finite() && self.tx_power > 0.0) {
            return Err(invalid(format!("tier power must be finite and > 0, got {}", self.tx_power)));
        }
        self.annulus.validate()?;
        self.fading.validate()
    }

    pub fn expected_count(&self) -> f64 {
        self.intensity * self.annulus.area()
    }
}

/// Provenance carried in the deployment header.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tiers: Vec<PppTierConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    region: Annulus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tiers: Vec<PppTierConfig>,
}

/// Base stations inside an annulus. Stations outside the region are
/// rejected at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    stations: Vec<BaseStation>,
    region: Annulus,
    pub meta: DeploymentMeta,
}

impl Deployment {
    pub fn new(stations: Vec<BaseStation>, region: Annulus) -> Result<Self> {
        region.validate()?;
        for (i, s) in stations.iter().enumerate() {
            s.validate()?;
            if !region.contains(s.rho) {
                return Err(invalid(format!(
                    "station {i} at distance {} lies outside [{}, {}]",
                    s.rho, region.inner, region.outer
                )));
            }
        }
        Ok(Self { stations, region, meta: DeploymentMeta::default() })
    }

    pub fn stations(&self) -> &[BaseStation] {
        &self.stations
    }

    pub fn region(&self) -> Annulus {
        self.region
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    /// Union of two deployments (e.g. tiers); the region is the hull of
    /// both annuli.
    pub fn merge(mut self, other: Deployment) -> Result<Self> {
        let region =
            Annulus::new(self.region.inner.min(other.region.inner), self.region.outer.max(other.region.outer))?;
        self.stations.extend(other.stations);
        self.meta.tiers.extend(other.meta.tiers);
        self.region = region;
        Ok(self)
    }

    /// Line-oriented record: a JSON header line followed by one
    /// `rho psi p_tx k theta` line per station.
    pub fn to_text(&self) -> Result<String> {
        let header = Header { region: self.region, seed: self.meta.seed, tiers: self.meta.tiers.clone() };
        let mut out = serde_json::to_string(&header)?;
        out.push_str("\n# rho psi p_tx k theta\n");
        for s in &self.stations {
            writeln!(out, "{:?} {:?} {:?} {} {:?}", s.rho, s.psi, s.tx_power, s.fading.shape, s.fading.scale)
                .expect("writing to a String cannot fail");
        }
        Ok(out)
    }

    pub fn from_text(input: &str) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, htext) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
        let header: Header = serde_json::from_str(htext)
            .map_err(|e| Error::Parse { line: hline, message: format!("bad header: {e}") })?;
        let mut stations = Vec::new();
        for (line, text) in lines {
            let parse_err = |message: String| Error::Parse { line, message };
            let fields: Vec<&str> = text.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(parse_err(format!("expected 5 fields, found {}", fields.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| parse_err(format!("bad number {s:?}: {e}")));
            let shape = fields[3].parse::<u32>().map_err(|e| parse_err(format!("bad shape {:?}: {e}", fields[3])))?;
            let fading = FadingLaw { shape, scale: num(fields[4])? };
            let bs = BaseStation { rho: num(fields[0])?, psi: num(fields[1])?, tx_power: num(fields[2])?, fading };
            bs.validate().map_err(|e| parse_err(e.to_string()))?;
            stations.push(bs);
        }
        let mut dep = Self::new(stations, header.region)?;
        dep.meta = DeploymentMeta { seed: header.seed, tiers: header.tiers };
        Ok(dep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mean_rx_examples() {
        let law = PathLossLaw::default();
        let bs = BaseStation::new(2.0, 0.3, 1.0, FadingLaw::default()).unwrap();
        assert_relative_eq!(mean_rx_at_origin(&bs, &law).unwrap(), 0.125, max_relative = 1e-15);
        let weak = BaseStation { tx_power: 0.01, ..bs };
        assert_relative_eq!(mean_rx_at_origin(&weak, &law).unwrap(), 0.00125, max_relative = 1e-15);
        let near = BaseStation { rho: 0.5, ..bs };
        assert_eq!(mean_rx_at_origin(&near, &law).unwrap(), 2.0);
        let origin = BaseStation { rho: 0.0, ..bs };
        assert!(mean_rx_at_origin(&origin, &law).is_err());
    }

    #[test]
    fn region_is_enforced() {
        let region = Annulus::new(2.0, 10.0).unwrap();
        let inside = BaseStation::new(3.0, 0.0, 1.0, FadingLaw::default()).unwrap();
        let outside = BaseStation { rho: 11.0, ..inside };
        assert!(Deployment::new(vec![inside], region).is_ok());
        assert!(Deployment::new(vec![inside, outside], region).is_err());
        assert!(Annulus::new(3.0, 3.0).is_err());
        let a = Annulus::for_expected_count(2.0, 1000.0, 0.1).unwrap();
        assert_relative_eq!(a.area() * 0.1, 1000.0, max_relative = 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let region = Annulus::new(2.0, 10.0).unwrap();
        let stations = vec![
            BaseStation::new(2.5, -0.1, 1.0, FadingLaw::default()).unwrap(),
            BaseStation::new(9.999999999999, 3.0, 0.01, FadingLaw::new(3, 0.1 + 0.2).unwrap()).unwrap(),
        ];
        let mut dep = Deployment::new(stations, region).unwrap();
        dep.meta.seed = Some(17);
        let text = dep.to_text().unwrap();
        assert_eq!(Deployment::from_text(&text).unwrap(), dep);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "{\"region\":{\"inner\":1.0,\"outer\":5.0}}\n2.0 0.0 1.0 2 1.0\n2.0 0.0 1.0 2\n";
        match Deployment::from_text(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Deployment::from_text("").is_err());
        assert!(Deployment::from_text("{\"region\":{\"inner\":1.0,\"outer\":5.0},\"x\":1}\n").is_err());
        assert!(Deployment::from_text("{\"region\":{\"inner\":1.0,\"outer\":5.0}}\n9 0 1 2 1\n").is_err());
    }
}
