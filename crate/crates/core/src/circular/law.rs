use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gamma::GammaTerm;

/// Distance-dependent gain `ℓ(x) = min(c_B, c_PL·x^{−α})`.
///
/// The intercept caps the gain near the transmitter; with no intercept the
/// law is a pure power law and is singular at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossLaw {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    pub constant: f64,
    pub exponent: f64,
}

impl Default for PathLossLaw {
    fn default() -> Self {
        Self { intercept: Some(1.0), constant: 1.0, exponent: 4.0 }
    }
}

impl PathLossLaw {
    pub fn new(intercept: Option<f64>, constant: f64, exponent: f64) -> Result<Self> {
        let law = Self { intercept, constant, exponent };
        law.validate()?;
        Ok(law)
    }

    pub fn power_law(constant: f64, exponent: f64) -> Result<Self> {
        Self::new(None, constant, exponent)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if let Some(c) = self.intercept {
            if !positive(c) {
                return Err(invalid(format!("path-loss intercept must be finite and > 0, got {c}")));
            }
        }
        if !positive(self.constant) || !positive(self.exponent) {
            return Err(invalid(format!(
                "path-loss constant and exponent must be finite and > 0, got {} and {}",
                self.constant, self.exponent
            )));
        }
        Ok(())
    }

    /// Gain at distance `x ≥ 0`. At `x = 0` this is the intercept, or `+∞`
    /// for a pure power law.
    #[inline]
    pub fn gain(&self, x: f64) -> f64 {
        let raw = if x == 0.0 { f64::INFINITY } else { self.constant * x.powf(-self.exponent) };
        match self.intercept {
            Some(c) => raw.min(c),
            None => raw,
        }
    }
}

/// Path loss at a strictly positive distance.
pub fn path_loss(law: &PathLossLaw, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("path-loss distance must be finite and > 0, got {x}")));
    }
    Ok(law.gain(x))
}

/// Small-scale fading `G ~ Γ[shape, scale]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingLaw {
    pub shape: u32,
    pub scale: f64,
}

impl Default for FadingLaw {
    fn default() -> Self {
        Self { shape: 2, scale: 1.0 }
    }
}

impl FadingLaw {
    pub fn new(shape: u32, scale: f64) -> Result<Self> {
        GammaTerm::new(shape, scale)?;
        Ok(Self { shape, scale })
    }

    /// Unit-mean fading of the given shape.
    pub fn unit_mean(shape: u32) -> Result<Self> {
        Self::new(shape, 1.0 / shape as f64)
    }

    pub fn validate(&self) -> Result<()> {
        GammaTerm::new(self.shape, self.scale).map(|_| ())
    }

    pub fn mean(&self) -> f64 {
        self.shape as f64 * self.scale
    }

    /// Received-power term for a mean-free gain `power` (transmit power
    /// times path loss): `power·G ~ Γ[k, power·θ]`.
    pub fn scaled(&self, power: f64) -> Result<GammaTerm> {
        GammaTerm::new(self.shape, power * self.scale)
    }
}
