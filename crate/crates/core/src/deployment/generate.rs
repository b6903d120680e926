use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::circular::FadingLaw;
use crate::deployment::station::{Annulus, BaseStation, Deployment, PppTierConfig};
use crate::error::{invalid, Result};
use crate::rng::derive_seed;

/// One realization of a homogeneous PPP on the tier's annulus.
pub fn sample_ppp(tier: &PppTierConfig, seed: u64) -> Result<Deployment> {
    tier.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = tier.expected_count();
    let count = if mean > 0.0 {
        Poisson::new(mean).map_err(|e| invalid(format!("cannot sample Poisson({mean}): {e}")))?.sample(&mut rng)
            as usize
    } else {
        0
    };
    let Annulus { inner, outer } = tier.annulus;
    let (in2, span) = (inner * inner, outer * outer - inner * inner);
    let stations = (0..count)
        .map(|_| {
            // Area-uniform radius by inverting (ρ² − R_in²)/(R_out² − R_in²).
            let u: f64 = rng.random();
            let rho = (in2 + u * span).sqrt().clamp(inner, outer);
            let psi = rng.random_range(-PI..PI);
            BaseStation { rho, psi, tx_power: tier.tx_power, fading: tier.fading }
        })
        .collect();
    let mut dep = Deployment::new(stations, tier.annulus)?;
    dep.meta.seed = Some(seed);
    dep.meta.tiers = vec![*tier];
    Ok(dep)
}

/// Superposition of independent tiers; tier `i` draws from a seed derived
/// from `(seed, i)`.
pub fn sample_tiers(tiers: &[PppTierConfig], seed: u64) -> Result<Deployment> {
    let (first, rest) = tiers.split_first().ok_or_else(|| invalid("at least one tier required"))?;
    let mut dep = sample_ppp(first, derive_seed(seed, 0))?;
    for (i, t) in rest.iter().enumerate() {
        dep = dep.merge(sample_ppp(t, derive_seed(seed, i as u64 + 1))?)?;
    }
    dep.meta.seed = Some(seed);
    Ok(dep)
}

/// Hexagonal lattice with `rings` rings around the (excluded) origin site;
/// `3·rings·(rings + 1)` stations.
pub fn hex_grid(rings: u32, spacing: f64, tx_power: f64, fading: FadingLaw) -> Result<Deployment> {
    if rings == 0 {
        return Err(invalid("hexagonal grid needs at least one ring"));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(invalid(format!("grid spacing must be finite and > 0, got {spacing}")));
    }
    let k = rings as i64;
    let h = 3f64.sqrt() / 2.0;
    let mut stations = Vec::with_capacity((3 * k * (k + 1)) as usize);
    for q in -k..=k {
        for r in (-k).max(-q - k)..=k.min(-q + k) {
            if q == 0 && r == 0 {
                continue;
            }
            let x = spacing * (q as f64 + r as f64 / 2.0);
            let y = spacing * (r as f64 * h);
            stations.push(BaseStation { rho: x.hypot(y), psi: y.atan2(x), tx_power, fading });
        }
    }
    let region = Annulus::new(spacing / 2.0, spacing * rings as f64 * (1.0 + 1e-9))?;
    Deployment::new(stations, region)
}
