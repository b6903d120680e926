use crate::circular::PathLossLaw;
use crate::deployment::station::Deployment;
use crate::error::{invalid, Result};
use crate::gamma::unit_gamma;
use crate::link::EmpiricalCdf;
use crate::rng::fill_blocks;

/// Monte Carlo aggregate interference of the original deployment at the
/// user position `(r, 0)`: `Σ_i P_i ℓ(‖x_i − (r,0)‖) G_i` over `n_fading`
/// independent fading draws.
pub fn mc_interference_original(
    dep: &Deployment,
    law: &PathLossLaw,
    r: f64,
    n_fading: usize,
    seed: u64,
) -> Result<EmpiricalCdf> {
    if n_fading == 0 {
        return Err(invalid("need at least one fading draw"));
    }
    let sources: Vec<(u32, f64)> = dep
        .stations()
        .iter()
        .map(|s| (s.fading.shape, s.tx_power * law.gain(s.distance_to(r)) * s.fading.scale))
        .collect();
    if let Some(&(_, scale)) = sources.iter().find(|(_, s)| !s.is_finite()) {
        return Err(invalid(format!("user at r = {r} coincides with a station (scale {scale})")));
    }
    let samples = fill_blocks(n_fading, seed, |rng, block| {
        for v in block.iter_mut() {
            *v = sources.iter().map(|&(k, scale)| scale * unit_gamma(rng, k)).sum();
        }
    });
    EmpiricalCdf::new(samples)
}
