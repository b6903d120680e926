use rand::Rng;
use rand_distr::Exp1;

use crate::error::{invalid, Result};
use crate::gamma::terms::GammaTerm;
use crate::rng::fill_blocks;

/// One draw of `Γ[shape, 1]` as a sum of `shape` unit exponentials.
#[inline]
pub fn unit_gamma<R: Rng + ?Sized>(rng: &mut R, shape: u32) -> f64 {
    (0..shape).map(|_| rng.sample::<f64, _>(Exp1)).sum()
}

/// `n` independent draws of `Σ Γ[k_i, θ_i]`. Deterministic for a given seed
/// and independent of the number of worker threads.
pub fn mc_sample_sum(raw_terms: &[GammaTerm], n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("sample count must be >= 1"));
    }
    for t in raw_terms {
        t.validate()?;
    }
    Ok(fill_blocks(n, seed, |rng, block| {
        for v in block.iter_mut() {
            *v = raw_terms.iter().map(|t| t.scale * unit_gamma(rng, t.shape)).sum();
        }
    }))
}
