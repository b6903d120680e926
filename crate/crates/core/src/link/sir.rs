use crate::circular::{raw_terms, CircularScenario, NodeRef};
use crate::error::{invalid, Error, Result};
use crate::gamma::{sum_pdf_adaptive, unit_gamma, ExpPolyMixture};
use crate::link::collab::{collaboration_sets, CollaborationScheme};
use crate::quadrature::{integrate, QuadOptions};
use crate::rng::fill_blocks;

const MASS_TOL: f64 = 1e-6;

const CDF_QUAD: QuadOptions = QuadOptions { abs_tol: 1e-8, rel_tol: 1e-10, max_intervals: 4000 };

/// `coef · γ^b_s · (c_i + c_s γ)^{−exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SirTerm {
    coef: f64,
    /// `a_s b_s! c_s^{−1−b_s} · a_i b_i! c_i^{−1−b_i}`, the product of the
    /// two term masses.
    mass: f64,
    signal_degree: u32,
    interference_degree: u32,
    signal_rate: f64,
    interference_rate: f64,
    exponent: i32,
}

/// Density of `γ = S / I` for independent `S`, `I` with exponential-
/// polynomial densities.
///
/// With `f_S = Σ a_s y^b_s e^{−c_s y}` and `f_I` likewise, the quotient
/// integral `∫ z f_S(zγ) f_I(z) dz` evaluates termwise to
/// `a_s a_i (E−1)! γ^b_s (c_i + c_s γ)^{−E}` with `E = 2 + b_s + b_i`.
#[derive(Debug, Clone)]
pub struct SirDensity {
    terms: Vec<SirTerm>,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Builds the closed-form SIR density. Both inputs must be normalized.
pub fn sir_pdf(signal: &ExpPolyMixture, interference: &ExpPolyMixture) -> Result<SirDensity> {
    for (name, m) in [("signal", signal), ("interference", interference)] {
        let mass = m.mass();
        if !((mass - 1.0).abs() <= MASS_TOL) {
            return Err(invalid(format!("{name} density has mass {mass}, expected 1")));
        }
    }
    let mut terms = Vec::with_capacity(signal.terms().len() * interference.terms().len());
    for s in signal.terms() {
        for i in interference.terms() {
            let e = 2 + s.degree + i.degree;
            let mass_s = s.amplitude * factorial(s.degree) * s.rate.powi(-(s.degree as i32) - 1);
            let mass_i = i.amplitude * factorial(i.degree) * i.rate.powi(-(i.degree as i32) - 1);
            terms.push(SirTerm {
                coef: s.amplitude * i.amplitude * factorial(e - 1),
                mass: mass_s * mass_i,
                signal_degree: s.degree,
                interference_degree: i.degree,
                signal_rate: s.rate,
                interference_rate: i.rate,
                exponent: e as i32,
            });
        }
    }
    Ok(SirDensity { terms })
}

impl SirDensity {
    pub fn pdf(&self, gamma: f64) -> f64 {
        if !(gamma >= 0.0) {
            return 0.0;
        }
        if gamma.is_infinite() {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|t| {
                t.coef
                    * gamma.powi(t.signal_degree as i32)
                    * (t.interference_rate + t.signal_rate * gamma).powi(-t.exponent)
            })
            .sum()
    }

    /// `P(γ ≤ g)` by adaptive quadrature of the density after mapping
    /// `[0, ∞)` onto `[0, 1)` through `γ = t/(1−t)`. An independent check on
    /// [`cdf`](Self::cdf); fails when cancellation noise in the density keeps
    /// the error estimate above tolerance.
    pub fn cdf_quadrature(&self, g: f64) -> Result<f64> {
        if !(g > 0.0) {
            return Ok(0.0);
        }
        let upper = if g.is_infinite() { 1.0 } else { g / (1.0 + g) };
        let value = integrate(
            |t| {
                let s = 1.0 - t;
                if s <= 0.0 {
                    return 0.0;
                }
                self.pdf(t / s) / (s * s)
            },
            0.0,
            upper,
            &CDF_QUAD,
        )
        .map_err(|e| Error::Numeric(format!("SIR distribution at {g}: {e}")))?;
        Ok(value.clamp(0.0, 1.0))
    }

    /// `P(γ ≤ g)` in closed form. With `u = c_s γ/(c_i + c_s γ)` each term
    /// integrates to its mass times the binomial tail
    /// `P(Bin(1+b_s+b_i, u) ≥ 1+b_s)`, a sum of positive terms.
    pub fn cdf(&self, g: f64) -> f64 {
        if !(g > 0.0) {
            return 0.0;
        }
        let total: f64 = self
            .terms
            .iter()
            .map(|t| {
                if g.is_infinite() {
                    return t.mass;
                }
                let denom = t.interference_rate + t.signal_rate * g;
                let u = t.signal_rate * g / denom;
                let v = t.interference_rate / denom;
                t.mass * binomial_upper_tail(1 + t.signal_degree + t.interference_degree, t.signal_degree + 1, u, v)
            })
            .sum();
        total.clamp(0.0, 1.0)
    }

    pub fn mass(&self) -> f64 {
        self.terms.iter().map(|t| t.mass).sum()
    }

    pub fn median(&self) -> Result<f64> {
        distribution_quantile(|g| Ok(self.cdf(g)), 0.5)
    }
}

/// `Σ_{j=k}^{n} C(n,j) u^j v^{n−j}` with `v = 1 − u` supplied separately.
fn binomial_upper_tail(n: u32, k: u32, u: f64, v: f64) -> f64 {
    let mut binom = 1.0;
    for j in 0..k {
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    let mut sum = 0.0;
    for j in k..=n {
        sum += binom * u.powi(j as i32) * v.powi((n - j) as i32);
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    sum
}

/// Density of the rate `τ = log2(1 + γ)`.
#[derive(Debug, Clone)]
pub struct RateDensity {
    sir: SirDensity,
}

pub fn rate_pdf(sir: &SirDensity) -> RateDensity {
    RateDensity { sir: sir.clone() }
}

impl RateDensity {
    pub fn pdf(&self, tau: f64) -> f64 {
        if !(tau >= 0.0) {
            return 0.0;
        }
        let ln2 = std::f64::consts::LN_2;
        ln2 * tau.exp2() * self.sir.pdf((tau * ln2).exp_m1())
    }

    pub fn cdf_quadrature(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Ok(0.0);
        }
        self.sir.cdf_quadrature((tau * std::f64::consts::LN_2).exp_m1())
    }

    pub fn cdf(&self, tau: f64) -> f64 {
        if !(tau > 0.0) {
            return 0.0;
        }
        self.sir.cdf((tau * std::f64::consts::LN_2).exp_m1())
    }

    pub fn median(&self) -> Result<f64> {
        distribution_quantile(|t| Ok(self.cdf(t)), 0.5)
    }

    pub fn sir(&self) -> &SirDensity {
        &self.sir
    }
}

/// Quantile of a distribution on `(0, ∞)`: brackets `p` geometrically from
/// 1, then bisects in log space to a relative width of 1e-10.
pub fn distribution_quantile<F: Fn(f64) -> Result<f64>>(cdf: F, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("quantile level must lie in (0, 1), got {p}")));
    }
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    for _ in 0..2000 {
        if cdf(lo)? < p {
            break;
        }
        lo /= 2.0;
    }
    for _ in 0..2000 {
        if cdf(hi)? >= p {
            break;
        }
        hi *= 2.0;
    }
    if !(cdf(lo)? < p && cdf(hi)? >= p) {
        return Err(Error::Numeric(format!("could not bracket the {p}-quantile")));
    }
    while hi / lo - 1.0 > 1e-10 {
        let mid = (lo * hi).sqrt();
        if cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

pub fn distribution_median<F: Fn(f64) -> Result<f64>>(cdf: F) -> Result<f64> {
    distribution_quantile(cdf, 0.5)
}

/// Signal and interference densities of a node split at eccentricity `r`.
pub fn link_densities(
    scenario: &CircularScenario,
    signal: &[NodeRef],
    interference: &[NodeRef],
    r: f64,
) -> Result<(ExpPolyMixture, ExpPolyMixture)> {
    let s = raw_terms(scenario, signal, r)?;
    let i = raw_terms(scenario, interference, r)?;
    if s.is_empty() || i.is_empty() {
        return Err(invalid("signal and interference sets must both carry power"));
    }
    Ok((sum_pdf_adaptive(&s)?.0, sum_pdf_adaptive(&i)?.0))
}

/// SIR density at eccentricity `r` under a collaboration scheme with `m`
/// collaborators.
pub fn scheme_sir(scenario: &CircularScenario, scheme: CollaborationScheme, m: usize, r: f64) -> Result<SirDensity> {
    let (signal, interference) = collaboration_sets(scenario, scheme, m, r)?;
    let (fs, fi) = link_densities(scenario, &signal, &interference, r)?;
    sir_pdf(&fs, &fi)
}

/// Monte Carlo draws of `S / I` with independent fading per node.
pub fn mc_sir_samples(
    scenario: &CircularScenario,
    signal: &[NodeRef],
    interference: &[NodeRef],
    r: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("sample count must be >= 1"));
    }
    let s = raw_terms(scenario, signal, r)?;
    let i = raw_terms(scenario, interference, r)?;
    Ok(fill_blocks(n, seed, |rng, block| {
        for v in block.iter_mut() {
            let num: f64 = s.iter().map(|t| t.scale * unit_gamma(rng, t.shape)).sum();
            let den: f64 = i.iter().map(|t| t.scale * unit_gamma(rng, t.shape)).sum();
            *v = num / den;
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{canonicalize, sum_pdf, GammaTerm};
    use approx::assert_relative_eq;

    fn gamma(k: u32, theta: f64) -> ExpPolyMixture {
        sum_pdf(&canonicalize(&[GammaTerm::new(k, theta).unwrap()], 1e-9).unwrap()).unwrap()
    }

    #[test]
    fn ratio_of_exponentials() {
        let (ts, ti) = (2.0, 0.5);
        let d = sir_pdf(&gamma(1, ts), &gamma(1, ti)).unwrap();
        // P(S ≤ gI) = E[1 − e^{−gI/θ_s}] = g/(g + θ_s/θ_i).
        let q = ts / ti;
        for g in [0.0, 0.01, 0.25, 1.0, 7.0, 100.0] {
            assert_relative_eq!(d.pdf(g), q / (g + q).powi(2), max_relative = 1e-13);
            assert_relative_eq!(d.cdf_quadrature(g).unwrap(), g / (g + q), epsilon = 1e-9);
        }
        assert_relative_eq!(d.median().unwrap(), q, max_relative = 1e-8);
        assert_relative_eq!(d.mass(), 1.0, epsilon = 1e-9);
        assert_eq!(d.cdf_quadrature(0.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_unnormalized_inputs() {
        let half = ExpPolyMixture::from_terms(vec![crate::gamma::ExpPolyTerm::new(0.5, 0, 1.0).unwrap()]);
        assert!(sir_pdf(&half, &gamma(1, 1.0)).is_err());
    }

    #[test]
    fn rate_transform() {
        let d = sir_pdf(&gamma(2, 1.5), &gamma(3, 0.2)).unwrap();
        let rate = rate_pdf(&d);
        assert_eq!(rate.cdf_quadrature(0.0).unwrap(), 0.0);
        for tau in [0.1f64, 0.7, 2.0, 5.0] {
            let g = tau.exp2() - 1.0;
            assert_relative_eq!(rate.cdf_quadrature(tau).unwrap(), d.cdf_quadrature(g).unwrap(), epsilon = 1e-12);
        }
        let mg = d.median().unwrap();
        assert_relative_eq!(rate.median().unwrap(), (1.0 + mg).log2(), max_relative = 1e-8);
    }

    #[test]
    fn quantile_validation() {
        assert!(distribution_quantile(|_| Ok(0.5), 1.5).is_err());
        // A CDF that never reaches the level cannot be bracketed.
        assert!(distribution_quantile(|_| Ok(0.1), 0.5).is_err());
    }

    #[test]
    fn closed_form_distribution_matches_quadrature() {
        let fs =
            sum_pdf(&canonicalize(&[GammaTerm::new(2, 0.1).unwrap(), GammaTerm::new(2, 0.04).unwrap()], 1e-9).unwrap())
                .unwrap();
        let fi = sum_pdf(
            &canonicalize(
                &[GammaTerm::new(4, 0.02).unwrap(), GammaTerm::new(2, 0.007).unwrap(), GammaTerm::new(1, 0.3).unwrap()],
                1e-9,
            )
            .unwrap(),
        )
        .unwrap();
        let d = sir_pdf(&fs, &fi).unwrap();
        for g in [1e-3, 0.05, 0.3, 1.0, 4.0, 30.0, 1e3] {
            assert_relative_eq!(d.cdf(g), d.cdf_quadrature(g).unwrap(), epsilon = 1e-9);
        }
        assert_relative_eq!(d.cdf(f64::INFINITY), 1.0, epsilon = 1e-12);
        assert_eq!(d.cdf(0.0), 0.0);
    }

    #[test]
    fn binomial_tail_sums_to_one() {
        assert!((binomial_upper_tail(5, 0, 0.3, 0.7) - 1.0).abs() < 1e-15);
        // P(Bin(3, ½) ≥ 2) = ½.
        assert!((binomial_upper_tail(3, 2, 0.5, 0.5) - 0.5).abs() < 1e-15);
    }
}
