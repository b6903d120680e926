//! Exact density of a sum of independent Gamma variables with integer shapes.
//!
//! For a canonical set `{(k_l, θ_l)}` the density is
//!
//! ```text
//! f_Y(y) = Σ_l Λ_l / θ_l^{k_l} · h_{k_l-1,l}(y) · exp(-y/θ_l)
//! Λ_l    = (-1)^{k_l+1} / (k_l-1)! · Π_{i≠l} (1 - θ_i/θ_l)^{-k_i}
//! ```
//!
//! where `h_{δ,l}` is the complete Bell polynomial `B_δ(H_0, …, H_{δ-1})` in
//! the derivatives of the log-residue kernel at the pole:
//!
//! ```text
//! H_0(y) = -y + Σ_{i≠l} k_i (1/θ_i - 1/θ_l)^{-1}
//! H_m    = m! Σ_{i≠l} k_i (1/θ_i - 1/θ_l)^{-m-1},   m ≥ 1
//! ```
//!
//! `h_0 ≡ 1`, so every component is a polynomial of degree `k_l - 1` in `y`
//! times an exponential. All coefficients are computed in extended precision.

use crate::error::{invalid, Error, Result};
use crate::gamma::mixture::{ExpPolyMixture, ExpPolyTerm};
use crate::gamma::poly::Polynomial;
use crate::gamma::terms::{canonicalize, CanonicalTermSet, GammaTerm, DEFAULT_MERGE_TOL};
use crate::precision::{powi, to_f64, BigReal, Precision};

/// Default minimum relative gap between canonical scales.
pub const DEFAULT_MIN_RELATIVE_GAP: f64 = 1e-6;

/// Numerical controls for the finite-sum coefficients.
#[derive(Debug, Clone, Copy)]
pub struct SumOptions {
    pub precision: Precision,
    /// Adjacent scales closer than this (relative) are rejected as
    /// ill-conditioned.
    pub min_relative_gap: f64,
}

impl Default for SumOptions {
    fn default() -> Self {
        Self { precision: Precision::default(), min_relative_gap: DEFAULT_MIN_RELATIVE_GAP }
    }
}

/// `H_0` as a degree-one polynomial in `y` and the constants `H_1..H_max`.
#[derive(Debug, Clone)]
pub struct HDerivatives {
    pub h0: Polynomial,
    /// `higher[m-1] = H_m`.
    pub higher: Vec<BigReal>,
}

fn check_index(set: &CanonicalTermSet, l: usize) -> Result<()> {
    if l >= set.len() {
        return Err(invalid(format!("component index {l} out of range for {} terms", set.len())));
    }
    Ok(())
}

pub(crate) fn check_conditioning(set: &CanonicalTermSet, opts: &SumOptions) -> Result<()> {
    if let Some((i, j, gap)) = set.min_relative_gap() {
        if gap < opts.min_relative_gap {
            let t = set.terms();
            return Err(Error::IllConditioned {
                first_index: i,
                second_index: j,
                first: t[i].scale,
                second: t[j].scale,
                gap,
                guard: opts.min_relative_gap,
            });
        }
    }
    Ok(())
}

/// `1/θ_i - 1/θ_l` for every `i ≠ l`, with the shape `k_i`.
fn rate_gaps(set: &CanonicalTermSet, l: usize, p: Precision) -> Vec<(u32, BigReal)> {
    let terms = set.terms();
    let inv_l = p.one() / p.real(terms[l].scale);
    terms
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != l)
        .map(|(_, t)| (t.shape, p.one() / p.real(t.scale) - &inv_l))
        .collect()
}

/// Partial-fraction weight `Λ_l` (0-based `l`).
pub fn lambda_coefficient(set: &CanonicalTermSet, l: usize, opts: &SumOptions) -> Result<BigReal> {
    check_index(set, l)?;
    check_conditioning(set, opts)?;
    Ok(lambda_unchecked(set, l, opts.precision))
}

fn lambda_unchecked(set: &CanonicalTermSet, l: usize, p: Precision) -> BigReal {
    let terms = set.terms();
    let k_l = terms[l].shape;
    let theta_l = p.real(terms[l].scale);
    let mut acc = p.one() / p.factorial(k_l - 1);
    if k_l & 1 == 0 {
        acc = -acc;
    }
    for (i, t) in terms.iter().enumerate() {
        if i == l {
            continue;
        }
        let base = p.one() - p.real(t.scale) / &theta_l;
        acc *= powi(&base, -(t.shape as i32));
    }
    acc
}

/// `H_0(y)` and `H_1..H_max_order` for component `l`.
pub fn h_derivatives(set: &CanonicalTermSet, l: usize, max_order: u32, opts: &SumOptions) -> Result<HDerivatives> {
    check_index(set, l)?;
    let k_l = set.terms()[l].shape;
    if max_order > k_l - 1 {
        return Err(invalid(format!("derivative order {max_order} exceeds k_l - 1 = {}", k_l - 1)));
    }
    check_conditioning(set, opts)?;
    Ok(h_derivatives_unchecked(set, l, max_order, opts.precision))
}

fn h_derivatives_unchecked(set: &CanonicalTermSet, l: usize, max_order: u32, p: Precision) -> HDerivatives {
    let gaps = rate_gaps(set, l, p);
    let mut a0 = p.zero();
    for (k, gap) in &gaps {
        a0 += p.int(*k as i64) / gap;
    }
    let h0 = Polynomial::from_coeffs(vec![a0, -p.one()]);
    let higher = (1..=max_order)
        .map(|m| {
            let mut sum = p.zero();
            for (k, gap) in &gaps {
                sum += p.int(*k as i64) * powi(gap, -(m as i32 + 1));
            }
            sum * p.factorial(m)
        })
        .collect();
    HDerivatives { h0, higher }
}

/// Complete Bell polynomials `B_0..B_delta` over `x_1 = H_0(y)`,
/// `x_{j+1} = H_j`, via `B_{n+1} = Σ_i C(n,i) B_{n-i} x_{i+1}`.
fn bell_sequence(h: &HDerivatives, delta: u32, p: Precision) -> Vec<Polynomial> {
    let mut bell = vec![Polynomial::constant(p.one())];
    for n in 0..delta as usize {
        let mut next = Polynomial::zero();
        let mut binom = 1i64;
        for i in 0..=n {
            let x = if i == 0 { h.h0.clone() } else { Polynomial::constant(h.higher[i - 1].clone()) };
            let term = (&bell[n - i] * &x).scale(&p.int(binom));
            next = &next + &term;
            binom = binom * (n - i) as i64 / (i + 1) as i64;
        }
        bell.push(next);
    }
    bell
}

/// `h_{δ,l}` evaluated at the pole, as a polynomial of degree `δ` in `y`.
pub fn h_poly(set: &CanonicalTermSet, l: usize, delta: u32, opts: &SumOptions) -> Result<Polynomial> {
    check_index(set, l)?;
    let k_l = set.terms()[l].shape;
    if delta > k_l - 1 {
        return Err(invalid(format!("delta {delta} exceeds k_l - 1 = {}", k_l - 1)));
    }
    check_conditioning(set, opts)?;
    let h = h_derivatives_unchecked(set, l, delta.saturating_sub(1), opts.precision);
    Ok(bell_sequence(&h, delta, opts.precision).pop().expect("B_0 present"))
}

/// Component `l` of the density, `Λ_l / θ_l^{k_l} · h_{k_l-1,l}(y)`, as a
/// polynomial in `y` (the exponential factor is `exp(-y/θ_l)`).
pub(crate) fn component_polynomial(set: &CanonicalTermSet, l: usize, p: Precision) -> Polynomial {
    let t = set.terms()[l];
    let delta = t.shape - 1;
    let h = h_derivatives_unchecked(set, l, delta.saturating_sub(1), p);
    let bell = bell_sequence(&h, delta, p).pop().expect("B_0 present");
    let weight = lambda_unchecked(set, l, p) * powi(&p.real(t.scale), -(t.shape as i32));
    bell.scale(&weight)
}

/// Density of the sum as one mixture per canonical component, in the order
/// of the term set (descending scale).
pub fn sum_pdf_components(set: &CanonicalTermSet, opts: &SumOptions) -> Result<Vec<ExpPolyMixture>> {
    check_conditioning(set, opts)?;
    let p = opts.precision;
    set.terms()
        .iter()
        .enumerate()
        .map(|(l, t)| {
            let poly = component_polynomial(set, l, p);
            let rate = to_f64(&(p.one() / p.real(t.scale)));
            let terms = poly
                .coeffs()
                .iter()
                .enumerate()
                .map(|(b, a)| ExpPolyTerm::new(to_f64(a), b as u32, rate))
                .collect::<Result<Vec<_>>>()?;
            if terms.iter().any(|t| !t.amplitude.is_finite()) {
                return Err(Error::Numeric(format!("component {l} coefficients overflow f64")));
            }
            Ok(ExpPolyMixture::from_terms(terms))
        })
        .collect()
}

/// Density of the sum of the canonical terms with default options.
pub fn sum_pdf(set: &CanonicalTermSet) -> Result<ExpPolyMixture> {
    sum_pdf_with(set, &SumOptions::default())
}

pub fn sum_pdf_with(set: &CanonicalTermSet, opts: &SumOptions) -> Result<ExpPolyMixture> {
    let parts = sum_pdf_components(set, opts)?;
    Ok(ExpPolyMixture::concat(&parts))
}

/// Merge tolerances tried by [`sum_pdf_adaptive`], in order.
pub const MERGE_LADDER: [f64; 5] = [DEFAULT_MERGE_TOL, 1e-6, 1e-5, 1e-4, 5e-4];

/// Largest tolerated ratio of absolute to net mass before the `f64`
/// mixture is considered too cancellation-prone.
pub const MAX_CANCELLATION: f64 = 1e8;

/// Density of `Σ raw_terms` for machine-precision evaluation.
///
/// Scales that sit so close together that the coefficients cancel beyond
/// `f64` resolution are merged with progressively coarser tolerances from
/// [`MERGE_LADDER`]. Returns the mixture and the tolerance that was used.
pub fn sum_pdf_adaptive(raw_terms: &[GammaTerm]) -> Result<(ExpPolyMixture, f64)> {
    let mut last_err = None;
    for &tol in &MERGE_LADDER {
        let set = canonicalize(raw_terms, tol)?;
        match sum_pdf(&set) {
            Ok(mix) if mix.absolute_mass() <= MAX_CANCELLATION => return Ok((mix, tol)),
            Ok(mix) => {
                last_err = Some(Error::Numeric(format!(
                    "mixture cancels by a factor {:e} at merge tolerance {tol:e}",
                    mix.absolute_mass()
                )))
            }
            Err(e @ Error::IllConditioned { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("ladder is nonempty"))
}
