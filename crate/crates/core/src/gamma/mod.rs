//! Sums of independent integer-shape Gamma variables.

mod finite_sum;
mod mixture;
mod poly;
mod precise;
mod sampling;
mod terms;

pub use finite_sum::{
    h_derivatives, h_poly, lambda_coefficient, sum_pdf, sum_pdf_adaptive, sum_pdf_components, sum_pdf_with,
    HDerivatives, SumOptions, DEFAULT_MIN_RELATIVE_GAP, MAX_CANCELLATION, MERGE_LADDER,
};
pub use mixture::{ExpPolyMixture, ExpPolyTerm};
pub use poly::Polynomial;
pub use precise::{sum_pdf_precise, PreciseMixture};
pub use sampling::{mc_sample_sum, unit_gamma};
pub use terms::{canonicalize, format_term_set, parse_term_set, CanonicalTermSet, GammaTerm, DEFAULT_MERGE_TOL};
