use approx::assert_relative_eq;
use proptest::prelude::*;

use circint::gamma::{
    canonicalize, format_term_set, mc_sample_sum, parse_term_set, sum_pdf, sum_pdf_adaptive, sum_pdf_precise,
    GammaTerm, SumOptions, DEFAULT_MERGE_TOL,
};
use circint::link::{ks_critical_value, ks_distance, EmpiricalCdf};
use circint::Error;

fn g(k: u32, theta: f64) -> GammaTerm {
    GammaTerm::new(k, theta).unwrap()
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// Distinct-rate exponential sum: `Σ_i λ_i e^{−λ_i y} Π_{j≠i} λ_j/(λ_j − λ_i)`.
fn hypoexponential_pdf(rates: &[f64], y: f64) -> f64 {
    rates
        .iter()
        .enumerate()
        .map(|(i, &li)| {
            let w: f64 = rates.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &lj)| lj / (lj - li)).product();
            w * li * (-li * y).exp()
        })
        .sum()
}

fn gamma_pdf(k: u32, theta: f64, y: f64) -> f64 {
    ((k - 1) as f64 * y.ln() - y / theta - ln_factorial(k - 1) - k as f64 * theta.ln()).exp()
}

#[test]
fn hypoexponential_up_to_six_terms() {
    for l in 1..=6usize {
        let scales: Vec<f64> = (0..l).map(|i| 1.0 + 0.7 * i as f64).collect();
        let rates: Vec<f64> = scales.iter().map(|s| 1.0 / s).collect();
        let mix =
            sum_pdf(&canonicalize(&scales.iter().map(|&s| g(1, s)).collect::<Vec<_>>(), DEFAULT_MERGE_TOL).unwrap())
                .unwrap();
        let mean: f64 = scales.iter().sum();
        let grid: Vec<f64> = (1..=200).map(|i| mean * 6.0 * i as f64 / 200.0).collect();
        // Both forms cancel near the origin, so errors are measured against the peak.
        let peak = grid.iter().map(|&y| hypoexponential_pdf(&rates, y)).fold(0.0, f64::max);
        for &y in &grid {
            let want = hypoexponential_pdf(&rates, y);
            assert!((mix.pdf(y) - want).abs() <= 1e-10 * want.max(peak), "L={l}, y={y}");
        }
    }
}

#[test]
fn single_gamma_reduction() {
    for (k, theta) in [(1, 0.5), (2, 1.0), (5, 3.0), (12, 0.2)] {
        let mix = sum_pdf(&canonicalize(&[g(k, theta)], DEFAULT_MERGE_TOL).unwrap()).unwrap();
        for i in 1..=100 {
            let y = k as f64 * theta * 4.0 * i as f64 / 100.0;
            assert_relative_eq!(mix.pdf(y), gamma_pdf(k, theta, y), max_relative = 1e-10);
        }
    }
}

#[test]
fn identical_scales_merge_into_one_gamma() {
    let mix = sum_pdf_adaptive(&[g(2, 1.5), g(3, 1.5), g(1, 1.5)]).unwrap().0;
    for y in [0.1, 1.0, 5.0, 20.0] {
        assert_relative_eq!(mix.pdf(y), gamma_pdf(6, 1.5, y), max_relative = 1e-12);
    }
}

#[test]
fn nonnegative_and_normalized_on_dense_grid() {
    let terms = [g(2, 0.8), g(1, 3.0), g(3, 0.3), g(2, 1.7)];
    let mix = sum_pdf_adaptive(&terms).unwrap().0;
    assert_relative_eq!(mix.mass(), 1.0, epsilon = 1e-9);
    let hi = 20.0 * terms.iter().map(|t| t.mean()).sum::<f64>();
    let mut prev_cdf = 0.0;
    for i in 0..10_000 {
        let y = hi * i as f64 / 9_999.0;
        assert!(mix.pdf(y) >= -1e-12, "negative density at {y}");
        let c = mix.cdf(y);
        assert!(c >= prev_cdf - 1e-12);
        prev_cdf = c;
    }
    assert_relative_eq!(prev_cdf, 1.0, epsilon = 1e-9);
}

#[test]
fn moments_match_cumulants() {
    let terms = [g(2, 0.8), g(1, 3.0), g(3, 0.3)];
    let mix = sum_pdf_adaptive(&terms).unwrap().0;
    let mean: f64 = terms.iter().map(|t| t.shape as f64 * t.scale).sum();
    let var: f64 = terms.iter().map(|t| t.shape as f64 * t.scale * t.scale).sum();
    assert_relative_eq!(mix.moment(1), mean, max_relative = 1e-9);
    assert_relative_eq!(mix.moment(2) - mean * mean, var, max_relative = 1e-9);
}

#[test]
fn matches_monte_carlo() {
    let terms = [g(2, 1.0), g(2, 0.4), g(1, 2.5), g(4, 0.1)];
    let mix = sum_pdf_adaptive(&terms).unwrap().0;
    let n = 200_000;
    let emp = EmpiricalCdf::new(mc_sample_sum(&terms, n, 5).unwrap()).unwrap();
    assert!(ks_distance(|y| mix.cdf(y), &emp) < ks_critical_value(n, 0.01));
}

#[test]
fn precise_path_agrees_where_f64_is_reliable() {
    let terms = [g(2, 1.0), g(1, 0.5), g(3, 0.2)];
    let set = canonicalize(&terms, DEFAULT_MERGE_TOL).unwrap();
    let fast = sum_pdf(&set).unwrap();
    let precise = sum_pdf_precise(&set, &SumOptions::default()).unwrap();
    for y in [0.05, 0.5, 1.0, 3.0, 9.0] {
        assert!((fast.pdf(y) - precise.pdf(y)).abs() < 1e-12);
        assert_relative_eq!(fast.cdf(y), precise.cdf(y), max_relative = 1e-10);
    }
}

fn term_strategy() -> impl Strategy<Value = GammaTerm> {
    (1u32..=4, 0.05f64..5.0).prop_map(|(k, s)| g(k, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_sets_are_proper_distributions(terms in prop::collection::vec(term_strategy(), 1..=6)) {
        // Well separated scales only; near-coincident ones are covered by the adaptive ladder tests.
        let mut raw: Vec<GammaTerm> = Vec::new();
        for t in terms {
            if raw.iter().all(|r| (r.scale / t.scale).ln().abs() > 0.05) {
                raw.push(t);
            }
        }
        let mean: f64 = raw.iter().map(|t| t.mean()).sum();
        match sum_pdf_adaptive(&raw) {
            Ok((mix, _)) => {
                // Rounding the coefficients to f64 costs a few ulps of the absolute mass.
                let slack = 64.0 * f64::EPSILON * mix.absolute_mass() + 1e-12;
                prop_assert!((mix.mass() - 1.0).abs() < slack);
                prop_assert!((mix.mean() - mean).abs() < slack * 10.0 * mean);
                for i in 0..50 {
                    let y = mean * 4.0 * i as f64 / 49.0;
                    prop_assert!(mix.pdf(y) > -slack);
                }
            }
            Err(Error::Numeric(_)) => {
                // Too much cancellation for f64: the extended-precision path must hold up.
                let set = canonicalize(&raw, DEFAULT_MERGE_TOL).unwrap();
                let mix = sum_pdf_precise(&set, &SumOptions::default()).unwrap();
                prop_assert!((mix.mass() - 1.0).abs() < 1e-12);
                for i in 0..50 {
                    let y = mean * 4.0 * i as f64 / 49.0;
                    prop_assert!(mix.pdf(y) > -1e-20);
                }
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn term_set_text_round_trip(terms in prop::collection::vec(term_strategy(), 0..20)) {
        prop_assert_eq!(parse_term_set(&format_term_set(&terms)).unwrap(), terms.clone());
        let json = serde_json::to_string(&terms).unwrap();
        prop_assert_eq!(parse_term_set(&json).unwrap(), terms);
    }

    #[test]
    fn parser_never_panics(input in "\\PC{0,200}") {
        let _ = parse_term_set(&input);
    }
}
