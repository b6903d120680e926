use std::f64::consts::PI;

use proptest::prelude::*;

use circint::circular::{raw_terms, FadingLaw, PathLossLaw};
use circint::deployment::{
    hex_grid, map_deployment, mc_interference_original, mean_rx_at_origin, profile_papr, sample_ppp, sample_tiers,
    stations_from_scenario, Annulus, BaseStation, Deployment, PppTierConfig,
};
use circint::gamma::sum_pdf_adaptive;
use circint::link::{ks_critical_value, ks_distance};

fn tier(expected: f64) -> PppTierConfig {
    PppTierConfig {
        intensity: 0.1,
        annulus: Annulus::for_expected_count(2.0, expected, 0.1).unwrap(),
        tx_power: 1.0,
        fading: FadingLaw::default(),
    }
}

fn mapped_power_at_origin(dep: &Deployment, law: &PathLossLaw, circles: usize, nodes: u32) -> (f64, f64) {
    let m = map_deployment(dep, law, circles, nodes).unwrap();
    let original: f64 = dep.stations().iter().map(|s| mean_rx_at_origin(s, law).unwrap()).sum();
    let s = &m.scenario;
    let mapped: f64 = raw_terms(s, &s.interferers(), 0.0).unwrap().iter().map(|t| t.mean()).sum();
    (original, mapped)
}

#[test]
fn mean_power_at_origin_is_conserved() {
    let law = PathLossLaw::default();
    for seed in 0..10 {
        let dep = sample_ppp(&tier(300.0), seed).unwrap();
        for (c, n) in [(1, 10), (3, 20), (5, 20)] {
            let (orig, mapped) = mapped_power_at_origin(&dep, &law, c, n);
            assert!((orig - mapped).abs() <= 1e-9 * orig, "seed {seed}, C={c}, N={n}: {orig} vs {mapped}");
        }
    }
}

#[test]
fn mapped_model_of_a_mapped_model_is_itself() {
    let law = PathLossLaw::default();
    let dep = sample_ppp(&tier(300.0), 4).unwrap();
    let first = map_deployment(&dep, &law, 3, 12).unwrap().scenario;
    let stations = stations_from_scenario(&first);
    let again = map_deployment(&Deployment::new(stations, dep.region()).unwrap(), &law, 3, 12).unwrap().scenario;
    for (a, b) in first.circles.iter().zip(&again.circles) {
        assert!((a.radius - b.radius).abs() < 1e-12);
        assert!((a.phase - b.phase).abs() < 1e-12);
        for (p, q) in a.profile.iter().zip(&b.profile) {
            assert!((p - q).abs() < 1e-12);
        }
    }
}

#[test]
fn hexagonal_grid_is_reproduced_exactly() {
    // With N = 12 the first ring's six stations sit on every other node.
    let law = PathLossLaw::default();
    let dep = hex_grid(1, 3.0, 1.0, FadingLaw::default()).unwrap();
    let m = map_deployment(&dep, &law, 1, 12).unwrap();
    let profile = &m.scenario.circles[0].profile;
    assert_eq!(profile.iter().filter(|&&p| p > 0.0).count(), 6);
    assert!((profile_papr(profile).unwrap() - 2.0).abs() < 1e-12);
    let n = 100_000;
    let orig = mc_interference_original(&dep, &law, 1.0, n, 8).unwrap();
    let s = &m.scenario;
    let (mix, _) = sum_pdf_adaptive(&raw_terms(s, &s.interferers(), 1.0).unwrap()).unwrap();
    assert!(ks_distance(|x| mix.cdf(x), &orig) < ks_critical_value(n, 0.01));
}

#[test]
fn ppp_is_reproducible_and_thread_independent() {
    let tiers = [tier(500.0), PppTierConfig { intensity: 1.0, tx_power: 0.01, ..tier(500.0) }];
    let a = sample_tiers(&tiers, 21).unwrap().to_text().unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
    let b = pool.install(|| sample_tiers(&tiers, 21).unwrap().to_text().unwrap());
    assert_eq!(a, b);
    assert_ne!(a, sample_tiers(&tiers, 22).unwrap().to_text().unwrap());
    let dep = Deployment::from_text(&a).unwrap();
    let orig = mc_interference_original(&dep, &PathLossLaw::default(), 0.5, 10_000, 3).unwrap();
    let again = pool.install(|| mc_interference_original(&dep, &PathLossLaw::default(), 0.5, 10_000, 3).unwrap());
    assert_eq!(orig.samples(), again.samples());
}

#[test]
fn deployment_text_rejects_garbage() {
    assert!(Deployment::from_text("").is_err());
    assert!(Deployment::from_text("{\"region\":{\"inner\":2.0,\"outer\":5.0}}\n3.0 0.1 1.0 2\n").is_err());
    let err =
        Deployment::from_text("{\"region\":{\"inner\":2.0,\"outer\":5.0}}\n3.0 0.1 1.0 2 1.0\n9.0 0.1 1.0 2 1.0\n")
            .unwrap_err()
            .to_string();
    assert!(err.contains("outside"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn deployment_text_round_trip(
        stations in prop::collection::vec((2.0f64..50.0, -PI..PI, 0.01f64..10.0, 1u32..4, 0.1f64..3.0), 0..40),
    ) {
        let stations: Vec<BaseStation> = stations
            .into_iter()
            .map(|(rho, psi, p, k, theta)| BaseStation::new(rho, psi, p, FadingLaw::new(k, theta).unwrap()).unwrap())
            .collect();
        let dep = Deployment::new(stations, Annulus::new(2.0, 50.0).unwrap()).unwrap();
        let back = Deployment::from_text(&dep.to_text().unwrap()).unwrap();
        prop_assert_eq!(back.stations(), dep.stations());
        prop_assert_eq!(back.region(), dep.region());
    }

    #[test]
    fn mapping_conserves_power_for_any_seed(seed in any::<u64>(), circles in 1usize..5, nodes in 4u32..24) {
        let dep = sample_ppp(&tier(150.0), seed).unwrap();
        prop_assume!(dep.len() >= 8);
        let (orig, mapped) = mapped_power_at_origin(&dep, &PathLossLaw::default(), circles, nodes);
        prop_assert!((orig - mapped).abs() <= 1e-9 * orig);
    }

    #[test]
    fn deployment_parser_never_panics(input in "\\PC{0,300}") {
        let _ = Deployment::from_text(&input);
    }
}
