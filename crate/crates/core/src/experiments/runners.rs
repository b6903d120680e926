use rayon::prelude::*;

use crate::circular::{aggregate_terms, raw_terms, CircularScenario, NodeRef};
use crate::deployment::{map_deployment, mc_interference_original, profile_papr, sample_tiers, Deployment};
use crate::error::{invalid, Error, Result};
use crate::experiments::config::ExperimentConfig;
use crate::experiments::table::{mean_ci, median, params, ResultTable};
use crate::gamma::{
    canonicalize, mc_sample_sum, sum_pdf_adaptive, sum_pdf_components, sum_pdf_precise, ExpPolyMixture, SumOptions,
    DEFAULT_MERGE_TOL,
};
use crate::link::{
    collaboration_sets, curve_csv, ks_distance, ks_distance_monotone, mc_sir_samples, rate_pdf, scenario_hash, sir_pdf,
    CollaborationScheme, CurveMeta, EmpiricalCdf, SirDensity,
};
use crate::quadrature::{integrate_to_infinity, QuadOptions};
use crate::rng::derive_seed;

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// KS distance between the mapped model's analytic interference law and the
/// Monte Carlo interference of the original deployment.
pub fn mapped_ks(
    dep: &Deployment,
    config: &ExperimentConfig,
    circles: usize,
    nodes: u32,
    r: f64,
    original: &EmpiricalCdf,
) -> Result<f64> {
    let mapping = map_deployment(dep, &config.path_loss, circles, nodes)?;
    let s = &mapping.scenario;
    let terms = raw_terms(s, &s.interferers(), r)?;
    match sum_pdf_adaptive(&terms) {
        Ok((mix, _)) => Ok(ks_distance(|x| mix.cdf(x), original)),
        Err(Error::Numeric(_) | Error::IllConditioned { .. }) => {
            // Too much cancellation for f64; evaluate in extended precision.
            let set = canonicalize(&terms, DEFAULT_MERGE_TOL)?;
            let mix = sum_pdf_precise(&set, &SumOptions::default())?;
            Ok(ks_distance_monotone(|x| mix.cdf(x), original, PRECISE_KS_BLOCK))
        }
        Err(e) => Err(e),
    }
}

const PRECISE_KS_BLOCK: usize = 32;

/// Mean KS distance (with 95% confidence half-width) over PPP snapshots for
/// every circle count, node count and user eccentricity in the config.
/// Snapshots where the mapping is infeasible are skipped and counted.
pub fn run_ks_sweep(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let ppp = &config.ppp;
    let tiers = ppp.tiers(ppp.expected_interferers)?;
    let combos: Vec<(usize, u32)> = ppp.circles.iter().flat_map(|&c| ppp.nodes.iter().map(move |&n| (c, n))).collect();

    // [snapshot][r][combo]
    let per_snapshot = (0..config.snapshots)
        .into_par_iter()
        .map(|s| -> Result<Vec<Vec<Option<f64>>>> {
            let snap_seed = derive_seed(config.seed, s as u64);
            let dep = sample_tiers(&tiers, snap_seed)?;
            config
                .r_grid
                .iter()
                .enumerate()
                .map(|(ri, &r)| {
                    let original = mc_interference_original(
                        &dep,
                        &config.path_loss,
                        r,
                        ppp.fading_draws,
                        derive_seed(!snap_seed, ri as u64),
                    )?;
                    Ok(combos
                        .iter()
                        .map(|&(c, n)| match mapped_ks(&dep, config, c, n, r, &original) {
                            Ok(d) => Some(d),
                            Err(e) => {
                                log::debug!("snapshot {s}, C={c}, N={n}, r={r}: skipped ({e})");
                                None
                            }
                        })
                        .collect())
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::new(&config.id, config.seed);
    table.meta.snapshots = Some((0, config.snapshots));
    table.meta.samples = Some(ppp.fading_draws);
    table.meta.notes.push(format!("expected_interferers={:?}", ppp.expected_interferers));
    for (ci, &(c, n)) in combos.iter().enumerate() {
        for (ri, &r) in config.r_grid.iter().enumerate() {
            let values: Vec<f64> = per_snapshot.iter().filter_map(|snap| snap[ri][ci]).collect();
            let p = params(&[
                ("lambda", format!("{:?}", ppp.intensity)),
                ("C", c.to_string()),
                ("N", n.to_string()),
                ("r", format!("{r:?}")),
            ]);
            let (mean, hw) = mean_ci(&values);
            table.push(p.clone(), "ks_mean", mean, hw);
            table.push(p, "skipped", (config.snapshots - values.len()) as f64, None);
        }
    }
    Ok(table)
}

/// Peak-to-average ratio of the mapped profile over snapshots. The profile
/// of the outermost circle is used; with a single circle that is the whole
/// deployment.
pub fn run_papr(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let study = &config.papr;
    let mut table = ResultTable::new(&config.id, config.seed);
    table.meta.snapshots = Some((0, config.snapshots));
    for (k, &expected) in study.expected_interferers.iter().enumerate() {
        let tiers = config.ppp.tiers(expected)?;
        let base = derive_seed(config.seed, k as u64 + 1);
        let values = (0..config.snapshots)
            .into_par_iter()
            .map(|s| -> Result<Option<f64>> {
                let dep = sample_tiers(&tiers, derive_seed(base, s as u64))?;
                match map_deployment(&dep, &config.path_loss, study.circles, study.nodes) {
                    Ok(m) => {
                        let last = m.scenario.circles.last().expect("mapping keeps at least one circle");
                        Ok(Some(profile_papr(&last.profile)?))
                    }
                    Err(_) => Ok(None),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let ni = format!("{expected:?}");
        for (s, v) in values.iter().enumerate() {
            if let Some(v) = v {
                table.push(params(&[("N_I", ni.clone()), ("snapshot", s.to_string())]), "papr", *v, None);
            }
        }
        let ok: Vec<f64> = values.iter().flatten().copied().collect();
        let p = params(&[("N_I", ni.clone()), ("C", study.circles.to_string()), ("N", study.nodes.to_string())]);
        let (mean, hw) = mean_ci(&ok);
        table.push(p.clone(), "papr_median", median(&ok), None);
        table.push(p.clone(), "papr_mean", mean, hw);
        table.push(p.clone(), "papr_min", ok.iter().copied().fold(f64::INFINITY, f64::min), None);
        table.push(p.clone(), "papr_max", ok.iter().copied().fold(f64::NEG_INFINITY, f64::max), None);
        table.push(p, "skipped", (values.len() - ok.len()) as f64, None);
    }
    Ok(table)
}

/// SIR density for one scheme at one position of the collaboration study.
pub fn collaboration_sir(config: &ExperimentConfig, scheme: CollaborationScheme, r: f64) -> Result<SirDensity> {
    crate::link::scheme_sir(&config.collaboration.scenario, scheme, config.collaboration.collaborators, r)
}

/// Median SIR and rate per scheme and position, with coordination and
/// cooperation gains relative to no collaboration.
pub fn run_collaboration(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let study = &config.collaboration;
    let mut table = ResultTable::new(&config.id, config.seed);
    if study.mc_overlay {
        table.meta.samples = Some(config.samples);
    }
    let mut none_medians = Vec::new();
    for (ri, &r) in study.positions.iter().enumerate() {
        let mut sir_med = [0.0; 3];
        let mut rate_med = [0.0; 3];
        for (si, scheme) in CollaborationScheme::ALL.into_iter().enumerate() {
            let sir = collaboration_sir(config, scheme, r)?;
            sir_med[si] = sir.median()?;
            rate_med[si] = rate_pdf(&sir).median()?;
            let p = params(&[("scheme", scheme.to_string()), ("r", format!("{r:?}"))]);
            table.push(p.clone(), "median_sir", sir_med[si], None);
            table.push(p.clone(), "median_sir_db", db(sir_med[si]), None);
            table.push(p.clone(), "median_rate", rate_med[si], None);
            if study.mc_overlay {
                let (signal, interference) = collaboration_sets(&study.scenario, scheme, study.collaborators, r)?;
                let seed = derive_seed(config.seed, (ri * 3 + si) as u64);
                let samples = mc_sir_samples(&study.scenario, &signal, &interference, r, config.samples, seed)?;
                let emp = EmpiricalCdf::new(samples)?;
                table.push(p, "mc_ks", ks_distance(|g| sir.cdf(g), &emp), None);
            }
        }
        let p = params(&[("r", format!("{r:?}"))]);
        table.push(p.clone(), "coordination_gain_db", db(sir_med[1] / sir_med[0]), None);
        table.push(p.clone(), "cooperation_gain_db", db(sir_med[2] / sir_med[0]), None);
        table.push(p.clone(), "coordination_rate_gain_pct", 100.0 * (rate_med[1] / rate_med[0] - 1.0), None);
        table.push(p, "cooperation_rate_gain_pct", 100.0 * (rate_med[2] / rate_med[0] - 1.0), None);
        none_medians.push((r, sir_med[0]));
    }
    if let (Some(&(ra, a)), Some(&(rb, b))) = (none_medians.first(), none_medians.last()) {
        if none_medians.len() > 1 {
            let p = params(&[("r_a", format!("{ra:?}")), ("r_b", format!("{rb:?}"))]);
            table.push(p, "no_collaboration_gap_db", db(a / b), None);
        }
    }
    Ok(table)
}

/// Log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points.max(2) - 1) as f64).exp()).collect()
}

/// SIR and rate CDF curves, one CSV document per scheme and position,
/// keyed by a file-name stem.
pub fn collaboration_curves(config: &ExperimentConfig) -> Result<Vec<(String, String)>> {
    let study = &config.collaboration;
    let hash = scenario_hash(&study.scenario)?;
    let mut out = Vec::new();
    for &r in &study.positions {
        for scheme in CollaborationScheme::ALL {
            let sir = collaboration_sir(config, scheme, r)?;
            let meta = |abscissa: &str| CurveMeta {
                scenario_hash: hash.clone(),
                scheme: scheme.to_string(),
                r,
                seed: None,
                abscissa: abscissa.into(),
                ordinate: "cdf".into(),
            };
            let sir_pts: Vec<(f64, f64)> =
                log_grid(1e-3, 1e3, study.curve_points).into_iter().map(|g| (g, sir.cdf(g))).collect();
            let rate = rate_pdf(&sir);
            let rate_pts: Vec<(f64, f64)> = (0..study.curve_points)
                .map(|i| {
                    let tau = 12.0 * i as f64 / (study.curve_points.max(2) - 1) as f64;
                    (tau, rate.cdf(tau))
                })
                .collect();
            out.push((format!("sir_{scheme}_r{r}"), curve_csv(&meta("sir"), &sir_pts)));
            out.push((format!("rate_{scheme}_r{r}"), curve_csv(&meta("rate"), &rate_pts)));
        }
    }
    Ok(out)
}

/// The study scenario reduced to its first circle.
pub fn single_circle(scenario: &CircularScenario) -> Result<CircularScenario> {
    let first = scenario.circle(1)?.clone();
    CircularScenario::new(scenario.central_power, scenario.central_fading, scenario.path_loss, vec![first])
}

/// Density of the first-circle interference at `r` split per unique scale,
/// strongest first. Partial sums of the result are the truncated densities.
pub fn interference_components(scenario: &CircularScenario, r: f64) -> Result<Vec<ExpPolyMixture>> {
    let one = single_circle(scenario)?;
    let set = aggregate_terms(&one, &one.interferers(), r)?;
    sum_pdf_components(&set, &SumOptions::default())
}

/// Truncated density keeping the first `keep` components.
pub fn truncated(components: &[ExpPolyMixture], keep: usize) -> ExpPolyMixture {
    ExpPolyMixture::concat(&components[..keep.min(components.len())])
}

/// `∫_0^∞ |full − truncated(keep)| dy`.
pub fn truncation_l1(components: &[ExpPolyMixture], keep: usize) -> Result<f64> {
    if keep >= components.len() {
        return Ok(0.0);
    }
    let rest = ExpPolyMixture::concat(&components[keep..]);
    let opts = QuadOptions { abs_tol: 1e-10, rel_tol: 1e-9, max_intervals: 4000 };
    integrate_to_infinity(|y| rest.pdf(y).abs(), 0.0, &opts)
}

/// Single-circle interference decomposition: L¹ distance of every
/// truncation to the full density, plus the Monte Carlo KS distance of the
/// full density.
pub fn run_single_circle_decomposition(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let study = &config.collaboration;
    let one = single_circle(&study.scenario)?;
    let nodes: Vec<NodeRef> = one.interferers();
    let mut table = ResultTable::new(&config.id, config.seed);
    table.meta.samples = Some(config.samples);
    for (ri, &r) in study.positions.iter().enumerate() {
        let comps = interference_components(&study.scenario, r)?;
        for keep in 1..=comps.len() {
            let p = params(&[("r", format!("{r:?}")), ("L", keep.to_string())]);
            table.push(p, "l1_to_full", truncation_l1(&comps, keep)?, None);
        }
        let full = truncated(&comps, comps.len());
        let raw = raw_terms(&one, &nodes, r)?;
        let samples = mc_sample_sum(&raw, config.samples, derive_seed(config.seed, ri as u64))?;
        let emp = EmpiricalCdf::new(samples)?;
        let p = params(&[("r", format!("{r:?}"))]);
        table.push(p.clone(), "components", comps.len() as f64, None);
        table.push(p, "mc_ks", ks_distance(|x| full.cdf(x), &emp), None);
    }
    Ok(table)
}

/// Full and truncated interference densities on a uniform grid, one CSV per
/// position with columns `y, full, L1, L2, …`.
pub fn decomposition_curves(config: &ExperimentConfig, points: usize) -> Result<Vec<(String, String)>> {
    let study = &config.collaboration;
    let mut out = Vec::new();
    for &r in &study.positions {
        let comps = interference_components(&study.scenario, r)?;
        if comps.is_empty() {
            return Err(invalid("no interference components"));
        }
        let full = truncated(&comps, comps.len());
        let y_max = 12.0 * full.mean();
        let mut csv = format!("# r={r:?}\ny,full");
        for k in 1..=comps.len() {
            csv.push_str(&format!(",L{k}"));
        }
        csv.push('\n');
        let partials: Vec<ExpPolyMixture> = (1..=comps.len()).map(|k| truncated(&comps, k)).collect();
        for i in 0..points {
            let y = y_max * i as f64 / (points.max(2) - 1) as f64;
            csv.push_str(&format!("{y:?},{:?}", full.pdf(y)));
            for p in &partials {
                csv.push_str(&format!(",{:?}", p.pdf(y)));
            }
            csv.push('\n');
        }
        out.push((format!("decomposition_r{r}"), csv));
    }
    Ok(out)
}

/// SIR density of arbitrary signal/interference sets, for callers outside
/// the three schemes.
pub fn sets_sir(
    scenario: &CircularScenario,
    signal: &[NodeRef],
    interference: &[NodeRef],
    r: f64,
) -> Result<SirDensity> {
    let (fs, fi) = crate::link::link_densities(scenario, signal, interference, r)?;
    sir_pdf(&fs, &fi)
}
