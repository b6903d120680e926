use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circular::{Circle, CircularScenario, FadingLaw, PathLossLaw};
use crate::deployment::station::{mean_rx_at_origin, BaseStation, Deployment};
use crate::error::{invalid, Result};

/// A deployment condensed onto circles, with the bookkeeping needed to
/// audit the mapping.
#[derive(Debug, Clone)]
pub struct Mapping {
    /// Interferer-only scenario (central power 0).
    pub scenario: CircularScenario,
    /// Index into the deployment of the station anchoring each circle.
    pub anchors: Vec<usize>,
    /// Node of each circle that coincides with its anchor.
    pub anchor_nodes: Vec<u32>,
    /// `[inner, outer)` radial range condensed onto each circle.
    pub regions: Vec<(f64, f64)>,
    /// `(circle, node)` per station, 1-based.
    pub assignment: Vec<(usize, u32)>,
    /// Circles requested but dropped because their region carried no power.
    pub dropped: usize,
}

/// Ranks stations by mean received power at the origin; ties go to the
/// closer, then to the smaller angle in `[0, 2π)`.
fn ranking(dep: &Deployment, law: &PathLossLaw) -> Result<Vec<usize>> {
    let power = dep.stations().iter().map(|s| mean_rx_at_origin(s, law)).collect::<Result<Vec<_>>>()?;
    let st = dep.stations();
    let mut order: Vec<usize> = (0..st.len()).collect();
    order.sort_by(|&a, &b| {
        power[b]
            .total_cmp(&power[a])
            .then(st[a].rho.total_cmp(&st[b].rho))
            .then(st[a].angle().total_cmp(&st[b].angle()))
            .then(a.cmp(&b))
    });
    Ok(order)
}

/// Node index `n ∈ 1..=N` whose angle `2πn/N + φ` is nearest to `psi`.
fn nearest_node(psi: f64, phase: f64, nodes: u32) -> u32 {
    let nn = nodes as f64;
    let k = ((psi - phase) * nn / (2.0 * PI)).round().rem_euclid(nn) as u32;
    if k == 0 {
        nodes
    } else {
        k
    }
}

/// Phase in `[−π/N, π/N]` placing a node at angle `psi`.
fn anchor_phase(psi: f64, nodes: u32) -> f64 {
    let nn = nodes as f64;
    let step = 2.0 * PI / nn;
    let phase = psi - (psi / step).round() * step;
    phase.clamp(-PI / nn, PI / nn)
}

/// Condenses `dep` onto `circles` circles of `nodes` nodes each.
///
/// Circle `c` is anchored at the `c`-th strongest station (by mean received
/// power at the origin) whose distance differs from all earlier anchors.
/// Circles are then ordered by radius; circle `c` collects the stations with
/// `R_c ≤ ρ < R_{c+1}` (the first from the region's inner radius, the last up
/// to the outer radius), each into the sector of its nearest node. Weights
/// are mean received powers at the origin, so the model and the deployment
/// agree there on average. Mapped circles use unit-mean fading with the
/// anchor's shape, as the fading mean is already folded into `P_c`.
pub fn map_deployment(dep: &Deployment, law: &PathLossLaw, circles: usize, nodes: u32) -> Result<Mapping> {
    law.validate()?;
    if circles == 0 || nodes == 0 {
        return Err(invalid("need at least one circle and one node per circle"));
    }
    if dep.is_empty() {
        return Err(invalid("cannot map an empty deployment"));
    }
    if circles > dep.len() {
        return Err(invalid(format!("{circles} circles requested for {} stations", dep.len())));
    }
    let st = dep.stations();
    let mut anchors: Vec<usize> = Vec::with_capacity(circles);
    for i in ranking(dep, law)? {
        if anchors.iter().all(|&a| st[a].rho != st[i].rho) {
            anchors.push(i);
            if anchors.len() == circles {
                break;
            }
        }
    }
    if anchors.len() < circles {
        return Err(invalid(format!(
            "{circles} circles requested but stations lie on only {} distinct radii",
            anchors.len()
        )));
    }
    anchors.sort_by(|&a, &b| st[a].rho.total_cmp(&st[b].rho));

    let radii: Vec<f64> = anchors.iter().map(|&a| st[a].rho).collect();
    let phases: Vec<f64> = anchors.iter().map(|&a| anchor_phase(st[a].psi, nodes)).collect();
    let region = dep.region();
    let bounds: Vec<(f64, f64)> = (0..circles)
        .map(|c| {
            let lo = if c == 0 { region.inner } else { radii[c] };
            let hi = if c + 1 == circles { region.outer } else { radii[c + 1] };
            (lo, hi)
        })
        .collect();

    let mut weights = vec![vec![0.0; nodes as usize]; circles];
    let mut assignment = Vec::with_capacity(st.len());
    for s in st {
        // Last circle whose radius is ≤ ρ; closer stations fall to circle 1.
        let c = radii.partition_point(|&r| r <= s.rho).saturating_sub(1);
        let n = nearest_node(s.psi, phases[c], nodes);
        weights[c][n as usize - 1] += mean_rx_at_origin(s, law)?;
        assignment.push((c, n));
    }

    let mut kept = Vec::new();
    let mut renumber = vec![0usize; circles];
    let mut out_circles = Vec::new();
    for c in 0..circles {
        let total: f64 = weights[c].iter().sum();
        if !(total > 0.0) {
            continue;
        }
        let anchor = &st[anchors[c]];
        out_circles.push(Circle {
            radius: radii[c],
            phase: phases[c],
            node_count: nodes,
            total_power: total / law.gain(radii[c]),
            profile: weights[c].iter().map(|w| w / total).collect(),
            fading: FadingLaw::unit_mean(anchor.fading.shape)?,
        });
        kept.push(c);
        renumber[c] = kept.len();
    }
    let dropped = circles - kept.len();
    let scenario = CircularScenario::new(0.0, FadingLaw::default(), *law, out_circles)?;
    Ok(Mapping {
        anchor_nodes: kept.iter().map(|&c| nearest_node(st[anchors[c]].psi, phases[c], nodes)).collect(),
        anchors: kept.iter().map(|&c| anchors[c]).collect(),
        regions: kept.iter().map(|&c| bounds[c]).collect(),
        assignment: assignment.into_iter().map(|(c, n)| (renumber[c], n)).collect(),
        scenario,
        dropped,
    })
}

/// Suggested model size for a PPP of intensity `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub circles: usize,
    pub nodes: u32,
    /// Mean distance of the `c`-th nearest station, `c = 1..=20`.
    pub mean_distances: Vec<f64>,
}

/// `N = ⌊1/λ⌋` and `C = argmin_c |ℓ(d_c)/ℓ(d_1) − 2λ|` over `c ≤ 20`, where
/// `d_c = R_in + Γ(c+½)/(Γ(c)·√(λπ))` is the mean distance of the `c`-th
/// nearest point of a planar PPP, shifted by the inner radius.
pub fn recommend_parameters(lambda: f64, law: &PathLossLaw, inner_radius: f64) -> Result<Recommendation> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid(format!("intensity must be finite and > 0, got {lambda}")));
    }
    let nodes = (1.0 / lambda + 1e-9).floor();
    if nodes < 1.0 {
        return Err(invalid(format!("intensity {lambda} > 1 leaves no nodes per circle")));
    }
    // Γ(c+½)/Γ(c) by recurrence from Γ(3/2)/Γ(1) = √π/2.
    let mut ratio = PI.sqrt() / 2.0;
    let mut mean_distances = Vec::with_capacity(20);
    for c in 1..=20 {
        mean_distances.push(inner_radius + ratio / (lambda * PI).sqrt());
        ratio *= (c as f64 + 0.5) / c as f64;
    }
    let g1 = law.gain(mean_distances[0]);
    let circles = mean_distances
        .iter()
        .map(|&d| (law.gain(d) / g1 - 2.0 * lambda).abs())
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
        .map(|(i, _)| i + 1)
        .expect("20 candidates");
    Ok(Recommendation { circles, nodes: nodes as u32, mean_distances })
}

/// Peak-to-average ratio `max(p)·N` of a power profile.
pub fn profile_papr(profile: &[f64]) -> Result<f64> {
    if profile.is_empty() {
        return Err(invalid("empty profile"));
    }
    let sum: f64 = profile.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("profile sums to {sum}, expected 1")));
    }
    Ok(profile.iter().copied().fold(0.0, f64::max) * profile.len() as f64)
}

/// CSV of every circle's profile: `circle,node,p,P_c,R_c,phi_c`.
pub fn profile_csv(scenario: &CircularScenario) -> String {
    let mut out = String::from("circle,node,p,P_c,R_c,phi_c\n");
    for (i, c) in scenario.circles.iter().enumerate() {
        for (n, p) in c.profile.iter().enumerate() {
            writeln!(out, "{},{},{:?},{:?},{:?},{:?}", i + 1, n + 1, p, c.total_power, c.radius, c.phase)
                .expect("writing to a String cannot fail");
        }
    }
    out
}

/// Stations placed exactly on the nodes of a scenario's circles, each with
/// its node's transmit power and the circle's fading. Silent nodes are
/// omitted.
pub fn stations_from_scenario(scenario: &CircularScenario) -> Vec<BaseStation> {
    scenario
        .circles
        .iter()
        .flat_map(|c| {
            (1..=c.node_count).filter(|&n| c.profile[n as usize - 1] > 0.0).map(move |n| BaseStation {
                rho: c.radius,
                psi: c.node_angle(n),
                tx_power: c.total_power * c.profile[n as usize - 1],
                fading: c.fading,
            })
        })
        .collect()
}
