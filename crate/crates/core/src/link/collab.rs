use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circular::{CircularScenario, NodeRef};
use crate::error::{invalid, Result};

/// How the central base station works with its strongest neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollaborationScheme {
    /// Every circle node interferes.
    NoCollaboration,
    /// The collaborators stay silent on the user's resources.
    InterferenceCoordination,
    /// The collaborators transmit to the user, combined incoherently.
    TransmitterCooperation,
}

impl CollaborationScheme {
    pub const ALL: [CollaborationScheme; 3] = [
        CollaborationScheme::NoCollaboration,
        CollaborationScheme::InterferenceCoordination,
        CollaborationScheme::TransmitterCooperation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::NoCollaboration => "no-collaboration",
            Self::InterferenceCoordination => "coordination",
            Self::TransmitterCooperation => "cooperation",
        }
    }
}

impl fmt::Display for CollaborationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CollaborationScheme {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| invalid(format!("unknown collaboration scheme {s:?}")))
    }
}

/// The `m` nodes of circle 1 closest to the user at `(r, 0)`; ties go to
/// the smaller node index.
pub fn collaborators(scenario: &CircularScenario, m: usize, r: f64) -> Result<Vec<NodeRef>> {
    let first = scenario.circle(1)?;
    if m >= first.node_count as usize {
        return Err(invalid(format!("{m} collaborators requested but circle 1 has only {} nodes", first.node_count)));
    }
    let mut by_distance = (1..=first.node_count)
        .map(|n| {
            let node = NodeRef::new(1, n);
            scenario.distance(node, r).map(|d| (d, node))
        })
        .collect::<Result<Vec<_>>>()?;
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(by_distance.into_iter().take(m).map(|(_, n)| n).collect())
}

/// Useful-signal and interference node sets for a scheme with `m`
/// collaborators.
pub fn collaboration_sets(
    scenario: &CircularScenario,
    scheme: CollaborationScheme,
    m: usize,
    r: f64,
) -> Result<(Vec<NodeRef>, Vec<NodeRef>)> {
    let chosen = collaborators(scenario, m, r)?;
    let mut signal = vec![NodeRef::CENTRAL];
    let interference: Vec<NodeRef> = match scheme {
        CollaborationScheme::NoCollaboration => scenario.interferers(),
        _ => scenario.interferers().into_iter().filter(|n| !chosen.contains(n)).collect(),
    };
    if scheme == CollaborationScheme::TransmitterCooperation {
        signal.extend(&chosen);
    }
    Ok((signal, interference))
}
