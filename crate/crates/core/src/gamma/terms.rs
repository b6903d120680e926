use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default relative tolerance under which two scales are treated as equal.
pub const DEFAULT_MERGE_TOL: f64 = 1e-9;

/// A Gamma variable `Γ[shape, scale]` with integer shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTerm {
    pub shape: u32,
    pub scale: f64,
}

impl GammaTerm {
    pub fn new(shape: u32, scale: f64) -> Result<Self> {
        let t = Self { shape, scale };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shape == 0 {
            return Err(invalid("gamma shape must be >= 1"));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(invalid(format!("gamma scale must be finite and > 0, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.shape as f64 * self.scale
    }
}

/// Gamma terms with pairwise distinct scales, sorted by descending scale.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalTermSet {
    terms: Vec<GammaTerm>,
}

impl CanonicalTermSet {
    pub fn terms(&self) -> &[GammaTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_shape(&self) -> u32 {
        self.terms.iter().map(|t| t.shape).sum()
    }

    pub fn mean(&self) -> f64 {
        self.terms.iter().map(GammaTerm::mean).sum()
    }

    pub fn max_scale(&self) -> f64 {
        self.terms[0].scale
    }

    pub fn max_shape(&self) -> u32 {
        self.terms.iter().map(|t| t.shape).max().unwrap_or(0)
    }

    /// Smallest relative gap between adjacent scales, with the indices of the
    /// pair. `None` for a single term.
    pub fn min_relative_gap(&self) -> Option<(usize, usize, f64)> {
        self.terms
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, i + 1, relative_gap(w[0].scale, w[1].scale)))
            .min_by(|a, b| a.2.total_cmp(&b.2))
    }
}

pub(crate) fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Merges scales that agree within `merge_tol` (relative) by the summation
/// property, summing their shapes. The merged scale is the shape-weighted
/// mean of the group.
pub fn canonicalize(raw_terms: &[GammaTerm], merge_tol: f64) -> Result<CanonicalTermSet> {
    if raw_terms.is_empty() {
        return Err(invalid("cannot canonicalize an empty term list"));
    }
    if !(merge_tol > 0.0 && merge_tol < 1e-3) {
        return Err(invalid(format!("merge tolerance must lie in (0, 1e-3), got {merge_tol}")));
    }
    for t in raw_terms {
        t.validate()?;
    }
    let mut sorted = raw_terms.to_vec();
    sorted.sort_by(|a, b| b.scale.total_cmp(&a.scale));

    let mut merged: Vec<GammaTerm> = Vec::with_capacity(sorted.len());
    // Group anchor scale, so chains of tiny steps cannot drift arbitrarily.
    let mut anchor = f64::NAN;
    let mut weighted = 0.0;
    for t in sorted {
        match merged.last_mut() {
            Some(last) if relative_gap(anchor, t.scale) <= merge_tol => {
                last.shape = last.shape.checked_add(t.shape).ok_or_else(|| invalid("merged shape overflows u32"))?;
                weighted += t.shape as f64 * t.scale;
                last.scale = weighted / last.shape as f64;
            }
            _ => {
                anchor = t.scale;
                weighted = t.shape as f64 * t.scale;
                merged.push(t);
            }
        }
    }
    Ok(CanonicalTermSet { terms: merged })
}

/// Parses a term-set record. Two layouts are accepted:
///
/// * JSON: an array of `{"shape": k, "scale": θ}` objects;
/// * plain text: one `k θ` pair per line, `#` starts a comment.
pub fn parse_term_set(input: &str) -> Result<Vec<GammaTerm>> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('[') {
        let terms: Vec<GammaTerm> = serde_json::from_str(trimmed)?;
        for t in &terms {
            t.validate()?;
        }
        return Ok(terms);
    }
    let mut terms = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: idx + 1, message };
        let mut fields = line.split_whitespace();
        let (Some(k), Some(theta), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected `shape scale`, got `{line}`")));
        };
        let shape: u32 = k.parse().map_err(|e| parse_err(format!("bad shape `{k}`: {e}")))?;
        let scale: f64 = theta.parse().map_err(|e| parse_err(format!("bad scale `{theta}`: {e}")))?;
        let term = GammaTerm::new(shape, scale).map_err(|e| parse_err(e.to_string()))?;
        terms.push(term);
    }
    Ok(terms)
}

/// Plain-text term-set record; round-trips bit-exactly through
/// [`parse_term_set`].
pub fn format_term_set(terms: &[GammaTerm]) -> String {
    let mut out = String::from("# shape scale\n");
    for t in terms {
        out.push_str(&format!("{} {:?}\n", t.shape, t.scale));
    }
    out
}
