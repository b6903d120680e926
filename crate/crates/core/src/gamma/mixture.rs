use std::ops::Range;

use crate::error::{invalid, Result};

/// One summand `a · y^b · exp(-c·y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPolyTerm {
    pub amplitude: f64,
    pub degree: u32,
    pub rate: f64,
}

impl ExpPolyTerm {
    pub fn new(amplitude: f64, degree: u32, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(invalid(format!("rate must be finite and > 0, got {rate}")));
        }
        Ok(Self { amplitude, degree, rate })
    }

    /// `∫_0^∞ a y^b e^{-cy} dy = a b! / c^{b+1}`, formed in log space.
    fn mass(&self) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let log = self.amplitude.abs().ln() + ln_factorial(self.degree) - (self.degree as f64 + 1.0) * self.rate.ln();
        self.amplitude.signum() * log.exp()
    }
}

pub(crate) fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Finite sum of `a · y^b · exp(-c·y)` terms on `y ≥ 0`.
///
/// Terms sharing a rate are kept contiguous so densities and distribution
/// functions evaluate one exponential per rate.
#[derive(Debug, Clone, Default)]
pub struct ExpPolyMixture {
    terms: Vec<ExpPolyTerm>,
    masses: Vec<f64>,
    runs: Vec<Range<usize>>,
}

impl ExpPolyMixture {
    pub fn from_terms(mut terms: Vec<ExpPolyTerm>) -> Self {
        // Stable, so components emitted together stay together.
        terms.sort_by(|a, b| b.rate.total_cmp(&a.rate).reverse().then(a.degree.cmp(&b.degree)));
        let masses = terms.iter().map(ExpPolyTerm::mass).collect();
        let mut runs = Vec::new();
        let mut start = 0;
        for i in 1..=terms.len() {
            if i == terms.len() || terms[i].rate != terms[start].rate {
                if i > start {
                    runs.push(start..i);
                }
                start = i;
            }
        }
        Self { terms, masses, runs }
    }

    pub fn concat(parts: &[ExpPolyMixture]) -> Self {
        Self::from_terms(parts.iter().flat_map(|m| m.terms.iter().copied()).collect())
    }

    pub fn terms(&self) -> &[ExpPolyTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Density at `y`; zero for negative `y`.
    pub fn pdf(&self, y: f64) -> f64 {
        if y < 0.0 || y.is_nan() {
            return 0.0;
        }
        self.runs
            .iter()
            .map(|run| {
                let rate = self.terms[run.start].rate;
                let poly: f64 = self.terms[run.clone()].iter().map(|t| t.amplitude * y.powi(t.degree as i32)).sum();
                if poly == 0.0 {
                    0.0
                } else {
                    poly * (-rate * y).exp()
                }
            })
            .sum()
    }

    /// `∫_0^y` of the mixture, without clamping. Each term integrates in
    /// closed form through the regularized lower incomplete gamma function
    /// of integer order.
    pub fn integral(&self, y: f64) -> f64 {
        if y <= 0.0 || y.is_nan() {
            return 0.0;
        }
        let mut total = 0.0;
        let mut reg = Vec::new();
        for run in &self.runs {
            let rate = self.terms[run.start].rate;
            let max_deg = self.terms[run.clone()].iter().map(|t| t.degree).max().unwrap_or(0);
            lower_regularized_all(max_deg + 1, rate * y, &mut reg);
            for i in run.clone() {
                total += self.masses[i] * reg[self.terms[i].degree as usize];
            }
        }
        total
    }

    /// Distribution function, clamped to `[0, 1]`.
    pub fn cdf(&self, y: f64) -> f64 {
        if y == f64::INFINITY {
            return self.mass().clamp(0.0, 1.0);
        }
        self.integral(y).clamp(0.0, 1.0)
    }

    /// Total mass `∫_0^∞`.
    pub fn mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `Σ |mass of term|`. Far above the net mass, the mixture relies on
    /// cancellation and `f64` evaluation loses roughly `log10` of the ratio
    /// in significant digits.
    pub fn absolute_mass(&self) -> f64 {
        self.masses.iter().map(|m| m.abs()).sum()
    }

    /// Raw moment `∫ y^n f(y) dy`.
    pub fn moment(&self, n: u32) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                if t.amplitude == 0.0 {
                    return 0.0;
                }
                let log = t.amplitude.abs().ln() + ln_factorial(t.degree + n)
                    - (t.degree as f64 + n as f64 + 1.0) * t.rate.ln();
                t.amplitude.signum() * log.exp()
            })
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }
}

/// Fills `out[b] = P(b+1, z)` for `b = 0..order`, where
/// `P(s, z) = 1 - e^{-z} Σ_{j<s} z^j/j!` is the regularized lower incomplete
/// gamma function of integer order `s`.
///
/// For `z` below the order the tail form `e^{-z} Σ_{j≥s} z^j/j!` is used, which
/// avoids cancellation near the origin.
fn lower_regularized_all(order: u32, z: f64, out: &mut Vec<f64>) {
    out.clear();
    out.resize(order as usize, 0.0);
    if z <= 0.0 {
        return;
    }
    let ln_z = z.ln();
    // log of e^{-z} z^j / j!
    let log_poisson = |j: u32| -z + j as f64 * ln_z - ln_factorial(j);
    if z < order as f64 + 1.0 {
        // Tail T_s = Σ_{j≥s} e^{-z} z^j/j!, starting at s = order.
        let mut term = log_poisson(order).exp();
        let mut tail = 0.0;
        let mut j = order;
        while term > tail * 1e-18 && j < order + 10_000 {
            tail += term;
            j += 1;
            term *= z / j as f64;
        }
        // P(s, z) = T_s; walk s down from `order` to 1.
        for s in (1..=order).rev() {
            out[s as usize - 1] = tail.min(1.0);
            tail += log_poisson(s - 1).exp();
        }
    } else {
        let mut head = 0.0;
        for s in 1..=order {
            head += log_poisson(s - 1).exp();
            out[s as usize - 1] = (1.0 - head).max(0.0);
        }
    }
}
