use crate::error::{invalid, Result};

/// Sorted sample set; the step function `F_n(x) = #{x_i ≤ x} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    samples: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("empirical distribution needs at least one sample"));
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
            return Err(invalid(format!("non-finite sample {x}")));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    /// Lower empirical quantile: smallest sample with `F_n ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.samples.len();
        let idx = ((p.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n);
        self.samples[idx - 1]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// Two-sided KS distance `sup_x |F(x) − F_n(x)|` against a continuous
/// distribution function, taken exactly over the jumps of `F_n`.
pub fn ks_distance<F: Fn(f64) -> f64>(cdf: F, empirical: &EmpiricalCdf) -> f64 {
    let n = empirical.samples.len() as f64;
    empirical
        .samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Same value as [`ks_distance`] for a nondecreasing `cdf`, with far fewer
/// evaluations: the CDF is taken at block endpoints, and a block is only
/// subdivided while monotonicity cannot rule out that it holds the supremum.
/// Meant for distribution functions that are expensive to evaluate.
pub fn ks_distance_monotone<F: Fn(f64) -> f64>(cdf: F, empirical: &EmpiricalCdf, block: usize) -> f64 {
    let xs = &empirical.samples;
    let n = xs.len();
    let nf = n as f64;
    let step = block.max(2);
    let gap = |i: usize, f: f64| (f - i as f64 / nf).abs().max((f - (i + 1) as f64 / nf).abs());

    let mut knots: Vec<usize> = (0..n).step_by(step).collect();
    if *knots.last().unwrap() != n - 1 {
        knots.push(n - 1);
    }
    let values: Vec<f64> = knots.iter().map(|&i| cdf(xs[i])).collect();
    let mut d = knots.iter().zip(&values).map(|(&i, &f)| gap(i, f)).fold(0.0, f64::max);

    // Interior indices a < i < b satisfy F(x_a) ≤ F(x_i) ≤ F(x_b).
    let bound = |a: usize, fa: f64, b: usize, fb: f64| (fb - (a + 1) as f64 / nf).max(b as f64 / nf - fa);
    let mut pending: Vec<(usize, f64, usize, f64)> = knots
        .windows(2)
        .zip(values.windows(2))
        .filter(|(k, _)| k[1] > k[0] + 1)
        .map(|(k, v)| (k[0], v[0], k[1], v[1]))
        .collect();
    pending.sort_by(|p, q| bound(p.0, p.1, p.2, p.3).total_cmp(&bound(q.0, q.1, q.2, q.3)));
    while let Some((a, fa, b, fb)) = pending.pop() {
        if bound(a, fa, b, fb) <= d {
            continue;
        }
        let m = a + (b - a) / 2;
        let fm = cdf(xs[m]);
        d = d.max(gap(m, fm));
        if m > a + 1 {
            pending.push((a, fa, m, fm));
        }
        if b > m + 1 {
            pending.push((m, fm, b, fb));
        }
    }
    d
}

/// Two-sample KS distance `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let (xa, xb) = (&a.samples, &b.samples);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value of the one-sample KS statistic at significance
/// `alpha`, with Stephens' small-sample correction.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let sn = (n as f64).sqrt();
    c / (sn + 0.12 + 0.11 / sn)
}
