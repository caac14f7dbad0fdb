//! Scalar diagnostics over position distributions.
//!
//! [`Distribution`] is the unit every engine emits and every metric consumes:
//! a contiguous window of probabilities starting at `offset`, tagged with the
//! step it was taken at. Distributions coming out of a lossy simulation are
//! sub-normalized; their missing weight is the population that left the
//! walker manifold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `total` used to decide whether a distribution is normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub step: usize,
    pub offset: i64,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn new(step: usize, offset: i64, probs: Vec<f64>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidArgument(format!("probability {p} is not a finite non-negative number")));
        }
        Ok(Distribution { step, offset, probs })
    }

    /// All weight on a single site.
    pub fn point(step: usize, position: i64) -> Self {
        Distribution { step, offset: position, probs: vec![1.0] }
    }

    /// Builds a distribution from sparse `(position, probability)` pairs.
    pub fn from_pairs(step: usize, pairs: &[(i64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Ok(Distribution { step, offset: 0, probs: Vec::new() });
        }
        let lo = pairs.iter().map(|(x, _)| *x).min().unwrap();
        let hi = pairs.iter().map(|(x, _)| *x).max().unwrap();
        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        for &(x, p) in pairs {
            probs[(x - lo) as usize] += p;
        }
        Distribution::new(step, lo, probs)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// One past the last stored position.
    pub fn end(&self) -> i64 {
        self.offset + self.probs.len() as i64
    }

    pub fn prob(&self, x: i64) -> f64 {
        if x < self.offset || x >= self.end() {
            0.0
        } else {
            self.probs[(x - self.offset) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.offset + i as i64, p))
    }

    /// Smallest and largest position carrying weight above `eps`.
    pub fn support(&self, eps: f64) -> Option<(i64, i64)> {
        let mut it = self.iter().filter(|(_, p)| *p > eps).map(|(x, _)| x);
        let first = it.next()?;
        let last = it.last().unwrap_or(first);
        Some((first, last))
    }

    /// Position with the largest weight; ties go to the leftmost site.
    pub fn argmax(&self) -> Option<i64> {
        let mut best: Option<(i64, f64)> = None;
        for (x, p) in self.iter() {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((x, p));
            }
        }
        best.map(|(x, _)| x)
    }

    pub fn translated(&self, shift: i64) -> Self {
        Distribution { step: self.step, offset: self.offset + shift, probs: self.probs.clone() }
    }

    /// Mirror image under x → −x.
    pub fn reflected(&self) -> Self {
        let mut probs = self.probs.clone();
        probs.reverse();
        Distribution { step: self.step, offset: -(self.end() - 1), probs }
    }
}

/// D(t) = √(Σ x² p(x)), measured about the origin.
pub fn diffusion_distance(dist: &Distribution) -> Result<f64> {
    let total = dist.total();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::SubNormalized { total });
    }
    Ok(dist.iter().map(|(x, p)| (x * x) as f64 * p).sum::<f64>().sqrt())
}

/// Squared Bhattacharyya coefficient, `[Σ_x √(p(x) q(x))]²`, over the union
/// of both supports. Sub-normalized inputs are accepted; the result then
/// includes the missing weight and underestimates the shape agreement.
pub fn similarity(p: &Distribution, q: &Distribution) -> f64 {
    let lo = p.offset.max(q.offset);
    let hi = p.end().min(q.end());
    let bc: f64 = (lo..hi).map(|x| (p.prob(x) * q.prob(x)).sqrt()).sum();
    bc * bc
}

/// Applies `metric` to each distribution. Steps must be strictly increasing.
pub fn series<F>(dists: &[Distribution], mut metric: F) -> Result<Vec<(usize, f64)>>
where
    F: FnMut(&Distribution) -> Result<f64>,
{
    for w in dists.windows(2) {
        if w[1].step <= w[0].step {
            return Err(Error::InvalidArgument(format!(
                "steps must be strictly increasing, got {} after {}",
                w[1].step, w[0].step
            )));
        }
    }
    dists.iter().map(|d| Ok((d.step, metric(d)?))).collect()
}

/// Per-step similarity between two step-aligned runs.
pub fn similarity_series(a: &[Distribution], b: &[Distribution]) -> Result<Vec<(usize, f64)>> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.step != y.step) {
        let steps = |d: &[Distribution]| d.iter().map(|d| d.step).collect::<Vec<_>>();
        return Err(Error::StepMismatch(format!("{:?} vs {:?}", steps(a), steps(b))));
    }
    let mut other = b.iter();
    series(a, |d| Ok(similarity(d, other.next().unwrap())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("linear fit needs at least two paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit { slope, intercept, r_squared })
}

/// Exponent `k` of a power law `y ∝ x^k`, fitted on log-log axes.
pub fn power_law_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.iter().chain(ys).any(|v| *v <= 0.0) {
        return Err(Error::InvalidArgument("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    Ok(linear_fit(&lx, &ly)?.slope)
}
