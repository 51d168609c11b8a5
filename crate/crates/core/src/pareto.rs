//! Pareto dominance, fronts, epsilon-distance and the global Pareto regret.

use crate::environment::Environment;
use crate::error::{Error, Result};

/// `x` dominates `y`: at least as large everywhere, strictly larger somewhere.
pub fn dominates(x: &[f64], y: &[f64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(dominates_unchecked(x, y))
}

#[inline]
pub(crate) fn dominates_unchecked(x: &[f64], y: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in x.iter().zip(y) {
        if a < b {
            return false;
        }
        if a > b {
            strict = true;
        }
    }
    strict
}

/// Indices of the non-dominated vectors, in ascending order. Exact duplicates
/// of a front vector are all kept.
pub fn pareto_front<V: AsRef<[f64]>>(vectors: &[V]) -> Result<Vec<usize>> {
    let first = vectors.first().ok_or(Error::EmptyInput("pareto_front"))?;
    let d = first.as_ref().len();
    if let Some(v) = vectors.iter().find(|v| v.as_ref().len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.as_ref().len(),
        });
    }
    Ok(front_unchecked(vectors))
}

pub(crate) fn front_unchecked<V: AsRef<[f64]>>(vectors: &[V]) -> Vec<usize> {
    (0..vectors.len())
        .filter(|&k| {
            !vectors
                .iter()
                .any(|other| dominates_unchecked(other.as_ref(), vectors[k].as_ref()))
        })
        .collect()
}

/// `Dist(x, S) = max(0, max_{y in S} min_d (y_d - x_d))`: the smallest
/// uniform lift of `x` that no member of `S` dominates.
pub fn eps_distance<V: AsRef<[f64]>>(x: &[f64], set: &[V]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptyInput("eps_distance set"));
    }
    let mut best: f64 = 0.0;
    for y in set {
        let y = y.as_ref();
        if y.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        let margin = y
            .iter()
            .zip(x)
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min);
        best = best.max(margin);
    }
    Ok(best)
}

/// Front, gaps and centered means of an environment's arms.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoMetrics {
    pub front_indices: Vec<usize>,
    pub gaps: Vec<f64>,
    pub centered_means: Vec<Vec<f64>>,
}

impl ParetoMetrics {
    pub fn from_means(centered_means: Vec<Vec<f64>>) -> Result<Self> {
        let front_indices = pareto_front(&centered_means)?;
        let front: Vec<&[f64]> = front_indices.iter().map(|&k| centered_means[k].as_slice()).collect();
        let mut gaps = Vec::with_capacity(centered_means.len());
        for (k, mu) in centered_means.iter().enumerate() {
            gaps.push(if front_indices.contains(&k) { 0.0 } else { eps_distance(mu, &front)? });
        }
        Ok(ParetoMetrics {
            front_indices,
            gaps,
            centered_means,
        })
    }
}

pub fn pareto_gaps(env: &Environment) -> Result<ParetoMetrics> {
    ParetoMetrics::from_means(env.centered_means())
}

/// `sum_i Delta_{a_i}`.
pub fn pareto_regret_step(metrics: &ParetoMetrics, chosen_arms: &[usize]) -> Result<f64> {
    chosen_arms.iter().try_fold(0.0, |acc, &k| {
        metrics
            .gaps
            .get(k)
            .map(|g| acc + g)
            .ok_or(Error::IndexOutOfRange {
                what: "arm",
                index: k,
                len: metrics.gaps.len(),
            })
    })
}
