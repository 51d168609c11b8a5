//! Heterogeneous Bernoulli vector-reward environments.
//!
//! Every agent `i` sees arm `k` as a product of independent Bernoulli
//! coordinates with means `mu[i][k][d]`. Agents carry preference vectors on
//! the `D`-simplex that scalarize vector rewards into utilities.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const MEAN_FLOOR: f64 = 0.05;
pub const MEAN_CEIL: f64 = 0.95;
pub const BASE_LOW: f64 = 0.2;
pub const BASE_HIGH: f64 = 0.8;

/// Immutable environment. Tensors are stored flat in row-major order:
/// `means[(i * K + k) * D + d]`, `base_means[k * D + d]`, `prefs[i * D + d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    n_agents: usize,
    n_arms: usize,
    n_dims: usize,
    base_means: Vec<f64>,
    means: Vec<f64>,
    prefs: Vec<f64>,
}

/// One vector reward: each coordinate is 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardSample {
    pub values: Vec<f64>,
}

/// Environment plus the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentDocument {
    pub config: ExperimentConfig,
    pub environment: Environment,
}

/// Flat Dirichlet(1, ..., 1) draw on the `dims`-simplex.
pub fn sample_flat_dirichlet<R: Rng + ?Sized>(dims: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..dims).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|x| *x /= total);
    } else {
        w.iter_mut().for_each(|x| *x = 1.0 / dims as f64);
    }
    w
}

impl Environment {
    /// Base means uniform on [0.2, 0.8], per-agent perturbations uniform on
    /// `[-het_scale, het_scale]` clipped to [0.05, 0.95], flat-Dirichlet preferences.
    pub fn generate<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let base: Vec<f64> = (0..config.n_arms * config.n_dims)
            .map(|_| rng.random_range(BASE_LOW..BASE_HIGH))
            .collect();
        Self::perturb_base(base, config.n_agents, config.n_arms, config.n_dims, config.het_scale, rng)
    }

    /// Builds an environment around fixed base means (`K x D`, row-major).
    pub fn perturb_base<R: Rng + ?Sized>(
        base_means: Vec<f64>,
        n_agents: usize,
        n_arms: usize,
        n_dims: usize,
        het_scale: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if n_agents == 0 || n_arms == 0 || n_dims == 0 {
            return Err(Error::EmptyInput("environment shape"));
        }
        if base_means.len() != n_arms * n_dims {
            return Err(Error::DimensionMismatch {
                expected: n_arms * n_dims,
                found: base_means.len(),
            });
        }
        let mut means = Vec::with_capacity(n_agents * n_arms * n_dims);
        for _ in 0..n_agents {
            for &b in &base_means {
                let noise = if het_scale > 0.0 {
                    rng.random_range(-het_scale..=het_scale)
                } else {
                    0.0
                };
                means.push((b + noise).clamp(MEAN_FLOOR, MEAN_CEIL));
            }
        }
        let mut prefs = Vec::with_capacity(n_agents * n_dims);
        for _ in 0..n_agents {
            prefs.extend(sample_flat_dirichlet(n_dims, rng));
        }
        Ok(Environment {
            n_agents,
            n_arms,
            n_dims,
            base_means,
            means,
            prefs,
        })
    }

    /// Hand-built environment from nested `means[i][k][d]` and `prefs[i][d]`.
    /// The base means are set to the centered means.
    pub fn from_parts(means: Vec<Vec<Vec<f64>>>, prefs: Vec<Vec<f64>>) -> Result<Self> {
        let n_agents = means.len();
        let n_arms = means.first().map_or(0, Vec::len);
        let n_dims = means.first().and_then(|m| m.first()).map_or(0, Vec::len);
        if n_agents == 0 || n_arms == 0 || n_dims == 0 {
            return Err(Error::EmptyInput("environment means"));
        }
        if prefs.len() != n_agents {
            return Err(Error::DimensionMismatch {
                expected: n_agents,
                found: prefs.len(),
            });
        }
        let mut flat = Vec::with_capacity(n_agents * n_arms * n_dims);
        for agent in &means {
            if agent.len() != n_arms {
                return Err(Error::DimensionMismatch {
                    expected: n_arms,
                    found: agent.len(),
                });
            }
            for arm in agent {
                if arm.len() != n_dims {
                    return Err(Error::DimensionMismatch {
                        expected: n_dims,
                        found: arm.len(),
                    });
                }
                if arm.iter().any(|m| !(0.0..=1.0).contains(m)) {
                    return Err(Error::InvalidConfig {
                        field: "means",
                        reason: format!("{arm:?} leaves [0, 1]"),
                    });
                }
                flat.extend_from_slice(arm);
            }
        }
        let mut flat_prefs = Vec::with_capacity(n_agents * n_dims);
        for w in &prefs {
            if w.len() != n_dims {
                return Err(Error::DimensionMismatch {
                    expected: n_dims,
                    found: w.len(),
                });
            }
            let sum: f64 = w.iter().sum();
            if w.iter().any(|x| *x < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig {
                    field: "prefs",
                    reason: format!("{w:?} is not on the simplex"),
                });
            }
            flat_prefs.extend_from_slice(w);
        }
        let mut env = Environment {
            n_agents,
            n_arms,
            n_dims,
            base_means: Vec::new(),
            means: flat,
            prefs: flat_prefs,
        };
        env.base_means = (0..n_arms).flat_map(|k| env.centered_mean(k)).collect();
        Ok(env)
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_arms(&self) -> usize {
        self.n_arms
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn base_mean(&self, arm: usize) -> &[f64] {
        &self.base_means[arm * self.n_dims..(arm + 1) * self.n_dims]
    }

    /// `mu_{i,k}`.
    pub fn mean(&self, agent: usize, arm: usize) -> &[f64] {
        let start = (agent * self.n_arms + arm) * self.n_dims;
        &self.means[start..start + self.n_dims]
    }

    /// `w_i`.
    pub fn pref(&self, agent: usize) -> &[f64] {
        &self.prefs[agent * self.n_dims..(agent + 1) * self.n_dims]
    }

    fn check(&self, agent: usize, arm: usize) -> Result<()> {
        if agent >= self.n_agents {
            return Err(Error::IndexOutOfRange {
                what: "agent",
                index: agent,
                len: self.n_agents,
            });
        }
        if arm >= self.n_arms {
            return Err(Error::IndexOutOfRange {
                what: "arm",
                index: arm,
                len: self.n_arms,
            });
        }
        Ok(())
    }

    /// One Bernoulli draw per dimension, independent across dimensions.
    pub fn sample_reward<R: Rng + ?Sized>(&self, agent: usize, arm: usize, rng: &mut R) -> Result<RewardSample> {
        self.check(agent, arm)?;
        let mut values = vec![0.0; self.n_dims];
        self.sample_into(agent, arm, rng, &mut values);
        Ok(RewardSample { values })
    }

    /// Unchecked variant of [`sample_reward`](Self::sample_reward) writing into `out`.
    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, agent: usize, arm: usize, rng: &mut R, out: &mut [f64]) {
        for (x, &m) in out.iter_mut().zip(self.mean(agent, arm)) {
            *x = if rng.random::<f64>() < m { 1.0 } else { 0.0 };
        }
    }

    /// Agent average of `mu_{i,k}`.
    pub fn centered_mean(&self, arm: usize) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_dims];
        for i in 0..self.n_agents {
            for (a, m) in acc.iter_mut().zip(self.mean(i, arm)) {
                *a += m;
            }
        }
        acc.iter_mut().for_each(|a| *a /= self.n_agents as f64);
        acc
    }

    /// All centered means, `K` rows of length `D`.
    pub fn centered_means(&self) -> Vec<Vec<f64>> {
        (0..self.n_arms).map(|k| self.centered_mean(k)).collect()
    }

    /// `w_j . mu_{i,k}`: agent `i`'s arm `k` seen through agent `j`'s preferences.
    pub fn scalar_mean(&self, i: usize, j: usize, k: usize) -> Result<f64> {
        self.check(i, k)?;
        self.check(j, k)?;
        Ok(dot(self.pref(j), self.mean(i, k)))
    }

    /// `N x K` matrix with entry `(j, k)` the agent-average of `w_j . mu_{i,k}`.
    pub fn centered_scalar_means(&self) -> Vec<Vec<f64>> {
        (0..self.n_agents)
            .map(|j| {
                (0..self.n_arms)
                    .map(|k| {
                        let total: f64 = (0..self.n_agents).map(|i| dot(self.pref(j), self.mean(i, k))).sum();
                        total / self.n_agents as f64
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self, config: &ExperimentConfig) -> String {
        let doc = EnvironmentDocument {
            config: config.clone(),
            environment: self.clone(),
        };
        serde_json::to_string(&doc).expect("environment serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<EnvironmentDocument> {
        serde_json::from_str(text)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
