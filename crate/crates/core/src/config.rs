//! Experiment configuration shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exploration factor schedule for the NSW learners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "scale")]
pub enum ExploreSchedule {
    /// `alpha_t = scale` for every round.
    Constant(f64),
    /// `alpha_t = scale / sqrt(t)`.
    InverseSqrt(f64),
}

impl ExploreSchedule {
    pub fn alpha(&self, t: u64) -> f64 {
        match *self {
            ExploreSchedule::Constant(a) => a,
            ExploreSchedule::InverseSqrt(c) => c / (t.max(1) as f64).sqrt(),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            ExploreSchedule::Constant(a) | ExploreSchedule::InverseSqrt(a) => a,
        }
    }
}

/// `1 / sqrt(t)`.
impl Default for ExploreSchedule {
    fn default() -> Self {
        ExploreSchedule::InverseSqrt(1.0)
    }
}

/// Projected-gradient settings for the NSW maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            restarts: 5,
            max_iters: 2000,
            tol: 1e-8,
        }
    }
}

/// Communication graph the per-round Erdős–Rényi graphs are drawn from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BaseGraphSpec {
    #[default]
    Complete,
    /// Undirected edge list over agents `0..n_agents`.
    Edges(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_agents: usize,
    pub n_arms: usize,
    pub n_dims: usize,
    pub horizon: u64,
    pub link_prob: f64,
    pub het_scale: f64,
    pub n_trials: usize,
    pub master_seed: u64,
    pub record_every: u64,
    pub explore: ExploreSchedule,
    /// Multiplier on the arm-independent consensus term of the Pareto UCB radius.
    pub consensus_coeff: f64,
    /// Multiplier on the consensus term of the elimination baseline's half-width.
    pub elim_consensus_coeff: f64,
    pub solver: SolverSettings,
    pub base_graph: BaseGraphSpec,
}

impl ExperimentConfig {
    /// Pareto suite defaults: N=8, K=8, D=3, T=150000, p=0.8, het_scale=0.2, 10 trials.
    pub fn pareto_suite() -> Self {
        Self::with_shape(8, 8, 3, 150_000, 0.8, 0.2, 10)
    }

    /// NSW suite defaults: N=4, K=5, D=2, T=1500, p=0.5, het_scale=0.2, 15 trials.
    pub fn nsw_suite() -> Self {
        Self::with_shape(4, 5, 2, 1500, 0.5, 0.2, 15)
    }

    pub fn with_shape(
        n_agents: usize,
        n_arms: usize,
        n_dims: usize,
        horizon: u64,
        link_prob: f64,
        het_scale: f64,
        n_trials: usize,
    ) -> Self {
        ExperimentConfig {
            n_agents,
            n_arms,
            n_dims,
            horizon,
            link_prob,
            het_scale,
            n_trials,
            master_seed: 0,
            record_every: default_record_every(horizon),
            explore: ExploreSchedule::default(),
            consensus_coeff: 1.0,
            elim_consensus_coeff: 0.0,
            solver: SolverSettings::default(),
            base_graph: BaseGraphSpec::Complete,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, reason: impl Into<String>) -> Result<()> {
            Err(Error::InvalidConfig {
                field,
                reason: reason.into(),
            })
        }
        if self.n_agents == 0 {
            return bad("n_agents", "must be at least 1");
        }
        if self.n_arms == 0 {
            return bad("n_arms", "must be at least 1");
        }
        if self.n_dims == 0 {
            return bad("n_dims", "must be at least 1");
        }
        if self.horizon < self.n_arms as u64 {
            return bad(
                "horizon",
                format!("must be at least n_arms = {} (warm-up)", self.n_arms),
            );
        }
        if !(self.link_prob > 0.0 && self.link_prob <= 1.0) {
            return bad("link_prob", format!("{} is not in (0, 1]", self.link_prob));
        }
        if !(self.het_scale >= 0.0 && self.het_scale.is_finite()) {
            return bad("het_scale", format!("{} is not a finite nonnegative real", self.het_scale));
        }
        if self.n_trials == 0 {
            return bad("n_trials", "must be at least 1");
        }
        if self.record_every == 0 {
            return bad("record_every", "must be at least 1");
        }
        let alpha = self.explore.scale();
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return bad("explore", format!("{alpha} is not a finite nonnegative real"));
        }
        if !(self.consensus_coeff >= 0.0 && self.consensus_coeff.is_finite()) {
            return bad("consensus_coeff", "must be a finite nonnegative real");
        }
        if !(self.elim_consensus_coeff >= 0.0 && self.elim_consensus_coeff.is_finite()) {
            return bad("elim_consensus_coeff", "must be a finite nonnegative real");
        }
        if self.link_prob == 1.0 && (self.consensus_coeff > 0.0 || self.elim_consensus_coeff > 0.0) {
            return bad(
                "link_prob",
                "p = 1 makes the consensus term 2*sqrt(N)/(1-sqrt(p)) divide by zero; set the consensus coefficients to 0",
            );
        }
        if self.solver.restarts == 0 {
            return bad("solver_restarts", "must be at least 1");
        }
        if self.solver.max_iters == 0 {
            return bad("solver_max_iters", "must be at least 1");
        }
        if !(self.solver.tol > 0.0 && self.solver.tol.is_finite()) {
            return bad("solver_tol", "must be a finite positive real");
        }
        if let BaseGraphSpec::Edges(edges) = &self.base_graph {
            for &(a, b) in edges {
                if a >= self.n_agents || b >= self.n_agents {
                    return bad("base_graph", format!("edge ({a}, {b}) references a missing agent"));
                }
                if a == b {
                    return bad("base_graph", format!("self-loop on agent {a}"));
                }
            }
        }
        Ok(())
    }
}

/// `max(1, horizon / 1000)`.
pub fn default_record_every(horizon: u64) -> u64 {
    (horizon / 1000).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_defaults_validate() {
        ExperimentConfig::pareto_suite().validate().unwrap();
        ExperimentConfig::nsw_suite().validate().unwrap();
        assert_eq!(ExperimentConfig::pareto_suite().record_every, 150);
        assert_eq!(ExperimentConfig::nsw_suite().record_every, 1);
    }

    #[test]
    fn rejects_out_of_range_values() {
        let mut c = ExperimentConfig::nsw_suite();
        c.horizon = 3;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig { field: "horizon", .. })));

        let mut c = ExperimentConfig::nsw_suite();
        c.link_prob = 0.0;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig { field: "link_prob", .. })));

        let mut c = ExperimentConfig::nsw_suite();
        c.link_prob = 1.0;
        assert!(c.validate().is_err());
        c.consensus_coeff = 0.0;
        c.validate().unwrap();

        let mut c = ExperimentConfig::nsw_suite();
        c.het_scale = -0.1;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig { field: "het_scale", .. })));

        let mut c = ExperimentConfig::nsw_suite();
        c.base_graph = BaseGraphSpec::Edges(vec![(0, 9)]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn explore_schedules() {
        assert_eq!(ExploreSchedule::Constant(2.0).alpha(100), 2.0);
        assert!((ExploreSchedule::InverseSqrt(2.0).alpha(100) - 0.2).abs() < 1e-15);
    }
}
