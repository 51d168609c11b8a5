//! Trial orchestration: seeding, per-round regret accounting, aggregation
//! across trials and the mixing diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    AlgorithmId, NswAgentState, NswParams, NswTeam, NswVariant, ParetoAgentState, ParetoParams, ParetoTeam,
    ParetoVariant, Streams,
};
use crate::config::ExperimentConfig;
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::network::{build_weight_matrix, sample_round_graph, BaseGraph};
use crate::nsw::{nsw_regret_step, optimal_distribution, NswBenchmark};
use crate::pareto::{pareto_gaps, pareto_regret_step, ParetoMetrics};
use crate::StreamRng;

pub mod diagnostics;
pub mod seed;

pub use diagnostics::{consensus_diagnostic, unbiasedness_diagnostic};
pub use seed::{derive_stream, env_stream};

/// Deviation of the mixing identity that signals a mixing bug.
pub const MIXING_ALARM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretSample {
    pub t: u64,
    pub cumulative_regret: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialDiagnostics {
    /// Largest mixing-identity deviation seen at the record stride.
    pub max_unbiasedness: f64,
    /// Consensus spread of the gossip estimates after the last round.
    pub final_consensus: f64,
}

/// Cumulative regret of one algorithm in one trial, sampled every
/// `record_every` rounds plus the final round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub algorithm: AlgorithmId,
    pub trial: usize,
    pub samples: Vec<RegretSample>,
    pub diagnostics: TrialDiagnostics,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.cumulative_regret)
    }

    /// Cumulative regret at the last recorded round `<= t`.
    pub fn regret_at(&self, t: u64) -> f64 {
        self.samples
            .iter()
            .take_while(|s| s.t <= t)
            .last()
            .map_or(0.0, |s| s.cumulative_regret)
    }
}

/// Mean, standard deviation and band (`std / 4`) across trials per recorded round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub algorithm: AlgorithmId,
    pub t: Vec<u64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub band: Vec<f64>,
}

impl AggregateResult {
    /// Population statistics over traces sharing one time grid.
    pub fn from_traces(algorithm: AlgorithmId, traces: &[RegretTrace]) -> Result<Self> {
        let first = traces.first().ok_or(Error::EmptyInput("aggregate traces"))?;
        let t: Vec<u64> = first.samples.iter().map(|s| s.t).collect();
        for tr in traces {
            if tr.samples.len() != t.len() || tr.samples.iter().zip(&t).any(|(s, t)| s.t != *t) {
                return Err(Error::DimensionMismatch {
                    expected: t.len(),
                    found: tr.samples.len(),
                });
            }
        }
        let n = traces.len() as f64;
        let mut mean = Vec::with_capacity(t.len());
        let mut std = Vec::with_capacity(t.len());
        for idx in 0..t.len() {
            let m = traces.iter().map(|tr| tr.samples[idx].cumulative_regret).sum::<f64>() / n;
            let var = traces
                .iter()
                .map(|tr| (tr.samples[idx].cumulative_regret - m).powi(2))
                .sum::<f64>()
                / n;
            mean.push(m);
            std.push(var.sqrt());
        }
        let band = std.iter().map(|s| s / 4.0).collect();
        Ok(AggregateResult {
            algorithm,
            t,
            mean,
            std,
            band,
        })
    }

    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }
}

enum Engine {
    Pareto {
        team: ParetoTeam,
        params: ParetoParams,
        metrics: ParetoMetrics,
    },
    Nsw {
        team: NswTeam,
        params: NswParams,
        bench: NswBenchmark,
    },
}

/// One algorithm running through one trial, round by round.
pub struct TrialRun {
    config: ExperimentConfig,
    algorithm: AlgorithmId,
    trial: usize,
    env: Environment,
    base: BaseGraph,
    graph_rng: StreamRng,
    streams: Streams,
    engine: Engine,
    t: u64,
    cumulative: f64,
    samples: Vec<RegretSample>,
    diagnostics: TrialDiagnostics,
}

impl TrialRun {
    /// Generates the trial's environment from the shared environment stream.
    pub fn new(config: &ExperimentConfig, algorithm: AlgorithmId, trial: usize) -> Result<Self> {
        config.validate()?;
        let env = Environment::generate(config, &mut env_stream(config.master_seed, trial as u64))?;
        Self::with_environment(config, algorithm, trial, env)
    }

    pub fn with_environment(
        config: &ExperimentConfig,
        algorithm: AlgorithmId,
        trial: usize,
        env: Environment,
    ) -> Result<Self> {
        config.validate()?;
        if (env.n_agents(), env.n_arms(), env.n_dims()) != (config.n_agents, config.n_arms, config.n_dims) {
            return Err(Error::InvalidConfig {
                field: "environment",
                reason: "environment shape does not match the configuration".into(),
            });
        }
        let seed = config.master_seed;
        let tr = trial as u64;
        let alg = algorithm.stream_id();
        let base = BaseGraph::from_spec(&config.base_graph, config.n_agents)?;
        let engine = match algorithm {
            AlgorithmId::ParetoUcbGossip | AlgorithmId::ParetoUcb | AlgorithmId::ParetoGossip => {
                let params = ParetoParams::from_config(config)?;
                let variant = match algorithm {
                    AlgorithmId::ParetoUcbGossip => ParetoVariant::Gossip,
                    AlgorithmId::ParetoUcb => ParetoVariant::Independent,
                    _ => ParetoVariant::Elimination,
                };
                Engine::Pareto {
                    team: ParetoTeam::new(variant, &params),
                    params,
                    metrics: pareto_gaps(&env)?,
                }
            }
            AlgorithmId::NswUcbGossip | AlgorithmId::NoGossip | AlgorithmId::NoSim => {
                let params = NswParams::from_config(config)?;
                let variant = match algorithm {
                    AlgorithmId::NswUcbGossip => NswVariant::Gossip,
                    AlgorithmId::NoGossip => NswVariant::NoGossip,
                    _ => NswVariant::NoSim,
                };
                let mut bench_rng = derive_stream(seed, tr, seed::SHARED_ALGORITHM, seed::BENCHMARK_TAG);
                let bench = optimal_distribution(&env.centered_scalar_means(), &config.solver, &mut bench_rng)?;
                Engine::Nsw {
                    team: NswTeam::new(variant, &params),
                    params,
                    bench,
                }
            }
        };
        Ok(TrialRun {
            config: config.clone(),
            algorithm,
            trial,
            base,
            graph_rng: derive_stream(seed, tr, alg, seed::GRAPH_TAG),
            streams: Streams {
                action: derive_stream(seed, tr, alg, seed::ACTION_TAG),
                reward: derive_stream(seed, tr, alg, seed::REWARD_TAG),
                solver: derive_stream(seed, tr, alg, seed::SOLVER_TAG),
            },
            env,
            engine,
            t: 0,
            cumulative: 0.0,
            samples: Vec::new(),
            diagnostics: TrialDiagnostics::default(),
        })
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    /// Rounds completed so far.
    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.config.horizon
    }

    pub fn cumulative_regret(&self) -> f64 {
        self.cumulative
    }

    pub fn nsw_states(&self) -> Option<&[NswAgentState]> {
        match &self.engine {
            Engine::Nsw { team, .. } => Some(&team.states),
            Engine::Pareto { .. } => None,
        }
    }

    pub fn pareto_states(&self) -> Option<Vec<&ParetoAgentState>> {
        match &self.engine {
            Engine::Pareto { team, .. } => Some(team.agents()),
            Engine::Nsw { .. } => None,
        }
    }

    pub fn pareto_metrics(&self) -> Option<&ParetoMetrics> {
        match &self.engine {
            Engine::Pareto { metrics, .. } => Some(metrics),
            Engine::Nsw { .. } => None,
        }
    }

    pub fn nsw_benchmark(&self) -> Option<&NswBenchmark> {
        match &self.engine {
            Engine::Nsw { bench, .. } => Some(bench),
            Engine::Pareto { .. } => None,
        }
    }

    /// `(consensus, unbiasedness)` of the current gossip estimates.
    pub fn mixing_diagnostics(&self) -> (f64, f64) {
        match &self.engine {
            Engine::Pareto { team, .. } => {
                let agents: Vec<ParetoAgentState> = team.agents().into_iter().cloned().collect();
                (consensus_diagnostic(&agents), unbiasedness_diagnostic(&agents))
            }
            Engine::Nsw { team, .. } => (consensus_diagnostic(&team.states), unbiasedness_diagnostic(&team.states)),
        }
    }

    /// Plays one round and returns its regret.
    pub fn step(&mut self) -> Result<f64> {
        let t = self.t + 1;
        let round = sample_round_graph(&self.base, self.config.link_prob, &mut self.graph_rng);
        let w = build_weight_matrix(&round);
        let regret = match &mut self.engine {
            Engine::Pareto { team, params, metrics } => {
                let arms = team.step(&self.env, &w, t, params, &mut self.streams)?;
                pareto_regret_step(metrics, &arms)?
            }
            Engine::Nsw { team, params, bench } => {
                team.step(&self.env, &round, &w, t, params, &mut self.streams)?;
                nsw_regret_step(bench, &team.distributions())?
            }
        };
        self.t = t;
        self.cumulative += regret;
        if t.is_multiple_of(self.config.record_every) || t == self.config.horizon {
            self.samples.push(RegretSample {
                t,
                cumulative_regret: self.cumulative,
            });
            if self.algorithm.mixes() {
                let (_, dev) = self.mixing_diagnostics();
                self.diagnostics.max_unbiasedness = self.diagnostics.max_unbiasedness.max(dev);
                if dev > MIXING_ALARM {
                    return Err(Error::MixingIdentity { round: t, deviation: dev });
                }
            }
        }
        Ok(regret)
    }

    /// Runs the remaining rounds up to the horizon.
    pub fn run(mut self) -> Result<RegretTrace> {
        while !self.is_finished() {
            self.step()?;
        }
        self.diagnostics.final_consensus = if self.algorithm.mixes() {
            self.mixing_diagnostics().0
        } else {
            0.0
        };
        Ok(RegretTrace {
            algorithm: self.algorithm,
            trial: self.trial,
            samples: self.samples,
            diagnostics: self.diagnostics,
        })
    }
}

pub fn run_trial(config: &ExperimentConfig, algorithm: AlgorithmId, trial: usize) -> Result<RegretTrace> {
    TrialRun::new(config, algorithm, trial)?.run()
}

/// Successful traces, failures and aggregate for one algorithm.
#[derive(Debug, Clone)]
pub struct AlgorithmResult {
    pub algorithm: AlgorithmId,
    pub traces: Vec<RegretTrace>,
    pub failures: Vec<(usize, Error)>,
    pub aggregate: AggregateResult,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub results: Vec<AlgorithmResult>,
}

impl ExperimentResult {
    pub fn get(&self, algorithm: AlgorithmId) -> Option<&AlgorithmResult> {
        self.results.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn all_succeeded(&self) -> bool {
        self.results.iter().all(|r| r.failures.is_empty())
    }
}

/// Runs `n_trials` trials of every algorithm. Trials run in parallel; results
/// are folded in (algorithm, trial) order so output is deterministic.
pub fn run_experiment(config: &ExperimentConfig, algorithms: &[AlgorithmId]) -> Result<ExperimentResult> {
    config.validate()?;
    let jobs: Vec<(AlgorithmId, usize)> = algorithms
        .iter()
        .flat_map(|&a| (0..config.n_trials).map(move |t| (a, t)))
        .collect();
    let outcomes: Vec<Result<RegretTrace>> = jobs
        .par_iter()
        .map(|&(a, trial)| run_trial(config, a, trial))
        .collect();

    let mut results = Vec::with_capacity(algorithms.len());
    let mut outcomes = outcomes.into_iter();
    for &algorithm in algorithms {
        let mut traces = Vec::new();
        let mut failures = Vec::new();
        for trial in 0..config.n_trials {
            match outcomes.next().expect("one outcome per job") {
                Ok(tr) => traces.push(tr),
                Err(e) => {
                    log::warn!("{algorithm} trial {trial} failed: {e}");
                    failures.push((trial, e));
                }
            }
        }
        if traces.is_empty() {
            return Err(Error::AllTrialsFailed(algorithm.name().to_string()));
        }
        let aggregate = AggregateResult::from_traces(algorithm, &traces)?;
        results.push(AlgorithmResult {
            algorithm,
            traces,
            failures,
            aggregate,
        });
    }
    Ok(ExperimentResult { results })
}
