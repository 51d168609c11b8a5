//! Decentralized multi-objective, multi-agent multi-armed bandits.
//!
//! Agents pull arms that return Bernoulli reward vectors, talk over random
//! Erdős–Rényi subgraphs of a base graph, and average their estimates with a
//! doubly stochastic gossip step. Two learners are provided:
//!
//! * Pareto UCB1 Gossip, scored by global Pareto regret against the front
//!   of the agent-averaged ("centered") arm means.
//! * Simulated NSW UCB Gossip, scored by Nash Social Welfare regret against
//!   the NSW-optimal arm distribution of the centered scalarized utilities.
//!
//! Both come with the baselines used to evaluate them, and [`harness`] runs
//! seeded, replayable trials.

pub mod algorithms;
pub mod config;
pub mod environment;
pub mod error;
pub mod harness;
pub mod network;
pub mod nsw;
pub mod pareto;

pub use algorithms::{AlgorithmId, Suite};
pub use config::{BaseGraphSpec, ExperimentConfig, ExploreSchedule, SolverSettings};
pub use environment::{Environment, RewardSample};
pub use error::{Error, Result};
pub use harness::seed::StreamRng;
pub use harness::{
    run_experiment, run_trial, AggregateResult, AlgorithmResult, ExperimentResult, RegretSample, RegretTrace,
    TrialRun,
};
pub use network::{BaseGraph, RoundGraph, WeightMatrix};
pub use nsw::{ArmDistribution, NswBenchmark};
pub use pareto::ParetoMetrics;
