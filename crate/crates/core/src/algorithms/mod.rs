//! Round engines for the two gossip learners and their baselines.
//!
//! A round is two-phase: every agent acts and updates its local estimates
//! from its own state, then all agents mix their global estimates against a
//! snapshot taken before any agent mixed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::harness::seed::StreamRng;

pub mod nsw_gossip;
pub mod pareto_gossip;
pub mod radius;

pub use nsw_gossip::{
    no_gossip_nsw_round, no_sim_nsw_round, simulated_nsw_round, NswAgentState, NswParams, NswTeam, NswVariant,
};
pub use pareto_gossip::{
    independent_pareto_ucb_round, mo_gossip_elimination_round, pareto_ucb_gossip_round, ucb_candidate_set,
    EliminationAgentState, ParetoAgentState, ParetoParams, ParetoTeam, ParetoVariant,
};
pub use radius::{consensus_term, elimination_half_width, exploration_radius, explore_bonus};

/// Which family of regret an algorithm is scored with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Pareto,
    Nsw,
}

impl Suite {
    pub fn algorithms(self) -> &'static [AlgorithmId] {
        match self {
            Suite::Pareto => &[AlgorithmId::ParetoUcbGossip, AlgorithmId::ParetoUcb, AlgorithmId::ParetoGossip],
            Suite::Nsw => &[AlgorithmId::NswUcbGossip, AlgorithmId::NoGossip, AlgorithmId::NoSim],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Pareto => "pareto",
            Suite::Nsw => "nsw",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pareto" => Ok(Suite::Pareto),
            "nsw" => Ok(Suite::Nsw),
            other => Err(Error::InvalidConfig {
                field: "suite",
                reason: format!("unknown suite `{other}` (expected pareto or nsw)"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmId {
    /// Pareto UCB1 with gossip-averaged estimates.
    ParetoUcbGossip,
    /// N independent Pareto UCB1 learners.
    ParetoUcb,
    /// Multi-objective gossip successive elimination.
    ParetoGossip,
    /// Simulated NSW UCB with gossip.
    NswUcbGossip,
    /// Simulated rewards, no gossip.
    NoGossip,
    /// Gossip without simulated rewards.
    NoSim,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 6] = [
        AlgorithmId::ParetoUcbGossip,
        AlgorithmId::ParetoUcb,
        AlgorithmId::ParetoGossip,
        AlgorithmId::NswUcbGossip,
        AlgorithmId::NoGossip,
        AlgorithmId::NoSim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::ParetoUcbGossip => "pareto_ucb_gossip",
            AlgorithmId::ParetoUcb => "pareto_ucb",
            AlgorithmId::ParetoGossip => "pareto_gossip",
            AlgorithmId::NswUcbGossip => "nsw_ucb_gossip",
            AlgorithmId::NoGossip => "no_gossip",
            AlgorithmId::NoSim => "no_sim",
        }
    }

    /// Stable numeric id used for stream derivation.
    pub fn stream_id(self) -> u64 {
        self as u64
    }

    pub fn suite(self) -> Suite {
        match self {
            AlgorithmId::ParetoUcbGossip | AlgorithmId::ParetoUcb | AlgorithmId::ParetoGossip => Suite::Pareto,
            AlgorithmId::NswUcbGossip | AlgorithmId::NoGossip | AlgorithmId::NoSim => Suite::Nsw,
        }
    }

    /// Whether the engine keeps network averages that obey the mixing identity.
    pub fn mixes(self) -> bool {
        !matches!(self, AlgorithmId::ParetoUcb | AlgorithmId::NoGossip)
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// Per-purpose random streams consumed by a round engine.
#[derive(Debug, Clone)]
pub struct Streams {
    pub action: StreamRng,
    pub reward: StreamRng,
    pub solver: StreamRng,
}

/// Agents that hold a local estimate and a gossip-mixed global estimate of
/// the same shape.
pub trait GossipState {
    fn global(&self) -> &[f64];
    fn local(&self) -> &[f64];
}

/// Exact running mean: `(n * mean + x) / (n + 1)`.
#[inline]
pub(crate) fn running_mean(mean: f64, count_before: u64, x: f64) -> f64 {
    (count_before as f64 * mean + x) / (count_before + 1) as f64
}
