//! Simulated NSW UCB Gossip and its two ablations.
//!
//! Every agent keeps `N x K` matrices: row `j` holds utilities of arms under
//! agent `j`'s preference vector, estimated from agent `i`'s own rewards
//! scalarized with `w_j` ("simulated" rewards).

use super::radius::explore_bonus;
use super::{running_mean, GossipState, Streams};
use crate::config::{ExperimentConfig, ExploreSchedule, SolverSettings};
use crate::environment::{dot, Environment};
use crate::error::{Error, Result};
use crate::network::{gossip_mix, RoundGraph, WeightMatrix};
use crate::nsw::{maximize_nsw, ArmDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct NswAgentState {
    /// `T_{i,j,k}`, `N x K` row-major.
    pub counts: Vec<u64>,
    pub local: Vec<f64>,
    pub global: Vec<f64>,
    pub dist: ArmDistribution,
    n_arms: usize,
}

impl NswAgentState {
    pub fn new(n_agents: usize, n_arms: usize) -> Self {
        NswAgentState {
            counts: vec![0; n_agents * n_arms],
            local: vec![0.0; n_agents * n_arms],
            global: vec![0.0; n_agents * n_arms],
            dist: ArmDistribution::uniform(n_arms),
            n_arms,
        }
    }

    pub fn count(&self, j: usize, k: usize) -> u64 {
        self.counts[j * self.n_arms + k]
    }

    pub fn local_row(&self, j: usize) -> &[f64] {
        &self.local[j * self.n_arms..(j + 1) * self.n_arms]
    }

    pub fn global_row(&self, j: usize) -> &[f64] {
        &self.global[j * self.n_arms..(j + 1) * self.n_arms]
    }
}

impl GossipState for NswAgentState {
    fn global(&self) -> &[f64] {
        &self.global
    }

    fn local(&self) -> &[f64] {
        &self.local
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NswParams {
    pub n_agents: usize,
    pub n_arms: usize,
    pub explore: ExploreSchedule,
    pub solver: SolverSettings,
}

impl NswParams {
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        Ok(NswParams {
            n_agents: config.n_agents,
            n_arms: config.n_arms,
            explore: config.explore,
            solver: config.solver,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NswVariant {
    /// Simulate for self and this round's neighbors; decide on gossip averages.
    Gossip,
    /// Simulate for every agent; decide on local averages; never mix.
    NoGossip,
    /// Only the own row is simulated; decide on gossip averages.
    NoSim,
}

/// Arm distribution for round `t` from the chosen utility estimates.
fn choose_distribution(
    agent: usize,
    state: &NswAgentState,
    utilities: &[f64],
    t: u64,
    params: &NswParams,
    streams: &mut Streams,
) -> Result<ArmDistribution> {
    let k = params.n_arms;
    if t <= k as u64 {
        return Ok(ArmDistribution::basis(k, (t - 1) as usize));
    }
    let alpha = params.explore.alpha(t);
    let mut bonus = Vec::with_capacity(k);
    for arm in 0..k {
        let n = state.count(agent, arm);
        if n == 0 {
            return Err(Error::ZeroCounter { agent, arm });
        }
        bonus.push(alpha * explore_bonus(t, n, params.n_agents, k));
    }
    // Gossip averages can dip below zero transiently; utilities cannot.
    let rows: Vec<Vec<f64>> = utilities.chunks(k).map(|r| r.iter().map(|x| x.max(0.0)).collect()).collect();
    let (dist, _) = maximize_nsw(&rows, &bonus, &params.solver, &mut streams.solver)?;
    Ok(dist)
}

fn nsw_round(
    variant: NswVariant,
    states: &mut [NswAgentState],
    env: &Environment,
    graph: &RoundGraph,
    w: Option<&WeightMatrix>,
    t: u64,
    params: &NswParams,
    streams: &mut Streams,
) -> Result<Vec<usize>> {
    let (n, k) = (params.n_agents, params.n_arms);
    if states.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: states.len(),
        });
    }
    if graph.n_agents() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: graph.n_agents(),
        });
    }
    let mut reward = vec![0.0; env.n_dims()];
    let mut increments = vec![vec![0.0; n * k]; n];
    let mut arms = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for (i, s) in states.iter_mut().enumerate() {
        let utilities = match variant {
            NswVariant::NoGossip => &s.local,
            NswVariant::Gossip | NswVariant::NoSim => &s.global,
        };
        s.dist = choose_distribution(i, s, utilities, t, params, streams)?;
        let arm = s.dist.sample(&mut streams.action);
        env.sample_into(i, arm, &mut streams.reward, &mut reward);

        targets.clear();
        match variant {
            NswVariant::Gossip => {
                targets.push(i);
                targets.extend_from_slice(graph.neighbors(i));
            }
            NswVariant::NoGossip => targets.extend(0..n),
            NswVariant::NoSim => targets.push(i),
        }
        for &j in &targets {
            let simulated = dot(env.pref(j), &reward);
            let idx = j * k + arm;
            let before = s.counts[idx];
            let old = s.local[idx];
            let new = running_mean(old, before, simulated);
            s.local[idx] = new;
            s.counts[idx] = before + 1;
            increments[i][idx] = new - old;
        }
        arms.push(arm);
    }
    if let Some(w) = w {
        let mixed = {
            let snapshot: Vec<&[f64]> = states.iter().map(|s| s.global.as_slice()).collect();
            gossip_mix(w, &snapshot, &increments)?
        };
        for (s, z) in states.iter_mut().zip(mixed) {
            s.global = z;
        }
    }
    Ok(arms)
}

/// One round of Simulated NSW UCB Gossip. Distributions are left in
/// `states[i].dist`; the sampled arms are returned.
pub fn simulated_nsw_round(
    states: &mut [NswAgentState],
    env: &Environment,
    graph: &RoundGraph,
    w: &WeightMatrix,
    t: u64,
    params: &NswParams,
    streams: &mut Streams,
) -> Result<Vec<usize>> {
    nsw_round(NswVariant::Gossip, states, env, graph, Some(w), t, params, streams)
}

/// Ablation that simulates rewards for every agent but never gossips.
pub fn no_gossip_nsw_round(
    states: &mut [NswAgentState],
    env: &Environment,
    graph: &RoundGraph,
    t: u64,
    params: &NswParams,
    streams: &mut Streams,
) -> Result<Vec<usize>> {
    nsw_round(NswVariant::NoGossip, states, env, graph, None, t, params, streams)
}

/// Ablation that gossips but only ever estimates the agent's own row.
pub fn no_sim_nsw_round(
    states: &mut [NswAgentState],
    env: &Environment,
    graph: &RoundGraph,
    w: &WeightMatrix,
    t: u64,
    params: &NswParams,
    streams: &mut Streams,
) -> Result<Vec<usize>> {
    nsw_round(NswVariant::NoSim, states, env, graph, Some(w), t, params, streams)
}

/// All agents of one NSW learner.
#[derive(Debug, Clone)]
pub struct NswTeam {
    pub variant: NswVariant,
    pub states: Vec<NswAgentState>,
}

impl NswTeam {
    pub fn new(variant: NswVariant, params: &NswParams) -> Self {
        NswTeam {
            variant,
            states: vec![NswAgentState::new(params.n_agents, params.n_arms); params.n_agents],
        }
    }

    pub fn step(
        &mut self,
        env: &Environment,
        graph: &RoundGraph,
        w: &WeightMatrix,
        t: u64,
        params: &NswParams,
        streams: &mut Streams,
    ) -> Result<Vec<usize>> {
        let w = match self.variant {
            NswVariant::NoGossip => None,
            NswVariant::Gossip | NswVariant::NoSim => Some(w),
        };
        nsw_round(self.variant, &mut self.states, env, graph, w, t, params, streams)
    }

    pub fn distributions(&self) -> Vec<ArmDistribution> {
        self.states.iter().map(|s| s.dist.clone()).collect()
    }
}
