//! Pareto UCB1 Gossip and the two Pareto baselines.

use rand::Rng;

use super::radius::{consensus_term, elimination_half_width, sampling_radius};
use super::{running_mean, GossipState, Streams};
use crate::config::ExperimentConfig;
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::network::{gossip_mix, WeightMatrix};
use crate::pareto::{dominates_unchecked, front_unchecked};

/// Counters, local means and gossip averages of one agent; `K x D`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoAgentState {
    pub counts: Vec<u64>,
    pub local: Vec<f64>,
    pub global: Vec<f64>,
    n_dims: usize,
}

impl ParetoAgentState {
    pub fn new(n_arms: usize, n_dims: usize) -> Self {
        ParetoAgentState {
            counts: vec![0; n_arms],
            local: vec![0.0; n_arms * n_dims],
            global: vec![0.0; n_arms * n_dims],
            n_dims,
        }
    }

    pub fn n_arms(&self) -> usize {
        self.counts.len()
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn local_mean(&self, arm: usize) -> &[f64] {
        &self.local[arm * self.n_dims..(arm + 1) * self.n_dims]
    }

    pub fn global_mean(&self, arm: usize) -> &[f64] {
        &self.global[arm * self.n_dims..(arm + 1) * self.n_dims]
    }

    /// Rounds this agent has completed.
    pub fn rounds(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Pulls `arm`, folds the reward into the running mean and writes the
    /// change of the local estimate into `increment` (zero elsewhere).
    fn observe<R: Rng + ?Sized>(
        &mut self,
        env: &Environment,
        agent: usize,
        arm: usize,
        rng: &mut R,
        reward: &mut [f64],
        increment: &mut [f64],
    ) {
        env.sample_into(agent, arm, rng, reward);
        let d = self.n_dims;
        let n = self.counts[arm];
        increment.iter_mut().for_each(|x| *x = 0.0);
        for (c, &x) in reward.iter().enumerate() {
            let idx = arm * d + c;
            let old = self.local[idx];
            let new = running_mean(old, n, x);
            self.local[idx] = new;
            increment[idx] = new - old;
        }
        self.counts[arm] = n + 1;
    }
}

impl GossipState for ParetoAgentState {
    fn global(&self) -> &[f64] {
        &self.global
    }

    fn local(&self) -> &[f64] {
        &self.local
    }
}

/// Pareto state plus the elimination baseline's active arm set.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationAgentState {
    pub core: ParetoAgentState,
    pub active: Vec<bool>,
}

impl EliminationAgentState {
    pub fn new(n_arms: usize, n_dims: usize) -> Self {
        EliminationAgentState {
            core: ParetoAgentState::new(n_arms, n_dims),
            active: vec![true; n_arms],
        }
    }

    pub fn active_arms(&self) -> Vec<usize> {
        (0..self.active.len()).filter(|&k| self.active[k]).collect()
    }
}

impl GossipState for EliminationAgentState {
    fn global(&self) -> &[f64] {
        &self.core.global
    }

    fn local(&self) -> &[f64] {
        &self.core.local
    }
}

/// Shape and radius constants of the Pareto engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoParams {
    pub n_agents: usize,
    pub n_arms: usize,
    pub n_dims: usize,
    pub horizon: u64,
    /// Stand-in for the unknown Pareto-optimal set size in the log term.
    pub front_size_proxy: usize,
    /// Precomputed arm-independent consensus term of the UCB radius.
    pub consensus: f64,
    /// Precomputed consensus term of the elimination half-width.
    pub elim_consensus: f64,
}

impl ParetoParams {
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        Ok(ParetoParams {
            n_agents: config.n_agents,
            n_arms: config.n_arms,
            n_dims: config.n_dims,
            horizon: config.horizon,
            front_size_proxy: config.n_arms,
            consensus: consensus_term(config.n_agents, config.link_prob, config.consensus_coeff)?,
            elim_consensus: consensus_term(config.n_agents, config.link_prob, config.elim_consensus_coeff)?,
        })
    }
}

/// Non-dominated arms of the UCB vectors `estimate_k + radius_k * 1`.
///
/// `estimates` is `K x D` row-major; every count must be positive.
pub fn ucb_candidate_set(estimates: &[f64], counts: &[u64], t: u64, params: &ParetoParams, consensus: f64) -> Vec<usize> {
    let d = params.n_dims;
    let ucb: Vec<Vec<f64>> = counts
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let c = sampling_radius(t, n, d, params.front_size_proxy) + consensus;
            estimates[k * d..(k + 1) * d].iter().map(|z| z + c).collect()
        })
        .collect();
    front_unchecked(&ucb)
}

fn ucb_action<R: Rng + ?Sized>(
    estimates: &[f64],
    counts: &[u64],
    t: u64,
    params: &ParetoParams,
    consensus: f64,
    rng: &mut R,
) -> usize {
    if t <= params.n_arms as u64 {
        return (t - 1) as usize;
    }
    let set = ucb_candidate_set(estimates, counts, t, params, consensus);
    set[rng.random_range(0..set.len())]
}

fn mix_all<S>(states: &mut [S], w: &WeightMatrix, increments: &[Vec<f64>], global: impl Fn(&mut S) -> &mut Vec<f64>) -> Result<()>
where
    S: GossipState,
{
    let mixed = {
        let snapshot: Vec<&[f64]> = states.iter().map(GossipState::global).collect();
        gossip_mix(w, &snapshot, increments)?
    };
    for (s, z) in states.iter_mut().zip(mixed) {
        *global(s) = z;
    }
    Ok(())
}

fn check_shape(n_states: usize, w: Option<&WeightMatrix>, params: &ParetoParams) -> Result<()> {
    if n_states != params.n_agents {
        return Err(Error::DimensionMismatch {
            expected: params.n_agents,
            found: n_states,
        });
    }
    if let Some(w) = w {
        if w.n() != n_states {
            return Err(Error::DimensionMismatch {
                expected: n_states,
                found: w.n(),
            });
        }
    }
    Ok(())
}

/// One round of Pareto UCB1 Gossip; returns each agent's arm (0-based).
pub fn pareto_ucb_gossip_round(
    states: &mut [ParetoAgentState],
    env: &Environment,
    w: &WeightMatrix,
    t: u64,
    params: &ParetoParams,
    streams: &mut Streams,
) -> Result<Vec<usize>> {
    check_shape(states.len(), Some(w), params)?;
    let kd = params.n_arms * params.n_dims;
    let mut reward = vec![0.0; params.n_dims];
    let mut increments = vec![vec![0.0; kd]; states.len()];
    let mut arms = Vec::with_capacity(states.len());
    for (i, s) in states.iter_mut().enumerate() {
        let arm = ucb_action(&s.global, &s.counts, t, params, params.consensus, &mut streams.action);
        s.observe(env, i, arm, &mut streams.reward, &mut reward, &mut increments[i]);
        arms.push(arm);
    }
    mix_all(states, w, &increments, |s| &mut s.global)?;
    Ok(arms)
}

/// N independent Pareto UCB1 learners on their own local means; no radius
/// consensus term, no mixing.
pub fn independent_pareto_ucb_round(
    states: &mut [ParetoAgentState],
    env: &Environment,
    t: u64,
    params: &ParetoParams,
    streams: &mut Streams,
) -> Result<Vec<usize>> {
    check_shape(states.len(), None, params)?;
    let mut reward = vec![0.0; params.n_dims];
    let mut increment = vec![0.0; params.n_arms * params.n_dims];
    let mut arms = Vec::with_capacity(states.len());
    for (i, s) in states.iter_mut().enumerate() {
        let arm = ucb_action(&s.local, &s.counts, t, params, 0.0, &mut streams.action);
        s.observe(env, i, arm, &mut streams.reward, &mut reward, &mut increment);
        arms.push(arm);
    }
    Ok(arms)
}

/// Multi-objective gossip successive elimination. Each agent pulls its least
/// pulled active arm, estimates are mixed as in Pareto UCB1 Gossip, and an arm
/// leaves the active set once its upper-bound vector is dominated by the
/// lower-bound vector of an arm on the lower-bound Pareto front.
pub fn mo_gossip_elimination_round(
    states: &mut [EliminationAgentState],
    env: &Environment,
    w: &WeightMatrix,
    _t: u64,
    params: &ParetoParams,
    streams: &mut Streams,
) -> Result<Vec<usize>> {
    check_shape(states.len(), Some(w), params)?;
    let kd = params.n_arms * params.n_dims;
    let mut reward = vec![0.0; params.n_dims];
    let mut increments = vec![vec![0.0; kd]; states.len()];
    let mut arms = Vec::with_capacity(states.len());
    for (i, s) in states.iter_mut().enumerate() {
        let arm = (0..params.n_arms)
            .filter(|&k| s.active[k])
            .min_by_key(|&k| (s.core.counts[k], k))
            .ok_or(Error::EmptyActiveSet { agent: i })?;
        s.core.observe(env, i, arm, &mut streams.reward, &mut reward, &mut increments[i]);
        arms.push(arm);
    }
    mix_all(states, w, &increments, |s| &mut s.core.global)?;
    for (i, s) in states.iter_mut().enumerate() {
        eliminate(s, params);
        if !s.active.iter().any(|a| *a) {
            return Err(Error::EmptyActiveSet { agent: i });
        }
    }
    Ok(arms)
}

fn eliminate(s: &mut EliminationAgentState, params: &ParetoParams) {
    let active = s.active_arms();
    if active.iter().any(|&k| s.core.counts[k] == 0) {
        return;
    }
    let d = params.n_dims;
    let bounds = |sign: f64| -> Vec<Vec<f64>> {
        active
            .iter()
            .map(|&k| {
                let h = elimination_half_width(params.horizon, s.core.counts[k], d, params.elim_consensus);
                s.core.global_mean(k).iter().map(|z| z + sign * h).collect()
            })
            .collect()
    };
    let lower = bounds(-1.0);
    let upper = bounds(1.0);
    let front = front_unchecked(&lower);
    for (pos, &k) in active.iter().enumerate() {
        if front.iter().any(|&f| dominates_unchecked(&lower[f], &upper[pos])) {
            s.active[k] = false;
        }
    }
}

/// Which Pareto learner a team runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParetoVariant {
    Gossip,
    Independent,
    Elimination,
}

/// All agents of one Pareto learner.
#[derive(Debug, Clone)]
pub enum ParetoTeam {
    Gossip(Vec<ParetoAgentState>),
    Independent(Vec<ParetoAgentState>),
    Elimination(Vec<EliminationAgentState>),
}

impl ParetoTeam {
    pub fn new(variant: ParetoVariant, params: &ParetoParams) -> Self {
        let (n, k, d) = (params.n_agents, params.n_arms, params.n_dims);
        match variant {
            ParetoVariant::Gossip => ParetoTeam::Gossip(vec![ParetoAgentState::new(k, d); n]),
            ParetoVariant::Independent => ParetoTeam::Independent(vec![ParetoAgentState::new(k, d); n]),
            ParetoVariant::Elimination => ParetoTeam::Elimination(vec![EliminationAgentState::new(k, d); n]),
        }
    }

    pub fn step(
        &mut self,
        env: &Environment,
        w: &WeightMatrix,
        t: u64,
        params: &ParetoParams,
        streams: &mut Streams,
    ) -> Result<Vec<usize>> {
        match self {
            ParetoTeam::Gossip(s) => pareto_ucb_gossip_round(s, env, w, t, params, streams),
            ParetoTeam::Independent(s) => independent_pareto_ucb_round(s, env, t, params, streams),
            ParetoTeam::Elimination(s) => mo_gossip_elimination_round(s, env, w, t, params, streams),
        }
    }

    pub fn agents(&self) -> Vec<&ParetoAgentState> {
        match self {
            ParetoTeam::Gossip(s) | ParetoTeam::Independent(s) => s.iter().collect(),
            ParetoTeam::Elimination(s) => s.iter().map(|e| &e.core).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::seed::derive_stream;
    use crate::network::{build_weight_matrix, sample_round_graph, BaseGraph};
    use crate::pareto::pareto_front;
    use proptest::prelude::*;

    fn streams(seed: u64) -> Streams {
        Streams {
            action: derive_stream(seed, 0, 0, "action"),
            reward: derive_stream(seed, 0, 0, "reward"),
            solver: derive_stream(seed, 0, 0, "solver"),
        }
    }

    fn params(n: usize, k: usize, d: usize, horizon: u64, kappa: f64) -> ParetoParams {
        let mut c = ExperimentConfig::with_shape(n, k, d, horizon, 0.5, 0.1, 1);
        c.consensus_coeff = kappa;
        ParetoParams::from_config(&c).unwrap()
    }

    fn two_agent_env() -> Environment {
        Environment::from_parts(
            vec![
                vec![vec![0.8, 0.3], vec![0.3, 0.8], vec![0.2, 0.2]],
                vec![vec![0.6, 0.5], vec![0.5, 0.6], vec![0.4, 0.3]],
            ],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        )
        .unwrap()
    }

    #[test]
    fn warm_up_pulls_each_arm_in_order() {
        let env = two_agent_env();
        let p = params(2, 3, 2, 50, 1.0);
        for seed in 0..5 {
            let mut team = ParetoTeam::new(ParetoVariant::Gossip, &p);
            let mut st = streams(seed);
            let w = WeightMatrix::identity(2);
            for t in 1..=3 {
                assert_eq!(team.step(&env, &w, t, &p, &mut st).unwrap(), vec![t as usize - 1; 2]);
            }
        }
    }

    #[test]
    fn single_agent_single_arm_tracks_running_mean() {
        let env = Environment::from_parts(vec![vec![vec![0.4, 0.7]]], vec![vec![0.5, 0.5]]).unwrap();
        let p = params(1, 1, 2, 500, 1.0);
        let mut states = vec![ParetoAgentState::new(1, 2)];
        let mut st = streams(1);
        let w = WeightMatrix::identity(1);
        for t in 1..=500 {
            pareto_ucb_gossip_round(&mut states, &env, &w, t, &p, &mut st).unwrap();
            for (z, m) in states[0].global.iter().zip(&states[0].local) {
                assert!((z - m).abs() < 1e-12);
            }
        }
        assert_eq!(states[0].counts, vec![500]);
    }

    #[test]
    fn candidate_set_ignores_uniform_offset() {
        let p = params(4, 4, 2, 100, 1.0);
        let z = [0.3, 0.6, 0.6, 0.3, 0.2, 0.2, 0.5, 0.5];
        let counts = [10, 20, 5, 40];
        let base = ucb_candidate_set(&z, &counts, 50, &p, 0.0);
        let shifted: Vec<f64> = z.iter().map(|x| x + 0.37).collect();
        assert_eq!(ucb_candidate_set(&shifted, &counts, 50, &p, 0.0), base);
        assert_eq!(ucb_candidate_set(&z, &counts, 50, &p, p.consensus), base);
    }

    #[test]
    fn counters_are_conserved() {
        let env = two_agent_env();
        let p = params(2, 3, 2, 300, 1.0);
        let base = BaseGraph::complete(2);
        let mut graph_rng = derive_stream(3, 0, 0, "graph");
        let mut team = ParetoTeam::new(ParetoVariant::Gossip, &p);
        let mut st = streams(3);
        for t in 1..=300 {
            let w = build_weight_matrix(&sample_round_graph(&base, 0.5, &mut graph_rng));
            let before: Vec<Vec<f64>> = team.agents().iter().map(|a| a.local.clone()).collect();
            let arms = team.step(&env, &w, t, &p, &mut st).unwrap();
            for (i, a) in team.agents().iter().enumerate() {
                assert_eq!(a.rounds(), t);
                for k in 0..3 {
                    if k != arms[i] {
                        assert_eq!(a.local_mean(k), &before[i][k * 2..k * 2 + 2]);
                    }
                }
            }
        }
    }

    #[test]
    fn single_agent_independent_matches_gossip_without_consensus() {
        let env = Environment::from_parts(
            vec![vec![vec![0.7, 0.2], vec![0.3, 0.6], vec![0.2, 0.1], vec![0.5, 0.5]]],
            vec![vec![1.0, 0.0]],
        )
        .unwrap();
        let p = params(1, 4, 2, 2000, 0.0);
        let w = WeightMatrix::identity(1);
        let mut a = ParetoTeam::new(ParetoVariant::Gossip, &p);
        let mut b = ParetoTeam::new(ParetoVariant::Independent, &p);
        let (mut sa, mut sb) = (streams(4), streams(4));
        for t in 1..=2000 {
            assert_eq!(
                a.step(&env, &w, t, &p, &mut sa).unwrap(),
                b.step(&env, &w, t, &p, &mut sb).unwrap(),
                "diverged at round {t}"
            );
        }
    }

    #[test]
    fn independent_learners_see_their_own_fronts() {
        // Agent 0 thinks arm 0 dominates arm 1; agent 1 thinks the reverse;
        // the centered means make both arms optimal.
        let env = Environment::from_parts(
            vec![
                vec![vec![0.9, 0.9], vec![0.5, 0.5]],
                vec![vec![0.1, 0.1], vec![0.5, 0.5]],
            ],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        )
        .unwrap();
        let centered = pareto_front(&env.centered_means()).unwrap();
        assert_eq!(centered, vec![0, 1]);
        let p = params(2, 2, 2, 5000, 0.0);
        let mut team = ParetoTeam::new(ParetoVariant::Independent, &p);
        let mut st = streams(5);
        let w = WeightMatrix::identity(2);
        for t in 1..=5000 {
            team.step(&env, &w, t, &p, &mut st).unwrap();
        }
        let agents = team.agents();
        assert!(agents[0].counts[0] > 4 * agents[0].counts[1]);
        assert!(agents[1].counts[1] > 4 * agents[1].counts[0]);
    }

    #[test]
    fn elimination_pulls_least_counted_active_arm() {
        let env = two_agent_env();
        let p = params(2, 3, 2, 1000, 0.0);
        let mut states = vec![EliminationAgentState::new(3, 2); 2];
        let mut st = streams(6);
        let w = WeightMatrix::identity(2);
        assert_eq!(mo_gossip_elimination_round(&mut states, &env, &w, 1, &p, &mut st).unwrap(), vec![0, 0]);
        assert_eq!(mo_gossip_elimination_round(&mut states, &env, &w, 2, &p, &mut st).unwrap(), vec![1, 1]);
    }

    #[test]
    fn huge_half_widths_never_eliminate() {
        let env = two_agent_env();
        let mut p = params(2, 3, 2, 2000, 0.0);
        p.elim_consensus = 50.0;
        let mut states = vec![EliminationAgentState::new(3, 2); 2];
        let mut st = streams(7);
        let w = build_weight_matrix(&sample_round_graph(&BaseGraph::complete(2), 1.0, &mut st.action));
        for t in 1..=2000 {
            mo_gossip_elimination_round(&mut states, &env, &w, t, &p, &mut st).unwrap();
        }
        assert!(states.iter().all(|s| s.active.iter().all(|a| *a)));
    }

    #[test]
    fn clearly_dominated_arm_is_eliminated_by_everyone() {
        let env = Environment::from_parts(
            vec![
                vec![vec![0.9, 0.85], vec![0.15, 0.1]],
                vec![vec![0.8, 0.95], vec![0.05, 0.2]],
                vec![vec![0.85, 0.9], vec![0.1, 0.15]],
            ],
            vec![vec![0.5, 0.5]; 3],
        )
        .unwrap();
        let p = params(3, 2, 2, 5000, 0.0);
        let base = BaseGraph::complete(3);
        let mut st = streams(8);
        let mut graph_rng = derive_stream(8, 0, 0, "graph");
        let mut states = vec![EliminationAgentState::new(2, 2); 3];
        for t in 1..=5000 {
            let w = build_weight_matrix(&sample_round_graph(&base, 0.5, &mut graph_rng));
            mo_gossip_elimination_round(&mut states, &env, &w, t, &p, &mut st).unwrap();
        }
        for s in &states {
            assert_eq!(s.active, vec![true, false]);
        }
    }

    proptest! {
        #[test]
        fn consensus_offset_never_changes_candidates(
            z in proptest::collection::vec(0.0f64..1.0, 12),
            counts in proptest::collection::vec(1u64..500, 4),
            t in 5u64..10_000,
        ) {
            let p = params(8, 4, 3, 20_000, 1.0);
            prop_assert_eq!(
                ucb_candidate_set(&z, &counts, t, &p, 0.0),
                ucb_candidate_set(&z, &counts, t, &p, p.consensus)
            );
        }
    }
}
