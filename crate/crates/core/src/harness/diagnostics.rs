//! Consensus and estimator diagnostics over a team's agent states.

use crate::algorithms::GossipState;

fn agent_average<S: GossipState>(states: &[S], pick: impl Fn(&S) -> &[f64]) -> Vec<f64> {
    let len = states.first().map_or(0, |s| pick(s).len());
    let mut avg = vec![0.0; len];
    for s in states {
        for (a, x) in avg.iter_mut().zip(pick(s)) {
            *a += x;
        }
    }
    avg.iter_mut().for_each(|a| *a /= states.len() as f64);
    avg
}

/// `max_{i, c} |z_i[c] - zbar[c]|` where `zbar` is the agent average of the
/// gossip estimates.
pub fn consensus_diagnostic<S: GossipState>(states: &[S]) -> f64 {
    let avg = agent_average(states, GossipState::global);
    states
        .iter()
        .flat_map(|s| s.global().iter().zip(&avg).map(|(z, m)| (z - m).abs()))
        .fold(0.0, f64::max)
}

/// `max_c |avg_i z_i[c] - avg_i muhat_i[c]|`. After every mixing round the
/// network average of the gossip estimates equals the network average of the
/// local estimates exactly, provided the weight matrices are doubly stochastic.
pub fn unbiasedness_diagnostic<S: GossipState>(states: &[S]) -> f64 {
    let z = agent_average(states, GossipState::global);
    let m = agent_average(states, GossipState::local);
    z.iter().zip(&m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}
