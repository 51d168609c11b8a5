//! Confidence radii and exploration bonuses.

use crate::error::{Error, Result};

/// `kappa * 2 sqrt(N) / (1 - sqrt(p))`; zero whenever `kappa` is zero.
pub fn consensus_term(n_agents: usize, link_prob: f64, kappa: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Ok(0.0);
    }
    if link_prob >= 1.0 {
        return Err(Error::InvalidConfig {
            field: "link_prob",
            reason: "p = 1 with a nonzero consensus coefficient divides by zero".into(),
        });
    }
    Ok(kappa * 2.0 * (n_agents as f64).sqrt() / (1.0 - link_prob.sqrt()))
}

/// Pareto UCB radius
/// `sqrt(8 ln(t (D |A*|)^(1/4)) / T_ik) + kappa 2 sqrt(N) / (1 - sqrt(p))`,
/// with the log floored at 1. `front_size_proxy` stands in for `|A*|`.
pub fn exploration_radius(
    t: u64,
    count: u64,
    n_dims: usize,
    front_size_proxy: usize,
    n_agents: usize,
    link_prob: f64,
    kappa: f64,
) -> Result<f64> {
    Ok(sampling_radius(t, count, n_dims, front_size_proxy) + consensus_term(n_agents, link_prob, kappa)?)
}

#[inline]
pub(crate) fn sampling_radius(t: u64, count: u64, n_dims: usize, front_size_proxy: usize) -> f64 {
    let arg = t as f64 * ((n_dims * front_size_proxy) as f64).powf(0.25);
    (8.0 * arg.ln().max(1.0) / count as f64).sqrt()
}

/// Elimination half-width `sqrt(2 ln(T sqrt(D)) / T_ik) + coeff 2 sqrt(N)/(1 - sqrt(p))`.
pub fn elimination_half_width(horizon: u64, count: u64, n_dims: usize, consensus: f64) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    let arg = horizon as f64 * (n_dims as f64).sqrt();
    (2.0 * arg.ln().max(0.0) / count as f64).sqrt() + consensus
}

/// NSW exploration bonus `sqrt(max(0, ln(N K t)) / T_iik)`.
pub fn explore_bonus(t: u64, count: u64, n_agents: usize, n_arms: usize) -> f64 {
    let l = ((n_agents * n_arms) as f64 * t as f64).ln().max(0.0);
    (l / count as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_worked_example() {
        // t=100, T_ik=25, D=3, proxy=8, N=8, p=0.8, kappa=1, evaluated independently.
        let consensus = 2.0 * 8f64.sqrt() / (1.0 - 0.8f64.sqrt());
        // 53.58 exactly; 53.57 when sqrt(0.8) is rounded to 0.8944 first.
        assert!((consensus - 53.57).abs() < 0.02);
        let sampling = (8.0 * (100.0 * 24f64.powf(0.25)).ln() / 25.0).sqrt();
        let r = exploration_radius(100, 25, 3, 8, 8, 0.8, 1.0).unwrap();
        assert!((r - (consensus + sampling)).abs() < 1e-12);
    }

    #[test]
    fn radius_limits() {
        let r = exploration_radius(10, 1 << 40, 2, 2, 4, 0.5, 0.0).unwrap();
        assert!(r < 1e-5);
        let a = exploration_radius(50, 10, 2, 4, 4, 0.5, 0.0).unwrap();
        let b = exploration_radius(50, 20, 2, 4, 4, 0.5, 0.0).unwrap();
        assert!((a / b - 2f64.sqrt()).abs() < 1e-12);
        // log floor keeps the radicand positive at t = 1.
        assert!((exploration_radius(1, 1, 1, 1, 1, 0.5, 0.0).unwrap() - 8f64.sqrt()).abs() < 1e-12);
        assert!(exploration_radius(5, 1, 1, 1, 4, 1.0, 1.0).is_err());
        assert!(exploration_radius(5, 1, 1, 1, 4, 1.0, 0.0).is_ok());
    }

    #[test]
    fn bonus_values() {
        let b = explore_bonus(100, 25, 4, 5);
        assert!((b - (2000f64.ln() / 25.0).sqrt()).abs() < 1e-12);
        assert!((b - 0.5513).abs() < 1e-4);
        assert!((explore_bonus(100, 100, 4, 5) * 2.0 - b).abs() < 1e-12);
        assert!(explore_bonus(100, u64::MAX, 4, 5) < 1e-8);
    }

    #[test]
    fn half_width_shrinks_and_is_infinite_before_first_pull() {
        assert!(elimination_half_width(1000, 0, 2, 0.0).is_infinite());
        let a = elimination_half_width(1000, 10, 2, 0.0);
        let b = elimination_half_width(1000, 40, 2, 0.0);
        assert!((a / b - 2.0).abs() < 1e-12);
    }
}
