//! The `check` command: structural and diagnostic checks on a small instance.

use momab_core::harness::seed::derive_stream;
use momab_core::network::{build_weight_matrix, estimate_spectral_gap, sample_round_graph};
use momab_core::pareto::{dominates, eps_distance, pareto_front};
use momab_core::{run_trial, AlgorithmId, BaseGraph, ExperimentConfig};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

pub fn run_checks(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();

    let base = BaseGraph::complete(5);
    let mut rng = derive_stream(seed, 0, 0, "check-graph");
    let (mut stoch, mut asym) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let p = rng.random::<f64>();
        let w = build_weight_matrix(&sample_round_graph(&base, p, &mut rng));
        stoch = stoch.max(w.stochasticity_error());
        asym = asym.max(w.asymmetry());
    }
    out.push(check(
        "weight matrices doubly stochastic and symmetric",
        stoch <= 1e-12 && asym <= 1e-12,
        format!("row/column error {stoch:.2e}, asymmetry {asym:.2e}"),
    ));

    let gap = estimate_spectral_gap(&base, 0.5, 2000, &mut rng);
    out.push(match gap {
        Ok(rho) => check("spectral gap below one", rho < 1.0, format!("rho = {rho:.4}")),
        Err(e) => check("spectral gap below one", false, e.to_string()),
    });

    let mut front_ok = true;
    for _ in 0..200 {
        let pts: Vec<Vec<f64>> = (0..6).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
        let front = pareto_front(&pts).unwrap_or_default();
        front_ok &= !front.is_empty();
        for &i in &front {
            front_ok &= eps_distance(&pts[i], &pts).is_ok_and(|d| d == 0.0);
            front_ok &= pts.iter().all(|q| !dominates(q, &pts[i]).unwrap_or(true));
        }
    }
    out.push(check("pareto fronts non-dominated with zero gap", front_ok, "200 random sets".into()));

    let mut cfg = ExperimentConfig::with_shape(3, 3, 2, 300, 0.5, 0.2, 1);
    cfg.master_seed = seed;
    cfg.record_every = 10;
    for alg in AlgorithmId::ALL {
        let a = run_trial(&cfg, alg, 0);
        let b = run_trial(&cfg, alg, 0);
        let (passed, detail) = match (&a, &b) {
            (Ok(x), Ok(y)) => (
                x == y && (!alg.mixes() || x.diagnostics.max_unbiasedness <= 1e-10),
                format!(
                    "final regret {:.4}, mixing identity deviation {:.2e}",
                    x.final_regret(),
                    x.diagnostics.max_unbiasedness
                ),
            ),
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        };
        out.push(CheckResult {
            name: alg.name(),
            passed,
            detail,
        });
    }
    out
}
