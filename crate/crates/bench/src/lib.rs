//! Fixtures shared by the benchmarks.

use momab_core::harness::seed::{derive_stream, StreamRng};
use momab_core::{ExperimentConfig, TrialRun};
use rand::Rng;

pub fn rng(tag: &str) -> StreamRng {
    derive_stream(0, 0, 0, tag)
}

/// `rows x cols` matrix of uniform draws.
pub fn uniform_matrix(rows: usize, cols: usize, rng: &mut StreamRng) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.random()).collect()).collect()
}

/// A run advanced past warm-up so every step takes the steady-state path.
pub fn warmed_run(config: &ExperimentConfig, algorithm: momab_core::AlgorithmId, rounds: u64) -> TrialRun {
    let mut c = config.clone();
    c.horizon = u64::MAX / 2;
    c.record_every = u64::MAX / 4;
    let mut run = TrialRun::new(&c, algorithm, 0).expect("valid bench config");
    for _ in 0..rounds {
        run.step().expect("warm-up step");
    }
    run
}
