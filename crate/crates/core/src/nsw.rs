//! Nash Social Welfare: evaluation, the simplex-constrained maximizer and
//! the NSW regret benchmark.
//!
//! The maximizer is projected gradient ascent with step `0.5 / sqrt(s)`,
//! started from the uniform distribution and from Dirichlet(1) draws. With a
//! zero bonus the log of the objective is concave, so every restart reaches
//! the same optimum; the exploration bonus breaks concavity, which is what
//! the restarts are for.

use rand::Rng;

use crate::config::SolverSettings;
use crate::environment::sample_flat_dirichlet;
use crate::error::{Error, Result};

/// Utilities are floored here before entering products.
pub const UTILITY_FLOOR: f64 = 1e-12;
const GRAD_FLOOR: f64 = 1e-12;
const STEP0: f64 = 0.5;

/// A point of the probability simplex over arms.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmDistribution {
    probs: Vec<f64>,
}

impl ArmDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput("arm distribution"));
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig {
                field: "probs",
                reason: format!("{probs:?} is not on the simplex"),
            });
        }
        Ok(ArmDistribution { probs })
    }

    pub fn uniform(k: usize) -> Self {
        ArmDistribution {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn basis(k: usize, arm: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[arm] = 1.0;
        ArmDistribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Inverse-CDF draw; the last arm with positive mass absorbs rounding.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (k, &p) in self.probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = k;
            if u < acc {
                return k;
            }
        }
        last
    }
}

fn check_matrix<R: AsRef<[f64]>>(p_len: usize, u: &[R]) -> Result<()> {
    for row in u {
        if row.as_ref().len() != p_len {
            return Err(Error::DimensionMismatch {
                expected: p_len,
                found: row.as_ref().len(),
            });
        }
    }
    Ok(())
}

/// `prod_j (sum_k p_k U_{j,k})`.
pub fn nsw_value<R: AsRef<[f64]>>(p: &ArmDistribution, u: &[R]) -> Result<f64> {
    check_matrix(p.len(), u)?;
    Ok(nsw_raw(p.probs(), u))
}

fn utility(p: &[f64], row: &[f64]) -> f64 {
    p.iter().zip(row).map(|(a, b)| a * b).sum()
}

fn nsw_raw<R: AsRef<[f64]>>(p: &[f64], u: &[R]) -> f64 {
    u.iter().map(|row| utility(p, row.as_ref())).product()
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_to_simplex(v: &[f64]) -> Result<ArmDistribution> {
    if v.is_empty() {
        return Err(Error::EmptyInput("project_to_simplex"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("project_to_simplex input"));
    }
    Ok(ArmDistribution {
        probs: project_raw(v),
    })
}

fn project_raw(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    // Renormalize away rounding so membership holds to machine precision.
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    out
}

/// `NSW(p, U) + bonus . p`.
pub fn objective<R: AsRef<[f64]>>(p: &[f64], u: &[R], bonus: &[f64]) -> f64 {
    nsw_raw(p, u) + utility(p, bonus)
}

fn gradient<R: AsRef<[f64]>>(p: &[f64], u: &[R], bonus: &[f64], utils: &mut [f64], grad: &mut [f64]) {
    let n = u.len();
    for (uj, row) in utils.iter_mut().zip(u) {
        *uj = utility(p, row.as_ref()).max(UTILITY_FLOOR);
    }
    grad.copy_from_slice(bonus);
    for j in 0..n {
        let others: f64 = utils.iter().enumerate().filter(|(l, _)| *l != j).map(|(_, x)| x).product();
        for (g, ujk) in grad.iter_mut().zip(u[j].as_ref()) {
            *g += ujk * others;
        }
    }
}

fn ascend<R: AsRef<[f64]>>(start: Vec<f64>, u: &[R], bonus: &[f64], settings: &SolverSettings) -> Result<(Vec<f64>, f64)> {
    let k = start.len();
    let mut utils = vec![0.0; u.len()];
    let mut grad = vec![0.0; k];
    let mut p = start;
    let mut f = objective(&p, u, bonus);
    if !f.is_finite() {
        return Err(Error::NonFinite("NSW objective"));
    }
    let mut best = (p.clone(), f);
    let mut step = vec![0.0; k];
    // Steps are scaled by the starting gradient so the schedule does not
    // depend on the magnitude of the utilities.
    gradient(&p, u, bonus, &mut utils, &mut grad);
    let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs())).max(GRAD_FLOOR);
    for s in 1..=settings.max_iters {
        gradient(&p, u, bonus, &mut utils, &mut grad);
        let eta = STEP0 / (scale * (s as f64).sqrt());
        for ((x, pk), g) in step.iter_mut().zip(&p).zip(&grad) {
            *x = pk + eta * g;
        }
        let next = project_raw(&step);
        let f_next = objective(&next, u, bonus);
        if !f_next.is_finite() {
            return Err(Error::NonFinite("NSW objective"));
        }
        let moved = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let improvement = (f_next - f).abs();
        p = next;
        f = f_next;
        if f > best.1 {
            best = (p.clone(), f);
        }
        if improvement < settings.tol && moved < settings.tol.sqrt() {
            break;
        }
    }
    Ok(best)
}

/// Maximizes `NSW(p, U) + bonus . p` over the simplex. Returns the best
/// iterate over all restarts together with its objective value.
pub fn maximize_nsw<M: AsRef<[f64]>, R: Rng + ?Sized>(
    u: &[M],
    bonus: &[f64],
    settings: &SolverSettings,
    rng: &mut R,
) -> Result<(ArmDistribution, f64)> {
    let k = bonus.len();
    if k == 0 {
        return Err(Error::EmptyInput("maximize_nsw arms"));
    }
    check_matrix(k, u)?;
    if u.iter().flat_map(|r| r.as_ref()).chain(bonus).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("maximize_nsw input"));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for r in 0..settings.restarts.max(1) {
        let start = if r == 0 {
            vec![1.0 / k as f64; k]
        } else {
            sample_flat_dirichlet(k, rng)
        };
        let cand = ascend(start, u, bonus, settings)?;
        if best.as_ref().is_none_or(|b| cand.1 > b.1) {
            best = Some(cand);
        }
    }
    // Decaying steps crawl along nearly flat faces; vertices are cheap to check.
    for v in 0..k {
        let mut e = vec![0.0; k];
        e[v] = 1.0;
        let f = objective(&e, u, bonus);
        if best.as_ref().is_none_or(|b| f > b.1) {
            best = Some((e, f));
        }
    }
    let (probs, value) = best.expect("at least one restart");
    Ok((ArmDistribution { probs }, value))
}

/// Benchmark distribution `p*` for the centered scalar means.
#[derive(Debug, Clone, PartialEq)]
pub struct NswBenchmark {
    pub p_star: ArmDistribution,
    pub nsw_star: f64,
    pub utilities: Vec<Vec<f64>>,
    /// Slack allowed when an agent's NSW exceeds `nsw_star`.
    pub tol: f64,
}

const POLISH_ITERS: usize = 200_000;

/// Maximizes NSW with zero bonus, then polishes the result with
/// multiplicative fixed-point updates `p_k <- p_k * (1/N) sum_j U_jk / u_j(p)`,
/// which ascend the (concave) log-objective monotonically.
pub fn optimal_distribution<R: Rng + ?Sized>(
    utilities: &[Vec<f64>],
    settings: &SolverSettings,
    rng: &mut R,
) -> Result<NswBenchmark> {
    let n = utilities.len();
    let k = utilities.first().map_or(0, Vec::len);
    if n == 0 || k == 0 {
        return Err(Error::EmptyInput("optimal_distribution utilities"));
    }
    if utilities.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidConfig {
            field: "utilities",
            reason: "entries must lie in [0, 1]".into(),
        });
    }
    let zero = vec![0.0; k];
    let (pga, pga_value) = maximize_nsw(utilities, &zero, settings, rng)?;

    // Start the polish from an interior point so no arm is frozen at zero.
    let mut p: Vec<f64> = pga.probs().iter().map(|x| 0.9 * x + 0.1 / k as f64).collect();
    let mut value = nsw_raw(&p, utilities);
    let mut utils = vec![0.0; n];
    for _ in 0..POLISH_ITERS {
        for (uj, row) in utils.iter_mut().zip(utilities) {
            *uj = utility(&p, row).max(UTILITY_FLOOR);
        }
        let mut next: Vec<f64> = (0..k)
            .map(|c| p[c] * utilities.iter().zip(&utils).map(|(row, uj)| row[c] / uj).sum::<f64>() / n as f64)
            .collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let next_value = nsw_raw(&next, utilities);
        let moved = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        p = next;
        value = next_value;
        if moved < 1e-15 {
            break;
        }
    }
    let (p_star, nsw_star) = if value >= pga_value {
        (ArmDistribution { probs: p }, value)
    } else {
        (pga, pga_value)
    };
    Ok(NswBenchmark {
        p_star,
        nsw_star,
        utilities: utilities.to_vec(),
        tol: settings.tol,
    })
}

/// `sum_i (NSW* - NSW(p_i, mu_bar))`. Terms slightly below zero (within
/// `10 * tol`) are clamped; anything lower means the benchmark is not optimal.
pub fn nsw_regret_step(bench: &NswBenchmark, dists: &[ArmDistribution]) -> Result<f64> {
    let mut total = 0.0;
    for (agent, d) in dists.iter().enumerate() {
        let term = bench.nsw_star - nsw_value(d, &bench.utilities)?;
        if term < -10.0 * bench.tol {
            return Err(Error::BrokenBenchmark { agent, term });
        }
        total += term.max(0.0);
    }
    Ok(total)
}
