//! Communication layer: base graph, per-round Erdős–Rényi subgraphs, the
//! doubly stochastic weight matrix, and the gossip mixing step.

use std::collections::BTreeSet;

use rand::Rng;

use crate::config::BaseGraphSpec;
use crate::error::{Error, Result};

/// Undirected, loop-free communication graph over agents `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    n_agents: usize,
    edges: Vec<(usize, usize)>,
}

impl BaseGraph {
    pub fn complete(n_agents: usize) -> Self {
        let edges = (0..n_agents)
            .flat_map(|a| (a + 1..n_agents).map(move |b| (a, b)))
            .collect();
        BaseGraph { n_agents, edges }
    }

    /// Builds a graph from an edge list; duplicates are merged, the graph must be connected.
    pub fn from_edges(n_agents: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::EmptyInput("base graph"));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n_agents || b >= n_agents {
                return Err(Error::IndexOutOfRange {
                    what: "agent",
                    index: a.max(b),
                    len: n_agents,
                });
            }
            if a == b {
                return Err(Error::InvalidConfig {
                    field: "base_graph",
                    reason: format!("self-loop on agent {a}"),
                });
            }
            set.insert((a.min(b), a.max(b)));
        }
        let graph = BaseGraph {
            n_agents,
            edges: set.into_iter().collect(),
        };
        if !graph.is_connected() {
            return Err(Error::InvalidConfig {
                field: "base_graph",
                reason: "graph is not connected".into(),
            });
        }
        Ok(graph)
    }

    pub fn from_spec(spec: &BaseGraphSpec, n_agents: usize) -> Result<Self> {
        match spec {
            BaseGraphSpec::Complete => Ok(Self::complete(n_agents)),
            BaseGraphSpec::Edges(edges) => Self::from_edges(n_agents, edges),
        }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n_agents];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.n_agents];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Graph active during one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundGraph {
    neighbors: Vec<Vec<usize>>,
}

impl RoundGraph {
    pub fn empty(n_agents: usize) -> Self {
        RoundGraph {
            neighbors: vec![Vec::new(); n_agents],
        }
    }

    pub fn from_edges(n_agents: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n_agents);
        for (a, b) in edges {
            g.neighbors[a].push(b);
            g.neighbors[b].push(a);
        }
        g.neighbors.iter_mut().for_each(|n| n.sort_unstable());
        g
    }

    pub fn n_agents(&self) -> usize {
        self.neighbors.len()
    }

    /// Sorted neighbor ids of `agent`.
    pub fn neighbors(&self, agent: usize) -> &[usize] {
        &self.neighbors[agent]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }
}

/// Keeps each base edge independently with probability `p`.
pub fn sample_round_graph<R: Rng + ?Sized>(base: &BaseGraph, p: f64, rng: &mut R) -> RoundGraph {
    let kept = base.edges().iter().copied().filter(|_| p >= 1.0 || rng.random::<f64>() < p);
    RoundGraph::from_edges(base.n_agents(), kept.collect::<Vec<_>>())
}

/// Dense `N x N` mixing matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl WeightMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        (0..n).for_each(|i| entries[i * n + i] = 1.0);
        WeightMatrix { n, entries }
    }

    /// Arbitrary matrix, no stochasticity checks. Diagnostics use this to
    /// inject deliberately broken mixing.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(WeightMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Largest absolute deviation of any row sum or column sum from 1.
    pub fn stochasticity_error(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let row: f64 = self.row(i).iter().sum();
            let col: f64 = (0..n).map(|r| self.get(r, i)).sum();
            worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        worst
    }

    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn square(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * self.get(l, j);
                }
            }
        }
        out
    }
}

/// Neighbors get `1/N` each; the agent keeps `1 - |N_i|/N`.
pub fn build_weight_matrix(g: &RoundGraph) -> WeightMatrix {
    let n = g.n_agents();
    let share = 1.0 / n as f64;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        let nbrs = g.neighbors(i);
        for &j in nbrs {
            entries[i * n + j] = share;
        }
        entries[i * n + i] = 1.0 - nbrs.len() as f64 / n as f64;
    }
    WeightMatrix { n, entries }
}

/// `out_i = sum_j W_ij * values_j + increments_i`, coordinatewise.
///
/// Reads only the given snapshot, so every agent mixes against the same
/// pre-round values.
pub fn gossip_mix<V: AsRef<[f64]>, I: AsRef<[f64]>>(
    w: &WeightMatrix,
    values: &[V],
    increments: &[I],
) -> Result<Vec<Vec<f64>>> {
    let n = w.n();
    if values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: values.len(),
        });
    }
    if increments.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: increments.len(),
        });
    }
    let len = values.first().map_or(0, |v| v.as_ref().len());
    for v in values.iter().map(AsRef::as_ref).chain(increments.iter().map(AsRef::as_ref)) {
        if v.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: v.len(),
            });
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = increments[i].as_ref().to_vec();
        for (j, &wij) in w.row(i).iter().enumerate() {
            if wij == 0.0 {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(values[j].as_ref()) {
                *a += wij * v;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Monte-Carlo estimate of `E[W^2]` over `n_samples` round graphs.
pub fn expected_square<R: Rng + ?Sized>(base: &BaseGraph, p: f64, n_samples: usize, rng: &mut R) -> Vec<f64> {
    let n = base.n_agents();
    let mut acc = vec![0.0; n * n];
    for _ in 0..n_samples {
        let w = build_weight_matrix(&sample_round_graph(base, p, rng));
        for (a, x) in acc.iter_mut().zip(w.square()) {
            *a += x;
        }
    }
    acc.iter_mut().for_each(|a| *a /= n_samples as f64);
    acc
}

const POWER_MAX_ITERS: usize = 100_000;
const POWER_TOL: f64 = 1e-13;

/// Second-largest eigenvalue magnitude of a symmetric doubly stochastic
/// `n x n` matrix, by power iteration restricted to the complement of the
/// all-ones vector.
pub fn second_eigenvalue(m: &[f64], n: usize) -> Result<f64> {
    if n <= 1 {
        return Ok(0.0);
    }
    let project = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    // Fixed, non-symmetric start so no eigendirection is missed by construction.
    let mut v: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).sqrt() + (i as f64 * 0.7).sin()).collect();
    project(&mut v);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let mut next = vec![0.0; n];
        for i in 0..n {
            next[i] = (0..n).map(|j| m[i * n + j] * v[j]).sum();
        }
        project(&mut next);
        let nn = norm(&next);
        if nn < 1e-15 {
            return Ok(0.0);
        }
        next.iter_mut().for_each(|x| *x /= nn);
        if (nn - lambda).abs() < POWER_TOL {
            return Ok(nn);
        }
        lambda = nn;
        v = next;
    }
    Err(Error::NoConvergence {
        iters: POWER_MAX_ITERS,
    })
}

/// `rho = lambda_2(E[W^2])`, estimated from `n_samples` sampled rounds.
pub fn estimate_spectral_gap<R: Rng + ?Sized>(base: &BaseGraph, p: f64, n_samples: usize, rng: &mut R) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::EmptyInput("spectral gap samples"));
    }
    let m = expected_square(base, p, n_samples, rng);
    second_eigenvalue(&m, base.n_agents()).map(|r| r.min(1.0 - f64::EPSILON))
}
