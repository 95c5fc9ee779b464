//! Discrete edge p-modulus of crossing families.
//!
//! The family of all source-to-target paths is never enumerated. The solver
//! keeps a working set of paths, solves the restricted convex problem by dual
//! coordinate ascent and asks a shortest-path search for a violated path.
//! Every result carries a lower bound from the dual multipliers and an upper
//! bound from the rescaled, admissible density.

mod flow;
mod scan;
mod potential;
mod solver;

pub use flow::{max_flow_paths, mincut_oracle};
pub use scan::{conformal_scan, scan_graphs, CriticalEstimate, ScanCell, ScanConfig, ScanTable};
pub use solver::solve_modulus;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ReplacementGraph, Side};

/// Undirected multigraph with unit-length edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    vertex_count: usize,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<(u32, u32)>>,
}

impl Network {
    pub fn new(vertex_count: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u as usize >= vertex_count || v as usize >= vertex_count || u == v {
                return Err(Error::domain(format!("bad edge ({u}, {v})")));
            }
            adjacency[u as usize].push((v, i as u32));
            adjacency[v as usize].push((u, i as u32));
        }
        Ok(Network {
            vertex_count,
            edges,
            adjacency,
        })
    }

    pub fn from_graph(g: &ReplacementGraph) -> Self {
        let edges = g.edges().iter().map(|e| (e.u, e.v)).collect();
        Network::new(g.vertex_count(), edges).expect("graph edges are valid")
    }

    /// A path `0 - 1 - ... - k`.
    pub fn path(k: usize) -> Self {
        let edges = (0..k as u32).map(|i| (i, i + 1)).collect();
        Network::new(k + 1, edges).expect("path edges are valid")
    }

    /// `m` internally disjoint paths of `k` edges between vertex 0 and vertex 1.
    pub fn parallel_paths(m: usize, k: usize) -> Self {
        assert!(k >= 1);
        let mut edges = Vec::new();
        let mut next = 2u32;
        for _ in 0..m {
            let mut prev = 0u32;
            for _ in 0..k - 1 {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, 1));
        }
        Network::new(next as usize, edges).expect("parallel edges are valid")
    }

    /// The `cols × rows` grid graph; vertex `(i, j)` is `j * cols + i`.
    pub fn grid(cols: usize, rows: usize) -> Self {
        let id = |i: usize, j: usize| (j * cols + i) as u32;
        let mut edges = Vec::new();
        for j in 0..rows {
            for i in 0..cols {
                if i + 1 < cols {
                    edges.push((id(i, j), id(i + 1, j)));
                }
                if j + 1 < rows {
                    edges.push((id(i, j), id(i, j + 1)));
                }
            }
        }
        Network::new(cols * rows, edges).expect("grid edges are valid")
    }

    /// Every edge doubled in parallel.
    pub fn doubled(&self) -> Self {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&self.edges);
        Network::new(self.vertex_count, edges).expect("doubled edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// `(neighbor, edge id)` pairs.
    pub fn incident(&self, u: usize) -> &[(u32, u32)] {
        &self.adjacency[u]
    }

    /// Relabels vertices by `perm` (vertex `u` becomes `perm[u]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u as usize] as u32, perm[v as usize] as u32))
            .collect();
        Network::new(self.vertex_count, edges).expect("permuted edges are valid")
    }
}

/// Source and target vertex sets of a crossing family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveEndpoints {
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
}

impl CurveEndpoints {
    pub fn new(mut sources: Vec<usize>, mut targets: Vec<usize>) -> Result<Self> {
        sources.sort_unstable();
        sources.dedup();
        targets.sort_unstable();
        targets.dedup();
        if sources.is_empty() || targets.is_empty() {
            return Err(Error::domain("endpoint sets must be nonempty"));
        }
        if let Some(v) = sources.iter().find(|v| targets.binary_search(v).is_ok()) {
            return Err(Error::domain(format!("vertex {v} is both a source and a target")));
        }
        Ok(CurveEndpoints { sources, targets })
    }

    pub fn single(s: usize, t: usize) -> Result<Self> {
        Self::new(vec![s], vec![t])
    }

    /// Paths between two boundary faces of `G_n`.
    pub fn sides(g: &ReplacementGraph, from: Side, to: Side) -> Result<Self> {
        Self::new(g.boundary_face(from), g.boundary_face(to))
    }

    /// Left column to right column of a `cols × rows` grid network.
    pub fn grid_left_right(cols: usize, rows: usize) -> Result<Self> {
        Self::new(
            (0..rows).map(|j| j * cols).collect(),
            (0..rows).map(|j| j * cols + cols - 1).collect(),
        )
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.sources.iter().chain(&self.targets).find(|&&v| v >= n) {
            Some(v) => Err(Error::domain(format!("endpoint {v} is not a vertex"))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModulusProblem<'a> {
    pub network: &'a Network,
    pub endpoints: CurveEndpoints,
    pub p: f64,
    /// Target relative gap between the certified bounds.
    pub tolerance: f64,
    /// Cap on solver rounds; each round is one sweep plus one separation search.
    pub max_iterations: usize,
}

impl<'a> ModulusProblem<'a> {
    pub const DEFAULT_TOLERANCE: f64 = 1e-6;
    pub const DEFAULT_MAX_ITERATIONS: usize = 200_000;

    pub fn new(network: &'a Network, endpoints: CurveEndpoints, p: f64) -> Self {
        ModulusProblem {
            network,
            endpoints,
            p,
            tolerance: Self::DEFAULT_TOLERANCE,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::domain(format!("exponent p = {} must be at least 1", self.p)));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-2) {
            return Err(Error::domain(format!(
                "tolerance {} must lie in (0, 0.01]",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::domain("iteration cap must be positive"));
        }
        self.endpoints.check(self.network.vertex_count())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusResult {
    pub value_lower: f64,
    pub value_upper: f64,
    /// Admissible density, one entry per network edge.
    pub density: Vec<f64>,
    /// Working-set paths as vertex sequences.
    pub active_paths: Vec<Vec<u32>>,
    pub iterations: usize,
    pub converged: bool,
}

impl ModulusResult {
    pub fn value(&self) -> f64 {
        0.5 * (self.value_lower + self.value_upper)
    }

    pub fn relative_gap(&self) -> f64 {
        if self.value_upper == self.value_lower {
            0.0
        } else {
            self.value_upper / self.value_lower - 1.0
        }
    }
}
