//! Dual replacement graphs `G_n` of the complexes `X_n`.
//!
//! Vertices are the `10^n` words of length `n` in code-lexicographic order,
//! so a vertex index is the word read as a base-10 numeral. Edges join
//! tiles meeting along a segment.

mod adjacency;
pub mod io;
mod oracle;
mod subgraph;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

pub use adjacency::adjacency;
pub use oracle::{chain_oracle_adjacency, ORACLE_MAX_LEVEL};
pub use subgraph::{prefix_subgraph, prefix_subgraph_onto, PrefixSubgraph};

use crate::error::{Error, Result};
use crate::rule::{cells_per_axis, Alphabet, TriadicSquare, Word};

/// Largest vertex count [`ReplacementGraph::build`] accepts.
pub const MAX_VERTICES: usize = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum EdgeType {
    /// Squares sharing a vertical face.
    Horizontal,
    /// Squares sharing a horizontal face.
    Vertical,
    /// Two tiles over the same square on different sheets.
    Seam,
}

impl EdgeType {
    pub fn code(self) -> &'static str {
        match self {
            EdgeType::Horizontal => "H",
            EdgeType::Vertical => "V",
            EdgeType::Seam => "S",
        }
    }

    pub fn from_code(s: &str) -> Option<EdgeType> {
        match s {
            "H" => Some(EdgeType::Horizontal),
            "V" => Some(EdgeType::Vertical),
            "S" => Some(EdgeType::Seam),
            _ => None,
        }
    }
}

/// Whether seam edges between words differing only in their last letter
/// are kept. `Off` reproduces the literal iterated-graph-system rule.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralEdgePolicy {
    #[default]
    On,
    Off,
}

impl CentralEdgePolicy {
    pub fn name(self) -> &'static str {
        match self {
            CentralEdgePolicy::On => "on",
            CentralEdgePolicy::Off => "off",
        }
    }
}

impl FromStr for CentralEdgePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(CentralEdgePolicy::On),
            "off" => Ok(CentralEdgePolicy::Off),
            _ => Err(Error::Format(format!("policy must be on or off, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Side::ALL
            .into_iter()
            .find(|side| side.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown side {s:?} (left, right, bottom, top)")))
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub kind: EdgeType,
}

/// The dual graph of `X_n` (or of the square subdivision `X^S_n` for the
/// grid alphabet). Immutable once built.
#[derive(Clone, Debug)]
pub struct ReplacementGraph {
    level: u32,
    alphabet: Alphabet,
    policy: CentralEdgePolicy,
    cells: Vec<(u32, u32)>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    neighbors: Vec<(u32, EdgeType)>,
}

impl ReplacementGraph {
    /// Builds `G_n` over the ten-letter alphabet.
    pub fn build(level: u32, policy: CentralEdgePolicy) -> Result<Self> {
        Self::build_with(level, Alphabet::Pillow, policy)
    }

    /// The `3^n × 3^n` grid graph, i.e. the dual graph of `X^S_n`.
    pub fn grid(level: u32) -> Result<Self> {
        Self::build_with(level, Alphabet::Grid, CentralEdgePolicy::On)
    }

    pub fn build_with(level: u32, alphabet: Alphabet, policy: CentralEdgePolicy) -> Result<Self> {
        let count = alphabet
            .word_count(level)
            .filter(|&c| c <= MAX_VERTICES)
            .ok_or_else(|| Error::Capacity {
                level,
                what: format!(
                    "{}^{level} vertices exceed the limit of {MAX_VERTICES}",
                    alphabet.size()
                ),
            })?;
        let side = cells_per_axis(level) as usize;
        let n = level as usize;

        let cells: Vec<(u32, u32)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let sq = Word::from_index(alphabet, n, i).square();
                (sq.x as u32, sq.y as u32)
            })
            .collect();

        // vertices bucketed by projected cell
        let cell_id = |(x, y): (u32, u32)| y as usize * side + x as usize;
        let mut start = vec![0usize; side * side + 1];
        for &c in &cells {
            start[cell_id(c) + 1] += 1;
        }
        for i in 0..side * side {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut members = vec![0u32; count];
        for (i, &c) in cells.iter().enumerate() {
            let id = cell_id(c);
            members[fill[id]] = i as u32;
            fill[id] += 1;
        }

        let base = alphabet.size();
        let per_vertex: Vec<Vec<Edge>> = (0..count)
            .into_par_iter()
            .map(|u| {
                let wu = Word::from_index(alphabet, n, u);
                let (x, y) = cells[u];
                let mut nearby = vec![(x, y)];
                if x > 0 {
                    nearby.push((x - 1, y));
                }
                if (x as usize) + 1 < side {
                    nearby.push((x + 1, y));
                }
                if y > 0 {
                    nearby.push((x, y - 1));
                }
                if (y as usize) + 1 < side {
                    nearby.push((x, y + 1));
                }
                let mut out = Vec::new();
                for c in nearby {
                    let id = cell_id(c);
                    for &v in &members[start[id]..start[id + 1]] {
                        let v = v as usize;
                        if v <= u {
                            continue;
                        }
                        let wv = Word::from_index(alphabet, n, v);
                        let Some(kind) = adjacency::adjacent(&wu, &wv) else {
                            continue;
                        };
                        if kind == EdgeType::Seam
                            && policy == CentralEdgePolicy::Off
                            && u / base == v / base
                        {
                            continue;
                        }
                        out.push(Edge {
                            u: u as u32,
                            v: v as u32,
                            kind,
                        });
                    }
                }
                out.sort();
                out
            })
            .collect();
        let edges: Vec<Edge> = per_vertex.into_iter().flatten().collect();
        Ok(Self::from_parts(level, alphabet, policy, cells, edges))
    }

    fn from_parts(
        level: u32,
        alphabet: Alphabet,
        policy: CentralEdgePolicy,
        cells: Vec<(u32, u32)>,
        edges: Vec<Edge>,
    ) -> Self {
        let count = cells.len();
        let mut offsets = vec![0usize; count + 1];
        for e in &edges {
            offsets[e.u as usize + 1] += 1;
            offsets[e.v as usize + 1] += 1;
        }
        for i in 0..count {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![(0u32, EdgeType::Horizontal); offsets[count]];
        for e in &edges {
            neighbors[fill[e.u as usize]] = (e.v, e.kind);
            fill[e.u as usize] += 1;
            neighbors[fill[e.v as usize]] = (e.u, e.kind);
            fill[e.v as usize] += 1;
        }
        for i in 0..count {
            neighbors[offsets[i]..offsets[i + 1]].sort();
        }
        ReplacementGraph {
            level,
            alphabet,
            policy,
            cells,
            edges,
            offsets,
            neighbors,
        }
    }

    /// Reassembles a graph from an edge list, validating it against the
    /// vertex universe. Used by the loaders.
    pub(crate) fn from_edges(
        level: u32,
        alphabet: Alphabet,
        policy: CentralEdgePolicy,
        mut edges: Vec<Edge>,
    ) -> Result<Self> {
        let count = alphabet
            .word_count(level)
            .filter(|&c| c <= MAX_VERTICES)
            .ok_or_else(|| Error::Capacity {
                level,
                what: "vertex count exceeds the limit".into(),
            })?;
        for e in &mut edges {
            if e.u as usize >= count || e.v as usize >= count || e.u == e.v {
                return Err(Error::Format(format!(
                    "edge ({}, {}) out of range for {count} vertices",
                    e.u, e.v
                )));
            }
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            return Err(Error::Format("duplicate edges".into()));
        }
        let n = level as usize;
        let cells = (0..count)
            .into_par_iter()
            .map(|i| {
                let sq = Word::from_index(alphabet, n, i).square();
                (sq.x as u32, sq.y as u32)
            })
            .collect();
        Ok(Self::from_parts(level, alphabet, policy, cells, edges))
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn policy(&self) -> CentralEdgePolicy {
        self.policy
    }

    pub fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted edge list, `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn word(&self, u: usize) -> Word {
        Word::from_index(self.alphabet, self.level as usize, u)
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        if w.len() != self.level as usize {
            return None;
        }
        w.index(self.alphabet)
    }

    /// Index of a word, or a domain error naming it.
    pub fn vertex(&self, w: &Word) -> Result<usize> {
        self.index_of(w).ok_or_else(|| {
            Error::domain(format!(
                "{w} is not a vertex of the level-{} {} graph",
                self.level,
                self.alphabet.name()
            ))
        })
    }

    /// Projected grid cell `(x, y)` of vertex `u`.
    pub fn cell(&self, u: usize) -> (u32, u32) {
        self.cells[u]
    }

    pub fn square(&self, u: usize) -> TriadicSquare {
        self.word(u).square()
    }

    pub fn neighbors(&self, u: usize) -> &[(u32, EdgeType)] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<EdgeType> {
        self.neighbors(u)
            .iter()
            .find(|(w, _)| *w as usize == v)
            .map(|&(_, k)| k)
    }

    /// Hop distances from a set of sources; `u32::MAX` marks unreachable.
    pub fn distances_from_set(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == u32::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u] + 1;
            for &(v, _) in self.neighbors(u) {
                let v = v as usize;
                if dist[v] == u32::MAX {
                    dist[v] = d;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        self.distances_from_set(&[source])
    }

    /// Breadth-first hop count, `None` if disconnected.
    pub fn distance(&self, u: usize, v: usize) -> Option<u32> {
        if u == v {
            return Some(0);
        }
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::from([u]);
        dist[u] = 0;
        while let Some(a) = queue.pop_front() {
            for &(b, _) in self.neighbors(a) {
                let b = b as usize;
                if dist[b] == u32::MAX {
                    dist[b] = dist[a] + 1;
                    if b == v {
                        return Some(dist[b]);
                    }
                    queue.push_back(b);
                }
            }
        }
        None
    }

    /// Closed ball, sorted by vertex index.
    pub fn ball(&self, center: usize, radius: u32) -> Vec<usize> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::from([center]);
        dist[center] = 0;
        let mut out = vec![center];
        while let Some(a) = queue.pop_front() {
            if dist[a] == radius {
                continue;
            }
            for &(b, _) in self.neighbors(a) {
                let b = b as usize;
                if dist[b] == u32::MAX {
                    dist[b] = dist[a] + 1;
                    out.push(b);
                    queue.push_back(b);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.distances_from(0).iter().all(|&d| d != u32::MAX)
    }

    /// Vertices whose square touches the given side of the unit square.
    pub fn boundary_face(&self, side: Side) -> Vec<usize> {
        let last = cells_per_axis(self.level) as u32 - 1;
        (0..self.vertex_count())
            .filter(|&u| {
                let (x, y) = self.cells[u];
                match side {
                    Side::Left => x == 0,
                    Side::Right => x == last,
                    Side::Bottom => y == 0,
                    Side::Top => y == last,
                }
            })
            .collect()
    }

    /// Vertex permutation induced by the flip `ι_g`.
    pub fn flip_permutation(&self, g: &crate::rule::GroupElement) -> Result<Vec<usize>> {
        if g.len() < self.level as usize {
            return Err(Error::domain(format!(
                "group element {g} is shorter than level {}",
                self.level
            )));
        }
        (0..self.vertex_count())
            .map(|u| self.vertex(&self.word(u).flip_prefix(g)))
            .collect()
    }

    /// Whether a vertex permutation maps the edge set (with types) onto itself.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        if perm.len() != self.vertex_count() {
            return false;
        }
        let mut mapped: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (perm[e.u as usize] as u32, perm[e.v as usize] as u32);
                Edge {
                    u: a.min(b),
                    v: a.max(b),
                    kind: e.kind,
                }
            })
            .collect();
        mapped.sort();
        mapped == self.edges
    }

    /// Number of vertices of each degree, ascending by degree.
    pub fn degree_histogram(&self) -> Vec<(usize, usize)> {
        let mut hist = std::collections::BTreeMap::new();
        for u in 0..self.vertex_count() {
            *hist.entry(self.degree(u)).or_insert(0) += 1;
        }
        hist.into_iter().collect()
    }
}
