//! Metrics on the tiles of one level: the graph metric, flip
//! symmetrization, blowups, quasisymmetry profiles and the checks on the
//! projection to the square.
//!
//! Tables are dense and store the strict upper triangle.

mod blowup;
mod cover;
mod distortion;
mod io;
mod poincare;
mod quotient;
mod symmetrize;

pub use blowup::{blowup_metric, comparability, Normalization};
pub use cover::{cover_preimage, CoverReport, GridBall};
pub use distortion::{qs_distortion, DistortionBin, DistortionProfile};
pub use io::{read_plm, write_plm, PLM_MAGIC};
pub use poincare::{pi_diagnostic, pi_diagnostic_for, pi_ratio, PiReport, PiSample, TestFunction};
pub use quotient::{grid_ball, lipschitz_quotient_check, projected_ball, QuotientReport};
pub use symmetrize::{symmetrize, SymmetrizeMode, MAX_EXACT_LEVEL};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::ReplacementGraph;
use crate::rule::{Alphabet, Word};

/// Largest universe stored densely (`G_4`).
pub const MAX_DENSE_VERTICES: usize = 10_000;
/// Universes up to this size are validated on every triple.
const EXHAUSTIVE_TRIANGLES: usize = 128;
const SAMPLED_TRIANGLES: usize = 200_000;

/// The words of length `level` that start with `prefix`, in index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Universe {
    pub alphabet: Alphabet,
    pub level: u32,
    pub prefix: Word,
}

impl Universe {
    pub fn new(alphabet: Alphabet, level: u32, prefix: Word) -> Result<Self> {
        if prefix.len() > level as usize {
            return Err(Error::domain(format!("prefix {prefix} is longer than level {level}")));
        }
        if prefix.index(alphabet).is_none() {
            return Err(Error::domain(format!("{prefix} is not a {} word", alphabet.name())));
        }
        Ok(Universe {
            alphabet,
            level,
            prefix,
        })
    }

    pub fn full(alphabet: Alphabet, level: u32) -> Self {
        Universe {
            alphabet,
            level,
            prefix: Word::empty(),
        }
    }

    fn free_len(&self) -> usize {
        self.level as usize - self.prefix.len()
    }

    pub fn len(&self) -> usize {
        self.alphabet.size().pow(self.free_len() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the first word in the level's global order.
    pub fn offset(&self) -> usize {
        self.prefix.index(self.alphabet).expect("checked on construction") * self.len()
    }

    pub fn word(&self, i: usize) -> Word {
        self.prefix
            .concat(&Word::from_index(self.alphabet, self.free_len(), i))
    }

    pub fn index(&self, w: &Word) -> Option<usize> {
        if w.len() != self.level as usize || !w.starts_with(&self.prefix) {
            return None;
        }
        w.shift_by(self.prefix.len()).ok()?.index(self.alphabet)
    }
}

/// A symmetric table with zero diagonal over a [`Universe`].
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix {
    universe: Universe,
    n: usize,
    upper: Vec<f64>,
}

/// A violated triangle `d(x, z) > d(x, y) + d(y, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleViolation {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub excess: f64,
}

fn condensed(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl MetricMatrix {
    /// Table from `f(i, j)` for `i < j`, without validation.
    pub(crate) fn from_fn_unchecked<F>(universe: Universe, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let n = universe.len();
        let upper = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let f = &f;
                (i + 1..n).map(move |j| f(i, j))
            })
            .collect();
        MetricMatrix { universe, n, upper }
    }

    pub(crate) fn from_upper_unchecked(universe: Universe, upper: Vec<f64>) -> Self {
        let n = universe.len();
        debug_assert_eq!(upper.len(), n * n.saturating_sub(1) / 2);
        MetricMatrix { universe, n, upper }
    }

    /// Validated table from `f(i, j)` for `i < j`.
    pub fn from_fn<F>(universe: Universe, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        if universe.len() > MAX_DENSE_VERTICES {
            return Err(Error::Capacity {
                level: universe.level,
                what: format!("{} points exceed the dense limit {MAX_DENSE_VERTICES}", universe.len()),
            });
        }
        let m = Self::from_fn_unchecked(universe, f);
        m.validate()?;
        Ok(m)
    }

    /// Validated table from its strict upper triangle in row-major order.
    pub fn from_upper(universe: Universe, upper: Vec<f64>) -> Result<Self> {
        let n = universe.len();
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Format(format!(
                "{} entries do not form the upper triangle of a {n}-point table",
                upper.len()
            )));
        }
        let m = MetricMatrix { universe, n, upper };
        m.validate()?;
        Ok(m)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[condensed(self.n, i, j)],
            std::cmp::Ordering::Greater => self.upper[condensed(self.n, j, i)],
        }
    }

    pub fn distance(&self, a: &Word, b: &Word) -> Result<f64> {
        let i = self.lookup(a)?;
        let j = self.lookup(b)?;
        Ok(self.get(i, j))
    }

    fn lookup(&self, w: &Word) -> Result<usize> {
        self.universe
            .index(w)
            .ok_or_else(|| Error::domain(format!("{w} is not in the table's universe")))
    }

    pub fn diameter(&self) -> f64 {
        self.upper.iter().copied().fold(0.0, f64::max)
    }

    /// Entrywise `f(d)`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> MetricMatrix {
        MetricMatrix {
            universe: self.universe.clone(),
            n: self.n,
            upper: self.upper.iter().map(|&d| f(d)).collect(),
        }
    }

    pub fn max_abs_difference(&self, other: &MetricMatrix) -> Option<f64> {
        (self.universe == other.universe).then(|| {
            self.upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    /// Worst triangle violation: exhaustive on small universes, otherwise
    /// on a fixed-seed sample of triples.
    pub fn worst_triangle(&self) -> Option<TriangleViolation> {
        self.worst_triangle_beyond(1e-9 * self.diameter().max(1.0))
    }

    fn worst_triangle_beyond(&self, tol: f64) -> Option<TriangleViolation> {
        let n = self.n;
        let check = |x: usize, y: usize, z: usize| {
            let excess = self.get(x, z) - self.get(x, y) - self.get(y, z);
            (excess > tol).then_some(TriangleViolation { x, y, z, excess })
        };
        let worse = |a: Option<TriangleViolation>, b: Option<TriangleViolation>| match (a, b) {
            (Some(a), Some(b)) => Some(if b.excess > a.excess { b } else { a }),
            (a, b) => a.or(b),
        };
        if n <= EXHAUSTIVE_TRIANGLES {
            (0..n)
                .into_par_iter()
                .map(|x| {
                    let mut w = None;
                    for y in 0..n {
                        for z in 0..n {
                            w = worse(w, check(x, y, z));
                        }
                    }
                    w
                })
                .reduce(|| None, worse)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut w = None;
            for _ in 0..SAMPLED_TRIANGLES {
                let (x, y, z) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                w = worse(w, check(x, y, z));
            }
            w
        }
    }

    /// Nonnegative, positive off the diagonal, and no triangle violation.
    pub fn validate(&self) -> Result<()> {
        self.validate_beyond(1e-9 * self.diameter().max(1.0))
    }

    pub(crate) fn validate_beyond(&self, tol: f64) -> Result<()> {
        if let Some(k) = self.upper.iter().position(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::domain(format!(
                "entry {k} of the upper triangle is {}, not a positive distance",
                self.upper[k]
            )));
        }
        if let Some(v) = self.worst_triangle_beyond(tol) {
            return Err(Error::domain(format!(
                "triangle inequality fails at ({}, {}, {}) by {}",
                self.universe.word(v.x),
                self.universe.word(v.y),
                self.universe.word(v.z),
                v.excess
            )));
        }
        Ok(())
    }
}

fn dense_check(g: &ReplacementGraph) -> Result<()> {
    if g.vertex_count() > MAX_DENSE_VERTICES {
        return Err(Error::Capacity {
            level: g.level(),
            what: format!(
                "{} vertices exceed the dense metric limit {MAX_DENSE_VERTICES}; use graph_metric_rows",
                g.vertex_count()
            ),
        });
    }
    Ok(())
}

/// All-pairs hop distances of `G_n`.
pub fn graph_metric(g: &ReplacementGraph) -> Result<MetricMatrix> {
    dense_check(g)?;
    let n = g.vertex_count();
    let upper = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let row = g.distances_from(i);
            (i + 1..n).map(move |j| row[j] as f64).collect::<Vec<_>>()
        })
        .collect();
    Ok(MetricMatrix::from_upper_unchecked(Universe::full(g.alphabet(), g.level()), upper))
}

/// On-demand rows of the graph metric, for graphs past the dense limit.
pub fn graph_metric_rows(g: &ReplacementGraph, rows: &[usize]) -> Vec<Vec<u32>> {
    rows.par_iter().map(|&u| g.distances_from(u)).collect()
}

/// Hop distances inside the induced subgraph on the tiles with prefix `w`.
pub fn internal_block_metric(g: &ReplacementGraph, w: &Word) -> Result<MetricMatrix> {
    let universe = Universe::new(g.alphabet(), g.level(), w.clone())?;
    let (start, len) = (universe.offset(), universe.len());
    if len > MAX_DENSE_VERTICES {
        return Err(Error::Capacity {
            level: g.level(),
            what: format!("block of {len} tiles exceeds the dense limit"),
        });
    }
    let rows: Vec<Vec<u32>> = (0..len)
        .into_par_iter()
        .map(|i| {
            let mut dist = vec![u32::MAX; len];
            let mut queue = std::collections::VecDeque::from([i]);
            dist[i] = 0;
            while let Some(a) = queue.pop_front() {
                for &(b, _) in g.neighbors(start + a) {
                    let b = b as usize;
                    if b >= start && b < start + len && dist[b - start] == u32::MAX {
                        dist[b - start] = dist[a] + 1;
                        queue.push_back(b - start);
                    }
                }
            }
            dist
        })
        .collect();
    if rows.iter().any(|r| r.contains(&u32::MAX)) {
        return Err(Error::Consistency(format!("block {w} is disconnected")));
    }
    Ok(MetricMatrix::from_fn_unchecked(universe, |i, j| rows[i][j] as f64))
}

/// Ambient hop distances of `G_n` restricted to the tiles with prefix `w`.
pub fn ambient_block_metric(g: &ReplacementGraph, w: &Word) -> Result<MetricMatrix> {
    let universe = Universe::new(g.alphabet(), g.level(), w.clone())?;
    let (start, len) = (universe.offset(), universe.len());
    if len > MAX_DENSE_VERTICES {
        return Err(Error::Capacity {
            level: g.level(),
            what: format!("block of {len} tiles exceeds the dense limit"),
        });
    }
    let rows: Vec<Vec<u32>> = (0..len)
        .into_par_iter()
        .map(|i| g.distances_from(start + i)[start..start + len].to_vec())
        .collect();
    Ok(MetricMatrix::from_fn_unchecked(universe, |i, j| rows[i][j] as f64))
}
