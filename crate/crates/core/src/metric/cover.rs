use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ReplacementGraph;
use crate::rule::cells_per_axis;

/// Closed L¹ ball in the `3^n × 3^n` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridBall {
    pub center: (u32, u32),
    pub radius: u32,
}

impl GridBall {
    pub fn contains(&self, c: (u32, u32)) -> bool {
        self.center.0.abs_diff(c.0) + self.center.1.abs_diff(c.1) <= self.radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub ball: GridBall,
    pub constant: u32,
    /// Greedy centers in index order, pairwise more than `2r` apart.
    pub centers: Vec<usize>,
    pub ball_radius: u32,
    pub preimage_size: usize,
    /// (1) every ball has radius `c r`.
    pub uniform_radius: bool,
    /// (2) `B ⊆ proj(B_i)` for every `i`.
    pub projects_onto: bool,
    /// (3) the balls of radius `r` are pairwise disjoint.
    pub shrunk_disjoint: bool,
    /// The preimage lies in the union of the balls.
    pub covers: bool,
    /// (4) largest number of balls containing one vertex.
    pub overlap: usize,
    pub witness: Option<String>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.uniform_radius && self.projects_onto && self.shrunk_disjoint && self.covers
    }
}

/// Discrete covering of `proj^{-1}(B)` by graph balls of radius `c r`.
pub fn cover_preimage(g: &ReplacementGraph, ball: GridBall, c: u32) -> Result<CoverReport> {
    if c < 5 {
        return Err(Error::domain(format!("covering constant {c} must be at least 5")));
    }
    let side = cells_per_axis(g.level()) as u32;
    if ball.center.0 >= side || ball.center.1 >= side {
        return Err(Error::domain(format!("grid center {:?} is outside the level-{} grid", ball.center, g.level())));
    }
    let r = ball.radius;
    let big = c * r;
    let preimage: Vec<usize> = (0..g.vertex_count()).filter(|&v| ball.contains(g.cell(v))).collect();

    let mut centers: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for &v in &preimage {
        if rows.iter().all(|d| d[v] > 2 * r) {
            centers.push(v);
            rows.push(g.distances_from(v));
        }
    }

    let mut witness = None;
    let mut projects_onto = true;
    let grid: Vec<(u32, u32)> = (0..side)
        .flat_map(|y| (0..side).map(move |x| (x, y)))
        .filter(|&cell| ball.contains(cell))
        .collect();
    for (i, d) in rows.iter().enumerate() {
        let mut seen = vec![false; (side * side) as usize];
        for (v, &dv) in d.iter().enumerate() {
            if dv <= big {
                let (x, y) = g.cell(v);
                seen[(y * side + x) as usize] = true;
            }
        }
        if let Some(cell) = grid.iter().find(|&&(x, y)| !seen[(y * side + x) as usize]) {
            projects_onto = false;
            witness.get_or_insert(format!("cell {cell:?} is not under ball {i} at {}", g.word(centers[i])));
        }
    }

    let mut shrunk_disjoint = true;
    'pairs: for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if rows[i][centers[j]] <= 2 * r {
                shrunk_disjoint = false;
                witness.get_or_insert(format!(
                    "centers {} and {} are within {}",
                    g.word(centers[i]),
                    g.word(centers[j]),
                    2 * r
                ));
                break 'pairs;
            }
        }
    }

    let mut covers = true;
    for &v in &preimage {
        if rows.iter().all(|d| d[v] > big) {
            covers = false;
            witness.get_or_insert(format!("{} is not covered", g.word(v)));
            break;
        }
    }

    let overlap = (0..g.vertex_count())
        .map(|v| rows.iter().filter(|d| d[v] <= big).count())
        .max()
        .unwrap_or(0);

    Ok(CoverReport {
        ball,
        constant: c,
        centers,
        ball_radius: big,
        preimage_size: preimage.len(),
        uniform_radius: true,
        projects_onto,
        shrunk_disjoint,
        covers,
        overlap,
        witness,
    })
}
