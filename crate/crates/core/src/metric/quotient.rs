use rayon::prelude::*;
use serde::Serialize;

use crate::graph::ReplacementGraph;
use crate::rule::cells_per_axis;

fn l1(a: (u32, u32), b: (u32, u32)) -> u32 {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1)
}

/// Cells of the `3^n × 3^n` grid within L¹ distance `r` of `c`, sorted.
pub fn grid_ball(level: u32, c: (u32, u32), r: u32) -> Vec<(u32, u32)> {
    let side = cells_per_axis(level) as u32;
    let mut cells = Vec::new();
    for y in 0..side {
        for x in 0..side {
            if l1((x, y), c) <= r {
                cells.push((x, y));
            }
        }
    }
    cells.sort_by_key(|&(x, y)| (y, x));
    cells
}

/// Projected cells of `ball(x, r)`, sorted and deduplicated.
pub fn projected_ball(g: &ReplacementGraph, x: usize, r: u32) -> Vec<(u32, u32)> {
    let mut cells: Vec<(u32, u32)> = g.ball(x, r).into_iter().map(|v| g.cell(v)).collect();
    cells.sort_by_key(|&(x, y)| (y, x));
    cells.dedup();
    cells
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientWitness {
    pub vertex: usize,
    pub cell: (u32, u32),
    /// Smallest hop distance from `vertex` to the fiber over `cell`.
    pub fiber_distance: u32,
    pub grid_distance: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientReport {
    pub level: u32,
    pub vertices_checked: usize,
    /// Largest radius at which the ball images were compared.
    pub max_radius: u32,
    pub violation: Option<QuotientWitness>,
}

impl QuotientReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `proj(ball(x, r)) = grid_ball(proj x, r)` for every vertex and
/// every radius at once: both inclusions at all radii hold iff the hop
/// distance from `x` to each fiber equals the L¹ distance of the cells.
pub fn lipschitz_quotient_check(g: &ReplacementGraph) -> QuotientReport {
    let side = cells_per_axis(g.level()) as usize;
    let results: Vec<(u32, Option<QuotientWitness>)> = (0..g.vertex_count())
        .into_par_iter()
        .map(|x| {
            let dist = g.distances_from(x);
            let mut fiber = vec![u32::MAX; side * side];
            for (v, &d) in dist.iter().enumerate() {
                let (cx, cy) = g.cell(v);
                let k = cy as usize * side + cx as usize;
                fiber[k] = fiber[k].min(d);
            }
            let here = g.cell(x);
            let ecc = dist.iter().copied().max().unwrap_or(0);
            let bad = fiber.iter().enumerate().find_map(|(k, &d)| {
                let cell = ((k % side) as u32, (k / side) as u32);
                let e = l1(here, cell);
                (d != e).then_some(QuotientWitness {
                    vertex: x,
                    cell,
                    fiber_distance: d,
                    grid_distance: e,
                })
            });
            (ecc, bad)
        })
        .collect();
    QuotientReport {
        level: g.level(),
        vertices_checked: results.len(),
        max_radius: results.iter().map(|r| r.0).max().unwrap_or(0),
        violation: results.into_iter().find_map(|r| r.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CentralEdgePolicy;

    #[test]
    fn level_one_center_ball() {
        let g = ReplacementGraph::build(1, CentralEdgePolicy::On).unwrap();
        let x = g.vertex(&"5".parse().unwrap()).unwrap();
        let img = projected_ball(&g, x, 1);
        assert_eq!(img, vec![(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)]);
        assert_eq!(img, grid_ball(1, (1, 1), 1));
    }

    #[test]
    fn radius_zero_is_the_cell() {
        let g = ReplacementGraph::build(2, CentralEdgePolicy::On).unwrap();
        for x in [0, 17, 55] {
            assert_eq!(projected_ball(&g, x, 0), vec![g.cell(x)]);
        }
    }

    #[test]
    fn quotient_holds_at_low_levels() {
        for n in 1..=2 {
            let g = ReplacementGraph::build(n, CentralEdgePolicy::On).unwrap();
            let r = lipschitz_quotient_check(&g);
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.vertices_checked, 10usize.pow(n));
        }
    }

    #[test]
    fn direct_ball_comparison_agrees() {
        let g = ReplacementGraph::build(2, CentralEdgePolicy::On).unwrap();
        for x in (0..100).step_by(7) {
            for r in 0..=12 {
                assert_eq!(projected_ball(&g, x, r), grid_ball(2, g.cell(x), r));
            }
        }
    }

    #[test]
    fn a_missing_edge_is_reported() {
        let g = ReplacementGraph::build(1, CentralEdgePolicy::On).unwrap();
        let (two, five) = (g.vertex(&"2".parse().unwrap()).unwrap(), g.vertex(&"5".parse().unwrap()).unwrap());
        let edges = g
            .edges()
            .iter()
            .copied()
            .filter(|e| (e.u as usize, e.v as usize) != (two.min(five), two.max(five)))
            .collect();
        let cut = ReplacementGraph::from_edges(1, g.alphabet(), g.policy(), edges).unwrap();
        let r = lipschitz_quotient_check(&cut);
        let w = r.violation.expect("violation");
        assert!(w.fiber_distance > w.grid_distance);
    }
}
