//! Values recorded from verified runs.

use pillow_core::measure::TileMeasure;
use pillow_core::metric::{ambient_block_metric, comparability, internal_block_metric, pi_diagnostic_for, TestFunction};
use pillow_core::verify::PINNED_EDGE_COUNTS;
use pillow_core::{Alphabet, CentralEdgePolicy, ReplacementGraph, Side, Word};

fn pillow(n: u32) -> ReplacementGraph {
    ReplacementGraph::build(n, CentralEdgePolicy::On).unwrap()
}

#[test]
fn edge_counts_and_seams() {
    for n in 1..=5u32 {
        let on = pillow(n);
        let off = ReplacementGraph::build(n, CentralEdgePolicy::Off).unwrap();
        assert_eq!(on.edge_count(), PINNED_EDGE_COUNTS[n as usize - 1]);
        // one seam edge per doubled central tile
        assert_eq!(on.edge_count() - off.edge_count(), 10usize.pow(n - 1));
    }
}

#[test]
fn degree_histograms() {
    let expected: [&[(usize, usize)]; 5] = [
        &[(2, 4), (4, 4), (5, 2)],
        &[(2, 4), (3, 16), (4, 16), (5, 52), (6, 12)],
        &[(2, 4), (3, 64), (4, 144), (5, 632), (6, 156)],
        &[(2, 4), (3, 208), (4, 1448), (5, 6672), (6, 1668)],
        &[(2, 4), (3, 640), (4, 14560), (5, 67792), (6, 17004)],
    ];
    for n in 1..=5u32 {
        let g = pillow(n);
        let h = g.degree_histogram();
        assert_eq!(h, expected[n as usize - 1], "level {n}");
        assert_eq!(h.iter().map(|(d, k)| d * k).sum::<usize>(), 2 * g.edge_count());
    }
}

#[test]
fn boundary_faces_have_one_tile_per_cell() {
    for n in 1..=5u32 {
        let g = pillow(n);
        for side in [Side::Left, Side::Right, Side::Bottom, Side::Top] {
            let face = g.boundary_face(side);
            assert_eq!(face.len(), 3usize.pow(n));
            assert!(face.iter().all(|&v| g.word(v).center_count() == 0));
        }
    }
}

#[test]
fn blocks_are_geodesically_convex() {
    for (n, prefixes) in [(2, &["1", "2", "5", "0"][..]), (3, &["1", "5", "0", "55", "50", "15", "05"][..])] {
        let g = pillow(n);
        for w in prefixes {
            let w: Word = w.parse().unwrap();
            let c = comparability(&internal_block_metric(&g, &w).unwrap(), &ambient_block_metric(&g, &w).unwrap());
            assert_eq!(c.unwrap(), 1.0, "level {n} prefix {w}");
        }
    }
}

#[test]
fn x_coordinate_poincare_trend() {
    // worst ratio over 400 seeded balls; flat in n rather than growing
    let expected = [0.24, 2.0 / 7.0, 0.25 / 0.9, 0.25 / 0.9];
    for n in 1..=4u32 {
        let g = pillow(n);
        let m = TileMeasure::uniform(Alphabet::Pillow, n).unwrap();
        let r = pi_diagnostic_for(&g, &m, 2.0, &TestFunction::XCoord, 400, 1).unwrap();
        assert!((r.worst_ratio - expected[n as usize - 1]).abs() < 1e-9, "level {n}: {}", r.worst_ratio);
    }
}
