use pillow_core::graph::io::{load, save, GraphFormat};
use pillow_core::modulus::{conformal_scan, mincut_oracle, scan_graphs, CurveEndpoints, Network, ScanConfig};
use pillow_core::{CentralEdgePolicy, ReplacementGraph, Side};

const GRID: [f64; 6] = [1.0, 1.5, 2.0, 2.0959, 2.5, 3.0];

#[test]
fn full_table_is_certified_and_monotone() {
    let table = conformal_scan(&ScanConfig::new(vec![3, 1, 2], GRID.to_vec())).unwrap();
    assert_eq!(table.cells.len(), 18);
    assert!(table.all_converged());
    assert!(table.monotonicity_violations().is_empty());
    for c in &table.cells {
        assert!(c.value_lower <= c.value_upper);
        assert!(c.value_upper / c.value_lower - 1.0 <= 5e-6, "{c:?}");
    }
    // the shortest crossing has at least two edges, so the decrease is strict
    for n in 1..=3 {
        let row: Vec<f64> = GRID.iter().map(|&p| table.cell(n, p).unwrap().value()).collect();
        assert!(row.windows(2).all(|w| w[1] < w[0]), "level {n}: {row:?}");
    }
}

#[test]
fn p_one_row_is_the_min_cut() {
    let table = conformal_scan(&ScanConfig::new(vec![1, 2, 3], vec![1.0])).unwrap();
    assert_eq!(table.mincut, vec![(1, 4), (2, 12), (3, 32)]);
    for n in 1..=3 {
        let g = ReplacementGraph::build(n, CentralEdgePolicy::On).unwrap();
        let ends = CurveEndpoints::sides(&g, Side::Left, Side::Right).unwrap();
        let cut = mincut_oracle(&Network::from_graph(&g), &ends) as f64;
        let c = table.cell(n, 1.0).unwrap();
        assert_eq!((c.value_lower, c.value_upper), (cut, cut));
    }
}

#[test]
fn ratios_and_critical_estimates() {
    let table = conformal_scan(&ScanConfig::new(vec![1, 2], vec![1.0, 2.0, 3.0])).unwrap();
    let r = table.cell(2, 1.0).unwrap().ratio_to_previous_level.unwrap();
    assert!((r - 3.0).abs() < 1e-12);
    assert!(table.cell(1, 2.0).unwrap().ratio_to_previous_level.is_none());
    assert_eq!(table.critical.len(), 1);
    assert_eq!(table.critical[0].level, 2);
    assert!(table.critical[0].p.is_some());

    let mut csv = Vec::new();
    table.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "level,p,value_lower,value_upper,iterations,converged,ratio_to_previous_level");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("1,1,4.000000000000e0,4.000000000000e0,"));
    assert!(lines[1].ends_with(",true,"));
}

#[test]
fn loaded_graphs_scan_like_built_ones() {
    let dir = tempfile::tempdir().unwrap();
    let mut graphs = Vec::new();
    for (n, format) in [(1, GraphFormat::Json), (2, GraphFormat::Binary)] {
        let g = ReplacementGraph::build(n, CentralEdgePolicy::On).unwrap();
        let path = dir.path().join(format!("g{n}"));
        save(&g, &path, format, None).unwrap();
        graphs.push(load(&path).unwrap());
    }
    let config = ScanConfig::new(vec![1, 2], vec![1.0, 2.5]);
    assert_eq!(scan_graphs(&config, &graphs).unwrap(), conformal_scan(&config).unwrap());
}

#[test]
fn scan_levels_are_bounded() {
    assert!(conformal_scan(&ScanConfig::new(vec![5], vec![2.0])).is_err());
    assert!(conformal_scan(&ScanConfig::new(vec![0], vec![2.0])).is_err());
}
