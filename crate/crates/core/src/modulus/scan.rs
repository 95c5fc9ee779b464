use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{mincut_oracle, solve_modulus, CurveEndpoints, ModulusProblem, Network};
use crate::error::{Error, Result};
use crate::graph::{CentralEdgePolicy, ReplacementGraph, Side};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanConfig {
    pub levels: Vec<u32>,
    pub exponents: Vec<f64>,
    pub from: Side,
    pub to: Side,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub policy: CentralEdgePolicy,
}

impl ScanConfig {
    pub fn new(levels: Vec<u32>, exponents: Vec<f64>) -> Self {
        ScanConfig {
            levels,
            exponents,
            from: Side::Left,
            to: Side::Right,
            tolerance: ModulusProblem::DEFAULT_TOLERANCE,
            max_iterations: ModulusProblem::DEFAULT_MAX_ITERATIONS,
            policy: CentralEdgePolicy::On,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanCell {
    pub level: u32,
    pub p: f64,
    pub value_lower: f64,
    pub value_upper: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Midpoint ratio against the previous scanned level at the same `p`.
    pub ratio_to_previous_level: Option<f64>,
}

impl ScanCell {
    pub fn value(&self) -> f64 {
        0.5 * (self.value_lower + self.value_upper)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalEstimate {
    pub level: u32,
    /// Grid exponent whose level ratio is closest to 1.
    pub p: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub config: ScanConfig,
    pub cells: Vec<ScanCell>,
    pub mincut: Vec<(u32, usize)>,
    pub critical: Vec<CriticalEstimate>,
}

impl ScanTable {
    pub fn cell(&self, level: u32, p: f64) -> Option<&ScanCell> {
        self.cells.iter().find(|c| c.level == level && c.p == p)
    }

    pub fn all_converged(&self) -> bool {
        self.cells.iter().all(|c| c.converged)
    }

    /// Levels at which modulus fails to be nonincreasing in `p`, judged on
    /// the certified bounds.
    pub fn monotonicity_violations(&self) -> Vec<(u32, f64, f64)> {
        let mut bad = Vec::new();
        for &n in &self.config.levels {
            let mut row: Vec<&ScanCell> = self.cells.iter().filter(|c| c.level == n).collect();
            row.sort_by(|a, b| a.p.total_cmp(&b.p));
            for w in row.windows(2) {
                if w[1].value_lower > w[0].value_upper {
                    bad.push((n, w[0].p, w[1].p));
                }
            }
        }
        bad
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "level,p,value_lower,value_upper,iterations,converged,ratio_to_previous_level")?;
        for c in &self.cells {
            let ratio = c.ratio_to_previous_level.map(|r| format!("{r:.12e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{:.12e},{:.12e},{},{},{}",
                c.level, c.p, c.value_lower, c.value_upper, c.iterations, c.converged, ratio
            )?;
        }
        Ok(())
    }

    pub fn write_critical_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "level,critical_p,ratio")?;
        for c in &self.critical {
            let p = c.p.map(|p| p.to_string()).unwrap_or_default();
            let r = c.ratio.map(|r| format!("{r:.12e}")).unwrap_or_default();
            writeln!(out, "{},{},{}", c.level, p, r)?;
        }
        Ok(())
    }
}

/// `mod_p(G_n)` of a side-to-side crossing for every `(n, p)` pair.
pub fn conformal_scan(config: &ScanConfig) -> Result<ScanTable> {
    let mut levels = config.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    if let Some(&n) = levels.iter().find(|&&n| n == 0 || n > 4) {
        return Err(Error::domain(format!("scan levels must lie in 1..=4, got {n}")));
    }
    let graphs = levels
        .iter()
        .map(|&n| ReplacementGraph::build(n, config.policy))
        .collect::<Result<Vec<_>>>()?;
    scan_graphs(config, &graphs)
}

/// [`conformal_scan`] over given graphs. `config.levels` is replaced by the
/// graphs' levels, which must be distinct and increasing.
pub fn scan_graphs(config: &ScanConfig, graphs: &[ReplacementGraph]) -> Result<ScanTable> {
    let levels: Vec<u32> = graphs.iter().map(|g| g.level()).collect();
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("scan graphs must have distinct increasing levels"));
    }
    if levels.is_empty() || config.exponents.is_empty() {
        return Err(Error::domain("scan needs at least one level and one exponent"));
    }
    if config.from == config.to {
        return Err(Error::domain("crossing needs two distinct sides"));
    }
    let mut config = config.clone();
    config.levels = levels.clone();
    if let Some(g) = graphs.first() {
        config.policy = g.policy();
    }
    let mut exponents = config.exponents.clone();
    exponents.sort_by(f64::total_cmp);
    exponents.dedup();
    config.exponents = exponents.clone();

    let instances: Vec<(Network, CurveEndpoints)> = graphs
        .iter()
        .map(|g| {
            let ends = CurveEndpoints::sides(g, config.from, config.to)?;
            Ok((Network::from_graph(g), ends))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, f64)> = (0..levels.len())
        .flat_map(|i| exponents.iter().map(move |&p| (i, p)))
        .collect();
    let mut cells = jobs
        .par_iter()
        .map(|&(i, p)| {
            let (net, ends) = &instances[i];
            let mut prob = ModulusProblem::new(net, ends.clone(), p).with_tolerance(config.tolerance);
            prob.max_iterations = config.max_iterations;
            let r = solve_modulus(&prob)?;
            Ok(ScanCell {
                level: levels[i],
                p,
                value_lower: r.value_lower,
                value_upper: r.value_upper,
                iterations: r.iterations,
                converged: r.converged,
                ratio_to_previous_level: None,
            })
        })
        .collect::<Result<Vec<ScanCell>>>()?;

    let per_level = exponents.len();
    for i in per_level..cells.len() {
        let prev = cells[i - per_level].value();
        cells[i].ratio_to_previous_level = (prev > 0.0).then(|| cells[i].value() / prev);
    }

    let mincut = levels
        .iter()
        .zip(&instances)
        .map(|(&n, (net, ends))| (n, mincut_oracle(net, ends)))
        .collect();

    let critical = levels
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &n)| {
            let row = &cells[i * per_level..(i + 1) * per_level];
            let best = row
                .iter()
                .filter_map(|c| c.ratio_to_previous_level.map(|r| (c.p, r)))
                .min_by(|a, b| a.1.ln().abs().total_cmp(&b.1.ln().abs()));
            CriticalEstimate {
                level: n,
                p: best.map(|b| b.0),
                ratio: best.map(|b| b.1),
            }
        })
        .collect();

    Ok(ScanTable {
        config,
        cells,
        mincut,
        critical,
    })
}
