//! Named invariant suites behind `pillow verify`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{adjacency, chain_oracle_adjacency, prefix_subgraph_onto, CentralEdgePolicy, ReplacementGraph, Side};
use crate::measure::{middle_third_ratios, pushforward_x, TileMeasure};
use crate::metric::{blowup_metric, cover_preimage, graph_metric, internal_block_metric, lipschitz_quotient_check, GridBall, Normalization};
use crate::modulus::{mincut_oracle, solve_modulus, CurveEndpoints, ModulusProblem, Network};
use crate::rule::{cells_per_axis, Alphabet, GroupElement, Word};

/// Edge counts of `G_1 … G_5` with central edges on.
pub const PINNED_EDGE_COUNTS: [usize; 5] = [17, 226, 2436, 24896, 250576];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Counts,
    AdjacencyOracle,
    Sheets,
    Automorphisms,
    SelfSimilar,
    SingularMeasure,
    Quotient,
    Covering,
    ModulusOracles,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Counts,
        Suite::AdjacencyOracle,
        Suite::Sheets,
        Suite::Automorphisms,
        Suite::SelfSimilar,
        Suite::SingularMeasure,
        Suite::Quotient,
        Suite::Covering,
        Suite::ModulusOracles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counts => "counts",
            Suite::AdjacencyOracle => "adjacency-oracle",
            Suite::Sheets => "sheets",
            Suite::Automorphisms => "automorphisms",
            Suite::SelfSimilar => "self-similar",
            Suite::SingularMeasure => "singular-measure",
            Suite::Quotient => "quotient",
            Suite::Covering => "covering",
            Suite::ModulusOracles => "modulus-oracles",
        }
    }

    /// Highest level the suite accepts.
    pub fn max_level(self) -> u32 {
        match self {
            Suite::AdjacencyOracle | Suite::Quotient | Suite::Covering | Suite::ModulusOracles => 3,
            _ => 5,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            Error::domain(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub level: Option<u32>,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub levels: (u32, u32),
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, level: Option<u32>, name: &str, passed: bool, detail: String) {
        self.0.push(Check {
            level,
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

/// Parses `a..b` (inclusive) or a single level.
pub fn parse_levels(s: &str) -> Result<RangeInclusive<u32>> {
    let bad = || Error::domain(format!("level range {s:?} is not of the form a..b"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

pub fn run_suite(suite: Suite, levels: RangeInclusive<u32>, seed: u64) -> Result<SuiteReport> {
    let (lo, hi) = (*levels.start(), *levels.end());
    if lo == 0 || lo > hi {
        return Err(Error::domain(format!("empty level range {lo}..{hi}")));
    }
    if hi > suite.max_level() {
        return Err(Error::domain(format!(
            "suite {suite} runs up to level {}, not {hi}",
            suite.max_level()
        )));
    }
    let mut out = Checks(Vec::new());
    if suite == Suite::ModulusOracles {
        modulus_families(&mut out);
    }
    for n in levels {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32));
        match suite {
            Suite::Counts => counts(&mut out, n)?,
            Suite::AdjacencyOracle => oracle(&mut out, n, &mut rng)?,
            Suite::Sheets => sheets(&mut out, n, &mut rng)?,
            Suite::Automorphisms => automorphisms(&mut out, n, &mut rng)?,
            Suite::SelfSimilar => self_similar(&mut out, n, &mut rng)?,
            Suite::SingularMeasure => singular(&mut out, n)?,
            Suite::Quotient => quotient(&mut out, n)?,
            Suite::Covering => covering(&mut out, n, &mut rng)?,
            Suite::ModulusOracles => modulus_level(&mut out, n)?,
        }
    }
    Ok(SuiteReport {
        suite,
        levels: (lo, hi),
        seed,
        checks: out.0,
    })
}

fn counts(out: &mut Checks, n: u32) -> Result<()> {
    let g = ReplacementGraph::build(n, CentralEdgePolicy::On)?;
    let v = 10usize.pow(n);
    out.push(Some(n), "vertices", g.vertex_count() == v, format!("{} of {v}", g.vertex_count()));
    let pinned = PINNED_EDGE_COUNTS[n as usize - 1];
    out.push(Some(n), "edges", g.edge_count() == pinned, format!("{} of {pinned}", g.edge_count()));
    out.push(Some(n), "connected", g.is_connected(), String::new());
    let grid = ReplacementGraph::grid(n)?;
    let side = cells_per_axis(n) as usize;
    let grid_edges = 2 * side * (side - 1);
    out.push(
        Some(n),
        "grid model",
        grid.vertex_count() == side * side && grid.edge_count() == grid_edges,
        format!("{} vertices, {} edges", grid.vertex_count(), grid.edge_count()),
    );
    Ok(())
}

fn oracle(out: &mut Checks, n: u32, rng: &mut ChaCha8Rng) -> Result<()> {
    let count = 10usize.pow(n);
    let word = |i| Word::from_index(Alphabet::Pillow, n as usize, i);
    let mut pairs = Vec::new();
    if n <= 2 {
        for a in 0..count {
            pairs.extend((a + 1..count).map(|b| (a, b)));
        }
    } else {
        // half the samples near the diagonal, where adjacent pairs live
        while pairs.len() < 100_000 {
            let a = rng.random_range(0..count);
            let b = if pairs.len() % 2 == 0 {
                rng.random_range(0..count)
            } else {
                (a + rng.random_range(1..=30)) % count
            };
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    let mut bad: Option<String> = None;
    for &(a, b) in &pairs {
        let (w, v) = (word(a), word(b));
        let geo = adjacency(&w, &v)?;
        let chain = chain_oracle_adjacency(&w, &v)?;
        if geo != chain {
            bad = Some(format!("{w} {v}: geometric {geo:?}, oracle {chain:?}"));
            break;
        }
    }
    let pairs = pairs.len();
    let passed = bad.is_none();
    out.push(Some(n), "geometric = chain oracle", passed, bad.unwrap_or_else(|| format!("{pairs} pairs")));

    let g = ReplacementGraph::build(n, CentralEdgePolicy::On)?;
    let mismatch = g.edges().iter().find(|e| {
        (adjacency(&word(e.u as usize), &word(e.v as usize)).ok().flatten()) != Some(e.kind)
    });
    out.push(
        Some(n),
        "graph edges = geometric",
        mismatch.is_none(),
        mismatch.map_or_else(|| format!("{} edges", g.edge_count()), |e| format!("{e:?}")),
    );
    Ok(())
}

fn random_group<R: Rng>(n: u32, rng: &mut R) -> GroupElement {
    GroupElement::random(n as usize, rng)
}

fn random_grid_word<R: Rng>(n: u32, rng: &mut R) -> Word {
    Word::from_index(Alphabet::Grid, n as usize, rng.random_range(0..9usize.pow(n)))
}

const SHEET_SAMPLES: usize = 4;
const SHEET_SOURCES: usize = 20;
const SHEET_TARGETS: usize = 50;

fn sheets(out: &mut Checks, n: u32, rng: &mut ChaCha8Rng) -> Result<()> {
    let g = ReplacementGraph::build(n, CentralEdgePolicy::On)?;
    for s in 0..SHEET_SAMPLES {
        let h = if s == 0 { GroupElement::identity(n as usize) } else { random_group(n, rng) };
        let mut bad = None;
        let mut pairs = 0;
        for _ in 0..SHEET_SOURCES {
            let u = random_grid_word(n, rng);
            let a = g.vertex(&Word::section(&u, &h)?)?;
            let dist = g.distances_from(a);
            for _ in 0..SHEET_TARGETS {
                let v = random_grid_word(n, rng);
                let b = g.vertex(&Word::section(&v, &h)?)?;
                let (ca, cb) = (g.cell(a), g.cell(b));
                let l1 = ca.0.abs_diff(cb.0) + ca.1.abs_diff(cb.1);
                pairs += 1;
                if dist[b] != l1 && bad.is_none() {
                    bad = Some(format!("{u} {v} on sheet {h}: graph {}, grid {l1}", dist[b]));
                }
            }
        }
        let passed = bad.is_none();
        out.push(
            Some(n),
            &format!("sheet {h} isometric"),
            passed,
            bad.unwrap_or_else(|| format!("{pairs} pairs")),
        );
    }
    Ok(())
}

fn automorphisms(out: &mut Checks, n: u32, rng: &mut ChaCha8Rng) -> Result<()> {
    let g = ReplacementGraph::build(n, CentralEdgePolicy::On)?;
    let elements: Vec<GroupElement> = if n <= 3 {
        GroupElement::all(n as usize).collect()
    } else {
        (0..100).map(|_| random_group(n, rng)).collect()
    };
    let mut bad = None;
    for h in &elements {
        if !g.is_automorphism(&g.flip_permutation(h)?) {
            bad.get_or_insert_with(|| h.to_string());
        }
    }
    let passed = bad.is_none();
    out.push(
        Some(n),
        "flips are automorphisms",
        passed,
        bad.map_or_else(|| format!("{} flips", elements.len()), |h| format!("flip {h} fails")),
    );

    if n <= 3 {
        let mut fiber = vec![0usize; 9usize.pow(n)];
        for i in 0..g.vertex_count() {
            fiber[g.word(i).project().index(Alphabet::Grid).expect("projection is a grid word")] += 1;
        }
        let bad = (0..fiber.len()).find(|&i| {
            let u = Word::from_index(Alphabet::Grid, n as usize, i);
            fiber[i] != 1 << u.center_count()
        });
        out.push(
            Some(n),
            "fiber sizes",
            bad.is_none(),
            bad.map_or_else(
                || format!("{} grid words", fiber.len()),
                |i| format!("{} has fiber {}", Word::from_index(Alphabet::Grid, n as usize, i), fiber[i]),
            ),
        );
    }
    Ok(())
}

fn self_similar(out: &mut Checks, n: u32, rng: &mut ChaCha8Rng) -> Result<()> {
    if n == 1 {
        out.push(Some(1), "prefix subgraphs", true, "no proper prefixes".into());
        return Ok(());
    }
    let g = ReplacementGraph::build(n, CentralEdgePolicy::On)?;
    let lower: Vec<ReplacementGraph> = (1..n)
        .map(|m| ReplacementGraph::build(m, CentralEdgePolicy::On))
        .collect::<Result<_>>()?;
    let prefixes: Vec<Word> = if n <= 3 {
        (1..n as usize)
            .flat_map(|k| (0..10usize.pow(k as u32)).map(move |i| Word::from_index(Alphabet::Pillow, k, i)))
            .collect()
    } else {
        (0..100)
            .map(|_| {
                let k = rng.random_range(1..n as usize);
                Word::from_index(Alphabet::Pillow, k, rng.random_range(0..10usize.pow(k as u32)))
            })
            .collect()
    };
    let mut bad = None;
    for w in &prefixes {
        let target = &lower[(n as usize - w.len()) - 1];
        if let Err(e) = prefix_subgraph_onto(&g, w, target) {
            bad.get_or_insert(format!("{w}: {e}"));
        }
    }
    let passed = bad.is_none();
    out.push(
        Some(n),
        "prefix subgraphs",
        passed,
        bad.unwrap_or_else(|| format!("{} prefixes", prefixes.len())),
    );

    let metrics: Vec<Option<_>> = lower
        .iter()
        .map(|h| if h.level() <= 3 { graph_metric(h).ok() } else { None })
        .collect();
    let mut bad = None;
    let mut checked = 0;
    for w in &prefixes {
        let m = n as usize - w.len();
        let Some(expected) = &metrics[m - 1] else { continue };
        let blown = blowup_metric(&internal_block_metric(&g, w)?, w, &Normalization::Factor(1.0))?;
        checked += 1;
        if blown.max_abs_difference(expected) != Some(0.0) {
            bad.get_or_insert(w.to_string());
        }
    }
    let passed = bad.is_none();
    out.push(
        Some(n),
        "blowup of internal metric",
        passed,
        bad.map_or_else(|| format!("{checked} prefixes"), |w| format!("prefix {w} differs")),
    );
    Ok(())
}

fn singular(out: &mut Checks, n: u32) -> Result<()> {
    let m = TileMeasure::uniform(Alphabet::Pillow, n)?;
    let report = middle_third_ratios(&pushforward_x(&m))?;
    let expected = BigRational::new(2.into(), 5.into());
    let bad = report.ratios.iter().find(|r| r.ratio != expected);
    out.push(
        Some(n),
        "middle thirds carry 4/10",
        bad.is_none() && report.skipped.is_empty(),
        match bad {
            Some(r) => format!("interval {} at level {} has {}", r.index, r.level, r.ratio),
            None => format!("{} intervals, {} skipped", report.ratios.len(), report.skipped.len()),
        },
    );
    Ok(())
}

fn quotient(out: &mut Checks, n: u32) -> Result<()> {
    let g = ReplacementGraph::build(n, CentralEdgePolicy::On)?;
    let r = lipschitz_quotient_check(&g);
    let detail = match &r.violation {
        Some(w) => format!(
            "{} to cell {:?}: fiber {}, grid {}",
            g.word(w.vertex),
            w.cell,
            w.fiber_distance,
            w.grid_distance
        ),
        None => format!("{} vertices, radii up to {}", r.vertices_checked, r.max_radius),
    };
    out.push(Some(n), "projected balls = grid balls", r.passed(), detail);
    Ok(())
}

const COVER_SAMPLES: usize = 40;

fn covering(out: &mut Checks, n: u32, rng: &mut ChaCha8Rng) -> Result<()> {
    let g = ReplacementGraph::build(n, CentralEdgePolicy::On)?;
    let side = cells_per_axis(n) as u32;
    let mut bad = None;
    let mut overlap = 0;
    for _ in 0..COVER_SAMPLES {
        let ball = GridBall {
            center: (rng.random_range(0..side), rng.random_range(0..side)),
            radius: rng.random_range(0..=side / 3),
        };
        let r = cover_preimage(&g, ball, 5)?;
        overlap = overlap.max(r.overlap);
        if !r.passed() {
            bad.get_or_insert(format!("{ball:?}: {}", r.witness.unwrap_or_default()));
        }
    }
    let passed = bad.is_none();
    out.push(
        Some(n),
        "covering properties",
        passed,
        bad.unwrap_or_else(|| format!("{COVER_SAMPLES} balls, max overlap {overlap}")),
    );
    Ok(())
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn modulus_families(out: &mut Checks) {
    let mut push = |name: String, got: Result<f64>, want: f64| match got {
        Ok(v) => out.push(None, &name, relative(v, want) <= 1e-6, format!("{v:.12} vs {want:.12}")),
        Err(e) => out.push(None, &name, false, e.to_string()),
    };
    for p in [1.0, 1.5, 2.0, 3.0] {
        for k in [1, 3, 5] {
            let net = Network::path(k);
            push(format!("path k={k} p={p}"), value(&net, CurveEndpoints::single(0, k), p), (k as f64).powf(1.0 - p));
            let m = 3;
            let net = Network::parallel_paths(m, k);
            push(
                format!("parallel m={m} k={k} p={p}"),
                value(&net, CurveEndpoints::single(0, 1), p),
                m as f64 * (k as f64).powf(1.0 - p),
            );
        }
    }
    for side in 2..=5 {
        let net = Network::grid(side, side);
        let ends = CurveEndpoints::grid_left_right(side, side).expect("grid sides are disjoint");
        let cut = mincut_oracle(&net, &ends) as f64;
        push(format!("grid {side}x{side} p=1 = min cut"), value(&net, Ok(ends.clone()), 1.0), cut);
        let conductance = effective_conductance(&net, &ends);
        push(format!("grid {side}x{side} p=2 = conductance"), value(&net, Ok(ends), 2.0), conductance);
    }
}

fn value(net: &Network, ends: Result<CurveEndpoints>, p: f64) -> Result<f64> {
    let r = solve_modulus(&ModulusProblem::new(net, ends?, p))?;
    if !r.converged || r.relative_gap() > 5e-6 {
        return Err(Error::Consistency(format!(
            "not certified: [{}, {}] after {} rounds",
            r.value_lower, r.value_upper, r.iterations
        )));
    }
    Ok(r.value())
}

/// Unit-conductance current between the sources (potential 0) and targets
/// (potential 1), by dense elimination on the free vertices.
fn effective_conductance(net: &Network, ends: &CurveEndpoints) -> f64 {
    let n = net.vertex_count();
    let mut fixed = vec![None; n];
    for &s in &ends.sources {
        fixed[s] = Some(0.0);
    }
    for &t in &ends.targets {
        fixed[t] = Some(1.0);
    }
    let free: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        slot[v] = k;
    }
    let m = free.len();
    let mut a: Vec<Vec<f64>> = vec![vec![0.0; m + 1]; m];
    for &(u, v) in net.edges() {
        let (u, v) = (u as usize, v as usize);
        for (x, y) in [(u, v), (v, u)] {
            if fixed[x].is_none() {
                let i = slot[x];
                a[i][i] += 1.0;
                match fixed[y] {
                    Some(phi) => a[i][m] += phi,
                    None => a[i][slot[y]] -= 1.0,
                }
            }
        }
    }
    for c in 0..m {
        let pivot = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, pivot);
        for i in 0..m {
            if i != c {
                let f = a[i][c] / a[c][c];
                if f != 0.0 {
                    let pivot_row = a[c].clone();
                    for (x, y) in a[i][c..].iter_mut().zip(&pivot_row[c..]) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    let mut phi: Vec<f64> = fixed.iter().map(|x| x.unwrap_or(0.0)).collect();
    for (k, &v) in free.iter().enumerate() {
        phi[v] = a[k][m] / a[k][k];
    }
    net.edges()
        .iter()
        .filter_map(|&(u, v)| {
            let (u, v) = (u as usize, v as usize);
            match (ends.sources.contains(&u), ends.sources.contains(&v)) {
                (true, false) => Some(phi[v] - phi[u]),
                (false, true) => Some(phi[u] - phi[v]),
                _ => None,
            }
        })
        .sum()
}

fn modulus_level(out: &mut Checks, n: u32) -> Result<()> {
    let g = ReplacementGraph::build(n, CentralEdgePolicy::On)?;
    let net = Network::from_graph(&g);
    let ends = CurveEndpoints::sides(&g, Side::Left, Side::Right)?;
    let cut = mincut_oracle(&net, &ends);
    let r = solve_modulus(&ModulusProblem::new(&net, ends, 1.0))?;
    out.push(
        Some(n),
        "p=1 left-right = min cut",
        r.value_lower == cut as f64 && r.value_upper == cut as f64,
        format!("[{}, {}] vs {cut}", r.value_lower, r.value_upper),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("1..5").unwrap(), 1..=5);
        assert_eq!(parse_levels("3").unwrap(), 3..=3);
        for bad in ["0..2", "3..1", "a..b", ""] {
            assert!(parse_levels(bad).is_err(), "{bad}");
        }
        assert!(run_suite(Suite::Quotient, 1..=4, 0).is_err());
    }

    #[test]
    fn conductance_of_a_square() {
        let net = Network::grid(3, 3);
        let ends = CurveEndpoints::grid_left_right(3, 3).unwrap();
        assert!((effective_conductance(&net, &ends) - 1.5).abs() < 1e-12);
        let net = Network::path(4);
        assert!((effective_conductance(&net, &CurveEndpoints::single(0, 4).unwrap()) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn small_suites_pass() {
        for s in Suite::ALL {
            let r = run_suite(s, 1..=2, 0).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        }
    }
}
