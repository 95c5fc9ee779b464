use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::{flow, potential, ModulusProblem, ModulusResult, Network};

/// Violated paths added per separation round.
const PATHS_PER_ROUND: usize = 8;
/// Rounds of coordinate ascent between potential polishes.
const POLISH_AFTER: usize = 100;
use crate::error::Result;

#[derive(PartialEq)]
struct State {
    dist: f64,
    vertex: u32,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) struct Crossing {
    pub vertices: Vec<u32>,
    pub edges: Vec<u32>,
}

/// Shortest-path tree from a vertex set. Ties go to the smaller vertex.
pub(crate) struct Tree {
    pub dist: Vec<f64>,
    pred: Vec<Option<(u32, u32)>>,
}

impl Tree {
    pub fn new(net: &Network, sources: &[usize], w: &[f64]) -> Tree {
        let n = net.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred: Vec<Option<(u32, u32)>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(State {
                dist: 0.0,
                vertex: s as u32,
            });
        }
        while let Some(State { dist: d, vertex }) = heap.pop() {
            let u = vertex as usize;
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, e) in net.incident(u) {
                let v = v as usize;
                let nd = d + w[e as usize];
                if !done[v] && nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = Some((u as u32, e));
                    heap.push(State {
                        dist: nd,
                        vertex: v as u32,
                    });
                }
            }
        }
        Tree { dist, pred }
    }

    pub fn path_to(&self, t: usize) -> Crossing {
        let mut vertices = vec![t as u32];
        let mut edges = Vec::new();
        let mut cur = t;
        while let Some((u, e)) = self.pred[cur] {
            vertices.push(u);
            edges.push(e);
            cur = u as usize;
        }
        vertices.reverse();
        edges.reverse();
        Crossing {
            vertices,
            edges,
        }
    }

    /// Nearest target, the smallest index among ties.
    pub fn nearest(&self, targets: &[usize]) -> Option<usize> {
        targets
            .iter()
            .copied()
            .filter(|&t| self.dist[t].is_finite())
            .min_by(|&a, &b| self.dist[a].total_cmp(&self.dist[b]).then(a.cmp(&b)))
    }
}

/// Shortest source-to-target path under edge weights `w`.
pub(crate) fn shortest_crossing(
    net: &Network,
    sources: &[usize],
    targets: &[usize],
    w: &[f64],
) -> Option<Crossing> {
    let tree = Tree::new(net, sources, w);
    tree.nearest(targets).map(|t| tree.path_to(t))
}

/// The potential `min(d, ℓ) / ℓ` for `rho`-distances `d` from the sources.
/// Its gradient is dominated by `rho / ℓ` and every crossing still has
/// length at least 1.
fn truncated_potential(dist: &[f64], ell: f64) -> Vec<f64> {
    dist.iter().map(|&d| d.min(ell) / ell).collect()
}

fn gradient(net: &Network, u: &[f64]) -> Vec<f64> {
    net.edges()
        .iter()
        .map(|&(a, b)| (u[a as usize] - u[b as usize]).abs())
        .collect()
}

/// Largest `λ ≥ 0` with `Σ ((o_e + λ)/p)^a ≤ 1`, i.e. the root of the
/// coordinate optimality condition, or 0 if the path is already long enough.
fn coordinate_root(others: &[f64], p: f64, a: f64) -> f64 {
    let phi = |lam: f64| -> (f64, f64) {
        let mut f = -1.0;
        let mut df = 0.0;
        for &o in others {
            let x = (o + lam) / p;
            if x > 0.0 {
                let t = x.powf(a);
                f += t;
                df += a * t / (o + lam);
            }
        }
        (f, df)
    };
    let (f0, _) = phi(0.0);
    if f0 >= 0.0 {
        return 0.0;
    }
    if a == 1.0 {
        return (p - others.iter().sum::<f64>()) / others.len() as f64;
    }
    let mut lo = 0.0;
    let mut hi = p * (others.len() as f64).powf(-1.0 / a);
    while phi(hi).0 < 0.0 {
        hi *= 2.0;
    }
    let mut lam = hi;
    for _ in 0..100 {
        let (f, df) = phi(lam);
        if f.abs() <= 1e-15 {
            return lam;
        }
        if f < 0.0 {
            lo = lam;
        } else {
            hi = lam;
        }
        let newton = lam - f / df;
        lam = if df > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    lam
}

struct Dual {
    p: f64,
    a: f64,
    paths: Vec<Vec<u32>>,
    vertices: Vec<Vec<u32>>,
    lambda: Vec<f64>,
    load: Vec<f64>,
}

impl Dual {
    fn density(&self) -> Vec<f64> {
        self.load
            .iter()
            .map(|&s| if s > 0.0 { (s / self.p).powf(self.a) } else { 0.0 })
            .collect()
    }

    fn sweep(&mut self) {
        let mut others = Vec::new();
        for k in 0..self.paths.len() {
            let lam = self.lambda[k];
            others.clear();
            others.extend(self.paths[k].iter().map(|&e| (self.load[e as usize] - lam).max(0.0)));
            let next = coordinate_root(&others, self.p, self.a);
            let delta = next - lam;
            if delta != 0.0 {
                for (&e, &o) in self.paths[k].iter().zip(&others) {
                    self.load[e as usize] = o + next;
                }
                self.lambda[k] = next;
            }
        }
    }

    fn lower_bound(&self, rho: &[f64]) -> f64 {
        let sum_lambda: f64 = self.lambda.iter().sum();
        let energy: f64 = rho.iter().map(|r| r.powf(self.p)).sum();
        sum_lambda - (self.p - 1.0) * energy
    }
}

/// Certified p-modulus of all source-to-target paths.
pub fn solve_modulus(prob: &ModulusProblem) -> Result<ModulusResult> {
    prob.validate()?;
    let net = prob.network;
    let (sources, targets) = (&prob.endpoints.sources, &prob.endpoints.targets);
    let m = net.edge_count();
    let Some(first) = shortest_crossing(net, sources, targets, &vec![1.0; m]) else {
        return Ok(ModulusResult {
            value_lower: 0.0,
            value_upper: 0.0,
            density: vec![0.0; m],
            active_paths: Vec::new(),
            iterations: 0,
            converged: true,
        });
    };
    if prob.p == 1.0 {
        return Ok(solve_p1(net, sources, targets));
    }
    let p = prob.p;
    let tol = prob.tolerance;
    let mut dual = Dual {
        p,
        a: 1.0 / (p - 1.0),
        paths: Vec::new(),
        vertices: Vec::new(),
        lambda: Vec::new(),
        load: vec![0.0; m],
    };
    let mut seen = HashSet::new();
    seen.insert(first.edges.clone());
    dual.paths.push(first.edges);
    dual.vertices.push(first.vertices);
    dual.lambda.push(0.0);

    let mut best_lower = 0.0f64;
    // upper bound, density, potential
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut converged = false;
    let mut rounds = 0;
    while iterations < prob.max_iterations {
        iterations += 1;
        rounds += 1;
        dual.sweep();
        let rho = dual.density();
        best_lower = best_lower.max(dual.lower_bound(&rho));
        let tree = Tree::new(net, sources, &rho);
        let nearest = tree.nearest(targets).expect("endpoints are connected");
        let ell = tree.dist[nearest];
        if ell > 0.0 {
            let u = truncated_potential(&tree.dist, ell);
            let density = gradient(net, &u);
            let upper: f64 = density.iter().map(|r| r.powf(p)).sum();
            if best.as_ref().is_none_or(|b| upper < b.0) {
                best = Some((upper, density, u));
            }
        }
        let gap_ok = best
            .as_ref()
            .is_some_and(|b| best_lower > 0.0 && b.0 / best_lower - 1.0 <= tol);
        if ell >= 1.0 - tol && gap_ok {
            converged = true;
            break;
        }
        // the most violated targets each contribute a path
        let mut violated: Vec<usize> = targets.iter().copied().filter(|&t| tree.dist[t] < 1.0 - tol).collect();
        violated.sort_by(|&a, &b| tree.dist[a].total_cmp(&tree.dist[b]).then(a.cmp(&b)));
        violated.truncate(PATHS_PER_ROUND);
        for t in violated {
            let c = tree.path_to(t);
            if seen.insert(c.edges.clone()) {
                dual.paths.push(c.edges);
                dual.vertices.push(c.vertices);
                dual.lambda.push(0.0);
            }
        }
        if rounds % POLISH_AFTER == 0 && iterations < prob.max_iterations {
            if let Some(b) = &best {
                let budget = prob.max_iterations - iterations;
                let pol = potential::polish(net, sources, targets, p, &b.2, tol, budget);
                iterations += pol.steps;
                best_lower = best_lower.max(pol.lower);
                if pol.upper < b.0 {
                    best = Some((pol.upper, pol.density, pol.potential));
                }
                let b = best.as_ref().expect("set above");
                if best_lower > 0.0 && b.0 / best_lower - 1.0 <= tol {
                    converged = true;
                    break;
                }
            }
        }
    }
    let (value_upper, density) = best.map_or((f64::INFINITY, vec![0.0; m]), |b| (b.0, b.1));
    Ok(ModulusResult {
        value_lower: best_lower,
        value_upper,
        density,
        active_paths: dual.vertices,
        iterations,
        converged,
    })
}

/// `mod_1` is the minimum edge cut; the flow paths certify the lower bound.
fn solve_p1(net: &Network, sources: &[usize], targets: &[usize]) -> ModulusResult {
    let (value, paths, cut) = flow::edmonds_karp(net, sources, targets);
    let mut density = vec![0.0; net.edge_count()];
    for e in cut {
        density[e] = 1.0;
    }
    ModulusResult {
        value_lower: value as f64,
        value_upper: value as f64,
        density,
        active_paths: paths,
        iterations: 1,
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulus::CurveEndpoints;

    #[test]
    fn root_of_uniform_path() {
        // k edges, p = 2: ρ = λ/2 on each edge, k ρ = 1
        let lam = coordinate_root(&[0.0; 4], 2.0, 1.0);
        assert!((lam - 0.5).abs() < 1e-14);
        let lam = coordinate_root(&[0.0; 4], 3.0, 0.5);
        assert!((4.0 * (lam / 3.0).sqrt() - 1.0).abs() < 1e-13);
        assert_eq!(coordinate_root(&[10.0, 10.0], 2.0, 1.0), 0.0);
    }

    #[test]
    fn shortest_crossing_prefers_low_vertices_on_ties() {
        let net = Network::grid(3, 3);
        let c = shortest_crossing(&net, &[0, 3, 6], &[2, 5, 8], &vec![1.0; net.edge_count()]).unwrap();
        assert_eq!(c.edges.len(), 2);
        assert_eq!(c.vertices, vec![0, 1, 2]);
    }

    #[test]
    fn single_path() {
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            let net = Network::path(5);
            let prob = ModulusProblem::new(&net, CurveEndpoints::single(0, 5).unwrap(), p);
            let r = solve_modulus(&prob).unwrap();
            let exact = 5f64.powf(1.0 - p);
            assert!(r.converged, "{p} {r:?}");
            assert!((r.value_lower - exact).abs() <= 1e-6 * exact, "{p} {r:?}");
            assert!((r.value_upper - exact).abs() <= 1e-6 * exact);
            for &d in &r.density {
                assert!((d - 0.2).abs() < 1e-6 || p == 1.0);
            }
        }
    }

    #[test]
    fn disconnected_is_zero() {
        let net = Network::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let prob = ModulusProblem::new(&net, CurveEndpoints::single(0, 3).unwrap(), 2.0);
        let r = solve_modulus(&prob).unwrap();
        assert_eq!((r.value_lower, r.value_upper), (0.0, 0.0));
        assert!(r.converged);
    }

    #[test]
    fn bad_problems_are_rejected() {
        let net = Network::path(2);
        let e = CurveEndpoints::single(0, 2).unwrap();
        assert!(solve_modulus(&ModulusProblem::new(&net, e.clone(), 0.5)).is_err());
        assert!(solve_modulus(&ModulusProblem::new(&net, e.clone(), 2.0).with_tolerance(0.1)).is_err());
        assert!(solve_modulus(&ModulusProblem::new(&net, CurveEndpoints::single(0, 7).unwrap(), 2.0)).is_err());
        assert!(CurveEndpoints::single(1, 1).is_err());
    }

    #[test]
    fn parallel_paths() {
        for &p in &[1.0, 1.5, 2.0, 2.5] {
            let net = Network::parallel_paths(3, 4);
            let r = solve_modulus(&ModulusProblem::new(&net, CurveEndpoints::single(0, 1).unwrap(), p)).unwrap();
            let exact = 3.0 * 4f64.powf(1.0 - p);
            assert!(r.converged);
            assert!((r.value() - exact).abs() <= 1e-6 * exact, "{p} {r:?}");
        }
    }

    #[test]
    fn doubling_every_edge_doubles_modulus() {
        let net = Network::from_graph(&crate::ReplacementGraph::build(2, crate::CentralEdgePolicy::On).unwrap());
        let g = crate::ReplacementGraph::build(2, crate::CentralEdgePolicy::On).unwrap();
        let ends = CurveEndpoints::sides(&g, crate::Side::Left, crate::Side::Right).unwrap();
        for &p in &[1.0, 1.5, 3.0] {
            let one = solve_modulus(&ModulusProblem::new(&net, ends.clone(), p)).unwrap();
            let two = solve_modulus(&ModulusProblem::new(&net.doubled(), ends.clone(), p)).unwrap();
            assert!(one.converged && two.converged);
            assert!((two.value() / one.value() - 2.0).abs() < 1e-5, "{p}");
        }
    }

    #[test]
    fn returned_density_is_admissible() {
        let g = crate::ReplacementGraph::build(2, crate::CentralEdgePolicy::On).unwrap();
        let net = Network::from_graph(&g);
        let ends = CurveEndpoints::sides(&g, crate::Side::Bottom, crate::Side::Top).unwrap();
        for &p in &[1.5, 2.0, 3.0] {
            let r = solve_modulus(&ModulusProblem::new(&net, ends.clone(), p)).unwrap();
            let c = shortest_crossing(&net, &ends.sources, &ends.targets, &r.density).unwrap();
            let len: f64 = c.edges.iter().map(|&e| r.density[e as usize]).sum();
            assert!(len >= 1.0 - 1e-9);
            let energy: f64 = r.density.iter().map(|d| d.powf(p)).sum();
            assert!((energy - r.value_upper).abs() <= 1e-9 * energy);
            assert!(r.value_lower <= r.value_upper);
            assert!(r.relative_gap() <= 1e-6);
        }
    }

    #[test]
    fn iteration_cap_reports_bounds() {
        let g = crate::ReplacementGraph::build(2, crate::CentralEdgePolicy::On).unwrap();
        let net = Network::from_graph(&g);
        let ends = CurveEndpoints::sides(&g, crate::Side::Left, crate::Side::Right).unwrap();
        let mut prob = ModulusProblem::new(&net, ends, 2.0);
        prob.max_iterations = 3;
        let r = solve_modulus(&prob).unwrap();
        assert!(!r.converged);
        assert!(r.value_lower <= r.value_upper);
        assert_eq!(r.iterations, 3);
    }
}
