//! Newton polish on vertex potentials.
//!
//! `mod_p` of a connecting family equals the p-capacity
//! `min Σ |u(x) - u(y)|^p` over potentials with `u = 0` on the sources and
//! `u = 1` on the targets. The gradient density of any such potential is
//! admissible, and any conservative unit flow `f` certifies
//! `mod_p ≥ ‖f‖_q^{-p}` by Hölder's inequality.

use super::solver::Tree;
use super::Network;

pub(crate) struct Polish {
    pub lower: f64,
    pub upper: f64,
    pub density: Vec<f64>,
    pub potential: Vec<f64>,
    pub steps: usize,
}

struct Capacity<'a> {
    net: &'a Network,
    p: f64,
    free: Vec<usize>,
    slot: Vec<Option<usize>>,
}

impl Capacity<'_> {
    fn energy(&self, u: &[f64], eps: f64) -> f64 {
        let e2 = eps * eps;
        self.net
            .edges()
            .iter()
            .map(|&(a, b)| {
                let d = u[b as usize] - u[a as usize];
                (d * d + e2).powf(0.5 * self.p)
            })
            .sum()
    }

    /// Gradient over free vertices and the edge weights of the Hessian.
    fn derivatives(&self, u: &[f64], eps: f64) -> (Vec<f64>, Vec<f64>) {
        let p = self.p;
        let e2 = eps * eps;
        let mut grad = vec![0.0; self.free.len()];
        let mut weight = Vec::with_capacity(self.net.edge_count());
        for &(a, b) in self.net.edges() {
            let d = u[b as usize] - u[a as usize];
            let r = d * d + e2;
            let g = p * d * r.powf(0.5 * p - 1.0);
            weight.push(p * r.powf(0.5 * p - 2.0) * ((p - 1.0) * d * d + e2));
            if let Some(i) = self.slot[b as usize] {
                grad[i] += g;
            }
            if let Some(i) = self.slot[a as usize] {
                grad[i] -= g;
            }
        }
        (grad, weight)
    }

    fn hessian_apply(&self, weight: &[f64], x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&(a, b), &w) in self.net.edges().iter().zip(weight) {
            let (ia, ib) = (self.slot[a as usize], self.slot[b as usize]);
            let xa = ia.map_or(0.0, |i| x[i]);
            let xb = ib.map_or(0.0, |i| x[i]);
            if let Some(i) = ia {
                out[i] += w * (xa - xb);
            }
            if let Some(i) = ib {
                out[i] += w * (xb - xa);
            }
        }
    }

    /// Jacobi-preconditioned conjugate gradients for `H x = b`.
    fn solve(&self, weight: &[f64], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut diag = vec![0.0; n];
        for (&(a, c), &w) in self.net.edges().iter().zip(weight) {
            for v in [a, c] {
                if let Some(i) = self.slot[v as usize] {
                    diag[i] += w;
                }
            }
        }
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let mut dir = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let goal = 1e-24 * b.iter().map(|v| v * v).sum::<f64>();
        let mut hd = vec![0.0; n];
        for _ in 0..(4 * n).max(50) {
            if r.iter().map(|v| v * v).sum::<f64>() <= goal {
                break;
            }
            self.hessian_apply(weight, &dir, &mut hd);
            let dhd: f64 = dir.iter().zip(&hd).map(|(a, b)| a * b).sum();
            if dhd <= 0.0 {
                break;
            }
            let alpha = rz / dhd;
            for i in 0..n {
                x[i] += alpha * dir[i];
                r[i] -= alpha * hd[i];
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                dir[i] = z[i] + beta * dir[i];
            }
        }
        x
    }

    /// Lower bound from the current `|Δu|^{p-2} Δu`, made exactly
    /// conservative by trimming excess along the potential order.
    fn flow_bound(&self, u: &[f64], eps: f64, is_source: &[bool], is_target: &[bool]) -> f64 {
        let p = self.p;
        let e2 = eps * eps;
        let net = self.net;
        // oriented from lower to higher potential
        let mut arcs: Vec<(usize, usize, f64)> = net
            .edges()
            .iter()
            .filter_map(|&(a, b)| {
                let (a, b) = (a as usize, b as usize);
                let d = u[b] - u[a];
                let f = d.abs() * (d * d + e2).powf(0.5 * p - 1.0);
                if d > 0.0 {
                    Some((a, b, f))
                } else if d < 0.0 {
                    Some((b, a, f))
                } else {
                    None
                }
            })
            .collect();
        let n = net.vertex_count();
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        for (k, &(a, b, _)) in arcs.iter().enumerate() {
            out_arcs[a].push(k);
            in_arcs[b].push(k);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| u[a].total_cmp(&u[b]).then(a.cmp(&b)));
        let interior = |v: usize| !is_source[v] && !is_target[v];
        let total = |arcs: &[(usize, usize, f64)], ks: &[usize]| ks.iter().map(|&k| arcs[k].2).sum::<f64>();
        for &v in &order {
            if !interior(v) {
                continue;
            }
            let (i, o) = (total(&arcs, &in_arcs[v]), total(&arcs, &out_arcs[v]));
            if o > i {
                let s = if o > 0.0 { i / o } else { 0.0 };
                out_arcs[v].iter().for_each(|&k| arcs[k].2 *= s);
            }
        }
        for &v in order.iter().rev() {
            if !interior(v) {
                continue;
            }
            let (i, o) = (total(&arcs, &in_arcs[v]), total(&arcs, &out_arcs[v]));
            if i > o {
                let s = if i > 0.0 { o / i } else { 0.0 };
                in_arcs[v].iter().for_each(|&k| arcs[k].2 *= s);
            }
        }
        let strength: f64 = arcs
            .iter()
            .map(|&(a, b, f)| match (is_source[a], is_source[b]) {
                (true, false) => f,
                (false, true) => -f,
                _ => 0.0,
            })
            .sum();
        let q = p / (p - 1.0);
        let norm = arcs.iter().map(|a| a.2.powf(q)).sum::<f64>().powf(1.0 / q);
        if strength > 0.0 && norm > 0.0 {
            (strength / norm).powf(p)
        } else {
            0.0
        }
    }
}

/// Gradient density `|Δu| / ℓ` and its energy.
fn upper_bound(net: &Network, sources: &[usize], targets: &[usize], u: &[f64], p: f64) -> (f64, Vec<f64>) {
    let rho: Vec<f64> = net
        .edges()
        .iter()
        .map(|&(a, b)| (u[a as usize] - u[b as usize]).abs())
        .collect();
    let tree = Tree::new(net, sources, &rho);
    let ell = tree.nearest(targets).map_or(0.0, |t| tree.dist[t]);
    if ell <= 0.0 {
        return (f64::INFINITY, rho);
    }
    let density: Vec<f64> = rho.iter().map(|r| r / ell).collect();
    (density.iter().map(|r| r.powf(p)).sum(), density)
}

/// Minimizes the regularized capacity functional with damped Newton steps,
/// lowering the regularization until the certified gap is within `tol`.
pub(crate) fn polish(
    net: &Network,
    sources: &[usize],
    targets: &[usize],
    p: f64,
    start: &[f64],
    tol: f64,
    max_steps: usize,
) -> Polish {
    let n = net.vertex_count();
    let mut is_source = vec![false; n];
    let mut is_target = vec![false; n];
    sources.iter().for_each(|&s| is_source[s] = true);
    targets.iter().for_each(|&t| is_target[t] = true);
    let mut u: Vec<f64> = start.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let mut slot = vec![None; n];
    let mut free = Vec::new();
    for v in 0..n {
        if is_source[v] {
            u[v] = 0.0;
        } else if is_target[v] {
            u[v] = 1.0;
        } else {
            slot[v] = Some(free.len());
            free.push(v);
        }
    }
    let cap = Capacity { net, p, free, slot };

    let mut best = Polish {
        lower: 0.0,
        upper: f64::INFINITY,
        density: Vec::new(),
        potential: Vec::new(),
        steps: 0,
    };
    let record = |best: &mut Polish, u: &[f64], eps: f64| {
        best.lower = best.lower.max(cap.flow_bound(u, eps, &is_source, &is_target));
        let (upper, density) = upper_bound(net, sources, targets, u, p);
        if upper < best.upper {
            best.upper = upper;
            best.density = density;
            best.potential = u.to_vec();
        }
        best.lower > 0.0 && best.upper / best.lower - 1.0 <= tol
    };
    if record(&mut best, &u, 0.0) {
        return best;
    }
    for stage in 1..=12 {
        let eps = 10f64.powi(-stage);
        for _ in 0..60 {
            if best.steps >= max_steps {
                return best;
            }
            best.steps += 1;
            let (grad, weight) = cap.derivatives(&u, eps);
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = cap.solve(&weight, &rhs);
            let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
            if slope >= 0.0 {
                break;
            }
            let f0 = cap.energy(&u, eps);
            let mut t = 1.0;
            let mut trial = u.clone();
            loop {
                for (i, &v) in cap.free.iter().enumerate() {
                    trial[v] = u[v] + t * step[i];
                }
                if cap.energy(&trial, eps) <= f0 + 1e-4 * t * slope || t < 1e-12 {
                    break;
                }
                t *= 0.5;
            }
            let f1 = cap.energy(&trial, eps);
            if f1 >= f0 {
                break;
            }
            u.copy_from_slice(&trial);
            if (f0 - f1) <= 1e-15 * f0 {
                break;
            }
        }
        if record(&mut best, &u, eps) {
            return best;
        }
    }
    best
}
