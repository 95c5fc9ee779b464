//! Empirical Poincaré ratios with the edge gradient in place of `Lip u`.
//!
//! For a ball `B = ball(x, r)` the ratio is
//! `⨍_B |u - u_B| dμ / (2r · (⨍_{2B} |∇u|^p dμ)^{1/p})`, where
//! `|∇u|(v)` is the largest `|u(v) - u(w)|` over the edges at `v` and `2B`
//! is the ball of radius `2r`. Balls with a zero numerator and denominator
//! are excluded.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ReplacementGraph;
use crate::measure::TileMeasure;
use crate::rule::cells_per_axis;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestFunction {
    Constant,
    /// Cell column, in hops.
    XCoord,
    YCoord,
    /// `A cos(2π(kx x + ky y) + phase)` on the unit square, with the
    /// amplitude `A = 3^n / 2π` so slopes are of order one per hop.
    Cosine { kx: u32, ky: u32, phase: f64 },
}

impl TestFunction {
    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Constant => "constant",
            TestFunction::XCoord => "x",
            TestFunction::YCoord => "y",
            TestFunction::Cosine { .. } => "cosine",
        }
    }

    pub fn values(&self, g: &ReplacementGraph) -> Vec<f64> {
        let side = cells_per_axis(g.level()) as f64;
        (0..g.vertex_count())
            .map(|v| {
                let (x, y) = g.cell(v);
                match *self {
                    TestFunction::Constant => 1.0,
                    TestFunction::XCoord => x as f64,
                    TestFunction::YCoord => y as f64,
                    TestFunction::Cosine { kx, ky, phase } => {
                        let (s, t) = ((x as f64 + 0.5) / side, (y as f64 + 0.5) / side);
                        side / TAU * (TAU * (kx as f64 * s + ky as f64 * t) + phase).cos()
                    }
                }
            })
            .collect()
    }

    fn random<R: Rng>(rng: &mut R) -> TestFunction {
        match rng.random_range(0..3) {
            0 => TestFunction::XCoord,
            1 => TestFunction::YCoord,
            _ => TestFunction::Cosine {
                kx: rng.random_range(0..=3),
                ky: rng.random_range(1..=3),
                phase: rng.random_range(0.0..TAU),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiSample {
    pub function: TestFunction,
    pub center: String,
    pub radius: u32,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiReport {
    pub p: f64,
    pub trials: usize,
    pub excluded: usize,
    /// Largest ratio seen, `0` when every trial was excluded.
    pub worst_ratio: f64,
    pub worst: Option<PiSample>,
    /// Largest ratio per function family.
    pub by_family: Vec<(String, f64)>,
}

fn gradient(g: &ReplacementGraph, u: &[f64]) -> Vec<f64> {
    (0..g.vertex_count())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&(w, _)| (u[v] - u[w as usize]).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

fn check_inputs(g: &ReplacementGraph, m: &TileMeasure, p: f64) -> Result<Vec<f64>> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("exponent {p} must be at least 1")));
    }
    if m.alphabet() != g.alphabet() || m.level() != g.level() {
        return Err(Error::domain(format!(
            "measure on {} level {} does not live on the graph ({} level {})",
            m.alphabet().name(),
            m.level(),
            g.alphabet().name(),
            g.level()
        )));
    }
    Ok(m.to_f64())
}

/// The ratio on one ball, `None` for `0/0`.
fn ratio(g: &ReplacementGraph, mass: &[f64], u: &[f64], grad: &[f64], p: f64, x: usize, r: u32) -> Option<f64> {
    let ball = g.ball(x, r);
    let total: f64 = ball.iter().map(|&v| mass[v]).sum();
    if total == 0.0 {
        return None;
    }
    let mean = ball.iter().map(|&v| mass[v] * u[v]).sum::<f64>() / total;
    let lhs = ball.iter().map(|&v| mass[v] * (u[v] - mean).abs()).sum::<f64>() / total;
    let wide = g.ball(x, 2 * r);
    let wide_total: f64 = wide.iter().map(|&v| mass[v]).sum();
    let energy = wide.iter().map(|&v| mass[v] * grad[v].powf(p)).sum::<f64>() / wide_total;
    let rhs = 2.0 * r as f64 * energy.powf(1.0 / p);
    match (lhs > 1e-12, rhs > 0.0) {
        (false, _) => (rhs > 0.0).then_some(0.0),
        (true, false) => Some(f64::INFINITY),
        (true, true) => Some(lhs / rhs),
    }
}

/// Ratio of one function on one ball.
pub fn pi_ratio(
    g: &ReplacementGraph,
    m: &TileMeasure,
    p: f64,
    f: &TestFunction,
    center: usize,
    radius: u32,
) -> Result<Option<f64>> {
    let mass = check_inputs(g, m, p)?;
    if center >= g.vertex_count() || radius == 0 {
        return Err(Error::domain("ball needs a vertex of the graph and a positive radius"));
    }
    let u = f.values(g);
    Ok(ratio(g, &mass, &u, &gradient(g, &u), p, center, radius))
}

/// Worst ratio over `trials` random (function, ball) pairs. Radii are drawn
/// from `1..=max(1, 3^(n-1))`.
pub fn pi_diagnostic(g: &ReplacementGraph, m: &TileMeasure, p: f64, trials: usize, seed: u64) -> Result<PiReport> {
    pi_sampled(g, m, p, trials, seed, None)
}

/// [`pi_diagnostic`] with every trial using `f`.
pub fn pi_diagnostic_for(
    g: &ReplacementGraph,
    m: &TileMeasure,
    p: f64,
    f: &TestFunction,
    trials: usize,
    seed: u64,
) -> Result<PiReport> {
    pi_sampled(g, m, p, trials, seed, Some(f))
}

fn pi_sampled(
    g: &ReplacementGraph,
    m: &TileMeasure,
    p: f64,
    trials: usize,
    seed: u64,
    fixed: Option<&TestFunction>,
) -> Result<PiReport> {
    let mass = check_inputs(g, m, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_r = cells_per_axis(g.level().saturating_sub(1)).max(1) as u32;
    let mut report = PiReport {
        p,
        trials,
        excluded: 0,
        worst_ratio: 0.0,
        worst: None,
        by_family: Vec::new(),
    };
    let mut cache: Option<(TestFunction, Vec<f64>, Vec<f64>)> = None;
    for _ in 0..trials {
        let f = match fixed {
            Some(f) => f.clone(),
            None => TestFunction::random(&mut rng),
        };
        let x = rng.random_range(0..g.vertex_count());
        let r = rng.random_range(1..=max_r);
        if cache.as_ref().is_none_or(|(h, _, _)| *h != f) {
            let u = f.values(g);
            let grad = gradient(g, &u);
            cache = Some((f.clone(), u, grad));
        }
        let (_, u, grad) = cache.as_ref().unwrap();
        let Some(q) = ratio(g, &mass, u, grad, p, x, r) else {
            report.excluded += 1;
            continue;
        };
        match report.by_family.iter_mut().find(|(name, _)| name == f.name()) {
            Some((_, best)) => *best = best.max(q),
            None => report.by_family.push((f.name().to_string(), q)),
        }
        if report.worst.is_none() || q > report.worst_ratio {
            report.worst_ratio = q;
            report.worst = Some(PiSample {
                function: f,
                center: g.word(x).to_string(),
                radius: r,
                ratio: q,
            });
        }
    }
    report.by_family.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CentralEdgePolicy;
    use crate::rule::Alphabet;

    #[test]
    fn constant_is_excluded() {
        let g = ReplacementGraph::build(2, CentralEdgePolicy::On).unwrap();
        let m = TileMeasure::uniform(Alphabet::Pillow, 2).unwrap();
        let r = pi_diagnostic_for(&g, &m, 2.0, &TestFunction::Constant, 50, 1).unwrap();
        assert_eq!(r.excluded, 50);
        assert_eq!(r.worst_ratio, 0.0);
        assert!(r.worst.is_none());
    }

    #[test]
    fn linear_on_the_grid_is_stable() {
        let mut seen = Vec::new();
        for n in 2..=4 {
            let g = ReplacementGraph::grid(n).unwrap();
            let m = TileMeasure::uniform(Alphabet::Grid, n).unwrap();
            let r = pi_diagnostic_for(&g, &m, 2.0, &TestFunction::XCoord, 200, 7).unwrap();
            assert!(r.worst_ratio > 0.0 && r.worst_ratio <= 0.5, "{r:?}");
            seen.push(r.worst_ratio);
        }
        assert!(seen.iter().all(|&q| (q - seen[0]).abs() < 0.1), "{seen:?}");
    }

    #[test]
    fn seeded_and_checked() {
        let g = ReplacementGraph::build(3, CentralEdgePolicy::On).unwrap();
        let m = TileMeasure::uniform(Alphabet::Pillow, 3).unwrap();
        let a = pi_diagnostic(&g, &m, 1.5, 100, 3).unwrap();
        assert_eq!(a, pi_diagnostic(&g, &m, 1.5, 100, 3).unwrap());
        assert!(a.worst_ratio.is_finite() && a.worst_ratio > 0.0);
        assert!(pi_diagnostic(&g, &m, 0.5, 1, 0).is_err());
        let wrong = TileMeasure::uniform(Alphabet::Pillow, 2).unwrap();
        assert!(pi_diagnostic(&g, &wrong, 2.0, 1, 0).is_err());
    }

    #[test]
    fn single_ball() {
        let g = ReplacementGraph::grid(1).unwrap();
        let m = TileMeasure::uniform(Alphabet::Grid, 1).unwrap();
        let center = g.vertex(&"5".parse().unwrap()).unwrap();
        let q = pi_ratio(&g, &m, 1.0, &TestFunction::XCoord, center, 1).unwrap().unwrap();
        assert!((q - 0.2).abs() < 1e-12, "{q}");
    }
}
