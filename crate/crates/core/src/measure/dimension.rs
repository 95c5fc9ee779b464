use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::ReplacementGraph;
use crate::rule::{Alphabet, Letter, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionRow {
    /// Level `n` for tile counts, scale exponent `m` for balls.
    pub scale: u32,
    pub log_scale: f64,
    pub count: f64,
    pub log_count: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub variant: &'static str,
    pub rows: Vec<DimensionRow>,
    pub estimate: f64,
    /// Root mean square of the regression residuals.
    pub residual: f64,
}

/// Slope, intercept and RMS residual of the least-squares line through `pts`.
pub fn least_squares(pts: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if pts.len() < 2 {
        return Err(Error::domain("regression needs at least two points"));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("regression needs at least two distinct scales"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok((slope, intercept, (ss / k).sqrt()))
}

fn estimate(variant: &'static str, rows: Vec<DimensionRow>) -> Result<DimensionEstimate> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.log_scale, r.log_count)).collect();
    let (slope, _, residual) = least_squares(&pts)?;
    Ok(DimensionEstimate {
        variant,
        rows,
        estimate: slope,
        residual,
    })
}

/// Regression of `log 10^n` against `log 3^n`.
pub fn box_dimension_estimate(levels: &[u32]) -> Result<DimensionEstimate> {
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() < 2 {
        return Err(Error::domain("dimension estimate needs at least two levels"));
    }
    let size = Alphabet::Pillow.size() as f64;
    let rows = levels
        .iter()
        .map(|&n| DimensionRow {
            scale: n,
            log_scale: n as f64 * 3f64.ln(),
            count: size.powi(n as i32),
            log_count: n as f64 * size.ln(),
        })
        .collect();
    estimate("tile-count", rows)
}

/// Sampling plan for the ball-counting variant.
#[derive(Clone, Debug, PartialEq)]
pub struct BallCensus {
    pub samples: usize,
    pub seed: u64,
    /// Scale exponents `m`; radii are `3^m`.
    pub scales: Vec<u32>,
}

impl BallCensus {
    /// Scales `2..=n-1` at level `n`, or `0..n` on graphs too small for that.
    pub fn for_level(level: u32, samples: usize, seed: u64) -> Self {
        let scales = if level >= 4 { (2..level).collect() } else { (0..level).collect() };
        BallCensus {
            samples,
            seed,
            scales,
        }
    }
}

/// Centers inside the central pillow `X_5 ∪ X_0`, away from the outer
/// boundary where balls are truncated.
fn sample_centers(g: &ReplacementGraph, samples: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = g.alphabet();
    let n = g.level() as usize;
    (0..samples)
        .map(|_| {
            let first = match alphabet {
                Alphabet::Pillow if rng.random::<bool>() => Letter::DOUBLED_CENTER,
                _ => Letter::CENTER,
            };
            let rest: Vec<Letter> = (1..n)
                .map(|_| alphabet.letter(rng.random_range(0..alphabet.size())))
                .collect();
            let w = Word::new(std::iter::once(first).chain(rest).collect());
            g.index_of(&w).expect("sampled word is a vertex")
        })
        .collect()
}

/// Regression of the mean `log |ball(v, 3^m)|` against `m log 3`.
pub fn ball_dimension_estimate(g: &ReplacementGraph, census: &BallCensus) -> Result<DimensionEstimate> {
    let mut scales = census.scales.clone();
    scales.sort_unstable();
    scales.dedup();
    if scales.len() < 2 {
        return Err(Error::domain("dimension estimate needs at least two scales"));
    }
    if g.level() == 0 || census.samples == 0 {
        return Err(Error::domain("ball census needs a positive level and sample count"));
    }
    let centers = sample_centers(g, census.samples, census.seed);
    let radii: Vec<u32> = scales.iter().map(|&m| 3u32.pow(m)).collect();
    let logs: Vec<Vec<f64>> = centers
        .par_iter()
        .map(|&c| {
            let dist = g.distances_from(c);
            radii
                .iter()
                .map(|&r| (dist.iter().filter(|&&d| d <= r).count() as f64).ln())
                .collect()
        })
        .collect();
    let k = logs.len() as f64;
    let rows = scales
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let mean = logs.iter().map(|l| l[j]).sum::<f64>() / k;
            DimensionRow {
                scale: m,
                log_scale: m as f64 * 3f64.ln(),
                count: mean.exp(),
                log_count: mean,
            }
        })
        .collect();
    estimate("ball-count", rows)
}
