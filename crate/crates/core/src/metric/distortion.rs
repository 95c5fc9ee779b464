use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::MetricMatrix;
use crate::error::{Error, Result};

/// One ratio bin `[2^(k/2), 2^((k+1)/2))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionBin {
    pub index: i32,
    pub lower: f64,
    pub upper: f64,
    pub count: u64,
    /// Largest output ratio seen in this bin; `None` for an empty bin.
    pub max_ratio: Option<f64>,
    /// Running maximum over this and all lower bins.
    pub envelope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionProfile {
    pub samples: u64,
    /// Triples with `x = y` or `x = z`.
    pub skipped: u64,
    /// Bins of `d1(x,y)/d1(x,z)` against `d2(x,y)/d2(x,z)`.
    pub forward: Vec<DistortionBin>,
    /// The same triples with the roles of `d1` and `d2` switched.
    pub inverse: Vec<DistortionBin>,
}

fn bin_index(t: f64) -> i32 {
    (2.0 * t.log2()).floor() as i32
}

fn profile(pairs: &[(f64, f64)]) -> Vec<DistortionBin> {
    if pairs.is_empty() {
        return Vec::new();
    }
    let lo = pairs.iter().map(|p| bin_index(p.0)).min().expect("nonempty");
    let hi = pairs.iter().map(|p| bin_index(p.0)).max().expect("nonempty");
    let mut bins: Vec<DistortionBin> = (lo..=hi)
        .map(|k| DistortionBin {
            index: k,
            lower: 2f64.powf(k as f64 / 2.0),
            upper: 2f64.powf((k + 1) as f64 / 2.0),
            count: 0,
            max_ratio: None,
            envelope: None,
        })
        .collect();
    for &(t, s) in pairs {
        let b = &mut bins[(bin_index(t) - lo) as usize];
        b.count += 1;
        b.max_ratio = Some(b.max_ratio.map_or(s, |m: f64| m.max(s)));
    }
    let mut running: Option<f64> = None;
    for b in &mut bins {
        if let Some(m) = b.max_ratio {
            running = Some(running.map_or(m, |r| r.max(m)));
        }
        b.envelope = running;
    }
    bins
}

/// Empirical quasisymmetry profile of the identity map `(U, d1) → (U, d2)`.
pub fn qs_distortion(d1: &MetricMatrix, d2: &MetricMatrix, samples: u64, seed: u64) -> Result<DistortionProfile> {
    if d1.universe() != d2.universe() {
        return Err(Error::domain("distortion needs two tables on the same universe"));
    }
    let n = d1.len();
    if n < 2 {
        return Err(Error::domain("distortion needs at least two points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut forward = Vec::new();
    let mut inverse = Vec::new();
    let mut skipped = 0;
    for _ in 0..samples {
        let (x, y, z) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        if x == y || x == z {
            skipped += 1;
            continue;
        }
        let t = d1.get(x, y) / d1.get(x, z);
        let s = d2.get(x, y) / d2.get(x, z);
        forward.push((t, s));
        inverse.push((s, t));
    }
    Ok(DistortionProfile {
        samples,
        skipped,
        forward: profile(&forward),
        inverse: profile(&inverse),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CentralEdgePolicy, ReplacementGraph};
    use crate::metric::graph_metric;

    fn metric() -> MetricMatrix {
        graph_metric(&ReplacementGraph::build(2, CentralEdgePolicy::On).unwrap()).unwrap()
    }

    #[test]
    fn identity_envelope() {
        let d = metric();
        let p = qs_distortion(&d, &d, 20_000, 3).unwrap();
        assert_eq!(p.samples, 20_000);
        for b in p.forward.iter().filter(|b| b.count > 0) {
            let e = b.envelope.unwrap();
            assert!(e >= b.lower && e < b.upper, "{b:?}");
        }
        assert_eq!(p.forward, p.inverse);
    }

    #[test]
    fn scaling_cancels() {
        let d = metric();
        let a = qs_distortion(&d, &d, 5_000, 9).unwrap();
        let b = qs_distortion(&d, &d.map(|x| 2.0 * x), 5_000, 9).unwrap();
        assert_eq!(a.forward, b.forward);
    }

    #[test]
    fn snowflake_envelope_is_a_square_root() {
        let d = metric();
        let p = qs_distortion(&d, &d.map(f64::sqrt), 20_000, 5).unwrap();
        for b in p.forward.iter().filter(|b| b.count > 0) {
            let e = b.envelope.unwrap();
            assert!(e >= b.lower.sqrt() && e < b.upper.sqrt(), "{b:?}");
        }
    }

    #[test]
    fn envelope_is_monotone_and_empty_bins_stay_empty() {
        let d = metric();
        let p = qs_distortion(&d, &d.map(|x| x.powf(1.5)), 2_000, 1).unwrap();
        for w in p.forward.windows(2) {
            assert!(w[1].envelope >= w[0].envelope);
        }
        assert!(p.forward.iter().all(|b| (b.count == 0) == b.max_ratio.is_none()));
    }
}
