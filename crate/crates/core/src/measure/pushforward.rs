use num_rational::BigRational;
use num_traits::Zero;

use super::TileMeasure;
use crate::error::{Error, Result};
use crate::rule::{cells_per_axis, Word};

/// Weights of the `3^n` triadic intervals of `[0, 1]` at level `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalWeights {
    pub level: u32,
    pub weights: Vec<BigRational>,
}

impl IntervalWeights {
    pub fn total(&self) -> BigRational {
        self.weights.iter().fold(BigRational::zero(), |acc, x| acc + x)
    }

    /// Weights of the `3^level` intervals at a coarser level.
    pub fn at_level(&self, level: u32) -> Vec<BigRational> {
        assert!(level <= self.level);
        let block = cells_per_axis(self.level - level) as usize;
        self.weights
            .chunks(block)
            .map(|c| c.iter().fold(BigRational::zero(), |acc, x| acc + x))
            .collect()
    }
}

/// Pushforward under the x-coordinate of the projection.
pub fn pushforward_x(m: &TileMeasure) -> IntervalWeights {
    let n = m.level();
    let mut weights = vec![BigRational::zero(); cells_per_axis(n) as usize];
    for (i, mass) in m.masses().iter().enumerate() {
        if mass.is_zero() {
            continue;
        }
        let x = Word::from_index(m.alphabet(), n as usize, i).square().x as usize;
        weights[x] += mass;
    }
    IntervalWeights { level: n, weights }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiddleThirdRatio {
    /// Level of the parent interval `I`.
    pub level: u32,
    pub index: u64,
    /// `weight(I_mid) / weight(I)`.
    pub ratio: BigRational,
}

#[derive(Clone, Debug, Default)]
pub struct MiddleThirdReport {
    pub ratios: Vec<MiddleThirdRatio>,
    /// Parent intervals of zero weight, as `(level, index)`.
    pub skipped: Vec<(u32, u64)>,
}

impl MiddleThirdReport {
    /// `Some(r)` if every computed ratio equals `r`.
    pub fn common_ratio(&self) -> Option<&BigRational> {
        let first = &self.ratios.first()?.ratio;
        self.ratios.iter().all(|r| r.ratio == *first).then_some(first)
    }
}

/// For each triadic interval `I` of level `< n` with positive weight, the
/// exact share of its middle third.
pub fn middle_third_ratios(w: &IntervalWeights) -> Result<MiddleThirdReport> {
    if w.level == 0 {
        return Err(Error::domain("middle-third ratios need level at least 1"));
    }
    let mut report = MiddleThirdReport::default();
    let mut finer = w.weights.clone();
    let mut by_level = vec![Vec::new(); w.level as usize + 1];
    for level in (0..w.level).rev() {
        let coarse: Vec<BigRational> = finer
            .chunks(3)
            .map(|c| c.iter().fold(BigRational::zero(), |acc, x| acc + x))
            .collect();
        by_level[level as usize + 1] = std::mem::replace(&mut finer, coarse);
    }
    by_level[0] = finer;
    for level in 0..w.level {
        let parents = &by_level[level as usize];
        let children = &by_level[level as usize + 1];
        for (i, parent) in parents.iter().enumerate() {
            if parent.is_zero() {
                report.skipped.push((level, i as u64));
                continue;
            }
            report.ratios.push(MiddleThirdRatio {
                level,
                index: i as u64,
                ratio: &children[3 * i + 1] / parent,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{Alphabet, GroupElement};
    use num_bigint::BigInt;
    use num_traits::One;

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn level_one_columns() {
        let m = TileMeasure::uniform(Alphabet::Pillow, 1).unwrap();
        let w = pushforward_x(&m);
        assert_eq!(w.weights, vec![frac(3, 10), frac(4, 10), frac(3, 10)]);
    }

    #[test]
    fn level_two_middle_of_middle() {
        let m = TileMeasure::uniform(Alphabet::Pillow, 2).unwrap();
        let w = pushforward_x(&m);
        assert_eq!(w.weights[4], frac(16, 100));
        assert!(w.total().is_one());
    }

    #[test]
    fn dirac_lands_on_its_column() {
        let word: Word = "52".parse().unwrap();
        let m = TileMeasure::dirac(Alphabet::Pillow, &word).unwrap();
        let w = pushforward_x(&m);
        let x = word.square().x as usize;
        assert!(w.weights[x].is_one());
        assert_eq!(w.weights.iter().filter(|v| !v.is_zero()).count(), 1);
    }

    #[test]
    fn uniform_ratio_is_four_tenths() {
        for n in 1..=4 {
            let m = TileMeasure::uniform(Alphabet::Pillow, n).unwrap();
            let r = middle_third_ratios(&pushforward_x(&m)).unwrap();
            assert_eq!(r.ratios.len() as u64, (3u64.pow(n) - 1) / 2);
            assert_eq!(r.common_ratio(), Some(&frac(4, 10)));
            assert!(r.skipped.is_empty());
        }
    }

    #[test]
    fn one_sheet_ratio_is_a_third() {
        let m = TileMeasure::sheet(3, &"011".parse::<GroupElement>().unwrap()).unwrap();
        let r = middle_third_ratios(&pushforward_x(&m)).unwrap();
        assert_eq!(r.common_ratio(), Some(&frac(1, 3)));
    }

    #[test]
    fn dirac_on_nested_middles() {
        let m = TileMeasure::dirac(Alphabet::Pillow, &"555".parse().unwrap()).unwrap();
        let r = middle_third_ratios(&pushforward_x(&m)).unwrap();
        assert_eq!(r.ratios.len(), 3);
        assert_eq!(r.common_ratio(), Some(&BigRational::one()));
        assert_eq!(r.skipped.len(), 2 + 8);
    }

    #[test]
    fn level_zero_is_rejected() {
        let w = IntervalWeights {
            level: 0,
            weights: vec![BigRational::one()],
        };
        assert!(middle_third_ratios(&w).is_err());
    }
}
