//! Tile measures on `X_n`, the singular x-pushforward, doubling checks,
//! dimension estimates and measure blowups.
//!
//! Masses are exact rationals; floating point appears only in the dimension
//! regressions and when reporting.

mod dimension;
mod doubling;
mod pushforward;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub use dimension::{
    ball_dimension_estimate, box_dimension_estimate, least_squares, BallCensus, DimensionEstimate,
    DimensionRow,
};
pub use doubling::{tile_doubling_check, DoublingReport};
pub use pushforward::{middle_third_ratios, pushforward_x, IntervalWeights, MiddleThirdRatio, MiddleThirdReport};

use crate::error::{Error, Result};
use crate::rule::{Alphabet, GroupElement, Word};

/// A measure on the tiles of one level, indexed like the graph vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct TileMeasure {
    alphabet: Alphabet,
    level: u32,
    mass: Vec<BigRational>,
}

fn unit_fraction(den: usize, power: u32) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(den).pow(power))
}

impl TileMeasure {
    pub fn new(alphabet: Alphabet, level: u32, mass: Vec<BigRational>) -> Result<Self> {
        let expected = alphabet
            .word_count(level)
            .ok_or_else(|| Error::domain("level too large"))?;
        if mass.len() != expected {
            return Err(Error::domain(format!(
                "expected {expected} masses at level {level}, got {}",
                mass.len()
            )));
        }
        if let Some(i) = mass.iter().position(|m| *m < BigRational::zero()) {
            return Err(Error::domain(format!("negative mass on tile {i}")));
        }
        let m = TileMeasure {
            alphabet,
            level,
            mass,
        };
        if m.total().is_zero() {
            return Err(Error::domain("measure has zero total mass"));
        }
        Ok(m)
    }

    /// Mass `size^-n` on every tile: the normalized Hausdorff measure.
    pub fn uniform(alphabet: Alphabet, level: u32) -> Result<Self> {
        let count = alphabet
            .word_count(level)
            .ok_or_else(|| Error::domain("level too large"))?;
        let each = unit_fraction(alphabet.size(), level);
        Ok(TileMeasure {
            alphabet,
            level,
            mass: vec![each; count],
        })
    }

    /// Mass `9^-n` on the tiles of the sheet `s_g`, zero elsewhere.
    pub fn sheet(level: u32, g: &GroupElement) -> Result<Self> {
        let count = Alphabet::Pillow
            .word_count(level)
            .ok_or_else(|| Error::domain("level too large"))?;
        let mut mass = vec![BigRational::zero(); count];
        let each = unit_fraction(9, level);
        for i in 0..9usize.pow(level) {
            let u = Word::from_index(Alphabet::Grid, level as usize, i);
            let w = Word::section(&u, g)?;
            let idx = w.index(Alphabet::Pillow).expect("pillow word");
            mass[idx] = each.clone();
        }
        Ok(TileMeasure {
            alphabet: Alphabet::Pillow,
            level,
            mass,
        })
    }

    /// Unit mass on a single tile.
    pub fn dirac(alphabet: Alphabet, w: &Word) -> Result<Self> {
        let level = w.len() as u32;
        let idx = w
            .index(alphabet)
            .ok_or_else(|| Error::domain(format!("{w} is not a {} word", alphabet.name())))?;
        let count = alphabet
            .word_count(level)
            .ok_or_else(|| Error::domain("level too large"))?;
        let mut mass = vec![BigRational::zero(); count];
        mass[idx] = BigRational::from_integer(BigInt::from(1));
        Ok(TileMeasure {
            alphabet,
            level,
            mass,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self, i: usize) -> &BigRational {
        &self.mass[i]
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.mass
    }

    pub fn set_mass(&mut self, i: usize, m: BigRational) {
        self.mass[i] = m;
    }

    pub fn total(&self) -> BigRational {
        self.mass.iter().fold(BigRational::zero(), |acc, m| acc + m)
    }

    /// Level `n-1` measure by summing over the last letter.
    pub fn coarsen(&self) -> Result<TileMeasure> {
        if self.level == 0 {
            return Err(Error::domain("cannot coarsen a level-0 measure"));
        }
        let size = self.alphabet.size();
        let mass = self
            .mass
            .chunks(size)
            .map(|c| c.iter().fold(BigRational::zero(), |acc, m| acc + m))
            .collect();
        Ok(TileMeasure {
            alphabet: self.alphabet,
            level: self.level - 1,
            mass,
        })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.mass.iter().map(|m| m.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Normalized shift pushforward of `m` restricted to `X_w`.
pub fn blowup_measure(m: &TileMeasure, w: &Word) -> Result<TileMeasure> {
    let k = w.len() as u32;
    if k > m.level {
        return Err(Error::domain(format!(
            "prefix {w} is longer than the measure level {}",
            m.level
        )));
    }
    let p = w
        .index(m.alphabet)
        .ok_or_else(|| Error::domain(format!("{w} is not a {} word", m.alphabet.name())))?;
    let block = m.alphabet.size().pow(m.level - k);
    let slice = &m.mass[p * block..(p + 1) * block];
    let total = slice.iter().fold(BigRational::zero(), |acc, x| acc + x);
    if total.is_zero() {
        return Err(Error::domain(format!("prefix {w} carries zero mass")));
    }
    Ok(TileMeasure {
        alphabet: m.alphabet,
        level: m.level - k,
        mass: slice.iter().map(|x| x / &total).collect(),
    })
}
