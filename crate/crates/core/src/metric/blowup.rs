use super::{MetricMatrix, Universe};
use crate::error::{Error, Result};
use crate::rule::Word;

#[derive(Clone, Debug, PartialEq)]
pub enum Normalization {
    /// Divide by the diameter of the block.
    Diameter,
    /// Divide by the distance of two block points, given as shifted words.
    Pair(Word, Word),
    /// Divide by a fixed factor.
    Factor(f64),
}

/// `d(w p, w q) / λ` on the words `p, q` of the remaining length.
pub fn blowup_metric(d: &MetricMatrix, w: &Word, norm: &Normalization) -> Result<MetricMatrix> {
    let u = d.universe();
    if !w.starts_with(&u.prefix) || w.len() > u.level as usize {
        return Err(Error::domain(format!(
            "{w} is not a prefix inside the table's universe (prefix {}, level {})",
            u.prefix, u.level
        )));
    }
    let block = Universe::new(u.alphabet, u.level, w.clone())?;
    let start = block.offset() - u.offset();
    let lower = Universe::full(u.alphabet, u.level - w.len() as u32);
    let lambda = match norm {
        Normalization::Diameter => {
            let n = block.len();
            (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| d.get(start + i, start + j))
                .fold(0.0, f64::max)
        }
        Normalization::Pair(a, b) => {
            let i = lower
                .index(a)
                .ok_or_else(|| Error::domain(format!("{a} is not a word of length {}", lower.level)))?;
            let j = lower
                .index(b)
                .ok_or_else(|| Error::domain(format!("{b} is not a word of length {}", lower.level)))?;
            d.get(start + i, start + j)
        }
        Normalization::Factor(f) => *f,
    };
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("normalizer {lambda} is not positive")));
    }
    Ok(MetricMatrix::from_fn_unchecked(lower, |i, j| d.get(start + i, start + j) / lambda))
}

/// Largest ratio `a / b` over entries of two tables on the same universe.
pub fn comparability(a: &MetricMatrix, b: &MetricMatrix) -> Result<f64> {
    if a.universe() != b.universe() {
        return Err(Error::domain("tables live on different universes"));
    }
    Ok(a.upper()
        .iter()
        .zip(b.upper())
        .map(|(x, y)| x / y)
        .fold(1.0, f64::max))
}
