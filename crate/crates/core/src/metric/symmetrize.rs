use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{MetricMatrix, Universe};
use crate::error::{Error, Result};
use crate::rule::{Alphabet, GroupElement, Word};

/// Exact mode enumerates `2^n` flips; beyond this level use sampling.
pub const MAX_EXACT_LEVEL: u32 = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetrizeMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

/// Index permutation of the full universe induced by the flip `ι_g`.
fn flip_permutation(universe: &Universe, g: &GroupElement) -> Vec<usize> {
    let n = universe.level as usize;
    (0..universe.len())
        .map(|i| {
            let w = Word::from_index(universe.alphabet, n, i);
            w.flip(g)
                .expect("element has the level length")
                .index(universe.alphabet)
                .expect("flips preserve the alphabet")
        })
        .collect()
}

/// Average of `d(ι_g x, ι_g y)` over the flip group, or over seeded samples.
pub fn symmetrize(d: &MetricMatrix, mode: SymmetrizeMode) -> Result<MetricMatrix> {
    let u = d.universe().clone();
    if !u.prefix.is_empty() {
        return Err(Error::domain("symmetrize needs a table over all tiles of a level"));
    }
    let level = u.level;
    let elements: Vec<GroupElement> = match mode {
        SymmetrizeMode::Exact => {
            if level > MAX_EXACT_LEVEL {
                return Err(Error::domain(format!(
                    "exact mode enumerates 2^{level} flips; use sampled mode above level {MAX_EXACT_LEVEL}"
                )));
            }
            GroupElement::all(level as usize).collect()
        }
        SymmetrizeMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::domain("sampled mode needs at least one sample"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| GroupElement::random(level as usize, &mut rng))
                .collect()
        }
    };
    // flips act trivially on the grid alphabet
    let perms: Vec<Vec<usize>> = match u.alphabet {
        Alphabet::Grid => vec![(0..u.len()).collect()],
        Alphabet::Pillow => elements.par_iter().map(|g| flip_permutation(&u, g)).collect(),
    };
    let count = perms.len() as f64;
    let out = MetricMatrix::from_fn_unchecked(u, |i, j| {
        let sum: f64 = perms.iter().map(|p| d.get(p[i], p[j])).sum();
        sum / count
    });
    out.validate()?;
    Ok(out)
}
