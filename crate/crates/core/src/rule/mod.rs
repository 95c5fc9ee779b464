//! Letters, words and the folding geometry of the pillow substitution rule.
//!
//! A tile of the `n`-th replacement complex is a word of `n` letters. Letters
//! `1`..`9` are the cells of the 3×3 grid in row-major order from the bottom
//! left, and `0` is the second copy of the central cell. All geometry is done
//! over integers scaled by `3^n`.

mod group;
mod letter;
mod square;
mod word;

pub use group::GroupElement;
pub use letter::{Alphabet, Letter};
pub use square::{Segment, Sign, TriadicSquare, SIDE};
pub use word::{parse_word, seam_rectangles, Word};

/// `SIDE^level`, the number of triadic intervals per axis at `level`.
pub fn cells_per_axis(level: u32) -> u64 {
    SIDE.pow(level)
}
