//! Brute-force intersection of cube chains, used to cross-check
//! [`adjacency`](super::adjacency).
//!
//! A point of `X_n` is a chain `(x_1, ..., x_n)` of points of `X_1` with
//! `S(x_k) = π(x_{k+1})`. It is fixed by the projection `z_1 = π(x_1)`
//! together with a sheet choice wherever `z_k` falls inside the open central
//! square. The oracle walks `z_1` forward through the folding map on a
//! lattice fine enough to contain the midpoint of every level-`n` grid edge
//! and tests membership in `X_1` cell by cell. It never touches the
//! branch-inverse geometry used by the primary rule.

use super::EdgeType;
use crate::error::{Error, Result};
use crate::rule::{Letter, Word};

/// Longest words the oracle accepts.
pub const ORACLE_MAX_LEVEL: usize = 3;

/// Point with coordinates `num / den`.
#[derive(Clone, Copy)]
struct LatticePoint {
    num: [u64; 2],
    den: u64,
}

impl LatticePoint {
    /// The piecewise-affine folding map (up, down, up) on both coordinates.
    fn fold(self) -> LatticePoint {
        let third = self.den / 3;
        let mut num = self.num;
        for a in &mut num {
            *a = if *a <= third { *a } else { a.abs_diff(2 * third) };
        }
        LatticePoint { num, den: third }
    }

    fn in_cell(&self, letter: Letter) -> bool {
        let cell = letter.cell();
        (0..2).all(|axis| {
            let c = cell[axis] as u64;
            let a3 = 3 * self.num[axis];
            c * self.den <= a3 && a3 <= (c + 1) * self.den
        })
    }

    fn in_open_center(&self) -> bool {
        self.num
            .iter()
            .all(|&a| self.den < 3 * a && 3 * a < 2 * self.den)
    }
}

/// Whether some point of `X_n` projecting to `p` lies in both cube chains.
/// With `sheets == false` the sheet choices are ignored, which tests the
/// projected tiles instead.
fn chains_meet(w: &Word, v: &Word, mut p: LatticePoint, sheets: bool) -> bool {
    for (&a, &b) in w.letters().iter().zip(v.letters()) {
        if !p.in_cell(a) || !p.in_cell(b) {
            return false;
        }
        if sheets && a != b && p.in_open_center() {
            return false;
        }
        p = p.fold();
    }
    true
}

/// Chain-agreement adjacency. Must agree with the geometric rule.
pub fn chain_oracle_adjacency(w: &Word, v: &Word) -> Result<Option<EdgeType>> {
    if w.len() != v.len() {
        return Err(Error::domain(format!(
            "words {w} and {v} have different lengths"
        )));
    }
    if w.len() > ORACLE_MAX_LEVEL {
        return Err(Error::domain(format!(
            "chain oracle refuses words longer than {ORACLE_MAX_LEVEL} (got {})",
            w.len()
        )));
    }
    if w == v {
        return Err(Error::domain(format!("adjacency of {w} with itself")));
    }
    let cells = 3u64.pow(w.len() as u32);
    let den = 2 * cells;
    let point = |x, y| LatticePoint { num: [x, y], den };

    // midpoints of vertical grid edges: (2i, 2j+1); horizontal: (2i+1, 2j)
    for vertical in [true, false] {
        for i in 0..=cells {
            for j in 0..cells {
                let (x, y) = if vertical {
                    (2 * i, 2 * j + 1)
                } else {
                    (2 * j + 1, 2 * i)
                };
                if !chains_meet(w, v, point(x, y), true) {
                    continue;
                }
                // centers of the (at most two) cells on either side
                let neighbours = [i.checked_sub(1), (i < cells).then_some(i)];
                let seam = neighbours.iter().flatten().any(|&c| {
                    let p = if vertical {
                        point(2 * c + 1, 2 * j + 1)
                    } else {
                        point(2 * j + 1, 2 * c + 1)
                    };
                    chains_meet(w, v, p, false)
                });
                return Ok(Some(if seam {
                    EdgeType::Seam
                } else if vertical {
                    EdgeType::Horizontal
                } else {
                    EdgeType::Vertical
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(a: &str, b: &str) -> Option<EdgeType> {
        chain_oracle_adjacency(&a.parse().unwrap(), &b.parse().unwrap()).unwrap()
    }

    #[test]
    fn boundary_gluing() {
        assert_eq!(oracle("5", "0"), Some(EdgeType::Seam));
        assert_eq!(oracle("2", "0"), Some(EdgeType::Vertical));
        assert_eq!(oracle("1", "3"), None);
        assert_eq!(oracle("1", "5"), None);
    }

    #[test]
    fn refuses_long_words() {
        let w: Word = "1111".parse().unwrap();
        let v: Word = "1112".parse().unwrap();
        assert!(chain_oracle_adjacency(&w, &v).is_err());
    }
}
