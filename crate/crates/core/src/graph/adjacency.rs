//! Exact face adjacency between tiles of the same level.

use super::EdgeType;
use crate::error::{Error, Result};
use crate::rule::{Segment, TriadicSquare, Word};

enum Constraint {
    /// The locus must lie on the boundary of this central square.
    Seam(TriadicSquare),
    /// The locus must lie on this shared face of two prefix squares.
    Face(Segment),
}

/// Decides whether the tiles `w` and `v` of `X_n` meet along a segment of
/// positive length, and of which kind.
///
/// Two tiles meet where their projected squares meet, except that at every
/// level where one word reads `5` and the other `0` the common points must
/// also lie on the glued boundary of that level's pillow.
pub fn adjacency(w: &Word, v: &Word) -> Result<Option<EdgeType>> {
    if w.len() != v.len() {
        return Err(Error::domain(format!(
            "words {w} and {v} have different lengths"
        )));
    }
    if w == v {
        return Err(Error::domain(format!("adjacency of {w} with itself")));
    }
    Ok(adjacent(w, v))
}

pub(crate) fn adjacent(w: &Word, v: &Word) -> Option<EdgeType> {
    let level = w.len() as u32;
    let mut sw = TriadicSquare::unit();
    let mut sv = TriadicSquare::unit();
    let mut constraints = Vec::new();
    for (&a, &b) in w.letters().iter().zip(v.letters()) {
        sw = sw.child(a);
        sv = sv.child(b);
        if a == b {
            continue;
        }
        if a.is_center() && b.is_center() {
            constraints.push(Constraint::Seam(sw));
        } else {
            constraints.push(Constraint::Face(sw.shared_side(&sv)?));
        }
    }

    let same_cell = sw.same_cell(&sv);
    let mut locus: Vec<Segment> = if same_cell {
        sw.boundary().to_vec()
    } else {
        vec![sw.shared_side(&sv)?]
    };

    for c in &constraints {
        locus = locus
            .iter()
            .filter_map(|seg| match c {
                Constraint::Seam(sq) => sq
                    .boundary_at(level)
                    .iter()
                    .find_map(|side| seg.overlap(side)),
                Constraint::Face(face) => seg.overlap(&face.rescaled(level)),
            })
            .collect();
        if locus.is_empty() {
            return None;
        }
    }

    Some(if same_cell {
        EdgeType::Seam
    } else if locus[0].is_vertical() {
        EdgeType::Horizontal
    } else {
        EdgeType::Vertical
    })
}
