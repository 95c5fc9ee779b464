use std::fmt;

use super::letter::Letter;

/// Subdivision factor per axis.
pub const SIDE: u64 = 3;

/// Orientation of one coordinate of a folded chart.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The projection `Π(X_w)` of a tile: a triadic square of side `3^-level`
/// together with the orientation of the branch chart onto it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TriadicSquare {
    pub level: u32,
    pub x: u64,
    pub y: u64,
    pub orientation: [Sign; 2],
}

impl TriadicSquare {
    pub fn unit() -> Self {
        TriadicSquare {
            level: 0,
            x: 0,
            y: 0,
            orientation: [Sign::Plus, Sign::Plus],
        }
    }

    pub fn index(&self, axis: usize) -> u64 {
        if axis == 0 {
            self.x
        } else {
            self.y
        }
    }

    /// Image of the letter's cell under this square's branch chart.
    ///
    /// Columns 1 and 3 map by increasing branches, column 2 by the
    /// decreasing one; rows likewise.
    pub fn child(&self, letter: Letter) -> TriadicSquare {
        let cell = letter.cell();
        let mut idx = [self.x, self.y];
        let mut orientation = self.orientation;
        for axis in 0..2 {
            let pos = cell[axis] as u64;
            idx[axis] = match orientation[axis] {
                Sign::Plus => SIDE * idx[axis] + pos,
                Sign::Minus => SIDE * idx[axis] + (SIDE - 1 - pos),
            };
            if pos == 1 {
                orientation[axis] = orientation[axis].flip();
            }
        }
        TriadicSquare {
            level: self.level + 1,
            x: idx[0],
            y: idx[1],
            orientation,
        }
    }

    /// Same cell, ignoring orientation.
    pub fn same_cell(&self, other: &TriadicSquare) -> bool {
        self.level == other.level && self.x == other.x && self.y == other.y
    }

    /// Corner coordinates `[x0, y0, x1, y1]` scaled by `3^level`.
    pub fn bounds_at(&self, level: u32) -> [u64; 4] {
        assert!(level >= self.level, "cannot coarsen a square");
        let s = SIDE.pow(level - self.level);
        [
            self.x * s,
            self.y * s,
            (self.x + 1) * s,
            (self.y + 1) * s,
        ]
    }

    /// The four sides, as segments at `level`.
    pub fn boundary_at(&self, level: u32) -> [Segment; 4] {
        let [x0, y0, x1, y1] = self.bounds_at(level);
        [
            Segment::new(level, (x0, y0), (x1, y0)),
            Segment::new(level, (x1, y0), (x1, y1)),
            Segment::new(level, (x0, y1), (x1, y1)),
            Segment::new(level, (x0, y0), (x0, y1)),
        ]
    }

    pub fn boundary(&self) -> [Segment; 4] {
        self.boundary_at(self.level)
    }

    /// Full shared side with a same-level square, if any.
    pub fn shared_side(&self, other: &TriadicSquare) -> Option<Segment> {
        assert_eq!(self.level, other.level);
        let dx = self.x.abs_diff(other.x);
        let dy = self.y.abs_diff(other.y);
        let l = self.level;
        match (dx, dy) {
            (1, 0) => {
                let x = self.x.max(other.x);
                Some(Segment::new(l, (x, self.y), (x, self.y + 1)))
            }
            (0, 1) => {
                let y = self.y.max(other.y);
                Some(Segment::new(l, (self.x, y), (self.x + 1, y)))
            }
            _ => None,
        }
    }
}

impl fmt::Display for TriadicSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level {} ({}, {}) ({}{})",
            self.level, self.x, self.y, self.orientation[0], self.orientation[1]
        )
    }
}

/// Closed axis-parallel segment with endpoints scaled by `3^level`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Segment {
    pub level: u32,
    pub start: (u64, u64),
    pub end: (u64, u64),
}

impl Segment {
    pub fn new(level: u32, a: (u64, u64), b: (u64, u64)) -> Self {
        assert!(a.0 == b.0 || a.1 == b.1, "segment must be axis-parallel");
        let (start, end) = if a <= b { (a, b) } else { (b, a) };
        Segment { level, start, end }
    }

    pub fn is_vertical(&self) -> bool {
        self.start.0 == self.end.0 && self.start.1 != self.end.1
    }

    pub fn is_horizontal(&self) -> bool {
        self.start.1 == self.end.1 && self.start.0 != self.end.0
    }

    pub fn length(&self) -> u64 {
        (self.end.0 - self.start.0) + (self.end.1 - self.start.1)
    }

    pub fn rescaled(&self, level: u32) -> Segment {
        assert!(level >= self.level);
        let s = SIDE.pow(level - self.level);
        Segment {
            level,
            start: (self.start.0 * s, self.start.1 * s),
            end: (self.end.0 * s, self.end.1 * s),
        }
    }

    /// Positive-length common part of two segments at the same level.
    ///
    /// Crossings and end-to-end touches have zero length and give `None`.
    pub fn overlap(&self, other: &Segment) -> Option<Segment> {
        assert_eq!(self.level, other.level);
        if self.is_vertical() && other.is_vertical() && self.start.0 == other.start.0 {
            let lo = self.start.1.max(other.start.1);
            let hi = self.end.1.min(other.end.1);
            (lo < hi).then(|| Segment::new(self.level, (self.start.0, lo), (self.start.0, hi)))
        } else if self.is_horizontal() && other.is_horizontal() && self.start.1 == other.start.1 {
            let lo = self.start.0.max(other.start.0);
            let hi = self.end.0.min(other.end.0);
            (lo < hi).then(|| Segment::new(self.level, (lo, self.start.1), (hi, self.start.1)))
        } else {
            None
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = SIDE.pow(self.level);
        write!(
            f,
            "({}/{}, {}/{})-({}/{}, {}/{})",
            self.start.0, d, self.start.1, d, self.end.0, d, self.end.1, d
        )
    }
}
