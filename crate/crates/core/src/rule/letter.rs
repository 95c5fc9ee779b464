use std::fmt;

/// One cell of the first-stage complex `X_1`.
///
/// Ordering follows the letter codes, so sorting words sorts them
/// lexicographically by their serialized form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    /// The doubled copy of the central cell (sheet bit 1).
    pub const DOUBLED_CENTER: Letter = Letter(0);
    /// The central cell of the base sheet (sheet bit 0).
    pub const CENTER: Letter = Letter(5);

    pub const ALL: [Letter; 10] = [
        Letter(0),
        Letter(1),
        Letter(2),
        Letter(3),
        Letter(4),
        Letter(5),
        Letter(6),
        Letter(7),
        Letter(8),
        Letter(9),
    ];

    pub fn from_digit(d: u8) -> Option<Letter> {
        (d <= 9).then_some(Letter(d))
    }

    pub fn from_code(c: char) -> Option<Letter> {
        c.to_digit(10).map(|d| Letter(d as u8))
    }

    /// Letter from the `(column, row, sheet)` triple, each 1-based.
    pub fn from_triple(col: u8, row: u8, sheet: u8) -> Option<Letter> {
        match (col, row, sheet) {
            (2, 2, 2) => Some(Letter::DOUBLED_CENTER),
            (1..=3, 1..=3, 1) => Some(Letter((row - 1) * 3 + col)),
            _ => None,
        }
    }

    pub fn digit(self) -> u8 {
        self.0
    }

    pub fn code(self) -> char {
        char::from(b'0' + self.0)
    }

    /// 1-based grid column.
    pub fn col(self) -> u8 {
        if self.0 == 0 {
            2
        } else {
            (self.0 - 1) % 3 + 1
        }
    }

    /// 1-based grid row.
    pub fn row(self) -> u8 {
        if self.0 == 0 {
            2
        } else {
            (self.0 - 1) / 3 + 1
        }
    }

    /// Zero-based `[column, row]`.
    pub fn cell(self) -> [u8; 2] {
        [self.col() - 1, self.row() - 1]
    }

    pub fn sheet_bit(self) -> u8 {
        u8::from(self.0 == 0)
    }

    pub fn is_center(self) -> bool {
        self.0 == 0 || self.0 == 5
    }

    pub fn triple(self) -> (u8, u8, u8) {
        (self.col(), self.row(), self.sheet_bit() + 1)
    }

    /// Image under the collapse of the doubled square onto the base sheet.
    pub fn projected(self) -> Letter {
        if self.0 == 0 {
            Letter::CENTER
        } else {
            self
        }
    }

    /// Swaps the two central letters, fixes the rest.
    pub fn flipped(self) -> Letter {
        match self.0 {
            0 => Letter::CENTER,
            5 => Letter::DOUBLED_CENTER,
            _ => self,
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Letter({})", self.code())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Which letters a family of words is drawn from.
///
/// `Pillow` is the full ten-letter alphabet of `X_n`. `Grid` is the nine-letter
/// alphabet of the plain square subdivision `X^S_n`, the one-sheet model.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum Alphabet {
    #[default]
    Pillow,
    Grid,
}

impl Alphabet {
    pub fn size(self) -> usize {
        match self {
            Alphabet::Pillow => 10,
            Alphabet::Grid => 9,
        }
    }

    /// Letter with the given position in the alphabet's code order.
    pub fn letter(self, pos: usize) -> Letter {
        match self {
            Alphabet::Pillow => Letter::ALL[pos],
            Alphabet::Grid => Letter::ALL[pos + 1],
        }
    }

    pub fn position(self, letter: Letter) -> Option<usize> {
        match self {
            Alphabet::Pillow => Some(letter.digit() as usize),
            Alphabet::Grid => (letter.digit() != 0).then(|| letter.digit() as usize - 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Alphabet::Pillow => "pillow",
            Alphabet::Grid => "grid",
        }
    }

    pub fn from_name(name: &str) -> Option<Alphabet> {
        match name {
            "pillow" => Some(Alphabet::Pillow),
            "grid" => Some(Alphabet::Grid),
            _ => None,
        }
    }

    /// Number of words of length `level`, or `None` on overflow.
    pub fn word_count(self, level: u32) -> Option<usize> {
        self.size().checked_pow(level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_positions_are_row_major_from_bottom_left() {
        for k in 1..=9u8 {
            let l = Letter::from_digit(k).unwrap();
            assert_eq!(l.col(), (k - 1) % 3 + 1);
            assert_eq!(l.row(), (k - 1) / 3 + 1);
            assert_eq!(l.sheet_bit(), 0);
            assert_eq!(Letter::from_triple(l.col(), l.row(), 1), Some(l));
        }
        let z = Letter::DOUBLED_CENTER;
        assert_eq!((z.col(), z.row(), z.sheet_bit()), (2, 2, 1));
        assert_eq!(Letter::from_triple(2, 2, 2), Some(z));
        assert_eq!(Letter::from_triple(1, 2, 2), None);
    }

    #[test]
    fn exactly_two_center_letters() {
        let centers: Vec<char> = Letter::ALL
            .iter()
            .filter(|l| l.is_center())
            .map(|l| l.code())
            .collect();
        assert_eq!(centers, vec!['0', '5']);
    }

    #[test]
    fn alphabet_positions_round_trip() {
        for a in [Alphabet::Pillow, Alphabet::Grid] {
            for i in 0..a.size() {
                assert_eq!(a.position(a.letter(i)), Some(i));
            }
        }
        assert_eq!(Alphabet::Grid.position(Letter::DOUBLED_CENTER), None);
    }
}
