use std::fmt;
use std::str::FromStr;

use super::group::GroupElement;
use super::letter::{Alphabet, Letter};
use super::square::{Segment, TriadicSquare};
use crate::error::{Error, Result};

/// Address of a tile `X_w` of the replacement complex `X_n`, `n = len`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

/// Parses the compact code form (`"505"`) or the triple form
/// (`"(2,2,1);(2,2,2)"`).
pub fn parse_word(text: &str) -> Result<Word> {
    let trimmed = text.trim();
    if trimmed.starts_with('(') {
        return parse_triples(trimmed);
    }
    text.chars()
        .enumerate()
        .map(|(i, c)| {
            Letter::from_code(c).ok_or(Error::Parse {
                position: i + 1,
                found: c,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

fn parse_triples(text: &str) -> Result<Word> {
    let mut letters = Vec::new();
    for (i, part) in text.split(';').enumerate() {
        let part = part.trim();
        let inner = part
            .strip_prefix('(')
            .and_then(|p| p.strip_suffix(')'))
            .ok_or_else(|| Error::Format(format!("triple {} is not parenthesized: {part:?}", i + 1)))?;
        let nums: Vec<u8> = inner
            .split(',')
            .map(|s| s.trim().parse::<u8>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Format(format!("triple {} has a non-numeric entry", i + 1)))?;
        let letter = match nums.as_slice() {
            [c, r, s] => Letter::from_triple(*c, *r, *s),
            _ => None,
        }
        .ok_or_else(|| Error::Format(format!("triple {} is not a cell: {part}", i + 1)))?;
        letters.push(letter);
    }
    Ok(Word(letters))
}

/// Boundary of the level-`k` central square containing `X_w`: the image
/// of the glued pillow boundary at that level. `k` is 1-based.
pub fn seam_rectangles(w: &Word, k: usize) -> Result<[Segment; 4]> {
    if k == 0 || k > w.len() {
        return Err(Error::domain(format!(
            "seam level {k} out of range for a word of length {}",
            w.len()
        )));
    }
    if !w.0[k - 1].is_center() {
        return Err(Error::domain(format!(
            "letter {k} of {w} is {} which is not central",
            w.0[k - 1]
        )));
    }
    Ok(w.prefix(k).square().boundary())
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn letter(&self, k: usize) -> Letter {
        self.0[k]
    }

    /// Word with the given index in the code-lexicographic order of all
    /// words of length `len` over `alphabet`.
    pub fn from_index(alphabet: Alphabet, len: usize, mut index: usize) -> Word {
        let base = alphabet.size();
        let mut letters = vec![Letter::CENTER; len];
        for slot in letters.iter_mut().rev() {
            *slot = alphabet.letter(index % base);
            index /= base;
        }
        Word(letters)
    }

    /// Inverse of [`Word::from_index`]; `None` if a letter is not in `alphabet`.
    pub fn index(&self, alphabet: Alphabet) -> Option<usize> {
        let base = alphabet.size();
        self.0
            .iter()
            .try_fold(0usize, |acc, &l| Some(acc * base + alphabet.position(l)?))
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// The shift map: drops the first letter.
    pub fn shift(&self) -> Result<Word> {
        if self.0.is_empty() {
            return Err(Error::domain("cannot shift the empty word"));
        }
        Ok(Word(self.0[1..].to_vec()))
    }

    /// Drops the first `k` letters.
    pub fn shift_by(&self, k: usize) -> Result<Word> {
        if k > self.len() {
            return Err(Error::domain(format!("cannot shift {self} by {k}")));
        }
        Ok(Word(self.0[k..].to_vec()))
    }

    /// The similarity `F_c` at word level.
    pub fn prepend(&self, c: Letter) -> Word {
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(c);
        letters.extend_from_slice(&self.0);
        Word(letters)
    }

    pub fn concat(&self, tail: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&tail.0);
        Word(letters)
    }

    /// Exact projected square `Π(X_w)`.
    pub fn square(&self) -> TriadicSquare {
        self.0
            .iter()
            .fold(TriadicSquare::unit(), |sq, &l| sq.child(l))
    }

    /// Collapses every `0` onto `5`, giving a word of the square subdivision.
    pub fn project(&self) -> Word {
        Word(self.0.iter().map(|l| l.projected()).collect())
    }

    pub fn is_grid(&self) -> bool {
        self.0.iter().all(|l| l.digit() != 0)
    }

    pub fn center_count(&self) -> usize {
        self.0.iter().filter(|l| l.is_center()).count()
    }

    /// Applies `ι_g`: swaps `5` and `0` at each level whose bit is set.
    pub fn flip(&self, g: &GroupElement) -> Result<Word> {
        if g.len() < self.len() {
            return Err(Error::domain(format!(
                "group element {g} is shorter than word {self}"
            )));
        }
        Ok(self.flip_prefix(g))
    }

    pub(crate) fn flip_prefix(&self, g: &GroupElement) -> Word {
        Word(
            self.0
                .iter()
                .enumerate()
                .map(|(k, &l)| if g.bit(k) { l.flipped() } else { l })
                .collect(),
        )
    }

    /// The sheet lift `s_g(u)` of a grid word `u`.
    pub fn section(u: &Word, g: &GroupElement) -> Result<Word> {
        if !u.is_grid() {
            return Err(Error::domain(format!("{u} is not a grid word")));
        }
        u.flip(g)
    }

    pub fn to_triples(&self) -> String {
        self.0
            .iter()
            .map(|l| {
                let (c, r, s) = l.triple();
                format!("({c},{r},{s})")
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl From<&[Letter]> for Word {
    fn from(letters: &[Letter]) -> Self {
        Word(letters.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::square::Sign;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        assert!(w("").is_empty());
        let fifty = w("50");
        assert_eq!(fifty.letters(), &[Letter::CENTER, Letter::DOUBLED_CENTER]);
        match parse_word("5a") {
            Err(Error::Parse { position, found }) => {
                assert_eq!(position, 2);
                assert_eq!(found, 'a');
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn triple_form() {
        let t = w("(2,2,1);(2,2,2);(1,3,1)");
        assert_eq!(t, w("507"));
        assert_eq!(t.to_triples(), "(2,2,1);(2,2,2);(1,3,1)");
        assert!(parse_word("(2,2,3)").is_err());
        assert!(parse_word("(2,2)").is_err());
    }

    #[test]
    fn squares_of_single_letters() {
        let one = w("1").square();
        assert_eq!((one.level, one.x, one.y), (1, 0, 0));
        assert_eq!(one.orientation, [Sign::Plus, Sign::Plus]);
        let five = w("5").square();
        assert_eq!(five, w("0").square());
        assert_eq!((five.x, five.y), (1, 1));
        assert_eq!(five.orientation, [Sign::Minus, Sign::Minus]);
    }

    #[test]
    fn seam_of_center_prefix() {
        let seam = seam_rectangles(&w("5"), 1).unwrap();
        assert_eq!(seam, w("5").square().boundary());
        assert_eq!(seam_rectangles(&w("51"), 1).unwrap(), seam);
        let edges: Vec<String> = seam.iter().map(|s| s.to_string()).collect();
        assert!(edges.contains(&"(1/3, 1/3)-(2/3, 1/3)".to_string()));
        assert!(matches!(seam_rectangles(&w("15"), 1), Err(Error::Domain(_))));
        assert!(seam_rectangles(&w("5"), 2).is_err());
        assert!(seam_rectangles(&w("5"), 0).is_err());
    }

    #[test]
    fn flip_and_section_examples() {
        let g: GroupElement = "110".parse().unwrap();
        assert_eq!(w("505").flip(&g).unwrap(), w("055"));
        assert_eq!(
            Word::section(&w("555"), &"101".parse().unwrap()).unwrap(),
            w("050")
        );
        assert!(Word::section(&w("50"), &GroupElement::identity(2)).is_err());
        assert!(w("55").flip(&GroupElement::identity(1)).is_err());
    }

    #[test]
    fn projection_and_shift() {
        assert_eq!(w("50").project(), w("55"));
        assert_eq!(w("123").project(), w("123"));
        assert_eq!(w("123").shift().unwrap(), w("23"));
        assert_eq!(w("0").prepend(Letter::CENTER), w("50"));
        assert!(Word::empty().shift().is_err());
    }

    #[test]
    fn index_is_lexicographic() {
        let words: Vec<Word> = (0..100).map(|i| Word::from_index(Alphabet::Pillow, 2, i)).collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        assert_eq!(words[50], w("50"));
        assert_eq!(w("50").index(Alphabet::Pillow), Some(50));
        assert_eq!(w("11").index(Alphabet::Grid), Some(0));
        assert_eq!(w("10").index(Alphabet::Grid), None);
    }
}
