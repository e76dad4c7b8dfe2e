//! Letters, syllables and run-length encoded words.
//!
//! A [`Word`] is always stored in run-length normal form: adjacent syllables
//! never share a generator, and zero syllables are dropped. This makes every
//! word freely reduced over the full alphabet (rational syllables of one stage
//! add together as elements of a copy of the rationals).

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// An atomic generator of some tower stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    /// Generator `x<index+1>` of the base free group.
    Base(u32),
    /// Stable letter `t<stage>_<index>` of the HNN chain building `stage`.
    Stable { stage: u32, index: u32 },
    /// Root letter `r<stage>` of the root group amalgamated at `stage`.
    Root(u32),
    /// Element `q<stage>(value)` of a rational vertex group. Always carries
    /// exponent 1 inside a word; the sign lives in `value`.
    Rational { stage: u32, value: Rational },
}

impl Letter {
    pub fn rational(stage: u32, numer: i64, denom: i64) -> Letter {
        Letter::Rational {
            stage,
            value: Rational::new(numer, denom),
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Letter::Base(_))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Letter::Rational { .. })
    }

    /// The stage at which this letter first exists.
    pub fn stage(&self) -> u32 {
        match *self {
            Letter::Base(_) => 1,
            Letter::Stable { stage, .. } | Letter::Root(stage) | Letter::Rational { stage, .. } => stage,
        }
    }

    /// Two letters share a generator when adjacent syllables built from them
    /// must be merged.
    pub fn same_generator(&self, other: &Letter) -> bool {
        match (self, other) {
            (Letter::Rational { stage: a, .. }, Letter::Rational { stage: b, .. }) => a == b,
            _ => self == other,
        }
    }

    /// Enumeration height: the grade of a word is its length plus the largest
    /// height among its letters, which keeps every grade finite even though
    /// stages carry infinitely many letters.
    pub fn height(&self) -> u64 {
        match *self {
            Letter::Stable { index, .. } => index as u64,
            Letter::Rational { value, .. } => {
                let n = value.numer().unsigned_abs();
                let d = value.denom().unsigned_abs();
                n.max(d) - 1
            }
            _ => 0,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::Base(i) => write!(f, "x{}", i + 1),
            Letter::Stable { stage, index } => write!(f, "t{}_{}", stage, index),
            Letter::Root(stage) => write!(f, "r{}", stage),
            Letter::Rational { stage, value } => {
                if *value.denom() == 1 {
                    write!(f, "q{}({})", stage, value.numer())
                } else {
                    write!(f, "q{}({}/{})", stage, value.numer(), value.denom())
                }
            }
        }
    }
}

/// A letter raised to a nonzero exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub letter: Letter,
    pub exp: i64,
}

impl Syllable {
    pub fn new(letter: Letter, exp: i64) -> Syllable {
        Syllable { letter, exp }
    }

    pub fn inverse(&self) -> Syllable {
        match self.letter {
            Letter::Rational { stage, value } => Syllable {
                letter: Letter::Rational { stage, value: -value },
                exp: 1,
            },
            letter => Syllable { letter, exp: -self.exp },
        }
    }

    /// Number of unit letters.
    pub fn len(&self) -> u64 {
        if self.letter.is_rational() {
            1
        } else {
            self.exp.unsigned_abs()
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.letter {
            Letter::Rational { value, .. } => *value.numer() == 0,
            _ => self.exp == 0,
        }
    }

    /// Merge two syllables over the same generator.
    fn merge(&self, other: &Syllable) -> Syllable {
        match (self.letter, other.letter) {
            (Letter::Rational { stage, value: a }, Letter::Rational { value: b, .. }) => Syllable {
                letter: Letter::Rational { stage, value: a + b },
                exp: 1,
            },
            (letter, _) => Syllable {
                letter,
                exp: self.exp + other.exp,
            },
        }
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 || self.letter.is_rational() {
            write!(f, "{}", self.letter)
        } else {
            write!(f, "{}^{}", self.letter, self.exp)
        }
    }
}

/// A single letter or its inverse; the unit of length and of shortlex order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Unit {
    pub letter: Letter,
    pub inverse: bool,
}

type UnitKey = (u8, u32, u8, u64, Rational, bool);

impl Unit {
    pub fn new(letter: Letter, inverse: bool) -> Unit {
        Unit { letter, inverse }
    }

    pub fn syllable(&self) -> Syllable {
        match self.letter {
            Letter::Rational { .. } => Syllable::new(self.letter, 1),
            l => Syllable::new(l, if self.inverse { -1 } else { 1 }),
        }
    }

    pub fn inverted(&self) -> Unit {
        match self.letter {
            Letter::Rational { stage, value } => Unit::new(Letter::Rational { stage, value: -value }, !self.inverse),
            l => Unit::new(l, !self.inverse),
        }
    }

    /// Base letters first, each before its inverse; then per stage the stable
    /// letters by index, the root letter, and the rational syllables by
    /// (height, magnitude, sign).
    fn key(&self) -> UnitKey {
        let zero = Rational::from_integer(0);
        match self.letter {
            Letter::Base(i) => (0, 0, 0, i as u64, zero, self.inverse),
            Letter::Stable { stage, index } => (1, stage, 0, index as u64, zero, self.inverse),
            Letter::Root(stage) => (1, stage, 1, 0, zero, self.inverse),
            Letter::Rational { stage, value } => (
                1,
                stage,
                2,
                self.letter.height(),
                Rational::new_raw(value.numer().abs(), *value.denom()),
                *value.numer() < 0,
            ),
        }
    }
}

impl Ord for Unit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Unit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A group word in run-length normal form. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn letter(letter: Letter) -> Word {
        Word::power(letter, 1)
    }

    pub fn power(letter: Letter, exp: i64) -> Word {
        Word::from_syllables([Syllable::new(letter, exp)])
    }

    pub fn base(index: u32) -> Word {
        Word::letter(Letter::Base(index))
    }

    /// Build a word from arbitrary syllables, merging neighbours over the
    /// same generator and dropping empty syllables.
    pub fn from_syllables<I: IntoIterator<Item = Syllable>>(iter: I) -> Word {
        let mut out: Vec<Syllable> = Vec::new();
        for s in iter {
            push_syllable(&mut out, s);
        }
        Word { syllables: out }
    }

    pub fn from_units<I: IntoIterator<Item = Unit>>(iter: I) -> Word {
        Word::from_syllables(iter.into_iter().map(|u| u.syllable()))
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Length in unit letters (a rational syllable counts once).
    pub fn len(&self) -> u64 {
        self.syllables.iter().map(Syllable::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.syllables.clone();
        for s in &other.syllables {
            push_syllable(&mut out, *s);
        }
        Word { syllables: out }
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self.syllables.iter().rev().map(Syllable::inverse).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> Word {
        if n == 0 || self.is_identity() {
            return Word::identity();
        }
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `x^-1 self x`
    pub fn conj(&self, x: &Word) -> Word {
        x.inverse().mul(self).mul(x)
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Word {
        let mut out = Vec::new();
        for w in words {
            for s in &w.syllables {
                push_syllable(&mut out, *s);
            }
        }
        Word { syllables: out }
    }

    /// The unit letters of the word, in order.
    pub fn units(&self) -> impl Iterator<Item = Unit> + '_ {
        self.syllables.iter().flat_map(|s| {
            let unit = match s.letter {
                Letter::Rational { value, .. } => Unit::new(s.letter, *value.numer() < 0),
                l => Unit::new(l, s.exp < 0),
            };
            let count = s.len() as usize;
            std::iter::repeat_n(unit, count)
        })
    }

    pub fn letters(&self) -> impl Iterator<Item = &Letter> + '_ {
        self.syllables.iter().map(|s| &s.letter)
    }

    /// Largest letter height, used by graded enumeration.
    pub fn height(&self) -> u64 {
        self.letters().map(Letter::height).max().unwrap_or(0)
    }

    pub fn max_stage(&self) -> u32 {
        self.letters().map(Letter::stage).max().unwrap_or(1)
    }

    pub fn only_base(&self) -> bool {
        self.letters().all(Letter::is_base)
    }

    /// Shortlex comparison: length first, then lexicographic over units.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.units().cmp(other.units()))
    }

    /// Graded order used for enumeration over infinite alphabets:
    /// `(length + height, shortlex)`.
    pub fn graded_cmp(&self, other: &Word) -> Ordering {
        (self.len() + self.height())
            .cmp(&(other.len() + other.height()))
            .then_with(|| self.shortlex_cmp(other))
    }
}

fn push_syllable(out: &mut Vec<Syllable>, s: Syllable) {
    if s.is_empty() {
        return;
    }
    match out.last() {
        Some(last) if last.letter.same_generator(&s.letter) => {
            let merged = last.merge(&s);
            out.pop();
            if !merged.is_empty() {
                out.push(merged);
            }
        }
        _ => out.push(s),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "e");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Letter {
        Letter::Base(i - 1)
    }

    #[test]
    fn run_length_merging_cancels() {
        let w = Word::from_syllables([
            Syllable::new(x(1), 1),
            Syllable::new(x(2), 1),
            Syllable::new(x(2), -1),
            Syllable::new(x(1), 1),
        ]);
        assert_eq!(w, Word::power(x(1), 2));
        assert_eq!(w.to_string(), "x1^2");
    }

    #[test]
    fn rationals_add() {
        let half = Word::letter(Letter::rational(1, 1, 2));
        assert_eq!(half.mul(&half), Word::letter(Letter::rational(1, 1, 1)));
        let third = Word::letter(Letter::rational(1, 1, 3));
        assert!(third.mul(&third.inverse()).is_identity());
        assert_eq!(half.pow(4).to_string(), "q1(2)");
    }

    #[test]
    fn unit_order() {
        let a = Word::base(0);
        let b = Word::base(1);
        assert_eq!(a.shortlex_cmp(&b), Ordering::Less);
        assert_eq!(b.shortlex_cmp(&a.pow(2)), Ordering::Less);
        assert_eq!(a.shortlex_cmp(&a), Ordering::Equal);
        assert_eq!(a.shortlex_cmp(&a.inverse()), Ordering::Less);
        let t = Word::letter(Letter::Stable { stage: 2, index: 0 });
        let r = Word::letter(Letter::Root(2));
        assert_eq!(b.inverse().shortlex_cmp(&t), Ordering::Less);
        assert_eq!(t.shortlex_cmp(&r), Ordering::Less);
    }

    #[test]
    fn inverse_and_pow() {
        let w = Word::from_syllables([Syllable::new(x(1), 1), Syllable::new(x(2), -1)]);
        assert_eq!(w.inverse().to_string(), "x2 x1^-1");
        assert!(w.mul(&w.inverse()).is_identity());
        assert_eq!(w.pow(-2), w.inverse().mul(&w.inverse()));
        assert_eq!(w.pow(0), Word::identity());
    }
}
