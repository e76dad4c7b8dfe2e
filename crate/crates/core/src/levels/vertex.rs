//! Abelian vertex groups: an infinite cyclic root group and a copy of the
//! rationals.

use crate::error::{GroupError, Result};
use crate::word::{Letter, Rational, Word};

use super::{Conjugacy, Level, LevelDescriptor, Root};

/// Infinite cyclic group generated by one letter.
#[derive(Clone, Debug)]
pub struct CyclicLevel {
    letter: Letter,
}

impl CyclicLevel {
    pub fn new(letter: Letter) -> CyclicLevel {
        CyclicLevel { letter }
    }

    fn exponent(&self, w: &Word) -> Result<i64> {
        self.check_alphabet(w)?;
        Ok(w.syllables().first().map_or(0, |s| s.exp))
    }
}

impl Level for CyclicLevel {
    fn owns(&self, letter: &Letter) -> bool {
        *letter == self.letter
    }

    fn reduce(&self, w: &Word) -> Result<Word> {
        self.check_alphabet(w)?;
        Ok(w.clone())
    }

    fn solve_power(&self, a: &Word, g: &Word) -> Result<Option<i64>> {
        let (j, i) = (self.exponent(a)?, self.exponent(g)?);
        if j == 0 {
            return Err(GroupError::DegenerateBase);
        }
        Ok((i % j == 0).then_some(i / j))
    }

    fn cyclic_reduce(&self, w: &Word) -> Result<(Word, Word)> {
        self.check_alphabet(w)?;
        Ok((w.clone(), Word::identity()))
    }

    fn conjugate(&self, g: &Word, h: &Word) -> Result<Conjugacy> {
        Ok(if self.exponent(g)? == self.exponent(h)? {
            Conjugacy::Conjugate(Word::identity())
        } else {
            Conjugacy::NotConjugate
        })
    }

    fn extract_root(&self, g: &Word) -> Result<Root> {
        let j = self.exponent(g)?;
        if j == 0 {
            return Err(GroupError::TrivialRootData);
        }
        Ok(Root::Power {
            root: Word::power(self.letter, j.signum()),
            exponent: j.unsigned_abs(),
        })
    }

    fn descriptor(&self) -> LevelDescriptor {
        LevelDescriptor::Cyclic { letter: self.letter }
    }
}

/// A copy of the additive rationals, written multiplicatively as syllables
/// `q<stage>(p/d)`.
#[derive(Clone, Debug)]
pub struct RationalLevel {
    stage: u32,
}

impl RationalLevel {
    pub fn new(stage: u32) -> RationalLevel {
        RationalLevel { stage }
    }

    pub fn value(&self, w: &Word) -> Result<Rational> {
        self.check_alphabet(w)?;
        Ok(match w.syllables().first().map(|s| s.letter) {
            Some(Letter::Rational { value, .. }) => value,
            _ => Rational::from_integer(0),
        })
    }

    /// The rational `q` with `a` scaled by `q` equal to `g`.
    pub fn solve_scalar(&self, a: &Word, g: &Word) -> Result<Rational> {
        let u = self.value(a)?;
        if *u.numer() == 0 {
            return Err(GroupError::DegenerateBase);
        }
        Ok(self.value(g)? / u)
    }
}

impl Level for RationalLevel {
    fn owns(&self, letter: &Letter) -> bool {
        matches!(letter, Letter::Rational { stage, .. } if *stage == self.stage)
    }

    fn reduce(&self, w: &Word) -> Result<Word> {
        self.check_alphabet(w)?;
        Ok(w.clone())
    }

    fn solve_power(&self, a: &Word, g: &Word) -> Result<Option<i64>> {
        let q = self.solve_scalar(a, g)?;
        Ok(q.is_integer().then(|| *q.numer()))
    }

    fn cyclic_reduce(&self, w: &Word) -> Result<(Word, Word)> {
        self.check_alphabet(w)?;
        Ok((w.clone(), Word::identity()))
    }

    fn conjugate(&self, g: &Word, h: &Word) -> Result<Conjugacy> {
        Ok(if self.value(g)? == self.value(h)? {
            Conjugacy::Conjugate(Word::identity())
        } else {
            Conjugacy::NotConjugate
        })
    }

    fn extract_root(&self, g: &Word) -> Result<Root> {
        let value = self.value(g)?;
        if *value.numer() == 0 {
            return Err(GroupError::TrivialRootData);
        }
        Ok(Root::Divisible {
            conjugator: Word::identity(),
            stage: self.stage,
            value,
        })
    }

    fn descriptor(&self) -> LevelDescriptor {
        LevelDescriptor::RationalVertex { stage: self.stage }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Word {
        Word::letter(Letter::rational(1, n, d))
    }

    #[test]
    fn rational_vertex() {
        let level = RationalLevel::new(1);
        assert_eq!(level.solve_scalar(&q(1, 1), &q(3, 2)).unwrap(), Rational::new(3, 2));
        assert_eq!(level.solve_power(&q(1, 2), &q(3, 2)).unwrap(), Some(3));
        assert_eq!(level.solve_power(&q(1, 1), &q(3, 2)).unwrap(), None);
        assert!(level.is_trivial(&q(1, 3).mul(&q(-1, 3))).unwrap());
        assert!(matches!(level.extract_root(&q(2, 1)).unwrap(), Root::Divisible { .. }));
    }

    #[test]
    fn cyclic_root_group() {
        let r = Letter::Root(2);
        let level = CyclicLevel::new(r);
        assert_eq!(
            level.solve_power(&Word::power(r, 2), &Word::power(r, 6)).unwrap(),
            Some(3)
        );
        assert_eq!(level.solve_power(&Word::power(r, 2), &Word::power(r, 3)).unwrap(), None);
        assert_eq!(
            level.extract_root(&Word::power(r, -4)).unwrap(),
            Root::Power {
                root: Word::power(r, -1),
                exponent: 4
            }
        );
    }
}
