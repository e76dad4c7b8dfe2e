use crate::error::Result;
use crate::freewords;
use crate::word::{Letter, Word};

use super::{Conjugacy, Level, LevelDescriptor, Root};

/// The free group on `x1 .. x<rank>`.
#[derive(Clone, Debug)]
pub struct FreeLevel {
    rank: u32,
}

impl FreeLevel {
    pub fn new(rank: u32) -> FreeLevel {
        FreeLevel { rank }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }
}

impl Level for FreeLevel {
    fn owns(&self, letter: &Letter) -> bool {
        matches!(letter, Letter::Base(i) if *i < self.rank)
    }

    fn reduce(&self, w: &Word) -> Result<Word> {
        self.check_alphabet(w)?;
        Ok(w.clone())
    }

    fn solve_power(&self, a: &Word, g: &Word) -> Result<Option<i64>> {
        self.check_alphabet(a)?;
        self.check_alphabet(g)?;
        freewords::solve_power_free(a, g)
    }

    fn cyclic_reduce(&self, w: &Word) -> Result<(Word, Word)> {
        self.check_alphabet(w)?;
        Ok(freewords::cyclically_reduce(w))
    }

    fn conjugate(&self, g: &Word, h: &Word) -> Result<Conjugacy> {
        self.check_alphabet(g)?;
        self.check_alphabet(h)?;
        Ok(match freewords::conjugate_free(g, h) {
            Some(x) => Conjugacy::Conjugate(x),
            None => Conjugacy::NotConjugate,
        })
    }

    fn extract_root(&self, g: &Word) -> Result<Root> {
        self.check_alphabet(g)?;
        let (root, exponent) = freewords::primitive_root_free(g)?;
        Ok(Root::Power { root, exponent })
    }

    fn descriptor(&self) -> LevelDescriptor {
        LevelDescriptor::Free { rank: self.rank }
    }
}
