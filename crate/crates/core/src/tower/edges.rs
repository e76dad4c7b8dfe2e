//! Stable letters of a tower stage, materialized from the rep list below.

use std::sync::Arc;

use crate::error::{GroupError, Result};
use crate::levels::{Edge, EdgeClass, EdgeSource, Level, Root};
use crate::word::{Letter, Rational, Word};

use super::reps::{Factored, RepStore};
use super::Variant;

/// Stable letters `t<stage>_i` over the previous stage.
///
/// Chain edges (cyclic roots): `t_i^-1 a_i t_i = a_{i+1}`.
/// Star edges (rational roots): `t_i^-1 a_0 t_i = a_{i+1}` with `a_0 = q1(1)`.
#[derive(Debug)]
pub struct TowerEdges {
    stage: u32,
    variant: Variant,
    below: Arc<RepStore>,
}

impl TowerEdges {
    pub(crate) fn new(stage: u32, variant: Variant, below: Arc<RepStore>) -> TowerEdges {
        TowerEdges { stage, variant, below }
    }

    fn stable(&self, index: usize) -> Word {
        Word::letter(Letter::Stable {
            stage: self.stage,
            index: index as u32,
        })
    }

    /// `w_i` with `w_i^-1 a_0 w_i = a_i` in this stage's HNN level.
    pub fn chain_conjugator(&self, i: usize) -> Word {
        match self.variant {
            Variant::CyclicRoot => Word::concat((0..i).map(|j| self.stable(j)).collect::<Vec<_>>().iter()),
            Variant::RationalRoot if i == 0 => Word::identity(),
            Variant::RationalRoot => self.stable(i - 1),
        }
    }

    fn index_of(&self, letter: &Letter) -> Option<usize> {
        match *letter {
            Letter::Stable { stage, index } if stage == self.stage => Some(index as usize),
            _ => None,
        }
    }
}

impl EdgeSource for TowerEdges {
    fn owns_stable(&self, letter: &Letter) -> bool {
        self.index_of(letter).is_some()
    }

    fn edge(&self, letter: &Letter) -> Result<Edge> {
        let i = self.index_of(letter).ok_or(GroupError::WrongLevel(*letter))?;
        let src = match self.variant {
            Variant::CyclicRoot => self.below.rep(i)?,
            Variant::RationalRoot => self.below.rep(0)?,
        };
        Ok(Edge {
            src,
            dst: self.below.rep(i + 1)?,
        })
    }

    fn edge_class(&self, base: &dyn Level, g: &Word) -> Result<Option<EdgeClass>> {
        if base.is_trivial(g)? {
            return Ok(None);
        }
        Ok(Some(match self.below.factor(g)? {
            Factored::Cyclic {
                index,
                exponent,
                conjugator,
            } => EdgeClass {
                key: 0,
                exponent: Rational::from_integer(exponent),
                conjugator: conjugator.mul(&self.chain_conjugator(index).inverse()),
                divisible: None,
            },
            Factored::Divisible {
                conjugator,
                stage,
                value,
            } => EdgeClass {
                key: 0,
                exponent: value,
                conjugator,
                divisible: Some(stage),
            },
        }))
    }

    fn boosted_root(&self, base: &dyn Level, p: &Word) -> Result<Option<Root>> {
        if self.variant == Variant::CyclicRoot {
            return Ok(None);
        }
        Ok(self.edge_class(base, p)?.map(|class| Root::Divisible {
            conjugator: class.conjugator,
            stage: 1,
            value: class.exponent,
        }))
    }

    fn materialized(&self) -> Vec<(Letter, Edge)> {
        let reps = self.below.materialized();
        (1..reps.len())
            .map(|i| {
                let letter = Letter::Stable {
                    stage: self.stage,
                    index: i as u32 - 1,
                };
                let src = match self.variant {
                    Variant::CyclicRoot => reps[i - 1].clone(),
                    Variant::RationalRoot => reps[0].clone(),
                };
                (
                    letter,
                    Edge {
                        src,
                        dst: reps[i].clone(),
                    },
                )
            })
            .collect()
    }

    fn is_lazy(&self) -> bool {
        true
    }
}
