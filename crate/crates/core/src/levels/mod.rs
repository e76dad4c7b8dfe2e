//! Layered decision procedures.
//!
//! Every group in a tower is assembled from a handful of level kinds: free
//! groups, infinite cyclic root groups, copies of the rationals, free products
//! and amalgams of two factors, and HNN extensions with cyclic associated
//! subgroups. Each kind implements [`Level`], recursing into its factors or
//! base group for membership questions.

mod free;
mod hnn;
mod product;
mod vertex;

use std::fmt;
use std::sync::Arc;

pub use free::FreeLevel;
pub use hnn::{Edge, EdgeClass, EdgeSource, FiniteEdges, HnnLevel, PinchResult, PinchSide};
pub use product::{Amalgamation, ProductLevel};
pub use vertex::{CyclicLevel, RationalLevel};

use crate::error::{GroupError, Result};
use crate::word::{Letter, Rational, Word};

/// Search limits shared by the bounded procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    /// Largest edge-subgroup exponent tried when matching cyclic permutations
    /// up to conjugation by an associated-subgroup element.
    pub max_exponent: u64,
    /// Largest number of nodes explored in an edge-class search.
    pub max_component: usize,
    /// Largest number of class representatives enumerated per stage.
    pub max_reps: usize,
    /// Largest enumeration grade (length plus letter height) per stage.
    pub max_grade: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_exponent: 48,
            max_component: 64,
            max_reps: 4096,
            max_grade: 12,
        }
    }
}

/// Outcome of a bounded conjugacy query. `Conjugate(x)` means
/// `x^-1 g x = h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjugacy {
    Conjugate(Word),
    NotConjugate,
    Undecided(String),
}

impl Conjugacy {
    pub fn conjugator(&self) -> Option<&Word> {
        match self {
            Conjugacy::Conjugate(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_conjugate(&self) -> bool {
        matches!(self, Conjugacy::Conjugate(_))
    }
}

/// Root data of a nontrivial element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Root {
    /// `g = root^exponent` with `exponent` maximal.
    Power { root: Word, exponent: u64 },
    /// `conjugator^-1 g conjugator = q<stage>(value)`: the element lies in a
    /// conjugate of a rational vertex and has roots of every order.
    Divisible {
        conjugator: Word,
        stage: u32,
        value: Rational,
    },
}

impl Root {
    pub fn exponent(&self) -> Option<u64> {
        match self {
            Root::Power { exponent, .. } => Some(*exponent),
            Root::Divisible { .. } => None,
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.exponent() == Some(1)
    }

    /// Conjugate the root data by `c`: data for `c g c^-1` from data for `g`.
    pub(crate) fn conjugated(self, c: &Word) -> Root {
        match self {
            Root::Power { root, exponent } => Root::Power {
                root: c.mul(&root).mul(&c.inverse()),
                exponent,
            },
            Root::Divisible {
                conjugator,
                stage,
                value,
            } => Root::Divisible {
                conjugator: c.mul(&conjugator),
                stage,
                value,
            },
        }
    }
}

/// Structural description of a level, for introspection and reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelDescriptor {
    Free {
        rank: u32,
    },
    RationalVertex {
        stage: u32,
    },
    Cyclic {
        letter: Letter,
    },
    FreeProduct {
        left: Box<LevelDescriptor>,
        right: Box<LevelDescriptor>,
    },
    Hnn {
        base: Box<LevelDescriptor>,
        /// Materialized stable letters with `t^-1 src t = dst`.
        edges: Vec<(Letter, Word, Word)>,
        lazy: bool,
        negative_control: bool,
    },
    Amalgam {
        left: Box<LevelDescriptor>,
        right: Box<LevelDescriptor>,
        left_word: Word,
        right_word: Word,
    },
}

impl fmt::Display for LevelDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelDescriptor::Free { rank } => write!(f, "F{}", rank),
            LevelDescriptor::RationalVertex { stage } => write!(f, "Q{}", stage),
            LevelDescriptor::Cyclic { letter } => write!(f, "<{}>", letter),
            LevelDescriptor::FreeProduct { left, right } => write!(f, "({} * {})", left, right),
            LevelDescriptor::Hnn {
                base,
                edges,
                lazy,
                negative_control,
            } => {
                write!(f, "HNN({}", base)?;
                for (t, s, d) in edges {
                    write!(f, "; {}^-1 ({}) {} = {}", t, s, t, d)?;
                }
                if *lazy {
                    write!(f, "; ...")?;
                }
                if *negative_control {
                    write!(f, "; negative-control")?;
                }
                write!(f, ")")
            }
            LevelDescriptor::Amalgam {
                left,
                right,
                left_word,
                right_word,
            } => write!(f, "({} *[{} = {}] {})", left, left_word, right_word, right),
        }
    }
}

/// A group with decidable word problem and bounded conjugacy and root
/// procedures.
pub trait Level: Send + Sync + fmt::Debug {
    fn owns(&self, letter: &Letter) -> bool;

    /// A reduced word for the same element; empty exactly when trivial.
    fn reduce(&self, w: &Word) -> Result<Word>;

    /// The unique `n` with `a^n = g`, if any. `a` must be nontrivial.
    fn solve_power(&self, a: &Word, g: &Word) -> Result<Option<i64>>;

    /// `(core, conjugator)` with `w = conjugator core conjugator^-1` and
    /// `core` cyclically reduced in this level's sense.
    fn cyclic_reduce(&self, w: &Word) -> Result<(Word, Word)>;

    /// Bounded conjugacy: `Conjugate(x)` with `x^-1 g x = h`.
    fn conjugate(&self, g: &Word, h: &Word) -> Result<Conjugacy>;

    fn extract_root(&self, g: &Word) -> Result<Root>;

    fn descriptor(&self) -> LevelDescriptor;

    fn check_alphabet(&self, w: &Word) -> Result<()> {
        match w.letters().find(|l| !self.owns(l)) {
            Some(l) => Err(GroupError::WrongLevel(*l)),
            None => Ok(()),
        }
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.reduce(w)?.is_identity())
    }

    fn are_equal(&self, a: &Word, b: &Word) -> Result<bool> {
        self.is_trivial(&a.mul(&b.inverse()))
    }
}

pub type LevelRef = Arc<dyn Level>;

/// Decide whether `w` is the identity.
pub fn is_trivial(level: &dyn Level, w: &Word) -> Result<bool> {
    level.is_trivial(w)
}

pub fn are_equal(level: &dyn Level, a: &Word, b: &Word) -> Result<bool> {
    level.are_equal(a, b)
}

/// Solution of `a^n = g`: an integer, or a rational scaling when `a` and `g`
/// lie in a rational vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerSolution {
    Integer(i64),
    Rational(Rational),
}

/// Power membership at any level. For words that are single syllables of the
/// same rational vertex the solution is the exact rational ratio.
pub fn solve_power_level(level: &dyn Level, a: &Word, g: &Word) -> Result<Option<PowerSolution>> {
    level.check_alphabet(a)?;
    level.check_alphabet(g)?;
    if level.is_trivial(a)? {
        return Err(GroupError::DegenerateBase);
    }
    if let (Some(u), Some(v)) = (single_rational(a), single_rational(g)) {
        if u.0 == v.0 {
            let q = v.1 / u.1;
            return Ok(Some(if q.is_integer() {
                PowerSolution::Integer(*q.numer())
            } else {
                PowerSolution::Rational(q)
            }));
        }
    }
    Ok(level.solve_power(a, g)?.map(PowerSolution::Integer))
}

fn single_rational(w: &Word) -> Option<(u32, Rational)> {
    match w.syllables() {
        [s] => match s.letter {
            Letter::Rational { stage, value } => Some((stage, value)),
            _ => None,
        },
        _ => None,
    }
}

pub fn cyclic_reduce_level(level: &dyn Level, w: &Word) -> Result<(Word, Word)> {
    level.check_alphabet(w)?;
    level.cyclic_reduce(w)
}

/// Bounded conjugacy with post-verification of any conjugator.
pub fn conjugate_level(level: &dyn Level, g: &Word, h: &Word) -> Result<Conjugacy> {
    level.check_alphabet(g)?;
    level.check_alphabet(h)?;
    let out = level.conjugate(g, h)?;
    if let Conjugacy::Conjugate(x) = &out {
        if !level.are_equal(&g.conj(x), h)? {
            return Err(GroupError::undecided(format!(
                "conjugator {} failed verification for ({}, {})",
                x, g, h
            )));
        }
    }
    Ok(out)
}

pub fn extract_root_level(level: &dyn Level, g: &Word) -> Result<Root> {
    level.check_alphabet(g)?;
    if level.is_trivial(g)? {
        return Err(GroupError::TrivialRootData);
    }
    level.extract_root(g)
}

/// Conjugate `g` into the cyclic subgroup generated by `e`: returns `(k, x)`
/// with `x^-1 g x = e^k`.
pub(crate) fn conjugate_into_cyclic(level: &dyn Level, g: &Word, e: &Word) -> Result<Option<(i64, Word)>> {
    if let Some(k) = level.solve_power(e, g)? {
        return Ok(Some((k, Word::identity())));
    }
    let (p, n) = match level.extract_root(g)? {
        Root::Power { root, exponent } => (root, exponent as i64),
        Root::Divisible { .. } => return Ok(None),
    };
    let (pe, ne) = match level.extract_root(e)? {
        Root::Power { root, exponent } => (root, exponent as i64),
        Root::Divisible { .. } => return Ok(None),
    };
    if n % ne != 0 {
        return Ok(None);
    }
    for sign in [1i64, -1] {
        let target = if sign > 0 { pe.clone() } else { pe.inverse() };
        match level.conjugate(&p, &target)? {
            Conjugacy::Conjugate(x) => return Ok(Some((sign * n / ne, x))),
            Conjugacy::NotConjugate => {}
            Conjugacy::Undecided(why) => return Err(GroupError::Undecided(why)),
        }
    }
    Ok(None)
}

/// Exponent search order `0, 1, -1, 2, -2, ...` up to `bound`.
pub(crate) fn exponent_order(bound: u64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=bound as i64).flat_map(|m| [m, -m]))
}

/// Divisors of `n` greater than one, largest first.
pub(crate) fn divisors_desc(n: usize) -> Vec<usize> {
    let mut d: Vec<usize> = (2..=n).filter(|d| n.is_multiple_of(*d)).collect();
    d.reverse();
    d
}

/// Derived exponent bound for matching words of total length `total` up to
/// conjugation by powers of a subgroup generator of length `gen_len`.
pub(crate) fn derived_bound(total: u64, gen_len: u64) -> u64 {
    total / gen_len.max(1) + 2
}
