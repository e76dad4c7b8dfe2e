//! Lazy enumeration of conjugacy class representatives of one stage.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::{Mutex, MutexGuard};

use crate::error::{GroupError, Result};
use crate::freewords::{conjugate_free, cyclic_class_key, for_each_reduced};
use crate::levels::{Bounds, Conjugacy, LevelRef, Root};
use crate::word::{Letter, Rational, Unit, Word};

use super::Variant;

/// The letters of a stage, graded by height.
#[derive(Clone, Copy, Debug)]
pub(crate) struct StageAlphabet {
    pub rank: u32,
    pub stage: u32,
    pub variant: Variant,
}

impl StageAlphabet {
    /// Sorted units of height at most `max_height`.
    pub fn units(&self, max_height: u64) -> Vec<Unit> {
        let mut out = Vec::new();
        let both = |out: &mut Vec<Unit>, l: Letter| {
            out.push(Unit::new(l, false));
            out.push(Unit::new(l, true));
        };
        for i in 0..self.rank {
            both(&mut out, Letter::Base(i));
        }
        for s in 2..=self.stage {
            for index in 0..=max_height as u32 {
                both(&mut out, Letter::Stable { stage: s, index });
            }
            if self.variant == Variant::CyclicRoot {
                both(&mut out, Letter::Root(s));
            }
        }
        if self.variant == Variant::RationalRoot {
            let top = max_height as i64 + 1;
            for d in 1..=top {
                for p in 1..=top {
                    if num_integer::gcd(p, d) == 1 {
                        for v in [p, -p] {
                            out.push(Unit::new(
                                Letter::Rational {
                                    stage: 1,
                                    value: Rational::new(v, d),
                                },
                                false,
                            ));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// All candidate words of exactly `grade`, in graded order.
    pub fn grade(&self, grade: u64) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 1..=grade {
            let height = grade - len;
            let alphabet = self.units(height);
            let _ = for_each_reduced(&alphabet, len as usize, |units| {
                let first = units[0];
                let last = units[units.len() - 1];
                let wraps = units.len() > 1
                    && (last == first.inverted()
                        || (first.letter.is_rational() && first.letter.same_generator(&last.letter)));
                if !wraps {
                    let w = Word::from_units(units.iter().copied());
                    if w.height() == height {
                        out.push(w);
                    }
                }
                ControlFlow::Continue(())
            });
        }
        out
    }
}

#[derive(Debug, Default)]
struct RepState {
    reps: Vec<Word>,
    /// Free stages only: class key of every emitted rep.
    keys: HashMap<Word, usize>,
    /// Enumeration cursor: the batch of the current grade and the next
    /// position in it.
    grade: u64,
    batch: Vec<Word>,
    pos: usize,
}

/// Representatives `a_0, a_1, ...` of the conjugacy classes of maximal
/// cyclic subgroups of one stage, in first-seen graded shortlex order.
#[derive(Debug)]
pub struct RepStore {
    stage: u32,
    level: LevelRef,
    alphabet: StageAlphabet,
    bounds: Bounds,
    free: bool,
    state: Mutex<RepState>,
}

impl RepStore {
    pub(crate) fn new(level: LevelRef, alphabet: StageAlphabet, bounds: Bounds, seed: Vec<Word>) -> RepStore {
        let free = alphabet.stage == 1 && alphabet.variant == Variant::CyclicRoot;
        let mut state = RepState {
            reps: seed,
            ..RepState::default()
        };
        if free {
            for (i, r) in state.reps.iter().enumerate() {
                state.keys.insert(cyclic_class_key(r), i);
            }
        }
        RepStore {
            stage: alphabet.stage,
            level,
            alphabet,
            bounds,
            free,
            state: Mutex::new(state),
        }
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    fn lock(&self) -> MutexGuard<'_, RepState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Reps enumerated so far.
    pub fn materialized(&self) -> Vec<Word> {
        self.lock().reps.clone()
    }

    pub fn len(&self) -> usize {
        self.lock().reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rep(&self, index: usize) -> Result<Word> {
        let mut st = self.lock();
        while st.reps.len() <= index {
            self.advance(&mut st)?;
        }
        Ok(st.reps[index].clone())
    }

    pub fn reps(&self, count: usize) -> Result<Vec<Word>> {
        if count > 0 {
            self.rep(count - 1)?;
        }
        Ok(self.lock().reps[..count].to_vec())
    }

    /// Replace the enumeration state by a previously computed rep list.
    /// The list must be a prefix of this store's own enumeration.
    pub(crate) fn adopt(&self, reps: Vec<Word>) {
        let mut st = self.lock();
        if reps.len() <= st.reps.len() {
            return;
        }
        let last = reps.last().cloned();
        st.keys.clear();
        if self.free {
            for (i, r) in reps.iter().enumerate() {
                st.keys.insert(cyclic_class_key(r), i);
            }
        }
        st.reps = reps;
        if let Some(last) = last {
            let grade = last.len() + last.height();
            let batch = self.alphabet.grade(grade);
            st.pos = batch.iter().position(|w| *w == last).map_or(0, |p| p + 1);
            st.grade = grade;
            st.batch = batch;
        }
    }

    /// Examine candidates until one more rep is emitted.
    fn advance(&self, st: &mut RepState) -> Result<()> {
        if st.reps.len() >= self.bounds.max_reps {
            return Err(GroupError::undecided(format!(
                "stage {} rep enumeration exceeds {} reps",
                self.stage, self.bounds.max_reps
            )));
        }
        loop {
            if st.pos >= st.batch.len() {
                if st.grade >= self.bounds.max_grade {
                    return Err(GroupError::undecided(format!(
                        "stage {} rep enumeration exceeds grade {}",
                        self.stage, self.bounds.max_grade
                    )));
                }
                st.grade += 1;
                st.batch = self.alphabet.grade(st.grade);
                st.pos = 0;
                continue;
            }
            let w = st.batch[st.pos].clone();
            st.pos += 1;
            if self.keep(st, &w)? {
                if self.free {
                    st.keys.insert(w.clone(), st.reps.len());
                }
                st.reps.push(w);
                return Ok(());
            }
        }
    }

    fn keep(&self, st: &RepState, w: &Word) -> Result<bool> {
        if self.free {
            return Ok(cyclic_class_key(w) == *w
                && !st.keys.contains_key(w)
                && crate::freewords::primitive_root_free(w)?.1 == 1);
        }
        if self.level.reduce(w)? != *w {
            return Ok(false);
        }
        let (core, c) = self.level.cyclic_reduce(w)?;
        if !c.is_identity() || core != *w {
            return Ok(false);
        }
        if !self.level.extract_root(w)?.is_primitive() {
            return Ok(false);
        }
        for r in &st.reps {
            if self.matches(w, r)?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Some((sign, x))` with `x^-1 p x = rep^sign`.
    fn matches(&self, p: &Word, rep: &Word) -> Result<Option<(i64, Word)>> {
        for sign in [1, -1] {
            let target = rep.pow(sign);
            match self.level.conjugate(p, &target)? {
                Conjugacy::Conjugate(x) => return Ok(Some((sign, x))),
                Conjugacy::NotConjugate => {}
                Conjugacy::Undecided(why) => {
                    return Err(GroupError::Undecided(format!(
                        "stage {} conjugacy of {} and {}: {}",
                        self.stage, p, target, why
                    )))
                }
            }
        }
        Ok(None)
    }

    /// For a primitive `p`: `(i, sign, x)` with `x^-1 p x = a_i^sign`.
    pub fn locate(&self, p: &Word) -> Result<(usize, i64, Word)> {
        let mut st = self.lock();
        if self.free {
            let key = cyclic_class_key(p);
            if crate::freewords::primitive_root_free(&key)?.1 != 1 {
                return Err(GroupError::undecided(format!("{} is not primitive", p)));
            }
            let key_grade = key.len();
            let index = loop {
                if let Some(&i) = st.keys.get(&key) {
                    break i;
                }
                if st.grade > key_grade {
                    return Err(GroupError::undecided(format!("no stage-1 rep for {}", p)));
                }
                self.advance(&mut st)?;
            };
            let rep = st.reps[index].clone();
            for sign in [1, -1] {
                if let Some(x) = conjugate_free(p, &rep.pow(sign)) {
                    return Ok((index, sign, x));
                }
            }
            return Err(GroupError::undecided(format!("class key mismatch for {}", p)));
        }
        let (core, _) = self.level.cyclic_reduce(p)?;
        let grade = core.len() + core.height();
        let mut i = 0;
        loop {
            while i < st.reps.len() {
                let rep = st.reps[i].clone();
                if let Some((sign, x)) = self.matches(p, &rep)? {
                    return Ok((i, sign, x));
                }
                i += 1;
            }
            if st.grade > grade || (st.grade == grade && st.pos >= st.batch.len()) {
                return Err(GroupError::undecided(format!(
                    "no stage-{} rep found for {}",
                    self.stage, p
                )));
            }
            self.advance(&mut st)?;
        }
    }

    /// Root data `(p, n)` of `g` together with the rep of `p`:
    /// `g = p^n`, `x^-1 p x = a_i^sign`.
    pub fn factor(&self, g: &Word) -> Result<Factored> {
        match self.level.extract_root(g)? {
            Root::Power { root, exponent } => {
                let (index, sign, conjugator) = self.locate(&root)?;
                Ok(Factored::Cyclic {
                    index,
                    exponent: sign * exponent as i64,
                    conjugator,
                })
            }
            Root::Divisible {
                conjugator,
                stage,
                value,
            } => Ok(Factored::Divisible {
                conjugator,
                stage,
                value,
            }),
        }
    }
}

/// A nontrivial element written against the rep list of its stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factored {
    /// `conjugator^-1 g conjugator = a_index^exponent`
    Cyclic {
        index: usize,
        exponent: i64,
        conjugator: Word,
    },
    /// `conjugator^-1 g conjugator = q<stage>(value)`
    Divisible {
        conjugator: Word,
        stage: u32,
        value: Rational,
    },
}
