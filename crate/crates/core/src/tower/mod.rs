//! Towers of groups in which every element eventually becomes divisible.
//!
//! Stage 1 is the base group: a free group `F_m` for [`Variant::CyclicRoot`],
//! or `Q * F_m` for [`Variant::RationalRoot`]. Stage `s + 1` is built from
//! stage `s` in two steps:
//!
//! 1. an HNN extension with one stable letter per class rep, conjugating the
//!    maximal cyclic subgroups of stage `s` onto each other;
//! 2. for cyclic roots, an amalgam with a new infinite cyclic group `<r>`
//!    identifying `r^K` with the designated rep `a_0`.
//!
//! For rational roots the second step is folded into the first: every
//! stable letter conjugates `<q1(1)>` onto a rep, so every element of
//! stage `s` lies in a conjugate of the rational vertex at stage `s + 1`.
//!
//! Everything is lazy. Reps, stable letters and stages materialize when a
//! query touches them.

mod edges;
mod reps;

use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{GroupError, Result};
use crate::levels::{
    Amalgamation, Bounds, CyclicLevel, EdgeSource, FreeLevel, HnnLevel, LevelRef, ProductLevel, RationalLevel,
};
use crate::word::{Letter, Rational, Word};

pub use edges::TowerEdges;
use reps::StageAlphabet;
pub use reps::{Factored, RepStore};

/// Stages beyond this are refused; root schedules reach any divisor long
/// before.
pub const MAX_STAGE: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    CyclicRoot,
    RationalRoot,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::CyclicRoot => "cyclic-root",
            Variant::RationalRoot => "rational-root",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "cyclic-root" | "cyclic" => Ok(Variant::CyclicRoot),
            "rational-root" | "rational" => Ok(Variant::RationalRoot),
            _ => Err(GroupError::InvalidSpec(format!("unknown variant `{}`", s))),
        }
    }
}

/// Root multiplicity `K` used when building each stage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum KSchedule {
    /// Stage `s` uses `K = s`.
    Identity,
    Constant(u64),
    /// `K` for stages `2, 3, ...`; the last entry repeats.
    List(Vec<u64>),
}

impl KSchedule {
    pub fn at(&self, stage: u32) -> u64 {
        match self {
            KSchedule::Identity => stage as u64,
            KSchedule::Constant(k) => *k,
            KSchedule::List(ks) => {
                let i = (stage.saturating_sub(2) as usize).min(ks.len().saturating_sub(1));
                ks.get(i).copied().unwrap_or(0)
            }
        }
    }
}

impl fmt::Display for KSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSchedule::Identity => f.write_str("identity"),
            KSchedule::Constant(k) => write!(f, "{}", k),
            KSchedule::List(ks) => {
                let parts: Vec<String> = ks.iter().map(u64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl std::str::FromStr for KSchedule {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<KSchedule> {
        let bad = || GroupError::InvalidSpec(format!("bad k schedule `{}`", s));
        let s = s.trim();
        if s == "identity" {
            return Ok(KSchedule::Identity);
        }
        let ks: Vec<u64> = s
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match ks.as_slice() {
            [] => Err(bad()),
            [k] => Ok(KSchedule::Constant(*k)),
            _ => Ok(KSchedule::List(ks)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerSpec {
    pub variant: Variant,
    pub base_rank: u32,
    pub k_schedule: KSchedule,
    pub bounds: Bounds,
    /// Index of the rep identified with `r^K`. Rational towers always use
    /// `a_0 = q1(1)`.
    pub a0_index: usize,
}

impl Default for TowerSpec {
    fn default() -> Self {
        TowerSpec {
            variant: Variant::CyclicRoot,
            base_rank: 2,
            k_schedule: KSchedule::Identity,
            bounds: Bounds::default(),
            a0_index: 0,
        }
    }
}

impl TowerSpec {
    pub fn new(variant: Variant, base_rank: u32) -> TowerSpec {
        TowerSpec {
            variant,
            base_rank,
            ..TowerSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_rank < 2 {
            return Err(GroupError::InvalidSpec(format!(
                "base rank {} gives an abelian base; need at least 2",
                self.base_rank
            )));
        }
        if self.variant == Variant::CyclicRoot {
            for s in 2..=MAX_STAGE {
                if self.k_schedule.at(s) < 2 {
                    return Err(GroupError::InvalidSpec(format!(
                        "root multiplicity at stage {} must be at least 2",
                        s
                    )));
                }
            }
        }
        if self.variant == Variant::RationalRoot && self.a0_index != 0 {
            return Err(GroupError::InvalidSpec("rational towers fix a0 = q1(1)".into()));
        }
        Ok(())
    }
}

/// One stage of a tower.
#[derive(Debug)]
pub struct Stage {
    index: u32,
    level: LevelRef,
    reps: Arc<RepStore>,
    /// Stable letters introduced at this stage.
    edges: Option<Arc<TowerEdges>>,
    /// Root letter and multiplicity introduced at this stage.
    root: Option<(Letter, u64)>,
}

impl Stage {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn level(&self) -> &LevelRef {
        &self.level
    }

    pub fn reps(&self) -> &Arc<RepStore> {
        &self.reps
    }

    pub fn edges(&self) -> Option<&Arc<TowerEdges>> {
        self.edges.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRep {
    pub stage: u32,
    pub index: usize,
    pub word: Word,
}

/// A word tagged with the stage it lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub stage: u32,
    pub word: Word,
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupOp {
    Mul,
    Inv,
    Pow(i64),
}

/// A generator of a stage together with its defining relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterInfo {
    pub letter: Letter,
    pub relation: Option<String>,
}

impl fmt::Display for LetterInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.relation {
            Some(r) => write!(f, "{}: {}", self.letter, r),
            None => write!(f, "{}", self.letter),
        }
    }
}

/// A lazily grown tower. Stages are appended under a lock and never change
/// once built, so readers always see a consistent prefix.
#[derive(Debug)]
pub struct Tower {
    spec: TowerSpec,
    stages: RwLock<Vec<Arc<Stage>>>,
}

pub fn build_tower(spec: TowerSpec) -> Result<Tower> {
    Tower::new(spec)
}

impl Tower {
    pub fn new(spec: TowerSpec) -> Result<Tower> {
        spec.validate()?;
        let bounds = spec.bounds;
        let rank = spec.base_rank;
        let (level, seed): (LevelRef, Vec<Word>) = match spec.variant {
            Variant::CyclicRoot => (Arc::new(FreeLevel::new(rank)), Vec::new()),
            Variant::RationalRoot => (
                Arc::new(ProductLevel::free_product(
                    Arc::new(RationalLevel::new(1)),
                    Arc::new(FreeLevel::new(rank)),
                    bounds,
                )),
                vec![rational_unit()],
            ),
        };
        let alphabet = StageAlphabet {
            rank,
            stage: 1,
            variant: spec.variant,
        };
        let reps = Arc::new(RepStore::new(level.clone(), alphabet, bounds, seed));
        let first = Arc::new(Stage {
            index: 1,
            level,
            reps,
            edges: None,
            root: None,
        });
        Ok(Tower {
            spec,
            stages: RwLock::new(vec![first]),
        })
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }

    /// Number of stages built so far.
    pub fn built(&self) -> u32 {
        self.stages.read().unwrap_or_else(|e| e.into_inner()).len() as u32
    }

    pub fn stage(&self, k: u32) -> Result<Arc<Stage>> {
        if k == 0 || k > MAX_STAGE {
            return Err(GroupError::InvalidSpec(format!(
                "stage {} outside 1..={}",
                k, MAX_STAGE
            )));
        }
        if let Some(s) = self
            .stages
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(k as usize - 1)
        {
            return Ok(s.clone());
        }
        let mut stages = self.stages.write().unwrap_or_else(|e| e.into_inner());
        while stages.len() < k as usize {
            let next = self.next_stage(stages.last().unwrap())?;
            stages.push(Arc::new(next));
        }
        Ok(stages[k as usize - 1].clone())
    }

    fn next_stage(&self, prev: &Stage) -> Result<Stage> {
        let s = prev.index + 1;
        let bounds = self.spec.bounds;
        let edges = Arc::new(TowerEdges::new(s, self.spec.variant, prev.reps.clone()));
        let hnn: LevelRef = Arc::new(HnnLevel::new(
            prev.level.clone(),
            edges.clone() as Arc<dyn EdgeSource>,
            bounds,
        ));
        let alphabet = StageAlphabet {
            rank: self.spec.base_rank,
            stage: s,
            variant: self.spec.variant,
        };
        let (level, seed, root): (LevelRef, Vec<Word>, _) = match self.spec.variant {
            Variant::CyclicRoot => {
                let k = self.spec.k_schedule.at(s);
                let letter = Letter::Root(s);
                let a0 = prev.reps.rep(self.spec.a0_index)?;
                let amalgamation = Amalgamation {
                    left_word: Word::power(letter, k as i64),
                    right_word: a0,
                };
                let level = ProductLevel::amalgam(Arc::new(CyclicLevel::new(letter)), hnn, amalgamation, bounds);
                (Arc::new(level) as LevelRef, Vec::new(), Some((letter, k)))
            }
            Variant::RationalRoot => (hnn, vec![rational_unit()], None),
        };
        let reps = Arc::new(RepStore::new(level.clone(), alphabet, bounds, seed));
        Ok(Stage {
            index: s,
            level,
            reps,
            edges: Some(edges),
            root,
        })
    }

    pub fn level(&self, k: u32) -> Result<LevelRef> {
        Ok(self.stage(k)?.level.clone())
    }

    /// Root multiplicity used to build stage `k`.
    pub fn multiplicity(&self, k: u32) -> u64 {
        self.spec.k_schedule.at(k)
    }

    /// Check that every letter of `word` exists at stage `k`.
    pub fn check_letters(&self, word: &Word, k: u32) -> Result<()> {
        for l in word.letters() {
            let ok = match *l {
                Letter::Base(i) => {
                    if i >= self.spec.base_rank {
                        return Err(GroupError::UnknownLetter(l.to_string()));
                    }
                    true
                }
                Letter::Stable { stage, .. } => stage >= 2 && stage <= k,
                Letter::Root(stage) => {
                    if self.spec.variant != Variant::CyclicRoot || stage < 2 {
                        return Err(GroupError::UnknownLetter(l.to_string()));
                    }
                    stage <= k
                }
                Letter::Rational { stage, .. } => {
                    if self.spec.variant != Variant::RationalRoot || stage != 1 {
                        return Err(GroupError::UnknownLetter(l.to_string()));
                    }
                    true
                }
            };
            if !ok {
                return Err(GroupError::StageViolation { letter: *l, stage: k });
            }
        }
        Ok(())
    }

    pub fn element(&self, stage: u32, word: Word) -> Result<Element> {
        self.check_letters(&word, stage)?;
        Ok(Element { stage, word })
    }

    /// Reduced form at the element's stage.
    pub fn normal_form(&self, e: &Element) -> Result<Element> {
        let word = self.level(e.stage)?.reduce(&e.word)?;
        Ok(Element { stage: e.stage, word })
    }

    pub fn are_equal(&self, a: &Element, b: &Element) -> Result<bool> {
        let k = a.stage.max(b.stage);
        self.level(k)?.are_equal(&a.word, &b.word)
    }

    pub fn class_reps(&self, k: u32, count: usize) -> Result<Vec<ClassRep>> {
        let words = self.stage(k)?.reps.reps(count)?;
        Ok(words
            .into_iter()
            .enumerate()
            .map(|(index, word)| ClassRep { stage: k, index, word })
            .collect())
    }

    /// The designated generator `a_0` of stage `k`.
    pub fn a0(&self, k: u32) -> Result<Word> {
        self.stage(k)?.reps.rep(self.spec.a0_index)
    }

    /// `w` with `w^-1 a_0 w = a_i` at stage `k + 1`.
    pub fn conjugator_to(&self, k: u32, i: usize) -> Result<Word> {
        let next = self.stage(k + 1)?;
        let edges = next.edges.as_ref().expect("stages above 1 carry stable letters");
        let w = match self.spec.variant {
            Variant::CyclicRoot => edges
                .chain_conjugator(self.spec.a0_index)
                .inverse()
                .mul(&edges.chain_conjugator(i)),
            Variant::RationalRoot => edges.chain_conjugator(i),
        };
        let w = next.level.reduce(&w)?;
        let a0 = self.a0(k)?;
        let ai = self.stage(k)?.reps.rep(i)?;
        if !next.level.are_equal(&a0.conj(&w), &ai)? {
            return Err(GroupError::undecided(format!(
                "conjugator {} failed to map a0 to a{} at stage {}",
                w,
                i,
                k + 1
            )));
        }
        Ok(w)
    }

    pub fn promote(&self, e: &Element, to: u32) -> Result<Element> {
        if to < e.stage {
            return Err(GroupError::Demotion { from: e.stage, to });
        }
        self.stage(to)?;
        Ok(Element {
            stage: to,
            word: e.word.clone(),
        })
    }

    /// An `n`-th root of `e` in stage `e.stage + 1` for rational towers or
    /// divisible elements, built from the rep factorization of `e`.
    fn rational_root(&self, e: &Element, n: i64) -> Result<Element> {
        let here = self.stage(e.stage)?;
        let (x, value, stage) = match here.reps.factor(&e.word)? {
            Factored::Divisible { conjugator, value, .. } => (conjugator, value, e.stage),
            Factored::Cyclic {
                index,
                exponent,
                conjugator,
            } => {
                // a_i = w^-1 q1(1) w at the next stage
                let w = self.conjugator_to(e.stage, index)?;
                (
                    conjugator.mul(&w.inverse()),
                    Rational::from_integer(exponent),
                    e.stage + 1,
                )
            }
        };
        let q = Word::letter(Letter::Rational {
            stage: 1,
            value: value / Rational::from_integer(n),
        });
        let word = self.level(stage)?.reduce(&x.mul(&q).mul(&x.inverse()))?;
        Ok(Element { stage, word })
    }

    /// A `K`-th root of `e` at stage `e.stage + 1`, `K` the multiplicity of
    /// that stage.
    pub fn kth_root(&self, e: &Element) -> Result<Element> {
        self.check_letters(&e.word, e.stage)?;
        let level = self.level(e.stage)?;
        if level.is_trivial(&e.word)? {
            return Err(GroupError::TrivialRootData);
        }
        let k = self.multiplicity(e.stage + 1);
        let h = match self.spec.variant {
            Variant::RationalRoot => {
                let h = self.rational_root(e, k as i64)?;
                self.promote(&h, e.stage + 1)?
            }
            Variant::CyclicRoot => {
                let Factored::Cyclic {
                    index,
                    exponent,
                    conjugator,
                } = self.stage(e.stage)?.reps.factor(&e.word)?
                else {
                    return Err(GroupError::undecided("divisible element in a cyclic tower"));
                };
                let w = self.conjugator_to(e.stage, index)?;
                let x = conjugator.mul(&w.inverse());
                let r = Word::power(Letter::Root(e.stage + 1), exponent);
                let word = self.level(e.stage + 1)?.reduce(&x.mul(&r).mul(&x.inverse()))?;
                Element {
                    stage: e.stage + 1,
                    word,
                }
            }
        };
        self.verify_root(&h, k as i64, e)?;
        Ok(h)
    }

    fn verify_root(&self, h: &Element, n: i64, e: &Element) -> Result<()> {
        let level = self.level(h.stage.max(e.stage))?;
        if !level.are_equal(&h.word.pow(n), &e.word)? {
            return Err(GroupError::undecided(format!(
                "root {} failed verification: its {}-th power is not {}",
                h, n, e
            )));
        }
        Ok(())
    }

    /// An `n`-th root of `e` in the union of the tower.
    pub fn nth_root_union(&self, e: &Element, n: u64) -> Result<Element> {
        if n < 1 {
            return Err(GroupError::Usage("root order must be positive".into()));
        }
        self.check_letters(&e.word, e.stage)?;
        if self.level(e.stage)?.is_trivial(&e.word)? {
            return Err(GroupError::TrivialRootData);
        }
        if n == 1 {
            return Ok(e.clone());
        }
        let h = match self.spec.variant {
            Variant::RationalRoot => self.rational_root(e, n as i64)?,
            Variant::CyclicRoot => {
                let mut cur = e.clone();
                let mut total: u64 = 1;
                while !total.is_multiple_of(n) {
                    if cur.stage >= MAX_STAGE {
                        return Err(GroupError::InvalidSpec(format!(
                            "root schedule never reaches a multiple of {}",
                            n
                        )));
                    }
                    cur = self.kth_root(&cur)?;
                    total = total
                        .checked_mul(self.multiplicity(cur.stage))
                        .ok_or(GroupError::Overflow)?;
                }
                let word = self.level(cur.stage)?.reduce(&cur.word.pow((total / n) as i64))?;
                Element { stage: cur.stage, word }
            }
        };
        self.verify_root(&h, n as i64, e)?;
        Ok(h)
    }

    pub fn group_op(&self, op: GroupOp, args: &[Element]) -> Result<Element> {
        let arity_ok = match op {
            GroupOp::Mul => !args.is_empty(),
            GroupOp::Inv | GroupOp::Pow(_) => args.len() == 1,
        };
        if !arity_ok {
            return Err(GroupError::Usage(format!("wrong number of arguments for {:?}", op)));
        }
        let stage = args.iter().map(|a| a.stage).max().unwrap();
        let word = match op {
            GroupOp::Mul => Word::concat(args.iter().map(|a| &a.word)),
            GroupOp::Inv => args[0].word.inverse(),
            GroupOp::Pow(n) => args[0].word.pow(n),
        };
        let word = self.level(stage)?.reduce(&word)?;
        Ok(Element { stage, word })
    }

    /// Generators of stage `k` with their defining relations. Stable letters
    /// are listed as far as reps below have been materialized.
    pub fn stage_letters(&self, k: u32) -> Result<Vec<LetterInfo>> {
        let mut out: Vec<LetterInfo> = (0..self.spec.base_rank)
            .map(|i| LetterInfo {
                letter: Letter::Base(i),
                relation: None,
            })
            .collect();
        if self.spec.variant == Variant::RationalRoot {
            out.push(LetterInfo {
                letter: Letter::Rational {
                    stage: 1,
                    value: Rational::new(1, 1),
                },
                relation: Some("a0 of the rational vertex q1(p/d), p/d in Q".into()),
            });
        }
        for s in 2..=k {
            let stage = self.stage(s)?;
            if let Some(edges) = &stage.edges {
                for (letter, edge) in edges.materialized() {
                    let relation = match self.spec.variant {
                        Variant::CyclicRoot => format!("{}^-1 ({}) {} = {}", letter, edge.src, letter, edge.dst),
                        Variant::RationalRoot => format!(
                            "{}^-1 ({}) {} = {}; rational copy over {}: {}^-1 q1(v) {}",
                            letter, edge.src, letter, edge.dst, edge.dst, letter, letter
                        ),
                    };
                    out.push(LetterInfo {
                        letter,
                        relation: Some(relation),
                    });
                }
            }
            if let Some((letter, mult)) = stage.root {
                let a0 = self.a0(s - 1)?;
                out.push(LetterInfo {
                    letter,
                    relation: Some(format!("{}^{} = {}", letter, mult, a0)),
                });
            }
        }
        Ok(out)
    }

    /// Rep lists of every built stage, for persisting.
    pub fn materialized_reps(&self) -> Vec<(u32, Vec<Word>)> {
        let stages = self.stages.read().unwrap_or_else(|e| e.into_inner());
        stages.iter().map(|s| (s.index, s.reps.materialized())).collect()
    }

    /// Install rep lists computed earlier for the same spec.
    pub fn adopt_reps(&self, stage: u32, reps: Vec<Word>) -> Result<()> {
        for w in &reps {
            self.check_letters(w, stage)?;
        }
        self.stage(stage)?.reps.adopt(reps);
        Ok(())
    }
}

fn rational_unit() -> Word {
    Word::letter(Letter::Rational {
        stage: 1,
        value: Rational::from_integer(1),
    })
}
