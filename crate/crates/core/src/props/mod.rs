//! Bounded-radius property checks, brute-force oracles and the ladder
//! prober.
//!
//! Every violation or witness is re-verified with the word problem before it
//! is reported.

mod ladder;

use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use rand::rngs::Xoshiro256PlusPlus;
use rand::SeedableRng;

use crate::error::{GroupError, Result};
use crate::freewords::for_each_reduced;
use crate::levels::{Bounds, Edge, FiniteEdges, FreeLevel, HnnLevel, Level};
use crate::tower::{Element, Tower, Variant};
use crate::word::{Letter, Rational, Unit, Word};

pub use ladder::{
    check_promotion_invariance, ladder_search, ladder_search_level, Formula, Ladder, LadderFormula, LadderReport,
};

/// Findings kept verbatim per report; the rest are only counted.
const MAX_KEPT: usize = 16;

/// Words drawn from a ball of a stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub stage: u32,
    pub max_len: usize,
    /// Units the words are spelled in; empty means the stage default.
    pub units: Vec<Unit>,
    pub seed: Option<u64>,
    /// Sample size. Without a seed the shortlex-first `size` words are
    /// taken; with a seed, a uniform subset of the ball.
    pub size: Option<usize>,
}

impl SampleSpec {
    pub fn ball(stage: u32, max_len: usize) -> SampleSpec {
        SampleSpec {
            stage,
            max_len,
            units: Vec::new(),
            seed: None,
            size: None,
        }
    }

    pub fn with_letters(mut self, letters: &[Letter]) -> SampleSpec {
        self.units = units_of(letters);
        self
    }

    pub fn with_size(mut self, size: usize) -> SampleSpec {
        self.size = Some(size);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> SampleSpec {
        self.seed = Some(seed);
        self
    }

    pub fn units(&self, tower: &Tower) -> Vec<Unit> {
        if self.units.is_empty() {
            units_of(&default_letters(tower, self.stage))
        } else {
            self.units.clone()
        }
    }

    /// The sampled words, identity included when it is drawn.
    pub fn words(&self, tower: &Tower) -> Vec<Word> {
        let ball = ball(&self.units(tower), self.max_len);
        match (self.size, self.seed) {
            (Some(n), _) if n >= ball.len() => ball,
            (Some(n), None) => ball.into_iter().take(n).collect(),
            (Some(n), Some(seed)) => {
                let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
                let mut picked = rand::seq::index::sample(&mut rng, ball.len(), n).into_vec();
                picked.sort_unstable();
                picked.into_iter().map(|i| ball[i].clone()).collect()
            }
            (None, _) => ball,
        }
    }

    pub fn describe(&self) -> String {
        let mut s = format!("stage {} ball radius {}", self.stage, self.max_len);
        if !self.units.is_empty() {
            let letters: Vec<String> = self
                .units
                .iter()
                .filter(|u| !u.inverse)
                .map(|u| u.letter.to_string())
                .collect();
            s.push_str(&format!(" over {{{}}}", letters.join(", ")));
        }
        if let Some(n) = self.size {
            s.push_str(&format!(" size {}", n));
        }
        if let Some(seed) = self.seed {
            s.push_str(&format!(" seed {}", seed));
        }
        s
    }
}

/// Units for a letter list: both signs of each letter, or the value and its
/// negative for rational letters.
pub fn units_of(letters: &[Letter]) -> Vec<Unit> {
    let mut out = Vec::new();
    for l in letters {
        match *l {
            Letter::Rational { stage, value } => {
                out.push(Unit::new(*l, false));
                out.push(Unit::new(Letter::Rational { stage, value: -value }, false));
            }
            _ => {
                out.push(Unit::new(*l, false));
                out.push(Unit::new(*l, true));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Base letters, `t<j>_0`, `t<j>_1` and `r<j>` for each stage `2 <= j <= k`,
/// plus `q1(1)` and `q1(1/2)` in rational towers.
pub fn default_letters(tower: &Tower, stage: u32) -> Vec<Letter> {
    let spec = tower.spec();
    let mut out: Vec<Letter> = (0..spec.base_rank).map(Letter::Base).collect();
    for j in 2..=stage {
        out.push(Letter::Stable { stage: j, index: 0 });
        out.push(Letter::Stable { stage: j, index: 1 });
        if spec.variant == Variant::CyclicRoot {
            out.push(Letter::Root(j));
        }
    }
    if spec.variant == Variant::RationalRoot {
        out.push(Letter::Rational {
            stage: 1,
            value: Rational::from_integer(1),
        });
        out.push(Letter::Rational {
            stage: 1,
            value: Rational::new(1, 2),
        });
    }
    out
}

/// All reduced words of length at most `radius` over `units`, in shortlex
/// order, starting with the identity.
pub fn ball(units: &[Unit], radius: usize) -> Vec<Word> {
    let mut sorted = units.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    for len in 0..=radius {
        let _ = for_each_reduced(&sorted, len, |us| {
            out.push(Word::from_units(us.iter().copied()));
            ControlFlow::Continue(())
        });
    }
    out
}

/// One violation or witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub witness: Vec<Word>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: String,
    pub sample: String,
    pub radii: Vec<(String, u64)>,
    pub checked: usize,
    pub skipped: usize,
    pub violation_count: usize,
    /// The first violations found.
    pub violations: Vec<Finding>,
}

impl PropertyReport {
    fn new(property: &str, sample: String, radii: Vec<(&str, u64)>) -> PropertyReport {
        PropertyReport {
            property: property.to_string(),
            sample,
            radii: radii.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            checked: 0,
            skipped: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn violation(&mut self, witness: Vec<Word>, note: String) {
        self.violation_count += 1;
        if self.violations.len() < MAX_KEPT {
            self.violations.push(Finding { witness, note });
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            let words: Vec<String> = v.witness.iter().map(Word::to_string).collect();
            writeln!(f, "{}: violation [{}] {}", self.property, words.join("; "), v.note)?;
        }
        let radii: Vec<String> = self.radii.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        write!(
            f,
            "{}: {} ({}; {}) checked={} skipped={} violations={}",
            self.property,
            if self.passed() { "pass" } else { "FAIL" },
            self.sample,
            radii.join(" "),
            self.checked,
            self.skipped,
            self.violation_count
        )
    }
}

/// Malnormality of `<a>` within a ball: no `g` outside `<a>` conjugates a
/// nonzero power of `a` into `<a>`.
pub fn check_malnormality(
    level: &dyn Level,
    units: &[Unit],
    a: &Word,
    radius: usize,
    exp_radius: u64,
) -> Result<PropertyReport> {
    if level.is_trivial(a)? {
        return Err(GroupError::DegenerateBase);
    }
    let mut report = PropertyReport::new(
        "malnormality",
        format!("<{}> against conjugators of length <= {}", a, radius),
        vec![("radius", radius as u64), ("exponent", exp_radius)],
    );
    for g in ball(units, radius) {
        if level.solve_power(a, &g)?.is_some() {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        for n in (1..=exp_radius as i64).flat_map(|n| [n, -n]) {
            let conj = a.pow(n).conj(&g);
            if let Some(m) = level.solve_power(a, &conj)? {
                if m != 0 && level.are_equal(&a.pow(m), &conj)? {
                    report.violation(
                        vec![g.clone(), a.pow(n), a.pow(m)],
                        format!("({})^g = {}^{} with g outside <{}>", a.pow(n), a, m, a),
                    );
                    break;
                }
            }
        }
    }
    Ok(report)
}

pub fn check_malnormality_at(
    tower: &Tower,
    stage: u32,
    a: &Word,
    radius: usize,
    exp_radius: u64,
) -> Result<PropertyReport> {
    tower.check_letters(a, stage)?;
    let units = units_of(&default_letters(tower, stage));
    let mut r = check_malnormality(tower.level(stage)?.as_ref(), &units, a, radius, exp_radius)?;
    r.sample = format!("stage {} {}", stage, r.sample);
    Ok(r)
}

fn commute(level: &dyn Level, g: &Word, h: &Word) -> Result<bool> {
    level.are_equal(&g.mul(h), &h.mul(g))
}

/// Commutation transitivity within a ball: `[g,h] = [h,k] = 1` with
/// `h != 1` forces `[g,k] = 1`.
pub fn check_centralizers(level: &dyn Level, units: &[Unit], radius: usize) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "centralizers",
        format!("ball radius {}", radius),
        vec![("radius", radius as u64)],
    );
    let mut words = Vec::new();
    for w in ball(units, radius) {
        if level.is_trivial(&w)? {
            report.skipped += 1;
        } else {
            words.push(w);
        }
    }
    for h in &words {
        let mut cent = Vec::new();
        for g in &words {
            if commute(level, g, h)? {
                cent.push(g);
            }
        }
        for (i, g) in cent.iter().enumerate() {
            for k in &cent[i + 1..] {
                report.checked += 1;
                if !commute(level, g, k)? {
                    report.violation(
                        vec![(*g).clone(), h.clone(), (*k).clone()],
                        "g and k commute with h but not with each other".into(),
                    );
                }
            }
        }
    }
    Ok(report)
}

pub fn check_centralizers_at(tower: &Tower, stage: u32, radius: usize) -> Result<PropertyReport> {
    let units = units_of(&default_letters(tower, stage));
    let mut r = check_centralizers(tower.level(stage)?.as_ref(), &units, radius)?;
    r.sample = format!("stage {} {}", stage, r.sample);
    Ok(r)
}

/// `g^n != 1` for every nontrivial `g` of the ball and `2 <= n <= max_exp`.
pub fn check_torsion_free(level: &dyn Level, units: &[Unit], radius: usize, max_exp: u64) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "torsion-free",
        format!("ball radius {}", radius),
        vec![("radius", radius as u64), ("exponent", max_exp)],
    );
    for g in ball(units, radius) {
        if level.is_trivial(&g)? {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        for n in 2..=max_exp as i64 {
            if level.is_trivial(&g.pow(n))? {
                report.violation(vec![g.clone()], format!("g^{} = 1", n));
                break;
            }
        }
    }
    Ok(report)
}

pub fn check_torsion_free_at(tower: &Tower, stage: u32, radius: usize, max_exp: u64) -> Result<PropertyReport> {
    let units = units_of(&default_letters(tower, stage));
    let mut r = check_torsion_free(tower.level(stage)?.as_ref(), &units, radius, max_exp)?;
    r.sample = format!("stage {} {}", stage, r.sample);
    Ok(r)
}

/// Every sampled nontrivial element has an `n`-th root in the union of the
/// tower for each `n` in `ns`.
pub fn check_divisibility(tower: &Tower, sample: &SampleSpec, ns: &[u64]) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "divisibility",
        sample.describe(),
        vec![("n_max", ns.iter().copied().max().unwrap_or(0))],
    );
    let level = tower.level(sample.stage)?;
    for w in sample.words(tower) {
        if level.is_trivial(&w)? {
            report.skipped += 1;
            continue;
        }
        let e = tower.element(sample.stage, w.clone())?;
        for &n in ns {
            report.checked += 1;
            let h = tower.nth_root_union(&e, n)?;
            let power = Element {
                stage: h.stage,
                word: h.word.pow(n as i64),
            };
            if !tower.are_equal(&power, &e)? {
                report.violation(vec![w.clone(), h.word.clone()], format!("root^{} != element", n));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleProblem {
    /// Find `x` with `x^-1 g x = h`.
    Conjugator { g: Word, h: Word },
    /// Find `p` and the largest `n >= 2` with `p^n = g`.
    Root { g: Word },
    /// Find `n` with `a^n = g`, `|n| <= radius`.
    Power { a: Word, g: Word },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleWitness {
    Conjugator(Word),
    Root { root: Word, exponent: u64 },
    Power(i64),
}

/// Exhaustive search over the ball of the given radius. `None` means no
/// witness exists within the radius.
pub fn oracle_search(
    level: &dyn Level,
    problem: &OracleProblem,
    units: &[Unit],
    radius: usize,
) -> Result<Option<OracleWitness>> {
    match problem {
        OracleProblem::Conjugator { g, h } => {
            for x in ball(units, radius) {
                if level.are_equal(&g.conj(&x), h)? {
                    return Ok(Some(OracleWitness::Conjugator(x)));
                }
            }
            Ok(None)
        }
        OracleProblem::Root { g } => {
            if level.is_trivial(g)? {
                return Err(GroupError::TrivialRootData);
            }
            let mut best: Option<(Word, u64)> = None;
            for p in ball(units, radius) {
                if level.is_trivial(&p)? {
                    continue;
                }
                for n in 2..=(radius.max(g.len() as usize) as u64 + 1) {
                    if best.as_ref().is_some_and(|b| b.1 >= n) {
                        continue;
                    }
                    if level.are_equal(&p.pow(n as i64), g)? {
                        best = Some((p.clone(), n));
                    }
                }
            }
            Ok(best.map(|(root, exponent)| OracleWitness::Root { root, exponent }))
        }
        OracleProblem::Power { a, g } => {
            for n in std::iter::once(0).chain((1..=radius as i64).flat_map(|n| [n, -n])) {
                if level.are_equal(&a.pow(n), g)? {
                    return Ok(Some(OracleWitness::Power(n)));
                }
            }
            Ok(None)
        }
    }
}

/// HNN extension of `F_2` by `t` with `t^-1 x1 t = x1`: a group in which
/// `<x1>` is not malnormal, used to check that the checkers can fail.
pub fn negative_control() -> (HnnLevel, Vec<Unit>) {
    let t = Letter::Stable { stage: 2, index: 0 };
    let x1 = Word::base(0);
    let edges = FiniteEdges::new(vec![(
        t,
        Edge {
            src: x1.clone(),
            dst: x1,
        },
    )])
    .negative_control();
    let level = HnnLevel::new(Arc::new(FreeLevel::new(2)), Arc::new(edges), Bounds::default());
    let units = units_of(&[Letter::Base(0), Letter::Base(1), t]);
    (level, units)
}
