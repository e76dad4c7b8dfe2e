//! Free products and amalgamated free products of two factors over an
//! infinite cyclic subgroup.

use crate::error::{GroupError, Result};
use crate::word::Word;

use super::{
    conjugate_into_cyclic, derived_bound, divisors_desc, exponent_order, Bounds, Conjugacy, Level, LevelDescriptor,
    LevelRef, Root,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Identification `left_word = right_word` of the amalgamated cyclic subgroups.
#[derive(Clone, Debug)]
pub struct Amalgamation {
    pub left_word: Word,
    pub right_word: Word,
}

/// `left * right`, or `left *_C right` when an amalgamation is present.
#[derive(Debug)]
pub struct ProductLevel {
    left: LevelRef,
    right: LevelRef,
    amalgam: Option<Amalgamation>,
    bounds: Bounds,
}

type Parts = Vec<(Side, Word)>;

impl ProductLevel {
    pub fn free_product(left: LevelRef, right: LevelRef, bounds: Bounds) -> ProductLevel {
        ProductLevel {
            left,
            right,
            amalgam: None,
            bounds,
        }
    }

    pub fn amalgam(left: LevelRef, right: LevelRef, amalgamation: Amalgamation, bounds: Bounds) -> ProductLevel {
        ProductLevel {
            left,
            right,
            amalgam: Some(amalgamation),
            bounds,
        }
    }

    pub fn amalgamation(&self) -> Option<&Amalgamation> {
        self.amalgam.as_ref()
    }

    fn factor(&self, side: Side) -> &dyn Level {
        match side {
            Side::Left => self.left.as_ref(),
            Side::Right => self.right.as_ref(),
        }
    }

    fn subgroup_word(&self, side: Side) -> Option<&Word> {
        self.amalgam.as_ref().map(|a| match side {
            Side::Left => &a.left_word,
            Side::Right => &a.right_word,
        })
    }

    fn split(&self, w: &Word) -> Result<Parts> {
        let mut parts: Parts = Vec::new();
        for s in w.syllables() {
            let side = if self.left.owns(&s.letter) {
                Side::Left
            } else if self.right.owns(&s.letter) {
                Side::Right
            } else {
                return Err(GroupError::WrongLevel(s.letter));
            };
            match parts.last_mut() {
                Some((last, word)) if *last == side => {
                    *word = word.mul(&Word::from_syllables([*s]));
                }
                _ => parts.push((side, Word::from_syllables([*s]))),
            }
        }
        Ok(parts)
    }

    fn join(parts: &[(Side, Word)]) -> Word {
        Word::concat(parts.iter().map(|(_, w)| w))
    }

    /// Reduce each factor syllable, drop trivial ones and merge neighbours
    /// from the same factor until stable.
    fn normalize(&self, mut parts: Parts) -> Result<Parts> {
        loop {
            let mut changed = false;
            let mut out: Parts = Vec::with_capacity(parts.len());
            for (side, w) in parts {
                let reduced = self.factor(side).reduce(&w)?;
                if reduced != w {
                    changed = true;
                }
                if reduced.is_identity() {
                    continue;
                }
                if out.last().is_some_and(|(s, _)| *s == side) {
                    changed = true;
                }
                push_part(&mut out, side, reduced);
            }
            parts = out;
            if !changed {
                return Ok(parts);
            }
        }
    }

    fn reduce_parts(&self, w: &Word) -> Result<Parts> {
        let mut parts = self.normalize(self.split(w)?)?;
        let Some(am) = &self.amalgam else {
            return Ok(parts);
        };
        'outer: loop {
            if parts.len() == 1 && parts[0].0 == Side::Left {
                // a lone element of the amalgamated subgroup lives on the right
                if let Some(m) = self.left.solve_power(&am.left_word, &parts[0].1)? {
                    let w = self.right.reduce(&am.right_word.pow(m))?;
                    parts = vec![(Side::Right, w)];
                }
                return Ok(parts);
            }
            if parts.len() < 2 {
                return Ok(parts);
            }
            for i in 0..parts.len() {
                let (side, ref w) = parts[i];
                let gen = self.subgroup_word(side).unwrap();
                if let Some(m) = self.factor(side).solve_power(gen, w)? {
                    let other = side.other();
                    let image = self.subgroup_word(other).unwrap().pow(m);
                    parts[i] = (other, image);
                    let merged = merge_adjacent(std::mem::take(&mut parts));
                    parts = self.normalize(merged)?;
                    continue 'outer;
                }
            }
            return Ok(parts);
        }
    }

    /// Alternating reduced form: adjacent syllables come from different
    /// factors and, when there are at least two, none lies in the
    /// amalgamated subgroup.
    pub fn product_reduce(&self, w: &Word) -> Result<Word> {
        Ok(Self::join(&self.reduce_parts(w)?))
    }

    fn subgroup_power(&self, m: i64) -> Word {
        self.amalgam
            .as_ref()
            .map_or_else(Word::identity, |a| a.right_word.pow(m))
    }

    fn subgroup_len(&self) -> u64 {
        self.amalgam
            .as_ref()
            .map_or(1, |a| a.left_word.len().min(a.right_word.len()))
    }

    fn conjugate_cores(&self, g: &Word, h: &Word) -> Result<Conjugacy> {
        let pg = self.reduce_parts(g)?;
        let ph = self.reduce_parts(h)?;
        if pg.len() != ph.len() {
            return Ok(Conjugacy::NotConjugate);
        }
        match pg.len() {
            0 => Ok(Conjugacy::Conjugate(Word::identity())),
            1 => self.conjugate_single(&pg[0], &ph[0]),
            n => {
                let sides_h: Vec<Side> = ph.iter().map(|p| p.0).collect();
                let bound = derived_bound(g.len() + h.len(), self.subgroup_len());
                let cap = bound.min(self.bounds.max_exponent);
                for rot in 0..n {
                    let rotated: Vec<Side> = (0..n).map(|i| pg[(rot + i) % n].0).collect();
                    if rotated != sides_h {
                        continue;
                    }
                    let y0 = Self::join(&pg[..rot]);
                    let rot_word = g.conj(&y0);
                    let target = h.inverse();
                    let exps: Vec<i64> = if self.amalgam.is_some() {
                        exponent_order(cap).collect()
                    } else {
                        vec![0]
                    };
                    for m in exps {
                        let z = self.subgroup_power(m);
                        if self.is_trivial(&rot_word.conj(&z).mul(&target))? {
                            return Ok(Conjugacy::Conjugate(y0.mul(&z)));
                        }
                    }
                }
                if self.amalgam.is_some() && bound > self.bounds.max_exponent {
                    return Ok(Conjugacy::Undecided(format!(
                        "edge exponent bound {} exceeds configured {}",
                        bound, self.bounds.max_exponent
                    )));
                }
                Ok(Conjugacy::NotConjugate)
            }
        }
    }

    fn conjugate_single(&self, g: &(Side, Word), h: &(Side, Word)) -> Result<Conjugacy> {
        let mut undecided = None;
        if g.0 == h.0 {
            match self.factor(g.0).conjugate(&g.1, &h.1)? {
                Conjugacy::NotConjugate => {}
                Conjugacy::Undecided(why) => undecided = Some(why),
                found => return Ok(found),
            }
        }
        if let Some(am) = &self.amalgam {
            let into = |side: Side, w: &Word| -> Result<Option<(i64, Word)>> {
                let gen = match side {
                    Side::Left => &am.left_word,
                    Side::Right => &am.right_word,
                };
                conjugate_into_cyclic(self.factor(side), w, gen)
            };
            if let (Some((mg, xg)), Some((mh, xh))) = (into(g.0, &g.1)?, into(h.0, &h.1)?) {
                if mg == mh {
                    return Ok(Conjugacy::Conjugate(xg.mul(&xh.inverse())));
                }
                for side in [Side::Left, Side::Right] {
                    let gen = self.subgroup_word(side).unwrap();
                    if let Conjugacy::Conjugate(z) = self.factor(side).conjugate(&gen.pow(mg), &gen.pow(mh))? {
                        return Ok(Conjugacy::Conjugate(xg.mul(&z).mul(&xh.inverse())));
                    }
                }
            }
        }
        Ok(match undecided {
            Some(why) => Conjugacy::Undecided(why),
            None => Conjugacy::NotConjugate,
        })
    }

    /// Root data of an element of one factor, enlarged through the
    /// amalgamated subgroup when the element is conjugate into it.
    fn root_in_factor(&self, side: Side, w: &Word) -> Result<Root> {
        let mut side = side;
        let first = self.factor(side).extract_root(w)?;
        if self.amalgam.is_none() {
            return Ok(first);
        }
        let (mut local, mut n) = match first {
            Root::Power { root, exponent } => (root, exponent),
            divisible => return Ok(divisible),
        };
        // root = outer local outer^-1 with `local` inside the current factor
        let mut outer = Word::identity();
        // each pass crosses the amalgamated subgroup once
        for _ in 0..4 {
            let gen = self.subgroup_word(side).unwrap();
            let Some((m, x)) = conjugate_into_cyclic(self.factor(side), &local, gen)? else {
                break;
            };
            let other = side.other();
            let image = self.subgroup_word(other).unwrap().pow(m);
            match self.factor(other).extract_root(&image)? {
                Root::Power { root: q, exponent } if exponent > 1 => {
                    outer = outer.mul(&x);
                    local = q;
                    n *= exponent;
                    side = other;
                }
                Root::Divisible {
                    conjugator,
                    stage,
                    value,
                } => {
                    return Ok(Root::Divisible {
                        conjugator: outer.mul(&x).mul(&conjugator),
                        stage,
                        value: value * crate::word::Rational::from_integer(n as i64),
                    })
                }
                _ => break,
            }
        }
        Ok(Root::Power {
            root: outer.mul(&local).mul(&outer.inverse()),
            exponent: n,
        })
    }
}

fn push_part(out: &mut Parts, side: Side, w: Word) {
    match out.last_mut() {
        Some((last, word)) if *last == side => *word = word.mul(&w),
        _ => out.push((side, w)),
    }
}

fn merge_adjacent(parts: Parts) -> Parts {
    let mut out = Vec::with_capacity(parts.len());
    for (side, w) in parts {
        push_part(&mut out, side, w);
    }
    out
}

impl Level for ProductLevel {
    fn owns(&self, letter: &crate::word::Letter) -> bool {
        self.left.owns(letter) || self.right.owns(letter)
    }

    fn reduce(&self, w: &Word) -> Result<Word> {
        self.product_reduce(w)
    }

    fn solve_power(&self, a: &Word, g: &Word) -> Result<Option<i64>> {
        let (core, c) = self.cyclic_reduce(a)?;
        if core.is_identity() {
            return Err(GroupError::DegenerateBase);
        }
        let target = self.reduce_parts(&g.conj(&c))?;
        if target.is_empty() {
            return Ok(Some(0));
        }
        let pa = self.reduce_parts(&core)?;
        if pa.len() >= 2 {
            if target.len() % pa.len() != 0 {
                return Ok(None);
            }
            let n = (target.len() / pa.len()) as i64;
            let t = Self::join(&target);
            for cand in [n, -n] {
                if self.are_equal(&core.pow(cand), &t)? {
                    return Ok(Some(cand));
                }
            }
            return Ok(None);
        }
        if target.len() > 1 {
            return Ok(None);
        }
        let (side_a, ref wa) = pa[0];
        let (side_g, ref wg) = target[0];
        if side_a == side_g {
            return self.factor(side_a).solve_power(wa, wg);
        }
        let (Some(gen_g), Some(gen_a)) = (self.subgroup_word(side_g), self.subgroup_word(side_a)) else {
            return Ok(None);
        };
        match self.factor(side_g).solve_power(gen_g, wg)? {
            Some(m) => self.factor(side_a).solve_power(wa, &gen_a.pow(m)),
            None => Ok(None),
        }
    }

    fn cyclic_reduce(&self, w: &Word) -> Result<(Word, Word)> {
        let mut core = self.reduce(w)?;
        let mut conj = Word::identity();
        loop {
            let parts = self.reduce_parts(&core)?;
            if parts.len() >= 2 && parts[0].0 == parts[parts.len() - 1].0 {
                let last = parts[parts.len() - 1].1.clone();
                core = self.reduce(&last.mul(&core).mul(&last.inverse()))?;
                conj = conj.mul(&last.inverse());
                continue;
            }
            if parts.len() == 1 {
                let (k, c) = self.factor(parts[0].0).cyclic_reduce(&parts[0].1)?;
                return Ok((k, conj.mul(&c)));
            }
            return Ok((core, conj));
        }
    }

    fn conjugate(&self, g: &Word, h: &Word) -> Result<Conjugacy> {
        let (gc, cg) = self.cyclic_reduce(g)?;
        let (hc, ch) = self.cyclic_reduce(h)?;
        Ok(match self.conjugate_cores(&gc, &hc)? {
            Conjugacy::Conjugate(y) => Conjugacy::Conjugate(cg.mul(&y).mul(&ch.inverse())),
            other => other,
        })
    }

    fn extract_root(&self, g: &Word) -> Result<Root> {
        let (core, c) = self.cyclic_reduce(g)?;
        if core.is_identity() {
            return Err(GroupError::TrivialRootData);
        }
        let parts = self.reduce_parts(&core)?;
        if parts.len() == 1 {
            return Ok(self.root_in_factor(parts[0].0, &parts[0].1)?.conjugated(&c));
        }
        let len = parts.len();
        let bound = derived_bound(core.len(), self.subgroup_len());
        let cap = bound.min(self.bounds.max_exponent);
        for n in divisors_desc(len) {
            let period = len / n;
            if period % 2 != 0 {
                continue;
            }
            if (0..len).any(|i| parts[i].0 != parts[i % period].0) {
                continue;
            }
            let prefix = Self::join(&parts[..period]);
            let exps: Vec<i64> = if self.amalgam.is_some() {
                exponent_order(cap).collect()
            } else {
                vec![0]
            };
            for m in exps {
                let candidate = prefix.mul(&self.subgroup_power(m));
                if self.are_equal(&candidate.pow(n as i64), &core)? {
                    let root = self.reduce(&candidate)?;
                    return Ok(Root::Power {
                        root,
                        exponent: n as u64,
                    }
                    .conjugated(&c));
                }
            }
            if self.amalgam.is_some() && bound > self.bounds.max_exponent {
                return Err(GroupError::undecided(format!(
                    "root search for {} needs edge exponents beyond {}",
                    g, self.bounds.max_exponent
                )));
            }
        }
        Ok(Root::Power {
            root: self.reduce(g)?,
            exponent: 1,
        })
    }

    fn descriptor(&self) -> LevelDescriptor {
        let left = Box::new(self.left.descriptor());
        let right = Box::new(self.right.descriptor());
        match &self.amalgam {
            None => LevelDescriptor::FreeProduct { left, right },
            Some(a) => LevelDescriptor::Amalgam {
                left,
                right,
                left_word: a.left_word.clone(),
                right_word: a.right_word.clone(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::levels::{CyclicLevel, FreeLevel, RationalLevel};
    use crate::word::Letter;

    fn x(i: u32) -> Word {
        Word::base(i - 1)
    }

    fn r() -> Word {
        Word::letter(Letter::Root(2))
    }

    fn q(n: i64, d: i64) -> Word {
        Word::letter(Letter::rational(1, n, d))
    }

    /// `<r2> *_{r2^2 = x1} F2`
    fn root_amalgam() -> ProductLevel {
        ProductLevel::amalgam(
            Arc::new(CyclicLevel::new(Letter::Root(2))),
            Arc::new(FreeLevel::new(2)),
            Amalgamation {
                left_word: r().pow(2),
                right_word: x(1),
            },
            Bounds::default(),
        )
    }

    fn q_star_f() -> ProductLevel {
        ProductLevel::free_product(
            Arc::new(RationalLevel::new(1)),
            Arc::new(FreeLevel::new(2)),
            Bounds::default(),
        )
    }

    #[test]
    fn amalgam_reduce_examples() {
        let level = root_amalgam();
        assert_eq!(level.reduce(&r().pow(2)).unwrap(), x(1));
        assert_eq!(level.reduce(&r().mul(&x(1))).unwrap(), r().pow(3));
        assert_eq!(level.reduce(&r()).unwrap(), r());
        assert!(level.is_trivial(&r().pow(2).mul(&x(1).inverse())).unwrap());
        assert!(!level
            .is_trivial(&r().mul(&x(2)).mul(&r().inverse()).mul(&x(2).inverse()))
            .unwrap());
    }

    #[test]
    fn free_product_reduce_examples() {
        let level = q_star_f();
        assert_eq!(level.reduce(&q(1, 2).mul(&q(1, 2))).unwrap(), q(1, 1));
        let w = q(1, 2).mul(&x(1)).mul(&q(-1, 2));
        assert_eq!(level.reduce(&w).unwrap(), w);
        assert!(level.is_trivial(&q(1, 3).mul(&q(-1, 3))).unwrap());
    }

    #[test]
    fn amalgam_roots_and_powers() {
        let level = root_amalgam();
        assert_eq!(
            level.extract_root(&x(1)).unwrap(),
            Root::Power { root: r(), exponent: 2 }
        );
        assert_eq!(
            level.extract_root(&r()).unwrap(),
            Root::Power { root: r(), exponent: 1 }
        );
        let w = r().mul(&x(2));
        assert_eq!(
            level.extract_root(&w.pow(3)).unwrap(),
            Root::Power {
                root: w.clone(),
                exponent: 3
            }
        );
        assert_eq!(level.solve_power(&r(), &x(1).pow(3)).unwrap(), Some(6));
        assert_eq!(level.solve_power(&w, &w.pow(-2)).unwrap(), Some(-2));
        assert_eq!(level.solve_power(&x(1), &r()).unwrap(), None);
    }

    #[test]
    fn amalgam_conjugacy() {
        let level = root_amalgam();
        let g = r().mul(&x(2));
        let h = x(2).mul(&r());
        let x_ = level.conjugate(&g, &h).unwrap();
        let c = x_.conjugator().unwrap();
        assert!(level.are_equal(&g.conj(c), &h).unwrap());
        // conjugation by an element of the amalgamated subgroup
        let h2 = g.conj(&x(1).pow(2));
        let c2 = level.conjugate(&g, &h2).unwrap();
        assert!(level.are_equal(&g.conj(c2.conjugator().unwrap()), &h2).unwrap());
        assert_eq!(level.conjugate(&r(), &r().inverse()).unwrap(), Conjugacy::NotConjugate);
        assert_eq!(level.conjugate(&r(), &x(2)).unwrap(), Conjugacy::NotConjugate);
    }
}
