//! Word algebra in finite-rank free groups.
//!
//! These are the recursion base of every decision procedure in the crate:
//! free reduction, cyclic reduction, shortlex order, primitive roots,
//! conjugacy, power membership and shortlex enumeration.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use crate::error::{GroupError, Result};
use crate::word::{Letter, Syllable, Unit, Word};

fn check_base<'a, I: IntoIterator<Item = &'a Letter>>(letters: I) -> Result<()> {
    for l in letters {
        if !l.is_base() {
            return Err(GroupError::WrongLevel(*l));
        }
    }
    Ok(())
}

/// Freely reduce a raw syllable sequence over base letters.
pub fn reduce(raw: &[Syllable]) -> Result<Word> {
    check_base(raw.iter().map(|s| &s.letter))?;
    Ok(Word::from_syllables(raw.iter().copied()))
}

/// Split `w` as `conjugator * core * conjugator^-1` with `core` cyclically
/// reduced.
pub fn cyclically_reduce(w: &Word) -> (Word, Word) {
    let units: Vec<Unit> = w.units().collect();
    let (mut lo, mut hi) = (0usize, units.len());
    while hi - lo >= 2 && units[hi - 1] == units[lo].inverted() {
        lo += 1;
        hi -= 1;
    }
    let core = Word::from_units(units[lo..hi].iter().copied());
    let conj = Word::from_units(units[..lo].iter().copied());
    (core, conj)
}

pub fn is_cyclically_reduced(w: &Word) -> bool {
    cyclically_reduce(w).1.is_identity()
}

pub fn shortlex_compare(w1: &Word, w2: &Word) -> Ordering {
    w1.shortlex_cmp(w2)
}

/// Smallest period of a unit sequence that divides its length.
fn smallest_period(units: &[Unit]) -> usize {
    let n = units.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (d..n).all(|i| units[i] == units[i - d]))
        .unwrap_or(n)
}

/// Write `w = p^n` with `p` not a proper power and `n >= 1` maximal.
pub fn primitive_root_free(w: &Word) -> Result<(Word, u64)> {
    check_base(w.letters())?;
    if w.is_identity() {
        return Err(GroupError::TrivialRootData);
    }
    let (core, conj) = cyclically_reduce(w);
    let units: Vec<Unit> = core.units().collect();
    let d = smallest_period(&units);
    let p = Word::from_units(units[..d].iter().copied());
    Ok((conj.mul(&p).mul(&conj.inverse()), (units.len() / d) as u64))
}

/// Returns `g` with `g^-1 w1 g = w2` when the words are conjugate.
pub fn conjugate_free(w1: &Word, w2: &Word) -> Option<Word> {
    let (k1, c1) = cyclically_reduce(w1);
    let (k2, c2) = cyclically_reduce(w2);
    if k1.len() != k2.len() {
        return None;
    }
    let u1: Vec<Unit> = k1.units().collect();
    let u2: Vec<Unit> = k2.units().collect();
    let n = u1.len();
    let mut best: Option<Word> = None;
    for j in 0..n.max(1) {
        let rotated = u1[j..].iter().chain(u1[..j].iter());
        if !rotated.eq(u2.iter()) {
            continue;
        }
        // k2 = A^-1 k1 A with A the prefix of length j, or equivalently A k1^-1.
        let prefix = Word::from_units(u1[..j].iter().copied());
        let alt = prefix.mul(&k1.inverse());
        let a = if alt.len() < prefix.len() { alt } else { prefix };
        let g = c1.mul(&a).mul(&c2.inverse());
        if best.as_ref().is_none_or(|b| g.shortlex_cmp(b) == Ordering::Less) {
            best = Some(g);
        }
    }
    let g = best?;
    debug_assert_eq!(w1.conj(&g), *w2);
    Some(g)
}

/// The unique `n` with `a^n = g`, if any.
pub fn solve_power_free(a: &Word, g: &Word) -> Result<Option<i64>> {
    check_base(a.letters().chain(g.letters()))?;
    if a.is_identity() {
        return Err(GroupError::DegenerateBase);
    }
    let (core, c) = cyclically_reduce(a);
    let target = g.conj(&c);
    let len = core.len();
    if !target.len().is_multiple_of(len) {
        return Ok(None);
    }
    let n = (target.len() / len) as i64;
    for cand in [n, -n] {
        if core.pow(cand) == target {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// Unit alphabet `x1, x1^-1, x2, x2^-1, ...` of a free group of rank `rank`.
pub fn base_alphabet(rank: u32) -> Vec<Unit> {
    (0..rank)
        .flat_map(|i| [Unit::new(Letter::Base(i), false), Unit::new(Letter::Base(i), true)])
        .collect()
}

fn adjacent_ok(a: &Unit, b: &Unit) -> bool {
    if a.letter.is_rational() && b.letter.is_rational() {
        return !a.letter.same_generator(&b.letter);
    }
    *b != a.inverted()
}

/// Visit every reduced unit sequence of exactly `len` letters over the sorted
/// `alphabet`, in lexicographic order.
pub fn for_each_reduced<F>(alphabet: &[Unit], len: usize, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[Unit]) -> ControlFlow<()>,
{
    let mut buf = Vec::with_capacity(len);
    fn go<F: FnMut(&[Unit]) -> ControlFlow<()>>(
        alphabet: &[Unit],
        len: usize,
        buf: &mut Vec<Unit>,
        f: &mut F,
    ) -> ControlFlow<()> {
        if buf.len() == len {
            return f(buf);
        }
        for u in alphabet {
            if let Some(last) = buf.last() {
                if !adjacent_ok(last, u) {
                    continue;
                }
            }
            buf.push(*u);
            go(alphabet, len, buf, f)?;
            buf.pop();
        }
        ControlFlow::Continue(())
    }
    go(alphabet, len, &mut buf, &mut f)
}

/// All reduced words of length at most `max_len` in strict shortlex order,
/// starting with the identity.
pub fn enumerate_words(rank: u32, max_len: usize) -> impl Iterator<Item = Word> {
    let alphabet = base_alphabet(rank);
    (0..=max_len).flat_map(move |len| {
        let mut out = Vec::new();
        let _ = for_each_reduced(&alphabet, len, |units| {
            out.push(Word::from_units(units.iter().copied()));
            ControlFlow::Continue(())
        });
        out
    })
}

/// Shortlex-least representative of the conjugacy class of `w` together with
/// the class of `w^-1`; a complete invariant for "conjugate or
/// inverse-conjugate" in a free group.
pub fn cyclic_class_key(w: &Word) -> Word {
    let (core, _) = cyclically_reduce(w);
    let mut best = core.clone();
    for k in [core.clone(), core.inverse()] {
        let units: Vec<Unit> = k.units().collect();
        for j in 0..units.len() {
            let rot = Word::from_units(units[j..].iter().chain(units[..j].iter()).copied());
            if rot.shortlex_cmp(&best) == Ordering::Less {
                best = rot;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32, e: i64) -> Syllable {
        Syllable::new(Letter::Base(i - 1), e)
    }

    fn w(s: &[(u32, i64)]) -> Word {
        Word::from_syllables(s.iter().map(|&(i, e)| x(i, e)))
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&[x(1, 1), x(2, 1), x(2, -1), x(1, 1)]).unwrap(), w(&[(1, 2)]));
        assert!(reduce(&[x(1, 1), x(1, -1)]).unwrap().is_identity());
        let fixed = w(&[(1, 1), (2, 1), (1, -1)]);
        assert_eq!(reduce(fixed.syllables()).unwrap(), fixed);
        let t = Syllable::new(Letter::Stable { stage: 2, index: 0 }, 1);
        assert!(matches!(reduce(&[t]), Err(GroupError::WrongLevel(_))));
    }

    #[test]
    fn cyclic_reduction_examples() {
        assert_eq!(
            cyclically_reduce(&w(&[(1, 1), (2, 1), (1, -1)])),
            (w(&[(2, 1)]), w(&[(1, 1)]))
        );
        assert_eq!(cyclically_reduce(&w(&[(2, 1)])), (w(&[(2, 1)]), Word::identity()));
        assert_eq!(
            cyclically_reduce(&w(&[(1, 1), (2, 2), (1, -1)])),
            (w(&[(2, 2)]), w(&[(1, 1)]))
        );
    }

    #[test]
    fn shortlex_examples() {
        assert_eq!(shortlex_compare(&w(&[(1, 1)]), &w(&[(2, 1)])), Ordering::Less);
        assert_eq!(shortlex_compare(&w(&[(2, 1)]), &w(&[(1, 2)])), Ordering::Less);
        let a = w(&[(1, 1), (2, -1)]);
        assert_eq!(shortlex_compare(&a, &a), Ordering::Equal);
    }

    #[test]
    fn roots() {
        let p = w(&[(1, 1), (2, 1)]);
        assert_eq!(primitive_root_free(&p.pow(3)).unwrap(), (p, 3));
        assert_eq!(primitive_root_free(&w(&[(1, 1)])).unwrap(), (w(&[(1, 1)]), 1));
        let comm = w(&[(1, 1), (2, 1), (1, -1), (2, -1)]);
        assert_eq!(primitive_root_free(&comm).unwrap(), (comm.clone(), 1));
        assert_eq!(primitive_root_free(&Word::identity()), Err(GroupError::TrivialRootData));
    }

    #[test]
    fn conjugacy_examples() {
        let g = conjugate_free(&w(&[(1, 1), (2, 1)]), &w(&[(2, 1), (1, 1)])).unwrap();
        assert_eq!(w(&[(1, 1), (2, 1)]).conj(&g), w(&[(2, 1), (1, 1)]));
        assert_eq!(conjugate_free(&w(&[(1, 1)]), &w(&[(2, 1)])), None);
        assert_eq!(
            conjugate_free(&w(&[(1, 1)]), &w(&[(2, -1), (1, 1), (2, 1)])),
            Some(w(&[(2, 1)]))
        );
    }

    #[test]
    fn power_examples() {
        assert_eq!(solve_power_free(&w(&[(2, 1)]), &w(&[(2, 5)])).unwrap(), Some(5));
        let a = w(&[(1, 1), (2, 1)]);
        assert_eq!(solve_power_free(&a, &a.pow(2)).unwrap(), Some(2));
        assert_eq!(solve_power_free(&w(&[(1, 1)]), &w(&[(2, 1)])).unwrap(), None);
        assert_eq!(solve_power_free(&Word::identity(), &a), Err(GroupError::DegenerateBase));
        assert_eq!(solve_power_free(&a, &Word::identity()).unwrap(), Some(0));
    }

    #[test]
    fn enumeration_examples() {
        let words: Vec<String> = enumerate_words(2, 1).map(|w| w.to_string()).collect();
        assert_eq!(words, ["e", "x1", "x1^-1", "x2", "x2^-1"]);
        let words: Vec<String> = enumerate_words(1, 2).map(|w| w.to_string()).collect();
        assert_eq!(words, ["e", "x1", "x1^-1", "x1^2", "x1^-2"]);
        assert_eq!(enumerate_words(2, 2).count(), 17);
    }

    #[test]
    fn class_key_identifies_inverse_and_rotation() {
        let a = w(&[(1, 1), (2, -1)]);
        let b = w(&[(2, 1), (1, -1)]);
        assert_eq!(cyclic_class_key(&a), cyclic_class_key(&b));
        assert_eq!(cyclic_class_key(&w(&[(2, 1), (1, 1)])), w(&[(1, 1), (2, 1)]));
    }
}
