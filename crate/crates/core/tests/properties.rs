use proptest::prelude::*;

use csa_tower::freewords::{conjugate_free, cyclically_reduce, primitive_root_free, solve_power_free};
use csa_tower::levels::{Conjugacy, Root};
use csa_tower::text::{format_word, parse_word};
use csa_tower::tower::{Tower, TowerSpec, Variant};
use csa_tower::{Letter, Syllable, Word};

fn free_word(rank: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, prop::bool::ANY), 0..=max_len).prop_map(|v| {
        Word::from_syllables(
            v.into_iter()
                .map(|(i, inv)| Syllable::new(Letter::Base(i), if inv { -1 } else { 1 })),
        )
    })
}

/// Words over `x1, x2, t2_0, t2_1, r2`.
fn stage2_word(max_len: usize) -> impl Strategy<Value = Word> {
    let letters = [
        Letter::Base(0),
        Letter::Base(1),
        Letter::Stable { stage: 2, index: 0 },
        Letter::Stable { stage: 2, index: 1 },
        Letter::Root(2),
    ];
    prop::collection::vec((0..letters.len(), -2i64..=2), 0..=max_len).prop_map(move |v| {
        Word::from_syllables(
            v.into_iter()
                .filter(|(_, e)| *e != 0)
                .map(|(i, e)| Syllable::new(letters[i], e)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cyclic_reduction_round_trip(w in free_word(3, 12)) {
        let (core, c) = cyclically_reduce(&w);
        prop_assert_eq!(c.mul(&core).mul(&c.inverse()), w);
        prop_assert_eq!(cyclically_reduce(&core).1, Word::identity());
    }

    #[test]
    fn primitive_roots(w in free_word(2, 5), n in 1i64..5) {
        prop_assume!(!w.is_identity());
        let (p, k) = primitive_root_free(&w).unwrap();
        prop_assert_eq!(p.pow(k as i64), w.clone());
        prop_assert_eq!(primitive_root_free(&p).unwrap().1, 1);
        let (q, m) = primitive_root_free(&w.pow(n)).unwrap();
        prop_assert_eq!(m, k * n as u64);
        prop_assert!(q == p);
    }

    #[test]
    fn conjugates_are_found(g in free_word(2, 8), x in free_word(2, 6)) {
        let h = g.conj(&x);
        let c = conjugate_free(&g, &h).expect("conjugate");
        prop_assert_eq!(g.conj(&c), h);
    }

    #[test]
    fn powers_are_found(a in free_word(2, 6), n in -6i64..=6) {
        prop_assume!(!a.is_identity());
        prop_assert_eq!(solve_power_free(&a, &a.pow(n)).unwrap(), Some(n));
        let off = a.pow(n).mul(&Word::base(0));
        if let Some(m) = solve_power_free(&a, &off).unwrap() {
            prop_assert_eq!(a.pow(m), off);
        }
    }

    #[test]
    fn parse_format_round_trip(w in stage2_word(10)) {
        prop_assert_eq!(parse_word(&format_word(&w)).unwrap(), w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stage2_word_problem(g in stage2_word(6), x in stage2_word(4)) {
        let t = Tower::new(TowerSpec::default()).unwrap();
        let level = t.level(2).unwrap();
        prop_assert!(level.is_trivial(&g.mul(&g.inverse())).unwrap());
        let nf = level.reduce(&g).unwrap();
        prop_assert!(level.are_equal(&nf, &g).unwrap());
        prop_assert_eq!(level.reduce(&nf).unwrap(), nf.clone());
        let h = g.conj(&x);
        match level.conjugate(&g, &h).unwrap() {
            Conjugacy::Conjugate(c) => prop_assert!(level.are_equal(&g.conj(&c), &h).unwrap()),
            Conjugacy::Undecided(_) => {}
            Conjugacy::NotConjugate => prop_assert!(false, "{} and {} reported non-conjugate", g, h),
        }
    }

    #[test]
    fn stage2_roots(g in stage2_word(5)) {
        let t = Tower::new(TowerSpec::default()).unwrap();
        let level = t.level(2).unwrap();
        prop_assume!(!level.is_trivial(&g).unwrap());
        if let Root::Power { root, exponent } = level.extract_root(&g).unwrap() {
            prop_assert!(level.are_equal(&root.pow(exponent as i64), &g).unwrap());
        }
    }

    #[test]
    fn union_roots_verify(g in free_word(2, 4), n in 2u64..=4, rational in prop::bool::ANY) {
        prop_assume!(!g.is_identity());
        let variant = if rational { Variant::RationalRoot } else { Variant::CyclicRoot };
        let t = Tower::new(TowerSpec::new(variant, 2)).unwrap();
        let e = t.element(1, g).unwrap();
        let h = t.nth_root_union(&e, n).unwrap();
        let level = t.level(h.stage).unwrap();
        prop_assert!(level.are_equal(&h.word.pow(n as i64), &e.word).unwrap());
    }
}
