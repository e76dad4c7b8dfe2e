use csa_tower::tower::{build_tower, Element, GroupOp, KSchedule, Tower, TowerSpec, Variant};
use csa_tower::{GroupError, Letter, Rational, Word};

fn x(i: u32) -> Word {
    Word::base(i - 1)
}

fn t(s: u32, i: u32) -> Word {
    Word::letter(Letter::Stable { stage: s, index: i })
}

fn r(s: u32) -> Word {
    Word::letter(Letter::Root(s))
}

fn q(p: i64, d: i64) -> Word {
    Word::letter(Letter::rational(1, p, d))
}

fn el(stage: u32, word: Word) -> Element {
    Element { stage, word }
}

fn cyclic() -> Tower {
    build_tower(TowerSpec::default()).unwrap()
}

fn rational() -> Tower {
    build_tower(TowerSpec::new(Variant::RationalRoot, 2)).unwrap()
}

#[test]
fn spec_validation() {
    assert!(matches!(
        build_tower(TowerSpec::new(Variant::CyclicRoot, 1)),
        Err(GroupError::InvalidSpec(_))
    ));
    let mut spec = TowerSpec::default();
    spec.k_schedule = KSchedule::Constant(1);
    assert!(build_tower(spec).is_err());
}

#[test]
fn stage_one_alphabets() {
    let letters: Vec<String> = cyclic()
        .stage_letters(1)
        .unwrap()
        .iter()
        .map(|l| l.letter.to_string())
        .collect();
    assert_eq!(letters, ["x1", "x2"]);
    let letters: Vec<String> = rational()
        .stage_letters(1)
        .unwrap()
        .iter()
        .map(|l| l.letter.to_string())
        .collect();
    assert_eq!(letters, ["x1", "x2", "q1(1)"]);
}

#[test]
fn first_reps() {
    let tower = cyclic();
    let reps: Vec<Word> = tower.class_reps(1, 4).unwrap().into_iter().map(|c| c.word).collect();
    assert_eq!(reps, [x(1), x(2), x(1).mul(&x(2)), x(1).mul(&x(2).inverse())]);
    assert_eq!(tower.a0(1).unwrap(), x(1));
}

#[test]
fn stage_two_reps() {
    let tower = cyclic();
    let reps: Vec<Word> = tower.class_reps(2, 3).unwrap().into_iter().map(|c| c.word).collect();
    assert_eq!(reps, [t(2, 0), r(2), t(2, 1)]);
}

#[test]
fn conjugators() {
    let tower = cyclic();
    assert_eq!(tower.conjugator_to(1, 0).unwrap(), Word::identity());
    assert_eq!(tower.conjugator_to(1, 1).unwrap(), t(2, 0));
    assert_eq!(tower.conjugator_to(1, 2).unwrap(), t(2, 0).mul(&t(2, 1)));
    let l2 = tower.level(2).unwrap();
    let w = t(2, 0).mul(&t(2, 1));
    assert!(l2.are_equal(&x(1).conj(&w), &x(1).mul(&x(2))).unwrap());
}

#[test]
fn promotion() {
    let tower = cyclic();
    let e = el(1, x(1));
    let p = tower.promote(&e, 3).unwrap();
    assert_eq!(p, el(3, x(1)));
    assert!(tower.are_equal(&e, &p).unwrap());
    assert!(matches!(
        tower.promote(&p, 2),
        Err(GroupError::Demotion { from: 3, to: 2 })
    ));
}

#[test]
fn kth_roots() {
    let tower = cyclic();
    assert_eq!(tower.kth_root(&el(1, x(1))).unwrap(), el(2, r(2)));
    assert_eq!(tower.kth_root(&el(1, x(2))).unwrap(), el(2, r(2).conj(&t(2, 0))));
    assert_eq!(tower.kth_root(&el(1, x(1).pow(3))).unwrap(), el(2, r(2).pow(3)));
    assert!(matches!(
        tower.kth_root(&el(1, Word::identity())),
        Err(GroupError::TrivialRootData)
    ));
}

#[test]
fn union_roots() {
    let tower = cyclic();
    assert_eq!(tower.nth_root_union(&el(1, x(1)), 2).unwrap(), el(2, r(2)));
    let h = tower.nth_root_union(&el(1, x(1)), 3).unwrap();
    assert_eq!(h.stage, 3);
    let h = tower.nth_root_union(&el(1, x(1)), 4).unwrap();
    assert_eq!(h.stage, 4);
    assert!(tower.are_equal(&el(4, h.word.pow(4)), &el(1, x(1))).unwrap());
}

#[test]
fn group_ops() {
    let tower = cyclic();
    let p = tower.group_op(GroupOp::Mul, &[el(1, x(1)), el(2, r(2))]).unwrap();
    assert_eq!(p, el(2, r(2).pow(3)));
    let i = tower.group_op(GroupOp::Inv, &[el(1, x(1).mul(&x(2)))]).unwrap();
    assert_eq!(i, el(1, x(2).inverse().mul(&x(1).inverse())));
    let z = tower.group_op(GroupOp::Pow(0), &[el(1, x(1))]).unwrap();
    assert_eq!(z.word, Word::identity());
}

#[test]
fn lazy_letters() {
    let tower = cyclic();
    tower.class_reps(1, 3).unwrap();
    let letters: Vec<String> = tower
        .stage_letters(2)
        .unwrap()
        .iter()
        .map(|l| l.letter.to_string())
        .collect();
    assert_eq!(letters, ["x1", "x2", "t2_0", "t2_1", "r2"]);
    let info = tower.stage_letters(2).unwrap();
    assert_eq!(info.last().unwrap().to_string(), "r2: r2^2 = x1");
}

#[test]
fn rational_tower() {
    let tower = rational();
    let l1 = tower.level(1).unwrap();
    assert!(l1.are_equal(&q(1, 2).mul(&q(1, 2)), &q(1, 1)).unwrap());
    let reps = tower.class_reps(1, 3).unwrap();
    assert_eq!(reps[0].word, q(1, 1));
    assert_eq!(reps[1].word, x(1));
    assert_eq!(reps[2].word, x(2));
    for n in 2..=4 {
        let h = tower.nth_root_union(&el(1, x(1)), n).unwrap();
        assert_eq!(h.stage, 2);
        let expect = q(1, n as i64).conj(&t(2, 0));
        assert_eq!(h.word, expect);
    }
    let h = tower.nth_root_union(&el(1, q(3, 1)), 2).unwrap();
    assert_eq!(
        h.word,
        Word::letter(Letter::Rational {
            stage: 1,
            value: Rational::new(3, 2)
        })
    );
}
