//! HNN extensions with infinite cyclic associated subgroups.
//!
//! Several stable letters over one base group are handled at once; a chain
//! `G_{i+1} = <G_i, t_i | t_i^-1 a_i t_i = a_{i+1}>` over a fixed base is the
//! same group as the single extension of the base by all `t_i` together.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{GroupError, Result};
use crate::word::{Letter, Rational, Word};

use super::{
    conjugate_into_cyclic, derived_bound, divisors_desc, exponent_order, Bounds, Conjugacy, Level, LevelDescriptor,
    LevelRef, Root,
};

/// Defining relation `t^-1 src t = dst` of one stable letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: Word,
    pub dst: Word,
}

/// Position of a base element in the graph of edge subgroups:
/// `conjugator^-1 g conjugator = canonical^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub key: usize,
    pub exponent: Rational,
    pub conjugator: Word,
    /// The class is made of conjugates of a rational vertex; its elements
    /// have roots of every order.
    pub divisible: Option<u32>,
}

/// Supplies the stable letters of an HNN level. Tower stages materialize
/// their edges lazily from the class enumeration of the stage below.
pub trait EdgeSource: Send + Sync + fmt::Debug {
    fn owns_stable(&self, letter: &Letter) -> bool;

    fn edge(&self, letter: &Letter) -> Result<Edge>;

    /// Where a base element sits among the edge subgroups, if it is conjugate
    /// into any of them.
    fn edge_class(&self, base: &dyn Level, g: &Word) -> Result<Option<EdgeClass>>;

    /// For a base-primitive `p`: a larger root in the extension, if the edge
    /// graph connects `p` to a proper power or a divisible element.
    fn boosted_root(&self, base: &dyn Level, p: &Word) -> Result<Option<Root>>;

    /// Materialized edges, for introspection.
    fn materialized(&self) -> Vec<(Letter, Edge)>;

    fn is_lazy(&self) -> bool {
        false
    }

    fn is_negative_control(&self) -> bool {
        false
    }
}

/// A finite list of stable letters.
#[derive(Clone, Debug)]
pub struct FiniteEdges {
    edges: Vec<(Letter, Edge)>,
    negative_control: bool,
    max_component: usize,
}

impl FiniteEdges {
    pub fn new(edges: Vec<(Letter, Edge)>) -> FiniteEdges {
        FiniteEdges {
            edges,
            negative_control: false,
            max_component: Bounds::default().max_component,
        }
    }

    /// Mark the level as a deliberate counterexample (for instance
    /// `src = dst`), which breaks cyclicity of maximal abelian subgroups.
    pub fn negative_control(mut self) -> FiniteEdges {
        self.negative_control = true;
        self
    }

    fn endpoints(&self) -> Vec<Word> {
        self.edges
            .iter()
            .flat_map(|(_, e)| [e.src.clone(), e.dst.clone()])
            .collect()
    }

    /// Breadth-first search through edge subgroups starting from `g`.
    /// Nodes are `(endpoint, exponent)` meaning `endpoint^exponent`.
    fn component(&self, base: &dyn Level, g: &Word) -> Result<Vec<((usize, i64), Word)>> {
        let ends = self.endpoints();
        let mut seen: HashSet<(usize, i64)> = HashSet::new();
        let mut nodes = Vec::new();
        let mut queue = VecDeque::new();
        for (j, e) in ends.iter().enumerate() {
            if let Some((k, x)) = conjugate_into_cyclic(base, g, e)? {
                if seen.insert((j, k)) {
                    queue.push_back(((j, k), x));
                }
            }
        }
        while let Some(((j, k), x)) = queue.pop_front() {
            nodes.push(((j, k), x.clone()));
            if nodes.len() > self.max_component {
                return Err(GroupError::undecided("edge component exceeds configured size"));
            }
            let (letter, _) = &self.edges[j / 2];
            let t = Word::letter(*letter);
            // t^-1 src^k t = dst^k
            let (partner, step) = if j % 2 == 0 { (j + 1, t) } else { (j - 1, t.inverse()) };
            if seen.insert((partner, k)) {
                queue.push_back(((partner, k), x.mul(&step)));
            }
            let elem = ends[j].pow(k);
            for (j2, e2) in ends.iter().enumerate() {
                if j2 == j {
                    continue;
                }
                if let Some((k2, y)) = conjugate_into_cyclic(base, &elem, e2)? {
                    if seen.insert((j2, k2)) {
                        queue.push_back(((j2, k2), x.mul(&y)));
                    }
                }
            }
        }
        Ok(nodes)
    }
}

impl EdgeSource for FiniteEdges {
    fn owns_stable(&self, letter: &Letter) -> bool {
        self.edges.iter().any(|(l, _)| l == letter)
    }

    fn edge(&self, letter: &Letter) -> Result<Edge> {
        self.edges
            .iter()
            .find(|(l, _)| l == letter)
            .map(|(_, e)| e.clone())
            .ok_or(GroupError::WrongLevel(*letter))
    }

    fn edge_class(&self, base: &dyn Level, g: &Word) -> Result<Option<EdgeClass>> {
        let nodes = self.component(base, g)?;
        Ok(nodes
            .into_iter()
            .min_by_key(|(node, _)| *node)
            .map(|((j, k), x)| EdgeClass {
                key: j,
                exponent: Rational::from_integer(k),
                conjugator: x,
                divisible: None,
            }))
    }

    fn boosted_root(&self, base: &dyn Level, p: &Word) -> Result<Option<Root>> {
        let ends = self.endpoints();
        let mut best: Option<Root> = None;
        for ((j, k), x) in self.component(base, p)? {
            match base.extract_root(&ends[j].pow(k))? {
                Root::Divisible {
                    conjugator,
                    stage,
                    value,
                } => {
                    return Ok(Some(Root::Divisible {
                        conjugator: x.mul(&conjugator),
                        stage,
                        value,
                    }))
                }
                Root::Power { root, exponent }
                    if exponent > 1 && best.as_ref().and_then(Root::exponent).is_none_or(|b| exponent > b) =>
                {
                    best = Some(Root::Power {
                        root: x.mul(&root).mul(&x.inverse()),
                        exponent,
                    });
                }
                _ => {}
            }
        }
        Ok(best)
    }

    fn materialized(&self) -> Vec<(Letter, Edge)> {
        self.edges.clone()
    }

    fn is_negative_control(&self) -> bool {
        self.negative_control
    }
}

/// Which side of the stable letter a pinch was found on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PinchSide {
    /// `t^-1 src^n t -> dst^n`
    Forward,
    /// `t dst^n t^-1 -> src^n`
    Backward,
}

/// A rewritable `t^-e u t^e` subword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PinchResult {
    /// Index of the first stable letter of the pinch, counting stable letters.
    pub position: usize,
    pub exponent: i64,
    pub side: PinchSide,
}

/// Word split at stable letters: `segs[0] ts[0] segs[1] ... ts[n-1] segs[n]`.
#[derive(Clone, Debug)]
struct Decomposed {
    segs: Vec<Word>,
    ts: Vec<(Letter, bool)>,
}

impl Decomposed {
    fn join(&self) -> Word {
        self.join_range(0, self.ts.len())
    }

    /// `segs[from] ts[from] ... ts[to-1] segs[to]` without the final segment
    /// when `to` is exclusive of it: returns the prefix up to and including
    /// stable letter `to - 1` and segment `to`.
    fn join_range(&self, from: usize, to: usize) -> Word {
        let mut out = Vec::new();
        for i in from..to {
            out.push(self.segs[i].clone());
            out.push(t_word(self.ts[i]));
        }
        out.push(self.segs[to].clone());
        Word::concat(out.iter())
    }

    fn stable_len(&self) -> usize {
        self.ts.len()
    }
}

fn t_word((letter, inverse): (Letter, bool)) -> Word {
    Word::power(letter, if inverse { -1 } else { 1 })
}

/// HNN extension of `base` by the stable letters of `edges`.
#[derive(Debug)]
pub struct HnnLevel {
    base: LevelRef,
    edges: std::sync::Arc<dyn EdgeSource>,
    bounds: Bounds,
}

impl HnnLevel {
    pub fn new(base: LevelRef, edges: std::sync::Arc<dyn EdgeSource>, bounds: Bounds) -> HnnLevel {
        HnnLevel { base, edges, bounds }
    }

    /// Single stable letter `t` with `t^-1 src t = dst`.
    pub fn single(base: LevelRef, stable: Letter, src: Word, dst: Word, bounds: Bounds) -> HnnLevel {
        let edges = FiniteEdges::new(vec![(stable, Edge { src, dst })]);
        HnnLevel::new(base, std::sync::Arc::new(edges), bounds)
    }

    pub fn base(&self) -> &LevelRef {
        &self.base
    }

    pub fn edges(&self) -> &std::sync::Arc<dyn EdgeSource> {
        &self.edges
    }

    fn decompose(&self, w: &Word) -> Result<Decomposed> {
        let mut segs = vec![Vec::new()];
        let mut ts = Vec::new();
        for s in w.syllables() {
            if self.edges.owns_stable(&s.letter) {
                for _ in 0..s.exp.unsigned_abs() {
                    ts.push((s.letter, s.exp < 0));
                    segs.push(Vec::new());
                }
            } else if self.base.owns(&s.letter) {
                segs.last_mut().unwrap().push(*s);
            } else {
                return Err(GroupError::WrongLevel(s.letter));
            }
        }
        Ok(Decomposed {
            segs: segs.into_iter().map(Word::from_syllables).collect(),
            ts,
        })
    }

    /// Subgroup generator on the left of a stable letter occurrence: elements
    /// of it can be pushed rightward through the letter.
    fn left_subgroup(&self, t: (Letter, bool)) -> Result<Word> {
        let edge = self.edges.edge(&t.0)?;
        Ok(if t.1 { edge.dst } else { edge.src })
    }

    /// The first pinch of a decomposed word, if any.
    fn find_pinch(&self, d: &Decomposed, start: usize) -> Result<Option<(PinchResult, Word)>> {
        for i in start..d.ts.len().saturating_sub(1) {
            let (l1, inv1) = d.ts[i];
            let (l2, inv2) = d.ts[i + 1];
            if l1 != l2 || inv1 == inv2 {
                continue;
            }
            let edge = self.edges.edge(&l1)?;
            let (from, to, side) = if inv1 {
                (&edge.src, &edge.dst, PinchSide::Forward)
            } else {
                (&edge.dst, &edge.src, PinchSide::Backward)
            };
            if let Some(n) = self.base.solve_power(from, &d.segs[i + 1])? {
                let pinch = PinchResult {
                    position: i,
                    exponent: n,
                    side,
                };
                return Ok(Some((pinch, to.pow(n))));
            }
        }
        Ok(None)
    }

    fn britton(&self, w: &Word) -> Result<Decomposed> {
        let mut d = self.decompose(w)?;
        for seg in d.segs.iter_mut() {
            *seg = self.base.reduce(seg)?;
        }
        let mut start = 0;
        while let Some((pinch, image)) = self.find_pinch(&d, start)? {
            let i = pinch.position;
            let merged = Word::concat([&d.segs[i], &image, &d.segs[i + 2]]);
            let merged = self.base.reduce(&merged)?;
            d.ts.drain(i..i + 2);
            d.segs.drain(i + 1..i + 3);
            d.segs[i] = merged;
            start = i.saturating_sub(1);
        }
        Ok(d)
    }

    /// The first pinch of `w` (leftmost-innermost), without rewriting.
    pub fn first_pinch(&self, w: &Word) -> Result<Option<PinchResult>> {
        let mut d = self.decompose(w)?;
        for seg in d.segs.iter_mut() {
            *seg = self.base.reduce(seg)?;
        }
        Ok(self.find_pinch(&d, 0)?.map(|(p, _)| p))
    }

    /// Britton-reduced form: no pinch remains, every base segment is reduced.
    pub fn britton_reduce(&self, w: &Word) -> Result<Word> {
        let d = self.britton(w)?;
        if d.ts.is_empty() {
            return self.base.reduce(&d.segs[0]);
        }
        Ok(d.join())
    }

    /// Number of stable letters in the Britton-reduced form.
    pub fn stable_length(&self, w: &Word) -> Result<usize> {
        Ok(self.britton(w)?.stable_len())
    }

    fn conjugate_base(&self, g: &Word, h: &Word) -> Result<Conjugacy> {
        let mut undecided = None;
        match self.base.conjugate(g, h)? {
            Conjugacy::NotConjugate => {}
            Conjugacy::Undecided(why) => undecided = Some(why),
            found => return Ok(found),
        }
        let eg = self.edges.edge_class(self.base.as_ref(), g)?;
        let eh = self.edges.edge_class(self.base.as_ref(), h)?;
        if let (Some(eg), Some(eh)) = (eg, eh) {
            if eg.key == eh.key && eg.exponent == eh.exponent {
                return Ok(Conjugacy::Conjugate(eg.conjugator.mul(&eh.conjugator.inverse())));
            }
        }
        Ok(match undecided {
            Some(why) => Conjugacy::Undecided(why),
            None => Conjugacy::NotConjugate,
        })
    }

    /// Conjugacy of cyclically reduced words with stable letters: a cyclic
    /// permutation at a stable letter followed by conjugation by an element
    /// of the edge subgroup on the left of the first letter.
    fn conjugate_stable(&self, g: &Word, h: &Word) -> Result<Conjugacy> {
        let dg = self.britton(g)?;
        let dh = self.britton(h)?;
        let n = dg.stable_len();
        let target = h.inverse();
        let mut exceeded = false;
        for j in 0..n {
            if (0..n).any(|i| dg.ts[(j + i) % n] != dh.ts[i]) {
                continue;
            }
            let y0 = dg.join_range(0, j);
            let y0 = if j == 0 { Word::identity() } else { y0 };
            let rot = g.conj(&y0);
            let e = self.left_subgroup(dh.ts[0])?;
            let bound = derived_bound(g.len() + h.len(), e.len());
            if bound > self.bounds.max_exponent {
                exceeded = true;
            }
            for m in exponent_order(bound.min(self.bounds.max_exponent)) {
                let z = e.pow(m);
                if self.is_trivial(&rot.conj(&z).mul(&target))? {
                    return Ok(Conjugacy::Conjugate(y0.mul(&z)));
                }
            }
        }
        Ok(if exceeded {
            Conjugacy::Undecided(format!(
                "edge exponent bound exceeds configured {}",
                self.bounds.max_exponent
            ))
        } else {
            Conjugacy::NotConjugate
        })
    }
}

impl Level for HnnLevel {
    fn owns(&self, letter: &Letter) -> bool {
        self.edges.owns_stable(letter) || self.base.owns(letter)
    }

    fn reduce(&self, w: &Word) -> Result<Word> {
        self.britton_reduce(w)
    }

    fn solve_power(&self, a: &Word, g: &Word) -> Result<Option<i64>> {
        let (core, c) = self.cyclic_reduce(a)?;
        if core.is_identity() {
            return Err(GroupError::DegenerateBase);
        }
        let target = self.britton_reduce(&g.conj(&c))?;
        if target.is_identity() {
            return Ok(Some(0));
        }
        let la = self.stable_length(&core)?;
        let lg = self.stable_length(&target)?;
        if la == 0 {
            if lg > 0 {
                return Ok(None);
            }
            return self.base.solve_power(&core, &target);
        }
        if lg % la != 0 {
            return Ok(None);
        }
        let n = (lg / la) as i64;
        for cand in [n, -n] {
            if self.are_equal(&core.pow(cand), &target)? {
                return Ok(Some(cand));
            }
        }
        Ok(None)
    }

    fn cyclic_reduce(&self, w: &Word) -> Result<(Word, Word)> {
        let mut core = self.britton_reduce(w)?;
        let mut conj = Word::identity();
        loop {
            let d = self.britton(&core)?;
            let n = d.stable_len();
            if n == 0 {
                let (k, c) = self.base.cyclic_reduce(&d.segs[0])?;
                return Ok((k, conj.mul(&c)));
            }
            if !d.segs[0].is_identity() {
                let s0 = d.segs[0].clone();
                core = self.britton_reduce(&core.conj(&s0))?;
                conj = conj.mul(&s0);
                continue;
            }
            let (l_last, inv_last) = d.ts[n - 1];
            let (l_first, inv_first) = d.ts[0];
            if n >= 2 && l_last == l_first && inv_last != inv_first {
                let edge = self.edges.edge(&l_last)?;
                let from = if inv_last { &edge.src } else { &edge.dst };
                if self.base.solve_power(from, &d.segs[n])?.is_some() {
                    let p = t_word(d.ts[n - 1]).mul(&d.segs[n]);
                    core = self.britton_reduce(&p.mul(&core).mul(&p.inverse()))?;
                    conj = conj.mul(&p.inverse());
                    continue;
                }
            }
            return Ok((core, conj));
        }
    }

    fn conjugate(&self, g: &Word, h: &Word) -> Result<Conjugacy> {
        let (gc, cg) = self.cyclic_reduce(g)?;
        let (hc, ch) = self.cyclic_reduce(h)?;
        let lg = self.stable_length(&gc)?;
        if lg != self.stable_length(&hc)? {
            return Ok(Conjugacy::NotConjugate);
        }
        let inner = if lg == 0 {
            self.conjugate_base(&gc, &hc)?
        } else {
            self.conjugate_stable(&gc, &hc)?
        };
        Ok(match inner {
            Conjugacy::Conjugate(y) => Conjugacy::Conjugate(cg.mul(&y).mul(&ch.inverse())),
            other => other,
        })
    }

    fn extract_root(&self, g: &Word) -> Result<Root> {
        let (core, c) = self.cyclic_reduce(g)?;
        if core.is_identity() {
            return Err(GroupError::TrivialRootData);
        }
        let d = self.britton(&core)?;
        let len = d.stable_len();
        if len == 0 {
            let root = match self.base.extract_root(&core)? {
                Root::Power { root: p, exponent: n } => match self.edges.boosted_root(self.base.as_ref(), &p)? {
                    Some(Root::Power { root: q, exponent: m }) => Root::Power {
                        root: q,
                        exponent: n * m,
                    },
                    Some(Root::Divisible {
                        conjugator,
                        stage,
                        value,
                    }) => Root::Divisible {
                        conjugator,
                        stage,
                        value: value * Rational::from_integer(n as i64),
                    },
                    None => Root::Power { root: p, exponent: n },
                },
                divisible => divisible,
            };
            return Ok(root.conjugated(&c));
        }
        for n in divisors_desc(len) {
            let period = len / n;
            if (0..len).any(|i| d.ts[i] != d.ts[i % period]) {
                continue;
            }
            let prefix = d.join_range(0, period);
            let e = self.left_subgroup(d.ts[0])?;
            let bound = derived_bound(core.len(), e.len() * n as u64);
            for m in exponent_order(bound.min(self.bounds.max_exponent)) {
                let candidate = prefix.mul(&e.pow(m));
                if self.are_equal(&candidate.pow(n as i64), &core)? {
                    let root = self.britton_reduce(&candidate)?;
                    return Ok(Root::Power {
                        root,
                        exponent: n as u64,
                    }
                    .conjugated(&c));
                }
            }
            if bound > self.bounds.max_exponent {
                return Err(GroupError::undecided(format!(
                    "root search for {} needs edge exponents beyond {}",
                    g, self.bounds.max_exponent
                )));
            }
        }
        Ok(Root::Power {
            root: self.britton_reduce(g)?,
            exponent: 1,
        })
    }

    fn descriptor(&self) -> LevelDescriptor {
        LevelDescriptor::Hnn {
            base: Box::new(self.base.descriptor()),
            edges: self
                .edges
                .materialized()
                .into_iter()
                .map(|(l, e)| (l, e.src, e.dst))
                .collect(),
            lazy: self.edges.is_lazy(),
            negative_control: self.edges.is_negative_control(),
        }
    }
}
