//! Quantifier-free formulas and the ladder prober.
//!
//! An n-ladder for `phi(x, y)` is a pair of tuple sequences `a_1..a_n`,
//! `b_1..b_n` with `phi(a_i, b_j)` true exactly when `i <= j`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{GroupError, Result};
use crate::levels::Level;
use crate::text::{Cursor, Term, TermParser};
use crate::tower::Tower;
use crate::word::Word;

use super::{PropertyReport, SampleSpec};

/// Ladder DFS stops after visiting this many nodes.
const NODE_BUDGET: u64 = 5_000_000;
/// Largest relation matrix the prober builds.
const MAX_CELLS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    /// `lhs = rhs`
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

/// A boolean combination of word equations in variables `X1.., Y1..`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderFormula {
    pub text: String,
    pub root: Formula,
    pub atoms: Vec<(Term, Term)>,
    pub x_arity: usize,
    pub y_arity: usize,
}

impl fmt::Display for LadderFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

struct FormulaParser<'a> {
    cur: Cursor<'a>,
    atoms: Vec<(Term, Term)>,
}

impl FormulaParser<'_> {
    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        loop {
            self.cur.skip_ws();
            if !self.cur.eat('|') {
                return Ok(f);
            }
            f = Formula::Or(Box::new(f), Box::new(self.and()?));
        }
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        loop {
            self.cur.skip_ws();
            if !self.cur.eat('&') {
                return Ok(f);
            }
            f = Formula::And(Box::new(f), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        self.cur.skip_ws();
        if self.cur.eat('!') {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.cur.eat('[') {
            let f = self.or()?;
            self.cur.skip_ws();
            if !self.cur.eat(']') {
                return Err(self.cur.error("expected `]`"));
            }
            return Ok(f);
        }
        self.atom()
    }

    fn term(&mut self) -> Result<Term> {
        TermParser {
            cur: &mut self.cur,
            vars: true,
        }
        .product()
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        self.cur.skip_ws();
        let negated = if self.cur.eat_str("!=") {
            true
        } else if self.cur.eat('=') {
            false
        } else {
            return Err(self.cur.error("expected `=` or `!=`"));
        };
        let rhs = self.term()?;
        self.atoms.push((lhs, rhs));
        let atom = Formula::Atom(self.atoms.len() - 1);
        Ok(if negated { Formula::Not(Box::new(atom)) } else { atom })
    }
}

impl LadderFormula {
    pub fn parse(text: &str) -> Result<LadderFormula> {
        let mut p = FormulaParser {
            cur: Cursor::new(text),
            atoms: Vec::new(),
        };
        let root = p.or()?;
        if !p.cur.at_end() {
            return Err(p.cur.error(format!("unexpected `{}`", p.cur.peek().unwrap())));
        }
        let (mut x_arity, mut y_arity) = (0, 0);
        for (l, r) in &p.atoms {
            for t in [l, r] {
                let (a, b) = t.arity();
                x_arity = x_arity.max(a);
                y_arity = y_arity.max(b);
            }
        }
        Ok(LadderFormula {
            text: text.trim().to_string(),
            root,
            atoms: p.atoms,
            x_arity,
            y_arity,
        })
    }

    /// `lhs rhs^-1` of atom `i` after substitution.
    fn atom_word(&self, i: usize, xs: &[Word], ys: &[Word]) -> Result<Word> {
        let (l, r) = &self.atoms[i];
        Ok(l.eval(xs, ys)?.mul(&r.eval(xs, ys)?.inverse()))
    }

    /// Direct evaluation without memoization.
    pub fn eval(&self, level: &dyn Level, xs: &[Word], ys: &[Word]) -> Result<bool> {
        let mut ev = Evaluator::new(level);
        ev.formula(self, xs, ys)
    }
}

/// Formula evaluation with atom results memoized on the substituted word.
pub(crate) struct Evaluator<'a> {
    level: &'a dyn Level,
    memo: HashMap<Word, bool>,
}

impl<'a> Evaluator<'a> {
    pub fn new(level: &'a dyn Level) -> Evaluator<'a> {
        Evaluator {
            level,
            memo: HashMap::new(),
        }
    }

    pub fn atom(&mut self, f: &LadderFormula, i: usize, xs: &[Word], ys: &[Word]) -> Result<bool> {
        let w = f.atom_word(i, xs, ys)?;
        if let Some(&v) = self.memo.get(&w) {
            return Ok(v);
        }
        let v = self.level.is_trivial(&w)?;
        self.memo.insert(w, v);
        Ok(v)
    }

    pub fn formula(&mut self, f: &LadderFormula, xs: &[Word], ys: &[Word]) -> Result<bool> {
        self.node(f, &f.root, xs, ys)
    }

    fn node(&mut self, f: &LadderFormula, node: &Formula, xs: &[Word], ys: &[Word]) -> Result<bool> {
        Ok(match node {
            Formula::Atom(i) => self.atom(f, *i, xs, ys)?,
            Formula::Not(a) => !self.node(f, a, xs, ys)?,
            Formula::And(a, b) => self.node(f, a, xs, ys)? && self.node(f, b, xs, ys)?,
            Formula::Or(a, b) => self.node(f, a, xs, ys)? || self.node(f, b, xs, ys)?,
        })
    }
}

/// All `arity`-tuples over `words`, lexicographic in sample order.
fn tuples(words: &[Word], arity: usize) -> Vec<Vec<Word>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                words.iter().map(move |w| {
                    let mut t = t.clone();
                    t.push(w.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// `(a_1..a_n, b_1..b_n)`
pub type Ladder = (Vec<Vec<Word>>, Vec<Vec<Word>>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderReport {
    pub formula: String,
    pub max_ladder: usize,
    pub witness: Option<Ladder>,
    pub n_max: usize,
    pub sample_size: usize,
    /// Largest ladder per stage for stage-pure samples.
    pub per_stage: Vec<(u32, usize)>,
    /// The search finished within its node budget.
    pub complete: bool,
}

impl fmt::Display for LadderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tuple = |t: &Vec<Word>| {
            let ws: Vec<String> = t.iter().map(Word::to_string).collect();
            format!("({})", ws.join(", "))
        };
        if let Some((a, b)) = &self.witness {
            let a: Vec<String> = a.iter().map(tuple).collect();
            let b: Vec<String> = b.iter().map(tuple).collect();
            writeln!(f, "ladder: witness x = [{}]", a.join("; "))?;
            writeln!(f, "ladder: witness y = [{}]", b.join("; "))?;
        }
        for (s, n) in &self.per_stage {
            writeln!(f, "ladder: stage {} max {}", s, n)?;
        }
        write!(
            f,
            "ladder: formula `{}` max {} (n_max {}, sample {}{})",
            self.formula,
            self.max_ladder,
            self.n_max,
            self.sample_size,
            if self.complete { "" } else { ", budget exhausted" }
        )
    }
}

struct Search<'m> {
    m: &'m [Vec<bool>],
    n_max: usize,
    best: Vec<(usize, usize)>,
    nodes: u64,
}

impl Search<'_> {
    fn extend(&mut self, chain: &mut Vec<(usize, usize)>, cands: &[(usize, usize)]) {
        if chain.len() > self.best.len() {
            self.best = chain.clone();
        }
        if self.best.len() >= self.n_max || chain.len() + cands.len() <= self.best.len() {
            return;
        }
        for (i, &(a, b)) in cands.iter().enumerate() {
            self.nodes += 1;
            if self.nodes > NODE_BUDGET || self.best.len() >= self.n_max {
                return;
            }
            // later pairs must sit above (a, b): true against b, false against a
            let next: Vec<(usize, usize)> = cands[i + 1..]
                .iter()
                .chain(cands[..i].iter())
                .copied()
                .filter(|&(a2, b2)| self.m[a][b2] && !self.m[a2][b])
                .collect();
            chain.push((a, b));
            self.extend(chain, &next);
            chain.pop();
        }
    }
}

/// Largest `n <= n_max` admitting an n-ladder among tuples of `sample`.
pub fn ladder_search_level(
    level: &dyn Level,
    formula: &LadderFormula,
    sample: &[Word],
    n_max: usize,
) -> Result<LadderReport> {
    let mut report = LadderReport {
        formula: formula.text.clone(),
        max_ladder: 0,
        witness: None,
        n_max,
        sample_size: sample.len(),
        per_stage: Vec::new(),
        complete: true,
    };
    if sample.is_empty() || n_max == 0 {
        return Ok(report);
    }
    let xs = tuples(sample, formula.x_arity);
    let ys = tuples(sample, formula.y_arity);
    if xs.len() * ys.len() > MAX_CELLS {
        return Err(GroupError::Usage(format!(
            "ladder search over {} x {} tuples exceeds the matrix limit",
            xs.len(),
            ys.len()
        )));
    }
    let mut ev = Evaluator::new(level);
    let mut m = vec![vec![false; ys.len()]; xs.len()];
    for (i, a) in xs.iter().enumerate() {
        for (j, b) in ys.iter().enumerate() {
            m[i][j] = ev.formula(formula, a, b)?;
        }
    }
    let cands: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|i| (0..ys.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| m[i][j])
        .collect();
    let mut search = Search {
        m: &m,
        n_max,
        best: Vec::new(),
        nodes: 0,
    };
    search.extend(&mut Vec::new(), &cands);
    report.complete = search.nodes <= NODE_BUDGET;
    let best = search.best;
    let a: Vec<Vec<Word>> = best.iter().map(|&(i, _)| xs[i].clone()).collect();
    let b: Vec<Vec<Word>> = best.iter().map(|&(_, j)| ys[j].clone()).collect();
    // re-verify without the memo
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if formula.eval(level, ai, bj)? != (i <= j) {
                return Err(GroupError::undecided("ladder witness failed re-verification"));
            }
        }
    }
    report.max_ladder = best.len();
    if !best.is_empty() {
        report.witness = Some((a, b));
    }
    Ok(report)
}

/// Ladder search over a stage sample, evaluated at the sample's stage.
pub fn ladder_search(
    tower: &Tower,
    formula: &LadderFormula,
    sample: &SampleSpec,
    n_max: usize,
) -> Result<LadderReport> {
    check_constants(tower, formula, sample.stage)?;
    let words = sample.words(tower);
    let mut r = ladder_search_level(tower.level(sample.stage)?.as_ref(), formula, &words, n_max)?;
    r.per_stage = vec![(sample.stage, r.max_ladder)];
    Ok(r)
}

fn check_constants(tower: &Tower, formula: &LadderFormula, stage: u32) -> Result<()> {
    let mut letters = Vec::new();
    for (l, r) in &formula.atoms {
        l.letters(&mut letters);
        r.letters(&mut letters);
    }
    tower.check_letters(
        &Word::from_syllables(letters.iter().map(|l| crate::word::Syllable::new(*l, 1))),
        stage,
    )
}

/// Every atom takes the same truth value on every sampled tuple at the
/// sample's stage and after promotion to each of `stages`.
pub fn check_promotion_invariance(
    tower: &Tower,
    formula: &LadderFormula,
    sample: &SampleSpec,
    stages: &[u32],
) -> Result<PropertyReport> {
    check_constants(tower, formula, sample.stage)?;
    let mut report = PropertyReport::new(
        "promotion-invariance",
        format!("`{}` on {}", formula.text, sample.describe()),
        vec![
            ("radius", sample.max_len as u64),
            ("top_stage", stages.iter().copied().max().unwrap_or(0) as u64),
        ],
    );
    let words = sample.words(tower);
    let xs = tuples(&words, formula.x_arity);
    let ys = tuples(&words, formula.y_arity);
    let base = tower.level(sample.stage)?;
    let mut base_ev = Evaluator::new(base.as_ref());
    let levels = stages
        .iter()
        .map(|&s| {
            if s < sample.stage {
                Err(GroupError::Demotion {
                    from: sample.stage,
                    to: s,
                })
            } else {
                Ok((s, tower.level(s)?))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut evs: Vec<(u32, Evaluator)> = levels.iter().map(|(s, l)| (*s, Evaluator::new(l.as_ref()))).collect();
    for a in &xs {
        for b in &ys {
            for i in 0..formula.atoms.len() {
                report.checked += 1;
                let v0 = base_ev.atom(formula, i, a, b)?;
                for (s, ev) in evs.iter_mut() {
                    let v = ev.atom(formula, i, a, b)?;
                    if v != v0 {
                        let mut witness = a.clone();
                        witness.extend(b.iter().cloned());
                        report.violation(
                            witness,
                            format!(
                                "atom {} is {} at stage {} but {} at stage {}",
                                i, v0, sample.stage, v, s
                            ),
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}
