//! The `(J, R)`-dummy clause-variable game of a boolean constraint system.
//!
//! Left questions are tuples in `[m]^{(J+1)R}`, indexed in base `m` with
//! the first coordinate most significant. A right question replaces `R`
//! coordinates by a variable from the corresponding context. Answers are
//! mixed-radix indices: a relation index for each constraint coordinate and
//! a bit for each variable coordinate, first coordinate most significant.
//! Since relations are sorted, this matches lexicographic order on the
//! underlying assignment tuples.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{NonlocalGame, Predicate, Question, QuestionPair};
use crate::cs::ConstraintSystem;
use crate::error::{Error, Result};
use crate::parallel;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Constraint(usize),
    Variable(usize),
}

pub type DummyQuestion = Vec<Coord>;

/// Right neighbor of a left question, with the integer weight
/// `prod_{q not in L} |V_{i_q}|`; dividing by
/// [`DummyGame::neighbor_denominator`] gives the conditional probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbor {
    pub question: DummyQuestion,
    pub replaced: Vec<usize>,
    pub weight: u64,
}

#[derive(Debug, Clone)]
pub struct DummyGame<'a> {
    system: &'a ConstraintSystem,
    j: usize,
    r: usize,
    len: usize,
    num_left: usize,
}

/// Largest collision probability over left questions and label pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothnessReport {
    pub max_collision: Rational,
    /// `(left question, label, label)` attaining the maximum.
    pub witness: Option<(usize, usize, usize)>,
    pub bound: Rational,
}

impl SmoothnessReport {
    pub fn holds(&self) -> bool {
        self.max_collision <= self.bound
    }
}

impl<'a> DummyGame<'a> {
    /// Fails when the system is not boolean, `J` or `R` is zero, or
    /// `m^{(J+1)R}` exceeds `cap`.
    pub fn new(system: &'a ConstraintSystem, j: usize, r: usize, cap: u128) -> Result<Self> {
        if !system.is_boolean() {
            return Err(Error::Malformed("the dummy game needs a boolean system".into()));
        }
        if j == 0 || r == 0 {
            return Err(Error::Malformed("J and R must be positive".into()));
        }
        let m = system.num_constraints();
        if m == 0 {
            return Err(Error::Malformed("system has no constraints".into()));
        }
        let len = (j + 1) * r;
        let needed = (m as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
        if needed > cap {
            return Err(Error::CapExceeded {
                what: format!("left questions m^{len}"),
                needed,
                cap,
            });
        }
        Ok(DummyGame {
            system,
            j,
            r,
            len,
            num_left: needed as usize,
        })
    }

    pub fn system(&self) -> &ConstraintSystem {
        self.system
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `(J + 1) R`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.num_left == 0
    }

    pub fn num_left(&self) -> usize {
        self.num_left
    }

    pub fn left_question(&self, mut idx: usize) -> Vec<usize> {
        let m = self.system.num_constraints();
        let mut out = vec![0; self.len];
        for q in (0..self.len).rev() {
            out[q] = idx % m;
            idx /= m;
        }
        out
    }

    pub fn left_index(&self, question: &[usize]) -> usize {
        let m = self.system.num_constraints();
        question.iter().fold(0, |acc, &c| acc * m + c)
    }

    pub fn left_radices(&self, question: &[usize]) -> Vec<usize> {
        question
            .iter()
            .map(|&c| self.system.constraint(c).relation().len())
            .collect()
    }

    pub fn right_radices(&self, question: &[Coord]) -> Vec<usize> {
        question
            .iter()
            .map(|c| match *c {
                Coord::Constraint(i) => self.system.constraint(i).relation().len(),
                Coord::Variable(_) => 2,
            })
            .collect()
    }

    pub fn left_answers(&self, question: &[usize]) -> usize {
        self.left_radices(question).iter().product()
    }

    pub fn right_answers(&self, question: &[Coord]) -> usize {
        self.right_radices(question).iter().product()
    }

    /// `C((J+1)R, R) * prod_q |V_{i_q}|`.
    pub fn neighbor_denominator(&self, question: &[usize]) -> u64 {
        binomial(self.len, self.r)
            * question
                .iter()
                .map(|&c| self.system.constraint(c).arity() as u64)
                .product::<u64>()
    }

    /// Right questions reachable from `question`, in lexicographic order of
    /// the replaced positions and then of the chosen variables.
    pub fn neighbors(&self, question: &[usize]) -> Vec<Neighbor> {
        let mut out = Vec::new();
        for replaced in (0..self.len).combinations(self.r) {
            let weight: u64 = (0..self.len)
                .filter(|q| !replaced.contains(q))
                .map(|q| self.system.constraint(question[q]).arity() as u64)
                .product();
            let choices = replaced
                .iter()
                .map(|&q| self.system.constraint(question[q]).context().to_vec())
                .multi_cartesian_product();
            for vars in choices {
                let mut right: DummyQuestion = question.iter().map(|&c| Coord::Constraint(c)).collect();
                for (&q, &x) in replaced.iter().zip(&vars) {
                    right[q] = Coord::Variable(x);
                }
                out.push(Neighbor {
                    question: right,
                    replaced: replaced.clone(),
                    weight,
                });
            }
        }
        out
    }

    /// Exact `pi(i, j)`; zero for incompatible pairs.
    pub fn probability(&self, left: &[usize], right: &[Coord]) -> Rational {
        if self.check_compatible(left, right).is_err() {
            return Rational::zero();
        }
        let replaced: Vec<usize> = (0..self.len)
            .filter(|&q| matches!(right[q], Coord::Variable(_)))
            .collect();
        let weight: u64 = (0..self.len)
            .filter(|q| !replaced.contains(q))
            .map(|q| self.system.constraint(left[q]).arity() as u64)
            .product();
        Rational::new(
            BigInt::from(weight),
            BigInt::from(self.neighbor_denominator(left)) * BigInt::from(self.num_left),
        )
    }

    fn check_compatible(&self, left: &[usize], right: &[Coord]) -> Result<()> {
        if left.len() != self.len || right.len() != self.len {
            return Err(Error::IncompatibleQuestions("question length".into()));
        }
        let mut vars = 0;
        for (q, (&i, &c)) in left.iter().zip(right).enumerate() {
            match c {
                Coord::Constraint(c) if c == i => {}
                Coord::Variable(x) if self.system.constraint(i).slot_of(x).is_some() => vars += 1,
                _ => {
                    return Err(Error::IncompatibleQuestions(format!(
                        "coordinate {q} of the right question does not refine the left one"
                    )))
                }
            }
        }
        if vars != self.r {
            return Err(Error::IncompatibleQuestions(format!(
                "{vars} variable coordinates, expected {}",
                self.r
            )));
        }
        Ok(())
    }

    /// The projection of a left answer, given as one relation index per
    /// coordinate, onto a right question. Returns one entry per coordinate:
    /// the relation index for constraint coordinates, the bit otherwise.
    pub fn project_answer(&self, left: &[usize], right: &[Coord], sigma: &[usize]) -> Result<Vec<usize>> {
        self.check_compatible(left, right)?;
        if sigma.len() != self.len {
            return Err(Error::Shape("answer length".into()));
        }
        Ok(left
            .iter()
            .zip(right)
            .zip(sigma)
            .map(|((&i, &c), &s)| {
                let con = self.system.constraint(i);
                match c {
                    Coord::Constraint(_) => s,
                    Coord::Variable(x) => con.relation()[s][con.slot_of(x).unwrap()] as usize,
                }
            })
            .collect())
    }

    /// For every left answer index, the index of its projected right answer.
    pub fn projection_table(&self, left: &[usize], right: &[Coord]) -> Result<Vec<u32>> {
        self.check_compatible(left, right)?;
        let left_radices = self.left_radices(left);
        let right_radices = self.right_radices(right);
        let total: usize = left_radices.iter().product();
        // contribution of each coordinate value to the right index
        let mut strides = vec![0usize; self.len];
        let mut acc = 1;
        for q in (0..self.len).rev() {
            strides[q] = acc;
            acc *= right_radices[q];
        }
        let contrib: Vec<Vec<usize>> = (0..self.len)
            .map(|q| {
                let con = self.system.constraint(left[q]);
                (0..left_radices[q])
                    .map(|s| {
                        let v = match right[q] {
                            Coord::Constraint(_) => s,
                            Coord::Variable(x) => con.relation()[s][con.slot_of(x).unwrap()] as usize,
                        };
                        v * strides[q]
                    })
                    .collect()
            })
            .collect();
        let mut table = Vec::with_capacity(total);
        let mut digits = vec![0usize; self.len];
        for _ in 0..total {
            table.push(digits.iter().enumerate().map(|(q, &d)| contrib[q][d]).sum::<usize>() as u32);
            for q in (0..self.len).rev() {
                digits[q] += 1;
                if digits[q] < left_radices[q] {
                    break;
                }
                digits[q] = 0;
            }
        }
        Ok(table)
    }

    /// Decodes a mixed-radix answer index, first coordinate most significant.
    pub fn decode_answer(radices: &[usize], mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; radices.len()];
        for q in (0..radices.len()).rev() {
            out[q] = idx % radices[q];
            idx /= radices[q];
        }
        out
    }

    pub fn encode_answer(radices: &[usize], digits: &[usize]) -> usize {
        radices.iter().zip(digits).fold(0, |acc, (&r, &d)| acc * r + d)
    }

    /// `Pr[q0 in L]` for a fixed left question, exactly.
    pub fn replaced_probability(&self, left: &[usize], q0: usize) -> Rational {
        let hit: u64 = self
            .neighbors(left)
            .iter()
            .filter(|n| n.replaced.contains(&q0))
            .map(|n| n.weight)
            .sum();
        Rational::new(hit.into(), self.neighbor_denominator(left).into())
    }

    /// Exhaustive check that distinct left answers collide under the
    /// projection to a random right neighbor with probability at most `1/J`.
    pub fn smoothness(&self) -> SmoothnessReport {
        let per_left = parallel::map_range(self.num_left, |idx| {
            let left = self.left_question(idx);
            let labels = self.left_answers(&left);
            let tables: Vec<(Vec<u32>, u64)> = self
                .neighbors(&left)
                .into_iter()
                .map(|n| (self.projection_table(&left, &n.question).unwrap(), n.weight))
                .collect();
            let mut best = (0u64, None);
            for a in 0..labels {
                for b in a + 1..labels {
                    let hits: u64 = tables
                        .iter()
                        .filter(|(t, _)| t[a] == t[b])
                        .map(|(_, w)| w)
                        .sum();
                    if hits > best.0 || best.1.is_none() {
                        best = (hits, Some((idx, a, b)));
                    }
                }
            }
            (Rational::new(best.0.into(), self.neighbor_denominator(&left).into()), best.1)
        });
        let mut report = SmoothnessReport {
            max_collision: Rational::zero(),
            witness: None,
            bound: Rational::new(BigInt::one(), BigInt::from(self.j)),
        };
        for (p, w) in per_left {
            if w.is_some() && (report.witness.is_none() || p > report.max_collision) {
                report.max_collision = p;
                report.witness = w;
            }
        }
        report
    }

    /// Largest fiber of any projection map, over all compatible pairs.
    pub fn max_preimage(&self) -> usize {
        parallel::map_range(self.num_left, |idx| {
            let left = self.left_question(idx);
            self.neighbors(&left)
                .iter()
                .map(|n| {
                    let table = self.projection_table(&left, &n.question).unwrap();
                    let mut counts: HashMap<u32, usize> = HashMap::new();
                    for t in table {
                        *counts.entry(t).or_insert(0) += 1;
                    }
                    counts.values().copied().max().unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        })
        .into_iter()
        .max()
        .unwrap_or(0)
    }

    pub fn left_label(&self, left: &[usize]) -> String {
        let names: Vec<&str> = left.iter().map(|&c| self.system.constraint(c).name.as_str()).collect();
        format!("L[{}]", names.join(","))
    }

    pub fn right_label(&self, right: &[Coord]) -> String {
        let names: Vec<String> = right
            .iter()
            .map(|c| match *c {
                Coord::Constraint(i) => self.system.constraint(i).name.clone(),
                Coord::Variable(x) => self.system.variables()[x].clone(),
            })
            .collect();
        format!("R[{}]", names.join(","))
    }

    /// Explicit game: left questions first, then right questions in order
    /// of first appearance. Also returns the right questions.
    pub fn to_game(&self) -> Result<(NonlocalGame, Vec<DummyQuestion>)> {
        let mut questions: Vec<Question> = (0..self.num_left)
            .map(|idx| {
                let left = self.left_question(idx);
                Question {
                    label: self.left_label(&left),
                    answers: self.left_answers(&left),
                }
            })
            .collect();
        let mut right_index: HashMap<DummyQuestion, usize> = HashMap::new();
        let mut rights = Vec::new();
        let mut pairs = Vec::new();
        let total = BigInt::from(self.num_left);
        for idx in 0..self.num_left {
            let left = self.left_question(idx);
            let den = BigInt::from(self.neighbor_denominator(&left)) * &total;
            for n in self.neighbors(&left) {
                let table = self.projection_table(&left, &n.question)?;
                let next = self.num_left + rights.len();
                let bob = *right_index.entry(n.question.clone()).or_insert_with(|| {
                    questions.push(Question {
                        label: self.right_label(&n.question),
                        answers: self.right_answers(&n.question),
                    });
                    rights.push(n.question.clone());
                    next
                });
                pairs.push(QuestionPair {
                    alice: idx,
                    bob,
                    weight: Rational::new(n.weight.into(), den.clone()),
                    predicate: Predicate::Projection(table.into_iter().map(Some).collect()),
                });
            }
        }
        Ok((NonlocalGame::new(questions, pairs, true)?, rights))
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cs::{Constraint, Literal};
    use crate::rational::ratio;

    /// Three variables, five distinct clauses over all of them.
    fn five_clauses() -> ConstraintSystem {
        let mut s = ConstraintSystem::boolean();
        for v in ["x", "y", "z"] {
            s.intern(v);
        }
        for signs in [0u8, 1, 2, 4, 7] {
            let lits = (0..3)
                .map(|v| Literal {
                    var: v,
                    negated: signs >> v & 1 == 1,
                })
                .collect();
            s.push(Constraint::clause(format!("c{signs}"), lits)).unwrap();
        }
        s
    }

    #[test]
    fn answer_and_neighbor_counts() {
        let s = five_clauses();
        let g = DummyGame::new(&s, 1, 1, 1 << 20).unwrap();
        let left = g.left_question(7);
        assert_eq!(g.left_answers(&left), 49);
        let nbrs = g.neighbors(&left);
        assert_eq!(nbrs.len(), 6);
        assert_eq!(g.right_answers(&nbrs[0].question), 14);
        let total: u64 = nbrs.iter().map(|n| n.weight).sum();
        assert_eq!(total, g.neighbor_denominator(&left));
    }

    #[test]
    fn identity_and_single_replacement_projection() {
        let s = five_clauses();
        let g = DummyGame::new(&s, 1, 1, 1 << 20).unwrap();
        let left = vec![0, 3];
        let right = vec![Coord::Variable(1), Coord::Constraint(3)];
        let sigma = vec![5, 2];
        let phi = &s.constraint(0).relation()[5];
        assert_eq!(g.project_answer(&left, &right, &sigma).unwrap(), vec![phi[1] as usize, 2]);
        let same: Vec<Coord> = left.iter().map(|&c| Coord::Constraint(c)).collect();
        assert!(g.project_answer(&left, &same, &sigma).is_err());
        let bad = vec![Coord::Variable(1), Coord::Constraint(2)];
        assert!(matches!(
            g.project_answer(&left, &bad, &sigma),
            Err(Error::IncompatibleQuestions(_))
        ));
    }

    #[test]
    fn projection_table_agrees_with_direct_projection() {
        let s = five_clauses();
        let g = DummyGame::new(&s, 2, 1, 1 << 20).unwrap();
        let left = vec![1, 4, 2];
        for n in g.neighbors(&left) {
            let table = g.projection_table(&left, &n.question).unwrap();
            let lr = g.left_radices(&left);
            let rr = g.right_radices(&n.question);
            for (a, &t) in table.iter().enumerate() {
                let sigma = DummyGame::decode_answer(&lr, a);
                let tau = g.project_answer(&left, &n.question, &sigma).unwrap();
                assert_eq!(DummyGame::encode_answer(&rr, &tau), t as usize);
            }
        }
    }

    #[test]
    fn replaced_coordinate_probability() {
        let s = five_clauses();
        for (j, r) in [(1, 1), (2, 1), (1, 2)] {
            let g = DummyGame::new(&s, j, r, 1 << 20).unwrap();
            let left = g.left_question(3);
            for q0 in 0..g.len() {
                assert_eq!(g.replaced_probability(&left, q0), ratio(1, j as i64 + 1));
            }
        }
    }

    #[test]
    fn distribution_is_normalized() {
        let s = five_clauses();
        let g = DummyGame::new(&s, 1, 1, 1 << 20).unwrap();
        let (game, rights) = g.to_game().unwrap();
        assert_eq!(rights.len(), 30);
        assert_eq!(game.num_questions(), 25 + 30);
        let left = g.left_question(0);
        let n = &g.neighbors(&left)[0];
        assert_eq!(g.probability(&left, &n.question), ratio(1, 25 * 6));
    }

    #[test]
    fn size_guard() {
        let s = five_clauses();
        assert!(matches!(DummyGame::new(&s, 2, 2, 1000), Err(Error::CapExceeded { .. })));
        assert!(DummyGame::new(&s, 0, 1, 1000).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 1), 3);
        assert_eq!(binomial(2, 3), 0);
    }
}
