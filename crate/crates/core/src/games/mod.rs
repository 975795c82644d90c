//! Two-player nonlocal games with exact question distributions.
//!
//! Questions form one shared list; a deterministic strategy assigns one
//! answer per question, which at dimension one is the synchronous form of
//! a classical strategy. The distribution is a sparse list of ordered
//! question pairs. A pair may appear several times; its weights add.

pub mod dummy;
mod nlg;

use num_traits::{One, Zero};

use crate::cs::{ConstraintDistribution, ConstraintSystem};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub use dummy::{Coord, DummyGame, DummyQuestion};
pub use nlg::{parse_nlg, write_nlg};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub label: String,
    pub answers: usize,
}

/// Acceptance rule `V(a, b | i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    /// Row-major `answers(i) x answers(j)` acceptance table.
    Table(Vec<bool>),
    /// `V(a, b) = 1` iff `b == map[a]`; `None` rejects every `b`.
    Projection(Vec<Option<u32>>),
}

impl Predicate {
    pub fn accepts(&self, a: usize, b: usize, answers_b: usize) -> bool {
        match self {
            Predicate::Table(t) => t[a * answers_b + b],
            Predicate::Projection(p) => p[a] == Some(b as u32),
        }
    }

    /// Accepted answer pairs in row-major order.
    pub fn accepted_pairs(&self, answers_a: usize, answers_b: usize) -> Vec<(usize, usize)> {
        match self {
            Predicate::Table(t) => (0..answers_a)
                .flat_map(|a| (0..answers_b).map(move |b| (a, b)))
                .filter(|&(a, b)| t[a * answers_b + b])
                .collect(),
            Predicate::Projection(p) => p
                .iter()
                .enumerate()
                .filter_map(|(a, b)| b.map(|b| (a, b as usize)))
                .collect(),
        }
    }

    pub fn to_table(&self, answers_a: usize, answers_b: usize) -> Vec<bool> {
        match self {
            Predicate::Table(t) => t.clone(),
            Predicate::Projection(_) => {
                let mut t = vec![false; answers_a * answers_b];
                for (a, b) in self.accepted_pairs(answers_a, answers_b) {
                    t[a * answers_b + b] = true;
                }
                t
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionPair {
    pub alice: usize,
    pub bob: usize,
    pub weight: Rational,
    pub predicate: Predicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonlocalGame {
    questions: Vec<Question>,
    pairs: Vec<QuestionPair>,
    synchronous: bool,
}

impl NonlocalGame {
    /// Validates shapes, the exact unit mass, and, when `synchronous` is
    /// declared, that no pair `(i, i)` accepts differing answers.
    pub fn new(questions: Vec<Question>, pairs: Vec<QuestionPair>, synchronous: bool) -> Result<Self> {
        for (idx, q) in questions.iter().enumerate() {
            if q.answers == 0 {
                return Err(Error::Malformed(format!("question {idx} has no answers")));
            }
        }
        let mut total = Rational::zero();
        for (idx, p) in pairs.iter().enumerate() {
            let (Some(qa), Some(qb)) = (questions.get(p.alice), questions.get(p.bob)) else {
                return Err(Error::Malformed(format!("pair {idx} references a missing question")));
            };
            if !rational::is_nonnegative(&p.weight) {
                return Err(Error::Malformed(format!("pair {idx} has negative weight")));
            }
            let ok = match &p.predicate {
                Predicate::Table(t) => t.len() == qa.answers * qb.answers,
                Predicate::Projection(m) => {
                    m.len() == qa.answers && m.iter().flatten().all(|&b| (b as usize) < qb.answers)
                }
            };
            if !ok {
                return Err(Error::Shape(format!("pair {idx}: predicate does not match answer sets")));
            }
            total += &p.weight;
        }
        if !total.is_one() {
            return Err(Error::WeightSum {
                sum: rational::format_rational(&total),
            });
        }
        let game = NonlocalGame {
            questions,
            pairs,
            synchronous,
        };
        if synchronous {
            if let Some(idx) = game.synchrony_violation() {
                return Err(Error::Invariant(format!(
                    "pair {idx} accepts differing answers on a repeated question"
                )));
            }
        }
        Ok(game)
    }

    /// First pair `(i, i)` of positive weight accepting some `a != b`.
    pub fn synchrony_violation(&self) -> Option<usize> {
        self.pairs.iter().position(|p| {
            p.alice == p.bob
                && !p.weight.is_zero()
                && p.predicate
                    .accepted_pairs(self.questions[p.alice].answers, self.questions[p.bob].answers)
                    .iter()
                    .any(|&(a, b)| a != b)
        })
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn pairs(&self) -> &[QuestionPair] {
        &self.pairs
    }

    pub fn synchronous(&self) -> bool {
        self.synchronous
    }

    pub fn num_questions(&self) -> usize {
        self.questions.len()
    }

    pub fn answers(&self, q: usize) -> usize {
        self.questions[q].answers
    }

    /// Exact value of a deterministic strategy.
    pub fn deterministic_value(&self, assignment: &[usize]) -> Rational {
        self.pairs
            .iter()
            .filter(|p| {
                p.predicate
                    .accepts(assignment[p.alice], assignment[p.bob], self.answers(p.bob))
            })
            .fold(Rational::zero(), |acc, p| acc + &p.weight)
    }

    /// Total weight of pairs touching each question.
    pub fn marginals(&self) -> Vec<Rational> {
        let mut m = vec![Rational::zero(); self.questions.len()];
        for p in &self.pairs {
            m[p.alice] += &p.weight;
            if p.bob != p.alice {
                m[p.bob] += &p.weight;
            }
        }
        m
    }
}

/// Enumeration order of answers for a constraint question: all of
/// `Z_k^{|U_i|}`, lexicographically.
pub fn constraint_answer_index(alphabet: usize, assignment: &[u8]) -> usize {
    assignment
        .iter()
        .fold(0, |acc, &v| acc * alphabet + v as usize)
}

/// Questions `0..m` are constraints, `m..m+n` variables.
pub fn constraint_variable_game(system: &ConstraintSystem, mu: &ConstraintDistribution) -> Result<NonlocalGame> {
    mu.check_matches(system)?;
    let k = system.alphabet();
    let m = system.num_constraints();
    let mut questions = Vec::with_capacity(m + system.num_variables());
    for c in system.constraints() {
        let answers = k
            .checked_pow(c.arity() as u32)
            .filter(|&a| a <= 1 << 24)
            .ok_or_else(|| Error::CapExceeded {
                what: format!("answer set of constraint {}", c.name),
                needed: (k as u128).saturating_pow(c.arity() as u32),
                cap: 1 << 24,
            })?;
        questions.push(Question {
            label: c.name.clone(),
            answers,
        });
    }
    for name in system.variables() {
        questions.push(Question {
            label: name.clone(),
            answers: k,
        });
    }
    let mut pairs = Vec::new();
    for (i, c) in system.constraints().iter().enumerate() {
        let weight = mu.weight(i) / Rational::from_integer(c.arity().into());
        let answers = questions[i].answers;
        for (slot, &x) in c.context().iter().enumerate() {
            let mut map = vec![None; answers];
            for phi in c.relation() {
                map[constraint_answer_index(k, phi)] = Some(phi[slot] as u32);
            }
            pairs.push(QuestionPair {
                alice: i,
                bob: m + x,
                weight: weight.clone(),
                predicate: Predicate::Projection(map),
            });
        }
    }
    NonlocalGame::new(questions, pairs, true)
}

/// Questions are the variables; each binary constraint contributes both
/// orders of its pair with half its weight.
pub fn two_cs_game(system: &ConstraintSystem, pi: &ConstraintDistribution) -> Result<NonlocalGame> {
    pi.check_matches(system)?;
    let k = system.alphabet();
    let questions = system
        .variables()
        .iter()
        .map(|name| Question {
            label: name.clone(),
            answers: k,
        })
        .collect();
    let half = rational::ratio(1, 2);
    let mut pairs = Vec::new();
    for (i, c) in system.constraints().iter().enumerate() {
        let &[x, y] = c.context() else {
            return Err(Error::Malformed(format!(
                "constraint {i} has {} variables, a 2-CS needs 2",
                c.arity()
            )));
        };
        let mut forward = vec![false; k * k];
        let mut backward = vec![false; k * k];
        for phi in c.relation() {
            let (a, b) = (phi[0] as usize, phi[1] as usize);
            forward[a * k + b] = true;
            backward[b * k + a] = true;
        }
        let w = pi.weight(i) * &half;
        pairs.push(QuestionPair {
            alice: x,
            bob: y,
            weight: w.clone(),
            predicate: Predicate::Table(forward),
        });
        pairs.push(QuestionPair {
            alice: y,
            bob: x,
            weight: w,
            predicate: Predicate::Table(backward),
        });
    }
    NonlocalGame::new(questions, pairs, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cs::{Constraint, Literal};
    use crate::rational::ratio;

    fn clause_system() -> ConstraintSystem {
        let mut s = ConstraintSystem::boolean();
        for v in ["x", "y", "z"] {
            s.intern(v);
        }
        s.push(Constraint::clause(
            "c",
            vec![Literal::pos(0), Literal::pos(1), Literal::pos(2)],
        ))
        .unwrap();
        s
    }

    #[test]
    fn single_clause_cv_game() {
        let s = clause_system();
        let g = constraint_variable_game(&s, &ConstraintDistribution::point_mass(1, 0)).unwrap();
        assert_eq!(g.pairs().len(), 3);
        assert!(g.pairs().iter().all(|p| p.weight == ratio(1, 3)));
        // the falsifying assignment 000 is rejected against every answer
        let p = &g.pairs()[0];
        assert!(!p.predicate.accepts(0, 0, 2) && !p.predicate.accepts(0, 1, 2));
        assert!(p.predicate.accepts(0b100, 1, 2));
    }

    #[test]
    fn equality_two_cs_game() {
        let mut s = ConstraintSystem::boolean();
        s.intern("x");
        s.intern("y");
        s.push(Constraint::equality("e", 2, 0, 1)).unwrap();
        let g = two_cs_game(&s, &ConstraintDistribution::uniform(1)).unwrap();
        assert_eq!(g.pairs().len(), 2);
        assert_eq!(g.pairs()[0].weight, ratio(1, 2));
        assert_eq!(g.pairs()[0].predicate.accepted_pairs(2, 2), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn two_cs_rejects_wide_contexts() {
        let s = clause_system();
        assert!(two_cs_game(&s, &ConstraintDistribution::uniform(1)).is_err());
    }

    #[test]
    fn synchronous_flag_is_validated() {
        let q = vec![Question {
            label: "q".into(),
            answers: 2,
        }];
        let pairs = vec![QuestionPair {
            alice: 0,
            bob: 0,
            weight: ratio(1, 1),
            predicate: Predicate::Table(vec![true, true, false, true]),
        }];
        assert!(NonlocalGame::new(q.clone(), pairs.clone(), true).is_err());
        let g = NonlocalGame::new(q, pairs, false).unwrap();
        assert_eq!(g.synchrony_violation(), Some(0));
    }

    #[test]
    fn mass_must_be_one() {
        let q = vec![Question {
            label: "q".into(),
            answers: 1,
        }];
        let pairs = vec![QuestionPair {
            alice: 0,
            bob: 0,
            weight: ratio(1, 2),
            predicate: Predicate::Table(vec![true]),
        }];
        assert!(matches!(NonlocalGame::new(q, pairs, true), Err(Error::WeightSum { .. })));
    }
}
