//! Constraint systems over `Z_k`, their constraint distributions and
//! connectivity graphs.
//!
//! Relations are stored explicitly as sorted assignment lists. Clauses keep
//! their literal form next to the derived relation, since the reductions
//! need both views.

mod format;

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub use format::{parse_csx, parse_dimacs, parse_system, write_csx, write_dimacs};

/// Values of the variables in a context, in context order.
pub type Assignment = Vec<u8>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    /// Truth of the literal when its variable takes `value` in `Z_2`.
    pub fn holds(self, value: u8) -> bool {
        (value == 1) != self.negated
    }
}

/// How a constraint was produced. Reductions dispatch on this tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintKind {
    General,
    /// Disjunction of the literals over `Z_2`; the context lists the
    /// distinct variables in order of first appearance.
    Clause(Vec<Literal>),
    /// `x = y` on a two-variable context, or the trivially satisfied
    /// unary equality `x = x` produced by a self-loop.
    Equality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    context: Vec<usize>,
    relation: Vec<Assignment>,
    kind: ConstraintKind,
}

impl Constraint {
    /// General constraint. The relation is sorted and deduplicated.
    pub fn new(name: impl Into<String>, context: Vec<usize>, mut relation: Vec<Assignment>) -> Self {
        relation.sort();
        relation.dedup();
        Constraint {
            name: name.into(),
            context,
            relation,
            kind: ConstraintKind::General,
        }
    }

    /// Boolean clause. Repeated variables collapse into one context slot.
    pub fn clause(name: impl Into<String>, literals: Vec<Literal>) -> Self {
        let mut context: Vec<usize> = Vec::new();
        for lit in &literals {
            if !context.contains(&lit.var) {
                context.push(lit.var);
            }
        }
        let relation = all_assignments(2, context.len())
            .filter(|a| {
                literals.iter().any(|lit| {
                    let slot = context.iter().position(|&v| v == lit.var).unwrap();
                    lit.holds(a[slot])
                })
            })
            .collect();
        Constraint {
            name: name.into(),
            context,
            relation,
            kind: ConstraintKind::Clause(literals),
        }
    }

    /// The equality relation `{(a,a)}` over `Z_k`.
    pub fn equality(name: impl Into<String>, alphabet: usize, x: usize, y: usize) -> Self {
        let (context, relation) = if x == y {
            (vec![x], (0..alphabet as u8).map(|a| vec![a]).collect())
        } else {
            (vec![x, y], (0..alphabet as u8).map(|a| vec![a, a]).collect())
        };
        Constraint {
            name: name.into(),
            context,
            relation,
            kind: ConstraintKind::Equality,
        }
    }

    pub fn context(&self) -> &[usize] {
        &self.context
    }

    pub fn relation(&self) -> &[Assignment] {
        &self.relation
    }

    pub fn kind(&self) -> &ConstraintKind {
        &self.kind
    }

    pub fn literals(&self) -> Option<&[Literal]> {
        match &self.kind {
            ConstraintKind::Clause(lits) => Some(lits),
            _ => None,
        }
    }

    pub fn is_3cnf(&self) -> bool {
        matches!(&self.kind, ConstraintKind::Clause(l) if l.len() == 3)
    }

    pub fn arity(&self) -> usize {
        self.context.len()
    }

    /// Width as seen by the degree profile: literal slots for clauses,
    /// context size otherwise.
    pub fn width(&self) -> usize {
        match &self.kind {
            ConstraintKind::Clause(l) => l.len(),
            _ => self.context.len(),
        }
    }

    pub fn slot_of(&self, var: usize) -> Option<usize> {
        self.context.iter().position(|&v| v == var)
    }

    /// Index of `assignment` within the relation.
    pub fn relation_index(&self, assignment: &[u8]) -> Option<usize> {
        self.relation
            .binary_search_by(|a| a.as_slice().cmp(assignment))
            .ok()
    }

    pub fn accepts(&self, assignment: &[u8]) -> bool {
        self.relation_index(assignment).is_some()
    }

    /// Restriction of a global assignment to the context.
    pub fn restrict(&self, global: &[u8]) -> Assignment {
        self.context.iter().map(|&v| global[v]).collect()
    }

    /// Same constraint with variables renamed through `map`.
    pub fn relabel(&self, name: impl Into<String>, map: impl Fn(usize) -> usize) -> Self {
        let kind = match &self.kind {
            ConstraintKind::Clause(lits) => ConstraintKind::Clause(
                lits.iter()
                    .map(|l| Literal {
                        var: map(l.var),
                        negated: l.negated,
                    })
                    .collect(),
            ),
            other => other.clone(),
        };
        Constraint {
            name: name.into(),
            context: self.context.iter().map(|&v| map(v)).collect(),
            relation: self.relation.clone(),
            kind,
        }
    }
}

/// Every assignment in `Z_k^len`, lexicographically.
pub fn all_assignments(alphabet: usize, len: usize) -> impl Iterator<Item = Assignment> {
    let total = alphabet.pow(len as u32);
    (0..total).map(move |mut idx| {
        let mut out = vec![0u8; len];
        for slot in (0..len).rev() {
            out[slot] = (idx % alphabet) as u8;
            idx /= alphabet;
        }
        out
    })
}

/// Satisfying assignments of a constraint in lexicographic order.
pub fn enumerate_satisfying(constraint: &Constraint) -> Vec<Assignment> {
    constraint.relation.clone()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    alphabet: usize,
    variables: Vec<String>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn new(alphabet: usize) -> Self {
        assert!(
            (2..=36).contains(&alphabet),
            "alphabet size must lie in 2..=36"
        );
        ConstraintSystem {
            alphabet,
            variables: Vec::new(),
            index: HashMap::new(),
            constraints: Vec::new(),
        }
    }

    pub fn boolean() -> Self {
        Self::new(2)
    }

    /// Returns the stable index of `name`, adding it when new.
    pub fn intern(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        if let Some(&idx) = self.index.get(&name) {
            return idx;
        }
        let idx = self.variables.len();
        self.index.insert(name.clone(), idx);
        self.variables.push(name);
        idx
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn push(&mut self, constraint: Constraint) -> Result<usize> {
        let id = self.constraints.len();
        self.validate(id, &constraint)?;
        self.constraints.push(constraint);
        Ok(id)
    }

    fn validate(&self, id: usize, c: &Constraint) -> Result<()> {
        if c.relation.is_empty() {
            return Err(Error::Malformed(format!("constraint {id} has an empty relation")));
        }
        for (slot, &v) in c.context.iter().enumerate() {
            if v >= self.variables.len() {
                return Err(Error::Malformed(format!(
                    "constraint {id} references variable {v} of {}",
                    self.variables.len()
                )));
            }
            if c.context[..slot].contains(&v) {
                return Err(Error::Malformed(format!(
                    "constraint {id} repeats variable {v} in its context"
                )));
            }
        }
        for a in &c.relation {
            if a.len() != c.context.len() {
                return Err(Error::Arity {
                    constraint: id,
                    expected: c.context.len(),
                    found: a.len(),
                });
            }
            if a.iter().any(|&v| v as usize >= self.alphabet) {
                return Err(Error::Malformed(format!(
                    "constraint {id} has a value outside Z_{}",
                    self.alphabet
                )));
            }
        }
        if let ConstraintKind::Clause(lits) = &c.kind {
            if self.alphabet != 2 {
                return Err(Error::Malformed("clauses need a boolean alphabet".into()));
            }
            let expected = Constraint::clause(c.name.clone(), lits.clone());
            if expected.context != c.context || expected.relation != c.relation {
                return Err(Error::Malformed(format!(
                    "constraint {id}: relation differs from its clause literals"
                )));
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, i: usize) -> &Constraint {
        &self.constraints[i]
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_boolean(&self) -> bool {
        self.alphabet == 2
    }

    pub fn is_satisfied_by(&self, global: &[u8]) -> bool {
        self.constraints.iter().all(|c| c.accepts(&c.restrict(global)))
    }

    /// For every variable, the constraints whose context contains it, in
    /// increasing order.
    pub fn occurrences(&self) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); self.variables.len()];
        for (i, c) in self.constraints.iter().enumerate() {
            for &v in &c.context {
                occ[v].push(i);
            }
        }
        occ
    }
}

/// Exact probability weights, one per constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintDistribution {
    weights: Vec<Rational>,
}

impl ConstraintDistribution {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !rational::is_nonnegative(w)) {
            return Err(Error::Malformed(format!("negative weight {w}")));
        }
        let total = rational::sum(&weights);
        if !total.is_one() {
            return Err(Error::WeightSum {
                sum: rational::format_rational(&total),
            });
        }
        Ok(ConstraintDistribution { weights })
    }

    pub fn uniform(m: usize) -> Self {
        ConstraintDistribution {
            weights: vec![rational::recip(m); m],
        }
    }

    pub fn point_mass(m: usize, at: usize) -> Self {
        let mut weights = vec![Rational::zero(); m];
        weights[at] = Rational::one();
        ConstraintDistribution { weights }
    }

    /// Rescales nonnegative weights with positive total to sum to one.
    pub fn normalized(weights: Vec<Rational>) -> Result<Self> {
        let total = rational::sum(&weights);
        if total.is_zero() {
            return Err(Error::Malformed("distribution has zero mass".into()));
        }
        Self::new(weights.into_iter().map(|w| w / &total).collect())
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn check_matches(&self, system: &ConstraintSystem) -> Result<()> {
        if self.len() != system.num_constraints() {
            return Err(Error::Shape(format!(
                "distribution has {} weights for {} constraints",
                self.len(),
                system.num_constraints()
            )));
        }
        Ok(())
    }
}

/// Bipartite graph between variables (left) and constraints (right).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    pub num_left: usize,
    pub num_right: usize,
    /// `(variable, constraint)` pairs.
    pub edges: Vec<(usize, usize)>,
}

impl ConnectivityGraph {
    pub fn left_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_left];
        for &(x, _) in &self.edges {
            deg[x] += 1;
        }
        deg
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_right];
        for &(_, i) in &self.edges {
            deg[i] += 1;
        }
        deg
    }
}

pub fn connectivity_graph(system: &ConstraintSystem) -> ConnectivityGraph {
    let edges = system
        .constraints
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.context.iter().map(move |&x| (x, i)))
        .collect();
    ConnectivityGraph {
        num_left: system.num_variables(),
        num_right: system.num_constraints(),
        edges,
    }
}

/// Degree histograms of a connectivity graph.
///
/// Left degrees count the constraints containing a variable. Right degrees
/// count literal slots for clauses (so `x ∨ x ∨ ¬y` has width 3) and the
/// context size for everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub left: BTreeMap<usize, usize>,
    pub right: BTreeMap<usize, usize>,
    pub all_3cnf: bool,
}

impl DegreeProfile {
    /// Every constraint is a 3-literal clause and every variable sits in
    /// exactly `k` constraints.
    pub fn is_3sat_k(&self, k: usize) -> bool {
        self.all_3cnf && self.left.keys().all(|&d| d == k)
    }
}

pub fn degree_profile(system: &ConstraintSystem) -> DegreeProfile {
    let graph = connectivity_graph(system);
    let mut left = BTreeMap::new();
    for d in graph.left_degrees() {
        *left.entry(d).or_insert(0) += 1;
    }
    let mut right = BTreeMap::new();
    for c in system.constraints() {
        *right.entry(c.width()).or_insert(0) += 1;
    }
    DegreeProfile {
        left,
        right,
        all_3cnf: system.constraints().iter().all(Constraint::is_3cnf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_clause() -> ConstraintSystem {
        let mut s = ConstraintSystem::boolean();
        let x = s.intern("x");
        let y = s.intern("y");
        let z = s.intern("z");
        s.push(Constraint::clause(
            "c0",
            vec![Literal::pos(x), Literal::pos(y), Literal::pos(z)],
        ))
        .unwrap();
        s
    }

    #[test]
    fn clause_enumeration_excludes_only_the_falsifying_point() {
        let s = single_clause();
        let sat = enumerate_satisfying(s.constraint(0));
        assert_eq!(sat.len(), 7);
        assert!(!sat.contains(&vec![0, 0, 0]));
        assert!(sat.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn repeated_literal_clause_has_two_variables() {
        let mut s = ConstraintSystem::boolean();
        let x = s.intern("x");
        let y = s.intern("y");
        let c = Constraint::clause("c", vec![Literal::neg(x), Literal::pos(y), Literal::pos(y)]);
        assert_eq!(c.context(), &[x, y]);
        assert_eq!(enumerate_satisfying(&c), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(c.width(), 3);
        s.push(c).unwrap();
    }

    #[test]
    fn equality_relation() {
        let c = Constraint::equality("e", 2, 0, 1);
        assert_eq!(enumerate_satisfying(&c), vec![vec![0, 0], vec![1, 1]]);
        let loop_eq = Constraint::equality("l", 2, 3, 3);
        assert_eq!(loop_eq.context(), &[3]);
        assert_eq!(loop_eq.relation().len(), 2);
    }

    #[test]
    fn single_clause_graph() {
        let s = single_clause();
        let g = connectivity_graph(&s);
        assert_eq!(g.left_degrees(), vec![1, 1, 1]);
        assert_eq!(g.right_degrees(), vec![3]);
        let p = degree_profile(&s);
        assert_eq!(p.left.get(&1), Some(&3));
        assert!(p.is_3sat_k(1));
        assert!(!p.is_3sat_k(5));
    }

    #[test]
    fn shared_variable_degree() {
        let mut s = single_clause();
        let w = s.intern("w");
        let u = s.intern("u");
        s.push(Constraint::clause(
            "c1",
            vec![Literal::pos(0), Literal::neg(w), Literal::pos(u)],
        ))
        .unwrap();
        let g = connectivity_graph(&s);
        assert_eq!(g.left_degrees()[0], 2);
    }

    #[test]
    fn rejects_malformed_constraints() {
        let mut s = ConstraintSystem::boolean();
        s.intern("x");
        assert!(matches!(
            s.push(Constraint::new("bad", vec![0], vec![vec![0, 1]])),
            Err(Error::Arity { .. })
        ));
        assert!(s.push(Constraint::new("empty", vec![0], vec![])).is_err());
        assert!(s.push(Constraint::new("range", vec![4], vec![vec![0]])).is_err());
        assert!(s.push(Constraint::new("repeat", vec![0, 0], vec![vec![0, 0]])).is_err());
    }

    #[test]
    fn distribution_sum_is_exact() {
        assert!(ConstraintDistribution::new(vec![rational::ratio(1, 3), rational::ratio(2, 3)]).is_ok());
        assert!(matches!(
            ConstraintDistribution::new(vec![rational::ratio(1, 3), rational::ratio(1, 3)]),
            Err(Error::WeightSum { .. })
        ));
        assert!(ConstraintDistribution::new(vec![rational::ratio(-1, 3), rational::ratio(4, 3)]).is_err());
    }
}
