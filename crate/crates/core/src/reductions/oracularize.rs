//! Two-oracularization of a 3SAT5 instance and uniformization by repetition.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::cs::{degree_profile, Constraint, ConstraintDistribution, ConstraintSystem, Literal};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Copies of each clause over its local variables.
pub const CLAUSE_COPIES: usize = 7;

#[derive(Debug, Clone)]
pub struct TwoOracularized {
    pub system: ConstraintSystem,
    /// Input variables keep their indices; each `(x, u)` incidence adds a
    /// local copy. Maps every output variable to its input variable.
    pub variable_origin: Vec<usize>,
    /// `(x, u, local index)` for each local copy.
    pub locals: Vec<(usize, usize, usize)>,
}

impl TwoOracularized {
    pub fn lift_assignment(&self, assignment: &[u8]) -> Vec<u8> {
        self.variable_origin.iter().map(|&x| assignment[x]).collect()
    }
}

/// Seven copies of each clause `u` over local copies `x_u`, and the linking
/// clauses `x | x | ~x_u` and `x_u | x_u | ~x` for every incidence.
pub fn two_oracularize(system: &ConstraintSystem) -> Result<TwoOracularized> {
    if !degree_profile(system).is_3sat_k(5) {
        return Err(Error::Malformed("input is not a 3SAT5 instance".into()));
    }
    let mut out = ConstraintSystem::boolean();
    for name in system.variables() {
        out.intern(name.clone());
    }
    let mut variable_origin: Vec<usize> = (0..system.num_variables()).collect();
    let mut locals = Vec::new();
    let mut local_of: Vec<Vec<usize>> = Vec::with_capacity(system.num_constraints());
    for (u, c) in system.constraints().iter().enumerate() {
        let ids: Vec<usize> = c
            .context()
            .iter()
            .map(|&x| {
                let id = out.intern(format!("{}_{}", system.variables()[x], u));
                variable_origin.push(x);
                locals.push((x, u, id));
                id
            })
            .collect();
        local_of.push(ids);
    }
    for (u, c) in system.constraints().iter().enumerate() {
        for r in 0..CLAUSE_COPIES {
            let copy = c.relabel(format!("{}.{}", c.name, r), |x| local_of[u][c.slot_of(x).unwrap()]);
            out.push(copy)?;
        }
        for (slot, &x) in c.context().iter().enumerate() {
            let xu = local_of[u][slot];
            out.push(Constraint::clause(
                format!("v_{}", out.variables()[xu]),
                vec![Literal::pos(x), Literal::pos(x), Literal::neg(xu)],
            ))?;
            out.push(Constraint::clause(
                format!("w_{}", out.variables()[xu]),
                vec![Literal::pos(xu), Literal::pos(xu), Literal::neg(x)],
            ))?;
        }
    }
    Ok(TwoOracularized {
        system: out,
        variable_origin,
        locals,
    })
}

/// Unordered pairs of distinct variables at distance one or two in the
/// graph joining variables that share a context.
pub fn commutation_pairs(system: &ConstraintSystem) -> Vec<(usize, usize)> {
    let n = system.num_variables();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for c in system.constraints() {
        for &a in c.context() {
            for &b in c.context() {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for a in 0..n {
        for &b in &adj[a] {
            out.insert((a.min(b), a.max(b)));
            for &c in &adj[b] {
                if c != a {
                    out.insert((a.min(c), a.max(c)));
                }
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct Uniformized {
    pub system: ConstraintSystem,
    /// Repetitions `ceil(N^2 pi(i))` of each input constraint.
    pub counts: Vec<usize>,
    /// Output constraint to input constraint.
    pub origin: Vec<usize>,
}

impl Uniformized {
    pub fn distribution(&self) -> ConstraintDistribution {
        ConstraintDistribution::uniform(self.system.num_constraints())
    }
}

/// Repeats constraint `i` `ceil(N^2 pi(i))` times so the uniform
/// distribution approximates `pi`. Needs `N >= m`, which keeps the output
/// size between `N^2` and `N^2 + N`.
pub fn uniformize_by_repetition(system: &ConstraintSystem, pi: &ConstraintDistribution, n: usize) -> Result<Uniformized> {
    pi.check_matches(system)?;
    if n < system.num_constraints() {
        return Err(Error::Malformed(format!(
            "N = {n} is below the constraint count {}",
            system.num_constraints()
        )));
    }
    let n2 = Rational::from_integer(BigInt::from(n) * BigInt::from(n));
    let mut out = ConstraintSystem::new(system.alphabet());
    for name in system.variables() {
        out.intern(name.clone());
    }
    let mut counts = Vec::new();
    let mut origin = Vec::new();
    for (i, c) in system.constraints().iter().enumerate() {
        let count = rational::ceil(&(pi.weight(i) * &n2))
            .to_usize()
            .ok_or_else(|| Error::Malformed("repetition count overflow".into()))?;
        for r in 0..count {
            out.push(c.relabel(format!("{}#{r}", c.name), |x| x))?;
            origin.push(i);
        }
        counts.push(count);
    }
    Ok(Uniformized {
        system: out,
        counts,
        origin,
    })
}

/// `max_i |pi(i) - count_i / m'|`, exactly.
pub fn uniformization_error(pi: &ConstraintDistribution, u: &Uniformized) -> Rational {
    let total = Rational::from_integer(BigInt::from(u.system.num_constraints()));
    u.counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let d = pi.weight(i) - Rational::from_integer(BigInt::from(c)) / &total;
            if d < Rational::from_integer(0.into()) {
                -d
            } else {
                d
            }
        })
        .max()
        .unwrap_or_else(|| Rational::from_integer(0.into()))
}
