#![allow(dead_code)]

use gamereduce::cs::{Constraint, ConstraintSystem, Literal};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn vars(names: &[&str]) -> ConstraintSystem {
    let mut s = ConstraintSystem::boolean();
    for v in names {
        s.intern(*v);
    }
    s
}

/// Three variables and five distinct clauses over all of them: every
/// variable has degree 5.
pub fn five_clauses() -> ConstraintSystem {
    let mut s = vars(&["x", "y", "z"]);
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

pub fn five_clauses_solutions() -> Vec<Vec<u8>> {
    vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]
}

fn random_clause<R: Rng>(n: usize, rng: &mut R) -> Vec<Literal> {
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(rng);
    vs[..3]
        .iter()
        .map(|&var| Literal {
            var,
            negated: rng.gen_bool(0.5),
        })
        .collect()
}

/// `m` clauses on 3 distinct variables each, all satisfied by `planted`.
pub fn planted_3cnf<R: Rng>(planted: &[u8], m: usize, rng: &mut R) -> ConstraintSystem {
    let n = planted.len();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut s = ConstraintSystem::boolean();
    for name in &names {
        s.intern(name.clone());
    }
    while s.num_constraints() < m {
        let lits = random_clause(n, rng);
        if lits.iter().any(|l| l.holds(planted[l.var])) {
            let name = format!("c{}", s.num_constraints());
            s.push(Constraint::clause(name, lits)).unwrap();
        }
    }
    s
}

/// Random 3-literal clauses with no satisfiability guarantee.
pub fn random_3cnf<R: Rng>(n: usize, m: usize, rng: &mut R) -> ConstraintSystem {
    let mut s = ConstraintSystem::boolean();
    for i in 0..n {
        s.intern(format!("v{i}"));
    }
    for i in 0..m {
        s.push(Constraint::clause(format!("c{i}"), random_clause(n, rng))).unwrap();
    }
    s
}
