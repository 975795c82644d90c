//! 3SAT to 3SAT5 by two rounds of replacement and gadget.

use super::replacement::{equality_to_3cnf, g_replacement, GraphFamily};
use crate::cs::{ConstraintDistribution, ConstraintSystem};
use crate::error::{Error, Result};
use crate::expanders;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineParams {
    /// Degree of the expanders used in the first round.
    pub degree: usize,
    pub lambda_min: f64,
    pub seed: u64,
    pub attempts: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            degree: 4,
            lambda_min: 0.05,
            seed: 0,
            attempts: expanders::DEFAULT_ATTEMPTS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThreeSat5 {
    pub system: ConstraintSystem,
    /// `None` only for an empty input.
    pub distribution: Option<ConstraintDistribution>,
    /// Output variable to the input variable it copies.
    pub variable_origin: Vec<usize>,
    /// Smallest certified expansion used in each round.
    pub lambdas: [f64; 2],
}

impl ThreeSat5 {
    pub fn lift_assignment(&self, assignment: &[u8]) -> Vec<u8> {
        self.variable_origin.iter().map(|&x| assignment[x]).collect()
    }
}

/// Expander replacement, gadget, cycle replacement, gadget.
///
/// After the first two steps every variable sits in `2d + 1` clauses, so the
/// cycle round works on `C_{2d+1}` and every final variable is in one copy
/// clause plus two gadget pairs: five clauses. Variables in no clause are
/// dropped.
pub fn to_3sat5(system: &ConstraintSystem, pi: Option<&ConstraintDistribution>, params: &PipelineParams) -> Result<ThreeSat5> {
    if !system.is_boolean() || !system.constraints().iter().all(|c| c.is_3cnf()) {
        return Err(Error::Malformed("input must be a 3CNF formula".into()));
    }
    if system.num_constraints() == 0 {
        return Ok(ThreeSat5 {
            system: ConstraintSystem::boolean(),
            distribution: None,
            variable_origin: Vec::new(),
            lambdas: [1.0, 1.0],
        });
    }
    let uniform;
    let pi = match pi {
        Some(p) => p,
        None => {
            uniform = ConstraintDistribution::uniform(system.num_constraints());
            &uniform
        }
    };
    let family = GraphFamily::Expander {
        degree: params.degree,
        lambda_min: params.lambda_min,
        seed: params.seed,
        attempts: params.attempts,
    };
    let first = g_replacement(system, pi, &family)?;
    let gadget = equality_to_3cnf(&first.system, Some(&first.distribution))?;
    let second = g_replacement(&gadget.system, gadget.distribution.as_ref().unwrap(), &GraphFamily::Cycle)?;
    let last = equality_to_3cnf(&second.system, Some(&second.distribution))?;
    let variable_origin = second
        .variable_origin
        .iter()
        .map(|&(y, _)| first.variable_origin[y].0)
        .collect();
    Ok(ThreeSat5 {
        system: last.system,
        distribution: last.distribution,
        variable_origin,
        lambdas: [first.lambda(), second.lambda()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cs::{degree_profile, Constraint, Literal};

    #[test]
    fn small_formula_becomes_3sat5() {
        let mut s = ConstraintSystem::boolean();
        for v in ["a", "b", "c", "d"] {
            s.intern(v);
        }
        let clauses = [[(0, false), (1, true), (2, false)], [(0, true), (2, false), (3, false)], [(1, false), (1, false), (3, true)]];
        for (i, cl) in clauses.iter().enumerate() {
            let lits = cl.iter().map(|&(v, n)| Literal { var: v, negated: n }).collect();
            s.push(Constraint::clause(format!("c{i}"), lits)).unwrap();
        }
        let out = to_3sat5(&s, None, &PipelineParams::default()).unwrap();
        let profile = degree_profile(&out.system);
        assert!(profile.is_3sat_k(5), "{profile:?}");
        let a = vec![1, 0, 1, 0];
        assert!(s.is_satisfied_by(&a));
        assert!(out.system.is_satisfied_by(&out.lift_assignment(&a)));
    }

    #[test]
    fn empty_input() {
        let out = to_3sat5(&ConstraintSystem::boolean(), None, &PipelineParams::default()).unwrap();
        assert_eq!(out.system.num_constraints(), 0);
        assert!(out.distribution.is_none());
    }
}
