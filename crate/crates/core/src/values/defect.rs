//! Constraint-variable strategies, their defect, and the soundness
//! roundings of the replacement step.

use rand::Rng;

use super::rounding::round_povm_to_pvm;
use super::strategy::FiniteDimStrategy;
use crate::cs::{ConstraintDistribution, ConstraintSystem};
use crate::error::{Error, Result};
use crate::games::constraint_answer_index;
use crate::linalg::{self, CMat};
use crate::rational;
use crate::reductions::Replacement;

/// A PVM over the relation of every constraint, indexed like the relation,
/// and a PVM over `Z_k` for every variable.
#[derive(Debug, Clone, PartialEq)]
pub struct CvStrategy {
    pub dim: usize,
    pub constraints: Vec<Vec<CMat>>,
    pub variables: Vec<Vec<CMat>>,
}

impl CvStrategy {
    pub fn random<R: Rng + ?Sized>(system: &ConstraintSystem, dim: usize, rng: &mut R) -> Self {
        CvStrategy {
            dim,
            constraints: system
                .constraints()
                .iter()
                .map(|c| linalg::random_pvm(dim, c.relation().len(), rng))
                .collect(),
            variables: (0..system.num_variables())
                .map(|_| linalg::random_pvm(dim, system.alphabet(), rng))
                .collect(),
        }
    }

    /// Block-diagonal strategy mixing the given assignments, conjugated by
    /// `u`: the `t`-th basis vector answers according to `assignments[t]`.
    /// Perfect when every assignment satisfies the system.
    pub fn from_assignments(system: &ConstraintSystem, assignments: &[Vec<u8>], u: &CMat) -> Result<Self> {
        let dim = assignments.len();
        if u.nrows() != dim {
            return Err(Error::Shape("unitary size must equal the number of assignments".into()));
        }
        let mut constraints = Vec::new();
        for c in system.constraints() {
            let mut labels = Vec::with_capacity(dim);
            for a in assignments {
                labels.push(
                    c.relation_index(&c.restrict(a))
                        .ok_or_else(|| Error::Invariant(format!("assignment violates {}", c.name)))?,
                );
            }
            constraints.push(linalg::pvm_from_labels(&labels, c.relation().len(), u));
        }
        let variables = (0..system.num_variables())
            .map(|x| {
                let labels: Vec<usize> = assignments.iter().map(|a| a[x] as usize).collect();
                linalg::pvm_from_labels(&labels, system.alphabet(), u)
            })
            .collect();
        Ok(CvStrategy {
            dim,
            constraints,
            variables,
        })
    }

    pub fn check(&self, system: &ConstraintSystem) -> Result<()> {
        if self.constraints.len() != system.num_constraints() || self.variables.len() != system.num_variables() {
            return Err(Error::Shape("strategy does not cover the system".into()));
        }
        for (i, c) in system.constraints().iter().enumerate() {
            if self.constraints[i].len() != c.relation().len() {
                return Err(Error::Shape(format!("constraint {i}: one operator per satisfying assignment")));
            }
        }
        if self.variables.iter().any(|f| f.len() != system.alphabet()) {
            return Err(Error::Shape("variable PVMs need one operator per symbol".into()));
        }
        Ok(())
    }

    /// `Pi_a(sigma_i(x))`: the constraint measurement coarse-grained to the
    /// value of the variable in slot `slot`.
    pub fn marginal(&self, system: &ConstraintSystem, i: usize, slot: usize, a: u8) -> CMat {
        let c = system.constraint(i);
        let mut m = linalg::zeros(self.dim);
        for (s, phi) in c.relation().iter().enumerate() {
            if phi[slot] == a {
                m += &self.constraints[i][s];
            }
        }
        m
    }

    /// The same strategy on the constraint-variable game: constraint
    /// questions answer in all of `Z_k^{|U_i|}` with zero operators on
    /// unsatisfying assignments.
    pub fn to_game_strategy(&self, system: &ConstraintSystem) -> FiniteDimStrategy {
        let k = system.alphabet();
        let mut ops = Vec::new();
        for (i, c) in system.constraints().iter().enumerate() {
            let mut family = vec![linalg::zeros(self.dim); k.pow(c.arity() as u32)];
            for (s, phi) in c.relation().iter().enumerate() {
                family[constraint_answer_index(k, phi)] = self.constraints[i][s].clone();
            }
            ops.push(family);
        }
        ops.extend(self.variables.iter().cloned());
        FiniteDimStrategy::new_unchecked(self.dim, ops)
    }

    /// Inverse of [`CvStrategy::to_game_strategy`]. Fails when a constraint
    /// question puts weight above `tol` on an unsatisfying assignment.
    pub fn from_game_strategy(system: &ConstraintSystem, strategy: &FiniteDimStrategy, tol: f64) -> Result<Self> {
        let m = system.num_constraints();
        if strategy.num_questions() != m + system.num_variables() {
            return Err(Error::Shape("strategy does not match the constraint-variable game".into()));
        }
        let k = system.alphabet();
        let mut constraints = Vec::with_capacity(m);
        for (i, c) in system.constraints().iter().enumerate() {
            let family = strategy.family(i);
            if family.len() != k.pow(c.arity() as u32) {
                return Err(Error::Shape(format!("constraint {i}: expected {} outcomes", k.pow(c.arity() as u32))));
            }
            let keep: Vec<usize> = c.relation().iter().map(|phi| constraint_answer_index(k, phi)).collect();
            for (a, op) in family.iter().enumerate() {
                if !keep.contains(&a) && op.norm() > tol {
                    return Err(Error::Invariant(format!(
                        "constraint {i} answers an unsatisfying assignment with weight {:.3e}",
                        op.norm()
                    )));
                }
            }
            constraints.push(keep.iter().map(|&a| family[a].clone()).collect());
        }
        let variables = (m..strategy.num_questions()).map(|q| strategy.family(q).to_vec()).collect();
        let out = CvStrategy {
            dim: strategy.dim(),
            constraints,
            variables,
        };
        out.check(system)?;
        Ok(out)
    }

    /// `sigma'(x)` as the order-two unitary `Pi_0 - Pi_1`, for boolean systems.
    pub fn observable(&self, x: usize) -> CMat {
        &self.variables[x][0] - &self.variables[x][1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub total: f64,
    pub per_constraint: Vec<f64>,
}

/// Defect as `sum_{i, x in V_i, a} w(i)/(2|V_i|) ||Pi_a(sigma_i(x)) - Pi_a(sigma'(x))||^2`.
pub fn defect_cv_weighted(system: &ConstraintSystem, weights: &[f64], strategy: &CvStrategy) -> Result<DefectReport> {
    strategy.check(system)?;
    if weights.len() != system.num_constraints() {
        return Err(Error::Shape("one weight per constraint".into()));
    }
    let per_constraint: Vec<f64> = system
        .constraints()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let scale = weights[i] / (2.0 * c.arity() as f64);
            let mut acc = 0.0;
            for (slot, &x) in c.context().iter().enumerate() {
                for a in 0..system.alphabet() {
                    let diff = strategy.marginal(system, i, slot, a as u8) - &strategy.variables[x][a];
                    acc += linalg::tau_norm_sq(&diff);
                }
            }
            scale * acc
        })
        .collect();
    Ok(DefectReport {
        total: per_constraint.iter().sum(),
        per_constraint,
    })
}

pub fn defect_cv(system: &ConstraintSystem, pi: &ConstraintDistribution, strategy: &CvStrategy) -> Result<DefectReport> {
    pi.check_matches(system)?;
    let w: Vec<f64> = pi.weights().iter().map(rational::to_f64).collect();
    defect_cv_weighted(system, &w, strategy)
}

/// Defect straight from the weight function:
/// `sum_{i, x in V_i, phi in R_i} pi(i)/|V_i| ||Phi_phi (1 - Pi_{phi(x)}(x))||^2`.
pub fn defect_definitional(system: &ConstraintSystem, pi: &ConstraintDistribution, strategy: &CvStrategy) -> Result<f64> {
    strategy.check(system)?;
    pi.check_matches(system)?;
    let id = linalg::identity(strategy.dim);
    let mut total = 0.0;
    for (i, c) in system.constraints().iter().enumerate() {
        let w = rational::to_f64(pi.weight(i)) / c.arity() as f64;
        for (slot, &x) in c.context().iter().enumerate() {
            for (s, phi) in c.relation().iter().enumerate() {
                let element = &strategy.constraints[i][s] * (&id - &strategy.variables[x][phi[slot] as usize]);
                total += w * linalg::tau_norm_sq(&element);
            }
        }
    }
    Ok(total)
}

/// `||sigma'(x) - sigma'(y)||_tau^2` for boolean variables.
pub fn observable_gap(strategy: &CvStrategy, x: usize, y: usize) -> f64 {
    linalg::tau_norm_sq(&(strategy.observable(x) - strategy.observable(y)))
}

#[derive(Debug, Clone)]
pub struct ReplacementRounding {
    pub strategy: CvStrategy,
    /// Defect on the replaced system under its raw weights.
    pub defect_before: f64,
    /// Defect of the rounded strategy on the original system.
    pub defect_after: f64,
    pub lambda: f64,
    /// Largest context size of the original system.
    pub max_context: usize,
    /// `16 L / lambda`.
    pub factor: f64,
}

impl ReplacementRounding {
    pub fn holds(&self, slack: f64) -> bool {
        self.defect_after <= self.factor * self.defect_before + slack
    }
}

/// Pulls a strategy on the replaced system back to the original one.
/// Constraint measurements are kept; each variable gets the PVM rounded
/// from the average of its copies' PVMs.
pub fn replacement_round_state(
    original: &ConstraintSystem,
    pi: &ConstraintDistribution,
    replacement: &Replacement,
    strategy: &CvStrategy,
) -> Result<ReplacementRounding> {
    strategy.check(&replacement.system)?;
    let m = original.num_constraints();
    let constraints = strategy.constraints[..m].to_vec();
    let mut variables = Vec::with_capacity(original.num_variables());
    for labeling in &replacement.labeling {
        let Some(l) = labeling else {
            // a variable in no constraint plays no role in the defect
            let mut family = vec![linalg::zeros(strategy.dim); original.alphabet()];
            family[0] = linalg::identity(strategy.dim);
            variables.push(family);
            continue;
        };
        let scale = linalg::C64::new(1.0 / l.n() as f64, 0.0);
        let average: Vec<CMat> = (0..original.alphabet())
            .map(|a| {
                l.copies
                    .iter()
                    .fold(linalg::zeros(strategy.dim), |acc, &c| acc + &strategy.variables[c][a])
                    * scale
            })
            .collect();
        variables.push(round_povm_to_pvm(&average)?.pvm);
    }
    let lifted = CvStrategy {
        dim: strategy.dim,
        constraints,
        variables,
    };
    let raw: Vec<f64> = replacement.raw_weights.iter().map(rational::to_f64).collect();
    let defect_before = defect_cv_weighted(&replacement.system, &raw, strategy)?.total;
    let defect_after = defect_cv(original, pi, &lifted)?.total;
    let lambda = replacement.lambda();
    let max_context = original.constraints().iter().map(|c| c.arity()).max().unwrap_or(0);
    Ok(ReplacementRounding {
        strategy: lifted,
        defect_before,
        defect_after,
        lambda,
        max_context,
        factor: 16.0 * max_context as f64 / lambda,
    })
}
