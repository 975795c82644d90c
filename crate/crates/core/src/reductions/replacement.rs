//! Degree reduction by graph replacement and the 3CNF equality gadget.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cs::{Constraint, ConstraintDistribution, ConstraintKind, ConstraintSystem, Literal};
use crate::error::{Error, Result};
use crate::expanders::{self, Graph, SpectralCertificate};
use crate::rational::{self, Rational};

/// Source of the graph `G_n` used for a variable in `n` constraints.
#[derive(Debug, Clone)]
pub enum GraphFamily {
    /// Certified random `degree`-regular multigraphs. A variable in a single
    /// constraint gets one vertex carrying `degree` loops, so every copy
    /// ends up in exactly `degree + 1` constraints.
    Expander {
        degree: usize,
        lambda_min: f64,
        seed: u64,
        attempts: usize,
    },
    /// Cycles `C_n`; `n = 2` uses a single edge and `n = 1` no edge.
    Cycle,
    /// Caller-provided graphs keyed by size.
    Explicit(BTreeMap<usize, Graph>),
}

impl GraphFamily {
    pub fn expander(degree: usize, lambda_min: f64, seed: u64) -> Self {
        GraphFamily::Expander {
            degree,
            lambda_min,
            seed,
            attempts: expanders::DEFAULT_ATTEMPTS,
        }
    }

    pub fn member(&self, n: usize) -> Result<FamilyMember> {
        if n == 0 {
            return Err(Error::MissingGraph(0));
        }
        match self {
            GraphFamily::Expander {
                degree,
                lambda_min,
                seed,
                attempts,
            } => {
                let d = *degree;
                if n == 1 {
                    let g = Graph::new(1, std::iter::repeat((0, 0)).take(d))?;
                    return Ok(FamilyMember {
                        graph: g,
                        degree: d,
                        certificate: None,
                    });
                }
                if n > d + 1 && d < 3 {
                    return Err(Error::Degenerate(format!("expander degree {d} on {n} vertices")));
                }
                let member_seed = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let (g, cert) =
                    expanders::random_regular_expander_with_attempts(n, d, member_seed, *lambda_min, *attempts)?;
                Ok(FamilyMember {
                    graph: g,
                    degree: d,
                    certificate: Some(cert),
                })
            }
            GraphFamily::Cycle => match n {
                1 => Ok(FamilyMember {
                    graph: Graph::empty(1),
                    degree: 0,
                    certificate: None,
                }),
                2 => {
                    let g = Graph::complete(2);
                    let cert = expanders::spectral_lambda(&g)?;
                    Ok(FamilyMember {
                        graph: g,
                        degree: 1,
                        certificate: Some(cert),
                    })
                }
                _ => {
                    let (g, cert) = expanders::cycle_graph(n)?;
                    Ok(FamilyMember {
                        graph: g,
                        degree: 2,
                        certificate: Some(cert),
                    })
                }
            },
            GraphFamily::Explicit(graphs) => {
                let g = graphs.get(&n).ok_or(Error::MissingGraph(n))?.clone();
                if g.num_vertices() != n {
                    return Err(Error::MissingGraph(n));
                }
                let degree = g.regular_degree().ok_or(Error::NotRegular)?;
                let certificate = expanders::spectral_lambda(&g).ok();
                Ok(FamilyMember {
                    graph: g,
                    degree,
                    certificate,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub graph: Graph,
    pub degree: usize,
    /// Absent for single-vertex members, where the expansion bound holds
    /// trivially.
    pub certificate: Option<SpectralCertificate>,
}

/// Bijection between the constraints containing a variable and the
/// vertices of its graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableLabeling {
    /// `r_x^{-1}`: vertex to constraint index, increasing.
    pub constraints: Vec<usize>,
    /// Vertex to the index of the local copy in the replaced system.
    pub copies: Vec<usize>,
    pub member: FamilyMember,
}

impl VariableLabeling {
    pub fn n(&self) -> usize {
        self.constraints.len()
    }

    pub fn vertex_of(&self, constraint: usize) -> Option<usize> {
        self.constraints.binary_search(&constraint).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplacedConstraint {
    /// Copy of the original constraint over local copies.
    Copy(usize),
    /// Equality along the edge `{u, v}` of the variable's graph.
    Edge { var: usize, u: usize, v: usize },
}

#[derive(Debug, Clone)]
pub struct Replacement {
    pub system: ConstraintSystem,
    /// Weights as given by the construction, before renormalization.
    pub raw_weights: Vec<Rational>,
    pub distribution: ConstraintDistribution,
    /// Indexed by original variable; empty for variables in no constraint.
    pub labeling: Vec<Option<VariableLabeling>>,
    pub constraint_origin: Vec<ReplacedConstraint>,
    /// New variable to `(original variable, constraint)`.
    pub variable_origin: Vec<(usize, usize)>,
}

impl Replacement {
    /// Copies an assignment of the original system to every local copy.
    pub fn lift_assignment(&self, assignment: &[u8]) -> Vec<u8> {
        self.variable_origin.iter().map(|&(x, _)| assignment[x]).collect()
    }

    /// Total raw mass; below one only when some graph has fewer edges
    /// than its size and degree predict.
    pub fn raw_mass(&self) -> Rational {
        rational::sum(&self.raw_weights)
    }

    /// Smallest certified expansion across graphs with at least two
    /// vertices; one when there is none.
    pub fn lambda(&self) -> f64 {
        self.labeling
            .iter()
            .flatten()
            .filter_map(|l| l.member.certificate.map(|c| c.lambda))
            .fold(1.0, f64::min)
    }
}

/// `pi(x) = sum over constraints i containing x of pi(i) / |V_i|`.
pub fn variable_mass(system: &ConstraintSystem, pi: &ConstraintDistribution) -> Vec<Rational> {
    let mut mass = vec![Rational::zero(); system.num_variables()];
    for (i, c) in system.constraints().iter().enumerate() {
        let share = pi.weight(i) / Rational::from_integer(BigInt::from(c.arity()));
        for &x in c.context() {
            mass[x] += &share;
        }
    }
    mass
}

/// The `G`-replacement.
///
/// Copy constraints carry `pi(i)/2`. The equality constraint on edge
/// `{u, v}` carries `pi(x)/(2 d n_x)` for each ordered pair it represents:
/// two for an ordinary edge, one for a loop. For a `d`-regular graph this
/// gives variable `x` a total of `pi(x)/2`, so the raw weights already sum
/// to one unless a degenerate graph drops mass; the attached distribution is
/// renormalized in any case.
pub fn g_replacement(
    system: &ConstraintSystem,
    pi: &ConstraintDistribution,
    family: &GraphFamily,
) -> Result<Replacement> {
    pi.check_matches(system)?;
    let occurrences = system.occurrences();
    let mass = variable_mass(system, pi);
    let mut out = ConstraintSystem::new(system.alphabet());
    let mut variable_origin = Vec::new();
    let mut labeling = Vec::with_capacity(system.num_variables());
    let mut members: BTreeMap<usize, FamilyMember> = BTreeMap::new();

    for (x, occ) in occurrences.iter().enumerate() {
        if occ.is_empty() {
            labeling.push(None);
            continue;
        }
        let member = match members.get(&occ.len()) {
            Some(m) => m.clone(),
            None => {
                let m = family.member(occ.len())?;
                members.insert(occ.len(), m.clone());
                m
            }
        };
        let copies = occ
            .iter()
            .map(|&i| {
                variable_origin.push((x, i));
                out.intern(format!("{}_{}", system.variables()[x], i))
            })
            .collect();
        labeling.push(Some(VariableLabeling {
            constraints: occ.clone(),
            copies,
            member,
        }));
    }

    let half = rational::ratio(1, 2);
    let mut raw_weights = Vec::new();
    let mut constraint_origin = Vec::new();
    for (i, c) in system.constraints().iter().enumerate() {
        let copy = c.relabel(c.name.clone(), |y| {
            let l = labeling[y].as_ref().unwrap();
            l.copies[l.vertex_of(i).unwrap()]
        });
        out.push(copy)?;
        raw_weights.push(pi.weight(i) * &half);
        constraint_origin.push(ReplacedConstraint::Copy(i));
    }
    for (x, l) in labeling.iter().enumerate() {
        let Some(l) = l else { continue };
        let d = l.member.degree;
        if d == 0 {
            continue;
        }
        let unit = &mass[x] / Rational::from_integer(BigInt::from(2 * d * l.n()));
        for (e, &(u, v)) in l.member.graph.edges().iter().enumerate() {
            let name = format!("eq_{}_{}", system.variables()[x], e);
            out.push(Constraint::equality(name, system.alphabet(), l.copies[u], l.copies[v]))?;
            let pairs = if u == v { 1 } else { 2 };
            raw_weights.push(&unit * Rational::from_integer(BigInt::from(pairs)));
            constraint_origin.push(ReplacedConstraint::Edge { var: x, u, v });
        }
    }
    let distribution = ConstraintDistribution::normalized(raw_weights.clone())?;
    Ok(Replacement {
        system: out,
        raw_weights,
        distribution,
        labeling,
        constraint_origin,
        variable_origin,
    })
}

#[derive(Debug, Clone)]
pub struct GadgetOutput {
    pub system: ConstraintSystem,
    pub distribution: Option<ConstraintDistribution>,
    /// New constraint to the constraint it came from.
    pub origin: Vec<usize>,
}

/// The two gadget clauses `(~x | y | y)` and `(x | ~y | ~y)` for `x = y`.
pub fn equality_gadget(name: &str, x: usize, y: usize) -> [Constraint; 2] {
    [
        Constraint::clause(format!("{name}.a"), vec![Literal::neg(x), Literal::pos(y), Literal::pos(y)]),
        Constraint::clause(format!("{name}.b"), vec![Literal::pos(x), Literal::neg(y), Literal::neg(y)]),
    ]
}

/// Replaces every boolean equality by its gadget pair, splitting the weight
/// evenly. Three-literal clauses pass through unchanged. A loop equality
/// `x = x` becomes the two tautological clauses on `x`.
pub fn equality_to_3cnf(system: &ConstraintSystem, pi: Option<&ConstraintDistribution>) -> Result<GadgetOutput> {
    if !system.is_boolean() {
        return Err(Error::Malformed("the equality gadget needs a boolean system".into()));
    }
    if let Some(pi) = pi {
        pi.check_matches(system)?;
    }
    let mut out = ConstraintSystem::boolean();
    for name in system.variables() {
        out.intern(name.clone());
    }
    let half = rational::ratio(1, 2);
    let mut weights = Vec::new();
    let mut origin = Vec::new();
    for (i, c) in system.constraints().iter().enumerate() {
        match c.kind() {
            ConstraintKind::Equality => {
                let (x, y) = match c.context() {
                    [x] => (*x, *x),
                    [x, y] => (*x, *y),
                    _ => unreachable!(),
                };
                for clause in equality_gadget(&c.name, x, y) {
                    out.push(clause)?;
                    origin.push(i);
                    if let Some(pi) = pi {
                        weights.push(pi.weight(i) * &half);
                    }
                }
            }
            _ if c.is_3cnf() => {
                out.push(c.clone())?;
                origin.push(i);
                if let Some(pi) = pi {
                    weights.push(pi.weight(i).clone());
                }
            }
            _ => {
                return Err(Error::Malformed(format!(
                    "constraint {i} is neither a 3CNF clause nor an equality"
                )))
            }
        }
    }
    let distribution = pi.map(|_| ConstraintDistribution::new(weights)).transpose()?;
    Ok(GadgetOutput {
        system: out,
        distribution,
        origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cs::{connectivity_graph, enumerate_satisfying};
    use crate::rational::ratio;

    fn system_with_triple_variable() -> ConstraintSystem {
        // x sits in three clauses
        let mut s = ConstraintSystem::boolean();
        for v in ["x", "a", "b", "c", "d", "e", "f"] {
            s.intern(v);
        }
        for (i, (p, q)) in [(1, 2), (3, 4), (5, 6)].into_iter().enumerate() {
            s.push(Constraint::clause(format!("c{i}"), vec![Literal::pos(0), Literal::pos(p), Literal::neg(q)]))
                .unwrap();
        }
        s
    }

    #[test]
    fn cycle_replacement_counts() {
        let s = system_with_triple_variable();
        let r = g_replacement(&s, &ConstraintDistribution::uniform(3), &GraphFamily::Cycle).unwrap();
        let x = r.labeling[0].as_ref().unwrap();
        assert_eq!(x.n(), 3);
        let edges = r
            .constraint_origin
            .iter()
            .filter(|o| matches!(o, ReplacedConstraint::Edge { var: 0, .. }))
            .count();
        assert_eq!(edges, 3);
        assert_eq!(r.system.num_variables(), 9);
        // variables in one clause lose their half of the mass
        assert_eq!(r.raw_mass(), ratio(1, 2) + ratio(1, 2) * ratio(1, 3));
        assert_eq!(rational::sum(r.distribution.weights()), ratio(1, 1));
    }

    #[test]
    fn expander_replacement_has_degree_d_plus_one() {
        let s = system_with_triple_variable();
        let r = g_replacement(&s, &ConstraintDistribution::uniform(3), &GraphFamily::expander(4, 0.05, 1)).unwrap();
        let deg = connectivity_graph(&r.system).left_degrees();
        assert!(deg.iter().all(|&d| d == 5), "{deg:?}");
        assert_eq!(r.raw_mass(), ratio(1, 1));
        let assignment = vec![1, 0, 0, 1, 0, 0, 1];
        assert!(s.is_satisfied_by(&assignment));
        assert!(r.system.is_satisfied_by(&r.lift_assignment(&assignment)));
    }

    #[test]
    fn missing_explicit_graph() {
        let s = system_with_triple_variable();
        let err = g_replacement(&s, &ConstraintDistribution::uniform(3), &GraphFamily::Explicit(BTreeMap::new()));
        assert!(matches!(err, Err(Error::MissingGraph(_))));
    }

    #[test]
    fn gadget_encodes_equality() {
        let mut s = ConstraintSystem::boolean();
        s.intern("x");
        s.intern("y");
        s.push(Constraint::equality("e", 2, 0, 1)).unwrap();
        let out = equality_to_3cnf(&s, Some(&ConstraintDistribution::uniform(1))).unwrap();
        assert_eq!(out.system.num_constraints(), 2);
        let joint: Vec<Vec<u8>> = enumerate_satisfying(out.system.constraint(0))
            .into_iter()
            .filter(|a| out.system.constraint(1).accepts(a))
            .collect();
        assert_eq!(joint, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(out.distribution.unwrap().weights(), &[ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn gadget_rejects_other_constraints() {
        let mut s = ConstraintSystem::new(3);
        s.intern("x");
        s.intern("y");
        s.push(Constraint::equality("e", 3, 0, 1)).unwrap();
        assert!(equality_to_3cnf(&s, None).is_err());
    }
}
