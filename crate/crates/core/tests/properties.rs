mod common;

use gamereduce::clm::{
    clm_marginal, clm_pmf, clm_support, oracularize_clm, pad, random_clf, FieldSpace, TypedClm,
};
use gamereduce::cs::{connectivity_graph, degree_profile, enumerate_satisfying, ConstraintDistribution};
use gamereduce::expanders::{spectral_lambda, Graph};
use gamereduce::linalg::{self, random_povm};
use gamereduce::rational::{ratio, sum, Rational};
use gamereduce::reductions::{g_replacement, two_oracularize, uniformize_by_repetition, GraphFamily};
use gamereduce::values::{defect_cv, round_povm_to_pvm, CvStrategy};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_space(r: &mut ChaCha8Rng) -> FieldSpace {
    let q = [2u32, 3][r.gen_range(0..2)];
    let n = r.gen_range(1..=if q == 2 { 5 } else { 3 });
    let mut dims = Vec::new();
    let mut left = n;
    while left > 0 {
        let d = r.gen_range(1..=left);
        dims.push(d);
        left -= d;
    }
    FieldSpace::new(q, dims).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn handshake(seed in any::<u64>(), n in 3usize..7, m in 1usize..10) {
        let s = common::random_3cnf(n, m, &mut rng(seed));
        let g = connectivity_graph(&s);
        let left: usize = g.left_degrees().iter().sum();
        let right: usize = g.right_degrees().iter().sum();
        prop_assert_eq!(left, right);
        prop_assert_eq!(left, 3 * m);
    }

    #[test]
    fn clause_relation_size(seed in any::<u64>(), n in 3usize..6) {
        let s = common::random_3cnf(n, 1, &mut rng(seed));
        let c = s.constraint(0);
        prop_assert_eq!(c.relation().len(), (1 << c.arity()) - 1);
        prop_assert_eq!(enumerate_satisfying(c).len(), c.relation().len());
    }

    #[test]
    fn replacement_distribution_normalized(seed in any::<u64>(), n in 3usize..6, m in 1usize..6) {
        let mut r = rng(seed);
        let s = common::random_3cnf(n, m, &mut r);
        let w: Vec<Rational> = (0..m).map(|_| ratio(r.gen_range(1..8), 1)).collect();
        let pi = ConstraintDistribution::normalized(w).unwrap();
        let rep = g_replacement(&s, &pi, &GraphFamily::Cycle).unwrap();
        prop_assert_eq!(sum(rep.distribution.weights()), ratio(1, 1));
        prop_assert!(rep.raw_mass() <= ratio(1, 1));
        // every copy is in its own constraint plus two cycle edges at most
        let profile = degree_profile(&rep.system);
        prop_assert!(profile.left.keys().all(|&d| (1..=3).contains(&d)));
    }

    #[test]
    fn perfect_strategies_have_zero_defect(seed in any::<u64>(), n in 3usize..6, m in 1usize..8) {
        let mut r = rng(seed);
        let planted: Vec<u8> = (0..n).map(|_| r.gen_range(0..2)).collect();
        let s = common::planted_3cnf(&planted, m, &mut r);
        let u = linalg::random_unitary(1, &mut r);
        let cv = CvStrategy::from_assignments(&s, &[planted], &u).unwrap();
        let d = defect_cv(&s, &ConstraintDistribution::uniform(m), &cv).unwrap().total;
        prop_assert!(d.abs() < 1e-12);
    }

    #[test]
    fn uniformization_size(seed in any::<u64>(), m in 1usize..8, extra in 0usize..12) {
        let mut r = rng(seed);
        let s = common::random_3cnf(3, m, &mut r);
        let w: Vec<Rational> = (0..m).map(|_| ratio(r.gen_range(1..30), 1)).collect();
        let pi = ConstraintDistribution::normalized(w).unwrap();
        let n = m + extra;
        let u = uniformize_by_repetition(&s, &pi, n).unwrap();
        let size = u.system.num_constraints();
        prop_assert!(n * n <= size && size <= n * n + n);
    }

    #[test]
    fn two_outcome_rounding_never_loses(seed in any::<u64>(), dim in 1usize..5) {
        let povm = random_povm(dim, 2, &mut rng(seed));
        let r = round_povm_to_pvm(&povm).unwrap();
        prop_assert!(linalg::is_pvm(&r.pvm, 1e-8));
        prop_assert!(r.gain() >= -1e-9);
    }

    #[test]
    fn lambda_in_range(n in 3usize..40) {
        let cert = spectral_lambda(&Graph::cycle(n)).unwrap();
        prop_assert!(cert.lambda > 0.0 && cert.lambda <= 2.0 + 1e-12);
    }

    #[test]
    fn clm_pmf_sums_to_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let space = small_space(&mut r);
        let la = random_clf(&space, &mut r);
        let lb = random_clf(&space, &mut r);
        let support = clm_support(&la, &lb).unwrap();
        prop_assert_eq!(sum(support.iter().map(|s| &s.2)), ratio(1, 1));
        // marginal of A from the joint table
        for (x, _, _) in &support {
            let joint: Rational = support.iter().filter(|s| &s.0 == x).fold(Rational::zero(), |a, s| a + &s.2);
            prop_assert_eq!(joint, clm_marginal(&la, x).unwrap());
        }
    }

    #[test]
    fn preimage_is_power_of_q(seed in any::<u64>()) {
        let mut r = rng(seed);
        let space = small_space(&mut r);
        let l = random_clf(&space, &mut r);
        let size = space.size().unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for zi in 0..size {
            *counts.entry(l.eval(&space.vector(zi)).unwrap()).or_insert(0u64) += 1;
        }
        for (x, c) in counts {
            let d = l.preimage_dim(&x).unwrap().unwrap();
            prop_assert_eq!(c, (space.q() as u64).pow(d as u32));
        }
        let x = space.vector(r.gen_range(0..size));
        let p = clm_pmf(&l, &l, &x, &x).unwrap();
        prop_assert_eq!(p, clm_marginal(&l, &x).unwrap());
    }

    #[test]
    fn typed_pmf_sums_to_one(seed in any::<u64>(), loops in any::<bool>()) {
        let mut r = rng(seed);
        let space = small_space(&mut r);
        let maps = (0..3).map(|_| (random_clf(&space, &mut r), random_clf(&space, &mut r))).collect();
        let mut edges = vec![(0, 1), (1, 2)];
        if loops {
            edges.push((2, 2));
        }
        let t = TypedClm::new(vec!["a".into(), "b".into(), "c".into()], &edges, maps).unwrap();
        let support = t.support().unwrap();
        prop_assert_eq!(sum(support.iter().map(|s| &s.2)), ratio(1, 1));
        let ma: Vec<Rational> = t.support_a().unwrap().iter().map(|&q| t.marginal_a(q).unwrap()).collect();
        prop_assert_eq!(sum(ma.iter()), ratio(1, 1));
        prop_assert!(pad(&t).check_marginals().unwrap().uniform());
    }

    #[test]
    fn oracularized_pad_uniform(seed in any::<u64>()) {
        let mut r = rng(seed);
        let space = small_space(&mut r);
        let t = oracularize_clm(&random_clf(&space, &mut r), &random_clf(&space, &mut r)).unwrap();
        prop_assert_eq!(t.e_arrow_count(), 5);
        let report = pad(&t).check_marginals().unwrap();
        prop_assert!(report.uniform());
    }
}

#[test]
fn two_oracularized_degrees() {
    let orac = two_oracularize(&common::five_clauses()).unwrap();
    let profile = degree_profile(&orac.system);
    assert_eq!(profile.left.get(&9), Some(&15));
    assert_eq!(profile.left.get(&10), Some(&3));
    assert!(profile.all_3cnf);
}
