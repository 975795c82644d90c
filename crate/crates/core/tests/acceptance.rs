//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs as a plain binary so every criterion reports even when an earlier
//! one fails; the process exits nonzero if any did.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use gamereduce::clm::{
    self, clm_pmf, oracularize_clm, pad, pad_verifier, random_clf, sample_padded, Clf, FieldSpace, PaddedQuestion,
    TypedGame, TypedQuestion,
};
use gamereduce::cs::{degree_profile, ConstraintDistribution, ConstraintSystem};
use gamereduce::expanders::{cycle_graph, key_inequality_sides, random_regular_expander, spectral_lambda, Graph};
use gamereduce::games::{constraint_answer_index, constraint_variable_game, DummyGame};
use gamereduce::linalg::{self, ginibre};
use gamereduce::rational::{ratio, Rational};
use gamereduce::reductions::replacement::equality_gadget;
use gamereduce::reductions::{
    build_slc, g_replacement, to_3sat5, two_oracularize, uniformize_by_repetition, verify_slc, GraphFamily,
    PipelineParams, VerifyParams,
};
use gamereduce::values::{
    classical_value_exact, defect_cv, defect_definitional, game_oracularizability, observable_gap,
    oracularizability_check, replacement_round_state, seesaw_lower_bound, slc_strategy_to_slc, slc_strategy_value,
    strategy_value, tensor_dummy_strategy, CvStrategy, FiniteDimStrategy,
};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: u128 = 1 << 26;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run(id: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            o.pass = false;
            o.detail = format!("{}; over the {:?} limit", o.detail, limit);
        }
    }
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {id:>2} {name}: {} ({:.2}s)", o.detail, elapsed.as_secs_f64());
    o.pass
}

fn crit_smoothness() -> Outcome {
    let s = common::five_clauses();
    let mut notes = Vec::new();
    for (j, r) in [(1, 1), (2, 1)] {
        let (inst, _) = build_slc(&s, j, r, CAP).unwrap();
        let report = verify_slc(&inst, &VerifyParams::new(j, r));
        let sm = &report.smoothness;
        if !sm.exhaustive || !sm.holds() {
            return outcome(false, format!("(J,R)=({j},{r}) collision {} bound {}", sm.max_collision, sm.bound));
        }
        // Pr[q0 in L] over the replaced coordinates, every left question.
        let game = DummyGame::new(&s, j, r, CAP).unwrap();
        let want = ratio(1, (j + 1) as i64);
        for idx in 0..game.num_left() {
            let left = game.left_question(idx);
            for q0 in 0..game.len() {
                let p = game.replaced_probability(&left, q0);
                if p != want {
                    return outcome(false, format!("Pr[q0 in L] = {p} at left {idx}, q0 {q0}"));
                }
            }
        }
        notes.push(format!("({j},{r}) max collision {} <= {}", sm.max_collision, sm.bound));
    }
    outcome(true, format!("{}; Pr[q0 in L] = 1/(J+1) everywhere", notes.join(", ")))
}

fn crit_preimage() -> Outcome {
    let s = common::five_clauses();
    let mut notes = Vec::new();
    for j in [1, 2] {
        let (inst, _) = build_slc(&s, j, 1, CAP).unwrap();
        let p = verify_slc(&inst, &VerifyParams::new(j, 1)).preimage;
        if !p.holds() || p.bound != 4 {
            return outcome(false, format!("J={j} max fiber {} bound {}", p.max_fiber, p.bound));
        }
        notes.push(format!("J={j} max fiber {}", p.max_fiber));
    }
    outcome(true, format!("{} (bound 4)", notes.join(", ")))
}

fn crit_regular_expansion() -> Outcome {
    let s = common::five_clauses();
    let mut notes = Vec::new();
    for j in [1, 2] {
        let (inst, _) = build_slc(&s, j, 1, CAP).unwrap();
        let report = verify_slc(&inst, &VerifyParams::new(j, 1));
        if !report.regularity.holds() {
            return outcome(false, format!("J={j} degrees {}..{}", report.regularity.min_degree, report.regularity.max_degree));
        }
        for e in &report.expansion {
            if !e.holds() || e.samples < 200 {
                return outcome(false, format!("J={j} delta {} worst ratio {}", e.delta, e.worst_ratio));
            }
        }
        let worst = report.expansion.iter().map(|e| e.worst_ratio).fold(f64::INFINITY, f64::min);
        notes.push(format!("J={j} degree {} worst |E'|/(delta^2|E|) {worst:.3}", report.regularity.min_degree));
    }
    outcome(true, notes.join(", "))
}

fn crit_degree_pipeline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for case in 0..20 {
        let n = rng.gen_range(3..=6);
        let m = rng.gen_range(1..=12);
        let planted: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let s = common::planted_3cnf(&planted, m, &mut rng);
        let params = PipelineParams {
            seed: case,
            ..PipelineParams::default()
        };
        let out = match to_3sat5(&s, None, &params) {
            Ok(o) => o,
            Err(e) => return outcome(false, format!("case {case}: {e}")),
        };
        let profile = degree_profile(&out.system);
        if !profile.is_3sat_k(5) || profile.right.keys().any(|&w| w != 3) {
            return outcome(false, format!("case {case}: degrees {:?} / {:?}", profile.left, profile.right));
        }
        let lifted = out.lift_assignment(&planted);
        let pi = out.distribution.as_ref().unwrap();
        let game = constraint_variable_game(&out.system, pi).unwrap();
        let mut answers: Vec<usize> = out
            .system
            .constraints()
            .iter()
            .map(|c| constraint_answer_index(2, &c.restrict(&lifted)))
            .collect();
        answers.extend(lifted.iter().map(|&v| v as usize));
        let value = game.deterministic_value(&answers);
        if value != ratio(1, 1) || !out.system.is_satisfied_by(&lifted) {
            return outcome(false, format!("case {case}: lifted value {value}"));
        }
    }
    outcome(true, "20 planted inputs: all variable degrees 5, all clause widths 3, lifted value exactly 1")
}

fn crit_cycle() -> Outcome {
    let mut worst = 0.0f64;
    for d in 3..=64usize {
        let (_, cert) = cycle_graph(d).unwrap();
        let direct = spectral_lambda(&Graph::cycle(d)).unwrap();
        let closed = 2.0 * (std::f64::consts::PI / d as f64).sin().powi(2);
        let err = (cert.lambda - closed).abs().max((direct.lambda - closed).abs());
        worst = worst.max(err);
        if err > 1e-9 || direct.lambda < 8.0 / (d * d) as f64 {
            return outcome(false, format!("d={d}: lambda {} vs {closed}", direct.lambda));
        }
    }
    outcome(true, format!("d = 3..64, max |lambda - 2 sin^2(pi/d)| = {worst:.1e}, all >= 8/d^2"))
}

fn crit_key_expander() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut trials = 0;
    while trials < 1000 {
        let n = rng.gen_range(3..=12usize);
        let g = match rng.gen_range(0..3) {
            0 => Graph::cycle(n),
            1 if n >= 4 && n % 2 == 0 => match random_regular_expander(n, 3, rng.gen(), 1e-6) {
                Ok((g, _)) => g,
                Err(_) => continue,
            },
            _ if n >= 5 => match random_regular_expander(n, 4, rng.gen(), 1e-6) {
                Ok((g, _)) => g,
                Err(_) => continue,
            },
            _ => continue,
        };
        let cert = spectral_lambda(&g).unwrap();
        let dim = rng.gen_range(1..=4);
        let family: Vec<_> = (0..n).map(|_| ginibre(dim, dim, &mut rng)).collect();
        let (lhs, rhs) = key_inequality_sides(&g, &cert, &family);
        worst = worst.max(lhs - rhs);
        if lhs > rhs + 1e-9 {
            violations += 1;
        }
        trials += 1;
    }
    outcome(violations == 0, format!("{trials} trials, {violations} violations, max lhs-rhs {worst:.3e}"))
}

fn equality_system() -> ConstraintSystem {
    let mut s = common::vars(&["x", "y"]);
    for c in equality_gadget("g", 0, 1) {
        s.push(c).unwrap();
    }
    s
}

fn crit_gadget() -> Outcome {
    let s = equality_system();
    let pi = ConstraintDistribution::uniform(2);
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut violations = 0;
    let mut ratio_max = 0.0f64;
    for _ in 0..1000 {
        let strat = CvStrategy::random(&s, 2, &mut rng);
        let defect = defect_cv(&s, &pi, &strat).unwrap().total;
        let gap = observable_gap(&strat, 0, 1);
        if gap > 64.0 * defect + 1e-9 {
            violations += 1;
        }
        if defect > 1e-12 {
            ratio_max = ratio_max.max(gap / defect);
        }
    }
    outcome(violations == 0, format!("1000 strategies, {violations} violations, max gap/defect {ratio_max:.3}"))
}

fn crit_replacement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut violations = 0;
    let mut tightest = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(3..=5);
        let s = common::random_3cnf(n, 2, &mut rng);
        let pi = ConstraintDistribution::uniform(2);
        let rep = g_replacement(&s, &pi, &GraphFamily::Cycle).unwrap();
        let strat = CvStrategy::random(&rep.system, 2, &mut rng);
        let r = replacement_round_state(&s, &pi, &rep, &strat).unwrap();
        if !r.holds(1e-9) {
            violations += 1;
        }
        if r.defect_before > 1e-12 {
            tightest = tightest.max(r.defect_after / (r.factor * r.defect_before));
        }
    }
    outcome(
        violations == 0,
        format!("500 strategies, {violations} violations, max after/(16L/lambda before) {tightest:.3}"),
    )
}

fn crit_defect_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst = 0.0f64;
    for t in 0..500 {
        let s = if t % 5 == 0 {
            equality_system()
        } else {
            let n = rng.gen_range(3..=5);
            let m = rng.gen_range(1..=4);
            common::random_3cnf(n, m, &mut rng)
        };
        let weights: Vec<Rational> = (0..s.num_constraints()).map(|_| ratio(rng.gen_range(1..10), 1)).collect();
        let pi = ConstraintDistribution::normalized(weights).unwrap();
        let dim = rng.gen_range(1..=3);
        let strat = CvStrategy::random(&s, dim, &mut rng);
        let a = defect_cv(&s, &pi, &strat).unwrap().total;
        let b = defect_definitional(&s, &pi, &strat).unwrap();
        worst = worst.max((a - b).abs());
    }
    outcome(worst <= 1e-9, format!("500 strategies, max |definitional - norm form| = {worst:.1e}"))
}

fn random_unitary_of(dim: usize, seed: u64) -> linalg::CMat {
    linalg::random_unitary(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn crit_dummy_completeness() -> Outcome {
    let s = common::five_clauses();
    let sols = common::five_clauses_solutions();
    let game = DummyGame::new(&s, 1, 1, CAP).unwrap();
    let (g, rights) = game.to_game().unwrap();
    let mut notes = Vec::new();
    for (dim, assignments) in [(1, vec![sols[0].clone()]), (2, sols[..2].to_vec())] {
        let cv = CvStrategy::from_assignments(&s, &assignments, &random_unitary_of(dim, 11)).unwrap();
        let dummy = tensor_dummy_strategy(&game, &rights, &cv, 1e-9, 4096).unwrap();
        let v = strategy_value(&g, &dummy).unwrap();
        let (inst, _) = build_slc(&s, 1, 1, CAP).unwrap();
        let slc = slc_strategy_to_slc(&game, &dummy).unwrap();
        let w = slc_strategy_value(&inst, &slc).unwrap();
        if v < 1.0 - 1e-9 || w < 1.0 - 1e-9 {
            return outcome(false, format!("D={dim}: dummy value {v}, SLC value {w}"));
        }
        notes.push(format!("D={dim} dummy {v:.12} SLC {w:.12}"));
    }
    outcome(true, notes.join(", "))
}

fn crit_two_orac() -> Outcome {
    let base = common::five_clauses();
    let orac = two_oracularize(&base).unwrap();
    let s = &orac.system;
    let hist = degree_profile(s).left;
    if hist.keys().any(|d| *d != 9 && *d != 10) {
        return outcome(false, format!("degree histogram {hist:?}"));
    }
    let lifted: Vec<Vec<u8>> = common::five_clauses_solutions()[..2]
        .iter()
        .map(|a| orac.lift_assignment(a))
        .collect();
    if !lifted.iter().all(|a| s.is_satisfied_by(a)) {
        return outcome(false, "lifted assignment violates a constraint");
    }
    let cv = CvStrategy::from_assignments(s, &lifted, &random_unitary_of(2, 12)).unwrap();
    let pi = ConstraintDistribution::uniform(s.num_constraints());
    let defect = defect_cv(s, &pi, &cv).unwrap().total;
    let game = DummyGame::new(s, 1, 1, CAP).unwrap();
    let (_, rights) = game.to_game().unwrap();
    let dummy = tensor_dummy_strategy(&game, &rights, &cv, 1e-9, 4096).unwrap();
    let slc = slc_strategy_to_slc(&game, &dummy).unwrap();
    let (inst, _) = build_slc(s, 1, 1, CAP).unwrap();
    let report = oracularizability_check(&inst, &slc, 1e-9).unwrap();
    let value = slc_strategy_value(&inst, &slc).unwrap();
    let hist_text: Vec<String> = hist.iter().map(|(d, c)| format!("{c} of degree {d}")).collect();
    outcome(
        defect.abs() < 1e-12 && report.passes() && value >= 1.0 - 1e-9,
        format!(
            "defect {defect:.1e}, max commutator {:.1e} on {} edges, SLC value {value:.12}; variables: {}",
            report.max_commutator,
            inst.num_edges(),
            hist_text.join(", ")
        ),
    )
}

fn crit_value_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let mut violations = Vec::new();
    let mut strict = 0;
    for inst in 0..30 {
        let n = rng.gen_range(3..=4);
        let m = if inst % 6 == 5 { 8 } else { rng.gen_range(1..=4) };
        let s = common::random_3cnf(n, m, &mut rng);
        let pi = ConstraintDistribution::uniform(m);
        let game = constraint_variable_game(&s, &pi).unwrap();
        let classical = classical_value_exact(&game, CAP).unwrap();
        let det = FiniteDimStrategy::deterministic(&classical.assignment, &game.questions().iter().map(|q| q.answers).collect::<Vec<_>>());
        let det_value = strategy_value(&game, &det).unwrap();
        let c = classical.value.to_f64().unwrap();
        if (det_value - c).abs() > 1e-9 || !game_oracularizability(&game, &det, 1e-9).unwrap().passes() {
            violations.push(format!("instance {inst}: embedding value {det_value} vs {c}"));
        }
        let seesaw = seesaw_lower_bound(&game, 2, inst as u64, 60, std::slice::from_ref(&det)).unwrap();
        let mut best_orac = det_value;
        let mut best_sync = det_value;
        if game_oracularizability(&game, &seesaw.strategy, 1e-9).unwrap().passes() {
            best_orac = best_orac.max(seesaw.value);
        }
        best_sync = best_sync.max(seesaw.value);
        if c > best_orac + 1e-9 || best_orac > best_sync + 1e-9 {
            violations.push(format!("instance {inst}: {c} / {best_orac} / {best_sync}"));
        }
        if best_sync > c + 1e-9 {
            strict += 1;
        }
    }
    outcome(
        violations.is_empty(),
        if violations.is_empty() {
            format!("30 instances, 0 violations ({strict} with a synchronous strategy above the classical value)")
        } else {
            violations.join("; ")
        },
    )
}

fn brute_counts(la: &Clf, lb: &Clf) -> BTreeMap<(Vec<u32>, Vec<u32>), u64> {
    let space = la.space();
    let mut counts = BTreeMap::new();
    for zi in 0..space.size().unwrap() {
        let z = space.vector(zi);
        *counts.entry((la.eval(&z).unwrap(), lb.eval(&z).unwrap())).or_insert(0) += 1;
    }
    counts
}

fn random_space<R: Rng>(rng: &mut R) -> FieldSpace {
    let q = [2u32, 2, 3, 5][rng.gen_range(0..4)];
    let max_dim = match q {
        2 => 8,
        3 => 5,
        _ => 3,
    };
    let n = rng.gen_range(1..=max_dim);
    let mut dims = Vec::new();
    let mut left = n;
    while left > 0 {
        let d = rng.gen_range(1..=left.min(3));
        dims.push(d);
        left -= d;
    }
    FieldSpace::new(q, dims).unwrap()
}

fn crit_clm() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1313);
    // pmf against the exhaustive count over z
    for case in 0..200 {
        let space = random_space(&mut rng);
        let la = random_clf(&space, &mut rng);
        let lb = random_clf(&space, &mut rng);
        let size = space.size().unwrap();
        let counts = brute_counts(&la, &lb);
        for ((x, y), c) in &counts {
            if clm_pmf(&la, &lb, x, y).unwrap() != Rational::new((*c).into(), size.into()) {
                return outcome(false, format!("pmf mismatch in case {case} at {x:?}, {y:?}"));
            }
        }
        for _ in 0..20 {
            let x = space.vector(rng.gen_range(0..size));
            let y = space.vector(rng.gen_range(0..size));
            let c = counts.get(&(x.clone(), y.clone())).copied().unwrap_or(0);
            if clm_pmf(&la, &lb, &x, &y).unwrap() != Rational::new(c.into(), size.into()) {
                return outcome(false, format!("pmf mismatch in case {case} at {x:?}, {y:?}"));
            }
        }
    }
    // uniform padded marginals
    for case in 0..30 {
        let space = random_space(&mut rng);
        if space.size().unwrap() > 64 {
            continue;
        }
        let typed = oracularize_clm(&random_clf(&space, &mut rng), &random_clf(&space, &mut rng)).unwrap();
        let report = pad(&typed).check_marginals().unwrap();
        if !report.uniform() {
            return outcome(false, format!("nonuniform padded marginal in case {case}: {:?}", report.witness));
        }
    }
    // value transport on a 2-type toy game
    let space = FieldSpace::new(2, vec![1, 1]).unwrap();
    let typed = clm::TypedClm::new(
        vec!["P".into(), "Q".into()],
        &[(0, 0), (0, 1)],
        vec![
            (random_clf(&space, &mut rng), random_clf(&space, &mut rng)),
            (random_clf(&space, &mut rng), random_clf(&space, &mut rng)),
        ],
    )
    .unwrap();
    let game = TypedGame::new(typed, vec![2, 3], vec![3, 2], |q: TypedQuestion, r: TypedQuestion, a, b| {
        (a + b + q.x as usize + r.x as usize + q.ty) % 2 == 0
    })
    .unwrap();
    let padded = pad_verifier(&game).unwrap();
    for t in 0..50 {
        let c = game.random_correlation(&mut rng, 7);
        let lifted = padded.lift(&c).unwrap();
        if game.value(&c).unwrap() != padded.value(&lifted).unwrap() {
            return outcome(false, format!("lift changed the value on correlation {t}"));
        }
        let d = padded.random_correlation(&mut rng, 7);
        let projected = padded.project(&d).unwrap();
        let back = padded.lift(&projected).unwrap();
        let v = padded.value(&d).unwrap();
        if v != game.value(&projected).unwrap() || v != padded.value(&back).unwrap() {
            return outcome(false, format!("projection changed the value on correlation {t}"));
        }
    }
    // sampler against the exact padded pmf
    let draws = 100_000usize;
    let dist = padded.distribution();
    let samples = sample_padded(dist, 99, draws).unwrap();
    let mut observed: BTreeMap<(PaddedQuestion, PaddedQuestion), u64> = BTreeMap::new();
    for s in samples {
        *observed.entry(s).or_insert(0) += 1;
    }
    let support = padded.support();
    let mut chi2 = 0.0;
    let mut seen = 0u64;
    for (a, b, p) in &support {
        let expected = p.to_f64().unwrap() * draws as f64;
        let o = observed.get(&(*a, *b)).copied().unwrap_or(0);
        seen += o;
        chi2 += (o as f64 - expected).powi(2) / expected;
    }
    let total_p = support.iter().fold(Rational::zero(), |acc, s| acc + &s.2);
    let df = (support.len() - 1) as f64;
    let threshold = df + 4.0 * (2.0 * df).sqrt();
    let ok = seen == draws as u64 && total_p == ratio(1, 1) && chi2 <= threshold;
    outcome(
        ok,
        format!(
            "200 pmf instances match, padded marginals uniform, 50 transports exact, chi2 {chi2:.1} <= {threshold:.1} (df {df})"
        ),
    )
}

fn crit_uniformize() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1414);
    for case in 0..100 {
        let m = rng.gen_range(1..=8);
        let s = common::random_3cnf(3, m, &mut rng);
        let w: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=20)).collect();
        let total: i64 = w.iter().sum();
        let pi = ConstraintDistribution::new(w.iter().map(|&x| ratio(x, total)).collect()).unwrap();
        let n = rng.gen_range(m..=m + 15);
        let u = uniformize_by_repetition(&s, &pi, n).unwrap();
        let n2 = (n * n) as i64;
        for (i, &c) in u.counts.iter().enumerate() {
            let expect = (n2 * w[i] + total - 1) / total;
            if c as i64 != expect {
                return outcome(false, format!("case {case}: count {c} for constraint {i}, expected {expect}"));
            }
        }
        let size = u.system.num_constraints();
        if size < n * n || size > n * n + n || size != u.counts.iter().sum::<usize>() {
            return outcome(false, format!("case {case}: m' = {size} outside [{}, {}]", n * n, n * n + n));
        }
    }
    outcome(true, "100 distributions: counts ceil(N^2 pi(i)), N^2 <= m' <= N^2 + N")
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let results = [
        run(1, "smoothness", secs(10), crit_smoothness),
        run(2, "preimage bound", secs(5), crit_preimage),
        run(3, "regularity and weak expansion", secs(30), crit_regular_expansion),
        run(4, "degree pipeline", secs(10), crit_degree_pipeline),
        run(5, "cycle expansion", None, crit_cycle),
        run(6, "key expander inequality", None, crit_key_expander),
        run(7, "equality gadget", None, crit_gadget),
        run(8, "replacement soundness", None, crit_replacement),
        run(9, "defect forms", None, crit_defect_forms),
        run(10, "dummy completeness", None, crit_dummy_completeness),
        run(11, "two-oracularization", None, crit_two_orac),
        run(12, "value chain", None, crit_value_chain),
        run(13, "conditional linear distributions", None, crit_clm),
        run(14, "uniformization", None, crit_uniformize),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
