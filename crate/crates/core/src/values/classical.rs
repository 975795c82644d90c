//! Classical values over deterministic answer functions.
//!
//! A deterministic strategy assigns one answer to every question and both
//! players use it, which is the dimension-one synchronous strategy. For
//! games whose two players see disjoint question sets this is the usual
//! classical value.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::cs::{ConstraintDistribution, ConstraintSystem};
use crate::games::{constraint_answer_index, constraint_variable_game, NonlocalGame};
use crate::parallel;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalResult {
    pub value: Rational,
    pub assignment: Vec<usize>,
}

struct Scaled {
    /// `(alice, bob, weight, pair index)` with integer weights.
    pairs: Vec<(usize, usize, u128, usize)>,
    total: u128,
    den: BigInt,
}

fn scaled(game: &NonlocalGame) -> Result<Scaled> {
    let weights: Vec<Rational> = game.pairs().iter().map(|p| p.weight.clone()).collect();
    let den = rational::common_denominator(&weights);
    let ints = rational::scale_to_u128(&weights, &den)
        .ok_or_else(|| Error::Malformed("pair weights do not fit in 128 bits".into()))?;
    let pairs: Vec<(usize, usize, u128, usize)> = game
        .pairs()
        .iter()
        .zip(&ints)
        .enumerate()
        .filter(|(_, (_, &w))| w > 0)
        .map(|(i, (p, &w))| (p.alice, p.bob, w, i))
        .collect();
    let total = pairs.iter().map(|p| p.2).sum();
    Ok(Scaled { pairs, total, den })
}

fn accepts(game: &NonlocalGame, pair: usize, a: usize, b: usize) -> bool {
    let p = &game.pairs()[pair];
    p.predicate.accepts(a, b, game.answers(p.bob))
}

/// Chooses the cheaper of a greedy vertex cover and, for bipartite question
/// graphs, either side. Questions with self-pairs are always included.
fn choose_cover(game: &NonlocalGame, pairs: &[(usize, usize, u128, usize)]) -> Vec<usize> {
    let n = game.num_questions();
    let cost = |set: &[bool]| -> f64 {
        (0..n)
            .filter(|&q| set[q])
            .map(|q| (game.answers(q).max(1) as f64).ln())
            .sum()
    };
    let mut candidates: Vec<Vec<bool>> = Vec::new();

    let mut greedy = vec![false; n];
    for &(a, b, _, _) in pairs {
        if a == b {
            greedy[a] = true;
        }
    }
    loop {
        let mut deg = vec![0usize; n];
        for &(a, b, _, _) in pairs {
            if !greedy[a] && !greedy[b] {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        let pick = (0..n)
            .filter(|&q| deg[q] > 0)
            .max_by(|&x, &y| {
                let sx = deg[x] as f64 / (game.answers(x).max(2) as f64).ln();
                let sy = deg[y] as f64 / (game.answers(y).max(2) as f64).ln();
                sx.partial_cmp(&sy).unwrap().then(y.cmp(&x))
            });
        match pick {
            Some(q) => greedy[q] = true,
            None => break,
        }
    }
    candidates.push(greedy);

    let alice: Vec<bool> = (0..n).map(|q| pairs.iter().any(|p| p.0 == q)).collect();
    let bob: Vec<bool> = (0..n).map(|q| pairs.iter().any(|p| p.1 == q)).collect();
    if (0..n).all(|q| !(alice[q] && bob[q])) {
        candidates.push(alice);
        candidates.push(bob);
    }
    let best = candidates
        .into_iter()
        .min_by(|x, y| cost(x).partial_cmp(&cost(y)).unwrap())
        .unwrap();
    let mut cover: Vec<usize> = (0..n).filter(|&q| best[q]).collect();
    let degree = |q: usize| pairs.iter().filter(|p| p.0 == q || p.1 == q).count();
    cover.sort_by_key(|&q| (std::cmp::Reverse(degree(q)), q));
    cover
}

/// Exact synchronous classical value by branch and bound over a vertex
/// cover of the question graph. The remaining questions are independent
/// once the cover is fixed and are answered by best response. Fails when
/// the number of cover assignments exceeds `cap`.
pub fn classical_value_exact(game: &NonlocalGame, cap: u128) -> Result<ClassicalResult> {
    let sc = scaled(game)?;
    let n = game.num_questions();
    let cover = choose_cover(game, &sc.pairs);
    let needed = cover
        .iter()
        .try_fold(1u128, |acc, &q| acc.checked_mul(game.answers(q) as u128))
        .unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::CapExceeded {
            what: "cover assignments".into(),
            needed,
            cap,
        });
    }
    let mut position = vec![usize::MAX; n];
    for (t, &q) in cover.iter().enumerate() {
        position[q] = t;
    }
    // pairs inside the cover, keyed by the later endpoint
    let mut inner: Vec<Vec<(usize, usize, u128, usize)>> = vec![Vec::new(); cover.len()];
    // pairs between a free question and the cover, grouped by free question
    let mut outer: Vec<Vec<(usize, usize, u128, usize)>> = vec![Vec::new(); n];
    for &p in &sc.pairs {
        let (a, b) = (p.0, p.1);
        match (position[a] != usize::MAX, position[b] != usize::MAX) {
            (true, true) => inner[position[a].max(position[b])].push(p),
            (false, true) => outer[a].push(p),
            (true, false) => outer[b].push(p),
            (false, false) => unreachable!("cover misses a pair"),
        }
    }
    let free: Vec<usize> = (0..n).filter(|&q| position[q] == usize::MAX).collect();
    let inner_rest: Vec<u128> = {
        let mut rest = vec![0u128; cover.len() + 1];
        for t in (0..cover.len()).rev() {
            rest[t] = rest[t + 1] + inner[t].iter().map(|p| p.2).sum::<u128>();
        }
        rest
    };
    let free_total: u128 = free.iter().map(|&q| outer[q].iter().map(|p| p.2).sum::<u128>()).sum();

    let ctx = Search {
        game,
        cover: &cover,
        free: &free,
        inner: &inner,
        outer: &outer,
        inner_rest: &inner_rest,
        free_total,
        total: sc.total,
    };
    let first_answers = cover.first().map_or(1, |&q| game.answers(q));
    let branches = parallel::map_range(first_answers, |a0| {
        let mut assignment = vec![0usize; n];
        let mut best: Option<(u128, Vec<usize>)> = None;
        if cover.is_empty() {
            ctx.leaf(&mut assignment, 0, &mut best);
        } else {
            assignment[cover[0]] = a0;
            let gained = ctx.gain(0, &assignment);
            ctx.dfs(1, gained, &mut assignment, &mut best);
        }
        best
    });
    let mut best: Option<(u128, Vec<usize>)> = None;
    for b in branches.into_iter().flatten() {
        if best.as_ref().is_none_or(|(v, _)| b.0 > *v) {
            best = Some(b);
        }
        if best.as_ref().unwrap().0 == sc.total {
            break;
        }
    }
    let (value, assignment) = best.unwrap_or((0, vec![0; n]));
    Ok(ClassicalResult {
        value: Rational::new(BigInt::from(value), sc.den),
        assignment,
    })
}

struct Search<'a> {
    game: &'a NonlocalGame,
    cover: &'a [usize],
    free: &'a [usize],
    inner: &'a [Vec<(usize, usize, u128, usize)>],
    outer: &'a [Vec<(usize, usize, u128, usize)>],
    inner_rest: &'a [u128],
    free_total: u128,
    total: u128,
}

impl Search<'_> {
    fn gain(&self, t: usize, assignment: &[usize]) -> u128 {
        self.inner[t]
            .iter()
            .filter(|p| accepts(self.game, p.3, assignment[p.0], assignment[p.1]))
            .map(|p| p.2)
            .sum()
    }

    fn dfs(&self, t: usize, fixed: u128, assignment: &mut [usize], best: &mut Option<(u128, Vec<usize>)>) {
        if best.as_ref().is_some_and(|(v, _)| *v == self.total) {
            return;
        }
        let bound = fixed + self.inner_rest[t] + self.free_total;
        if best.as_ref().is_some_and(|(v, _)| bound <= *v) {
            return;
        }
        if t == self.cover.len() {
            self.leaf(assignment, fixed, best);
            return;
        }
        let q = self.cover[t];
        for a in 0..self.game.answers(q) {
            assignment[q] = a;
            let g = self.gain(t, assignment);
            self.dfs(t + 1, fixed + g, assignment, best);
        }
    }

    fn leaf(&self, assignment: &mut [usize], fixed: u128, best: &mut Option<(u128, Vec<usize>)>) {
        let mut value = fixed;
        for &q in self.free {
            let mut top = (0u128, 0usize);
            for a in 0..self.game.answers(q) {
                assignment[q] = a;
                let v: u128 = self.outer[q]
                    .iter()
                    .filter(|p| accepts(self.game, p.3, assignment[p.0], assignment[p.1]))
                    .map(|p| p.2)
                    .sum();
                if v > top.0 {
                    top = (v, a);
                }
            }
            assignment[q] = top.1;
            value += top.0;
        }
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            *best = Some((value, assignment.to_vec()));
        }
    }
}

/// Local search with random restarts of single questions: a random
/// question is moved to its best response, or with probability `noise` to
/// a random answer. Starts from `start` or a seeded random assignment and
/// returns the best assignment seen.
pub fn classical_value_search(
    game: &NonlocalGame,
    seed: u64,
    iters: usize,
    start: Option<&[usize]>,
) -> Result<ClassicalResult> {
    let sc = scaled(game)?;
    let n = game.num_questions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current: Vec<usize> = match start {
        Some(s) if s.len() == n => s.to_vec(),
        Some(_) => return Err(Error::Shape("start assignment length".into())),
        None => (0..n).map(|q| rng.gen_range(0..game.answers(q).max(1))).collect(),
    };
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, p) in sc.pairs.iter().enumerate() {
        touching[p.0].push(k);
        if p.1 != p.0 {
            touching[p.1].push(k);
        }
    }
    let eval_all = |asg: &[usize]| -> u128 {
        sc.pairs
            .iter()
            .filter(|p| accepts(game, p.3, asg[p.0], asg[p.1]))
            .map(|p| p.2)
            .sum()
    };
    let local = |asg: &[usize], q: usize| -> u128 {
        touching[q]
            .iter()
            .map(|&k| &sc.pairs[k])
            .filter(|p| accepts(game, p.3, asg[p.0], asg[p.1]))
            .map(|p| p.2)
            .sum()
    };
    let mut value = eval_all(&current);
    let mut best = (value, current.clone());
    let noise = 0.1;
    for _ in 0..iters {
        if best.0 == sc.total || n == 0 {
            break;
        }
        let q = rng.gen_range(0..n);
        let before = local(&current, q);
        let old = current[q];
        let choice = if rng.gen_bool(noise) {
            rng.gen_range(0..game.answers(q))
        } else {
            let mut top = (before, old);
            for a in 0..game.answers(q) {
                current[q] = a;
                let v = local(&current, q);
                if v > top.0 {
                    top = (v, a);
                }
            }
            top.1
        };
        current[q] = choice;
        let after = local(&current, q);
        value = value + after - before;
        if value > best.0 {
            best = (value, current.clone());
        }
    }
    Ok(ClassicalResult {
        value: Rational::new(BigInt::from(best.0), sc.den),
        assignment: best.1,
    })
}


/// Backtracking search with propagation for an assignment satisfying every
/// constraint. `Ok(None)` means the system is unsatisfiable; more than
/// `cap` branching nodes is an error.
pub fn satisfying_assignment(system: &ConstraintSystem, cap: u128) -> Result<Option<Vec<u8>>> {
    let occ = system.occurrences();
    let mut partial: Vec<Option<u8>> = vec![None; system.num_variables()];
    let mut nodes = 0u128;
    let found = sat_dfs(system, &occ, &mut partial, (0..system.num_constraints()).collect(), &mut nodes, cap)?;
    // variables in no constraint are free
    Ok(found.then(|| partial.iter().map(|v| v.unwrap_or(0)).collect()))
}

fn consistent<'a>(system: &'a ConstraintSystem, i: usize, partial: &'a [Option<u8>]) -> impl Iterator<Item = &'a Vec<u8>> {
    let c = system.constraint(i);
    c.relation()
        .iter()
        .filter(move |phi| c.context().iter().zip(phi.iter()).all(|(&x, &a)| partial[x].is_none_or(|v| v == a)))
}

/// Forces values until nothing changes. Returns false on a conflict.
fn propagate(
    system: &ConstraintSystem,
    occ: &[Vec<usize>],
    partial: &mut [Option<u8>],
    mut queue: Vec<usize>,
    trail: &mut Vec<usize>,
) -> bool {
    while let Some(i) = queue.pop() {
        let c = system.constraint(i);
        let mut forced: Vec<Option<Option<u8>>> = vec![None; c.arity()];
        let mut any = false;
        for phi in consistent(system, i, partial) {
            any = true;
            for (slot, &a) in phi.iter().enumerate() {
                forced[slot] = match forced[slot] {
                    None => Some(Some(a)),
                    Some(Some(b)) if b == a => Some(Some(a)),
                    _ => Some(None),
                };
            }
        }
        if !any {
            return false;
        }
        for (slot, &x) in c.context().iter().enumerate() {
            if let (None, Some(Some(a))) = (partial[x], forced[slot]) {
                partial[x] = Some(a);
                trail.push(x);
                queue.extend(occ[x].iter().copied());
            }
        }
    }
    true
}

fn sat_dfs(
    system: &ConstraintSystem,
    occ: &[Vec<usize>],
    partial: &mut Vec<Option<u8>>,
    queue: Vec<usize>,
    nodes: &mut u128,
    cap: u128,
) -> Result<bool> {
    *nodes += 1;
    if *nodes > cap {
        return Err(Error::CapExceeded {
            what: "satisfiability search nodes".into(),
            needed: *nodes,
            cap,
        });
    }
    let mut trail = Vec::new();
    if !propagate(system, occ, partial, queue, &mut trail) {
        for x in trail {
            partial[x] = None;
        }
        return Ok(false);
    }
    // branch inside the constraint with the fewest consistent tuples
    let pick = (0..system.num_constraints())
        .filter(|&i| system.constraint(i).context().iter().any(|&x| partial[x].is_none()))
        .min_by_key(|&i| (consistent(system, i, partial).count(), i));
    let Some(i) = pick else {
        return Ok(true);
    };
    let x = *system.constraint(i).context().iter().find(|&&x| partial[x].is_none()).unwrap();
    for a in 0..system.alphabet() as u8 {
        partial[x] = Some(a);
        if sat_dfs(system, occ, partial, occ[x].clone(), nodes, cap)? {
            return Ok(true);
        }
    }
    partial[x] = None;
    for x in trail {
        partial[x] = None;
    }
    Ok(false)
}

/// Exact classical value of the constraint-variable game of a system. A
/// satisfying assignment certifies value 1; otherwise this falls back to
/// the exhaustive game search.
pub fn system_value_exact(
    system: &ConstraintSystem,
    mu: &ConstraintDistribution,
    cap: u128,
) -> Result<ClassicalResult> {
    let game = constraint_variable_game(system, mu)?;
    if let Some(x) = satisfying_assignment(system, cap)? {
        let k = system.alphabet();
        let mut assignment: Vec<usize> = system
            .constraints()
            .iter()
            .map(|c| constraint_answer_index(k, &c.restrict(&x)))
            .collect();
        assignment.extend(x.iter().map(|&v| v as usize));
        let value = game.deterministic_value(&assignment);
        return Ok(ClassicalResult { value, assignment });
    }
    classical_value_exact(&game, cap)
}
