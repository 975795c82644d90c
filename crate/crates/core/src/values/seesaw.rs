//! Alternating best responses over synchronous PVM strategies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::strategy::{strategy_value, FiniteDimStrategy};
use crate::error::{Error, Result};
use crate::games::{NonlocalGame, Predicate};
use crate::linalg::{self, CMat};
use crate::rational;

#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub value: f64,
    pub strategy: FiniteDimStrategy,
}

/// Largest dimension the seesaw accepts.
pub const SEESAW_MAX_DIM: usize = 8;

/// Linear weights `W_a` such that `sum_a tau(W_a P_a)` is the part of the
/// value involving question `q`, holding every other question fixed. Pairs
/// of `q` with itself are linearized around the current PVM.
fn response_weights(game: &NonlocalGame, strategy: &FiniteDimStrategy, q: usize, touching: &[usize]) -> Vec<CMat> {
    let dim = strategy.dim();
    let mut weights = vec![linalg::zeros(dim); game.answers(q)];
    for &k in touching {
        let p = &game.pairs()[k];
        let w = linalg::C64::new(rational::to_f64(&p.weight), 0.0);
        let (na, nb) = (game.answers(p.alice), game.answers(p.bob));
        let accepted: Vec<(usize, usize)> = match &p.predicate {
            Predicate::Projection(map) => map
                .iter()
                .enumerate()
                .filter_map(|(a, b)| b.map(|b| (a, b as usize)))
                .collect(),
            Predicate::Table(_) => p.predicate.accepted_pairs(na, nb),
        };
        for (a, b) in accepted {
            if p.alice == q {
                weights[a] += strategy.family(p.bob)[b].clone() * w;
            }
            if p.bob == q {
                weights[b] += strategy.family(p.alice)[a].clone() * w;
            }
        }
    }
    weights
}

fn run(game: &NonlocalGame, mut strategy: FiniteDimStrategy, iters: usize, touching: &[Vec<usize>]) -> Result<SeesawResult> {
    let mut value = strategy_value(game, &strategy)?;
    for _ in 0..iters {
        let start = value;
        for q in 0..game.num_questions() {
            if touching[q].is_empty() {
                continue;
            }
            let weights = response_weights(game, &strategy, q, &touching[q]);
            let candidate = linalg::maximize_linear_pvm(&weights, Some(strategy.family(q)));
            let old = std::mem::replace(strategy.family_mut(q), candidate);
            let next = strategy_value(game, &strategy)?;
            if next + 1e-12 >= value {
                value = next.max(value);
            } else {
                *strategy.family_mut(q) = old;
            }
        }
        if value - start < 1e-10 || value >= 1.0 - 1e-12 {
            break;
        }
    }
    Ok(SeesawResult { value: value.min(1.0), strategy })
}

/// Best strategy found from each warm start whose dimension divides `dim`,
/// and from seeded random starts:
/// five of them when some question has more than two answers, two
/// otherwise. A heuristic lower bound on the synchronous value.
pub fn seesaw_lower_bound(
    game: &NonlocalGame,
    dim: usize,
    seed: u64,
    iters: usize,
    warm_starts: &[FiniteDimStrategy],
) -> Result<SeesawResult> {
    if dim == 0 || dim > SEESAW_MAX_DIM || iters == 0 {
        return Err(Error::Malformed(format!("seesaw needs 1 <= D <= {SEESAW_MAX_DIM} and iters >= 1")));
    }
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); game.num_questions()];
    for (k, p) in game.pairs().iter().enumerate() {
        touching[p.alice].push(k);
        if p.bob != p.alice {
            touching[p.bob].push(k);
        }
    }
    let mut starts: Vec<FiniteDimStrategy> = warm_starts.iter().filter_map(|s| embed(s, dim)).collect();
    let restarts = if game.questions().iter().any(|q| q.answers > 2) { 5 } else { 2 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        starts.push(FiniteDimStrategy::for_game_random(game, dim, &mut rng));
    }
    let mut best: Option<SeesawResult> = None;
    for s in starts {
        let r = run(game, s, iters, &touching)?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.unwrap())
}

/// `S (x) I`, when `dim` is a multiple of the strategy's dimension.
pub fn embed(strategy: &FiniteDimStrategy, dim: usize) -> Option<FiniteDimStrategy> {
    let d = strategy.dim();
    if dim % d != 0 {
        return None;
    }
    let pad = linalg::identity(dim / d);
    let ops = strategy
        .ops()
        .iter()
        .map(|family| family.iter().map(|m| m.kronecker(&pad)).collect())
        .collect();
    Some(FiniteDimStrategy::new_unchecked(dim, ops))
}
