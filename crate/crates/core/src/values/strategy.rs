//! Finite-dimensional synchronous strategies under the normalized trace.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{syntax, Error, Result};
use crate::games::{NonlocalGame, Predicate};
use crate::linalg::{self, CMat, C64};
use crate::parallel;
use crate::rational;
use crate::reductions::SlcInstance;

/// One PVM per question, all of dimension `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDimStrategy {
    dim: usize,
    ops: Vec<Vec<CMat>>,
}

impl FiniteDimStrategy {
    /// Checks every family against the PVM axioms at `tol`.
    pub fn new(dim: usize, ops: Vec<Vec<CMat>>, tol: f64) -> Result<Self> {
        for (q, family) in ops.iter().enumerate() {
            if family.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
                return Err(Error::Shape(format!("question {q}: operators are not {dim}x{dim}")));
            }
            let v = linalg::pvm_violation(family);
            if v > tol {
                return Err(Error::Invariant(format!("question {q} is not a PVM (violation {v:.3e})")));
            }
        }
        Ok(FiniteDimStrategy { dim, ops })
    }

    pub(crate) fn new_unchecked(dim: usize, ops: Vec<Vec<CMat>>) -> Self {
        FiniteDimStrategy { dim, ops }
    }

    /// Dimension-one strategy answering `answers[q]` with certainty.
    pub fn deterministic(answers: &[usize], counts: &[usize]) -> Self {
        let ops = answers
            .iter()
            .zip(counts)
            .map(|(&a, &n)| {
                (0..n)
                    .map(|b| CMat::from_element(1, 1, C64::new(if a == b { 1.0 } else { 0.0 }, 0.0)))
                    .collect()
            })
            .collect();
        FiniteDimStrategy { dim: 1, ops }
    }

    pub fn random<R: Rng + ?Sized>(counts: &[usize], dim: usize, rng: &mut R) -> Self {
        let ops = counts.iter().map(|&n| linalg::random_pvm(dim, n, rng)).collect();
        FiniteDimStrategy { dim, ops }
    }

    pub fn for_game_random<R: Rng + ?Sized>(game: &NonlocalGame, dim: usize, rng: &mut R) -> Self {
        let counts: Vec<usize> = game.questions().iter().map(|q| q.answers).collect();
        Self::random(&counts, dim, rng)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_questions(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Vec<CMat>] {
        &self.ops
    }

    pub fn family(&self, q: usize) -> &[CMat] {
        &self.ops[q]
    }

    pub(crate) fn family_mut(&mut self, q: usize) -> &mut Vec<CMat> {
        &mut self.ops[q]
    }

    pub fn into_ops(self) -> Vec<Vec<CMat>> {
        self.ops
    }

    /// Largest PVM violation over all questions.
    pub fn violation(&self) -> f64 {
        self.ops.iter().map(|f| linalg::pvm_violation(f)).fold(0.0, f64::max)
    }

    /// Hermitizes and re-projects every family.
    pub fn reprojected(&self) -> Self {
        FiniteDimStrategy {
            dim: self.dim,
            ops: self.ops.iter().map(|f| linalg::reproject_pvm(f)).collect(),
        }
    }

    fn check_game(&self, game: &NonlocalGame) -> Result<()> {
        if self.ops.len() != game.num_questions() {
            return Err(Error::Shape(format!(
                "strategy has {} questions, game has {}",
                self.ops.len(),
                game.num_questions()
            )));
        }
        for (q, f) in self.ops.iter().enumerate() {
            if f.len() != game.answers(q) {
                return Err(Error::Shape(format!(
                    "question {q}: {} outcomes, game expects {}",
                    f.len(),
                    game.answers(q)
                )));
            }
        }
        Ok(())
    }
}

/// Complex `tr(ab)/D`.
fn ntrace_product_c(a: &CMat, b: &CMat) -> C64 {
    let d = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc / d as f64
}

fn is_zero(m: &CMat) -> bool {
    m.iter().all(|z| z.norm_sqr() < 1e-24)
}

/// `sum_{(i,j)} pi(i,j) sum_{accepted (a,b)} tau(M_a^i M_b^j)`, refusing
/// results with an imaginary part above tolerance.
pub fn strategy_value(game: &NonlocalGame, strategy: &FiniteDimStrategy) -> Result<f64> {
    strategy.check_game(game)?;
    let terms = parallel::map_range(game.pairs().len(), |k| {
        let p = &game.pairs()[k];
        let w = rational::to_f64(&p.weight);
        if w == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let fa = strategy.family(p.alice);
        let fb = strategy.family(p.bob);
        let mut acc = C64::new(0.0, 0.0);
        match &p.predicate {
            Predicate::Projection(map) => {
                for (a, b) in map.iter().enumerate() {
                    if let Some(b) = b {
                        if !is_zero(&fa[a]) {
                            acc += ntrace_product_c(&fa[a], &fb[*b as usize]);
                        }
                    }
                }
            }
            Predicate::Table(_) => {
                for (a, b) in p.predicate.accepted_pairs(fa.len(), fb.len()) {
                    acc += ntrace_product_c(&fa[a], &fb[b]);
                }
            }
        }
        acc * w
    });
    let total: C64 = terms.into_iter().sum();
    if total.im.abs() > 1e-6 {
        return Err(Error::Invariant(format!("value has imaginary part {:.3e}", total.im)));
    }
    Ok(total.re)
}

/// Largest commutator over question pairs of positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutationReport {
    pub max_commutator: f64,
    /// `(question, question, outcome, outcome)` attaining the maximum.
    pub witness: Option<(usize, usize, usize, usize)>,
    pub tolerance: f64,
}

impl CommutationReport {
    pub fn passes(&self) -> bool {
        self.max_commutator <= self.tolerance
    }
}

fn commutation_over_pairs(
    strategy: &FiniteDimStrategy,
    pairs: Vec<(usize, usize)>,
    tol: f64,
) -> CommutationReport {
    let nonzero: Vec<Vec<usize>> = strategy
        .ops
        .iter()
        .map(|f| (0..f.len()).filter(|&a| !is_zero(&f[a])).collect())
        .collect();
    let results = parallel::map_range(pairs.len(), |k| {
        let (v, w) = pairs[k];
        let mut best = (0.0f64, None);
        for &a in &nonzero[v] {
            for &b in &nonzero[w] {
                let c = linalg::commutator_norm(&strategy.ops[v][a], &strategy.ops[w][b]);
                if best.1.is_none() || c > best.0 {
                    best = (c, Some((v, w, a, b)));
                }
            }
        }
        best
    });
    let mut report = CommutationReport {
        max_commutator: 0.0,
        witness: None,
        tolerance: tol,
    };
    for (c, w) in results {
        if w.is_some() && (report.witness.is_none() || c > report.max_commutator) {
            report.max_commutator = c;
            report.witness = w;
        }
    }
    report
}

/// Commutation on every question pair the game asks with positive weight.
pub fn game_oracularizability(game: &NonlocalGame, strategy: &FiniteDimStrategy, tol: f64) -> Result<CommutationReport> {
    strategy.check_game(game)?;
    let mut pairs: Vec<(usize, usize)> = game
        .pairs()
        .iter()
        .filter(|p| p.alice != p.bob && p.weight > rational::int(0))
        .map(|p| (p.alice.min(p.bob), p.alice.max(p.bob)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    Ok(commutation_over_pairs(strategy, pairs, tol))
}

fn check_slc(inst: &SlcInstance, strategy: &FiniteDimStrategy) -> Result<()> {
    if strategy.num_questions() != inst.num_vertices() {
        return Err(Error::Shape("one PVM per vertex is required".into()));
    }
    for (v, &n) in inst.label_counts().iter().enumerate() {
        if strategy.family(v).len() != n {
            return Err(Error::Shape(format!("vertex {v} needs {n} outcomes")));
        }
    }
    Ok(())
}

/// `(1/|E|) sum_e sum_{pi_ev(i) = pi_ew(j)} tau(P_v^i P_w^j)`, computed
/// through the coarse-grained measurements `sum_{i in pi_ev^{-1}(l)} P_v^i`.
pub fn slc_strategy_value(inst: &SlcInstance, strategy: &FiniteDimStrategy) -> Result<f64> {
    check_slc(inst, strategy)?;
    let mut keys: HashMap<(usize, usize), usize> = HashMap::new();
    let mut list = Vec::new();
    for e in inst.edges() {
        for key in [(e.v, e.map_v), (e.w, e.map_w)] {
            keys.entry(key).or_insert_with(|| {
                list.push(key);
                list.len() - 1
            });
        }
    }
    let k = inst.right_labels();
    let coarse = parallel::map_range(list.len(), |idx| {
        let (v, m) = list[idx];
        coarse_grain(strategy.family(v), &inst.maps()[m], k)
    });
    let edges = inst.edges();
    let terms = parallel::map_range(edges.len(), |i| {
        let e = &edges[i];
        let qv = &coarse[keys[&(e.v, e.map_v)]];
        let qw = &coarse[keys[&(e.w, e.map_w)]];
        qv.iter()
            .zip(qw)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => linalg::ntrace_product(a, b),
                _ => 0.0,
            })
            .sum::<f64>()
    });
    Ok(terms.iter().sum::<f64>() / edges.len().max(1) as f64)
}

/// `sum_{i in map^{-1}(l)} P^i` for each `l < k`; `None` for empty sums.
pub fn coarse_grain(family: &[CMat], map: &[u32], k: usize) -> Vec<Option<CMat>> {
    let mut out: Vec<Option<CMat>> = vec![None; k];
    for (i, &l) in map.iter().enumerate() {
        if is_zero(&family[i]) {
            continue;
        }
        let slot = &mut out[l as usize];
        match slot {
            Some(m) => *m += &family[i],
            None => *slot = Some(family[i].clone()),
        }
    }
    out
}

/// Commutation of `P_v^a` and `P_w^b` over every edge with `v != w`.
pub fn oracularizability_check(inst: &SlcInstance, strategy: &FiniteDimStrategy, tol: f64) -> Result<CommutationReport> {
    check_slc(inst, strategy)?;
    let mut pairs: Vec<(usize, usize)> = inst
        .edges()
        .iter()
        .filter(|e| e.v != e.w)
        .map(|e| (e.v.min(e.w), e.v.max(e.w)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    Ok(commutation_over_pairs(strategy, pairs, tol))
}

/// `strat D Q`, then for each question a line `question q n` followed by
/// `n` lines of `D^2` complex entries written as `re im`, row-major.
pub fn write_strategy(strategy: &FiniteDimStrategy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "strat {} {}", strategy.dim, strategy.ops.len());
    for (q, family) in strategy.ops.iter().enumerate() {
        let _ = writeln!(out, "question {q} {}", family.len());
        for m in family {
            let mut first = true;
            for i in 0..strategy.dim {
                for j in 0..strategy.dim {
                    let z = m[(i, j)];
                    if !first {
                        out.push(' ');
                    }
                    first = false;
                    let _ = write!(out, "{} {}", z.re, z.im);
                }
            }
            out.push('\n');
        }
    }
    out
}

/// The operator families of a `strat` file, unchecked; also reads POVMs.
pub fn parse_operator_families(text: &str) -> Result<(usize, Vec<Vec<CMat>>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != "strat" {
        return Err(syntax(hl, "expected `strat D Q`"));
    }
    let dim: usize = h[1].parse().map_err(|_| syntax(hl, "bad dimension"))?;
    let nq: usize = h[2].parse().map_err(|_| syntax(hl, "bad question count"))?;
    if dim == 0 {
        return Err(syntax(hl, "dimension must be positive"));
    }
    let mut ops = Vec::with_capacity(nq);
    for q in 0..nq {
        let (ql, l) = lines.next().ok_or_else(|| syntax(hl, format!("missing question {q}")))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 || t[0] != "question" || t[1] != q.to_string() {
            return Err(syntax(ql, format!("expected `question {q} n`")));
        }
        let n: usize = t[2].parse().map_err(|_| syntax(ql, "bad outcome count"))?;
        let mut family = Vec::with_capacity(n);
        for _ in 0..n {
            let (ml, l) = lines.next().ok_or_else(|| syntax(ql, "missing operator"))?;
            let vals: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| syntax(ml, format!("bad number `{t}`"))))
                .collect::<Result<_>>()?;
            if vals.len() != 2 * dim * dim {
                return Err(syntax(ml, format!("expected {} numbers", 2 * dim * dim)));
            }
            family.push(CMat::from_fn(dim, dim, |i, j| {
                let k = 2 * (i * dim + j);
                C64::new(vals[k], vals[k + 1])
            }));
        }
        ops.push(family);
    }
    if let Some((l, _)) = lines.next() {
        return Err(syntax(l, "trailing input"));
    }
    Ok((dim, ops))
}

pub fn parse_strategy(text: &str, tol: f64) -> Result<FiniteDimStrategy> {
    let (dim, ops) = parse_operator_families(text)?;
    FiniteDimStrategy::new(dim, ops, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn strategy_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = FiniteDimStrategy::random(&[2, 3], 2, &mut rng);
        let back = parse_strategy(&write_strategy(&s), 1e-8).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_non_projective_operator() {
        let half = CMat::from_element(1, 1, C64::new(0.5, 0.0));
        assert!(FiniteDimStrategy::new(1, vec![vec![half.clone(), half]], 1e-8).is_err());
    }
}
