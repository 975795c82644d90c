//! Smooth label cover instances built from the dummy game, their verifier
//! and file format.
//!
//! Every right question `j` of the dummy game contributes all ordered pairs
//! `(v, w)` of its left neighbors, `v = w` included, so
//! `|E| = sum_j |N_j|^2`. Projection maps are pooled: one per incidence of a
//! left vertex and a right question.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cs::ConstraintSystem;
use crate::error::{syntax, Error, Result};
use crate::games::dummy::{Coord, DummyGame, DummyQuestion};
use crate::games::{NonlocalGame, Predicate, Question, QuestionPair};
use crate::parallel;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlcEdge {
    pub v: usize,
    pub w: usize,
    pub map_v: usize,
    pub map_w: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlcInstance {
    label_counts: Vec<usize>,
    right_labels: usize,
    maps: Vec<Vec<u32>>,
    edges: Vec<SlcEdge>,
}

impl SlcInstance {
    pub fn new(label_counts: Vec<usize>, right_labels: usize, maps: Vec<Vec<u32>>, edges: Vec<SlcEdge>) -> Result<Self> {
        for (id, map) in maps.iter().enumerate() {
            if let Some(&l) = map.iter().find(|&&l| l as usize >= right_labels) {
                return Err(Error::Malformed(format!("map {id} sends a label to {l} outside 0..{right_labels}")));
            }
        }
        for (e, edge) in edges.iter().enumerate() {
            for (x, m) in [(edge.v, edge.map_v), (edge.w, edge.map_w)] {
                if x >= label_counts.len() || m >= maps.len() {
                    return Err(Error::Malformed(format!("edge {e} refers to a missing vertex or map")));
                }
                if maps[m].len() != label_counts[x] {
                    return Err(Error::Malformed(format!(
                        "edge {e}: map {m} has {} entries, vertex {x} has {} labels",
                        maps[m].len(),
                        label_counts[x]
                    )));
                }
            }
        }
        Ok(SlcInstance {
            label_counts,
            right_labels,
            maps,
            edges,
        })
    }

    /// Builds an instance from explicit per-edge maps, pooling equal maps.
    pub fn from_edge_maps(label_counts: Vec<usize>, right_labels: usize, edges: Vec<(usize, usize, Vec<u32>, Vec<u32>)>) -> Result<Self> {
        let mut pool: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut maps = Vec::new();
        let mut intern = |m: Vec<u32>| {
            *pool.entry(m.clone()).or_insert_with(|| {
                maps.push(m);
                maps.len() - 1
            })
        };
        let edges: Vec<SlcEdge> = edges
            .into_iter()
            .map(|(v, w, mv, mw)| SlcEdge {
                v,
                w,
                map_v: intern(mv),
                map_w: intern(mw),
            })
            .collect();
        SlcInstance::new(label_counts, right_labels, maps, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.label_counts.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `n`, the largest label set.
    pub fn max_labels(&self) -> usize {
        self.label_counts.iter().copied().max().unwrap_or(0)
    }

    /// `k`, the size of the projected label range.
    pub fn right_labels(&self) -> usize {
        self.right_labels
    }

    pub fn label_counts(&self) -> &[usize] {
        &self.label_counts
    }

    pub fn edges(&self) -> &[SlcEdge] {
        &self.edges
    }

    pub fn maps(&self) -> &[Vec<u32>] {
        &self.maps
    }

    pub fn edge_maps(&self, e: usize) -> (&[u32], &[u32]) {
        let edge = &self.edges[e];
        (&self.maps[edge.map_v], &self.maps[edge.map_w])
    }

    /// Number of edges whose first endpoint is each vertex.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_vertices()];
        for e in &self.edges {
            d[e.v] += 1;
        }
        d
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.out_degrees();
        let first = *d.first()?;
        d.iter().all(|&x| x == first).then_some(first)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.v].push(e.w);
            adj[e.w].push(e.v);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Fraction of edges satisfied by a deterministic labeling.
    pub fn classical_value(&self, labels: &[usize]) -> Rational {
        let ok = self
            .edges
            .iter()
            .filter(|e| self.maps[e.map_v][labels[e.v]] == self.maps[e.map_w][labels[e.w]])
            .count();
        Rational::new(BigInt::from(ok), BigInt::from(self.edges.len().max(1)))
    }
}

/// Where vertices and labels of a built instance come from.
#[derive(Debug, Clone, PartialEq)]
pub struct SlcProvenance {
    pub j: usize,
    pub r: usize,
    /// Vertex to its left question of the dummy game.
    pub left: Vec<Vec<usize>>,
    /// Right questions in order of first appearance.
    pub right: Vec<DummyQuestion>,
    /// Right question to its `(vertex, map)` incidences.
    pub incidences: Vec<Vec<(usize, usize)>>,
}

impl SlcProvenance {
    /// Vertex labels induced by a global assignment satisfying every
    /// constraint in the left questions.
    pub fn lift_assignment(&self, system: &ConstraintSystem, assignment: &[u8]) -> Option<Vec<usize>> {
        self.left
            .iter()
            .map(|q| {
                let mut idx = 0;
                for &c in q {
                    let con = system.constraint(c);
                    idx = idx * con.relation().len() + con.relation_index(&con.restrict(assignment))?;
                }
                Some(idx)
            })
            .collect()
    }

    /// The tuple of satisfying assignments a label stands for.
    pub fn decode_label(&self, system: &ConstraintSystem, vertex: usize, label: usize) -> Vec<Vec<u8>> {
        let q = &self.left[vertex];
        let radices: Vec<usize> = q.iter().map(|&c| system.constraint(c).relation().len()).collect();
        DummyGame::decode_answer(&radices, label)
            .into_iter()
            .zip(q)
            .map(|(s, &c)| system.constraint(c).relation()[s].clone())
            .collect()
    }
}

/// Edges `sum_j |N_j|^2` and maps are both bounded by `cap`.
pub fn build_slc(system: &ConstraintSystem, j: usize, r: usize, cap: u128) -> Result<(SlcInstance, SlcProvenance)> {
    let game = DummyGame::new(system, j, r, cap)?;
    let rows = parallel::map_range(game.num_left(), |idx| {
        let left = game.left_question(idx);
        let neighbors = game.neighbors(&left);
        let tables: Vec<(DummyQuestion, Vec<u32>)> = neighbors
            .into_iter()
            .map(|n| {
                let t = game.projection_table(&left, &n.question).unwrap();
                (n.question, t)
            })
            .collect();
        (left, tables)
    });
    let mut right_index: HashMap<DummyQuestion, usize> = HashMap::new();
    let mut right: Vec<DummyQuestion> = Vec::new();
    let mut incidences: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut maps = Vec::new();
    let mut left = Vec::with_capacity(rows.len());
    let mut label_counts = Vec::with_capacity(rows.len());
    let mut right_labels = 0;
    for (v, (question, tables)) in rows.into_iter().enumerate() {
        label_counts.push(game.left_answers(&question));
        left.push(question);
        for (rq, table) in tables {
            right_labels = right_labels.max(game.right_answers(&rq));
            let next = right.len();
            let id = *right_index.entry(rq.clone()).or_insert_with(|| {
                right.push(rq);
                incidences.push(Vec::new());
                next
            });
            incidences[id].push((v, maps.len()));
            maps.push(table);
        }
    }
    let needed: u128 = incidences.iter().map(|n| (n.len() as u128).pow(2)).sum();
    if needed > cap {
        return Err(Error::CapExceeded {
            what: "SLC edges".into(),
            needed,
            cap,
        });
    }
    let mut edges = Vec::with_capacity(needed as usize);
    for inc in &incidences {
        for &(v, map_v) in inc {
            for &(w, map_w) in inc {
                edges.push(SlcEdge { v, w, map_v, map_w });
            }
        }
    }
    let inst = SlcInstance::new(label_counts, right_labels, maps, edges)?;
    Ok((
        inst,
        SlcProvenance {
            j,
            r,
            left,
            right,
            incidences,
        },
    ))
}

/// The 2-CS game of an instance: questions are vertices, each edge is asked
/// in both orders with probability `1/(2|E|)`. Marked synchronous when the
/// game qualifies.
pub fn slc_two_cs_game(inst: &SlcInstance) -> Result<NonlocalGame> {
    let questions: Vec<Question> = inst
        .label_counts
        .iter()
        .enumerate()
        .map(|(v, &n)| Question {
            label: format!("v{v}"),
            answers: n,
        })
        .collect();
    let weight = Rational::new(BigInt::from(1), BigInt::from(2 * inst.num_edges()));
    let mut pairs = Vec::with_capacity(2 * inst.num_edges());
    for e in &inst.edges {
        for (a, ma, b, mb) in [(e.v, e.map_v, e.w, e.map_w), (e.w, e.map_w, e.v, e.map_v)] {
            let (pa, pb) = (&inst.maps[ma], &inst.maps[mb]);
            let table = pa.iter().flat_map(|&x| pb.iter().map(move |&y| x == y)).collect();
            pairs.push(QuestionPair {
                alice: a,
                bob: b,
                weight: weight.clone(),
                predicate: Predicate::Table(table),
            });
        }
    }
    let game = NonlocalGame::new(questions.clone(), pairs.clone(), false)?;
    if game.synchrony_violation().is_none() {
        NonlocalGame::new(questions, pairs, true)
    } else {
        Ok(game)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyParams {
    pub j: usize,
    pub r: usize,
    /// Label pairs examined before switching from exhaustive to sampled
    /// smoothness; also the sample count when sampling.
    pub pair_budget: u64,
    pub deltas: Vec<f64>,
    pub subsets: usize,
    pub seed: u64,
}

impl VerifyParams {
    pub fn new(j: usize, r: usize) -> Self {
        VerifyParams {
            j,
            r,
            pair_budget: 200_000_000,
            deltas: vec![0.25, 0.5],
            subsets: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessCheck {
    pub max_collision: Rational,
    pub bound: Rational,
    /// `(vertex, label, label)` attaining the maximum.
    pub witness: Option<(usize, usize, usize)>,
    pub exhaustive: bool,
}

impl SmoothnessCheck {
    pub fn holds(&self) -> bool {
        self.max_collision <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageCheck {
    pub max_fiber: usize,
    pub bound: usize,
    /// `(map, image)` attaining the maximum.
    pub witness: Option<(usize, u32)>,
}

impl PreimageCheck {
    pub fn holds(&self) -> bool {
        self.max_fiber <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityCheck {
    pub min_degree: usize,
    pub max_degree: usize,
    pub connected: bool,
}

impl RegularityCheck {
    pub fn holds(&self) -> bool {
        self.min_degree == self.max_degree && self.connected
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCheck {
    pub delta: f64,
    pub subset_size: usize,
    pub samples: usize,
    /// Smallest `|E'| |V|^2 / (|V'|^2 |E|)` seen.
    pub worst_ratio: f64,
    /// A subset with `|E'| < (|V'|/|V|)^2 |E|`, if any was found.
    pub witness: Option<Vec<usize>>,
}

impl ExpansionCheck {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlcReport {
    pub smoothness: SmoothnessCheck,
    pub preimage: PreimageCheck,
    pub regularity: RegularityCheck,
    pub expansion: Vec<ExpansionCheck>,
}

impl SlcReport {
    pub fn all_hold(&self) -> bool {
        self.smoothness.holds()
            && self.preimage.holds()
            && self.regularity.holds()
            && self.expansion.iter().all(ExpansionCheck::holds)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let sm = &self.smoothness;
        let _ = writeln!(
            s,
            "smoothness {} max {} bound {} ({}){}",
            verdict(sm.holds()),
            crate::rational::format_rational(&sm.max_collision),
            crate::rational::format_rational(&sm.bound),
            if sm.exhaustive { "exhaustive" } else { "sampled" },
            sm.witness
                .map(|(v, a, b)| format!(" at vertex {v} labels {a},{b}"))
                .unwrap_or_default()
        );
        let p = &self.preimage;
        let _ = writeln!(
            s,
            "preimage {} max {} bound {}{}",
            verdict(p.holds()),
            p.max_fiber,
            p.bound,
            p.witness.map(|(m, l)| format!(" at map {m} image {l}")).unwrap_or_default()
        );
        let g = &self.regularity;
        let _ = writeln!(
            s,
            "regularity {} degree {}..{} connected {}",
            verdict(g.holds()),
            g.min_degree,
            g.max_degree,
            g.connected
        );
        for e in &self.expansion {
            let _ = writeln!(
                s,
                "expansion {} delta {} |V'| {} samples {} worst {:.6}",
                verdict(e.holds()),
                e.delta,
                e.subset_size,
                e.samples,
                e.worst_ratio
            );
        }
        s
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// Structural checks: smoothness of the first-endpoint maps at each vertex,
/// the fiber bound `4^R`, regularity and connectivity, and sampled weak
/// expansion.
pub fn verify_slc(inst: &SlcInstance, params: &VerifyParams) -> SlcReport {
    SlcReport {
        smoothness: check_smoothness(inst, params),
        preimage: check_preimage(inst, params.r),
        regularity: {
            let d = inst.out_degrees();
            RegularityCheck {
                min_degree: d.iter().copied().min().unwrap_or(0),
                max_degree: d.iter().copied().max().unwrap_or(0),
                connected: inst.is_connected(),
            }
        },
        expansion: params
            .deltas
            .iter()
            .enumerate()
            .map(|(i, &delta)| check_expansion(inst, delta, params.subsets, params.seed.wrapping_add(i as u64)))
            .collect(),
    }
}

/// Per vertex: distinct first-endpoint maps with their edge multiplicity.
fn maps_by_vertex(inst: &SlcInstance) -> Vec<Vec<(usize, u64)>> {
    let mut out: Vec<HashMap<usize, u64>> = vec![HashMap::new(); inst.num_vertices()];
    for e in &inst.edges {
        *out[e.v].entry(e.map_v).or_insert(0) += 1;
    }
    out.into_iter()
        .map(|m| {
            let mut v: Vec<(usize, u64)> = m.into_iter().collect();
            v.sort_unstable();
            v
        })
        .collect()
}

fn check_smoothness(inst: &SlcInstance, params: &VerifyParams) -> SmoothnessCheck {
    let by_vertex = maps_by_vertex(inst);
    let work: u64 = by_vertex
        .iter()
        .enumerate()
        .map(|(v, m)| {
            let n = inst.label_counts[v] as u64;
            n * n.saturating_sub(1) / 2 * m.len() as u64
        })
        .sum();
    let exhaustive = work <= params.pair_budget;
    let collide = |v: usize, a: usize, b: usize| -> u64 {
        by_vertex[v]
            .iter()
            .filter(|&&(m, _)| inst.maps[m][a] == inst.maps[m][b])
            .map(|&(_, c)| c)
            .sum()
    };
    // (hits, degree, witness) with the largest hits/degree
    type Best = Option<(u64, u64, (usize, usize, usize))>;
    let better = |x: Best, y: Best| -> Best {
        match (x, y) {
            (None, y) => y,
            (x, None) => x,
            (Some(a), Some(b)) => {
                if (b.0 as u128) * (a.1 as u128) > (a.0 as u128) * (b.1 as u128) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        }
    };
    let best: Best = if exhaustive {
        parallel::map_range(inst.num_vertices(), |v| {
            let deg: u64 = by_vertex[v].iter().map(|&(_, c)| c).sum();
            let n = inst.label_counts[v];
            let mut best: Best = None;
            if deg == 0 {
                return best;
            }
            for a in 0..n {
                for b in a + 1..n {
                    best = better(best, Some((collide(v, a, b), deg, (v, a, b))));
                }
            }
            best
        })
        .into_iter()
        .fold(None, better)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let candidates: Vec<usize> = (0..inst.num_vertices())
            .filter(|&v| inst.label_counts[v] >= 2 && !by_vertex[v].is_empty())
            .collect();
        let mut best: Best = None;
        if !candidates.is_empty() {
            for _ in 0..params.pair_budget {
                let v = candidates[rng.gen_range(0..candidates.len())];
                let n = inst.label_counts[v];
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                let deg: u64 = by_vertex[v].iter().map(|&(_, c)| c).sum();
                best = better(best, Some((collide(v, a.min(b), a.max(b)), deg, (v, a.min(b), a.max(b)))));
            }
        }
        best
    };
    SmoothnessCheck {
        max_collision: best
            .map(|(h, d, _)| Rational::new(BigInt::from(h), BigInt::from(d)))
            .unwrap_or_else(|| Rational::from_integer(0.into())),
        bound: Rational::new(BigInt::from(1), BigInt::from(params.j.max(1))),
        witness: best.map(|b| b.2),
        exhaustive,
    }
}

fn check_preimage(inst: &SlcInstance, r: usize) -> PreimageCheck {
    let best = parallel::map_range(inst.maps.len(), |m| {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for &l in &inst.maps[m] {
            *counts.entry(l).or_insert(0) += 1;
        }
        counts.into_iter().max_by_key(|&(l, c)| (c, std::cmp::Reverse(l))).map(|(l, c)| (c, m, l))
    })
    .into_iter()
    .flatten()
    .max_by_key(|&(c, m, _)| (c, std::cmp::Reverse(m)));
    PreimageCheck {
        max_fiber: best.map_or(0, |b| b.0),
        bound: 4usize.saturating_pow(r as u32),
        witness: best.map(|(_, m, l)| (m, l)),
    }
}

fn check_expansion(inst: &SlcInstance, delta: f64, samples: usize, seed: u64) -> ExpansionCheck {
    let n = inst.num_vertices();
    let size = ((delta * n as f64).round() as usize).min(n);
    let total = inst.num_edges() as u128;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut member = vec![false; n];
    for _ in 0..samples {
        let subset = index::sample(&mut rng, n, size).into_vec();
        for &v in &subset {
            member[v] = true;
        }
        let inside = inst.edges.iter().filter(|e| member[e.v] && member[e.w]).count() as u128;
        for &v in &subset {
            member[v] = false;
        }
        let lhs = inside * (n as u128).pow(2);
        let rhs = (size as u128).pow(2) * total;
        if rhs > 0 {
            worst = worst.min(lhs as f64 / rhs as f64);
        }
        if lhs < rhs && witness.is_none() {
            let mut s = subset;
            s.sort_unstable();
            witness = Some(s);
        }
    }
    ExpansionCheck {
        delta,
        subset_size: size,
        samples,
        worst_ratio: if worst.is_finite() { worst } else { 1.0 },
        witness,
    }
}

/// Header `slc |V| |E| n k deg`, with `-` for an irregular graph. When label
/// counts differ an extra `labels n_1 .. n_|V|` line follows, and rows are
/// padded to `n` with `k` in the first map and `k + 1` in the second.
pub fn write_slc(inst: &SlcInstance) -> String {
    let n = inst.max_labels();
    let k = inst.right_labels;
    let mut out = String::new();
    let deg = inst.regular_degree().map_or("-".to_string(), |d| d.to_string());
    let _ = writeln!(out, "slc {} {} {} {} {}", inst.num_vertices(), inst.num_edges(), n, k, deg);
    if inst.label_counts.iter().any(|&c| c != n) {
        let counts: Vec<String> = inst.label_counts.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "labels {}", counts.join(" "));
    }
    let row = |out: &mut String, map: &[u32], pad: usize| {
        let mut first = true;
        for &l in map.iter() {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{l}");
        }
        for _ in map.len()..n {
            let _ = write!(out, " {pad}");
        }
        out.push('\n');
    };
    for e in &inst.edges {
        let _ = writeln!(out, "edge {} {}", e.v, e.w);
        row(&mut out, &inst.maps[e.map_v], k);
        row(&mut out, &inst.maps[e.map_w], k + 1);
    }
    out
}

pub fn parse_slc(text: &str) -> Result<SlcInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 || h[0] != "slc" {
        return Err(syntax(hl, "expected `slc |V| |E| n k deg`"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(hl, format!("bad number `{s}`")));
    let (nv, ne, n, k) = (num(h[1])?, num(h[2])?, num(h[3])?, num(h[4])?);
    if h[5] != "-" {
        num(h[5])?;
    }
    let mut pending = lines.peekable();
    let mut label_counts = vec![n; nv];
    if let Some(&(ll, l)) = pending.peek() {
        if let Some(rest) = l.strip_prefix("labels") {
            let counts: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| syntax(ll, "bad label count")))
                .collect::<Result<_>>()?;
            if counts.len() != nv || counts.iter().any(|&c| c > n) {
                return Err(syntax(ll, "label counts do not match the header"));
            }
            label_counts = counts;
            pending.next();
        }
    }
    let mut edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (el, l) = pending.next().ok_or_else(|| syntax(0, "missing edge"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 || t[0] != "edge" {
            return Err(syntax(el, "expected `edge v w`"));
        }
        let v: usize = t[1].parse().map_err(|_| syntax(el, "bad vertex"))?;
        let w: usize = t[2].parse().map_err(|_| syntax(el, "bad vertex"))?;
        if v >= nv || w >= nv {
            return Err(syntax(el, "vertex out of range"));
        }
        let mut read_row = |x: usize, pad: usize| -> Result<Vec<u32>> {
            let (rl, l) = pending.next().ok_or_else(|| syntax(el, "missing map row"))?;
            let vals: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| syntax(rl, "bad label")))
                .collect::<Result<_>>()?;
            if vals.len() != n {
                return Err(syntax(rl, format!("expected {n} entries")));
            }
            let (used, padding) = vals.split_at(label_counts[x]);
            if padding.iter().any(|&p| p != pad) || used.iter().any(|&u| u >= k) {
                return Err(syntax(rl, "label outside range"));
            }
            Ok(used.iter().map(|&u| u as u32).collect())
        };
        let mv = read_row(v, k)?;
        let mw = read_row(w, k + 1)?;
        edges.push((v, w, mv, mw));
    }
    if let Some((l, _)) = pending.next() {
        return Err(syntax(l, "trailing input"));
    }
    SlcInstance::from_edge_maps(label_counts, k, edges)
}

/// Right question label for diagnostics.
pub fn describe_right(system: &ConstraintSystem, q: &[Coord]) -> String {
    let parts: Vec<String> = q
        .iter()
        .map(|c| match *c {
            Coord::Constraint(i) => system.constraint(i).name.clone(),
            Coord::Variable(x) => system.variables()[x].clone(),
        })
        .collect();
    parts.join(",")
}
