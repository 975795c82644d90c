//! Regular multigraphs with spectral certificates.
//!
//! Degree convention: a self-loop adds one to its vertex's degree and one
//! to the diagonal of the adjacency matrix. With this convention
//! `dI - A = sum over non-loop edges of (e_u - e_v)(e_u - e_v)^T`, so the
//! Laplacian identity behind the expander inequalities holds for looped
//! graphs as well.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{syntax, Error, Result};
use crate::linalg::{tau_norm_sq, CMat};

/// Eigensolver tolerance used for certificates.
pub const EIGEN_TOL: f64 = 1e-9;

/// Default cap on sampling attempts in [`random_regular_expander`].
pub const DEFAULT_ATTEMPTS: usize = 1000;

/// Largest vertex count accepted by the dense eigensolve.
pub const DENSE_CAP: usize = 4096;

/// Undirected multigraph on `0..n`. Edges are stored with `u <= v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        if let Some(&(_, v)) = edges.iter().find(|&&(_, v)| v >= n) {
            return Err(Error::Malformed(format!("edge endpoint {v} outside 0..{n}")));
        }
        Ok(Graph { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph { n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|u| (u.min((u + 1) % n), u.max((u + 1) % n))).collect();
        Graph { n, edges }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            if u != v {
                deg[v] += 1;
            }
        }
        deg
    }

    /// The common degree, when every vertex has the same one.
    pub fn regular_degree(&self) -> Option<usize> {
        let deg = self.degrees();
        let first = *deg.first()?;
        deg.iter().all(|&d| d == first).then_some(first)
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            if u == v {
                a[(u, u)] += 1.0;
            } else {
                a[(u, v)] += 1.0;
                a[(v, u)] += 1.0;
            }
        }
        a
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Number of ordered pairs `(u, v)` with `{u, v}` an edge: two per
    /// non-loop edge, one per loop.
    pub fn ordered_pair_count(&self) -> usize {
        self.edges.iter().map(|&(u, v)| if u == v { 1 } else { 2 }).sum()
    }
}

/// `lambda = 1 - mu_2 / d` for a regular connected graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCertificate {
    pub lambda: f64,
    pub mu2: f64,
    pub degree: usize,
    pub tolerance: f64,
}

impl SpectralCertificate {
    /// Whether the certificate clears `lambda_min` by the safety margin.
    pub fn certifies(&self, lambda_min: f64) -> bool {
        self.lambda >= lambda_min + 10.0 * self.tolerance
    }
}

/// Adjacency spectrum in descending order.
pub fn adjacency_spectrum(g: &Graph) -> Vec<f64> {
    let mut values: Vec<f64> = g.adjacency().symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

pub fn spectral_lambda(g: &Graph) -> Result<SpectralCertificate> {
    if g.num_vertices() < 2 {
        return Err(Error::Degenerate(format!(
            "{} vertices leave no second eigenvalue",
            g.num_vertices()
        )));
    }
    if g.num_vertices() > DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "dense eigensolve".into(),
            needed: g.num_vertices() as u128,
            cap: DENSE_CAP as u128,
        });
    }
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    if d == 0 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let spectrum = adjacency_spectrum(g);
    let mu2 = spectrum[1];
    Ok(SpectralCertificate {
        lambda: 1.0 - mu2 / d as f64,
        mu2,
        degree: d,
        tolerance: EIGEN_TOL,
    })
}

/// The cycle `C_n`, certified by eigensolve.
pub fn cycle_graph(n: usize) -> Result<(Graph, SpectralCertificate)> {
    if n < 3 {
        return Err(Error::Degenerate(format!("cycle on {n} vertices")));
    }
    let g = Graph::cycle(n);
    let cert = spectral_lambda(&g)?;
    Ok((g, cert))
}

/// `2 sin^2(pi / n)`, the closed form of the cycle's certificate.
pub fn cycle_lambda(n: usize) -> f64 {
    2.0 * (std::f64::consts::PI / n as f64).sin().powi(2)
}

/// `K_n` with `d - n + 1` loops per vertex, so its adjacency is
/// `J + (d - n) I` and `lambda = n / d`.
pub fn complete_with_loops(n: usize, d: usize) -> Graph {
    assert!(n >= 1 && d + 1 >= n);
    let mut g = Graph::complete(n);
    for u in 0..n {
        for _ in 0..d + 1 - n {
            g.edges.push((u, u));
        }
    }
    g
}

/// A `d`-regular multigraph on `n` vertices with certified `lambda`.
///
/// For `n <= d + 1` the complete graph padded with loops is returned. Above
/// that, the sample is a union of `d/2` uniformly random Hamiltonian cycles,
/// plus one random perfect matching when `d` is odd (a near-perfect matching
/// and one loop when `n` is odd too). Samples are redrawn until the
/// certificate clears `lambda_min`.
pub fn random_regular_expander(
    n: usize,
    d: usize,
    seed: u64,
    lambda_min: f64,
) -> Result<(Graph, SpectralCertificate)> {
    random_regular_expander_with_attempts(n, d, seed, lambda_min, DEFAULT_ATTEMPTS)
}

pub fn random_regular_expander_with_attempts(
    n: usize,
    d: usize,
    seed: u64,
    lambda_min: f64,
    attempts: usize,
) -> Result<(Graph, SpectralCertificate)> {
    if n < 2 {
        return Err(Error::Degenerate(format!("expander on {n} vertices")));
    }
    if d == 0 {
        return Err(Error::Degenerate("degree 0".into()));
    }
    if n <= d + 1 {
        let g = complete_with_loops(n, d);
        let cert = spectral_lambda(&g)?;
        return if cert.certifies(lambda_min) {
            Ok((g, cert))
        } else {
            Err(Error::AttemptCap {
                lambda_min,
                attempts: 1,
                best: cert.lambda,
            })
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..attempts {
        let g = sample_regular(n, d, &mut rng);
        match spectral_lambda(&g) {
            Ok(cert) if cert.certifies(lambda_min) => return Ok((g, cert)),
            Ok(cert) => best = best.max(cert.lambda),
            Err(Error::Disconnected) => best = best.max(0.0),
            Err(e) => return Err(e),
        }
    }
    Err(Error::AttemptCap {
        lambda_min,
        attempts,
        best,
    })
}

fn sample_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::with_capacity(n * d / 2 + 1);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..d / 2 {
        perm.shuffle(rng);
        for i in 0..n {
            let (u, v) = (perm[i], perm[(i + 1) % n]);
            edges.push((u.min(v), u.max(v)));
        }
    }
    if d % 2 == 1 {
        perm.shuffle(rng);
        for pair in perm.chunks(2) {
            match *pair {
                [u, v] => edges.push((u.min(v), u.max(v))),
                [u] => edges.push((u, u)),
                _ => unreachable!(),
            }
        }
    }
    Graph { n, edges }
}

/// Both sides of the expander inequality
/// `(1/n^2) sum_{u,v} ||a_u - a_v||^2 <= (1/lambda)(2/(dn)) sum_E ||a_u - a_v||^2`
/// under the normalized trace, returned as `(lhs, rhs)`.
pub fn key_inequality_sides(g: &Graph, cert: &SpectralCertificate, family: &[CMat]) -> (f64, f64) {
    let n = g.num_vertices();
    assert_eq!(family.len(), n);
    let mut all = 0.0;
    for u in 0..n {
        for v in 0..n {
            all += tau_norm_sq(&(&family[u] - &family[v]));
        }
    }
    let along: f64 = g
        .edges()
        .iter()
        .map(|&(u, v)| tau_norm_sq(&(&family[u] - &family[v])))
        .sum();
    let lhs = all / (n * n) as f64;
    let rhs = along * 2.0 / (cert.degree as f64 * n as f64) / cert.lambda;
    (lhs, rhs)
}

/// `graph n d` header (`-` for irregular graphs) followed by `u v` lines.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    match g.regular_degree() {
        Some(d) => writeln!(out, "graph {} {}", g.n, d).unwrap(),
        None => writeln!(out, "graph {} -", g.n).unwrap(),
    }
    for &(u, v) in &g.edges {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, head) = lines.next().ok_or_else(|| syntax(1, "empty input"))?;
    let tokens: Vec<&str> = head.split_whitespace().collect();
    let (n, d) = match tokens.as_slice() {
        ["graph", n, d] => (
            n.parse::<usize>().map_err(|_| syntax(line_no, "bad vertex count"))?,
            match *d {
                "-" => None,
                d => Some(d.parse::<usize>().map_err(|_| syntax(line_no, "bad degree"))?),
            },
        ),
        _ => return Err(syntax(line_no, "expected `graph <n> <d>`")),
    };
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        let pair: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| syntax(line_no, format!("bad vertex `{t}`"))))
            .collect::<Result<_>>()?;
        let [u, v] = pair[..] else {
            return Err(syntax(line_no, "expected `u v`"));
        };
        if u >= n || v >= n {
            return Err(syntax(line_no, "vertex out of range"));
        }
        edges.push((u, v));
    }
    let g = Graph::new(n, edges)?;
    if d.is_some() && g.regular_degree() != d {
        return Err(Error::NotRegular);
    }
    Ok(g)
}
