//! Type-graph distributions built from a pair of conditional linear
//! functions per type.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::clf::{joint_preimage_dim, Clf, FieldSpace};
use super::pmf::fraction;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A question `(t, x)`; `x` is indexed as in [`FieldSpace::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedQuestion {
    pub ty: usize,
    pub x: u64,
}

#[derive(Debug, Clone)]
pub struct TypedClm {
    types: Vec<String>,
    /// Unordered edges stored with `t <= u`; self-loops allowed.
    edges: BTreeSet<(usize, usize)>,
    maps: Vec<(Clf, Clf)>,
}

impl TypedClm {
    pub fn new(types: Vec<String>, edges: &[(usize, usize)], maps: Vec<(Clf, Clf)>) -> Result<Self> {
        if maps.len() != types.len() || types.is_empty() {
            return Err(Error::Shape("one map pair per type".into()));
        }
        let space = maps[0].0.space().clone();
        if maps.iter().any(|(a, b)| a.space() != &space || b.space() != &space) {
            return Err(Error::Shape("all maps must act on the same space".into()));
        }
        let mut set = BTreeSet::new();
        for &(t, u) in edges {
            if t >= types.len() || u >= types.len() {
                return Err(Error::Malformed(format!("edge ({t}, {u}) names an unknown type")));
            }
            set.insert((t.min(u), t.max(u)));
        }
        if set.is_empty() {
            return Err(Error::Degenerate("type graph has no edges".into()));
        }
        Ok(TypedClm { types, edges: set, maps })
    }

    pub fn space(&self) -> &FieldSpace {
        self.maps[0].0.space()
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn maps(&self, t: usize) -> &(Clf, Clf) {
        &self.maps[t]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacent(&self, t: usize, u: usize) -> bool {
        self.edges.contains(&(t.min(u), t.max(u)))
    }

    /// Ordered pairs `(t, u)` with `{t, u}` an edge; a self-loop gives one.
    pub fn ordered_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(t, u) in &self.edges {
            out.push((t, u));
            if t != u {
                out.push((u, t));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn e_arrow_count(&self) -> usize {
        self.ordered_edges().len()
    }

    /// Neighbours of `t`, counting `t` itself once when it has a loop.
    pub fn neighbor_count(&self, t: usize) -> usize {
        (0..self.types.len()).filter(|&u| self.adjacent(t, u)).count()
    }

    pub fn vector(&self, x: u64) -> Vec<u32> {
        self.space().vector(x)
    }

    pub fn pmf(&self, a: TypedQuestion, b: TypedQuestion) -> Result<Rational> {
        if !self.adjacent(a.ty, b.ty) {
            return Ok(Rational::zero());
        }
        let la = &self.maps[a.ty].0;
        let lb = &self.maps[b.ty].1;
        let n = self.space().dim();
        let count = joint_preimage_dim(la, lb, &self.vector(a.x), &self.vector(b.x))?;
        Ok(match count {
            Some(d) => fraction(self.space().q(), d, n) / Rational::from_integer(self.e_arrow_count().into()),
            None => Rational::zero(),
        })
    }

    /// `log_q |(L^A_t)^{-1}(x)|`, or `None` when empty.
    pub fn preimage_dim_a(&self, q: TypedQuestion) -> Result<Option<usize>> {
        self.maps[q.ty].0.preimage_dim(&self.vector(q.x))
    }

    pub fn preimage_dim_b(&self, q: TypedQuestion) -> Result<Option<usize>> {
        self.maps[q.ty].1.preimage_dim(&self.vector(q.x))
    }

    fn marginal(&self, q: TypedQuestion, d: Option<usize>) -> Rational {
        match d {
            Some(d) => {
                let nt = self.neighbor_count(q.ty) as i64;
                fraction(self.space().q(), d, self.space().dim()) * Rational::from_integer(nt.into())
                    / Rational::from_integer(self.e_arrow_count().into())
            }
            None => Rational::zero(),
        }
    }

    pub fn marginal_a(&self, q: TypedQuestion) -> Result<Rational> {
        Ok(self.marginal(q, self.preimage_dim_a(q)?))
    }

    pub fn marginal_b(&self, q: TypedQuestion) -> Result<Rational> {
        Ok(self.marginal(q, self.preimage_dim_b(q)?))
    }

    fn images(&self, pick: impl Fn(&(Clf, Clf)) -> &Clf) -> Result<Vec<TypedQuestion>> {
        let space = self.space();
        let size = space
            .size()
            .filter(|&s| s <= 1 << 20)
            .ok_or_else(|| Error::CapExceeded {
                what: "enumerating V".into(),
                needed: u128::MAX,
                cap: 1 << 20,
            })?;
        let mut out = BTreeSet::new();
        for (t, maps) in self.maps.iter().enumerate() {
            if self.neighbor_count(t) == 0 {
                continue;
            }
            for zi in 0..size {
                let x = pick(maps).eval(&space.vector(zi))?;
                out.insert(TypedQuestion { ty: t, x: space.index(&x) });
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Left questions with positive marginal.
    pub fn support_a(&self) -> Result<Vec<TypedQuestion>> {
        self.images(|m| &m.0)
    }

    pub fn support_b(&self) -> Result<Vec<TypedQuestion>> {
        self.images(|m| &m.1)
    }

    /// Every pair with positive probability, enumerated through `z`.
    pub fn support(&self) -> Result<Vec<(TypedQuestion, TypedQuestion, Rational)>> {
        let space = self.space();
        let size = space.size().unwrap_or(u64::MAX);
        let mut pairs = BTreeSet::new();
        for (t, u) in self.ordered_edges() {
            for zi in 0..size {
                let z = space.vector(zi);
                let x = space.index(&self.maps[t].0.eval(&z)?);
                let y = space.index(&self.maps[u].1.eval(&z)?);
                pairs.insert((TypedQuestion { ty: t, x }, TypedQuestion { ty: u, x: y }));
            }
        }
        pairs
            .into_iter()
            .map(|(a, b)| Ok((a, b, self.pmf(a, b)?)))
            .collect()
    }
}

pub const ORACLE_TYPES: [&str; 3] = ["A", "B", "O"];

/// Types `A, B, O` with edges `{O,O}, {A,O}, {B,O}`; `O` asks the whole of
/// `z` on both sides.
pub fn oracularize_clm(la: &Clf, lb: &Clf) -> Result<TypedClm> {
    let id = Clf::identity(la.space().clone());
    TypedClm::new(
        ORACLE_TYPES.iter().map(|s| s.to_string()).collect(),
        &[(2, 2), (0, 2), (1, 2)],
        vec![(la.clone(), la.clone()), (lb.clone(), lb.clone()), (id.clone(), id)],
    )
}
