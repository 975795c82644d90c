//! Conditional linear functions on `F_q^{d_1} (+) ... (+) F_q^{d_k}`.
//!
//! Level `i` applies a linear map to register `i` chosen by the outputs of
//! registers `1..i`. Vectors are indexed in base `q` with the first
//! coordinate most significant.

use super::field::{solution_dimension, solve_affine, AffineSpace, Field, Matrix};
use crate::error::{Error, Result};

/// Prefix spaces at most this large may be tabulated.
pub const TABLE_PREFIX_CAP: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpace {
    pub field: Field,
    pub dims: Vec<usize>,
}

impl FieldSpace {
    pub fn new(q: u32, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Malformed("register dimensions must be positive".into()));
        }
        Ok(FieldSpace {
            field: Field::new(q)?,
            dims,
        })
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `|V|`, when it fits.
    pub fn size(&self) -> Option<u64> {
        (self.q() as u64).checked_pow(self.dim() as u32)
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.dims
            .iter()
            .map(|&d| {
                let o = acc;
                acc += d;
                o
            })
            .collect()
    }

    pub fn vector(&self, mut idx: u64) -> Vec<u32> {
        let n = self.dim();
        let q = self.q() as u64;
        let mut v = vec![0; n];
        for i in (0..n).rev() {
            v[i] = (idx % q) as u32;
            idx /= q;
        }
        v
    }

    pub fn index(&self, v: &[u32]) -> u64 {
        v.iter().fold(0, |acc, &c| acc * self.q() as u64 + c as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelRule {
    Identity,
    Zero,
    /// One matrix per output prefix, indexed like vectors of the prefix
    /// registers.
    Table(Vec<Matrix>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clf {
    space: FieldSpace,
    levels: Vec<LevelRule>,
}

impl Clf {
    pub fn new(space: FieldSpace, levels: Vec<LevelRule>) -> Result<Self> {
        if levels.len() != space.dims.len() {
            return Err(Error::Shape("one rule per register".into()));
        }
        let q = space.q() as usize;
        let mut prefix = 0usize;
        for (i, rule) in levels.iter().enumerate() {
            let d = space.dims[i];
            if let LevelRule::Table(ms) = rule {
                let expected = q.checked_pow(prefix as u32).filter(|&n| n <= TABLE_PREFIX_CAP);
                if expected != Some(ms.len()) {
                    return Err(Error::Shape(format!("level {i}: table must have q^{prefix} entries")));
                }
                if ms.iter().any(|m| m.rows != d || m.cols != d || m.data.iter().any(|&v| v as usize >= q)) {
                    return Err(Error::Shape(format!("level {i}: matrices must be {d}x{d} over F_{q}")));
                }
            }
            prefix += d;
        }
        Ok(Clf { space, levels })
    }

    pub fn identity(space: FieldSpace) -> Self {
        let levels = vec![LevelRule::Identity; space.dims.len()];
        Clf { space, levels }
    }

    pub fn zero(space: FieldSpace) -> Self {
        let levels = vec![LevelRule::Zero; space.dims.len()];
        Clf { space, levels }
    }

    pub fn space(&self) -> &FieldSpace {
        &self.space
    }

    pub fn levels(&self) -> &[LevelRule] {
        &self.levels
    }

    fn level_matrix(&self, i: usize, prefix: &[u32]) -> Matrix {
        let d = self.space.dims[i];
        match &self.levels[i] {
            LevelRule::Identity => Matrix::identity(d),
            LevelRule::Zero => Matrix::zeros(d, d),
            LevelRule::Table(ms) => {
                let idx = prefix.iter().fold(0usize, |acc, &c| acc * self.space.q() as usize + c as usize);
                ms[idx].clone()
            }
        }
    }

    pub fn eval(&self, z: &[u32]) -> Result<Vec<u32>> {
        if z.len() != self.space.dim() {
            return Err(Error::Shape("vector length".into()));
        }
        let f = self.space.field;
        let mut out = Vec::with_capacity(z.len());
        for (i, &o) in self.space.offsets().iter().enumerate() {
            let d = self.space.dims[i];
            let m = self.level_matrix(i, &out);
            out.extend(m.apply(f, &z[o..o + d]));
        }
        Ok(out)
    }

    /// Per register, the affine solutions of `L_{i, x_<i}(z_i) = x_i`;
    /// `None` when some level has none.
    pub fn preimage(&self, x: &[u32]) -> Result<Option<Vec<AffineSpace>>> {
        if x.len() != self.space.dim() {
            return Err(Error::Shape("vector length".into()));
        }
        let f = self.space.field;
        let mut parts = Vec::new();
        for (i, &o) in self.space.offsets().iter().enumerate() {
            let d = self.space.dims[i];
            let m = self.level_matrix(i, &x[..o]);
            match solve_affine(f, &m, &x[o..o + d]) {
                Some(s) => parts.push(s),
                None => return Ok(None),
            }
        }
        Ok(Some(parts))
    }

    /// `log_q |L^{-1}(x)|`, or `None` for an empty preimage.
    pub fn preimage_dim(&self, x: &[u32]) -> Result<Option<usize>> {
        Ok(self.preimage(x)?.map(|parts| parts.iter().map(AffineSpace::dim).sum()))
    }

    /// The preimage of `x` as linear equations on all of `V`.
    pub fn preimage_equations(&self, x: &[u32]) -> Result<(Matrix, Vec<u32>)> {
        if x.len() != self.space.dim() {
            return Err(Error::Shape("vector length".into()));
        }
        let n = self.space.dim();
        let mut a = Matrix::zeros(n, n);
        for (i, &o) in self.space.offsets().iter().enumerate() {
            let m = self.level_matrix(i, &x[..o]);
            for r in 0..m.rows {
                for c in 0..m.cols {
                    a.set(o + r, o + c, m.get(r, c));
                }
            }
        }
        Ok((a, x.to_vec()))
    }
}

/// Each level is a random choice of identity, zero, or (when the prefix
/// space is small enough) a table of uniformly random matrices.
pub fn random_clf<R: rand::Rng + ?Sized>(space: &FieldSpace, rng: &mut R) -> Clf {
    let q = space.q();
    let mut levels = Vec::new();
    let mut prefix = 0usize;
    for &d in &space.dims {
        let entries = (q as usize).checked_pow(prefix as u32).filter(|&n| n <= TABLE_PREFIX_CAP);
        let rule = match (rng.gen_range(0..4), entries) {
            (0, _) => LevelRule::Identity,
            (1, _) => LevelRule::Zero,
            (_, Some(n)) => LevelRule::Table(
                (0..n)
                    .map(|_| Matrix {
                        rows: d,
                        cols: d,
                        data: (0..d * d).map(|_| rng.gen_range(0..q)).collect(),
                    })
                    .collect(),
            ),
            (_, None) => LevelRule::Identity,
        };
        levels.push(rule);
        prefix += d;
    }
    Clf {
        space: space.clone(),
        levels,
    }
}

/// Full preimage as one affine subspace of `V`.
pub fn join_parts(space: &FieldSpace, parts: &[AffineSpace]) -> AffineSpace {
    let n = space.dim();
    let offsets = space.offsets();
    let mut offset = vec![0; n];
    let mut basis = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let o = offsets[i];
        offset[o..o + p.offset.len()].copy_from_slice(&p.offset);
        for b in &p.basis {
            let mut v = vec![0; n];
            v[o..o + b.len()].copy_from_slice(b);
            basis.push(v);
        }
    }
    AffineSpace { offset, basis }
}

/// `log_q |(L^A)^{-1}(x) ∩ (L^B)^{-1}(y)|` from the stacked linear system.
pub fn joint_preimage_dim(la: &Clf, lb: &Clf, x: &[u32], y: &[u32]) -> Result<Option<usize>> {
    if la.space().field != lb.space().field || la.space().dim() != lb.space().dim() {
        return Err(Error::Shape("functions act on different spaces".into()));
    }
    let (a1, b1) = la.preimage_equations(x)?;
    let (a2, b2) = lb.preimage_equations(y)?;
    let n = a1.cols;
    let mut a = Matrix::zeros(2 * n, n);
    a.data[..n * n].copy_from_slice(&a1.data);
    a.data[n * n..].copy_from_slice(&a2.data);
    let b: Vec<u32> = b1.into_iter().chain(b2).collect();
    Ok(solution_dimension(la.space().field, &a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level() -> Clf {
        let space = FieldSpace::new(2, vec![1, 1]).unwrap();
        let level2 = LevelRule::Table(vec![Matrix::zeros(1, 1), Matrix::identity(1)]);
        Clf::new(space, vec![LevelRule::Identity, level2]).unwrap()
    }

    #[test]
    fn conditional_preimages() {
        let l = two_level();
        assert_eq!(l.preimage_dim(&[1, 1]).unwrap(), Some(0));
        assert_eq!(l.preimage_dim(&[0, 1]).unwrap(), None);
        assert_eq!(l.preimage_dim(&[0, 0]).unwrap(), Some(1));
        assert_eq!(l.eval(&[1, 1]).unwrap(), vec![1, 1]);
        assert_eq!(l.eval(&[0, 1]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn zero_map_preimage() {
        let z = Clf::zero(FieldSpace::new(2, vec![3]).unwrap());
        assert_eq!(z.preimage_dim(&[0, 0, 0]).unwrap(), Some(3));
        assert_eq!(z.preimage_dim(&[0, 1, 0]).unwrap(), None);
    }

    #[test]
    fn table_size_checked() {
        let space = FieldSpace::new(2, vec![1, 1]).unwrap();
        let bad = Clf::new(space, vec![LevelRule::Identity, LevelRule::Table(vec![Matrix::identity(1)])]);
        assert!(bad.is_err());
    }
}
