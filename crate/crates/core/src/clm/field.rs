//! Prime fields and linear systems over them.

use crate::error::{Error, Result};

/// `F_q` for a prime `q < 2^16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    q: u32,
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if q >= 1 << 16 || !is_prime(q) {
            return Err(Error::Malformed(format!("{q} is not a supported prime")));
        }
        Ok(Field { q })
    }

    pub fn q(self) -> u32 {
        self.q
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.q
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.q - b) % self.q
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.q != 0, "zero has no inverse");
        let mut result = 1u32;
        let mut base = a % self.q;
        let mut e = self.q - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }
}

fn is_prime(q: u32) -> bool {
    q >= 2 && (2..).take_while(|p| p * p <= q).all(|p| q % p != 0)
}

/// Dense matrix over `F_q`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn apply(&self, f: Field, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % f.q() as u64) as u32
            })
            .collect()
    }
}

/// `offset + span(basis)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSpace {
    pub offset: Vec<u32>,
    pub basis: Vec<Vec<u32>>,
}

impl AffineSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Every point, in lexicographic order of the coefficients.
    pub fn points(&self, f: Field) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut coeff = vec![0u32; self.basis.len()];
        loop {
            let mut p = self.offset.clone();
            for (c, b) in coeff.iter().zip(&self.basis) {
                for (pi, &bi) in p.iter_mut().zip(b) {
                    *pi = f.add(*pi, f.mul(*c, bi));
                }
            }
            out.push(p);
            let mut i = coeff.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                coeff[i] += 1;
                if coeff[i] < f.q() {
                    break;
                }
                coeff[i] = 0;
            }
        }
    }
}

/// Reduced row echelon form of `[A | b]`; returns the pivot columns, or
/// `None` when the system is inconsistent.
fn rref(f: Field, a: &mut Matrix, b: &mut [u32]) -> Option<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                let (x, y) = (a.get(r, j), a.get(p, j));
                a.set(r, j, y);
                a.set(p, j, x);
            }
            b.swap(r, p);
        }
        let inv = f.inv(a.get(r, c));
        for j in 0..a.cols {
            a.set(r, j, f.mul(a.get(r, j), inv));
        }
        b[r] = f.mul(b[r], inv);
        for i in 0..a.rows {
            let factor = a.get(i, c);
            if i == r || factor == 0 {
                continue;
            }
            for j in 0..a.cols {
                let v = f.sub(a.get(i, j), f.mul(factor, a.get(r, j)));
                a.set(i, j, v);
            }
            b[i] = f.sub(b[i], f.mul(factor, b[r]));
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|&v| v != 0) {
        return None;
    }
    Some(pivots)
}

/// Solution set of `A z = b`.
pub fn solve_affine(f: Field, a: &Matrix, b: &[u32]) -> Option<AffineSpace> {
    assert_eq!(a.rows, b.len());
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let pivots = rref(f, &mut m, &mut rhs)?;
    let mut offset = vec![0u32; a.cols];
    for (r, &c) in pivots.iter().enumerate() {
        offset[c] = rhs[r];
    }
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u32; a.cols];
            v[fc] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = f.sub(0, m.get(r, fc));
            }
            v
        })
        .collect();
    Some(AffineSpace { offset, basis })
}

/// `Some(n - rank)` when `A z = b` is consistent.
pub fn solution_dimension(f: Field, a: &Matrix, b: &[u32]) -> Option<usize> {
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    rref(f, &mut m, &mut rhs).map(|p| a.cols - p.len())
}
