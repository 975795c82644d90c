//! Padding: each typed question `(t, x)` is split into `N_{t,x}` copies so
//! that every padded question has the same marginal.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pmf::power_of;
use super::typed::{TypedClm, TypedQuestion};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A padded question `(t, x, n)` with `n < N_{t,x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaddedQuestion {
    pub question: TypedQuestion,
    pub pad: u64,
}

#[derive(Debug, Clone)]
pub struct PaddedDistribution {
    clm: TypedClm,
}

#[derive(Debug, Clone)]
pub struct MarginalReport {
    pub expected: Rational,
    pub left_checked: usize,
    pub right_checked: usize,
    /// First padded question whose marginal differs, with its value.
    pub witness: Option<(bool, PaddedQuestion, Rational)>,
}

impl MarginalReport {
    pub fn uniform(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn pad(clm: &TypedClm) -> PaddedDistribution {
    PaddedDistribution { clm: clm.clone() }
}

impl PaddedDistribution {
    pub fn typed(&self) -> &TypedClm {
        &self.clm
    }

    fn count(&self, q: TypedQuestion, d: Option<usize>) -> BigInt {
        match d {
            Some(d) => power_of(self.clm.space().q(), d) * BigInt::from(self.clm.neighbor_count(q.ty)),
            None => BigInt::zero(),
        }
    }

    /// `N^A_{t,x} = N_G(t) |(L^A_t)^{-1}(x)|`.
    pub fn n_a(&self, q: TypedQuestion) -> Result<BigInt> {
        Ok(self.count(q, self.clm.preimage_dim_a(q)?))
    }

    pub fn n_b(&self, q: TypedQuestion) -> Result<BigInt> {
        Ok(self.count(q, self.clm.preimage_dim_b(q)?))
    }

    fn small(n: BigInt) -> Result<u64> {
        n.to_u64()
            .ok_or_else(|| Error::Malformed("pad count does not fit in 64 bits".into()))
    }

    pub fn pmf(&self, a: PaddedQuestion, b: PaddedQuestion) -> Result<Rational> {
        let na = self.n_a(a.question)?;
        let nb = self.n_b(b.question)?;
        if BigInt::from(a.pad) >= na || BigInt::from(b.pad) >= nb {
            return Ok(Rational::zero());
        }
        Ok(self.clm.pmf(a.question, b.question)? / Rational::from_integer(na * nb))
    }

    /// `1 / (|E_->| |V|)`.
    pub fn uniform_marginal(&self) -> Rational {
        let v = power_of(self.clm.space().q(), self.clm.space().dim());
        Rational::new(1.into(), v * BigInt::from(self.clm.e_arrow_count()))
    }

    pub fn left_questions(&self) -> Result<Vec<PaddedQuestion>> {
        self.expand(self.clm.support_a()?, |q| self.n_a(q))
    }

    pub fn right_questions(&self) -> Result<Vec<PaddedQuestion>> {
        self.expand(self.clm.support_b()?, |q| self.n_b(q))
    }

    fn expand(
        &self,
        base: Vec<TypedQuestion>,
        count: impl Fn(TypedQuestion) -> Result<BigInt>,
    ) -> Result<Vec<PaddedQuestion>> {
        let mut out = Vec::new();
        for q in base {
            for pad in 0..Self::small(count(q)?)? {
                out.push(PaddedQuestion { question: q, pad });
            }
        }
        Ok(out)
    }

    /// Sums the padded pmf over the opposite side for every padded question
    /// and compares with `1 / (|E_->| |V|)`.
    pub fn check_marginals(&self) -> Result<MarginalReport> {
        let expected = self.uniform_marginal();
        let support = self.clm.support()?;
        let mut report = MarginalReport {
            expected: expected.clone(),
            left_checked: 0,
            right_checked: 0,
            witness: None,
        };
        for left in [true, false] {
            let mut acc: std::collections::BTreeMap<TypedQuestion, Rational> = Default::default();
            // Each of the other side's pads carries `pi(a, b) / (N N')`, so
            // summing over them leaves `pi(a, b) / N`.
            for (a, b, p) in &support {
                let mine = if left { *a } else { *b };
                *acc.entry(mine).or_insert_with(Rational::zero) += p;
            }
            for (q, total) in acc {
                let n_mine = if left { self.n_a(q)? } else { self.n_b(q)? };
                let each = total / Rational::from_integer(n_mine.clone());
                let pads = Self::small(n_mine)?;
                if left {
                    report.left_checked += pads as usize;
                } else {
                    report.right_checked += pads as usize;
                }
                if each != expected && report.witness.is_none() {
                    report.witness = Some((left, PaddedQuestion { question: q, pad: 0 }, each));
                }
            }
        }
        Ok(report)
    }

    /// Draws `(t, u)` uniformly from the ordered edges and `z` uniformly
    /// from `V`, then each pad index uniformly.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<(PaddedQuestion, PaddedQuestion)> {
        let edges = self.clm.ordered_edges();
        let (t, u) = edges[rng.gen_range(0..edges.len())];
        let space = self.clm.space();
        let z: Vec<u32> = (0..space.dim()).map(|_| rng.gen_range(0..space.q())).collect();
        let (la, _) = self.clm.maps(t);
        let (_, lb) = self.clm.maps(u);
        let a = TypedQuestion { ty: t, x: space.index(&la.eval(&z)?) };
        let b = TypedQuestion { ty: u, x: space.index(&lb.eval(&z)?) };
        let na = Self::small(self.n_a(a)?)?;
        let nb = Self::small(self.n_b(b)?)?;
        Ok((
            PaddedQuestion { question: a, pad: rng.gen_range(0..na) },
            PaddedQuestion { question: b, pad: rng.gen_range(0..nb) },
        ))
    }
}

pub fn sample_padded(dist: &PaddedDistribution, seed: u64, count: usize) -> Result<Vec<(PaddedQuestion, PaddedQuestion)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| dist.sample(&mut rng)).collect()
}
