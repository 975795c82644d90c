//! Games over typed questions, their padded versions, and the maps
//! carrying correlations between the two.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use super::pad::{PaddedDistribution, PaddedQuestion};
use super::typed::{TypedClm, TypedQuestion};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Conditional answer distributions `p(a, b | q, r)`, row-major in `(a, b)`.
pub type Correlation<Q> = BTreeMap<(Q, Q), Vec<Rational>>;

/// Verifier tables are kept for support pairs only.
#[derive(Debug, Clone)]
pub struct TypedGame {
    clm: TypedClm,
    answers_a: Vec<usize>,
    answers_b: Vec<usize>,
    support: Vec<(TypedQuestion, TypedQuestion, Rational)>,
    verifier: Vec<Vec<bool>>,
}

impl TypedGame {
    pub fn new(
        clm: TypedClm,
        answers_a: Vec<usize>,
        answers_b: Vec<usize>,
        accept: impl Fn(TypedQuestion, TypedQuestion, usize, usize) -> bool,
    ) -> Result<Self> {
        let nt = clm.types().len();
        if answers_a.len() != nt || answers_b.len() != nt || answers_a.iter().chain(&answers_b).any(|&k| k == 0) {
            return Err(Error::Shape("one positive answer count per type and side".into()));
        }
        let support = clm.support()?;
        let verifier = support
            .iter()
            .map(|&(q, r, _)| {
                let (ka, kb) = (answers_a[q.ty], answers_b[r.ty]);
                (0..ka * kb).map(|i| accept(q, r, i / kb, i % kb)).collect()
            })
            .collect();
        Ok(TypedGame {
            clm,
            answers_a,
            answers_b,
            support,
            verifier,
        })
    }

    pub fn clm(&self) -> &TypedClm {
        &self.clm
    }

    pub fn support(&self) -> &[(TypedQuestion, TypedQuestion, Rational)] {
        &self.support
    }

    pub fn answer_counts(&self, q: TypedQuestion, r: TypedQuestion) -> (usize, usize) {
        (self.answers_a[q.ty], self.answers_b[r.ty])
    }

    pub fn value(&self, corr: &Correlation<TypedQuestion>) -> Result<Rational> {
        let mut total = Rational::zero();
        for ((q, r, p), table) in self.support.iter().zip(&self.verifier) {
            let dist = corr
                .get(&(*q, *r))
                .ok_or_else(|| Error::Shape(format!("correlation misses pair {q:?}, {r:?}")))?;
            total += p * accepted_mass(table, dist)?;
        }
        Ok(total)
    }

    pub fn random_correlation<R: Rng>(&self, rng: &mut R, granularity: u32) -> Correlation<TypedQuestion> {
        self.support
            .iter()
            .map(|&(q, r, _)| {
                let (ka, kb) = self.answer_counts(q, r);
                ((q, r), random_distribution(rng, ka * kb, granularity))
            })
            .collect()
    }
}

fn accepted_mass(table: &[bool], dist: &[Rational]) -> Result<Rational> {
    if table.len() != dist.len() {
        return Err(Error::Shape("answer table size".into()));
    }
    Ok(table
        .iter()
        .zip(dist)
        .filter(|(ok, _)| **ok)
        .fold(Rational::zero(), |acc, (_, p)| acc + p))
}

/// Integer weights in `0..=granularity`, normalized; never all zero.
pub fn random_distribution<R: Rng>(rng: &mut R, len: usize, granularity: u32) -> Vec<Rational> {
    let mut w: Vec<u32> = (0..len).map(|_| rng.gen_range(0..=granularity)).collect();
    if w.iter().all(|&v| v == 0) {
        w[rng.gen_range(0..len)] = 1;
    }
    let total: u64 = w.iter().map(|&v| v as u64).sum();
    w.into_iter()
        .map(|v| Rational::new(BigInt::from(v), BigInt::from(total)))
        .collect()
}

/// The same verifier asked on padded questions; pad indices are ignored.
#[derive(Debug, Clone)]
pub struct PaddedGame {
    base: TypedGame,
    pad: PaddedDistribution,
    /// Base support pairs with their pad counts `(N^A, N^B)`.
    pads: Vec<(u64, u64)>,
}

/// Cap on the number of padded question pairs materialized.
pub const PADDED_PAIR_CAP: u128 = 1 << 22;

pub fn pad_verifier(game: &TypedGame) -> Result<PaddedGame> {
    let pad = super::pad::pad(&game.clm);
    let mut pads = Vec::with_capacity(game.support.len());
    let mut total: u128 = 0;
    for &(q, r, _) in &game.support {
        let na = pad.n_a(q)?.to_u64();
        let nb = pad.n_b(r)?.to_u64();
        let (Some(na), Some(nb)) = (na, nb) else {
            return Err(Error::Malformed("pad count does not fit in 64 bits".into()));
        };
        total += na as u128 * nb as u128;
        pads.push((na, nb));
    }
    if total > PADDED_PAIR_CAP {
        return Err(Error::CapExceeded {
            what: "padded question pairs".into(),
            needed: total,
            cap: PADDED_PAIR_CAP,
        });
    }
    Ok(PaddedGame {
        base: game.clone(),
        pad,
        pads,
    })
}

impl PaddedGame {
    pub fn distribution(&self) -> &PaddedDistribution {
        &self.pad
    }

    pub fn base(&self) -> &TypedGame {
        &self.base
    }

    /// Every padded pair with positive probability.
    pub fn support(&self) -> Vec<(PaddedQuestion, PaddedQuestion, Rational)> {
        let mut out = Vec::new();
        for (&(q, r, ref p), &(na, nb)) in self.base.support.iter().zip(&self.pads) {
            let each = p / Rational::from_integer(BigInt::from(na) * BigInt::from(nb));
            for n in 0..na {
                for m in 0..nb {
                    out.push((
                        PaddedQuestion { question: q, pad: n },
                        PaddedQuestion { question: r, pad: m },
                        each.clone(),
                    ));
                }
            }
        }
        out
    }

    pub fn value(&self, corr: &Correlation<PaddedQuestion>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (i, &(na, nb)) in self.pads.iter().enumerate() {
            let (q, r, ref p) = self.base.support[i];
            let each = p / Rational::from_integer(BigInt::from(na) * BigInt::from(nb));
            for n in 0..na {
                for m in 0..nb {
                    let key = (PaddedQuestion { question: q, pad: n }, PaddedQuestion { question: r, pad: m });
                    let dist = corr
                        .get(&key)
                        .ok_or_else(|| Error::Shape(format!("correlation misses pair {key:?}")))?;
                    total += &each * accepted_mass(&self.base.verifier[i], dist)?;
                }
            }
        }
        Ok(total)
    }

    /// Padded copies answer exactly as the typed question they came from.
    pub fn lift(&self, corr: &Correlation<TypedQuestion>) -> Result<Correlation<PaddedQuestion>> {
        let mut out = Correlation::new();
        for (&(q, r, _), &(na, nb)) in self.base.support.iter().zip(&self.pads) {
            let dist = corr
                .get(&(q, r))
                .ok_or_else(|| Error::Shape(format!("correlation misses pair {q:?}, {r:?}")))?;
            for n in 0..na {
                for m in 0..nb {
                    out.insert(
                        (PaddedQuestion { question: q, pad: n }, PaddedQuestion { question: r, pad: m }),
                        dist.clone(),
                    );
                }
            }
        }
        Ok(out)
    }

    /// Averages over pad indices with the uniform weights `1 / (N^A N^B)`.
    pub fn project(&self, corr: &Correlation<PaddedQuestion>) -> Result<Correlation<TypedQuestion>> {
        let mut out = Correlation::new();
        for (&(q, r, _), &(na, nb)) in self.base.support.iter().zip(&self.pads) {
            let (ka, kb) = self.base.answer_counts(q, r);
            let mut acc = vec![Rational::zero(); ka * kb];
            for n in 0..na {
                for m in 0..nb {
                    let key = (PaddedQuestion { question: q, pad: n }, PaddedQuestion { question: r, pad: m });
                    let dist = corr
                        .get(&key)
                        .ok_or_else(|| Error::Shape(format!("correlation misses pair {key:?}")))?;
                    for (a, d) in acc.iter_mut().zip(dist) {
                        *a += d;
                    }
                }
            }
            let scale = Rational::from_integer(BigInt::from(na) * BigInt::from(nb));
            out.insert((q, r), acc.into_iter().map(|a| a / &scale).collect());
        }
        Ok(out)
    }

    pub fn random_correlation<R: Rng>(&self, rng: &mut R, granularity: u32) -> Correlation<PaddedQuestion> {
        self.support()
            .into_iter()
            .map(|(q, r, _)| {
                let (ka, kb) = self.base.answer_counts(q.question, r.question);
                ((q, r), random_distribution(rng, ka * kb, granularity))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clm::clf::{Clf, FieldSpace};
    use crate::clm::typed::oracularize_clm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> TypedGame {
        let s = FieldSpace::new(2, vec![1, 1]).unwrap();
        let clm = oracularize_clm(&Clf::identity(s.clone()), &Clf::zero(s)).unwrap();
        TypedGame::new(clm, vec![2, 2, 2], vec![2, 2, 2], |q, r, a, b| (a ^ b) == ((q.x ^ r.x) & 1) as usize).unwrap()
    }

    #[test]
    fn transport_preserves_value() {
        let g = toy();
        let p = pad_verifier(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = g.random_correlation(&mut rng, 5);
        assert_eq!(g.value(&c).unwrap(), p.value(&p.lift(&c).unwrap()).unwrap());
        let d = p.random_correlation(&mut rng, 5);
        assert_eq!(p.value(&d).unwrap(), g.value(&p.project(&d).unwrap()).unwrap());
    }
}
