//! The distribution `pi(x, y) = |{z : L^A(z) = x, L^B(z) = y}| / |V|`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::clf::{joint_preimage_dim, Clf};
use crate::error::Result;
use crate::rational::Rational;

pub(crate) fn power_of(q: u32, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(q), e)
}

/// `q^count_dim / q^n`.
pub(crate) fn fraction(q: u32, count_dim: usize, n: usize) -> Rational {
    Rational::new(power_of(q, count_dim), power_of(q, n))
}

pub fn clm_pmf(la: &Clf, lb: &Clf, x: &[u32], y: &[u32]) -> Result<Rational> {
    let n = la.space().dim();
    Ok(match joint_preimage_dim(la, lb, x, y)? {
        Some(d) => fraction(la.space().q(), d, n),
        None => Rational::zero(),
    })
}

/// Marginal `|L^{-1}(x)| / |V|`.
pub fn clm_marginal(l: &Clf, x: &[u32]) -> Result<Rational> {
    Ok(match l.preimage_dim(x)? {
        Some(d) => fraction(l.space().q(), d, l.space().dim()),
        None => Rational::zero(),
    })
}

/// Support of `pi` with probabilities, found by walking the preimage of
/// each `x` in the image of `L^A`. Needs `|V|` small enough to enumerate.
pub fn clm_support(la: &Clf, lb: &Clf) -> Result<Vec<(Vec<u32>, Vec<u32>, Rational)>> {
    let space = la.space();
    let size = space.size().unwrap_or(u64::MAX);
    let mut seen = std::collections::BTreeSet::new();
    for zi in 0..size {
        let z = space.vector(zi);
        seen.insert((la.eval(&z)?, lb.eval(&z)?));
    }
    seen.into_iter()
        .map(|(x, y)| {
            let p = clm_pmf(la, lb, &x, &y)?;
            Ok((x, y, p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clm::clf::FieldSpace;
    use crate::rational::{ratio, sum};

    #[test]
    fn identity_pair_is_diagonal() {
        let s = FieldSpace::new(2, vec![1]).unwrap();
        let id = Clf::identity(s.clone());
        assert_eq!(clm_pmf(&id, &id, &[1], &[1]).unwrap(), ratio(1, 2));
        assert_eq!(clm_pmf(&id, &id, &[0], &[1]).unwrap(), ratio(0, 1));
        let zero = Clf::zero(s);
        assert_eq!(clm_pmf(&id, &zero, &[1], &[0]).unwrap(), ratio(1, 2));
        assert_eq!(clm_marginal(&id, &[0]).unwrap(), ratio(1, 2));
    }

    #[test]
    fn support_sums_to_one() {
        let s = FieldSpace::new(3, vec![1, 2]).unwrap();
        let id = Clf::identity(s.clone());
        let zero = Clf::zero(s);
        let support = clm_support(&id, &zero).unwrap();
        assert_eq!(support.len(), 27);
        assert_eq!(sum(support.iter().map(|t| &t.2)), ratio(1, 1));
    }
}
