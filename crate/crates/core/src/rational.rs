//! Exact rational helpers shared by the distributions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn recip(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(n))
}

/// Parses `p/q` or a plain integer.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales every value by `den` and returns the integer numerators.
/// `None` when some scaled value does not fit in `u128`.
pub fn scale_to_u128(values: &[Rational], den: &BigInt) -> Option<Vec<u128>> {
    values
        .iter()
        .map(|v| {
            let scaled = v * Rational::from_integer(den.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer().to_u128()
        })
        .collect()
}

/// `ceil(a/b)` for nonnegative rationals.
pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}
