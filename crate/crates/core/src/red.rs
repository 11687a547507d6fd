//! The free semigroup Red generated by `g_k = (0,1;1,k)`, `k ≥ 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::Mat2Z;
use crate::cf::word_matrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedFactorization {
    pub digits: Vec<u64>,
    pub matrix: Mat2Z,
}

/// `0 ≤ a ≤ b`, `0 ≤ c ≤ d`, `det = ±1`, and not the identity.
pub fn is_reduced(m: &Mat2Z) -> bool {
    let z = BigInt::zero();
    m.a >= z && m.a <= m.b && m.c >= z && m.c <= m.d && m.is_gl2z()
}

/// Greedy left peeling `m = g_k·m'` with `m' = (c − k·a, d − k·b; a, b)`.
/// Since `m'·0 ∈ (0,1]` (or `m'` is the identity), `k` is `⌊d/b⌋` or one less;
/// the exact test on `m'` decides.
pub fn factor(m: &Mat2Z) -> Result<RedFactorization> {
    let not_red = || Error::Red(format!("{m} is not in Red"));
    if !is_reduced(m) {
        return Err(not_red());
    }
    let mut digits = Vec::new();
    let mut cur = m.clone();
    while cur != Mat2Z::identity() {
        if !cur.b.is_positive() {
            return Err(not_red());
        }
        let q = cur.d.div_floor(&cur.b);
        let mut next = None;
        for k in [q.clone(), q - 1] {
            if !k.is_positive() {
                continue;
            }
            let prev = Mat2Z::new(&cur.c - &k * &cur.a, &cur.d - &k * &cur.b, cur.a.clone(), cur.b.clone());
            if is_reduced_or_identity(&prev) {
                next = Some((k, prev));
                break;
            }
        }
        let (k, prev) = next.ok_or_else(not_red)?;
        digits.push(k.to_u64().ok_or_else(|| Error::Red("digit overflow".into()))?);
        cur = prev;
    }
    Ok(RedFactorization { digits, matrix: m.clone() })
}

fn is_reduced_or_identity(m: &Mat2Z) -> bool {
    *m == Mat2Z::identity() || is_reduced(m)
}

pub fn weight(m: &Mat2Z) -> Result<BigInt> {
    Ok(factor(m)?.digits.iter().map(|&k| BigInt::from(k)).product())
}

pub fn product(digits: &[u64]) -> Mat2Z {
    word_matrix(digits)
}
