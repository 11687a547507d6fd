//! Rational 2×2 matrices, Hermite forms of lattices and the slot action on ℙ¹(ℤ/N).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{Mat2Z, Rat};
use crate::coset::{gcd_u, p1_normalize, P1Elt};
use crate::error::{Error, Result};

/// Row-major `(a, b; c, d)` over ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QMat2(pub [Rat; 4]);

fn q(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

impl QMat2 {
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        QMat2([q(a), q(b), q(c), q(d)])
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn from_mat(m: &Mat2Z) -> Self {
        let r = |x: &BigInt| Rat::from_integer(x.clone());
        QMat2([r(&m.a), r(&m.b), r(&m.c), r(&m.d)])
    }

    pub fn g(k: u64) -> Self {
        Self::from_i64(0, 1, 1, k as i64)
    }

    pub fn mul(&self, o: &QMat2) -> QMat2 {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        QMat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn det(&self) -> Rat {
        let [a, b, c, d] = &self.0;
        a * d - b * c
    }

    pub fn inverse(&self) -> Option<QMat2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let [a, b, c, d] = &self.0;
        Some(QMat2([d / &det, -b / &det, -c / &det, a / &det]))
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rat::is_integer)
    }

    /// Integral, upper triangular, `a, d > 0` and `0 ≤ b < d`.
    pub fn is_hermite(&self) -> bool {
        let [a, b, c, d] = &self.0;
        self.is_integral() && c.is_zero() && a.is_positive() && d.is_positive() && !b.is_negative() && b < d
    }

    /// Common denominator of the entries.
    fn denominator(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Canonical representative of `GL₂(ℤ)·self`: `(a, b; 0, d)` with `a, d > 0`,
    /// `0 ≤ b < d` (rational matrices are handled by clearing denominators).
    pub fn hermite(&self) -> Result<QMat2> {
        if self.det().is_zero() {
            return Err(Error::Qsm("singular matrix has no Hermite form".into()));
        }
        let den = self.denominator();
        let ints: Vec<BigInt> = self.0.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
        let (p, qq, r, s) = (&ints[0], &ints[1], &ints[2], &ints[3]);
        let e = p.extended_gcd(r);
        let g = e.gcd;
        // γ = (u, v; −r/g, p/g) has determinant 1 and kills the lower-left entry
        let (u, v) = (e.x, e.y);
        let top_b = &u * qq + &v * s;
        let mut dd = (-(r / &g)) * qq + (p / &g) * s;
        let (mut a, mut b) = (g, top_b);
        if a.is_negative() {
            a = -a;
            b = -b;
        }
        if dd.is_negative() {
            dd = -dd;
        }
        b = b.mod_floor(&dd);
        let back = |x: BigInt| Rat::new(x, den.clone());
        Ok(QMat2([back(a), back(b), Rat::zero(), back(dd)]))
    }

    /// `self mod N` when all entries and the determinant are `N`-integral units as
    /// needed, i.e. `self ∈ GL₂(ℤ_(N))`.
    pub fn reduce_local(&self, n: u64) -> Option<[i64; 4]> {
        let nn = BigInt::from(n);
        let red = |x: &Rat| -> Option<i64> {
            let den = x.denom().mod_floor(&nn);
            let dinv = modinv(den.to_i64()?, n as i64)?;
            let num = x.numer().mod_floor(&nn).to_i64()?;
            Some((num as i128 * dinv as i128).rem_euclid(n as i128) as i64)
        };
        let m = [red(&self.0[0])?, red(&self.0[1])?, red(&self.0[2])?, red(&self.0[3])?];
        let det = (m[0] as i128 * m[3] as i128 - m[1] as i128 * m[2] as i128).rem_euclid(n as i128) as u64;
        (n == 1 || gcd_u(det, n) == 1).then_some(m)
    }

    pub fn to_i64(&self) -> Option<[i64; 4]> {
        if !self.is_integral() {
            return None;
        }
        let v = |x: &Rat| x.to_integer().to_i64();
        Some([v(&self.0[0])?, v(&self.0[1])?, v(&self.0[2])?, v(&self.0[3])?])
    }
}

impl fmt::Display for QMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.0;
        write!(f, "({a},{b};{c},{d})")
    }
}

impl Serialize for QMat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn modinv(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let e = a.extended_gcd(&n);
    (e.gcd == 1).then(|| e.x.rem_euclid(n))
}

/// Left action of a rational matrix on a coset slot, `s ↦ s·adj(u)`; `None` once
/// the slot leaves the component of ℙ¹(ℤ/N) (u ∉ GL₂(ℤ_(N))).
pub fn act_slot(u: &QMat2, s: &P1Elt) -> Option<P1Elt> {
    if s.n == 1 {
        return Some(*s);
    }
    let [a, b, c, d] = u.reduce_local(s.n)?;
    // (c_s, d_s)·(d, −b; −c, a)
    let (cs, ds) = (s.c as i128, s.d as i128);
    let n = s.n as i128;
    let x = (cs * d as i128 - ds * c as i128).rem_euclid(n);
    let y = (-cs * b as i128 + ds * a as i128).rem_euclid(n);
    p1_normalize(s.n, x as i64, y as i64).ok()
}

/// A sublattice class `(a, b; 0, d)`, `0 ≤ b < d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeCoset {
    pub a: u64,
    pub b: u64,
    pub d: u64,
}

impl LatticeCoset {
    pub fn det(&self) -> u64 {
        self.a * self.d
    }

    pub fn matrix(&self) -> QMat2 {
        QMat2::from_i64(self.a as i64, self.b as i64, 0, self.d as i64)
    }

    pub fn from_matrix(m: &QMat2) -> Option<Self> {
        if !m.is_hermite() {
            return None;
        }
        let [a, b, _, d] = m.to_i64()?;
        Some(LatticeCoset { a: a as u64, b: b as u64, d: d as u64 })
    }
}

/// All Hermite forms of determinant exactly `n`, by exhaustive enumeration.
pub fn lattices_of_det(n: u64) -> Vec<LatticeCoset> {
    let mut out = Vec::new();
    for a in 1..=n {
        if n % a == 0 {
            let d = n / a;
            out.extend((0..d).map(|b| LatticeCoset { a, b, d }));
        }
    }
    out
}

/// Hermite forms with determinant `≤ max_det`, ordered by determinant.
pub fn lattices_up_to(max_det: u64) -> Vec<LatticeCoset> {
    (1..=max_det).flat_map(lattices_of_det).collect()
}
