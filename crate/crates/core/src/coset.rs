//! ℙ¹(ℤ/N) ≅ Γ₀(N)\SL₂(ℤ), its actions, Hermite representatives and Heilbronn chains.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::Mat2Z;
use crate::error::{Error, Result};

/// A class `(c:d)` in ℙ¹(ℤ/N), stored in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct P1Elt {
    pub n: u64,
    pub c: u64,
    pub d: u64,
}

impl std::fmt::Display for P1Elt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}:{})", self.c, self.d)
    }
}

pub(crate) fn gcd_u(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn units(n: u64) -> Vec<u64> {
    (1..n.max(2)).filter(|&u| gcd_u(u, n) == 1).collect()
}

pub(crate) fn modn(x: i64, n: u64) -> u64 {
    x.rem_euclid(n as i64) as u64
}

fn lexmin(n: u64, c: u64, d: u64, us: &[u64]) -> (u64, u64) {
    us.iter()
        .map(|&u| ((u * c) % n, (u * d) % n))
        .min()
        .expect("unit group nonempty")
}

pub fn p1_normalize(n: u64, c: i64, d: i64) -> Result<P1Elt> {
    if n == 0 {
        return Err(Error::Coset("level must be positive".into()));
    }
    if n == 1 {
        return Ok(P1Elt { n, c: 0, d: 0 });
    }
    let (c, d) = (modn(c, n), modn(d, n));
    if gcd_u(gcd_u(c, d), n) != 1 {
        return Err(Error::Coset(format!("({c},{d}) is not a point of P1(Z/{n})")));
    }
    let (c, d) = lexmin(n, c, d, &units(n));
    Ok(P1Elt { n, c, d })
}

/// Dense lookup table for ℙ¹(ℤ/N): every residue pair maps to its class index.
#[derive(Debug)]
pub struct P1Table {
    pub n: u64,
    pub reps: Vec<P1Elt>,
    lookup: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl P1Table {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "level must be positive");
        if n == 1 {
            return P1Table { n, reps: vec![P1Elt { n, c: 0, d: 0 }], lookup: vec![0] };
        }
        let us = units(n);
        let mut lookup = vec![NONE; (n * n) as usize];
        let mut reps = Vec::new();
        let mut by_key: HashMap<(u64, u64), u32> = HashMap::new();
        for c in 0..n {
            for d in 0..n {
                if gcd_u(gcd_u(c, d), n) != 1 {
                    continue;
                }
                let key = lexmin(n, c, d, &us);
                let idx = *by_key.entry(key).or_insert_with(|| {
                    reps.push(P1Elt { n, c: key.0, d: key.1 });
                    (reps.len() - 1) as u32
                });
                lookup[(c * n + d) as usize] = idx;
            }
        }
        P1Table { n, reps, lookup }
    }

    /// Process-wide memoized table.
    pub fn shared(n: u64) -> Arc<P1Table> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<P1Table>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().expect("p1 cache").get(&n) {
            return t.clone();
        }
        let t = Arc::new(P1Table::new(n));
        cache.lock().expect("p1 cache").entry(n).or_insert(t).clone()
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    #[inline]
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        if self.n == 1 {
            return Some(0);
        }
        let i = self.lookup[(modn(c, self.n) * self.n + modn(d, self.n)) as usize];
        (i != NONE).then_some(i as usize)
    }

    pub fn index_of(&self, s: &P1Elt) -> usize {
        self.index(s.c as i64, s.d as i64).expect("canonical element is in its table")
    }

    /// Class of `(c,d)·m` for a small integer matrix `m = [a,b,c,d]`.
    #[inline]
    pub fn right_mul(&self, i: usize, m: &[i64; 4]) -> Option<usize> {
        let s = self.reps[i];
        let n = self.n as i64;
        let (c, d) = (s.c as i64, s.d as i64);
        let a = m[0].rem_euclid(n);
        let b = m[1].rem_euclid(n);
        let cc = m[2].rem_euclid(n);
        let dd = m[3].rem_euclid(n);
        self.index((c * a + d * cc) % n, (c * b + d * dd) % n)
    }
}

pub fn p1_list(n: u64) -> Vec<P1Elt> {
    P1Table::shared(n).reps.clone()
}

/// `N · ∏_{p|N} (1 + 1/p)`.
pub fn p1_index(n: u64) -> u64 {
    let mut r = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            r = r / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        r = r / m * (m + 1);
    }
    r
}

fn mod_big(x: &BigInt, n: u64) -> i64 {
    let r = x.mod_floor(&BigInt::from(n));
    r.to_i64().expect("residue fits")
}

/// Bottom-row action `(c,d) ↦ (c,d)·m`.
pub fn act_right(s: &P1Elt, m: &Mat2Z) -> Result<P1Elt> {
    let n = s.n;
    if n == 1 {
        return Ok(*s);
    }
    let (c, d) = (s.c as i64, s.d as i64);
    let nn = n as i64;
    let a = mod_big(&m.a, n);
    let b = mod_big(&m.b, n);
    let cc = mod_big(&m.c, n);
    let dd = mod_big(&m.d, n);
    p1_normalize(n, (c * a + d * cc) % nn, (c * b + d * dd) % nn)
}

/// Left action on cosets `hG`, expressed on bottom rows as `s ↦ s·adj(h)`.
/// Defined when `det h` is a unit mod N; otherwise the image leaves this component.
pub fn act_left(h: &Mat2Z, s: &P1Elt) -> Result<P1Elt> {
    let det = h.det();
    if s.n > 1 && gcd_u(mod_big(&det, s.n) as u64, s.n) != 1 {
        return Err(Error::Coset(format!("det {det} not a unit mod {}", s.n)));
    }
    if det.is_zero() {
        return Err(Error::Coset("singular matrix".into()));
    }
    act_right(s, &h.adj())
}

/// Hermite representatives `(a,b;0,d)`, `ad = m`, `0 ≤ b < d`.
pub fn double_coset_reps(m: u64) -> Vec<Mat2Z> {
    hermite_reps(m)
        .into_iter()
        .map(|[a, b, c, d]| Mat2Z::from_i64(a, b, c, d))
        .collect()
}

pub(crate) fn hermite_reps(m: u64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for a in 1..=m {
        if m % a != 0 {
            continue;
        }
        let d = m / a;
        for b in 0..d {
            out.push([a as i64, b as i64, 0, d as i64]);
        }
    }
    out
}

/// One Heilbronn chain: consecutive determinant-`m` matrices whose first columns
/// run from slope ∞ to slope 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainEntry {
    pub class_matrix: Mat2Z,
    pub chain: Vec<Mat2Z>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeChain {
    pub m: u64,
    pub entries: Vec<ChainEntry>,
    /// Aggregated multiplicities `u_M`.
    pub coefficients: Vec<(Mat2Z, i64)>,
}

fn chain_steps(a: i64, b: i64, d: i64) -> Vec<[i64; 4]> {
    // columns w_k, w_{k+1}; next = −w_k + c·w_{k+1} with c = ⌈u_k/u_{k+1}⌉
    let (mut w0, mut w1) = ((a, 0i64), (b, d));
    let mut steps = Vec::new();
    loop {
        steps.push([w0.0, w1.0, w0.1, w1.1]);
        if w1.0 == 0 {
            break;
        }
        let c = Integer::div_ceil(&w0.0, &w1.0);
        let w2 = (-w0.0 + c * w1.0, -w0.1 + c * w1.1);
        w0 = w1;
        w1 = w2;
    }
    steps
}

pub fn manin_heilbronn_lift(m: u64) -> HeckeChain {
    let mut entries = Vec::new();
    let mut counts: HashMap<[i64; 4], i64> = HashMap::new();
    for a in 1..=m {
        if m % a != 0 {
            continue;
        }
        let d = m / a;
        for b in 0..a {
            let (a, b, d) = (a as i64, b as i64, d as i64);
            let steps = chain_steps(a, b, d);
            for s in &steps {
                *counts.entry(*s).or_insert(0) += 1;
            }
            entries.push(ChainEntry {
                class_matrix: Mat2Z::from_i64(a, b, 0, d),
                chain: steps.iter().map(|s| Mat2Z::from_i64(s[0], s[1], s[2], s[3])).collect(),
            });
        }
    }
    let mut coefficients: Vec<([i64; 4], i64)> = counts.into_iter().collect();
    coefficients.sort();
    HeckeChain {
        m,
        entries,
        coefficients: coefficients
            .into_iter()
            .map(|(s, u)| (Mat2Z::from_i64(s[0], s[1], s[2], s[3]), u))
            .collect(),
    }
}

pub(crate) fn heilbronn_i64(m: u64) -> Vec<[i64; 4]> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<[i64; 4]>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("heilbronn cache").get(&m) {
        return v.as_ref().clone();
    }
    let mut v = Vec::new();
    for a in 1..=m {
        if m % a != 0 {
            continue;
        }
        for b in 0..a {
            v.extend(chain_steps(a as i64, b as i64, (m / a) as i64));
        }
    }
    v.sort();
    cache.lock().expect("heilbronn cache").insert(m, Arc::new(v.clone()));
    v
}

pub fn heilbronn_matrices(m: u64) -> Vec<Mat2Z> {
    heilbronn_i64(m)
        .into_iter()
        .map(|s| Mat2Z::from_i64(s[0], s[1], s[2], s[3]))
        .collect()
}

impl HeckeChain {
    /// Structural checks: every step has determinant `m`, consecutive steps differ by
    /// a unimodular right factor, and each chain runs from slope ∞ to slope 0.
    pub fn validate(&self) -> Result<()> {
        let m = BigInt::from(self.m);
        for e in &self.entries {
            let first = e.chain.first().ok_or_else(|| Error::Coset("empty chain".into()))?;
            let last = e.chain.last().expect("nonempty");
            if !first.c.is_zero() || first.a.is_zero() {
                return Err(Error::Coset(format!("chain {} does not start at ∞", e.class_matrix)));
            }
            if !last.b.is_zero() || last.d.is_zero() {
                return Err(Error::Coset(format!("chain {} does not end at 0", e.class_matrix)));
            }
            for (i, g) in e.chain.iter().enumerate() {
                if g.det() != m {
                    return Err(Error::Coset(format!("step {g} has det ≠ {}", self.m)));
                }
                if i > 0 {
                    let prev = &e.chain[i - 1];
                    // prev⁻¹·g must be integral and unimodular
                    let t = prev.adj().mul(g);
                    let ok = [&t.a, &t.b, &t.c, &t.d].iter().all(|x| (*x % &m).is_zero());
                    if !ok || (&t.det() / (&m * &m)).abs() != BigInt::from(1) {
                        return Err(Error::Coset(format!("steps {prev} → {g} not unimodular")));
                    }
                }
            }
        }
        Ok(())
    }
}
