//! Exact rationals, real quadratic surds and integer 2×2 matrices.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(int(p), int(q))
}

/// `(a + b√d)/c` with `c > 0`, `d > 1` squarefree, `gcd(a,b,c) = 1`, `b ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

/// Splits `n = k² · r` with `r` squarefree. Trial division; inputs here are small.
pub(crate) fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut k = BigInt::one();
    let mut p = int(2);
    while &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            k *= &p;
        }
        p += 1;
        if p > int(2_000_000) {
            break;
        }
    }
    (k, rest)
}

impl QuadSurd {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Arith("zero denominator".into()));
        }
        if d <= BigInt::one() {
            return Err(Error::Arith(format!("radicand {d} must exceed 1")));
        }
        let (k, d) = squarefree_split(&d);
        if d.is_one() {
            return Err(Error::Arith("radicand is a perfect square".into()));
        }
        let b = b * k;
        if b.is_zero() {
            return Err(Error::Arith("zero surd coefficient; use a rational".into()));
        }
        Ok(Self::reduce(a, b, c, d))
    }

    fn reduce(mut a: BigInt, mut b: BigInt, mut c: BigInt, d: BigInt) -> Self {
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        QuadSurd { a, b, c, d }
    }

    /// `r + s√d`; `d` must already be squarefree.
    fn from_parts(r: &Rat, s: &Rat, d: &BigInt) -> ExtendedPoint {
        if s.is_zero() {
            return ExtendedPoint::Rational(r.clone());
        }
        let den = r.denom().lcm(s.denom());
        let a = r.numer() * (&den / r.denom());
        let b = s.numer() * (&den / s.denom());
        ExtendedPoint::Surd(Self::reduce(a, b, den, d.clone()))
    }

    pub fn rational_part(&self) -> Rat {
        Rat::new(self.a.clone(), self.c.clone())
    }

    pub fn surd_coeff(&self) -> Rat {
        Rat::new(self.b.clone(), self.c.clone())
    }

    pub fn conjugate(&self) -> Self {
        QuadSurd { a: self.a.clone(), b: -&self.b, c: self.c.clone(), d: self.d.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        let root = self.d.to_f64().unwrap_or(f64::NAN).sqrt();
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        // avoid cancellation when a and b√d nearly cancel
        if (a < 0.0) != (b < 0.0) && a != 0.0 {
            let num = &self.a * &self.a - &self.b * &self.b * &self.d;
            let num = num.to_f64().unwrap_or(f64::NAN);
            return num / (c * (a - b * root));
        }
        (a + b * root) / c
    }

    pub fn floor(&self) -> BigInt {
        let t = &self.b * &self.b * &self.d;
        let s = t.sqrt();
        let n0 = if self.b.is_positive() { &self.a + s } else { &self.a - s - 1 };
        n0.div_floor(&self.c)
    }

    pub fn signum(&self) -> Ordering {
        surd_sign(&self.a, &self.b, &self.d)
    }
}

/// Sign of `a + b√d` for non-square `d > 0`.
fn surd_sign(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    let sa = a.cmp(&BigInt::zero());
    let sb = b.cmp(&BigInt::zero());
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    if a * a > b * b * d {
        sa
    } else {
        sb
    }
}

fn rat_sign(r: &Rat, s: &Rat, d: &BigInt) -> Ordering {
    let den = r.denom() * s.denom();
    let a = r.numer() * s.denom();
    let b = s.numer() * r.denom();
    debug_assert!(den.is_positive());
    surd_sign(&a, &b, d)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedPoint {
    Rational(Rat),
    Surd(QuadSurd),
    Infinity,
}

impl ExtendedPoint {
    pub fn from_int(n: i64) -> Self {
        ExtendedPoint::Rational(Rat::from_integer(int(n)))
    }

    pub fn frac(p: i64, q: i64) -> Self {
        ExtendedPoint::Rational(rat(p, q))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedPoint::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ExtendedPoint::Surd(s) => s.to_f64(),
            ExtendedPoint::Infinity => f64::INFINITY,
        }
    }

    /// `(r, s, d)` with value `r + s√d`; rationals use `d = 0`.
    fn parts(&self) -> Option<(Rat, Rat, BigInt)> {
        match self {
            ExtendedPoint::Rational(r) => Some((r.clone(), Rat::zero(), BigInt::zero())),
            ExtendedPoint::Surd(q) => Some((q.rational_part(), q.surd_coeff(), q.d.clone())),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn floor(&self) -> Option<BigInt> {
        match self {
            ExtendedPoint::Rational(r) => Some(r.floor().to_integer()),
            ExtendedPoint::Surd(s) => Some(s.floor()),
            ExtendedPoint::Infinity => None,
        }
    }

    /// Exact comparison of finite points (surds with different radicands compare
    /// via exact squaring).
    pub fn cmp_finite(&self, other: &Self) -> Option<Ordering> {
        let (r1, s1, d1) = self.parts()?;
        let (r2, s2, d2) = other.parts()?;
        if s1.is_zero() && s2.is_zero() {
            return Some(r1.cmp(&r2));
        }
        if s2.is_zero() || s1.is_zero() || d1 == d2 {
            let d = if s1.is_zero() { d2 } else { d1 };
            return Some(rat_sign(&(r1 - r2), &(s1 - s2), &d));
        }
        // different radicands: fall back on floats with a wide safety margin, then
        // exact refinement is unnecessary because the values are distinct irrationals
        let x = self.to_f64();
        let y = other.to_f64();
        x.partial_cmp(&y)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if !self.a.is_zero() {
            s.push_str(&self.a.to_string());
            if self.b.is_positive() {
                s.push('+');
            }
        }
        if self.b.is_negative() {
            s.push('-');
        }
        let ab = self.b.abs();
        if !ab.is_one() {
            s.push_str(&format!("{ab}*"));
        }
        s.push_str(&format!("sqrt({})", self.d));
        if self.c.is_one() {
            write!(f, "{s}")
        } else {
            write!(f, "({s})/{}", self.c)
        }
    }
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Rational(r) => write!(f, "{r}"),
            ExtendedPoint::Surd(s) => write!(f, "{s}"),
            ExtendedPoint::Infinity => write!(f, "inf"),
        }
    }
}

// ---- parsing ---------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    radicand: Option<BigInt>,
}

/// Element `r + s√d` of the field fixed by the first `sqrt` seen.
type Qe = (Rat, Rat);

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, String::from_utf8_lossy(self.src)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn d(&self) -> BigInt {
        self.radicand.clone().unwrap_or_else(BigInt::zero)
    }

    fn mul(&self, x: &Qe, y: &Qe) -> Qe {
        let d = Rat::from_integer(self.d());
        (&x.0 * &y.0 + &x.1 * &y.1 * d, &x.0 * &y.1 + &x.1 * &y.0)
    }

    fn inv(&self, x: &Qe) -> Result<Qe> {
        let d = Rat::from_integer(self.d());
        let n = &x.0 * &x.0 - &x.1 * &x.1 * d;
        if n.is_zero() {
            return Err(self.err("division by zero"));
        }
        Ok((&x.0 / &n, -&x.1 / &n))
    }

    fn expr(&mut self) -> Result<Qe> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = (acc.0 + t.0, acc.1 + t.1);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = (acc.0 - t.0, acc.1 - t.1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Qe> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let t = self.unary()?;
                    acc = self.mul(&acc, &t);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let t = self.unary()?;
                    let ti = self.inv(&t)?;
                    acc = self.mul(&acc, &ti);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Qe> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let v = self.unary()?;
                Ok((-v.0, -v.1))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        BigInt::from_str(s).map_err(|_| self.err("bad integer"))
    }

    fn primary(&mut self) -> Result<Qe> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok((Rat::from_integer(self.integer()?), Rat::zero())),
            Some(b's') => {
                if !self.src[self.pos..].starts_with(b"sqrt") {
                    return Err(self.err("unknown identifier"));
                }
                self.pos += 4;
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after sqrt"));
                }
                self.pos += 1;
                let n = self.integer()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                let (k, r) = squarefree_split(&n);
                if r.is_one() || n.is_zero() {
                    let v = if n.is_zero() { BigInt::zero() } else { k };
                    return Ok((Rat::from_integer(v), Rat::zero()));
                }
                match &self.radicand {
                    Some(d) if *d != r => return Err(self.err("mixed radicands")),
                    _ => self.radicand = Some(r),
                }
                Ok((Rat::zero(), Rat::from_integer(k)))
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

impl FromStr for ExtendedPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "inf" || t == "∞" || t == "1/0" {
            return Ok(ExtendedPoint::Infinity);
        }
        let mut p = Parser { src: t.as_bytes(), pos: 0, radicand: None };
        let v = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(match p.radicand {
            Some(d) => QuadSurd::from_parts(&v.0, &v.1, &d),
            None => ExtendedPoint::Rational(v.0),
        })
    }
}

pub fn parse_point(s: &str) -> Result<ExtendedPoint> {
    s.parse()
}

// ---- matrices ----------------------------------------------------------------

/// Row-major `(a, b; c, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2Z {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2Z {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Mat2Z { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2Z::new(int(a), int(b), int(c), int(d))
    }

    pub fn identity() -> Self {
        Mat2Z::from_i64(1, 0, 0, 1)
    }

    /// The generator `g_k = (0,1;1,k)`.
    pub fn g(k: u64) -> Self {
        Mat2Z::new(BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::from(k))
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn mul(&self, o: &Mat2Z) -> Mat2Z {
        Mat2Z {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// Adjugate: `m · adj(m) = det(m) · I`.
    pub fn adj(&self) -> Mat2Z {
        Mat2Z { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn neg(&self) -> Mat2Z {
        Mat2Z { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    pub fn is_gl2z(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Inverse in GL₂(ℤ).
    pub fn inverse(&self) -> Result<Mat2Z> {
        let det = self.det();
        if det.is_one() {
            Ok(self.adj())
        } else if (-&det).is_one() {
            Ok(self.adj().neg())
        } else {
            Err(Error::Arith(format!("matrix {self} is not in GL2(Z)")))
        }
    }

    pub fn to_i64(&self) -> Option<[i64; 4]> {
        Some([self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?, self.d.to_i64()?])
    }
}

impl fmt::Display for Mat2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for Mat2Z {
    type Err = Error;

    /// Accepts `a,b,c,d` or `(a,b;c,d)`.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !"() ".contains(*c)).collect();
        let parts: Vec<&str> = cleaned.split([',', ';']).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("matrix needs 4 entries: {s:?}")));
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            v.push(BigInt::from_str(p).map_err(|_| Error::Parse(format!("bad matrix entry {p:?}")))?);
        }
        let mut it = v.into_iter();
        let mut next = || it.next().expect("four entries");
        Ok(Mat2Z::new(next(), next(), next(), next()))
    }
}

/// `(a·p + b)/(c·p + d)`, with ∞ handled by limits.
pub fn moebius_act(m: &Mat2Z, p: &ExtendedPoint) -> Result<ExtendedPoint> {
    if m.det().is_zero() {
        return Err(Error::Arith(format!("singular matrix {m}")));
    }
    let (r, s, d) = match p.parts() {
        None => {
            return Ok(if m.c.is_zero() {
                ExtendedPoint::Infinity
            } else {
                ExtendedPoint::Rational(Rat::new(m.a.clone(), m.c.clone()))
            });
        }
        Some(x) => x,
    };
    let (a, b, c, dd) = (
        Rat::from_integer(m.a.clone()),
        Rat::from_integer(m.b.clone()),
        Rat::from_integer(m.c.clone()),
        Rat::from_integer(m.d.clone()),
    );
    let nr = &a * &r + &b;
    let ns = &a * &s;
    let dr = &c * &r + &dd;
    let ds = &c * &s;
    if s.is_zero() {
        if dr.is_zero() {
            return Ok(ExtendedPoint::Infinity);
        }
        return Ok(ExtendedPoint::Rational(nr / dr));
    }
    // multiply by the conjugate of the denominator
    let dq = Rat::from_integer(d.clone());
    let norm = &dr * &dr - &ds * &ds * &dq;
    let qr = (&nr * &dr - &ns * &ds * &dq) / &norm;
    let qs = (&ns * &dr - &nr * &ds) / &norm;
    Ok(QuadSurd::from_parts(&qr, &qs, &d))
}

/// Fixed points of a hyperbolic matrix, attracting one first.
pub fn hyperbolic_fixed_points(m: &Mat2Z) -> Result<(ExtendedPoint, ExtendedPoint)> {
    let det = m.det();
    if det.is_zero() {
        return Err(Error::Arith(format!("singular matrix {m}")));
    }
    let tr = m.trace();
    let disc: BigInt = &tr * &tr - BigInt::from(4) * &det;
    match disc.cmp(&BigInt::zero()) {
        Ordering::Equal => return Err(Error::Arith(format!("{m} is parabolic (trace² = 4·det)"))),
        Ordering::Less => return Err(Error::Arith(format!("{m} is elliptic (trace² < 4·det)"))),
        Ordering::Greater => {}
    }
    if m.c.is_zero() {
        return Err(Error::Arith(format!("{m} fixes ∞ (c = 0)")));
    }
    // c x² + (d − a) x − b = 0  ⇒  x = ((a − d) ± √disc) / 2c
    let two_c = Rat::from_integer(2 * &m.c);
    let r = Rat::from_integer(&m.a - &m.d) / &two_c;
    let (k, sq) = squarefree_split(&disc);
    let (p1, p2) = if sq.is_one() {
        let off = Rat::from_integer(k) / &two_c;
        (ExtendedPoint::Rational(&r + &off), ExtendedPoint::Rational(&r - &off))
    } else {
        let s = Rat::from_integer(k) / &two_c;
        (QuadSurd::from_parts(&r, &s, &sq), QuadSurd::from_parts(&r, &-s, &sq))
    };
    // eigenvalue on (x, 1) is c·x + d; attracting = larger modulus
    let lam = |p: &ExtendedPoint| -> ExtendedPoint {
        let (pr, ps, pd) = p.parts().expect("finite");
        let c = Rat::from_integer(m.c.clone());
        let r = &c * pr + Rat::from_integer(m.d.clone());
        let s = c * ps;
        if s.is_zero() {
            ExtendedPoint::Rational(r.abs())
        } else {
            let v = QuadSurd::from_parts(&r, &s, &pd);
            match &v {
                ExtendedPoint::Surd(q) if q.signum() == Ordering::Less => {
                    QuadSurd::from_parts(&-r, &-s, &pd)
                }
                _ => v,
            }
        }
    };
    let l1 = lam(&p1);
    let l2 = lam(&p2);
    if l1.cmp_finite(&l2) == Some(Ordering::Less) {
        Ok((p2, p1))
    } else {
        Ok((p1, p2))
    }
}
