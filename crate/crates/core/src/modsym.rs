//! Weight-2 modular symbols for Γ₀(N) via Manin symbols.
//!
//! A generator `(c:d)` stands for `[g] = {g·0, g·∞}` where `g ∈ SL₂(ℤ)` has bottom
//! row `(c,d)`. Relations: `x + xσ = 0`, `x + xτ + xτ² = 0`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{ExtendedPoint, Rat};
use crate::coset::{gcd_u, heilbronn_i64, hermite_reps, P1Elt, P1Table};
use crate::error::{Error, Result};
use crate::linalg::{self, QMat, QVec};

/// Exact coordinates in the cuspidal basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SymbolVector {
    #[serde(serialize_with = "ser_rats")]
    pub coords: QVec,
}

pub(crate) fn ser_rats<S: serde::Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl SymbolVector {
    pub fn zero(dim: usize) -> Self {
        SymbolVector { coords: linalg::zero_vec(dim) }
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero_vec(&self.coords)
    }

    pub fn add(&self, o: &SymbolVector) -> SymbolVector {
        SymbolVector { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &SymbolVector) -> SymbolVector {
        SymbolVector { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: &Rat) -> SymbolVector {
        SymbolVector { coords: self.coords.iter().map(|a| a * k).collect() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        linalg::to_f64_vec(&self.coords)
    }
}

#[derive(Debug)]
pub struct SymbolSpace {
    pub level: u64,
    pub generators: Vec<P1Elt>,
    /// One row per relation, one column per generator.
    pub relation_matrix: Vec<Vec<i64>>,
    /// Cusp representatives `p/q` (∞ is `1/0`).
    pub cusps: Vec<(i64, i64)>,
    /// Boundary map on the full space: rows = cusps, columns = full basis.
    pub boundary_matrix: QMat,
    /// Cuspidal basis in full-space coordinates.
    pub cuspidal_basis: Vec<QVec>,
    /// Complement spanned by the Eisenstein part, in full-space coordinates.
    pub eisenstein_basis: Vec<QVec>,
    pub(crate) table: Arc<P1Table>,
    free: Vec<usize>,
    coord: Vec<QVec>,
    cusp_coord: Vec<QVec>,
    cusp_coord_f64: Vec<Vec<f64>>,
    projection: QMat,
}

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return if a >= 0 { (a, 1, 0) } else { (-a, -1, 0) };
    }
    let (g, x, y) = egcd(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

/// An SL₂(ℤ) matrix with bottom row ≡ `(c,d)` mod N.
pub fn lift_to_sl2(n: u64, c: u64, d: u64) -> [i64; 4] {
    let n = n as i64;
    let (c, d) = if n == 1 { (0, 1) } else { (c as i64, d as i64) };
    let cc = if c == 0 { n } else { c };
    let mut dd = d;
    while cc.gcd(&dd) != 1 {
        dd += n;
    }
    // a·dd − b·cc = 1
    let (_, x, y) = egcd(dd, cc);
    [x, -y, cc, dd]
}

/// `(p, q)` reduced with `q ≥ 0`; `None` for 0/0.
fn reduce_frac(p: i64, q: i64) -> (i64, i64) {
    let g = p.gcd(&q);
    let (mut p, mut q) = (p / g, q / g);
    if q < 0 || (q == 0 && p < 0) {
        p = -p;
        q = -q;
    }
    (p, q)
}

fn inv_mod(a: i64, m: i64) -> i64 {
    if m <= 1 {
        return 0;
    }
    let (_, x, _) = egcd(a.rem_euclid(m), m);
    x.rem_euclid(m)
}

/// Γ₀(N)-equivalence of cusps `p1/q1` and `p2/q2` (reduced, `q ≥ 0`).
pub fn cusps_equivalent(n: u64, c1: (i64, i64), c2: (i64, i64)) -> bool {
    let n = n as i64;
    let s = |(p, q): (i64, i64)| if q == 0 { 1 } else { inv_mod(p, q) };
    let (s1, s2) = (s(c1), s(c2));
    let m = (c1.1 * c2.1).gcd(&n);
    if m == 0 {
        return true;
    }
    (s1 * c2.1 - s2 * c1.1).rem_euclid(m) == 0
}

fn cusp_point(p: i64, q: i64) -> ExtendedPoint {
    if q == 0 {
        ExtendedPoint::Infinity
    } else {
        ExtendedPoint::Rational(Rat::new(BigInt::from(p), BigInt::from(q)))
    }
}

fn rat_big(x: i64) -> Rat {
    Rat::from_integer(BigInt::from(x))
}

impl SymbolSpace {
    pub fn new(level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::Symbols("level must be positive".into()));
        }
        let table = P1Table::shared(level);
        let gens = table.reps.clone();
        let ng = gens.len();
        let idx = |c: i64, d: i64| table.index(c, d).expect("unimodular pair");
        let mut rel_int: Vec<Vec<i64>> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let (c, d) = (g.c as i64, g.d as i64);
            let mut r = vec![0i64; ng];
            r[i] += 1;
            r[idx(d, -c)] += 1;
            rel_int.push(r);
            let mut r = vec![0i64; ng];
            r[i] += 1;
            r[idx(d, -c - d)] += 1;
            r[idx(-c - d, c)] += 1;
            rel_int.push(r);
        }
        let rel_q: QMat = rel_int.iter().map(|r| r.iter().map(|&x| rat_big(x)).collect()).collect();
        let (rr, piv) = linalg::rref(&rel_q);
        let free: Vec<usize> = (0..ng).filter(|j| !piv.contains(j)).collect();
        let dim = free.len();
        let coord: Vec<QVec> = (0..ng)
            .map(|j| {
                let mut v = linalg::zero_vec(dim);
                if let Some(fi) = free.iter().position(|&f| f == j) {
                    v[fi] = Rat::one();
                } else {
                    let row = &rr[piv.iter().position(|&p| p == j).expect("pivot")];
                    for (fi, &f) in free.iter().enumerate() {
                        v[fi] = -row[f].clone();
                    }
                }
                v
            })
            .collect();

        let mut space = SymbolSpace {
            level,
            generators: gens,
            relation_matrix: rel_int,
            cusps: Vec::new(),
            boundary_matrix: Vec::new(),
            cuspidal_basis: Vec::new(),
            eisenstein_basis: Vec::new(),
            table,
            free,
            coord,
            cusp_coord: Vec::new(),
            cusp_coord_f64: Vec::new(),
            projection: Vec::new(),
        };
        space.build_boundary();
        space.build_projection()?;
        Ok(space)
    }

    pub fn dim_full(&self) -> usize {
        self.free.len()
    }

    pub fn dim_cuspidal(&self) -> usize {
        self.cuspidal_basis.len()
    }

    fn cusp_index(&mut self, p: i64, q: i64) -> usize {
        let c = reduce_frac(p, q);
        if let Some(i) = self.cusps.iter().position(|&e| cusps_equivalent(self.level, e, c)) {
            return i;
        }
        self.cusps.push(c);
        self.cusps.len() - 1
    }

    fn build_boundary(&mut self) {
        let mut cols: Vec<Vec<(usize, i64)>> = Vec::new();
        for fi in 0..self.free.len() {
            let g = self.generators[self.free[fi]];
            let [a, b, c, d] = lift_to_sl2(self.level, g.c, g.d);
            let inf = self.cusp_index(a, c);
            let zero = self.cusp_index(b, d);
            cols.push(vec![(inf, 1), (zero, -1)]);
        }
        let mut m = linalg::zeros(self.cusps.len(), self.free.len());
        for (j, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                m[i][j] += rat_big(v);
            }
        }
        self.boundary_matrix = m;
    }

    fn build_projection(&mut self) -> Result<()> {
        let dim = self.dim_full();
        let s_basis = linalg::kernel(&self.boundary_matrix, dim);
        let ds = s_basis.len();
        let e_basis = if ds == 0 {
            linalg::identity(dim)
        } else {
            let p = (7..).find(|&p| is_prime(p) && self.level % p != 0).expect("prime exists");
            let t = self.hecke_full(p);
            let ts = restrict(&t, &s_basis)?;
            let chi = linalg::charpoly(&ts);
            let img = linalg::poly_of_matrix(&chi, &t);
            linalg::column_space(&img)
        };
        if ds + e_basis.len() != dim {
            return Err(Error::Symbols(format!(
                "cuspidal/Eisenstein split failed at level {}: {} + {} ≠ {}",
                self.level,
                ds,
                e_basis.len(),
                dim
            )));
        }
        let mut cols = s_basis.clone();
        cols.extend(e_basis.iter().cloned());
        let b = linalg::transpose(&cols);
        let inv = linalg::inverse(&b).ok_or_else(|| Error::Symbols("degenerate cuspidal split".into()))?;
        self.projection = inv.into_iter().take(ds).collect();
        self.cuspidal_basis = s_basis;
        self.eisenstein_basis = e_basis;
        self.cusp_coord = self.coord.iter().map(|v| linalg::mat_vec(&self.projection, v)).collect();
        self.cusp_coord_f64 = self.cusp_coord.iter().map(|v| linalg::to_f64_vec(v)).collect();
        Ok(())
    }

    /// Full-space coordinates of the generator at table index `i`.
    pub fn full_coords(&self, i: usize) -> &QVec {
        &self.coord[i]
    }

    /// Cuspidal coordinates of the generator at table index `i`.
    pub fn generator_coords(&self, i: usize) -> &QVec {
        &self.cusp_coord[i]
    }

    pub fn generator_coords_f64(&self, i: usize) -> &[f64] {
        &self.cusp_coord_f64[i]
    }

    pub fn project(&self, full: &[Rat]) -> SymbolVector {
        SymbolVector { coords: linalg::mat_vec(&self.projection, full) }
    }

    /// Embeds cuspidal coordinates back into the full space.
    pub fn embed(&self, v: &SymbolVector) -> QVec {
        let mut out = linalg::zero_vec(self.dim_full());
        for (c, b) in v.coords.iter().zip(&self.cuspidal_basis) {
            linalg::add_scaled(&mut out, c, b);
        }
        out
    }

    /// Table index of the class `s·m`, where `m = [a,b,c,d]` has determinant ±1
    /// (a determinant −1 matrix is first replaced by `m·diag(1,−1)`).
    #[inline]
    pub fn unimod_index(&self, s: &P1Elt, m: [i64; 4], det_negative: bool) -> usize {
        let n = self.level as i64;
        let [a, mut b, c, mut d] = m;
        if det_negative {
            b = -b;
            d = -d;
        }
        let (sc, sd) = (s.c as i64, s.d as i64);
        let x = (sc * a.rem_euclid(n) + sd * c.rem_euclid(n)) % n;
        let y = (sc * b.rem_euclid(n) + sd * d.rem_euclid(n)) % n;
        self.table.index(x, y).expect("unimodular image")
    }

    fn unimod_big(&self, s: &P1Elt, m: [&BigInt; 4]) -> usize {
        let n = BigInt::from(self.level);
        let r = |x: &BigInt| x.mod_floor(&n).to_i64().expect("residue");
        let det = m[0] * m[3] - m[1] * m[2];
        self.unimod_index(s, [r(m[0]), r(m[1]), r(m[2]), r(m[3])], det.is_negative())
    }

    /// Full-space coordinates of `{∞, p/q}` twisted by `s`.
    fn path_inf_to(&self, s: &P1Elt, r: &Rat) -> QVec {
        let mut v = linalg::zero_vec(self.dim_full());
        let (mut p, mut q) = (r.numer().clone(), r.denom().clone());
        let (mut pm, mut qm) = (BigInt::one(), BigInt::zero());
        let (mut pmm, mut qmm) = (BigInt::zero(), BigInt::one());
        while !q.is_zero() {
            let a = p.div_floor(&q);
            let rem = &p - &a * &q;
            p = std::mem::replace(&mut q, rem);
            let pk = &a * &pm + &pmm;
            let qk = &a * &qm + &qmm;
            let i = self.unimod_big(s, [&pm, &pk, &qm, &qk]);
            linalg::add_int(&mut v, -1, &self.coord[i]);
            pmm = std::mem::replace(&mut pm, pk);
            qmm = std::mem::replace(&mut qm, qk);
        }
        v
    }

    fn inf_to(&self, s: &P1Elt, x: &ExtendedPoint) -> Result<QVec> {
        match x {
            ExtendedPoint::Infinity => Ok(linalg::zero_vec(self.dim_full())),
            ExtendedPoint::Rational(r) => Ok(self.path_inf_to(s, r)),
            ExtendedPoint::Surd(_) => Err(Error::Symbols(format!("{x} is not a cusp"))),
        }
    }

    /// Full-space coordinates of `{a, b}` twisted by the coset `s`.
    pub fn path_full(&self, s: &P1Elt, a: &ExtendedPoint, b: &ExtendedPoint) -> Result<QVec> {
        let mut v = self.inf_to(s, b)?;
        linalg::add_int(&mut v, -1, &self.inf_to(s, a)?);
        Ok(v)
    }

    /// All cosets of ℙ¹(ℤ/N), in table order.
    pub fn cosets(&self) -> &[P1Elt] {
        &self.table.reps
    }

    pub fn identity_coset(&self) -> P1Elt {
        self.table.reps[self.table.index(0, 1).expect("(0:1)")]
    }

    /// Hecke operator on the full space via the Heilbronn family; columns are images
    /// of the free generators.
    fn hecke_full(&self, m: u64) -> QMat {
        let heil = heilbronn_i64(m);
        let cols: Vec<QVec> = self
            .free
            .iter()
            .map(|&j| {
                let mut v = linalg::zero_vec(self.dim_full());
                for h in &heil {
                    let i = self.table.right_mul(j, h).expect("Heilbronn image is unimodular");
                    linalg::add_int(&mut v, 1, &self.coord[i]);
                }
                v
            })
            .collect();
        linalg::transpose(&cols)
    }

    /// Hecke operator on the full space via the double-coset path action,
    /// restricted to upper-triangular representatives with `gcd(a, N) = 1`
    /// (so `U_p` for `p | N`).
    pub fn hecke_full_paths(&self, m: u64) -> QMat {
        let one = self.identity_coset();
        let reps: Vec<[i64; 4]> =
            hermite_reps(m).into_iter().filter(|r| gcd_u(r[0] as u64, self.level) == 1).collect();
        let cols: Vec<QVec> = self
            .free
            .iter()
            .map(|&j| {
                let g = self.generators[j];
                let [a, b, c, d] = lift_to_sl2(self.level, g.c, g.d);
                let mut v = linalg::zero_vec(self.dim_full());
                for l in &reps {
                    let ma = l[0] * a + l[1] * c;
                    let mb = l[0] * b + l[1] * d;
                    let mc = l[3] * c;
                    let md = l[3] * d;
                    let at0 = cusp_point(mb, md);
                    let at_inf = cusp_point(ma, mc);
                    let p = self.path_full(&one, &at0, &at_inf).expect("rational endpoints");
                    linalg::add_int(&mut v, 1, &p);
                }
                v
            })
            .collect();
        linalg::transpose(&cols)
    }

    /// Restricts a full-space operator to the cuspidal basis.
    fn to_cuspidal(&self, t: &QMat) -> QMat {
        let cols: Vec<QVec> = self
            .cuspidal_basis
            .iter()
            .map(|b| linalg::mat_vec(&self.projection, &linalg::mat_vec(t, b)))
            .collect();
        linalg::transpose(&cols)
    }

    /// Matrix (acting on column coordinate vectors) of the star involution
    /// `(c:d) ↦ (−c:d)` on the cuspidal part.
    pub fn star_matrix(&self) -> QMat {
        let cols: Vec<QVec> = self
            .free
            .iter()
            .map(|&j| {
                let g = self.generators[j];
                let i = self.table.index(-(g.c as i64), g.d as i64).expect("unimodular");
                self.coord[i].clone()
            })
            .collect();
        self.to_cuspidal(&linalg::transpose(&cols))
    }

    pub fn star(&self, v: &SymbolVector) -> SymbolVector {
        SymbolVector { coords: linalg::mat_vec(&self.star_matrix(), &v.coords) }
    }
}

/// Matrix of `t` on the `t`-stable span of `basis`.
fn restrict(t: &QMat, basis: &[QVec]) -> Result<QMat> {
    let bm = linalg::transpose(&basis.to_vec());
    let cols: Vec<QVec> = basis
        .iter()
        .map(|b| {
            linalg::solve(&bm, &linalg::mat_vec(t, b))
                .ok_or_else(|| Error::Symbols("subspace is not operator-stable".into()))
        })
        .collect::<Result<_>>()?;
    Ok(linalg::transpose(&cols))
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

pub fn symbol_space(level: u64) -> Result<SymbolSpace> {
    SymbolSpace::new(level)
}

pub fn path_to_symbol(space: &SymbolSpace, a: &ExtendedPoint, b: &ExtendedPoint) -> Result<SymbolVector> {
    Ok(space.project(&space.path_full(&space.identity_coset(), a, b)?))
}

/// `{a, b}` twisted by `s`, projected to the cuspidal part.
pub fn path_to_symbol_at(
    space: &SymbolSpace,
    s: &P1Elt,
    a: &ExtendedPoint,
    b: &ExtendedPoint,
) -> Result<SymbolVector> {
    Ok(space.project(&space.path_full(s, a, b)?))
}

/// `T_m` on the cuspidal part (Heilbronn action); requires `gcd(m, N) = 1`.
pub fn hecke_matrix(space: &SymbolSpace, m: u64) -> Result<QMat> {
    if m == 0 || gcd_u(m, space.level) != 1 {
        return Err(Error::Symbols(format!("gcd({m}, {}) ≠ 1", space.level)));
    }
    Ok(space.to_cuspidal(&space.hecke_full(m)))
}

/// `T_m` (or `U_p`-type for `p | N`) on the cuspidal part via the path action.
pub fn hecke_matrix_paths(space: &SymbolSpace, m: u64) -> Result<QMat> {
    if m == 0 {
        return Err(Error::Symbols("m must be positive".into()));
    }
    Ok(space.to_cuspidal(&space.hecke_full_paths(m)))
}

/// A simultaneous rational eigenspace of the Hecke operators on the cuspidal part.
#[derive(Clone, Debug, Serialize)]
pub struct EigenSystem {
    pub level: u64,
    /// Eigenvalues `a_p` for primes up to the decomposition bound; primes dividing
    /// the level are included when the operator is scalar on the space.
    pub eigenvalues: BTreeMap<u64, i64>,
    #[serde(skip)]
    pub basis: Vec<QVec>,
    /// Star eigenvectors (cuspidal coordinates), `+1` and `−1`.
    #[serde(skip)]
    pub plus: Vec<QVec>,
    #[serde(skip)]
    pub minus: Vec<QVec>,
    pub dimension: usize,
}

impl EigenSystem {
    pub fn is_newform(&self) -> bool {
        self.dimension == 2 && self.plus.len() == 1 && self.minus.len() == 1
    }

    pub fn a(&self, p: u64) -> Option<i64> {
        self.eigenvalues.get(&p).copied()
    }
}

fn span_in(basis: &[QVec], sub: &[QVec]) -> Vec<QVec> {
    // sub is in coordinates w.r.t. basis; return ambient vectors
    sub.iter()
        .map(|c| {
            let mut v = linalg::zero_vec(basis.first().map_or(0, |b| b.len()));
            for (k, b) in c.iter().zip(basis) {
                linalg::add_scaled(&mut v, k, b);
            }
            v
        })
        .collect()
}

/// Eigenvalue of `t` on `v` if `v` is an eigenvector.
pub fn eigenvalue_on(t: &QMat, v: &[Rat]) -> Option<Rat> {
    let tv = linalg::mat_vec(t, v);
    let k = v.iter().position(|x| !x.is_zero())?;
    let lam = &tv[k] / &v[k];
    tv.iter().zip(v).all(|(a, b)| *a == &lam * b).then_some(lam)
}

/// Splits the cuspidal part into simultaneous rational eigenspaces using `T_p`
/// for primes `p ≤ bound`, `p ∤ N`.
pub fn eigen_decompose(space: &SymbolSpace, bound: u64) -> Result<Vec<EigenSystem>> {
    let ds = space.dim_cuspidal();
    if ds == 0 {
        return Ok(vec![]);
    }
    let primes: Vec<u64> = (2..=bound.max(2)).filter(|&p| is_prime(p)).collect();
    let mut pieces: Vec<Vec<QVec>> = vec![linalg::identity(ds)];
    let mut mats: BTreeMap<u64, QMat> = BTreeMap::new();
    for &p in primes.iter().filter(|&&p| space.level % p != 0) {
        let t = hecke_matrix(space, p)?;
        let mut next = Vec::new();
        for w in pieces {
            if w.len() <= 2 && eigen_is_scalar(&t, &w) {
                next.push(w);
                continue;
            }
            let a = restrict(&t, &w)?;
            let chi = linalg::charpoly(&a);
            let bnd = (2.0 * (p as f64).sqrt()).floor() as i64 + 1;
            let roots = linalg::integer_roots(&chi, bnd);
            let mut covered = 0;
            for (r, _) in roots {
                let shifted = linalg::mat_sub(&a, &linalg::scalar(a.len(), &rat_big(r)));
                let ker = linalg::kernel(&shifted, a.len());
                covered += ker.len();
                next.push(span_in(&w, &ker));
            }
            if covered < w.len() {
                return Err(Error::Symbols(format!(
                    "unsupported: level {} has a non-rational Hecke eigensystem (T_{p})",
                    space.level
                )));
            }
        }
        pieces = next;
        mats.insert(p, t);
    }
    let star = space.star_matrix();
    let mut out = Vec::new();
    for w in pieces {
        let mut eig = BTreeMap::new();
        for &p in &primes {
            let t = match mats.get(&p) {
                Some(t) => t.clone(),
                None => hecke_matrix_paths(space, p)?,
            };
            if let Some(l) = common_eigenvalue(&t, &w) {
                if l.is_integer() {
                    eig.insert(p, l.to_integer().to_i64().expect("small eigenvalue"));
                }
            }
        }
        let sa = restrict(&star, &w)?;
        let split = |sign: i64| {
            let shifted = linalg::mat_sub(&sa, &linalg::scalar(sa.len(), &rat_big(sign)));
            span_in(&w, &linalg::kernel(&shifted, sa.len()))
        };
        out.push(EigenSystem {
            level: space.level,
            eigenvalues: eig,
            dimension: w.len(),
            plus: split(1),
            minus: split(-1),
            basis: w,
        });
    }
    Ok(out)
}

fn eigen_is_scalar(t: &QMat, w: &[QVec]) -> bool {
    common_eigenvalue(t, w).is_some()
}

fn common_eigenvalue(t: &QMat, w: &[QVec]) -> Option<Rat> {
    let l = eigenvalue_on(t, w.first()?)?;
    w.iter().skip(1).all(|v| eigenvalue_on(t, v).as_ref() == Some(&l)).then_some(l)
}

/// `a_p` on a newform space, computed on one vector with the path action
/// (valid for every prime, including `p | N`).
pub fn eigenvalue_at(space: &SymbolSpace, sys: &EigenSystem, p: u64) -> Result<i64> {
    if let Some(a) = sys.a(p) {
        return Ok(a);
    }
    let v = sys.basis.first().ok_or_else(|| Error::Symbols("empty eigenspace".into()))?;
    let full = space.embed(&SymbolVector { coords: v.clone() });
    let tv = if gcd_u(p, space.level) == 1 {
        let heil = heilbronn_i64(p);
        let mut acc = linalg::zero_vec(space.dim_full());
        for (k, &j) in full.iter().zip(&space.free) {
            if k.is_zero() {
                continue;
            }
            for h in &heil {
                let i = space.table.right_mul(j, h).expect("unimodular");
                linalg::add_scaled(&mut acc, k, &space.coord[i]);
            }
        }
        space.project(&acc).coords
    } else {
        linalg::mat_vec(&hecke_matrix_paths(space, p)?, v)
    };
    let k = v.iter().position(|x| !x.is_zero()).expect("nonzero");
    let l = &tv[k] / &v[k];
    if !tv.iter().zip(v).all(|(a, b)| *a == &l * b) || !l.is_integer() {
        return Err(Error::Symbols(format!("T_{p} is not a rational scalar on this system")));
    }
    Ok(l.to_integer().to_i64().expect("small"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn pt(p: i64, q: i64) -> ExtendedPoint {
        ExtendedPoint::frac(p, q)
    }

    #[test]
    fn dimensions() {
        assert_eq!(symbol_space(11).unwrap().dim_cuspidal(), 2);
        assert_eq!(symbol_space(11).unwrap().dim_full(), 3);
        assert_eq!(symbol_space(2).unwrap().dim_cuspidal(), 0);
        assert_eq!(symbol_space(37).unwrap().dim_cuspidal(), 4);
        assert_eq!(symbol_space(1).unwrap().dim_cuspidal(), 0);
    }

    #[test]
    fn level_11_hecke() {
        let s = symbol_space(11).unwrap();
        let two = rat(-2, 1);
        assert_eq!(hecke_matrix(&s, 2).unwrap(), linalg::scalar(2, &two));
        assert_eq!(hecke_matrix(&s, 3).unwrap(), linalg::scalar(2, &rat(-1, 1)));
        assert_eq!(hecke_matrix(&s, 1).unwrap(), linalg::identity(2));
        assert!(hecke_matrix(&s, 11).is_err());
        for m in [2, 3, 5, 7] {
            assert_eq!(hecke_matrix(&s, m).unwrap(), hecke_matrix_paths(&s, m).unwrap(), "m={m}");
        }
        assert_eq!(hecke_matrix_paths(&s, 11).unwrap(), linalg::identity(2));
    }

    #[test]
    fn paths() {
        let s = symbol_space(11).unwrap();
        let a = path_to_symbol(&s, &pt(0, 1), &pt(1, 2)).unwrap();
        let b = path_to_symbol(&s, &pt(1, 2), &pt(3, 7)).unwrap();
        let c = path_to_symbol(&s, &pt(0, 1), &pt(3, 7)).unwrap();
        assert_eq!(a.add(&b), c);
        assert!(path_to_symbol(&s, &pt(2, 5), &pt(2, 5)).unwrap().is_zero());
        assert!(!path_to_symbol(&s, &pt(0, 1), &ExtendedPoint::Infinity).unwrap().is_zero());
    }

    #[test]
    fn decomposition_11_and_37() {
        let s = symbol_space(11).unwrap();
        let sys = eigen_decompose(&s, 13).unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys[0].a(2), Some(-2));
        assert_eq!(sys[0].a(3), Some(-1));
        assert_eq!(sys[0].a(5), Some(1));
        assert_eq!(sys[0].a(11), Some(1));
        assert!(sys[0].is_newform());
        let s = symbol_space(37).unwrap();
        let sys = eigen_decompose(&s, 7).unwrap();
        assert_eq!(sys.len(), 2);
        let mut a2: Vec<i64> = sys.iter().map(|e| e.a(2).unwrap()).collect();
        a2.sort();
        assert_eq!(a2, vec![-2, 0]);
        assert!(eigen_decompose(&symbol_space(2).unwrap(), 7).unwrap().is_empty());
    }
}
