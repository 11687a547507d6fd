//! Dense exact linear algebra over ℚ. Matrices are row-major `Vec<Vec<Rat>>`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Rat;

pub type QMat = Vec<Vec<Rat>>;
pub type QVec = Vec<Rat>;

pub fn zeros(r: usize, c: usize) -> QMat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn identity(n: usize) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn zero_vec(n: usize) -> QVec {
    vec![Rat::zero(); n]
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_scaled(acc: &mut [Rat], k: &Rat, v: &[Rat]) {
    if k.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += k * b;
        }
    }
}

pub fn add_int(acc: &mut [Rat], k: i64, v: &[Rat]) {
    add_scaled(acc, &Rat::from_integer(BigInt::from(k)), v)
}

pub fn transpose(m: &QMat) -> QMat {
    if m.is_empty() {
        return vec![];
    }
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = zero_vec(cols);
            for k in 0..inner {
                add_scaled(&mut out, &row[k], &b[k]);
            }
            out
        })
        .collect()
}

pub fn mat_vec(a: &QMat, v: &[Rat]) -> QVec {
    a.iter()
        .map(|row| row.iter().zip(v).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn mat_sub(a: &QMat, b: &QMat) -> QMat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

pub fn scalar(n: usize, k: &Rat) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = k.clone();
    }
    m
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &QMat) -> (QMat, Vec<usize>) {
    let mut rows: QMat = m.iter().filter(|r| !is_zero_vec(r)).cloned().collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = -row[c].clone();
                add_scaled(row, &f, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(m: &QMat) -> usize {
    rref(m).1.len()
}

/// Basis of `{v : m·v = 0}`.
pub fn kernel(m: &QMat, ncols: usize) -> Vec<QVec> {
    let (r, piv) = rref(m);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zero_vec(ncols);
            v[f] = Rat::one();
            for (row, &p) in r.iter().zip(&piv) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Basis of the span of the given vectors (a maximal independent subset).
pub fn independent_subset(vs: &[QVec]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: QMat = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        let mut trial = rows.clone();
        trial.push(v.clone());
        if rank(&trial) > rows.len() {
            rows.push(v.clone());
            chosen.push(i);
        }
    }
    chosen
}

/// Columns span as a list of basis vectors.
pub fn column_space(m: &QMat) -> Vec<QVec> {
    let cols = transpose(m);
    let (r, _) = rref(&cols);
    r
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    if n == 0 {
        return Some(vec![]);
    }
    let aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let (r, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `a·x = b` for a full-column-rank `a`; `None` if inconsistent.
pub fn solve(a: &QMat, b: &[Rat]) -> Option<QVec> {
    let ncols = a.first().map_or(0, |r| r.len());
    let aug: QMat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, piv) = rref(&aug);
    if piv.contains(&ncols) {
        return None;
    }
    let mut x = zero_vec(ncols);
    for (row, &p) in r.iter().zip(&piv) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Characteristic polynomial `det(tI − a)`, coefficients from constant term up
/// (Faddeev–LeVerrier).
pub fn charpoly(a: &QMat) -> Vec<Rat> {
    let n = a.len();
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = Rat::one();
    let mut m = zeros(n, n);
    for k in 1..=n {
        let mut am = mat_mul(a, &m);
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        m = am;
        let t = mat_mul(a, &m);
        let tr: Rat = (0..n).map(|i| t[i][i].clone()).sum();
        c[n - k] = -tr / Rat::from_integer(BigInt::from(k));
    }
    c
}

pub fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

pub fn poly_of_matrix(p: &[Rat], a: &QMat) -> QMat {
    let n = a.len();
    let mut acc = zeros(n, n);
    for c in p.iter().rev() {
        acc = mat_mul(&acc, a);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += c;
        }
    }
    acc
}

/// Integer roots of `p` with `|r| ≤ bound`, each with multiplicity.
pub fn integer_roots(p: &[Rat], bound: i64) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    for r in -bound..=bound {
        let x = Rat::from_integer(BigInt::from(r));
        let mut q = p.to_vec();
        let mut mult = 0;
        while q.len() > 1 && poly_eval(&q, &x).is_zero() {
            q = deflate(&q, &x);
            mult += 1;
        }
        if mult > 0 {
            out.push((r, mult));
        }
    }
    out
}

/// Synthetic division by `(t − x)`.
fn deflate(p: &[Rat], x: &Rat) -> Vec<Rat> {
    let n = p.len() - 1;
    let mut q = vec![Rat::zero(); n];
    let mut carry = Rat::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + carry * x;
        q[i] = carry.clone();
    }
    q
}

pub fn to_f64_vec(v: &[Rat]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

pub fn max_abs(v: &[Rat]) -> Rat {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn q(rows: &[&[i64]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()
    }

    #[test]
    fn kernel_and_rank() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&m), 1);
        let k = kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(is_zero_vec(&mat_vec(&m, &v)));
        }
    }

    #[test]
    fn inverse_and_solve() {
        let m = q(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(2));
        assert!(inverse(&q(&[&[1, 2], &[2, 4]])).is_none());
        let x = solve(&m, &[rat(3, 1), rat(2, 1)]).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn charpoly_roots() {
        // (t−3)(t+2)²
        let m = q(&[&[3, 0, 0], &[0, -2, 1], &[0, 0, -2]]);
        let p = charpoly(&m);
        assert_eq!(integer_roots(&p, 10), vec![(-2, 2), (3, 1)]);
        assert!(poly_of_matrix(&p, &m).iter().all(|r| is_zero_vec(r)));
    }
}
