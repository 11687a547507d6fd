//! Truncated Hilbert-space representation: basis `δ_H ⊗ ε_w` with `H` a Hermite
//! lattice of bounded determinant and `w` a digit word of bounded length/weight.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::lattice::{lattices_up_to, LatticeCoset, QMat2};
use super::observable::{Observable, Point};
use super::scalar::Scalar;
use crate::arith::{moebius_act, ExtendedPoint};
use crate::cf::word_matrix;
use crate::coset::P1Elt;
use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Debug)]
pub struct WordSpace {
    pub max_len: usize,
    pub max_weight: u64,
    pub min_digit: u64,
    words: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
}

impl WordSpace {
    /// Words with `len ≤ max_len`, `∏kᵢ ≤ max_weight`, digits `≥ min_digit`.
    pub fn new(max_len: usize, max_weight: u64, min_digit: u64) -> Result<Self> {
        if max_weight == 0 || min_digit == 0 {
            return Err(Error::Qsm("word bounds must be positive".into()));
        }
        let mut words = vec![vec![]];
        let mut frontier: Vec<(Vec<u64>, u64)> = vec![(vec![], 1)];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (w, wt) in &frontier {
                for k in min_digit..=max_weight / wt {
                    let mut v = w.clone();
                    v.push(k);
                    next.push((v, wt * k));
                }
            }
            if next.is_empty() {
                break;
            }
            words.extend(next.iter().map(|(w, _)| w.clone()));
            frontier = next;
        }
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(WordSpace { max_len, max_weight, min_digit, words, index })
    }

    /// Digits `≥ 2`, weight `≤ max_weight`, no length cap beyond the one forced.
    pub fn spectral(max_weight: u64) -> Result<Self> {
        let len = 64 - max_weight.max(1).leading_zeros() as usize;
        Self::new(len, max_weight, 2)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Vec<u64>] {
        &self.words
    }

    pub fn index(&self, w: &[u64]) -> Option<usize> {
        self.index.get(w).copied()
    }
}

pub fn weight(w: &[u64]) -> u64 {
    w.iter().product()
}

#[derive(Clone, Debug)]
pub struct Basis {
    pub max_det: u64,
    pub lattices: Vec<LatticeCoset>,
    lat_index: HashMap<LatticeCoset, usize>,
    pub words: WordSpace,
}

impl Basis {
    pub fn new(max_det: u64, words: WordSpace) -> Result<Self> {
        if max_det == 0 {
            return Err(Error::Qsm("max determinant must be positive".into()));
        }
        let lattices = lattices_up_to(max_det);
        let lat_index = lattices.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        Ok(Basis { max_det, lattices, lat_index, words })
    }

    pub fn dim(&self) -> usize {
        self.lattices.len() * self.words.len()
    }

    pub fn idx(&self, lat: usize, word: usize) -> usize {
        lat * self.words.len() + word
    }

    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.words.len(), i % self.words.len())
    }

    pub fn lattice_index(&self, l: &LatticeCoset) -> Option<usize> {
        self.lat_index.get(l).copied()
    }

    /// `log(det H · weight(w))` on each basis vector.
    pub fn energies(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for l in &self.lattices {
            for w in self.words.words() {
                out.push(((l.det() * weight(w)) as f64).ln());
            }
        }
        out
    }
}

/// Row-major sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BTreeMap<usize, S>>,
}

impl<S: Scalar> SparseMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].insert(i, S::one());
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i].get(&j).cloned().unwrap_or_else(S::zero)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn mul(&self, o: &SparseMat<S>) -> Result<SparseMat<S>> {
        if self.cols != o.rows {
            return Err(Error::Qsm(format!("shape mismatch {}x{} · {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let data = par::map(&self.data, |row| {
            let mut acc: BTreeMap<usize, S> = BTreeMap::new();
            for (k, a) in row {
                for (j, b) in &o.data[*k] {
                    let e = acc.entry(*j).or_insert_with(S::zero);
                    *e = e.clone() + a.clone() * b.clone();
                }
            }
            acc.retain(|_, v| !v.is_zero());
            acc
        });
        Ok(SparseMat { rows: self.rows, cols: o.cols, data })
    }

    pub fn adjoint(&self) -> SparseMat<S> {
        let mut out = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                out.data[*j].insert(i, v.conj());
            }
        }
        out
    }

    pub fn add(&self, o: &SparseMat<S>) -> SparseMat<S> {
        let mut out = self.clone();
        for (i, row) in o.data.iter().enumerate() {
            for (j, v) in row {
                let cur = out.get(i, *j);
                out.set(i, *j, cur + v.clone());
            }
        }
        out
    }

    /// `max |self_ij − o_ij|` over the union of supports.
    pub fn max_diff(&self, o: &SparseMat<S>) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows.max(o.rows) {
            let empty = BTreeMap::new();
            let a = self.data.get(i).unwrap_or(&empty);
            let b = o.data.get(i).unwrap_or(&empty);
            for j in a.keys().chain(b.keys()) {
                let d = a.get(j).map_or(Complex64::zero(), S::to_c64) - b.get(j).map_or(Complex64::zero(), S::to_c64);
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn to_c64(&self) -> SparseMat<Complex64> {
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| r.iter().map(|(j, v)| (*j, v.to_c64())).collect()).collect(),
        }
    }
}

/// `π_{ρ,x,s}(f)` on the truncation. Entry `((G,w),(H,w))` is
/// `f(G·H⁻¹, H, g_w·(x, H·ρ⁻¹·s))`; only `G = L·H` for tags `L` of `f` can be nonzero.
pub fn represent<S: Scalar>(f: &Observable, rho: &QMat2, x: &ExtendedPoint, s: &P1Elt, basis: &Basis) -> Result<SparseMat<S>> {
    if !rho.is_integral() || rho.det().is_zero() {
        return Err(Error::Qsm(format!("ρ = {rho} must be integral and nonsingular")));
    }
    if s.n != f.level() {
        return Err(Error::Qsm("slot level differs from the observable's".into()));
    }
    let max_det = crate::arith::Rat::from_integer(basis.max_det.into());
    if let Some(t) = f.tags().iter().find(|t| t.det().abs() > max_det) {
        return Err(Error::Qsm(format!("truncation D = {} cannot hold the support tag {t}", basis.max_det)));
    }
    let rho_inv = rho.inverse().expect("nonsingular");
    let nw = basis.words.len();
    let xs: Vec<ExtendedPoint> = basis
        .words
        .words()
        .iter()
        .map(|w| moebius_act(&word_matrix(w), x))
        .collect::<Result<_>>()?;
    let gws: Vec<QMat2> = basis.words.words().iter().map(|w| QMat2::from_mat(&word_matrix(w))).collect();
    let tags: Vec<QMat2> = f.tags().iter().cloned().collect();
    let cols = par::try_map(&basis.lattices, |lat| -> Result<Vec<(usize, usize, S)>> {
        let hmat = lat.matrix();
        let h = hmat.mul(&rho_inv);
        let hi = basis.lattice_index(lat).expect("own lattice");
        let mut out = Vec::new();
        for l in &tags {
            let gmat = l.mul(&hmat);
            let Some(glat) = LatticeCoset::from_matrix(&gmat) else { continue };
            let Some(gi) = basis.lattice_index(&glat) else { continue };
            for wi in 0..nw {
                let p = Point { g: l.clone(), m: hmat.clone(), x: xs[wi].clone(), u: gws[wi].mul(&h), s: *s };
                let v: S = f.eval(&p)?;
                if !v.is_zero() {
                    out.push((basis.idx(gi, wi), basis.idx(hi, wi), v));
                }
            }
        }
        Ok(out)
    })?;
    let mut m = SparseMat::zeros(basis.dim(), basis.dim());
    for (i, j, v) in cols.into_iter().flatten() {
        let cur = m.get(i, j);
        m.set(i, j, cur + v);
    }
    Ok(m)
}

/// `S_k: δ_H ⊗ ε_w ↦ δ_H ⊗ ε_{kw}` from `from` into `to`.
pub fn s_operator<S: Scalar>(k: u64, from: &Basis, to: &Basis) -> Result<SparseMat<S>> {
    if from.max_det != to.max_det {
        return Err(Error::Qsm("S_k needs matching lattice truncations".into()));
    }
    let mut m = SparseMat::zeros(to.dim(), from.dim());
    for (wi, w) in from.words.words().iter().enumerate() {
        let mut kw = vec![k];
        kw.extend_from_slice(w);
        let wj = to
            .words
            .index(&kw)
            .ok_or_else(|| Error::Qsm(format!("target word space misses {kw:?}")))?;
        for li in 0..from.lattices.len() {
            m.set(to.idx(li, wj), from.idx(li, wi), S::one());
        }
    }
    Ok(m)
}

/// `e^{itH}·A·e^{−itH}`.
pub fn conjugate_by_time(a: &SparseMat<Complex64>, t: f64, basis: &Basis) -> SparseMat<Complex64> {
    let e = basis.energies();
    let mut out = a.clone();
    for (i, row) in out.data.iter_mut().enumerate() {
        for (j, v) in row.iter_mut() {
            *v *= Complex64::from_polar(1.0, t * (e[i] - e[*j]));
        }
    }
    out
}

/// Restriction to the given row/column index set.
pub fn restrict<S: Scalar>(a: &SparseMat<S>, keep: &[usize]) -> SparseMat<S> {
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut out = SparseMat::zeros(keep.len(), keep.len());
    for (p, &i) in keep.iter().enumerate() {
        for (j, v) in &a.data[i] {
            if let Some(&q) = pos.get(j) {
                out.set(p, q, v.clone());
            }
        }
    }
    out
}

/// Basis indices whose word is `k·w` with `k ≤ kmax` and `w` in `inner`.
pub fn shifted_indices(outer: &Basis, inner: &WordSpace, kmax: u64) -> Vec<usize> {
    let mut keep = Vec::new();
    for li in 0..outer.lattices.len() {
        for (wi, w) in outer.words.words().iter().enumerate() {
            if let Some((&k, rest)) = w.split_first() {
                if k <= kmax && inner.index(rest).is_some() {
                    keep.push(outer.idx(li, wi));
                }
            }
        }
    }
    keep
}

pub fn max_abs(a: &SparseMat<Complex64>) -> f64 {
    a.data.iter().flat_map(|r| r.values()).map(|v| v.norm()).fold(0.0, f64::max)
}
