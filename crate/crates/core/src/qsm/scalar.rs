//! Exact Gaussian rationals and floating complex numbers behind one interface, so
//! observables can be evaluated exactly whenever no transcendental factor appears.

use std::fmt::Debug;

use num_complex::{Complex, Complex64};
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::Rat;

pub type Coef = Complex<Rat>;

pub fn coef(re: Rat) -> Coef {
    Complex::new(re, Rat::zero())
}

pub fn coef_i64(re: i64) -> Coef {
    coef(Rat::from_integer(re.into()))
}

pub fn coef_to_c64(c: &Coef) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

pub trait Scalar: Clone + Debug + PartialEq + Zero + One + Send + Sync {
    const EXACT: bool;
    fn from_coef(c: &Coef) -> Self;
    fn from_rat(r: &Rat) -> Self {
        Self::from_coef(&coef(r.clone()))
    }
    /// `None` in exact mode.
    fn from_c64(z: Complex64) -> Option<Self>;
    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;
}

impl Scalar for Coef {
    const EXACT: bool = true;
    fn from_coef(c: &Coef) -> Self {
        c.clone()
    }
    fn from_c64(_: Complex64) -> Option<Self> {
        None
    }
    fn to_c64(&self) -> Complex64 {
        coef_to_c64(self)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    fn from_coef(c: &Coef) -> Self {
        coef_to_c64(c)
    }
    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}
