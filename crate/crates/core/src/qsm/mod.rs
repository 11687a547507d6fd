//! A desk-scale model of the boundary algebra: observables with convolution and
//! involution, truncated representations, time evolution, partition function and
//! Gibbs/ground states, plus end-to-end checks against limiting modular symbols.

pub mod checks;
pub mod counting;
pub mod lattice;
pub mod repr;
pub mod observable;
pub mod scalar;
pub mod states;

pub use lattice::{act_slot, lattices_of_det, lattices_up_to, LatticeCoset, QMat2};
pub use observable::{digit, in_cylinder, BoundaryProfile, Observable, Point, RhoPattern, SSupport, Term, XProfile};
pub use scalar::{coef, coef_i64, Coef, Scalar};
