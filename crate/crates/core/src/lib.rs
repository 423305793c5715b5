//! Kuramoto oscillator families on the classical bounded symmetric domains of types I, II
//! and III.
//!
//! Oscillators are matrices on the Bergman-Shilov boundary of a domain (complex Stiefel
//! manifolds, unitary antisymmetric or unitary symmetric matrices). They are coupled through
//! the mean field, which enters as the off-diagonal block of a Lie-algebra element of the
//! domain's symmetry group, so each oscillator follows a matrix Riccati flow. The same
//! motion is generated by a single flow on the group acting by Möbius transformations on the
//! initial ensemble.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
// Modules import `num_traits::Float` for the math methods. Whenever std is linked into the
// build (tests, or a std dependent) the inherent methods win, hence the `allow`s on those imports.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cxmat;
pub mod domains;
pub mod dynamics;
pub mod error;
pub mod flows;
pub mod groups;
pub mod observables;
pub mod sampling;

pub use cxmat::{c64, CMat, DEFAULT_TOL};
pub use domains::{BoundaryClass, DomainKind, DomainSpec};
pub use error::{Error, Result};
pub use groups::{GeneratorSpec, GroupElement, GroupKind, GroupSpec};
pub use num_complex::Complex64;
