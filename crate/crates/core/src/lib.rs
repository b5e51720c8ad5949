//! Exact rational computations on Sullivan models.
//!
//! The crate is `no_std` (it needs `alloc`). It covers free graded-commutative
//! algebras with Koszul signs, commutative differential graded algebras and
//! their morphisms, φ-derivation complexes and their homology, evaluation and
//! Gottlieb subgroups, KS-extensions over spheres, and the linear lifting
//! problems that decide the relaxed evaluation, tncz and sectional subgroups
//! of a map.
//!
//! Every number is an exact rational; there is no floating point anywhere.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod prelude;

pub mod error;
pub mod linalg;
pub mod algebra;
pub mod cdga;
pub mod derivations;
pub mod affine;
pub mod fibrations;
pub mod lift;
pub mod reports;

pub use error::{Error, Result};
pub use linalg::{Matrix, Subspace, Q};
pub use algebra::{Ambient, FreeCga, Generator, Monomial, Polynomial, Truncation};
pub use cdga::{Cdga, Cohomology, Morphism};
pub use fibrations::KsExtension;
pub use derivations::{gottlieb_group, DerHomology, Derivation, DerivationComplex, Subgroup};
