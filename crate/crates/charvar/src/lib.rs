//! Character varieties of twisted Hopf link groups.
//!
//! The group with n twists is `<a, b | [a^n, b] = 1>`; its representations
//! into U(r), SU(r) (r <= 3) and SL(2,C) are pairs of matrices `(A, B)` with
//! `[A^n, B] = Id`. This crate classifies such pairs, enumerates the
//! admissible eigenvalue configurations exactly, reduces representations to
//! canonical forms, realizes the strong deformation retraction from the
//! SL(2,C)-character variety onto the SU(2) one, and certifies the homotopy
//! type of the SU(2)-character variety (a wedge of n 2-spheres) by integral
//! cellular homology.
//!
//! Modules:
//! - [`cxla`]: small complex linear algebra (1x1..3x3), eigendecomposition,
//!   Haar sampling.
//! - [`reps`]: the representation data model, relation check,
//!   irreducibility, semisimple decomposition, Schur scalar.
//! - [`strata`]: eigenvalue stratification, exact enumeration and counting,
//!   canonical forms, coarse-orthant coordinates.
//! - [`symprod`]: symmetric products of the circle and torus, logarithm-cut
//!   ordering, the pillowcase quotient.
//! - [`retract`]: the three-stage deformation retraction flow and the
//!   reducible-locus retraction.
//! - [`homology`]: CW models, Smith normal form, Betti numbers and torsion.
//! - [`sample`]: seeded random representations per stratum.

pub mod cxla;
pub mod error;
pub mod homology;
pub mod reps;
pub mod retract;
pub mod sample;
pub mod strata;
pub mod symprod;

pub use error::{Error, Result};
