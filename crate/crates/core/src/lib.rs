//! Dilute second-gradient homogenization of two-phase Cauchy-elastic composites.
//!
//! A dilute suspension of inclusions (volume fraction `f`) in an isotropic
//! matrix is replaced by an equivalent Mindlin second-gradient solid. Its
//! local stiffness is `C_eq = C1 + f * C~` and its sixth-order nonlocal
//! stiffness is built from the discrepancy tensor `C~` and the normalized
//! inertia tensor `B` of the region enclosed by the outer contour of the RVE:
//!
//! ```text
//! A_ijhlmn = -(f/4) (C~_ihln B_jm + C~_ihmn B_jl + C~_jhln B_im + C~_jhmn B_il)
//! ```
//!
//! The crate is organised as
//!
//! * [`tensor`]: dense second/fourth/sixth-order tensors, rotations,
//!   symmetrization, condensed matrices, probe-based symmetry classes;
//! * [`geometry`]: static moments, Euler tensors and normalized inertia of
//!   the shape catalog, the microstructure description, a Monte-Carlo oracle;
//! * [`discrepancy`]: the first-order discrepancy tensors of the supported
//!   inclusion models;
//! * [`homogenization`]: assembly of the nonlocal tensor, orthotropic
//!   parameter extraction, closed-form cases, parameter sweeps;
//! * [`selfcheck`]: the built-in verification suite.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod linalg;
mod math;

pub mod discrepancy;
pub mod geometry;
pub mod homogenization;
pub mod selfcheck;
pub mod tensor;

pub use error::{Error, Result, Warning, WarningCode};
pub use tensor::{Dim, ElasticTensor, GradElasticTensor, Lame, OrthogonalTransform, SymMatrix};
