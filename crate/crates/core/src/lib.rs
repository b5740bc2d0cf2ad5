//! Numerical and symbolic analysis of weighted composition operators
//! `C_{w,φ} f = w · (f ∘ φ)` on smooth functions and distributions over an
//! open interval of the real line.
//!
//! The crate is layered bottom-up:
//!
//! * [`expr`]: parse, print, evaluate and differentiate closed-form functions.
//! * [`combinatorics`]: partial Bell polynomials, Faà di Bruno, exact oracles.
//! * [`jets`]: truncated Taylor arithmetic for derivatives of iterates.
//! * [`dynamics`]: orbits, fixed points, stable-orbit detection, inversion.
//! * [`ergodic`]: operator powers, Cesàro means, condition traces, the
//!   distributional dual action and the diagnosis procedure.
//! * [`cli`]: configuration, JSON/CSV report emission and subcommands.

pub mod cli;
pub mod combinatorics;
pub mod dynamics;
pub mod ergodic;
mod error;
pub mod expr;
pub mod jets;
pub mod quadrature;

pub use error::{Error, Result};
