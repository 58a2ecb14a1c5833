//! Axisymmetric scalar waves on the extremal Kerr exterior.
//!
//! The crate is organized around one pipeline:
//!
//! * [`geometry`] — closed-form background quantities in Boyer-Lindquist
//!   coordinates (Δ, |q|², the trapping cubic, tortoise maps). Extremality
//!   a = M is hard-wired throughout.
//! * [`multipliers`] — the radial multiplier functions z, u, w, v, w_T and
//!   the divergence coefficients 𝒜, 𝒱 of the associated energy current,
//!   together with every derived constant (C₁, C₂, c₀, c₁, quartic roots,
//!   δ_T, …).
//! * [`certifier`] — dense-grid numerical certificates for the pointwise
//!   inequalities behind the Morawetz estimate, plus a finite-difference
//!   check of the current divergence identity against manufactured fields.
//! * [`solver`] — method-of-lines evolution of the axisymmetric wave
//!   equation in (t, r*, θ).
//! * [`diagnostics`] — degenerate energy, boundary fluxes, Morawetz bulk
//!   integral, and derived constants measured from evolutions.
//!
//! All floating point work is f64; irrational constants are computed from
//! `f64::sqrt` and friends at full precision, never truncated literals.

pub mod certifier;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod multipliers;
pub mod solver;

pub use error::Error;
pub use geometry::{Params, Point};
pub use multipliers::{CoefficientSample, MultiplierSet};
