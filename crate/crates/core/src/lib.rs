//! Incomplete Mittag-Leffler and incomplete Wright evaluators, and the
//! closed-form series solutions of the generalized free-electron-laser
//! (FEL) fractional integro-differential equation
//!
//! ```text
//! D^a h(μ) = ω ∫_0^μ t^{b-1} E^{[c;x]}_{ρ,b}(iζ t^ρ) h(μ - t) dt + δ g(μ)
//! ```
//!
//! with Riemann–Liouville or Caputo initial data.
//!
//! * [`special`]: log-gamma, incomplete gamma, Pochhammer symbols.
//! * [`series`]: incomplete Pochhammer / Mittag-Leffler / Wright series.
//! * [`solver`]: the series solution, resolvent kernel and Laplace image.
//! * [`oracle`]: independent numerics (fractional-derivative schemes,
//!   Volterra residuals, numerical Laplace transform, Talbot inversion,
//!   and a reference integrator for the classical FEL equation).

pub mod error;
pub mod oracle;
pub mod series;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use series::{SeriesValue, TruncationControl};
