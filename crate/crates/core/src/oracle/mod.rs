//! Numerical checks that share no code with the series solver:
//! fractional-derivative schemes, Volterra residuals, a numerical Laplace
//! transform with Talbot inversion, and a direct integrator for the
//! classical FEL equation.

mod classical;
mod fractional;
mod grid;
mod laplace;
mod quadrature;
mod residual;

pub use classical::{classical_fel_reference, classical_fel_trapezoid};
pub use fractional::{caputo_fractional_derivative, rl_fractional_derivative, MIN_NODE};
pub use grid::{GridFunction, MIN_INTERVALS};
pub use laplace::{numerical_laplace, talbot_invert, LaplaceEstimate};
pub use residual::{
    residual_caputo, residual_rl, volterra_rhs, ResidualReport, CHECK_STRIDE, FIRST_CHECK_NODE,
};
