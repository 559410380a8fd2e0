//! Exact arithmetic for Fourier-Jacobi expansions of paramodular forms.
//!
//! The crate is organized around a single series type, [`series::FJSeries`]:
//! a truncated formal series in `q` (fractional exponents with a fixed
//! denominator) whose coefficients are Laurent polynomials in `zeta`
//! (half-integer exponents), over arbitrary-precision rationals.  On top of
//! it sit
//!
//! - [`blocks`]: eta powers, theta factors, theta blocks and theta quarks,
//!   with the exact piecewise-quadratic vanishing-order criterion,
//! - [`hecke`]: the level-raising operators `V_m` and the Gritsenko lift,
//! - [`borcherds`]: the weight-zero quotient `psi = (-1)^v (phi|V_2)/phi`,
//!   its singular data, Humbert divisors and the Borcherds Fourier-Jacobi
//!   expansion `theta block * exp(-Grit(psi))`,
//! - [`valuation`]: support hulls with recession ray and the Minkowski-sum
//!   valuation property,
//! - [`verify`]: golden-value verification suites.
//!
//! All comparisons everywhere are exact; no floating point enters any
//! computation.

pub mod arith;
pub mod blocks;
pub mod borcherds;
pub mod error;
pub mod hecke;
pub mod series;
pub mod valuation;
pub mod verify;

pub use error::{Error, Result};
pub use series::{AtomFactor, FJSeries, Rat, ZetaPoly};
