//! Spectral functions, grid-exact transport dynamics and continuous-monitoring
//! decay rates for dissipative momentum operators on metric graphs.
//!
//! The crate is organised by capability:
//!
//! * [`herglotz`]: Cayley/Möbius maps between Livšic, Weyl–Titchmarsh and
//!   characteristic functions, Herglotz integrals, rank-one characteristic
//!   functions.
//! * [`graph`]: closed forms for the differentiation triples on the four
//!   metric-graph cases, spectral measures, transmission coefficients.
//! * [`dynamics`]: exact index-shift evolution on directed metric graphs.
//! * [`monitoring`]: survival amplitudes, monitored limits, decay rates,
//!   Zeno classification.
//! * [`halfline`]: spectral transforms for `-d²/dx²` on the half-line and the
//!   heavy-tail constants of the resulting distributions.
//! * [`coupling`]: products, rescaling and limit theorems for characteristic
//!   functions.
//! * [`stable`]: stable characteristic functions and tail bookkeeping.
//! * [`cli`]: config-driven experiment runner behind the `zenograph` binary.

pub mod cli;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod halfline;
pub mod herglotz;
pub mod monitoring;
pub mod quad;
pub mod stable;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for the imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);
