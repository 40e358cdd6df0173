//! Landau's constants and their logarithmic approximations.
//!
//! The crate computes the constants
//! `G_n = sum_{k=0..n} C(2k,k)^2 / 16^k` exactly, provides the Boubaker
//! polynomial toolkit used by the Boubaker polynomial expansion scheme
//! (BPES), fits the three-parameter form
//! `G_n ~ ln(n+A)/pi + (gamma + ln 16)/pi - B/(n+C)`, and audits the
//! published comparison table for these approximations.
//!
//! Modules, bottom-up:
//!
//! - [`exact_landau`]: exact rational `G_n` and decimal rendering.
//! - [`boubaker`]: integer polynomial family, exact integrals, minimal roots.
//! - [`approximations`]: Falaleev, Brutman-style and fitted closed forms.
//! - [`bpes_fit`]: BPES coefficient protocol and direct Gauss-Newton fit.
//! - [`analysis`]: error tables, table audit, convergence order, emitters.
//! - [`cli`]: the command-line front end behind the `landau` binary.

pub mod analysis;
pub mod approximations;
pub mod boubaker;
pub mod bpes_fit;
pub mod cli;
pub mod error;
pub mod exact_landau;

pub use error::{Error, Result};
pub use exact_landau::ExactRational;
