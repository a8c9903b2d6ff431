//! Steady-state entanglement of a driven cavity-magnon system with self- and
//! cross-Kerr nonlinearities.
//!
//! The pipeline is mean field ([`steady_state`]) → linearized drift and
//! diffusion ([`dynamics`]) → Lyapunov covariance → Gaussian entanglement
//! measures ([`gaussian`]). [`sweep`] runs it over parameter grids.

pub mod bogoliubov;
pub mod checks;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod model;
pub mod steady_state;
pub mod sweep;

pub use error::{Error, Result};
