//! Toolkit for the critical branching symmetric alpha-stable (CBSS) process.
//!
//! A CBSS process starts from a single particle at the origin. Each particle
//! waits an exponential(1) time and then either splits in two or dies, each
//! with probability 1/2; while alive it moves along an independent symmetric
//! alpha-stable path. Criticality forces almost-sure extinction, so the
//! rightmost point `M` ever visited by any particle is well defined, and its
//! tail obeys
//!
//! ```text
//! P{ M >= x }  ~  sqrt(2/alpha) * x^(-alpha/2)    as x -> infinity.
//! ```
//!
//! The crate reproduces that law by three mutually independent routes and
//! ships a verification battery for the supporting structure:
//!
//! * [`sim`] — direct particle Monte Carlo over the branching skeleton
//!   ([`branching`]) with stable edge motions ([`levy_path`]);
//! * [`bvp`] — discretization of the fractional Laplacian singular integral
//!   and a damped-Newton solve of the nonlinear boundary value problem
//!   `(-Delta)^(alpha/2) u + u^2/2 = 0` on `x > 0`, `u = 1` on `x <= 0`;
//! * [`fk`] — Monte Carlo evaluation of the Feynman-Kac representation
//!   `u(x) = E^x[exp(-1/2 * int_0^tau u(X_s) ds)]` stopped at the first
//!   passage below zero.
//!
//! Distributional primitives (sampling, tails, Levy-measure masses) live in
//! [`stable`]; [`verify`] aggregates the whole check battery behind the
//! `cbss verify` command. Start with the crate examples:
//!
//! ```bash
//! cargo run --release -p cbss --example tail_monte_carlo
//! cargo run --release -p cbss --example solve_bvp
//! cargo run --release -p cbss --example feynman_kac
//! ```

pub mod branching;
pub mod bvp;
pub mod cli;
pub mod error;
pub mod fk;
pub mod levy_path;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod stable;
pub mod stats;
pub mod verify;

pub use error::Error;
pub use stable::StableParams;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Tail constant of the main asymptotic law: `sqrt(2/alpha)`.
pub fn tail_constant(alpha: f64) -> f64 {
    (2.0 / alpha).sqrt()
}

/// The asymptotic tail itself: `sqrt(2/alpha) * x^(-alpha/2)`.
pub fn tail_theory(alpha: f64, x: f64) -> f64 {
    tail_constant(alpha) * x.powf(-alpha / 2.0)
}
