//! Exact GIT stability calculus for decorated sheaves.
//!
//! Modules build on each other bottom-up: [`ratcore`] supplies exact
//! arithmetic, [`rep`] the weights of `κ_{a,b,c}` and weighted flags,
//! [`kempf`] torus-level instability, [`fans`] the dominant-chamber fan and
//! test set, and [`decor`] the δ-stability calculus with walls and chambers.
//! [`cli`] is the batch JSON front end.

pub mod cli;
pub mod decor;
pub mod error;
pub mod fans;
pub mod kempf;
pub mod linalg;
pub mod lp;
pub mod minnorm;
pub mod ratcore;
pub mod rep;

pub use error::{Error, Result};
pub use ratcore::{lex_compare, Rational, RatPolynomial};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
