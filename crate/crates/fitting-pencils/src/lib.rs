//! Pencils of quadrics on `R^{2n}` and the numerical audits built on them.
//!
//! Every predicate is three-state ([`Status`]) and carries the margin it was
//! decided with. Randomized searches take an explicit seed.

pub mod cli;
pub mod error;
pub mod flows;
pub mod hyperbolic;
pub mod io;
pub mod linalg;
pub mod models;
pub mod nesting;
pub mod pencils;
pub mod quadrics;
pub mod render;
pub mod reps;
pub mod status;
pub mod symplectic;

pub use error::{Error, Result};
pub use status::Status;
