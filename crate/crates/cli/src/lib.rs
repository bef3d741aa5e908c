//! `mixkt`: command-line access to the norms, rectangle suprema, splits and
//! `K_t` oracles of the `mixkt` library.
//!
//! Exit codes: 0 success, 1 a verification or reproduction check failed, 2 usage
//! or input error, 3 refused by a size guard (rerun with `--guard-override`).

mod args;
pub mod commands;
pub mod error;
pub mod instance;
pub mod report;
pub mod verify;

pub use args::*;
