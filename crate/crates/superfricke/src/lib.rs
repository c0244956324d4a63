//! Exact Grassmann algebra, OSp(1|2) supermatrices, simultaneous
//! triangulation normal forms and an empirical invariant census.

pub mod charvar;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod grassmann;
pub mod invariants;
pub mod normalform;
pub mod osp;
pub mod sample;
pub mod scalar;
pub mod superlinalg;
pub mod verify;

pub use error::{Error, Result};
