//! Entropy-driven game dynamics, quantal response equilibria and payoff-based
//! learning in finite games.

pub mod dynamics;
pub mod entropy;
pub mod equilibria;
pub mod error;
pub mod games;
pub mod harness;
pub mod learning;
pub mod profile;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/overview.md")]
mod book_overview {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/entropies.md")]
mod book_entropies {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/dynamics.md")]
mod book_dynamics {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/equilibria.md")]
mod book_equilibria {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/learning.md")]
mod book_learning {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
