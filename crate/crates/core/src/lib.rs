//! Universal graphs, digraphs and bipartite graphs built by iterated witness
//! operators, the gadget constructions used to embed semigroup data into their
//! endomorphism monoids, and exhaustive tools for Green's relations on finite
//! endomorphism monoids.
//!
//! Maps act on the right throughout: composing `f` with `g` means "apply `f`,
//! then `g`".

pub mod error;
pub mod finite_graph;

pub use error::{ForgeError, Result};
pub use finite_graph::*;
pub mod constructions;
pub mod universal;
pub mod endomorphism;
pub mod green;
