//! Compact attribute representations of directed compatibility graphs.
//!
//! A kidney exchange compatibility graph can often be described by giving
//! every vertex a donor bit vector and a patient bit vector: donor `i` can
//! give to patient `j` when the two vectors share at most `t` set bits. This
//! crate builds and verifies such representations, decides whether a graph
//! admits one of a given width (through a CNF encoding and a built-in CDCL
//! solver), clears graphs by packing cycles over vertex *types* rather than
//! individual vertices, and ships brute-force oracles plus instance
//! generators used to validate all of the above.
//!
//! The crate is `no_std` (with `alloc`). File formats, wall-clock budgets and
//! the command line live in the companion `typed-exchange` crate.

#![allow(clippy::needless_range_loop)]
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod bits;
pub mod clearing;
pub mod error;
pub mod forge;
pub mod graph;
pub mod oracle;
pub mod represent;
pub mod sat;
pub mod types;

pub use bits::BitVector;
pub use error::{Error, Result};
pub use graph::{
    build_graph_from_attributes, threshold_feasible, verify_representation,
    AttributeRepresentation, CompatibilityGraph, ConstrainedPairs, Mismatch, VerificationReport,
};
pub use types::{extract_type_space, TypeSource, TypeSpace};
