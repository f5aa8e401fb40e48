//! Finite fuzzy presheaves over small finite categories, their limits,
//! exponentials, classifier and rewriting, with brute-force oracles.

// object and element ids index several parallel tables at once
#![allow(clippy::needless_range_loop)]

pub mod adhesive;
pub mod category;
pub mod classifier;
pub mod error;
pub mod exponential;
pub mod fixtures;
pub mod homs;
pub mod io;
pub mod lattice;
pub mod limits;
pub mod presheaf;
pub mod random;
pub mod rewrite;
pub mod slice;
pub mod suites;
pub mod topology;
