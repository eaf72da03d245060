//! Exact solver and verifier for families of integer sets avoiding rainbow
//! solutions to the equation `x1 + x2 + ... + xm = x(m+1)`.
//!
//! A family is `k` subsets of `[1, n]`; a rainbow solution draws each of the
//! `m + 1` variables from a distinct set. The crate evaluates the closed-form
//! optima for the maximum total size and product of sizes over rainbow-free
//! families, constructs and classifies all extremal families, detects rainbow
//! solutions with bit-vector sumsets, compresses arbitrary families into
//! nested ones, and recomputes the optima by exhaustive search to confirm the
//! closed forms at small scale.

pub mod bounds;
pub mod cli;
pub mod compress;
mod error;
pub mod family;
pub mod rainbow;
pub mod search;
pub mod set;

pub use error::Error;
pub use family::{CanonicalKey, Family, FamilyDoc, FamilyStats, Problem};
pub use rainbow::{find_rainbow, naive_find_rainbow, verify_witness, Witness};
pub use set::{ApDifference, IntSet};
