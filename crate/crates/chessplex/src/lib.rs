//! Symmetric multiple chessboard complexes and their applications.
//!
//! The crate builds multiple chessboard complexes and their symmetrizations,
//! constructs and verifies shelling orders on them, computes reduced simplicial
//! homology over prime fields and the rationals as connectivity evidence,
//! decides membership in symmetrized deleted joins through bipartite matchings,
//! and searches for dimension-constrained Tverberg partitions of rational point
//! configurations with an exact arithmetic LP core.

pub mod complex;
pub mod field;
pub mod homology;
pub mod lp;
pub mod matching;
pub mod poset;
pub mod shelling;
pub mod tverberg;

pub use complex::{
    Cell, ComplexSpec, FVector, LabeledPartition, RookPlacement, SimplicialComplex,
};
pub use shelling::{FacetOrder, ShellingCertificate};
