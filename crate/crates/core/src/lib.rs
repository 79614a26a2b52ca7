//! Bell-inequality and magic-state witnesses for noisy single-qubit operations.
//!
//! A single-qubit channel is applied to one half of a maximally entangled pair and
//! summarized by its 4×4 table of two-qubit Pauli expectation values. That table is
//! tested against two exactly enumerated polytopes: the local-hidden-variable
//! polytope (64 deterministic local configurations, 684 facets) and the Clifford
//! polytope (24 Clifford gates, 120 facets). Violating a CHSH facet of the first
//! implies violating a paired β facet of the second, which in turn yields ancillas
//! outside the stabilizer octahedron.
//!
//! Module map:
//! - [`qcore`]: Pauli and single-qubit Clifford algebra, expectation tables.
//! - [`channels`]: Kraus/Choi representations and the noisy phase-gate families.
//! - [`geometry`]: exact rational affine hulls, double description, LP membership.
//! - [`polytopes`]: the LHV and Clifford polytopes and their facet classes.
//! - [`witness`]: violation scans, facet pairing, UQC verdicts and threshold scans.
//! - [`distill`]: the postselected parity-measurement ancilla circuit.
//! - [`lhvsim`]: shared-randomness models for stabilizer correlations.

pub mod channels;
pub mod distill;
pub mod error;
pub mod geometry;
pub mod lhvsim;
pub mod polytopes;
pub mod qcore;
pub mod witness;

pub use error::{Error, Result};
