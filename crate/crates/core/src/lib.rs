//! Sail-free linear triple systems.
//!
//! A linear triple system is a 3-uniform hypergraph in which two edges share
//! at most one vertex. A sail (3-fan) is three edges through a common apex
//! plus a fourth edge meeting each of them away from the apex. This crate
//! builds the known extremal sail-free families, detects sails, computes the
//! maximum number of edges of a sail-free system on small vertex counts by
//! exhaustive search, and classifies extremal systems up to isomorphism.
//!
//! | module | contents |
//! |---|---|
//! | [`system`] | validated systems, shadow, vertex statistics, deficiency, neighborhood partition |
//! | [`sail`] | brute-force and neighborhood sail detectors, incremental [`sail::SailGuard`] |
//! | [`constructions`] | the four `3k+1` constructions, transversal and truncated designs |
//! | [`search`] | branch-and-bound maximum and enumeration of extremal classes |
//! | [`canon`] | canonical forms and isomorphism |
//! | [`cli`] | text/JSON formats, verification reports, the value table, the command dispatcher |

pub mod canon;
pub mod cli;
pub mod constructions;
pub mod sail;
pub mod search;
pub mod system;

pub use canon::{canonical_form, is_isomorphic, CanonicalForm};
pub use constructions::{transversal_design, truncated_design, ConstructionSpec, Variant};
pub use sail::{find_sail_bruteforce, find_sail_fast, SailGuard, SailWitness};
pub use search::{enumerate_extremal, max_sail_free, upper_bound, SearchOptions, SearchReport};
pub use system::{make_system, LinearTripleSystem, Triple, Vertex, VertexSet};
