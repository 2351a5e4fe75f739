//! Exact computation with finitely generated subgroups and regular
//! subsets of free groups: subgroup graphs, Schreier transversals,
//! boolean set algebra, counting measures and asymptotic
//! classification.

pub mod automaton;
pub mod chain;
pub mod classify;
pub mod consistent;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod measures;
pub mod poly;
pub mod sample;
pub mod transversal;
pub mod words;

pub use automaton::{ReducedAutomaton, TypedAutomaton};
pub use error::{Error, Result};
pub use graph::{Edge, FrontierDescriptor, SpanningTree, StallingsGraph, BASEPOINT};
pub use words::{enumerate_sphere, sphere_size, Alphabet, Letter, Word};
