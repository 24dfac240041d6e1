//! Knot groups under Dehn filling.
//!
//! Words and presentations ([`word`], [`presentation`], [`textio`]), coset
//! enumeration ([`coset`]), integer homology ([`homology`]), the built-in
//! knot [`atlas`], slopes and filled quotients ([`dehn`]), SL(2,C)
//! representations ([`sl2`]) and certified survival scans
//! ([`persistence`]).

pub mod atlas;
pub mod coset;
pub mod dehn;
pub mod error;
pub mod homology;
pub mod persistence;
pub mod presentation;
pub mod sl2;
pub mod textio;
pub mod tietze;
pub mod word;

pub use error::{Error, Result};
pub use presentation::{GeneratorMap, Peripheral, Presentation};
pub use word::Word;

/// Exact integer matrices.
pub type IntMatrix = homology::Matrix<num_bigint::BigInt>;
/// Double-precision SL(2, C) matrices.
pub type Mat2 = sl2::Mat2<f64>;
/// Double-precision representation of a presentation.
pub type RepAssignment = sl2::RepAssignment<f64>;
