//! Finite colored spaces: complete graphs with a color on every edge.
//!
//! The crate computes isometric sequences `(a_1, …, a_n)` (the number of
//! isometry classes of `k`-point subspaces), closed color sets, color fusions and
//! the three partition patterns of spaces with `a_2 = a_3`, and checks the related
//! inequalities exhaustively on small spaces through isomorph-free enumeration.

pub mod enumerate;
pub mod examples;
pub mod format;
pub mod fusion;
pub mod isometry;
pub mod space;
pub mod structure;
pub mod verify;

pub use format::{parse_auto, parse_space, serialize_space, Format, ParseError};
pub use isometry::{
    a3_set, a_k, isometric, isometric_sequence, isometry_key, isomorphic, isomorphism_key,
    IsometricSequence, IsometryKey, IsomorphismKey, TriangleType, TriangleTypeSet,
};
pub use space::{Color, ColorGraph, ColorSet, ColoredSpace, SpaceError, SubspaceView, MAX_POINTS};
