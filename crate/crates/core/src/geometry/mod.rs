//! Subspaces of GF(q)^n in canonical RREF form, flags, duality, and
//! deterministic enumeration.
//!
//! Projective vocabulary is used throughout: points, lines, planes and solids
//! are the subspaces of vector dimension 1, 2, 3 and 4.

mod counting;
mod enumerate;
mod flag;
mod subspace;

use thiserror::Error;

use crate::gf::GfError;

pub use counting::{checked_gaussian, flag_count, gaussian, theta};
pub use enumerate::{
    enumerate_flags, enumerate_subspaces, point_pencil, Catalog, FlagSpace, ProjectiveSpace, SpaceId, DEFAULT_LIMIT,
};
pub use flag::{general_position, Flag, FlagJson, FlagType};
pub use subspace::{subspaces_in_general_position, Subspace, SubspaceJson};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("row has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspaces live in different ambient spaces ({left} vs {right})")]
    AmbientMismatch { left: usize, right: usize },
    #[error("field element {0} out of range")]
    BadElement(u8),
    #[error("document is over GF({found}) but GF({expected}) was expected")]
    FieldMismatch { expected: usize, found: usize },
    #[error("enumeration would produce {count} objects, limit is {limit}")]
    EnumerationLimitExceeded { count: u128, limit: usize },
    #[error("invalid flag type {0}")]
    InvalidFlagType(String),
    #[error("invalid flag: {0}")]
    InvalidFlag(String),
    #[error("ambient dimension {0} unsupported (2..=7)")]
    UnsupportedDimension(usize),
}
