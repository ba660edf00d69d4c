//! Flag Kneser graphs `qK_{n;Ω}` over GF(q).
//!
//! Vertices are the flags of type `Ω` of GF(q)^n; two flags are adjacent when
//! they are in general position. The crate enumerates these graphs exactly,
//! builds the known maximum Erdős–Ko–Rado families and colorings of
//! `qK_{5;{2,3}}` and `qK_{5;{2,4}}`, verifies them, and runs budgeted searches
//! for independence and chromatic bounds.

pub mod bits;
pub mod families;
pub mod geometry;
pub mod gf;
pub mod kneser;
pub mod search;

pub use geometry::{Flag, FlagSpace, FlagType, ProjectiveSpace, Subspace};
pub use gf::FieldTable;
pub use kneser::KneserGraph;
