//! Named EKR families and colorings of `qK_{5;{2,3}}` and `qK_{5;{2,4}}`,
//! together with their verifiers.
//!
//! In projective terms a `{2,3}`-flag is a line-plane pair `(h, π)` and a
//! `{2,4}`-flag a line-solid pair. Families are stored as sorted vertex ids of a
//! [`FlagSpace`]; the construction parameters are kept as catalog indices so a
//! family can be rebuilt from its JSON record.

mod colorings;
mod constants;
mod ekr;
mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{FlagSpace, GeometryError};
use crate::kneser::{GraphId, KneserError};

pub use colorings::{
    coloring_23_line, coloring_23_mixed, coloring_23_plane, covering_24, default_plane_setup, line_scheme,
    plane_scheme, NuScheme, PlaneSetup, SchemeCheck,
};
pub use constants::{e0_23, e0_24, e1_23, e1_24, line_plane_identity, special_part_size, IdentityCheck};
pub use ekr::{all_example_families, ekr_by_ids, ekr_p_line, ekr_p_solid, ekr_s_plane, ekr_s_point, EkrKind};
pub use verify::{
    contained_in_point_pencil, match_example_family, verify_coloring, verify_family, ColoringReport, FamilyReport,
};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] KneserError),
    #[error("incidence violated: {0}")]
    IncidenceViolation(String),
    #[error("construction needs flags of type {expected} in dimension 5, got {found}")]
    WrongFlagType { expected: String, found: String },
    #[error("construction unsatisfiable: {0}")]
    ConstructionUnsatisfiable(String),
    #[error("document does not match this graph: {0}")]
    GraphMismatch(String),
}

/// A named set of flags with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagFamily {
    pub name: String,
    /// Role name to catalog index (`"point"`, `"line"`, `"plane"`, `"solid"`, ...).
    pub params: BTreeMap<String, u64>,
    /// Sorted vertex ids.
    pub members: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic_part: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_part: Option<Vec<u32>>,
}

impl FlagFamily {
    pub fn new(name: impl Into<String>, params: BTreeMap<String, u64>, members: Vec<u32>) -> Self {
        let mut members = members;
        members.sort_unstable();
        members.dedup();
        FlagFamily {
            name: name.into(),
            params,
            members,
            generic_part: None,
            special_part: None,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Members written out as flags, for consumers without the vertex order.
    pub fn inline_flags(&self, fs: &FlagSpace) -> Vec<crate::geometry::FlagJson> {
        let q = fs.geometry().q();
        self.members.iter().map(|&v| fs.flag(v).to_json(q)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMode {
    /// Classes may overlap; every vertex lies in at least one.
    Cover,
    Partition,
}

/// Independent classes whose union should be the whole vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub graph: GraphId,
    pub mode: CoverMode,
    pub classes: Vec<FlagFamily>,
    /// Proper coloring derived by [`Coloring::refine`]: class index per vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<u32>>,
}

impl Coloring {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Assigns each vertex to the first class containing it. `None` if some
    /// vertex of the `num_vertices` is uncovered.
    pub fn refine(&self, num_vertices: usize) -> Option<Vec<u32>> {
        let mut colors = vec![u32::MAX; num_vertices];
        for (c, class) in self.classes.iter().enumerate() {
            for &v in &class.members {
                let slot = colors.get_mut(v as usize)?;
                if *slot == u32::MAX {
                    *slot = c as u32;
                }
            }
        }
        if colors.contains(&u32::MAX) {
            return None;
        }
        Some(colors)
    }

    /// Attaches the refined proper coloring.
    pub fn with_colors(mut self, num_vertices: usize) -> Self {
        self.colors = self.refine(num_vertices);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coloring serializes")
    }
}

pub(crate) fn require_type(fs: &FlagSpace, dims: &[u8]) -> Result<(), FamilyError> {
    if fs.geometry().n() != 5 || fs.flag_type().dims() != dims {
        return Err(FamilyError::WrongFlagType {
            expected: format!("{dims:?}"),
            found: format!("{} (n = {})", fs.flag_type(), fs.geometry().n()),
        });
    }
    Ok(())
}

/// Rotates a canonical list by `seed`: the deterministic numbering used by
/// the colorings.
pub(crate) fn numbered<T: Clone>(mut items: Vec<T>, seed: u64) -> Vec<T> {
    if !items.is_empty() {
        let k = (seed % items.len() as u64) as usize;
        items.rotate_left(k);
    }
    items
}

pub(crate) fn params<const N: usize>(pairs: [(&str, u64); N]) -> BTreeMap<String, u64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
