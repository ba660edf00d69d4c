use serde::{Deserialize, Serialize};

use super::{params, require_type, FamilyError, FlagFamily};
use crate::geometry::{FlagSpace, Subspace};

/// The four maximum EKR families of line-plane flags.
///
/// With `(h, π)` a line-plane flag:
/// - `F(P,l)`: `P ∈ h` or `l ⊂ π`
/// - `F(P,S)`: `P ∈ h` or `P ∈ π ⊂ S`
/// - `F(S,τ)`: `π ⊂ S` or `h ⊂ τ`
/// - `F(S,P)`: `π ⊂ S` or `P ∈ h ⊂ S`
///
/// The first two are based on a point (generic part: the point-pencil of `P`),
/// the last two on a solid (generic part: all flags with `π ⊂ S`). The pairs
/// 1/3 and 2/4 are exchanged by duality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EkrKind {
    PointLine,
    PointSolid,
    SolidPlane,
    SolidPoint,
}

impl EkrKind {
    pub const ALL: [EkrKind; 4] = [
        EkrKind::PointLine,
        EkrKind::PointSolid,
        EkrKind::SolidPlane,
        EkrKind::SolidPoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EkrKind::PointLine => "F(P,l)",
            EkrKind::PointSolid => "F(P,S)",
            EkrKind::SolidPlane => "F(S,tau)",
            EkrKind::SolidPoint => "F(S,P)",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| {
            k.name() == s
                || matches!(
                    (k, s),
                    (EkrKind::PointLine, "point-line")
                        | (EkrKind::PointSolid, "point-solid")
                        | (EkrKind::SolidPlane, "solid-plane")
                        | (EkrKind::SolidPoint, "solid-point")
                )
        })
    }

    /// Vector dimensions of the two parameters, in argument order.
    pub fn param_dims(self) -> (usize, usize) {
        match self {
            EkrKind::PointLine => (1, 2),
            EkrKind::PointSolid => (1, 4),
            EkrKind::SolidPlane => (4, 3),
            EkrKind::SolidPoint => (4, 1),
        }
    }

    fn param_names(self) -> (&'static str, &'static str) {
        match self {
            EkrKind::PointLine => ("point", "line"),
            EkrKind::PointSolid => ("point", "solid"),
            EkrKind::SolidPlane => ("solid", "plane"),
            EkrKind::SolidPoint => ("solid", "point"),
        }
    }

    pub fn point_based(self) -> bool {
        matches!(self, EkrKind::PointLine | EkrKind::PointSolid)
    }

    /// The kind of the dual family.
    pub fn dual(self) -> Self {
        match self {
            EkrKind::PointLine => EkrKind::SolidPlane,
            EkrKind::PointSolid => EkrKind::SolidPoint,
            EkrKind::SolidPlane => EkrKind::PointLine,
            EkrKind::SolidPoint => EkrKind::PointSolid,
        }
    }
}

/// Builds one of the four families from catalog indices `a`, `b` (see
/// [`EkrKind::param_dims`] for their dimensions).
pub fn ekr_by_ids(fs: &FlagSpace, kind: EkrKind, a: u32, b: u32) -> Result<FlagFamily, FamilyError> {
    require_type(fs, &[2, 3])?;
    let geo = fs.geometry();
    let (da, db) = kind.param_dims();
    let ca = geo.catalog(da)?;
    let cb = geo.catalog(db)?;
    if a as usize >= ca.len() || b as usize >= cb.len() {
        return Err(FamilyError::IncidenceViolation(format!(
            "parameter index out of range for {}",
            kind.name()
        )));
    }
    let (small, big) = if da < db {
        ((da, a), (db, b))
    } else {
        ((db, b), (da, a))
    };
    if !geo.is_contained(small, big) {
        return Err(FamilyError::IncidenceViolation(format!(
            "{}: parameters do not form a flag",
            kind.name()
        )));
    }
    let mut generic = Vec::new();
    let mut special = Vec::new();
    for v in 0..fs.len() as u32 {
        let ids = fs.space_ids(v);
        let (h, pi) = ((2, ids[0]), (3, ids[1]));
        let (in_generic, in_special) = match kind {
            EkrKind::PointLine => (geo.is_contained((1, a), h), geo.is_contained((2, b), pi)),
            EkrKind::PointSolid => (
                geo.is_contained((1, a), h),
                geo.is_contained((1, a), pi) && geo.is_contained(pi, (4, b)),
            ),
            EkrKind::SolidPlane => (geo.is_contained(pi, (4, a)), geo.is_contained(h, (3, b))),
            EkrKind::SolidPoint => (
                geo.is_contained(pi, (4, a)),
                geo.is_contained((1, b), h) && geo.is_contained(h, (4, a)),
            ),
        };
        if in_generic {
            generic.push(v);
        } else if in_special {
            special.push(v);
        }
    }
    let (na, nb) = kind.param_names();
    let mut members: Vec<u32> = generic.iter().chain(&special).copied().collect();
    members.sort_unstable();
    let mut fam = FlagFamily::new(kind.name(), params([(na, a as u64), (nb, b as u64)]), members);
    fam.generic_part = Some(generic);
    fam.special_part = Some(special);
    Ok(fam)
}

fn by_subspaces(fs: &FlagSpace, kind: EkrKind, a: &Subspace, b: &Subspace) -> Result<FlagFamily, FamilyError> {
    let geo = fs.geometry();
    let (da, db) = kind.param_dims();
    if a.dim() != da || b.dim() != db {
        return Err(FamilyError::IncidenceViolation(format!(
            "{} needs subspaces of dimensions {da} and {db}",
            kind.name()
        )));
    }
    let (_, ia) = geo.id_of(a)?;
    let (_, ib) = geo.id_of(b)?;
    ekr_by_ids(fs, kind, ia, ib)
}

/// `F(P,l) = {(h,π) : P ∈ h or l ⊂ π}` for a point `P` on the line `l`.
pub fn ekr_p_line(fs: &FlagSpace, p: &Subspace, l: &Subspace) -> Result<FlagFamily, FamilyError> {
    by_subspaces(fs, EkrKind::PointLine, p, l)
}

/// `F(P,S) = {(h,π) : P ∈ h or P ∈ π ⊂ S}` for a point `P` in the solid `S`.
pub fn ekr_p_solid(fs: &FlagSpace, p: &Subspace, s: &Subspace) -> Result<FlagFamily, FamilyError> {
    by_subspaces(fs, EkrKind::PointSolid, p, s)
}

/// `F(S,τ) = {(h,π) : π ⊂ S or h ⊂ τ}` for a plane `τ` in the solid `S`.
pub fn ekr_s_plane(fs: &FlagSpace, s: &Subspace, tau: &Subspace) -> Result<FlagFamily, FamilyError> {
    by_subspaces(fs, EkrKind::SolidPlane, s, tau)
}

/// `F(S,P) = {(h,π) : π ⊂ S or P ∈ h ⊂ S}` for a point `P` in the solid `S`.
pub fn ekr_s_point(fs: &FlagSpace, s: &Subspace, p: &Subspace) -> Result<FlagFamily, FamilyError> {
    by_subspaces(fs, EkrKind::SolidPoint, s, p)
}

/// Every incident parameter pair of every kind, as catalog indices.
pub fn all_example_families(fs: &FlagSpace) -> Result<Vec<(EkrKind, u32, u32)>, FamilyError> {
    require_type(fs, &[2, 3])?;
    let geo = fs.geometry();
    let mut out = Vec::new();
    for kind in EkrKind::ALL {
        let (da, db) = kind.param_dims();
        let ca = geo.catalog(da)?;
        for a in 0..ca.len() as u32 {
            let sub = ca.get(a);
            let partners = if db > da {
                geo.supersets(sub, db)?
            } else {
                geo.subsets(sub, db)?
            };
            out.extend(partners.into_iter().map(|b| (kind, a, b)));
        }
    }
    Ok(out)
}
