use serde::{Deserialize, Serialize};

use super::subspace::{Subspace, SubspaceJson};
use super::GeometryError;
use crate::gf::FieldTable;

/// A flag type: strictly increasing vector dimensions in `1..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u8>", try_from = "Vec<u8>")]
pub struct FlagType(Vec<u8>);

impl FlagType {
    /// Validates against the ambient dimension `n`.
    pub fn new(n: usize, dims: &[u8]) -> Result<Self, GeometryError> {
        let bad = |why: &str| Err(GeometryError::InvalidFlagType(format!("{dims:?}: {why}")));
        if dims.is_empty() {
            return bad("empty");
        }
        if dims.windows(2).any(|w| w[0] >= w[1]) {
            return bad("not strictly increasing");
        }
        if dims.iter().any(|&d| d == 0 || d as usize >= n) {
            return bad(&format!("entries must lie in 1..{}", n.saturating_sub(1)));
        }
        Ok(FlagType(dims.to_vec()))
    }

    /// Parses `"2,3"` or `"{2,3}"`.
    pub fn parse(n: usize, s: &str) -> Result<Self, GeometryError> {
        let trimmed = s.trim().trim_start_matches('{').trim_end_matches('}');
        let dims = trimmed
            .split(',')
            .map(|t| t.trim().parse::<u8>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| GeometryError::InvalidFlagType(s.to_string()))?;
        Self::new(n, &dims)
    }

    pub fn dims(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Type of the dual flag: `{n - i}` in increasing order.
    pub fn dual(&self, n: usize) -> FlagType {
        FlagType(self.0.iter().rev().map(|&d| n as u8 - d).collect())
    }
}

impl From<FlagType> for Vec<u8> {
    fn from(t: FlagType) -> Self {
        t.0
    }
}

impl TryFrom<Vec<u8>> for FlagType {
    type Error = String;

    fn try_from(v: Vec<u8>) -> Result<Self, String> {
        if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) || v.contains(&0) {
            return Err(format!("invalid flag type {v:?}"));
        }
        Ok(FlagType(v))
    }
}

impl std::fmt::Display for FlagType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A chain of nested nontrivial subspaces, smallest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    ty: FlagType,
    spaces: Vec<Subspace>,
}

impl Flag {
    /// Checks nontriviality and the chain condition. `spaces` may come in any order.
    pub fn new(f: &FieldTable, mut spaces: Vec<Subspace>) -> Result<Self, GeometryError> {
        spaces.sort_by_key(|s| s.dim());
        let Some(first) = spaces.first() else {
            return Err(GeometryError::InvalidFlag("no subspaces".into()));
        };
        let n = first.ambient();
        if let Some(s) = spaces.iter().find(|s| s.ambient() != n) {
            return Err(GeometryError::AmbientMismatch {
                left: n,
                right: s.ambient(),
            });
        }
        let dims: Vec<u8> = spaces.iter().map(|s| s.dim() as u8).collect();
        let ty = FlagType::new(n, &dims).map_err(|_| GeometryError::InvalidFlag(format!("dimensions {dims:?}")))?;
        for w in spaces.windows(2) {
            if !w[0].is_subspace_of(f, &w[1]) {
                return Err(GeometryError::InvalidFlag("subspaces are not nested".into()));
            }
        }
        Ok(Flag { ty, spaces })
    }

    /// For callers that already guarantee the invariants (enumeration).
    pub(crate) fn from_parts_unchecked(ty: FlagType, spaces: Vec<Subspace>) -> Self {
        Flag { ty, spaces }
    }

    pub fn flag_type(&self) -> &FlagType {
        &self.ty
    }

    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }

    pub fn ambient(&self) -> usize {
        self.spaces[0].ambient()
    }

    /// Dual flag: annihilators in reverse order.
    pub fn dual(&self, f: &FieldTable) -> Flag {
        let n = self.ambient();
        Flag {
            ty: self.ty.dual(n),
            spaces: self.spaces.iter().rev().map(|s| s.dual(f)).collect(),
        }
    }

    /// Whether `self ∪ {extra}` is again a flag.
    pub fn nests_with(&self, f: &FieldTable, extra: &Subspace) -> bool {
        self.spaces
            .iter()
            .all(|s| extra.is_subspace_of(f, s) || s.is_subspace_of(f, extra))
    }

    pub fn apply(&self, f: &FieldTable, a: &[u8]) -> Flag {
        Flag {
            ty: self.ty.clone(),
            spaces: self.spaces.iter().map(|s| s.apply(f, a)).collect(),
        }
    }

    pub fn to_json(&self, q: usize) -> FlagJson {
        FlagJson {
            ty: self.ty.0.clone(),
            spaces: self.spaces.iter().map(|s| s.to_json(q)).collect(),
        }
    }
}

/// Flags `F`, `G` are in general position when every `a ∈ F`, `b ∈ G`
/// meet trivially or span the whole space.
pub fn general_position(f: &FieldTable, a: &Flag, b: &Flag) -> Result<bool, GeometryError> {
    if a.ambient() != b.ambient() {
        return Err(GeometryError::AmbientMismatch {
            left: a.ambient(),
            right: b.ambient(),
        });
    }
    for x in a.spaces() {
        for y in b.spaces() {
            if !super::subspace::subspaces_in_general_position(f, x, y)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `{"type":[2,3],"spaces":[subspace,...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagJson {
    #[serde(rename = "type")]
    pub ty: Vec<u8>,
    pub spaces: Vec<SubspaceJson>,
}

impl FlagJson {
    pub fn to_flag(&self, f: &FieldTable) -> Result<Flag, GeometryError> {
        let spaces = self
            .spaces
            .iter()
            .map(|s| s.to_subspace(f))
            .collect::<Result<Vec<_>, _>>()?;
        let flag = Flag::new(f, spaces)?;
        if flag.ty.0 != self.ty {
            return Err(GeometryError::InvalidFlag(format!(
                "declared type {:?} but spaces have type {}",
                self.ty, flag.ty
            )));
        }
        Ok(flag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> FieldTable {
        FieldTable::new(q).unwrap()
    }

    fn sp(f: &FieldTable, rows: &[&[u8]]) -> Subspace {
        Subspace::span(f, 5, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn flag_type_validation() {
        assert!(FlagType::new(5, &[2, 3]).is_ok());
        assert!(FlagType::new(5, &[]).is_err());
        assert!(FlagType::new(5, &[3, 2]).is_err());
        assert!(FlagType::new(5, &[2, 2]).is_err());
        assert!(FlagType::new(5, &[0, 2]).is_err());
        assert!(FlagType::new(5, &[2, 5]).is_err());
        assert_eq!(FlagType::parse(5, "{2,4}").unwrap().dims(), &[2, 4]);
        assert_eq!(FlagType::new(5, &[1, 3]).unwrap().dual(5).dims(), &[2, 4]);
    }

    #[test]
    fn flag_rejects_trivial_and_unnested() {
        let f = gf(2);
        assert!(Flag::new(&f, vec![Subspace::zero(5)]).is_err());
        assert!(Flag::new(&f, vec![Subspace::full(5)]).is_err());
        let a = sp(&f, &[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0]]);
        let b = sp(&f, &[&[0, 0, 1, 0, 0], &[0, 0, 0, 1, 0], &[0, 0, 0, 0, 1]]);
        assert!(matches!(
            Flag::new(&f, vec![a.clone(), b]),
            Err(GeometryError::InvalidFlag(_))
        ));
        let c = sp(&f, &[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0], &[0, 0, 0, 0, 1]]);
        let flag = Flag::new(&f, vec![c, a]).unwrap();
        assert_eq!(flag.flag_type().dims(), &[2, 3]);
    }

    #[test]
    fn flag_is_never_in_general_position_with_itself() {
        let f = gf(3);
        let h = sp(&f, &[&[1, 2, 0, 0, 0], &[0, 0, 1, 0, 0]]);
        let p = sp(&f, &[&[1, 2, 0, 0, 0], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 1]]);
        let fl = Flag::new(&f, vec![h, p]).unwrap();
        assert!(!general_position(&f, &fl, &fl).unwrap());
    }

    #[test]
    fn opposite_line_plane_flags_meet_in_a_point() {
        let f = gf(3);
        // h = <e1,e2> ⊂ π = <e1,e2,e3>;  h' = <e4,e5> ⊂ π' = <e3,e4,e5>
        let h = sp(&f, &[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0]]);
        let pi = sp(&f, &[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0], &[0, 0, 1, 0, 0]]);
        let h2 = sp(&f, &[&[0, 0, 0, 1, 0], &[0, 0, 0, 0, 1]]);
        let pi2 = sp(&f, &[&[0, 0, 1, 0, 0], &[0, 0, 0, 1, 0], &[0, 0, 0, 0, 1]]);
        assert_eq!(h.intersect(&f, &pi2).unwrap().dim(), 0);
        assert_eq!(h2.intersect(&f, &pi).unwrap().dim(), 0);
        let a = Flag::new(&f, vec![h, pi.clone()]).unwrap();
        let b = Flag::new(&f, vec![h2, pi2.clone()]).unwrap();
        assert!(general_position(&f, &a, &b).unwrap());
        assert_eq!(pi.intersect(&f, &pi2).unwrap().dim(), 1);
    }

    #[test]
    fn dual_flag() {
        let f = gf(2);
        let h = sp(&f, &[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0]]);
        let s = sp(
            &f,
            &[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 1]],
        );
        let fl = Flag::new(&f, vec![h, s]).unwrap();
        let d = fl.dual(&f);
        assert_eq!(d.flag_type().dims(), &[1, 3]);
        assert!(Flag::new(&f, d.spaces().to_vec()).is_ok());
        assert_eq!(d.dual(&f), fl);
    }

    #[test]
    fn flag_json_round_trip() {
        let f = gf(3);
        let h = sp(&f, &[&[1, 0, 2, 0, 0], &[0, 1, 0, 0, 0]]);
        let p = sp(&f, &[&[1, 0, 2, 0, 0], &[0, 1, 0, 0, 0], &[0, 0, 0, 1, 0]]);
        let fl = Flag::new(&f, vec![h, p]).unwrap();
        let js = serde_json::to_string(&fl.to_json(3)).unwrap();
        assert!(js.starts_with(r#"{"type":[2,3],"spaces":[{"n":5,"q":3,"rref":"#));
        let back: FlagJson = serde_json::from_str(&js).unwrap();
        assert_eq!(back.to_flag(&f).unwrap(), fl);
    }
}
