use std::collections::{BTreeMap, BTreeSet};

use super::ekr::{ekr_by_ids, EkrKind};
use super::{numbered, params, require_type, Coloring, CoverMode, FamilyError, FlagFamily};
use crate::geometry::{FlagSpace, ProjectiveSpace, SpaceId};
use crate::kneser::GraphId;

fn join(geo: &ProjectiveSpace, a: SpaceId, b: SpaceId) -> Result<u32, FamilyError> {
    let s = geo.space(a)?.sum(geo.field(), geo.space(b)?)?;
    Ok(geo.id_of(&s)?.1)
}

fn points_of(geo: &ProjectiveSpace, id: SpaceId) -> Result<Vec<u32>, FamilyError> {
    Ok(geo.subsets(geo.space(id)?, 1)?)
}

fn lines_of(geo: &ProjectiveSpace, id: SpaceId) -> Result<Vec<u32>, FamilyError> {
    Ok(geo.subsets(geo.space(id)?, 2)?)
}

/// Lines of the plane `plane` through `point`, except `skip`.
fn pencil_lines_in_plane(geo: &ProjectiveSpace, plane: u32, point: u32, skip: &[u32]) -> Result<Vec<u32>, FamilyError> {
    Ok(lines_of(geo, (3, plane))?
        .into_iter()
        .filter(|&l| geo.is_contained((1, point), (2, l)) && !skip.contains(&l))
        .collect())
}

fn check_in(geo: &ProjectiveSpace, small: SpaceId, big: SpaceId, what: &str) -> Result<(), FamilyError> {
    if !geo.is_contained(small, big) {
        return Err(FamilyError::IncidenceViolation(what.to_string()));
    }
    Ok(())
}

fn check_index(geo: &ProjectiveSpace, id: SpaceId) -> Result<(), FamilyError> {
    if id.1 as usize >= geo.catalog(id.0)?.len() {
        return Err(FamilyError::IncidenceViolation(format!(
            "no subspace of dimension {} with index {}",
            id.0, id.1
        )));
    }
    Ok(())
}

/// Covering of `qK_{5;{2,4}}` by the point-pencils of the points of a solid.
pub fn covering_24(fs: &FlagSpace, solid: u32) -> Result<Coloring, FamilyError> {
    require_type(fs, &[2, 4])?;
    let geo = fs.geometry();
    check_index(geo, (4, solid))?;
    let classes = points_of(geo, (4, solid))?
        .into_iter()
        .map(|p| {
            FlagFamily::new(
                "F(P)",
                params([("point", p as u64), ("solid", solid as u64)]),
                fs.pencil(p),
            )
        })
        .collect();
    Ok(Coloring {
        graph: GraphId::of(fs),
        mode: CoverMode::Cover,
        classes,
        colors: None,
    })
}

/// A map `ν` from the points of a solid `S` outside a `q`-set `W` to lines of
/// `S` with `P ∈ ν(P)`. When every line of `S` meeting `W` is an image, the
/// families `F(P, ν(P))` cover all line-plane flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuScheme {
    pub name: String,
    pub params: BTreeMap<String, u64>,
    pub solid: u32,
    pub w: Vec<u32>,
    /// `(point, line)` pairs, sorted by point.
    pub nu: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeCheck {
    /// Domain is exactly the points of `S` not in `W`.
    pub domain_ok: bool,
    /// `P ∈ ν(P) ⊂ S` for every `P`.
    pub incidence_ok: bool,
    /// Lines of `S` meeting `W` that are not an image of `ν`.
    pub missing_lines: usize,
}

impl SchemeCheck {
    pub fn ok(&self) -> bool {
        self.domain_ok && self.incidence_ok && self.missing_lines == 0
    }
}

impl NuScheme {
    pub fn check(&self, geo: &ProjectiveSpace) -> Result<SchemeCheck, FamilyError> {
        let s = (4, self.solid);
        let w: BTreeSet<u32> = self.w.iter().copied().collect();
        let expected: Vec<u32> = points_of(geo, s)?.into_iter().filter(|p| !w.contains(p)).collect();
        let domain: Vec<u32> = self.nu.iter().map(|&(p, _)| p).collect();
        let incidence_ok = self
            .nu
            .iter()
            .all(|&(p, l)| geo.is_contained((1, p), (2, l)) && geo.is_contained((2, l), s));
        let image: BTreeSet<u32> = self.nu.iter().map(|&(_, l)| l).collect();
        let missing_lines = lines_of(geo, s)?
            .into_iter()
            .filter(|&l| w.iter().any(|&p| geo.is_contained((1, p), (2, l))))
            .filter(|l| !image.contains(l))
            .count();
        Ok(SchemeCheck {
            domain_ok: domain == expected && w.len() == geo.q(),
            incidence_ok,
            missing_lines,
        })
    }

    /// The families `F(P, ν(P))`.
    pub fn to_coloring(&self, fs: &FlagSpace) -> Result<Coloring, FamilyError> {
        let classes = self
            .nu
            .iter()
            .map(|&(p, l)| {
                let mut fam = ekr_by_ids(fs, EkrKind::PointLine, p, l)?;
                fam.name = "F(P,nu(P))".into();
                Ok(fam)
            })
            .collect::<Result<Vec<_>, FamilyError>>()?;
        Ok(Coloring {
            graph: GraphId::of(fs),
            mode: CoverMode::Cover,
            classes,
            colors: None,
        })
    }
}

/// `W` = the points of a line `l ⊂ S` other than `P0`.
///
/// `ν(P0) = l`, and for `P ∉ l`, with `π = ⟨P, l⟩`, `ν(P) = P P_i` where
/// `P ∈ l_i(π)` for the numbering `l_1(π), ..., l_q(π)` of the other lines of
/// `π` through `P0`. Numberings are canonical order rotated by `seed`.
pub fn line_scheme(geo: &ProjectiveSpace, solid: u32, line: u32, seed: u64) -> Result<NuScheme, FamilyError> {
    check_index(geo, (4, solid))?;
    check_index(geo, (2, line))?;
    check_in(geo, (2, line), (4, solid), "line is not contained in the solid")?;
    let on_line = numbered(points_of(geo, (2, line))?, seed);
    let p0 = on_line[0];
    let w = on_line[1..].to_vec();
    let mut nu = Vec::new();
    for p in points_of(geo, (4, solid))? {
        if p == p0 {
            nu.push((p, line));
            continue;
        }
        if geo.is_contained((1, p), (2, line)) {
            continue;
        }
        let plane = join(geo, (1, p), (2, line))?;
        let numbering = numbered(pencil_lines_in_plane(geo, plane, p0, &[line])?, seed);
        let i = numbering
            .iter()
            .position(|&l| geo.is_contained((1, p), (2, l)))
            .expect("P lies on a line of π through P0");
        nu.push((p, join(geo, (1, p), (1, w[i]))?));
    }
    nu.sort_unstable();
    Ok(NuScheme {
        name: "line".into(),
        params: params([("solid", solid as u64), ("line", line as u64), ("seed", seed)]),
        solid,
        w,
        nu,
    })
}

pub fn coloring_23_line(fs: &FlagSpace, solid: u32, line: u32, seed: u64) -> Result<Coloring, FamilyError> {
    require_type(fs, &[2, 3])?;
    line_scheme(fs.geometry(), solid, line, seed)?.to_coloring(fs)
}

/// Input of the plane-based scheme: `q - 1` points of `W` on a line `l0` of the
/// plane `π ⊂ S`, and one more point `P_q` with `π = ⟨P_q, l0⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneSetup {
    pub solid: u32,
    pub plane: u32,
    pub line0: u32,
    pub w: Vec<u32>,
}

/// A canonical admissible setup inside `solid`, varied by `seed`.
pub fn default_plane_setup(geo: &ProjectiveSpace, solid: u32, seed: u64) -> Result<PlaneSetup, FamilyError> {
    check_index(geo, (4, solid))?;
    let q = geo.q();
    let plane = numbered(geo.subsets(geo.space((4, solid))?, 3)?, seed)[0];
    let line0 = numbered(lines_of(geo, (3, plane))?, seed)[0];
    let on = numbered(points_of(geo, (2, line0))?, seed);
    let off = points_of(geo, (3, plane))?
        .into_iter()
        .find(|&p| !geo.is_contained((1, p), (2, line0)))
        .expect("a plane has points off each of its lines");
    let mut w = on[..q - 1].to_vec();
    w.push(off);
    Ok(PlaneSetup { solid, plane, line0, w })
}

/// `W` spans the plane `π`; the map is first defined on `π \ W` and then
/// extended to `S` through the planes on a line `g ⊂ π` that misses `W`.
pub fn plane_scheme(geo: &ProjectiveSpace, setup: &PlaneSetup, seed: u64) -> Result<NuScheme, FamilyError> {
    let q = geo.q();
    let PlaneSetup {
        solid,
        plane,
        line0,
        ref w,
    } = *setup;
    check_index(geo, (4, solid))?;
    check_index(geo, (3, plane))?;
    check_index(geo, (2, line0))?;
    check_in(geo, (3, plane), (4, solid), "plane is not contained in the solid")?;
    check_in(geo, (2, line0), (3, plane), "l0 is not contained in the plane")?;
    let distinct: BTreeSet<u32> = w.iter().copied().collect();
    if w.len() != q || distinct.len() != q {
        return Err(FamilyError::IncidenceViolation(format!(
            "W must consist of {q} distinct points"
        )));
    }
    for &p in w {
        check_index(geo, (1, p))?;
        check_in(geo, (1, p), (3, plane), "a point of W is not in the plane")?;
    }
    let (on, off): (Vec<u32>, Vec<u32>) = w.iter().partition(|&&p| geo.is_contained((1, p), (2, line0)));
    if on.len() != q - 1 || off.len() != 1 {
        return Err(FamilyError::IncidenceViolation(format!(
            "W needs {} points on l0 and one point off it",
            q - 1
        )));
    }
    let pq = off[0];
    // P_1..P_{q-1} on l0, then P_q
    let mut ws = numbered(on, seed);
    ws.push(pq);

    let rest = numbered(
        points_of(geo, (2, line0))?
            .into_iter()
            .filter(|p| !distinct.contains(p))
            .collect(),
        seed,
    );
    let (q0, q1) = (rest[0], rest[1]);
    let lq = join(geo, (1, q0), (1, pq))?;
    let mut lines = numbered(pencil_lines_in_plane(geo, plane, q0, &[line0, lq])?, seed);
    lines.push(lq);

    let mut nu = vec![(q0, line0), (q1, join(geo, (1, q1), (1, pq))?)];
    for (i, &li) in lines.iter().enumerate() {
        for p in points_of(geo, (2, li))? {
            if p == q0 || distinct.contains(&p) {
                continue;
            }
            let image = if i + 1 < q { join(geo, (1, p), (1, ws[i]))? } else { li };
            nu.push((p, image));
        }
    }

    let candidates: Vec<u32> = lines_of(geo, (3, plane))?
        .into_iter()
        .filter(|&g| !distinct.iter().any(|&p| geo.is_contained((1, p), (2, g))))
        .collect();
    let Some(&g) = numbered(candidates, seed).first() else {
        return Err(FamilyError::ConstructionUnsatisfiable(
            "every line of the plane meets W".into(),
        ));
    };
    let planes_on_g: Vec<u32> = geo
        .supersets(geo.space((2, g))?, 3)?
        .into_iter()
        .filter(|&t| t != plane && geo.is_contained((3, t), (4, solid)))
        .collect();
    let planes_on_g = numbered(planes_on_g, seed);
    debug_assert_eq!(planes_on_g.len(), q);
    for (i, &t) in planes_on_g.iter().enumerate() {
        for p in points_of(geo, (3, t))? {
            if geo.is_contained((1, p), (3, plane)) {
                continue;
            }
            nu.push((p, join(geo, (1, p), (1, ws[i]))?));
        }
    }
    nu.sort_unstable();
    Ok(NuScheme {
        name: "plane".into(),
        params: params([
            ("solid", solid as u64),
            ("plane", plane as u64),
            ("line0", line0 as u64),
            ("g", g as u64),
            ("seed", seed),
        ]),
        solid,
        w: ws,
        nu,
    })
}

pub fn coloring_23_plane(fs: &FlagSpace, setup: &PlaneSetup, seed: u64) -> Result<Coloring, FamilyError> {
    require_type(fs, &[2, 3])?;
    plane_scheme(fs.geometry(), setup, seed)?.to_coloring(fs)
}

/// Mixed scheme over the planes `Π` of `S` on the line `l`.
///
/// Bit `i` of `r_mask` selects the `i`-th plane of `Π` (canonical order) into
/// `R`. Planes in `R` contribute the line-based families `F(P, P P_i)`, the
/// others the solid-based families `F(P, S_i(π))`, for `P0 ≠ P ∈ l_i(π)`.
/// Together with `F(P0, l)` these are `θ3 - q` classes.
pub fn coloring_23_mixed(
    fs: &FlagSpace,
    solid: u32,
    line: u32,
    r_mask: u64,
    seed: u64,
) -> Result<Coloring, FamilyError> {
    require_type(fs, &[2, 3])?;
    let geo = fs.geometry();
    check_index(geo, (4, solid))?;
    check_index(geo, (2, line))?;
    check_in(geo, (2, line), (4, solid), "line is not contained in the solid")?;
    let on_line = numbered(points_of(geo, (2, line))?, seed);
    let p0 = on_line[0];
    let w = &on_line[1..];
    let big_pi: Vec<u32> = geo
        .supersets(geo.space((2, line))?, 3)?
        .into_iter()
        .filter(|&t| geo.is_contained((3, t), (4, solid)))
        .collect();
    if big_pi.len() < 64 && r_mask >> big_pi.len() != 0 {
        return Err(FamilyError::IncidenceViolation(format!(
            "R mask {r_mask:#b} selects planes beyond the {} planes on the line",
            big_pi.len()
        )));
    }

    let mut first = ekr_by_ids(fs, EkrKind::PointLine, p0, line)?;
    first.name = "F(P0,l)".into();
    let mut classes = vec![first];
    for (idx, &plane) in big_pi.iter().enumerate() {
        let in_r = r_mask >> idx & 1 == 1;
        let lines = numbered(pencil_lines_in_plane(geo, plane, p0, &[line])?, seed);
        let solids = numbered(
            geo.supersets(geo.space((3, plane))?, 4)?
                .into_iter()
                .filter(|&s| s != solid)
                .collect(),
            seed,
        );
        for (i, &li) in lines.iter().enumerate() {
            for p in points_of(geo, (2, li))? {
                if p == p0 {
                    continue;
                }
                let mut fam = if in_r {
                    let target = join(geo, (1, p), (1, w[i]))?;
                    let mut f = ekr_by_ids(fs, EkrKind::PointLine, p, target)?;
                    f.name = "F(P,PP_i)".into();
                    f
                } else {
                    let mut f = ekr_by_ids(fs, EkrKind::PointSolid, p, solids[i])?;
                    f.name = "F(P,S_i(pi))".into();
                    f
                };
                fam.params.insert("pi".into(), plane as u64);
                classes.push(fam);
            }
        }
    }
    Ok(Coloring {
        graph: GraphId::of(fs),
        mode: CoverMode::Cover,
        classes,
        colors: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{theta, FlagType};
    use std::sync::Arc;

    fn space(q: u32, dims: &[u8]) -> FlagSpace {
        let geo = Arc::new(ProjectiveSpace::new(q, 5).unwrap());
        FlagSpace::new(geo, FlagType::new(5, dims).unwrap()).unwrap()
    }

    fn covers(fs: &FlagSpace, c: &Coloring) -> bool {
        c.refine(fs.len()).is_some()
    }

    fn first_line_in(geo: &ProjectiveSpace, solid: u32) -> u32 {
        geo.subsets(geo.space((4, solid)).unwrap(), 2).unwrap()[0]
    }

    #[test]
    fn covering_24_q2() {
        let fs = space(2, &[2, 4]);
        let c = covering_24(&fs, 3).unwrap();
        assert_eq!(c.num_classes(), 15);
        assert!(c.classes.iter().all(|k| k.len() == 105));
        assert!(covers(&fs, &c));
    }

    #[test]
    fn line_scheme_is_admissible_and_covers() {
        let fs = space(2, &[2, 3]);
        let geo = fs.geometry().clone();
        for seed in 0..3 {
            let line = first_line_in(&geo, 9);
            let scheme = line_scheme(&geo, 9, line, seed).unwrap();
            assert!(scheme.check(&geo).unwrap().ok());
            assert_eq!(scheme.nu.len() as u128, theta(3, 2) - 2);
            let c = scheme.to_coloring(&fs).unwrap();
            assert_eq!(c.num_classes(), 13);
            assert!(covers(&fs, &c));
        }
    }

    #[test]
    fn plane_scheme_follows_the_recipe() {
        let fs = space(3, &[2, 3]);
        let geo = fs.geometry().clone();
        let setup = default_plane_setup(&geo, 0, 1).unwrap();
        let scheme = plane_scheme(&geo, &setup, 1).unwrap();
        assert!(scheme.check(&geo).unwrap().ok());
        assert_eq!(scheme.nu.len(), 37);
        // ν(Q0) = l0 and ν(Q1) = Q1 P_q
        let rest: Vec<u32> = numbered(
            geo.subsets(geo.space((2, setup.line0)).unwrap(), 1)
                .unwrap()
                .into_iter()
                .filter(|p| !setup.w.contains(p))
                .collect(),
            1,
        );
        let nu: BTreeMap<u32, u32> = scheme.nu.iter().copied().collect();
        assert_eq!(nu[&rest[0]], setup.line0);
        let pq = *scheme.w.last().unwrap();
        assert_eq!(nu[&rest[1]], join(&geo, (1, rest[1]), (1, pq)).unwrap());
    }

    #[test]
    fn plane_scheme_rejects_bad_w() {
        let geo = ProjectiveSpace::new(3, 5).unwrap();
        let mut setup = default_plane_setup(&geo, 0, 0).unwrap();
        // move the off-line point onto l0
        let on_l0: Vec<u32> = geo.subsets(geo.space((2, setup.line0)).unwrap(), 1).unwrap();
        let spare = *on_l0.iter().find(|p| !setup.w.contains(p)).unwrap();
        *setup.w.last_mut().unwrap() = spare;
        assert!(matches!(
            plane_scheme(&geo, &setup, 0),
            Err(FamilyError::IncidenceViolation(_))
        ));
    }

    #[test]
    fn mixed_with_all_planes_equals_line_scheme() {
        let fs = space(2, &[2, 3]);
        let geo = fs.geometry().clone();
        let line = first_line_in(&geo, 4);
        let a = coloring_23_mixed(&fs, 4, line, 0b111, 2).unwrap();
        let b = coloring_23_line(&fs, 4, line, 2).unwrap();
        let mut ma: Vec<_> = a.classes.iter().map(|c| c.members.clone()).collect();
        let mut mb: Vec<_> = b.classes.iter().map(|c| c.members.clone()).collect();
        ma.sort();
        mb.sort();
        assert_eq!(ma, mb);
    }

    #[test]
    fn mixed_rejects_oversized_mask() {
        let fs = space(2, &[2, 3]);
        let geo = fs.geometry().clone();
        let line = first_line_in(&geo, 4);
        assert!(coloring_23_mixed(&fs, 4, line, 0b1000, 0).is_err());
    }

    #[test]
    fn line_not_in_solid() {
        let geo = ProjectiveSpace::new(2, 5).unwrap();
        let solid = 0;
        let lines = geo.catalog(2).unwrap();
        let outside = (0..lines.len() as u32)
            .find(|&l| !geo.is_contained((2, l), (4, solid)))
            .unwrap();
        assert!(matches!(
            line_scheme(&geo, solid, outside, 0),
            Err(FamilyError::IncidenceViolation(_))
        ));
    }
}
