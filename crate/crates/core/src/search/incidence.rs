use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::bits::{self, BitSet};
use crate::geometry::{GeometryError, ProjectiveSpace};

fn point_bitset(geo: &ProjectiveSpace, m: &[u32]) -> Result<BitSet, SearchError> {
    let npoints = geo.catalog(1)?.len();
    if let Some(&bad) = m.iter().find(|&&p| p as usize >= npoints) {
        return Err(SearchError::DegenerateInstance(format!("no point with index {bad}")));
    }
    Ok(BitSet::from_indices(npoints, m.iter().map(|&p| p as usize)))
}

fn require_pg4(geo: &ProjectiveSpace) -> Result<(), SearchError> {
    if geo.n() != 5 {
        return Err(GeometryError::UnsupportedDimension(geo.n()).into());
    }
    Ok(())
}

/// Number of lines through the point `p` that contain a point of `m` other
/// than `p`.
pub fn lines_through_meeting(geo: &ProjectiveSpace, p: u32, m: &[u32]) -> Result<usize, SearchError> {
    point_bitset(geo, &[p])?;
    point_bitset(geo, m)?;
    let f = geo.field();
    let base = geo.space((1, p))?;
    let mut lines = BTreeSet::new();
    for &x in m.iter().filter(|&&x| x != p) {
        let line = base.sum(f, geo.space((1, x))?)?;
        lines.insert(geo.id_of(&line)?.1);
    }
    Ok(lines.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeavySolid {
    pub solid: u32,
    pub count: usize,
}

/// Among the solids through the plane `pi`, one containing the most points of
/// `m` (smallest index on ties).
pub fn heaviest_solid_on_plane(geo: &ProjectiveSpace, pi: u32, m: &[u32]) -> Result<HeavySolid, SearchError> {
    require_pg4(geo)?;
    if pi as usize >= geo.catalog(3)?.len() {
        return Err(SearchError::DegenerateInstance(format!("no plane with index {pi}")));
    }
    let mset = point_bitset(geo, m)?;
    let mut best: Option<HeavySolid> = None;
    for s in geo.supersets(geo.space((3, pi))?, 4)? {
        let count = bits::and_count(geo.point_set((4, s)), mset.words());
        if best.map_or(true, |b| count > b.count) {
            best = Some(HeavySolid { solid: s, count });
        }
    }
    Ok(best.expect("a plane of PG(4,q) lies in q + 1 solids"))
}

/// A point set `M` of PG(4,q) with three non-collinear points spanning a plane
/// disjoint from `M`, and the constants `m`, `n` of the heavy-solid lemma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeavySolidInstance {
    pub points: Vec<u32>,
    pub p: [u32; 3],
    pub m: f64,
    pub n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub plane: u32,
    /// Largest `lines_through_meeting(P_i, M) / q^2`.
    pub n_observed: f64,
    pub n_ok: bool,
    /// `|M| / q^3`.
    pub d: f64,
    /// `ceil(32 n^5 m / d^5)`, saturating.
    pub q_threshold: u128,
    pub satisfiable_at_this_q: bool,
    /// The solid the lemma would promise, found by direct scan.
    pub heaviest: HeavySolid,
}

/// Evaluates the hypotheses of the heavy-solid lemma on a concrete instance.
/// The lemma needs `q > 32 n^5 m / d^5`, far beyond any enumerable `q`.
pub fn heavy_solid_check(geo: &ProjectiveSpace, inst: &HeavySolidInstance) -> Result<HypothesisCheck, SearchError> {
    require_pg4(geo)?;
    if !(inst.m > 0.0 && inst.n > 0.0 && inst.m.is_finite() && inst.n.is_finite()) {
        return Err(SearchError::DegenerateInstance("m and n must be positive".into()));
    }
    let mut points = inst.points.clone();
    points.sort_unstable();
    points.dedup();
    if points.is_empty() {
        return Err(SearchError::DegenerateInstance("M is empty".into()));
    }
    let mset = point_bitset(geo, &points)?;
    point_bitset(geo, &inst.p)?;
    let f = geo.field();
    let mut span = geo.space((1, inst.p[0]))?.clone();
    for &p in &inst.p[1..] {
        span = span.sum(f, geo.space((1, p))?)?;
    }
    if span.dim() != 3 {
        return Err(SearchError::DegenerateInstance("P1, P2, P3 are collinear".into()));
    }
    let plane = geo.id_of(&span)?.1;
    if bits::intersects(geo.point_set((3, plane)), mset.words()) {
        return Err(SearchError::DegenerateInstance("the plane P1P2P3 meets M".into()));
    }
    let q = geo.q() as f64;
    let mut max_lines = 0;
    for &p in &inst.p {
        max_lines = max_lines.max(lines_through_meeting(geo, p, &points)?);
    }
    let n_observed = max_lines as f64 / (q * q);
    let d = points.len() as f64 / (q * q * q);
    let threshold = (32.0 * inst.n.powi(5) * inst.m / d.powi(5)).ceil();
    let q_threshold = threshold as u128;
    let n_ok = n_observed <= inst.n;
    Ok(HypothesisCheck {
        plane,
        n_observed,
        n_ok,
        d,
        q_threshold,
        satisfiable_at_this_q: n_ok && (geo.q() as u128) > q_threshold,
        heaviest: heaviest_solid_on_plane(geo, plane, &points)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pg4(q: u32) -> ProjectiveSpace {
        ProjectiveSpace::new(q, 5).unwrap()
    }

    /// Scans every line through `p`.
    fn brute_lines(geo: &ProjectiveSpace, p: u32, m: &[u32]) -> usize {
        let lines = geo.catalog(2).unwrap();
        (0..lines.len() as u32)
            .filter(|&l| geo.is_contained((1, p), (2, l)))
            .filter(|&l| m.iter().any(|&x| x != p && geo.is_contained((1, x), (2, l))))
            .count()
    }

    fn random_points(geo: &ProjectiveSpace, k: usize, seed: u64) -> Vec<u32> {
        let mut all: Vec<u32> = (0..geo.catalog(1).unwrap().len() as u32).collect();
        all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        all.truncate(k);
        all
    }

    #[test]
    fn lines_trivial_cases() {
        let geo = pg4(3);
        assert_eq!(lines_through_meeting(&geo, 0, &[]).unwrap(), 0);
        assert_eq!(lines_through_meeting(&geo, 0, &[0]).unwrap(), 0);
        assert_eq!(lines_through_meeting(&geo, 0, &[5]).unwrap(), 1);
    }

    #[test]
    fn lines_match_scan() {
        let geo = pg4(3);
        for seed in 0..4 {
            let m = random_points(&geo, 50, seed);
            for p in [0, 17, 120] {
                assert_eq!(lines_through_meeting(&geo, p, &m).unwrap(), brute_lines(&geo, p, &m));
            }
        }
    }

    #[test]
    fn heaviest_solid_trivial_cases() {
        let geo = pg4(3);
        let r = heaviest_solid_on_plane(&geo, 4, &[]).unwrap();
        assert_eq!(r.count, 0);
        // M inside one solid through the plane
        let s0 = geo.supersets(geo.space((3, 4)).unwrap(), 4).unwrap()[2];
        let m: Vec<u32> = geo
            .subsets(geo.space((4, s0)).unwrap(), 1)
            .unwrap()
            .into_iter()
            .step_by(3)
            .collect();
        let r = heaviest_solid_on_plane(&geo, 4, &m).unwrap();
        assert_eq!(
            r,
            HeavySolid {
                solid: s0,
                count: m.len()
            }
        );
    }

    #[test]
    fn heaviest_solid_matches_scan() {
        let geo = pg4(3);
        let solids = geo.catalog(4).unwrap().len() as u32;
        for seed in 0..4 {
            let m = random_points(&geo, 60, seed);
            let pi = (seed as u32 * 97) % geo.catalog(3).unwrap().len() as u32;
            let scan = (0..solids)
                .filter(|&s| geo.is_contained((3, pi), (4, s)))
                .map(|s| m.iter().filter(|&&x| geo.is_contained((1, x), (4, s))).count())
                .max()
                .unwrap();
            assert_eq!(heaviest_solid_on_plane(&geo, pi, &m).unwrap().count, scan);
        }
    }

    fn plane_and_outside(geo: &ProjectiveSpace) -> ([u32; 3], Vec<u32>) {
        let plane = 0;
        let pts = geo.subsets(geo.space((3, plane)).unwrap(), 1).unwrap();
        let p = [
            pts[0],
            pts[1],
            *pts.iter()
                .find(|&&x| {
                    geo.meet_dim((3, plane), (1, x)) == 1 && {
                        let l = geo
                            .space((1, pts[0]))
                            .unwrap()
                            .sum(geo.field(), geo.space((1, pts[1])).unwrap())
                            .unwrap();
                        !geo.space((1, x)).unwrap().is_subspace_of(geo.field(), &l)
                    }
                })
                .unwrap(),
        ];
        let outside: Vec<u32> = (0..geo.catalog(1).unwrap().len() as u32)
            .filter(|&x| !geo.is_contained((1, x), (3, plane)))
            .take(7)
            .collect();
        (p, outside)
    }

    #[test]
    fn desk_scale_is_not_satisfiable() {
        let geo = pg4(3);
        let (p, m) = plane_and_outside(&geo);
        let inst = HeavySolidInstance {
            points: m,
            p,
            m: 5.0,
            n: 9.0,
        };
        let r = heavy_solid_check(&geo, &inst).unwrap();
        assert!(r.q_threshold > 1_000_000_000);
        assert!(!r.satisfiable_at_this_q);
        assert!((r.d - 7.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_instances() {
        let geo = pg4(3);
        let (p, m) = plane_and_outside(&geo);
        let line_pts = geo.subsets(geo.space((2, 0)).unwrap(), 1).unwrap();
        let collinear = HeavySolidInstance {
            points: m.clone(),
            p: [line_pts[0], line_pts[1], line_pts[2]],
            m: 5.0,
            n: 9.0,
        };
        assert!(matches!(
            heavy_solid_check(&geo, &collinear),
            Err(SearchError::DegenerateInstance(_))
        ));
        let mut meets = m;
        meets.push(p[0]);
        let inst = HeavySolidInstance {
            points: meets,
            p,
            m: 5.0,
            n: 9.0,
        };
        assert!(matches!(
            heavy_solid_check(&geo, &inst),
            Err(SearchError::DegenerateInstance(_))
        ));
    }
}
