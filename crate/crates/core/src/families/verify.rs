use std::collections::BTreeMap;

use serde::Serialize;

use super::ekr::{ekr_by_ids, EkrKind};
use super::{Coloring, FamilyError};
use crate::bits::{self, BitSet};
use crate::geometry::FlagSpace;
use crate::kneser::{GraphId, KneserGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExampleMatch {
    pub kind: EkrKind,
    pub a: u32,
    pub b: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub size: usize,
    pub independent: bool,
    /// An adjacent pair of members, if any.
    pub witness: Option<(u32, u32)>,
    /// Independent and not extendable by any vertex.
    pub maximal: bool,
    /// A point on the minimal space of every member.
    pub contained_in_point_pencil: Option<u32>,
    /// Parameters of a line-plane example family with exactly these members.
    pub matches_example: Option<ExampleMatch>,
}

/// Checks a vertex set of `graph`. Members must be sorted and in range.
pub fn verify_family(graph: &KneserGraph, members: &[u32]) -> Result<FamilyReport, FamilyError> {
    let witness = graph.independent_witness(members)?;
    let independent = witness.is_none();
    let n = graph.vertex_count();
    let adj = graph.adjacency();
    let mut covered = BitSet::new(n);
    for &v in members {
        covered.insert(v as usize);
        bits::or_assign(covered.words_mut(), adj.row(v as usize));
    }
    let maximal = independent && covered.count() == n;
    let fs = graph.flags();
    let matches_example = if fs.flag_type().dims() == [2, 3] && fs.geometry().n() == 5 {
        match_example_family(fs, members)?
    } else {
        None
    };
    Ok(FamilyReport {
        size: members.len(),
        independent,
        witness,
        maximal,
        contained_in_point_pencil: contained_in_point_pencil(fs, members),
        matches_example,
    })
}

/// A point contained in the smallest member of every flag, if one exists.
pub fn contained_in_point_pencil(fs: &FlagSpace, members: &[u32]) -> Option<u32> {
    let geo = fs.geometry();
    let d = fs.flag_type().dims()[0] as usize;
    let mut common: Option<Vec<u64>> = None;
    for &v in members {
        let set = geo.point_set((d, fs.space_ids(v)[0]));
        match common.as_mut() {
            None => common = Some(set.to_vec()),
            Some(c) => bits::and_assign(c, set),
        }
        if common.as_ref().is_some_and(|c| bits::count(c) == 0) {
            return None;
        }
    }
    common.and_then(|c| bits::first(&c)).map(|p| p as u32)
}

/// Finds example-family parameters whose family equals `members` exactly.
pub fn match_example_family(fs: &FlagSpace, members: &[u32]) -> Result<Option<ExampleMatch>, FamilyError> {
    super::require_type(fs, &[2, 3])?;
    let geo = fs.geometry();
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let npoints = geo.catalog(1)?.len();
    let nsolids = geo.catalog(4)?.len();
    // flags through a point, flags whose plane lies in a solid
    let pencil_size = fs.pencil(0).len();
    let solid_generic_size = {
        let s0 = (4, 0);
        (0..fs.len() as u32)
            .filter(|&v| geo.is_contained((3, fs.space_ids(v)[1]), s0))
            .count()
    };
    let mut by_point = vec![0usize; npoints];
    let mut by_solid = vec![0usize; nsolids];
    let mut supersets_of_plane: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &v in &sorted {
        if v as usize >= fs.len() {
            return Ok(None);
        }
        let ids = fs.space_ids(v);
        for p in bits::Ones::new(geo.point_set((2, ids[0]))) {
            by_point[p] += 1;
        }
        let sols = match supersets_of_plane.get(&ids[1]) {
            Some(s) => s,
            None => {
                let s = geo.supersets(geo.space((3, ids[1]))?, 4)?;
                supersets_of_plane.entry(ids[1]).or_insert(s)
            }
        };
        for &s in sols {
            by_solid[s as usize] += 1;
        }
    }
    let matches = |kind: EkrKind, a: u32, b: u32| -> Result<bool, FamilyError> {
        Ok(ekr_by_ids(fs, kind, a, b)?.members == sorted)
    };

    for p in (0..npoints as u32).filter(|&p| by_point[p as usize] == pencil_size) {
        let Some(&special) = sorted
            .iter()
            .find(|&&v| !geo.is_contained((1, p), (2, fs.space_ids(v)[0])))
        else {
            continue;
        };
        let plane = fs.space_ids(special)[1];
        for l in geo.subsets(geo.space((3, plane))?, 2)? {
            if geo.is_contained((1, p), (2, l)) && matches(EkrKind::PointLine, p, l)? {
                return Ok(Some(ExampleMatch {
                    kind: EkrKind::PointLine,
                    a: p,
                    b: l,
                }));
            }
        }
        if geo.is_contained((1, p), (3, plane)) {
            for s in geo.supersets(geo.space((3, plane))?, 4)? {
                if matches(EkrKind::PointSolid, p, s)? {
                    return Ok(Some(ExampleMatch {
                        kind: EkrKind::PointSolid,
                        a: p,
                        b: s,
                    }));
                }
            }
        }
    }
    for s in (0..nsolids as u32).filter(|&s| by_solid[s as usize] == solid_generic_size) {
        let Some(&special) = sorted
            .iter()
            .find(|&&v| !geo.is_contained((3, fs.space_ids(v)[1]), (4, s)))
        else {
            continue;
        };
        let line = fs.space_ids(special)[0];
        for t in geo.supersets(geo.space((2, line))?, 3)? {
            if geo.is_contained((3, t), (4, s)) && matches(EkrKind::SolidPlane, s, t)? {
                return Ok(Some(ExampleMatch {
                    kind: EkrKind::SolidPlane,
                    a: s,
                    b: t,
                }));
            }
        }
        if geo.is_contained((2, line), (4, s)) {
            for p in geo.subsets(geo.space((2, line))?, 1)? {
                if matches(EkrKind::SolidPoint, s, p)? {
                    return Ok(Some(ExampleMatch {
                        kind: EkrKind::SolidPoint,
                        a: s,
                        b: p,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringReport {
    pub num_classes: usize,
    pub cover_ok: bool,
    pub uncovered: usize,
    pub all_independent: bool,
    /// Index of the first class containing an edge, with the edge.
    pub first_bad_class: Option<(usize, (u32, u32))>,
    /// Class size to number of classes.
    pub class_size_histogram: BTreeMap<usize, usize>,
    /// Whether the attached per-vertex colors form a proper coloring.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colors_proper: Option<bool>,
}

impl ColoringReport {
    pub fn ok(&self) -> bool {
        self.cover_ok && self.all_independent && self.colors_proper != Some(false)
    }
}

pub fn verify_coloring(graph: &KneserGraph, coloring: &Coloring) -> Result<ColoringReport, FamilyError> {
    if coloring.graph != graph.id() {
        return Err(FamilyError::GraphMismatch(format!(
            "coloring is for {}, graph is {}",
            describe(&coloring.graph),
            describe(&graph.id())
        )));
    }
    let n = graph.vertex_count();
    let mut covered = BitSet::new(n);
    let mut first_bad_class = None;
    let mut hist = BTreeMap::new();
    for (i, class) in coloring.classes.iter().enumerate() {
        if let Some(w) = graph.independent_witness(&class.members)? {
            first_bad_class.get_or_insert((i, w));
        }
        for &v in &class.members {
            covered.insert(v as usize);
        }
        *hist.entry(class.len()).or_insert(0) += 1;
    }
    let uncovered = n - covered.count();
    let colors_proper = coloring.colors.as_ref().map(|colors| {
        colors.len() == n && (0..n).all(|v| bits::Ones::new(graph.adjacency().row(v)).all(|w| colors[v] != colors[w]))
    });
    Ok(ColoringReport {
        num_classes: coloring.num_classes(),
        cover_ok: uncovered == 0,
        uncovered,
        all_independent: first_bad_class.is_none(),
        first_bad_class,
        class_size_histogram: hist,
        colors_proper,
    })
}

fn describe(id: &GraphId) -> String {
    format!("n = {}, q = {}, type {}", id.n, id.q, id.omega)
}
