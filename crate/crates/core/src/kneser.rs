//! The graph `qK_{n;Ω}` with dense bitset adjacency.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{self, BitMatrix};
use crate::geometry::{FlagSpace, FlagType, GeometryError, ProjectiveSpace};

/// Largest vertex count for which a dense adjacency matrix is allocated
/// (about 312 MB of bits).
pub const MAX_DENSE_VERTICES: usize = 50_000;

#[derive(Debug, Error)]
pub enum KneserError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("vertex id {0} out of range")]
    BadVertexId(u32),
    #[error("{0} vertices is too many for a dense adjacency matrix (max {MAX_DENSE_VERTICES})")]
    GraphTooLarge(usize),
    #[error("malformed DIMACS input: {0}")]
    Dimacs(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `(n, q, omega)`, enough to rebuild a graph bit-for-bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphId {
    pub n: usize,
    pub q: usize,
    pub omega: FlagType,
}

impl GraphId {
    pub fn of(fs: &FlagSpace) -> Self {
        GraphId {
            n: fs.geometry().n(),
            q: fs.geometry().q(),
            omega: fs.flag_type().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub n: usize,
    pub q: usize,
    pub omega: FlagType,
    pub vertices: usize,
    pub edges: u64,
    /// Common degree, or `None` if the graph is not regular.
    pub degree: Option<usize>,
    pub degree_histogram: BTreeMap<usize, usize>,
}

pub struct KneserGraph {
    flags: FlagSpace,
    adj: BitMatrix,
    edges: u64,
    degrees: BTreeMap<usize, usize>,
}

impl std::fmt::Debug for KneserGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "KneserGraph(q={}, n={}, type {}, {} vertices, {} edges)",
            self.q(),
            self.n(),
            self.flags.flag_type(),
            self.vertex_count(),
            self.edges
        )
    }
}

impl KneserGraph {
    pub fn build(q: u32, n: usize, omega: &FlagType, limit: usize) -> Result<Self, KneserError> {
        let geo = Arc::new(ProjectiveSpace::with_limit(q, n, limit)?);
        Self::from_flag_space(FlagSpace::new(geo, omega.clone())?)
    }

    /// Rows are computed independently, so the result does not depend on the
    /// number of worker threads.
    pub fn from_flag_space(flags: FlagSpace) -> Result<Self, KneserError> {
        let nv = flags.len();
        if nv > MAX_DENSE_VERTICES {
            return Err(KneserError::GraphTooLarge(nv));
        }
        let geo = flags.geometry().clone();
        let dims: Vec<usize> = flags.flag_type().dims().iter().map(|&d| d as usize).collect();
        let k = dims.len();
        let pw = bits::words_for(geo.points_in_dim(geo.n()));
        // point sets of every member of every flag, contiguous per vertex
        let mut pts = vec![0u64; nv * k * pw];
        for v in 0..nv {
            for (pos, &id) in flags.space_ids(v as u32).iter().enumerate() {
                let dst = (v * k + pos) * pw;
                pts[dst..dst + pw].copy_from_slice(geo.point_set((dims[pos], id)));
            }
        }
        let expect: Vec<usize> = dims
            .iter()
            .flat_map(|&a| dims.iter().map(move |&b| (a, b)))
            .map(|(a, b)| geo.points_in_dim((a + b).saturating_sub(geo.n())))
            .collect();

        let stride = bits::words_for(nv);
        let mut data = vec![0u64; nv * stride];
        data.par_chunks_mut(stride.max(1)).enumerate().for_each(|(i, row)| {
            let pi = &pts[i * k * pw..(i + 1) * k * pw];
            for j in 0..nv {
                let pj = &pts[j * k * pw..(j + 1) * k * pw];
                let mut ok = true;
                'pairs: for a in 0..k {
                    let sa = &pi[a * pw..(a + 1) * pw];
                    for b in 0..k {
                        let sb = &pj[b * pw..(b + 1) * pw];
                        if bits::and_count(sa, sb) != expect[a * k + b] {
                            ok = false;
                            break 'pairs;
                        }
                    }
                }
                if ok {
                    row[j >> 6] |= 1 << (j & 63);
                }
            }
        });
        let adj = BitMatrix::from_rows(nv, data);
        let mut degrees = BTreeMap::new();
        let mut twice = 0u64;
        for i in 0..nv {
            let d = bits::count(adj.row(i));
            twice += d as u64;
            *degrees.entry(d).or_insert(0) += 1;
        }
        Ok(KneserGraph {
            flags,
            adj,
            edges: twice / 2,
            degrees,
        })
    }

    pub fn flags(&self) -> &FlagSpace {
        &self.flags
    }

    pub fn geometry(&self) -> &Arc<ProjectiveSpace> {
        self.flags.geometry()
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn q(&self) -> usize {
        self.flags.geometry().q()
    }

    pub fn n(&self) -> usize {
        self.flags.geometry().n()
    }

    pub fn omega(&self) -> &FlagType {
        self.flags.flag_type()
    }

    pub fn id(&self) -> GraphId {
        GraphId::of(&self.flags)
    }

    pub fn vertex_count(&self) -> usize {
        self.flags.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    pub fn degree_histogram(&self) -> &BTreeMap<usize, usize> {
        &self.degrees
    }

    /// The common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        match self.degrees.len() {
            1 => self.degrees.keys().next().copied(),
            0 => Some(0),
            _ => None,
        }
    }

    #[inline]
    pub fn adjacent(&self, i: u32, j: u32) -> bool {
        self.adj.get(i as usize, j as usize)
    }

    fn check_ids(&self, set: &[u32]) -> Result<(), KneserError> {
        match set.iter().find(|&&v| v as usize >= self.vertex_count()) {
            Some(&v) => Err(KneserError::BadVertexId(v)),
            None => Ok(()),
        }
    }

    /// First adjacent pair in `set`, if any.
    pub fn independent_witness(&self, set: &[u32]) -> Result<Option<(u32, u32)>, KneserError> {
        self.check_ids(set)?;
        Ok(independent_witness(&self.adj, set))
    }

    pub fn is_independent(&self, set: &[u32]) -> Result<bool, KneserError> {
        Ok(self.independent_witness(set)?.is_none())
    }

    /// Vertex id of the image of vertex `v` under `x -> xA`.
    pub fn image_under(&self, v: u32, a: &[u8]) -> Option<u32> {
        let img = self.flags.flag(v).apply(self.geometry().field(), a);
        self.flags.index_of(&img)
    }

    pub fn meta(&self) -> GraphMeta {
        GraphMeta {
            n: self.n(),
            q: self.q(),
            omega: self.omega().clone(),
            vertices: self.vertex_count(),
            edges: self.edges,
            degree: self.regular_degree(),
            degree_histogram: self.degrees.clone(),
        }
    }

    /// DIMACS edge format, 1-indexed vertices in canonical order, `i < j`.
    pub fn write_dimacs<W: Write>(&self, w: W) -> io::Result<()> {
        write_dimacs(&self.adj, w)
    }

    pub fn export_dimacs(&self, path: &Path) -> Result<(), KneserError> {
        let file = std::fs::File::create(path)?;
        self.write_dimacs(file)?;
        Ok(())
    }
}

/// First adjacent pair among `set` in the given adjacency matrix.
pub fn independent_witness(adj: &BitMatrix, set: &[u32]) -> Option<(u32, u32)> {
    let mut seen = bits::BitSet::new(adj.size());
    for &v in set {
        let row = adj.row(v as usize);
        if bits::intersects(row, seen.words()) {
            let u = set
                .iter()
                .copied()
                .find(|&u| seen.contains(u as usize) && bits::test(row, u as usize))
                .unwrap();
            return Some((u.min(v), u.max(v)));
        }
        seen.insert(v as usize);
    }
    None
}

/// Writes any symmetric adjacency matrix in DIMACS edge format.
pub fn write_dimacs<W: Write>(adj: &BitMatrix, w: W) -> io::Result<()> {
    let n = adj.size();
    let edges: usize = (0..n).map(|i| bits::count(adj.row(i))).sum::<usize>() / 2;
    let mut w = io::BufWriter::new(w);
    writeln!(w, "p edge {n} {edges}")?;
    for i in 0..n {
        for j in bits::Ones::new(adj.row(i)).filter(|&j| j > i) {
            writeln!(w, "e {} {}", i + 1, j + 1)?;
        }
    }
    w.flush()
}

/// Parses DIMACS edge format into `(vertex count, 0-indexed edges)`.
pub fn parse_dimacs<R: BufRead>(r: R) -> Result<(usize, Vec<(u32, u32)>), KneserError> {
    let mut header = None;
    let mut edges = Vec::new();
    for line in r.lines() {
        let line = line?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("p") => {
                let _kind = parts.next();
                let nv: usize = parse_field(parts.next())?;
                let ne: usize = parse_field(parts.next())?;
                header = Some((nv, ne));
            }
            Some("e") => {
                let a: u32 = parse_field(parts.next())?;
                let b: u32 = parse_field(parts.next())?;
                if a == 0 || b == 0 {
                    return Err(KneserError::Dimacs("vertex ids are 1-indexed".into()));
                }
                edges.push((a - 1, b - 1));
            }
            Some("c") | None => {}
            Some(other) => return Err(KneserError::Dimacs(format!("unknown line type {other}"))),
        }
    }
    let (nv, ne) = header.ok_or_else(|| KneserError::Dimacs("missing header".into()))?;
    if ne != edges.len() {
        return Err(KneserError::Dimacs(format!(
            "header says {ne} edges, found {}",
            edges.len()
        )));
    }
    Ok((nv, edges))
}

fn parse_field<T: std::str::FromStr>(s: Option<&str>) -> Result<T, KneserError> {
    s.and_then(|t| t.parse().ok())
        .ok_or_else(|| KneserError::Dimacs("bad number".into()))
}
