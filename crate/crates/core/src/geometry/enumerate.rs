use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use super::counting::{flag_count, gaussian, theta};
use super::flag::{Flag, FlagType};
use super::subspace::Subspace;
use super::GeometryError;
use crate::bits;
use crate::gf::{Elem, FieldTable};

/// Default cap on the number of objects any single enumeration may produce.
pub const DEFAULT_LIMIT: usize = 2_000_000;

fn check_limit(count: u128, limit: usize) -> Result<usize, GeometryError> {
    if count > limit as u128 {
        return Err(GeometryError::EnumerationLimitExceeded { count, limit });
    }
    Ok(count as usize)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All k-dimensional subspaces of GF(q)^n, each exactly once, sorted by their
/// flattened RREF.
pub fn enumerate_subspaces(f: &FieldTable, n: usize, k: usize, limit: usize) -> Result<Vec<Subspace>, GeometryError> {
    if k > n {
        return Ok(Vec::new());
    }
    let q = f.order();
    let count = check_limit(gaussian(n as u32, k as u32, q as u64), limit)?;
    let mut out = Vec::with_capacity(count);
    for pivots in combinations(n, k) {
        // free entries: row i, columns right of its pivot that are not pivots
        let free: Vec<usize> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| {
                let pivots = &pivots;
                (p + 1..n).filter(move |c| !pivots.contains(c)).map(move |c| i * n + c)
            })
            .collect();
        let mut base = vec![0 as Elem; k * n];
        for (i, &p) in pivots.iter().enumerate() {
            base[i * n + p] = 1;
        }
        let mut vals = vec![0 as Elem; free.len()];
        loop {
            let mut m = base.clone();
            for (&pos, &v) in free.iter().zip(&vals) {
                m[pos] = v;
            }
            out.push(Subspace::from_flat(f, n, m, k));
            let mut carry = true;
            for v in vals.iter_mut() {
                *v += 1;
                if (*v as usize) < q {
                    carry = false;
                    break;
                }
                *v = 0;
            }
            if carry {
                break;
            }
        }
    }
    out.sort_unstable();
    debug_assert_eq!(out.len(), count);
    Ok(out)
}

/// Integer code of a vector; numeric order equals lexicographic order.
#[inline]
fn vector_code(q: usize, v: &[Elem]) -> u64 {
    v.iter().fold(0u64, |acc, &x| acc * q as u64 + x as u64)
}

/// The subspaces of one dimension in canonical order, with their point sets.
pub struct Catalog {
    dim: usize,
    spaces: Vec<Subspace>,
    index: HashMap<Vec<Elem>, u32>,
    words: usize,
    points: Vec<u64>,
}

impl Catalog {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }

    pub fn get(&self, i: u32) -> &Subspace {
        &self.spaces[i as usize]
    }

    pub fn index_of(&self, s: &Subspace) -> Option<u32> {
        if s.dim() != self.dim {
            return None;
        }
        self.index.get(s.flat()).copied()
    }

    /// Bitset over point indices of the points in subspace `i`.
    #[inline]
    pub fn point_set(&self, i: u32) -> &[u64] {
        let i = i as usize;
        &self.points[i * self.words..(i + 1) * self.words]
    }
}

/// PG(n-1, q) with lazily built per-dimension catalogs.
pub struct ProjectiveSpace {
    field: FieldTable,
    n: usize,
    limit: usize,
    catalogs: Vec<OnceLock<Catalog>>,
    point_codes: OnceLock<HashMap<u64, u32>>,
}

impl std::fmt::Debug for ProjectiveSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ProjectiveSpace(q={}, n={})", self.q(), self.n)
    }
}

/// Subspace reference inside a [`ProjectiveSpace`]: vector dimension and catalog index.
pub type SpaceId = (usize, u32);

impl ProjectiveSpace {
    pub fn new(q: u32, n: usize) -> Result<Self, GeometryError> {
        Self::with_limit(q, n, DEFAULT_LIMIT)
    }

    pub fn with_limit(q: u32, n: usize, limit: usize) -> Result<Self, GeometryError> {
        if !(2..=7).contains(&n) {
            return Err(GeometryError::UnsupportedDimension(n));
        }
        let field = FieldTable::new(q)?;
        Ok(ProjectiveSpace {
            field,
            n,
            limit,
            catalogs: (0..=n).map(|_| OnceLock::new()).collect(),
            point_codes: OnceLock::new(),
        })
    }

    #[inline]
    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Number of points of the subspace of vector dimension `d`.
    pub fn points_in_dim(&self, d: usize) -> usize {
        if d == 0 {
            0
        } else {
            theta(d as u32 - 1, self.q() as u64) as usize
        }
    }

    fn point_codes(&self) -> Result<&HashMap<u64, u32>, GeometryError> {
        if let Some(m) = self.point_codes.get() {
            return Ok(m);
        }
        let pts = self.catalog(1)?;
        let q = self.q();
        Ok(self.point_codes.get_or_init(|| {
            pts.spaces
                .iter()
                .enumerate()
                .map(|(i, s)| (vector_code(q, s.flat()), i as u32))
                .collect()
        }))
    }

    pub fn catalog(&self, dim: usize) -> Result<&Catalog, GeometryError> {
        if dim > self.n {
            return Err(GeometryError::DimensionMismatch {
                expected: self.n,
                found: dim,
            });
        }
        if let Some(c) = self.catalogs[dim].get() {
            return Ok(c);
        }
        check_limit(gaussian(self.n as u32, dim as u32, self.q() as u64), self.limit)?;
        check_limit(theta(self.n as u32 - 1, self.q() as u64), self.limit)?;
        let spaces = enumerate_subspaces(&self.field, self.n, dim, self.limit)?;
        let npoints = self.points_in_dim(self.n);
        let words = bits::words_for(npoints);
        let mut points = vec![0u64; spaces.len() * words];
        if dim == 1 {
            for i in 0..spaces.len() {
                points[i * words + i / 64] |= 1 << (i % 64);
            }
        } else if dim > 1 {
            let codes = self.point_codes()?;
            let q = self.q();
            for (i, s) in spaces.iter().enumerate() {
                for v in s.normalized_points(&self.field) {
                    let p = codes[&vector_code(q, &v)] as usize;
                    points[i * words + p / 64] |= 1 << (p % 64);
                }
            }
        }
        let index = spaces
            .iter()
            .enumerate()
            .map(|(i, s)| (s.flat().to_vec(), i as u32))
            .collect();
        Ok(self.catalogs[dim].get_or_init(|| Catalog {
            dim,
            spaces,
            index,
            words,
            points,
        }))
    }

    pub fn id_of(&self, s: &Subspace) -> Result<SpaceId, GeometryError> {
        if s.ambient() != self.n {
            return Err(GeometryError::AmbientMismatch {
                left: self.n,
                right: s.ambient(),
            });
        }
        let idx = self
            .catalog(s.dim())?
            .index_of(s)
            .ok_or_else(|| GeometryError::InvalidFlag("subspace not canonical".into()))?;
        Ok((s.dim(), idx))
    }

    pub fn space(&self, id: SpaceId) -> Result<&Subspace, GeometryError> {
        Ok(self.catalog(id.0)?.get(id.1))
    }

    /// Point set of a catalogued subspace. Builds the catalog on first use and
    /// panics if it exceeds the enumeration limit.
    #[inline]
    pub fn point_set(&self, id: SpaceId) -> &[u64] {
        match self.catalogs[id.0].get() {
            Some(c) => c.point_set(id.1),
            None => self
                .catalog(id.0)
                .expect("catalog within the enumeration limit")
                .point_set(id.1),
        }
    }

    #[inline]
    pub fn is_contained(&self, small: SpaceId, big: SpaceId) -> bool {
        small.0 <= big.0 && bits::is_subset(self.point_set(small), self.point_set(big))
    }

    /// Vector dimension of the intersection, from the number of shared points.
    pub fn meet_dim(&self, a: SpaceId, b: SpaceId) -> usize {
        let shared = bits::and_count(self.point_set(a), self.point_set(b));
        (0..=self.n).find(|&d| self.points_in_dim(d) == shared).unwrap()
    }

    /// Catalog indices of the `dim`-subspaces containing `u`, ascending.
    pub fn supersets(&self, u: &Subspace, dim: usize) -> Result<Vec<u32>, GeometryError> {
        let n = self.n;
        if dim < u.dim() || dim > n {
            return Ok(Vec::new());
        }
        let cat = self.catalog(dim)?;
        let pivots = u.pivots();
        let comp: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let sub = enumerate_subspaces(&self.field, comp.len(), dim - u.dim(), self.limit)?;
        let mut out: Vec<u32> = sub
            .iter()
            .map(|x| {
                let mut m = u.flat().to_vec();
                for r in 0..x.dim() {
                    let mut v = vec![0; n];
                    for (j, &c) in comp.iter().enumerate() {
                        v[c] = x.row(r)[j];
                    }
                    m.extend(v);
                }
                let s = Subspace::from_flat(&self.field, n, m, dim);
                cat.index_of(&s).expect("catalog is complete")
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Catalog indices of the `dim`-subspaces contained in `u`, ascending.
    pub fn subsets(&self, u: &Subspace, dim: usize) -> Result<Vec<u32>, GeometryError> {
        let n = self.n;
        if dim > u.dim() {
            return Ok(Vec::new());
        }
        let cat = self.catalog(dim)?;
        let sub = enumerate_subspaces(&self.field, u.dim(), dim, self.limit)?;
        let f = &self.field;
        let mut out: Vec<u32> = sub
            .iter()
            .map(|x| {
                let mut m = vec![0; dim * n];
                for r in 0..dim {
                    for (k, &c) in x.row(r).iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        for j in 0..n {
                            let t = f.mul(c, u.row(k)[j]);
                            m[r * n + j] = f.add(m[r * n + j], t);
                        }
                    }
                }
                let s = Subspace::from_flat(f, n, m, dim);
                cat.index_of(&s).expect("catalog is complete")
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// All flags of one type, indexed in canonical order.
///
/// Flags are ordered lexicographically by the tuple of catalog indices of their
/// subspaces, smallest dimension first. Vertex ids of the Kneser graph are
/// positions in this order.
pub struct FlagSpace {
    geo: Arc<ProjectiveSpace>,
    ty: FlagType,
    ids: Vec<u32>,
    lookup: HashMap<Box<[u32]>, u32>,
    // expected number of shared points for general position, per position pair
    gp_points: Vec<usize>,
}

impl std::fmt::Debug for FlagSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FlagSpace({:?}, type {}, {} flags)", self.geo, self.ty, self.len())
    }
}

impl FlagSpace {
    pub fn new(geo: Arc<ProjectiveSpace>, ty: FlagType) -> Result<Self, GeometryError> {
        let n = geo.n();
        let q = geo.q() as u64;
        if ty.dims().iter().any(|&d| d == 0 || d as usize >= n) {
            return Err(GeometryError::InvalidFlagType(format!("{ty} in dimension {n}")));
        }
        let count = check_limit(flag_count(n as u32, ty.dims(), q), geo.limit())?;
        for &d in ty.dims() {
            geo.catalog(d as usize)?;
        }
        let dims: Vec<usize> = ty.dims().iter().map(|&d| d as usize).collect();
        let stride = dims.len();
        let mut ids = Vec::with_capacity(count * stride);
        let mut prefix = Vec::with_capacity(stride);
        let first = geo.catalog(dims[0])?;
        for i in 0..first.len() as u32 {
            prefix.push(i);
            Self::extend(&geo, &dims, 1, first.get(i), &mut prefix, &mut ids)?;
            prefix.pop();
        }
        debug_assert_eq!(ids.len(), count * stride);
        let lookup = ids
            .chunks_exact(stride)
            .enumerate()
            .map(|(v, c)| (c.to_vec().into_boxed_slice(), v as u32))
            .collect();
        let gp_points = dims
            .iter()
            .flat_map(|&a| dims.iter().map(move |&b| (a, b)))
            .map(|(a, b)| geo.points_in_dim((a + b).saturating_sub(n)))
            .collect();
        Ok(FlagSpace {
            geo,
            ty,
            ids,
            lookup,
            gp_points,
        })
    }

    fn extend(
        geo: &ProjectiveSpace,
        dims: &[usize],
        pos: usize,
        last: &Subspace,
        prefix: &mut Vec<u32>,
        out: &mut Vec<u32>,
    ) -> Result<(), GeometryError> {
        if pos == dims.len() {
            out.extend_from_slice(prefix);
            return Ok(());
        }
        let cat = geo.catalog(dims[pos])?;
        for j in geo.supersets(last, dims[pos])? {
            prefix.push(j);
            Self::extend(geo, dims, pos + 1, cat.get(j), prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }

    pub fn geometry(&self) -> &Arc<ProjectiveSpace> {
        &self.geo
    }

    pub fn flag_type(&self) -> &FlagType {
        &self.ty
    }

    pub fn len(&self) -> usize {
        self.ids.len() / self.ty.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Catalog indices of the subspaces of flag `v`, smallest first.
    #[inline]
    pub fn space_ids(&self, v: u32) -> &[u32] {
        let s = self.ty.len();
        &self.ids[v as usize * s..(v as usize + 1) * s]
    }

    /// The member of flag `v` of vector dimension `dim`, if the type has it.
    pub fn member(&self, v: u32, dim: usize) -> Option<SpaceId> {
        let pos = self.ty.dims().iter().position(|&d| d as usize == dim)?;
        Some((dim, self.space_ids(v)[pos]))
    }

    pub fn flag(&self, v: u32) -> Flag {
        let spaces = self
            .ty
            .dims()
            .iter()
            .zip(self.space_ids(v))
            .map(|(&d, &i)| self.geo.catalog(d as usize).unwrap().get(i).clone())
            .collect();
        Flag::from_parts_unchecked(self.ty.clone(), spaces)
    }

    pub fn index_of_ids(&self, ids: &[u32]) -> Option<u32> {
        self.lookup.get(ids).copied()
    }

    pub fn index_of(&self, flag: &Flag) -> Option<u32> {
        if flag.flag_type() != &self.ty {
            return None;
        }
        let ids: Option<Vec<u32>> = flag
            .spaces()
            .iter()
            .map(|s| self.geo.id_of(s).ok().map(|(_, i)| i))
            .collect();
        self.index_of_ids(&ids?)
    }

    /// General position via shared-point counts.
    #[inline]
    pub fn general_position(&self, v: u32, w: u32) -> bool {
        let dims = self.ty.dims();
        let a = self.space_ids(v);
        let b = self.space_ids(w);
        let k = dims.len();
        for i in 0..k {
            let pa = self.geo.point_set((dims[i] as usize, a[i]));
            for j in 0..k {
                let pb = self.geo.point_set((dims[j] as usize, b[j]));
                if bits::and_count(pa, pb) != self.gp_points[i * k + j] {
                    return false;
                }
            }
        }
        true
    }

    /// Ids of the point-pencil with base point `point` (a catalog index of dim 1):
    /// flags `F` such that `F ∪ {P}` is a flag. Since every member has dimension
    /// at least one, this means `P` lies in the smallest member.
    pub fn pencil(&self, point: u32) -> Vec<u32> {
        let d0 = self.ty.dims()[0] as usize;
        (0..self.len() as u32)
            .filter(|&v| self.geo.is_contained((1, point), (d0, self.space_ids(v)[0])))
            .collect()
    }
}

/// Enumerates every flag of type `ty` of GF(q)^n in canonical order.
pub fn enumerate_flags(q: u32, n: usize, ty: &FlagType, limit: usize) -> Result<Vec<Flag>, GeometryError> {
    let fs = FlagSpace::new(Arc::new(ProjectiveSpace::with_limit(q, n, limit)?), ty.clone())?;
    Ok((0..fs.len() as u32).map(|v| fs.flag(v)).collect())
}

/// The point-pencil of type `ty` with base point `p`.
pub fn point_pencil(fs: &FlagSpace, p: &Subspace) -> Result<Vec<Flag>, GeometryError> {
    if p.dim() != 1 {
        return Err(GeometryError::DimensionMismatch {
            expected: 1,
            found: p.dim(),
        });
    }
    let (_, idx) = fs.geometry().id_of(p)?;
    Ok(fs.pencil(idx).into_iter().map(|v| fs.flag(v)).collect())
}
