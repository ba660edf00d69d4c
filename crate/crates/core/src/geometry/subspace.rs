use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::gf::{Elem, FieldTable};

/// A subspace of GF(q)^n stored as its reduced row echelon basis.
///
/// The RREF basis is unique, so structural equality is equality of subspaces.
/// The derived ordering compares `(n, dim, rows)`, i.e. within one dimension it
/// is the lexicographic order of the flattened matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: u8,
    dim: u8,
    rows: Vec<Elem>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(n={}, dim={}, {:?})", self.n, self.dim, self.rows_vec())
    }
}

/// Row-reduces the first `nrows` rows of `m` (row-major, `n` columns) in place.
/// Returns the rank and the pivot columns; the first `rank` rows hold the RREF.
pub(crate) fn rref_in_place(f: &FieldTable, n: usize, m: &mut [Elem], nrows: usize) -> Vec<usize> {
    let mut pivots = Vec::with_capacity(n.min(nrows));
    let mut r = 0;
    for col in 0..n {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| m[i * n + col] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..n {
                m.swap(pr * n + j, r * n + j);
            }
        }
        let inv = f.inv(m[r * n + col]);
        for j in col..n {
            m[r * n + j] = f.mul(m[r * n + j], inv);
        }
        for i in 0..nrows {
            if i == r {
                continue;
            }
            let c = m[i * n + col];
            if c == 0 {
                continue;
            }
            for j in col..n {
                let t = f.mul(c, m[r * n + j]);
                m[i * n + j] = f.sub(m[i * n + j], t);
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            n: n as u8,
            dim: 0,
            rows: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut rows = vec![0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1;
        }
        Subspace {
            n: n as u8,
            dim: n as u8,
            rows,
        }
    }

    /// Canonical subspace spanned by the given vectors.
    pub fn span(f: &FieldTable, n: usize, rows: &[Vec<Elem>]) -> Result<Self, GeometryError> {
        let mut m = Vec::with_capacity(rows.len() * n);
        for r in rows {
            if r.len() != n {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            if let Some(&bad) = r.iter().find(|&&x| x as usize >= f.order()) {
                return Err(GeometryError::BadElement(bad));
            }
            m.extend_from_slice(r);
        }
        Ok(Self::from_flat(f, n, m, rows.len()))
    }

    /// Canonicalizes a row-major matrix of `nrows` rows.
    pub(crate) fn from_flat(f: &FieldTable, n: usize, mut m: Vec<Elem>, nrows: usize) -> Self {
        let pivots = rref_in_place(f, n, &mut m, nrows);
        m.truncate(pivots.len() * n);
        Subspace {
            n: n as u8,
            dim: pivots.len() as u8,
            rows: m,
        }
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Flattened RREF rows.
    #[inline]
    pub fn flat(&self) -> &[Elem] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        let n = self.ambient();
        &self.rows[i * n..(i + 1) * n]
    }

    pub fn rows_vec(&self) -> Vec<Vec<Elem>> {
        (0..self.dim()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| self.row(i).iter().position(|&x| x != 0).unwrap())
            .collect()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), GeometryError> {
        if self.n != other.n {
            return Err(GeometryError::AmbientMismatch {
                left: self.ambient(),
                right: other.ambient(),
            });
        }
        Ok(())
    }

    /// Whether `v` lies in this subspace.
    pub fn contains_vector(&self, f: &FieldTable, v: &[Elem]) -> bool {
        let mut w = v.to_vec();
        for (i, p) in self.pivots().into_iter().enumerate() {
            let c = w[p];
            if c != 0 {
                for (x, &r) in w.iter_mut().zip(self.row(i)) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, f: &FieldTable, other: &Subspace) -> bool {
        self.n == other.n && self.dim <= other.dim && (0..self.dim()).all(|i| other.contains_vector(f, self.row(i)))
    }

    pub fn sum(&self, f: &FieldTable, other: &Subspace) -> Result<Subspace, GeometryError> {
        self.check_ambient(other)?;
        let n = self.ambient();
        let mut m = self.rows.clone();
        m.extend_from_slice(&other.rows);
        Ok(Self::from_flat(f, n, m, self.dim() + other.dim()))
    }

    /// Intersection by the Zassenhaus method on the block matrix `[U U; W 0]`.
    pub fn intersect(&self, f: &FieldTable, other: &Subspace) -> Result<Subspace, GeometryError> {
        self.check_ambient(other)?;
        let n = self.ambient();
        let rows = self.dim() + other.dim();
        let mut m = vec![0; rows * 2 * n];
        for i in 0..self.dim() {
            m[i * 2 * n..i * 2 * n + n].copy_from_slice(self.row(i));
            m[i * 2 * n + n..(i + 1) * 2 * n].copy_from_slice(self.row(i));
        }
        for i in 0..other.dim() {
            let r = self.dim() + i;
            m[r * 2 * n..r * 2 * n + n].copy_from_slice(other.row(i));
        }
        let pivots = rref_in_place(f, 2 * n, &mut m, rows);
        let mut out = Vec::new();
        let mut k = 0;
        for (i, &p) in pivots.iter().enumerate() {
            if p >= n {
                out.extend_from_slice(&m[i * 2 * n + n..(i + 1) * 2 * n]);
                k += 1;
            }
        }
        Ok(Self::from_flat(f, n, out, k))
    }

    /// Annihilator under the standard dot product.
    pub fn dual(&self, f: &FieldTable) -> Subspace {
        let n = self.ambient();
        let pivots = self.pivots();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut m = vec![0; free.len() * n];
        for (k, &fc) in free.iter().enumerate() {
            m[k * n + fc] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                m[k * n + p] = f.neg(self.row(i)[fc]);
            }
        }
        Self::from_flat(f, n, m, free.len())
    }

    /// Image under `v -> v A` for an n x n matrix `a` (row-major).
    pub fn apply(&self, f: &FieldTable, a: &[Elem]) -> Subspace {
        let n = self.ambient();
        debug_assert_eq!(a.len(), n * n);
        let mut m = vec![0; self.dim() * n];
        for i in 0..self.dim() {
            let r = self.row(i);
            for j in 0..n {
                let mut acc = 0;
                for (k, &rk) in r.iter().enumerate() {
                    acc = f.add(acc, f.mul(rk, a[k * n + j]));
                }
                m[i * n + j] = acc;
            }
        }
        Self::from_flat(f, n, m, self.dim())
    }

    /// All `q^dim` vectors of the subspace.
    pub fn vectors(&self, f: &FieldTable) -> Vec<Vec<Elem>> {
        let n = self.ambient();
        let q = f.order();
        let total = q.pow(self.dim() as u32);
        let mut out = Vec::with_capacity(total);
        let mut coeffs = vec![0 as Elem; self.dim()];
        for _ in 0..total {
            let mut v = vec![0; n];
            for (i, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    for (x, &r) in v.iter_mut().zip(self.row(i)) {
                        *x = f.add(*x, f.mul(c, r));
                    }
                }
            }
            out.push(v);
            for c in coeffs.iter_mut() {
                *c += 1;
                if (*c as usize) < q {
                    break;
                }
                *c = 0;
            }
        }
        out
    }

    /// Nonzero vectors with leading coefficient 1, one per projective point.
    pub(crate) fn normalized_points(&self, f: &FieldTable) -> Vec<Vec<Elem>> {
        let n = self.ambient();
        let q = f.order();
        let d = self.dim();
        let mut out = Vec::new();
        // leading nonzero coefficient at position `lead` is 1, tail arbitrary
        for lead in 0..d {
            let tail = d - lead - 1;
            let mut coeffs = vec![0 as Elem; tail];
            for _ in 0..q.pow(tail as u32) {
                let mut v = self.row(lead).to_vec();
                for (t, &c) in coeffs.iter().enumerate() {
                    if c != 0 {
                        for (x, &r) in v.iter_mut().zip(self.row(lead + 1 + t)) {
                            *x = f.add(*x, f.mul(c, r));
                        }
                    }
                }
                out.push(v);
                for c in coeffs.iter_mut() {
                    *c += 1;
                    if (*c as usize) < q {
                        break;
                    }
                    *c = 0;
                }
            }
        }
        debug_assert!(n > 0 || out.is_empty());
        out
    }

    pub fn to_json(&self, q: usize) -> SubspaceJson {
        SubspaceJson {
            n: self.ambient(),
            q,
            rref: self.rows_vec(),
        }
    }
}

/// Dimension-only general position test for two subspaces.
pub fn subspaces_in_general_position(f: &FieldTable, a: &Subspace, b: &Subspace) -> Result<bool, GeometryError> {
    let meet = a.intersect(f, b)?;
    if meet.dim() == 0 {
        return Ok(true);
    }
    Ok(a.sum(f, b)?.dim() == a.ambient())
}

/// `{"n":5,"q":3,"rref":[[...],...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub n: usize,
    pub q: usize,
    pub rref: Vec<Vec<Elem>>,
}

impl SubspaceJson {
    /// Rebuilds the subspace; any spanning rows are accepted and canonicalized.
    pub fn to_subspace(&self, f: &FieldTable) -> Result<Subspace, GeometryError> {
        if self.q != f.order() {
            return Err(GeometryError::FieldMismatch {
                expected: f.order(),
                found: self.q,
            });
        }
        Subspace::span(f, self.n, &self.rref)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn gf(q: u32) -> FieldTable {
        FieldTable::new(q).unwrap()
    }

    #[test]
    fn zero_rows_give_zero_space() {
        let f = gf(2);
        let s = Subspace::span(&f, 5, &[vec![0; 5]]).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s, Subspace::zero(5));
    }

    #[test]
    fn pivot_is_normalized() {
        let f = gf(3);
        let s = Subspace::span(&f, 5, &[vec![2, 0, 0, 0, 0]]).unwrap();
        assert_eq!(s.rows_vec(), vec![vec![1, 0, 0, 0, 0]]);
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn wrong_row_length_is_rejected() {
        let f = gf(2);
        assert_eq!(
            Subspace::span(&f, 5, &[vec![1, 0, 0]]),
            Err(GeometryError::DimensionMismatch { expected: 5, found: 3 })
        );
    }

    #[test]
    fn idempotent_meet_and_join() {
        let f = gf(3);
        let u = Subspace::span(&f, 5, &[vec![1, 2, 0, 1, 0], vec![0, 1, 1, 0, 2]]).unwrap();
        assert_eq!(u.intersect(&f, &u).unwrap(), u);
        assert_eq!(u.sum(&f, &u).unwrap(), u);
    }

    #[test]
    fn two_points() {
        let f = gf(2);
        let a = Subspace::span(&f, 5, &[vec![1, 0, 0, 0, 0]]).unwrap();
        let b = Subspace::span(&f, 5, &[vec![0, 1, 1, 0, 0]]).unwrap();
        assert_eq!(a.intersect(&f, &b).unwrap().dim(), 0);
        assert_eq!(a.sum(&f, &b).unwrap().dim(), 2);
    }

    #[test]
    fn ambient_mismatch() {
        let f = gf(2);
        let a = Subspace::full(4);
        let b = Subspace::full(5);
        assert!(matches!(
            a.intersect(&f, &b),
            Err(GeometryError::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn dual_of_zero_is_everything() {
        let f = gf(3);
        assert_eq!(Subspace::zero(5).dual(&f), Subspace::full(5));
        assert_eq!(Subspace::full(5).dual(&f), Subspace::zero(5));
    }

    fn vec_set(f: &FieldTable, s: &Subspace) -> HashSet<Vec<Elem>> {
        s.vectors(f).into_iter().collect()
    }

    fn arb_rows(q: u32, n: usize, max_rows: usize) -> impl Strategy<Value = Vec<Vec<Elem>>> {
        prop::collection::vec(prop::collection::vec(0..q as Elem, n), 0..=max_rows)
    }

    proptest! {
        // Oracle: membership of every vector, by brute force over GF(q)^n.
        #[test]
        fn span_equals_brute_force_closure(rows in arb_rows(2, 5, 4)) {
            let f = gf(2);
            let s = Subspace::span(&f, 5, &rows).unwrap();
            let mut closure: HashSet<Vec<Elem>> = HashSet::new();
            closure.insert(vec![0; 5]);
            for r in &rows {
                let add: Vec<Vec<Elem>> = closure
                    .iter()
                    .map(|v| v.iter().zip(r).map(|(a, b)| f.add(*a, *b)).collect())
                    .collect();
                closure.extend(add);
            }
            prop_assert_eq!(vec_set(&f, &s), closure);
        }

        #[test]
        fn shuffled_generators_give_identical_rref(
            rows in arb_rows(3, 5, 4),
            perm_seed in any::<u64>(),
            scale in 1..3u8,
        ) {
            let f = gf(3);
            let s = Subspace::span(&f, 5, &rows).unwrap();
            let mut alt = rows.clone();
            let len = alt.len();
            if len > 1 {
                alt.rotate_left((perm_seed as usize) % len);
            }
            // add a scaled copy of one row to another and append a combination
            if len > 1 {
                let extra: Vec<Elem> = alt[0].iter().zip(&alt[1]).map(|(a, b)| f.add(f.mul(scale, *a), *b)).collect();
                alt.push(extra);
                let (head, tail) = alt.split_at_mut(1);
                for (x, y) in head[0].iter_mut().zip(&tail[0]) {
                    *x = f.add(*x, f.mul(scale, *y));
                }
            }
            let t = Subspace::span(&f, 5, &alt).unwrap();
            prop_assert_eq!(s, t);
        }

        #[test]
        fn meet_and_join_match_vector_sets(a in arb_rows(3, 5, 4), b in arb_rows(3, 5, 4)) {
            let f = gf(3);
            let u = Subspace::span(&f, 5, &a).unwrap();
            let w = Subspace::span(&f, 5, &b).unwrap();
            let meet = u.intersect(&f, &w).unwrap();
            let join = u.sum(&f, &w).unwrap();
            prop_assert_eq!(u.dim() + w.dim(), meet.dim() + join.dim());
            let uv = vec_set(&f, &u);
            let common = w.vectors(&f).into_iter().filter(|v| uv.contains(v)).count();
            prop_assert_eq!(common, 3usize.pow(meet.dim() as u32));
            for v in meet.vectors(&f) {
                prop_assert!(u.contains_vector(&f, &v) && w.contains_vector(&f, &v));
            }
            prop_assert!(u.is_subspace_of(&f, &join) && w.is_subspace_of(&f, &join));
        }

        #[test]
        fn dual_is_an_orthogonal_involution(a in arb_rows(3, 5, 5)) {
            let f = gf(3);
            let u = Subspace::span(&f, 5, &a).unwrap();
            let d = u.dual(&f);
            prop_assert_eq!(d.dim(), 5 - u.dim());
            for x in 0..u.dim() {
                for y in 0..d.dim() {
                    let dot = u.row(x).iter().zip(d.row(y)).fold(0, |acc, (s, t)| f.add(acc, f.mul(*s, *t)));
                    prop_assert_eq!(dot, 0);
                }
            }
            prop_assert_eq!(d.dual(&f), u);
        }

        #[test]
        fn modular_dimension_law(a in arb_rows(2, 5, 3), b in arb_rows(2, 5, 3), c in arb_rows(2, 5, 3)) {
            // (A + B) ∩ C ⊇ A + (B ∩ C) whenever A ⊆ C, with equality
            let f = gf(2);
            let cc = Subspace::span(&f, 5, &c).unwrap();
            let aa = Subspace::span(&f, 5, &a).unwrap().intersect(&f, &cc).unwrap();
            let bb = Subspace::span(&f, 5, &b).unwrap();
            let left = aa.sum(&f, &bb).unwrap().intersect(&f, &cc).unwrap();
            let right = aa.sum(&f, &bb.intersect(&f, &cc).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn normalized_points_are_distinct_and_complete() {
        let f = gf(3);
        let u = Subspace::span(&f, 5, &[vec![1, 0, 2, 0, 1], vec![0, 0, 1, 1, 0], vec![0, 1, 0, 0, 0]]).unwrap();
        let pts = u.normalized_points(&f);
        assert_eq!(pts.len(), 13);
        let set: HashSet<_> = pts.iter().cloned().collect();
        assert_eq!(set.len(), 13);
        for p in &pts {
            assert!(u.contains_vector(&f, p));
            assert_eq!(p.iter().find(|&&x| x != 0), Some(&1));
        }
    }

    #[test]
    fn json_round_trip() {
        let f = gf(3);
        let u = Subspace::span(&f, 5, &[vec![0, 2, 1, 0, 0], vec![1, 0, 0, 0, 2]]).unwrap();
        let js = serde_json::to_string(&u.to_json(3)).unwrap();
        let back: SubspaceJson = serde_json::from_str(&js).unwrap();
        assert_eq!(back.to_subspace(&f).unwrap(), u);
    }
}
