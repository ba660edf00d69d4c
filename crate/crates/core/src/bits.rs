//! Fixed-size bitsets and square bit matrices over `u64` words.

use std::fmt;

#[inline]
pub fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        s.trim();
        s
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert_eq!(words.len(), words_for(len));
        let mut s = BitSet { words, len };
        s.trim();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, it: I) -> Self {
        let mut s = BitSet::new(len);
        for i in it {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> usize {
        count(&self.words)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        or_assign(&mut self.words, &other.words);
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        and_assign(&mut self.words, &other.words);
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        and_not_assign(&mut self.words, &other.words);
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        is_subset(&self.words, &other.words)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        intersects(&self.words, &other.words)
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }

    pub fn first(&self) -> Option<usize> {
        first(&self.words)
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().map(|i| i as u32).collect()
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

// Slice-level helpers used by the hot loops, which keep their own word buffers.

#[inline]
pub fn count(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[inline]
pub fn and_assign(a: &mut [u64], b: &[u64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x &= y);
}

#[inline]
pub fn or_assign(a: &mut [u64], b: &[u64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
}

#[inline]
pub fn and_not_assign(a: &mut [u64], b: &[u64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x &= !y);
}

#[inline]
pub fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

#[inline]
pub fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

#[inline]
pub fn first(a: &[u64]) -> Option<usize> {
    a.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

#[inline]
pub fn test(a: &[u64], i: usize) -> bool {
    a[i >> 6] >> (i & 63) & 1 == 1
}

/// Iterator over set bit positions of a word slice.
pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> Ones<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        Ones {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// Dense square bit matrix, one row per vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        BitMatrix {
            n,
            stride,
            data: vec![0; n * stride],
        }
    }

    pub fn from_rows(n: usize, data: Vec<u64>) -> Self {
        let stride = words_for(n);
        assert_eq!(data.len(), n * stride);
        BitMatrix { n, stride, data }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        test(self.row(i), j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.stride + (j >> 6)] |= 1 << (j & 63);
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{})", self.n, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_ops() {
        let mut a = BitSet::from_indices(130, [0, 5, 64, 129]);
        let b = BitSet::from_indices(130, [5, 129]);
        assert_eq!(a.count(), 4);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 5, 64, 129]);
        a.difference_with(&b);
        assert_eq!(a.to_vec(), vec![0, 64]);
        assert!(!a.intersects(&b));
        assert_eq!(BitSet::full(130).count(), 130);
        assert_eq!(a.first(), Some(0));
    }
}
