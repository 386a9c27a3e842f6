use std::cmp::Ordering;
use std::fmt;

/// A set of points of one structure, stored as a bitmap over `0..n`.
///
/// Iteration is always in ascending id order, which is what makes reports
/// and witness selection reproducible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    n: usize,
    blocks: Vec<u64>,
}

impl PointSet {
    pub fn empty(n: usize) -> Self {
        PointSet { n, blocks: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for p in 0..n {
            s.insert(p);
        }
        s
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(n: usize, points: I) -> Self {
        let mut s = Self::empty(n);
        for p in points {
            s.insert(p);
        }
        s
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, p: usize) {
        assert!(p < self.n, "point {p} out of range {}", self.n);
        self.blocks[p / 64] |= 1 << (p % 64);
    }

    pub fn remove(&mut self, p: usize) {
        assert!(p < self.n, "point {p} out of range {}", self.n);
        self.blocks[p / 64] &= !(1 << (p % 64));
    }

    pub fn contains(&self, p: usize) -> bool {
        p < self.n && self.blocks[p / 64] >> (p % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn union_with(&mut self, other: &PointSet) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn complement(&self) -> PointSet {
        let mut s = Self::full(self.n);
        for (a, b) in s.blocks.iter_mut().zip(&self.blocks) {
            *a &= !b;
        }
        s
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        assert_eq!(self.n, other.n);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        assert_eq!(self.n, other.n);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & b == 0)
    }

    /// Ascending point ids.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&p| self.contains(p))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Orders sets by their ascending id sequences, shorter prefixes first.
    /// Used to break ties between witnesses of equal value.
    pub fn lex_cmp(&self, other: &PointSet) -> Ordering {
        let mut a = self.iter();
        let mut b = other.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) => match x.cmp(&y) {
                    Ordering::Equal => continue,
                    ord => return ord,
                },
            }
        }
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for PointSet {
    /// Collects into a set sized by the largest id; mostly for tests.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let points: Vec<usize> = iter.into_iter().collect();
        let n = points.iter().max().map_or(0, |&m| m + 1);
        Self::from_points(n, points)
    }
}
