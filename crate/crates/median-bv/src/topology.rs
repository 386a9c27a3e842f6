use std::collections::HashSet;

use crate::axioms::TernaryRelation;
use crate::caps::caps;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::variation::RealFunction;

/// A topology on points `0..n`, kept as the full family of open sets in
/// bitmask form. Construction checks the lattice laws, so every value of
/// this type is a genuine topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTopology {
    n: usize,
    /// All open sets, ascending by mask value. Contains 0 and the full mask.
    opens: Vec<u64>,
    /// The same opens ordered by (popcount, mask); small opens make both
    /// the fragmentability scan and neighborhood queries cheap.
    by_size: Vec<u64>,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn mask_of(set: &PointSet) -> u64 {
    set.iter().fold(0u64, |m, p| m | 1 << p)
}

fn set_of(n: usize, mask: u64) -> PointSet {
    PointSet::from_points(n, (0..n).filter(|&p| mask >> p & 1 == 1))
}

impl FiniteTopology {
    pub fn new(n: usize, opens: &[PointSet]) -> Result<FiniteTopology> {
        if n == 0 || n > 63 {
            return Err(Error::BadTopology(format!(
                "point count {n} outside the supported range 1..=63"
            )));
        }
        let mut masks: Vec<u64> = Vec::with_capacity(opens.len() + 2);
        for set in opens {
            if set.ground_size() != n {
                return Err(Error::BadTopology(format!(
                    "open set declared over {} points, topology has {}",
                    set.ground_size(),
                    n
                )));
            }
            masks.push(mask_of(set));
        }
        masks.push(0);
        masks.push(full_mask(n));
        masks.sort_unstable();
        masks.dedup();
        let member: HashSet<u64> = masks.iter().copied().collect();
        for (i, &a) in masks.iter().enumerate() {
            for &b in &masks[i + 1..] {
                if !member.contains(&(a | b)) {
                    return Err(Error::BadTopology(format!(
                        "family is not closed under union: {:?} | {:?}",
                        set_of(n, a),
                        set_of(n, b)
                    )));
                }
                if !member.contains(&(a & b)) {
                    return Err(Error::BadTopology(format!(
                        "family is not closed under intersection: {:?} & {:?}",
                        set_of(n, a),
                        set_of(n, b)
                    )));
                }
            }
        }
        Ok(FiniteTopology::from_lattice(n, masks))
    }

    /// Internal constructor for families already closed by construction.
    pub(crate) fn from_lattice(n: usize, mut masks: Vec<u64>) -> FiniteTopology {
        masks.sort_unstable();
        masks.dedup();
        let mut by_size = masks.clone();
        by_size.sort_unstable_by_key(|&m| (m.count_ones(), m));
        FiniteTopology { n, opens: masks, by_size }
    }

    pub fn discrete(n: usize) -> Result<FiniteTopology> {
        if n == 0 || n > 20 {
            return Err(Error::BadTopology(format!(
                "discrete topology on {n} points is outside the supported range 1..=20"
            )));
        }
        Ok(FiniteTopology::from_lattice(n, (0..=full_mask(n)).collect()))
    }

    pub fn indiscrete(n: usize) -> Result<FiniteTopology> {
        if n == 0 || n > 63 {
            return Err(Error::BadTopology(format!(
                "point count {n} outside the supported range 1..=63"
            )));
        }
        Ok(FiniteTopology::from_lattice(n, vec![0, full_mask(n)]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn open_count(&self) -> usize {
        self.opens.len()
    }

    pub fn opens(&self) -> Vec<PointSet> {
        self.opens.iter().map(|&m| set_of(self.n, m)).collect()
    }

    pub fn is_open(&self, set: &PointSet) -> bool {
        assert_eq!(set.ground_size(), self.n, "set lives on a different ground set");
        self.opens.binary_search(&mask_of(set)).is_ok()
    }

    pub fn is_closed(&self, set: &PointSet) -> bool {
        assert_eq!(set.ground_size(), self.n, "set lives on a different ground set");
        self.opens.binary_search(&(!mask_of(set) & full_mask(self.n))).is_ok()
    }

    /// Smallest closed superset.
    pub fn closure(&self, set: &PointSet) -> PointSet {
        assert_eq!(set.ground_size(), self.n, "set lives on a different ground set");
        set_of(self.n, self.closure_mask(mask_of(set)))
    }

    fn closure_mask(&self, target: u64) -> u64 {
        let full = full_mask(self.n);
        let mut acc = full;
        for &open in &self.opens {
            let closed = !open & full;
            if closed & target == target {
                acc &= closed;
            }
        }
        acc
    }

    /// The smallest open set containing `x`: the intersection of all opens
    /// through `x`, itself open because the family is finite.
    pub fn minimal_neighborhood(&self, x: usize) -> PointSet {
        set_of(self.n, self.min_nbhd_mask(x))
    }

    fn min_nbhd_mask(&self, x: usize) -> u64 {
        assert!(x < self.n, "point out of range");
        let bit = 1u64 << x;
        // by_size is ascending in popcount, so the first open through x is
        // contained in every other one exactly when the topology is sane;
        // intersecting anyway keeps this independent of that observation.
        self.by_size.iter().filter(|&&m| m & bit != 0).fold(full_mask(self.n), |a, &m| a & m)
    }

    /// Distinct points always separated by disjoint opens. The minimal
    /// neighborhoods are the best candidates, so only they are checked.
    pub fn is_hausdorff(&self) -> bool {
        let nbhd: Vec<u64> = (0..self.n).map(|x| self.min_nbhd_mask(x)).collect();
        for x in 0..self.n {
            for y in x + 1..self.n {
                if nbhd[x] & nbhd[y] != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Subspace topology on `subset`, relabeled by ascending id.
    pub fn trace(&self, subset: &PointSet) -> FiniteTopology {
        assert_eq!(subset.ground_size(), self.n, "set lives on a different ground set");
        assert!(!subset.is_empty(), "subspace needs at least one point");
        let points = subset.to_vec();
        let relabel = |mask: u64| -> u64 {
            points
                .iter()
                .enumerate()
                .filter(|&(_, &p)| mask >> p & 1 == 1)
                .fold(0u64, |m, (i, _)| m | 1 << i)
        };
        let sub = mask_of(subset);
        let masks: Vec<u64> = self.opens.iter().map(|&o| relabel(o & sub)).collect();
        FiniteTopology::from_lattice(points.len(), masks)
    }
}

/// The set of points `x` with `u` between `x` and `v`. Everything on the
/// far side of `u` as seen from `v`, including `u` itself.
pub fn shadow(r: &TernaryRelation, u: usize, v: usize) -> Result<PointSet> {
    let n = r.n();
    if u >= n {
        return Err(Error::PointOutOfRange { point: u, n });
    }
    if v >= n {
        return Err(Error::PointOutOfRange { point: v, n });
    }
    if u == v {
        return Err(Error::DistinctPointsRequired { point: u });
    }
    Ok(PointSet::from_points(n, (0..n).filter(|&x| r.holds(x, u, v))))
}

/// Complement of the shadow of `(u, v)`.
pub fn branch(r: &TernaryRelation, u: usize, v: usize) -> Result<PointSet> {
    Ok(shadow(r, u, v)?.complement())
}

/// The topology whose closed sets are generated from all shadows by finite
/// unions and intersections. Built by closing the shadow family under the
/// two lattice operations, so no validation pass is needed.
pub fn shadow_topology(r: &TernaryRelation) -> Result<FiniteTopology> {
    let n = r.n();
    let limit = caps().topology;
    if n > limit {
        return Err(Error::SizeCapExceeded { what: "shadow topology", n, cap: limit });
    }
    let full = full_mask(n);
    let mut seeds: Vec<u64> = vec![0, full];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                seeds.push(mask_of(&shadow(r, u, v)?));
            }
        }
    }
    let closed = lattice_close(seeds);
    let opens: Vec<u64> = closed.into_iter().map(|m| !m & full).collect();
    Ok(FiniteTopology::from_lattice(n, opens))
}

/// Close a mask family under pairwise union and intersection.
fn lattice_close(seeds: Vec<u64>) -> Vec<u64> {
    let mut family: Vec<u64> = Vec::new();
    let mut member: HashSet<u64> = HashSet::new();
    let mut queue: Vec<u64> = seeds;
    while let Some(m) = queue.pop() {
        if !member.insert(m) {
            continue;
        }
        for &other in &family {
            let u = m | other;
            if !member.contains(&u) {
                queue.push(u);
            }
            let i = m & other;
            if !member.contains(&i) {
                queue.push(i);
            }
        }
        family.push(m);
    }
    family
}

fn check_topology_fn(t: &FiniteTopology, f: &RealFunction, what: &'static str) -> Result<()> {
    if f.len() != t.n() {
        return Err(Error::LengthMismatch { expected: t.n(), found: f.len() });
    }
    let limit = caps().fragment;
    if t.n() > limit {
        return Err(Error::SizeCapExceeded { what, n: t.n(), cap: limit });
    }
    Ok(())
}

/// Whether every nonempty subset has a relatively open piece on which `f`
/// is constant. With finitely many values the arbitrarily-small-diameter
/// requirement collapses to constancy, and it is enough to test the
/// minimal neighborhood of each point of the subset.
pub fn is_fragmented(t: &FiniteTopology, f: &RealFunction) -> Result<bool> {
    check_topology_fn(t, f, "fragmentability scan")?;
    let n = t.n();
    let nbhd: Vec<u64> = (0..n).map(|x| t.min_nbhd_mask(x)).collect();
    'subsets: for a in 1..=full_mask(n) {
        for x in 0..n {
            if a >> x & 1 == 0 {
                continue;
            }
            let piece = nbhd[x] & a;
            let mut value = None;
            let constant = (0..n).filter(|&p| piece >> p & 1 == 1).all(|p| {
                let v = f.value(p);
                match value {
                    None => {
                        value = Some(v);
                        true
                    }
                    Some(w) => v == w,
                }
            });
            if constant {
                continue 'subsets;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// A closed set on which a function oscillates densely across two
/// thresholds: both strict preimages have closure equal to the whole set.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationWitness {
    pub y: PointSet,
    pub alpha: f64,
    pub beta: f64,
}

/// Search for an oscillation witness. Closed sets are tried smallest first,
/// thresholds come from the sorted distinct values of `f`: midpoints of two
/// different consecutive-value gaps, or the quarter points of a single gap.
/// The finite-space equivalence is asserted: a witness exists exactly when
/// `f` is not fragmented.
pub fn unfragmented_witness(
    t: &FiniteTopology,
    f: &RealFunction,
) -> Result<Option<OscillationWitness>> {
    check_topology_fn(t, f, "oscillation witness search")?;
    let fragmented = is_fragmented(t, f)?;
    let witness = witness_search(t, f);
    assert_eq!(
        witness.is_some(),
        !fragmented,
        "oscillation witness must exist exactly on unfragmented input"
    );
    Ok(witness)
}

fn witness_search(t: &FiniteTopology, f: &RealFunction) -> Option<OscillationWitness> {
    let n = t.n();
    let full = full_mask(n);
    let mut values: Vec<f64> = f.values().to_vec();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();
    if values.len() < 2 {
        return None;
    }
    let mut thresholds: Vec<(f64, f64)> = Vec::new();
    for i in 0..values.len() - 1 {
        for j in i..values.len() - 1 {
            if i == j {
                let (lo, hi) = (values[i], values[i + 1]);
                thresholds.push((lo + (hi - lo) / 4.0, lo + 3.0 * (hi - lo) / 4.0));
            } else {
                let mid = |k: usize| (values[k] + values[k + 1]) / 2.0;
                thresholds.push((mid(i), mid(j)));
            }
        }
    }
    let mut closed: Vec<u64> = t.opens.iter().map(|&o| !o & full).filter(|&c| c != 0).collect();
    closed.sort_unstable_by_key(|&m| (m.count_ones(), m));
    for &y in &closed {
        for &(alpha, beta) in &thresholds {
            let lo = (0..n).filter(|&p| y >> p & 1 == 1 && f.value(p) < alpha).fold(0u64, |m, p| m | 1 << p);
            let hi = (0..n).filter(|&p| y >> p & 1 == 1 && f.value(p) > beta).fold(0u64, |m, p| m | 1 << p);
            if lo != 0 && hi != 0 && t.closure_mask(lo) == y && t.closure_mask(hi) == y {
                return Some(OscillationWitness { y: set_of(n, y), alpha, beta });
            }
        }
    }
    None
}

/// Validates a finite closed cover and reports fragmentability of the whole
/// function. The interesting half is the suite property: when every
/// restriction to a cover piece is fragmented in the trace topology, the
/// whole must be too.
pub fn check_closed_cover_fragmentation(
    t: &FiniteTopology,
    f: &RealFunction,
    cover: &[PointSet],
) -> Result<bool> {
    check_topology_fn(t, f, "fragmentability scan")?;
    if cover.is_empty() {
        return Err(Error::BadCover("cover has no pieces".into()));
    }
    let mut union = 0u64;
    for (i, piece) in cover.iter().enumerate() {
        if piece.ground_size() != t.n() {
            return Err(Error::BadCover(format!("piece {i} lives on a different ground set")));
        }
        if !t.is_closed(piece) {
            return Err(Error::BadCover(format!("piece {i} is not closed")));
        }
        union |= mask_of(piece);
    }
    if union != full_mask(t.n()) {
        return Err(Error::BadCover("pieces do not cover every point".into()));
    }
    is_fragmented(t, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::induced_betweenness;
    use crate::structure::Structure;

    fn sierpinski() -> FiniteTopology {
        FiniteTopology::new(2, &[PointSet::from_points(2, [1])]).unwrap()
    }

    #[test]
    fn star_shadow_behind_hub_is_everything_but_the_leaf() {
        let r = induced_betweenness(&Structure::star(5).unwrap());
        let s = shadow(&r, 0, 1).unwrap();
        assert_eq!(s.to_vec(), vec![0, 2, 3, 4]);
        assert_eq!(branch(&r, 0, 1).unwrap().to_vec(), vec![1]);
        assert_eq!(shadow(&r, 1, 1), Err(Error::DistinctPointsRequired { point: 1 }));
    }

    #[test]
    fn chain_shadow_is_a_ray() {
        let r = induced_betweenness(&Structure::chain(3).unwrap());
        assert_eq!(shadow(&r, 1, 0).unwrap().to_vec(), vec![1, 2]);
    }

    #[test]
    fn shadows_keep_u_and_drop_v() {
        let s = Structure::tree(4, vec![(0, 3), (1, 3), (2, 3)]).unwrap();
        let r = induced_betweenness(&s);
        for u in 0..4 {
            for v in 0..4 {
                if u != v {
                    let sh = shadow(&r, u, v).unwrap();
                    assert!(sh.contains(u));
                    assert!(!sh.contains(v));
                }
            }
        }
    }

    #[test]
    fn pretree_shadow_topologies_are_discrete() {
        for s in [
            Structure::chain(5).unwrap(),
            Structure::star(6).unwrap(),
            Structure::tree(4, vec![(0, 3), (1, 3), (2, 3)]).unwrap(),
        ] {
            let t = shadow_topology(&induced_betweenness(&s)).unwrap();
            assert_eq!(t.open_count(), 1 << s.n());
            assert!(t.is_hausdorff());
        }
    }

    #[test]
    fn single_point_shadow_topology_is_indiscrete() {
        let t = shadow_topology(&induced_betweenness(&Structure::chain(1).unwrap())).unwrap();
        assert_eq!(t.open_count(), 2);
    }

    #[test]
    fn construction_rejects_a_missing_union() {
        let opens = [PointSet::from_points(3, [0]), PointSet::from_points(3, [1])];
        assert!(matches!(FiniteTopology::new(3, &opens), Err(Error::BadTopology(_))));
    }

    #[test]
    fn sierpinski_space_basics() {
        let t = sierpinski();
        assert!(!t.is_hausdorff());
        assert_eq!(t.closure(&PointSet::from_points(2, [0])).to_vec(), vec![0]);
        assert_eq!(t.closure(&PointSet::from_points(2, [1])).to_vec(), vec![0, 1]);
        let f = RealFunction::new(vec![0.0, 1.0]).unwrap();
        assert!(is_fragmented(&t, &f).unwrap());
        assert_eq!(unfragmented_witness(&t, &f).unwrap(), None);
    }

    #[test]
    fn indiscrete_two_points_oscillate() {
        let t = FiniteTopology::indiscrete(2).unwrap();
        let f = RealFunction::new(vec![0.0, 1.0]).unwrap();
        assert!(!is_fragmented(&t, &f).unwrap());
        let w = unfragmented_witness(&t, &f).unwrap().unwrap();
        assert_eq!(w.y.to_vec(), vec![0, 1]);
        assert_eq!((w.alpha, w.beta), (0.25, 0.75));

        let constant = RealFunction::new(vec![0.5, 0.5]).unwrap();
        assert!(is_fragmented(&t, &constant).unwrap());
        assert_eq!(unfragmented_witness(&t, &constant).unwrap(), None);
    }

    #[test]
    fn intervals_are_closed_in_the_shadow_topology() {
        let s = Structure::tree(4, vec![(0, 3), (1, 3), (2, 3)]).unwrap();
        let t = shadow_topology(&induced_betweenness(&s)).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert!(t.is_closed(&crate::convexity::interval(&s, a, b).unwrap()));
            }
        }
    }

    #[test]
    fn trace_of_discrete_is_discrete() {
        let t = shadow_topology(&induced_betweenness(&Structure::chain(5).unwrap())).unwrap();
        let sub = t.trace(&PointSet::from_points(5, [1, 3]));
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.open_count(), 4);
    }

    #[test]
    fn cover_check_validates_the_pieces() {
        let t = FiniteTopology::discrete(3).unwrap();
        let f = RealFunction::new(vec![0.0, 1.0, 2.0]).unwrap();
        let whole = [PointSet::full(3)];
        assert!(check_closed_cover_fragmentation(&t, &f, &whole).unwrap());
        let short = [PointSet::from_points(3, [0, 1])];
        assert!(matches!(
            check_closed_cover_fragmentation(&t, &f, &short),
            Err(Error::BadCover(_))
        ));
        let open_piece = [PointSet::from_points(2, [1])];
        assert!(check_closed_cover_fragmentation(&t, &f, &open_piece).is_err());
    }
}
