use crate::caps::caps;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::structure::Structure;

/// A compatible linear order on a point set, listed first to last.
pub type Direction = Vec<usize>;

fn check_set(s: &Structure, a: &PointSet) -> Result<()> {
    if a.ground_size() != s.n() {
        return Err(Error::LengthMismatch { expected: s.n(), found: a.ground_size() });
    }
    Ok(())
}

/// `[a, b]`: every point whose median with the endpoints is itself.
pub fn interval(s: &Structure, a: usize, b: usize) -> Result<PointSet> {
    s.check_point(a)?;
    s.check_point(b)?;
    Ok(PointSet::from_points(s.n(), (0..s.n()).filter(|&x| s.betw(a, x, b))))
}

/// Convex: contains the full interval of each of its pairs.
pub fn is_convex(s: &Structure, set: &PointSet) -> Result<bool> {
    check_set(s, set)?;
    let pts = set.to_vec();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i..] {
            for x in 0..s.n() {
                if s.betw(a, x, b) && !set.contains(x) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Smallest convex superset, by sweeping pairwise intervals to a fixpoint.
/// On a verified median pretree one sweep provably suffices, which the loop
/// asserts by counting.
pub fn convex_hull(s: &Structure, set: &PointSet) -> Result<PointSet> {
    check_set(s, set)?;
    if set.is_empty() {
        return Ok(set.clone());
    }
    let mut cur = set.clone();
    let mut sweeps = 0usize;
    loop {
        sweeps += 1;
        let mut next = cur.clone();
        let pts = cur.to_vec();
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i..] {
                for x in 0..s.n() {
                    if s.betw(a, x, b) {
                        next.insert(x);
                    }
                }
            }
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    assert!(
        !(s.is_verified_median_pretree() && sweeps > 2),
        "pairwise intervals of a median pretree needed {sweeps} sweeps"
    );
    Ok(cur)
}

/// Smallest median-closed superset. Closes under all ordered triples so the
/// answer is meaningful even for defective tables.
pub fn span(s: &Structure, set: &PointSet) -> Result<PointSet> {
    check_set(s, set)?;
    let mut cur = set.clone();
    loop {
        let mut next = cur.clone();
        let pts = cur.to_vec();
        for &x in &pts {
            for &y in &pts {
                for &z in &pts {
                    next.insert(s.med(x, y, z));
                }
            }
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    debug_assert!(
        cur.is_subset(&convex_hull(s, set)?),
        "median closure escaped the convex hull"
    );
    Ok(cur)
}

/// Some point of the triple lies between the other two.
pub fn is_collinear(s: &Structure, a: usize, b: usize, c: usize) -> Result<bool> {
    s.check_point(a)?;
    s.check_point(b)?;
    s.check_point(c)?;
    Ok(s.betw(a, b, c) || s.betw(b, a, c) || s.betw(a, c, b))
}

/// Every triple of the set is collinear. This is a necessary condition for
/// a compatible linear order but on non-pretree structures not a sufficient
/// one; `directions` is the sufficient test.
pub fn is_linear(s: &Structure, set: &PointSet) -> Result<bool> {
    check_set(s, set)?;
    let pts = set.to_vec();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            for &c in &pts[i + 1..] {
                if b < c && !is_collinear(s, a, b, c)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Tries to lay the set out on a line so that the structure's median of any
/// triple is the order middle. Returns the order first to last, or None.
///
/// Route: pick the smallest point that is not interior to any pair of the
/// set, rank everything by how much of the set sits between that end and it,
/// then verify every triple. The verification step makes the choice of end
/// safe even on sets that admit no order at all.
pub(crate) fn compatible_order(s: &Structure, pts: &[usize]) -> Option<Vec<usize>> {
    if pts.len() <= 1 {
        return Some(pts.to_vec());
    }
    let end = pts.iter().copied().find(|&u| {
        pts.iter().all(|&x| {
            pts.iter().all(|&y| x == u || y == u || !s.betw(x, u, y))
        })
    })?;
    let mut ranked: Vec<(usize, usize)> = pts
        .iter()
        .map(|&x| {
            let rank = pts.iter().filter(|&&z| s.betw(end, z, x)).count();
            (rank, x)
        })
        .collect();
    ranked.sort_unstable();
    for window in ranked.windows(2) {
        if window[0].0 == window[1].0 {
            return None;
        }
    }
    let order: Vec<usize> = ranked.into_iter().map(|(_, x)| x).collect();
    for i in 0..order.len() {
        for j in 0..order.len() {
            for k in 0..order.len() {
                let middle = order[i.max(j).min(i.max(k)).min(j.max(k))];
                if s.med(order[i], order[j], order[k]) != middle {
                    return None;
                }
            }
        }
    }
    Some(order)
}

/// The two walks of a set that admits a compatible linear order: the order
/// and its reverse. Sets with fewer than two points yield the trivial walk
/// twice.
pub fn directions(s: &Structure, set: &PointSet) -> Result<(Direction, Direction)> {
    check_set(s, set)?;
    let pts = set.to_vec();
    let order = compatible_order(s, &pts).ok_or(Error::NotLinear)?;
    let mut back = order.clone();
    back.reverse();
    Ok((order, back))
}

fn check_map(src: &Structure, map: &[usize], dst: &Structure) -> Result<()> {
    if map.len() != src.n() {
        return Err(Error::LengthMismatch { expected: src.n(), found: map.len() });
    }
    for &v in map {
        dst.check_point(v)?;
    }
    Ok(())
}

/// Image of every interval lands in the interval of the endpoint images.
pub fn is_monotone(src: &Structure, map: &[usize], dst: &Structure) -> Result<bool> {
    check_map(src, map, dst)?;
    for a in 0..src.n() {
        for b in a..src.n() {
            for x in 0..src.n() {
                if src.betw(a, x, b) && !dst.betw(map[a], map[x], map[b]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The map commutes with the median on every triple.
pub fn is_median_preserving(src: &Structure, map: &[usize], dst: &Structure) -> Result<bool> {
    check_map(src, map, dst)?;
    for x in 0..src.n() {
        for y in 0..src.n() {
            for z in 0..src.n() {
                if map[src.med(x, y, z)] != dst.med(map[x], map[y], map[z]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// All convex subsets of a structure, as bitmasks. Capped: the sweep is 2^n.
pub(crate) fn convex_subset_masks(s: &Structure) -> Result<Vec<u64>> {
    let n = s.n();
    let limit = caps().convex_enum;
    if n > limit {
        return Err(Error::SizeCapExceeded { what: "convex subset enumeration", n, cap: limit });
    }
    let mut interval_masks = vec![0u64; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut m = 0u64;
            for x in 0..n {
                if s.betw(a, x, b) {
                    m |= 1 << x;
                }
            }
            interval_masks[a * n + b] = m;
        }
    }
    let mut out = Vec::new();
    'subsets: for mask in 0u64..(1 << n) {
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut rest2 = rest;
            while rest2 != 0 {
                let b = rest2.trailing_zeros() as usize;
                rest2 &= rest2 - 1;
                if interval_masks[a * n + b] & !mask != 0 {
                    continue 'subsets;
                }
            }
        }
        out.push(mask);
    }
    Ok(out)
}

/// Enumerates convex subsets as point sets, empty set first, then by the
/// usual mask order.
pub fn enumerate_convex_subsets(s: &Structure) -> Result<Vec<PointSet>> {
    let masks = convex_subset_masks(s)?;
    Ok(masks
        .into_iter()
        .map(|m| PointSet::from_points(s.n(), (0..s.n()).filter(|&p| m >> p & 1 == 1)))
        .collect())
}

/// Preimages of convex sets are convex. Enumerates the destination's convex
/// subsets, so the destination is capped.
pub fn is_convexity_preserving(src: &Structure, map: &[usize], dst: &Structure) -> Result<bool> {
    check_map(src, map, dst)?;
    let dst_convex = convex_subset_masks(dst)?;
    for mask in dst_convex {
        let mut pre = PointSet::empty(src.n());
        for (p, &v) in map.iter().enumerate() {
            if mask >> v & 1 == 1 {
                pre.insert(p);
            }
        }
        if !is_convex(src, &pre)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Monotone into the real line seen as a chain: for every between-triple the
/// middle value lies in the closed interval of the endpoint values.
pub fn is_monotone_real(s: &Structure, values: &[f64]) -> Result<bool> {
    if values.len() != s.n() {
        return Err(Error::LengthMismatch { expected: s.n(), found: values.len() });
    }
    for a in 0..s.n() {
        for b in a..s.n() {
            let lo = values[a].min(values[b]);
            let hi = values[a].max(values[b]);
            for x in 0..s.n() {
                if s.betw(a, x, b) && !(lo <= values[x] && values[x] <= hi) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triod() -> Structure {
        Structure::tree(4, vec![(0, 3), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn triod_intervals_pass_through_center() {
        let s = triod();
        assert_eq!(interval(&s, 0, 1).unwrap().to_vec(), vec![0, 1, 3]);
        assert_eq!(interval(&s, 0, 3).unwrap().to_vec(), vec![0, 3]);
        assert_eq!(interval(&s, 2, 2).unwrap().to_vec(), vec![2]);
    }

    #[test]
    fn square_diagonal_interval_is_everything() {
        let s = Structure::grid(2, 2).unwrap();
        assert_eq!(interval(&s, 0, 3).unwrap().to_vec(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn chain_hull_fills_the_gap() {
        let s = Structure::chain(4).unwrap();
        let a = PointSet::from_points(4, [0, 3]);
        assert_eq!(convex_hull(&s, &a).unwrap().to_vec(), vec![0, 1, 2, 3]);
        assert!(is_convex(&s, &convex_hull(&s, &a).unwrap()).unwrap());
        assert!(!is_convex(&s, &a).unwrap());
    }

    #[test]
    fn span_can_be_smaller_than_hull() {
        let s = Structure::star(6).unwrap();
        let pair = PointSet::from_points(6, [1, 2]);
        assert_eq!(span(&s, &pair).unwrap().to_vec(), vec![1, 2]);
        assert_eq!(convex_hull(&s, &pair).unwrap().to_vec(), vec![0, 1, 2]);

        let triple = PointSet::from_points(6, [1, 2, 4]);
        let sp = span(&s, &triple).unwrap();
        assert_eq!(sp.to_vec(), vec![0, 1, 2, 4]);
        assert!(sp.is_subset(&convex_hull(&s, &triple).unwrap()));
    }

    #[test]
    fn cube_corner_hull_needs_two_sweeps() {
        // Three corners of a combinatorial cube: the first sweep misses the
        // far corner, the fixpoint picks it up. Built as a table.
        let mut table = Vec::new();
        for x in 0..8usize {
            for y in 0..8usize {
                for z in 0..8usize {
                    table.push((x & y) | (y & z) | (x & z));
                }
            }
        }
        let s = Structure::table(8, table).unwrap();
        let a = PointSet::from_points(8, [0b110, 0b011, 0b101]);
        let hull = convex_hull(&s, &a).unwrap();
        assert_eq!(hull.len(), 8, "three spread corners of a cube hull to the whole cube");
    }

    #[test]
    fn collinearity_and_linearity_on_the_triod() {
        let s = triod();
        assert!(is_collinear(&s, 0, 3, 1).unwrap());
        assert!(!is_collinear(&s, 0, 1, 2).unwrap());
        assert!(is_linear(&s, &PointSet::from_points(4, [0, 3, 1])).unwrap());
        assert!(!is_linear(&s, &PointSet::from_points(4, [0, 1, 2])).unwrap());
    }

    #[test]
    fn directions_walk_leaf_center_leaf() {
        let s = triod();
        let set = PointSet::from_points(4, [0, 1, 3]);
        let (fwd, back) = directions(&s, &set).unwrap();
        assert_eq!(fwd, vec![0, 3, 1]);
        assert_eq!(back, vec![1, 3, 0]);
        assert_eq!(directions(&s, &PointSet::from_points(4, [2])).unwrap().0, vec![2]);
        assert_eq!(directions(&s, &PointSet::full(4)), Err(Error::NotLinear));
    }

    #[test]
    fn square_cycle_is_collinear_but_admits_no_order() {
        // All four triples of the square are collinear, yet no linear order
        // reproduces the medians: collinearity alone is not enough.
        let s = Structure::grid(2, 2).unwrap();
        let all = PointSet::full(4);
        assert!(is_linear(&s, &all).unwrap());
        assert_eq!(directions(&s, &all), Err(Error::NotLinear));
    }

    #[test]
    fn chi_right_column_is_monotone_on_grids() {
        let s = Structure::grid(2, 5).unwrap();
        let two = Structure::chain(2).unwrap();
        let map: Vec<usize> = (0..10).map(|p| p % 2).collect();
        assert!(is_monotone(&s, &map, &two).unwrap());
        assert!(is_median_preserving(&s, &map, &two).unwrap());
        assert!(is_convexity_preserving(&s, &map, &two).unwrap());
    }

    #[test]
    fn chi_hub_is_not_monotone_on_stars() {
        let s = Structure::star(4).unwrap();
        let two = Structure::chain(2).unwrap();
        let map = vec![1, 0, 0, 0];
        assert!(!is_monotone(&s, &map, &two).unwrap());
        assert!(!is_median_preserving(&s, &map, &two).unwrap());
        assert!(!is_convexity_preserving(&s, &map, &two).unwrap());
        assert!(!is_monotone_real(&s, &[1.0, 0.0, 0.0, 0.0]).unwrap());
    }
}
