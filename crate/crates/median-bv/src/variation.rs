use std::cmp::Ordering;

use crate::caps::caps;
use crate::convexity::compatible_order;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::structure::{Backend, Structure};

/// Absolute slack for comparisons between variation values. Inequality
/// checks treat a deficit up to this as equality; exact fixtures are still
/// asserted exactly.
pub const VARIATION_TOLERANCE: f64 = 1e-9;

/// Real values attached to the points of one structure, with an optional
/// declared range.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFunction {
    values: Vec<f64>,
    range: Option<(f64, f64)>,
}

impl RealFunction {
    pub fn new(values: Vec<f64>) -> Result<RealFunction> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadNumeric { what: "function values must be finite" });
        }
        Ok(RealFunction { values, range: None })
    }

    pub fn with_range(values: Vec<f64>, lo: f64, hi: f64) -> Result<RealFunction> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::BadNumeric { what: "range must be a finite ordered pair" });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < lo || v > hi {
                return Err(Error::ValueOutOfRange { index: i, value: v });
            }
        }
        Ok(RealFunction { values, range: Some((lo, hi)) })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, p: usize) -> f64 {
        self.values[p]
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        self.range
    }

    /// Declared range if present, otherwise the observed min and max.
    pub fn effective_range(&self) -> (f64, f64) {
        if let Some(r) = self.range {
            return r;
        }
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo > hi {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// Values on a subset, relabeled by ascending id. Range carries over.
    pub fn restrict(&self, subset: &PointSet) -> RealFunction {
        let values = subset.iter().map(|p| self.values[p]).collect();
        RealFunction { values, range: self.range }
    }
}

fn check_fn(s: &Structure, f: &RealFunction) -> Result<()> {
    if f.len() != s.n() {
        return Err(Error::LengthMismatch { expected: s.n(), found: f.len() });
    }
    Ok(())
}

/// The doublets of a point set that are adjacent inside the ambient
/// structure: pairs whose ambient interval meets the set in nothing else.
/// Doublets are listed as `(a, b)` with `a < b`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSet {
    pub doublets: Vec<(usize, usize)>,
}

pub fn adjacency_gaps(s: &Structure, set: &PointSet) -> Result<GapSet> {
    if set.ground_size() != s.n() {
        return Err(Error::LengthMismatch { expected: s.n(), found: set.ground_size() });
    }
    if set.is_empty() {
        return Err(Error::EmptyInput { what: "gap scan set" });
    }
    if set.len() == s.n() {
        if let Some(edges) = s.tree_edges() {
            // Tree edges are exactly the adjacent doublets of the full set.
            let mut doublets: Vec<(usize, usize)> =
                edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
            doublets.sort_unstable();
            return Ok(GapSet { doublets });
        }
    }
    Ok(GapSet { doublets: gap_scan(s, set) })
}

/// Quadratic interval scan; the definition, also used as the oracle for the
/// tree edge shortcut.
pub(crate) fn gap_scan(s: &Structure, set: &PointSet) -> Vec<(usize, usize)> {
    let pts = set.to_vec();
    let mut doublets = Vec::new();
    for (i, &a) in pts.iter().enumerate() {
        'pair: for &b in &pts[i + 1..] {
            for &x in &pts {
                if x != a && x != b && s.betw(a, x, b) {
                    continue 'pair;
                }
            }
            doublets.push((a, b));
        }
    }
    doublets
}

/// A variation value together with the point set attaining it and the
/// per-doublet contributions. `value` is always the sum of `contributions`
/// in their listed order, so reports reproduce bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationReport {
    pub value: f64,
    pub witness: Vec<usize>,
    pub contributions: Vec<(usize, usize, f64)>,
}

fn sum_over(f: &RealFunction, doublets: &[(usize, usize)]) -> (f64, Vec<(usize, usize, f64)>) {
    let mut value = 0.0;
    let mut contributions = Vec::with_capacity(doublets.len());
    for &(a, b) in doublets {
        let d = (f.value(a) - f.value(b)).abs();
        value += d;
        contributions.push((a, b, d));
    }
    (value, contributions)
}

/// Checks that `sigma` is median-closed, surfacing what its closure adds.
fn require_subalgebra(s: &Structure, sigma: &PointSet) -> Result<()> {
    let closure = crate::convexity::span(s, sigma)?;
    if &closure != sigma {
        let missing: Vec<usize> =
            closure.iter().filter(|&p| !sigma.contains(p)).collect();
        return Err(Error::NotASubalgebra { missing });
    }
    Ok(())
}

/// Variation of `f` over the adjacent doublets of `sigma`. Strict mode
/// insists `sigma` is a subalgebra; relaxed mode sums over any point set,
/// which is the reading under which non-closed sets can overshoot.
pub fn variation_on(
    s: &Structure,
    f: &RealFunction,
    sigma: &PointSet,
    relaxed: bool,
) -> Result<VariationReport> {
    check_fn(s, f)?;
    if sigma.is_empty() {
        return Err(Error::EmptyInput { what: "sigma" });
    }
    if !relaxed {
        require_subalgebra(s, sigma)?;
    }
    let gaps = adjacency_gaps(s, sigma)?;
    let (value, contributions) = sum_over(f, &gaps.doublets);
    Ok(VariationReport { value, witness: sigma.to_vec(), contributions })
}

/// Total variation: the supremum of `variation_on` over subalgebras.
///
/// On a verified median pretree the full point set dominates, so the value
/// is the single gap sum over the ground set. Anywhere else every subset is
/// tried, which caps the size; ties go to the lexicographically smallest
/// subalgebra. Debug builds cross-check the two routes when both apply.
pub fn total_variation(s: &Structure, f: &RealFunction) -> Result<VariationReport> {
    check_fn(s, f)?;
    if s.is_verified_median_pretree() {
        let report = variation_on(s, f, &PointSet::full(s.n()), true)?;
        #[cfg(debug_assertions)]
        if s.n() <= caps().subalgebra_enum {
            let enumerated = max_over_subalgebras(s, f);
            debug_assert!(
                (enumerated.value - report.value).abs() <= VARIATION_TOLERANCE,
                "ground-set route {} disagrees with enumeration {}",
                report.value,
                enumerated.value
            );
        }
        return Ok(report);
    }
    let limit = caps().subalgebra_enum;
    if s.n() > limit {
        return Err(Error::SizeCapExceeded {
            what: "subalgebra enumeration",
            n: s.n(),
            cap: limit,
        });
    }
    Ok(max_over_subalgebras(s, f))
}

pub(crate) fn max_over_subalgebras(s: &Structure, f: &RealFunction) -> VariationReport {
    let n = s.n();
    let mut med = vec![0u32; n * n * n];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                med[(x * n + y) * n + z] = s.med(x, y, z) as u32;
            }
        }
    }
    let mut interval_masks = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut m = 0u32;
            for x in 0..n {
                if med[(a * n + x) * n + b] == x as u32 {
                    m |= 1 << x;
                }
            }
            interval_masks[a * n + b] = m;
        }
    }
    let mut best: Option<VariationReport> = None;
    'masks: for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&p| mask >> p & 1 == 1).collect();
        for &x in &members {
            for &y in &members {
                for &z in &members {
                    if mask >> med[(x * n + y) * n + z] & 1 == 0 {
                        continue 'masks;
                    }
                }
            }
        }
        let mut doublets = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let inside = interval_masks[a * n + b] & mask;
                if inside == (1 << a) | (1 << b) {
                    doublets.push((a, b));
                }
            }
        }
        let (value, contributions) = sum_over(f, &doublets);
        let candidate = VariationReport { value, witness: members, contributions };
        best = Some(match best.take() {
            None => candidate,
            Some(cur) => pick_max(cur, candidate),
        });
    }
    best.expect("nonempty structure has at least one singleton subalgebra")
}

fn pick_max(cur: VariationReport, candidate: VariationReport) -> VariationReport {
    match candidate.value.partial_cmp(&cur.value).unwrap() {
        Ordering::Greater => candidate,
        Ordering::Less => cur,
        // Witnesses are sorted, so Vec ordering is the lexicographic set order.
        Ordering::Equal if candidate.witness < cur.witness => candidate,
        Ordering::Equal => cur,
    }
}

/// Linear variation: the supremum of `variation_on` over sets that admit a
/// compatible linear order. Chains use the whole chain, stars the best
/// leaf-hub-leaf walk, trees the best leaf-to-leaf path; everything else
/// enumerates subsets under the size cap.
pub fn linear_variation(s: &Structure, f: &RealFunction) -> Result<VariationReport> {
    check_fn(s, f)?;
    match s.backend() {
        Backend::Chain => {
            let doublets: Vec<(usize, usize)> = (1..s.n()).map(|i| (i - 1, i)).collect();
            let (value, contributions) = sum_over(f, &doublets);
            Ok(VariationReport { value, witness: (0..s.n()).collect(), contributions })
        }
        Backend::Star => Ok(star_linear_variation(s, f)),
        Backend::Tree { .. } => Ok(tree_linear_variation(s, f)),
        Backend::Grid { width, height } if *width == 1 || *height == 1 => {
            let doublets: Vec<(usize, usize)> = (1..s.n()).map(|i| (i - 1, i)).collect();
            let (value, contributions) = sum_over(f, &doublets);
            Ok(VariationReport { value, witness: (0..s.n()).collect(), contributions })
        }
        _ => {
            let limit = caps().linear_enum;
            if s.n() > limit {
                return Err(Error::SizeCapExceeded {
                    what: "linear subset enumeration",
                    n: s.n(),
                    cap: limit,
                });
            }
            Ok(max_over_linear_subsets(s, f))
        }
    }
}

fn star_linear_variation(s: &Structure, f: &RealFunction) -> VariationReport {
    let n = s.n();
    if n == 1 {
        return VariationReport { value: 0.0, witness: vec![0], contributions: vec![] };
    }
    if n == 2 {
        let d = (f.value(0) - f.value(1)).abs();
        return VariationReport {
            value: d,
            witness: vec![0, 1],
            contributions: vec![(0, 1, d)],
        };
    }
    // Best leaf-hub-leaf walk; legs scanned ascending so ties keep the
    // smallest leaf pair.
    let leg = |k: usize| (f.value(k) - f.value(0)).abs();
    let (mut bi, mut bj) = (1, 2);
    let mut best = leg(1) + leg(2);
    for i in 1..n {
        for j in i + 1..n {
            let v = leg(i) + leg(j);
            if v > best {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    VariationReport {
        value: best,
        witness: vec![0, bi, bj],
        contributions: vec![(bi, 0, leg(bi)), (0, bj, leg(bj))],
    }
}

fn tree_linear_variation(s: &Structure, f: &RealFunction) -> VariationReport {
    let n = s.n();
    if n == 1 {
        return VariationReport { value: 0.0, witness: vec![0], contributions: vec![] };
    }
    let index = s.tree_index().expect("tree backend");
    // Children-first sweep: deepest points first. Each point keeps its two
    // best downward arm sums; the best path combines them at its apex.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(index.depth[v]));
    let mut down = vec![0.0f64; n];
    let mut top = vec![(0.0f64, 0.0f64); n];
    for &v in &order {
        if v != 0 {
            let p = index.parent[v];
            let arm = down[v] + (f.value(p) - f.value(v)).abs();
            if arm > down[p] {
                down[p] = arm;
            }
            if arm > top[p].0 {
                top[p] = (arm, top[p].0);
            } else if arm > top[p].1 {
                top[p].1 = arm;
            }
        }
    }
    let dp_value = (0..n).map(|v| top[v].0 + top[v].1).fold(0.0f64, f64::max);

    let leaves = s.tree_leaves().expect("tree backend");
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (i, &u) in leaves.iter().enumerate() {
        for &v in &leaves[i + 1..] {
            let path = index.path(u, v);
            let mut value = 0.0;
            for w in path.windows(2) {
                value += (f.value(w[0]) - f.value(w[1])).abs();
            }
            let mut sorted = path.clone();
            sorted.sort_unstable();
            let replace = match &best {
                None => true,
                Some((bv, bp)) => value > *bv || (value == *bv && sorted < *bp),
            };
            if replace {
                best = Some((value, sorted));
            }
        }
    }
    let (value, witness) = best.expect("a tree with two points has two leaves");
    assert!(
        (dp_value - value).abs() <= VARIATION_TOLERANCE,
        "arm sweep {dp_value} disagrees with path enumeration {value}"
    );
    // Contributions along the walk from the smaller endpoint.
    let ends: Vec<usize> = witness
        .iter()
        .copied()
        .filter(|&p| {
            index
                .neighbors[p]
                .iter()
                .filter(|&&q| witness.binary_search(&q).is_ok())
                .count()
                <= 1
        })
        .collect();
    let path = index.path(ends[0], *ends.last().unwrap());
    let mut contributions = Vec::new();
    let mut value_in_order = 0.0;
    for w in path.windows(2) {
        let d = (f.value(w[0]) - f.value(w[1])).abs();
        value_in_order += d;
        contributions.push((w[0], w[1], d));
    }
    VariationReport { value: value_in_order, witness, contributions }
}

/// Exposed for the oracle suites: the arm-sweep value alone.
pub fn tree_linear_variation_arm_sweep(s: &Structure, f: &RealFunction) -> Result<f64> {
    check_fn(s, f)?;
    let index = s.tree_index().ok_or(Error::WrongBackend {
        expected: "tree",
        found: s.backend_name(),
    })?;
    let n = s.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(index.depth[v]));
    let mut down = vec![0.0f64; n];
    let mut top = vec![(0.0f64, 0.0f64); n];
    for &v in &order {
        if v != 0 {
            let p = index.parent[v];
            let arm = down[v] + (f.value(p) - f.value(v)).abs();
            if arm > down[p] {
                down[p] = arm;
            }
            if arm > top[p].0 {
                top[p] = (arm, top[p].0);
            } else if arm > top[p].1 {
                top[p].1 = arm;
            }
        }
    }
    Ok((0..n).map(|v| top[v].0 + top[v].1).fold(0.0f64, f64::max))
}

fn max_over_linear_subsets(s: &Structure, f: &RealFunction) -> VariationReport {
    let n = s.n();
    let mut best: Option<VariationReport> = None;
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&p| mask >> p & 1 == 1).collect();
        let Some(order) = compatible_order(s, &members) else { continue };
        let mut value = 0.0;
        let mut contributions = Vec::new();
        for w in order.windows(2) {
            let d = (f.value(w[0]) - f.value(w[1])).abs();
            value += d;
            contributions.push((w[0], w[1], d));
        }
        let candidate = VariationReport { value, witness: members, contributions };
        best = Some(match best.take() {
            None => candidate,
            Some(cur) => pick_max(cur, candidate),
        });
    }
    best.expect("nonempty structure has singleton linear subsets")
}

/// The part of the gap sum of `sigma` whose doublets lie inside `within`.
pub fn restricted_variation(
    s: &Structure,
    f: &RealFunction,
    sigma: &PointSet,
    within: &PointSet,
) -> Result<f64> {
    check_fn(s, f)?;
    if sigma.is_empty() {
        return Err(Error::EmptyInput { what: "sigma" });
    }
    if within.ground_size() != s.n() {
        return Err(Error::LengthMismatch { expected: s.n(), found: within.ground_size() });
    }
    require_subalgebra(s, sigma)?;
    let gaps = adjacency_gaps(s, sigma)?;
    let mut value = 0.0;
    for &(a, b) in &gaps.doublets {
        if within.contains(a) && within.contains(b) {
            value += (f.value(a) - f.value(b)).abs();
        }
    }
    Ok(value)
}

/// Whether the total variation stays within `r`, up to the pinned tolerance.
pub fn in_bv_r(s: &Structure, f: &RealFunction, r: f64) -> Result<bool> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::BadNumeric { what: "variation bound must be finite and nonnegative" });
    }
    let report = total_variation(s, f)?;
    Ok(report.value <= r + VARIATION_TOLERANCE)
}

/// Leaves of a star whose value differs from the hub value. Base must be
/// the hub. Comparison is exact, intended for palette-valued functions.
pub fn deviation_support(s: &Structure, f: &RealFunction, base: usize) -> Result<PointSet> {
    check_fn(s, f)?;
    s.check_point(base)?;
    if !matches!(s.backend(), Backend::Star) {
        return Err(Error::WrongBackend { expected: "star", found: s.backend_name() });
    }
    if base != 0 {
        return Err(Error::BadStructure("deviation base must be the hub, point 0".into()));
    }
    Ok(PointSet::from_points(
        s.n(),
        (1..s.n()).filter(|&k| f.value(k) != f.value(base)),
    ))
}
