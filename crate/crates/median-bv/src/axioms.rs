use crate::caps::caps;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::structure::Structure;

/// A ternary betweenness relation on `0..n`, stored as a bitmap.
/// `holds(a, b, c)` reads "b lies between a and c".
#[derive(Clone, PartialEq, Eq)]
pub struct TernaryRelation {
    n: usize,
    bits: Vec<u64>,
}

impl TernaryRelation {
    pub fn from_fn<F: FnMut(usize, usize, usize) -> bool>(n: usize, mut f: F) -> TernaryRelation {
        let cells = n * n * n;
        let mut bits = vec![0u64; cells.div_ceil(64)];
        let mut idx = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if f(a, b, c) {
                        bits[idx / 64] |= 1 << (idx % 64);
                    }
                    idx += 1;
                }
            }
        }
        TernaryRelation { n, bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn holds(&self, a: usize, b: usize, c: usize) -> bool {
        assert!(a < self.n && b < self.n && c < self.n, "point out of range");
        let idx = (a * self.n + b) * self.n + c;
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// `{x : a .. x .. c}` read straight off the relation.
    pub fn interval(&self, a: usize, c: usize) -> PointSet {
        PointSet::from_points(self.n, (0..self.n).filter(|&x| self.holds(a, x, c)))
    }
}

impl std::fmt::Debug for TernaryRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TernaryRelation(n={})", self.n)
    }
}

/// Betweenness induced by a median: `b` between `a` and `c` when the median
/// of the triple is `b` itself.
pub fn induced_betweenness(s: &Structure) -> TernaryRelation {
    TernaryRelation::from_fn(s.n(), |a, b, c| s.betw(a, b, c))
}

/// One broken law instance: which law, and the points that break it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub law: &'static str,
    pub witness: Vec<usize>,
}

/// Outcome of an axiom scan. `violations` keeps the first few witnesses in
/// scan order; `counts` tallies per law. Every scan except the n^5 M3 sweep
/// runs to completion; M3 may stop once failure is certain and the witness
/// list is full, so its tally is then a lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub checked: Vec<&'static str>,
    pub violations: Vec<Violation>,
    pub counts: Vec<(&'static str, usize)>,
    pub truncated: bool,
}

pub const DEFAULT_VIOLATION_CAP: usize = 10;

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.counts.iter().all(|&(_, c)| c == 0)
    }

    pub fn law_passed(&self, law: &str) -> bool {
        self.counts.iter().all(|&(l, c)| l != law || c == 0)
    }

    fn new(checked: Vec<&'static str>) -> AxiomReport {
        let counts = checked.iter().map(|&l| (l, 0)).collect();
        AxiomReport { checked, violations: Vec::new(), counts, truncated: false }
    }

    fn record(&mut self, cap: usize, law: &'static str, witness: Vec<usize>) {
        for entry in self.counts.iter_mut() {
            if entry.0 == law {
                entry.1 += 1;
            }
        }
        if self.violations.len() < cap {
            self.violations.push(Violation { law, witness });
        } else {
            self.truncated = true;
        }
    }
}

/// Scans the betweenness laws, in both their relational form (B1 symmetry,
/// B2 antisymmetry with reflexive doublets, B3 splitting) and the interval
/// form (A0 endpoints, A1 symmetry, A2 antisymmetry, A3 subdivision). The
/// two readings are provably equivalent, so the scan asserts they agree.
pub fn check_pretree_axioms(r: &TernaryRelation) -> Result<AxiomReport> {
    check_pretree_axioms_capped(r, DEFAULT_VIOLATION_CAP)
}

pub fn check_pretree_axioms_capped(r: &TernaryRelation, cap: usize) -> Result<AxiomReport> {
    let n = r.n;
    let limit = caps().axiom_scan;
    if n > limit {
        return Err(Error::SizeCapExceeded { what: "betweenness axiom scan", n, cap: limit });
    }
    let mut report = AxiomReport::new(vec!["B1", "B2", "B3", "A0", "A1", "A2", "A3"]);

    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if r.holds(a, b, c) && !r.holds(c, b, a) {
                    report.record(cap, "B1", vec![a, b, c]);
                }
                if b != c && r.holds(a, b, c) && r.holds(a, c, b) {
                    report.record(cap, "B2", vec![a, b, c]);
                }
            }
            if !r.holds(a, b, b) {
                report.record(cap, "B2", vec![a, b, b]);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if !r.holds(a, b, c) {
                    continue;
                }
                for d in 0..n {
                    if !r.holds(a, b, d) && !r.holds(d, b, c) {
                        report.record(cap, "B3", vec![a, b, c, d]);
                    }
                }
            }
        }
    }

    for a in 0..n {
        for b in 0..n {
            if !r.holds(a, a, b) || !r.holds(a, b, b) {
                report.record(cap, "A0", vec![a, b]);
            }
            for x in 0..n {
                if r.holds(a, x, b) != r.holds(b, x, a) {
                    report.record(cap, "A1", vec![a, x, b]);
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if b != c && r.holds(a, c, b) && r.holds(a, b, c) {
                    report.record(cap, "A2", vec![a, b, c]);
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for x in 0..n {
                if !r.holds(a, x, b) {
                    continue;
                }
                for c in 0..n {
                    if !r.holds(a, x, c) && !r.holds(c, x, b) {
                        report.record(cap, "A3", vec![a, x, b, c]);
                    }
                }
            }
        }
    }

    let b_pass = ["B1", "B2", "B3"].iter().all(|l| report.law_passed(l));
    let a_pass = ["A0", "A1", "A2", "A3"].iter().all(|l| report.law_passed(l));
    assert_eq!(b_pass, a_pass, "relational and interval law scans disagree");
    Ok(report)
}

/// Scans the median-algebra laws: M1 absorption, M2 full symmetry of the
/// three arguments, M3 the quintuple distributive law. The M3 sweep is n^5;
/// once failure is certain and the witness list is full it stops early.
pub fn check_median_axioms(s: &Structure) -> Result<AxiomReport> {
    check_median_axioms_capped(s, DEFAULT_VIOLATION_CAP)
}

pub fn check_median_axioms_capped(s: &Structure, cap: usize) -> Result<AxiomReport> {
    let n = s.n();
    let limit = caps().axiom_scan;
    if n > limit {
        return Err(Error::SizeCapExceeded { what: "median axiom scan", n, cap: limit });
    }
    let mut report = AxiomReport::new(vec!["M1", "M2", "M3"]);

    for x in 0..n {
        for y in 0..n {
            if s.med(x, x, y) != x {
                report.record(cap, "M1", vec![x, x, y]);
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let m = s.med(x, y, z);
                let all_equal = s.med(y, x, z) == m
                    && s.med(y, z, x) == m
                    && s.med(z, x, y) == m
                    && s.med(z, y, x) == m
                    && s.med(x, z, y) == m;
                if !all_equal {
                    report.record(cap, "M2", vec![x, y, z]);
                }
            }
        }
    }
    'outer: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mxyz = s.med(x, y, z);
                for u in 0..n {
                    for v in 0..n {
                        let lhs = s.med(mxyz, u, v);
                        let rhs = s.med(x, s.med(y, u, v), s.med(z, u, v));
                        if lhs != rhs {
                            report.record(cap, "M3", vec![x, y, z, u, v]);
                            if report.truncated {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Whether the relation is a betweenness with all triple medians present:
/// the laws hold and every triple `a, b, c` has a point common to the three
/// intervals. That common point is provably unique once the laws hold, which
/// the scan asserts.
pub fn is_median_pretree(r: &TernaryRelation) -> Result<bool> {
    let n = r.n;
    let limit = caps().axiom_scan;
    if n > limit {
        return Err(Error::SizeCapExceeded { what: "median pretree scan", n, cap: limit });
    }
    if !check_pretree_axioms_capped(r, 1)?.passed() {
        return Ok(false);
    }
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                let mut found = None;
                for x in 0..n {
                    if r.holds(a, x, b) && r.holds(a, x, c) && r.holds(b, x, c) {
                        assert!(
                            found.is_none(),
                            "laws passed but triple ({a},{b},{c}) has two medians"
                        );
                        found = Some(x);
                    }
                }
                if found.is_none() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Rebuilds the median table of a relation that `is_median_pretree` accepts:
/// each triple maps to the unique point common to its three intervals.
pub fn median_table_from_relation(r: &TernaryRelation) -> Result<Structure> {
    if !is_median_pretree(r)? {
        return Err(Error::BadStructure(
            "relation is not a median-closed betweenness".into(),
        ));
    }
    let n = r.n;
    let mut table = vec![0usize; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let m = (0..n)
                    .find(|&x| r.holds(a, x, b) && r.holds(a, x, c) && r.holds(b, x, c))
                    .expect("accepted relation lost a triple median");
                table[(a * n + b) * n + c] = m;
            }
        }
    }
    Structure::table(n, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_relation_passes_everything() {
        let s = Structure::chain(5).unwrap();
        let r = induced_betweenness(&s);
        let report = check_pretree_axioms(&r).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        assert!(check_median_axioms(&s).unwrap().passed());
        assert!(is_median_pretree(&r).unwrap());
    }

    #[test]
    fn star_and_triod_are_median_pretrees() {
        for s in [
            Structure::star(7).unwrap(),
            Structure::tree(4, vec![(0, 3), (1, 3), (2, 3)]).unwrap(),
        ] {
            let r = induced_betweenness(&s);
            assert!(check_pretree_axioms(&r).unwrap().passed());
            assert!(check_median_axioms(&s).unwrap().passed());
            assert!(is_median_pretree(&r).unwrap());
        }
    }

    #[test]
    fn square_grid_fails_splitting_with_known_witness() {
        let s = Structure::grid(2, 2).unwrap();
        let r = induced_betweenness(&s);
        let report = check_pretree_axioms(&r).unwrap();
        assert!(!report.law_passed("B3"));
        // ids: (0,0)=0 (0,1)=1 (1,0)=2 (1,1)=3; 1 sits between 0 and 3 but
        // neither between 0 and 2 nor between 2 and 3.
        assert!(report
            .violations
            .iter()
            .any(|v| v.law == "B3" && v.witness == vec![0, 1, 3, 2]));
        // It is still a median algebra.
        assert!(check_median_axioms(&s).unwrap().passed());
        assert!(!is_median_pretree(&r).unwrap());
    }

    #[test]
    fn corrupted_table_fails_absorption_with_witness() {
        // Start from the 2-chain and break m(1, 1, 0).
        let mut table = Vec::new();
        let c = Structure::chain(2).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    table.push(c.med(x, y, z));
                }
            }
        }
        table[(1 * 2 + 1) * 2] = 0;
        let s = Structure::table(2, table).unwrap();
        let report = check_median_axioms(&s).unwrap();
        assert!(!report.law_passed("M1"));
        assert_eq!(report.violations[0].witness, vec![1, 1, 0]);
    }

    #[test]
    fn relation_roundtrips_through_rebuilt_table() {
        let s = Structure::tree(6, vec![(0, 1), (1, 2), (2, 3), (2, 4), (4, 5)]).unwrap();
        let r = induced_betweenness(&s);
        let rebuilt = median_table_from_relation(&r).unwrap();
        let r2 = induced_betweenness(&rebuilt);
        assert!(r == r2);
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    assert_eq!(rebuilt.med(x, y, z), s.med(x, y, z));
                }
            }
        }
    }

    #[test]
    fn singleton_table_passes_vacuously() {
        let s = Structure::table(1, vec![0]).unwrap();
        assert!(check_median_axioms(&s).unwrap().passed());
        let r = induced_betweenness(&s);
        assert!(is_median_pretree(&r).unwrap());
    }

    #[test]
    fn violation_list_is_capped_but_counts_are_not() {
        let s = Structure::table(3, vec![2; 27]).unwrap();
        let report = check_median_axioms_capped(&s, 4).unwrap();
        assert!(report.truncated);
        assert_eq!(report.violations.len(), 4);
        let m1_count = report.counts.iter().find(|c| c.0 == "M1").unwrap().1;
        assert!(m1_count > 4);
    }
}
