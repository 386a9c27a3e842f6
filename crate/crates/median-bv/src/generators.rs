use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::convexity::{convex_hull, is_monotone, is_monotone_real, span};
use crate::error::Result;
use crate::pointset::PointSet;
use crate::structure::Structure;
use crate::topology::FiniteTopology;
use crate::variation::RealFunction;

/// Default attempt budget for rejection samplers.
pub const DEFAULT_MAX_TRIES: usize = 10_000;

/// Splitmix-style mixing so each trial of a suite gets an independent
/// stream from (suite seed, trial index).
pub fn derived_seed(suite_seed: u64, trial: u64) -> u64 {
    let mut z = suite_seed
        .wrapping_add(trial.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform labeled tree by decoding a random length-(n-2) vertex sequence.
pub fn random_tree(n: usize, seed: u64) -> Result<Structure> {
    let mut rng = rng_for(seed);
    if n <= 2 {
        return Structure::tree(n, if n == 2 { vec![(0, 1)] } else { vec![] });
    }
    let sequence: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &a in &sequence {
        degree[a] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &a in &sequence {
        let leaf = (0..n).find(|&i| degree[i] == 1).expect("decode keeps a leaf");
        edges.push((leaf, a));
        degree[leaf] -= 1;
        degree[a] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    Structure::tree(n, edges)
}

/// I.i.d. values on a 1/1024 lattice of the range. The lattice keeps sums
/// of absolute differences exact in binary floating point whenever the
/// endpoints are dyadic, which lets dual-route suites assert equality
/// rather than closeness.
pub fn random_function(s: &Structure, range: (f64, f64), seed: u64) -> Result<RealFunction> {
    let mut rng = rng_for(seed);
    let (c, d) = range;
    let values = (0..s.n())
        .map(|_| c + (d - c) * (rng.gen_range(0..=1024u32) as f64 / 1024.0))
        .collect();
    RealFunction::with_range(values, c, d)
}

/// Rejection-sampled monotone map. Candidate maps are uniform; absence
/// after `max_tries` attempts is reported rather than looping.
pub fn random_monotone_map(
    src: &Structure,
    dst: &Structure,
    seed: u64,
    max_tries: usize,
) -> Option<Vec<usize>> {
    let mut rng = rng_for(seed);
    for _ in 0..max_tries {
        let map: Vec<usize> = (0..src.n()).map(|_| rng.gen_range(0..dst.n())).collect();
        if is_monotone(src, &map, dst).expect("sampled map is well formed") {
            return Some(map);
        }
    }
    None
}

/// Rejection-sampled real-valued monotone function with values drawn from
/// a palette.
pub fn random_monotone_real(
    s: &Structure,
    palette: &[f64],
    seed: u64,
    max_tries: usize,
) -> Option<RealFunction> {
    assert!(!palette.is_empty(), "palette needs at least one value");
    let mut rng = rng_for(seed);
    for _ in 0..max_tries {
        let values: Vec<f64> =
            (0..s.n()).map(|_| palette[rng.gen_range(0..palette.len())]).collect();
        if is_monotone_real(s, &values).expect("values are finite") {
            return Some(RealFunction::new(values).expect("palette values are finite"));
        }
    }
    None
}

/// Median closure of a sparse random subset.
pub fn random_subalgebra(s: &Structure, seed: u64) -> PointSet {
    let mut rng = rng_for(seed);
    let mut seedset = PointSet::empty(s.n());
    for p in 0..s.n() {
        if rng.gen_bool(0.3) {
            seedset.insert(p);
        }
    }
    if seedset.is_empty() {
        seedset.insert(rng.gen_range(0..s.n()));
    }
    span(s, &seedset).expect("seed set lives on s")
}

/// Convex hull of up to three random points.
pub fn random_convex_set(s: &Structure, seed: u64) -> PointSet {
    let mut rng = rng_for(seed);
    let count = rng.gen_range(1..=3usize);
    let pts = PointSet::from_points(s.n(), (0..count).map(|_| rng.gen_range(0..s.n())));
    convex_hull(s, &pts).expect("points live on s")
}

/// Complementary convex halves of a tree, split across a random edge.
pub fn random_convex_split(s: &Structure, seed: u64) -> Option<(PointSet, PointSet)> {
    let edges = s.tree_edges()?;
    if edges.is_empty() {
        return None;
    }
    let mut rng = rng_for(seed);
    let (u, v) = edges[rng.gen_range(0..edges.len())];
    let side_u = PointSet::from_points(s.n(), (0..s.n()).filter(|&x| s.betw(x, u, v)));
    let side_v = side_u.complement();
    Some((side_u, side_v))
}

/// Random topology: the lattice generated by a handful of random subsets,
/// so the closure laws hold by construction.
pub fn random_topology(n: usize, seed: u64) -> FiniteTopology {
    assert!((1..=16).contains(&n), "random topologies are kept small");
    let mut rng = rng_for(seed);
    let full = (1u64 << n) - 1;
    let count = rng.gen_range(1..=n.max(2));
    let mut seeds: Vec<u64> = vec![0, full];
    for _ in 0..count {
        seeds.push(rng.gen_range(0..=full));
    }
    FiniteTopology::from_lattice(n, lattice_close_masks(seeds))
}

fn lattice_close_masks(seeds: Vec<u64>) -> Vec<u64> {
    let mut family: Vec<u64> = Vec::new();
    let mut member = std::collections::HashSet::new();
    let mut queue = seeds;
    while let Some(m) = queue.pop() {
        if !member.insert(m) {
            continue;
        }
        for &other in &family {
            for candidate in [m | other, m & other] {
                if !member.contains(&candidate) {
                    queue.push(candidate);
                }
            }
        }
        family.push(m);
    }
    family
}

/// Random median algebra presented as a table: a random subalgebra of a
/// small product of chains, relabeled to 0..m. Products of chains satisfy
/// the median laws coordinatewise and subalgebras inherit them, so the
/// result is a genuine median algebra though rarely a pretree.
pub fn random_median_table(seed: u64) -> Structure {
    let mut rng = rng_for(seed);
    let factors: Vec<usize> = if rng.gen_bool(0.5) {
        vec![rng.gen_range(2..=3), rng.gen_range(2..=3)]
    } else {
        vec![2, 2, 2]
    };
    let total: usize = factors.iter().product();
    let digits = |p: usize| -> Vec<usize> {
        let mut p = p;
        factors
            .iter()
            .map(|&f| {
                let d = p % f;
                p /= f;
                d
            })
            .collect()
    };
    let mid3 = |a: usize, b: usize, c: usize| a.max(b).min(a.max(c)).min(b.max(c));
    let med = |x: usize, y: usize, z: usize| -> usize {
        let (dx, dy, dz) = (digits(x), digits(y), digits(z));
        let mut p = 0;
        let mut scale = 1;
        for (i, &f) in factors.iter().enumerate() {
            p += mid3(dx[i], dy[i], dz[i]) * scale;
            scale *= f;
        }
        p
    };
    let mut members: Vec<usize> = Vec::new();
    let picks = rng.gen_range(2..=4usize);
    for _ in 0..picks {
        let p = rng.gen_range(0..total);
        if !members.contains(&p) {
            members.push(p);
        }
    }
    members.sort_unstable();
    loop {
        let mut grew = false;
        let snapshot = members.clone();
        for &x in &snapshot {
            for &y in &snapshot {
                for &z in &snapshot {
                    let m = med(x, y, z);
                    if let Err(at) = members.binary_search(&m) {
                        members.insert(at, m);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    let m = members.len();
    let index_of = |p: usize| members.binary_search(&p).expect("closed set");
    let mut table = vec![0usize; m * m * m];
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                table[(x * m + y) * m + z] = index_of(med(members[x], members[y], members[z]));
            }
        }
    }
    Structure::table(m, table).expect("relabeled table is well formed")
}

/// A named structure with companion functions.
pub struct Fixture {
    pub name: &'static str,
    pub structure: Structure,
    pub functions: Vec<(&'static str, RealFunction)>,
}

/// Three leaves 0, 1, 2 joined at center 3.
pub fn triod() -> Structure {
    Structure::tree(4, vec![(0, 3), (1, 3), (2, 3)]).unwrap()
}

/// The triod function that is 1 on two leaves and the center, 0 on the
/// remaining leaf: total variation 1, but 2 over the relaxed leaf triple.
pub fn triod_dip_function() -> RealFunction {
    RealFunction::new(vec![1.0, 0.0, 1.0, 1.0]).unwrap()
}

/// Indicator of the hub.
pub fn chi_hub(n: usize) -> RealFunction {
    let mut values = vec![0.0; n];
    values[0] = 1.0;
    RealFunction::new(values).unwrap()
}

/// Hub 0, leaf k carries 2^-k: summable legs, every leaf deviates.
pub fn geometric_star_function(n: usize) -> RealFunction {
    let values = (0..n).map(|k| if k == 0 { 0.0 } else { (0.5f64).powi(k as i32) }).collect();
    RealFunction::new(values).unwrap()
}

/// Width-2 grid of k rows with the indicator of the right column.
pub fn grid_chi_right(k: usize) -> (Structure, RealFunction) {
    let s = Structure::grid(2, k).unwrap();
    let f = RealFunction::new((0..2 * k).map(|p| (p % 2) as f64).collect()).unwrap();
    (s, f)
}

/// All 81 assignments of colors {1,2,3} to the four triod points.
pub fn triod_colorings() -> Vec<RealFunction> {
    let mut out = Vec::with_capacity(81);
    for code in 0..81usize {
        let mut c = code;
        let values: Vec<f64> = (0..4)
            .map(|_| {
                let v = (c % 3 + 1) as f64;
                c /= 3;
                v
            })
            .collect();
        out.push(RealFunction::new(values).unwrap());
    }
    out
}

/// The named example palette used across the suites and the CLI probe.
pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "triod",
            structure: triod(),
            functions: vec![("dip", triod_dip_function())],
        },
        Fixture {
            name: "star-5",
            structure: Structure::star(5).unwrap(),
            functions: vec![("chi-hub", chi_hub(5)), ("geometric", geometric_star_function(5))],
        },
        Fixture {
            name: "star-8",
            structure: Structure::star(8).unwrap(),
            functions: vec![("chi-hub", chi_hub(8)), ("geometric", geometric_star_function(8))],
        },
        {
            let (structure, f) = grid_chi_right(3);
            Fixture { name: "grid-2x3", structure, functions: vec![("chi-right", f)] }
        },
        {
            let (structure, f) = grid_chi_right(5);
            Fixture { name: "grid-2x5", structure, functions: vec![("chi-right", f)] }
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::check_median_axioms;
    use crate::convexity::is_convex;
    use crate::variation::{adjacency_gaps, variation_on};

    #[test]
    fn tiny_trees_have_fixed_shape() {
        assert_eq!(random_tree(1, 0).unwrap().n(), 1);
        let two = random_tree(2, 0).unwrap();
        assert_eq!(two.tree_edges().unwrap(), &[(0, 1)]);
    }

    #[test]
    fn tree_decoding_is_deterministic_and_valid() {
        let a = random_tree(9, 7).unwrap();
        let b = random_tree(9, 7).unwrap();
        assert_eq!(a.tree_edges().unwrap(), b.tree_edges().unwrap());
        assert_eq!(a.tree_edges().unwrap().len(), 8);
    }

    #[test]
    fn random_functions_stay_on_the_range_lattice() {
        let s = Structure::chain(6).unwrap();
        let f = random_function(&s, (0.0, 1.0), 3).unwrap();
        for &v in f.values() {
            assert!((0.0..=1.0).contains(&v));
            let k = v * 1024.0;
            assert_eq!(k, k.round());
        }
        let g = random_function(&s, (0.0, 1.0), 3).unwrap();
        assert_eq!(f, g);
        let zero = random_function(&s, (0.0, 0.0), 9).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sampled_monotone_maps_really_are_monotone() {
        let src = Structure::star(4).unwrap();
        let dst = Structure::chain(3).unwrap();
        let mut found = 0;
        for seed in 0..20 {
            if let Some(map) = random_monotone_map(&src, &dst, seed, 200) {
                assert!(is_monotone(&src, &map, &dst).unwrap());
                found += 1;
            }
        }
        assert!(found > 0, "rejection sampling should land at this size");
        let point = Structure::chain(1).unwrap();
        assert!(random_monotone_map(&src, &point, 0, 1).is_some());
    }

    #[test]
    fn sampled_monotone_reals_have_small_deviation_support() {
        let s = Structure::star(6).unwrap();
        let mut found = 0;
        for seed in 0..200 {
            if let Some(g) = random_monotone_real(&s, &[0.0, 0.5, 1.0], seed, 1) {
                let support =
                    crate::variation::deviation_support(&s, &g, 0).unwrap();
                assert!(support.len() <= 2, "support {:?}", support);
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn random_subsets_are_closed_and_convex_where_promised() {
        let s = random_tree(8, 11).unwrap();
        for seed in 0..10 {
            let sub = random_subalgebra(&s, seed);
            assert_eq!(span(&s, &sub).unwrap(), sub);
            let convex = random_convex_set(&s, seed);
            assert!(is_convex(&s, &convex).unwrap());
        }
    }

    #[test]
    fn tree_splits_partition_into_convex_halves() {
        let s = random_tree(9, 4).unwrap();
        let (a, b) = random_convex_split(&s, 2).unwrap();
        assert!(is_convex(&s, &a).unwrap());
        assert!(is_convex(&s, &b).unwrap());
        assert!(a.is_disjoint(&b));
        assert_eq!(a.len() + b.len(), 9);
        assert!(random_convex_split(&Structure::chain(4).unwrap(), 0).is_none());
    }

    #[test]
    fn random_topologies_validate_as_topologies() {
        for seed in 0..10 {
            let t = random_topology(6, seed);
            let rebuilt = FiniteTopology::new(6, &t.opens()).unwrap();
            assert_eq!(t, rebuilt);
        }
    }

    #[test]
    fn random_tables_satisfy_the_median_laws() {
        for seed in 0..10 {
            let s = random_median_table(seed);
            let report = check_median_axioms(&s).unwrap();
            assert!(report.passed(), "seed {seed}: {:?}", report.violations);
        }
    }

    #[test]
    fn fixture_catalog_matches_the_expected_values() {
        let all = fixtures();
        let triod_fix = all.iter().find(|f| f.name == "triod").unwrap();
        assert_eq!(triod_fix.structure.n(), 4);

        let star5 = all.iter().find(|f| f.name == "star-5").unwrap();
        let gaps = adjacency_gaps(&star5.structure, &PointSet::full(5)).unwrap();
        assert_eq!(gaps.doublets.len(), 4);

        let grid = all.iter().find(|f| f.name == "grid-2x3").unwrap();
        let (_, chi) = &grid.functions[0];
        let v = variation_on(&grid.structure, chi, &PointSet::full(6), false).unwrap();
        assert_eq!(v.value, 3.0);
    }

    #[test]
    fn colorings_with_all_colors_and_off_center_are_not_monotone() {
        let s = triod();
        let all = triod_colorings();
        assert_eq!(all.len(), 81);
        let mut nonmonotone = 0;
        for f in &all {
            let values = f.values();
            let uses_all = (1..=3).all(|c| values.contains(&(c as f64)));
            if uses_all && values[3] != 2.0 {
                assert!(!is_monotone_real(&s, values).unwrap());
                nonmonotone += 1;
            }
        }
        assert!(nonmonotone > 0);
    }
}
