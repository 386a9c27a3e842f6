//! Acceptance gate: one test per numbered criterion. Each test finishes by
//! printing a single pass line; a failed assertion is the matching fail line.

use std::time::Instant;

use median_bv::axioms::{
    check_median_axioms, check_pretree_axioms, induced_betweenness, is_median_pretree,
};
use median_bv::convexity::is_monotone_real;
use median_bv::error::Error;
use median_bv::generators::{
    chi_hub, derived_seed, geometric_star_function, grid_chi_right, random_function,
    random_monotone_real, random_tree, triod, triod_dip_function, DEFAULT_MAX_TRIES,
};
use median_bv::helly::{select_diagonal, select_finite, verify_limit_variation};
use median_bv::pointset::PointSet;
use median_bv::structure::Structure;
use median_bv::suites::run_suite;
use median_bv::variation::{
    deviation_support, linear_variation, total_variation, variation_on, RealFunction,
};

const SEED: u64 = 0xACCE5517;
const TOL: f64 = 1e-9;

fn pass(n: usize, label: &str) {
    println!("criterion {n} ({label}): pass");
}

fn suite_passes(name: &str, trials: usize) -> median_bv::suites::SuiteReport {
    let report = run_suite(name, SEED, trials).expect("known suite");
    for o in &report.outcomes {
        assert_eq!(
            o.failures, 0,
            "suite {name}, property {}: {:?}",
            o.name, o.first_failure
        );
    }
    report
}

/// Triod variation closed forms over 100 random functions, within 1e-9,
/// inside a one second budget.
#[test]
fn criterion_01_triod_closed_forms() {
    let s = triod();
    let start = Instant::now();
    for trial in 0..100u64 {
        let f = random_function(&s, (0.0, 1.0), derived_seed(SEED, trial)).unwrap();
        let legs = [
            (f.value(0) - f.value(3)).abs(),
            (f.value(1) - f.value(3)).abs(),
            (f.value(2) - f.value(3)).abs(),
        ];
        let leg_sum: f64 = legs.iter().sum();
        let total = total_variation(&s, &f).unwrap().value;
        assert!(
            (total - leg_sum).abs() <= TOL,
            "trial {trial}: total {total} vs leg sum {leg_sum}"
        );
        let best_pair = (legs[0] + legs[1]).max(legs[0] + legs[2]).max(legs[1] + legs[2]);
        let linear = linear_variation(&s, &f).unwrap().value;
        assert!(
            (linear - best_pair).abs() <= TOL,
            "trial {trial}: linear {linear} vs best pair {best_pair}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget is 1s");
    pass(1, "triod closed forms");
}

/// The hub-dip function: variation 1 on the ground set, 2 over the relaxed
/// leaf set, and a strict rejection of the leaf set.
#[test]
fn criterion_02_hub_dip_function() {
    let s = triod();
    let f = triod_dip_function();
    assert_eq!(total_variation(&s, &f).unwrap().value, 1.0);
    let leaves = PointSet::from_points(4, [0, 1, 2]);
    assert_eq!(variation_on(&s, &f, &leaves, true).unwrap().value, 2.0);
    let strict = variation_on(&s, &f, &leaves, false);
    assert_eq!(strict.unwrap_err(), Error::NotASubalgebra { missing: vec![3] });
    pass(2, "hub dip");
}

/// Hub indicators on stars: truncation values climb 1, 2, ..., N exactly,
/// and the linear variation stays pinned at 2.
#[test]
fn criterion_03_star_truncation_ladder() {
    for leaves in 3..=12usize {
        let n = leaves + 1;
        let s = Structure::star(n).unwrap();
        let f = chi_hub(n);
        let mut prev = 0.0f64;
        for k in 1..=leaves {
            let sigma = PointSet::from_points(n, 0..=k);
            let v = variation_on(&s, &f, &sigma, false).unwrap().value;
            assert_eq!(v, k as f64, "star with {leaves} leaves, truncation {k}");
            assert!(v > prev, "ladder must climb strictly");
            prev = v;
        }
        assert_eq!(total_variation(&s, &f).unwrap().value, leaves as f64);
        assert_eq!(linear_variation(&s, &f).unwrap().value, 2.0);
    }
    pass(3, "star truncation ladder");
}

/// Monotone functions on stars deviate from the hub on at most two points:
/// 500 sampled functions plus an exhaustive palette scan. The geometric leg
/// function has full support, so for six or more leaves it cannot be a
/// difference of two monotone functions (support of a difference is covered
/// by the union of the two supports, at most 4 points).
#[test]
fn criterion_04_monotone_support_and_geometric() {
    let palette = [0.0, 0.5, 1.0];
    let mut found = 0usize;
    for trial in 0..500u64 {
        let ds = derived_seed(SEED ^ 0x51A8, trial);
        let n = 4 + (ds % 5) as usize;
        let s = Structure::star(n).unwrap();
        let f = random_monotone_real(&s, &palette, ds, DEFAULT_MAX_TRIES)
            .expect("sampler budget exhausted");
        found += 1;
        let support = deviation_support(&s, &f, 0).unwrap();
        assert!(support.len() <= 2, "sampled monotone support {}", support.len());
    }
    assert_eq!(found, 500);

    // Exhaustive over the palette: every monotone function on a small star
    // has support at most 2, and 2 is attained.
    let mut max_support = 0usize;
    for n in 2..=7usize {
        let s = Structure::star(n).unwrap();
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let values: Vec<f64> = (0..n)
                .map(|_| {
                    let v = palette[c % 3];
                    c /= 3;
                    v
                })
                .collect();
            if is_monotone_real(&s, &values).unwrap() {
                let f = RealFunction::new(values).unwrap();
                let support = deviation_support(&s, &f, 0).unwrap().len();
                assert!(support <= 2, "palette monotone support {support} on star({n})");
                max_support = max_support.max(support);
            }
        }
    }
    assert_eq!(max_support, 2);

    for n in 2..=12usize {
        let s = Structure::star(n).unwrap();
        let f = geometric_star_function(n);
        let total = total_variation(&s, &f).unwrap().value;
        assert_eq!(total, 1.0 - (0.5f64).powi(n as i32 - 1));
        let support = deviation_support(&s, &f, 0).unwrap();
        assert_eq!(support.len(), n - 1);
        if n >= 3 {
            assert_eq!(linear_variation(&s, &f).unwrap().value, 0.75);
        }
        if n >= 6 {
            // Differences of monotone functions have support at most
            // 2 * max_support; the geometric function exceeds that.
            assert!(support.len() > 2 * max_support, "no monotone decomposition");
        }
    }
    pass(4, "monotone support bound");
}

/// Right-column indicators on two-column grids: monotone, with variation
/// exactly the row count.
#[test]
fn criterion_05_grid_right_column() {
    for k in 1..=12usize {
        let (s, f) = grid_chi_right(k);
        assert!(is_monotone_real(&s, f.values()).unwrap(), "rows {k}");
        let full = PointSet::full(s.n());
        assert_eq!(variation_on(&s, &f, &full, true).unwrap().value, k as f64);
        if s.n() <= 12 {
            assert_eq!(total_variation(&s, &f).unwrap().value, k as f64);
        }
    }
    pass(5, "grid right column");
}

/// Chains agree with the classical telescoping sum, bitwise, for both the
/// ground-set and the linear variation.
#[test]
fn criterion_06_chain_classical_agreement() {
    for trial in 0..200u64 {
        let ds = derived_seed(SEED ^ 0xC4A1, trial);
        let n = 1 + (ds % 50) as usize;
        let s = Structure::chain(n).unwrap();
        let f = random_function(&s, (0.0, 1.0), derived_seed(ds, 1)).unwrap();
        let classical: f64 = (1..n).map(|i| (f.value(i) - f.value(i - 1)).abs()).sum();
        assert_eq!(total_variation(&s, &f).unwrap().value, classical, "n {n}");
        assert_eq!(linear_variation(&s, &f).unwrap().value, classical, "n {n}");
    }
    pass(6, "chain telescoping");
}

/// The inequality suite holds over 500 seeded trials per property within a
/// minute. Every comparison inside allows slack no worse than -1e-9.
#[test]
fn criterion_07_inequality_suites() {
    let start = Instant::now();
    let report = suite_passes("inequalities", 500);
    for name in [
        "almost-disjoint-superadditivity",
        "restriction-bounded-by-intersection",
        "convex-restriction-equality",
        "convex-split-superadditivity",
        "monotone-pushforward-bound",
        "nested-subalgebra-monotonicity",
    ] {
        let o = report.outcome(name).expect("property present");
        assert_eq!(o.trials, 500, "{name} must run its full budget");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget is 60s");
    pass(7, "inequality suites");
}

/// Axiom suites pass at 200 trials; the 2x2 grid fails the splitting law
/// with the documented first witness.
#[test]
fn criterion_08_axiom_suites() {
    suite_passes("axioms", 200);
    let square = Structure::grid(2, 2).unwrap();
    let relation = induced_betweenness(&square);
    let report = check_pretree_axioms(&relation).unwrap();
    assert!(!report.law_passed("B3"));
    let first = report.violations.iter().find(|v| v.law == "B3").unwrap();
    assert_eq!(first.witness, vec![0, 1, 3, 2]);
    assert!(check_median_axioms(&square).unwrap().passed());
    assert!(!is_median_pretree(&relation).unwrap());

    let t = triod();
    let r = induced_betweenness(&t);
    assert!(check_pretree_axioms(&r).unwrap().passed());
    assert!(check_median_axioms(&t).unwrap().passed());
    assert!(is_median_pretree(&r).unwrap());
    pass(8, "axiom suites");
}

/// Topology suites pass at 500 trials, with both conditional properties
/// exercised on real instances, not vacuously.
#[test]
fn criterion_09_topology_suites() {
    let report = suite_passes("topology", 500);
    let premises = report.outcome("cover-premise-instances").expect("counter present");
    assert!(premises.trials > 0, "cover premise never held");
    let oscillations = report.outcome("oscillation-instances").expect("counter present");
    assert!(oscillations.trials > 0, "no unfragmented instance seen");
    pass(9, "topology suites");
}

/// Selection: the pigeonhole bound on a 200-function batch, a certified
/// diagonal selection whose estimate lands near the true limit, and the
/// suite at 200 trials, all within thirty seconds.
#[test]
fn criterion_10_selection() {
    let start = Instant::now();

    let s = Structure::chain(3).unwrap();
    let fs: Vec<RealFunction> = (0..200u64)
        .map(|i| random_function(&s, (0.0, 1.0), derived_seed(SEED ^ 0x9E11, i)).unwrap())
        .collect();
    let eps = 0.25;
    let sel = select_finite(&fs, (0.0, 1.0), eps).unwrap();
    // 4 boxes per point, 3 points: some class holds at least 200 / 64 of them.
    assert!(sel.indices.len() >= 4, "class of {}", sel.indices.len());
    for (a, &i) in sel.indices.iter().enumerate() {
        for &j in &sel.indices[a + 1..] {
            for p in 0..3 {
                assert!((fs[i].value(p) - fs[j].value(p)).abs() <= eps + 1e-12);
            }
        }
    }

    // Alternating constants: the majority class certifies, the estimate
    // stays within the final epsilon of the limit, and the variation of the
    // estimate respects the n * eps budget over the class bound r = 0.
    let s = Structure::chain(4).unwrap();
    let g = RealFunction::new(vec![0.3; 4]).unwrap();
    let h = RealFunction::new(vec![0.9; 4]).unwrap();
    let mut i = 0usize;
    let source = move || {
        let f = if i % 2 == 0 { g.clone() } else { h.clone() };
        i += 1;
        Some(f)
    };
    let sel = select_diagonal(&s, source, (0.0, 1.0), &[0.2, 0.1], 2).unwrap();
    assert_eq!(sel.result.indices, vec![0, 2]);
    for &v in sel.limit_estimate.values() {
        assert!((v - 0.3).abs() <= 0.1, "estimate {v} misses the limit 0.3");
    }
    assert!(verify_limit_variation(&s, &sel.limit_estimate, 0.0, 4.0 * 0.1).unwrap());

    suite_passes("helly", 200);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget is 30s");
    pass(10, "selection engine");
}

/// Dual-route oracles agree exactly: medians against the path-intersection
/// route on every triple of every small tree, the arm sweep against the
/// leaf-pair enumeration up to 64 points, and the enumerative cross-checks
/// inside the oracle suite.
#[test]
fn criterion_11_oracle_equivalences() {
    for n in 2..=9usize {
        for variant in 0..5u64 {
            let s = random_tree(n, derived_seed(SEED ^ 0x0AC1, (n as u64) << 8 | variant))
                .unwrap();
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        assert_eq!(
                            s.median(x, y, z).unwrap(),
                            s.median_by_path_intersection(x, y, z).unwrap()
                        );
                    }
                }
            }
        }
    }

    for trial in 0..200u64 {
        let ds = derived_seed(SEED ^ 0xA2A5, trial);
        let n = 2 + (ds % 63) as usize;
        let s = random_tree(n, derived_seed(ds, 1)).unwrap();
        let f = random_function(&s, (0.0, 1.0), derived_seed(ds, 2)).unwrap();
        let sweep = median_bv::variation::tree_linear_variation_arm_sweep(&s, &f).unwrap();
        assert_eq!(sweep, linear_variation(&s, &f).unwrap().value, "n {n}");
    }

    suite_passes("oracles", 200);
    pass(11, "oracle equivalences");
}
