//! Seeded property suites over randomly generated instances.
//!
//! Each suite exercises one area of the library and checks the laws that
//! area is supposed to satisfy: exact identities on lattice-valued inputs,
//! inequalities up to [`VARIATION_TOLERANCE`], and agreement between every
//! fast path and its independent oracle. A run is fully determined by
//! `(seed, trials)`, so any reported failure replays.

use std::collections::HashSet;

use serde::Serialize;

use crate::axioms::{
    check_median_axioms, check_pretree_axioms, induced_betweenness, is_median_pretree,
    median_table_from_relation,
};
use crate::convexity::{convex_hull, interval, is_convex, is_monotone, is_monotone_real, span};
use crate::error::{Error, Result};
use crate::generators::{
    chi_hub, derived_seed, geometric_star_function, grid_chi_right, random_convex_set,
    random_convex_split, random_function, random_median_table, random_monotone_map,
    random_monotone_real, random_subalgebra, random_topology, random_tree, triod,
    triod_colorings, triod_dip_function, DEFAULT_MAX_TRIES,
};
use crate::helly::{select_diagonal, select_finite, verify_limit_variation};
use crate::pointset::PointSet;
use crate::structure::Structure;
use crate::topology::{
    branch, check_closed_cover_fragmentation, is_fragmented, shadow, shadow_topology,
    unfragmented_witness, FiniteTopology,
};
use crate::variation::{
    adjacency_gaps, deviation_support, gap_scan, in_bv_r, linear_variation,
    max_over_subalgebras, restricted_variation, total_variation,
    tree_linear_variation_arm_sweep, variation_on, RealFunction, VARIATION_TOLERANCE,
};

/// Every suite `run_suite` accepts, in the order `run_all` runs them.
pub const SUITE_NAMES: &[&str] = &[
    "axioms",
    "triod",
    "star",
    "grid",
    "chain",
    "inequalities",
    "topology",
    "helly",
    "oracles",
];

/// How one property fared across its trials. `first_failure` keeps the
/// earliest trial's message so a violation can be replayed directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

/// All property outcomes of one suite run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub outcomes: Vec<PropertyOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failures == 0)
    }

    pub fn total_trials(&self) -> usize {
        self.outcomes.iter().map(|o| o.trials).sum()
    }

    pub fn total_failures(&self) -> usize {
        self.outcomes.iter().map(|o| o.failures).sum()
    }

    /// Outcome lookup by property name.
    pub fn outcome(&self, name: &str) -> Option<&PropertyOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

type Check = std::result::Result<(), String>;

fn run_property(
    out: &mut Vec<PropertyOutcome>,
    name: &'static str,
    trials: usize,
    mut body: impl FnMut(usize) -> Check,
) {
    let mut failures = 0;
    let mut first_failure = None;
    for trial in 0..trials {
        if let Err(msg) = body(trial) {
            failures += 1;
            if first_failure.is_none() {
                first_failure = Some(format!("trial {trial}: {msg}"));
            }
        }
    }
    out.push(PropertyOutcome { name, trials, failures, first_failure });
}

/// Per-trial seed, independent across properties: the property name is
/// folded into the suite seed before the trial index is mixed in.
fn seed_for(seed: u64, property: &str, trial: usize) -> u64 {
    let tag = property
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    derived_seed(seed ^ tag, trial as u64)
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Rotates through the pretree shapes so every property sees chains, stars
/// and random trees.
fn pretree_shape(kind: usize, n: usize, seed: u64) -> Result<Structure> {
    match kind % 3 {
        0 => Structure::chain(n),
        1 => Structure::star(n),
        _ => random_tree(n, seed),
    }
}

/// Runs one suite by name.
pub fn run_suite(name: &str, seed: u64, trials: usize) -> Result<SuiteReport> {
    let trials = trials.max(1);
    match name {
        "axioms" => Ok(axioms_suite(seed, trials)),
        "triod" => Ok(triod_suite(seed, trials)),
        "star" => Ok(star_suite(seed, trials)),
        "grid" => Ok(grid_suite(seed, trials)),
        "chain" => Ok(chain_suite(seed, trials)),
        "inequalities" => Ok(inequalities_suite(seed, trials)),
        "topology" => Ok(topology_suite(seed, trials)),
        "helly" => Ok(helly_suite(seed, trials)),
        "oracles" => Ok(oracles_suite(seed, trials)),
        _ => Err(Error::UnknownSuite { name: name.to_string() }),
    }
}

/// Runs every suite with the same seed and trial count.
pub fn run_all(seed: u64, trials: usize) -> Vec<SuiteReport> {
    SUITE_NAMES
        .iter()
        .map(|name| run_suite(name, seed, trials).expect("listed suites are known"))
        .collect()
}

fn axioms_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();

    run_property(&mut outcomes, "pretree-shapes-pass-all-laws", trials, |trial| {
        let ds = seed_for(seed, "pretree-shapes-pass-all-laws", trial);
        let n = 2 + (ds % 8) as usize;
        let s = lib(pretree_shape(trial, n, derived_seed(ds, 1)))?;
        let r = induced_betweenness(&s);
        let pre = lib(check_pretree_axioms(&r))?;
        ensure(pre.passed(), || {
            format!("betweenness laws fail on a {n} point {}", s.backend_name())
        })?;
        let med = lib(check_median_axioms(&s))?;
        ensure(med.passed(), || format!("median laws fail on a {n} point {}", s.backend_name()))?;
        ensure(lib(is_median_pretree(&r))?, || "a triple lacks a common interval point".into())?;
        ensure(s.is_verified_median_pretree(), || "verified flag disagrees with the scan".into())
    });

    run_property(&mut outcomes, "square-fails-splitting-law", 1, |_| {
        let s = lib(Structure::grid(2, 2))?;
        let r = induced_betweenness(&s);
        let pre = lib(check_pretree_axioms(&r))?;
        ensure(!pre.law_passed("B3"), || "splitting law unexpectedly holds on the square".into())?;
        let first = pre
            .violations
            .iter()
            .find(|v| v.law == "B3")
            .ok_or_else(|| "no recorded splitting witness".to_string())?;
        ensure(first.witness == vec![0, 1, 3, 2], || {
            format!("unexpected first splitting witness {:?}", first.witness)
        })?;
        let med = lib(check_median_axioms(&s))?;
        ensure(med.passed(), || "median laws should hold on the square".into())?;
        ensure(!lib(is_median_pretree(&r))?, || "square misreported as a pretree".into())
    });

    run_property(&mut outcomes, "product-tables-satisfy-median-laws", trials, |trial| {
        let ds = seed_for(seed, "product-tables-satisfy-median-laws", trial);
        let t = random_median_table(ds);
        let med = lib(check_median_axioms(&t))?;
        ensure(med.passed(), || format!("median laws fail on a {} point table", t.n()))
    });

    run_property(&mut outcomes, "betweenness-roundtrip", trials, |trial| {
        let ds = seed_for(seed, "betweenness-roundtrip", trial);
        let n = 2 + (ds % 8) as usize;
        let s = lib(random_tree(n, derived_seed(ds, 1)))?;
        let r = induced_betweenness(&s);
        let rebuilt = lib(median_table_from_relation(&r))?;
        ensure(induced_betweenness(&rebuilt) == r, || {
            "rebuilding the table changed the relation".into()
        })
    });

    SuiteReport { suite: "axioms", outcomes }
}

fn triod_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();
    let hub = 3usize;

    run_property(&mut outcomes, "leg-sum-formula", trials, |trial| {
        let ds = seed_for(seed, "leg-sum-formula", trial);
        let s = triod();
        let f = lib(random_function(&s, (0.0, 1.0), ds))?;
        let leg = |p: usize| (f.value(p) - f.value(hub)).abs();
        let expect = leg(0) + leg(1) + leg(2);
        let total = lib(total_variation(&s, &f))?;
        ensure(total.value == expect, || {
            format!("total variation {} differs from the leg sum {expect}", total.value)
        })?;
        let best_pair = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(a, b)| leg(a) + leg(b))
            .fold(0.0, f64::max);
        let lin = lib(linear_variation(&s, &f))?;
        ensure(lin.value == best_pair, || {
            format!("linear variation {} differs from the best leg pair {best_pair}", lin.value)
        })
    });

    run_property(&mut outcomes, "hub-dip-overshoots-on-leaves", 1, |_| {
        let s = triod();
        let f = triod_dip_function();
        let full = lib(total_variation(&s, &f))?;
        ensure(full.value == 1.0, || format!("full variation is {}", full.value))?;
        let leaves = PointSet::from_points(4, [0, 1, 2]);
        let relaxed = lib(variation_on(&s, &f, &leaves, true))?;
        ensure(relaxed.value == 2.0, || format!("relaxed leaf triple gives {}", relaxed.value))?;
        let err = variation_on(&s, &f, &leaves, false).map(|_| ()).unwrap_err();
        ensure(err == Error::NotASubalgebra { missing: vec![3] }, || {
            format!("strict mode rejected with the wrong error: {err}")
        })
    });

    run_property(&mut outcomes, "three-color-maps-never-monotone", 1, |_| {
        let s = triod();
        let mut qualifying = 0usize;
        for f in triod_colorings() {
            let vals = f.values();
            let all_three = (1..=3).all(|c| vals.iter().any(|&v| v == f64::from(c)));
            if all_three && vals[hub] != 2.0 {
                qualifying += 1;
                ensure(!lib(is_monotone_real(&s, vals))?, || {
                    format!("coloring {vals:?} uses all colors off-center yet passes")
                })?;
            }
        }
        ensure(qualifying == 24, || format!("expected 24 qualifying colorings, saw {qualifying}"))
    });

    SuiteReport { suite: "triod", outcomes }
}

fn star_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();

    run_property(&mut outcomes, "truncation-ladder", trials, |trial| {
        let n = 3 + trial % 10;
        let s = lib(Structure::star(n))?;
        let chi = chi_hub(n);
        let mut prev = 0.0;
        for k in 1..n {
            let sigma = PointSet::from_points(n, 0..=k);
            let rep = lib(variation_on(&s, &chi, &sigma, false))?;
            ensure(rep.value == k as f64, || {
                format!("hub plus {k} leaves gives {}", rep.value)
            })?;
            ensure(rep.value > prev, || format!("ladder fails to grow at {k} leaves"))?;
            prev = rep.value;
        }
        let total = lib(total_variation(&s, &chi))?;
        ensure(total.value == (n - 1) as f64, || {
            format!("total on {n} points is {}", total.value)
        })?;
        let lin = lib(linear_variation(&s, &chi))?;
        ensure(lin.value == 2.0, || format!("best linear subset gives {}", lin.value))?;
        ensure(lib(in_bv_r(&s, &chi, (n - 1) as f64))?, || {
            "function escapes its own variation bound".into()
        })?;
        ensure(!lib(in_bv_r(&s, &chi, (n - 1) as f64 - 0.001))?, || {
            "bound below the total variation was accepted".into()
        })
    });

    let mut found = 0usize;
    run_property(&mut outcomes, "deviation-support-bound", trials, |trial| {
        let ds = seed_for(seed, "deviation-support-bound", trial);
        let n = 4 + (ds % 5) as usize;
        let s = lib(Structure::star(n))?;
        match random_monotone_real(&s, &[0.0, 0.5, 1.0], derived_seed(ds, 1), DEFAULT_MAX_TRIES) {
            None => Ok(()),
            Some(f) => {
                found += 1;
                let support = lib(deviation_support(&s, &f, 0))?;
                ensure(support.len() <= 2, || {
                    format!(
                        "monotone values {:?} deviate from the hub on {} legs",
                        f.values(),
                        support.len()
                    )
                })
            }
        }
    });
    outcomes.push(PropertyOutcome {
        name: "monotone-samples-found",
        trials: found,
        failures: usize::from(found < trials),
        first_failure: (found < trials)
            .then(|| format!("only {found} of {trials} trials produced a monotone sample")),
    });

    run_property(&mut outcomes, "geometric-leg-decay", trials, |trial| {
        let n = 3 + trial % 10;
        let s = lib(Structure::star(n))?;
        let g = geometric_star_function(n);
        let total = lib(total_variation(&s, &g))?;
        let expect = 1.0 - (0.5f64).powi(n as i32 - 1);
        ensure(total.value == expect, || {
            format!("geometric legs on {n} points sum to {}", total.value)
        })?;
        let lin = lib(linear_variation(&s, &g))?;
        ensure(lin.value == 0.75, || format!("best two legs give {}", lin.value))?;
        if n >= 4 {
            ensure(total.value > lin.value, || {
                "no two legs should reach the full sum".into()
            })?;
        } else {
            ensure(total.value == lin.value, || {
                "two legs are everything on the smallest star".into()
            })?;
        }
        let support = lib(deviation_support(&s, &g, 0))?;
        ensure(support.len() == n - 1, || {
            format!("{} legs deviate, expected {}", support.len(), n - 1)
        })
    });

    SuiteReport { suite: "star", outcomes }
}

fn grid_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();
    let _ = seed;

    run_property(&mut outcomes, "right-column-indicator-is-monotone", trials, |trial| {
        let k = 1 + trial % 12;
        let (s, chi) = grid_chi_right(k);
        let two = lib(Structure::chain(2))?;
        let map: Vec<usize> = (0..s.n()).map(|p| p % 2).collect();
        ensure(lib(is_monotone(&s, &map, &two))?, || {
            format!("column map is not monotone on {k} rows")
        })?;
        ensure(lib(is_monotone_real(&s, chi.values()))?, || {
            format!("column indicator is not monotone on {k} rows")
        })
    });

    run_property(&mut outcomes, "right-column-variation-counts-rows", trials, |trial| {
        let k = 1 + trial % 12;
        let (s, chi) = grid_chi_right(k);
        let full = PointSet::full(s.n());
        let rep = lib(variation_on(&s, &chi, &full, false))?;
        ensure(rep.value == k as f64, || {
            format!("ground set variation on {k} rows is {}", rep.value)
        })?;
        if s.n() <= 12 {
            let total = lib(total_variation(&s, &chi))?;
            ensure(total.value == k as f64, || {
                format!("subalgebra maximum on {k} rows is {}", total.value)
            })?;
        }
        Ok(())
    });

    SuiteReport { suite: "grid", outcomes }
}

fn chain_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();

    run_property(&mut outcomes, "classical-telescoping", trials, |trial| {
        let ds = seed_for(seed, "classical-telescoping", trial);
        let n = 1 + (ds % 50) as usize;
        let s = lib(Structure::chain(n))?;
        let f = lib(random_function(&s, (0.0, 1.0), derived_seed(ds, 1)))?;
        let classical: f64 = (1..n).map(|i| (f.value(i) - f.value(i - 1)).abs()).sum();
        let total = lib(total_variation(&s, &f))?;
        ensure(total.value == classical, || {
            format!("total {} differs from the telescoped sum {classical}", total.value)
        })?;
        let lin = lib(linear_variation(&s, &f))?;
        ensure(lin.value == classical, || {
            format!("linear {} differs from the telescoped sum {classical}", lin.value)
        })
    });

    SuiteReport { suite: "chain", outcomes }
}

/// Random tree plus a lattice-valued function and a median-closed subset.
fn random_instance(ds: u64) -> Result<(Structure, RealFunction, PointSet)> {
    let n = 2 + (ds % 8) as usize;
    let s = random_tree(n, derived_seed(ds, 1))?;
    let f = random_function(&s, (0.0, 1.0), derived_seed(ds, 2))?;
    let sigma = random_subalgebra(&s, derived_seed(ds, 3));
    Ok((s, f, sigma))
}

fn inequalities_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();

    run_property(&mut outcomes, "almost-disjoint-superadditivity", trials, |trial| {
        let ds = seed_for(seed, "almost-disjoint-superadditivity", trial);
        let (s, f, sigma) = lib(random_instance(ds))?;
        let n = s.n();
        let mut s1 = PointSet::empty(n);
        let mut s2 = PointSet::empty(n);
        for p in 0..n {
            let bits = derived_seed(ds, 100 + p as u64);
            if bits % 5 < 2 {
                s1.insert(p);
            } else if bits % 7 < 3 {
                s2.insert(p);
            }
        }
        if !s1.is_empty() && ds % 2 == 0 {
            s2.insert(s1.min().expect("nonempty set has a least point"));
        }
        ensure(s1.intersection(&s2).len() <= 1, || "generator broke almost disjointness".into())?;
        let part1 = lib(restricted_variation(&s, &f, &sigma, &s1))?;
        let part2 = lib(restricted_variation(&s, &f, &sigma, &s2))?;
        let whole = lib(variation_on(&s, &f, &sigma, false))?.value;
        ensure(part1 + part2 <= whole + VARIATION_TOLERANCE, || {
            format!("{part1} + {part2} exceeds the unrestricted value {whole}")
        })
    });

    run_property(&mut outcomes, "restriction-bounded-by-intersection", trials, |trial| {
        let ds = seed_for(seed, "restriction-bounded-by-intersection", trial);
        let (s, f, sigma) = lib(random_instance(ds))?;
        let other = random_subalgebra(&s, derived_seed(ds, 4));
        let restricted = lib(restricted_variation(&s, &f, &sigma, &other))?;
        let inter = sigma.intersection(&other);
        let bound = if inter.is_empty() {
            0.0
        } else {
            lib(variation_on(&s, &f, &inter, false))?.value
        };
        ensure(restricted <= bound + VARIATION_TOLERANCE, || {
            format!("restriction {restricted} exceeds the intersection value {bound}")
        })
    });

    run_property(&mut outcomes, "convex-restriction-equality", trials, |trial| {
        let ds = seed_for(seed, "convex-restriction-equality", trial);
        let (s, f, sigma) = lib(random_instance(ds))?;
        let c = random_convex_set(&s, derived_seed(ds, 4));
        let restricted = lib(restricted_variation(&s, &f, &sigma, &c))?;
        let inter = sigma.intersection(&c);
        let direct = if inter.is_empty() {
            0.0
        } else {
            lib(variation_on(&s, &f, &inter, false))?.value
        };
        ensure(restricted == direct, || {
            format!("restriction to a convex set gives {restricted}, intersection gives {direct}")
        })
    });

    run_property(&mut outcomes, "convex-split-superadditivity", trials, |trial| {
        let ds = seed_for(seed, "convex-split-superadditivity", trial);
        let (s, f, sigma) = lib(random_instance(ds))?;
        let Some((c1, c2)) = random_convex_split(&s, derived_seed(ds, 4)) else {
            return Ok(());
        };
        let value_on = |part: &PointSet| -> std::result::Result<f64, String> {
            let inter = sigma.intersection(part);
            if inter.is_empty() {
                Ok(0.0)
            } else {
                Ok(lib(variation_on(&s, &f, &inter, false))?.value)
            }
        };
        let v1 = value_on(&c1)?;
        let v2 = value_on(&c2)?;
        let whole = lib(variation_on(&s, &f, &sigma, false))?.value;
        ensure(v1 + v2 <= whole + VARIATION_TOLERANCE, || {
            format!("split halves give {v1} + {v2}, whole gives {whole}")
        })
    });

    run_property(&mut outcomes, "monotone-pushforward-bound", trials, |trial| {
        let ds = seed_for(seed, "monotone-pushforward-bound", trial);
        let nx = 2 + (ds % 6) as usize;
        let ny = 2 + (derived_seed(ds, 1) % 4) as usize;
        let x = lib(random_tree(nx, derived_seed(ds, 2)))?;
        let y = lib(random_tree(ny, derived_seed(ds, 3)))?;
        let h = random_monotone_map(&x, &y, derived_seed(ds, 4), 50)
            .unwrap_or_else(|| vec![(derived_seed(ds, 5) % ny as u64) as usize; nx]);
        let fy = lib(random_function(&y, (0.0, 1.0), derived_seed(ds, 6)))?;
        let sigma1 = random_subalgebra(&x, derived_seed(ds, 7));
        let image = PointSet::from_points(ny, sigma1.iter().map(|p| h[p]));
        let sigma2 =
            lib(span(&y, &image.union(&random_subalgebra(&y, derived_seed(ds, 8)))))?;
        let fh = lib(RealFunction::new((0..nx).map(|p| fy.value(h[p])).collect()))?;
        let lhs = lib(variation_on(&x, &fh, &sigma1, false))?.value;
        let rhs = lib(variation_on(&y, &fy, &sigma2, false))?.value;
        ensure(lhs <= rhs + VARIATION_TOLERANCE, || {
            format!("pulled-back value {lhs} exceeds the image value {rhs}")
        })?;
        let tot_l = lib(total_variation(&x, &fh))?.value;
        let tot_r = lib(total_variation(&y, &fy))?.value;
        ensure(tot_l <= tot_r + VARIATION_TOLERANCE, || {
            format!("pulled-back total {tot_l} exceeds the source total {tot_r}")
        })
    });

    run_property(&mut outcomes, "adjacent-images-almost-disjoint", trials, |trial| {
        let ds = seed_for(seed, "adjacent-images-almost-disjoint", trial);
        let nx = 2 + (ds % 6) as usize;
        let ny = 2 + (derived_seed(ds, 1) % 4) as usize;
        let x = lib(random_tree(nx, derived_seed(ds, 2)))?;
        let y = lib(random_tree(ny, derived_seed(ds, 3)))?;
        let h = random_monotone_map(&x, &y, derived_seed(ds, 4), 50)
            .unwrap_or_else(|| vec![(derived_seed(ds, 5) % ny as u64) as usize; nx]);
        let sigma1 = random_subalgebra(&x, derived_seed(ds, 6));
        let gaps = lib(adjacency_gaps(&x, &sigma1))?.doublets;
        for (i, &(a1, b1)) in gaps.iter().enumerate() {
            for &(a2, b2) in &gaps[i + 1..] {
                let span1 = lib(interval(&y, h[a1], h[b1]))?;
                let span2 = lib(interval(&y, h[a2], h[b2]))?;
                ensure(span1.intersection(&span2).len() <= 1, || {
                    format!(
                        "images of adjacent doublets ({a1},{b1}) and ({a2},{b2}) share a segment"
                    )
                })?;
            }
        }
        Ok(())
    });

    run_property(&mut outcomes, "nested-subalgebra-monotonicity", trials, |trial| {
        let ds = seed_for(seed, "nested-subalgebra-monotonicity", trial);
        let (s, f, sigma1) = lib(random_instance(ds))?;
        let extra = random_subalgebra(&s, derived_seed(ds, 4));
        let sigma2 = lib(span(&s, &sigma1.union(&extra)))?;
        let small = lib(variation_on(&s, &f, &sigma1, false))?.value;
        let large = lib(variation_on(&s, &f, &sigma2, false))?.value;
        ensure(small <= large + VARIATION_TOLERANCE, || {
            format!("smaller subalgebra gives {small}, larger gives {large}")
        })
    });

    let mut range_samples = 0usize;
    run_property(&mut outcomes, "monotone-range-bound", trials, |trial| {
        let ds = seed_for(seed, "monotone-range-bound", trial);
        let s = if trial == 0 {
            lib(Structure::chain(2))?
        } else {
            let n = 2 + (ds % 5) as usize;
            lib(pretree_shape(trial, n, derived_seed(ds, 1)))?
        };
        let palette = [0.0, 0.25, 0.5, 0.75, 1.0];
        match random_monotone_real(&s, &palette, derived_seed(ds, 2), 200) {
            None => Ok(()),
            Some(h) => {
                range_samples += 1;
                let total = lib(total_variation(&s, &h))?.value;
                ensure(total <= 1.0 + VARIATION_TOLERANCE, || {
                    format!("monotone values {:?} vary by {total} over a unit range", h.values())
                })
            }
        }
    });
    outcomes.push(PropertyOutcome {
        name: "monotone-range-samples",
        trials: range_samples,
        failures: usize::from(range_samples == 0),
        first_failure: (range_samples == 0)
            .then(|| "no trial produced a monotone palette function".to_string()),
    });

    run_property(&mut outcomes, "convex-split-restrictions", trials, |trial| {
        let ds = seed_for(seed, "convex-split-restrictions", trial);
        let (s, f, _) = lib(random_instance(ds))?;
        let Some((c1, c2)) = random_convex_split(&s, derived_seed(ds, 4)) else {
            return Ok(());
        };
        let (sub1, _) = lib(s.induced(&c1))?;
        let (sub2, _) = lib(s.induced(&c2))?;
        let whole = lib(total_variation(&s, &f))?.value;
        let v1 = lib(total_variation(&sub1, &f.restrict(&c1)))?.value;
        let v2 = lib(total_variation(&sub2, &f.restrict(&c2)))?.value;
        ensure(v1 + v2 <= whole + VARIATION_TOLERANCE, || {
            format!("restrictions give {v1} + {v2}, whole gives {whole}")
        })
    });

    SuiteReport { suite: "inequalities", outcomes }
}

fn topology_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();

    run_property(&mut outcomes, "branches-are-convex", trials, |trial| {
        let ds = seed_for(seed, "branches-are-convex", trial);
        let n = 2 + (ds % 8) as usize;
        let s = lib(pretree_shape(trial, n, derived_seed(ds, 1)))?;
        let r = induced_betweenness(&s);
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let sh = lib(shadow(&r, u, v))?;
                ensure(lib(is_convex(&s, &sh))?, || format!("shadow of ({u},{v}) not convex"))?;
                let br = lib(branch(&r, u, v))?;
                ensure(lib(is_convex(&s, &br))?, || format!("branch of ({u},{v}) not convex"))?;
            }
        }
        Ok(())
    });

    run_property(&mut outcomes, "shadow-space-is-discrete-hausdorff", trials, |trial| {
        let ds = seed_for(seed, "shadow-space-is-discrete-hausdorff", trial);
        let n = 2 + (ds % 8) as usize;
        let s = lib(pretree_shape(trial, n, derived_seed(ds, 1)))?;
        let r = induced_betweenness(&s);
        let t = lib(shadow_topology(&r))?;
        ensure(t.is_hausdorff(), || format!("{n} point shadow space is not Hausdorff"))?;
        ensure(t.open_count() == 1 << n, || {
            format!("{n} point shadow space has {} opens", t.open_count())
        })?;
        for a in 0..n {
            for b in 0..n {
                let seg = lib(interval(&s, a, b))?;
                ensure(t.is_closed(&seg), || format!("interval [{a},{b}] is not closed"))?;
            }
        }
        let mut probe = PointSet::empty(n);
        for p in 0..n {
            if derived_seed(ds, 20 + p as u64) % 2 == 0 {
                probe.insert(p);
            }
        }
        let closed = t.closure(&probe);
        let hull = lib(convex_hull(&s, &closed))?;
        ensure(t.is_closed(&hull), || "convex hull of a closed set is not closed".into())
    });

    run_property(&mut outcomes, "convex-trace-agrees", trials, |trial| {
        let ds = seed_for(seed, "convex-trace-agrees", trial);
        let n = 2 + (ds % 8) as usize;
        let s = lib(pretree_shape(trial, n, derived_seed(ds, 1)))?;
        let c = random_convex_set(&s, derived_seed(ds, 2));
        let (sub, _) = lib(s.induced(&c))?;
        let inner = lib(shadow_topology(&induced_betweenness(&sub)))?;
        let ambient = lib(shadow_topology(&induced_betweenness(&s)))?;
        ensure(inner == ambient.trace(&c), || {
            format!("shadow space of a convex piece differs from the trace on {c:?}")
        })
    });

    run_property(&mut outcomes, "bounded-functions-fragment", trials, |trial| {
        let ds = seed_for(seed, "bounded-functions-fragment", trial);
        let n = 2 + (ds % 8) as usize;
        let s = lib(pretree_shape(trial, n, derived_seed(ds, 1)))?;
        let t = lib(shadow_topology(&induced_betweenness(&s)))?;
        let f = lib(random_function(&s, (0.0, 1.0), derived_seed(ds, 2)))?;
        ensure(lib(is_fragmented(&t, &f))?, || {
            format!("function fails to fragment on a {n} point shadow space")
        })
    });

    let mut premise_hits = 0usize;
    run_property(&mut outcomes, "cover-fragmentation-lifts", trials, |trial| {
        let ds = seed_for(seed, "cover-fragmentation-lifts", trial);
        let (t, f) = if trial == 0 {
            (lib(FiniteTopology::discrete(3))?, lib(RealFunction::new(vec![0.0, 1.0, 0.0]))?)
        } else {
            let n = 2 + (ds % 7) as usize;
            let t = random_topology(n, derived_seed(ds, 1));
            let values =
                (0..n).map(|p| f64::from(derived_seed(ds, 10 + p as u64) % 4 == 3)).collect();
            (t, lib(RealFunction::new(values))?)
        };
        let n = t.n();
        let mut cover: Vec<PointSet> = Vec::new();
        for p in 0..n {
            let piece = t.closure(&PointSet::from_points(n, [p]));
            if !cover.contains(&piece) {
                cover.push(piece);
            }
        }
        let closed: Vec<PointSet> =
            t.opens().iter().map(|o| o.complement()).filter(|c| !c.is_empty()).collect();
        let extra = &closed[(derived_seed(ds, 2) as usize) % closed.len()];
        if !cover.contains(extra) {
            cover.push(extra.clone());
        }
        let mut premise = true;
        for piece in &cover {
            if !lib(is_fragmented(&t.trace(piece), &f.restrict(piece)))? {
                premise = false;
                break;
            }
        }
        let conclusion = lib(check_closed_cover_fragmentation(&t, &f, &cover))?;
        ensure(conclusion == lib(is_fragmented(&t, &f))?, || {
            "cover check disagrees with the direct scan".into()
        })?;
        if premise {
            premise_hits += 1;
            ensure(conclusion, || {
                format!("every piece fragments but the whole does not; cover {cover:?}")
            })?;
        }
        Ok(())
    });
    outcomes.push(PropertyOutcome {
        name: "cover-premise-instances",
        trials: premise_hits,
        failures: usize::from(premise_hits == 0),
        first_failure: (premise_hits == 0)
            .then(|| "no generated cover had every piece fragmented".to_string()),
    });

    let mut oscillation_hits = 0usize;
    run_property(&mut outcomes, "witness-iff-unfragmented", trials, |trial| {
        let ds = seed_for(seed, "witness-iff-unfragmented", trial);
        let (t, f) = if trial == 0 {
            (lib(FiniteTopology::indiscrete(2))?, lib(RealFunction::new(vec![0.0, 1.0]))?)
        } else {
            let n = 2 + (ds % 7) as usize;
            let t = random_topology(n, derived_seed(ds, 1));
            let values =
                (0..n).map(|p| f64::from(derived_seed(ds, 10 + p as u64) % 4 == 3)).collect();
            (t, lib(RealFunction::new(values))?)
        };
        let fragmented = lib(is_fragmented(&t, &f))?;
        let witness = lib(unfragmented_witness(&t, &f))?;
        ensure(witness.is_some() == !fragmented, || {
            "witness presence disagrees with the fragmentation scan".into()
        })?;
        if let Some(w) = witness {
            oscillation_hits += 1;
            ensure(w.alpha < w.beta, || "witness thresholds are not ordered".into())?;
            ensure(t.is_closed(&w.y), || "witness set is not closed".into())?;
            let n = t.n();
            let lo = PointSet::from_points(n, w.y.iter().filter(|&p| f.value(p) < w.alpha));
            let hi = PointSet::from_points(n, w.y.iter().filter(|&p| f.value(p) > w.beta));
            ensure(!lo.is_empty() && !hi.is_empty(), || {
                "witness thresholds cut nothing".into()
            })?;
            ensure(t.closure(&lo) == w.y && t.closure(&hi) == w.y, || {
                "witness preimages are not dense in the set".into()
            })?;
        }
        Ok(())
    });
    outcomes.push(PropertyOutcome {
        name: "oscillation-instances",
        trials: oscillation_hits,
        failures: usize::from(oscillation_hits == 0),
        first_failure: (oscillation_hits == 0)
            .then(|| "no generated instance was unfragmented".to_string()),
    });

    SuiteReport { suite: "topology", outcomes }
}

/// Batch of functions converging to `base`: alternating perturbations with
/// geometrically shrinking amplitude, folded back into the unit range.
fn perturbed_batch(s: &Structure, base: &RealFunction, eps: f64, len: usize) -> Vec<RealFunction> {
    (0..len)
        .map(|i| {
            let amp = eps / 4.0 * (0.5f64).powi(i as i32);
            let values: Vec<f64> = (0..s.n())
                .map(|x| {
                    let sign = if (i + x) % 2 == 0 { 1.0 } else { -1.0 };
                    let v = base.value(x) + sign * amp;
                    if (0.0..=1.0).contains(&v) {
                        v
                    } else {
                        base.value(x) - sign * amp
                    }
                })
                .collect();
            RealFunction::with_range(values, 0.0, 1.0).expect("perturbation stays in range")
        })
        .collect()
}

fn helly_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();

    run_property(&mut outcomes, "pigeonhole-class-size", trials, |trial| {
        let ds = seed_for(seed, "pigeonhole-class-size", trial);
        let n = 1 + (ds % 4) as usize;
        let count = 1 + (derived_seed(ds, 1) % 40) as usize;
        let eps = [0.15, 0.25, 0.4][(derived_seed(ds, 2) % 3) as usize];
        let s = lib(Structure::chain(n))?;
        let fs: Vec<RealFunction> = lib((0..count)
            .map(|i| random_function(&s, (0.0, 1.0), derived_seed(ds, 10 + i as u64)))
            .collect::<Result<_>>())?;
        let sel = lib(select_finite(&fs, (0.0, 1.0), eps))?;
        let boxes = (1.0f64 / eps).ceil() as u128;
        let bound = (count as u128).div_ceil(boxes.pow(n as u32)).max(1) as usize;
        ensure(sel.indices.len() >= bound, || {
            format!("class of {} from {count} functions misses the bound {bound}", sel.indices.len())
        })?;
        for (i, &a) in sel.indices.iter().enumerate() {
            for &b in &sel.indices[i + 1..] {
                for p in 0..n {
                    let gap = (fs[a].value(p) - fs[b].value(p)).abs();
                    ensure(gap <= eps + 1e-12, || {
                        format!("selected functions {a} and {b} differ by {gap} at {p}")
                    })?;
                }
            }
        }
        for (p, &(lo, hi)) in sel.cells.iter().enumerate() {
            ensure(hi - lo <= eps + 1e-12, || format!("cell at {p} is wider than {eps}"))?;
            for &a in &sel.indices {
                let v = fs[a].value(p);
                ensure(v >= lo - 1e-12 && v <= hi + 1e-12, || {
                    format!("member {a} escapes its cell at {p}")
                })?;
            }
        }
        Ok(())
    });

    run_property(&mut outcomes, "diagonal-limit-certification", trials, |trial| {
        let ds = seed_for(seed, "diagonal-limit-certification", trial);
        let n = 2 + (ds % 7) as usize;
        let s = lib(pretree_shape(trial, n, derived_seed(ds, 1)))?;
        let base = lib(random_function(&s, (0.0, 1.0), derived_seed(ds, 2)))?;
        let eps = 0.2;
        let schedule = [eps, eps / 2.0, eps / 4.0];
        let depth = 3;
        let batch = perturbed_batch(&s, &base, eps, 80);
        let mut supply = batch.iter().cloned();
        let sel = lib(select_diagonal(&s, || supply.next(), (0.0, 1.0), &schedule, depth))?;
        ensure(sel.result.indices.len() == depth, || {
            format!("final class reports {} indices", sel.result.indices.len())
        })?;
        ensure(sel.pulled >= depth, || "certification cannot precede the pulls".into())?;
        ensure(sel.stages.len() == depth, || format!("{} stages recorded", sel.stages.len()))?;
        for stage in &sel.stages {
            ensure(stage.indices.len() >= depth, || {
                format!("a certified stage holds only {} members", stage.indices.len())
            })?;
        }
        for k in 1..depth {
            let prev: HashSet<usize> = sel.stages[k - 1].indices.iter().copied().collect();
            ensure(sel.stages[k].indices.iter().all(|i| prev.contains(i)), || {
                "stages are not nested".into()
            })?;
        }
        let last = schedule[depth - 1];
        for (i, &a) in sel.result.indices.iter().enumerate() {
            for &b in &sel.result.indices[i + 1..] {
                for p in 0..s.n() {
                    let gap = (batch[a].value(p) - batch[b].value(p)).abs();
                    ensure(gap <= last + 1e-12, || {
                        format!("final members {a} and {b} differ by {gap} at {p}")
                    })?;
                }
            }
        }
        for p in 0..s.n() {
            let off = (sel.limit_estimate.value(p) - base.value(p)).abs();
            ensure(off <= eps, || format!("estimate misses the true limit by {off} at {p}"))?;
        }
        let r = lib(batch
            .iter()
            .map(|f| total_variation(&s, f).map(|rep| rep.value))
            .collect::<Result<Vec<f64>>>())?
        .into_iter()
        .fold(0.0, f64::max);
        ensure(
            lib(verify_limit_variation(&s, &sel.limit_estimate, r, s.n() as f64 * eps))?,
            || "estimate escapes the variation budget".into(),
        )
    });

    run_property(&mut outcomes, "uniform-batch-stays-bounded", trials, |trial| {
        let ds = seed_for(seed, "uniform-batch-stays-bounded", trial);
        let n = 2 + (ds % 5) as usize;
        let s = lib(random_tree(n, derived_seed(ds, 1)))?;
        let base = lib(random_function(&s, (0.0, 1.0), derived_seed(ds, 2)))?;
        let eps = 0.2;
        let schedule = [eps, eps / 2.0, eps / 4.0];
        let batch = perturbed_batch(&s, &base, eps, 40);
        let r = lib(batch
            .iter()
            .map(|f| total_variation(&s, f).map(|rep| rep.value))
            .collect::<Result<Vec<f64>>>())?
        .into_iter()
        .fold(0.0, f64::max);
        for f in &batch {
            ensure(lib(in_bv_r(&s, f, r))?, || "a batch member escapes the uniform bound".into())?;
        }
        let mut supply = batch.iter().cloned();
        let sel = lib(select_diagonal(&s, || supply.next(), (0.0, 1.0), &schedule, 3))?;
        ensure(
            lib(verify_limit_variation(&s, &sel.limit_estimate, r, s.n() as f64 * eps))?,
            || "certified estimate escapes the uniform bound".into(),
        )
    });

    run_property(&mut outcomes, "exhaustion-is-reported", 1, |_| {
        let s = lib(Structure::chain(1))?;
        let mut supply = vec![
            lib(RealFunction::with_range(vec![0.0], 0.0, 1.0))?,
            lib(RealFunction::with_range(vec![1.0], 0.0, 1.0))?,
        ]
        .into_iter();
        let err = select_diagonal(&s, || supply.next(), (0.0, 1.0), &[0.4, 0.2], 2)
            .map(|_| ())
            .unwrap_err();
        ensure(err == Error::SourceExhausted { stage: 0, needed: 2, have: 1 }, || {
            format!("expected a stage-0 exhaustion report, got {err}")
        })
    });

    SuiteReport { suite: "helly", outcomes }
}

fn oracles_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut outcomes = Vec::new();

    run_property(&mut outcomes, "median-agrees-with-path-oracle", trials, |trial| {
        let ds = seed_for(seed, "median-agrees-with-path-oracle", trial);
        let n = 2 + (ds % 8) as usize;
        let s = lib(random_tree(n, derived_seed(ds, 1)))?;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let fast = lib(s.median(x, y, z))?;
                    let slow = lib(s.median_by_path_intersection(x, y, z))?;
                    ensure(fast == slow, || {
                        format!("median of ({x},{y},{z}) disagrees: {fast} vs {slow}")
                    })?;
                }
            }
        }
        Ok(())
    });

    run_property(&mut outcomes, "gap-shortcut-matches-scan", trials, |trial| {
        let ds = seed_for(seed, "gap-shortcut-matches-scan", trial);
        let n = 2 + (ds % 8) as usize;
        let s = lib(random_tree(n, derived_seed(ds, 1)))?;
        let full = PointSet::full(n);
        let fast = lib(adjacency_gaps(&s, &full))?.doublets;
        let slow = gap_scan(&s, &full);
        ensure(fast == slow, || "edge shortcut disagrees with the interval scan".into())
    });

    run_property(&mut outcomes, "ground-set-matches-enumeration", trials, |trial| {
        let ds = seed_for(seed, "ground-set-matches-enumeration", trial);
        let n = 2 + (ds % 9) as usize;
        let s = lib(random_tree(n, derived_seed(ds, 1)))?;
        let f = lib(random_function(&s, (0.0, 1.0), derived_seed(ds, 2)))?;
        let fast = lib(total_variation(&s, &f))?;
        let slow = max_over_subalgebras(&s, &f);
        ensure(fast.value == slow.value, || {
            format!("ground-set value {} differs from the enumerated {}", fast.value, slow.value)
        })
    });

    run_property(&mut outcomes, "arm-sweep-matches-path-enumeration", trials, |trial| {
        let ds = seed_for(seed, "arm-sweep-matches-path-enumeration", trial);
        let n = 2 + (ds % 63) as usize;
        let s = lib(random_tree(n, derived_seed(ds, 1)))?;
        let f = lib(random_function(&s, (0.0, 1.0), derived_seed(ds, 2)))?;
        let sweep = lib(tree_linear_variation_arm_sweep(&s, &f))?;
        let enumerated = lib(linear_variation(&s, &f))?;
        ensure(sweep == enumerated.value, || {
            format!("arm sweep {sweep} differs from the path maximum {}", enumerated.value)
        })
    });

    SuiteReport { suite: "oracles", outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_at_small_trial_counts() {
        let reports = run_all(0xC0FFEE, 4);
        assert_eq!(reports.len(), SUITE_NAMES.len());
        for (report, &name) in reports.iter().zip(SUITE_NAMES) {
            assert_eq!(report.suite, name);
            assert!(
                report.passed(),
                "suite {} failed: {:?}",
                report.suite,
                report.outcomes.iter().find(|o| o.failures > 0)
            );
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let a = run_suite("chain", 7, 10).unwrap();
        let b = run_suite("chain", 7, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert_eq!(
            run_suite("nope", 0, 1).map(|_| ()),
            Err(Error::UnknownSuite { name: "nope".into() })
        );
    }

    #[test]
    fn reports_serialize_with_their_outcomes() {
        let report = run_suite("triod", 1, 2).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"suite\":\"triod\""));
        assert!(json.contains("leg-sum-formula"));
    }
}
