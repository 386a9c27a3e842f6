//! Batch front end: parses structure/function documents, runs one library
//! operation, and prints a deterministic report. Exit status is 0 on
//! success, 1 when a checked property is violated, 2 on input errors.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use median_bv::axioms::{check_median_axioms, check_pretree_axioms, induced_betweenness, is_median_pretree, AxiomReport};
use median_bv::convexity::{convex_hull, interval, is_monotone, span};
use median_bv::error::{Error, Result};
use median_bv::generators::{chi_hub, geometric_star_function};
use median_bv::helly::{select_diagonal, select_finite};
use median_bv::io::{
    fmt_points, fmt_real, parse_function, parse_function_list, parse_map, parse_point,
    parse_points, parse_space, parse_structure, SpaceDoc,
};
use median_bv::pointset::PointSet;
use median_bv::structure::Structure;
use median_bv::suites::{run_all, run_suite, SuiteReport, SUITE_NAMES};
use median_bv::topology::{is_fragmented, shadow, shadow_topology, unfragmented_witness, FiniteTopology};
use median_bv::variation::{adjacency_gaps, linear_variation, restricted_variation, variation_on, RealFunction};

#[derive(Parser)]
#[command(name = "median-bv", about = "Median structures, variation, and selection", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scan the betweenness and median laws of a structure
    Check { structure: PathBuf },
    /// Median of three points
    Median { structure: PathBuf, x: String, y: String, z: String },
    /// Points lying between two endpoints
    Interval { structure: PathBuf, a: String, b: String },
    /// Convex hull of a point list
    Hull {
        structure: PathBuf,
        #[arg(required = true)]
        pts: Vec<String>,
    },
    /// Median closure of a point list
    Span {
        structure: PathBuf,
        #[arg(required = true)]
        pts: Vec<String>,
    },
    /// Adjacent doublets of a point set (the whole ground set by default)
    Gaps { structure: PathBuf, pts: Vec<String> },
    /// Variation of a function over a point set (the ground set by default)
    Var {
        structure: PathBuf,
        function: PathBuf,
        #[arg(long, num_args = 1..)]
        sigma: Vec<String>,
        #[arg(long)]
        relaxed: bool,
    },
    /// Maximal variation over linearly ordered subsets
    Linvar { structure: PathBuf, function: PathBuf },
    /// Variation over sigma restricted to doublets inside a second set
    RestrictedVar {
        structure: PathBuf,
        function: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        sigma: Vec<String>,
        #[arg(long = "in", num_args = 1.., required = true)]
        within: Vec<String>,
    },
    /// Whether a point map preserves betweenness
    Monotone { src: PathBuf, dst: PathBuf, map: PathBuf },
    /// Points with u between them and v
    Shadow { structure: PathBuf, u: String, v: String },
    /// All open sets of the shadow topology, one per line
    Topology { structure: PathBuf },
    /// Whether a function is fragmented on a space (structure or topology)
    Fragmented { space: PathBuf, function: PathBuf },
    /// Oscillation witness on an unfragmented space, if any
    Witness { space: PathBuf, function: PathBuf },
    /// Select pointwise-close functions from a finite family
    Helly {
        structure: PathBuf,
        functions: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Evaluate a named function family over growing star truncations
    LimitProbe {
        family: String,
        rule: String,
        #[arg(long)]
        max: usize,
    },
    /// Run seeded property suites
    Proptest {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::BadStructure(format!("cannot read {}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<Structure> {
    parse_structure(&read(path)?)
}

fn load_function(s: &Structure, path: &Path) -> Result<RealFunction> {
    let f = parse_function(&read(path)?)?;
    if f.len() != s.n() {
        return Err(Error::LengthMismatch { expected: s.n(), found: f.len() });
    }
    Ok(f)
}

fn point_set(s: &Structure, tokens: &[String]) -> Result<PointSet> {
    Ok(PointSet::from_points(s.n(), parse_points(s, tokens)?))
}

/// Structure files become their shadow topology; topology files load as is.
fn load_space(path: &Path) -> Result<FiniteTopology> {
    match parse_space(&read(path)?)? {
        SpaceDoc::Structure(s) => shadow_topology(&induced_betweenness(&s)),
        SpaceDoc::Topology(t) => Ok(t),
    }
}

fn print_report(report: &AxiomReport) {
    for &(law, count) in &report.counts {
        if count == 0 {
            println!("{law} ok");
        } else {
            let first = report
                .violations
                .iter()
                .find(|v| v.law == law)
                .map(|v| {
                    v.witness.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
                })
                .unwrap_or_default();
            println!("{law} violations={count} first={first}");
        }
    }
}

fn run(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Check { structure } => {
            let s = load_structure(&structure)?;
            println!("n={} backend={}", s.n(), s.backend_name());
            let r = induced_betweenness(&s);
            let pre = check_pretree_axioms(&r)?;
            print_report(&pre);
            let med = check_median_axioms(&s)?;
            print_report(&med);
            let pretree = is_median_pretree(&r)?;
            println!("median pretree: {}", if pretree { "yes" } else { "no" });
            Ok(if med.passed() { 0 } else { 1 })
        }
        Cmd::Median { structure, x, y, z } => {
            let s = load_structure(&structure)?;
            let (x, y, z) =
                (parse_point(&s, &x)?, parse_point(&s, &y)?, parse_point(&s, &z)?);
            println!("{}", s.median(x, y, z)?);
            Ok(0)
        }
        Cmd::Interval { structure, a, b } => {
            let s = load_structure(&structure)?;
            let (a, b) = (parse_point(&s, &a)?, parse_point(&s, &b)?);
            println!("{}", fmt_points(&interval(&s, a, b)?));
            Ok(0)
        }
        Cmd::Hull { structure, pts } => {
            let s = load_structure(&structure)?;
            let set = point_set(&s, &pts)?;
            println!("{}", fmt_points(&convex_hull(&s, &set)?));
            Ok(0)
        }
        Cmd::Span { structure, pts } => {
            let s = load_structure(&structure)?;
            let set = point_set(&s, &pts)?;
            println!("{}", fmt_points(&span(&s, &set)?));
            Ok(0)
        }
        Cmd::Gaps { structure, pts } => {
            let s = load_structure(&structure)?;
            let set = if pts.is_empty() {
                PointSet::full(s.n())
            } else {
                point_set(&s, &pts)?
            };
            for (a, b) in adjacency_gaps(&s, &set)?.doublets {
                println!("{a} {b}");
            }
            Ok(0)
        }
        Cmd::Var { structure, function, sigma, relaxed } => {
            let s = load_structure(&structure)?;
            let f = load_function(&s, &function)?;
            let set = if sigma.is_empty() {
                PointSet::full(s.n())
            } else {
                point_set(&s, &sigma)?
            };
            let report = variation_on(&s, &f, &set, relaxed)?;
            println!("{}", fmt_real(report.value));
            Ok(0)
        }
        Cmd::Linvar { structure, function } => {
            let s = load_structure(&structure)?;
            let f = load_function(&s, &function)?;
            println!("{}", fmt_real(linear_variation(&s, &f)?.value));
            Ok(0)
        }
        Cmd::RestrictedVar { structure, function, sigma, within } => {
            let s = load_structure(&structure)?;
            let f = load_function(&s, &function)?;
            let sigma = point_set(&s, &sigma)?;
            let within = point_set(&s, &within)?;
            println!("{}", fmt_real(restricted_variation(&s, &f, &sigma, &within)?));
            Ok(0)
        }
        Cmd::Monotone { src, dst, map } => {
            let s = load_structure(&src)?;
            let d = load_structure(&dst)?;
            let map = parse_map(&read(&map)?)?;
            if map.len() != s.n() {
                return Err(Error::LengthMismatch { expected: s.n(), found: map.len() });
            }
            if let Some(&bad) = map.iter().find(|&&p| p >= d.n()) {
                return Err(Error::PointOutOfRange { point: bad, n: d.n() });
            }
            let verdict = is_monotone(&s, &map, &d)?;
            println!("monotone: {}", if verdict { "yes" } else { "no" });
            Ok(0)
        }
        Cmd::Shadow { structure, u, v } => {
            let s = load_structure(&structure)?;
            let (u, v) = (parse_point(&s, &u)?, parse_point(&s, &v)?);
            let r = induced_betweenness(&s);
            println!("{}", fmt_points(&shadow(&r, u, v)?));
            Ok(0)
        }
        Cmd::Topology { structure } => {
            let s = load_structure(&structure)?;
            let t = shadow_topology(&induced_betweenness(&s))?;
            for open in t.opens() {
                println!("{}", fmt_points(&open));
            }
            Ok(0)
        }
        Cmd::Fragmented { space, function } => {
            let t = load_space(&space)?;
            let f = parse_function(&read(&function)?)?;
            let verdict = is_fragmented(&t, &f)?;
            println!("fragmented: {}", if verdict { "yes" } else { "no" });
            Ok(0)
        }
        Cmd::Witness { space, function } => {
            let t = load_space(&space)?;
            let f = parse_function(&read(&function)?)?;
            match unfragmented_witness(&t, &f)? {
                Some(w) => {
                    println!("y: {}", fmt_points(&w.y));
                    println!("alpha: {}", fmt_real(w.alpha));
                    println!("beta: {}", fmt_real(w.beta));
                }
                None => println!("no witness"),
            }
            Ok(0)
        }
        Cmd::Helly { structure, functions, eps, depth } => {
            let s = load_structure(&structure)?;
            let (fs, range) = parse_function_list(&read(&functions)?)?;
            for f in &fs {
                if f.len() != s.n() {
                    return Err(Error::LengthMismatch { expected: s.n(), found: f.len() });
                }
            }
            let (indices, eps_out, estimate) = match depth {
                None => {
                    let sel = select_finite(&fs, range, eps)?;
                    let estimate: Vec<f64> =
                        sel.cells.iter().map(|&(lo, hi)| (lo + hi) / 2.0).collect();
                    (sel.indices, sel.epsilon, estimate)
                }
                Some(depth) => {
                    let schedule: Vec<f64> =
                        (0..depth.max(1)).map(|i| eps / (1u64 << i) as f64).collect();
                    let mut supply = fs.iter().cloned();
                    let sel = select_diagonal(&s, || supply.next(), range, &schedule, depth)?;
                    let eps_out = sel.result.epsilon;
                    (sel.result.indices, eps_out, sel.limit_estimate.values().to_vec())
                }
            };
            let idx: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
            println!("indices: {}", idx.join(" "));
            println!("eps: {}", fmt_real(eps_out));
            let est: Vec<String> = estimate.iter().map(|&v| fmt_real(v)).collect();
            println!("estimate: {}", est.join(" "));
            Ok(0)
        }
        Cmd::LimitProbe { family, rule, max } => {
            if family != "star" {
                return Err(Error::BadStructure(format!(
                    "unknown probe family {family:?}, expected \"star\""
                )));
            }
            if max == 0 {
                return Err(Error::EmptyInput { what: "probe horizon" });
            }
            let n = max + 1;
            let s = Structure::star(n)?;
            let f = match rule.as_str() {
                "chi-hub" => chi_hub(n),
                "geometric" => geometric_star_function(n),
                _ => {
                    return Err(Error::BadStructure(format!(
                        "unknown probe rule {rule:?}, expected \"chi-hub\" or \"geometric\""
                    )))
                }
            };
            let mut values = Vec::with_capacity(max);
            for k in 1..=max {
                let sigma = PointSet::from_points(n, 0..=k);
                let v = variation_on(&s, &f, &sigma, false)?.value;
                println!("n={k} value={}", fmt_real(v));
                values.push(v);
            }
            let increasing = values.windows(2).all(|w| w[1] > w[0]);
            println!("strictly increasing: {}", if increasing { "yes" } else { "no" });
            let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
            let trend = if diffs.is_empty() {
                "none"
            } else if diffs.windows(2).all(|w| w[1] == w[0]) {
                "constant"
            } else if diffs.windows(2).all(|w| w[1] < w[0]) {
                "vanishing"
            } else {
                "varying"
            };
            println!("increments: {trend}");
            Ok(0)
        }
        Cmd::Proptest { suite, seed, trials } => {
            let reports: Vec<SuiteReport> = if suite == "all" {
                run_all(seed, trials)
            } else {
                let report = match run_suite(&suite, seed, trials) {
                    Err(Error::UnknownSuite { name }) => {
                        eprintln!(
                            "error: unknown suite {name:?}, expected \"all\" or one of: {}",
                            SUITE_NAMES.join(", ")
                        );
                        return Ok(2);
                    }
                    other => other?,
                };
                vec![report]
            };
            let mut failures = 0usize;
            let mut properties = 0usize;
            let mut total = 0usize;
            for report in &reports {
                for o in &report.outcomes {
                    properties += 1;
                    total += o.trials;
                    failures += o.failures;
                    let mut line = format!(
                        "[{}] {} trials={} failures={}",
                        report.suite, o.name, o.trials, o.failures
                    );
                    if let Some(msg) = &o.first_failure {
                        line.push_str(&format!(" first={msg:?}"));
                    }
                    println!("{line}");
                }
            }
            println!(
                "result: {} ({} suites, {} properties, {} trials, {} failures)",
                if failures == 0 { "pass" } else { "fail" },
                reports.len(),
                properties,
                total,
                failures
            );
            Ok(if failures == 0 { 0 } else { 1 })
        }
    }
}
