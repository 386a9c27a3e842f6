//! Median structures, bounded variation, and finite selection.
//!
//! The crate models finite median algebras through interchangeable
//! backends (explicit tables, trees, chains, grids, stars), checks the
//! betweenness and median laws with witness reporting, and computes
//! convex hulls, variation functionals, shadow topologies, and
//! epsilon-selection over families of functions. Randomized suites
//! exercise every claim at desk scale.

pub mod axioms;
pub mod caps;
pub mod convexity;
pub mod error;
pub mod generators;
pub mod helly;
pub mod io;
pub mod pointset;
pub mod structure;
pub mod suites;
pub mod topology;
pub mod variation;

pub use axioms::{
    check_median_axioms, check_pretree_axioms, is_median_pretree, AxiomReport,
    TernaryRelation, Violation,
};
pub use caps::SizeCaps;
pub use convexity::{
    convex_hull, directions, enumerate_convex_subsets, interval, is_collinear,
    is_convex, is_convexity_preserving, is_linear, is_median_preserving,
    is_monotone, is_monotone_real, span, Direction,
};
pub use error::{Error, Result};
pub use helly::{
    select_diagonal, select_finite, verify_limit_variation, DiagonalSelection,
    DiagonalStage, SelectionResult,
};
pub use generators::{derived_seed, fixtures, random_function, random_tree, Fixture};
pub use pointset::PointSet;
pub use structure::{Backend, Structure};
pub use suites::{run_all, run_suite, PropertyOutcome, SuiteReport, SUITE_NAMES};
pub use topology::{
    branch, check_closed_cover_fragmentation, is_fragmented, shadow, shadow_topology,
    unfragmented_witness, FiniteTopology, OscillationWitness,
};
pub use variation::{
    adjacency_gaps, deviation_support, in_bv_r, linear_variation,
    restricted_variation, total_variation, variation_on, GapSet, RealFunction,
    VariationReport, VARIATION_TOLERANCE,
};
