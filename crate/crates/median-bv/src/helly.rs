use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::structure::Structure;
use crate::variation::{total_variation, RealFunction};

/// Indices of functions that agree pointwise within `epsilon`, plus the
/// per-point value interval (width at most `epsilon`) they all fall into.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub indices: Vec<usize>,
    pub epsilon: f64,
    pub cells: Vec<(f64, f64)>,
}

/// One certified refinement stage of a diagonal selection.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalStage {
    pub epsilon: f64,
    pub indices: Vec<usize>,
}

/// Outcome of a lazy diagonal selection: the final class, every nested
/// stage, the per-point midpoint estimate of the limit, and how many
/// functions were drawn from the source.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSelection {
    pub result: SelectionResult,
    pub stages: Vec<DiagonalStage>,
    pub limit_estimate: RealFunction,
    pub pulled: usize,
}

fn check_range(range: (f64, f64)) -> Result<()> {
    let (c, d) = range;
    if !(c.is_finite() && d.is_finite() && c <= d) {
        return Err(Error::BadNumeric { what: "range must be a finite ordered pair" });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::BadNumeric { what: "epsilon must be positive and finite" });
    }
    Ok(())
}

fn check_into_range(f: &RealFunction, n: usize, range: (f64, f64)) -> Result<()> {
    if f.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: f.len() });
    }
    for (i, &v) in f.values().iter().enumerate() {
        if v < range.0 || v > range.1 {
            return Err(Error::ValueOutOfRange { index: i, value: v });
        }
    }
    Ok(())
}

fn box_count(range: (f64, f64), eps: f64) -> u32 {
    (((range.1 - range.0) / eps).ceil() as u32).max(1)
}

fn box_vector(f: &RealFunction, range: (f64, f64), eps: f64, k: u32) -> Vec<u32> {
    f.values()
        .iter()
        .map(|&v| (((v - range.0) / eps).floor() as u32).min(k - 1))
        .collect()
}

fn cell_of(range: (f64, f64), eps: f64, b: u32) -> (f64, f64) {
    let lo = range.0 + b as f64 * eps;
    (lo, (lo + eps).min(range.1))
}

/// Pigeonhole selection over a fixed horizon: the value cube is cut into
/// eps-boxes and the largest single-box index class is returned, ties going
/// to the lexicographically smallest box vector. The class size is at least
/// `ceil(N / K^n)` for `K` boxes per point.
pub fn select_finite(
    fs: &[RealFunction],
    range: (f64, f64),
    eps: f64,
) -> Result<SelectionResult> {
    check_range(range)?;
    check_eps(eps)?;
    if fs.is_empty() {
        return Err(Error::EmptyInput { what: "function list" });
    }
    let n = fs[0].len();
    if n == 0 {
        return Err(Error::EmptyInput { what: "function values" });
    }
    for f in fs {
        check_into_range(f, n, range)?;
    }
    let k = box_count(range, eps);
    let mut classes: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (i, f) in fs.iter().enumerate() {
        classes.entry(box_vector(f, range, eps, k)).or_default().push(i);
    }
    // Ties go to the lexicographically smallest box vector.
    let (key, indices) = classes
        .into_iter()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .expect("at least one class");
    let guarantee = match (k as u128).checked_pow(n as u32) {
        Some(boxes) => (fs.len() as u128).div_ceil(boxes).max(1) as usize,
        None => 1,
    };
    assert!(indices.len() >= guarantee, "pigeonhole bound violated");
    let cells = key.iter().map(|&b| cell_of(range, eps, b)).collect();
    let result = SelectionResult { indices, epsilon: eps, cells };
    debug_assert!(pairwise_close(fs, &result.indices, eps));
    Ok(result)
}

fn pairwise_close(fs: &[RealFunction], indices: &[usize], eps: f64) -> bool {
    indices.iter().enumerate().all(|(a, &i)| {
        indices[a + 1..].iter().all(|&j| {
            fs[i]
                .values()
                .iter()
                .zip(fs[j].values())
                .all(|(x, y)| (x - y).abs() <= eps)
        })
    })
}

/// Lazy diagonal selection. Functions are pulled one at a time; after each
/// pull the stage cascade is re-run: stage `k` keeps the largest
/// `eps_schedule[k]`-box class inside the previous stage's class. The pull
/// loop stops once every stage holds at least `depth` members, and the
/// first `depth` indices of the final class are returned; they are pairwise
/// `eps_schedule[depth-1]`-close at every point. The limit estimate is the
/// per-point midpoint of the final cell.
pub fn select_diagonal<F>(
    s: &Structure,
    mut source: F,
    range: (f64, f64),
    eps_schedule: &[f64],
    depth: usize,
) -> Result<DiagonalSelection>
where
    F: FnMut() -> Option<RealFunction>,
{
    check_range(range)?;
    if depth == 0 {
        return Err(Error::BadNumeric { what: "depth must be positive" });
    }
    if eps_schedule.len() < depth {
        return Err(Error::BadNumeric { what: "eps schedule must cover the requested depth" });
    }
    for w in eps_schedule.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::BadNumeric { what: "eps schedule must be strictly decreasing" });
        }
    }
    for &e in eps_schedule {
        check_eps(e)?;
    }

    let n = s.n();
    let mut pulled: Vec<RealFunction> = Vec::new();
    loop {
        match source() {
            Some(f) => {
                check_into_range(&f, n, range)?;
                pulled.push(f);
            }
            None => {
                // One final cascade to report where certification stalled.
                let (stage, have) = match run_cascade(&pulled, range, eps_schedule, depth) {
                    Ok(_) => unreachable!("cascade succeeds only right after a pull"),
                    Err(short) => short,
                };
                return Err(Error::SourceExhausted { stage, needed: depth, have });
            }
        }
        if let Ok(stages) = run_cascade(&pulled, range, eps_schedule, depth) {
            return Ok(finish(&pulled, range, eps_schedule, depth, stages));
        }
    }
}

type StageClasses = Vec<(Vec<u32>, Vec<usize>)>;

/// Runs the refinement cascade over everything pulled so far. Returns the
/// per-stage (box vector, class) pairs, or the first stage whose best class
/// is still too small together with its size.
fn run_cascade(
    pulled: &[RealFunction],
    range: (f64, f64),
    eps_schedule: &[f64],
    depth: usize,
) -> std::result::Result<StageClasses, (usize, usize)> {
    let mut cls: Vec<usize> = (0..pulled.len()).collect();
    let mut stages = Vec::with_capacity(depth);
    for (stage, &eps) in eps_schedule[..depth].iter().enumerate() {
        let k = box_count(range, eps);
        let mut classes: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        for &i in &cls {
            classes.entry(box_vector(&pulled[i], range, eps, k)).or_default().push(i);
        }
        let (key, best) = classes
            .into_iter()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .unwrap_or((Vec::new(), Vec::new()));
        if best.len() < depth {
            return Err((stage, best.len()));
        }
        cls = best.clone();
        stages.push((key, best));
    }
    Ok(stages)
}

fn finish(
    pulled: &[RealFunction],
    range: (f64, f64),
    eps_schedule: &[f64],
    depth: usize,
    stages: StageClasses,
) -> DiagonalSelection {
    let eps = eps_schedule[depth - 1];
    let (final_key, final_cls) = stages.last().expect("depth is positive").clone();
    let indices: Vec<usize> = final_cls[..depth].to_vec();
    let cells: Vec<(f64, f64)> =
        final_key.iter().map(|&b| cell_of(range, eps_schedule[depth - 1], b)).collect();
    let midpoints: Vec<f64> = cells.iter().map(|&(lo, hi)| (lo + hi) / 2.0).collect();
    let limit_estimate = RealFunction::with_range(midpoints, range.0, range.1)
        .expect("midpoints stay inside the range");
    let stage_records: Vec<DiagonalStage> = stages
        .iter()
        .zip(eps_schedule)
        .map(|((_, cls), &e)| DiagonalStage { epsilon: e, indices: cls.clone() })
        .collect();
    for w in stage_records.windows(2) {
        debug_assert!(
            w[1].indices.iter().all(|i| w[0].indices.contains(i)),
            "stages must be nested"
        );
    }
    let result = SelectionResult { indices, epsilon: eps, cells };
    debug_assert!(pairwise_close(pulled, &result.indices, eps));
    DiagonalSelection { result, stages: stage_records, limit_estimate, pulled: pulled.len() }
}

/// Whether the total variation of a claimed limit stays within `r`, up to
/// an explicit tolerance. For midpoint estimates out of `select_diagonal`
/// the natural budget is `n * eps`: each gap endpoint moved by at most
/// `eps / 2`, and a ground set of `n` points has fewer than `n` gaps.
pub fn verify_limit_variation(
    s: &Structure,
    limit: &RealFunction,
    r: f64,
    tol: f64,
) -> Result<bool> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::BadNumeric { what: "variation bound must be finite and nonnegative" });
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::BadNumeric { what: "tolerance must be finite and nonnegative" });
    }
    Ok(total_variation(s, limit)?.value <= r + tol)
}
