//! File formats and text rendering for the command-line front end.
//!
//! Documents are JSON. A structure document carries `kind`, `n`, and the
//! backend payload; function documents carry `values` and an optional
//! `range`; topology documents carry `n` and `opens`. Point tokens are
//! integer ids, or `r,c` coordinates on a grid backend.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::structure::{Backend, Structure};
use crate::topology::FiniteTopology;
use crate::variation::RealFunction;

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum StructureDoc {
    Table { n: usize, table: Vec<usize> },
    Tree { n: usize, edges: Vec<(usize, usize)> },
    Chain { n: usize },
    Grid { n: Option<usize>, width: usize, height: usize },
    Star { n: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDoc {
    values: Vec<f64>,
    range: Option<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionListDoc {
    functions: Vec<Vec<f64>>,
    range: Option<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    map: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDoc {
    n: usize,
    opens: Vec<Vec<usize>>,
}

fn bad(msg: String) -> Error {
    Error::BadStructure(msg)
}

pub fn parse_structure(text: &str) -> Result<Structure> {
    let doc: StructureDoc =
        serde_json::from_str(text).map_err(|e| bad(format!("structure document: {e}")))?;
    match doc {
        StructureDoc::Table { n, table } => Structure::table(n, table),
        StructureDoc::Tree { n, edges } => Structure::tree(n, edges),
        StructureDoc::Chain { n } => Structure::chain(n),
        StructureDoc::Grid { n, width, height } => {
            if let Some(n) = n {
                if n != width * height {
                    return Err(bad(format!(
                        "grid declares n={n} but width {width} by height {height} has {} points",
                        width * height
                    )));
                }
            }
            Structure::grid(width, height)
        }
        StructureDoc::Star { n } => Structure::star(n),
    }
}

pub fn parse_function(text: &str) -> Result<RealFunction> {
    let doc: FunctionDoc =
        serde_json::from_str(text).map_err(|e| bad(format!("function document: {e}")))?;
    match doc.range {
        Some((lo, hi)) => RealFunction::with_range(doc.values, lo, hi),
        None => RealFunction::new(doc.values),
    }
}

/// Functions plus the range they live in: the declared one, or the observed
/// hull of all values when none is declared.
pub fn parse_function_list(text: &str) -> Result<(Vec<RealFunction>, (f64, f64))> {
    let doc: FunctionListDoc =
        serde_json::from_str(text).map_err(|e| bad(format!("function list document: {e}")))?;
    if doc.functions.is_empty() {
        return Err(Error::EmptyInput { what: "function list" });
    }
    let range = match doc.range {
        Some(r) => r,
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for values in &doc.functions {
                for &v in values {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            if lo > hi {
                (0.0, 0.0)
            } else {
                (lo, hi)
            }
        }
    };
    let fs = doc
        .functions
        .into_iter()
        .map(|values| RealFunction::with_range(values, range.0, range.1))
        .collect::<Result<Vec<_>>>()?;
    Ok((fs, range))
}

pub fn parse_map(text: &str) -> Result<Vec<usize>> {
    let doc: MapDoc = serde_json::from_str(text).map_err(|e| bad(format!("map document: {e}")))?;
    Ok(doc.map)
}

pub fn parse_topology(text: &str) -> Result<FiniteTopology> {
    let doc: TopologyDoc =
        serde_json::from_str(text).map_err(|e| Error::BadTopology(format!("document: {e}")))?;
    let opens = doc
        .opens
        .iter()
        .map(|pts| {
            for &p in pts {
                if p >= doc.n {
                    return Err(Error::PointOutOfRange { point: p, n: doc.n });
                }
            }
            Ok(PointSet::from_points(doc.n, pts.iter().copied()))
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteTopology::new(doc.n, &opens)
}

/// A file that is either a structure (field `kind`) or a topology (field
/// `opens`). Structures are turned into their shadow topology by the caller.
pub enum SpaceDoc {
    Structure(Structure),
    Topology(FiniteTopology),
}

pub fn parse_space(text: &str) -> Result<SpaceDoc> {
    let probe: serde_json::Value =
        serde_json::from_str(text).map_err(|e| bad(format!("space document: {e}")))?;
    if probe.get("kind").is_some() {
        Ok(SpaceDoc::Structure(parse_structure(text)?))
    } else if probe.get("opens").is_some() {
        Ok(SpaceDoc::Topology(parse_topology(text)?))
    } else {
        Err(bad("space document needs either a `kind` or an `opens` field".into()))
    }
}

/// One point token: a bare id, or `r,c` coordinates on a grid. On non-grid
/// backends a comma token splits into ids instead, so token parsing happens
/// list-wise in [`parse_points`].
fn parse_id(token: &str, n: usize) -> Result<usize> {
    let id: usize = token
        .trim()
        .parse()
        .map_err(|_| bad(format!("point token {token:?} is not an id")))?;
    if id >= n {
        return Err(Error::PointOutOfRange { point: id, n });
    }
    Ok(id)
}

/// Expands point tokens against a structure. Tokens split on commas; on a
/// grid backend a token with exactly one comma is an `r,c` coordinate pair
/// instead of two ids.
pub fn parse_points(s: &Structure, tokens: &[String]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for token in tokens {
        let parts: Vec<&str> = token.split(',').filter(|p| !p.trim().is_empty()).collect();
        if parts.len() == 2 {
            if let Backend::Grid { width, height } = s.backend() {
                let r = parse_coord(parts[0], *height, "row")?;
                let c = parse_coord(parts[1], *width, "column")?;
                out.push(r * width + c);
                continue;
            }
        }
        for part in parts {
            out.push(parse_id(part, s.n())?);
        }
    }
    Ok(out)
}

fn parse_coord(token: &str, limit: usize, what: &str) -> Result<usize> {
    let v: usize = token
        .trim()
        .parse()
        .map_err(|_| bad(format!("{what} token {token:?} is not a number")))?;
    if v >= limit {
        return Err(bad(format!("{what} {v} is outside 0..{limit}")));
    }
    Ok(v)
}

/// One point parsed from a single token (commands taking exactly one point).
pub fn parse_point(s: &Structure, token: &str) -> Result<usize> {
    let pts = parse_points(s, &[token.to_string()])?;
    match pts.as_slice() {
        [p] => Ok(*p),
        _ => Err(bad(format!("expected one point, token {token:?} names {}", pts.len()))),
    }
}

/// A real rounded to nine significant digits and printed in the shortest
/// form that reproduces the rounded value, so reports are byte-stable.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(8 - mag);
    let rounded = (v * scale).round() / scale;
    format!("{rounded}")
}

pub fn fmt_points(set: &PointSet) -> String {
    let parts: Vec<String> = set.iter().map(|p| p.to_string()).collect();
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_documents_round_trip_each_backend() {
        let tree = parse_structure(r#"{"kind":"tree","n":4,"edges":[[0,3],[1,3],[2,3]]}"#).unwrap();
        assert_eq!(tree.n(), 4);
        assert_eq!(tree.median(0, 1, 2).unwrap(), 3);
        let grid = parse_structure(r#"{"kind":"grid","width":2,"height":3}"#).unwrap();
        assert_eq!(grid.n(), 6);
        let chain = parse_structure(r#"{"kind":"chain","n":5}"#).unwrap();
        assert_eq!(chain.median(0, 4, 2).unwrap(), 2);
        let star = parse_structure(r#"{"kind":"star","n":4}"#).unwrap();
        assert_eq!(star.median(1, 2, 3).unwrap(), 0);
        let table = parse_structure(r#"{"kind":"table","n":1,"table":[0]}"#).unwrap();
        assert_eq!(table.n(), 1);
    }

    #[test]
    fn grid_documents_validate_the_declared_count() {
        let err = parse_structure(r#"{"kind":"grid","n":5,"width":2,"height":3}"#).unwrap_err();
        assert!(matches!(err, Error::BadStructure(_)));
        assert!(parse_structure(r#"{"kind":"grid","n":6,"width":2,"height":3}"#).is_ok());
    }

    #[test]
    fn function_documents_apply_the_declared_range() {
        let f = parse_function(r#"{"values":[0.5,1.0],"range":[0,1]}"#).unwrap();
        assert_eq!(f.range(), Some((0.0, 1.0)));
        let err = parse_function(r#"{"values":[2.0],"range":[0,1]}"#).unwrap_err();
        assert_eq!(err, Error::ValueOutOfRange { index: 0, value: 2.0 });
    }

    #[test]
    fn function_lists_default_to_the_observed_hull() {
        let (fs, range) =
            parse_function_list(r#"{"functions":[[0.25,0.5],[0.75,1.0]]}"#).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(range, (0.25, 1.0));
    }

    #[test]
    fn point_tokens_split_by_backend() {
        let tree = parse_structure(r#"{"kind":"tree","n":4,"edges":[[0,3],[1,3],[2,3]]}"#).unwrap();
        let pts = parse_points(&tree, &["0,1,2".to_string()]).unwrap();
        assert_eq!(pts, vec![0, 1, 2]);
        let grid = parse_structure(r#"{"kind":"grid","width":2,"height":3}"#).unwrap();
        let pts = parse_points(&grid, &["2,1".to_string(), "0".to_string()]).unwrap();
        assert_eq!(pts, vec![5, 0]);
        let err = parse_points(&tree, &["9".to_string()]).unwrap_err();
        assert_eq!(err, Error::PointOutOfRange { point: 9, n: 4 });
    }

    #[test]
    fn space_documents_are_sniffed_by_field() {
        assert!(matches!(
            parse_space(r#"{"kind":"chain","n":2}"#).unwrap(),
            SpaceDoc::Structure(_)
        ));
        assert!(matches!(
            parse_space(r#"{"n":2,"opens":[[1]]}"#).unwrap(),
            SpaceDoc::Topology(_)
        ));
        assert!(parse_space(r#"{"values":[1.0]}"#).is_err());
    }

    #[test]
    fn reals_print_to_nine_significant_digits() {
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(2.0), "2");
        assert_eq!(fmt_real(0.75), "0.75");
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(-0.5), "-0.5");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_real(1023.0 / 1024.0), "0.999023438");
        assert_eq!(fmt_real(123456789.25), "123456789");
    }
}
