//! JSON and text formats.
//!
//! Labels, levels and shapes are JSON integers. Every count, coordinate,
//! coefficient and weight is written as a string holding an exact integer
//! or fraction (`"3"`, `"-1/2"`); readers accept both strings and integers.

use std::sync::Arc;

use num::{BigInt, BigRational, BigUint, Signed, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{BranchSets, Decomposition, Elimination, Graph, MinorOp};
use crate::model::{
    CellIndex, FullMarginalVector, Model, ReducedMarginalVector, SimplicialComplex, Table,
    TableShape, Vertex,
};
use crate::normality::{HoleReport, NormalityCertificate};
use crate::polyhedra::{FacepopperReport, FacepopperVerdict, FacetCheck, HoldsBecause, InequalitySystem};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    ground: Vec<Vertex>,
    facets: Vec<Vec<Vertex>>,
    shape: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    shape: Vec<u32>,
    cells: Vec<CellDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    index: Vec<u32>,
    count: Value,
}

fn bad(e: serde_json::Error) -> Error {
    Error::Input(e.to_string())
}

/// `{"ground": [...], "facets": [[...], ...], "shape": [...]}`.
pub fn parse_model(text: &str) -> Result<Arc<Model>> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(bad)?;
    let complex = SimplicialComplex::from_facets(&doc.facets, &doc.ground)?;
    Model::new(complex, TableShape::new(doc.shape)?)
}

fn parse_count(v: &Value) -> Result<BigUint> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_u64() => n.to_string(),
        _ => return Err(Error::input(format!("count must be a nonnegative integer, got {v}"))),
    };
    s.parse::<BigUint>()
        .map_err(|_| Error::input(format!("count must be a nonnegative integer, got {s:?}")))
}

/// `{"shape": [...], "cells": [{"index": [...], "count": k}, ...]}`.
pub fn parse_table(text: &str) -> Result<Table> {
    let doc: TableDoc = serde_json::from_str(text).map_err(bad)?;
    let shape = TableShape::new(doc.shape)?;
    let mut t = Table::zero(shape);
    for c in doc.cells {
        t.add_count(CellIndex(c.index), parse_count(&c.count)?)?;
    }
    Ok(t)
}

/// One `u v` edge per line; isolated vertices on a `vertices:` line. Blank
/// lines and `#` comments are skipped.
pub fn parse_graph_text(text: &str) -> Result<Graph> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let num = |tok: &str, line: usize| {
        tok.parse::<Vertex>()
            .map_err(|_| Error::input(format!("line {line}: {tok:?} is not a vertex label")))
    };
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vertices:") {
            for tok in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
                vertices.push(num(tok, k + 1)?);
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::input(format!("line {}: expected \"u v\"", k + 1)));
        }
        let (a, b) = (num(toks[0], k + 1)?, num(toks[1], k + 1)?);
        vertices.extend([a, b]);
        edges.push((a, b));
    }
    Graph::new(vertices, edges)
}

/// A model from either format: JSON when the text starts with `{`, the
/// graph text format (binary shape) otherwise.
pub fn parse_model_or_graph(text: &str) -> Result<Arc<Model>> {
    if text.trim_start().starts_with('{') {
        parse_model(text)
    } else {
        Ok(parse_graph_text(text)?.binary_model())
    }
}

/// A graph from either format; JSON facets must have at most two vertices.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.trim_start().starts_with('{') {
        Graph::from_complex(parse_model(text)?.complex())
    } else {
        parse_graph_text(text)
    }
}

/// `"3"`, `"-1/2"`.
pub fn rational(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

/// `{"num": "1", "den": "2"}`.
pub fn fraction(q: &BigRational) -> Value {
    json!({"num": q.numer().to_string(), "den": q.denom().to_string()})
}

pub fn integer(v: impl ToString) -> Value {
    Value::String(v.to_string())
}

pub fn model_json(m: &Model) -> Value {
    let facets: Vec<Vec<Vertex>> = m.complex().facets().iter().map(|f| f.vertices().to_vec()).collect();
    json!({
        "ground": m.complex().ground(),
        "facets": facets,
        "shape": m.shape().sizes(),
    })
}

pub fn table_json(t: &Table) -> Value {
    let cells: Vec<Value> = t
        .iter()
        .map(|(c, n)| json!({"index": c.levels(), "count": integer(n)}))
        .collect();
    json!({"shape": t.shape().sizes(), "cells": cells})
}

pub fn full_vector_json(v: &FullMarginalVector) -> Value {
    let coords: Vec<Value> = v
        .model()
        .full_keys()
        .iter()
        .zip(v.coords())
        .map(|(k, c)| json!({"face": k.face.vertices(), "index": k.index, "value": rational(c)}))
        .collect();
    json!({"coords": coords})
}

pub fn reduced_vector_json(v: &ReducedMarginalVector) -> Value {
    let coords: Vec<Value> = v
        .model()
        .reduced_keys()
        .iter()
        .zip(v.coords())
        .map(|(k, c)| json!({"face": k.face.vertices(), "index": k.index, "value": rational(c)}))
        .collect();
    json!({"coords": coords})
}

/// `{"coeffs": [{"face", "index", "c"}, ...]}` with zero coefficients left
/// out, plus the origin and a readable rendering.
pub fn inequality_json(sys: &InequalitySystem, k: usize) -> Value {
    let row = &sys.rows()[k];
    let coeffs: Vec<Value> = sys
        .model()
        .reduced_keys()
        .iter()
        .zip(&row.coeffs)
        .filter(|(_, &c)| c != 0)
        .map(|(key, &c)| json!({"face": key.face.vertices(), "index": key.index, "c": integer(c)}))
        .collect();
    json!({"coeffs": coeffs, "kind": row.kind.to_string(), "text": sys.display_row(k)})
}

pub fn facet_check_json(c: &FacetCheck) -> Value {
    json!({
        "valid": c.valid,
        "facet": c.facet,
        "tight": c.tight.len(),
        "tight_rank": c.tight_rank,
        "violated_by": c.violated_by,
    })
}

pub fn hole_json(h: &HoleReport) -> Value {
    let cells = h.point.model().shape().cells();
    let weights: Vec<Value> = cells
        .iter()
        .zip(&h.cone_weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(c, w)| json!({"cell": c.levels(), "weight": fraction(w)}))
        .collect();
    json!({
        "sample_size": integer(h.sample_size),
        "point": reduced_vector_json(&h.point),
        "cone_weights": weights,
        "search": {
            "nodes": integer(h.search.nodes),
            "cells": h.search.cells,
            "cell_bound": integer(h.search.cell_bound),
            "exhaustive": true,
        },
    })
}

pub fn graph_json(g: &Graph) -> Value {
    let edges: Vec<[Vertex; 2]> = g.edges().map(|(a, b)| [a, b]).collect();
    json!({"vertices": g.vertices().collect::<Vec<_>>(), "edges": edges})
}

pub fn elimination_json(e: &Elimination) -> Value {
    let fill: Vec<[Vertex; 2]> = e.fill.iter().map(|&(a, b)| [a, b]).collect();
    json!({"order": e.order, "fill": fill, "stuck": e.stuck})
}

pub fn op_json(op: &MinorOp) -> Value {
    match op {
        MinorOp::DeleteVertex(v) => json!({"op": "delete_vertex", "vertex": v}),
        MinorOp::ContractEdge { face, new_label } => {
            json!({"op": "contract_edge", "face": face.vertices(), "new_label": new_label})
        }
        MinorOp::DeleteEdge(a, b) => json!({"op": "delete_edge", "edge": [a, b]}),
    }
}

pub fn branch_sets_json(b: &BranchSets) -> Value {
    Value::Array(b.sets().iter().map(|s| json!(s.iter().collect::<Vec<_>>())).collect())
}

pub fn decomposition_json(d: &Decomposition) -> Value {
    let facets = |c: &SimplicialComplex| -> Value {
        json!(c.facets().iter().map(|f| f.vertices().to_vec()).collect::<Vec<_>>())
    };
    match d {
        Decomposition::Leaf(c) => json!({"leaf": facets(c)}),
        Decomposition::Split {
            separator,
            left,
            right,
            ..
        } => json!({
            "separator": separator.vertices(),
            "left": decomposition_json(left),
            "right": decomposition_json(right),
        }),
    }
}

pub fn facepopper_json(r: &FacepopperReport) -> Value {
    let b: Vec<Vec<Value>> = r.b.iter().map(|row| row.iter().map(|&c| integer(c)).collect()).collect();
    let verdict = match &r.verdict {
        FacepopperVerdict::Holds(why) => json!({
            "result": "holds",
            "reason": match why {
                HoldsBecause::UnitColumn => "unit_column",
                HoldsBecause::UnitPairRows => "unit_pair_rows",
                HoldsBecause::Empty => "empty",
            },
        }),
        FacepopperVerdict::Fails { b } => json!({
            "result": "fails",
            "rhs": b.iter().map(|&v| integer(v)).collect::<Vec<_>>(),
        }),
        FacepopperVerdict::Inconclusive { checked, exhaustive } => json!({
            "result": "inconclusive",
            "checked": integer(checked),
            "exhaustive_within_beta": exhaustive,
        }),
    };
    json!({"face": r.face.vertices(), "b": b, "verdict": verdict})
}

pub fn certificate_json(c: &NormalityCertificate) -> Value {
    match c {
        NormalityCertificate::Normal(e) => {
            let deletions: Vec<Value> = e
                .deletions
                .iter()
                .map(|d| json!({"edge": [d.edge.0, d.edge.1], "facepopper": facepopper_json(&d.report)}))
                .collect();
            json!({
                "verdict": "Normal",
                "graph": graph_json(&e.graph),
                "completion": graph_json(&e.completion),
                "elimination": elimination_json(&e.elimination),
                "decomposition": decomposition_json(&e.decomposition),
                "deletions": deletions,
            })
        }
        NormalityCertificate::NotNormal(e) => json!({
            "verdict": "NotNormal",
            "model": model_json(e.hole.point.model()),
            "branch_sets": e.branch_sets.as_ref().map(branch_sets_json),
            "ops": e.ops.iter().map(op_json).collect::<Vec<_>>(),
            "minor_hole": e.minor_hole.as_ref().map(|h| json!({
                "model": model_json(h.point.model()),
                "hole": hole_json(h),
            })),
            "hole": hole_json(&e.hole),
        }),
        NormalityCertificate::Unknown { bound } => json!({"verdict": "Unknown", "bound": integer(bound)}),
    }
}

/// Integer value of an exact-number string or JSON integer.
pub fn read_integer(v: &Value) -> Result<BigInt> {
    match v {
        Value::String(s) => s.parse().map_err(|_| Error::input(format!("not an integer: {s:?}"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().unwrap()),
        _ => Err(Error::input(format!("not an integer: {v}"))),
    }
}

/// Rational value of a `"p/q"` string.
pub fn read_rational(v: &Value) -> Result<BigRational> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(_) => return read_integer(v).map(BigRational::from_integer),
        _ => return Err(Error::input(format!("not a rational: {v}"))),
    };
    let q: BigRational = s.parse().map_err(|_| Error::input(format!("not a rational: {s:?}")))?;
    if q.denom().is_negative() {
        return Err(Error::input(format!("not a rational: {s:?}")));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::marginalize;

    #[test]
    fn model_roundtrip() {
        let text = r#"{"ground": [1, 2, 3], "facets": [[1, 2], [2, 3]], "shape": [2, 3, 2]}"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m.reduced_dim(), 1 + 1 + 2 + 1 + 2 + 2);
        let again = parse_model(&model_json(&m).to_string()).unwrap();
        assert_eq!(*again, *m);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_model("{"), Err(Error::Input(_))));
        assert!(parse_model(r#"{"ground": [1], "facets": [[2]], "shape": [2]}"#).is_err());
        assert!(parse_model(r#"{"ground": [1], "facets": [[1]], "shape": [0]}"#).is_err());
        assert!(parse_graph_text("1 2 3").is_err());
        assert!(parse_graph_text("1 x").is_err());
        assert!(parse_graph_text("1 1").is_err());
        assert!(parse_table(r#"{"shape": [2], "cells": [{"index": [1], "count": -1}]}"#).is_err());
        assert!(parse_table(r#"{"shape": [2], "cells": [{"index": [3], "count": 1}]}"#).is_err());
    }

    #[test]
    fn graph_text() {
        let g = parse_graph_text("vertices: 5\n# square\n1 2\n2 3\n3 4\n4 1\n").unwrap();
        assert_eq!(g.num_vertices(), 5);
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.degree(5), 0);
        let m = parse_model_or_graph("1 2\n").unwrap();
        assert!(m.is_binary());
        let g2 = parse_graph(r#"{"ground": [1, 2, 3], "facets": [[1, 2], [3]], "shape": [2, 2, 2]}"#).unwrap();
        assert_eq!(g2.num_edges(), 1);
        assert!(parse_graph(r#"{"ground": [1, 2, 3], "facets": [[1, 2, 3]], "shape": [2, 2, 2]}"#).is_err());
    }

    #[test]
    fn table_and_vectors() {
        let m = parse_model(r#"{"ground": [1, 2], "facets": [[1, 2]], "shape": [2, 2]}"#).unwrap();
        let t = parse_table(r#"{"shape": [2, 2], "cells": [{"index": [1, 2], "count": "3"}, {"index": [2, 2], "count": 1}]}"#).unwrap();
        assert_eq!(parse_table(&table_json(&t).to_string()).unwrap(), t);
        let v = marginalize(&t, &m).unwrap();
        let j = full_vector_json(&v);
        assert_eq!(j["coords"][0]["value"], "4");
        assert_eq!(j["coords"].as_array().unwrap().len(), m.full_dim());
    }

    #[test]
    fn exact_numbers() {
        let half = BigRational::new((-1).into(), 2.into());
        assert_eq!(rational(&half), "-1/2");
        assert_eq!(fraction(&half), json!({"num": "-1", "den": "2"}));
        assert_eq!(read_rational(&rational(&half)).unwrap(), half);
        assert_eq!(read_integer(&json!(7)).unwrap(), BigInt::from(7));
        assert!(read_rational(&json!("1/0")).is_err());
    }
}
