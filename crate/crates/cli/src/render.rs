//! Plain-text reports.

use std::fmt::Write;

use k4norm::graph::{BranchSets, Decomposition, Elimination, Graph, MinorOp};
use k4norm::model::{FullMarginalVector, Model, ReducedMarginalVector};
use k4norm::normality::{HoleReport, NormalityCertificate};
use k4norm::num::Zero;
use k4norm::polyhedra::{FacepopperVerdict, FacetCheck, HoldsBecause, InequalitySystem};

fn edges(g: &Graph) -> String {
    let e: Vec<String> = g.edges().map(|(a, b)| format!("{a}-{b}")).collect();
    if e.is_empty() {
        "(none)".into()
    } else {
        e.join(" ")
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn op(o: &MinorOp) -> String {
    match o {
        MinorOp::DeleteVertex(v) => format!("delete {v}"),
        MinorOp::ContractEdge { face, new_label } => format!("contract {face} -> {new_label}"),
        MinorOp::DeleteEdge(a, b) => format!("delete edge {a}-{b}"),
    }
}

fn coord_name(m: &Model, face: &k4norm::model::Face, index: &[u32]) -> String {
    if m.is_binary() {
        format!("p{face}")
    } else {
        explicit(face, index)
    }
}

fn explicit(face: &k4norm::model::Face, index: &[u32]) -> String {
    format!("p{face}({})", index.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
}

fn decomposition(d: &Decomposition, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth + 1);
    match d {
        Decomposition::Leaf(c) => {
            let facets: Vec<String> = c.facets().iter().map(|f| f.to_string()).collect();
            let _ = writeln!(out, "{pad}leaf {}", facets.join(""));
        }
        Decomposition::Split {
            separator,
            left,
            right,
            ..
        } => {
            let _ = writeln!(out, "{pad}split on {separator}");
            decomposition(left, depth + 1, out);
            decomposition(right, depth + 1, out);
        }
    }
}

fn verdict(v: &FacepopperVerdict) -> String {
    match v {
        FacepopperVerdict::Holds(HoldsBecause::UnitColumn) => "holds (single column of 0, ±1)".into(),
        FacepopperVerdict::Holds(HoldsBecause::UnitPairRows) => "holds (two columns, unit rows)".into(),
        FacepopperVerdict::Holds(HoldsBecause::Empty) => "holds (no columns)".into(),
        FacepopperVerdict::Fails { b } => format!("fails at b = ({})", join(b)),
        FacepopperVerdict::Inconclusive { checked, .. } => {
            format!("inconclusive after {checked} right-hand sides")
        }
    }
}

fn hole(h: &HoleReport, out: &mut String) {
    let m = h.point.model();
    let coords: Vec<String> = m
        .reduced_keys()
        .iter()
        .zip(h.point.coords())
        .map(|(k, c)| format!("{}={c}", coord_name(m, &k.face, &k.index)))
        .collect();
    let _ = writeln!(out, "  sample size {}", h.sample_size);
    let _ = writeln!(out, "  point {}", coords.join(" "));
    let weights: Vec<String> = m
        .shape()
        .cells()
        .iter()
        .zip(&h.cone_weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(c, w)| format!("{w}*e({})", join(c.levels())))
        .collect();
    let _ = writeln!(out, "  cone weights {}", weights.join(" + "));
    let _ = writeln!(
        out,
        "  no table: exhaustive search over {} cells with counts <= {}, {} nodes",
        h.search.cells, h.search.cell_bound, h.search.nodes
    );
}

pub fn certificate(c: &NormalityCertificate) -> String {
    let mut out = String::new();
    match c {
        NormalityCertificate::Normal(e) => {
            let _ = writeln!(out, "verdict: Normal");
            let _ = writeln!(out, "graph: {}", edges(&e.graph));
            let _ = writeln!(out, "chordal completion: {}", edges(&e.completion));
            let _ = writeln!(out, "elimination order: {}", join(&e.elimination.order));
            let _ = writeln!(out, "decomposition:");
            decomposition(&e.decomposition, 0, &mut out);
            if e.deletions.is_empty() {
                let _ = writeln!(out, "edge deletions: none");
            }
            for d in &e.deletions {
                let col: Vec<i64> = d.report.b.iter().map(|r| r[0]).collect();
                let _ = writeln!(
                    out,
                    "delete {}-{}: B column ({}) {}",
                    d.edge.0,
                    d.edge.1,
                    join(col),
                    verdict(&d.report.verdict)
                );
            }
        }
        NormalityCertificate::NotNormal(e) => {
            let _ = writeln!(out, "verdict: NotNormal");
            if let Some(b) = &e.branch_sets {
                let _ = writeln!(out, "branch sets: {}", branch_sets(b));
                let ops: Vec<String> = e.ops.iter().map(op).collect();
                let _ = writeln!(out, "minor sequence: {}", if ops.is_empty() { "(none)".into() } else { ops.join("; ") });
            }
            if let Some(h) = e.minor_hole.as_ref().filter(|_| !e.ops.is_empty()) {
                let _ = writeln!(out, "hole of the minor:");
                hole(h, &mut out);
            }
            let _ = writeln!(out, "hole:");
            hole(&e.hole, &mut out);
        }
        NormalityCertificate::Unknown { bound } => {
            let _ = writeln!(out, "verdict: Unknown");
            let _ = writeln!(out, "no hole with sample size <= {bound}");
        }
    }
    out
}

pub fn holes(hs: &[HoleReport], bound: u32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} hole(s) with sample size <= {bound}", hs.len());
    for (k, h) in hs.iter().enumerate() {
        let _ = writeln!(out, "hole {}:", k + 1);
        hole(h, &mut out);
    }
    out
}

pub fn facets(sys: &InequalitySystem, checks: &[FacetCheck], minor_free: bool) -> String {
    let mut out = String::new();
    if !minor_free {
        let _ = writeln!(out, "# graph has a K4 minor");
    }
    let _ = writeln!(out, "{} inequalities", sys.len());
    for (k, c) in checks.iter().enumerate() {
        let flag = match (c.valid, c.facet) {
            (true, true) => "facet",
            (true, false) => "valid",
            (false, _) => "INVALID",
        };
        let _ = writeln!(out, "[{flag}] {}    ({})", sys.display_row(k), sys.rows()[k].kind);
    }
    out
}

fn branch_sets(b: &BranchSets) -> String {
    b.sets()
        .iter()
        .map(|s| format!("{{{}}}", s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn elimination(e: &Elimination) -> String {
    let fill: Vec<String> = e.fill.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    format!(
        "K4-minor-free: yes\nelimination order: {}\nfill edges: {}\n",
        join(&e.order),
        if fill.is_empty() { "(none)".into() } else { fill.join(" ") }
    )
}

pub fn minor(b: &BranchSets, ops: &[MinorOp]) -> String {
    let ops: Vec<String> = ops.iter().map(op).collect();
    format!(
        "K4-minor-free: no\nbranch sets: {}\nminor sequence: {}\n",
        branch_sets(b),
        if ops.is_empty() { "(none)".into() } else { ops.join("; ") }
    )
}

pub fn margin(full: &FullMarginalVector, reduced: &ReducedMarginalVector) -> String {
    let mut out = String::from("full:\n");
    for (k, c) in full.model().full_keys().iter().zip(full.coords()) {
        let _ = writeln!(out, "  {} = {c}", explicit(&k.face, &k.index));
    }
    out.push_str("reduced:\n");
    for (k, c) in reduced.model().reduced_keys().iter().zip(reduced.coords()) {
        let _ = writeln!(out, "  {} = {c}", explicit(&k.face, &k.index));
    }
    out
}
