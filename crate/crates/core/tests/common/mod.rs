#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use k4norm::graph::{Graph, MinorOp};
use k4norm::model::{Model, Table, TableShape, Vertex};
use k4norm::polyhedra::InequalitySystem;
use rand::Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push((a, b));
        }
    }
    out
}

/// One connected graph per isomorphism class on vertices `1..=n`.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    let ps = pairs(n);
    let index = |a: usize, b: usize| ps.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let perms: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .map(|p| ps.iter().map(|&(a, b)| index(p[a], p[b])).collect())
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << ps.len()) {
        let canon = perms
            .iter()
            .map(|p| (0..ps.len()).filter(|&e| mask >> e & 1 == 1).fold(0u32, |m, e| m | 1 << p[e]))
            .min()
            .unwrap();
        if !seen.insert(canon) {
            continue;
        }
        let edges = ps
            .iter()
            .enumerate()
            .filter(|(e, _)| canon >> e & 1 == 1)
            .map(|(_, &(a, b))| (a as Vertex + 1, b as Vertex + 1));
        let g = Graph::new(1..=n as Vertex, edges).unwrap();
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

/// Connected graphs on 1 to `n` vertices, up to isomorphism.
pub fn connected_graphs_upto(n: usize) -> Vec<Graph> {
    (1..=n).flat_map(connected_graphs).collect()
}

/// Random graph on `1..=n` with each edge present with probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(Vertex, Vertex)> = pairs(n)
        .into_iter()
        .filter(|_| rng.gen_bool(p))
        .map(|(a, b)| (a as Vertex + 1, b as Vertex + 1))
        .collect();
    Graph::new(1..=n as Vertex, edges).unwrap()
}

/// Random vertex deletion or edge contraction.
pub fn random_op(rng: &mut impl Rng, g: &Graph) -> Option<MinorOp> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let es: Vec<(Vertex, Vertex)> = g.edges().collect();
    if vs.len() < 2 {
        return None;
    }
    if es.is_empty() || rng.gen_bool(0.5) {
        Some(MinorOp::DeleteVertex(vs[rng.gen_range(0..vs.len())]))
    } else {
        let (a, b) = es[rng.gen_range(0..es.len())];
        Some(MinorOp::ContractEdge {
            face: [a, b].into(),
            new_label: vs.iter().max().unwrap() + 1,
        })
    }
}

pub fn random_table(rng: &mut impl Rng, shape: &TableShape, max_count: u32) -> Table {
    let cells = shape.cells();
    Table::from_cells(
        shape.clone(),
        cells.into_iter().map(|c| (c, rng.gen_range(0..=max_count))),
    )
    .unwrap()
}

/// Every table with sample size `n`, as count vectors in cell order.
pub fn tables_of_size(cells: usize, n: u32) -> Vec<Vec<u32>> {
    fn go(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[k] = c;
            go(k + 1, left - c, cur, out);
        }
    }
    let mut out = Vec::new();
    if cells > 0 {
        go(0, n, &mut vec![0; cells], &mut out);
    }
    out
}

/// Reduced marginal of a count vector, by direct summation over cells.
pub fn direct_reduced_marginal(model: &Arc<Model>, counts: &[u32]) -> Vec<i64> {
    let ground = model.complex().ground().to_vec();
    let cells = model.shape().cells();
    model
        .reduced_keys()
        .iter()
        .map(|k| {
            cells
                .iter()
                .zip(counts)
                .filter(|(c, _)| {
                    k.face.vertices().iter().zip(&k.index).all(|(v, i)| {
                        let pos = ground.iter().position(|g| g == v).unwrap();
                        c.levels()[pos] == *i
                    })
                })
                .map(|(_, &n)| n as i64)
                .sum()
        })
        .collect()
}

/// Reduced marginals of all tables with sample size `n`.
pub fn naive_semigroup_level(model: &Arc<Model>, n: u32) -> BTreeSet<Vec<i64>> {
    tables_of_size(model.shape().num_cells(), n)
        .iter()
        .map(|t| direct_reduced_marginal(model, t))
        .collect()
}

/// Integer points with `p^∅ = n`, all coordinates in `[0, n]`, satisfying
/// every row of `sys`.
pub fn naive_cone_level(sys: &InequalitySystem, n: i64) -> BTreeSet<Vec<i64>> {
    let d = sys.model().reduced_dim();
    let mut by_end: Vec<Vec<&[i64]>> = vec![Vec::new(); d];
    for r in sys.rows() {
        let end = r.coeffs.iter().rposition(|&c| c != 0).unwrap_or(0);
        by_end[end].push(&r.coeffs);
    }
    fn go(t: usize, x: &mut Vec<i64>, n: i64, by_end: &[Vec<&[i64]>], out: &mut BTreeSet<Vec<i64>>) {
        if t == x.len() {
            out.insert(x.clone());
            return;
        }
        let range = if t == 0 { n..=n } else { 0..=n };
        for v in range {
            x[t] = v;
            let ok = by_end[t]
                .iter()
                .all(|c| c.iter().zip(x.iter()).take(t + 1).map(|(a, b)| a * b).sum::<i64>() >= 0);
            if ok {
                go(t + 1, x, n, by_end, out);
            }
        }
        x[t] = 0;
    }
    let mut out = BTreeSet::new();
    go(0, &mut vec![0; d], n, &by_end, &mut out);
    out
}

/// Holes at level `n`: cone points (from a facet description) that are not
/// marginals of any table.
pub fn naive_holes(sys: &InequalitySystem, n: u32) -> BTreeSet<Vec<i64>> {
    let semigroup = naive_semigroup_level(sys.model(), n);
    naive_cone_level(sys, n as i64)
        .into_iter()
        .filter(|x| !semigroup.contains(x))
        .collect()
}

/// Table on the source of `op` whose marginal is the face embedding of the
/// marginal of `u`.
pub fn lift_table(source: &Arc<Model>, target: &Arc<Model>, op: &MinorOp, u: &Table) -> Table {
    let sg = source.complex().ground().to_vec();
    let tg = target.complex().ground().to_vec();
    let mut t = Table::zero(source.shape().clone());
    for (cell, n) in u.iter() {
        let levels: Vec<u32> = sg
            .iter()
            .map(|v| match tg.iter().position(|w| w == v) {
                Some(p) => cell.levels()[p],
                None => match op {
                    MinorOp::DeleteVertex(_) => 1,
                    MinorOp::ContractEdge { new_label, .. } => {
                        cell.levels()[tg.iter().position(|w| w == new_label).unwrap()]
                    }
                    MinorOp::DeleteEdge(..) => unreachable!(),
                },
            })
            .collect();
        t.add_count(k4norm::model::CellIndex(levels), n.clone()).unwrap();
    }
    t
}
