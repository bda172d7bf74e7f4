mod common;

use std::collections::BTreeSet;

use k4norm::graph::Graph;
use k4norm::model::{build_complex, generators, marginalize, reduce_coords, Model, TableShape};
use k4norm::normality::{find_holes, k4_hole_point};
use k4norm::polyhedra::{graph_system, spanned_facets, InequalityKind};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;

fn hole_set(model: &std::sync::Arc<Model>, n: u32) -> BTreeSet<Vec<i64>> {
    find_holes(model, n)
        .iter()
        .map(|h| h.point.to_integers().unwrap().iter().map(|c| c.try_into().unwrap()).collect())
        .collect()
}

fn binary(facets: &[&[u32]]) -> std::sync::Arc<Model> {
    let c = build_complex(facets, &[1, 2, 3, 4]).unwrap();
    Model::new(c, TableShape::binary(4)).unwrap()
}

#[test]
fn k4_single_hole_matches_naive_enumeration() {
    let m = Graph::complete(4).binary_model();
    let facets = spanned_facets(&m).unwrap();
    let mut naive = BTreeSet::new();
    for n in 1..=4 {
        naive.extend(naive_holes(&facets, n));
    }
    let golden: Vec<i64> = vec![4, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1];
    assert_eq!(naive, BTreeSet::from([golden.clone()]));
    assert_eq!(hole_set(&m, 4), naive);
    let built: Vec<i64> = k4_hole_point(&m)
        .unwrap()
        .to_integers()
        .unwrap()
        .iter()
        .map(|c| c.try_into().unwrap())
        .collect();
    assert_eq!(built, golden);
}

#[test]
fn four_vertex_complexes_match_naive_enumeration() {
    let with_hole = binary(&[&[1, 2], &[1, 3], &[1, 4], &[2, 3, 4]]);
    let facets = spanned_facets(&with_hole).unwrap();
    let naive: BTreeSet<Vec<i64>> = (1..=4).flat_map(|n| naive_holes(&facets, n)).collect();
    assert_eq!(naive.len(), 2);
    assert!(naive.contains(&vec![4, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 0]));
    assert_eq!(hole_set(&with_hole, 4), naive);

    let without = binary(&[&[1, 2], &[1, 3, 4], &[2, 3, 4]]);
    let facets = spanned_facets(&without).unwrap();
    assert!((1..=4).all(|n| naive_holes(&facets, n).is_empty()));
    assert!(hole_set(&without, 4).is_empty());
}

#[test]
fn marginal_map_matches_direct_summation() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..40 {
        let n = rng.gen_range(1..=4usize);
        let ground: Vec<u32> = (1..=n as u32).collect();
        let facets: Vec<Vec<u32>> = (0..rng.gen_range(1..=3))
            .map(|_| ground.iter().copied().filter(|_| rng.gen_bool(0.6)).collect())
            .collect();
        let c = build_complex(&facets, &ground).unwrap();
        let shape = TableShape::new((0..n).map(|_| rng.gen_range(1..=3)).collect()).unwrap();
        let m = Model::new(c, shape.clone()).unwrap();
        let counts: Vec<u32> = (0..shape.num_cells()).map(|_| rng.gen_range(0..4)).collect();
        let t = k4norm::model::Table::from_cells(shape.clone(), shape.cells().into_iter().zip(counts.iter().copied()))
            .unwrap();
        let reduced = reduce_coords(&marginalize(&t, &m).unwrap());
        let direct: Vec<i64> = direct_reduced_marginal(&m, &counts);
        let ours: Vec<i64> = reduced.to_integers().unwrap().iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(ours, direct);
    }
}

#[test]
fn generators_are_unit_table_marginals() {
    let m = Graph::cycle(4).binary_model();
    let gens = generators(&m);
    assert_eq!(gens.len(), 16);
    for (k, g) in gens.iter().enumerate() {
        let mut counts = vec![0u32; 16];
        counts[k] = 1;
        let ours: Vec<i64> = reduce_coords(g).to_integers().unwrap().iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(ours, direct_reduced_marginal(&m, &counts));
    }
}

fn row_set(sys: &k4norm::polyhedra::InequalitySystem) -> BTreeSet<Vec<i64>> {
    sys.rows().iter().map(|r| r.coeffs.clone()).collect()
}

#[test]
fn box_and_cycle_rows_are_exactly_the_brute_force_facets() {
    for g in [Graph::complete(3), Graph::cycle(4)] {
        let m = g.binary_model();
        assert_eq!(row_set(&graph_system(&m).unwrap()), row_set(&spanned_facets(&m).unwrap()));
    }
}

#[test]
fn triangle_cycle_rows() {
    let m = Graph::complete(3).binary_model();
    let sys = graph_system(&m).unwrap();
    // order: p, p1, p2, p3, p12, p13, p23
    let rows: BTreeSet<Vec<i64>> = sys
        .rows()
        .iter()
        .filter(|r| matches!(r.kind, InequalityKind::Cycle { .. }))
        .map(|r| r.coeffs.clone())
        .collect();
    let expected = BTreeSet::from([
        vec![0, 0, 0, 1, 1, -1, -1],
        vec![0, 0, 1, 0, -1, 1, -1],
        vec![0, 1, 0, 0, -1, -1, 1],
        vec![1, -1, -1, -1, 1, 1, 1],
    ]);
    assert_eq!(rows, expected);
}
