mod common;

use std::sync::Arc;

use k4norm::graph::{
    chordal_completion_tw2, clique_number, decompose, face_embedding, find_k4_branch_sets, is_chordal,
    is_k4_minor_free, minor_sequence_to_k4, replay, apply_op, Graph,
};
use k4norm::model::{
    build_complex, expand_coords, marginalize, reduce_coords, Face, Model, ReducedMarginalVector, SubsetSums,
    Table, TableShape,
};
use k4norm::normality::semigroup_membership;
use k4norm::lp::solve_nonneg;
use k4norm::num::{BigInt, BigRational, Zero};
use k4norm::polyhedra::{
    brute_force_gap, facepopper_condition, graph_system, reduced_generators, ConeOracle, FacepopperVerdict,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn model_and_counts() -> impl Strategy<Value = (Arc<Model>, Vec<u32>)> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(prop::collection::vec(any::<bool>(), n), 1..=3),
                prop::collection::vec(1u32..=3, n),
            )
        })
        .prop_flat_map(|(n, masks, sizes)| {
            let ground: Vec<u32> = (1..=n as u32).collect();
            let facets: Vec<Vec<u32>> = masks
                .iter()
                .map(|m| ground.iter().zip(m).filter(|(_, &b)| b).map(|(&v, _)| v).collect())
                .collect();
            let c = build_complex(&facets, &ground).unwrap();
            let m = Model::new(c, TableShape::new(sizes).unwrap()).unwrap();
            let cells = m.shape().num_cells();
            (Just(m), prop::collection::vec(0u32..5, cells))
        })
}

fn table(m: &Arc<Model>, counts: &[u32]) -> Table {
    Table::from_cells(m.shape().clone(), m.shape().cells().into_iter().zip(counts.iter().copied())).unwrap()
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| common::random_graph(&mut StdRng::seed_from_u64(seed), n, 0.55))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginals_are_consistent((m, counts) in model_and_counts()) {
        let full = marginalize(&table(&m, &counts), &m).unwrap();
        prop_assert!(full.is_consistent());
        let n: u32 = counts.iter().sum();
        prop_assert_eq!(full.sample_size(), &BigRational::from_integer(BigInt::from(n)));
    }

    #[test]
    fn reduction_round_trips((m, counts) in model_and_counts()) {
        let full = marginalize(&table(&m, &counts), &m).unwrap();
        let reduced = reduce_coords(&full);
        prop_assert_eq!(reduced.coords().len(), m.reduced_dim());
        prop_assert_eq!(expand_coords(&reduced), full);
    }

    #[test]
    fn marginal_map_is_additive((m, a) in model_and_counts(), seed in any::<u64>()) {
        let b = common::random_table(&mut StdRng::seed_from_u64(seed), m.shape(), 3);
        let ta = table(&m, &a);
        let lhs = marginalize(&(&ta + &b).unwrap(), &m).unwrap();
        let rhs = marginalize(&ta, &m).unwrap().checked_add(&marginalize(&b, &m).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn subset_sums_start_at_sample_size((m, counts) in model_and_counts()) {
        let reduced = reduce_coords(&marginalize(&table(&m, &counts), &m).unwrap());
        for f in m.faces() {
            let q = SubsetSums::new(&reduced, f).unwrap();
            prop_assert_eq!(q.get(&Face::empty()).unwrap(), reduced.sample_size());
        }
    }

    #[test]
    fn marginals_are_in_cone_and_semigroup((m, counts) in model_and_counts()) {
        let full = marginalize(&table(&m, &counts), &m).unwrap();
        let reduced = reduce_coords(&full);
        let oracle = ConeOracle::for_model(&m);
        let lp = oracle.solve(&reduced).unwrap();
        prop_assert!(lp.is_feasible());
        prop_assert!(oracle.verify(&reduced, &lp));
        let t = semigroup_membership(&full).unwrap().expect("marginal of a table");
        prop_assert_eq!(marginalize(&t, &m).unwrap(), full);
    }

    #[test]
    fn lp_certificates_verify((m, counts) in model_and_counts(), shift in -3i64..=3) {
        let mut x: Vec<BigInt> = reduce_coords(&marginalize(&table(&m, &counts), &m).unwrap())
            .to_integers()
            .unwrap();
        let last = x.len() - 1;
        x[last] += shift;
        let point = ReducedMarginalVector::from_integers(m.clone(), x).unwrap();
        let oracle = ConeOracle::for_model(&m);
        let result = oracle.solve(&point).unwrap();
        prop_assert!(oracle.verify(&point, &result));
    }

    #[test]
    fn k4_minor_test_is_decided(g in graph_strategy(6)) {
        let elim = is_k4_minor_free(&g);
        let branch = find_k4_branch_sets(&g).unwrap();
        prop_assert_eq!(elim.is_some(), branch.is_none());
        if let Some(b) = branch {
            b.validate(&g).unwrap();
            let ops = minor_sequence_to_k4(&g, &b).unwrap();
            let models = replay(&g.binary_model(), &ops).unwrap();
            let last = Graph::from_complex(models.last().unwrap().complex()).unwrap();
            prop_assert_eq!((last.num_vertices(), last.num_edges()), (4, 6));
        } else {
            let (h, _) = chordal_completion_tw2(&g).unwrap();
            prop_assert!(is_chordal(&h));
            prop_assert!(clique_number(&h) <= 3);
            prop_assert!(g.edges().all(|(a, b)| h.has_edge(a, b)));
            let d = decompose(&h.edge_complex());
            prop_assert!(d.is_valid());
        }
    }

    #[test]
    fn graph_inequalities_are_valid(g in graph_strategy(5)) {
        prop_assume!(is_k4_minor_free(&g).is_some());
        let m = g.binary_model();
        let sys = graph_system(&m).unwrap();
        for x in reduced_generators(&m) {
            prop_assert!(sys.satisfied_by(&x).unwrap());
        }
    }

    #[test]
    fn face_embedding_commutes(g in graph_strategy(5), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let Some(op) = common::random_op(&mut rng, &g) else { return Ok(()); };
        let source = g.binary_model();
        let target = apply_op(&source, &op).unwrap();
        let u = common::random_table(&mut rng, target.shape(), 2);
        let w = marginalize(&u, &target).unwrap();
        let lifted = common::lift_table(&source, &target, &op, &u);
        prop_assert_eq!(face_embedding(&source, &op, &w).unwrap(), marginalize(&lifted, &source).unwrap());
    }

    #[test]
    fn unit_columns_hold(col in prop::collection::vec(-1i64..=1, 0..12), beta in 1u32..4) {
        let b: Vec<Vec<i64>> = col.into_iter().map(|c| vec![c]).collect();
        prop_assert!(matches!(facepopper_condition(&b, beta), FacepopperVerdict::Holds(_)));
    }

    #[test]
    fn unit_pair_rows_have_no_gap(
        picks in prop::collection::vec(0usize..7, 1..6)
    ) {
        let pattern = [[0, 0], [0, 1], [0, -1], [1, 0], [-1, 0], [1, 1], [-1, -1]];
        let b: Vec<Vec<i64>> = picks.iter().map(|&k| pattern[k].to_vec()).collect();
        let gap = matches!(brute_force_gap(&b, 3), FacepopperVerdict::Fails { .. });
        prop_assert!(!gap);
    }

    #[test]
    fn failing_verdicts_have_real_but_no_integer_solution(
        rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 1..5)
    ) {
        if let FacepopperVerdict::Fails { b } = facepopper_condition(&rows, 2) {
            let int_ok = |y: [i64; 2]| rows.iter().zip(&b).all(|(r, &bi)| r[0] * y[0] + r[1] * y[1] >= bi);
            let bound = 20;
            let mut found = false;
            for y0 in -bound..=bound {
                for y1 in -bound..=bound {
                    found |= int_ok([y0, y1]);
                }
            }
            prop_assert!(!found);
            // y = y⁺ − y⁻ and slack s: B y⁺ − B y⁻ − s = b with all variables nonnegative
            let a: Vec<Vec<BigRational>> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row: Vec<i64> = vec![r[0], r[1], -r[0], -r[1]];
                    row.extend((0..rows.len()).map(|j| if i == j { -1 } else { 0 }));
                    row.into_iter().map(|c| BigRational::from_integer(c.into())).collect()
                })
                .collect();
            let rhs: Vec<BigRational> = b.iter().map(|&c| BigRational::from_integer(c.into())).collect();
            let real = solve_nonneg(&a, &rhs).is_feasible();
            prop_assert!(real);
        }
    }
}

#[test]
fn zero_is_in_every_cone() {
    let m = Graph::complete(3).binary_model();
    let z = ReducedMarginalVector::zero(m.clone());
    let lp = ConeOracle::for_model(&m).solve(&z).unwrap();
    assert!(lp.is_feasible());
    assert!(z.coords().iter().all(|c| c.is_zero()));
}
