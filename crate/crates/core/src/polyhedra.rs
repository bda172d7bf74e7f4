//! Homogeneous inequality systems over reduced coordinates, exact cone
//! membership, and facet certification.
//!
//! For binary graph models the reduced coordinates are `p^∅`, `p^j` and
//! `p^{jk}` (all levels equal to one). [`box_inequalities`] and
//! [`cycle_inequalities`] generate the classical description of the cone of
//! a `K_4`-minor-free graph; [`certify_facets`] and [`equivalence_check`]
//! verify such a description against the generators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Integer, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg;
use crate::lp::{self, Feasibility};
use crate::normality::TableSearch;
use crate::model::{generators, reduce_coords, Face, Model, ReducedMarginalVector, Vertex};

/// Largest graph accepted by cycle enumeration.
pub const CYCLE_VERTEX_LIMIT: usize = 12;

pub type Edge = (Vertex, Vertex);

/// Where an inequality came from.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum InequalityKind {
    /// One of the four nonnegativity conditions on the 2×2 marginal of an
    /// edge: `p^{jk}`, `p^j − p^{jk}`, `p^k − p^{jk}`,
    /// `p^∅ − p^j − p^k + p^{jk}`, numbered 0 to 3.
    Box { edge: Edge, which: u8 },
    /// Cycle `C` with odd edge subset `O`.
    Cycle { cycle: Vec<Edge>, odd: Vec<Edge> },
    /// Supporting hyperplane spanned by generators.
    Spanned,
    /// Anything supplied from outside.
    Other,
}

/// `Σ c_k x_k ≥ 0` over the reduced coordinates of a model.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearInequality {
    pub coeffs: Vec<i64>,
    pub kind: InequalityKind,
}

impl LinearInequality {
    pub fn new(coeffs: Vec<i64>, kind: InequalityKind) -> Self {
        LinearInequality { coeffs, kind }
    }

    /// Divide out the gcd of the nonzero coefficients.
    pub fn normalized(mut self) -> Self {
        let g = self.coeffs.iter().fold(0i64, |acc, c| acc.gcd(c));
        if g > 1 {
            for c in &mut self.coeffs {
                *c /= g;
            }
        }
        self
    }

    pub fn evaluate(&self, x: &ReducedMarginalVector) -> Result<BigRational> {
        if x.coords().len() != self.coeffs.len() {
            return Err(Error::SpaceMismatch);
        }
        Ok(x.coords()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| **c != 0)
            .fold(BigRational::zero(), |acc, (v, &c)| acc + v * BigInt::from(c)))
    }

    pub(crate) fn evaluate_i64(&self, x: &[i64]) -> i128 {
        x.iter()
            .zip(&self.coeffs)
            .map(|(&a, &c)| a as i128 * c as i128)
            .sum()
    }

    /// Last coordinate with a nonzero coefficient.
    fn support_end(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }
}

/// Evaluate `ineq` at `x`; `x` satisfies it iff the result is nonnegative.
pub fn evaluate(ineq: &LinearInequality, x: &ReducedMarginalVector) -> Result<BigRational> {
    ineq.evaluate(x)
}

/// A list of inequalities over one reduced coordinate space.
#[derive(Clone, Debug)]
pub struct InequalitySystem {
    model: Arc<Model>,
    rows: Vec<LinearInequality>,
}

impl InequalitySystem {
    pub fn new(model: Arc<Model>, rows: Vec<LinearInequality>) -> Result<Self> {
        if rows.iter().any(|r| r.coeffs.len() != model.reduced_dim()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(InequalitySystem { model, rows })
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn rows(&self) -> &[LinearInequality] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn extend(&mut self, other: InequalitySystem) -> Result<()> {
        if *other.model != *self.model {
            return Err(Error::SpaceMismatch);
        }
        self.rows.extend(other.rows);
        Ok(())
    }

    pub fn satisfied_by(&self, x: &ReducedMarginalVector) -> Result<bool> {
        for r in &self.rows {
            if r.evaluate(x)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Render one inequality with named coordinates, e.g. `p12 - p1 >= 0`.
    pub fn display_row(&self, k: usize) -> String {
        let keys = self.model.reduced_keys();
        let binary = self.model.is_binary();
        let mut out = String::new();
        for (key, &c) in keys.iter().zip(&self.rows[k].coeffs) {
            if c == 0 {
                continue;
            }
            let name = if key.face.is_empty() {
                "p∅".to_string()
            } else {
                let face: Vec<String> = key.face.vertices().iter().map(|v| v.to_string()).collect();
                if binary {
                    format!("p{}", face.join(""))
                } else {
                    let idx: Vec<String> = key.index.iter().map(|v| v.to_string()).collect();
                    format!("p{}_{}", face.join(""), idx.join(""))
                }
            };
            let sign = if c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            let mag = c.abs();
            if !out.is_empty() {
                out.push(' ');
            }
            if mag == 1 {
                out.push_str(&format!("{sign}{name}"));
            } else {
                out.push_str(&format!("{sign}{mag}{name}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(" >= 0");
        out
    }
}

fn binary_graph(model: &Model) -> Result<Graph> {
    if !model.is_binary() {
        return Err(Error::Unsupported(
            "inequality generation needs every vertex to have two levels".into(),
        ));
    }
    Graph::from_complex(model.complex())
}

fn coord(model: &Model, face: &Face) -> usize {
    model
        .reduced_position(face, &vec![1; face.len()])
        .expect("binary reduced coordinate")
}

/// The four nonnegativity conditions of every edge's 2×2 marginal, grouped
/// edge by edge.
pub fn box_inequalities(model: &Arc<Model>) -> Result<InequalitySystem> {
    let g = binary_graph(model)?;
    let d = model.reduced_dim();
    let empty = coord(model, &Face::empty());
    let mut rows = Vec::with_capacity(4 * g.num_edges());
    for (j, k) in g.edges() {
        let pj = coord(model, &Face::from([j]));
        let pk = coord(model, &Face::from([k]));
        let pjk = coord(model, &Face::from([j, k]));
        let mut make = |which: u8, terms: &[(usize, i64)]| {
            let mut c = vec![0i64; d];
            for &(k, v) in terms {
                c[k] += v;
            }
            rows.push(LinearInequality::new(c, InequalityKind::Box { edge: (j, k), which }));
        };
        make(0, &[(pjk, 1)]);
        make(1, &[(pj, 1), (pjk, -1)]);
        make(2, &[(pk, 1), (pjk, -1)]);
        make(3, &[(empty, 1), (pj, -1), (pk, -1), (pjk, 1)]);
    }
    InequalitySystem::new(model.clone(), rows)
}

/// All simple cycles, each as its sorted edge list; sorted by length and
/// then lexicographically.
pub fn enumerate_cycles(g: &Graph) -> Result<Vec<Vec<Edge>>> {
    if g.num_vertices() > CYCLE_VERTEX_LIMIT {
        return Err(Error::TooLarge {
            vertices: g.num_vertices(),
            limit: CYCLE_VERTEX_LIMIT,
        });
    }
    let adj: BTreeMap<Vertex, Vec<Vertex>> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).into_iter().collect()))
        .collect();
    let mut out = Vec::new();
    for start in g.vertices() {
        let mut path = vec![start];
        walk(start, &adj, &mut path, &mut out);
    }
    out.sort_by(|a: &Vec<Edge>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

fn walk(
    start: Vertex,
    adj: &BTreeMap<Vertex, Vec<Vertex>>,
    path: &mut Vec<Vertex>,
    out: &mut Vec<Vec<Edge>>,
) {
    let last = *path.last().unwrap();
    for &w in &adj[&last] {
        if w == start && path.len() >= 3 && path[1] < last {
            let mut edges: Vec<Edge> = path
                .windows(2)
                .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
                .collect();
            edges.push((start.min(last), start.max(last)));
            edges.sort();
            out.push(edges);
        } else if w > start && !path.contains(&w) {
            path.push(w);
            walk(start, adj, path, out);
            path.pop();
        }
    }
}

fn edge_vertices(edges: &[Edge]) -> BTreeSet<Vertex> {
    edges.iter().flat_map(|&(a, b)| [a, b]).collect()
}

/// One inequality per simple cycle `C` and odd edge subset `O ⊆ C`:
///
/// `Σ_{O} p^{jk} − Σ_{C∖O} p^{jk} − Σ_{V(O)} p^j + Σ_{V(C∖O)} p^j + ((#O − 1)/2) p^∅ ≥ 0`
///
/// where `V(·)` is the vertex set of an edge set. A vertex in both
/// `V(O)` and `V(C∖O)` gets coefficient zero.
pub fn cycle_inequalities(model: &Arc<Model>) -> Result<InequalitySystem> {
    let g = binary_graph(model)?;
    let cycles = enumerate_cycles(&g)?;
    let d = model.reduced_dim();
    let empty = coord(model, &Face::empty());
    let mut rows = Vec::new();
    for cycle in cycles {
        let len = cycle.len();
        for mask in 1u32..(1 << len) {
            if mask.count_ones() % 2 == 0 {
                continue;
            }
            let odd: Vec<Edge> = (0..len).filter(|b| mask & (1 << b) != 0).map(|b| cycle[b]).collect();
            let even: Vec<Edge> = (0..len).filter(|b| mask & (1 << b) == 0).map(|b| cycle[b]).collect();
            let mut c = vec![0i64; d];
            for &(a, b) in &odd {
                c[coord(model, &Face::from([a, b]))] += 1;
            }
            for &(a, b) in &even {
                c[coord(model, &Face::from([a, b]))] -= 1;
            }
            for v in edge_vertices(&odd) {
                c[coord(model, &Face::from([v]))] -= 1;
            }
            for v in edge_vertices(&even) {
                c[coord(model, &Face::from([v]))] += 1;
            }
            c[empty] += (odd.len() as i64 - 1) / 2;
            rows.push(LinearInequality::new(
                c,
                InequalityKind::Cycle {
                    cycle: cycle.clone(),
                    odd,
                },
            ));
        }
    }
    InequalitySystem::new(model.clone(), rows)
}

/// Box and cycle inequalities together.
pub fn graph_system(model: &Arc<Model>) -> Result<InequalitySystem> {
    let mut sys = box_inequalities(model)?;
    sys.extend(cycle_inequalities(model)?)?;
    Ok(sys)
}

/// Reduced images of the generators `π_Δ(e_i)`.
pub fn reduced_generators(model: &Arc<Model>) -> Vec<ReducedMarginalVector> {
    generators(model).iter().map(reduce_coords).collect()
}

/// Exact membership oracle for the cone spanned by a fixed generator list.
#[derive(Clone, Debug)]
pub struct ConeOracle {
    model: Arc<Model>,
    // rows = coordinates, columns = generators
    matrix: Vec<Vec<BigRational>>,
}

impl ConeOracle {
    pub fn new(gens: &[ReducedMarginalVector]) -> Result<Self> {
        let model = gens
            .first()
            .map(|g| g.model().clone())
            .ok_or_else(|| Error::input("empty generator list"))?;
        if gens.iter().any(|g| *g.model() != model) {
            return Err(Error::SpaceMismatch);
        }
        let d = model.reduced_dim();
        let matrix = (0..d)
            .map(|k| gens.iter().map(|g| g.coords()[k].clone()).collect())
            .collect();
        Ok(ConeOracle { model, matrix })
    }

    pub fn for_model(model: &Arc<Model>) -> Self {
        ConeOracle::new(&reduced_generators(model)).expect("models have at least one cell")
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn solve(&self, x: &ReducedMarginalVector) -> Result<Feasibility> {
        if *x.model() != self.model {
            return Err(Error::SpaceMismatch);
        }
        Ok(lp::solve_nonneg(&self.matrix, x.coords()))
    }

    pub(crate) fn solve_i64(&self, x: &[i64]) -> Feasibility {
        let b: Vec<BigRational> = x.iter().map(|&v| BigRational::from_integer(v.into())).collect();
        lp::solve_nonneg(&self.matrix, &b)
    }

    pub fn verify(&self, x: &ReducedMarginalVector, result: &Feasibility) -> bool {
        lp::verify(&self.matrix, x.coords(), result)
    }
}

/// Decide `x ∈ cone(gens)` exactly. Returns the weights or a separating
/// functional `c` with `cᵀg ≥ 0` on every generator and `cᵀx < 0`.
pub fn cone_membership_lp(
    x: &ReducedMarginalVector,
    gens: &[ReducedMarginalVector],
) -> Result<Feasibility> {
    ConeOracle::new(gens)?.solve(x)
}

/// Facet status of one inequality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FacetCheck {
    /// Nonnegative on every generator.
    pub valid: bool,
    /// First generator with a negative value, if any.
    pub violated_by: Option<usize>,
    pub tight: Vec<usize>,
    pub tight_rank: usize,
    /// Valid, and the tight generators span a hyperplane.
    pub facet: bool,
}

/// Validity and facet status of every inequality against the generators of
/// a cone of dimension `dim`.
pub fn certify_facets(
    sys: &InequalitySystem,
    gens: &[ReducedMarginalVector],
    dim: usize,
) -> Result<Vec<FacetCheck>> {
    if gens.iter().any(|g| *g.model() != sys.model) {
        return Err(Error::SpaceMismatch);
    }
    sys.rows
        .par_iter()
        .map(|row| {
            let values: Vec<BigRational> = gens.iter().map(|g| row.evaluate(g)).collect::<Result<_>>()?;
            let violated_by = values.iter().position(|v| v.is_negative());
            let tight: Vec<usize> = (0..gens.len()).filter(|&k| values[k].is_zero()).collect();
            let rows: Vec<Vec<BigRational>> = tight.iter().map(|&k| gens[k].coords().to_vec()).collect();
            let tight_rank = linalg::rank(&rows);
            let valid = violated_by.is_none();
            Ok(FacetCheck {
                valid,
                violated_by,
                tight,
                tight_rank,
                facet: valid && dim >= 1 && tight_rank == dim - 1,
            })
        })
        .collect()
}

/// Result of comparing an inequality description with the generator cone on
/// a box of lattice points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Equivalence {
    Equivalent {
        /// Points satisfying every inequality; each was confirmed by the LP.
        confirmed: usize,
    },
    Discrepancy {
        point: Vec<i64>,
        satisfies_system: bool,
        in_cone: bool,
    },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

/// Compare `sys` with `cone(gens)` on every integer point with
/// `0 ≤ p^∅ ≤ bound` and every coordinate in `[0, p^∅]`.
///
/// Every inequality is first checked on the generators; an invalid one
/// yields the offending generator (a level-one lattice point) as the
/// discrepancy. Once all inequalities are valid, points violating one of
/// them are outside the cone, so only points satisfying the whole system
/// are tested: a table with the point as marginal settles membership, and
/// the LP decides the rest.
pub fn equivalence_check(
    sys: &InequalitySystem,
    gens: &[ReducedMarginalVector],
    bound: u32,
) -> Result<Equivalence> {
    let oracle = ConeOracle::new(gens)?;
    if *oracle.model() != sys.model {
        return Err(Error::SpaceMismatch);
    }
    for g in gens {
        if !sys.satisfied_by(g)? {
            return Ok(Equivalence::Discrepancy {
                point: g.to_i64()?,
                satisfies_system: false,
                in_cone: true,
            });
        }
    }
    let d = sys.model.reduced_dim();
    let mut by_end: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (k, r) in sys.rows.iter().enumerate() {
        if let Some(e) = r.support_end() { by_end[e].push(k) }
    }
    let mut points = Vec::new();
    for n in 0..=bound as i64 {
        let mut x = vec![0i64; d];
        x[0] = n;
        if by_end[0].iter().all(|&k| sys.rows[k].evaluate_i64(&x) >= 0) {
            collect_satisfying(sys, &by_end, &mut x, 1, n, &mut points);
        }
    }
    let search = TableSearch::new(&sys.model);
    let miss = points.par_iter().find_first(|x| {
        search.solve(&sys.model.expand_slice(x)).0.is_none() && !oracle.solve_i64(x).is_feasible()
    });
    Ok(match miss {
        Some(x) => Equivalence::Discrepancy {
            point: x.clone(),
            satisfies_system: true,
            in_cone: false,
        },
        None => Equivalence::Equivalent {
            confirmed: points.len(),
        },
    })
}

fn collect_satisfying(
    sys: &InequalitySystem,
    by_end: &[Vec<usize>],
    x: &mut Vec<i64>,
    t: usize,
    n: i64,
    out: &mut Vec<Vec<i64>>,
) {
    if t == x.len() {
        out.push(x.clone());
        return;
    }
    for v in 0..=n {
        x[t] = v;
        if by_end[t].iter().all(|&k| sys.rows[k].evaluate_i64(x) >= 0) {
            collect_satisfying(sys, by_end, x, t + 1, n, out);
        }
    }
    x[t] = 0;
}

/// Columns of the coefficient matrix split into the face's reduced
/// coordinates (`B`) and the rest (`A`), row order preserved.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitMatrix {
    pub face: Face,
    pub b: Vec<Vec<i64>>,
    pub a: Vec<Vec<i64>>,
}

pub fn extract_b(sys: &InequalitySystem, face: &Face) -> Result<SplitMatrix> {
    let pos = sys
        .model
        .face_position(face)
        .ok_or_else(|| Error::NotAFace(face.clone()))?;
    let cols = sys.model.reduced_range(pos);
    let (mut b, mut a) = (Vec::new(), Vec::new());
    for r in &sys.rows {
        b.push(r.coeffs[cols.clone()].to_vec());
        a.push(
            r.coeffs
                .iter()
                .enumerate()
                .filter(|(k, _)| !cols.contains(k))
                .map(|(_, &c)| c)
                .collect(),
        );
    }
    Ok(SplitMatrix {
        face: face.clone(),
        b,
        a,
    })
}

/// Why the integral-solution property of `B y ≥ b` is known to hold.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HoldsBecause {
    /// One column with entries in `{0, ±1}`: the system is an interval with
    /// integer endpoints.
    UnitColumn,
    /// Two columns whose rows lie in `{(0,0), ±(0,1), ±(1,0), ±(1,1)}`.
    UnitPairRows,
    /// No columns; nothing to solve for.
    Empty,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FacepopperVerdict {
    Holds(HoldsBecause),
    /// Integral `b` for which `B y ≥ b` is real feasible but has no integer
    /// solution.
    Fails { b: Vec<i64> },
    /// No structural guarantee and no gap among the right-hand sides tried.
    Inconclusive { checked: u64, exhaustive: bool },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FacepopperReport {
    pub face: Face,
    pub b: Vec<Vec<i64>>,
    pub verdict: FacepopperVerdict,
}

impl FacepopperReport {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, FacepopperVerdict::Holds(_))
    }
}

/// Default bound on `|b_i|` in the brute-force search.
pub const DEFAULT_BETA: u32 = 3;

/// Right-hand sides examined before the brute-force search gives up.
pub const FACEPOPPER_BUDGET: u64 = 200_000;

/// Decide whether `B y ≥ b` has an integral solution for every integral `b`
/// that makes it real feasible, as far as can be established.
///
/// Structural cases are recognised first. Otherwise every `b` with entries
/// in `[−beta, beta]` on the distinct nonzero rows of `B` is tried (zero rows
/// constrain neither side). Real feasibility and integer feasibility are
/// decided exactly by Fourier-Motzkin projection.
pub fn facepopper_condition(b: &[Vec<i64>], beta: u32) -> FacepopperVerdict {
    let cols = b.first().map_or(0, Vec::len);
    if cols == 0 {
        return FacepopperVerdict::Holds(HoldsBecause::Empty);
    }
    if cols == 1 && b.iter().all(|r| r[0].abs() <= 1) {
        return FacepopperVerdict::Holds(HoldsBecause::UnitColumn);
    }
    if cols == 2 && b.iter().all(|r| unit_pair_row(r)) {
        return FacepopperVerdict::Holds(HoldsBecause::UnitPairRows);
    }
    brute_force_gap(b, beta)
}

fn unit_pair_row(r: &[i64]) -> bool {
    matches!(
        (r[0], r[1]),
        (0, 0) | (0, 1) | (0, -1) | (1, 0) | (-1, 0) | (1, 1) | (-1, -1)
    )
}

/// Brute-force search for a real-but-not-integer-feasible right-hand side.
pub fn brute_force_gap(b: &[Vec<i64>], beta: u32) -> FacepopperVerdict {
    let rows: Vec<Vec<i64>> = b
        .iter()
        .filter(|r| r.iter().any(|&c| c != 0))
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let m = rows.len();
    let width = 2 * beta as u64 + 1;
    let total = (0..m).try_fold(1u64, |acc, _| acc.checked_mul(width));
    let limit = total.map_or(FACEPOPPER_BUDGET, |t| t.min(FACEPOPPER_BUDGET));
    let mut rhs = vec![-(beta as i64); m];
    let mut checked = 0u64;
    let mut all_decided = true;
    while checked < limit {
        let system: Vec<(Vec<BigRational>, BigRational)> = rows
            .iter()
            .zip(&rhs)
            .map(|(r, &v)| (r.iter().map(|&c| q(c)).collect(), q(v)))
            .collect();
        if fm_feasible(&system) {
            match integer_feasible(&system, integer_window(&rows, beta)) {
                Some(true) => {}
                Some(false) => {
                    // expand back to the original row order
                    let full = b
                        .iter()
                        .map(|r| match rows.iter().position(|x| x == r) {
                            Some(k) => rhs[k],
                            None => 0,
                        })
                        .collect();
                    return FacepopperVerdict::Fails { b: full };
                }
                None => all_decided = false,
            }
        }
        checked += 1;
        // next right-hand side, lexicographic
        let mut k = m;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            if rhs[k] < beta as i64 {
                rhs[k] += 1;
                break;
            }
            rhs[k] = -(beta as i64);
        }
        if m == 0 {
            break;
        }
    }
    FacepopperVerdict::Inconclusive {
        checked,
        exhaustive: total.is_some_and(|t| t <= FACEPOPPER_BUDGET) && all_decided,
    }
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

type Row = (Vec<BigRational>, BigRational);

/// Eliminate the last variable from `a·y ≥ rhs` rows.
fn fm_eliminate(rows: &[Row]) -> Vec<Row> {
    let k = rows.first().map_or(0, |r| r.0.len());
    if k == 0 {
        return rows.to_vec();
    }
    let last = k - 1;
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for (a, r) in rows {
        if a[last].is_positive() {
            pos.push((a, r));
        } else if a[last].is_negative() {
            neg.push((a, r));
        } else {
            out.push((a[..last].to_vec(), r.clone()));
        }
    }
    for (ap, rp) in &pos {
        for (an, rn) in &neg {
            let (sp, sn) = (ap[last].recip(), -an[last].recip());
            let coeffs = (0..last).map(|j| &ap[j] * &sp + &an[j] * &sn).collect();
            out.push((coeffs, *rp * &sp + *rn * &sn));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn fm_feasible(rows: &[Row]) -> bool {
    let mut cur = rows.to_vec();
    while cur.first().is_some_and(|r| !r.0.is_empty()) {
        cur = fm_eliminate(&cur);
    }
    cur.iter().all(|(_, r)| !r.is_positive())
}

/// Interval of the first variable implied by the projected system, or
/// `None` when the system is infeasible.
fn first_variable_range(rows: &[Row]) -> Option<(Option<BigRational>, Option<BigRational>)> {
    let mut cur = rows.to_vec();
    while cur.first().is_some_and(|r| r.0.len() > 1) {
        cur = fm_eliminate(&cur);
    }
    let (mut lo, mut hi): (Option<BigRational>, Option<BigRational>) = (None, None);
    for (a, r) in &cur {
        if a.is_empty() || a[0].is_zero() {
            if r.is_positive() {
                return None;
            }
        } else if a[0].is_positive() {
            let v = r / &a[0];
            lo = Some(lo.map_or(v.clone(), |l: BigRational| l.max(v)));
        } else {
            let v = r / &a[0];
            hi = Some(hi.map_or(v.clone(), |h: BigRational| h.min(v)));
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l > h {
            return None;
        }
    }
    Some((lo, hi))
}

fn integer_window(rows: &[Vec<i64>], beta: u32) -> i64 {
    let max = rows.iter().flatten().map(|c| c.abs()).max().unwrap_or(1);
    (beta as i64 + 1) * max * (rows.len() as i64 + 1)
}

/// `Some(found)` when the search was exhaustive, `None` when an unbounded
/// direction was cut off by `window` without finding a point.
fn integer_feasible(rows: &[Row], window: i64) -> Option<bool> {
    let k = rows.first().map_or(0, |r| r.0.len());
    if k == 0 {
        return Some(rows.iter().all(|(_, r)| !r.is_positive()));
    }
    let (lo, hi) = first_variable_range(rows)?;
    let bounded = lo.is_some() && hi.is_some();
    let lo = lo.map_or(-window, |l| l.ceil().to_integer().to_i64().unwrap_or(-window));
    let hi = hi.map_or(window, |h| h.floor().to_integer().to_i64().unwrap_or(window));
    let mut exhaustive = bounded;
    for y0 in lo.max(-window)..=hi.min(window) {
        let sub: Vec<Row> = rows
            .iter()
            .map(|(a, r)| (a[1..].to_vec(), r - &a[0] * q(y0)))
            .collect();
        match integer_feasible(&sub, window) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => exhaustive = false,
        }
    }
    exhaustive.then_some(false)
}

/// The facepopper check for one maximal face of an inequality description.
pub fn facepopper_report(sys: &InequalitySystem, face: &Face, beta: u32) -> Result<FacepopperReport> {
    let split = extract_b(sys, face)?;
    let verdict = facepopper_condition(&split.b, beta);
    Ok(FacepopperReport {
        face: face.clone(),
        b: split.b,
        verdict,
    })
}

/// Largest number of generator subsets [`spanned_facets`] will examine.
pub const SPANNED_FACET_BUDGET: u64 = 2_000_000;

/// Facets of `cone(gens)` found by examining every hyperplane spanned by
/// `dim − 1` generators. Each returned inequality is valid and spanned by
/// its tight generators; the list is irredundant.
///
/// Only meant for desk-scale cones: refuses when the number of subsets
/// exceeds [`SPANNED_FACET_BUDGET`].
pub fn spanned_facets(model: &Arc<Model>) -> Result<InequalitySystem> {
    let gens = reduced_generators(model);
    let d = model.reduced_dim();
    let ints: Vec<Vec<i64>> = gens.iter().map(|g| g.to_i64()).collect::<Result<_>>()?;
    if d == 0 {
        return InequalitySystem::new(model.clone(), Vec::new());
    }
    let n = gens.len();
    let subsets = binomial(n as u64, (d - 1) as u64);
    if subsets.is_none_or(|s| s > SPANNED_FACET_BUDGET) {
        return Err(Error::Unsupported(format!(
            "facet enumeration over {n} generators in dimension {d} is beyond desk scale"
        )));
    }
    let combos = combinations(n, d - 1);
    let found: BTreeSet<Vec<i64>> = combos
        .par_iter()
        .filter_map(|combo| {
            let sub: Vec<Vec<i64>> = combo.iter().map(|&k| ints[k].clone()).collect();
            let normal = linalg::hyperplane_normal(&sub, d)?;
            let values: Vec<i128> = ints
                .iter()
                .map(|g| g.iter().zip(&normal).map(|(&a, &c)| a as i128 * c as i128).sum())
                .collect();
            if values.iter().all(|&v| v >= 0) {
                Some(normal)
            } else if values.iter().all(|&v| v <= 0) {
                Some(normal.iter().map(|c| -c).collect())
            } else {
                None
            }
        })
        .collect();
    let rows = found
        .into_iter()
        .map(|c| LinearInequality::new(c, InequalityKind::Spanned))
        .collect();
    InequalitySystem::new(model.clone(), rows)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut cur, &mut out);
    }
    out
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InequalityKind::Box { edge, which } => write!(f, "box {}{} #{which}", edge.0, edge.1),
            InequalityKind::Cycle { cycle, odd } => {
                let show = |es: &[Edge]| {
                    es.iter().map(|(a, b)| format!("{a}{b}")).collect::<Vec<_>>().join(",")
                };
                write!(f, "cycle {{{}}} odd {{{}}}", show(cycle), show(odd))
            }
            InequalityKind::Spanned => write!(f, "spanned"),
            InequalityKind::Other => write!(f, "other"),
        }
    }
}

/// Whether `x · c ≥ 0` for a functional over rationals; helper for callers
/// holding LP certificates.
pub fn functional_value(c: &[BigRational], x: &ReducedMarginalVector) -> Result<BigRational> {
    x.dot(c)
}

/// Scale a rational functional to a primitive integer one.
pub fn integer_functional(c: &[BigRational]) -> Vec<BigInt> {
    linalg::primitive_integer(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn row_of(sys: &InequalitySystem, model: &Model, terms: &[(&[Vertex], i64)]) -> Vec<i64> {
        let mut c = vec![0; model.reduced_dim()];
        for (f, v) in terms {
            c[model.reduced_position(&Face::from(*f), &vec![1; f.len()]).unwrap()] = *v;
        }
        let _ = sys;
        c
    }

    #[test]
    fn single_edge_box() {
        let m = Graph::from_edges(&[(1, 2)]).unwrap().binary_model();
        let sys = box_inequalities(&m).unwrap();
        assert_eq!(sys.len(), 4);
        let expect = [
            row_of(&sys, &m, &[(&[1, 2], 1)]),
            row_of(&sys, &m, &[(&[1], 1), (&[1, 2], -1)]),
            row_of(&sys, &m, &[(&[2], 1), (&[1, 2], -1)]),
            row_of(&sys, &m, &[(&[], 1), (&[1], -1), (&[2], -1), (&[1, 2], 1)]),
        ];
        for (r, e) in sys.rows().iter().zip(expect) {
            assert_eq!(r.coeffs, e);
        }
    }

    #[test]
    fn box_counts() {
        assert_eq!(box_inequalities(&Graph::complete(3).binary_model()).unwrap().len(), 12);
        let edgeless = Graph::new([1, 2], []).unwrap();
        assert!(box_inequalities(&edgeless.binary_model()).unwrap().is_empty());
    }

    #[test]
    fn non_binary_is_unsupported() {
        let g = Graph::complete(3);
        let m = Model::new(
            g.edge_complex(),
            crate::model::TableShape::new(vec![2, 3, 2]).unwrap(),
        )
        .unwrap();
        assert!(matches!(box_inequalities(&m), Err(Error::Unsupported(_))));
        assert!(matches!(cycle_inequalities(&m), Err(Error::Unsupported(_))));
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(enumerate_cycles(&Graph::complete(3)).unwrap().len(), 1);
        assert_eq!(enumerate_cycles(&Graph::cycle(4)).unwrap().len(), 1);
        assert_eq!(enumerate_cycles(&Graph::complete(4)).unwrap().len(), 7);
        assert_eq!(cycle_inequalities(&Graph::cycle(4).binary_model()).unwrap().len(), 8);
        assert_eq!(cycle_inequalities(&Graph::complete(3).binary_model()).unwrap().len(), 4);
        assert!(matches!(
            enumerate_cycles(&Graph::cycle(13)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn triangle_cycle_rows() {
        let m = Graph::complete(3).binary_model();
        let sys = cycle_inequalities(&m).unwrap();
        let find = |odd: &[Edge]| {
            sys.rows()
                .iter()
                .find(|r| matches!(&r.kind, InequalityKind::Cycle { odd: o, .. } if o == odd))
                .unwrap()
                .coeffs
                .clone()
        };
        assert_eq!(
            find(&[(1, 2), (1, 3), (2, 3)]),
            row_of(
                &sys,
                &m,
                &[(&[], 1), (&[1], -1), (&[2], -1), (&[3], -1), (&[1, 2], 1), (&[1, 3], 1), (&[2, 3], 1)]
            )
        );
        // V(O) = {1,2}, V(C∖O) = {1,2,3}: only vertex 3 survives
        assert_eq!(
            find(&[(1, 2)]),
            row_of(&sys, &m, &[(&[3], 1), (&[1, 2], 1), (&[1, 3], -1), (&[2, 3], -1)])
        );
    }

    #[test]
    fn evaluate_at_generators() {
        let m = Graph::complete(3).binary_model();
        let sys = cycle_inequalities(&m).unwrap();
        let all_odd = sys.rows().iter().find(|r| r.coeffs[0] == 1).unwrap();
        let gens = reduced_generators(&m);
        // cells (1,1,1) and (1,1,2)
        assert_eq!(all_odd.evaluate(&gens[0]).unwrap(), q(1));
        assert_eq!(all_odd.evaluate(&gens[1]).unwrap(), q(0));
        assert!(all_odd.evaluate(&ReducedMarginalVector::zero(m.clone())).unwrap().is_zero());
        let other = Graph::complete(4).binary_model();
        assert!(matches!(
            all_odd.evaluate(&ReducedMarginalVector::zero(other)),
            Err(Error::SpaceMismatch)
        ));
    }

    #[test]
    fn membership_of_generators_and_negative_points() {
        let m = Graph::complete(3).binary_model();
        let gens = reduced_generators(&m);
        let oracle = ConeOracle::new(&gens).unwrap();
        for g in &gens {
            let r = oracle.solve(g).unwrap();
            assert!(r.is_feasible() && oracle.verify(g, &r));
        }
        let mut coords = vec![0i64; m.reduced_dim()];
        coords[0] = -1;
        let x = ReducedMarginalVector::from_integers(m.clone(), coords).unwrap();
        let r = oracle.solve(&x).unwrap();
        assert!(!r.is_feasible() && oracle.verify(&x, &r));
    }

    #[test]
    fn facepopper_structural_cases() {
        assert_eq!(
            facepopper_condition(&[vec![1], vec![-1], vec![0]], 3),
            FacepopperVerdict::Holds(HoldsBecause::UnitColumn)
        );
        assert_eq!(
            facepopper_condition(&[vec![1, 1], vec![0, -1], vec![-1, 0], vec![0, 0]], 3),
            FacepopperVerdict::Holds(HoldsBecause::UnitPairRows)
        );
    }

    #[test]
    fn facepopper_brute_force() {
        // 2y ≥ 1, −2y ≥ −1 pins y = 1/2
        match facepopper_condition(&[vec![2], vec![-2]], 3) {
            FacepopperVerdict::Fails { b } => {
                assert!(b[0] % 2 != 0 && b[0] == -b[1]);
            }
            other => panic!("{other:?}"),
        }
        // 2y ≥ b1, −y ≥ b2 always has an integer point when feasible
        assert!(matches!(
            facepopper_condition(&[vec![2], vec![-1], vec![0]], 3),
            FacepopperVerdict::Inconclusive { exhaustive: true, .. }
        ));
    }

    #[test]
    fn split_matrix_of_edge() {
        let m = Graph::cycle(4).binary_model();
        let sys = graph_system(&m).unwrap();
        let split = extract_b(&sys, &Face::from([1, 2])).unwrap();
        assert!(split.b.iter().all(|r| r.len() == 1 && r[0].abs() <= 1));
        assert_eq!(split.a[0].len(), m.reduced_dim() - 1);
        assert!(matches!(extract_b(&sys, &Face::from([1, 3])), Err(Error::NotAFace(_))));
        let empty = InequalitySystem::new(m.clone(), Vec::new()).unwrap();
        assert!(extract_b(&empty, &Face::from([1, 2])).unwrap().b.is_empty());
    }

    #[test]
    fn spanned_facets_of_single_edge() {
        let m = Graph::from_edges(&[(1, 2)]).unwrap().binary_model();
        let sys = spanned_facets(&m).unwrap();
        let mut got: Vec<Vec<i64>> = sys.rows().iter().map(|r| r.coeffs.clone()).collect();
        let mut want: Vec<Vec<i64>> = box_inequalities(&m).unwrap().rows().iter().map(|r| r.coeffs.clone()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(binomial(16, 12), Some(1820));
    }
}
