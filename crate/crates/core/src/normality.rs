//! Semigroup membership, hole enumeration and the normality classifier.
//!
//! A hole is an integer point of the marginal cone that is not the marginal
//! of any nonnegative integer table. Membership in the semigroup is decided
//! by an exhaustive depth-first search over table cells; membership in the
//! cone by the exact simplex in [`crate::polyhedra`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, RwLock};

use num::{BigRational, BigUint, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    chordal_completion_tw2, decompose, face_embedding, find_k4_branch_sets, minor_sequence_to_k4,
    replay, BranchSets, Decomposition, Elimination, Graph, MinorOp,
};
use crate::linalg;
use crate::lp::Feasibility;
use crate::model::{
    expand_coords, marginalize, reduce_coords, CellIndex, Face, FullMarginalVector, Model,
    ReducedMarginalVector, SimplicialComplex, Table, TableShape, Vertex,
};
use crate::polyhedra::{
    facepopper_report, graph_system, ConeOracle, FacepopperReport, DEFAULT_BETA,
};

/// Effort spent by one semigroup search.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchStats {
    /// Search nodes visited.
    pub nodes: u64,
    /// Cells of the table.
    pub cells: usize,
    /// Upper bound on every cell count, the sample size.
    pub cell_bound: i64,
}

/// Outcome of [`semigroup_search`].
#[derive(Clone, Debug)]
pub struct SemigroupSearch {
    pub table: Option<Table>,
    pub stats: SearchStats,
}

/// Cell structure of a model, reused across many searches.
#[derive(Clone, Debug)]
pub struct TableSearch {
    model: Arc<Model>,
    cells: Vec<CellIndex>,
    incidence: Vec<Vec<usize>>,
    // cells touching each full coordinate, ascending
    coord_cells: Vec<Vec<usize>>,
    last_cell: Vec<usize>,
}

impl TableSearch {
    pub fn new(model: &Arc<Model>) -> Self {
        let cells = model.shape().cells();
        let incidence = model.incidence();
        let mut coord_cells = vec![Vec::new(); model.full_dim()];
        for (t, touched) in incidence.iter().enumerate() {
            for &c in touched {
                coord_cells[c].push(t);
            }
        }
        let last_cell = coord_cells
            .iter()
            .map(|cs| cs.last().copied().unwrap_or(usize::MAX))
            .collect();
        TableSearch {
            model: model.clone(),
            cells,
            incidence,
            coord_cells,
            last_cell,
        }
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    /// Exhaustive search for counts with the given full marginal.
    pub(crate) fn solve(&self, x: &[i64]) -> (Option<Vec<i64>>, u64) {
        let mut run = Run {
            s: self,
            rem: x.to_vec(),
            counts: vec![0; self.cells.len()],
            nodes: 0,
        };
        if x.iter().any(|&v| v < 0) || !run.capacity_ok(0) {
            return (None, 1);
        }
        let found = run.dfs(0);
        (found.then_some(run.counts), run.nodes)
    }

    fn to_table(&self, counts: &[i64]) -> Table {
        let mut t = Table::zero(self.model.shape().clone());
        for (cell, &c) in self.cells.iter().zip(counts) {
            if c > 0 {
                t.add_count(cell.clone(), BigUint::from(c as u64))
                    .expect("cell of the model's shape");
            }
        }
        t
    }
}

struct Run<'a> {
    s: &'a TableSearch,
    rem: Vec<i64>,
    counts: Vec<i64>,
    nodes: u64,
}

impl Run<'_> {
    fn dfs(&mut self, t: usize) -> bool {
        self.nodes += 1;
        if t == self.counts.len() {
            return self.rem.iter().all(|&r| r == 0);
        }
        let touched = &self.s.incidence[t];
        let ub = touched.iter().map(|&c| self.rem[c]).min().unwrap_or(0);
        let mut forced: Option<i64> = None;
        for &c in touched {
            if self.s.last_cell[c] == t {
                match forced {
                    None => forced = Some(self.rem[c]),
                    Some(f) if f != self.rem[c] => return false,
                    _ => {}
                }
            }
        }
        let (lo, hi) = match forced {
            Some(f) if f > ub => return false,
            Some(f) => (f, f),
            None => (0, ub),
        };
        for v in (lo..=hi).rev() {
            for &c in touched {
                self.rem[c] -= v;
            }
            self.counts[t] = v;
            if self.capacity_ok(t + 1) && self.dfs(t + 1) {
                return true;
            }
            for &c in touched {
                self.rem[c] += v;
            }
        }
        self.counts[t] = 0;
        false
    }

    /// Every remaining requirement can still be met by the cells from `t`
    /// on, each cell limited by its tightest coordinate.
    fn capacity_ok(&self, t: usize) -> bool {
        let caps: Vec<i64> = (t..self.counts.len())
            .map(|s| self.s.incidence[s].iter().map(|&c| self.rem[c]).min().unwrap_or(0))
            .collect();
        self.rem.iter().enumerate().all(|(c, &r)| {
            if r == 0 {
                return true;
            }
            let cap: i64 = self.s.coord_cells[c]
                .iter()
                .rev()
                .take_while(|&&s| s >= t)
                .map(|&s| caps[s - t])
                .sum();
            cap >= r
        })
    }
}

/// Search for a nonnegative integer table with marginal `x`.
///
/// Returns none immediately when `x` is not consistent; otherwise the
/// search is exhaustive, with every cell count bounded by the sample size.
pub fn semigroup_search(x: &FullMarginalVector) -> Result<SemigroupSearch> {
    let coords = x.to_i64()?;
    let search = TableSearch::new(x.model());
    let stats = |nodes| SearchStats {
        nodes,
        cells: search.cells.len(),
        cell_bound: coords[0],
    };
    if !x.is_consistent() {
        return Ok(SemigroupSearch {
            table: None,
            stats: stats(0),
        });
    }
    let (found, nodes) = search.solve(&coords);
    Ok(SemigroupSearch {
        table: found.map(|c| search.to_table(&c)),
        stats: stats(nodes),
    })
}

/// A table with marginal `x`, or none if there is none.
pub fn semigroup_membership(x: &FullMarginalVector) -> Result<Option<Table>> {
    Ok(semigroup_search(x)?.table)
}

/// An integer cone point outside the semigroup, with its evidence.
#[derive(Clone, Debug, PartialEq)]
pub struct HoleReport {
    pub point: ReducedMarginalVector,
    pub sample_size: u64,
    /// Nonnegative weights on the generators (lexicographic cell order)
    /// reproducing the point.
    pub cone_weights: Vec<BigRational>,
    pub search: SearchStats,
}

impl HoleReport {
    /// Build a report for `point`, checking both sides from scratch.
    pub fn certify(point: ReducedMarginalVector) -> Result<Self> {
        if !point.is_integral() {
            return Err(Error::NonIntegral);
        }
        let oracle = ConeOracle::for_model(point.model());
        let weights = match oracle.solve(&point)? {
            Feasibility::Feasible(w) => w,
            Feasibility::Infeasible(_) => {
                return Err(Error::Precondition("point is outside the marginal cone".into()))
            }
        };
        let full = expand_coords(&point);
        let search = semigroup_search(&full)?;
        if search.table.is_some() {
            return Err(Error::Precondition("point is the marginal of a table".into()));
        }
        let sample_size = point
            .sample_size()
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::input("sample size out of range"))?;
        Ok(HoleReport {
            point,
            sample_size,
            cone_weights: weights,
            search: search.stats,
        })
    }

    /// Re-verify: the weights reproduce the point, and the search still
    /// finds no table.
    pub fn verify(&self) -> Result<bool> {
        let model = self.point.model();
        let gens = crate::polyhedra::reduced_generators(model);
        if self.cone_weights.len() != gens.len()
            || self.cone_weights.iter().any(|w| w < &BigRational::zero())
        {
            return Ok(false);
        }
        let mut sum = vec![BigRational::zero(); model.reduced_dim()];
        for (w, g) in self.cone_weights.iter().zip(&gens) {
            for (s, c) in sum.iter_mut().zip(g.coords()) {
                *s += w * c;
            }
        }
        if sum != self.point.coords() {
            return Ok(false);
        }
        Ok(semigroup_search(&expand_coords(&self.point))?.table.is_none())
    }
}

/// Cone membership with a cache of separating functionals and an integer
/// search as a fast path.
struct PointTester {
    oracle: ConeOracle,
    search: TableSearch,
    cuts: RwLock<Vec<Vec<i64>>>,
}

enum PointStatus {
    Outside,
    Member,
    Hole(Vec<BigRational>, u64),
}

impl PointTester {
    fn new(model: &Arc<Model>) -> Self {
        PointTester {
            oracle: ConeOracle::for_model(model),
            search: TableSearch::new(model),
            cuts: RwLock::new(Vec::new()),
        }
    }

    fn cut_off(&self, x: &[i64]) -> bool {
        self.cuts.read().unwrap().iter().any(|c| {
            c.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() < 0
        })
    }

    fn in_cone(&self, x: &[i64]) -> Option<Vec<BigRational>> {
        if self.cut_off(x) {
            return None;
        }
        match self.oracle.solve_i64(x) {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible(c) => {
                let ints = linalg::primitive_integer(&c);
                if let Some(cut) = ints.iter().map(|v| v.to_i64()).collect::<Option<Vec<i64>>>() {
                    let mut cuts = self.cuts.write().unwrap();
                    if !cuts.contains(&cut) {
                        cuts.push(cut);
                    }
                }
                None
            }
        }
    }

    fn classify(&self, reduced: &[i64], full: &[i64]) -> PointStatus {
        if self.cut_off(reduced) {
            return PointStatus::Outside;
        }
        let (found, nodes) = self.search.solve(full);
        if found.is_some() {
            return PointStatus::Member;
        }
        match self.in_cone(reduced) {
            Some(w) => PointStatus::Hole(w, nodes),
            None => PointStatus::Outside,
        }
    }
}

/// Integer reduced vectors at level `n` whose expansion is nonnegative, in
/// lexicographic order. Every such point has all coordinates in `[0, n]`.
fn candidates(model: &Model, n: i64) -> Vec<Vec<i64>> {
    let d = model.reduced_dim();
    let plan = model.expansion();
    // full coordinates whose expansion is complete once reduced position t is set
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (k, terms) in plan.iter().enumerate() {
        if let Some(end) = terms.iter().map(|&(_, r)| r).max() {
            ready[end].push(k);
        }
    }
    let value = |x: &[i64], k: usize| -> i64 {
        plan[k]
            .iter()
            .map(|&(pos, r)| if pos { x[r] } else { -x[r] })
            .sum()
    };
    let mut out = Vec::new();
    let mut x = vec![0i64; d];
    fn rec(
        t: usize,
        n: i64,
        x: &mut Vec<i64>,
        ready: &[Vec<usize>],
        value: &dyn Fn(&[i64], usize) -> i64,
        out: &mut Vec<Vec<i64>>,
    ) {
        if t == x.len() {
            out.push(x.clone());
            return;
        }
        let range = if t == 0 { n..=n } else { 0..=n };
        for v in range {
            x[t] = v;
            if ready[t].iter().all(|&k| value(x, k) >= 0) {
                rec(t + 1, n, x, ready, value, out);
            }
        }
        x[t] = 0;
    }
    if d > 0 {
        rec(0, n, &mut x, &ready, &value, &mut out);
    }
    out
}

/// All integer points of the cone at sample size `n`, sorted
/// lexicographically.
pub fn enumerate_lattice_points(model: &Arc<Model>, n: u32) -> Vec<ReducedMarginalVector> {
    let tester = PointTester::new(model);
    let cands = candidates(model, n as i64);
    let keep: Vec<bool> = cands
        .par_iter()
        .map(|x| {
            let full = model.expand_slice(x);
            !matches!(tester.classify(x, &full), PointStatus::Outside)
        })
        .collect();
    cands
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(x, _)| ReducedMarginalVector::from_integers(model.clone(), x).expect("model dimension"))
        .collect()
}

/// Counts gathered by [`find_holes_with_stats`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct LevelStats {
    pub level: u32,
    /// Points with nonnegative expansion at this level.
    pub candidates: usize,
    pub lattice_points: usize,
    pub holes: usize,
}

/// Every hole with sample size at most `n_max`, ordered by level and then
/// lexicographically.
pub fn find_holes(model: &Arc<Model>, n_max: u32) -> Vec<HoleReport> {
    find_holes_with_stats(model, n_max).0
}

pub fn find_holes_with_stats(model: &Arc<Model>, n_max: u32) -> (Vec<HoleReport>, Vec<LevelStats>) {
    let tester = PointTester::new(model);
    let cells = tester.search.cells.len();
    let mut holes = Vec::new();
    let mut stats = Vec::new();
    for n in 0..=n_max {
        let cands = candidates(model, n as i64);
        let status: Vec<PointStatus> = cands
            .par_iter()
            .map(|x| tester.classify(x, &model.expand_slice(x)))
            .collect();
        let mut level = LevelStats {
            level: n,
            candidates: cands.len(),
            ..Default::default()
        };
        for (x, s) in cands.into_iter().zip(status) {
            match s {
                PointStatus::Outside => {}
                PointStatus::Member => level.lattice_points += 1,
                PointStatus::Hole(weights, nodes) => {
                    level.lattice_points += 1;
                    level.holes += 1;
                    holes.push(HoleReport {
                        point: ReducedMarginalVector::from_integers(model.clone(), x)
                            .expect("model dimension"),
                        sample_size: n as u64,
                        cone_weights: weights,
                        search: SearchStats {
                            nodes,
                            cells,
                            cell_bound: n as i64,
                        },
                    });
                }
            }
        }
        stats.push(level);
    }
    (holes, stats)
}

/// Smallest level at which holes appear, searching up to `n_max`.
pub fn first_holes(model: &Arc<Model>, n_max: u32) -> Option<(u32, Vec<HoleReport>)> {
    for n in 1..=n_max {
        let tester = PointTester::new(model);
        let cells = tester.search.cells.len();
        let holes: Vec<HoleReport> = candidates(model, n as i64)
            .into_par_iter()
            .filter_map(|x| match tester.classify(&x, &model.expand_slice(&x)) {
                PointStatus::Hole(w, nodes) => Some(HoleReport {
                    point: ReducedMarginalVector::from_integers(model.clone(), x).unwrap(),
                    sample_size: n as u64,
                    cone_weights: w,
                    search: SearchStats {
                        nodes,
                        cells,
                        cell_bound: n as i64,
                    },
                }),
                _ => None,
            })
            .collect();
        if !holes.is_empty() {
            return Some((n, holes));
        }
    }
    None
}

/// Push a hole of `Γ` back to `Δ` along the operations that turn `Δ` into
/// `Γ`, and certify the result over `Δ`.
pub fn lift_hole(h: &HoleReport, source: &Arc<Model>, ops: &[MinorOp]) -> Result<HoleReport> {
    let models = replay(source, ops)?;
    if **models.last().unwrap() != **h.point.model() {
        return Err(Error::Precondition(
            "operations do not produce the hole's model".into(),
        ));
    }
    if ops.is_empty() {
        return Ok(h.clone());
    }
    let mut w = expand_coords(&h.point);
    for (k, op) in ops.iter().enumerate().rev() {
        w = face_embedding(&models[k], op, &w)?;
    }
    HoleReport::certify(reduce_coords(&w))
        .map_err(|e| Error::Internal(format!("lifted point failed verification: {e}")))
}

/// The hole of the binary `K_4` model on vertices 1 to 4, at sample size 4:
/// `p^∅ = 4`, `p^j = 2`, `p^{jk} = 1`.
pub fn k4_hole_point(model: &Arc<Model>) -> Result<ReducedMarginalVector> {
    let g = Graph::from_complex(model.complex())?;
    let vs: Vec<Vertex> = g.vertices().collect();
    if !model.is_binary() || vs.len() != 4 || g.num_edges() != 6 {
        return Err(Error::Precondition("expected the binary K4 model".into()));
    }
    let coords: Vec<i64> = model
        .reduced_keys()
        .iter()
        .map(|k| match k.face.len() {
            0 => 4,
            1 => 2,
            _ => 1,
        })
        .collect();
    ReducedMarginalVector::from_integers(model.clone(), coords)
}

/// One fill edge removed from the completion, with the evidence that the
/// removal keeps the semigroup normal.
#[derive(Clone, Debug)]
pub struct EdgeDeletion {
    pub edge: (Vertex, Vertex),
    /// Graph before the deletion.
    pub graph: Graph,
    pub report: FacepopperReport,
}

#[derive(Clone, Debug)]
pub struct NormalEvidence {
    pub graph: Graph,
    pub completion: Graph,
    pub elimination: Elimination,
    pub decomposition: Decomposition,
    /// In deletion order, which is reverse elimination order.
    pub deletions: Vec<EdgeDeletion>,
}

#[derive(Clone, Debug)]
pub struct NotNormalEvidence {
    /// Present when the hole comes from a `K_4` minor.
    pub branch_sets: Option<BranchSets>,
    pub ops: Vec<MinorOp>,
    /// The hole of the minor, before lifting.
    pub minor_hole: Option<HoleReport>,
    pub hole: HoleReport,
}

#[derive(Clone, Debug)]
pub enum NormalityCertificate {
    Normal(Box<NormalEvidence>),
    NotNormal(Box<NotNormalEvidence>),
    /// No hole up to this sample size, and no criterion applies.
    Unknown { bound: u32 },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Normal,
    NotNormal,
    Unknown,
}

impl NormalityCertificate {
    pub fn verdict(&self) -> Verdict {
        match self {
            NormalityCertificate::Normal(_) => Verdict::Normal,
            NormalityCertificate::NotNormal(_) => Verdict::NotNormal,
            NormalityCertificate::Unknown { .. } => Verdict::Unknown,
        }
    }

    /// Replay the evidence.
    pub fn verify(&self) -> Result<bool> {
        match self {
            NormalityCertificate::Normal(e) => verify_normal(e),
            NormalityCertificate::NotNormal(e) => {
                if let Some(b) = &e.branch_sets {
                    let g = Graph::from_complex(e.hole.point.model().complex())?;
                    if b.validate(&g).is_err() {
                        return Ok(false);
                    }
                    let ops = minor_sequence_to_k4(&g, b)?;
                    if ops != e.ops {
                        return Ok(false);
                    }
                }
                if let Some(m) = &e.minor_hole {
                    let lifted = lift_hole(m, e.hole.point.model(), &e.ops)?;
                    if lifted.point != e.hole.point {
                        return Ok(false);
                    }
                }
                e.hole.verify()
            }
            NormalityCertificate::Unknown { .. } => Ok(true),
        }
    }
}

fn is_clique(c: &SimplicialComplex) -> Result<bool> {
    let g = Graph::from_complex(c)?;
    let n = g.num_vertices();
    Ok(n <= 3 && g.num_edges() == n * n.saturating_sub(1) / 2)
}

fn verify_normal(e: &NormalEvidence) -> Result<bool> {
    if !e.elimination.succeeded() || e.decomposition.complex() != &e.completion.edge_complex() {
        return Ok(false);
    }
    if !e.decomposition.is_valid() {
        return Ok(false);
    }
    for leaf in e.decomposition.leaves() {
        if !is_clique(leaf)? {
            return Ok(false);
        }
    }
    let mut g = e.completion.clone();
    for d in &e.deletions {
        if d.graph != g || !d.report.holds() {
            return Ok(false);
        }
        let sys = graph_system(&g.binary_model())?;
        let again = facepopper_report(&sys, &Face::from([d.edge.0, d.edge.1]), DEFAULT_BETA)?;
        if again != d.report || d.report.b.iter().any(|r| r.len() != 1 || r[0].abs() > 1) {
            return Ok(false);
        }
        g.remove_edge(d.edge.0, d.edge.1);
    }
    Ok(g == e.graph)
}

/// Decide normality of the binary graph model of `g`.
///
/// A `K_4` minor yields a hole lifted from the `K_4` hole. Otherwise the
/// chordal completion splits into cliques on at most three vertices, and
/// each fill edge is deleted in reverse elimination order with its
/// inequality column checked.
pub fn classify_normality(g: &Graph, shape: &TableShape) -> Result<NormalityCertificate> {
    classify_normality_with(g, shape, DEFAULT_BETA)
}

pub fn classify_normality_with(g: &Graph, shape: &TableShape, beta: u32) -> Result<NormalityCertificate> {
    if !shape.is_binary() || shape.len() != g.num_vertices() {
        return Err(Error::Unsupported(
            "the classifier covers binary graph models only".into(),
        ));
    }
    let model = g.binary_model();
    if let Some(b) = find_k4_branch_sets(g)? {
        let ops = minor_sequence_to_k4(g, &b)?;
        let models = replay(&model, &ops)?;
        let k4 = models.last().unwrap();
        let minor_hole = HoleReport::certify(k4_hole_point(k4)?)?;
        let hole = lift_hole(&minor_hole, &model, &ops)?;
        return Ok(NormalityCertificate::NotNormal(Box::new(NotNormalEvidence {
            branch_sets: Some(b),
            ops,
            minor_hole: Some(minor_hole),
            hole,
        })));
    }
    let (completion, elimination) = chordal_completion_tw2(g)?;
    let decomposition = decompose(&completion.edge_complex());
    let mut deletions = Vec::new();
    let mut cur = completion.clone();
    for &(a, b) in elimination.fill.iter().rev() {
        let sys = graph_system(&cur.binary_model())?;
        let report = facepopper_report(&sys, &Face::from([a, b]), beta)?;
        if !report.holds() {
            return Err(Error::Internal(format!(
                "fill edge {a}{b} has a column outside 0, ±1"
            )));
        }
        deletions.push(EdgeDeletion {
            edge: (a, b),
            graph: cur.clone(),
            report,
        });
        cur.remove_edge(a, b);
    }
    Ok(NormalityCertificate::Normal(Box::new(NormalEvidence {
        graph: g.clone(),
        completion,
        elimination,
        decomposition,
        deletions,
    })))
}

/// Binary graph models go to [`classify_normality`]; anything else gets a
/// bounded hole search.
pub fn classify_model(model: &Arc<Model>, n_max: u32, beta: u32) -> Result<NormalityCertificate> {
    if model.is_binary() {
        if let Ok(g) = Graph::from_complex(model.complex()) {
            return classify_normality_with(&g, model.shape(), beta);
        }
    }
    match first_holes(model, n_max) {
        Some((_, holes)) => Ok(NormalityCertificate::NotNormal(Box::new(NotNormalEvidence {
            branch_sets: None,
            ops: Vec::new(),
            minor_hole: None,
            hole: holes.into_iter().next().unwrap(),
        }))),
        None => Ok(NormalityCertificate::Unknown { bound: n_max }),
    }
}

fn union_model(m1: &Model, m2: &Model) -> Result<Arc<Model>> {
    let mut levels: BTreeMap<Vertex, u32> = BTreeMap::new();
    for m in [m1, m2] {
        for (&v, &r) in m.complex().ground().iter().zip(m.shape().sizes()) {
            if *levels.entry(v).or_insert(r) != r {
                return Err(Error::input(format!("vertex {v} has different level counts")));
            }
        }
    }
    let complex = m1.complex().union(m2.complex());
    let shape = TableShape::new(complex.ground().iter().map(|v| levels[v]).collect())?;
    Model::new(complex, shape)
}

fn check_split(m1: &Model, m2: &Model, s: &Face) -> Result<()> {
    let simplex: BTreeSet<Face> = s.subsets().into_iter().collect();
    if m1.complex().common_faces(m2.complex()) != simplex {
        return Err(Error::Precondition(format!(
            "the complexes do not meet in the simplex on {s}"
        )));
    }
    Ok(())
}

/// Marginal vector over `Δ₁ ∪ Δ₂` from vectors over `Δ₁` and `Δ₂` that
/// agree on the faces of the separator `S`.
pub fn glue_marginals(
    x1: &FullMarginalVector,
    x2: &FullMarginalVector,
    s: &Face,
) -> Result<FullMarginalVector> {
    let (m1, m2) = (x1.model(), x2.model());
    check_split(m1, m2, s)?;
    let glued = union_model(m1, m2)?;
    for key in m1.full_keys() {
        if key.face.is_subset(s) && x1.get(&key.face, &key.index) != x2.get(&key.face, &key.index) {
            return Err(Error::input(format!("shared marginal on {} differs", key.face)));
        }
    }
    let coords = glued
        .full_keys()
        .iter()
        .map(|k| {
            x1.get(&k.face, &k.index)
                .or_else(|| x2.get(&k.face, &k.index))
                .cloned()
                .expect("every face lies in one side")
        })
        .collect();
    FullMarginalVector::new(glued, coords)
}

/// A table over `Δ₁ ∪ Δ₂` whose restrictions are `t1` and `t2`, built by
/// matching cells with the same separator levels one sample at a time.
pub fn glue_tables(
    t1: &Table,
    m1: &Arc<Model>,
    t2: &Table,
    m2: &Arc<Model>,
    s: &Face,
) -> Result<(Table, Arc<Model>)> {
    check_split(m1, m2, s)?;
    let glued = union_model(m1, m2)?;
    let ground = glued.complex().ground().to_vec();
    let g1 = m1.complex().ground();
    let g2 = m2.complex().ground();
    let sep_levels = |cell: &CellIndex, g: &[Vertex]| -> Vec<u32> {
        s.vertices()
            .iter()
            .map(|v| cell.levels()[g.binary_search(v).unwrap()])
            .collect()
    };
    let expand = |t: &Table, g: &[Vertex]| {
        let mut by_sep: BTreeMap<Vec<u32>, Vec<CellIndex>> = BTreeMap::new();
        for (cell, count) in t.iter() {
            let n = count.to_usize().unwrap_or(0);
            by_sep
                .entry(sep_levels(cell, g))
                .or_default()
                .extend(std::iter::repeat_n(cell.clone(), n));
        }
        by_sep
    };
    let (a, b) = (expand(t1, g1), expand(t2, g2));
    if a.iter().map(|(k, v)| (k, v.len())).ne(b.iter().map(|(k, v)| (k, v.len()))) {
        return Err(Error::input("separator marginals differ"));
    }
    let mut out = Table::zero(glued.shape().clone());
    for (k, left) in &a {
        for (c1, c2) in left.iter().zip(&b[k]) {
            let levels = ground
                .iter()
                .map(|v| match g1.binary_search(v) {
                    Ok(i) => c1.levels()[i],
                    Err(_) => c2.levels()[g2.binary_search(v).unwrap()],
                })
                .collect();
            out.add_count(CellIndex(levels), BigUint::from(1u8))?;
        }
    }
    Ok((out, glued))
}

/// `glue_marginals` followed by a table for the glued vector: glued from
/// tables of the two sides when both exist, otherwise searched directly.
pub fn glue_with_table(
    x1: &FullMarginalVector,
    x2: &FullMarginalVector,
    s: &Face,
) -> Result<(FullMarginalVector, Option<Table>)> {
    let glued = glue_marginals(x1, x2, s)?;
    if let (Some(t1), Some(t2)) = (semigroup_membership(x1)?, semigroup_membership(x2)?) {
        let (t, model) = glue_tables(&t1, x1.model(), &t2, x2.model(), s)?;
        if marginalize(&t, &model)? == glued {
            return Ok((glued, Some(t)));
        }
    }
    let table = semigroup_membership(&glued)?;
    Ok((glued, table))
}
