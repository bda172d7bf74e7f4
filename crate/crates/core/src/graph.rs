//! Simple graphs, minor operations on complexes, and the treewidth-two
//! machinery behind the `K_4`-minor test.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num::{BigRational, Zero};

use crate::error::{Error, Result};
use crate::model::{Face, FullMarginalVector, Model, SimplicialComplex, TableShape, Vertex};

/// An undirected simple graph.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    vertices: BTreeSet<Vertex>,
    edges: BTreeSet<(Vertex, Vertex)>,
}

fn ordered(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Graph {
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self> {
        let mut g = Graph {
            vertices: vertices.into_iter().collect(),
            edges: BTreeSet::new(),
        };
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Graph on the endpoints of `edges`.
    pub fn from_edges(edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let vs: Vec<Vertex> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        Graph::new(vs, edges.iter().copied())
    }

    pub fn complete(n: u32) -> Self {
        let mut g = Graph::default();
        for a in 1..=n {
            g.vertices.insert(a);
            for b in a + 1..=n {
                g.edges.insert((a, b));
            }
        }
        g
    }

    pub fn cycle(n: u32) -> Self {
        let edges: Vec<_> = (1..=n).map(|a| (a, a % n + 1)).collect();
        Graph::from_edges(&edges).expect("cycle is simple")
    }

    /// Rim `1..=n` plus hub `n + 1`.
    pub fn wheel(n: u32) -> Self {
        let mut g = Graph::cycle(n);
        for a in 1..=n {
            g.add_edge(a, n + 1).unwrap();
        }
        g
    }

    /// Graph whose vertices are the ground set and whose edges are the
    /// two-element faces. Fails if the complex has a face with more than two
    /// vertices.
    pub fn from_complex(c: &SimplicialComplex) -> Result<Self> {
        let mut g = Graph {
            vertices: c.ground().iter().copied().collect(),
            edges: BTreeSet::new(),
        };
        for f in c.faces() {
            match f.vertices() {
                [a, b] => {
                    g.edges.insert((*a, *b));
                }
                vs if vs.len() > 2 => {
                    return Err(Error::input(format!("face {f} has more than two vertices")))
                }
                _ => {}
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        if a == b {
            return Err(Error::input(format!("loop at vertex {a}")));
        }
        self.vertices.insert(a);
        self.vertices.insert(b);
        self.edges.insert(ordered(a, b));
        Ok(())
    }

    pub fn remove_edge(&mut self, a: Vertex, b: Vertex) -> bool {
        self.edges.remove(&ordered(a, b))
    }

    pub fn remove_vertex(&mut self, v: Vertex) {
        self.vertices.remove(&v);
        self.edges.retain(|&(a, b)| a != v && b != v);
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.edges.contains(&ordered(a, b))
    }

    pub fn neighbors(&self, v: Vertex) -> BTreeSet<Vertex> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return true;
        };
        self.component_of(start, &self.vertices) == self.vertices
    }

    /// Vertices reachable from `start` inside `within`.
    pub fn component_of(&self, start: Vertex, within: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if within.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Edge complex `Δ_G`: facets are the edges and the isolated vertices.
    pub fn edge_complex(&self) -> SimplicialComplex {
        let mut faces = BTreeSet::new();
        for &v in &self.vertices {
            faces.insert(Face::from([v]));
        }
        for &(a, b) in &self.edges {
            faces.insert(Face::from([a, b]));
        }
        SimplicialComplex::from_parts(self.vertices.clone(), faces)
    }

    /// Edge complex with every vertex binary.
    pub fn binary_model(&self) -> Arc<Model> {
        Model::new(self.edge_complex(), TableShape::binary(self.num_vertices()))
            .expect("shape matches ground set")
    }

    /// Vertices sorted, as a `u64` mask over positions.
    pub(crate) fn index(&self) -> (Vec<Vertex>, Vec<u64>) {
        let vs: Vec<Vertex> = self.vertices.iter().copied().collect();
        let pos = |v: Vertex| vs.binary_search(&v).unwrap();
        let mut adj = vec![0u64; vs.len()];
        for &(a, b) in &self.edges {
            adj[pos(a)] |= 1 << pos(b);
            adj[pos(b)] |= 1 << pos(a);
        }
        (vs, adj)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(V={:?}, E={:?})", self.vertices, self.edges)
    }
}

/// Delete a vertex, contract a face into a fresh vertex, or delete an edge.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum MinorOp {
    DeleteVertex(Vertex),
    ContractEdge { face: Face, new_label: Vertex },
    DeleteEdge(Vertex, Vertex),
}

/// `Δ \ v = {S ∈ Δ : v ∉ S}`.
pub fn delete_vertex(c: &SimplicialComplex, v: Vertex) -> Result<SimplicialComplex> {
    if !c.has_vertex(v) {
        return Err(Error::UnknownVertex(v));
    }
    Ok(SimplicialComplex::from_parts(
        c.ground().iter().copied().filter(|&w| w != v).collect(),
        c.faces().filter(|f| !f.contains(v)).cloned().collect(),
    ))
}

/// Smallest positive label outside the ground set.
pub fn fresh_label(c: &SimplicialComplex) -> Vertex {
    (1..).find(|v| !c.has_vertex(*v)).unwrap()
}

/// `Δ / L`: faces missing `L` stay, faces meeting `L` have their part in
/// `L` replaced by a fresh vertex `v` with `r_v = min_{l ∈ L} r_l`.
pub fn contract_edge(
    c: &SimplicialComplex,
    face: &Face,
    shape: &TableShape,
) -> Result<(SimplicialComplex, TableShape, Vertex)> {
    let v = fresh_label(c);
    let (c2, s2) = contract_edge_as(c, face, shape, v)?;
    Ok((c2, s2, v))
}

fn contract_edge_as(
    c: &SimplicialComplex,
    face: &Face,
    shape: &TableShape,
    v: Vertex,
) -> Result<(SimplicialComplex, TableShape)> {
    if face.is_empty() || !c.contains(face) {
        return Err(Error::NotAFace(face.clone()));
    }
    if c.has_vertex(v) {
        return Err(Error::input(format!("label {v} is already in use")));
    }
    if shape.len() != c.ground().len() {
        return Err(Error::ShapeMismatch {
            expected: c.ground().len(),
            found: shape.len(),
        });
    }
    let levels: BTreeMap<Vertex, u32> = c
        .ground()
        .iter()
        .copied()
        .zip(shape.sizes().iter().copied())
        .collect();
    let r_v = face.vertices().iter().map(|l| levels[l]).min().unwrap();
    let faces = c
        .faces()
        .map(|s| {
            if s.intersects(face) {
                s.minus(face).with(v)
            } else {
                s.clone()
            }
        })
        .collect();
    let mut ground: BTreeSet<Vertex> = c
        .ground()
        .iter()
        .copied()
        .filter(|w| !face.contains(*w))
        .collect();
    ground.insert(v);
    let sizes = ground
        .iter()
        .map(|w| if *w == v { r_v } else { levels[w] })
        .collect();
    Ok((
        SimplicialComplex::from_parts(ground, faces),
        TableShape::new(sizes)?,
    ))
}

/// Apply one minor operation to a model. Contractions use the label stored
/// in the operation.
pub fn apply_op(model: &Model, op: &MinorOp) -> Result<Arc<Model>> {
    let c = model.complex();
    match op {
        MinorOp::DeleteVertex(v) => {
            let pos = c.ground().binary_search(v).map_err(|_| Error::UnknownVertex(*v))?;
            let mut sizes = model.shape().sizes().to_vec();
            sizes.remove(pos);
            Model::new(delete_vertex(c, *v)?, TableShape::new(sizes)?)
        }
        MinorOp::ContractEdge { face, new_label } => {
            let (c2, s2) = contract_edge_as(c, face, model.shape(), *new_label)?;
            Model::new(c2, s2)
        }
        MinorOp::DeleteEdge(a, b) => {
            let e = Face::from([*a, *b]);
            if !c.contains(&e) {
                return Err(Error::NotAFace(e));
            }
            if c.faces().any(|f| f.len() > 2 && e.is_subset(f)) {
                return Err(Error::input(format!("edge {e} is not a maximal face")));
            }
            let faces = c.faces().filter(|f| **f != e).cloned().collect();
            Model::new(
                SimplicialComplex::from_parts(c.ground().iter().copied().collect(), faces),
                model.shape().clone(),
            )
        }
    }
}

/// Apply a sequence of operations, returning every intermediate model
/// (first entry is the input).
pub fn replay(model: &Arc<Model>, ops: &[MinorOp]) -> Result<Vec<Arc<Model>>> {
    let mut out = vec![model.clone()];
    for op in ops {
        let next = apply_op(out.last().unwrap(), op)?;
        out.push(next);
    }
    Ok(out)
}

fn first_with_degree_at_most(g: &Graph, d: usize) -> Option<Vertex> {
    g.vertices().find(|&v| g.degree(v) <= d)
}

fn next_to_eliminate(g: &Graph) -> Option<Vertex> {
    let fill_free = g.vertices().find(|&v| {
        let nb: Vec<Vertex> = g.neighbors(v).into_iter().collect();
        match nb[..] {
            [] | [_] => true,
            [a, b] => g.has_edge(a, b),
            _ => false,
        }
    });
    fill_free.or_else(|| first_with_degree_at_most(g, 2))
}

/// Outcome of greedy elimination of vertices of degree at most two.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Elimination {
    pub order: Vec<Vertex>,
    /// Fill edges in the order they were added.
    pub fill: Vec<(Vertex, Vertex)>,
    /// Vertices left when no vertex of degree at most two remained; empty on
    /// success.
    pub stuck: Vec<Vertex>,
}

impl Elimination {
    pub fn succeeded(&self) -> bool {
        self.stuck.is_empty()
    }
}

/// Repeatedly eliminate a vertex of degree at most two, joining the two
/// neighbours of a degree-two vertex. Vertices needing no fill edge go
/// first; ties break on the smallest label.
pub fn eliminate(g: &Graph) -> Elimination {
    let mut h = g.clone();
    let mut order = Vec::new();
    let mut fill = Vec::new();
    while let Some(v) = next_to_eliminate(&h) {
        let nb: Vec<Vertex> = h.neighbors(v).into_iter().collect();
        if let [a, b] = nb[..] {
            if !h.has_edge(a, b) {
                h.add_edge(a, b).unwrap();
                fill.push((a, b));
            }
        }
        h.remove_vertex(v);
        order.push(v);
    }
    Elimination {
        order,
        fill,
        stuck: h.vertices().collect(),
    }
}

/// `Some(elimination)` when `g` has no `K_4` minor, `None` otherwise.
pub fn is_k4_minor_free(g: &Graph) -> Option<Elimination> {
    let e = eliminate(g);
    e.succeeded().then_some(e)
}

/// Four disjoint connected vertex sets, pairwise joined by an edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BranchSets(pub [BTreeSet<Vertex>; 4]);

impl BranchSets {
    pub fn sets(&self) -> &[BTreeSet<Vertex>; 4] {
        &self.0
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut seen = BTreeSet::new();
        for b in &self.0 {
            if b.is_empty() {
                return Err(Error::input("empty branch set"));
            }
            for &v in b {
                if !g.has_vertex(v) {
                    return Err(Error::UnknownVertex(v));
                }
                if !seen.insert(v) {
                    return Err(Error::input(format!("vertex {v} in two branch sets")));
                }
            }
            let first = *b.iter().next().unwrap();
            if &g.component_of(first, b) != b {
                return Err(Error::input(format!("branch set {b:?} is not connected")));
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let joined = self.0[i]
                    .iter()
                    .any(|&a| self.0[j].iter().any(|&b| g.has_edge(a, b)));
                if !joined {
                    return Err(Error::input(format!(
                        "branch sets {i} and {j} are not adjacent"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn connected_mask(set: u64, adj: &[u64]) -> bool {
    if set == 0 {
        return false;
    }
    let mut reach = set & set.wrapping_neg();
    loop {
        let mut next = reach;
        let mut rest = reach;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            next |= adj[k] & set;
        }
        if next == reach {
            return reach == set;
        }
        reach = next;
    }
}

fn neighborhood(set: u64, adj: &[u64]) -> u64 {
    let mut out = 0;
    let mut rest = set;
    while rest != 0 {
        let k = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= adj[k];
    }
    out
}

/// Largest graph accepted by the exhaustive branch-set search.
pub const BRANCH_SEARCH_LIMIT: usize = 16;

/// Exhaustive search for a `K_4` minor model.
///
/// Vertices whose degree drops to at most one are removed first; they never
/// help a branch set. The search then runs over connected vertex subsets,
/// ordered by size and then by bitmask, so the witness returned is the first
/// in that order.
pub fn find_k4_branch_sets(g: &Graph) -> Result<Option<BranchSets>> {
    let mut core = g.clone();
    while let Some(v) = first_with_degree_at_most(&core, 1) {
        core.remove_vertex(v);
    }
    if core.num_vertices() > BRANCH_SEARCH_LIMIT {
        return Err(Error::TooLarge {
            vertices: core.num_vertices(),
            limit: BRANCH_SEARCH_LIMIT,
        });
    }
    let (vs, adj) = core.index();
    let n = vs.len();
    if n < 4 {
        return Ok(None);
    }
    let mut subsets: Vec<u64> = (1u64..(1 << n)).filter(|&s| connected_mask(s, &adj)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    let nbhd: Vec<u64> = subsets.iter().map(|&s| neighborhood(s, &adj)).collect();

    // each branch set must touch the three others, so the sets are picked in
    // increasing position with disjointness and adjacency checked as we go
    let m = subsets.len();
    for a in 0..m {
        let (sa, na) = (subsets[a], nbhd[a]);
        for b in a + 1..m {
            let (sb, nb) = (subsets[b], nbhd[b]);
            if sb & sa != 0 || na & sb == 0 {
                continue;
            }
            for c in b + 1..m {
                let (sc, nc) = (subsets[c], nbhd[c]);
                if sc & (sa | sb) != 0 || na & sc == 0 || nb & sc == 0 {
                    continue;
                }
                for d in c + 1..m {
                    let sd = subsets[d];
                    if sd & (sa | sb | sc) == 0 && na & sd != 0 && nb & sd != 0 && nc & sd != 0 {
                        let to_set = |s: u64| -> BTreeSet<Vertex> {
                            (0..n).filter(|k| s & (1 << k) != 0).map(|k| vs[k]).collect()
                        };
                        let mut sets = [to_set(sa), to_set(sb), to_set(sc), to_set(sd)];
                        sets.sort();
                        return Ok(Some(BranchSets(sets)));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Deletions of every vertex outside the branch sets (ascending), then
/// contractions of a breadth-first spanning tree of each branch set.
pub fn minor_sequence_to_k4(g: &Graph, b: &BranchSets) -> Result<Vec<MinorOp>> {
    b.validate(g)?;
    let used: BTreeSet<Vertex> = b.sets().iter().flatten().copied().collect();
    let mut ops = Vec::new();
    let mut complex = g.edge_complex();
    for v in g.vertices().filter(|v| !used.contains(v)) {
        ops.push(MinorOp::DeleteVertex(v));
        complex = delete_vertex(&complex, v)?;
    }
    // current label of each original vertex
    let mut label: BTreeMap<Vertex, Vertex> = used.iter().map(|&v| (v, v)).collect();
    for set in b.sets() {
        let root = *set.iter().next().unwrap();
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        let mut tree = Vec::new();
        while let Some(v) = queue.pop_front() {
            for w in g.neighbors(v) {
                if set.contains(&w) && seen.insert(w) {
                    tree.push((v, w));
                    queue.push_back(w);
                }
            }
        }
        for (u, w) in tree {
            let face = Face::from([label[&u], label[&w]]);
            let new_label = fresh_label(&complex);
            let shape = TableShape::binary(complex.ground().len());
            complex = contract_edge_as(&complex, &face, &shape, new_label)?.0;
            for l in label.values_mut() {
                if face.contains(*l) {
                    *l = new_label;
                }
            }
            ops.push(MinorOp::ContractEdge { face, new_label });
        }
    }
    Ok(ops)
}

/// `G` plus the fill edges of its elimination; chordal with clique number at
/// most three.
pub fn chordal_completion_tw2(g: &Graph) -> Result<(Graph, Elimination)> {
    let elim = is_k4_minor_free(g)
        .ok_or_else(|| Error::Precondition("graph has a K4 minor".into()))?;
    let mut h = g.clone();
    for &(a, b) in &elim.fill {
        h.add_edge(a, b)?;
    }
    Ok((h, elim))
}

/// Whether `g` has a perfect elimination ordering.
pub fn is_chordal(g: &Graph) -> bool {
    let mut h = g.clone();
    while h.num_vertices() > 0 {
        let simplicial = h.vertices().find(|&v| {
            let nb: Vec<Vertex> = h.neighbors(v).into_iter().collect();
            nb.iter()
                .enumerate()
                .all(|(i, &a)| nb[i + 1..].iter().all(|&b| h.has_edge(a, b)))
        });
        match simplicial {
            Some(v) => h.remove_vertex(v),
            None => return false,
        }
    }
    true
}

/// Size of the largest clique, by exhaustive search.
pub fn clique_number(g: &Graph) -> usize {
    let (_, adj) = g.index();
    let n = adj.len();
    let mut best = 0;
    fn grow(cand: u64, size: usize, adj: &[u64], best: &mut usize) {
        *best = (*best).max(size);
        let mut rest = cand;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            grow(rest & adj[k], size + 1, adj, best);
        }
    }
    grow(if n == 64 { u64::MAX } else { (1u64 << n) - 1 }, 0, &adj, &mut best);
    best
}

/// A reducible decomposition `(Δ₁, S, Δ₂)` or a leaf.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Decomposition {
    Leaf(SimplicialComplex),
    Split {
        complex: SimplicialComplex,
        separator: Face,
        left: Box<Decomposition>,
        right: Box<Decomposition>,
    },
}

/// One level of splitting.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Split {
    pub left: SimplicialComplex,
    pub separator: Face,
    pub right: SimplicialComplex,
}

impl Split {
    /// `Δ = Δ₁ ∪ Δ₂`, `Δ₁ ∩ Δ₂ = 2^S` and neither side equals `2^S`.
    pub fn is_valid_for(&self, c: &SimplicialComplex) -> bool {
        let simplex: BTreeSet<Face> = self.separator.subsets().into_iter().collect();
        let union_ok = self.left.union(&self.right).faces().eq(c.faces());
        let meet_ok = self.left.common_faces(&self.right) == simplex;
        let proper = |d: &SimplicialComplex| d.faces().cloned().collect::<BTreeSet<_>>() != simplex;
        union_ok && meet_ok && proper(&self.left) && proper(&self.right)
    }
}

fn sub_complex(faces: &[&Face], separator: &Face) -> SimplicialComplex {
    let mut all: BTreeSet<Face> = separator.subsets().into_iter().collect();
    for f in faces {
        all.extend(f.subsets());
    }
    let ground = all.iter().flat_map(|f| f.vertices().iter().copied()).collect();
    SimplicialComplex::from_parts(ground, all)
}

/// First separator face, by increasing cardinality, whose removal splits the
/// facets into at least two groups. The group holding the first facet
/// becomes `Δ₁`; everything else becomes `Δ₂`.
pub fn reducible_decomposition(c: &SimplicialComplex) -> Option<Split> {
    let facets = c.facets();
    for sep in c.faces() {
        let outside: Vec<&Face> = facets.iter().filter(|f| !f.is_subset(sep)).collect();
        if outside.len() < 2 {
            continue;
        }
        // facets are linked when they share a vertex outside the separator
        let mut group = vec![usize::MAX; outside.len()];
        let mut next = 0;
        for start in 0..outside.len() {
            if group[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            group[start] = next;
            while let Some(i) = stack.pop() {
                for j in 0..outside.len() {
                    if group[j] == usize::MAX && !outside[i].minus(sep).intersection(outside[j]).is_empty()
                    {
                        group[j] = next;
                        stack.push(j);
                    }
                }
            }
            next += 1;
        }
        if next < 2 {
            continue;
        }
        let left: Vec<&Face> = (0..outside.len()).filter(|&i| group[i] == 0).map(|i| outside[i]).collect();
        let right: Vec<&Face> = (0..outside.len()).filter(|&i| group[i] != 0).map(|i| outside[i]).collect();
        let split = Split {
            left: sub_complex(&left, sep),
            separator: sep.clone(),
            right: sub_complex(&right, sep),
        };
        debug_assert!(split.is_valid_for(c));
        return Some(split);
    }
    None
}

/// Split recursively until no side is reducible.
pub fn decompose(c: &SimplicialComplex) -> Decomposition {
    match reducible_decomposition(c) {
        None => Decomposition::Leaf(c.clone()),
        Some(split) => Decomposition::Split {
            complex: c.clone(),
            separator: split.separator,
            left: Box::new(decompose(&split.left)),
            right: Box::new(decompose(&split.right)),
        },
    }
}

impl Decomposition {
    pub fn complex(&self) -> &SimplicialComplex {
        match self {
            Decomposition::Leaf(c) => c,
            Decomposition::Split { complex, .. } => complex,
        }
    }

    pub fn leaves(&self) -> Vec<&SimplicialComplex> {
        match self {
            Decomposition::Leaf(c) => vec![c],
            Decomposition::Split { left, right, .. } => {
                let mut out = left.leaves();
                out.extend(right.leaves());
                out
            }
        }
    }

    /// Every internal node is a valid reducible decomposition of its
    /// complex.
    pub fn is_valid(&self) -> bool {
        match self {
            Decomposition::Leaf(_) => true,
            Decomposition::Split {
                complex,
                separator,
                left,
                right,
            } => {
                let split = Split {
                    left: left.complex().clone(),
                    separator: separator.clone(),
                    right: right.complex().clone(),
                };
                split.is_valid_for(complex) && left.is_valid() && right.is_valid()
            }
        }
    }
}

/// Embed a marginal vector of `Γ = op(Δ)` into the face of `C_Δ` cut out by
/// the operation.
///
/// Vertex deletion puts `w` on the slice `i_v = 1`; contraction puts it on
/// the diagonal of the contracted face, reading the fresh vertex's level at
/// every position of the face.
pub fn face_embedding(
    source: &Arc<Model>,
    op: &MinorOp,
    w: &FullMarginalVector,
) -> Result<FullMarginalVector> {
    let target = apply_op(source, op)?;
    if **w.model() != *target {
        return Err(Error::SpaceMismatch);
    }
    let ground = source.complex().ground();
    let mut coords = Vec::with_capacity(source.full_dim());
    for key in source.full_keys() {
        let level = |v: Vertex| key.index[key.face.vertices().binary_search(&v).unwrap()];
        let value = match op {
            MinorOp::DeleteVertex(v) => {
                if !key.face.contains(*v) {
                    w.get(&key.face, &key.index).cloned()
                } else if level(*v) == 1 {
                    let sub = key.face.without(*v);
                    let idx: Vec<u32> = sub.vertices().iter().map(|&u| level(u)).collect();
                    w.get(&sub, &idx).cloned()
                } else {
                    Some(BigRational::zero())
                }
            }
            MinorOp::ContractEdge { face, new_label } => {
                if !key.face.intersects(face) {
                    w.get(&key.face, &key.index).cloned()
                } else {
                    let shared: BTreeSet<u32> = key
                        .face
                        .intersection(face)
                        .vertices()
                        .iter()
                        .map(|&u| level(u))
                        .collect();
                    let l = *shared.iter().next().unwrap();
                    let r_v = target.levels_of(*new_label).unwrap();
                    if shared.len() > 1 || l > r_v {
                        Some(BigRational::zero())
                    } else {
                        let sub = key.face.minus(face).with(*new_label);
                        let idx: Vec<u32> = sub
                            .vertices()
                            .iter()
                            .map(|&u| if u == *new_label { l } else { level(u) })
                            .collect();
                        w.get(&sub, &idx).cloned()
                    }
                }
            }
            MinorOp::DeleteEdge(..) => {
                return Err(Error::input("edge deletion does not define a face embedding"))
            }
        };
        coords.push(value.ok_or_else(|| Error::Internal(format!("missing coordinate for {key:?}")))?);
    }
    debug_assert_eq!(ground.len(), source.shape().len());
    FullMarginalVector::new(source.clone(), coords)
}

/// Coefficients of the hyperplane `c^T p = 0` cutting out the face of `C_Δ`
/// that `op` embeds into, over full coordinates.
pub fn face_hyperplane(source: &Model, op: &MinorOp) -> Result<Vec<i64>> {
    let mut c = vec![0i64; source.full_dim()];
    match op {
        MinorOp::DeleteVertex(v) => {
            let r = source.levels_of(*v).ok_or(Error::UnknownVertex(*v))?;
            let f = Face::from([*v]);
            for j in 2..=r {
                c[source.full_position(&f, &[j]).unwrap()] = 1;
            }
        }
        MinorOp::ContractEdge { face, .. } => {
            if !source.complex().contains(face) {
                return Err(Error::NotAFace(face.clone()));
            }
            for key in source.full_keys().into_iter().filter(|k| &k.face == face) {
                if key.index.iter().any(|&i| i != key.index[0]) {
                    c[source.full_position(face, &key.index).unwrap()] = 1;
                }
            }
        }
        MinorOp::DeleteEdge(..) => {
            return Err(Error::input("edge deletion does not define a face"))
        }
    }
    Ok(c)
}
