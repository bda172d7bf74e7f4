//! Simplicial complexes, table shapes, tables and marginal vectors.
//!
//! A [`Model`] pairs a complex with a table shape and fixes the coordinate
//! layout used everywhere else in the crate: faces are ordered by
//! cardinality and then lexicographically, and indices within a face are
//! ordered lexicographically with the smallest vertex most significant.
//!
//! Two coordinate systems are supported. Full coordinates `p^F_{i_F}` range
//! over every level combination of `F`. Reduced coordinates keep only the
//! indices with every level strictly below the top level `r_f`, plus the
//! scalar `p^∅`. The reduced system is full dimensional for the marginal
//! cone and the full system is recovered by inclusion-exclusion.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Vertex = u32;

/// A set of vertices, kept sorted.
///
/// Faces order by cardinality first and then lexicographically, which is the
/// coordinate order of every marginal vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Face(Vec<Vertex>);

impl Face {
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut vs: Vec<Vertex> = vertices.into_iter().collect();
        vs.sort_unstable();
        vs.dedup();
        Face(vs)
    }

    pub fn empty() -> Self {
        Face(Vec::new())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &Face) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub fn intersects(&self, other: &Face) -> bool {
        self.0.iter().any(|v| other.contains(*v))
    }

    pub fn without(&self, v: Vertex) -> Face {
        Face(self.0.iter().copied().filter(|&w| w != v).collect())
    }

    pub fn with(&self, v: Vertex) -> Face {
        Face::new(self.0.iter().copied().chain(std::iter::once(v)))
    }

    pub fn minus(&self, other: &Face) -> Face {
        Face(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn union(&self, other: &Face) -> Face {
        Face::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn intersection(&self, other: &Face) -> Face {
        Face(self.0.iter().copied().filter(|v| other.contains(*v)).collect())
    }

    /// All subsets, in no particular order.
    pub fn subsets(&self) -> Vec<Face> {
        let k = self.0.len();
        (0u32..(1u32 << k))
            .map(|mask| {
                Face(
                    (0..k)
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| self.0[b])
                        .collect(),
                )
            })
            .collect()
    }
}

impl Ord for Face {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl From<&[Vertex]> for Face {
    fn from(vs: &[Vertex]) -> Self {
        Face::new(vs.iter().copied())
    }
}

impl<const N: usize> From<[Vertex; N]> for Face {
    fn from(vs: [Vertex; N]) -> Self {
        Face::new(vs)
    }
}

/// A downward-closed family of faces over an ordered ground set.
///
/// The empty face is always present.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SimplicialComplex {
    ground: Vec<Vertex>,
    faces: BTreeSet<Face>,
}

impl SimplicialComplex {
    /// Downward closure of `facets` over `ground`. Contained or repeated
    /// facets are absorbed.
    pub fn from_facets<F>(facets: &[F], ground: &[Vertex]) -> Result<Self>
    where
        F: AsRef<[Vertex]>,
    {
        let ground_set: BTreeSet<Vertex> = ground.iter().copied().collect();
        if ground_set.len() != ground.len() {
            return Err(Error::input("ground set lists a vertex twice"));
        }
        let mut faces = BTreeSet::new();
        faces.insert(Face::empty());
        for facet in facets {
            let facet = Face::from(facet.as_ref());
            if let Some(&v) = facet.vertices().iter().find(|v| !ground_set.contains(v)) {
                return Err(Error::UnknownVertex(v));
            }
            if faces.contains(&facet) {
                continue;
            }
            faces.extend(facet.subsets());
        }
        Ok(SimplicialComplex {
            ground: ground_set.into_iter().collect(),
            faces,
        })
    }

    /// The full simplex `2^S` with ground set `S`.
    pub fn simplex(face: &Face) -> Self {
        SimplicialComplex {
            ground: face.vertices().to_vec(),
            faces: face.subsets().into_iter().collect(),
        }
    }

    pub(crate) fn from_parts(ground: BTreeSet<Vertex>, faces: BTreeSet<Face>) -> Self {
        let mut faces = faces;
        faces.insert(Face::empty());
        SimplicialComplex {
            ground: ground.into_iter().collect(),
            faces,
        }
    }

    pub fn ground(&self) -> &[Vertex] {
        &self.ground
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> + '_ {
        self.faces.iter()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.faces.contains(face)
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.ground.binary_search(&v).is_ok()
    }

    /// Inclusion-maximal faces, in coordinate order. The complex `{∅}` has
    /// the single facet `∅`.
    pub fn facets(&self) -> Vec<Face> {
        let faces: Vec<&Face> = self.faces.iter().collect();
        faces
            .iter()
            .enumerate()
            .filter(|(k, f)| {
                !faces[k + 1..]
                    .iter()
                    .any(|g| g.len() > f.len() && f.is_subset(g))
            })
            .map(|(_, f)| (*f).clone())
            .collect()
    }

    /// Vertices that appear in some face.
    pub fn support(&self) -> Face {
        Face::new(self.faces.iter().flat_map(|f| f.vertices().iter().copied()))
    }

    pub fn is_simplex(&self) -> bool {
        let support = self.support();
        self.faces.len() == 1 << support.len() && self.faces.contains(&support)
    }

    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        SimplicialComplex {
            ground: self
                .ground
                .iter()
                .chain(other.ground.iter())
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            faces: self.faces.union(&other.faces).cloned().collect(),
        }
    }

    pub fn common_faces(&self, other: &SimplicialComplex) -> BTreeSet<Face> {
        self.faces.intersection(&other.faces).cloned().collect()
    }

    /// Same faces under a vertex relabelling. Vertices missing from `map`
    /// keep their label.
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> SimplicialComplex {
        let m = |v: &Vertex| *map.get(v).unwrap_or(v);
        SimplicialComplex::from_parts(
            self.ground.iter().map(m).collect(),
            self.faces
                .iter()
                .map(|f| Face::new(f.vertices().iter().map(m)))
                .collect(),
        )
    }
}

/// Number of levels `r_v` of each ground vertex, aligned with the sorted
/// ground set of the complex it is paired with.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TableShape {
    sizes: Vec<u32>,
}

impl TableShape {
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::input("every level count must be at least 1"));
        }
        Ok(TableShape { sizes })
    }

    pub fn binary(n: usize) -> Self {
        TableShape { sizes: vec![2; n] }
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.sizes.iter().all(|&r| r == 2)
    }

    pub fn num_cells(&self) -> usize {
        self.sizes.iter().map(|&r| r as usize).product()
    }

    /// All cells in lexicographic order.
    pub fn cells(&self) -> Vec<CellIndex> {
        let mut out = Vec::with_capacity(self.num_cells());
        let mut cur = vec![1u32; self.sizes.len()];
        loop {
            out.push(CellIndex(cur.clone()));
            let mut k = self.sizes.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < self.sizes[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = 1;
            }
        }
    }
}

/// A cell `(i_1, …, i_n)` with one-based levels, aligned with the ground set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CellIndex(pub Vec<u32>);

impl CellIndex {
    pub fn levels(&self) -> &[u32] {
        &self.0
    }
}

/// A nonnegative integer table, stored sparsely.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Table {
    shape: TableShape,
    counts: BTreeMap<CellIndex, BigUint>,
}

impl Table {
    pub fn zero(shape: TableShape) -> Self {
        Table {
            shape,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_cells<I, C>(shape: TableShape, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (CellIndex, C)>,
        C: Into<BigUint>,
    {
        let mut table = Table::zero(shape);
        for (cell, count) in cells {
            table.add_count(cell, count.into())?;
        }
        Ok(table)
    }

    /// The unit table `e_i`.
    pub fn unit(shape: TableShape, cell: CellIndex) -> Result<Self> {
        Table::from_cells(shape, [(cell, BigUint::one())])
    }

    pub fn add_count(&mut self, cell: CellIndex, count: BigUint) -> Result<()> {
        if cell.0.len() != self.shape.len() {
            return Err(Error::ShapeMismatch {
                expected: self.shape.len(),
                found: cell.0.len(),
            });
        }
        if cell
            .0
            .iter()
            .zip(self.shape.sizes())
            .any(|(&i, &r)| i == 0 || i > r)
        {
            return Err(Error::input(format!("cell {:?} outside the table", cell.0)));
        }
        if count.is_zero() {
            return Ok(());
        }
        *self.counts.entry(cell).or_default() += count;
        Ok(())
    }

    pub fn shape(&self) -> &TableShape {
        &self.shape
    }

    pub fn get(&self, cell: &CellIndex) -> BigUint {
        self.counts.get(cell).cloned().unwrap_or_default()
    }

    /// Nonzero cells in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&CellIndex, &BigUint)> + '_ {
        self.counts.iter()
    }

    pub fn sample_size(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty()
    }
}

impl Add for &Table {
    type Output = Result<Table>;

    fn add(self, rhs: &Table) -> Result<Table> {
        if self.shape != rhs.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.len(),
                found: rhs.shape.len(),
            });
        }
        let mut out = self.clone();
        for (cell, count) in rhs.iter() {
            out.add_count(cell.clone(), count.clone())?;
        }
        Ok(out)
    }
}

/// A coordinate key `(F, i_F)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CoordKey {
    pub face: Face,
    pub index: Vec<u32>,
}

#[derive(Debug)]
struct FaceLayout {
    face: Face,
    positions: Vec<usize>,
    radices: Vec<u32>,
    full_offset: usize,
    full_len: usize,
    reduced_offset: usize,
    reduced_len: usize,
}

/// A complex together with its table shape and the fixed coordinate layout.
#[derive(Debug)]
pub struct Model {
    complex: SimplicialComplex,
    shape: TableShape,
    faces: Vec<FaceLayout>,
    face_lookup: HashMap<Face, usize>,
    full_dim: usize,
    reduced_dim: usize,
    // full coordinate -> signed reduced coordinates summing to it
    expansion: Vec<Vec<(bool, usize)>>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.complex == other.complex && self.shape == other.shape
    }
}

impl Eq for Model {}

impl Model {
    pub fn new(complex: SimplicialComplex, shape: TableShape) -> Result<Arc<Model>> {
        if complex.ground().len() != shape.len() {
            return Err(Error::ShapeMismatch {
                expected: complex.ground().len(),
                found: shape.len(),
            });
        }
        let mut faces = Vec::with_capacity(complex.num_faces());
        let mut face_lookup = HashMap::new();
        let (mut full_dim, mut reduced_dim) = (0, 0);
        for (k, face) in complex.faces().enumerate() {
            let positions: Vec<usize> = face
                .vertices()
                .iter()
                .map(|v| complex.ground().binary_search(v).expect("face within ground"))
                .collect();
            let radices: Vec<u32> = positions.iter().map(|&p| shape.sizes()[p]).collect();
            let full_len = radices.iter().map(|&r| r as usize).product();
            let reduced_len = radices.iter().map(|&r| (r - 1) as usize).product();
            faces.push(FaceLayout {
                face: face.clone(),
                positions,
                radices,
                full_offset: full_dim,
                full_len,
                reduced_offset: reduced_dim,
                reduced_len,
            });
            face_lookup.insert(face.clone(), k);
            full_dim += full_len;
            reduced_dim += reduced_len;
        }
        let mut model = Model {
            complex,
            shape,
            faces,
            face_lookup,
            full_dim,
            reduced_dim,
            expansion: Vec::new(),
        };
        model.expansion = model.build_expansion();
        Ok(Arc::new(model))
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn shape(&self) -> &TableShape {
        &self.shape
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    pub fn reduced_dim(&self) -> usize {
        self.reduced_dim
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> + '_ {
        self.faces.iter().map(|f| &f.face)
    }

    pub fn levels_of(&self, v: Vertex) -> Option<u32> {
        self.complex
            .ground()
            .binary_search(&v)
            .ok()
            .map(|p| self.shape.sizes()[p])
    }

    pub fn is_binary(&self) -> bool {
        self.shape.is_binary()
    }

    /// Position of `face` in the coordinate order.
    pub fn face_position(&self, face: &Face) -> Option<usize> {
        self.face_lookup.get(face).copied()
    }

    pub fn full_keys(&self) -> Vec<CoordKey> {
        self.keys(false)
    }

    pub fn reduced_keys(&self) -> Vec<CoordKey> {
        self.keys(true)
    }

    fn keys(&self, reduced: bool) -> Vec<CoordKey> {
        let mut out = Vec::with_capacity(if reduced { self.reduced_dim } else { self.full_dim });
        for fl in &self.faces {
            let radices: Vec<u32> = fl
                .radices
                .iter()
                .map(|&r| if reduced { r - 1 } else { r })
                .collect();
            for index in mixed_radix(&radices) {
                out.push(CoordKey {
                    face: fl.face.clone(),
                    index,
                });
            }
        }
        out
    }

    /// Offset of `(face, index)` among the full coordinates.
    pub fn full_position(&self, face: &Face, index: &[u32]) -> Option<usize> {
        let fl = &self.faces[self.face_position(face)?];
        encode(index, &fl.radices, false).map(|o| fl.full_offset + o)
    }

    /// Offset of `(face, index)` among the reduced coordinates.
    pub fn reduced_position(&self, face: &Face, index: &[u32]) -> Option<usize> {
        let fl = &self.faces[self.face_position(face)?];
        encode(index, &fl.radices, true).map(|o| fl.reduced_offset + o)
    }

    pub(crate) fn reduced_range(&self, face_pos: usize) -> std::ops::Range<usize> {
        let fl = &self.faces[face_pos];
        fl.reduced_offset..fl.reduced_offset + fl.reduced_len
    }

    /// Full coordinate touched by `cell` on the face at `face_pos`.
    pub(crate) fn cell_coordinate(&self, face_pos: usize, cell: &[u32]) -> usize {
        let fl = &self.faces[face_pos];
        let mut off = 0usize;
        for (&p, &r) in fl.positions.iter().zip(&fl.radices) {
            off = off * r as usize + (cell[p] - 1) as usize;
        }
        fl.full_offset + off
    }

    /// Full coordinates touched by each cell, cells in lexicographic order.
    pub(crate) fn incidence(&self) -> Vec<Vec<usize>> {
        self.shape
            .cells()
            .iter()
            .map(|c| {
                (0..self.faces.len())
                    .map(|k| self.cell_coordinate(k, c.levels()))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn expansion(&self) -> &[Vec<(bool, usize)>] {
        &self.expansion
    }

    /// For every full coordinate `(F, i_F)` with top positions `P`, the
    /// inclusion-exclusion over `T ⊆ P` of the reduced coordinates of
    /// `(F \ P) ∪ T` whose `F \ P` part is fixed to `i_{F \ P}`.
    fn build_expansion(&self) -> Vec<Vec<(bool, usize)>> {
        let mut plan = Vec::with_capacity(self.full_dim);
        for fl in &self.faces {
            for index in mixed_radix(&fl.radices) {
                let top: Vec<usize> = (0..index.len())
                    .filter(|&k| index[k] == fl.radices[k])
                    .collect();
                let mut terms = Vec::new();
                for mask in 0u32..(1u32 << top.len()) {
                    let chosen: Vec<usize> = (0..top.len())
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| top[b])
                        .collect();
                    let positive = chosen.len().is_multiple_of(2);
                    // sub-face keeps the non-top positions plus the chosen ones
                    let kept: Vec<usize> = (0..index.len())
                        .filter(|k| !top.contains(k) || chosen.contains(k))
                        .collect();
                    let sub = Face::new(kept.iter().map(|&k| fl.face.vertices()[k]));
                    let sub_pos = self.face_lookup[&sub];
                    let sub_fl = &self.faces[sub_pos];
                    let free_radices: Vec<u32> =
                        chosen.iter().map(|&k| fl.radices[k] - 1).collect();
                    for free in mixed_radix(&free_radices) {
                        let sub_index: Vec<u32> = kept
                            .iter()
                            .map(|k| match chosen.iter().position(|c| c == k) {
                                Some(j) => free[j],
                                None => index[*k],
                            })
                            .collect();
                        let off = encode(&sub_index, &sub_fl.radices, true)
                            .expect("sub-threshold index");
                        terms.push((positive, sub_fl.reduced_offset + off));
                    }
                }
                plan.push(terms);
            }
        }
        plan
    }

    /// Positions of reduced coordinates inside the full coordinate vector.
    pub(crate) fn reduced_in_full(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.reduced_dim);
        for fl in &self.faces {
            for index in mixed_radix(&fl.radices) {
                if index.iter().zip(&fl.radices).all(|(&i, &r)| i < r) {
                    out.push(fl.full_offset + encode(&index, &fl.radices, false).unwrap());
                }
            }
        }
        out
    }

    /// Restriction of a full coordinate vector to the reduced coordinates.
    pub fn reduce_slice<T: Clone>(&self, full: &[T]) -> Vec<T> {
        self.reduced_in_full()
            .into_iter()
            .map(|k| full[k].clone())
            .collect()
    }

    /// Inverse of [`Model::reduce_slice`] on marginal vectors.
    pub fn expand_slice<T>(&self, reduced: &[T]) -> Vec<T>
    where
        T: Clone + Zero + Add<Output = T> + Sub<Output = T>,
    {
        self.expansion
            .iter()
            .map(|terms| {
                terms.iter().fold(T::zero(), |acc, &(pos, k)| {
                    if pos {
                        acc + reduced[k].clone()
                    } else {
                        acc - reduced[k].clone()
                    }
                })
            })
            .collect()
    }
}

/// All index tuples over the given radices (levels `1..=r`), lexicographic.
pub(crate) fn mixed_radix(radices: &[u32]) -> Vec<Vec<u32>> {
    if radices.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![1u32; radices.len()];
    loop {
        out.push(cur.clone());
        let mut k = radices.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < radices[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = 1;
        }
    }
}

fn encode(index: &[u32], radices: &[u32], reduced: bool) -> Option<usize> {
    if index.len() != radices.len() {
        return None;
    }
    let mut off = 0usize;
    for (&i, &r) in index.iter().zip(radices) {
        let r = if reduced { r - 1 } else { r };
        if i == 0 || i > r {
            return None;
        }
        off = off * r as usize + (i - 1) as usize;
    }
    Some(off)
}

/// Coordinates `p^F_{i_F}` for every face and every full index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FullMarginalVector {
    model: Arc<Model>,
    coords: Vec<BigRational>,
}

/// Coordinates `p^F_{i_F}` restricted to sub-threshold indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReducedMarginalVector {
    model: Arc<Model>,
    coords: Vec<BigRational>,
}

macro_rules! marginal_vector_common {
    ($ty:ident, $dim:ident) => {
        impl $ty {
            pub fn new(model: Arc<Model>, coords: Vec<BigRational>) -> Result<Self> {
                if coords.len() != model.$dim() {
                    return Err(Error::ShapeMismatch {
                        expected: model.$dim(),
                        found: coords.len(),
                    });
                }
                Ok($ty { model, coords })
            }

            pub fn from_integers<I: Into<BigInt>>(
                model: Arc<Model>,
                coords: impl IntoIterator<Item = I>,
            ) -> Result<Self> {
                let coords = coords
                    .into_iter()
                    .map(|c| BigRational::from_integer(c.into()))
                    .collect();
                $ty::new(model, coords)
            }

            pub fn zero(model: Arc<Model>) -> Self {
                let coords = vec![BigRational::zero(); model.$dim()];
                $ty { model, coords }
            }

            pub fn model(&self) -> &Arc<Model> {
                &self.model
            }

            pub fn coords(&self) -> &[BigRational] {
                &self.coords
            }

            pub fn is_zero(&self) -> bool {
                self.coords.iter().all(Zero::is_zero)
            }

            pub fn is_integral(&self) -> bool {
                self.coords.iter().all(|c| c.is_integer())
            }

            /// Sample size, the `p^∅` coordinate.
            pub fn sample_size(&self) -> &BigRational {
                &self.coords[0]
            }

            pub fn to_integers(&self) -> Result<Vec<BigInt>> {
                self.coords
                    .iter()
                    .map(|c| {
                        if c.is_integer() {
                            Ok(c.to_integer())
                        } else {
                            Err(Error::NonIntegral)
                        }
                    })
                    .collect()
            }

            /// Machine-word coordinates for the search routines.
            pub(crate) fn to_i64(&self) -> Result<Vec<i64>> {
                self.to_integers()?
                    .iter()
                    .map(|c| {
                        c.to_i64()
                            .ok_or_else(|| Error::input("coordinate exceeds 64-bit range"))
                    })
                    .collect()
            }

            pub fn checked_add(&self, other: &$ty) -> Result<$ty> {
                if self.model != other.model {
                    return Err(Error::SpaceMismatch);
                }
                Ok($ty {
                    model: self.model.clone(),
                    coords: self
                        .coords
                        .iter()
                        .zip(&other.coords)
                        .map(|(a, b)| a + b)
                        .collect(),
                })
            }
        }
    };
}

marginal_vector_common!(FullMarginalVector, full_dim);
marginal_vector_common!(ReducedMarginalVector, reduced_dim);

impl FullMarginalVector {
    pub fn get(&self, face: &Face, index: &[u32]) -> Option<&BigRational> {
        self.model
            .full_position(face, index)
            .map(|k| &self.coords[k])
    }

    /// Whether summing each face's coordinates over one position reproduces
    /// the coordinates of the sub-face, and every coordinate is nonnegative.
    pub fn is_consistent(&self) -> bool {
        if self.coords.iter().any(|c| c.is_negative()) {
            return false;
        }
        consistent_under_summation(&self.model, &self.coords)
    }
}

pub(crate) fn consistent_under_summation<T>(model: &Model, coords: &[T]) -> bool
where
    T: Clone + Zero + Add<Output = T> + PartialEq,
{
    for fl in &model.faces {
        for drop in 0..fl.face.len() {
            let sub = fl.face.without(fl.face.vertices()[drop]);
            let sub_fl = &model.faces[model.face_lookup[&sub]];
            let mut sums = vec![T::zero(); sub_fl.full_len];
            for (k, index) in mixed_radix(&fl.radices).into_iter().enumerate() {
                let mut sub_index = index;
                sub_index.remove(drop);
                let o = encode(&sub_index, &sub_fl.radices, false).unwrap();
                sums[o] = sums[o].clone() + coords[fl.full_offset + k].clone();
            }
            if sums
                .iter()
                .zip(&coords[sub_fl.full_offset..sub_fl.full_offset + sub_fl.full_len])
                .any(|(a, b)| a != b)
            {
                return false;
            }
        }
    }
    true
}

impl ReducedMarginalVector {
    pub fn get(&self, face: &Face, index: &[u32]) -> Option<&BigRational> {
        self.model
            .reduced_position(face, index)
            .map(|k| &self.coords[k])
    }

    pub fn dot(&self, coeffs: &[BigRational]) -> Result<BigRational> {
        if coeffs.len() != self.coords.len() {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .coords
            .iter()
            .zip(coeffs)
            .fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
    }
}

/// Subset sums `q^S = Σ_{i_S ∈ R_S} p^S_{i_S}` over the subsets of a face.
#[derive(Clone, Debug)]
pub struct SubsetSums {
    face: Face,
    values: BTreeMap<Face, BigRational>,
}

impl SubsetSums {
    pub fn new(v: &ReducedMarginalVector, face: &Face) -> Result<Self> {
        let model = v.model();
        if model.face_position(face).is_none() {
            return Err(Error::NotAFace(face.clone()));
        }
        let values = face
            .subsets()
            .into_iter()
            .map(|s| {
                let pos = model.face_position(&s).expect("downward closed");
                let q = v.coords[model.reduced_range(pos)]
                    .iter()
                    .fold(BigRational::zero(), |acc, c| acc + c);
                (s, q)
            })
            .collect();
        Ok(SubsetSums {
            face: face.clone(),
            values,
        })
    }

    pub fn get(&self, s: &Face) -> Option<&BigRational> {
        self.values.get(s)
    }

    /// `p^F_{r_F} = Σ_{S ⊆ F} (-1)^{#S} q^S`, the all-top coordinate of the
    /// face.
    pub fn top_coordinate(&self) -> BigRational {
        self.values.iter().fold(BigRational::zero(), |acc, (s, q)| {
            if s.len() % 2 == 0 {
                acc + q
            } else {
                acc - q
            }
        })
    }

    pub fn face(&self) -> &Face {
        &self.face
    }
}

/// Closure of `facets` over `ground`.
pub fn build_complex<F: AsRef<[Vertex]>>(facets: &[F], ground: &[Vertex]) -> Result<SimplicialComplex> {
    SimplicialComplex::from_facets(facets, ground)
}

/// The marginal map `π_Δ` applied to a table.
pub fn marginalize(table: &Table, model: &Arc<Model>) -> Result<FullMarginalVector> {
    if table.shape() != model.shape() {
        return Err(Error::ShapeMismatch {
            expected: model.shape().len(),
            found: table.shape().len(),
        });
    }
    let mut coords = vec![BigInt::zero(); model.full_dim()];
    for (cell, count) in table.iter() {
        let count = BigInt::from(count.clone());
        for k in 0..model.faces.len() {
            coords[model.cell_coordinate(k, cell.levels())] += &count;
        }
    }
    FullMarginalVector::from_integers(model.clone(), coords)
}

/// `π_Δ(e_i)` for every cell `i`, in lexicographic cell order.
pub fn generators(model: &Arc<Model>) -> Vec<FullMarginalVector> {
    model
        .incidence()
        .into_iter()
        .map(|touched| {
            let mut coords = vec![BigRational::zero(); model.full_dim()];
            for k in touched {
                coords[k] = BigRational::one();
            }
            FullMarginalVector {
                model: model.clone(),
                coords,
            }
        })
        .collect()
}

pub fn reduce_coords(v: &FullMarginalVector) -> ReducedMarginalVector {
    ReducedMarginalVector {
        model: v.model.clone(),
        coords: v.model.reduce_slice(&v.coords),
    }
}

pub fn expand_coords(v: &ReducedMarginalVector) -> FullMarginalVector {
    FullMarginalVector {
        model: v.model.clone(),
        coords: v.model.expand_slice(&v.coords),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SimplicialComplex {
        build_complex(&[[1, 2], [1, 3], [2, 3]], &[1, 2, 3]).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn closure_of_triangle() {
        let c = triangle();
        assert_eq!(c.num_faces(), 7);
        assert!(c.contains(&Face::empty()));
        assert_eq!(c.facets(), vec![Face::from([1, 2]), Face::from([1, 3]), Face::from([2, 3])]);
    }

    #[test]
    fn empty_facet_list() {
        let c = build_complex::<[u32; 0]>(&[], &[1]).unwrap();
        assert_eq!(c.faces().cloned().collect::<Vec<_>>(), vec![Face::empty()]);
    }

    #[test]
    fn contained_facets_are_absorbed() {
        let a = build_complex(&[vec![1, 2], vec![2]], &[1, 2]).unwrap();
        let b = build_complex(&[vec![1, 2]], &[1, 2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_vertex_is_rejected() {
        assert!(matches!(
            build_complex(&[[1, 4]], &[1, 2]),
            Err(Error::UnknownVertex(4))
        ));
    }

    #[test]
    fn face_order_is_cardinality_then_lex() {
        let mut fs = vec![Face::from([2, 3]), Face::from([4]), Face::empty(), Face::from([1, 3])];
        fs.sort();
        assert_eq!(
            fs,
            vec![Face::empty(), Face::from([4]), Face::from([1, 3]), Face::from([2, 3])]
        );
    }

    #[test]
    fn zero_table_marginal() {
        let m = Model::new(triangle(), TableShape::binary(3)).unwrap();
        let v = marginalize(&Table::zero(TableShape::binary(3)), &m).unwrap();
        assert!(v.is_zero());
        assert_eq!(v.coords().len(), 1 + 6 + 12);
    }

    #[test]
    fn diagonal_two_by_two() {
        let c = build_complex(&[[1, 2]], &[1, 2]).unwrap();
        let shape = TableShape::binary(2);
        let m = Model::new(c, shape.clone()).unwrap();
        let t = Table::from_cells(
            shape,
            [
                (CellIndex(vec![1, 1]), BigUint::one()),
                (CellIndex(vec![2, 2]), BigUint::one()),
            ],
        )
        .unwrap();
        let v = marginalize(&t, &m).unwrap();
        let ints: Vec<i64> = v.to_i64().unwrap();
        // ∅ | 1: (1,1) | 2: (1,1) | 12: identity
        assert_eq!(ints, vec![2, 1, 1, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn unit_table_is_generator() {
        let m = Model::new(triangle(), TableShape::new(vec![2, 3, 2]).unwrap()).unwrap();
        let cells = m.shape().cells();
        let gens = generators(&m);
        assert_eq!(gens.len(), 12);
        for (cell, g) in cells.iter().zip(&gens) {
            let t = Table::unit(m.shape().clone(), cell.clone()).unwrap();
            assert_eq!(&marginalize(&t, &m).unwrap(), g);
        }
    }

    #[test]
    fn generator_counts() {
        let single = build_complex(&[[1]], &[1]).unwrap();
        assert_eq!(generators(&Model::new(single, TableShape::binary(1)).unwrap()).len(), 2);
        let k3 = Model::new(triangle(), TableShape::binary(3)).unwrap();
        assert_eq!(generators(&k3).len(), 8);
    }

    #[test]
    fn reduced_dimension_of_binary_triangle() {
        let m = Model::new(triangle(), TableShape::binary(3)).unwrap();
        assert_eq!(m.reduced_dim(), 7);
        let g = &generators(&m)[0];
        assert_eq!(g.model().shape().cells()[0], CellIndex(vec![1, 1, 1]));
        assert!(reduce_coords(g).coords().iter().all(|c| c == &q(1)));
        assert!(reduce_coords(&FullMarginalVector::zero(m.clone())).is_zero());
    }

    #[test]
    fn top_coordinate_of_binary_edge() {
        // p^{12}_{22} = p^∅ − p^1_1 − p^2_1 + p^{12}_{11}
        let c = build_complex(&[[1, 2]], &[1, 2]).unwrap();
        let m = Model::new(c, TableShape::binary(2)).unwrap();
        let r = ReducedMarginalVector::from_integers(m.clone(), [10, 4, 7, 3]).unwrap();
        let full = expand_coords(&r);
        assert_eq!(full.get(&Face::from([1, 2]), &[2, 2]).unwrap(), &q(10 - 4 - 7 + 3));
        let sums = SubsetSums::new(&r, &Face::from([1, 2])).unwrap();
        assert_eq!(sums.top_coordinate(), q(2));
        assert!(expand_coords(&ReducedMarginalVector::zero(m)).is_zero());
    }

    #[test]
    fn mixed_index_expansion() {
        // shape 3 x 2 on one edge; p^{12}_{(2,2)} = p^1_2 − p^{12}_{(2,1)}
        let c = build_complex(&[[1, 2]], &[1, 2]).unwrap();
        let shape = TableShape::new(vec![3, 2]).unwrap();
        let m = Model::new(c, shape.clone()).unwrap();
        let cells = shape.cells();
        let t = Table::from_cells(
            shape,
            cells
                .iter()
                .enumerate()
                .map(|(k, c)| (c.clone(), BigUint::from(k as u32 + 1))),
        )
        .unwrap();
        let v = marginalize(&t, &m).unwrap();
        assert_eq!(expand_coords(&reduce_coords(&v)), v);
        assert!(v.is_consistent());
    }
}
