//! Multiple chessboard complexes, their symmetrizations, and the generic
//! simplicial-complex carrier used by the rest of the crate.
//!
//! A simplex of a chessboard-type complex is a rook placement on an `m x n`
//! board: a set of cells `(column, row)` with at most `k_i` rooks in row `i`
//! and at most `p_j` rooks in column `j`. The symmetrized complex is the union
//! of the complexes obtained by permuting the row-cap vector.

use std::collections::{BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("cell ({col}, {row}) lies outside the {m} x {n} board")]
    CellOutOfRange { col: u32, row: u32, m: usize, n: usize },
    #[error("board dimensions must be positive (got m = {m}, n = {n})")]
    EmptyBoard { m: usize, n: usize },
    #[error("row cap vector has length {got}, expected n = {expected}")]
    RowCapLength { got: usize, expected: usize },
    #[error("column cap vector has length {got}, expected m = {expected}")]
    ColCapLength { got: usize, expected: usize },
    #[error("symmetrized complexes are only supported with all column caps equal to 1")]
    SymmetrizedColCaps,
    #[error("operation requires a symmetrized spec")]
    NotSymmetrized,
    #[error("blocks {first} and {second} of a labeled partition intersect")]
    OverlappingBlocks { first: usize, second: usize },
    #[error("facet count bound {bound} exceeds the enumeration limit {limit}")]
    EnumerationLimit { bound: u128, limit: u64 },
    #[error("vertex index {vertex} out of range for a complex on {vertex_count} vertices")]
    VertexOutOfRange { vertex: u32, vertex_count: usize },
    #[error("family has {family} complexes but the partition has {blocks} blocks")]
    FamilySizeMismatch { family: usize, blocks: usize },
    #[error("family members live on different vertex sets ({0} vs {1})")]
    FamilyVertexMismatch(usize, usize),
    #[error("block element {element} is outside [1, {m}]")]
    BlockElementOutOfRange { element: u32, m: usize },
    #[error("complex JSON is malformed: {0}")]
    MalformedJson(String),
}

/// One square of the chessboard, with 1-based column and row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub col: u32,
    pub row: u32,
}

impl Cell {
    pub fn new(col: u32, row: u32) -> Self {
        Cell { col, row }
    }

    /// Global vertex index of the cell on an `m x n` board:
    /// `(col - 1) * n + (row - 1)`.
    pub fn vertex_index(&self, n: usize) -> u32 {
        (self.col - 1) * n as u32 + (self.row - 1)
    }

    pub fn from_vertex_index(v: u32, n: usize) -> Self {
        Cell { col: v / n as u32 + 1, row: v % n as u32 + 1 }
    }
}

/// A set of board cells; encodes a simplex of a chessboard-type complex.
///
/// The dimension is `|cells| - 1`; the empty placement is the empty simplex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RookPlacement {
    cells: BTreeSet<Cell>,
}

impl RookPlacement {
    pub fn new<I: IntoIterator<Item = Cell>>(cells: I) -> Self {
        RookPlacement { cells: cells.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dimension(&self) -> isize {
        self.cells.len() as isize - 1
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.cells.contains(cell)
    }

    /// Sorted vertex indices of the cells on a board with `n` rows.
    /// `Cell` ordering agrees with the global vertex order, so the set
    /// iterates in index order already.
    pub fn vertex_list(&self, n: usize) -> Vec<u32> {
        self.cells.iter().map(|c| c.vertex_index(n)).collect()
    }

    pub fn from_vertex_list(verts: &[u32], n: usize) -> Self {
        RookPlacement::new(verts.iter().map(|&v| Cell::from_vertex_index(v, n)))
    }
}

/// Parameters of a multiple chessboard complex or its symmetrization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexSpec {
    m: usize,
    n: usize,
    row_caps: Vec<usize>,
    col_caps: Vec<usize>,
    symmetrized: bool,
}

impl ComplexSpec {
    /// A plain multiple chessboard complex with row caps `k` and column caps `p`.
    pub fn new(
        m: usize,
        n: usize,
        row_caps: Vec<usize>,
        col_caps: Vec<usize>,
    ) -> Result<Self, ComplexError> {
        if m == 0 || n == 0 {
            return Err(ComplexError::EmptyBoard { m, n });
        }
        if row_caps.len() != n {
            return Err(ComplexError::RowCapLength { got: row_caps.len(), expected: n });
        }
        if col_caps.len() != m {
            return Err(ComplexError::ColCapLength { got: col_caps.len(), expected: m });
        }
        Ok(ComplexSpec { m, n, row_caps, col_caps, symmetrized: false })
    }

    /// A chessboard complex with all column caps 1.
    pub fn with_unit_col_caps(m: usize, n: usize, row_caps: Vec<usize>) -> Result<Self, ComplexError> {
        Self::new(m, n, row_caps, vec![1; m])
    }

    /// The symmetrization of `Delta_{m,n}^{k;1}` over the full symmetric group
    /// on rows. Only column caps all equal to 1 are supported.
    pub fn symmetrized(m: usize, n: usize, row_caps: Vec<usize>) -> Result<Self, ComplexError> {
        let mut spec = Self::with_unit_col_caps(m, n, row_caps)?;
        spec.symmetrized = true;
        Ok(spec)
    }

    /// The complex `Sigma_{m,n}^{nu+1,...,nu+1,nu,...,nu;1}` with `s` rows of
    /// cap `nu + 1` and `n - s` rows of cap `nu`.
    pub fn sigma(m: usize, n: usize, nu: usize, s: usize) -> Result<Self, ComplexError> {
        let mut caps = vec![nu + 1; s];
        caps.resize(n, nu);
        if s > n {
            return Err(ComplexError::RowCapLength { got: s, expected: n });
        }
        Self::symmetrized(m, n, caps)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_caps(&self) -> &[usize] {
        &self.row_caps
    }

    pub fn col_caps(&self) -> &[usize] {
        &self.col_caps
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn cap_sum(&self) -> usize {
        self.row_caps.iter().sum()
    }

    /// The working hypothesis `m >= k_1 + ... + k_n + n - 1` under which the
    /// shellability and connectivity statements apply.
    pub fn working_hypothesis(&self) -> bool {
        self.m + 1 >= self.cap_sum() + self.n
    }

    /// Splits the row caps into `(nu, s)` when they form the multiset
    /// `(nu+1)^s nu^(n-s)`. All caps equal `c` is read as `nu = c`, `s = 0`.
    pub fn balanced_form(&self) -> Option<(usize, usize)> {
        balanced_caps(&self.row_caps)
    }

    fn check_on_board(&self, placement: &RookPlacement) -> Result<(), ComplexError> {
        for cell in placement.cells() {
            if cell.col < 1
                || cell.col as usize > self.m
                || cell.row < 1
                || cell.row as usize > self.n
            {
                return Err(ComplexError::CellOutOfRange {
                    col: cell.col,
                    row: cell.row,
                    m: self.m,
                    n: self.n,
                });
            }
        }
        Ok(())
    }

    fn occupancies(&self, placement: &RookPlacement) -> (Vec<usize>, Vec<usize>) {
        let mut rows = vec![0usize; self.n];
        let mut cols = vec![0usize; self.m];
        for cell in placement.cells() {
            rows[cell.row as usize - 1] += 1;
            cols[cell.col as usize - 1] += 1;
        }
        (rows, cols)
    }
}

/// Membership test for a placement in the complex described by `spec`.
///
/// For a symmetrized spec the row caps may be permuted arbitrarily; the
/// existence of a suitable permutation is decided by comparing the sorted
/// row-occupancy vector against the sorted cap vector componentwise.
pub fn is_simplex(spec: &ComplexSpec, placement: &RookPlacement) -> Result<bool, ComplexError> {
    spec.check_on_board(placement)?;
    let (rows, cols) = spec.occupancies(placement);
    if spec.symmetrized {
        if cols.iter().any(|&c| c > 1) {
            return Ok(false);
        }
        let mut occ = rows;
        let mut caps = spec.row_caps.clone();
        occ.sort_unstable_by(|a, b| b.cmp(a));
        caps.sort_unstable_by(|a, b| b.cmp(a));
        Ok(occ.iter().zip(caps.iter()).all(|(o, k)| o <= k))
    } else {
        let rows_ok = rows.iter().zip(spec.row_caps.iter()).all(|(o, k)| o <= k);
        let cols_ok = cols.iter().zip(spec.col_caps.iter()).all(|(o, p)| o <= p);
        Ok(rows_ok && cols_ok)
    }
}

/// An ordered tuple `(A_1, ..., A_n)` of pairwise disjoint subsets of `[m]`,
/// written with 1-based elements. Blocks may be empty and need not cover `[m]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledPartition {
    blocks: Vec<BTreeSet<u32>>,
}

impl LabeledPartition {
    pub fn new(blocks: Vec<BTreeSet<u32>>) -> Result<Self, ComplexError> {
        let mut seen: HashMap<u32, usize> = HashMap::new();
        for (i, block) in blocks.iter().enumerate() {
            for &x in block {
                if let Some(&first) = seen.get(&x) {
                    return Err(ComplexError::OverlappingBlocks { first, second: i });
                }
                seen.insert(x, i);
            }
        }
        Ok(LabeledPartition { blocks })
    }

    pub fn from_slices(blocks: &[&[u32]]) -> Result<Self, ComplexError> {
        Self::new(blocks.iter().map(|b| b.iter().copied().collect()).collect())
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[BTreeSet<u32>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    pub fn total_len(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn max_element(&self) -> Option<u32> {
        self.blocks.iter().filter_map(|b| b.iter().max()).max().copied()
    }

    /// Rook placement with a cell `(x, i)` for each `x` in block `A_i`.
    pub fn to_placement(&self) -> RookPlacement {
        RookPlacement::new(self.blocks.iter().enumerate().flat_map(|(i, block)| {
            block.iter().map(move |&x| Cell::new(x, i as u32 + 1))
        }))
    }

    pub fn from_placement(placement: &RookPlacement, n: usize) -> Self {
        let mut blocks = vec![BTreeSet::new(); n];
        for cell in placement.cells() {
            blocks[cell.row as usize - 1].insert(cell.col);
        }
        LabeledPartition { blocks }
    }

    /// Blocks converted to 0-based vertex lists, for membership tests against
    /// complexes on `[m]`.
    pub fn block_vertex_sets(&self) -> Vec<Vec<u32>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&x| x - 1).collect())
            .collect()
    }
}

/// Concrete carrier for all complexes: a vertex count, the list of facets as
/// sorted vertex-index lists, and an optional board shape that labels vertices
/// by cells.
///
/// The void complex (no faces at all) has an empty facet list; the complex
/// whose only face is the empty simplex has the single facet `[]`. The two are
/// distinguished throughout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    facets: Vec<Vec<u32>>,
    board: Option<BoardShape>,
}

/// Board dimensions used to translate vertex indices back into cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoardShape {
    pub m: usize,
    pub n: usize,
}

impl SimplicialComplex {
    /// Builds a complex from generating faces. Faces are sorted, deduplicated,
    /// and faces contained in other faces are dropped, so the stored facet
    /// list is inclusion-maximal. Facets are kept in lexicographic order.
    pub fn from_facets(
        vertex_count: usize,
        faces: Vec<Vec<u32>>,
    ) -> Result<Self, ComplexError> {
        let mut sorted: Vec<Vec<u32>> = Vec::with_capacity(faces.len());
        for mut f in faces {
            f.sort_unstable();
            f.dedup();
            if let Some(&v) = f.last() {
                if v as usize >= vertex_count {
                    return Err(ComplexError::VertexOutOfRange { vertex: v, vertex_count });
                }
            }
            sorted.push(f);
        }
        sorted.sort();
        sorted.dedup();
        // Drop any face contained in another; sorting by length makes each
        // face only need checking against longer ones.
        let mut maximal: Vec<Vec<u32>> = Vec::with_capacity(sorted.len());
        for f in &sorted {
            let contained = sorted
                .iter()
                .any(|g| g.len() > f.len() && is_sorted_subset(f, g));
            if !contained {
                maximal.push(f.clone());
            }
        }
        maximal.sort();
        Ok(SimplicialComplex { vertex_count, facets: maximal, board: None })
    }

    pub fn with_board(mut self, board: BoardShape) -> Self {
        self.board = Some(board);
        self
    }

    /// The complex with no faces at all.
    pub fn void(vertex_count: usize) -> Self {
        SimplicialComplex { vertex_count, facets: Vec::new(), board: None }
    }

    /// The complex whose only face is the empty simplex.
    pub fn empty_simplex_only(vertex_count: usize) -> Self {
        SimplicialComplex { vertex_count, facets: vec![Vec::new()], board: None }
    }

    /// The `dim`-skeleton of the full simplex on `m` vertices (`dim >= -1`;
    /// `dim = -1` gives the empty-simplex-only complex).
    pub fn skeleton_of_simplex(m: usize, dim: isize) -> Self {
        if dim < -1 {
            return Self::void(m);
        }
        let size = ((dim + 1) as usize).min(m);
        let facets: Vec<Vec<u32>> = (0..m as u32).combinations(size).collect();
        SimplicialComplex { vertex_count: m, facets, board: None }
    }

    pub fn full_simplex(m: usize) -> Self {
        Self::skeleton_of_simplex(m, m as isize - 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn facets(&self) -> &[Vec<u32>] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn board(&self) -> Option<BoardShape> {
        self.board
    }

    pub fn is_void(&self) -> bool {
        self.facets.is_empty()
    }

    /// Dimension of the complex; `None` for the void complex and `Some(-1)`
    /// for the empty-simplex-only complex.
    pub fn dimension(&self) -> Option<isize> {
        self.facets.iter().map(|f| f.len() as isize - 1).max()
    }

    pub fn is_pure(&self) -> bool {
        match self.facets.first() {
            None => true,
            Some(f) => self.facets.iter().all(|g| g.len() == f.len()),
        }
    }

    /// Face membership against the downward closure of the facets. The empty
    /// face belongs to every nonvoid complex.
    pub fn contains_face(&self, face: &[u32]) -> bool {
        debug_assert!(face.windows(2).all(|w| w[0] < w[1]));
        if face.is_empty() {
            return !self.facets.is_empty();
        }
        self.facets.iter().any(|f| is_sorted_subset(face, f))
    }

    /// Whether every face of `self` is a face of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.facets.iter().all(|f| other.contains_face(f))
    }

    /// All faces, grouped by dimension (index `i` holds the `i`-dimensional
    /// faces in lexicographic order). The empty simplex is not listed.
    pub fn faces_by_dimension(&self) -> Vec<Vec<Vec<u32>>> {
        let dim = match self.dimension() {
            Some(d) if d >= 0 => d as usize,
            _ => return Vec::new(),
        };
        let mut by_dim: Vec<HashSet<Vec<u32>>> = vec![HashSet::new(); dim + 1];
        for f in &self.facets {
            if !f.is_empty() {
                by_dim[f.len() - 1].insert(f.clone());
            }
        }
        for d in (1..=dim).rev() {
            let lower: Vec<Vec<u32>> = by_dim[d]
                .iter()
                .flat_map(|f| {
                    (0..f.len()).map(move |skip| {
                        f.iter()
                            .enumerate()
                            .filter(|(i, _)| *i != skip)
                            .map(|(_, &v)| v)
                            .collect::<Vec<u32>>()
                    })
                })
                .collect();
            by_dim[d - 1].extend(lower);
        }
        by_dim
            .into_iter()
            .map(|set| {
                let mut faces: Vec<Vec<u32>> = set.into_iter().collect();
                faces.sort();
                faces
            })
            .collect()
    }
}

/// Splits a cap multiset of the form `(nu+1)^s nu^(n-s)` into `(nu, s)`.
pub fn balanced_caps(caps: &[usize]) -> Option<(usize, usize)> {
    let hi = *caps.iter().max()?;
    let lo = *caps.iter().min()?;
    if hi == lo {
        Some((lo, 0))
    } else if hi == lo + 1 {
        Some((lo, caps.iter().filter(|&&c| c == hi).count()))
    } else {
        None
    }
}

pub(crate) fn is_sorted_subset(small: &[u32], big: &[u32]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut it = big.iter();
    'outer: for x in small {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Face counts by dimension: `counts[i]` is the number of `i`-dimensional faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FVector {
    counts: Vec<u64>,
}

impl FVector {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Alternating sum of the face counts (unreduced Euler characteristic).
    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// Face counts computed by downward closure from the facets, with deduplication.
pub fn f_vector(complex: &SimplicialComplex) -> FVector {
    let counts = complex
        .faces_by_dimension()
        .iter()
        .map(|faces| faces.len() as u64)
        .collect();
    FVector { counts }
}

/// Ordered, non-symmetrized deleted-join membership: `A_i` must be a face of
/// `K_i` for every `i`.
pub fn deleted_join_membership(
    family: &[SimplicialComplex],
    a: &LabeledPartition,
) -> Result<bool, ComplexError> {
    if family.len() != a.n_blocks() {
        return Err(ComplexError::FamilySizeMismatch {
            family: family.len(),
            blocks: a.n_blocks(),
        });
    }
    check_family_and_blocks(family, a)?;
    Ok(family
        .iter()
        .zip(a.block_vertex_sets())
        .all(|(k, block)| k.contains_face(&block)))
}

pub(crate) fn check_family_and_blocks(
    family: &[SimplicialComplex],
    a: &LabeledPartition,
) -> Result<(), ComplexError> {
    let m = match family.first() {
        Some(k) => k.vertex_count(),
        None => return Ok(()),
    };
    for k in family {
        if k.vertex_count() != m {
            return Err(ComplexError::FamilyVertexMismatch(m, k.vertex_count()));
        }
    }
    for block in a.blocks() {
        for &x in block {
            if x < 1 || x as usize > m {
                return Err(ComplexError::BlockElementOutOfRange { element: x, m });
            }
        }
    }
    Ok(())
}

pub const DEFAULT_FACET_LIMIT: u64 = 10_000_000;

/// Enumerates all facets (maximal admissible placements) of the complex.
///
/// Facets are emitted in the canonical order: descending lexicographic on the
/// row-size vector, then ascending lexicographic on the vertex list.
pub fn enumerate_facets(spec: &ComplexSpec) -> Result<SimplicialComplex, ComplexError> {
    enumerate_facets_with_limit(spec, DEFAULT_FACET_LIMIT)
}

pub fn enumerate_facets_with_limit(
    spec: &ComplexSpec,
    limit: u64,
) -> Result<SimplicialComplex, ComplexError> {
    let bound = facet_count_bound(spec);
    if bound > limit as u128 {
        return Err(ComplexError::EnumerationLimit { bound, limit });
    }
    let mut facets: Vec<Vec<u32>> = if spec.col_caps.iter().all(|&p| p == 1) {
        let cap_vectors = cap_vectors(spec);
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut out = Vec::new();
        for caps in &cap_vectors {
            for placement in unit_col_facets(spec.m, caps) {
                let verts = placement_vertices(&placement, spec.n);
                if seen.insert(verts.clone()) {
                    out.push(verts);
                }
            }
        }
        out
    } else {
        general_facets(spec)
    };
    sort_canonical(&mut facets, spec.n);
    Ok(SimplicialComplex {
        vertex_count: spec.m * spec.n,
        facets,
        board: Some(BoardShape { m: spec.m, n: spec.n }),
    })
}

/// Streams the facets of a symmetrized complex in `LabeledPartition` form,
/// in the same canonical order as `enumerate_facets`.
pub fn symmetrized_complex_as_labeled(
    spec: &ComplexSpec,
) -> Result<impl Iterator<Item = LabeledPartition>, ComplexError> {
    if !spec.symmetrized {
        return Err(ComplexError::NotSymmetrized);
    }
    let n = spec.n;
    let complex = enumerate_facets(spec)?;
    let facets: Vec<Vec<u32>> = complex.facets.clone();
    Ok(facets.into_iter().map(move |verts| {
        LabeledPartition::from_placement(&RookPlacement::from_vertex_list(&verts, n), n)
    }))
}

/// Converts enumerated facets into labeled partitions, preserving order.
pub fn facets_as_partitions(complex: &SimplicialComplex) -> Vec<LabeledPartition> {
    let n = complex
        .board
        .expect("facets_as_partitions requires a board-labeled complex")
        .n;
    complex
        .facets
        .iter()
        .map(|verts| {
            LabeledPartition::from_placement(&RookPlacement::from_vertex_list(verts, n), n)
        })
        .collect()
}

fn placement_vertices(blocks: &[Vec<u32>], n: usize) -> Vec<u32> {
    let mut verts: Vec<u32> = blocks
        .iter()
        .enumerate()
        .flat_map(|(i, block)| {
            block
                .iter()
                .map(move |&x| Cell::new(x, i as u32 + 1).vertex_index(n))
        })
        .collect();
    verts.sort_unstable();
    verts
}

/// Row-size vector of a facet given as a vertex list.
fn size_vector(verts: &[u32], n: usize) -> Vec<usize> {
    let mut sizes = vec![0usize; n];
    for &v in verts {
        sizes[(v as usize) % n] += 1;
    }
    sizes
}

fn sort_canonical(facets: &mut [Vec<u32>], n: usize) {
    facets.sort_by(|a, b| {
        let sa = size_vector(a, n);
        let sb = size_vector(b, n);
        sb.cmp(&sa).then_with(|| a.cmp(b))
    });
}

/// Distinct row-cap vectors contributing to the complex: the single cap vector
/// for a plain spec, all distinct permutations for a symmetrized one.
fn cap_vectors(spec: &ComplexSpec) -> Vec<Vec<usize>> {
    if !spec.symmetrized {
        return vec![spec.row_caps.clone()];
    }
    let set: BTreeSet<Vec<usize>> = spec
        .row_caps
        .iter()
        .copied()
        .permutations(spec.n)
        .collect();
    set.into_iter().collect()
}

/// Facets of `Delta_{m,n}^{caps;1}`: with all column caps 1, a placement is
/// maximal iff either every row is at its cap or every column carries a rook.
fn unit_col_facets(m: usize, caps: &[usize]) -> Vec<Vec<Vec<u32>>> {
    let total: usize = caps.iter().sum();
    if m >= total {
        let mut out = Vec::new();
        let columns: Vec<u32> = (1..=m as u32).collect();
        full_rows_rec(&columns, caps, 0, &mut Vec::new(), &mut out);
        out
    } else {
        let mut out = Vec::new();
        let mut blocks = vec![Vec::new(); caps.len()];
        all_columns_rec(m, caps, 1, &mut blocks, &mut out);
        out
    }
}

fn full_rows_rec(
    available: &[u32],
    caps: &[usize],
    row: usize,
    acc: &mut Vec<Vec<u32>>,
    out: &mut Vec<Vec<Vec<u32>>>,
) {
    if row == caps.len() {
        out.push(acc.clone());
        return;
    }
    for chosen in available.iter().copied().combinations(caps[row]) {
        let rest: Vec<u32> = available
            .iter()
            .copied()
            .filter(|c| !chosen.contains(c))
            .collect();
        acc.push(chosen);
        full_rows_rec(&rest, caps, row + 1, acc, out);
        acc.pop();
    }
}

fn all_columns_rec(
    m: usize,
    caps: &[usize],
    col: u32,
    blocks: &mut Vec<Vec<u32>>,
    out: &mut Vec<Vec<Vec<u32>>>,
) {
    if col as usize > m {
        out.push(blocks.clone());
        return;
    }
    for row in 0..caps.len() {
        if blocks[row].len() < caps[row] {
            blocks[row].push(col);
            all_columns_rec(m, caps, col + 1, blocks, out);
            blocks[row].pop();
        }
    }
}

/// Cheap upper bound on the facet count, used by the enumeration guard.
///
/// For unit column caps the bound is the exact facet count; for general
/// column caps the bound counts columnwise choices and ignores row caps.
pub fn facet_count_bound(spec: &ComplexSpec) -> u128 {
    if spec.col_caps.iter().all(|&p| p == 1) {
        cap_vectors(spec)
            .iter()
            .map(|caps| unit_col_facet_count(spec.m, caps))
            .sum()
    } else {
        let mut bound: u128 = 1;
        for &p in &spec.col_caps {
            let per_col: u128 = (0..=p.min(spec.n)).map(|t| binomial(spec.n, t)).sum();
            bound = bound.saturating_mul(per_col);
        }
        bound
    }
}

fn unit_col_facet_count(m: usize, caps: &[usize]) -> u128 {
    let total: usize = caps.iter().sum();
    if m >= total {
        // Disjoint blocks of exact sizes caps[i] out of m columns.
        let mut count: u128 = 1;
        let mut remaining = m;
        for &k in caps {
            count *= binomial(remaining, k);
            remaining -= k;
        }
        count
    } else {
        // Ordered partitions of all m columns with block sizes <= caps.
        // DP over rows on the number of columns still to place.
        let mut ways = vec![0u128; m + 1];
        ways[0] = 1;
        for &k in caps {
            let mut next = vec![0u128; m + 1];
            for used in 0..=m {
                if ways[used] == 0 {
                    continue;
                }
                for take in 0..=k.min(m - used) {
                    next[used + take] += ways[used] * binomial(m - used, take);
                }
            }
            ways = next;
        }
        ways[m]
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Facet enumeration for general column caps: depth-first over cells in vertex
/// order, collecting admissible placements and keeping the maximal ones.
fn general_facets(spec: &ComplexSpec) -> Vec<Vec<u32>> {
    let mut admissible: Vec<Vec<u32>> = Vec::new();
    let mut rows = vec![0usize; spec.n];
    let mut cols = vec![0usize; spec.m];
    let mut acc: Vec<u32> = Vec::new();
    general_rec(spec, 0, &mut rows, &mut cols, &mut acc, &mut admissible);
    admissible
        .into_iter()
        .filter(|p| is_maximal(spec, p))
        .collect()
}

fn general_rec(
    spec: &ComplexSpec,
    v: u32,
    rows: &mut Vec<usize>,
    cols: &mut Vec<usize>,
    acc: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if v as usize == spec.m * spec.n {
        out.push(acc.clone());
        return;
    }
    general_rec(spec, v + 1, rows, cols, acc, out);
    let cell = Cell::from_vertex_index(v, spec.n);
    let (ri, ci) = (cell.row as usize - 1, cell.col as usize - 1);
    if rows[ri] < spec.row_caps[ri] && cols[ci] < spec.col_caps[ci] {
        rows[ri] += 1;
        cols[ci] += 1;
        acc.push(v);
        general_rec(spec, v + 1, rows, cols, acc, out);
        acc.pop();
        rows[ri] -= 1;
        cols[ci] -= 1;
    }
}

fn is_maximal(spec: &ComplexSpec, placement: &[u32]) -> bool {
    let p = RookPlacement::from_vertex_list(placement, spec.n);
    let (rows, cols) = spec.occupancies(&p);
    for v in 0..(spec.m * spec.n) as u32 {
        if placement.binary_search(&v).is_ok() {
            continue;
        }
        let cell = Cell::from_vertex_index(v, spec.n);
        let (ri, ci) = (cell.row as usize - 1, cell.col as usize - 1);
        if rows[ri] < spec.row_caps[ri] && cols[ci] < spec.col_caps[ci] {
            return false;
        }
    }
    true
}

/// JSON form of a board complex:
/// `{"m":…,"n":…,"caps":[…],"symmetrized":…,"facets":[[cellIndex,…],…]}`.
pub fn board_complex_to_json(spec: &ComplexSpec, complex: &SimplicialComplex) -> Value {
    json!({
        "m": spec.m,
        "n": spec.n,
        "caps": spec.row_caps,
        "symmetrized": spec.symmetrized,
        "facets": complex.facets,
    })
}

pub fn board_complex_from_json(value: &Value) -> Result<(ComplexSpec, SimplicialComplex), ComplexError> {
    let obj = value
        .as_object()
        .ok_or_else(|| ComplexError::MalformedJson("expected an object".into()))?;
    let get_usize = |key: &str| -> Result<usize, ComplexError> {
        obj.get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| ComplexError::MalformedJson(format!("missing integer field `{key}`")))
    };
    let m = get_usize("m")?;
    let n = get_usize("n")?;
    let caps: Vec<usize> = obj
        .get("caps")
        .and_then(Value::as_array)
        .ok_or_else(|| ComplexError::MalformedJson("missing array field `caps`".into()))?
        .iter()
        .map(|v| {
            v.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| ComplexError::MalformedJson("non-integer cap".into()))
        })
        .collect::<Result<_, _>>()?;
    let symmetrized = obj
        .get("symmetrized")
        .and_then(Value::as_bool)
        .ok_or_else(|| ComplexError::MalformedJson("missing boolean field `symmetrized`".into()))?;
    let facets: Vec<Vec<u32>> = obj
        .get("facets")
        .and_then(Value::as_array)
        .ok_or_else(|| ComplexError::MalformedJson("missing array field `facets`".into()))?
        .iter()
        .map(|f| {
            f.as_array()
                .ok_or_else(|| ComplexError::MalformedJson("facet is not an array".into()))?
                .iter()
                .map(|v| {
                    v.as_u64()
                        .map(|x| x as u32)
                        .ok_or_else(|| ComplexError::MalformedJson("non-integer vertex".into()))
                })
                .collect::<Result<Vec<u32>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let spec = if symmetrized {
        ComplexSpec::symmetrized(m, n, caps)?
    } else {
        ComplexSpec::with_unit_col_caps(m, n, caps)?
    };
    let mut complex = SimplicialComplex::from_facets(m * n, facets)?
        .with_board(BoardShape { m, n });
    sort_canonical(&mut complex.facets, n);
    Ok((spec, complex))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: every subset of the board, filtered to admissible
    /// placements, then reduced to the maximal ones. Only usable for tiny boards.
    pub(crate) fn brute_force_facets(spec: &ComplexSpec) -> Vec<Vec<u32>> {
        let cells = spec.m * spec.n;
        assert!(cells <= 20, "brute force oracle limited to small boards");
        let mut admissible: Vec<Vec<u32>> = Vec::new();
        for mask in 0u32..(1 << cells) {
            let verts: Vec<u32> = (0..cells as u32).filter(|v| mask >> v & 1 == 1).collect();
            let placement = RookPlacement::from_vertex_list(&verts, spec.n);
            if is_simplex(spec, &placement).unwrap() {
                admissible.push(verts);
            }
        }
        let mut maximal: Vec<Vec<u32>> = admissible
            .iter()
            .filter(|p| {
                !admissible
                    .iter()
                    .any(|q| q.len() > p.len() && is_sorted_subset(p, q))
            })
            .cloned()
            .collect();
        sort_canonical(&mut maximal, spec.n);
        maximal
    }

    fn placement(cells: &[(u32, u32)]) -> RookPlacement {
        RookPlacement::new(cells.iter().map(|&(c, r)| Cell::new(c, r)))
    }

    #[test]
    fn is_simplex_non_attacking_rooks() {
        let spec = ComplexSpec::new(2, 2, vec![1, 1], vec![1, 1]).unwrap();
        assert!(is_simplex(&spec, &placement(&[(1, 1), (2, 2)])).unwrap());
    }

    #[test]
    fn is_simplex_column_cap_violation() {
        let spec = ComplexSpec::new(2, 2, vec![1, 1], vec![1, 1]).unwrap();
        assert!(!is_simplex(&spec, &placement(&[(1, 1), (1, 2)])).unwrap());
    }

    #[test]
    fn is_simplex_symmetrized_permutes_caps() {
        // Caps (2,1); the placement has 1 rook in row 1 and 2 rooks in row 2,
        // so only the swapped cap assignment admits it.
        let spec = ComplexSpec::symmetrized(4, 2, vec![2, 1]).unwrap();
        let p = placement(&[(1, 1), (2, 2), (3, 2)]);
        assert!(is_simplex(&spec, &p).unwrap());
        // Exhaustive cross-check against both explicit cap assignments.
        let direct_a = ComplexSpec::with_unit_col_caps(4, 2, vec![2, 1]).unwrap();
        let direct_b = ComplexSpec::with_unit_col_caps(4, 2, vec![1, 2]).unwrap();
        assert!(
            is_simplex(&direct_a, &p).unwrap() || is_simplex(&direct_b, &p).unwrap()
        );
    }

    #[test]
    fn is_simplex_rejects_off_board_cells() {
        let spec = ComplexSpec::new(2, 2, vec![1, 1], vec![1, 1]).unwrap();
        let err = is_simplex(&spec, &placement(&[(3, 1)])).unwrap_err();
        assert!(matches!(err, ComplexError::CellOutOfRange { .. }));
    }

    #[test]
    fn enumerate_chessboard_2x2() {
        let spec = ComplexSpec::new(2, 2, vec![1, 1], vec![1, 1]).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        let expected: Vec<Vec<u32>> = vec![
            placement(&[(1, 1), (2, 2)]).vertex_list(2),
            placement(&[(2, 1), (1, 2)]).vertex_list(2),
        ];
        for f in &expected {
            assert!(complex.facets().contains(f));
        }
        assert_eq!(complex.num_facets(), 2);
    }

    #[test]
    fn enumerate_single_row_skeleton() {
        // Delta_{3,1}^{2;1} is the 1-skeleton of a triangle: three 2-subsets.
        let spec = ComplexSpec::with_unit_col_caps(3, 1, vec![2]).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        assert_eq!(complex.num_facets(), 3);
        assert!(complex.facets().iter().all(|f| f.len() == 2));
    }

    #[test]
    fn enumerate_sigma_4_2_matches_brute_force() {
        // (m=4, n=2, nu=1, s=1): 24 facets.
        let spec = ComplexSpec::sigma(4, 2, 1, 1).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        assert_eq!(complex.num_facets(), 24);
        assert_eq!(complex.facets().to_vec(), brute_force_facets(&spec));
    }

    #[test]
    fn enumerate_matches_brute_force_on_small_grid() {
        for (m, n, caps, sym) in [
            (3, 2, vec![1, 1], false),
            (3, 2, vec![2, 1], false),
            (3, 2, vec![2, 1], true),
            (4, 2, vec![2, 1], true),
            (2, 3, vec![1, 1, 1], true),
            (5, 2, vec![2, 2], false),
        ] {
            let spec = if sym {
                ComplexSpec::symmetrized(m, n, caps).unwrap()
            } else {
                ComplexSpec::with_unit_col_caps(m, n, caps).unwrap()
            };
            let complex = enumerate_facets(&spec).unwrap();
            assert_eq!(
                complex.facets().to_vec(),
                brute_force_facets(&spec),
                "mismatch for spec {spec:?}"
            );
        }
    }

    #[test]
    fn enumerate_general_col_caps_matches_brute_force() {
        let spec = ComplexSpec::new(3, 3, vec![2, 1, 1], vec![1, 2, 1]).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        assert_eq!(complex.facets().to_vec(), brute_force_facets(&spec));
    }

    #[test]
    fn enumeration_guard_refuses_large_boards() {
        let spec = ComplexSpec::sigma(30, 3, 3, 2).unwrap();
        let err = enumerate_facets_with_limit(&spec, 1000).unwrap_err();
        assert!(matches!(err, ComplexError::EnumerationLimit { .. }));
    }

    #[test]
    fn facet_count_bound_is_exact_for_unit_col_caps() {
        let spec = ComplexSpec::sigma(4, 2, 1, 1).unwrap();
        assert_eq!(facet_count_bound(&spec), 24);
        let spec = ComplexSpec::sigma(11, 3, 2, 2).unwrap();
        assert_eq!(facet_count_bound(&spec), 277_200);
    }

    #[test]
    fn f_vector_two_disjoint_edges() {
        let complex = SimplicialComplex::from_facets(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(f_vector(&complex).counts(), &[4, 2]);
    }

    #[test]
    fn f_vector_full_triangle() {
        let complex = SimplicialComplex::full_simplex(3);
        assert_eq!(f_vector(&complex).counts(), &[3, 3, 1]);
    }

    #[test]
    fn f_vector_chessboard_3x2_by_downward_closure() {
        let spec = ComplexSpec::with_unit_col_caps(3, 2, vec![1, 1]).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        // 6 cells, 6 non-attacking pairs.
        assert_eq!(f_vector(&complex).counts(), &[6, 6]);
    }

    #[test]
    fn deleted_join_membership_examples() {
        let k = SimplicialComplex::skeleton_of_simplex(3, 0);
        let family = vec![k.clone(), k.clone()];
        let a = LabeledPartition::from_slices(&[&[1], &[2]]).unwrap();
        assert!(deleted_join_membership(&family, &a).unwrap());
        let a = LabeledPartition::from_slices(&[&[1, 2], &[3]]).unwrap();
        assert!(!deleted_join_membership(&family, &a).unwrap());

        let family = vec![
            SimplicialComplex::skeleton_of_simplex(3, 0),
            SimplicialComplex::skeleton_of_simplex(3, 1),
        ];
        let a = LabeledPartition::from_slices(&[&[1], &[2, 3]]).unwrap();
        assert!(deleted_join_membership(&family, &a).unwrap());
        let a = LabeledPartition::from_slices(&[&[2, 3], &[1]]).unwrap();
        assert!(!deleted_join_membership(&family, &a).unwrap());
    }

    #[test]
    fn deleted_join_membership_rejects_out_of_range_vertex() {
        let k = SimplicialComplex::skeleton_of_simplex(3, 0);
        let family = vec![k.clone(), k];
        let a = LabeledPartition::from_slices(&[&[4], &[1]]).unwrap();
        assert!(matches!(
            deleted_join_membership(&family, &a),
            Err(ComplexError::BlockElementOutOfRange { .. })
        ));
    }

    #[test]
    fn labeled_facets_sigma_4_2() {
        let spec = ComplexSpec::sigma(4, 2, 1, 1).unwrap();
        let tuples: Vec<LabeledPartition> =
            symmetrized_complex_as_labeled(&spec).unwrap().collect();
        assert_eq!(tuples.len(), 24);
        for t in &tuples {
            let mut sizes = t.block_sizes();
            sizes.sort_unstable();
            assert_eq!(sizes, vec![1, 2]);
        }
    }

    #[test]
    fn labeled_facets_two_singletons() {
        let spec = ComplexSpec::sigma(2, 2, 0, 2).unwrap();
        let tuples: Vec<LabeledPartition> =
            symmetrized_complex_as_labeled(&spec).unwrap().collect();
        let expected_a = LabeledPartition::from_slices(&[&[1], &[2]]).unwrap();
        let expected_b = LabeledPartition::from_slices(&[&[2], &[1]]).unwrap();
        assert_eq!(tuples.len(), 2);
        assert!(tuples.contains(&expected_a));
        assert!(tuples.contains(&expected_b));
    }

    #[test]
    fn labeled_facets_empty_caps() {
        let spec = ComplexSpec::sigma(3, 2, 0, 0).unwrap();
        let tuples: Vec<LabeledPartition> =
            symmetrized_complex_as_labeled(&spec).unwrap().collect();
        assert_eq!(tuples.len(), 1);
        assert_eq!(tuples[0].total_len(), 0);
    }

    #[test]
    fn downward_closure_exhaustive_on_small_boards() {
        for (m, n, caps, sym) in [
            (3, 2, vec![2, 1], true),
            (4, 2, vec![1, 1], false),
            (2, 3, vec![1, 1, 1], true),
        ] {
            let spec = if sym {
                ComplexSpec::symmetrized(m, n, caps).unwrap()
            } else {
                ComplexSpec::with_unit_col_caps(m, n, caps).unwrap()
            };
            let cells = (m * n) as u32;
            for mask in 0u32..(1 << cells) {
                let verts: Vec<u32> = (0..cells).filter(|v| mask >> v & 1 == 1).collect();
                let p = RookPlacement::from_vertex_list(&verts, n);
                if is_simplex(&spec, &p).unwrap() {
                    for skip in 0..verts.len() {
                        let sub: Vec<u32> = verts
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != skip)
                            .map(|(_, &v)| v)
                            .collect();
                        let q = RookPlacement::from_vertex_list(&sub, n);
                        assert!(is_simplex(&spec, &q).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn symmetrization_is_union_over_permutations() {
        let caps = vec![2, 1];
        let sym = ComplexSpec::symmetrized(4, 2, caps.clone()).unwrap();
        let perms: Vec<ComplexSpec> = vec![
            ComplexSpec::with_unit_col_caps(4, 2, vec![2, 1]).unwrap(),
            ComplexSpec::with_unit_col_caps(4, 2, vec![1, 2]).unwrap(),
        ];
        for mask in 0u32..(1 << 8) {
            let verts: Vec<u32> = (0..8).filter(|v| mask >> v & 1 == 1).collect();
            let p = RookPlacement::from_vertex_list(&verts, 2);
            let in_sym = is_simplex(&sym, &p).unwrap();
            let in_any = perms.iter().any(|s| is_simplex(s, &p).unwrap());
            assert_eq!(in_sym, in_any);
        }
    }

    #[test]
    fn row_permutation_maps_facets_to_facets() {
        let spec = ComplexSpec::sigma(5, 2, 1, 1).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        let swapped: HashSet<Vec<u32>> = complex
            .facets()
            .iter()
            .map(|f| {
                let mut g: Vec<u32> = f
                    .iter()
                    .map(|&v| {
                        let c = Cell::from_vertex_index(v, 2);
                        Cell::new(c.col, 3 - c.row).vertex_index(2)
                    })
                    .collect();
                g.sort_unstable();
                g
            })
            .collect();
        let original: HashSet<Vec<u32>> = complex.facets().iter().cloned().collect();
        assert_eq!(swapped, original);
    }

    #[test]
    fn facets_are_pure_under_working_hypothesis() {
        for (m, n, nu, s) in [(5, 2, 1, 1), (7, 2, 2, 1), (7, 3, 1, 1), (8, 3, 1, 2)] {
            let spec = ComplexSpec::sigma(m, n, nu, s).unwrap();
            assert!(spec.working_hypothesis());
            let complex = enumerate_facets(&spec).unwrap();
            assert!(complex.is_pure());
            assert_eq!(
                complex.dimension(),
                Some((n * nu + s) as isize - 1),
                "dim mismatch for (m={m}, n={n}, nu={nu}, s={s})"
            );
        }
    }

    #[test]
    fn no_facet_contains_another() {
        for spec in [
            ComplexSpec::sigma(4, 2, 1, 1).unwrap(),
            ComplexSpec::new(3, 3, vec![2, 1, 1], vec![1, 2, 1]).unwrap(),
            // Non-pure regime: m below the working hypothesis.
            ComplexSpec::sigma(3, 2, 1, 1).unwrap(),
        ] {
            let complex = enumerate_facets(&spec).unwrap();
            let facets = complex.facets();
            for (i, f) in facets.iter().enumerate() {
                for (j, g) in facets.iter().enumerate() {
                    if i != j {
                        assert!(!is_sorted_subset(f, g));
                    }
                }
            }
        }
    }

    #[test]
    fn void_and_empty_complexes_are_distinguished() {
        let void = SimplicialComplex::void(3);
        let empty = SimplicialComplex::empty_simplex_only(3);
        assert_eq!(void.dimension(), None);
        assert_eq!(empty.dimension(), Some(-1));
        assert!(!void.contains_face(&[]));
        assert!(empty.contains_face(&[]));
    }

    #[test]
    fn board_json_round_trip() {
        let spec = ComplexSpec::sigma(4, 2, 1, 1).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        let value = board_complex_to_json(&spec, &complex);
        let (spec2, complex2) = board_complex_from_json(&value).unwrap();
        assert_eq!(spec, spec2);
        assert_eq!(complex.facets(), complex2.facets());
    }
}
