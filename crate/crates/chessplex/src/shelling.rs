//! Shelling orders on symmetric multiple chessboard complexes and a verifier
//! for the shelling condition on arbitrary facet orders of pure complexes.
//!
//! The constructed order has two layers: facets are grouped by their row-size
//! vector (larger vectors first, the cross-block "case (a)" comparison), and
//! within one size vector they follow a lexicographic constituent order that
//! is always certified by the verifier before use.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::complex::{
    enumerate_facets, facets_as_partitions, BoardShape, Cell, ComplexError, ComplexSpec,
    LabeledPartition, SimplicialComplex,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShellingError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("block-size multisets differ: {0:?} vs {1:?}")]
    SizeMultisetMismatch(Vec<usize>, Vec<usize>),
    #[error("facet has size vector {got:?}, expected {expected:?}")]
    SizeVectorMismatch { got: Vec<usize>, expected: Vec<usize> },
    #[error("complex is not pure")]
    NotPure,
    #[error("order is not a permutation of the facet list")]
    NotAPermutation,
    #[error("candidate constituent order for size vector {0:?} failed verification")]
    ConstituentUncertified(Vec<usize>),
    #[error("facet list has {got} entries but the constituent complex has {expected}")]
    FacetSetMismatch { got: usize, expected: usize },
    #[error("spec is not of the symmetrized (nu+1,...,nu,...) form")]
    NotSigmaForm,
    #[error("working hypothesis m >= n(nu+1)+s-1 fails (m = {m})")]
    HypothesisViolated { m: usize },
    #[error("case (a) does not apply to this facet pair")]
    CaseANotApplicable,
    #[error("complex carries no board labeling")]
    BoardMissing,
}

/// Outcome of the cross-block predecessor comparison of two facets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precedence {
    Before,
    After,
    SameBlock,
}

/// Case (a) of the predecessor order: compare row-size vectors at the first
/// index where they differ; larger size comes first. Equal size vectors are
/// left to the constituent order.
pub fn paper_precedes(
    f: &LabeledPartition,
    f_prime: &LabeledPartition,
) -> Result<Precedence, ShellingError> {
    let a = f.block_sizes();
    let b = f_prime.block_sizes();
    let mut a_sorted = a.clone();
    let mut b_sorted = b.clone();
    a_sorted.sort_unstable();
    b_sorted.sort_unstable();
    if a_sorted != b_sorted {
        return Err(ShellingError::SizeMultisetMismatch(a, b));
    }
    Ok(match a.cmp(&b) {
        std::cmp::Ordering::Greater => Precedence::Before,
        std::cmp::Ordering::Less => Precedence::After,
        std::cmp::Ordering::Equal => Precedence::SameBlock,
    })
}

/// The constructive witness of case (a): for `F` preceding `F'` with pivot
/// `i0`, move the smallest transferable column `x` from the smallest row
/// `j > i0` with `|B_j| > |A_j|` into row `i0`. Returns the witness facet
/// `F''` and the vertex `v = (x, j)` of the shelling relation.
pub fn case_a_witness(
    f: &LabeledPartition,
    f_prime: &LabeledPartition,
) -> Result<(LabeledPartition, Cell), ShellingError> {
    let a = f.block_sizes();
    let b = f_prime.block_sizes();
    let i0 = a
        .iter()
        .zip(&b)
        .position(|(x, y)| x != y)
        .ok_or(ShellingError::CaseANotApplicable)?;
    if a[i0] < b[i0] {
        return Err(ShellingError::CaseANotApplicable);
    }
    let j = (i0 + 1..b.len())
        .find(|&j| b[j] > a[j])
        .ok_or(ShellingError::CaseANotApplicable)?;
    let x = f_prime.blocks()[j]
        .iter()
        .find(|x| !f.blocks()[j].contains(x))
        .copied()
        .expect("|B_j| > |A_j| guarantees a transferable column");
    let mut blocks = f_prime.blocks().to_vec();
    blocks[j].remove(&x);
    blocks[i0].insert(x);
    let witness = LabeledPartition::new(blocks).expect("moving a column keeps blocks disjoint");
    let vertex = Cell::new(x, j as u32 + 1);
    debug_assert!(shelling_relation_holds(f, f_prime, &witness, vertex));
    Ok((witness, vertex))
}

/// The relation `F /\ F' <= F'' /\ F' = F' \ {v}` on labeled partitions,
/// read as cell sets.
pub fn shelling_relation_holds(
    f: &LabeledPartition,
    f_prime: &LabeledPartition,
    f_dprime: &LabeledPartition,
    v: Cell,
) -> bool {
    let fp: Vec<Cell> = f_prime.to_placement().cells().collect();
    if !fp.contains(&v) {
        return false;
    }
    let fs = f.to_placement();
    let fd = f_dprime.to_placement();
    let fp_minus_v: Vec<Cell> = fp.iter().copied().filter(|c| *c != v).collect();
    let inter_fd: Vec<Cell> = fp.iter().copied().filter(|c| fd.contains(c)).collect();
    if inter_fd != fp_minus_v {
        return false;
    }
    fp.iter()
        .filter(|c| fs.contains(c))
        .all(|c| fp_minus_v.contains(c))
}

/// A total order on the facets of a complex, as positions into its facet list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetOrder {
    positions: Vec<usize>,
}

impl FacetOrder {
    pub fn new(positions: Vec<usize>) -> Self {
        FacetOrder { positions }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The facets in order, converted to labeled partitions (board complexes).
    pub fn partitions(&self, complex: &SimplicialComplex) -> Vec<LabeledPartition> {
        let all = facets_as_partitions(complex);
        self.positions.iter().map(|&i| all[i].clone()).collect()
    }
}

/// A shelling certificate in per-facet form: for each facet `F'` (position
/// `t >= 1` in the order) the set of its removable vertices, each paired with
/// the earliest preceding facet containing `F' \ {v}`.
///
/// A witness for any pair `(F, F')` with `F` earlier is recovered by picking a
/// removable vertex of `F'` outside `F`; the verifier has checked exhaustively
/// that one exists for every earlier facet.
#[derive(Debug, Clone)]
pub struct ShellingCertificate {
    removable: Vec<Vec<(u32, usize)>>,
}

impl ShellingCertificate {
    /// Number of ordered pairs (F, F') the certificate covers.
    pub fn pair_count(&self) -> u64 {
        let t = self.removable.len() as u64 + 1;
        t * (t - 1) / 2
    }

    pub fn removable(&self, t: usize) -> &[(u32, usize)] {
        &self.removable[t - 1]
    }

    /// Witness `(position of F'', v)` for the pair at order positions
    /// `(j, t)`, `j < t`.
    pub fn witness_for(
        &self,
        complex: &SimplicialComplex,
        order: &FacetOrder,
        j: usize,
        t: usize,
    ) -> Option<(usize, u32)> {
        let earlier = &complex.facets()[order.positions()[j]];
        self.removable(t)
            .iter()
            .find(|(v, _)| earlier.binary_search(v).is_err())
            .map(|&(v, pos)| (pos, v))
    }
}

/// A refuting pair: no witness exists for the facet at order position
/// `later_position` against the facet at `earlier_position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShellingRefutation {
    pub earlier_position: usize,
    pub later_position: usize,
}

#[derive(Debug, Clone)]
pub enum ShellingOutcome {
    Certified(ShellingCertificate),
    Refuted(ShellingRefutation),
}

impl ShellingOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, ShellingOutcome::Certified(_))
    }

    pub fn certificate(&self) -> Option<&ShellingCertificate> {
        match self {
            ShellingOutcome::Certified(c) => Some(c),
            ShellingOutcome::Refuted(_) => None,
        }
    }
}

struct BitMask {
    words: Vec<u64>,
}

impl BitMask {
    fn from_verts(verts: &[u32], word_count: usize) -> Self {
        let mut words = vec![0u64; word_count];
        for &v in verts {
            words[(v / 64) as usize] |= 1 << (v % 64);
        }
        BitMask { words }
    }

    fn contains_all(&self, other: &BitMask) -> bool {
        other
            .words
            .iter()
            .zip(&self.words)
            .all(|(o, s)| o & !s == 0)
    }
}

/// Verifies the shelling condition for `order` on a pure complex.
///
/// For every pair of facets `(F, F')` with `F` earlier, a witness facet `F''`
/// and vertex `v` with `F /\ F' <= F'' /\ F' = F' \ {v}` must exist among the
/// facets preceding `F'`. The search is exhaustive: the removable vertices of
/// each facet are collected from all predecessors, and every earlier facet is
/// then scanned for coverage. Returns a complete certificate or a refuting
/// pair.
pub fn verify_shelling(
    complex: &SimplicialComplex,
    order: &FacetOrder,
) -> Result<ShellingOutcome, ShellingError> {
    if !complex.is_pure() {
        return Err(ShellingError::NotPure);
    }
    let facets = complex.facets();
    let t_count = facets.len();
    if order.len() != t_count {
        return Err(ShellingError::NotAPermutation);
    }
    let mut seen = vec![false; t_count];
    for &p in order.positions() {
        if p >= t_count || seen[p] {
            return Err(ShellingError::NotAPermutation);
        }
        seen[p] = true;
    }
    if t_count <= 1 {
        return Ok(ShellingOutcome::Certified(ShellingCertificate { removable: Vec::new() }));
    }

    let word_count = complex.vertex_count().div_ceil(64).max(1);
    let ordered: Vec<&Vec<u32>> = order.positions().iter().map(|&p| &facets[p]).collect();
    let masks: Vec<BitMask> = ordered
        .iter()
        .map(|f| BitMask::from_verts(f, word_count))
        .collect();

    // Earliest order position covering each codimension-1 face.
    let mut earliest: HashMap<Box<[u32]>, usize> = HashMap::new();
    for (t, f) in ordered.iter().enumerate() {
        for skip in 0..f.len() {
            let sub: Box<[u32]> = f
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect();
            earliest.entry(sub).and_modify(|e| *e = (*e).min(t)).or_insert(t);
        }
    }

    let per_facet: Vec<Result<Vec<(u32, usize)>, ShellingRefutation>> = (1..t_count)
        .into_par_iter()
        .map(|t| {
            let f = ordered[t];
            let mut removable: Vec<(u32, usize)> = Vec::with_capacity(f.len());
            for skip in 0..f.len() {
                let sub: Vec<u32> = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                if let Some(&pos) = earliest.get(sub.as_slice()) {
                    if pos < t {
                        removable.push((f[skip], pos));
                    }
                }
            }
            if removable.is_empty() {
                return Err(ShellingRefutation { earlier_position: 0, later_position: t });
            }
            if removable.len() < f.len() {
                // A pair (F_j, F_t) lacks a witness exactly when F_j contains
                // every removable vertex; scan all predecessors.
                let w_verts: Vec<u32> = removable.iter().map(|&(v, _)| v).collect();
                let w_mask = BitMask::from_verts(&w_verts, word_count);
                for (j, mask) in masks[..t].iter().enumerate() {
                    if mask.contains_all(&w_mask) {
                        return Err(ShellingRefutation {
                            earlier_position: j,
                            later_position: t,
                        });
                    }
                }
            }
            Ok(removable)
        })
        .collect();

    let mut removable = Vec::with_capacity(t_count - 1);
    for item in per_facet {
        match item {
            Ok(r) => removable.push(r),
            Err(refutation) => return Ok(ShellingOutcome::Refuted(refutation)),
        }
    }
    Ok(ShellingOutcome::Certified(ShellingCertificate { removable }))
}

/// Orders the facets of the constituent complex `Delta^{a;1}_{m,n}` and
/// certifies that order as a shelling before returning it. Positions refer to
/// the input slice, which must carry the complete facet list.
///
/// The candidate order is built recursively. Above the tight bound
/// `m = sum(a) + n - 1` the last column is peeled off: facets avoiding it come
/// first, then for each row the facets placing a rook there; every cross-group
/// pair is witnessed through the peeled cell, whose removal is covered inside
/// the avoiding group. At the tight bound facets are grouped by the last
/// row's block in descending lexicographic order and the remaining rows
/// recurse on the leftover columns (which sit strictly above their own tight
/// bound). The order is never trusted: it is run through `verify_shelling`
/// and a refutation surfaces as an error.
pub fn constituent_order(
    a_sizes: &[usize],
    facets: &[LabeledPartition],
    board: BoardShape,
) -> Result<FacetOrder, ShellingError> {
    for f in facets {
        if f.block_sizes() != a_sizes {
            return Err(ShellingError::SizeVectorMismatch {
                got: f.block_sizes(),
                expected: a_sizes.to_vec(),
            });
        }
    }
    let total: usize = a_sizes.iter().sum();
    if board.m + 1 < total + a_sizes.len() {
        return Err(ShellingError::HypothesisViolated { m: board.m });
    }
    let columns: Vec<u32> = (1..=board.m as u32).collect();
    let candidate = recursive_candidate(&columns, a_sizes);
    let expected = candidate.len();
    let rank_of: HashMap<Vec<Vec<u32>>, usize> = candidate
        .into_iter()
        .enumerate()
        .map(|(rank, blocks)| (blocks, rank))
        .collect();
    let mut positions: Vec<usize> = (0..facets.len()).collect();
    let mut ranks = Vec::with_capacity(facets.len());
    for f in facets {
        let key: Vec<Vec<u32>> = f.blocks().iter().map(|b| b.iter().copied().collect()).collect();
        match rank_of.get(&key) {
            Some(&r) => ranks.push(r),
            None => {
                return Err(ShellingError::FacetSetMismatch { got: facets.len(), expected })
            }
        }
    }
    positions.sort_by_key(|&i| ranks[i]);

    let vertex_lists: Vec<Vec<u32>> = facets
        .iter()
        .map(|f| f.to_placement().vertex_list(board.n))
        .collect();
    let complex =
        SimplicialComplex::from_facets(board.m * board.n, vertex_lists.clone())?.with_board(board);
    let index_of: HashMap<&[u32], usize> = complex
        .facets()
        .iter()
        .enumerate()
        .map(|(i, f)| (f.as_slice(), i))
        .collect();
    let complex_order = FacetOrder::new(
        positions
            .iter()
            .map(|&i| index_of[vertex_lists[i].as_slice()])
            .collect(),
    );
    match verify_shelling(&complex, &complex_order)? {
        ShellingOutcome::Certified(_) => Ok(FacetOrder::new(positions)),
        ShellingOutcome::Refuted(_) => {
            Err(ShellingError::ConstituentUncertified(a_sizes.to_vec()))
        }
    }
}

/// Facets of `Delta^{caps;1}` on the given columns, emitted in the candidate
/// shelling order. Facets are block tuples with ascending column lists.
fn recursive_candidate(cols: &[u32], caps: &[usize]) -> Vec<Vec<Vec<u32>>> {
    let n = caps.len();
    let total: usize = caps.iter().sum();
    let m = cols.len();
    debug_assert!(m + 1 >= total + n);
    if total == 0 {
        return vec![vec![Vec::new(); n]];
    }
    if n == 1 {
        return combinations(cols, caps[0]).into_iter().map(|s| vec![s]).collect();
    }
    let mut out = Vec::new();
    if m > total + n - 1 {
        let c_max = *cols.last().unwrap();
        let rest = &cols[..m - 1];
        out.extend(recursive_candidate(rest, caps));
        for (i, &cap) in caps.iter().enumerate() {
            if cap == 0 {
                continue;
            }
            let mut sub = caps.to_vec();
            sub[i] -= 1;
            for mut blocks in recursive_candidate(rest, &sub) {
                blocks[i].push(c_max);
                out.push(blocks);
            }
        }
    } else {
        let mut groups = combinations(cols, caps[n - 1]);
        groups.sort_by(|a, b| b.cmp(a));
        for group in groups {
            let rest: Vec<u32> = cols.iter().copied().filter(|c| !group.contains(c)).collect();
            for mut blocks in recursive_candidate(&rest, &caps[..n - 1]) {
                blocks.push(group.clone());
                out.push(blocks);
            }
        }
    }
    out
}

fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    use itertools::Itertools;
    items.iter().copied().combinations(k).collect()
}

/// The shelling order of `Sigma_{m,n}^{nu+1,...,nu;1}`: size-vector blocks in
/// descending lexicographic order (case (a)), each block in its certified
/// constituent order. Returns the enumerated complex together with the order.
pub fn paper_shelling_order(
    spec: &ComplexSpec,
) -> Result<(SimplicialComplex, FacetOrder), ShellingError> {
    if !spec.is_symmetrized() || spec.balanced_form().is_none() {
        return Err(ShellingError::NotSigmaForm);
    }
    let (nu, s) = spec.balanced_form().expect("checked above");
    if spec.m() + 1 < spec.n() * (nu + 1) + s {
        return Err(ShellingError::HypothesisViolated { m: spec.m() });
    }
    let complex = enumerate_facets(spec)?;
    let board = complex.board().ok_or(ShellingError::BoardMissing)?;
    let partitions = facets_as_partitions(&complex);

    // Canonical facet order already groups by size vector in descending
    // lexicographic order; walk the groups in place.
    let mut positions: Vec<usize> = Vec::with_capacity(partitions.len());
    let mut start = 0;
    while start < partitions.len() {
        let sizes = partitions[start].block_sizes();
        let mut end = start;
        while end < partitions.len() && partitions[end].block_sizes() == sizes {
            end += 1;
        }
        let group: Vec<LabeledPartition> = partitions[start..end].to_vec();
        let inner = constituent_order(&sizes, &group, board)?;
        positions.extend(inner.positions().iter().map(|&i| start + i));
        start = end;
    }
    Ok((complex, FacetOrder::new(positions)))
}

/// JSON export of a verification outcome. Full `(f_prime, f, witness, vertex)`
/// quadruples are materialized up to `max_pairs`; larger certificates are
/// exported in the per-facet compact form.
pub fn outcome_to_json(
    complex: &SimplicialComplex,
    order: &FacetOrder,
    outcome: &ShellingOutcome,
    max_pairs: u64,
) -> Value {
    match outcome {
        ShellingOutcome::Refuted(r) => json!({
            "certified": false,
            "refutation": {
                "f_prime": order.positions()[r.later_position],
                "f": order.positions()[r.earlier_position],
            },
        }),
        ShellingOutcome::Certified(cert) => {
            if cert.pair_count() <= max_pairs {
                let mut pairs = Vec::new();
                for t in 1..order.len() {
                    for j in 0..t {
                        let (witness_pos, vertex) = cert
                            .witness_for(complex, order, j, t)
                            .expect("certified order provides a witness for every pair");
                        pairs.push(json!({
                            "f_prime": order.positions()[t],
                            "f": order.positions()[j],
                            "witness": order.positions()[witness_pos],
                            "vertex": vertex,
                        }));
                    }
                }
                json!({ "certified": true, "format": "pairs", "pairs": pairs })
            } else {
                let removable: Vec<Value> = (1..order.len())
                    .map(|t| {
                        let options: Vec<Value> = cert
                            .removable(t)
                            .iter()
                            .map(|&(v, pos)| {
                                json!({ "vertex": v, "witness": order.positions()[pos] })
                            })
                            .collect();
                        json!({ "f_prime": order.positions()[t], "options": options })
                    })
                    .collect();
                json!({
                    "certified": true,
                    "format": "compact",
                    "pair_count": cert.pair_count(),
                    "removable": removable,
                })
            }
        }
    }
}
