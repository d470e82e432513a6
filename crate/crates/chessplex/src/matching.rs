//! Epsilon-graphs of labeled partitions against complex families, the
//! perfect-matching membership criterion for symmetrized deleted joins, and
//! collective unavoidability checks.

use std::collections::HashSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{
    check_family_and_blocks, ComplexError, LabeledPartition, SimplicialComplex,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("family of {family} complexes does not match partition with {blocks} blocks")]
    FamilySizeMismatch { family: usize, blocks: usize },
    #[error("unavoidability check needs n^m = {n}^{m} within the resource guard (m <= {max_m}, n <= {max_n})")]
    ResourceGuard { m: usize, n: usize, max_m: usize, max_n: usize },
}

/// The bipartite graph recording which blocks of a partition belong to which
/// complexes: entry `(i, j)` is true iff `A_i` is a face of `K_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonGraph {
    n: usize,
    adjacency: Vec<Vec<bool>>,
}

impl EpsilonGraph {
    pub fn from_adjacency(adjacency: Vec<Vec<bool>>) -> Self {
        let n = adjacency.len();
        assert!(adjacency.iter().all(|row| row.len() == n), "adjacency must be square");
        EpsilonGraph { n, adjacency }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    /// The complementary non-membership graph.
    pub fn complement(&self) -> EpsilonGraph {
        EpsilonGraph {
            n: self.n,
            adjacency: self
                .adjacency
                .iter()
                .map(|row| row.iter().map(|&b| !b).collect())
                .collect(),
        }
    }
}

/// Builds the epsilon graph of `a` against the family, testing each block
/// against the facet-generated downward closure of each complex.
pub fn epsilon_graph(
    a: &LabeledPartition,
    family: &[SimplicialComplex],
) -> Result<EpsilonGraph, MatchingError> {
    if family.len() != a.n_blocks() {
        return Err(MatchingError::FamilySizeMismatch {
            family: family.len(),
            blocks: a.n_blocks(),
        });
    }
    check_family_and_blocks(family, a)?;
    let blocks = a.block_vertex_sets();
    let adjacency = blocks
        .iter()
        .map(|block| family.iter().map(|k| k.contains_face(block)).collect())
        .collect();
    Ok(EpsilonGraph { n: family.len(), adjacency })
}

/// Result of the perfect-matching test: either a matching assigning each row
/// its column, or a Hall-violating set of rows whose joint neighborhood is
/// smaller than the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingOutcome {
    Perfect(Vec<usize>),
    HallViolator(Vec<usize>),
}

impl MatchingOutcome {
    pub fn is_perfect(&self) -> bool {
        matches!(self, MatchingOutcome::Perfect(_))
    }
}

/// Augmenting-path bipartite matching (Kuhn's algorithm). On failure the
/// alternating-tree rows from an unmatched row form a Hall violator.
pub fn has_perfect_matching(g: &EpsilonGraph) -> MatchingOutcome {
    let n = g.n;
    let mut col_match: Vec<Option<usize>> = vec![None; n];

    fn try_augment(
        g: &EpsilonGraph,
        row: usize,
        visited: &mut [bool],
        col_match: &mut [Option<usize>],
    ) -> bool {
        for col in 0..g.n {
            if g.adjacency[row][col] && !visited[col] {
                visited[col] = true;
                let free = match col_match[col] {
                    None => true,
                    Some(other) => try_augment(g, other, visited, col_match),
                };
                if free {
                    col_match[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }

    for row in 0..n {
        let mut visited = vec![false; n];
        if !try_augment(g, row, &mut visited, &mut col_match) {
            // Alternating tree from `row`: S = reachable rows, T = reachable
            // columns; |T| = |S| - 1 and N(S) = T.
            let mut rows = vec![row];
            let mut cols: HashSet<usize> = HashSet::new();
            let mut stack = vec![row];
            while let Some(r) = stack.pop() {
                for c in 0..n {
                    if g.adjacency[r][c] && !cols.contains(&c) {
                        cols.insert(c);
                        if let Some(next) = col_match[c] {
                            rows.push(next);
                            stack.push(next);
                        }
                    }
                }
            }
            rows.sort_unstable();
            rows.dedup();
            debug_assert!(cols.len() < rows.len());
            return MatchingOutcome::HallViolator(rows);
        }
    }
    let matching = {
        let mut row_to_col = vec![0usize; n];
        for (col, rm) in col_match.iter().enumerate() {
            row_to_col[rm.expect("perfect matching fills every column")] = col;
        }
        row_to_col
    };
    MatchingOutcome::Perfect(matching)
}

/// Membership of `a` in the symmetrized deleted join of the family: true iff
/// the epsilon graph admits a perfect matching.
pub fn in_symmetrized_deleted_join(
    a: &LabeledPartition,
    family: &[SimplicialComplex],
) -> Result<bool, MatchingError> {
    Ok(has_perfect_matching(&epsilon_graph(a, family)?).is_perfect())
}

pub const UNAVOIDABLE_MAX_M: usize = 12;
pub const UNAVOIDABLE_MAX_N: usize = 4;

/// Outcome of the collective unavoidability check. A violating partition is an
/// ordered partition of the whole vertex set with `B_i` outside `K_i` for all
/// `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnavoidabilityOutcome {
    Unavoidable,
    Violated(LabeledPartition),
}

impl UnavoidabilityOutcome {
    pub fn is_unavoidable(&self) -> bool {
        matches!(self, UnavoidabilityOutcome::Unavoidable)
    }
}

/// Decides collective n-unavoidability by enumerating all ordered partitions
/// `B_1 + ... + B_n = [m]` (blocks may be empty; the empty set is a face of
/// every nonvoid complex).
pub fn is_collectively_unavoidable(
    family: &[SimplicialComplex],
) -> Result<UnavoidabilityOutcome, MatchingError> {
    is_collectively_unavoidable_with_limits(family, UNAVOIDABLE_MAX_M, UNAVOIDABLE_MAX_N)
}

pub fn is_collectively_unavoidable_with_limits(
    family: &[SimplicialComplex],
    max_m: usize,
    max_n: usize,
) -> Result<UnavoidabilityOutcome, MatchingError> {
    let n = family.len();
    if n == 0 {
        return Ok(UnavoidabilityOutcome::Unavoidable);
    }
    let m = family[0].vertex_count();
    for k in family {
        if k.vertex_count() != m {
            return Err(MatchingError::Complex(ComplexError::FamilyVertexMismatch(
                m,
                k.vertex_count(),
            )));
        }
    }
    if m > max_m || n > max_n {
        return Err(MatchingError::ResourceGuard { m, n, max_m, max_n });
    }
    // Face sets as bitmasks over [m] for O(1) membership.
    let face_masks: Vec<HashSet<u64>> = family.iter().map(face_mask_set).collect();

    if m == 0 {
        let empty = LabeledPartition::new(vec![Default::default(); n]).unwrap();
        return Ok(if face_masks.iter().all(|faces| !faces.contains(&0)) {
            UnavoidabilityOutcome::Violated(empty)
        } else {
            UnavoidabilityOutcome::Unavoidable
        });
    }

    // Partitions enumerated as digit strings; parallel over the block of the
    // first element.
    let outcome = (0..n).into_par_iter().find_map_first(|first_digit| {
        let mut digits = vec![0usize; m];
        digits[0] = first_digit;
        violating_partition_scan(&face_masks, &mut digits, 1, m, n)
    });
    Ok(match outcome {
        Some(partition) => UnavoidabilityOutcome::Violated(partition),
        None => UnavoidabilityOutcome::Unavoidable,
    })
}

fn face_mask_set(k: &SimplicialComplex) -> HashSet<u64> {
    let mut masks = HashSet::new();
    for facet in k.facets() {
        let full: u64 = facet.iter().fold(0u64, |acc, &v| acc | 1 << v);
        // All subsets of the facet mask.
        let mut sub = full;
        loop {
            masks.insert(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
    }
    masks
}

fn violating_partition_scan(
    face_masks: &[HashSet<u64>],
    digits: &mut Vec<usize>,
    from: usize,
    m: usize,
    n: usize,
) -> Option<LabeledPartition> {
    if from == m {
        let mut block_masks = vec![0u64; n];
        for (elem, &d) in digits.iter().enumerate() {
            block_masks[d] |= 1 << elem;
        }
        let violates = block_masks
            .iter()
            .zip(face_masks)
            .all(|(mask, faces)| !faces.contains(mask));
        if violates {
            let blocks = block_masks
                .iter()
                .map(|mask| (0..m as u32).filter(|e| mask >> e & 1 == 1).map(|e| e + 1).collect())
                .collect();
            return Some(LabeledPartition::new(blocks).expect("blocks are disjoint"));
        }
        return None;
    }
    for d in 0..n {
        digits[from] = d;
        if let Some(found) = violating_partition_scan(face_masks, digits, from + 1, m, n) {
            return Some(found);
        }
    }
    None
}
