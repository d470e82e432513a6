//! Reduced simplicial homology over prime fields and the rationals, and the
//! connectivity evidence reports built on top of it.
//!
//! Homology is computed from the augmented chain complex: ranks of boundary
//! matrices give reduced Betti numbers per degree. The verdicts produced here
//! are homology evidence for mu-connectedness, not a homotopy-theoretic proof.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::complex::{
    balanced_caps, enumerate_facets, f_vector, ComplexError, ComplexSpec, SimplicialComplex,
};
use crate::field::{CoefficientField, FieldOps, PrimeField, Rationals};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("face count bound {bound} exceeds the homology resource limit {limit}")]
    FaceLimit { bound: u128, limit: u64 },
    #[error("symmetrized caps {0:?} are not of the form (nu+1,...,nu+1,nu,...,nu)")]
    CapsNotBalanced(Vec<usize>),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
}

/// Bound on the downward-closure work estimate `sum_F 2^|F|` (an overcount of
/// the face count; deduplication typically shrinks it by orders of magnitude).
pub const DEFAULT_FACE_LIMIT: u64 = 200_000_000;

/// Above this total face count, rational ranks are pinned from the F_2
/// computation when the mod-2 homology is concentrated in the top degree
/// (exact via universal coefficients); below it they are eliminated directly.
const RATIONAL_PIN_THRESHOLD: usize = 100_000;

/// Per-matrix entry budget for the dense elimination path.
const DENSE_ENTRY_LIMIT: u128 = 2_000_000;

/// Reduced homology ranks: the degree `-1` rank is carried separately so the
/// empty-simplex-only complex can be distinguished.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedRanks {
    pub minus_one: u64,
    pub by_degree: Vec<u64>,
}

impl ReducedRanks {
    pub fn rank(&self, degree: isize) -> u64 {
        if degree == -1 {
            self.minus_one
        } else {
            self.by_degree.get(degree as usize).copied().unwrap_or(0)
        }
    }

    /// Whether all reduced ranks vanish strictly below `top` (including
    /// degree -1).
    pub fn concentrated_above(&self, top: usize) -> bool {
        self.minus_one == 0 && self.by_degree.iter().take(top).all(|&r| r == 0)
    }

    /// `1 + sum_i (-1)^i rank_i` over all degrees including -1; equals the
    /// f-vector Euler characteristic for nonvoid complexes.
    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 1 - self.minus_one as i64;
        for (i, &r) in self.by_degree.iter().enumerate() {
            chi += if i % 2 == 0 { r as i64 } else { -(r as i64) };
        }
        chi
    }
}

/// Faces of a complex grouped and indexed by dimension, ready for boundary
/// matrix assembly.
pub struct ChainData {
    faces: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
    nonvoid: bool,
}

impl ChainData {
    pub fn new(complex: &SimplicialComplex) -> Self {
        let faces = complex.faces_by_dimension();
        let index = faces
            .iter()
            .map(|level| {
                level
                    .iter()
                    .enumerate()
                    .map(|(i, f)| (f.clone(), i as u32))
                    .collect()
            })
            .collect();
        ChainData { faces, index, nonvoid: !complex.is_void() }
    }

    pub fn top_dimension(&self) -> Option<usize> {
        self.faces.len().checked_sub(1)
    }

    pub fn face_count(&self, dim: usize) -> usize {
        self.faces.get(dim).map_or(0, Vec::len)
    }

    pub fn total_faces(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }

    /// Columns of the boundary matrix in degree `d` (signs from the sorted
    /// global vertex order). Degree 0 is the augmentation map onto the empty
    /// simplex; its matrix has a single row.
    pub fn boundary_columns(&self, d: usize) -> (usize, Vec<Vec<(u32, i8)>>) {
        if d == 0 {
            let cols = (0..self.face_count(0)).map(|_| vec![(0u32, 1i8)]).collect();
            return (1, cols);
        }
        let rows = self.face_count(d - 1);
        let cols = self.faces[d]
            .iter()
            .map(|face| {
                (0..face.len())
                    .map(|skip| {
                        let sub: Vec<u32> = face
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != skip)
                            .map(|(_, &v)| v)
                            .collect();
                        let row = self.index[d - 1][&sub];
                        let sign = if skip % 2 == 0 { 1i8 } else { -1i8 };
                        (row, sign)
                    })
                    .collect()
            })
            .collect();
        (rows, cols)
    }
}

fn rank_over<F: FieldOps + Sync>(field: &F, rows: usize, cols: Vec<Vec<(u32, i8)>>) -> u64
where
    F::Elem: Send,
{
    let n_cols = cols.len();
    if rows == 0 || n_cols == 0 {
        return 0;
    }
    if (rows as u128) * (n_cols as u128) <= DENSE_ENTRY_LIMIT {
        dense_rank(field, rows, cols)
    } else {
        sparse_rank(field, rows, cols)
    }
}

fn dense_rank<F: FieldOps>(field: &F, rows: usize, cols: Vec<Vec<(u32, i8)>>) -> u64 {
    // Row-major matrix, eliminated column by column.
    let n_cols = cols.len();
    let mut mat: Vec<Vec<F::Elem>> = vec![vec![field.zero(); n_cols]; rows];
    for (c, col) in cols.iter().enumerate() {
        for &(r, s) in col {
            mat[r as usize][c] = field.from_i64(s as i64);
        }
    }
    let mut rank = 0usize;
    let mut pivot_row = 0usize;
    for c in 0..n_cols {
        let Some(p) = (pivot_row..rows).find(|&r| !field.is_zero(&mat[r][c])) else {
            continue;
        };
        mat.swap(pivot_row, p);
        let inv = field.inv(&mat[pivot_row][c]);
        for r in 0..rows {
            if r != pivot_row && !field.is_zero(&mat[r][c]) {
                let factor = field.mul(&mat[r][c], &inv);
                for k in c..n_cols {
                    let delta = field.mul(&factor, &mat[pivot_row][k]);
                    mat[r][k] = field.sub(&mat[r][k], &delta);
                }
            }
        }
        rank += 1;
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    rank as u64
}

/// Left-looking column reduction: each column is reduced against the pivot
/// columns found so far until its lowest entry claims a fresh row.
fn sparse_rank<F: FieldOps>(field: &F, rows: usize, cols: Vec<Vec<(u32, i8)>>) -> u64 {
    let mut pivot_of_row: Vec<u32> = vec![u32::MAX; rows];
    let mut pivots: Vec<Vec<(u32, F::Elem)>> = Vec::new();
    let mut rank = 0u64;
    for col in cols {
        let mut current: Vec<(u32, F::Elem)> = col
            .into_iter()
            .map(|(r, s)| (r, field.from_i64(s as i64)))
            .collect();
        current.sort_unstable_by_key(|&(r, _)| r);
        loop {
            let Some((low_row, low_val)) = current.last().cloned() else {
                break;
            };
            let pivot_idx = pivot_of_row[low_row as usize];
            if pivot_idx == u32::MAX {
                pivot_of_row[low_row as usize] = pivots.len() as u32;
                pivots.push(current);
                rank += 1;
                break;
            }
            let pivot = &pivots[pivot_idx as usize];
            let factor = field.div(&low_val, &pivot.last().unwrap().1);
            current = subtract_scaled(field, &current, pivot, &factor);
        }
    }
    rank
}

/// `a - factor * b` on row-sorted sparse vectors.
fn subtract_scaled<F: FieldOps>(
    field: &F,
    a: &[(u32, F::Elem)],
    b: &[(u32, F::Elem)],
    factor: &F::Elem,
) -> Vec<(u32, F::Elem)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ra, ref va)), Some(&(rb, ref vb))) if ra == rb => {
                let v = field.sub(va, &field.mul(factor, vb));
                if !field.is_zero(&v) {
                    out.push((ra, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ra, ref va)), Some(&(rb, _))) if ra < rb => {
                out.push((ra, va.clone()));
                i += 1;
            }
            (Some(_), Some(&(rb, ref vb))) => {
                out.push((rb, field.neg(&field.mul(factor, vb))));
                j += 1;
            }
            (Some(&(ra, ref va)), None) => {
                out.push((ra, va.clone()));
                i += 1;
            }
            (None, Some(&(rb, ref vb))) => {
                out.push((rb, field.neg(&field.mul(factor, vb))));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn boundary_ranks_over<F: FieldOps + Sync>(data: &ChainData, field: &F) -> Vec<u64>
where
    F::Elem: Send,
{
    let top = match data.top_dimension() {
        Some(t) => t,
        None => return Vec::new(),
    };
    (0..=top)
        .into_par_iter()
        .map(|d| {
            let (rows, cols) = data.boundary_columns(d);
            rank_over(field, rows, cols)
        })
        .collect()
}

fn ranks_from_boundary_ranks(data: &ChainData, boundary_ranks: &[u64]) -> ReducedRanks {
    if !data.nonvoid {
        return ReducedRanks { minus_one: 0, by_degree: Vec::new() };
    }
    let top = match data.top_dimension() {
        Some(t) => t,
        // Only the empty simplex: reduced rank 1 in degree -1.
        None => return ReducedRanks { minus_one: 1, by_degree: Vec::new() },
    };
    let minus_one = 1 - boundary_ranks[0];
    let by_degree = (0..=top)
        .map(|i| {
            let n_i = data.face_count(i) as u64;
            let r_next = boundary_ranks.get(i + 1).copied().unwrap_or(0);
            n_i - boundary_ranks[i] - r_next
        })
        .collect();
    ReducedRanks { minus_one, by_degree }
}

/// Reduced homology ranks of the complex over the given coefficient field.
pub fn reduced_homology_ranks(
    complex: &SimplicialComplex,
    field: CoefficientField,
) -> Result<ReducedRanks, HomologyError> {
    reduced_homology_ranks_with_limit(complex, field, DEFAULT_FACE_LIMIT)
}

pub fn reduced_homology_ranks_with_limit(
    complex: &SimplicialComplex,
    field: CoefficientField,
    limit: u64,
) -> Result<ReducedRanks, HomologyError> {
    check_face_limit(complex, limit)?;
    let data = ChainData::new(complex);
    Ok(ranks_for_field(&data, field))
}

fn check_face_limit(complex: &SimplicialComplex, limit: u64) -> Result<(), HomologyError> {
    let bound: u128 = complex
        .facets()
        .iter()
        .map(|f| 1u128 << f.len().min(127))
        .sum();
    if bound > limit as u128 {
        return Err(HomologyError::FaceLimit { bound, limit });
    }
    Ok(())
}

fn ranks_for_field(data: &ChainData, field: CoefficientField) -> ReducedRanks {
    match field {
        CoefficientField::Prime(p) => {
            let f = PrimeField::new(p).expect("validated prime");
            ranks_from_boundary_ranks(data, &boundary_ranks_over(data, &f))
        }
        CoefficientField::Rational => {
            if data.total_faces() > RATIONAL_PIN_THRESHOLD {
                let f2 = PrimeField::new(2).unwrap();
                let mod2_boundary = boundary_ranks_over(data, &f2);
                let mod2 = ranks_from_boundary_ranks(data, &mod2_boundary);
                if let Some(top) = data.top_dimension() {
                    if mod2.concentrated_above(top) {
                        // Mod-2 homology concentrated in the top degree pins
                        // every rational boundary rank to its mod-2 value:
                        // rank_F2 <= rank_Q together with the vanishing of the
                        // intermediate Betti numbers forces equality degree by
                        // degree, so the rational ranks coincide with mod 2.
                        return mod2;
                    }
                }
            }
            ranks_from_boundary_ranks(data, &boundary_ranks_over(data, &Rationals))
        }
    }
}

/// Alternating sum of the f-vector.
pub fn euler_characteristic(complex: &SimplicialComplex) -> i64 {
    f_vector(complex).euler_characteristic()
}

/// Checks that consecutive boundary maps compose to zero over the given field.
pub fn boundary_composition_is_zero(
    complex: &SimplicialComplex,
    field: CoefficientField,
) -> bool {
    let data = ChainData::new(complex);
    let top = match data.top_dimension() {
        Some(t) => t,
        None => return true,
    };
    match field {
        CoefficientField::Prime(p) => {
            let f = PrimeField::new(p).expect("validated prime");
            composition_zero_over(&data, &f, top)
        }
        CoefficientField::Rational => composition_zero_over(&data, &Rationals, top),
    }
}

fn composition_zero_over<F: FieldOps>(data: &ChainData, field: &F, top: usize) -> bool {
    for d in 1..=top {
        let (_, upper) = data.boundary_columns(d);
        let (_, lower) = data.boundary_columns(d - 1);
        for col in &upper {
            let mut acc: HashMap<u32, F::Elem> = HashMap::new();
            for &(mid, s) in col {
                let coeff = field.from_i64(s as i64);
                for &(row, t) in &lower[mid as usize] {
                    let delta = field.mul(&coeff, &field.from_i64(t as i64));
                    let entry = acc.entry(row).or_insert_with(|| field.zero());
                    *entry = field.add(entry, &delta);
                }
            }
            if acc.values().any(|v| !field.is_zero(v)) {
                return false;
            }
        }
    }
    true
}

/// Homology-vanishing evidence for the connectivity bound of the complex
/// described by `spec`.
#[derive(Debug, Clone)]
pub struct ConnectivityReport {
    /// The claimed connectivity bound; `None` when the working hypothesis of
    /// the symmetrized statement fails and no claim applies.
    pub mu: Option<i64>,
    pub hypothesis_ok: bool,
    pub dimension: Option<isize>,
    pub fields: Vec<(CoefficientField, ReducedRanks)>,
    /// `None` when no verdict applies (hypothesis violated).
    pub verdict: Option<bool>,
    /// Whether all reduced homology is concentrated in the top degree, in
    /// every tested field.
    pub top_concentrated: Option<bool>,
}

impl ConnectivityReport {
    pub fn to_json(&self) -> Value {
        let mut fields = Map::new();
        for (f, ranks) in &self.fields {
            fields.insert(f.to_string(), json!(ranks.by_degree));
        }
        json!({
            "mu": self.mu,
            "fields": Value::Object(fields),
            "verdict": self.verdict.map(|v| if v { "pass" } else { "fail" }),
            "hypothesis_ok": self.hypothesis_ok,
        })
    }
}

/// Computes mu from the applicable connectivity theorem and checks that the
/// reduced homology ranks vanish through degree mu over every requested field.
pub fn connectivity_evidence(
    spec: &ComplexSpec,
    fields: &[CoefficientField],
) -> Result<ConnectivityReport, HomologyError> {
    connectivity_evidence_with_limit(spec, fields, crate::complex::DEFAULT_FACET_LIMIT)
}

pub fn connectivity_evidence_with_limit(
    spec: &ComplexSpec,
    fields: &[CoefficientField],
    facet_limit: u64,
) -> Result<ConnectivityReport, HomologyError> {
    let (mu, hypothesis_ok) = if spec.is_symmetrized() {
        let (nu, s) = balanced_caps(spec.row_caps())
            .ok_or_else(|| HomologyError::CapsNotBalanced(spec.row_caps().to_vec()))?;
        // m >= n(nu+1) + s - 1, written without usize underflow.
        let hypothesis = spec.m() + 1 >= spec.n() * (nu + 1) + s;
        let mu = (nu * spec.n() + s) as i64 - 2;
        if hypothesis {
            (Some(mu), true)
        } else {
            (None, false)
        }
    } else {
        let mu = (spec.m() as i64 - spec.n() as i64 - 1)
            .min(spec.cap_sum() as i64 - 2);
        (Some(mu), true)
    };

    let complex = crate::complex::enumerate_facets_with_limit(spec, facet_limit)?;
    check_face_limit(&complex, DEFAULT_FACE_LIMIT)?;
    let data = ChainData::new(&complex);
    let ranks: Vec<(CoefficientField, ReducedRanks)> = fields
        .iter()
        .map(|&f| (f, ranks_for_field(&data, f)))
        .collect();

    let dimension = complex.dimension();
    let verdict = mu.map(|mu| {
        ranks.iter().all(|(_, r)| {
            let nonempty_ok = mu < -1 || r.minus_one == 0;
            let degrees_ok = (0..=mu).all(|i| r.rank(i as isize) == 0);
            nonempty_ok && degrees_ok
        })
    });
    let top_concentrated = match dimension {
        Some(d) if d >= 0 => Some(
            ranks
                .iter()
                .all(|(_, r)| r.concentrated_above(d as usize)),
        ),
        _ => None,
    };

    Ok(ConnectivityReport {
        mu,
        hypothesis_ok,
        dimension,
        fields: ranks,
        verdict,
        top_concentrated,
    })
}

/// Convenience wrapper: enumerate the complex of `spec` and return its
/// reduced ranks over one field.
pub fn spec_homology(
    spec: &ComplexSpec,
    field: CoefficientField,
) -> Result<ReducedRanks, HomologyError> {
    let complex = enumerate_facets(spec)?;
    reduced_homology_ranks(&complex, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;

    fn battery() -> Vec<CoefficientField> {
        CoefficientField::default_battery()
    }

    #[test]
    fn two_disjoint_edges_are_a_zero_sphere() {
        // Delta_{2,2}^{1,1;1,1}: the two diagonals of the 2x2 board.
        let spec = ComplexSpec::new(2, 2, vec![1, 1], vec![1, 1]).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        for field in battery() {
            let ranks = reduced_homology_ranks(&complex, field).unwrap();
            assert_eq!(ranks.minus_one, 0);
            assert_eq!(ranks.by_degree, vec![1, 0], "field {field}");
        }
    }

    #[test]
    fn triangle_boundary_is_a_circle() {
        let complex =
            SimplicialComplex::from_facets(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        for field in battery() {
            let ranks = reduced_homology_ranks(&complex, field).unwrap();
            assert_eq!(ranks.by_degree, vec![0, 1], "field {field}");
        }
    }

    #[test]
    fn chessboard_5x2_is_connected() {
        let spec = ComplexSpec::with_unit_col_caps(5, 2, vec![1, 1]).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        let ranks = reduced_homology_ranks(&complex, CoefficientField::Rational).unwrap();
        // mu = min(5-2-1, 1+1-2) = 0: connected.
        assert_eq!(ranks.rank(0), 0);
    }

    #[test]
    fn skeleton_of_tetrahedron_ranks() {
        // Delta_{4,1}^{2;1} is the 1-skeleton of the tetrahedron.
        let spec = ComplexSpec::with_unit_col_caps(4, 1, vec![2]).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        for field in battery() {
            let ranks = reduced_homology_ranks(&complex, field).unwrap();
            assert_eq!(ranks.by_degree, vec![0, 3], "field {field}");
        }
    }

    #[test]
    fn empty_simplex_complex_has_rank_in_degree_minus_one() {
        let complex = SimplicialComplex::empty_simplex_only(3);
        let ranks = reduced_homology_ranks(&complex, CoefficientField::Rational).unwrap();
        assert_eq!(ranks.minus_one, 1);
        assert!(ranks.by_degree.is_empty());

        let void = SimplicialComplex::void(3);
        let ranks = reduced_homology_ranks(&void, CoefficientField::Rational).unwrap();
        assert_eq!(ranks.minus_one, 0);
    }

    #[test]
    fn connectivity_sigma_5_2() {
        let spec = ComplexSpec::sigma(5, 2, 1, 1).unwrap();
        let report = connectivity_evidence(&spec, &battery()).unwrap();
        assert_eq!(report.mu, Some(1));
        assert_eq!(report.dimension, Some(2));
        assert!(report.hypothesis_ok);
        assert_eq!(report.verdict, Some(true));
        for (_, ranks) in &report.fields {
            assert_eq!(ranks.rank(0), 0);
            assert_eq!(ranks.rank(1), 0);
        }
    }

    #[test]
    fn connectivity_non_symmetrized_skeleton() {
        // Delta^{2;1}_{4,1}: mu = min(4-1-1, 2-2) = 0, ranks (0, 3).
        let spec = ComplexSpec::with_unit_col_caps(4, 1, vec![2]).unwrap();
        let report = connectivity_evidence(&spec, &battery()).unwrap();
        assert_eq!(report.mu, Some(0));
        assert_eq!(report.verdict, Some(true));
        for (_, ranks) in &report.fields {
            assert_eq!(ranks.by_degree, vec![0, 3]);
        }
    }

    #[test]
    fn connectivity_flags_hypothesis_violation() {
        // m = 3 < n(nu+1)+s-1 = 4.
        let spec = ComplexSpec::sigma(3, 2, 1, 1).unwrap();
        let report = connectivity_evidence(&spec, &battery()).unwrap();
        assert!(!report.hypothesis_ok);
        assert_eq!(report.mu, None);
        assert_eq!(report.verdict, None);
    }

    #[test]
    fn connectivity_rejects_unbalanced_symmetrized_caps() {
        let spec = ComplexSpec::symmetrized(6, 2, vec![3, 1]).unwrap();
        assert!(matches!(
            connectivity_evidence(&spec, &battery()),
            Err(HomologyError::CapsNotBalanced(_))
        ));
    }

    #[test]
    fn boundary_composition_vanishes() {
        for spec in [
            ComplexSpec::sigma(5, 2, 1, 1).unwrap(),
            ComplexSpec::with_unit_col_caps(4, 2, vec![2, 1]).unwrap(),
        ] {
            let complex = enumerate_facets(&spec).unwrap();
            for field in battery() {
                assert!(boundary_composition_is_zero(&complex, field));
            }
        }
    }

    #[test]
    fn euler_characteristic_agrees_with_homology() {
        for spec in [
            ComplexSpec::new(2, 2, vec![1, 1], vec![1, 1]).unwrap(),
            ComplexSpec::sigma(5, 2, 1, 1).unwrap(),
            ComplexSpec::with_unit_col_caps(3, 2, vec![1, 1]).unwrap(),
        ] {
            let complex = enumerate_facets(&spec).unwrap();
            let chi = euler_characteristic(&complex);
            let ranks = reduced_homology_ranks(&complex, CoefficientField::Rational).unwrap();
            assert_eq!(chi, ranks.euler_characteristic());
        }
    }

    #[test]
    fn euler_examples() {
        let two_edges = SimplicialComplex::from_facets(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(euler_characteristic(&two_edges), 2);
        let circle =
            SimplicialComplex::from_facets(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(euler_characteristic(&circle), 0);
    }

    #[test]
    fn balanced_caps_splits() {
        assert_eq!(balanced_caps(&[2, 2, 1]), Some((1, 2)));
        assert_eq!(balanced_caps(&[2, 2, 2]), Some((2, 0)));
        assert_eq!(balanced_caps(&[3, 1]), None);
    }

    #[test]
    fn dense_and_sparse_ranks_agree() {
        let spec = ComplexSpec::sigma(6, 2, 1, 1).unwrap();
        let complex = enumerate_facets(&spec).unwrap();
        let data = ChainData::new(&complex);
        let f3 = PrimeField::new(3).unwrap();
        for d in 0..=data.top_dimension().unwrap() {
            let (rows, cols) = data.boundary_columns(d);
            assert_eq!(
                dense_rank(&f3, rows, cols.clone()),
                sparse_rank(&f3, rows, cols),
                "degree {d}"
            );
        }
    }
}
