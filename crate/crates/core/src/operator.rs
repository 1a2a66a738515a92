//! Labeled sparse matrices acting between ℓ^q(Λ) and ℓ^p(J).

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spaces::{Exponent, Field, FiniteVector, Label, Scalar};

/// A finite matrix `T: ℓ^q(Λ) → ℓ^p(J)` keyed by `(row ∈ J, col ∈ Λ)`.
///
/// `(Tx)_j = Σ_α T[j,α] x_α`. Zero entries are pruned, so [`rows`] and
/// [`cols`] return the exact row/column supports, and the dense form of an
/// operator depends only on its nonzero entries.
///
/// [`rows`]: FiniteOperator::rows
/// [`cols`]: FiniteOperator::cols
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOperator {
    entries: BTreeMap<(Label, Label), Scalar>,
    domain: Exponent,
    codomain: Exponent,
    field: Field,
}

impl FiniteOperator {
    pub fn new<I, R, C>(entries: I, domain: Exponent, codomain: Exponent, field: Field) -> Self
    where
        I: IntoIterator<Item = (R, C, Scalar)>,
        R: Into<Label>,
        C: Into<Label>,
    {
        let mut map = BTreeMap::new();
        for (r, c, v) in entries {
            let v = match field {
                Field::Real => Scalar::new(v.re, 0.0),
                Field::Complex => v,
            };
            *map.entry((r.into(), c.into())).or_insert(Scalar::new(0.0, 0.0)) += v;
        }
        map.retain(|_, v| *v != Scalar::new(0.0, 0.0));
        FiniteOperator { entries: map, domain, codomain, field }
    }

    /// Real operator from `(row, col, value)` triples.
    pub fn real<I, R, C>(entries: I, domain: Exponent, codomain: Exponent) -> Self
    where
        I: IntoIterator<Item = (R, C, f64)>,
        R: Into<Label>,
        C: Into<Label>,
    {
        Self::new(entries.into_iter().map(|(r, c, v)| (r, c, Scalar::new(v, 0.0))), domain, codomain, Field::Real)
    }

    /// Real operator from a row-major dense array, labels `1..=m` and `1..=n`.
    pub fn from_rows(rows: &[Vec<f64>], domain: Exponent, codomain: Exponent) -> Self {
        Self::real(
            rows.iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i as i64 + 1, j as i64 + 1, v))),
            domain,
            codomain,
        )
    }

    /// Builds from a dense matrix with explicit labels.
    pub fn from_dense(
        matrix: &DMatrix<Scalar>,
        rows: &[Label],
        cols: &[Label],
        domain: Exponent,
        codomain: Exponent,
        field: Field,
    ) -> Self {
        assert_eq!(matrix.nrows(), rows.len());
        assert_eq!(matrix.ncols(), cols.len());
        let mut triples = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                triples.push((r.clone(), c.clone(), matrix[(i, j)]));
            }
        }
        Self::new(triples, domain, codomain, field)
    }

    pub fn zero(domain: Exponent, codomain: Exponent, field: Field) -> Self {
        FiniteOperator { entries: BTreeMap::new(), domain, codomain, field }
    }

    /// Rank-one `y ⊗ x*`: `z ↦ (Σ_α x_α z_α) · y`.
    pub fn rank_one(
        functional: &FiniteVector,
        vector: &FiniteVector,
        domain: Exponent,
        codomain: Exponent,
        field: Field,
    ) -> Self {
        let mut triples = Vec::new();
        for (r, y) in vector.iter() {
            for (c, x) in functional.iter() {
                triples.push((r.clone(), c.clone(), y * x));
            }
        }
        Self::new(triples, domain, codomain, field)
    }

    pub fn domain(&self) -> Exponent {
        self.domain
    }

    pub fn codomain(&self) -> Exponent {
        self.codomain
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_hilbert(&self) -> bool {
        self.domain.is_hilbert() && self.codomain.is_hilbert()
    }

    pub fn with_exponents(&self, domain: Exponent, codomain: Exponent) -> Self {
        FiniteOperator { domain, codomain, ..self.clone() }
    }

    pub fn get(&self, row: &Label, col: &Label) -> Scalar {
        self.entries.get(&(row.clone(), col.clone())).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Label, Label), &Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Row support (labels in J with a nonzero entry), sorted.
    pub fn rows(&self) -> Vec<Label> {
        let set: BTreeSet<&Label> = self.entries.keys().map(|(r, _)| r).collect();
        set.into_iter().cloned().collect()
    }

    /// Column support (labels in Λ with a nonzero entry), sorted.
    pub fn cols(&self) -> Vec<Label> {
        let set: BTreeSet<&Label> = self.entries.keys().map(|(_, c)| c).collect();
        set.into_iter().cloned().collect()
    }

    /// Dense matrix on the given row/column labels.
    pub fn to_dense_on(&self, rows: &[Label], cols: &[Label]) -> DMatrix<Scalar> {
        let row_index: BTreeMap<&Label, usize> = rows.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let col_index: BTreeMap<&Label, usize> = cols.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for ((r, c), v) in &self.entries {
            if let (Some(&i), Some(&j)) = (row_index.get(r), col_index.get(c)) {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Dense matrix on the row and column supports.
    pub fn to_dense(&self) -> (DMatrix<Scalar>, Vec<Label>, Vec<Label>) {
        let rows = self.rows();
        let cols = self.cols();
        let m = self.to_dense_on(&rows, &cols);
        (m, rows, cols)
    }

    pub fn apply(&self, x: &FiniteVector) -> FiniteVector {
        FiniteVector::new(self.entries.iter().map(|((r, c), v)| (r.clone(), v * x.get(c))))
    }

    /// Bilinear transpose `T^T: ℓ^{p*}(J) → ℓ^{q*}(Λ)`.
    pub fn transpose(&self) -> Self {
        FiniteOperator {
            entries: self.entries.iter().map(|((r, c), v)| ((c.clone(), r.clone()), *v)).collect(),
            domain: self.codomain.dual_exponent(),
            codomain: self.domain.dual_exponent(),
            field: self.field,
        }
    }

    pub fn scale(&self, factor: Scalar) -> Self {
        Self::new(
            self.entries.iter().map(|((r, c), v)| (r.clone(), c.clone(), v * factor)),
            self.domain,
            self.codomain,
            self.field,
        )
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::ExponentMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.domain.value(),
                self.codomain.value(),
                other.domain.value(),
                other.codomain.value()
            )));
        }
        Ok(())
    }

    fn combined_field(&self, other: &Self) -> Field {
        if self.field == Field::Complex || other.field == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::new(
            self.iter().chain(other.iter()).map(|((r, c), v)| (r.clone(), c.clone(), *v)),
            self.domain,
            self.codomain,
            self.combined_field(other),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Scalar::new(-1.0, 0.0)))
    }

    /// Keeps the entries for which `keep(row, col)` holds.
    pub fn filter<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&Label, &Label) -> bool,
    {
        FiniteOperator {
            entries: self.entries.iter().filter(|((r, c), _)| keep(r, c)).map(|(k, v)| (k.clone(), *v)).collect(),
            ..self.clone()
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: BTreeSet<&(Label, Label)> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|k| {
                let a = self.entries.get(k).copied().unwrap_or_default();
                let b = other.entries.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}
