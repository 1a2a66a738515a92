//! Index-labeled vectors, ℓ^p norms, coordinate projections and the excess
//! between finite sets.
//!
//! Every index set (Γ, J, Λ) is represented by opaque [`Label`]s. Vectors are
//! sparse maps from labels to scalars; absent labels are zero and exact zeros
//! are pruned on construction, so `support()` is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = Complex64;

/// Opaque coordinate name. Integers order before strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Int(v)
    }
}

impl From<usize> for Label {
    fn from(v: usize) -> Self {
        Label::Int(v as i64)
    }
}

impl From<i32> for Label {
    fn from(v: i32) -> Self {
        Label::Int(v as i64)
    }
}

impl From<&str> for Label {
    fn from(v: &str) -> Self {
        Label::Str(v.to_owned())
    }
}

/// A finite exponent `p ∈ (1, ∞)` together with its dual `p* = p/(p-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponent {
    value: f64,
    dual: f64,
}

impl Exponent {
    pub const HILBERT: Exponent = Exponent { value: 2.0, dual: 2.0 };

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 1.0 {
            return Err(Error::InvalidExponent(value));
        }
        Ok(Exponent { value, dual: value / (value - 1.0) })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn dual(self) -> f64 {
        self.dual
    }

    pub fn dual_exponent(self) -> Exponent {
        Exponent { value: self.dual, dual: self.value }
    }

    pub fn is_hilbert(self) -> bool {
        self.value == 2.0
    }
}

/// Scalar field of a vector or operator record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Real,
    Complex,
}

/// `(Σ |v_i|^p)^{1/p}` for `p ∈ [1, ∞]`, computed with max-scaling.
pub fn lp_norm(values: &[Scalar], p: f64) -> f64 {
    let max = values.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    if p == 1.0 {
        return values.iter().map(|v| v.norm()).fold(0.0, |a, x| a + x);
    }
    let sum: f64 = values.iter().map(|v| (v.norm() / max).powf(p)).sum();
    max * sum.powf(1.0 / p)
}

/// Unit vector `w` in `ℓ^{p*}` norming `v` under the bilinear pairing:
/// `Σ w_i v_i = ‖v‖_p` and `‖w‖_{p*} = 1`. Returns zeros for `v = 0`.
pub fn norming_functional(values: &[Scalar], p: f64) -> Vec<Scalar> {
    let norm = lp_norm(values, p);
    if norm == 0.0 {
        return vec![Scalar::new(0.0, 0.0); values.len()];
    }
    values
        .iter()
        .map(|v| {
            let a = v.norm();
            if a == 0.0 {
                return Scalar::new(0.0, 0.0);
            }
            let u = a / norm;
            // conj(v)/|v| · (|v|/‖v‖)^{p-1}
            v.conj() / a * u.powf(p - 1.0)
        })
        .collect()
}

/// Sparse vector over labels. Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteVector {
    entries: BTreeMap<Label, Scalar>,
}

impl FiniteVector {
    pub fn new<I, L>(entries: I) -> Self
    where
        I: IntoIterator<Item = (L, Scalar)>,
        L: Into<Label>,
    {
        let mut map = BTreeMap::new();
        for (label, value) in entries {
            *map.entry(label.into()).or_insert(Scalar::new(0.0, 0.0)) += value;
        }
        map.retain(|_, v| *v != Scalar::new(0.0, 0.0));
        FiniteVector { entries: map }
    }

    pub fn real<I, L>(entries: I) -> Self
    where
        I: IntoIterator<Item = (L, f64)>,
        L: Into<Label>,
    {
        Self::new(entries.into_iter().map(|(l, v)| (l, Scalar::new(v, 0.0))))
    }

    /// Vector `(values[0], values[1], ...)` on labels `1, 2, ...`.
    pub fn from_slice(values: &[f64]) -> Self {
        Self::real(values.iter().enumerate().map(|(i, &v)| (i as i64 + 1, v)))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, label: &Label) -> Scalar {
        self.entries.get(label).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Scalar)> {
        self.entries.iter()
    }

    pub fn support(&self) -> BTreeSet<Label> {
        self.entries.keys().cloned().collect()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, factor: Scalar) -> Self {
        Self::new(self.entries.iter().map(|(l, v)| (l.clone(), v * factor)))
    }

    pub fn add(&self, other: &FiniteVector) -> Self {
        Self::new(self.iter().chain(other.iter()).map(|(l, v)| (l.clone(), *v)))
    }

    pub fn sub(&self, other: &FiniteVector) -> Self {
        Self::new(self.iter().map(|(l, v)| (l.clone(), *v)).chain(other.iter().map(|(l, v)| (l.clone(), -v))))
    }

    /// Bilinear pairing `Σ_γ self_γ · other_γ`.
    pub fn pair(&self, other: &FiniteVector) -> Scalar {
        self.iter().map(|(l, v)| v * other.get(l)).sum()
    }

    /// Dense values on the given labels, in order.
    pub fn values_on(&self, labels: &[Label]) -> Vec<Scalar> {
        labels.iter().map(|l| self.get(l)).collect()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let values: Vec<Scalar> = self.entries.values().copied().collect();
        lp_norm(&values, p)
    }
}

/// Ambient space of a vector family.
#[derive(Debug, Clone, PartialEq)]
pub enum Ambient {
    /// Weighted ℓ¹ (a discrete measure on the labels). Labels without an
    /// explicit weight carry weight 1.
    L1Weighted {
        weights: BTreeMap<Label, f64>,
    },
    C0,
    Lp(Exponent),
}

impl Ambient {
    pub fn l1() -> Self {
        Ambient::L1Weighted { weights: BTreeMap::new() }
    }

    pub fn weight(&self, label: &Label) -> f64 {
        match self {
            Ambient::L1Weighted { weights } => weights.get(label).copied().unwrap_or(1.0),
            _ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Ambient::L1Weighted { weights } = self {
            for (label, &weight) in weights {
                if !(weight.is_finite() && weight > 0.0) {
                    return Err(Error::NonPositiveWeight { label: label.clone(), weight });
                }
            }
        }
        Ok(())
    }

    fn same_kind(&self, other: &Ambient) -> bool {
        match (self, other) {
            (Ambient::L1Weighted { .. }, Ambient::L1Weighted { .. }) => true,
            (Ambient::C0, Ambient::C0) => true,
            (Ambient::Lp(a), Ambient::Lp(b)) => a == b,
            _ => false,
        }
    }
}

/// Nonempty finite family of vectors sharing one ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    members: Vec<FiniteVector>,
    ambient: Ambient,
}

impl VectorFamily {
    pub fn new(members: Vec<FiniteVector>, ambient: Ambient) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("vector family"));
        }
        ambient.validate()?;
        Ok(VectorFamily { members, ambient })
    }

    pub fn members(&self) -> &[FiniteVector] {
        &self.members
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn support_union(&self) -> BTreeSet<Label> {
        self.members.iter().flat_map(|m| m.support()).collect()
    }

    pub fn ensure_ambient(&self, other: &Ambient) -> Result<()> {
        if self.ambient.same_kind(other) {
            Ok(())
        } else {
            Err(Error::AmbientMismatch(format!("{:?} vs {:?}", self.ambient, other)))
        }
    }
}

/// Finite index sets `C ⊆ J` (rows) and `D ⊆ Λ` (columns).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruncationPair {
    pub rows: BTreeSet<Label>,
    pub cols: BTreeSet<Label>,
}

impl TruncationPair {
    pub fn new<R, C, L1, L2>(rows: R, cols: C) -> Self
    where
        R: IntoIterator<Item = L1>,
        C: IntoIterator<Item = L2>,
        L1: Into<Label>,
        L2: Into<Label>,
    {
        TruncationPair { rows: rows.into_iter().map(Into::into).collect(), cols: cols.into_iter().map(Into::into).collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectMode {
    Keep,
    Drop,
}

pub fn vector_norm(x: &FiniteVector, ambient: &Ambient) -> Result<f64> {
    ambient.validate()?;
    Ok(match ambient {
        Ambient::L1Weighted { .. } => x.iter().map(|(l, v)| ambient.weight(l) * v.norm()).fold(0.0, |a, x| a + x),
        Ambient::C0 => x.lp_norm(f64::INFINITY),
        Ambient::Lp(p) => x.lp_norm(p.value()),
    })
}

/// Coordinate projection onto (`Keep`) or away from (`Drop`) the label set.
pub fn project(x: &FiniteVector, labels: &BTreeSet<Label>, mode: ProjectMode) -> FiniteVector {
    let keep = mode == ProjectMode::Keep;
    FiniteVector {
        entries: x.entries.iter().filter(|(l, _)| labels.contains(*l) == keep).map(|(l, v)| (l.clone(), *v)).collect(),
    }
}

/// `max_{a∈A} min_{b∈B} dist(a, b)`.
pub fn excess<T, F>(a: &[T], b: &[T], mut dist: F) -> Result<f64>
where
    F: FnMut(&T, &T) -> f64,
{
    if a.is_empty() {
        return Err(Error::Empty("excess: first set"));
    }
    if b.is_empty() {
        return Err(Error::Empty("excess: second set"));
    }
    let mut worst = 0.0_f64;
    for x in a {
        let nearest = b.iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    Ok(worst)
}

/// Excess of vector sets in the norm of `ambient`.
pub fn vector_excess(a: &[FiniteVector], b: &[FiniteVector], ambient: &Ambient) -> Result<f64> {
    ambient.validate()?;
    excess(a, b, |x, y| vector_norm(&x.sub(y), ambient).expect("ambient validated"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(ls: &[i64]) -> BTreeSet<Label> {
        ls.iter().map(|&l| Label::Int(l)).collect()
    }

    #[test]
    fn exponent_duality() {
        let p = Exponent::new(3.0).unwrap();
        assert!((p.dual() - 1.5).abs() < 1e-15);
        assert!((p.dual_exponent().dual() - 3.0).abs() < 1e-12);
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(f64::INFINITY).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
    }

    #[test]
    fn norm_examples() {
        let two = Ambient::Lp(Exponent::HILBERT);
        assert_eq!(vector_norm(&FiniteVector::from_slice(&[3.0, 4.0]), &two).unwrap(), 5.0);
        assert_eq!(vector_norm(&FiniteVector::zero(), &two).unwrap(), 0.0);

        let three = Ambient::Lp(Exponent::new(3.0).unwrap());
        let got = vector_norm(&FiniteVector::from_slice(&[1.0, 1.0, 1.0]), &three).unwrap();
        // summation oracle
        let oracle = (1.0_f64 + 1.0 + 1.0).powf(1.0 / 3.0);
        assert!((got - oracle).abs() < 1e-14);
        assert!((got - 1.44225).abs() < 1e-5);
    }

    #[test]
    fn weighted_and_sup_norms() {
        let mut weights = BTreeMap::new();
        weights.insert(Label::Int(2), 0.5);
        let l1 = Ambient::L1Weighted { weights };
        let x = FiniteVector::from_slice(&[1.0, -4.0, 2.0]);
        assert_eq!(vector_norm(&x, &l1).unwrap(), 1.0 + 2.0 + 2.0);
        assert_eq!(vector_norm(&x, &Ambient::C0).unwrap(), 4.0);

        let mut bad = BTreeMap::new();
        bad.insert(Label::Int(1), 0.0);
        let err = vector_norm(&x, &Ambient::L1Weighted { weights: bad }).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { .. }));
    }

    #[test]
    fn zeros_are_pruned() {
        let x = FiniteVector::from_slice(&[1.0, 0.0, 3.0]);
        assert_eq!(x.support(), labels(&[1, 3]));
        let y = x.sub(&x);
        assert!(y.is_zero());
    }

    #[test]
    fn projection_examples() {
        let x = FiniteVector::from_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(project(&x, &labels(&[1]), ProjectMode::Keep), FiniteVector::from_slice(&[1.0]));
        assert_eq!(project(&x, &BTreeSet::new(), ProjectMode::Drop), x);
        assert_eq!(project(&x, &labels(&[2, 3]), ProjectMode::Drop), FiniteVector::from_slice(&[1.0]));
    }

    #[test]
    fn excess_examples() {
        let two = Ambient::Lp(Exponent::HILBERT);
        let a = vec![FiniteVector::from_slice(&[1.0, 0.0])];
        let b = vec![FiniteVector::zero()];
        assert_eq!(vector_excess(&a, &b, &two).unwrap(), 1.0);
        assert_eq!(vector_excess(&a, &a, &two).unwrap(), 0.0);
        assert!(matches!(vector_excess(&[], &b, &two), Err(Error::Empty(_))));
        assert!(matches!(vector_excess(&a, &[], &two), Err(Error::Empty(_))));
    }

    #[test]
    fn norming_functional_is_unit_and_norming() {
        let v = vec![Scalar::new(1.0, 2.0), Scalar::new(-0.5, 0.0), Scalar::new(0.0, 0.0)];
        for p in [1.5, 2.0, 3.0] {
            let w = norming_functional(&v, p);
            let dual = p / (p - 1.0);
            assert!((lp_norm(&w, dual) - 1.0).abs() < 1e-12);
            let pairing: Scalar = w.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!((pairing.re - lp_norm(&v, p)).abs() < 1e-12);
            assert!(pairing.im.abs() < 1e-12);
        }
    }

    #[test]
    fn label_ordering_ints_first() {
        let mut ls = vec![Label::from("b"), Label::Int(3), Label::from("a"), Label::Int(-1)];
        ls.sort();
        assert_eq!(ls, vec![Label::Int(-1), Label::Int(3), Label::from("a"), Label::from("b")]);
    }
}
