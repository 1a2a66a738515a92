//! Atomic von Neumann algebras at finite size.
//!
//! A predual element φ is a trace-class matrix on a finite Hilbert space.
//! Its rows are acted on by the left atoms `p_α` and its columns by the right
//! atoms `q_j`; in atom coordinates the projections `Σ_{α∈C} p_α` become
//! coordinate projections, so the measure formula reduces to the Hilbert-case
//! nuclear measure.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{nuclear_measure, MeasureConfig, MeasureResult, OperatorFamily};
use crate::operator::FiniteOperator;
use crate::spaces::{Exponent, Field, FiniteVector, Label, Scalar};

/// Default threshold for edges in the support graph.
pub const DEFAULT_EDGE_TOL: f64 = 1e-10;
const ORTHONORMAL_TOL: f64 = 1e-10;
const CERTIFICATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomSide {
    Row,
    Column,
}

/// Orthonormal basis of atoms spanning the ambient label set.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSystem {
    atoms: Vec<FiniteVector>,
    labels: Vec<Label>,
    side: AtomSide,
    ambient: Vec<Label>,
    /// ambient label -> (atom index, coefficient)
    by_label: BTreeMap<Label, Vec<(usize, Scalar)>>,
}

impl AtomSystem {
    /// Atoms labelled `1..=n` in the given order.
    pub fn new(atoms: Vec<FiniteVector>, side: AtomSide) -> Result<Self> {
        let labels = (1..=atoms.len()).map(Label::from).collect();
        Self::with_labels(atoms, labels, side)
    }

    pub fn with_labels(atoms: Vec<FiniteVector>, labels: Vec<Label>, side: AtomSide) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("atom system"));
        }
        if labels.len() != atoms.len() {
            return Err(Error::InvalidParameter(format!("{} labels for {} atoms", labels.len(), atoms.len())));
        }
        if labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
            return Err(Error::InvalidParameter("atom labels must be distinct".into()));
        }
        for (i, a) in atoms.iter().enumerate() {
            for (j, b) in atoms.iter().enumerate().skip(i) {
                let g: Scalar = a.iter().map(|(l, v)| v.conj() * b.get(l)).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (g - Scalar::new(expected, 0.0)).norm() > ORTHONORMAL_TOL {
                    return Err(Error::NonOrthonormalAtoms(format!("<e_{}, e_{}> = {g}", i + 1, j + 1)));
                }
            }
        }
        let ambient: BTreeSet<Label> = atoms.iter().flat_map(|a| a.support()).collect();
        if ambient.len() != atoms.len() {
            return Err(Error::NonOrthonormalAtoms(format!(
                "{} atoms cannot sum to the identity on {} labels",
                atoms.len(),
                ambient.len()
            )));
        }
        let mut by_label: BTreeMap<Label, Vec<(usize, Scalar)>> = BTreeMap::new();
        for (i, a) in atoms.iter().enumerate() {
            for (l, v) in a.iter() {
                by_label.entry(l.clone()).or_default().push((i, *v));
            }
        }
        Ok(AtomSystem { atoms, labels, side, ambient: ambient.into_iter().collect(), by_label })
    }

    /// Standard basis `e_γ` for each label, with the atom for `γ` labelled `γ`.
    pub fn standard<I, L>(labels: I, side: AtomSide) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: Into<Label>,
    {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        let atoms = labels.iter().map(|l| FiniteVector::real([(l.clone(), 1.0)])).collect();
        Self::with_labels(atoms, labels, side)
    }

    pub fn atoms(&self) -> &[FiniteVector] {
        &self.atoms
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn side(&self) -> AtomSide {
        self.side
    }

    pub fn ambient(&self) -> &[Label] {
        &self.ambient
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn is_real(&self) -> bool {
        self.atoms.iter().all(|a| a.iter().all(|(_, v)| v.im == 0.0))
    }

    /// `Σ_{α∈class} e_α e_α^*` as a dense matrix on the ambient labels.
    fn projection(&self, class: &[usize], ambient: &[Label]) -> DMatrix<Scalar> {
        let index: BTreeMap<&Label, usize> = ambient.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut p = DMatrix::zeros(ambient.len(), ambient.len());
        for &a in class {
            for (lj, vj) in self.atoms[a].iter() {
                for (lk, vk) in self.atoms[a].iter() {
                    p[(index[lj], index[lk])] += vj * vk.conj();
                }
            }
        }
        p
    }

    fn ensure_covers(&self, labels: &[Label], what: &str) -> Result<()> {
        match labels.iter().find(|l| !self.by_label.contains_key(*l)) {
            Some(l) => Err(Error::AmbientMismatch(format!("{what} label {l} is outside the atoms' span"))),
            None => Ok(()),
        }
    }
}

fn coordinate_field(t: &FiniteOperator, row_atoms: &AtomSystem, col_atoms: &AtomSystem) -> Field {
    if t.field() == Field::Real && row_atoms.is_real() && col_atoms.is_real() {
        Field::Real
    } else {
        Field::Complex
    }
}

/// `φ'[β, α] = ⟨φ e_α, f_β⟩` for row atoms `f_β` and column atoms `e_α`,
/// labelled by atom labels. Only nonzero products are accumulated, so
/// standard-basis atoms reproduce `φ` exactly.
pub fn to_atom_coordinates(t: &FiniteOperator, row_atoms: &AtomSystem, col_atoms: &AtomSystem) -> Result<FiniteOperator> {
    row_atoms.ensure_covers(&t.rows(), "row")?;
    col_atoms.ensure_covers(&t.cols(), "column")?;
    let mut triples = Vec::new();
    for ((j, g), v) in t.iter() {
        for &(b, fb) in &row_atoms.by_label[j] {
            for &(a, ea) in &col_atoms.by_label[g] {
                triples.push((row_atoms.labels[b].clone(), col_atoms.labels[a].clone(), fb.conj() * v * ea));
            }
        }
    }
    let field = coordinate_field(t, row_atoms, col_atoms);
    Ok(FiniteOperator::new(triples, t.domain(), t.codomain(), field))
}

/// Inverse of [`to_atom_coordinates`]: `φ = Σ φ'[β,α] f_β e_α^*`.
pub fn from_atom_coordinates(t: &FiniteOperator, row_atoms: &AtomSystem, col_atoms: &AtomSystem) -> Result<FiniteOperator> {
    let row_index: BTreeMap<&Label, usize> = row_atoms.labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let col_index: BTreeMap<&Label, usize> = col_atoms.labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut triples = Vec::new();
    for ((b, a), v) in t.iter() {
        let (Some(&bi), Some(&ai)) = (row_index.get(b), col_index.get(a)) else {
            return Err(Error::AmbientMismatch(format!("entry ({b}, {a}) is not indexed by atom labels")));
        };
        for (j, fb) in row_atoms.atoms[bi].iter() {
            for (g, ea) in col_atoms.atoms[ai].iter() {
                triples.push((j.clone(), g.clone(), fb * v * ea.conj()));
            }
        }
    }
    let field = coordinate_field(t, row_atoms, col_atoms);
    Ok(FiniteOperator::new(triples, t.domain(), t.codomain(), field))
}

/// Partition of atom indices into the supports `Z_γ` of minimal central
/// projections.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralPartition {
    /// Classes of 0-based atom indices, each sorted, ordered by smallest index.
    pub classes: Vec<Vec<usize>>,
    /// Largest entry of `p_Z S − S p_Z` over classes and generators.
    pub max_commutator: f64,
}

impl CentralPartition {
    pub fn class_of(&self, atom: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&atom))
    }

    /// Classes as sets of atom labels.
    pub fn label_classes(&self, atoms: &AtomSystem) -> Vec<BTreeSet<Label>> {
        self.classes.iter().map(|c| c.iter().map(|&i| atoms.labels[i].clone()).collect()).collect()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Largest entry of `p_Z S − S p_Z` for the class `Z` over all generators,
/// computed on the ambient labels.
fn commutator_defect(generators: &[FiniteOperator], atoms: &AtomSystem, class: &[usize]) -> f64 {
    let p = atoms.projection(class, &atoms.ambient);
    generators
        .iter()
        .map(|s| {
            let m = s.to_dense_on(&atoms.ambient, &atoms.ambient);
            (&p * &m - &m * &p).iter().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Connected components of the graph on atoms with an edge `α — β` whenever
/// `|⟨S e_α, e_β⟩| > tol` for some generator, then certified by checking
/// that every class projection commutes with every generator.
///
/// Edges are undirected, so the result is the same whether or not the
/// generator list includes adjoints.
pub fn central_partition(generators: &[FiniteOperator], atoms: &AtomSystem, tol: f64) -> Result<CentralPartition> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let n = atoms.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for s in generators {
        if s.rows().iter().chain(s.cols().iter()).any(|l| !atoms.by_label.contains_key(l)) {
            return Err(Error::AmbientMismatch("generator acts outside the atoms' span".into()));
        }
        let m = to_atom_coordinates(s, atoms, atoms)?;
        let index: BTreeMap<&Label, usize> = atoms.labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
        for ((b, a), v) in m.iter() {
            if v.norm() > tol {
                let (x, y) = (find(&mut parent, index[b]), find(&mut parent, index[a]));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = groups.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    let mut max_commutator = 0.0_f64;
    for class in &classes {
        let d = commutator_defect(generators, atoms, class);
        max_commutator = max_commutator.max(d);
        if d > CERTIFICATE_TOL {
            return Err(Error::CentralityCertificate(format!("class {class:?} leaves a commutator entry of {d:e}")));
        }
    }
    Ok(CentralPartition { classes, max_commutator })
}

/// Row and column central partitions matched class by class, with
/// `p_{Z_γ} = q_{V_γ}` verified on the shared Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedPartition {
    rows: CentralPartition,
    cols: CentralPartition,
    row_atoms: AtomSystem,
    col_atoms: AtomSystem,
}

impl PairedPartition {
    pub fn new(rows: CentralPartition, cols: CentralPartition, row_atoms: AtomSystem, col_atoms: AtomSystem) -> Result<Self> {
        if rows.classes.len() != cols.classes.len() {
            return Err(Error::MisalignedPartitions(format!(
                "{} row classes vs {} column classes",
                rows.classes.len(),
                cols.classes.len()
            )));
        }
        for (side, part, atoms) in [("row", &rows, &row_atoms), ("column", &cols, &col_atoms)] {
            let covered: BTreeSet<usize> = part.classes.iter().flatten().copied().collect();
            let total: usize = part.classes.iter().map(Vec::len).sum();
            if total != atoms.len() || covered.len() != atoms.len() || covered.iter().any(|&i| i >= atoms.len()) {
                return Err(Error::MisalignedPartitions(format!("{side} classes do not partition the atoms")));
            }
        }
        let ambient: Vec<Label> =
            row_atoms.ambient.iter().chain(&col_atoms.ambient).cloned().collect::<BTreeSet<_>>().into_iter().collect();
        for (g, (zr, zc)) in rows.classes.iter().zip(&cols.classes).enumerate() {
            let diff = row_atoms.projection(zr, &ambient) - col_atoms.projection(zc, &ambient);
            let d = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if d > CERTIFICATE_TOL {
                return Err(Error::MisalignedPartitions(format!("class {g}: projections differ by {d:e}")));
            }
        }
        Ok(PairedPartition { rows, cols, row_atoms, col_atoms })
    }

    /// Pairs a partition with itself when both sides use the same atoms.
    pub fn symmetric(partition: CentralPartition, atoms: AtomSystem) -> Result<Self> {
        let row_atoms = AtomSystem { side: AtomSide::Row, ..atoms.clone() };
        let col_atoms = AtomSystem { side: AtomSide::Column, ..atoms };
        Self::new(partition.clone(), partition, row_atoms, col_atoms)
    }

    pub fn rows(&self) -> &CentralPartition {
        &self.rows
    }

    pub fn cols(&self) -> &CentralPartition {
        &self.cols
    }

    pub fn row_atoms(&self) -> &AtomSystem {
        &self.row_atoms
    }

    pub fn col_atoms(&self) -> &AtomSystem {
        &self.col_atoms
    }
}

/// `Σ_γ p_{Z_γ} φ q_{V_γ}`, returned in ambient coordinates.
pub fn vn_block_compress(phi: &FiniteOperator, partition: &PairedPartition) -> Result<FiniteOperator> {
    let (ra, ca) = (&partition.row_atoms, &partition.col_atoms);
    let coords = to_atom_coordinates(phi, ra, ca)?;
    let row_class: BTreeMap<&Label, usize> =
        partition.rows.classes.iter().enumerate().flat_map(|(g, c)| c.iter().map(move |&i| (&ra.labels[i], g))).collect();
    let col_class: BTreeMap<&Label, usize> =
        partition.cols.classes.iter().enumerate().flat_map(|(g, c)| c.iter().map(move |&i| (&ca.labels[i], g))).collect();
    let kept = coords.filter(|b, a| row_class[b] == col_class[a]);
    from_atom_coordinates(&kept, ra, ca)
}

/// Measure formula over a family of predual elements: atom coordinates,
/// then the Hilbert-case nuclear measure. The chosen pair is reported in
/// atom labels.
pub fn vn_measure(
    family: &[FiniteOperator],
    row_atoms: &AtomSystem,
    col_atoms: &AtomSystem,
    budgets: (usize, usize),
    cfg: &MeasureConfig,
) -> Result<MeasureResult> {
    if let Some(t) = family.iter().find(|t| !t.is_hilbert()) {
        return Err(Error::ExponentMismatch(format!(
            "predual elements act on a Hilbert space, got q = {}, p = {}",
            t.domain().value(),
            t.codomain().value()
        )));
    }
    let members = family
        .iter()
        .map(|t| to_atom_coordinates(t, row_atoms, col_atoms).map(|m| m.with_exponents(Exponent::HILBERT, Exponent::HILBERT)))
        .collect::<Result<Vec<_>>>()?;
    let fam = OperatorFamily::new(unify_field(members))?;
    nuclear_measure(&fam, budgets, cfg)
}

fn unify_field(members: Vec<FiniteOperator>) -> Vec<FiniteOperator> {
    if members.iter().all(|m| m.field() == Field::Real) {
        return members;
    }
    members
        .into_iter()
        .map(|m| {
            FiniteOperator::new(
                m.iter().map(|((r, c), v)| (r.clone(), c.clone(), *v)).collect::<Vec<_>>(),
                m.domain(),
                m.codomain(),
                Field::Complex,
            )
        })
        .collect()
}
