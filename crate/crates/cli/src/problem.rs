//! Problem-file schema and its conversion into library types.
//!
//! ```json
//! {
//!   "kind": "nuclear",
//!   "payload": { "operator": { "domain": "2", "codomain": "2", "entries": [[1, 1, 1.0, 0.0]] } },
//!   "config": { "tol": 1e-9, "seed": 0 }
//! }
//! ```

use anyhow::{bail, ensure, Context, Result};
use nucmeasure::measures::{MeasureConfig, OperatorFamily, Solver, DEFAULT_ENUMERATION_LIMIT};
use nucmeasure::spaces::{Ambient, VectorFamily};
use nucmeasure::vonneumann::{AtomSide, AtomSystem, DEFAULT_EDGE_TOL};
use nucmeasure::{Exponent, Field, FiniteOperator, FiniteVector, Label, NormConfig, Scalar};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Norm,
    Nuclear,
    MeasureL1,
    MeasureC0,
    MeasureNuclear,
    MeasureVn,
    Partition,
    Curve,
    VerifyPaperExample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    Exact,
    Greedy,
    /// Exact, falling back to greedy when the enumeration guard trips.
    #[default]
    Auto,
}

impl From<SolverChoice> for Solver {
    fn from(s: SolverChoice) -> Self {
        match s {
            SolverChoice::Exact => Solver::Exact,
            SolverChoice::Greedy => Solver::Greedy,
            SolverChoice::Auto => Solver::Auto,
        }
    }
}

/// Numerical and search settings. Every field has a default; the report
/// echoes the effective values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub max_terms: Option<usize>,
    pub max_iterations: usize,
    pub solver: SolverChoice,
    /// Row budget `k`. For `measure-l1`, `null` asks for the unbudgeted value.
    pub budget_c: Option<usize>,
    /// Column budget `l`.
    pub budget_d: Option<usize>,
    /// `null` disables the exact solver's enumeration guard.
    pub enumeration_limit: Option<u64>,
    /// Edge threshold for central partitions.
    pub edge_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        let norm = NormConfig::default();
        Config {
            tol: norm.tol,
            restarts: norm.restarts,
            seed: norm.seed,
            max_terms: norm.max_terms,
            max_iterations: norm.max_iterations,
            solver: SolverChoice::Auto,
            budget_c: None,
            budget_d: None,
            enumeration_limit: Some(DEFAULT_ENUMERATION_LIMIT),
            edge_tol: DEFAULT_EDGE_TOL,
        }
    }
}

impl Config {
    pub fn norm(&self) -> NormConfig {
        NormConfig {
            tol: self.tol,
            restarts: self.restarts,
            seed: self.seed,
            max_terms: self.max_terms,
            max_iterations: self.max_iterations,
        }
    }

    pub fn measure(&self) -> MeasureConfig {
        MeasureConfig { solver: self.solver.into(), enumeration_limit: self.enumeration_limit, norm: self.norm() }
    }

    pub fn budgets(&self) -> (usize, usize) {
        (self.budget_c.unwrap_or(0), self.budget_d.unwrap_or(0))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    #[serde(default)]
    pub payload: Value,
    #[serde(default)]
    pub config: Config,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed problem file")
    }

    /// Decodes the payload into the schema for this problem's kind.
    pub fn payload<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.payload.clone()).with_context(|| format!("invalid payload for kind {:?}", self.kind))
    }
}

/// `[row, col, re, im]`. Repeated positions are summed.
pub type EntrySpec = (Label, Label, f64, f64);

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    /// Domain exponent `q` as a decimal string.
    pub domain: String,
    /// Codomain exponent `p` as a decimal string.
    pub codomain: String,
    /// Inferred from the entries when absent.
    #[serde(default)]
    pub field: Option<Field>,
    pub entries: Vec<EntrySpec>,
}

/// `[label, re, im]`.
pub type VectorEntrySpec = (Label, f64, f64);

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSpec {
    pub entries: Vec<VectorEntrySpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorPayload {
    pub operator: OperatorSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFamilyPayload {
    pub family: Vec<VectorSpec>,
    /// Weighted-L¹ masses `[label, weight]`; only meaningful for `measure-l1`.
    #[serde(default)]
    pub weights: Vec<(Label, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuclearFormula {
    /// `(I − P_C) T (I − Q_D)`
    #[default]
    Nuclear,
    /// `T − P_C T Q_D`, reported with the χ sandwich.
    Chi,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFamilyPayload {
    pub family: Vec<OperatorSpec>,
    #[serde(default)]
    pub formula: NuclearFormula,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum AtomsSpec {
    /// Standard basis vectors, one per label.
    Standard(Vec<Label>),
    Vectors {
        atoms: Vec<VectorSpec>,
        /// Defaults to `1..=n`.
        #[serde(default)]
        labels: Option<Vec<Label>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VnPayload {
    pub family: Vec<OperatorSpec>,
    pub row_atoms: AtomsSpec,
    /// Defaults to `row_atoms`.
    #[serde(default)]
    pub col_atoms: Option<AtomsSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionPayload {
    pub generators: Vec<OperatorSpec>,
    pub atoms: AtomsSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveMeasure {
    L1,
    C0,
    Nuclear,
    Chi,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum FamilySpec {
    Operators(Vec<OperatorSpec>),
    Vectors(Vec<VectorSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvePayload {
    pub family: FamilySpec,
    pub measure: CurveMeasure,
    pub k_max: usize,
    #[serde(default)]
    pub weights: Vec<(Label, f64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmptyPayload {}

/// Parses a decimal exponent such as `"2"` or `"1.5"`.
pub fn parse_exponent(text: &str) -> Result<Exponent> {
    let t = text.trim();
    let decimal = !t.is_empty()
        && t.chars().all(|c| c.is_ascii_digit() || c == '.')
        && t.chars().filter(|&c| c == '.').count() <= 1
        && t.chars().any(|c| c.is_ascii_digit());
    ensure!(decimal, "exponent {text:?} is not a decimal string");
    let v: f64 = t.parse().with_context(|| format!("exponent {text:?}"))?;
    Ok(Exponent::new(v)?)
}

impl OperatorSpec {
    pub fn field(&self) -> Result<Field> {
        let complex = self.entries.iter().any(|e| e.3 != 0.0);
        match self.field {
            Some(Field::Real) if complex => bail!("operator declared real has imaginary entries"),
            Some(f) => Ok(f),
            None if complex => Ok(Field::Complex),
            None => Ok(Field::Real),
        }
    }

    pub fn build(&self, field: Field) -> Result<FiniteOperator> {
        for (r, c, re, im) in &self.entries {
            ensure!(re.is_finite() && im.is_finite(), "non-finite entry at ({r}, {c})");
        }
        let triples = self.entries.iter().map(|(r, c, re, im)| (r.clone(), c.clone(), Scalar::new(*re, *im)));
        Ok(FiniteOperator::new(triples, parse_exponent(&self.domain)?, parse_exponent(&self.codomain)?, field))
    }

    pub fn to_operator(&self) -> Result<FiniteOperator> {
        self.build(self.field()?)
    }
}

/// Builds operators over a common field: complex as soon as one member is.
pub fn operators(specs: &[OperatorSpec]) -> Result<Vec<FiniteOperator>> {
    ensure!(!specs.is_empty(), "operator family is empty");
    let fields = specs.iter().map(OperatorSpec::field).collect::<Result<Vec<_>>>()?;
    let field = if fields.contains(&Field::Complex) { Field::Complex } else { Field::Real };
    specs.iter().map(|s| s.build(field)).collect()
}

pub fn operator_family(specs: &[OperatorSpec]) -> Result<OperatorFamily> {
    Ok(OperatorFamily::new(operators(specs)?)?)
}

impl VectorSpec {
    pub fn to_vector(&self) -> Result<FiniteVector> {
        for (l, re, im) in &self.entries {
            ensure!(re.is_finite() && im.is_finite(), "non-finite entry at {l}");
        }
        Ok(FiniteVector::new(self.entries.iter().map(|(l, re, im)| (l.clone(), Scalar::new(*re, *im)))))
    }
}

pub fn vector_family(specs: &[VectorSpec], ambient: Ambient) -> Result<VectorFamily> {
    let members = specs.iter().map(VectorSpec::to_vector).collect::<Result<Vec<_>>>()?;
    Ok(VectorFamily::new(members, ambient)?)
}

pub fn l1_ambient(weights: &[(Label, f64)]) -> Ambient {
    Ambient::L1Weighted { weights: weights.iter().cloned().collect() }
}

impl AtomsSpec {
    pub fn to_atoms(&self, side: AtomSide) -> Result<AtomSystem> {
        Ok(match self {
            AtomsSpec::Standard(labels) => AtomSystem::standard(labels.iter().cloned(), side)?,
            AtomsSpec::Vectors { atoms, labels } => {
                let vs = atoms.iter().map(VectorSpec::to_vector).collect::<Result<Vec<_>>>()?;
                match labels {
                    Some(ls) => AtomSystem::with_labels(vs, ls.clone(), side)?,
                    None => AtomSystem::new(vs, side)?,
                }
            }
        })
    }
}
