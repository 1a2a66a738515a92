//! Dispatch from a problem file to the library and report assembly.

use std::time::Instant;

use anyhow::{bail, Result};
use nucmeasure::measures::{
    c0_measure, chi_sandwich, l1_measure, nuclear_measure, residual_curve, CurveFamily, Interval, MeasureKind, ResidualCurve,
};
use nucmeasure::norms::{op_norm_bracket, LowerWitness, UpperCertificate};
use nucmeasure::nuclear::nuclear_norm_bracket;
use nucmeasure::spaces::Ambient;
use nucmeasure::vonneumann::{central_partition, vn_measure, AtomSide};
use nucmeasure::{FiniteOperator, FiniteVector, Label, NormBracket};
use serde::Serialize;
use serde_json::{json, Value};

use crate::fixtures;
use crate::problem::*;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub kind: Kind,
    /// Effective configuration after defaults and command-line overrides.
    pub config: Config,
    pub result: Value,
    /// False when a bracket or interval is wider than `tol` relative to its
    /// upper end, or a verification assertion failed.
    pub converged: bool,
    pub timing_seconds: f64,
}

impl Report {
    /// The report with its timing field zeroed.
    pub fn without_timing(&self) -> Report {
        Report { timing_seconds: 0.0, ..self.clone() }
    }
}

/// A computed result plus an explicit verdict for `verify-paper-example`.
struct Outcome {
    result: Value,
    converged: bool,
    verified: Option<bool>,
}

/// Runs a problem. The curve is returned alongside the report for plot output.
pub fn run(problem: &ProblemFile) -> Result<(Report, Option<ResidualCurve>)> {
    let start = Instant::now();
    let (outcome, curve) = dispatch(problem)?;
    let report = Report {
        kind: problem.kind,
        config: problem.config.clone(),
        result: outcome.result,
        converged: outcome.converged && outcome.verified != Some(false),
        timing_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((report, curve))
}

fn dispatch(problem: &ProblemFile) -> Result<(Outcome, Option<ResidualCurve>)> {
    let cfg = &problem.config;
    let plain = |result: Value, converged: bool| Outcome { result, converged, verified: None };
    Ok(match problem.kind {
        Kind::Norm => {
            let p: OperatorPayload = problem.payload()?;
            let b = op_norm_bracket(&p.operator.to_operator()?, &cfg.norm())?;
            (plain(bracket_json(&b), b.converged), None)
        }
        Kind::Nuclear => {
            let p: OperatorPayload = problem.payload()?;
            let b = nuclear_norm_bracket(&p.operator.to_operator()?, &cfg.norm())?;
            (plain(bracket_json(&b), b.converged), None)
        }
        Kind::MeasureL1 => {
            let p: VectorFamilyPayload = problem.payload()?;
            let fam = vector_family(&p.family, l1_ambient(&p.weights))?;
            let r = l1_measure(&fam, cfg.budget_c, &cfg.measure())?;
            (plain(json!(r), true), None)
        }
        Kind::MeasureC0 => {
            let p: VectorFamilyPayload = problem.payload()?;
            if !p.weights.is_empty() {
                bail!("weights apply to measure-l1 only");
            }
            let fam = vector_family(&p.family, Ambient::C0)?;
            let r = c0_measure(&fam, cfg.budget_c.unwrap_or(0))?;
            (plain(json!(r), true), None)
        }
        Kind::MeasureNuclear => {
            let p: OperatorFamilyPayload = problem.payload()?;
            let fam = operator_family(&p.family)?;
            match p.formula {
                NuclearFormula::Nuclear => {
                    let r = nuclear_measure(&fam, cfg.budgets(), &cfg.measure())?;
                    let converged = tight(r.value, cfg.tol);
                    (plain(json!({ "formula": p.formula, "measure": r }), converged), None)
                }
                NuclearFormula::Chi => {
                    let s = chi_sandwich(&fam, cfg.budgets(), &cfg.measure())?;
                    let converged = tight(s.formula.value, cfg.tol);
                    (plain(json!({ "formula": p.formula, "measure": s.formula, "chi": s.chi }), converged), None)
                }
            }
        }
        Kind::MeasureVn => {
            let p: VnPayload = problem.payload()?;
            let family = operators(&p.family)?;
            let rows = p.row_atoms.to_atoms(AtomSide::Row)?;
            let cols = p.col_atoms.as_ref().unwrap_or(&p.row_atoms).to_atoms(AtomSide::Column)?;
            let r = vn_measure(&family, &rows, &cols, cfg.budgets(), &cfg.measure())?;
            let converged = tight(r.value, cfg.tol);
            (plain(json!(r), converged), None)
        }
        Kind::Partition => {
            let p: PartitionPayload = problem.payload()?;
            let generators = operators(&p.generators)?;
            let atoms = p.atoms.to_atoms(AtomSide::Row)?;
            let part = central_partition(&generators, &atoms, cfg.edge_tol)?;
            let result = json!({
                "classes": part.label_classes(&atoms),
                "atom_indices": part.classes,
                "max_commutator": part.max_commutator,
            });
            (plain(result, true), None)
        }
        Kind::Curve => {
            let p: CurvePayload = problem.payload()?;
            let ops;
            let vecs;
            let (family, kind) = match (&p.family, p.measure) {
                (FamilySpec::Operators(specs), m @ (CurveMeasure::Nuclear | CurveMeasure::Chi)) => {
                    ops = operator_family(specs)?;
                    let kind = if m == CurveMeasure::Nuclear { MeasureKind::Nuclear } else { MeasureKind::Chi };
                    (CurveFamily::Operators(&ops), kind)
                }
                (FamilySpec::Vectors(specs), m @ (CurveMeasure::L1 | CurveMeasure::C0)) => {
                    let (ambient, kind) = if m == CurveMeasure::L1 {
                        (l1_ambient(&p.weights), MeasureKind::L1)
                    } else {
                        (Ambient::C0, MeasureKind::C0)
                    };
                    vecs = vector_family(specs, ambient)?;
                    (CurveFamily::Vectors(&vecs), kind)
                }
                (_, m) => bail!("measure {m:?} does not apply to this family"),
            };
            let curve = residual_curve(family, p.k_max, kind, &cfg.measure())?;
            let converged = curve.points.iter().all(|(_, r)| tight(r.value, cfg.tol));
            (plain(json!(curve), converged), Some(curve))
        }
        Kind::VerifyPaperExample => {
            if !problem.payload.is_null() {
                let _: EmptyPayload = problem.payload()?;
            }
            let checks = fixtures::verify(cfg)?;
            let all = checks.iter().all(|c| c.pass);
            let outcome =
                Outcome { result: json!({ "assertions": checks, "all_pass": all }), converged: true, verified: Some(all) };
            (outcome, None)
        }
    })
}

/// Exit status for a finished run: only a failed verification is nonzero.
pub fn verified(report: &Report) -> bool {
    report.kind != Kind::VerifyPaperExample || report.result["all_pass"] == Value::Bool(true)
}

fn tight(v: Interval, tol: f64) -> bool {
    v.upper - v.lower <= tol * v.upper.abs().max(1.0)
}

fn vector_json(x: &FiniteVector) -> Vec<(Label, f64, f64)> {
    x.iter().map(|(l, v)| (l.clone(), v.re, v.im)).collect()
}

fn operator_json(t: &FiniteOperator) -> Value {
    let entries: Vec<(Label, Label, f64, f64)> = t.iter().map(|((r, c), v)| (r.clone(), c.clone(), v.re, v.im)).collect();
    json!({
        "domain": t.domain().value().to_string(),
        "codomain": t.codomain().value().to_string(),
        "field": t.field(),
        "entries": entries,
    })
}

fn bracket_json(b: &NormBracket) -> Value {
    let lower_witness = match &b.lower_witness {
        Some(LowerWitness::Vector(x)) => json!({ "vector": vector_json(x) }),
        Some(LowerWitness::DualOperator(s)) => json!({ "dual_operator": operator_json(s) }),
        None => Value::Null,
    };
    let upper_certificate = match &b.upper_witness {
        Some(UpperCertificate::Analytic(kind)) => json!({ "analytic": kind }),
        Some(UpperCertificate::Representation(rep)) => {
            let terms: Vec<Value> = rep
                .terms
                .iter()
                .map(|(functional, vector)| json!({ "functional": vector_json(functional), "vector": vector_json(vector) }))
                .collect();
            json!({ "representation": { "cost": rep.cost(), "terms": terms } })
        }
        None => Value::Null,
    };
    json!({
        "value": Interval { lower: b.lower, upper: b.upper },
        "exact": b.lower == b.upper,
        "iterations": b.iterations,
        "lower_witness": lower_witness,
        "upper_certificate": upper_certificate,
    })
}
