//! Bundled example problems and the checks run by `verify-paper-example`.

use anyhow::{Context, Result};
use nucmeasure::measures::{
    chi_sandwich, nuclear_measure, residual_curve, CurveFamily, MeasureConfig, MeasureKind, OperatorFamily,
};
use nucmeasure::nuclear::{gram_eigenvalues, nuclear_norm_bracket, nuclear_norm_exact_hilbert};
use nucmeasure::spaces::excess;
use nucmeasure::{FiniteOperator, Label, Scalar};
use serde::Serialize;

use crate::problem::{operator_family, Config, OperatorFamilyPayload, OperatorPayload, ProblemFile};

/// `U x = x₃ e₁ + (x₁ + x₃) e₃` on labels `{1, 2, 3}`.
pub const EXAMPLE_U: &str = include_str!("../fixtures/example_u.json");
/// `{T_n : n ≤ 50}` with `T_n x = x_n e_n`.
pub const EXAMPLE_A: &str = include_str!("../fixtures/example_a.json");
/// `{U_n : 2 ≤ n ≤ 20} ∪ {10 T₁}` with `U_n x = (x₁ + x_n)(e₁ + e_n)`.
pub const EXAMPLE_B: &str = include_str!("../fixtures/example_b.json");

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn load_operator(text: &str) -> Result<FiniteOperator> {
    let p = ProblemFile::parse(text)?;
    p.payload::<OperatorPayload>()?.operator.to_operator()
}

fn load_family(text: &str) -> Result<(OperatorFamily, MeasureConfig, (usize, usize))> {
    let p = ProblemFile::parse(text)?;
    let fam = operator_family(&p.payload::<OperatorFamilyPayload>()?.family)?;
    Ok((fam, p.config.measure(), p.config.budgets()))
}

pub fn verify(cfg: &Config) -> Result<Vec<Check>> {
    let s5 = 5f64.sqrt();
    let mut checks = Vec::new();

    let u = load_operator(EXAMPLE_U).context("bundled example U")?;
    let exact = nuclear_norm_exact_hilbert(&u)?;
    let bracket = nuclear_norm_bracket(&u, &cfg.norm())?;
    checks.push(check(
        "nuclear norm of U equals sqrt 5",
        (exact - s5).abs() <= 1e-9 && bracket.contains(s5, 1e-9),
        format!("singular values give {exact:?}; bracket [{:?}, {:?}]", bracket.lower, bracket.upper),
    ));

    let last = u
        .rows()
        .into_iter()
        .chain(u.cols())
        .filter_map(|l| if let Label::Int(i) = l { Some(i) } else { None })
        .max()
        .unwrap_or(1);
    let labels: Vec<Label> = (1..=last).map(Label::Int).collect();
    let ev = gram_eigenvalues(&u, &labels);
    let expected = [0.0, (3.0 - s5) / 2.0, (3.0 + s5) / 2.0];
    checks.push(check(
        "eigenvalues of U*U are 0 and (3 +- sqrt 5)/2",
        ev.len() == 3 && ev.iter().zip(expected).all(|(a, b)| (a - b).abs() <= 1e-9),
        format!("{ev:?}"),
    ));

    let (a, a_cfg, _) = load_family(EXAMPLE_A).context("bundled family A")?;
    let norms = a.members().iter().map(nuclear_norm_exact_hilbert).collect::<nucmeasure::Result<Vec<_>>>()?;
    checks.push(check(
        "each T_n has nuclear norm 1",
        norms.iter().all(|&v| v == 1.0),
        format!("{} members, max deviation {:?}", norms.len(), norms.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)),
    ));

    let k_max = a.members().len() - 1;
    let curve = residual_curve(CurveFamily::Operators(&a), k_max, MeasureKind::Chi, &a_cfg)?;
    let off: Vec<usize> = curve.points.iter().filter(|(_, r)| (r.value.upper - 1.0).abs() > 1e-12).map(|(k, _)| *k).collect();
    checks.push(check(
        "formula on A equals 1 for every budget below 50",
        off.is_empty(),
        format!("chi formula, budgets (k, k) for k <= {k_max}; off at {off:?}"),
    ));

    let exact_cfg = MeasureConfig { enumeration_limit: None, ..MeasureConfig::exact() };
    let small: Vec<(usize, f64, Option<f64>)> = (0..=1)
        .map(|k| nuclear_measure(&a, (k, k), &exact_cfg).map(|r| (k, r.value.upper, r.certified_lower)))
        .collect::<nucmeasure::Result<_>>()?;
    checks.push(check(
        "nuclear measure on A equals 1 at small budgets",
        small.iter().all(|&(_, v, l)| v == 1.0 && l == Some(1.0)),
        format!("exact (k, upper, certified lower): {small:?}"),
    ));

    let (b, b_cfg, budgets) = load_family(EXAMPLE_B).context("bundled family B")?;
    let sandwich = chi_sandwich(&b, budgets, &b_cfg)?;
    let lower = sandwich.formula.certified_lower.unwrap_or(0.0);
    checks.push(check(
        "formula on B is at least sqrt 5",
        lower >= s5 - 1e-9,
        format!(
            "budgets {budgets:?}: certified [{lower:?}, {:?}] over {} pairs",
            sandwich.formula.value.upper, sandwich.formula.evaluated_pairs
        ),
    ));

    let ten_t1 = FiniteOperator::real([(1, 1, 1.0)], b.domain(), b.codomain()).scale(Scalar::new(10.0, 0.0));
    let targets = [FiniteOperator::zero(b.domain(), b.codomain(), b.field()), ten_t1];
    let e = excess(b.members(), &targets, |x, y| x.sub(y).and_then(|d| nuclear_norm_exact_hilbert(&d)).unwrap_or(f64::INFINITY))?;
    checks.push(check("excess of B over {0, 10 T_1} is at most 2", e <= 2.0 + 1e-9, format!("{e:?}")));

    Ok(checks)
}
