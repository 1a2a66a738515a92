//! Operator norms `‖T‖_{q→p}` of finite matrices.
//!
//! The Hilbert case (`q = p = 2`) is the largest singular value. For other
//! exponents the mixed norm has no closed form, so [`op_norm_bracket`]
//! returns a certified interval: the lower end is a ratio actually attained
//! by a vector found through fixed-point ascent, the upper end an analytic
//! bound that holds for every matrix.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::nuclear::RankOneRepresentation;
use crate::operator::FiniteOperator;
use crate::spaces::{lp_norm, norming_functional, Exponent, Field, FiniteVector, Scalar};

/// Which analytic bound produced a certified upper value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    RowHolder,
    ColumnHolder,
    RieszThorin,
    Spectral,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LowerWitness {
    /// Unit vector `x` with `‖Tx‖_p ≥ lower`.
    Vector(FiniteVector),
    /// Dual operator `S` with `|⟨T,S⟩| / ‖S‖ ≥ lower`.
    DualOperator(FiniteOperator),
}

#[derive(Debug, Clone, PartialEq)]
pub enum UpperCertificate {
    Analytic(BoundKind),
    Representation(RankOneRepresentation),
}

/// Certified interval around a norm value.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: Option<LowerWitness>,
    pub upper_witness: Option<UpperCertificate>,
    pub iterations: usize,
    pub converged: bool,
}

impl NormBracket {
    pub fn exact(value: f64) -> Self {
        NormBracket { lower: value, upper: value, lower_witness: None, upper_witness: None, iterations: 0, converged: true }
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && value <= self.upper + slack
    }
}

/// Numerical knobs shared by the bracket computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConfig {
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Rank-one term budget for nuclear representations; `None` picks
    /// `min(rows, cols) + 2`.
    pub max_terms: Option<usize>,
    pub max_iterations: usize,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig { tol: 1e-9, restarts: 32, seed: 0, max_terms: None, max_iterations: 10_000 }
    }
}

impl NormConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        if self.max_terms == Some(0) {
            return Err(Error::InvalidParameter("max_terms must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reflexivity {
    Reflexive,
    NonReflexive,
}

/// Reflexivity of `N(ℓ^q, ℓ^p)` (equivalently `K(ℓ^p, ℓ^q)`) over infinite
/// index sets: reflexive exactly when `p > q`.
pub fn reflexivity_class(p: Exponent, q: Exponent) -> Reflexivity {
    if p.value() > q.value() {
        Reflexivity::Reflexive
    } else {
        Reflexivity::NonReflexive
    }
}

pub fn op_norm_exact_hilbert(t: &FiniteOperator) -> Result<f64> {
    if !t.is_hilbert() {
        return Err(Error::ExponentMismatch(format!(
            "exact operator norm needs q = p = 2, got q = {}, p = {}",
            t.domain().value(),
            t.codomain().value()
        )));
    }
    let (m, _, _) = t.to_dense();
    Ok(linalg::singular_values(&m).first().copied().unwrap_or(0.0))
}

/// Row-wise Hölder bound: the ℓ^p norm over rows of the row ℓ^{q*} norms,
/// rounded outward.
pub fn op_norm_cert_upper(t: &FiniteOperator) -> f64 {
    let (m, _, _) = t.to_dense();
    round_up(row_holder(&m, t.domain().value(), t.codomain().value()))
}

/// Tightest of the certified analytic upper bounds on `‖T‖_{q→p}`.
pub fn certified_op_upper(t: &FiniteOperator) -> (f64, BoundKind) {
    let (m, _, _) = t.to_dense();
    certified_upper_dense(&m, t.domain().value(), t.codomain().value())
}

pub(crate) fn row_holder(m: &DMatrix<Scalar>, q: f64, p: f64) -> f64 {
    let q_dual = q / (q - 1.0);
    let rows: Vec<Scalar> = (0..m.nrows())
        .map(|i| {
            let row: Vec<Scalar> = m.row(i).iter().copied().collect();
            Scalar::new(lp_norm(&row, q_dual), 0.0)
        })
        .collect();
    lp_norm(&rows, p)
}

pub(crate) fn column_holder(m: &DMatrix<Scalar>, q: f64, p: f64) -> f64 {
    let q_dual = q / (q - 1.0);
    let cols: Vec<Scalar> = (0..m.ncols()).map(|j| Scalar::new(lp_norm(m.column(j).as_slice(), p), 0.0)).collect();
    lp_norm(&cols, q_dual)
}

/// Riesz–Thorin: `log ‖T‖_{1/a → 1/b}` is convex in `(a, b) ∈ [0,1]²`, so
/// any convex combination of corner points with known bounds bounds the
/// target. Corners: 1→1, ∞→∞, 1→∞ exactly; ∞→1 by the entry sum; 2→2 by
/// the spectral norm. Bounds for complex scalars dominate the real case.
fn riesz_thorin(m: &DMatrix<Scalar>, q: f64, p: f64) -> f64 {
    let abs = m.map(|z| z.norm());
    let one_one = (0..abs.ncols()).map(|j| abs.column(j).sum()).fold(0.0, f64::max);
    let inf_inf = (0..abs.nrows()).map(|i| abs.row(i).sum()).fold(0.0, f64::max);
    let one_inf = abs.iter().copied().fold(0.0, f64::max);
    let inf_one = abs.sum();
    let spectral = linalg::spectral_norm_upper(m);
    let corners = [
        ((1.0_f64, 1.0_f64), one_one),
        ((0.0, 0.0), inf_inf),
        ((1.0, 0.0), one_inf),
        ((0.0, 1.0), inf_one),
        ((0.5, 0.5), spectral),
    ];
    let target = (1.0 / q, 1.0 / p);
    let mut best = f64::INFINITY;
    let eval = |weights: &[(usize, f64)]| -> f64 {
        let mut log = 0.0;
        for &(i, w) in weights {
            if w <= 0.0 {
                continue;
            }
            if corners[i].1 == 0.0 {
                return 0.0;
            }
            log += w * corners[i].1.ln();
        }
        log.exp()
    };
    const EPS: f64 = 1e-12;
    for i in 0..corners.len() {
        for j in (i + 1)..corners.len() {
            for k in (j + 1)..corners.len() {
                let (a, b, c) = (corners[i].0, corners[j].0, corners[k].0);
                let det = (b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1);
                if det.abs() < 1e-14 {
                    continue;
                }
                let (dx, dy) = (target.0 - a.0, target.1 - a.1);
                let l1 = (dx * (c.1 - a.1) - (c.0 - a.0) * dy) / det;
                let l2 = ((b.0 - a.0) * dy - dx * (b.1 - a.1)) / det;
                let l0 = 1.0 - l1 - l2;
                if l0 >= -EPS && l1 >= -EPS && l2 >= -EPS {
                    let w = [(i, l0.max(0.0)), (j, l1.max(0.0)), (k, l2.max(0.0))];
                    let total: f64 = w.iter().map(|x| x.1).sum();
                    let w = w.map(|(idx, x)| (idx, x / total));
                    best = best.min(eval(&w));
                }
            }
        }
    }
    best
}

/// Relative slack added to certified ends to absorb floating-point rounding.
pub(crate) const ROUNDING: f64 = 64.0 * f64::EPSILON;

pub(crate) fn round_up(x: f64) -> f64 {
    x * (1.0 + ROUNDING)
}

pub(crate) fn round_down(x: f64) -> f64 {
    x * (1.0 - ROUNDING)
}

pub(crate) fn certified_upper_dense(m: &DMatrix<Scalar>, q: f64, p: f64) -> (f64, BoundKind) {
    if m.iter().all(|z| *z == Scalar::new(0.0, 0.0)) {
        return (0.0, BoundKind::Zero);
    }
    let mut candidates = vec![
        (row_holder(m, q, p), BoundKind::RowHolder),
        (column_holder(m, q, p), BoundKind::ColumnHolder),
        (riesz_thorin(m, q, p), BoundKind::RieszThorin),
    ];
    if q == 2.0 && p == 2.0 {
        candidates.push((linalg::spectral_norm_upper(m), BoundKind::Spectral));
    }
    let (bound, kind) =
        candidates.into_iter().fold((f64::INFINITY, BoundKind::RowHolder), |best, c| if c.0 < best.0 { c } else { best });
    (round_up(bound), kind)
}

pub(crate) fn restart_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn random_vector(rng: &mut ChaCha8Rng, len: usize, field: Field) -> Vec<Scalar> {
    (0..len)
        .map(|_| {
            let re = rng.random_range(-1.0..1.0);
            let im = match field {
                Field::Real => 0.0,
                Field::Complex => rng.random_range(-1.0..1.0),
            };
            Scalar::new(re, im)
        })
        .collect()
}

pub(crate) struct AscentOutcome {
    pub value: f64,
    pub x: Vec<Scalar>,
    pub iterations: usize,
    pub converged: bool,
}

/// Fixed-point ascent for `max ‖Tx‖_p` over the ℓ^q unit sphere:
/// `x ← J_{q*}(T^T J_p(Tx))`, where `J_r` is the norming functional map.
/// The attained ratio is nondecreasing along the iteration.
pub(crate) fn op_norm_ascent(
    m: &DMatrix<Scalar>,
    q: f64,
    p: f64,
    start: &[Scalar],
    tol: f64,
    max_iterations: usize,
) -> AscentOutcome {
    let q_dual = q / (q - 1.0);
    let scale = lp_norm(start, q);
    if scale == 0.0 {
        return AscentOutcome { value: 0.0, x: start.to_vec(), iterations: 0, converged: false };
    }
    let mut x: Vec<Scalar> = start.iter().map(|v| v / scale).collect();
    let mut value = lp_norm(&linalg::mat_vec(m, &x), p);
    let mut best = (value, x.clone());
    let mut calm = 0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let y = linalg::mat_vec(m, &x);
        let w = norming_functional(&y, p);
        let z = linalg::mat_t_vec(m, &w);
        if lp_norm(&z, q_dual) == 0.0 {
            break;
        }
        x = norming_functional(&z, q_dual);
        let next = lp_norm(&linalg::mat_vec(m, &x), p);
        if next > best.0 {
            best = (next, x.clone());
        }
        let change = (next - value).abs() / next.max(f64::MIN_POSITIVE);
        value = next;
        if change < tol {
            calm += 1;
            if calm >= 3 {
                converged = true;
                break;
            }
        } else {
            calm = 0;
        }
    }
    AscentOutcome { value: best.0, x: best.1, iterations, converged }
}

/// Multi-start ascent on a dense matrix. Start 0 is the top right singular
/// vector, start 1 the basis vector of the heaviest column, the rest are
/// seeded random vectors (one stream per restart).
pub(crate) fn op_norm_lower_dense(m: &DMatrix<Scalar>, q: f64, p: f64, field: Field, cfg: &NormConfig) -> AscentOutcome {
    let n = m.ncols();
    let mut best = AscentOutcome { value: 0.0, x: vec![Scalar::new(0.0, 0.0); n], iterations: 0, converged: true };
    if n == 0 || m.nrows() == 0 {
        return best;
    }
    let mut total_iterations = 0;
    for restart in 0..cfg.restarts {
        let start = match restart {
            0 => linalg::svd(m, field).v.column(0).iter().copied().collect(),
            1 => {
                let heaviest = (0..n)
                    .map(|j| lp_norm(m.column(j).as_slice(), p))
                    .enumerate()
                    .fold((0, -1.0), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc })
                    .0;
                let mut e = vec![Scalar::new(0.0, 0.0); n];
                e[heaviest] = Scalar::new(1.0, 0.0);
                e
            }
            _ => random_vector(&mut restart_rng(cfg.seed, restart as u64), n, field),
        };
        let outcome = op_norm_ascent(m, q, p, &start, cfg.tol, cfg.max_iterations);
        total_iterations += outcome.iterations;
        if outcome.value > best.value {
            best = outcome;
        }
    }
    best.iterations = total_iterations;
    best
}

/// Certified bracket for `‖T‖_{q→p}`.
pub fn op_norm_bracket(t: &FiniteOperator, cfg: &NormConfig) -> Result<NormBracket> {
    cfg.validate()?;
    if t.is_zero() {
        let mut b = NormBracket::exact(0.0);
        b.upper_witness = Some(UpperCertificate::Analytic(BoundKind::Zero));
        return Ok(b);
    }
    let (m, _, cols) = t.to_dense();
    let q = t.domain().value();
    let p = t.codomain().value();
    let (cert, kind) = certified_upper_dense(&m, q, p);

    if t.is_hilbert() {
        let d = linalg::svd(&m, t.field());
        let exact = d.s[0];
        let upper = cert.min(exact);
        let x = FiniteVector::new(cols.iter().cloned().zip(d.v.column(0).iter().copied()));
        return Ok(NormBracket {
            lower: exact.min(upper),
            upper,
            lower_witness: Some(LowerWitness::Vector(x)),
            upper_witness: Some(UpperCertificate::Analytic(BoundKind::Spectral)),
            iterations: 0,
            converged: true,
        });
    }

    let best = op_norm_lower_dense(&m, q, p, t.field(), cfg);
    let x = FiniteVector::new(cols.iter().cloned().zip(best.x.iter().copied()));
    Ok(NormBracket {
        lower: best.value.min(cert),
        upper: cert,
        lower_witness: Some(LowerWitness::Vector(x)),
        upper_witness: Some(UpperCertificate::Analytic(kind)),
        iterations: best.iterations,
        converged: best.converged,
    })
}
