//! Nuclear norms `‖T‖_N` of finite operators `T: ℓ^q(Λ) → ℓ^p(J)`.
//!
//! `‖T‖_N` is the infimum of `Σ ‖x_k‖_{q*} ‖y_k‖_p` over representations
//! `T = Σ y_k ⊗ x_k`. Every exact representation is an upper bound. Trace
//! duality gives lower bounds: for any `S: ℓ^p(J) → ℓ^q(Λ)`,
//! `|⟨T,S⟩| ≤ ‖S‖_{p→q} ‖T‖_N` with `⟨T,S⟩ = Σ T[j,α] S[α,j]`. In the
//! Hilbert case both ends meet at the sum of singular values.
//!
//! Representations are improved by an augmented-Lagrangian factor method on
//! the balanced objective `Σ ½(‖x_k‖²_{q*} + ‖y_k‖²_p)` subject to
//! `Σ y_k x_k^T = T`; its multiplier iterates double as dual witnesses.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::norms::{
    certified_upper_dense, op_norm_lower_dense, random_vector, restart_rng, round_down, round_up, LowerWitness, NormBracket,
    NormConfig, UpperCertificate,
};
use crate::operator::FiniteOperator;
use crate::spaces::{lp_norm, norming_functional, Exponent, Field, FiniteVector, Label, Scalar, TruncationPair};

/// `T = Σ_k vector_k ⊗ functional_k`, i.e. `Tx = Σ_k functional_k(x) vector_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneRepresentation {
    pub terms: Vec<(FiniteVector, FiniteVector)>,
    pub domain: Exponent,
    pub codomain: Exponent,
}

impl RankOneRepresentation {
    /// `Σ ‖functional_k‖_{q*} · ‖vector_k‖_p`.
    pub fn cost(&self) -> f64 {
        self.terms.iter().map(|(x, y)| x.lp_norm(self.domain.dual()) * y.lp_norm(self.codomain.value())).sum()
    }

    pub fn to_operator(&self, field: Field) -> FiniteOperator {
        let mut triples = Vec::new();
        for (x, y) in &self.terms {
            for (r, yv) in y.iter() {
                for (c, xv) in x.iter() {
                    triples.push((r.clone(), c.clone(), yv * xv));
                }
            }
        }
        FiniteOperator::new(triples, self.domain, self.codomain, field)
    }

    /// Largest entrywise deviation from `t` (equivalently, on basis vectors).
    pub fn residual(&self, t: &FiniteOperator) -> f64 {
        self.to_operator(t.field()).max_abs_diff(t)
    }
}

/// Trace pairing `⟨T,S⟩ = Σ_{j,α} T[j,α] S[α,j]` for `T: ℓ^q → ℓ^p` and
/// `S: ℓ^p → ℓ^q`.
pub fn trace_pairing(t: &FiniteOperator, s: &FiniteOperator) -> Result<Scalar> {
    if s.domain() != t.codomain() || s.codomain() != t.domain() {
        return Err(Error::ShapeMismatch(format!(
            "pairing needs S: l^{} -> l^{}, got S: l^{} -> l^{}",
            t.codomain().value(),
            t.domain().value(),
            s.domain().value(),
            s.codomain().value()
        )));
    }
    Ok(t.iter().map(|((j, a), v)| v * s.get(a, j)).sum())
}

pub fn nuclear_norm_exact_hilbert(t: &FiniteOperator) -> Result<f64> {
    if !t.is_hilbert() {
        return Err(Error::ExponentMismatch(format!(
            "exact nuclear norm needs q = p = 2, got q = {}, p = {}",
            t.domain().value(),
            t.codomain().value()
        )));
    }
    let (m, _, _) = t.to_dense();
    Ok(linalg::singular_values(&m).iter().fold(0.0, |a, s| a + s))
}

/// Eigenvalues of `T*T` on the span of `labels` (ascending). Labels outside
/// the column support contribute zero eigenvalues.
pub fn gram_eigenvalues(t: &FiniteOperator, labels: &[Label]) -> Vec<f64> {
    let m = t.to_dense_on(&t.rows(), labels);
    linalg::hermitian_eigenvalues(&(m.adjoint() * m))
}

/// Dense factors `A = Y X^T`: `X` is n × r (functionals), `Y` is m × r.
struct Factors {
    x: DMatrix<Scalar>,
    y: DMatrix<Scalar>,
}

impl Factors {
    fn cost(&self, q_dual: f64, p: f64) -> f64 {
        (0..self.x.ncols()).map(|k| lp_norm(self.x.column(k).as_slice(), q_dual) * lp_norm(self.y.column(k).as_slice(), p)).sum()
    }

    fn residual(&self, a: &DMatrix<Scalar>) -> DMatrix<Scalar> {
        a - &self.y * self.x.transpose()
    }

    fn append(&mut self, other: Factors) {
        let r = self.x.ncols();
        let extra = other.x.ncols();
        let mut x = self.x.clone().resize_horizontally(r + extra, Scalar::new(0.0, 0.0));
        let mut y = self.y.clone().resize_horizontally(r + extra, Scalar::new(0.0, 0.0));
        x.columns_mut(r, extra).copy_from(&other.x);
        y.columns_mut(r, extra).copy_from(&other.y);
        self.x = x;
        self.y = y;
    }
}

fn column_factors(a: &DMatrix<Scalar>) -> Factors {
    Factors { x: DMatrix::identity(a.ncols(), a.ncols()), y: a.clone() }
}

fn row_factors(a: &DMatrix<Scalar>) -> Factors {
    Factors { x: a.transpose(), y: DMatrix::identity(a.nrows(), a.nrows()) }
}

fn svd_factors(svd: &linalg::Svd, balanced: bool) -> Factors {
    let r = svd.s.len();
    let mut x = svd.v.map(|z| z.conj());
    let mut y = svd.u.clone();
    for k in 0..r {
        let (sx, sy) = if balanced { (svd.s[k].sqrt(), svd.s[k].sqrt()) } else { (1.0, svd.s[k]) };
        x.column_mut(k).scale_mut(sx);
        y.column_mut(k).scale_mut(sy);
    }
    Factors { x, y }
}

/// Cheaper of the column and row decompositions of `e`.
fn repair_factors(e: &DMatrix<Scalar>, q_dual: f64, p: f64) -> Factors {
    let cols = column_factors(e);
    let rows = row_factors(e);
    if cols.cost(q_dual, p) <= rows.cost(q_dual, p) {
        cols
    } else {
        rows
    }
}

/// Makes `Y X^T = A` exact: first by absorbing the residual into the factor
/// on the smaller side (least squares through a pseudo-inverse), then by
/// appending column/row terms for whatever is left.
fn make_exact(mut f: Factors, a: &DMatrix<Scalar>, q_dual: f64, p: f64) -> Factors {
    let e = f.residual(a);
    if e.iter().all(|z| *z == Scalar::new(0.0, 0.0)) {
        return f;
    }
    let (m, n) = a.shape();
    if m <= n {
        if let Ok(pinv) = f.y.clone().pseudo_inverse(1e-10) {
            let dx_t = pinv * &e;
            f.x += dx_t.transpose();
        }
    } else if let Ok(pinv) = f.x.transpose().pseudo_inverse(1e-10) {
        let dy = &e * pinv;
        f.y += dy;
    }
    let e = f.residual(a);
    if e.iter().any(|z| z.norm() > 0.0) {
        f.append(repair_factors(&e, q_dual, p));
    }
    f
}

fn grad_half_sq_norm(v: &[Scalar], s: f64) -> Vec<Scalar> {
    let norm = lp_norm(v, s);
    if norm == 0.0 {
        return vec![Scalar::new(0.0, 0.0); v.len()];
    }
    v.iter()
        .map(|z| {
            let a = z.norm();
            if a == 0.0 {
                Scalar::new(0.0, 0.0)
            } else {
                // ‖v‖^{2-s} · z |z|^{s-2}, written scale-safely
                z * ((a / norm).powf(s - 2.0))
            }
        })
        .collect()
}

fn columns_grad(m: &DMatrix<Scalar>, s: f64) -> DMatrix<Scalar> {
    let mut g = DMatrix::zeros(m.nrows(), m.ncols());
    for k in 0..m.ncols() {
        let col = grad_half_sq_norm(m.column(k).as_slice(), s);
        for (i, v) in col.into_iter().enumerate() {
            g[(i, k)] = v;
        }
    }
    g
}

fn half_sq_norms(m: &DMatrix<Scalar>, s: f64) -> f64 {
    (0..m.ncols()).map(|k| 0.5 * lp_norm(m.column(k).as_slice(), s).powi(2)).sum()
}

fn re_trace(p: &DMatrix<Scalar>, s: &DMatrix<Scalar>) -> f64 {
    // Re Σ P[j,α] S[α,j]
    p.iter().zip(s.transpose().iter()).map(|(a, b)| (a * b).re).sum()
}

struct Lagrangian<'a> {
    a: &'a DMatrix<Scalar>,
    s: DMatrix<Scalar>,
    rho: f64,
    q_dual: f64,
    p: f64,
}

impl Lagrangian<'_> {
    fn value(&self, f: &Factors) -> f64 {
        let prod = &f.y * f.x.transpose();
        let e = self.a - &prod;
        half_sq_norms(&f.x, self.q_dual) + half_sq_norms(&f.y, self.p) - re_trace(&prod, &self.s)
            + 0.5 * self.rho * e.norm_squared()
    }

    fn gradient(&self, f: &Factors) -> (DMatrix<Scalar>, DMatrix<Scalar>) {
        let e = f.residual(self.a);
        let gx = columns_grad(&f.x, self.q_dual)
            - (&self.s * &f.y).map(|z| z.conj())
            - (e.transpose() * f.y.map(|z| z.conj())) * Scalar::new(self.rho, 0.0);
        let gy = columns_grad(&f.y, self.p)
            - (self.s.transpose() * &f.x).map(|z| z.conj())
            - (&e * f.x.map(|z| z.conj())) * Scalar::new(self.rho, 0.0);
        (gx, gy)
    }
}

struct DualCandidate {
    ratio: f64,
    s: DMatrix<Scalar>,
}

/// `|⟨A,S⟩| / (certified upper bound on ‖S‖_{p→q})`, with `S` rotated so the
/// pairing is real and nonnegative.
fn dual_ratio(a: &DMatrix<Scalar>, s: &DMatrix<Scalar>, q: f64, p: f64) -> Option<DualCandidate> {
    let pairing: Scalar = a.iter().zip(s.transpose().iter()).map(|(x, y)| x * y).sum();
    let modulus = pairing.norm();
    if modulus == 0.0 || !modulus.is_finite() {
        return None;
    }
    let phase = pairing.conj() / modulus;
    let s = s * phase;
    // S acts ℓ^p → ℓ^q
    let (bound, _) = certified_upper_dense(&s, p, q);
    if bound.is_nan() || bound <= 0.0 {
        return None;
    }
    Some(DualCandidate { ratio: modulus / bound, s })
}

struct FactorRun {
    factors: Factors,
    duals: Vec<DualCandidate>,
    iterations: usize,
}

/// Augmented-Lagrangian run from the given factors and multiplier.
fn factor_optimize(a: &DMatrix<Scalar>, init: Factors, s0: DMatrix<Scalar>, q: f64, p: f64, max_iterations: usize) -> FactorRun {
    const OUTER: usize = 40;
    const INNER: usize = 25;
    let q_dual = q / (q - 1.0);
    let mut lag = Lagrangian { a, s: s0, rho: 1.0, q_dual, p };
    let mut f = init;
    let mut step = 0.1;
    let mut duals = Vec::new();
    let mut iterations = 0;
    let mut last_residual = f.residual(a).norm();
    for _ in 0..OUTER {
        for _ in 0..INNER {
            if iterations >= max_iterations {
                break;
            }
            iterations += 1;
            let (gx, gy) = lag.gradient(&f);
            let gnorm2 = gx.norm_squared() + gy.norm_squared();
            if gnorm2 < 1e-26 {
                break;
            }
            let current = lag.value(&f);
            let mut eta = step * 2.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial = Factors { x: &f.x - &gx * Scalar::new(eta, 0.0), y: &f.y - &gy * Scalar::new(eta, 0.0) };
                if lag.value(&trial) <= current - 1e-4 * eta * gnorm2 {
                    f = trial;
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            step = eta;
            if !accepted {
                break;
            }
        }
        let e = f.residual(a);
        lag.s += e.transpose().map(|z| z.conj()) * Scalar::new(lag.rho, 0.0);
        if let Some(c) = dual_ratio(a, &lag.s, q, p) {
            duals.push(c);
        }
        let r = e.norm();
        if r > 0.5 * last_residual {
            lag.rho = (lag.rho * 2.0).min(1e4);
        }
        last_residual = r;
        if iterations >= max_iterations {
            break;
        }
    }
    FactorRun { factors: f, duals, iterations }
}

/// Row-Hölder-extremal witness: `S[α,:] = t_α J_p(A[:,α])`.
fn column_mixed_witness(a: &DMatrix<Scalar>, q: f64, p: f64) -> DMatrix<Scalar> {
    let q_dual = q / (q - 1.0);
    let (m, n) = a.shape();
    let norms: Vec<Scalar> = (0..n).map(|k| Scalar::new(lp_norm(a.column(k).as_slice(), p), 0.0)).collect();
    let t = norming_functional(&norms, q_dual);
    let mut s = DMatrix::zeros(n, m);
    for k in 0..n {
        let w = norming_functional(a.column(k).as_slice(), p);
        for j in 0..m {
            s[(k, j)] = w[j] * t[k];
        }
    }
    s
}

/// Column-Hölder-extremal witness: `S[:,j] = t_j J_{q*}(A[j,:])`.
fn row_mixed_witness(a: &DMatrix<Scalar>, q: f64, p: f64) -> DMatrix<Scalar> {
    let q_dual = q / (q - 1.0);
    let (m, n) = a.shape();
    let rows: Vec<Vec<Scalar>> = (0..m).map(|j| a.row(j).iter().copied().collect()).collect();
    let norms: Vec<Scalar> = rows.iter().map(|r| Scalar::new(lp_norm(r, q_dual), 0.0)).collect();
    let t = norming_functional(&norms, p);
    let mut s = DMatrix::zeros(n, m);
    for (j, row) in rows.iter().enumerate() {
        let w = norming_functional(row, q_dual);
        for k in 0..n {
            s[(k, j)] = w[k] * t[j];
        }
    }
    s
}

fn phase_witness(a: &DMatrix<Scalar>) -> DMatrix<Scalar> {
    a.transpose().map(|z| if z.norm() == 0.0 { Scalar::new(0.0, 0.0) } else { z.conj() / z.norm() })
}

fn factors_to_representation(
    f: &Factors,
    scale: f64,
    rows: &[Label],
    cols: &[Label],
    domain: Exponent,
    codomain: Exponent,
) -> RankOneRepresentation {
    let mut terms = Vec::new();
    for k in 0..f.x.ncols() {
        let x = FiniteVector::new(cols.iter().cloned().zip(f.x.column(k).iter().copied()));
        let y = FiniteVector::new(rows.iter().cloned().zip(f.y.column(k).iter().map(|z| z * scale)));
        if !x.is_zero() && !y.is_zero() {
            terms.push((x, y));
        }
    }
    RankOneRepresentation { terms, domain, codomain }
}

fn dual_to_operator(s: &DMatrix<Scalar>, rows: &[Label], cols: &[Label], t: &FiniteOperator) -> FiniteOperator {
    // S: ℓ^p(J) → ℓ^q(Λ), rows indexed by Λ
    FiniteOperator::from_dense(s, cols, rows, t.codomain(), t.domain(), t.field())
}

/// Representation cost plus the ℓ¹ mass of what it fails to reproduce
/// (each `e_j ⊗ e_α` has nuclear norm 1), rounded outward.
fn certified_cost(rep: &RankOneRepresentation, t: &FiniteOperator) -> f64 {
    let leftover = t.sub(&rep.to_operator(t.field())).expect("same exponents");
    let mass = leftover.iter().map(|(_, v)| v.norm()).fold(0.0, |a, x| a + x);
    round_up(rep.cost() + mass)
}

fn hilbert_bracket(t: &FiniteOperator) -> NormBracket {
    let (m, rows, cols) = t.to_dense();
    let svd = linalg::svd(&m, t.field());
    // terms T v_k ⊗ conj(v_k)
    let keep: Vec<usize> = (0..svd.s.len()).filter(|&k| svd.s[k] > 0.0).collect();
    let v = DMatrix::from_fn(m.ncols(), keep.len(), |i, k| svd.v[(i, keep[k])]);
    let f = Factors { x: v.map(|z| z.conj()), y: &m * &v };
    let rep = factors_to_representation(&f, 1.0, &rows, &cols, t.domain(), t.codomain());
    let upper = certified_cost(&rep, t);
    let s = &svd.v * svd.u.adjoint();
    let (lower, witness) = match dual_ratio(&m, &s, 2.0, 2.0) {
        Some(c) => (round_down(c.ratio).min(upper), Some(LowerWitness::DualOperator(dual_to_operator(&c.s, &rows, &cols, t)))),
        None => (0.0, None),
    };
    NormBracket {
        lower,
        upper,
        lower_witness: witness,
        upper_witness: Some(UpperCertificate::Representation(rep)),
        iterations: 0,
        converged: true,
    }
}

/// Certified bracket `lower ≤ ‖T‖_N ≤ upper`.
///
/// The upper end is the cost of an explicit representation reproducing `T`;
/// the lower end is `|⟨T,S⟩|` over a certified bound on `‖S‖_{p→q}` for the
/// best dual witness found. `converged` means the gap is within
/// `tol · upper`.
pub fn nuclear_norm_bracket(t: &FiniteOperator, cfg: &NormConfig) -> Result<NormBracket> {
    cfg.validate()?;
    if t.is_zero() {
        let mut b = NormBracket::exact(0.0);
        b.upper_witness = Some(UpperCertificate::Representation(RankOneRepresentation {
            terms: Vec::new(),
            domain: t.domain(),
            codomain: t.codomain(),
        }));
        return Ok(b);
    }
    if t.is_hilbert() {
        return Ok(hilbert_bracket(t));
    }

    let (m, rows, cols) = t.to_dense();
    let q = t.domain().value();
    let p = t.codomain().value();
    let q_dual = t.domain().dual();
    let field = t.field();
    let scale = linalg::frobenius(&m);
    let a = &m / Scalar::new(scale, 0.0);
    let (rows_n, cols_n) = a.shape();
    let svd = linalg::svd(&a, field);

    // Exact representations.
    let mut best_rep = svd_factors(&svd, false);
    let mut best_cost = best_rep.cost(q_dual, p);
    for f in [column_factors(&a), row_factors(&a)] {
        let c = f.cost(q_dual, p);
        if c < best_cost {
            best_cost = c;
            best_rep = f;
        }
    }

    // Dual witnesses with closed forms.
    let ascent = op_norm_lower_dense(&a, q, p, field, cfg);
    let b = norming_functional(&linalg::mat_vec(&a, &ascent.x), p);
    let rank_one = DMatrix::from_fn(cols_n, rows_n, |al, j| ascent.x[al] * b[j]);
    let svd_dual = &svd.v * svd.u.adjoint();
    let mut duals: Vec<DualCandidate> =
        [rank_one, svd_dual.clone(), column_mixed_witness(&a, q, p), row_mixed_witness(&a, q, p), phase_witness(&a)]
            .iter()
            .filter_map(|s| dual_ratio(&a, s, q, p))
            .collect();

    // Factor optimization from the SVD and from seeded random starts.
    let r = cfg.max_terms.unwrap_or(rows_n.min(cols_n) + 2).min(rows_n * cols_n).max(1);
    let starts = cfg.restarts.min(4);
    let mut iterations = ascent.iterations;
    for start in 0..starts {
        let init = if start == 0 {
            let balanced = svd_factors(&svd, true);
            let mut rng = restart_rng(cfg.seed, 1 << 32);
            let k = r.min(balanced.x.ncols());
            let mut x = DMatrix::zeros(cols_n, r);
            let mut y = DMatrix::zeros(rows_n, r);
            x.columns_mut(0, k).copy_from(&balanced.x.columns(0, k));
            y.columns_mut(0, k).copy_from(&balanced.y.columns(0, k));
            for c in k..r {
                let xv = random_vector(&mut rng, cols_n, field);
                let yv = random_vector(&mut rng, rows_n, field);
                for i in 0..cols_n {
                    x[(i, c)] = xv[i] * 1e-3;
                }
                for i in 0..rows_n {
                    y[(i, c)] = yv[i] * 1e-3;
                }
            }
            Factors { x, y }
        } else {
            let mut rng = restart_rng(cfg.seed, (1 << 32) + start as u64);
            let xv = random_vector(&mut rng, cols_n * r, field);
            let yv = random_vector(&mut rng, rows_n * r, field);
            let amp = (1.0 / r as f64).sqrt();
            Factors {
                x: DMatrix::from_vec(cols_n, r, xv) * Scalar::new(amp, 0.0),
                y: DMatrix::from_vec(rows_n, r, yv) * Scalar::new(amp, 0.0),
            }
        };
        let run = factor_optimize(&a, init, svd_dual.clone(), q, p, cfg.max_iterations);
        iterations += run.iterations;
        duals.extend(run.duals);
        let exact = make_exact(run.factors, &a, q_dual, p);
        let c = exact.cost(q_dual, p);
        if c < best_cost {
            best_cost = c;
            best_rep = exact;
        }
    }

    let rep = factors_to_representation(&best_rep, scale, &rows, &cols, t.domain(), t.codomain());
    let upper = certified_cost(&rep, t);
    let best_dual = duals.into_iter().fold(None::<DualCandidate>, |acc, c| match acc {
        Some(b) if b.ratio >= c.ratio => Some(b),
        _ => Some(c),
    });
    let (lower, witness) = match best_dual {
        Some(c) => {
            let s = dual_to_operator(&c.s, &rows, &cols, t);
            (round_down(c.ratio * scale).min(upper), Some(LowerWitness::DualOperator(s)))
        }
        None => (0.0, None),
    };
    Ok(NormBracket {
        lower,
        upper,
        lower_witness: witness,
        upper_witness: Some(UpperCertificate::Representation(rep)),
        iterations,
        converged: upper - lower <= cfg.tol * upper,
    })
}

/// Which compression of `T` by a truncation pair `(C, D)` to form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompressMode {
    /// `P_C T Q_D`
    Inner,
    /// `Q_D S P_C` for dual-shaped `S: ℓ^p(J) → ℓ^q(Λ)`: keeps rows in `D`
    /// and columns in `C`.
    Outer,
    /// `(I − P_C) T (I − Q_D)`
    ResidualN,
    /// `T − P_C T Q_D`
    ResidualChi,
}

pub fn compress(t: &FiniteOperator, pair: &TruncationPair, mode: CompressMode) -> FiniteOperator {
    match mode {
        CompressMode::Inner => t.filter(|r, c| pair.rows.contains(r) && pair.cols.contains(c)),
        CompressMode::Outer => t.filter(|r, c| pair.cols.contains(r) && pair.rows.contains(c)),
        CompressMode::ResidualN => t.filter(|r, c| !pair.rows.contains(r) && !pair.cols.contains(c)),
        CompressMode::ResidualChi => t.filter(|r, c| !(pair.rows.contains(r) && pair.cols.contains(c))),
    }
}

/// Pairwise disjoint row blocks `C_γ` and column blocks `D_γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem {
    blocks: Vec<(BTreeSet<Label>, BTreeSet<Label>)>,
}

impl BlockSystem {
    pub fn new(blocks: Vec<(BTreeSet<Label>, BTreeSet<Label>)>) -> Result<Self> {
        let mut seen_rows = BTreeSet::new();
        let mut seen_cols = BTreeSet::new();
        for (rows, cols) in &blocks {
            if rows.is_empty() || cols.is_empty() {
                return Err(Error::InvalidParameter("blocks must be nonempty on both sides".into()));
            }
            for r in rows {
                if !seen_rows.insert(r.clone()) {
                    return Err(Error::OverlappingBlocks(r.clone()));
                }
            }
            for c in cols {
                if !seen_cols.insert(c.clone()) {
                    return Err(Error::OverlappingBlocks(c.clone()));
                }
            }
        }
        Ok(BlockSystem { blocks })
    }

    pub fn blocks(&self) -> &[(BTreeSet<Label>, BTreeSet<Label>)] {
        &self.blocks
    }

    pub fn pair(&self, index: usize) -> TruncationPair {
        let (rows, cols) = &self.blocks[index];
        TruncationPair { rows: rows.clone(), cols: cols.clone() }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// `Σ_γ P_{C_γ} T Q_{D_γ}`.
pub fn block_diagonal_part(t: &FiniteOperator, blocks: &BlockSystem) -> FiniteOperator {
    t.filter(|r, c| blocks.blocks.iter().any(|(rows, cols)| rows.contains(r) && cols.contains(c)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockNuclearSum {
    /// Sum of per-block lower ends.
    pub lower: f64,
    /// Sum of per-block upper ends.
    pub upper: f64,
    pub per_block: Vec<NormBracket>,
    /// Whether `‖T̃‖_N = Σ_γ ‖P_{C_γ} T Q_{D_γ}‖_N` is known to hold, which
    /// requires `p ≤ q`.
    pub identity_asserted: bool,
}

pub fn block_nuclear_sum(t: &FiniteOperator, blocks: &BlockSystem, cfg: &NormConfig) -> Result<BlockNuclearSum> {
    let mut per_block = Vec::with_capacity(blocks.len());
    for i in 0..blocks.len() {
        let part = compress(t, &blocks.pair(i), CompressMode::Inner);
        per_block.push(nuclear_norm_bracket(&part, cfg)?);
    }
    Ok(BlockNuclearSum {
        lower: per_block.iter().map(|b| b.lower).fold(0.0, |a, x| a + x),
        upper: per_block.iter().map(|b| b.upper).fold(0.0, |a, x| a + x),
        per_block,
        identity_asserted: t.codomain().value() <= t.domain().value(),
    })
}
