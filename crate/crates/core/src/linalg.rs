//! Dense helpers over nalgebra. Real-field matrices are decomposed in real
//! arithmetic so that singular vectors stay real.

use nalgebra::DMatrix;

use crate::spaces::{Field, Scalar};

pub(crate) struct Svd {
    /// m × r, columns are left singular vectors.
    pub u: DMatrix<Scalar>,
    /// Descending singular values, length r = min(m, n).
    pub s: Vec<f64>,
    /// n × r, columns are right singular vectors: `T v_k = s_k u_k`.
    pub v: DMatrix<Scalar>,
}

fn is_real(m: &DMatrix<Scalar>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn to_real(m: &DMatrix<Scalar>) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Scalar> {
    m.map(|x| Scalar::new(x, 0.0))
}

pub(crate) fn svd(m: &DMatrix<Scalar>, field: Field) -> Svd {
    let (rows, cols) = m.shape();
    let r = rows.min(cols);
    if r == 0 {
        return Svd { u: DMatrix::zeros(rows, 0), s: Vec::new(), v: DMatrix::zeros(cols, 0) };
    }
    let (u, s, v_t) = if field == Field::Real || is_real(m) {
        let d = to_real(m).svd(true, true);
        (
            to_complex(&d.u.expect("u requested")),
            d.singular_values.iter().copied().collect::<Vec<_>>(),
            to_complex(&d.v_t.expect("v_t requested")),
        )
    } else {
        let d = m.clone().svd(true, true);
        (d.u.expect("u requested"), d.singular_values.iter().copied().collect::<Vec<_>>(), d.v_t.expect("v_t requested"))
    };
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let mut su = DMatrix::zeros(rows, r);
    let mut sv = DMatrix::zeros(cols, r);
    let mut ss = Vec::with_capacity(r);
    for (k, &i) in order.iter().enumerate() {
        su.set_column(k, &u.column(i));
        sv.set_column(k, &v_t.row(i).adjoint());
        ss.push(s[i].max(0.0));
    }
    Svd { u: su, s: ss, v: sv }
}

pub(crate) fn singular_values(m: &DMatrix<Scalar>) -> Vec<f64> {
    let (rows, cols) = m.shape();
    if rows.min(cols) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = if is_real(m) {
        to_real(m).singular_values().iter().copied().collect()
    } else {
        m.clone().singular_values().iter().copied().collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub(crate) fn frobenius(m: &DMatrix<Scalar>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Upper bound on the spectral norm that absorbs SVD roundoff.
pub(crate) fn spectral_norm_upper(m: &DMatrix<Scalar>) -> f64 {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    let dim = m.nrows().max(m.ncols()) as f64;
    (top + 32.0 * f64::EPSILON * dim * frobenius(m)).min(frobenius(m) * (1.0 + 4.0 * f64::EPSILON))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Scalar>) -> Vec<f64> {
    let mut e: Vec<f64> = if is_real(m) {
        to_real(m).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    e.sort_by(f64::total_cmp);
    e
}

/// `m · x` with `x` given as a slice.
pub(crate) fn mat_vec(m: &DMatrix<Scalar>, x: &[Scalar]) -> Vec<Scalar> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum()).collect()
}

/// `m^T · y` (bilinear transpose, no conjugation).
pub(crate) fn mat_t_vec(m: &DMatrix<Scalar>, y: &[Scalar]) -> Vec<Scalar> {
    (0..m.ncols()).map(|j| (0..m.nrows()).map(|i| m[(i, j)] * y[i]).sum()).collect()
}
