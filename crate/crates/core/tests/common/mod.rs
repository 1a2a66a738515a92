#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use nucmeasure::measures::OperatorFamily;
use nucmeasure::{Exponent, Field, FiniteOperator, Label, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn h() -> Exponent {
    Exponent::HILBERT
}

pub fn exp(v: f64) -> Exponent {
    Exponent::new(v).unwrap()
}

pub fn labels(ls: &[i64]) -> BTreeSet<Label> {
    ls.iter().map(|&l| Label::Int(l)).collect()
}

/// `T_n x = x_n e_n`.
pub fn t_n(n: i64) -> FiniteOperator {
    FiniteOperator::real([(n, n, 1.0)], h(), h())
}

/// `U_n x = (x_1 + x_n)(e_1 + e_n)`.
pub fn u_n(n: i64) -> FiniteOperator {
    FiniteOperator::real([(1, 1, 1.0), (1, n, 1.0), (n, 1, 1.0), (n, n, 1.0)], h(), h())
}

/// `U x = x_n e_1 + (x_1 + x_n) e_n`.
pub fn u_residual(n: i64) -> FiniteOperator {
    FiniteOperator::real([(1, n, 1.0), (n, 1, 1.0), (n, n, 1.0)], h(), h())
}

pub fn t_family(n: i64) -> OperatorFamily {
    OperatorFamily::new((1..=n).map(t_n).collect()).unwrap()
}

/// `{U_n : 2 ≤ n ≤ last} ∪ {10 T_1}`.
pub fn b_family(last: i64) -> OperatorFamily {
    let mut members: Vec<FiniteOperator> = (2..=last).map(u_n).collect();
    members.push(t_n(1).scale(Scalar::new(10.0, 0.0)));
    OperatorFamily::new(members).unwrap()
}

pub fn random_dense(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

pub fn random_operator(rng: &mut ChaCha8Rng, m: usize, n: usize, q: Exponent, p: Exponent) -> FiniteOperator {
    FiniteOperator::from_rows(&random_dense(rng, m, n), q, p)
}

pub fn random_complex_operator(rng: &mut ChaCha8Rng, m: usize, n: usize, q: Exponent, p: Exponent) -> FiniteOperator {
    let mut triples = Vec::new();
    for i in 0..m {
        for j in 0..n {
            let z = Scalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            triples.push((i as i64 + 1, j as i64 + 1, z));
        }
    }
    FiniteOperator::new(triples, q, p, Field::Complex)
}

/// Sparse Hilbert-space operator with entries at random positions of an
/// `m × n` label grid.
pub fn random_sparse(rng: &mut ChaCha8Rng, m: usize, n: usize, nnz: usize) -> FiniteOperator {
    let triples: Vec<(i64, i64, f64)> = (0..nnz)
        .map(|_| {
            let r = rng.random_range(1..=m as i64);
            let c = rng.random_range(1..=n as i64);
            let v = rng.random_range(0.1..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (r, c, v)
        })
        .collect();
    FiniteOperator::real(triples, h(), h())
}

/// Random orthogonal matrix from the QR factorization of a Gaussian-like matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

/// Random split of `items` into `parts` nonempty groups.
pub fn random_partition<T: Clone>(rng: &mut ChaCha8Rng, items: &[T], parts: usize) -> Vec<Vec<T>> {
    let mut shuffled = items.to_vec();
    shuffled.shuffle(rng);
    let mut groups: Vec<Vec<T>> = vec![Vec::new(); parts];
    for (i, x) in shuffled.into_iter().enumerate() {
        let g = if i < parts { i } else { rng.random_range(0..parts) };
        groups[g].push(x);
    }
    groups
}

/// `R^T A R` style change of labels `1..=n` by an orthogonal matrix acting on
/// both sides: returns `O T O^T`.
pub fn conjugate(t: &FiniteOperator, o: &DMatrix<f64>) -> FiniteOperator {
    let n = o.nrows();
    let ls: Vec<Label> = (1..=n as i64).map(Label::Int).collect();
    let m = t.to_dense_on(&ls, &ls);
    let oc = o.map(|x| Scalar::new(x, 0.0));
    let out = &oc * m * oc.transpose();
    FiniteOperator::from_dense(&out, &ls, &ls, t.domain(), t.codomain(), t.field())
}
