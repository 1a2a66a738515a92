mod common;

use common::*;
use nucmeasure::norms::{op_norm_bracket, op_norm_cert_upper, op_norm_exact_hilbert};
use nucmeasure::nuclear::{compress, CompressMode};
use nucmeasure::spaces::lp_norm;
use nucmeasure::{FiniteOperator, FiniteVector, NormConfig, Scalar, TruncationPair};
use proptest::prelude::*;

fn matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-2.0..2.0f64, n), m))
}

fn exponent() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![1.5, 2.0, 3.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lower_end_never_exceeds_the_row_holder_bound(rows in matrix(4, 4), q in exponent(), p in exponent()) {
        let t = FiniteOperator::from_rows(&rows, exp(q), exp(p));
        let b = op_norm_bracket(&t, &NormConfig::default()).unwrap();
        prop_assert!(b.lower <= op_norm_cert_upper(&t));
        prop_assert!(b.lower <= b.upper);
    }

    #[test]
    fn hilbert_bracket_collapses(rows in matrix(6, 6)) {
        let t = FiniteOperator::from_rows(&rows, h(), h());
        let b = op_norm_bracket(&t, &NormConfig::default()).unwrap();
        let v = op_norm_exact_hilbert(&t).unwrap();
        prop_assert!(b.gap() <= 1e-9);
        prop_assert!((b.lower - v).abs() <= 1e-9 && (b.upper - v).abs() <= 1e-9);
    }

    #[test]
    fn cert_upper_dominates_images(rows in matrix(5, 5), x in prop::collection::vec(-1.0..1.0f64, 5), q in exponent(), p in exponent()) {
        let t = FiniteOperator::from_rows(&rows, exp(q), exp(p));
        let n = rows[0].len();
        let xs: Vec<Scalar> = x[..n].iter().map(|&v| Scalar::new(v, 0.0)).collect();
        let xn = lp_norm(&xs, q);
        prop_assume!(xn > 0.0);
        let tx = t.apply(&FiniteVector::from_slice(&x[..n]));
        prop_assert!(tx.lp_norm(p) <= op_norm_cert_upper(&t) * xn * (1.0 + 1e-12));
    }

    #[test]
    fn compression_does_not_increase_the_norm(
        rows in matrix(4, 4),
        q in exponent(),
        p in exponent(),
        c in prop::collection::btree_set(1i64..=4, 0..=4),
        d in prop::collection::btree_set(1i64..=4, 0..=4),
    ) {
        let t = FiniteOperator::from_rows(&rows, exp(q), exp(p));
        let pair = TruncationPair::new(c, d);
        let cfg = NormConfig::default();
        let inner = op_norm_bracket(&compress(&t, &pair, CompressMode::Inner), &cfg).unwrap();
        let full = op_norm_bracket(&t, &cfg).unwrap();
        prop_assert!(inner.lower <= full.upper + 1e-9);
    }
}

/// Dense angular grid over the ℓ^q unit sphere of ℝ².
fn grid_max(t: &FiniteOperator, q: f64, p: f64) -> f64 {
    let steps = 200_000;
    (0..steps)
        .map(|i| {
            let theta = std::f64::consts::PI * i as f64 / steps as f64;
            let raw = [theta.cos(), theta.sin()];
            let norm = (raw[0].abs().powf(q) + raw[1].abs().powf(q)).powf(1.0 / q);
            let x = FiniteVector::from_slice(&[raw[0] / norm, raw[1] / norm]);
            t.apply(&x).lp_norm(p)
        })
        .fold(0.0, f64::max)
}

#[test]
fn ascent_matches_a_dense_grid_on_2x2() {
    let mut rng = rng(21);
    for &q in &[1.5, 2.0, 3.0] {
        for &p in &[1.5, 2.0, 3.0] {
            for _ in 0..4 {
                let t = random_operator(&mut rng, 2, 2, exp(q), exp(p));
                let b = op_norm_bracket(&t, &NormConfig::default()).unwrap();
                let g = grid_max(&t, q, p);
                assert!((b.lower - g).abs() <= 1e-4, "q={q} p={p}: ascent {} grid {g}", b.lower);
            }
        }
    }
}
