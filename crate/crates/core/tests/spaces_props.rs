use std::collections::BTreeSet;

use nucmeasure::spaces::{excess, project, vector_excess, vector_norm, Ambient, ProjectMode};
use nucmeasure::{Exponent, FiniteVector, Label, Scalar};
use proptest::prelude::*;

fn vector(len: usize) -> impl Strategy<Value = FiniteVector> {
    prop::collection::vec(prop_oneof![Just(0.0), -5.0..5.0f64], len).prop_map(|v| FiniteVector::from_slice(&v))
}

fn ambient() -> impl Strategy<Value = Ambient> {
    prop_oneof![
        Just(Ambient::l1()),
        Just(Ambient::C0),
        (1.1..6.0f64).prop_map(|p| Ambient::Lp(Exponent::new(p).unwrap())),
        prop::collection::vec(0.1..4.0f64, 6).prop_map(|w| Ambient::L1Weighted {
            weights: w.into_iter().enumerate().map(|(i, x)| (Label::Int(i as i64 + 1), x)).collect()
        }),
    ]
}

fn label_set() -> impl Strategy<Value = BTreeSet<Label>> {
    prop::collection::btree_set(1i64..=6, 0..=6).prop_map(|s| s.into_iter().map(Label::Int).collect())
}

proptest! {
    #[test]
    fn norm_triangle_and_homogeneity(x in vector(6), y in vector(6), lambda in -4.0..4.0f64, amb in ambient()) {
        let nx = vector_norm(&x, &amb).unwrap();
        let ny = vector_norm(&y, &amb).unwrap();
        let nxy = vector_norm(&x.add(&y), &amb).unwrap();
        prop_assert!(nxy <= nx + ny + 1e-12 * (1.0 + nx + ny));
        let scaled = vector_norm(&x.scale(Scalar::new(lambda, 0.0)), &amb).unwrap();
        prop_assert!((scaled - lambda.abs() * nx).abs() <= 1e-12 * (1.0 + lambda.abs() * nx));
    }

    #[test]
    fn projection_is_idempotent_and_complementary(x in vector(6), f in label_set()) {
        let keep = project(&x, &f, ProjectMode::Keep);
        let drop = project(&x, &f, ProjectMode::Drop);
        prop_assert_eq!(project(&keep, &f, ProjectMode::Keep), keep.clone());
        prop_assert_eq!(project(&drop, &f, ProjectMode::Drop), drop.clone());
        prop_assert_eq!(keep.add(&drop), x);
    }

    #[test]
    fn dropping_more_labels_never_increases_the_norm(x in vector(6), f in label_set(), g in label_set(), amb in ambient()) {
        let bigger: BTreeSet<Label> = f.union(&g).cloned().collect();
        let small = vector_norm(&project(&x, &f, ProjectMode::Drop), &amb).unwrap();
        let large = vector_norm(&project(&x, &bigger, ProjectMode::Drop), &amb).unwrap();
        prop_assert!(large <= small);
    }

    #[test]
    fn excess_vanishes_exactly_on_subsets(a in prop::collection::vec(vector(4), 1..4), b in prop::collection::vec(vector(4), 1..4), amb in ambient()) {
        let mut both = b.clone();
        both.extend(a.iter().cloned());
        prop_assert_eq!(vector_excess(&a, &both, &amb).unwrap(), 0.0);
        let e = vector_excess(&a, &b, &amb).unwrap();
        let all_close = a.iter().all(|x| b.iter().any(|y| vector_norm(&x.sub(y), &amb).unwrap() <= 1e-12));
        prop_assert_eq!(e <= 1e-12, all_close);
    }
}

#[test]
fn excess_examples() {
    let h = Ambient::Lp(Exponent::HILBERT);
    let a = [FiniteVector::from_slice(&[1.0, 0.0])];
    let b = [FiniteVector::zero()];
    assert_eq!(vector_excess(&a, &b, &h).unwrap(), 1.0);
    assert_eq!(vector_excess(&a, &a, &h).unwrap(), 0.0);
    assert!(excess::<f64, _>(&[], &[1.0], |x, y| (x - y).abs()).is_err());
}
