use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cptensor::checks::{
    check_diagonal_mean_dominance, check_hierarchical_dominance, check_propagated_dominance,
    check_zero_pattern_dominance, is_strongly_symmetric,
};
use cptensor::elimination::{
    eliminate, random_hierarchically_dominated, random_strongly_symmetric, reconstruct,
    Decomposition, Term,
};
use cptensor::io::{parse_tensor, render_tensor, TensorFile};
use cptensor::{Rational, Scalar, Shape, SubsetTensor, SupportSet, SymTensor, SymmetricForm};

fn shape_and_seed() -> impl Strategy<Value = (Shape, u64)> {
    (2usize..=4, 1usize..=6, any::<u64>())
        .prop_map(|(m, n, seed)| (Shape::new(m, n).unwrap(), seed))
}

fn coefficients(d: &Decomposition<Rational>) -> BTreeMap<SupportSet, Rational> {
    d.terms
        .iter()
        .map(|t| (t.support, t.coefficient.clone()))
        .collect()
}

fn random_dense(rng: &mut ChaCha8Rng, shape: Shape) -> SymTensor<Rational> {
    let mut t = SymTensor::zeros(shape);
    for index in shape.canonical_indices() {
        if rng.random_bool(0.4) {
            let v = Rational::from_ratio(rng.random_range(-9..=9), rng.random_range(1..=5));
            t.insert(index, v).unwrap();
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entries_ignore_index_order((shape, seed) in shape_and_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_dense(&mut rng, shape);
        for (index, value) in t.entries() {
            let mut raw = index.one_based();
            raw.reverse();
            prop_assert_eq!(&t.get_raw(&raw).unwrap(), value);
            raw.rotate_left(1);
            prop_assert_eq!(&t.get_raw(&raw).unwrap(), value);
        }
    }

    #[test]
    fn render_parse_round_trip((shape, seed) in shape_and_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subset = TensorFile::Subset(random_strongly_symmetric(&mut rng, shape, 6));
        let text = render_tensor(&subset);
        prop_assert_eq!(&parse_tensor::<Rational>(&text).unwrap(), &subset);
        prop_assert_eq!(render_tensor(&parse_tensor::<Rational>(&text).unwrap()), text);

        let dense = TensorFile::Dense(random_dense(&mut rng, shape));
        let text = render_tensor(&dense);
        prop_assert_eq!(&parse_tensor::<Rational>(&text).unwrap(), &dense);

        let float = TensorFile::Dense(random_dense(&mut rng, shape).to_f64());
        let text = render_tensor(&float);
        prop_assert_eq!(&parse_tensor::<f64>(&text).unwrap(), &float);
    }

    #[test]
    fn elimination_is_linear((shape, seed) in shape_and_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_strongly_symmetric(&mut rng, shape, 5);
        let b = random_strongly_symmetric(&mut rng, shape, 5);
        let (da, _) = eliminate(&a, false).unwrap();
        let (db, _) = eliminate(&b, false).unwrap();
        let (dab, _) = eliminate(&a.add(&b).unwrap(), false).unwrap();
        let mut expected = coefficients(&da);
        for (s, v) in coefficients(&db) {
            let slot = expected.entry(s).or_insert_with(|| Rational::from_i64(0));
            *slot = slot.clone() + v;
        }
        expected.retain(|_, v| !v.is_negligible());
        prop_assert_eq!(coefficients(&dab), expected);
    }

    #[test]
    fn reconstruct_inverts_eliminate((shape, seed) in shape_and_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_strongly_symmetric(&mut rng, shape, 8);
        let (d, _) = eliminate(&a, false).unwrap();
        prop_assert_eq!(reconstruct(&d), a);
    }

    #[test]
    fn subset_and_dense_forms_agree((shape, seed) in shape_and_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_strongly_symmetric(&mut rng, shape, 6).to_f64();
        let dense = a.to_dense();
        prop_assert!(is_strongly_symmetric(&dense).passed());
        prop_assert_eq!(dense.to_subset().unwrap(), a.clone());
        let x: Vec<f64> = (0..shape.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (fs, fd) = (a.contract_full(&x).unwrap(), dense.contract_full(&x).unwrap());
        prop_assert!((fs - fd).abs() <= 1e-9 * (1.0 + fd.abs()), "{} vs {}", fs, fd);
        let (gs, gd) = (a.contract_once(&x).unwrap(), dense.contract_once(&x).unwrap());
        for (p, q) in gs.iter().zip(&gd) {
            prop_assert!((p - q).abs() <= 1e-9 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn nonnegative_binary_sums_satisfy_necessary_conditions((shape, seed) in shape_and_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = Decomposition { shape, terms: Vec::new() };
        for _ in 0..6 {
            let size = rng.random_range(1..=shape.order().min(shape.dim()));
            let chosen = rand::seq::index::sample(&mut rng, shape.dim(), size);
            let support = SupportSet::from_zero_based(chosen.iter());
            let coefficient = Rational::from_i64(rng.random_range(1..=4));
            d.terms.push(Term { coefficient, support });
        }
        let a: SubsetTensor<Rational> = reconstruct(&d);
        prop_assert!(check_zero_pattern_dominance(&a).passed());
        prop_assert!(check_diagonal_mean_dominance(&a).passed());
    }

    #[test]
    fn hierarchical_dominance_propagates((shape, seed) in shape_and_seed()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hierarchically_dominated(&mut rng, shape, 4);
        prop_assert!(check_hierarchical_dominance(&a).passed());
        for q in 1..shape.order() {
            prop_assert!(check_propagated_dominance(&a, q).unwrap().passed());
        }
        let (d, _) = eliminate(&a, false).unwrap();
        prop_assert!(d.all_nonnegative());
    }
}
