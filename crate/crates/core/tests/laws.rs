//! Algebraic invariants over random seeds and dimensions.

use hyperalg::space::serial::{from_packed, to_packed};
use hyperalg::{similarity, Components, Hypervector, Metric, Model, ModelKind, ModelParams, RngStream};
use proptest::prelude::*;

const VECTOR_MODELS: [ModelKind; 7] = [
    ModelKind::Bsc,
    ModelKind::Map,
    ModelKind::Hrr,
    ModelKind::Fhrr,
    ModelKind::Sbdr,
    ModelKind::Sbc,
    ModelKind::Mcr,
];

fn model(kind: ModelKind, blocks: usize, seed: u64) -> Model {
    let params = ModelParams {
        dim: blocks * 8,
        block_size: 8,
        density: 0.05,
        ..ModelParams::default()
    };
    Model::new(kind, params, &RngStream::new(seed, "model")).unwrap()
}

fn close(a: &Hypervector, b: &Hypervector, tol: f64) -> bool {
    match (a.components(), b.components()) {
        (Components::Real(x), Components::Real(y)) => x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol),
        (Components::Complex(x), Components::Complex(y)) => x.iter().zip(y).all(|(p, q)| (p - q).norm() <= tol),
        _ => a == b,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn permutation_powers_invert(seed: u64, blocks in 1usize..40, k in -5i64..5, kind_ix in 0usize..VECTOR_MODELS.len()) {
        let m = model(VECTOR_MODELS[kind_ix], blocks, seed);
        let a = m.random(&RngStream::new(seed, "a"));
        let rho = m.rho().pow(k);
        let back = m.permute(&m.permute(&a, &rho).unwrap(), &rho.inverse()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn binding_commutes(seed: u64, blocks in 1usize..40, kind_ix in 0usize..6) {
        let kind = [ModelKind::Bsc, ModelKind::Map, ModelKind::Hrr, ModelKind::Fhrr, ModelKind::Sbc, ModelKind::Mcr][kind_ix];
        let m = model(kind, blocks, seed);
        let a = m.random(&RngStream::new(seed, "a"));
        let b = m.random(&RngStream::new(seed, "b"));
        prop_assert!(close(&m.bind(&a, &b).unwrap(), &m.bind(&b, &a).unwrap(), 1e-12));
    }

    #[test]
    fn binding_is_associative(seed: u64, blocks in 1usize..40, kind_ix in 0usize..4) {
        let kind = [ModelKind::Bsc, ModelKind::Map, ModelKind::Fhrr, ModelKind::Mcr][kind_ix];
        let m = model(kind, blocks, seed);
        let [a, b, c] = ["a", "b", "c"].map(|l| m.random(&RngStream::new(seed, l)));
        let left = m.bind(&m.bind(&a, &b).unwrap(), &c).unwrap();
        let right = m.bind(&a, &m.bind(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn map_binding_distributes_over_sums(seed: u64, dim in 1usize..500) {
        let m = Model::map(dim, &RngStream::new(seed, "model")).unwrap();
        let [a, b, c] = ["a", "b", "c"].map(|l| m.random(&RngStream::new(seed, l)));
        let sum = hyperalg::model::add(&b, &c).unwrap();
        let lhs = m.bind(&a, &sum).unwrap();
        let rhs = hyperalg::model::add(&m.bind(&a, &b).unwrap(), &m.bind(&a, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn permutation_preserves_hamming(seed: u64, dim in 1usize..2000, k in 1i64..9) {
        let m = Model::bsc(dim, &RngStream::new(seed, "model")).unwrap();
        let a = m.random(&RngStream::new(seed, "a"));
        let b = m.random(&RngStream::new(seed, "b"));
        let rho = m.rho().pow(k);
        let before = similarity(Metric::Hamming, &a, &b).unwrap();
        let after = similarity(Metric::Hamming, &m.permute(&a, &rho).unwrap(), &m.permute(&b, &rho).unwrap()).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn similarity_is_symmetric(seed: u64, blocks in 1usize..40, kind_ix in 0usize..VECTOR_MODELS.len()) {
        let m = model(VECTOR_MODELS[kind_ix], blocks, seed);
        let a = m.random(&RngStream::new(seed, "a"));
        let b = m.random(&RngStream::new(seed, "b"));
        let metric = m.default_metric();
        prop_assert_eq!(similarity(metric, &a, &b).unwrap(), similarity(metric, &b, &a).unwrap());
    }

    #[test]
    fn packed_form_round_trips(seed: u64, blocks in 1usize..40, kind_ix in 0usize..VECTOR_MODELS.len()) {
        let m = model(VECTOR_MODELS[kind_ix], blocks, seed);
        let a = m.random(&RngStream::new(seed, "a"));
        prop_assert_eq!(from_packed(&to_packed(&a)).unwrap(), a);
    }
}
