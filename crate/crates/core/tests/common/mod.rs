#![allow(dead_code)]

use fractional_worlds::{OrthogonalPartition, Scalar, ScalarField, StateVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    fractional_worlds::field::stream_rng(seed, 0xA11CE)
}

pub fn random_scalar(rng: &mut impl Rng, field: ScalarField) -> Scalar {
    let parts: Vec<f64> = (0..field.ray_dim())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    Scalar::from_components(field, &parts).unwrap()
}

pub fn random_nonzero_scalar(rng: &mut impl Rng, field: ScalarField) -> Scalar {
    loop {
        let s = random_scalar(rng, field);
        if s.norm() > 0.05 {
            return s;
        }
    }
}

pub fn labels(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("e{i}")).collect()
}

pub fn random_state(rng: &mut impl Rng, field: ScalarField, dim: usize) -> StateVector {
    loop {
        let coeffs = (0..dim).map(|_| random_scalar(rng, field)).collect();
        let v = StateVector::new(field, labels(dim), coeffs).unwrap();
        if v.norm() > 0.1 {
            return v;
        }
    }
}

/// Random partition of the basis into `k` nonempty groups named `o0..`.
pub fn random_partition(rng: &mut impl Rng, dim: usize, k: usize) -> OrthogonalPartition {
    let mut order = labels(dim);
    order.shuffle(rng);
    let mut groups: Vec<Vec<String>> = vec![Vec::new(); k];
    for (i, l) in order.into_iter().enumerate() {
        let g = if i < k { i } else { rng.gen_range(0..k) };
        groups[g].push(l);
    }
    OrthogonalPartition::new(
        groups
            .into_iter()
            .enumerate()
            .map(|(i, g)| (format!("o{i}"), g)),
    )
    .unwrap()
}

pub fn random_partition_any(rng: &mut impl Rng, dim: usize) -> OrthogonalPartition {
    let k = rng.gen_range(1..=dim);
    random_partition(rng, dim, k)
}
