// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use decohere_core::channels::KrausMap;
use decohere_core::operators::{hermitian_function, identity, real, ComplexMatrix, C64};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n);
    (&g + g.adjoint()) * real(0.5)
}

pub fn unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ginibre(rng, n).qr().q()
}

pub fn state(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
    let v = DVector::from_fn(n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let norm = v.norm();
    v / real(norm)
}

/// Normalizes arbitrary Kraus operators to `Σ W^* W = 1`.
pub fn unitalize(kraus: Vec<ComplexMatrix>) -> KrausMap {
    let n = kraus[0].nrows();
    let s = kraus.iter().fold(ComplexMatrix::zeros(n, n), |acc, g| acc + g.adjoint() * g);
    let inv_sqrt = hermitian_function(&s, |x| real(1.0 / x.sqrt()));
    KrausMap::new(kraus.into_iter().map(|g| g * &inv_sqrt).collect(), 1e-9).unwrap()
}

pub fn random_channel(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> KrausMap {
    unitalize((0..rank).map(|_| ginibre(rng, n)).collect())
}

/// A random-unitary channel whose unitaries are diagonal in a random basis,
/// so that its multiplicative domain is generically the maximal abelian algebra.
pub fn random_diagonal_mixture(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> KrausMap {
    let basis = unitary(rng, n);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.1).collect();
    let total: f64 = weights.iter().sum();
    let kraus = weights
        .iter()
        .map(|w| {
            let phases = ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            &basis * phases * basis.adjoint() * real((w / total).sqrt())
        })
        .collect();
    KrausMap::new(kraus, 1e-9).unwrap()
}

/// Random Kraus operators of the form `u ⊕ X` on `C ⊕ C^{n-1}`, leaving the
/// first basis vector's projector in the multiplicative domain.
pub fn random_block_channel(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> KrausMap {
    let inner = random_channel(rng, n - 1, rank);
    let w: f64 = 1.0 / (rank as f64).sqrt();
    let kraus = inner
        .kraus()
        .iter()
        .map(|k| {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(0, 0)] = real(w);
            m.view_mut((1, 1), (n - 1, n - 1)).copy_from(k);
            m
        })
        .collect();
    KrausMap::new(kraus, 1e-9).unwrap()
}

pub fn unitary_channel(rng: &mut ChaCha8Rng, n: usize) -> KrausMap {
    KrausMap::unitary(unitary(rng, n)).unwrap()
}

pub fn identity_map(n: usize) -> ComplexMatrix {
    identity(n * n)
}

pub type TestRng = ChaCha8Rng;
