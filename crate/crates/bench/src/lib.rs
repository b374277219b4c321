//! Fixtures shared by the benchmarks.

use eisrank_core::linalg::{DenseMatrix, Fp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random square matrix over `F_p`.
pub fn random_matrix(n: usize, p: u32, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n).map(|_| rng.gen_range(0..p)).collect();
    DenseMatrix::from_flat(n, n, data)
}

/// A matrix with a nilpotent block of the given size and units elsewhere,
/// conjugated by a random change of basis so the kernel chain is nontrivial.
pub fn nilpotent_mix(n: usize, nil: usize, p: u32, seed: u64) -> DenseMatrix {
    let f = Fp::new(p as u64);
    let mut j = DenseMatrix::zeros(n, n);
    for i in 0..nil.saturating_sub(1) {
        j.set(i, i + 1, 1);
    }
    for i in nil..n {
        j.set(i, i, 1 + (i as u32 % (p - 1)));
    }
    let q = random_matrix(n, p, seed);
    q.mul(&j, f)
}
