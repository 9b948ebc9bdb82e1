//! Benchmark fixtures shared by the criterion benches and their smoke test.

use masakit_core::catalog::{enumerate_ep1, MasaDescriptor};
use masakit_core::ExactMatrix;

/// Dense integer matrix with a fixed pseudo-random pattern.
pub fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> ExactMatrix {
    let mut s = seed;
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 33) % 11) as i64 - 5
                })
                .collect()
        })
        .collect();
    let refs: Vec<&[i64]> = data.iter().map(Vec::as_slice).collect();
    ExactMatrix::from_ints(&refs)
}

/// e(p,1) descriptors without the duplicated kappa = -1 entries.
pub fn ep1_catalog(p: usize) -> Vec<MasaDescriptor> {
    enumerate_ep1(p).into_iter().filter(|d| !d.kappa_equivalent).collect()
}
