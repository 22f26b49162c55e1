//! Thin wrappers over nalgebra's symmetric eigensolver for row-major
//! complex buffers.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

fn is_real(entries: &[Complex64]) -> bool {
    entries.iter().all(|z| z.im == 0.0)
}

/// Eigenvalues of a Hermitian matrix stored row-major.
pub(crate) fn hermitian_eigenvalues(dim: usize, entries: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(entries.len(), dim * dim);
    if is_real(entries) {
        let m = DMatrix::<f64>::from_fn(dim, dim, |i, j| entries[i * dim + j].re);
        m.symmetric_eigenvalues().iter().copied().collect()
    } else {
        let m = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| entries[i * dim + j]);
        m.symmetric_eigenvalues().iter().copied().collect()
    }
}

/// Eigenpairs of a Hermitian matrix; eigenvectors are returned as the
/// columns of a row-major `dim × dim` buffer.
pub(crate) fn hermitian_eigen(dim: usize, entries: &[Complex64]) -> (Vec<f64>, Vec<Complex64>) {
    let m = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| entries[i * dim + j]);
    let eig = m.symmetric_eigen();
    let values = eig.eigenvalues.iter().copied().collect();
    let mut vectors = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            vectors.push(eig.eigenvectors[(i, j)]);
        }
    }
    (values, vectors)
}
