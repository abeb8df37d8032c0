//! Dense complex matrix helpers shared across the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

/// Dense, column-stored complex matrix. Indexing is `(row, col)`.
pub type ComplexMatrix = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Same as [`max_abs_diff`], restricted to the leading `size x size` block.
pub fn max_abs_diff_block(a: &ComplexMatrix, b: &ComplexMatrix, size: usize) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..size {
        for i in 0..size {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// `max |M - M^dagger|` over all entries.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max |U^dagger U - I|`, optionally restricted to the leading block.
pub fn unitarity_defect(u: &ComplexMatrix, block: Option<usize>) -> f64 {
    let gram = u.adjoint() * u;
    let size = block.unwrap_or(gram.nrows());
    max_abs_diff_block(&gram, &identity(gram.nrows()), size)
}

/// Eigen-decomposition of a Hermitian matrix. Only the lower triangle is read.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `exp(-i t H)` for Hermitian `H`, via its eigen-decomposition.
pub fn hermitian_propagator(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let mut scaled = vectors.clone();
    for (k, &w) in values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -w * t);
        scaled.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    scaled * vectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagator_of_pauli_x() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 1)] = ONE;
        h[(1, 0)] = ONE;
        let t = 0.7_f64;
        let u = hermitian_propagator(&h, t);
        assert!((u[(0, 0)] - C64::new(t.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - C64::new(0.0, -t.sin())).norm() < 1e-14);
        assert!(unitarity_defect(&u, None) < 1e-14);
    }

    #[test]
    fn hermiticity_defect_detects_asymmetry() {
        let mut m = identity(3);
        assert_eq!(hermiticity_defect(&m), 0.0);
        m[(0, 2)] = C64::new(0.0, 1.0);
        assert!((hermiticity_defect(&m) - 1.0).abs() < 1e-15);
    }
}
