use super::{annihilation, FockSpace};
use crate::linalg::{hermitian_propagator, ComplexMatrix, C64, ONE, ZERO};

use super::laguerre::laguerre_sequence;

/// Truncated matrix of the displacement operator `D(eps)` in the Fock basis,
/// `matrix[(j, n)] = <j| D(eps) |n>`.
///
/// Entries are the exact infinite-basis matrix elements, so the truncated
/// matrix is only approximately unitary in its top rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementMatrix {
    amplitude: C64,
    matrix: ComplexMatrix,
}

impl DisplacementMatrix {
    pub fn amplitude(&self) -> C64 {
        self.amplitude
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Euclidean norm of every column. Values below one flag weight displaced
    /// past the cutoff.
    pub fn column_norms(&self) -> Vec<f64> {
        self.matrix.column_iter().map(|c| c.norm()).collect()
    }

    /// Largest `| ||column n|| - 1 |` over columns `n < limit`.
    pub fn column_norm_defect(&self, limit: usize) -> f64 {
        self.column_norms()
            .into_iter()
            .take(limit)
            .map(|norm| (norm - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `ln(k!)` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(acc);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Displaced-number-state overlaps `<j| D(eps) |n>` via associated Laguerre
/// polynomials:
///
/// * `j >= n`: `exp(-|eps|^2/2) eps^(j-n) sqrt(n!/j!) L_n^(j-n)(|eps|^2)`
/// * `j <  n`: `exp(-|eps|^2/2) (-eps*)^(n-j) sqrt(j!/n!) L_j^(n-j)(|eps|^2)`
pub fn displacement_matrix(eps: C64, space: FockSpace) -> DisplacementMatrix {
    let dim = space.cutoff();
    if eps == ZERO {
        return DisplacementMatrix {
            amplitude: eps,
            matrix: ComplexMatrix::identity(dim, dim),
        };
    }
    let x = eps.norm_sqr();
    let ln_abs = eps.norm().ln();
    let theta = eps.arg();
    let ln_fact = ln_factorials(dim);

    let mut matrix = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim {
        // L_m^k for m = 0..dim-1-k, shared by the k-th sub- and super-diagonal
        let lag = laguerre_sequence(dim - 1 - k, k as i64, x);
        let kf = k as f64;
        let below = C64::from_polar(1.0, kf * theta);
        let above = C64::from_polar(if k % 2 == 0 { 1.0 } else { -1.0 }, -kf * theta);
        for (m, &l) in lag.iter().enumerate() {
            let magnitude =
                (-0.5 * x + kf * ln_abs + 0.5 * (ln_fact[m] - ln_fact[m + k])).exp() * l;
            matrix[(m + k, m)] = below * magnitude;
            if k > 0 {
                matrix[(m, m + k)] = above * magnitude;
            }
        }
    }
    DisplacementMatrix {
        amplitude: eps,
        matrix,
    }
}

/// `exp(eps a^dagger - eps* a)` built from the truncated ladder matrices.
///
/// Exactly unitary on the truncated space, but differs from
/// [`displacement_matrix`] near the cutoff. Used only to cross-check it.
pub fn displacement_exponential_oracle(eps: C64, space: FockSpace) -> ComplexMatrix {
    if eps == ZERO {
        return ComplexMatrix::from_diagonal_element(space.cutoff(), space.cutoff(), ONE);
    }
    let a = annihilation(space);
    // H = i (eps a^dagger - eps* a) is Hermitian and exp(-i H) = D(eps)
    let i = C64::new(0.0, 1.0);
    let generator = (a.adjoint() * eps - &a * eps.conj()) * i;
    hermitian_propagator(&generator, 1.0)
}
