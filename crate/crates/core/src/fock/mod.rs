//! Truncated Fock-space representation of the cavity field.

mod displacement;
mod laguerre;

pub use displacement::{displacement_exponential_oracle, displacement_matrix, DisplacementMatrix};
pub use laguerre::{laguerre_assoc, laguerre_sequence};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermiticity_defect, ComplexMatrix, C64, ZERO};

/// Smallest cutoff that still holds a full two-photon block `|n>, |n+2>`.
pub const MIN_CUTOFF: usize = 4;

/// Default number of retained Fock levels.
pub const DEFAULT_CUTOFF: usize = 64;

/// Largest admissible thermal weight discarded by truncation. Admits
/// `n_bar = 5` at 64 levels (tail `8.6e-6`) and rejects it at 16.
pub const THERMAL_TAIL_TOLERANCE: f64 = 1e-5;

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Fock levels `|0>, ..., |D-1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < MIN_CUTOFF {
            return Err(Error::CutoffBelowMinimum {
                cutoff,
                min: MIN_CUTOFF,
            });
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// The same space with twice as many levels.
    pub fn doubled(&self) -> Self {
        Self {
            cutoff: 2 * self.cutoff,
        }
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

/// Truncated annihilation operator, `a[(n-1, n)] = sqrt(n)`.
pub fn annihilation(space: FockSpace) -> ComplexMatrix {
    let d = space.cutoff();
    let mut a = ComplexMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Field density matrix on a truncated Fock space.
///
/// Construction checks Hermiticity and unit trace; positivity is checked on
/// demand through [`DensityOperator::min_eigenvalue`] since it needs a full
/// eigen-decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    space: FockSpace,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(space: FockSpace, matrix: ComplexMatrix) -> Result<Self> {
        let d = space.cutoff();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {defect:.3e}"
            )));
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace}")));
        }
        Ok(Self { space, matrix })
    }

    /// Callers guarantee the invariants (used after explicit symmetrization
    /// and renormalization).
    pub(crate) fn from_parts(space: FockSpace, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), space.cutoff());
        Self { space, matrix }
    }

    /// Diagonal state with the given populations, renormalized.
    pub fn from_populations(space: FockSpace, populations: &[f64]) -> Result<Self> {
        let d = space.cutoff();
        if populations.len() > d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: populations.len(),
            });
        }
        if populations.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "populations must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = populations.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("populations sum to zero".into()));
        }
        let mut matrix = ComplexMatrix::zeros(d, d);
        for (n, &p) in populations.iter().enumerate() {
            matrix[(n, n)] = C64::new(p / total, 0.0);
        }
        Ok(Self { space, matrix })
    }

    /// `|psi><psi|` for the normalized amplitudes (missing tail = zero).
    pub fn pure(space: FockSpace, amplitudes: &[C64]) -> Result<Self> {
        let d = space.cutoff();
        if amplitudes.len() > d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("state vector has zero norm".into()));
        }
        let mut psi = nalgebra::DVector::from_element(d, ZERO);
        for (n, z) in amplitudes.iter().enumerate() {
            psi[n] = z / norm;
        }
        let matrix = &psi * psi.adjoint();
        Ok(Self::from_parts(space, matrix))
    }

    pub fn vacuum(space: FockSpace) -> Self {
        Self::fock(space, 0).expect("vacuum always fits")
    }

    /// Number state `|n><n|`.
    pub fn fock(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.cutoff() {
            return Err(Error::InvalidParameter(format!(
                "Fock level {n} outside cutoff {}",
                space.cutoff()
            )));
        }
        let mut matrix = ComplexMatrix::zeros(space.cutoff(), space.cutoff());
        matrix[(n, n)] = C64::new(1.0, 0.0);
        Ok(Self::from_parts(space, matrix))
    }

    /// Coherent state `|alpha>` restricted to the cutoff and renormalized.
    pub fn coherent(space: FockSpace, alpha: C64) -> Result<Self> {
        Self::pure(space, &coherent_amplitudes(alpha, space.cutoff()))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.cutoff()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr rho^2`, i.e. the sum of squared moduli of all entries.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (mut values, _) = hermitian_eigen(&self.matrix);
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Pads the state with zeros into a larger space.
    pub fn embed(&self, space: FockSpace) -> Result<Self> {
        let (old, new) = (self.dim(), space.cutoff());
        if new < old {
            return Err(Error::DimensionMismatch {
                expected: old,
                found: new,
            });
        }
        let mut matrix = ComplexMatrix::zeros(new, new);
        matrix.view_mut((0, 0), (old, old)).copy_from(&self.matrix);
        Ok(Self::from_parts(space, matrix))
    }
}

/// `<n|beta> = exp(-|beta|^2/2) beta^n / sqrt(n!)` for `n < dim`, evaluated
/// by a running product so no factorial is ever formed.
pub fn coherent_amplitudes(beta: C64, dim: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(dim);
    let mut current = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            current *= beta / (n as f64).sqrt();
        }
        out.push(current);
    }
    out
}

/// Truncated weight `(n_bar / (n_bar + 1))^D` of a thermal state.
pub fn thermal_tail(n_bar: f64, cutoff: usize) -> f64 {
    if n_bar == 0.0 {
        0.0
    } else {
        (n_bar / (n_bar + 1.0)).powi(cutoff as i32)
    }
}

/// Thermal field `sum_n n_bar^n / (n_bar + 1)^(n+1) |n><n|`, renormalized over
/// the retained levels.
pub fn thermal_state(n_bar: f64, space: FockSpace) -> Result<DensityOperator> {
    thermal_state_with_tolerance(n_bar, space, THERMAL_TAIL_TOLERANCE)
}

/// As [`thermal_state`] with an explicit bound on the discarded tail.
pub fn thermal_state_with_tolerance(
    n_bar: f64,
    space: FockSpace,
    tail_tolerance: f64,
) -> Result<DensityOperator> {
    if !(n_bar >= 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "n_bar must be finite and nonnegative, got {n_bar}"
        )));
    }
    let cutoff = space.cutoff();
    let tail = thermal_tail(n_bar, cutoff);
    if tail > tail_tolerance {
        return Err(Error::CutoffTooSmall {
            n_bar,
            cutoff,
            tail,
            tolerance: tail_tolerance,
        });
    }
    let ratio = n_bar / (n_bar + 1.0);
    let mut weights = Vec::with_capacity(cutoff);
    let mut w = 1.0 / (n_bar + 1.0);
    for _ in 0..cutoff {
        weights.push(w);
        w *= ratio;
    }
    DensityOperator::from_populations(space, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_minimum_enforced() {
        assert!(matches!(
            FockSpace::new(3),
            Err(Error::CutoffBelowMinimum { cutoff: 3, .. })
        ));
        assert!(FockSpace::new(4).is_ok());
    }

    #[test]
    fn zero_temperature_thermal_is_vacuum() {
        let sp = FockSpace::new(16).unwrap();
        let rho = thermal_state(0.0, sp).unwrap();
        assert_eq!(rho, DensityOperator::vacuum(sp));
    }

    #[test]
    fn thermal_ground_weight() {
        let sp = FockSpace::new(64).unwrap();
        let rho = thermal_state(5.0, sp).unwrap();
        // renormalization changes the n=0 weight only at the 1e-6 level here
        let raw = 1.0 / 6.0;
        let tail = thermal_tail(5.0, 64);
        assert!((rho.matrix()[(0, 0)].re - raw / (1.0 - tail)).abs() < 1e-15);
        assert!((rho.matrix()[(0, 0)].re - 0.16667).abs() < 1e-5);
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        for i in 0..64 {
            for j in 0..64 {
                if i != j {
                    assert_eq!(rho.matrix()[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn thermal_rejects_small_cutoff() {
        let sp = FockSpace::new(8).unwrap();
        match thermal_state(5.0, sp) {
            Err(Error::CutoffTooSmall { tail, .. }) => assert!((tail - 0.2326).abs() < 1e-3),
            other => panic!("expected CutoffTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn thermal_purity_matches_geometric_series() {
        for &(n_bar, d) in &[(0.0, 64), (1.0, 64), (5.0, 128)] {
            let rho = thermal_state(n_bar, FockSpace::new(d).unwrap()).unwrap();
            assert!((rho.purity() - 1.0 / (2.0 * n_bar + 1.0)).abs() < 1e-6);
        }
        // renormalizing the 64-level state inflates the purity by 2 r^D / 11
        let rho = thermal_state(5.0, FockSpace::new(64).unwrap()).unwrap();
        let shift = 2.0 * thermal_tail(5.0, 64) / 11.0;
        assert!((rho.purity() - (1.0 / 11.0 + shift)).abs() < 1e-9);
    }

    #[test]
    fn new_validates_invariants() {
        let sp = FockSpace::new(4).unwrap();
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = C64::new(0.5, 0.0);
        assert!(matches!(
            DensityOperator::new(sp, m.clone()),
            Err(Error::InvalidState(_))
        ));
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.1);
        assert!(DensityOperator::new(sp, m.clone()).is_err());
        m[(1, 0)] = C64::new(0.1, -0.1);
        assert!(DensityOperator::new(sp, m).is_ok());
        assert!(DensityOperator::new(sp, ComplexMatrix::identity(5, 5)).is_err());
    }

    #[test]
    fn embed_pads_with_zeros() {
        let sp = FockSpace::new(16).unwrap();
        let rho = thermal_state(0.5, sp).unwrap();
        let big = rho.embed(sp.doubled()).unwrap();
        assert_eq!(big.dim(), 32);
        assert_eq!(big.matrix()[(31, 31)], ZERO);
        assert_eq!(big.matrix()[(3, 3)], rho.matrix()[(3, 3)]);
    }

    #[test]
    fn positivity_of_thermal_state() {
        let sp = FockSpace::new(32).unwrap();
        let rho = thermal_state(1.0, sp).unwrap();
        assert!(rho.min_eigenvalue() >= -1e-12);
        assert!(matches!(
            thermal_state(1.0, FockSpace::new(16).unwrap()),
            Err(Error::CutoffTooSmall { .. })
        ));
    }
}
