use super::{rabi_frequencies, ModelParams};
use crate::fock::{annihilation, displacement_matrix};
use crate::linalg::{hermitian_propagator, unitarity_defect, ComplexMatrix, C64};

/// Joint atom-field operator on the `2D`-dimensional space, ordered
/// `[|e> (x) field, |g> (x) field]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFieldUnitary {
    matrix: ComplexMatrix,
    field_dim: usize,
}

impl AtomFieldUnitary {
    pub(crate) fn from_matrix(matrix: ComplexMatrix) -> Self {
        assert!(matrix.nrows() == matrix.ncols() && matrix.nrows() % 2 == 0);
        let field_dim = matrix.nrows() / 2;
        Self { matrix, field_dim }
    }

    fn from_blocks(
        ee: &ComplexMatrix,
        eg: &ComplexMatrix,
        ge: &ComplexMatrix,
        gg: &ComplexMatrix,
    ) -> Self {
        let d = ee.nrows();
        let mut matrix = ComplexMatrix::zeros(2 * d, 2 * d);
        matrix.view_mut((0, 0), (d, d)).copy_from(ee);
        matrix.view_mut((0, d), (d, d)).copy_from(eg);
        matrix.view_mut((d, 0), (d, d)).copy_from(ge);
        matrix.view_mut((d, d), (d, d)).copy_from(gg);
        Self::from_matrix(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn field_dim(&self) -> usize {
        self.field_dim
    }

    fn block(&self, row: usize, col: usize) -> ComplexMatrix {
        let d = self.field_dim;
        self.matrix.view((row * d, col * d), (d, d)).into_owned()
    }

    /// `<e| U |e>` as a field operator.
    pub fn ee(&self) -> ComplexMatrix {
        self.block(0, 0)
    }

    /// `<e| U |g>`.
    pub fn eg(&self) -> ComplexMatrix {
        self.block(0, 1)
    }

    /// `<g| U |e>`.
    pub fn ge(&self) -> ComplexMatrix {
        self.block(1, 0)
    }

    /// `<g| U |g>`.
    pub fn gg(&self) -> ComplexMatrix {
        self.block(1, 1)
    }

    /// `max |U^dagger U - I|`. With `field_block = Some(k)` only field indices
    /// below `k` are inspected, in both atomic sectors.
    pub fn unitarity_defect(&self, field_block: Option<usize>) -> f64 {
        match field_block {
            None => unitarity_defect(&self.matrix, None),
            Some(k) => {
                let d = self.field_dim;
                let gram = self.matrix.adjoint() * &self.matrix;
                let mut worst = 0.0_f64;
                for (r0, c0) in [(0, 0), (0, d), (d, 0), (d, d)] {
                    for i in 0..k {
                        for j in 0..k {
                            let target = if r0 == c0 && i == j { 1.0 } else { 0.0 };
                            let z = gram[(r0 + i, c0 + j)] - C64::new(target, 0.0);
                            worst = worst.max(z.norm());
                        }
                    }
                }
                worst
            }
        }
    }
}

/// Dimensionless generator `G` on the truncated joint space.
pub fn generator(params: &ModelParams) -> ComplexMatrix {
    let d = params.cutoff();
    let a = annihilation(params.space);
    let a2 = &a * &a;
    let mut g = ComplexMatrix::zeros(2 * d, 2 * d);
    for n in 0..d {
        let level = params.delta_over_lambda / 2.0 + params.chi_over_lambda * n as f64;
        g[(n, n)] = C64::new(level, 0.0);
        g[(d + n, d + n)] = C64::new(-level, 0.0);
    }
    // a^2 s+ maps |g> to |e>; a^dag^2 s- maps |e> to |g>
    g.view_mut((0, d), (d, d)).copy_from(&a2);
    g.view_mut((d, 0), (d, d)).copy_from(&a2.adjoint());
    g
}

/// Closed-form `U_tp = exp(-i tau G)` assembled from the 2x2 blocks
/// `{|e,n>, |g,n+2>}`.
pub fn block_unitary(params: &ModelParams) -> AtomFieldUnitary {
    let d = params.cutoff();
    let tau = params.tau;
    let rabi = rabi_frequencies(params);
    let mut u = ComplexMatrix::zeros(2 * d, 2 * d);
    for n in 0..d {
        u[(n, n)] = rabi.excited_diagonal(n, tau);
        u[(d + n, d + n)] = rabi.ground_diagonal(n, tau);
    }
    for n in 0..d.saturating_sub(2) {
        let coupling = ((n + 1) as f64 * (n + 2) as f64).sqrt();
        // emission and absorption of one block share the same amplitude
        let off = rabi.emission(n, tau) * coupling;
        u[(d + n + 2, n)] = off;
        u[(n, d + n + 2)] = off;
    }
    AtomFieldUnitary::from_matrix(u)
}

/// `exp(-i tau G)` from the eigen-decomposition of `G`.
pub fn unitary_exponential_oracle(params: &ModelParams) -> AtomFieldUnitary {
    let g = generator(params);
    AtomFieldUnitary::from_matrix(hermitian_propagator(&g, params.tau))
}

/// Displaced propagator `U = D(eps)^dagger U_tp D(eps)`, with the displacement
/// acting on the field in both atomic sectors.
///
/// At `tau = 0` this is the identity exactly; the truncated `D^dagger D`
/// would deviate from it in the top levels.
pub fn full_unitary(params: &ModelParams) -> AtomFieldUnitary {
    let tp = block_unitary(params);
    if params.eps == C64::new(0.0, 0.0) || params.tau == 0.0 {
        return tp;
    }
    let disp = displacement_matrix(params.eps, params.space).into_matrix();
    let disp_adj = disp.adjoint();
    let conj = |block: ComplexMatrix| &disp_adj * block * &disp;
    AtomFieldUnitary::from_blocks(
        &conj(tp.ee()),
        &conj(tp.eg()),
        &conj(tp.ge()),
        &conj(tp.gg()),
    )
}
