//! Element-wise N-atom recursion, written as explicit sums over Fock indices.
//!
//! With `e[j][m] = <j|D(eps)|m>` and the closed-form block coefficients
//!
//! * `A_j  = <e,j|U_tp|e,j>`, `B_j = <g,j|U_tp|g,j>`,
//! * `em_j = <g,j+2|U_tp|e,j> / sqrt((j+1)(j+2))`,
//! * `ab_j = <e,j-2|U_tp|g,j> / sqrt(j(j-1))`,
//!
//! one passage maps `rho(m,m')` to
//!
//! `rho'(n,n') = sum_{m,m'} rho(m,m') sum_{j,j'} e[j][m] conj(e[j'][m']) T(j,j';n,n')`
//!
//! where `T` is the sum of eight products of coefficients, ladder factors and
//! displaced-number-state overlaps. `O(D^4)` per step; meant for small cutoffs.

use super::channel::symmetrize_and_normalize;
use super::{rabi_frequencies, AtomPrep, ModelParams};
use crate::fock::{displacement_matrix, DensityOperator};
use crate::linalg::{ComplexMatrix, C64};

/// One passage via explicit sums, before symmetrization and renormalization.
pub fn recursion_oracle_raw(
    rho_prev: &DensityOperator,
    params: &ModelParams,
    atom: &AtomPrep,
) -> ComplexMatrix {
    let d = params.cutoff();
    assert_eq!(
        rho_prev.dim(),
        d,
        "state and parameters disagree on the cutoff"
    );
    let tau = params.tau;
    let rabi = rabi_frequencies(params);
    let e = displacement_matrix(params.eps, params.space).into_matrix();
    let rho = rho_prev.matrix();
    let (ce, cg) = atom.amplitudes();

    let zero = C64::new(0.0, 0.0);
    let big_a: Vec<C64> = (0..d).map(|j| rabi.excited_diagonal(j, tau)).collect();
    let big_b: Vec<C64> = (0..d).map(|j| rabi.ground_diagonal(j, tau)).collect();
    let em: Vec<C64> = (0..d).map(|j| rabi.emission(j, tau)).collect();
    let ab: Vec<C64> = (0..d).map(|j| rabi.absorption(j, tau)).collect();
    let up: Vec<f64> = (0..d)
        .map(|j| ((j + 1) as f64 * (j + 2) as f64).sqrt())
        .collect();
    let down: Vec<f64> = (0..d)
        .map(|j| (j as f64 * (j as f64 - 1.0)).max(0.0).sqrt())
        .collect();

    // overlaps with shifted rows; out-of-range rows contribute nothing
    let left = |row: isize, n: usize| -> C64 {
        if row < 0 || row as usize >= d {
            zero
        } else {
            e[(row as usize, n)].conj()
        }
    };
    let right = |row: isize, n: usize| -> C64 {
        if row < 0 || row as usize >= d {
            zero
        } else {
            e[(row as usize, n)]
        }
    };

    // x(j,j') = sum_{m,m'} e[j][m] rho(m,m') conj(e[j'][m'])
    let mut x = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        for jp in 0..d {
            let mut acc = zero;
            for m in 0..d {
                let ejm = e[(j, m)];
                if ejm == zero {
                    continue;
                }
                for mp in 0..d {
                    acc += ejm * rho[(m, mp)] * e[(jp, mp)].conj();
                }
            }
            x[(j, jp)] = acc;
        }
    }

    let pe = ce.norm_sqr();
    let pg = cg.norm_sqr();
    let coh = ce * cg.conj();

    let mut out = ComplexMatrix::zeros(d, d);
    for n in 0..d {
        for np in 0..d {
            let mut acc = zero;
            for j in 0..d {
                let ji = j as isize;
                for jp in 0..d {
                    let xj = x[(j, jp)];
                    if xj == zero {
                        continue;
                    }
                    let jpi = jp as isize;
                    let mut t = zero;
                    // excited atom stays excited
                    t += pe * big_a[j] * big_a[jp].conj() * left(ji, n) * right(jpi, np);
                    // ground atom stays ground
                    t += pg * big_b[j] * big_b[jp].conj() * left(ji, n) * right(jpi, np);
                    // ground atom absorbs two photons
                    t += pg
                        * ab[j]
                        * ab[jp].conj()
                        * (down[j] * down[jp])
                        * left(ji - 2, n)
                        * right(jpi - 2, np);
                    // excited atom emits two photons
                    t += pe
                        * em[j]
                        * em[jp].conj()
                        * (up[j] * up[jp])
                        * left(ji + 2, n)
                        * right(jpi + 2, np);
                    // interference within the |e> exit channel
                    t += coh
                        * big_a[j]
                        * ab[jp].conj()
                        * down[jp]
                        * left(ji, n)
                        * right(jpi - 2, np);
                    t += coh.conj()
                        * ab[j]
                        * big_a[jp].conj()
                        * down[j]
                        * left(ji - 2, n)
                        * right(jpi, np);
                    // interference within the |g> exit channel
                    t += coh * em[j] * big_b[jp].conj() * up[j] * left(ji + 2, n) * right(jpi, np);
                    t += coh.conj()
                        * big_b[j]
                        * em[jp].conj()
                        * up[jp]
                        * left(ji, n)
                        * right(jpi + 2, np);
                    acc += xj * t;
                }
            }
            out[(n, np)] = acc;
        }
    }
    out
}

/// [`recursion_oracle_raw`] followed by the same symmetrization and
/// renormalization as [`super::apply_atom`].
pub fn recursion_oracle(
    rho_prev: &DensityOperator,
    params: &ModelParams,
    atom: &AtomPrep,
) -> DensityOperator {
    let mut m = recursion_oracle_raw(rho_prev, params, atom);
    symmetrize_and_normalize(&mut m);
    DensityOperator::from_parts(rho_prev.space(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{apply_atom, kraus_pair};
    use crate::fock::{thermal_state, FockSpace};
    use crate::linalg::max_abs_diff;

    #[test]
    fn excited_atom_without_drive_matches_channel() {
        let sp = FockSpace::new(12).unwrap();
        let rho = thermal_state(0.3, sp).unwrap();
        let p = ModelParams {
            eps: C64::new(0.0, 0.0),
            tau: 2.1,
            space: sp,
            ..ModelParams::default()
        };
        let atom = AtomPrep::excited();
        let oracle = recursion_oracle(&rho, &p, &atom);
        let channel = apply_atom(&rho, &kraus_pair(&p, &atom)).unwrap();
        assert!(max_abs_diff(oracle.matrix(), channel.matrix()) < 1e-12);
    }

    #[test]
    fn superposed_atom_with_drive_matches_channel() {
        let sp = FockSpace::new(14).unwrap();
        let rho = thermal_state(0.2, sp).unwrap();
        let p = ModelParams {
            eps: C64::new(0.4, -0.2),
            tau: 5.0,
            space: sp,
            ..ModelParams::default()
        };
        let atom = AtomPrep::new(0.6, 0.8, 1.1).unwrap();
        let oracle = recursion_oracle(&rho, &p, &atom);
        let channel = apply_atom(&rho, &kraus_pair(&p, &atom)).unwrap();
        assert!(max_abs_diff(oracle.matrix(), channel.matrix()) < 1e-12);
    }
}
