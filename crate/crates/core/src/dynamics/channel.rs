use super::{full_unitary, AtomPrep, ModelParams};
use crate::error::{Error, Result};
use crate::fock::DensityOperator;
use crate::linalg::{identity, max_abs_diff_block, ComplexMatrix, C64};

/// Largest pre-renormalization trace deviation accepted from one passage.
pub const LEAKAGE_LIMIT: f64 = 1e-4;

/// Field operators `K_x = <x| U |phi_a>` for the two atomic exit states.
/// The channel is `rho -> K_e rho K_e^dagger + K_g rho K_g^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    pub excited: ComplexMatrix,
    pub ground: ComplexMatrix,
    eps_norm: f64,
}

impl KrausPair {
    pub fn dim(&self) -> usize {
        self.excited.nrows()
    }

    /// Field indices below this bound are unaffected by the displacement
    /// reaching past the cutoff. See [`safe_block`].
    pub fn safe_block(&self) -> usize {
        safe_block(self.eps_norm, self.dim())
    }

    /// `max |K_e^dag K_e + K_g^dag K_g - I|` over the leading `block` indices
    /// (all indices when `None`).
    pub fn completeness_defect(&self, block: Option<usize>) -> f64 {
        let sum = self.excited.adjoint() * &self.excited + self.ground.adjoint() * &self.ground;
        max_abs_diff_block(&sum, &identity(self.dim()), block.unwrap_or(self.dim()))
    }

    /// Joint amplitude operators in exit-state order `[e, g]`.
    pub fn operators(&self) -> [&ComplexMatrix; 2] {
        [&self.excited, &self.ground]
    }
}

/// Number of leading Fock levels `n` whose displaced image stays inside the
/// cutoff: `(sqrt(n) + |eps| + 1)^2 <= D - 1`.
///
/// `D(eps)|n>` extends to roughly `(sqrt(n) + |eps|)^2` quanta; the margin
/// keeps the neglected weight below `1e-6` for `|eps| <= 3` at `D = 64`.
pub fn safe_block(eps_norm: f64, dim: usize) -> usize {
    let reach = (dim as f64 - 1.0).sqrt() - 1.0 - eps_norm;
    if reach < 0.0 {
        0
    } else {
        ((reach * reach).floor() as usize + 1).min(dim)
    }
}

pub fn kraus_pair(params: &ModelParams, atom: &AtomPrep) -> KrausPair {
    let u = full_unitary(params);
    let (ce, cg) = atom.amplitudes();
    let excited = u.ee() * ce + u.eg() * cg;
    let ground = u.ge() * ce + u.gg() * cg;
    KrausPair {
        excited,
        ground,
        eps_norm: params.eps.norm(),
    }
}

/// Result of one channel application together with the trace it had before
/// renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub state: DensityOperator,
    pub raw_trace: f64,
}

impl ChannelOutput {
    pub fn leakage(&self) -> f64 {
        (self.raw_trace - 1.0).abs()
    }
}

/// `(M + M^dagger) / 2`, rescaled to unit trace. Returns the trace before
/// rescaling.
pub(crate) fn symmetrize_and_normalize(m: &mut ComplexMatrix) -> f64 {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let trace = m.trace().re;
    *m /= C64::new(trace, 0.0);
    trace
}

/// One atom passage: `K_e rho K_e^dag + K_g rho K_g^dag`, symmetrized and
/// renormalized.
pub fn apply_atom(rho: &DensityOperator, kraus: &KrausPair) -> Result<DensityOperator> {
    apply_atom_traced(rho, kraus).map(|out| out.state)
}

/// As [`apply_atom`], also reporting the pre-renormalization trace.
pub fn apply_atom_traced(rho: &DensityOperator, kraus: &KrausPair) -> Result<ChannelOutput> {
    apply_atom_with_limit(rho, kraus, LEAKAGE_LIMIT)
}

/// As [`apply_atom_traced`] with a caller-chosen leakage limit. An infinite
/// limit disables the guard.
pub fn apply_atom_with_limit(
    rho: &DensityOperator,
    kraus: &KrausPair,
    limit: f64,
) -> Result<ChannelOutput> {
    if rho.dim() != kraus.dim() {
        return Err(Error::DimensionMismatch {
            expected: kraus.dim(),
            found: rho.dim(),
        });
    }
    let r = rho.matrix();
    let mut out = &kraus.excited * r * kraus.excited.adjoint();
    out += &kraus.ground * r * kraus.ground.adjoint();
    let raw_trace = symmetrize_and_normalize(&mut out);
    let leakage = (raw_trace - 1.0).abs();
    if !(leakage <= limit) {
        return Err(Error::LeakageExceeded { leakage, limit });
    }
    Ok(ChannelOutput {
        state: DensityOperator::from_parts(rho.space(), out),
        raw_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{thermal_state, FockSpace};
    use crate::linalg::max_abs_diff;

    fn params(eps: f64, tau: f64, d: usize) -> ModelParams {
        ModelParams {
            eps: C64::new(eps, 0.0),
            tau,
            space: FockSpace::new(d).unwrap(),
            ..ModelParams::default()
        }
    }

    #[test]
    fn zero_time_kraus_is_scaled_identity() {
        let atom = AtomPrep::new(0.6, 0.8, 0.4).unwrap();
        let k = kraus_pair(&params(1.0, 0.0, 32), &atom);
        let (ce, cg) = atom.amplitudes();
        let id = identity(32);
        let block = k.safe_block();
        assert!(max_abs_diff_block(&k.excited, &(&id * ce), block) < 1e-8);
        assert!(max_abs_diff_block(&k.ground, &(&id * cg), block) < 1e-8);
    }

    #[test]
    fn zero_time_channel_is_identity() {
        let sp = FockSpace::new(64).unwrap();
        let rho = thermal_state(2.0, sp).unwrap();
        let k = kraus_pair(&params(1.0, 0.0, 64), &AtomPrep::excited());
        let out = apply_atom(&rho, &k).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn completeness_in_safe_block() {
        let k = kraus_pair(&params(1.0, 8.9, 64), &AtomPrep::balanced(0.5));
        assert_eq!(k.safe_block(), 36);
        assert!(k.completeness_defect(Some(k.safe_block())) <= 1e-6);
    }

    #[test]
    fn undriven_excited_atom_keeps_diagonal() {
        let sp = FockSpace::new(32).unwrap();
        let rho = thermal_state(0.5, sp).unwrap();
        let k = kraus_pair(&params(0.0, 4.2, 32), &AtomPrep::excited());
        let out = apply_atom(&rho, &k).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                if i != j {
                    assert!(out.matrix()[(i, j)].norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let rho = thermal_state(0.1, FockSpace::new(16).unwrap()).unwrap();
        let k = kraus_pair(&params(0.0, 1.0, 12), &AtomPrep::excited());
        assert!(matches!(
            apply_atom(&rho, &k),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn leakage_guard_trips_on_undersized_cutoff() {
        // a strongly displaced field in a tiny space loses most of its weight
        let sp = FockSpace::new(8).unwrap();
        let rho = DensityOperator::fock(sp, 6).unwrap();
        let k = kraus_pair(&params(2.5, 1.0, 8), &AtomPrep::excited());
        assert!(matches!(
            apply_atom(&rho, &k),
            Err(Error::LeakageExceeded { .. })
        ));
    }

    #[test]
    fn thermal_input_stays_normalized() {
        let sp = FockSpace::new(64).unwrap();
        let rho = thermal_state(5.0, sp).unwrap();
        let k = kraus_pair(&params(1.0, 8.9, 64), &AtomPrep::excited());
        let out = apply_atom_traced(&rho, &k).unwrap();
        assert!((out.state.trace() - 1.0).abs() <= 1e-8);
        assert!(out.leakage() <= LEAKAGE_LIMIT);
    }
}
