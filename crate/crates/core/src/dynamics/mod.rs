//! Driven two-photon Jaynes-Cummings evolution and the single-atom field
//! channel it induces.
//!
//! All quantities are dimensionless: energies are in units of the two-photon
//! coupling `lambda` and times are `tau = lambda t`. The joint space is ordered
//! atom-major, `[|e> (x) field, |g> (x) field]`, and the undisplaced propagator
//! is `exp(-i tau G)` with
//!
//! `G = (Delta/2) sz + chi a^dag a sz + a^dag^2 s- + a^2 s+`.
//!
//! `G` couples `|e, n>` only to `|g, n+2>`, so the propagator splits into
//! 2x2 blocks that are evaluated in closed form.

mod channel;
mod recursion;
mod unitary;

pub use channel::{
    apply_atom, apply_atom_traced, apply_atom_with_limit, kraus_pair, safe_block, ChannelOutput,
    KrausPair, LEAKAGE_LIMIT,
};
pub use recursion::{recursion_oracle, recursion_oracle_raw};
pub use unitary::{
    block_unitary, full_unitary, generator, unitary_exponential_oracle, AtomFieldUnitary,
};

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::linalg::C64;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Physical configuration of one atom passage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Stark coefficient over coupling, `chi / lambda`.
    pub chi_over_lambda: f64,
    /// Two-photon detuning over coupling, `Delta / lambda`.
    pub delta_over_lambda: f64,
    /// Classical drive amplitude (displacement).
    pub eps: C64,
    /// Interaction time `lambda t`.
    pub tau: f64,
    pub space: FockSpace,
}

impl Default for ModelParams {
    /// `chi = Delta = lambda`, `eps = 1`, `tau = 8.9`, 64 Fock levels.
    fn default() -> Self {
        Self {
            chi_over_lambda: 1.0,
            delta_over_lambda: 1.0,
            eps: C64::new(1.0, 0.0),
            tau: 8.9,
            space: FockSpace::default(),
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = self.chi_over_lambda.is_finite()
            && self.delta_over_lambda.is_finite()
            && self.eps.is_finite()
            && self.tau.is_finite();
        if !finite {
            return Err(Error::InvalidParameter(
                "model parameters must be finite".into(),
            ));
        }
        if self.tau < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "interaction time must be nonnegative, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    pub fn with_eps(self, eps: C64) -> Self {
        Self { eps, ..self }
    }

    pub fn with_space(self, space: FockSpace) -> Self {
        Self { space, ..self }
    }

    pub fn cutoff(&self) -> usize {
        self.space.cutoff()
    }
}

/// Atomic injection state `b |g> + a e^{i phi} |e>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPrep {
    a: f64,
    b: f64,
    phi: f64,
}

impl AtomPrep {
    pub fn new(a: f64, b: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "atom amplitudes must lie in [0, 1] with finite phase (a = {a}, b = {b}, phi = {phi})"
            )));
        }
        let norm = a * a + b * b;
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "atom state not normalized: a^2 + b^2 = {norm}"
            )));
        }
        Ok(Self { a, b, phi })
    }

    pub fn excited() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            phi: 0.0,
        }
    }

    pub fn ground() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            phi: 0.0,
        }
    }

    /// Equal-weight superposition with relative phase `phi`.
    pub fn balanced(phi: f64) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { a: h, b: h, phi }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(<e|phi_a>, <g|phi_a>)`.
    pub fn amplitudes(&self) -> (C64, C64) {
        (C64::from_polar(self.a, self.phi), C64::new(self.b, 0.0))
    }
}

/// Generalized Rabi frequencies of the 2x2 blocks.
///
/// `gamma[n]` belongs to the block `{|e,n>, |g,n+2>}` and `epsilon[n]` to
/// `{|e,n-2>, |g,n>}`, so `epsilon[n + 2] == gamma[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiFrequencies {
    pub gamma: Vec<f64>,
    pub epsilon: Vec<f64>,
    chi: f64,
    half_delta: f64,
}

pub fn rabi_frequencies(params: &ModelParams) -> RabiFrequencies {
    let chi = params.chi_over_lambda;
    let half_delta = params.delta_over_lambda / 2.0;
    let d = params.cutoff();
    let mut gamma = Vec::with_capacity(d);
    let mut epsilon = Vec::with_capacity(d);
    for n in 0..d {
        let nf = n as f64;
        let up = half_delta + chi * (nf + 1.0);
        let down = half_delta + chi * (nf - 1.0);
        gamma.push((up * up + (nf + 1.0) * (nf + 2.0)).sqrt());
        epsilon.push((down * down + nf * (nf - 1.0)).sqrt());
    }
    RabiFrequencies {
        gamma,
        epsilon,
        chi,
        half_delta,
    }
}

/// `sin(w t) / w`, continuous at `w = 0`.
fn sinc_time(w: f64, t: f64) -> f64 {
    if w.abs() < 1e-300 {
        t
    } else {
        (w * t).sin() / w
    }
}

impl RabiFrequencies {
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// Detuning of the block `{|e,n>, |g,n+2>}`: `Delta/2 + chi (n+1)`.
    fn detuning_up(&self, n: usize) -> f64 {
        self.half_delta + self.chi * (n as f64 + 1.0)
    }

    /// Detuning of the block `{|e,n-2>, |g,n>}`: `Delta/2 + chi (n-1)`.
    fn detuning_down(&self, n: usize) -> f64 {
        self.half_delta + self.chi * (n as f64 - 1.0)
    }

    /// Every 2x2 block has trace `-2 chi`, which factors out as `exp(i chi tau)`.
    fn block_phase(&self, tau: f64) -> C64 {
        C64::from_polar(1.0, self.chi * tau)
    }

    /// `<e,n| U_tp |e,n>`. The two top levels have no partner inside the
    /// truncated space and only pick up their diagonal phase.
    pub fn excited_diagonal(&self, n: usize, tau: f64) -> C64 {
        if n + 2 >= self.len() {
            let energy = self.half_delta + self.chi * n as f64;
            return C64::from_polar(1.0, -energy * tau);
        }
        let g = self.gamma[n];
        let s = self.detuning_up(n);
        self.block_phase(tau) * C64::new((g * tau).cos(), -s * sinc_time(g, tau))
    }

    /// `<g,n| U_tp |g,n>`. Covers the dark levels `n = 0, 1`.
    pub fn ground_diagonal(&self, n: usize, tau: f64) -> C64 {
        let w = self.epsilon[n];
        let s = self.detuning_down(n);
        self.block_phase(tau) * C64::new((w * tau).cos(), s * sinc_time(w, tau))
    }

    /// `<g,n+2| U_tp |e,n> / sqrt((n+1)(n+2))`; zero for the unpaired top levels.
    pub fn emission(&self, n: usize, tau: f64) -> C64 {
        if n + 2 >= self.len() {
            return C64::new(0.0, 0.0);
        }
        self.block_phase(tau) * C64::new(0.0, -sinc_time(self.gamma[n], tau))
    }

    /// `<e,n-2| U_tp |g,n> / sqrt(n(n-1))`; zero for the dark levels.
    pub fn absorption(&self, n: usize, tau: f64) -> C64 {
        if n < 2 {
            return C64::new(0.0, 0.0);
        }
        self.block_phase(tau) * C64::new(0.0, -sinc_time(self.epsilon[n], tau))
    }
}
