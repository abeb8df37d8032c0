//! Multi-atom runs and the analyses built on them.
//!
//! Every atom sees the same interaction time, so one Kraus pair is built per
//! run and applied repeatedly. Runs are strictly sequential; scans over the
//! interaction time are parallel across candidates.

use rayon::prelude::*;
use std::fmt;

use crate::dynamics::{
    apply_atom_with_limit, kraus_pair, AtomPrep, KrausPair, ModelParams, LEAKAGE_LIMIT,
};
use crate::error::{Error, Result};
use crate::fock::{thermal_state, DensityOperator, FockSpace};
use crate::linalg::{max_abs_diff_block, C64};
use crate::observables::{
    g2_zero, linear_entropy, mean_photon, photon_distribution, q_function, GridSpec,
    PhotonDistribution, QGrid,
};

/// A candidate interaction time is rejected when `<n>` ever drops below
/// `n_bar - ENERGY_TOLERANCE`.
pub const ENERGY_TOLERANCE: f64 = 0.1;

/// Largest linear-entropy drift accepted by [`convergence_audit`].
pub const AUDIT_ZETA_TOLERANCE: f64 = 1e-3;

pub const REFERENCE_N_BAR: f64 = 5.0;
pub const REFERENCE_TAU: f64 = 8.9;
pub const REFERENCE_N_ATOMS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub atom: AtomPrep,
    pub n_atoms: usize,
    pub n_bar: f64,
    /// Atom counts after which the photon distribution (and Q grid, when
    /// `grid` is set) is stored. `0` is the initial state.
    pub snapshots: Vec<usize>,
    pub grid: Option<GridSpec>,
    /// Per-atom bound on the pre-renormalization trace loss; the run fails
    /// with `LeakageExceeded` beyond it. Defaults to [`LEAKAGE_LIMIT`].
    pub leakage_limit: f64,
}

impl RunConfig {
    /// Thermal field with `n_bar = 5`, excited atoms, `chi = Delta = lambda`,
    /// `tau = 8.9`, 100 atoms, 64 Fock levels, drive `eps`.
    pub fn reference(eps: f64) -> Self {
        Self {
            params: ModelParams {
                eps: C64::new(eps, 0.0),
                tau: REFERENCE_TAU,
                ..ModelParams::default()
            },
            atom: AtomPrep::excited(),
            n_atoms: REFERENCE_N_ATOMS,
            n_bar: REFERENCE_N_BAR,
            snapshots: Vec::new(),
            grid: None,
            leakage_limit: LEAKAGE_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_atoms == 0 {
            return Err(Error::InvalidParameter("n_atoms must be at least 1".into()));
        }
        if let Some(&k) = self.snapshots.iter().find(|&&k| k > self.n_atoms) {
            return Err(Error::InvalidParameter(format!(
                "snapshot index {k} exceeds n_atoms = {}",
                self.n_atoms
            )));
        }
        if !(self.n_bar >= 0.0) || !self.n_bar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "invalid n_bar {}",
                self.n_bar
            )));
        }
        if !(self.leakage_limit > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "leakage limit must be positive, got {}",
                self.leakage_limit
            )));
        }
        if let Some(grid) = &self.grid {
            grid.validate()?;
        }
        Ok(())
    }

    pub fn with_space(&self, space: FockSpace) -> Self {
        Self {
            params: self.params.with_space(space),
            ..self.clone()
        }
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self {
            params: self.params.with_tau(tau),
            ..self.clone()
        }
    }

    pub fn with_eps(&self, eps: C64) -> Self {
        Self {
            params: self.params.with_eps(eps),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub index: usize,
    pub distribution: PhotonDistribution,
    pub q: Option<QGrid>,
}

/// Per-atom record; entry `k` describes the field after `k` atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub zeta: Vec<f64>,
    pub mean_n: Vec<f64>,
    /// `NaN` where `g2(0)` is undefined (vacuum).
    pub g2: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: DensityOperator,
    /// Largest pre-renormalization trace deviation of any passage.
    pub max_leakage: f64,
}

impl ObservableSeries {
    /// `(atom index, zeta)` of the smallest linear entropy; the earliest wins ties.
    pub fn min_zeta(&self) -> (usize, f64) {
        self.zeta
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (k, z)| if z < best.1 { (k, z) } else { best },
            )
    }

    pub fn min_mean_n(&self) -> f64 {
        self.mean_n.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn record(
    rho: &DensityOperator,
    index: usize,
    config: &RunConfig,
    series: &mut ObservableSeries,
) -> Result<()> {
    series.zeta.push(linear_entropy(rho));
    series.mean_n.push(mean_photon(rho));
    series.g2.push(g2_zero(rho).unwrap_or(f64::NAN));
    if config.snapshots.contains(&index) {
        let q = match &config.grid {
            Some(spec) => Some(q_function(rho, spec)?),
            None => None,
        };
        series.snapshots.push(Snapshot {
            index,
            distribution: photon_distribution(rho),
            q,
        });
    }
    Ok(())
}

fn evolve<F>(config: &RunConfig, kraus: &KrausPair, mut each: F) -> Result<ObservableSeries>
where
    F: FnMut(usize, &DensityOperator) -> Result<()>,
{
    config.validate()?;
    let mut rho = thermal_state(config.n_bar, config.params.space)?;
    let mut series = ObservableSeries {
        zeta: Vec::with_capacity(config.n_atoms + 1),
        mean_n: Vec::with_capacity(config.n_atoms + 1),
        g2: Vec::with_capacity(config.n_atoms + 1),
        snapshots: Vec::new(),
        final_state: rho.clone(),
        max_leakage: 0.0,
    };
    record(&rho, 0, config, &mut series)?;
    for k in 1..=config.n_atoms {
        each(k, &rho)?;
        let out = apply_atom_with_limit(&rho, kraus, config.leakage_limit)?;
        series.max_leakage = series.max_leakage.max(out.leakage());
        rho = out.state;
        record(&rho, k, config, &mut series)?;
    }
    series.final_state = rho;
    Ok(series)
}

/// Sends `n_atoms` identical atoms through an initially thermal cavity.
pub fn run_sequence(config: &RunConfig) -> Result<ObservableSeries> {
    config.validate()?;
    let kraus = kraus_pair(&config.params, &config.atom);
    evolve(config, &kraus, |_, _| Ok(()))
}

/// Interaction-time scan settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauScan {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub refine_iters: usize,
}

impl TauScan {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo >= 0.0) || !(self.hi >= self.lo) || !self.hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tau scan needs 0 <= lo <= hi (lo = {}, hi = {})",
                self.lo, self.hi
            )));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tau scan step must be positive, got {}",
                self.step
            )));
        }
        Ok(())
    }

    /// `floor((hi - lo) / step) + 1` points starting at `lo`.
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

/// Objective value of one interaction time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSample {
    pub tau: f64,
    /// Smallest linear entropy reached along the run (`NaN` if the run failed).
    pub zeta_min: f64,
    pub argmin_atom: usize,
    pub min_mean_n: f64,
    /// Run succeeded and never lost field energy.
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauOptimum {
    pub tau_star: f64,
    pub zeta_min: f64,
    pub argmin_atom: usize,
    /// `false` when no candidate met the energy condition and the best
    /// unconstrained candidate was returned instead.
    pub energy_constraint_met: bool,
    /// The coarse grid, in scan order.
    pub coarse: Vec<TauSample>,
    /// Every refinement candidate.
    pub refined: Vec<TauSample>,
}

fn evaluate_tau(config: &RunConfig, tau: f64) -> TauSample {
    let cfg = RunConfig {
        snapshots: Vec::new(),
        grid: None,
        ..config.with_tau(tau)
    };
    match run_sequence(&cfg) {
        Ok(series) => {
            let (argmin_atom, zeta_min) = series.min_zeta();
            let min_mean_n = series.min_mean_n();
            TauSample {
                tau,
                zeta_min,
                argmin_atom,
                min_mean_n,
                admissible: min_mean_n >= config.n_bar - ENERGY_TOLERANCE,
            }
        }
        Err(_) => TauSample {
            tau,
            zeta_min: f64::NAN,
            argmin_atom: 0,
            min_mean_n: f64::NAN,
            admissible: false,
        },
    }
}

/// Strictly better: lower zeta, or equal zeta at a shorter time.
fn better(a: &TauSample, b: &TauSample) -> bool {
    a.zeta_min < b.zeta_min || (a.zeta_min == b.zeta_min && a.tau < b.tau)
}

fn best_of<'a, I>(samples: I, admissible_only: bool) -> Option<TauSample>
where
    I: IntoIterator<Item = &'a TauSample>,
{
    samples
        .into_iter()
        .filter(|s| !s.zeta_min.is_nan() && (!admissible_only || s.admissible))
        .fold(None, |best: Option<TauSample>, s| match best {
            Some(b) if !better(s, &b) => Some(b),
            _ => Some(*s),
        })
}

fn scan(config: &RunConfig, taus: &[f64]) -> Vec<TauSample> {
    taus.par_iter()
        .map(|&tau| evaluate_tau(config, tau))
        .collect()
}

/// Coarse-to-fine grid search for the interaction time giving the smallest
/// linear entropy along the run, among times that never reduce the field
/// energy. Each refinement round rescans `[tau* - step, tau* + step]` with a
/// ten times finer step. `config.params.tau` is ignored.
pub fn optimize_interaction_time(config: &RunConfig, scan_spec: &TauScan) -> Result<TauOptimum> {
    config.validate()?;
    scan_spec.validate()?;
    let coarse = scan(config, &scan_spec.grid());
    let constrained = best_of(&coarse, true);
    let energy_constraint_met = constrained.is_some();
    let mut best = constrained
        .or_else(|| best_of(&coarse, false))
        .ok_or_else(|| Error::InvalidParameter("every candidate run failed".into()))?;

    let mut refined = Vec::new();
    let mut step = scan_spec.step;
    for _ in 0..scan_spec.refine_iters {
        let fine = step / 10.0;
        let taus: Vec<f64> = (-10..=10)
            .map(|k| best.tau + k as f64 * fine)
            .filter(|&t| t >= scan_spec.lo - 1e-12 && t <= scan_spec.hi + 1e-12)
            .map(|t| t.clamp(scan_spec.lo, scan_spec.hi))
            .collect();
        let samples = scan(config, &taus);
        if let Some(candidate) = best_of(&samples, energy_constraint_met) {
            if better(&candidate, &best) {
                best = candidate;
            }
        }
        refined.extend(samples);
        step = fine;
    }

    Ok(TauOptimum {
        tau_star: best.tau,
        zeta_min: best.zeta_min,
        argmin_atom: best.argmin_atom,
        energy_constraint_met,
        coarse,
        refined,
    })
}

/// Reduced 2x2 atomic state `[[ee, eg], [ge, gg]]`.
pub type AtomState = [[C64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct AtomExitRecord {
    /// Exit state of atom `k + 1`.
    pub states: Vec<AtomState>,
    /// `Tr rho_a^2` for each entry of `states`.
    pub purity: Vec<f64>,
}

/// `rho_a(x, y) = Tr[K_x rho K_y^dagger]`, normalized.
fn atomic_state(rho: &DensityOperator, kraus: &KrausPair) -> AtomState {
    let ops = kraus.operators();
    let r = rho.matrix();
    let mut s = [[C64::new(0.0, 0.0); 2]; 2];
    let applied: Vec<_> = ops.iter().map(|k| *k * r).collect();
    for x in 0..2 {
        for y in 0..2 {
            // Tr[A B^dagger] = sum_ij A_ij conj(B_ij)
            s[x][y] = applied[x]
                .iter()
                .zip(ops[y].iter())
                .map(|(a, b)| a * b.conj())
                .sum();
        }
    }
    let trace = s[0][0].re + s[1][1].re;
    for row in s.iter_mut() {
        for z in row.iter_mut() {
            *z /= trace;
        }
    }
    // exact Hermitian form
    s[0][0].im = 0.0;
    s[1][1].im = 0.0;
    let off = (s[0][1] + s[1][0].conj()) * 0.5;
    s[0][1] = off;
    s[1][0] = off.conj();
    s
}

pub fn atom_state_purity(s: &AtomState) -> f64 {
    s.iter().flatten().map(|z| z.norm_sqr()).sum()
}

/// Reduced state of every atom as it leaves the cavity.
pub fn atom_exit_states(config: &RunConfig) -> Result<AtomExitRecord> {
    config.validate()?;
    let kraus = kraus_pair(&config.params, &config.atom);
    let mut states = Vec::with_capacity(config.n_atoms);
    evolve(config, &kraus, |_, rho| {
        states.push(atomic_state(rho, &kraus));
        Ok(())
    })?;
    let purity = states.iter().map(atom_state_purity).collect();
    Ok(AtomExitRecord { states, purity })
}

/// Runs at `+eps` and `-eps` and returns
/// `max |rho_-(n,n') - (-1)^(n-n') rho_+(n,n')|` for the final states.
///
/// The reflection is a symmetry of the truncated dynamics itself, so the
/// leakage guard is switched off for both runs.
pub fn parity_reflection_check(config: &RunConfig) -> Result<f64> {
    let plain = RunConfig {
        snapshots: Vec::new(),
        grid: None,
        leakage_limit: f64::INFINITY,
        ..config.clone()
    };
    let plus = run_sequence(&plain)?;
    if config.params.eps == C64::new(0.0, 0.0) {
        return Ok(0.0);
    }
    let minus = run_sequence(&plain.with_eps(-config.params.eps))?;
    let a = plus.final_state.matrix();
    let b = minus.final_state.matrix();
    let mut worst = 0.0_f64;
    for n in 0..a.nrows() {
        for np in 0..a.ncols() {
            let sign = if (n + np) % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((b[(n, np)] - a[(n, np)] * sign).norm());
        }
    }
    Ok(worst)
}

/// Comparison of a run against the same run with twice the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub cutoff: usize,
    pub doubled_cutoff: usize,
    pub zeta_drift: f64,
    pub mean_n_drift: f64,
    /// Largest entry difference of the final states over the common block.
    pub state_drift: f64,
    pub max_leakage: f64,
    /// Failure of either run, if any.
    pub error: Option<String>,
    pub pass: bool,
}

fn max_series_drift(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn convergence_audit(config: &RunConfig) -> AuditReport {
    let cutoff = config.params.cutoff();
    let doubled = config.params.space.doubled();
    let plain = RunConfig {
        snapshots: Vec::new(),
        grid: None,
        ..config.clone()
    };
    let failed = |error: String| AuditReport {
        cutoff,
        doubled_cutoff: doubled.cutoff(),
        zeta_drift: f64::NAN,
        mean_n_drift: f64::NAN,
        state_drift: f64::NAN,
        max_leakage: f64::NAN,
        error: Some(error),
        pass: false,
    };
    let base = match run_sequence(&plain) {
        Ok(s) => s,
        Err(e) => return failed(format!("cutoff {cutoff}: {e}")),
    };
    let fine = match run_sequence(&plain.with_space(doubled)) {
        Ok(s) => s,
        Err(e) => return failed(format!("cutoff {}: {e}", doubled.cutoff())),
    };
    let zeta_drift = max_series_drift(&base.zeta, &fine.zeta);
    let mean_n_drift = max_series_drift(&base.mean_n, &fine.mean_n);
    let state_drift = max_abs_diff_block(
        base.final_state.matrix(),
        &fine
            .final_state
            .matrix()
            .view((0, 0), (cutoff, cutoff))
            .into_owned(),
        cutoff,
    );
    AuditReport {
        cutoff,
        doubled_cutoff: doubled.cutoff(),
        zeta_drift,
        mean_n_drift,
        state_drift,
        max_leakage: base.max_leakage.max(fine.max_leakage),
        error: None,
        pass: zeta_drift <= AUDIT_ZETA_TOLERANCE,
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "status: {}", if self.pass { "PASS" } else { "FAIL" })?;
        writeln!(f, "cutoff: {}", self.cutoff)?;
        writeln!(f, "doubled_cutoff: {}", self.doubled_cutoff)?;
        writeln!(f, "zeta_drift: {:e}", self.zeta_drift)?;
        writeln!(f, "zeta_tolerance: {:e}", AUDIT_ZETA_TOLERANCE)?;
        writeln!(f, "mean_n_drift: {:e}", self.mean_n_drift)?;
        writeln!(f, "state_drift: {:e}", self.state_drift)?;
        writeln!(f, "max_leakage: {:e}", self.max_leakage)?;
        if let Some(e) = &self.error {
            writeln!(f, "error: {e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(eps: f64, tau: f64) -> RunConfig {
        RunConfig {
            params: ModelParams {
                eps: C64::new(eps, 0.0),
                tau,
                space: FockSpace::new(32).unwrap(),
                ..ModelParams::default()
            },
            atom: AtomPrep::excited(),
            n_atoms: 10,
            n_bar: 0.5,
            snapshots: vec![0, 10],
            grid: Some(GridSpec::square(2.5, 7)),
            leakage_limit: LEAKAGE_LIMIT,
        }
    }

    #[test]
    fn zero_time_run_is_constant() {
        let s = run_sequence(&small(1.0, 0.0)).unwrap();
        assert_eq!(s.zeta.len(), 11);
        for k in 1..=10 {
            assert!((s.zeta[k] - s.zeta[0]).abs() < 1e-12);
            assert!((s.mean_n[k] - s.mean_n[0]).abs() < 1e-10);
            assert!((s.g2[k] - s.g2[0]).abs() < 1e-9);
        }
        assert_eq!(s.snapshots.len(), 2);
        assert!(s.snapshots[1].q.is_some());
    }

    #[test]
    fn config_validation() {
        let mut c = small(1.0, 1.0);
        c.snapshots = vec![11];
        assert!(run_sequence(&c).is_err());
        let mut c = small(1.0, 1.0);
        c.n_atoms = 0;
        assert!(run_sequence(&c).is_err());
    }

    #[test]
    fn vacuum_g2_is_nan() {
        let mut c = small(0.0, 1.0);
        c.n_bar = 0.0;
        c.atom = AtomPrep::ground();
        let s = run_sequence(&c).unwrap();
        assert!(s.g2.iter().all(|g| g.is_nan()));
        assert!(s.zeta.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn scan_grid_size() {
        let s = TauScan {
            lo: 0.0,
            hi: 12.0,
            step: 0.05,
            refine_iters: 0,
        };
        assert_eq!(s.grid().len(), 241);
        let s = TauScan {
            lo: 1.0,
            hi: 1.3,
            step: 0.1,
            refine_iters: 0,
        };
        assert_eq!(s.grid().len(), 4);
    }

    #[test]
    fn degenerate_scan() {
        let c = small(1.0, 3.0);
        let opt = optimize_interaction_time(
            &c,
            &TauScan {
                lo: 0.0,
                hi: 0.0,
                step: 0.05,
                refine_iters: 2,
            },
        )
        .unwrap();
        assert_eq!(opt.tau_star, 0.0);
        let thermal = linear_entropy(&thermal_state(0.5, c.params.space).unwrap());
        assert!((opt.zeta_min - thermal).abs() < 1e-12);
    }

    #[test]
    fn optimum_bounds_every_evaluated_point() {
        let c = small(0.5, 0.0);
        let opt = optimize_interaction_time(
            &c,
            &TauScan {
                lo: 0.0,
                hi: 3.0,
                step: 0.25,
                refine_iters: 1,
            },
        )
        .unwrap();
        assert!(opt.energy_constraint_met);
        for s in opt
            .coarse
            .iter()
            .chain(&opt.refined)
            .filter(|s| s.admissible)
        {
            assert!(opt.zeta_min <= s.zeta_min);
        }
    }

    #[test]
    fn exit_states_at_zero_time_are_pure() {
        let mut c = small(1.0, 0.0);
        c.atom = AtomPrep::balanced(0.7);
        let rec = atom_exit_states(&c).unwrap();
        assert_eq!(rec.purity.len(), 10);
        assert!(rec.purity.iter().all(|&p| (p - 1.0).abs() < 1e-9));
        let s = rec.states[0];
        assert!((s[0][1] - C64::from_polar(0.5, 0.7)).norm() < 1e-9);
    }

    #[test]
    fn undriven_parity_check_is_exactly_zero() {
        assert_eq!(parity_reflection_check(&small(0.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn audit_trivial_and_failing_cases() {
        let mut c = small(0.0, 0.0);
        c.n_bar = 0.0;
        let r = convergence_audit(&c);
        assert!(r.pass);
        assert_eq!(r.zeta_drift, 0.0);
        let mut c = small(0.0, 1.0);
        c.params.space = FockSpace::new(16).unwrap();
        c.n_bar = 5.0;
        let r = convergence_audit(&c);
        assert!(!r.pass);
        assert!(r.error.is_some());
        assert!(r.to_string().starts_with("status: FAIL"));
    }
}
