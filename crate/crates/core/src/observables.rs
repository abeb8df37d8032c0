//! Purity, photon statistics and phase-space diagnostics of a field state.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, DensityOperator};
use crate::linalg::C64;

/// Eigenvalues at or below this floor do not contribute to the entropy.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Below this mean photon number `g2(0)` is reported as undefined.
pub const VACUUM_THRESHOLD: f64 = 1e-9;

/// `1 - Tr rho^2`, clamped to `[0, 1]`.
pub fn linear_entropy(rho: &DensityOperator) -> f64 {
    (1.0 - rho.purity()).clamp(0.0, 1.0)
}

/// `-sum_i l_i ln l_i` over the eigenvalues above [`EIGENVALUE_FLOOR`].
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > EIGENVALUE_FLOOR)
        .map(|l| -l * l.ln())
        .sum()
}

pub fn mean_photon(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    (0..rho.dim()).map(|n| n as f64 * m[(n, n)].re).sum()
}

/// Normalized second-order coherence `<a^dag a^dag a a> / <a^dag a>^2`.
pub fn g2_zero(rho: &DensityOperator) -> Result<f64> {
    let m = rho.matrix();
    let mut first = 0.0;
    let mut second = 0.0;
    for n in 0..rho.dim() {
        let p = m[(n, n)].re;
        let nf = n as f64;
        first += nf * p;
        second += nf * (nf - 1.0) * p;
    }
    if first <= VACUUM_THRESHOLD {
        return Err(Error::UndefinedForVacuum { mean: first });
    }
    Ok(second / (first * first))
}

/// Photon-number distribution `p[n] = <n|rho|n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub p: Vec<f64>,
}

impl PhotonDistribution {
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Indices `0 < n < limit` with `p[n] < min(p[n-1], p[n+1])`.
    pub fn local_minima(&self, limit: usize) -> Vec<usize> {
        let end = limit.min(self.p.len().saturating_sub(1));
        (1..end)
            .filter(|&n| self.p[n] < self.p[n - 1].min(self.p[n + 1]))
            .collect()
    }

    /// Indices `0 < n < limit` with `p[n] > max(p[n-1], p[n+1])`.
    pub fn local_maxima(&self, limit: usize) -> Vec<usize> {
        let end = limit.min(self.p.len().saturating_sub(1));
        (1..end)
            .filter(|&n| self.p[n] > self.p[n - 1].max(self.p[n + 1]))
            .collect()
    }
}

/// Tiny negative populations from rounding are clamped to zero.
pub fn photon_distribution(rho: &DensityOperator) -> PhotonDistribution {
    let m = rho.matrix();
    let p = (0..rho.dim())
        .map(|n| {
            let v = m[(n, n)].re;
            if v < 0.0 && v > -1e-12 {
                0.0
            } else {
                v
            }
        })
        .collect();
    PhotonDistribution { p }
}

/// Rectangular phase-space grid, `beta = x + i y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_min: -4.0,
            x_max: 4.0,
            y_min: -4.0,
            y_max: 4.0,
            nx: 121,
            ny: 121,
        }
    }
}

fn axis(lo: f64, hi: f64, count: usize, i: usize) -> f64 {
    if count == 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (count - 1) as f64
    }
}

impl GridSpec {
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
            nx: points,
            ny: points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidParameter(
                "grid needs finite bounds and at least one point per axis".into(),
            ));
        }
        if self.x_min > self.x_max || self.y_min > self.y_max {
            return Err(Error::InvalidParameter("grid bounds are reversed".into()));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        axis(self.x_min, self.x_max, self.nx, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        axis(self.y_min, self.y_max, self.ny, j)
    }

    /// Largest `|beta|^2` reached on the grid (at a corner).
    pub fn max_beta_sq(&self) -> f64 {
        let x = self.x_min.abs().max(self.x_max.abs());
        let y = self.y_min.abs().max(self.y_max.abs());
        x * x + y * y
    }
}

/// Husimi function sampled on a [`GridSpec`]; `values[i * ny + j]` holds
/// `Q(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl QGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.ny + j]
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Grid point of the largest value, as `(x, y)`.
    pub fn argmax(&self) -> (f64, f64) {
        let (k, _) =
            self.values
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, &v)| {
                    if v > best.1 {
                        (k, v)
                    } else {
                        best
                    }
                });
        (self.spec.x(k / self.spec.ny), self.spec.y(k % self.spec.ny))
    }

    /// Riemann-sum estimate of `int Q dx dy`.
    pub fn integral(&self) -> f64 {
        let s = &self.spec;
        if s.nx < 2 || s.ny < 2 {
            return 0.0;
        }
        let dx = (s.x_max - s.x_min) / (s.nx - 1) as f64;
        let dy = (s.y_max - s.y_min) / (s.ny - 1) as f64;
        self.values.iter().sum::<f64>() * dx * dy
    }
}

/// `Q(x, y) = <beta| rho |beta> / pi`, rows evaluated in parallel.
pub fn q_function(rho: &DensityOperator, spec: &GridSpec) -> Result<QGrid> {
    spec.validate()?;
    let d = rho.dim();
    let limit = d as f64 / 2.0;
    let beta_sq_max = spec.max_beta_sq();
    if beta_sq_max > limit {
        return Err(Error::GridOutsideTruncation {
            beta_sq_max,
            limit,
            cutoff: d,
        });
    }
    let m = rho.matrix();
    let values: Vec<f64> = (0..spec.nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = spec.x(i);
            (0..spec.ny).map(move |j| {
                let c = coherent_amplitudes(C64::new(x, spec.y(j)), d);
                let mut acc = C64::new(0.0, 0.0);
                for (np, &cnp) in c.iter().enumerate() {
                    let col = m.column(np);
                    let mut inner = C64::new(0.0, 0.0);
                    for (n, &cn) in c.iter().enumerate() {
                        inner += cn.conj() * col[n];
                    }
                    acc += inner * cnp;
                }
                (acc.re / PI).max(0.0)
            })
        })
        .collect();
    Ok(QGrid {
        spec: *spec,
        values,
    })
}
