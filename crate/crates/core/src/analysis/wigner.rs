//! Wigner functions of pure truncated states.
//!
//! With `beta = x + i p` (so that `<a> = <X> + i<P>`), the vacuum is
//! `W = (2/pi) exp(-2|beta|^2)` and `∫∫ W dx dp = 1`. Matrix elements
//! `W_mn(beta)` are generated by the two-term recurrence
//!
//! ```text
//! W_0n = 2 beta W_0,n-1 / sqrt(n)
//! W_mm = (2 beta* W_m-1,m - sqrt(m) W_m-1,m-1) / sqrt(m)
//! W_mn = (2 beta W_m,n-1 - sqrt(m) W_m-1,n) / sqrt(n)
//! ```
//!
//! which stays bounded where factorial ratios would overflow.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature_moments;
use crate::error::{Error, Result};
use crate::fock::FockState;

/// Sampling grid: `nx` by `np` cell centres over the given ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::symmetric(5.0, 201)
    }
}

impl GridSpec {
    /// `[-half_width, half_width]^2` with `points` samples per axis.
    pub fn symmetric(half_width: f64, points: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            p_min: -half_width,
            p_max: half_width,
            nx: points,
            np: points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.np == 0 {
            return Err(Error::InvalidSpec("wigner grid needs at least one point per axis".into()));
        }
        if !(self.x_max > self.x_min) || !(self.p_max > self.p_min) {
            return Err(Error::InvalidSpec("wigner grid ranges must be increasing".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + (j as f64 + 0.5) * self.dp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub spec: GridSpec,
    /// `values[i * np + j] = W(x_i, p_j)`.
    pub values: Vec<f64>,
    /// Coverage problems noticed while sampling (empty when none).
    pub warnings: Vec<String>,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.np + j]
    }

    /// Midpoint-rule integral over the grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.dx() * self.spec.dp()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Wigner function of a pure state at one phase-space point.
pub fn wigner_at(s: &FockState, x: f64, p: f64) -> f64 {
    let c = s.amplitudes();
    let dim = c.len();
    let beta = Complex64::new(x, p);
    let two_beta = 2.0 * beta;
    let two_beta_conj = two_beta.conj();
    let sqrt: Vec<f64> = (0..dim).map(|n| (n as f64).sqrt()).collect();

    // row[n] holds W_{m,n} for the current m (n >= m)
    let mut row = vec![Complex64::new(0.0, 0.0); dim];
    row[0] = Complex64::new((-2.0 * beta.norm_sqr()).exp(), 0.0);
    for n in 1..dim {
        row[n] = two_beta * row[n - 1] / sqrt[n];
    }
    // rho_mn = c_m conj(c_n); off-diagonal pairs enter twice
    let mut acc = c[0].norm_sqr() * row[0].re;
    for n in 1..dim {
        acc += 2.0 * (c[0] * c[n].conj() * row[n]).re;
    }
    for m in 1..dim {
        let mut prev_m = row[m];
        row[m] = (two_beta_conj * prev_m - sqrt[m] * row[m - 1]) / sqrt[m];
        acc += c[m].norm_sqr() * row[m].re;
        for n in (m + 1)..dim {
            let next = (two_beta * row[n - 1] - sqrt[m] * prev_m) / sqrt[n];
            prev_m = row[n];
            row[n] = next;
            acc += 2.0 * (c[m] * c[n].conj() * row[n]).re;
        }
    }
    acc * 2.0 / std::f64::consts::PI / s.norm_sqr()
}

/// Samples the Wigner function on `spec`, one row of constant `x` per task.
pub fn wigner(s: &FockState, spec: &GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    let values: Vec<f64> = (0..spec.nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = spec.x(i);
            (0..spec.np).map(move |j| wigner_at(s, x, spec.p(j)))
        })
        .collect();

    let mut warnings = Vec::new();
    let q = quadrature_moments(s);
    let (sx, sp) = (q.var_x.max(0.0).sqrt(), q.var_p.max(0.0).sqrt());
    let covered = |mean: f64, sd: f64, lo: f64, hi: f64| mean - 4.0 * sd >= lo && mean + 4.0 * sd <= hi;
    if !covered(q.mean_x, sx, spec.x_min, spec.x_max) {
        warnings.push(format!(
            "x range [{}, {}] covers less than 4 sd around <X> = {:.4} (sd {:.4})",
            spec.x_min, spec.x_max, q.mean_x, sx
        ));
    }
    if !covered(q.mean_p, sp, spec.p_min, spec.p_max) {
        warnings.push(format!(
            "p range [{}, {}] covers less than 4 sd around <P> = {:.4} (sd {:.4})",
            spec.p_min, spec.p_max, q.mean_p, sp
        ));
    }
    Ok(WignerGrid {
        spec: *spec,
        values,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Negativity {
    pub min_value: f64,
    /// `∫∫ |W|` over the region where `W < 0`.
    pub negative_volume: f64,
}

pub fn wigner_negativity(w: &WignerGrid) -> Negativity {
    let cell = w.spec.dx() * w.spec.dp();
    Negativity {
        min_value: w.min(),
        negative_volume: w.values.iter().filter(|v| **v < 0.0).map(|v| -v).sum::<f64>() * cell,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::CoherentAmplitude;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn vacuum_peak_and_normalization() {
        let vac = FockState::vacuum(10).unwrap();
        assert_abs_diff_eq!(wigner_at(&vac, 0.0, 0.0), 2.0 / PI, epsilon = 1e-12);
        let w = wigner(&vac, &GridSpec::default()).unwrap();
        assert_abs_diff_eq!(w.get(100, 100), 2.0 / PI, epsilon = 1e-9);
        assert_abs_diff_eq!(w.integral(), 1.0, epsilon = 1e-6);
        assert!(w.warnings.is_empty());
        let neg = wigner_negativity(&w);
        assert!(neg.min_value >= -1e-9);
        assert!(neg.negative_volume < 1e-12);
    }

    #[test]
    fn single_photon_is_negative_at_origin() {
        let one = FockState::fock(1, 4).unwrap();
        assert_abs_diff_eq!(wigner_at(&one, 0.0, 0.0), -2.0 / PI, epsilon = 1e-12);
    }

    #[test]
    fn fock_states_match_laguerre_closed_form() {
        // W_n = (2/pi) (-1)^n L_n(4 r^2) e^{-2 r^2}, Laguerre by its own recurrence
        for n in 0..8 {
            let s = FockState::fock(n, 10).unwrap();
            for (x, p) in [(0.3, -0.2), (1.1, 0.4), (-0.7, 0.9)] {
                let u: f64 = 4.0 * (x * x + p * p);
                let (mut l0, mut l1) = (1.0, 1.0 - u);
                let l = if n == 0 {
                    l0
                } else {
                    for k in 1..n {
                        let l2 = ((2 * k + 1) as f64 - u) * l1 / (k + 1) as f64 - k as f64 * l0 / (k + 1) as f64;
                        l0 = l1;
                        l1 = l2;
                    }
                    l1
                };
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let expected = 2.0 / PI * sign * l * (-u / 2.0).exp();
                assert_abs_diff_eq!(wigner_at(&s, x, p), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn coherent_state_is_a_displaced_gaussian() {
        let alpha = num_complex::Complex64::new(0.5, 1.0);
        let s = FockState::coherent(CoherentAmplitude::new(alpha).unwrap(), 40).unwrap();
        for (x, p) in [(0.5, 1.0), (0.0, 0.0), (1.2, 0.3)] {
            let d2 = (x - 0.5f64).powi(2) + (p - 1.0f64).powi(2);
            assert_abs_diff_eq!(wigner_at(&s, x, p), 2.0 / PI * (-2.0 * d2).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn narrow_grid_is_flagged() {
        let s = FockState::coherent(CoherentAmplitude::real(2.0).unwrap(), 40).unwrap();
        let spec = GridSpec {
            x_min: -1.5,
            x_max: 1.5,
            p_min: -3.0,
            p_max: 3.0,
            nx: 11,
            np: 11,
        };
        let w = wigner(&s, &spec).unwrap();
        assert_eq!(w.warnings.len(), 1);
        assert!(w.warnings[0].starts_with("x range"));
        assert!(GridSpec::symmetric(1.0, 0).validate().is_err());
    }
}
