//! Two-mode reference path: tensor product, exact beam-splitter unitary and
//! photon-number projection.
//!
//! Creation operators transform as `a† -> t a† + r b†`, `b† -> -r a† + t b†`
//! (mode `a` carries the coherent light, mode `b` the catalyst). The unitary
//! conserves total photon number, so it is applied one block `n_a + n_b = N`
//! at a time with matrix elements expanded from that rule directly.

use num_complex::Complex64;
use serde::Serialize;

use super::{BeamSplitter, CatalysisConfig, Heralded};
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::special::{binomial, ln_factorial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Mode `a`: the coherent input and the catalysed output.
    Signal,
    /// Mode `b`: the catalyst input and the heralding detector.
    Herald,
}

/// Pure state on two truncated modes, stored row-major as `[n_a][n_b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<Complex64>,
    tail_mass: f64,
}

impl TwoModeState {
    pub fn zeros(dim_a: usize, dim_b: usize) -> Self {
        Self {
            dim_a,
            dim_b,
            amplitudes: vec![Complex64::new(0.0, 0.0); dim_a * dim_b],
            tail_mass: 0.0,
        }
    }

    pub fn product(a: &FockState, b: &FockState) -> Self {
        let mut s = Self::zeros(a.dim(), b.dim());
        for (i, ca) in a.amplitudes().iter().enumerate() {
            for (j, cb) in b.amplitudes().iter().enumerate() {
                s.amplitudes[i * s.dim_b + j] = ca * cb;
            }
        }
        s.tail_mass = 1.0 - (1.0 - a.tail_mass()) * (1.0 - b.tail_mass());
        s
    }

    /// Product state with both modes padded so that every photon-number block
    /// fits after a beam splitter.
    pub fn product_padded(a: &FockState, b: &FockState) -> Self {
        let dim = a.dim() + b.dim() - 1;
        Self::product(&a.padded(dim), &b.padded(dim))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn get(&self, n_a: usize, n_b: usize) -> Complex64 {
        if n_a < self.dim_a && n_b < self.dim_b {
            self.amplitudes[n_a * self.dim_b + n_b]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Joint photon-number probabilities `[n_a][n_b]`.
    pub fn joint_probabilities(&self) -> Vec<Vec<f64>> {
        (0..self.dim_a)
            .map(|i| (0..self.dim_b).map(|j| self.get(i, j).norm_sqr()).collect())
            .collect()
    }

    /// Sum of `|c|^2` over the block `n_a + n_b = total`.
    pub fn block_mass(&self, total: usize) -> f64 {
        (0..=total).map(|m| self.get(m, total - m).norm_sqr()).sum()
    }
}

/// `<p, N-p| U |m, N-m>` for the beam-splitter convention above.
fn block_element(total: usize, p: usize, m: usize, r: f64, t: f64) -> f64 {
    let rest = total - m;
    let lo = p.saturating_sub(rest);
    let hi = m.min(p);
    if lo > hi {
        return 0.0;
    }
    // (t a† + r b†)^m (-r a† + t b†)^rest: i creation ops of a† from the first
    // factor, p - i from the second
    let poly: f64 = (lo..=hi)
        .map(|i| {
            let second = p - i;
            let sign = if second.is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(m as u64, i as u64)
                * binomial(rest as u64, second as u64)
                * t.powi(i as i32)
                * r.powi((m - i) as i32)
                * r.powi(second as i32)
                * t.powi((rest - second) as i32)
        })
        .sum();
    let ln_ratio = 0.5
        * (ln_factorial(p as u64) + ln_factorial((total - p) as u64)
            - ln_factorial(m as u64)
            - ln_factorial(rest as u64));
    poly * ln_ratio.exp()
}

/// Applies the beam splitter. Every populated photon-number block must fit in
/// both modes' truncation; a block that does not is an error.
pub fn bs_transform(s: &TwoModeState, bs: BeamSplitter) -> Result<TwoModeState> {
    let (r, t) = (bs.r(), bs.t());
    let limit = s.dim_a.min(s.dim_b);
    let max_total = s.dim_a + s.dim_b - 2;
    let mut out = TwoModeState::zeros(s.dim_a, s.dim_b);
    out.tail_mass = s.tail_mass;
    for total in 0..=max_total {
        let input: Vec<Complex64> = (0..=total).map(|m| s.get(m, total - m)).collect();
        if input.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            continue;
        }
        if total >= limit {
            return Err(Error::BlockExceedsTruncation { total, dim: limit });
        }
        for p in 0..=total {
            let acc: Complex64 = input
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
                .map(|(m, c)| c * block_element(total, p, m, r, t))
                .sum();
            out.amplitudes[p * out.dim_b + (total - p)] = acc;
        }
    }
    Ok(out)
}

/// Result of projecting one mode onto a photon number.
#[derive(Debug, Clone, PartialEq)]
pub enum HeraldOutcome {
    Heralded(Heralded),
    /// The requested outcome has zero probability; no state can be normalized.
    Vanished,
}

impl HeraldOutcome {
    pub fn probability(&self) -> f64 {
        match self {
            HeraldOutcome::Heralded(h) => h.probability,
            HeraldOutcome::Vanished => 0.0,
        }
    }

    pub fn into_heralded(self) -> Option<Heralded> {
        match self {
            HeraldOutcome::Heralded(h) => Some(h),
            HeraldOutcome::Vanished => None,
        }
    }
}

/// Projects `mode` onto `|k>` and returns the other mode's state.
pub fn herald(s: &TwoModeState, mode: Mode, k: usize) -> Result<HeraldOutcome> {
    let (herald_dim, kept_dim) = match mode {
        Mode::Signal => (s.dim_a, s.dim_b),
        Mode::Herald => (s.dim_b, s.dim_a),
    };
    if k >= herald_dim {
        return Err(Error::OutOfRange {
            what: "herald photon number",
            value: k,
            limit: herald_dim,
        });
    }
    let kept: Vec<Complex64> = (0..kept_dim)
        .map(|n| match mode {
            Mode::Signal => s.get(k, n),
            Mode::Herald => s.get(n, k),
        })
        .collect();
    let probability: f64 = kept.iter().map(|c| c.norm_sqr()).sum();
    if probability == 0.0 {
        return Ok(HeraldOutcome::Vanished);
    }
    let state = FockState::from_amplitudes(kept, s.tail_mass)?;
    Ok(HeraldOutcome::Heralded(Heralded { state, probability }))
}

/// Full two-mode output of the catalysis beam splitter before any detection.
pub fn two_mode_output(cfg: &CatalysisConfig) -> Result<TwoModeState> {
    let coherent = FockState::coherent(cfg.alpha, cfg.dim)?;
    let catalyst = FockState::fock(cfg.k, cfg.k + 1)?;
    bs_transform(&TwoModeState::product_padded(&coherent, &catalyst), cfg.bs)
}

/// Catalysed state built by brute force: product state, beam splitter,
/// projection of the herald mode onto `k`.
pub fn pcoc_oracle(cfg: &CatalysisConfig) -> Result<Heralded> {
    let out = two_mode_output(cfg)?;
    match herald(&out, Mode::Herald, cfg.k)? {
        HeraldOutcome::Heralded(h) => {
            // photons in the signal mode never exceed the coherent truncation
            let amps = h.state.amplitudes()[..cfg.dim].to_vec();
            Ok(Heralded {
                state: FockState::from_amplitudes(amps, h.state.tail_mass())?,
                probability: h.probability,
            })
        }
        HeraldOutcome::Vanished => Err(Error::VanishingProbability),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigRecord {
    pub alpha: [f64; 2],
    pub r2: f64,
    pub k: usize,
    pub dim: usize,
}

/// Disagreement between the closed form and the two-mode oracle.
#[derive(Debug, Clone, Serialize)]
pub struct OracleDiscrepancy {
    pub config: ConfigRecord,
    pub max_amp_err: f64,
    pub prob_err: f64,
}

pub fn compare_with_oracle(cfg: &CatalysisConfig) -> Result<OracleDiscrepancy> {
    let closed = super::pcoc_state(cfg)?;
    let oracle = pcoc_oracle(cfg)?;
    let max_amp_err = closed
        .state
        .amplitudes()
        .iter()
        .zip(oracle.state.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let alpha = cfg.alpha.value();
    Ok(OracleDiscrepancy {
        config: ConfigRecord {
            alpha: [alpha.re, alpha.im],
            r2: cfg.bs.reflectivity(),
            k: cfg.k,
            dim: cfg.dim,
        },
        max_amp_err,
        prob_err: (closed.probability - oracle.probability).abs(),
    })
}
