//! Photon catalysis of a coherent state.
//!
//! A coherent state `|alpha>` and a `k`-photon Fock state meet on a beam
//! splitter; the output is kept only when exactly `k` photons leave in the
//! catalyst's port. The surviving mode has amplitudes
//!
//! ```text
//! a_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!) * C_n(r, t, k)
//! C_n = sum_{j=0}^{min(n,k)} C(n, n-j) C(k, j) (-1)^j t^{n+k-2j} r^{2j}
//! ```
//!
//! and `sum |a_n|^2` is the heralding probability. Iterated catalysis
//! multiplies one coefficient per stage. [`oracle`] rebuilds the same states
//! from the full two-mode unitary without using `C_n`.

pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{default_dim, CoherentAmplitude, FockState, TAIL_TOLERANCE};
use crate::special::binomial;

pub use oracle::{
    bs_transform, compare_with_oracle, herald, pcoc_oracle, two_mode_output, HeraldOutcome,
    Mode, OracleDiscrepancy, TwoModeState,
};

/// Lossless beam splitter with real amplitudes `r = sqrt(r2)`, `t = sqrt(1 - r2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitter {
    r2: f64,
}

impl BeamSplitter {
    pub fn new(r2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r2) {
            return Err(Error::InvalidParameter {
                name: "r2",
                value: r2,
                reason: "intensity reflectivity must lie in [0, 1]",
            });
        }
        Ok(Self { r2 })
    }

    /// Intensity reflectivity `|r|^2`.
    pub fn reflectivity(self) -> f64 {
        self.r2
    }

    /// Intensity transmissivity `|t|^2 = 1 - |r|^2`.
    pub fn transmissivity(self) -> f64 {
        1.0 - self.r2
    }

    pub fn r(self) -> f64 {
        self.r2.sqrt()
    }

    pub fn t(self) -> f64 {
        self.transmissivity().sqrt()
    }
}

/// `C_n(r, t, k)`, the amplitude for `n` photons to stay in the signal mode
/// while `k` catalyst photons return to the herald port.
///
/// Even powers of `r` and `t` are taken from the intensities, so e.g.
/// `C_1(k = 1)` at `r2 = 1/2` cancels exactly.
pub fn catalysis_coefficient(n: usize, k: usize, bs: BeamSplitter) -> f64 {
    let r2 = bs.reflectivity();
    let t2 = bs.transmissivity();
    let t = bs.t();
    (0..=n.min(k))
        .map(|j| {
            let tpow = n + k - 2 * j;
            let tp = if tpow.is_multiple_of(2) {
                t2.powi((tpow / 2) as i32)
            } else {
                t * t2.powi((tpow / 2) as i32)
            };
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(n as u64, (n - j) as u64)
                * binomial(k as u64, j as u64)
                * tp
                * r2.powi(j as i32)
        })
        .sum()
}

/// One catalysis stage: beam splitter plus catalyst/herald photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub bs: BeamSplitter,
    pub k: usize,
}

impl Stage {
    pub fn new(r2: f64, k: usize) -> Result<Self> {
        Ok(Self {
            bs: BeamSplitter::new(r2)?,
            k,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalysisConfig {
    pub alpha: CoherentAmplitude,
    pub bs: BeamSplitter,
    pub k: usize,
    pub dim: usize,
}

impl CatalysisConfig {
    /// Config with the default truncation for these parameters.
    pub fn new(alpha: CoherentAmplitude, r2: f64, k: usize) -> Result<Self> {
        let dim = default_dim(alpha.mean_photons(), k);
        Self::with_dim(alpha, r2, k, dim)
    }

    pub fn real(alpha: f64, r2: f64, k: usize) -> Result<Self> {
        Self::new(CoherentAmplitude::real(alpha)?, r2, k)
    }

    pub fn with_dim(alpha: CoherentAmplitude, r2: f64, k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::OutOfRange {
                what: "catalyst photon number",
                value: k,
                limit: dim,
            });
        }
        Ok(Self {
            alpha,
            bs: BeamSplitter::new(r2)?,
            k,
            dim,
        })
    }

    pub fn stage(&self) -> Stage {
        Stage {
            bs: self.bs,
            k: self.k,
        }
    }
}

/// Catalysis repeated over a sequence of stages on the same signal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedConfig {
    pub alpha: CoherentAmplitude,
    pub stages: Vec<Stage>,
    pub dim: usize,
}

impl IteratedConfig {
    pub fn new(alpha: CoherentAmplitude, stages: Vec<Stage>) -> Result<Self> {
        let kmax = stages.iter().map(|s| s.k).max().unwrap_or(0);
        let dim = default_dim(alpha.mean_photons(), kmax);
        Self::with_dim(alpha, stages, dim)
    }

    pub fn with_dim(alpha: CoherentAmplitude, stages: Vec<Stage>, dim: usize) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidSpec("iterated catalysis needs at least one stage".into()));
        }
        if let Some(s) = stages.iter().find(|s| s.k >= dim) {
            return Err(Error::OutOfRange {
                what: "catalyst photon number",
                value: s.k,
                limit: dim,
            });
        }
        Ok(Self { alpha, stages, dim })
    }
}

impl From<&CatalysisConfig> for IteratedConfig {
    fn from(cfg: &CatalysisConfig) -> Self {
        Self {
            alpha: cfg.alpha,
            stages: vec![cfg.stage()],
            dim: cfg.dim,
        }
    }
}

/// A heralded state together with the probability of its herald.
#[derive(Debug, Clone, PartialEq)]
pub struct Heralded {
    pub state: FockState,
    pub probability: f64,
}

/// Closed-form catalysed state and success probability.
pub fn pcoc_state(cfg: &CatalysisConfig) -> Result<Heralded> {
    iterated_pcoc(&IteratedConfig::from(cfg))
}

/// Closed-form state after every stage of `cfg` heralds successfully.
pub fn iterated_pcoc(cfg: &IteratedConfig) -> Result<Heralded> {
    let stages = cfg.stages.clone();
    let series = cfg.alpha.amplitudes().enumerate().map(move |(n, c)| {
        stages
            .iter()
            .fold(c, |acc, s| acc * catalysis_coefficient(n, s.k, s.bs))
    });
    let (state, probability) =
        FockState::from_series(series, cfg.dim, cfg.alpha.mean_photons(), TAIL_TOLERANCE)?;
    Ok(Heralded { state, probability })
}

/// Closed-form success probability for a single catalyst photon:
///
/// ```text
/// P = e^{-r^2|a|^2} (1 - r^2 (1 - |a|^2 (r^2 (3 + |a|^2) - 2 - r^4 |a|^2)))
/// ```
pub fn success_probability_closed_form(
    alpha: CoherentAmplitude,
    bs: BeamSplitter,
    k: usize,
) -> Result<f64> {
    if k != 1 {
        return Err(Error::SingleCatalystOnly(k));
    }
    let x = alpha.mean_photons();
    let r2 = bs.reflectivity();
    Ok((-r2 * x).exp() * single_photon_bracket(x, r2))
}

/// `1 - R(1 - x(R(3 + x) - 2 - R^2 x))`; also the denominator of the
/// closed-form quadrature variances.
pub(crate) fn single_photon_bracket(x: f64, r2: f64) -> f64 {
    1.0 - r2 * (1.0 - x * (r2 * (3.0 + x) - 2.0 - r2 * r2 * x))
}
