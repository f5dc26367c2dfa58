//! Detection chain: binomial loss followed by a time-multiplexed detector
//! (TMD) that routes every surviving photon uniformly at random into one of
//! `bins` on/off detectors and reports how many bins clicked.
//!
//! Everything is evaluated exactly; nothing here samples.

use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::catalysis::{two_mode_output, CatalysisConfig};
use crate::error::{Error, Result};
use crate::fock::PhotonNumberDistribution;
use crate::special::binomial_pmf;

/// Default overall efficiency; a free parameter, not a measured value.
pub const DEFAULT_EFFICIENCY: f64 = 0.1;
pub const DEFAULT_BINS: usize = 8;

/// Each photon independently survives with probability `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossChannel {
    eta: f64,
}

impl LossChannel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
                reason: "efficiency must lie in [0, 1]",
            });
        }
        Ok(Self { eta })
    }

    pub fn eta(self) -> f64 {
        self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmdConfig {
    pub bins: usize,
    pub loss: LossChannel,
}

impl TmdConfig {
    pub fn new(bins: usize, eta: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidSpec("a TMD needs at least one bin".into()));
        }
        Ok(Self {
            bins,
            loss: LossChannel::new(eta)?,
        })
    }

    /// Lossless detector with the given number of bins.
    pub fn ideal(bins: usize) -> Result<Self> {
        Self::new(bins, 1.0)
    }
}

impl Default for TmdConfig {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            loss: LossChannel { eta: DEFAULT_EFFICIENCY },
        }
    }
}

/// `p'_m = sum_{n>=m} p_n C(n,m) eta^m (1-eta)^(n-m)`.
pub fn apply_loss(d: &PhotonNumberDistribution, ch: LossChannel) -> PhotonNumberDistribution {
    let p = d.probabilities();
    let mut out = vec![0.0; p.len()];
    for (n, pn) in p.iter().enumerate() {
        if *pn == 0.0 {
            continue;
        }
        for (m, o) in out.iter_mut().enumerate().take(n + 1) {
            *o += pn * binomial_pmf(n, m, ch.eta);
        }
    }
    // each row of the loss matrix sums to one, so `out` stays normalized
    PhotonNumberDistribution::from_weights(out).unwrap_or_else(|_| PhotonNumberDistribution::vacuum())
}

/// `table[n][m]`: probability that `n` photons light exactly `m` of `bins`
/// bins, for `n < photons`. Built by adding one photon at a time.
pub fn occupancy_table(photons: usize, bins: usize) -> Vec<Vec<f64>> {
    let b = bins as f64;
    let mut table = Vec::with_capacity(photons);
    let mut row = vec![0.0; bins + 1];
    row[0] = 1.0;
    for _ in 0..photons {
        table.push(row.clone());
        let mut next = vec![0.0; bins + 1];
        for (m, pm) in row.iter().enumerate() {
            if *pm == 0.0 {
                continue;
            }
            // lands in an already lit bin, or lights a new one
            next[m] += pm * m as f64 / b;
            if m < bins {
                next[m + 1] += pm * (bins - m) as f64 / b;
            }
        }
        row = next;
    }
    table
}

/// Probabilities over click counts `0..=bins`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClickDistribution {
    probabilities: Vec<f64>,
}

impl ClickDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, m: usize) -> f64 {
        self.probabilities.get(m).copied().unwrap_or(0.0)
    }

    pub fn bins(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }

    pub fn second_factorial_moment(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(m, p)| (m * m.saturating_sub(1)) as f64 * p)
            .sum()
    }
}

/// Click statistics after loss and uniform routing into `cfg.bins` bins.
pub fn tmd_click_distribution(d: &PhotonNumberDistribution, cfg: &TmdConfig) -> ClickDistribution {
    let lossy = apply_loss(d, cfg.loss);
    let table = occupancy_table(lossy.len(), cfg.bins);
    let mut probabilities = vec![0.0; cfg.bins + 1];
    for (n, pn) in lossy.probabilities().iter().enumerate() {
        for (m, q) in table[n].iter().enumerate() {
            probabilities[m] += pn * q;
        }
    }
    ClickDistribution { probabilities }
}

/// `click_matrix[n][m]`: probability that `n` incident photons give `m`
/// clicks on `cfg` (loss included).
pub fn click_matrix(photons: usize, cfg: &TmdConfig) -> Vec<Vec<f64>> {
    let occupancy = occupancy_table(photons, cfg.bins);
    (0..photons)
        .map(|n| {
            let mut row = vec![0.0; cfg.bins + 1];
            for (k, occ) in occupancy.iter().enumerate().take(n + 1) {
                let survive = binomial_pmf(n, k, cfg.loss.eta);
                for (m, q) in occ.iter().enumerate() {
                    row[m] += survive * q;
                }
            }
            row
        })
        .collect()
}

/// `g2` estimated from click counts with a finite-bin collision correction:
/// `(bins / (bins - 1)) <m(m-1)> / <m>^2`.
///
/// Exact for coherent light at any bin count (each bin then sees an
/// independent Poisson stream) and exact for any light as `bins -> ∞`.
/// For other inputs it is biased low at small bin counts; thermal light of
/// mean 1 reads 9/5 on 8 lossless bins.
pub fn g2_from_clicks(c: &ClickDistribution) -> Result<f64> {
    let bins = c.bins();
    if bins < 2 {
        return Err(Error::InvalidSpec("click-based g2 needs at least two bins".into()));
    }
    let mean = c.mean();
    if mean <= 0.0 {
        return Err(Error::UndefinedG2);
    }
    let b = bins as f64;
    Ok(b / (b - 1.0) * c.second_factorial_moment() / (mean * mean))
}

/// Joint click probabilities `P[i][j]`: `i` clicks on the herald-arm TMD
/// (TMD1) and `j` clicks on the signal-arm TMD (TMD2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointClickDistribution {
    pub probabilities: Vec<Vec<f64>>,
}

impl JointClickDistribution {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probabilities
            .get(i)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().flatten().sum()
    }

    /// Marginal over the herald arm.
    pub fn herald_marginal(&self) -> Vec<f64> {
        self.probabilities.iter().map(|row| row.iter().sum()).collect()
    }

    /// Marginal over the signal arm.
    pub fn signal_marginal(&self) -> Vec<f64> {
        let cols = self.probabilities.first().map_or(0, Vec::len);
        (0..cols)
            .map(|j| self.probabilities.iter().map(|row| row[j]).sum())
            .collect()
    }
}

/// Joint photon-number distribution `[n_signal][n_herald]` of the unheralded
/// beam-splitter output.
fn joint_photon_numbers(cfg: &CatalysisConfig) -> Result<Vec<Vec<f64>>> {
    Ok(two_mode_output(cfg)?.joint_probabilities())
}

/// Click statistics of both output arms without any heralding projection.
pub fn joint_output_distribution(
    cfg: &CatalysisConfig,
    herald_tmd: &TmdConfig,
    signal_tmd: &TmdConfig,
) -> Result<JointClickDistribution> {
    let photons = joint_photon_numbers(cfg)?;
    let dim_s = photons.len();
    let dim_h = photons.first().map_or(0, Vec::len);
    let herald_clicks = click_matrix(dim_h, herald_tmd);
    let signal_clicks = click_matrix(dim_s, signal_tmd);

    // (photons^T * herald_clicks) first, then contract the signal index
    let mut by_signal = vec![vec![0.0; herald_tmd.bins + 1]; dim_s];
    for (ns, row) in photons.iter().enumerate() {
        for (nh, p) in row.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            for (i, q) in herald_clicks[nh].iter().enumerate() {
                by_signal[ns][i] += p * q;
            }
        }
    }
    let mut probabilities = vec![vec![0.0; signal_tmd.bins + 1]; herald_tmd.bins + 1];
    for (ns, row) in by_signal.iter().enumerate() {
        for (i, p) in row.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            for (j, q) in signal_clicks[ns].iter().enumerate() {
                probabilities[i][j] += p * q;
            }
        }
    }
    Ok(JointClickDistribution { probabilities })
}

/// Signal photon-number distribution conditioned on `clicks` clicks of a
/// realistic herald TMD, with the herald probability. With an ideal
/// number-resolving herald this is the catalysed state's distribution.
pub fn heralded_signal_distribution(
    cfg: &CatalysisConfig,
    herald_tmd: &TmdConfig,
    clicks: usize,
) -> Result<(PhotonNumberDistribution, f64)> {
    if clicks > herald_tmd.bins {
        return Err(Error::OutOfRange {
            what: "herald clicks",
            value: clicks,
            limit: herald_tmd.bins + 1,
        });
    }
    let photons = joint_photon_numbers(cfg)?;
    let dim_h = photons.first().map_or(0, Vec::len);
    let herald_clicks = click_matrix(dim_h, herald_tmd);
    let weights: Vec<f64> = photons
        .iter()
        .map(|row| {
            row.iter()
                .zip(&herald_clicks)
                .map(|(p, q)| p * q[clicks])
                .sum()
        })
        .collect();
    let probability: f64 = weights.iter().sum();
    if probability <= 0.0 {
        return Err(Error::VanishingProbability);
    }
    Ok((PhotonNumberDistribution::from_weights(weights)?, probability))
}

/// `g2` of the signal conditioned on a single click of `herald_tmd`; the
/// quantity a lossy, binned herald actually selects.
pub fn heralded_g2(cfg: &CatalysisConfig, herald_tmd: &TmdConfig) -> Result<f64> {
    let (d, _) = heralded_signal_distribution(cfg, herald_tmd, cfg.k)?;
    analysis::g2(&d)
}
