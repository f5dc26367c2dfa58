//! Truncated single-mode Fock space.
//!
//! A [`FockState`] holds complex amplitudes over photon numbers `0..dim`
//! together with the probability mass that was cut off when the state was
//! truncated (`tail_mass`). Every constructor renormalizes over the kept
//! window and rejects truncations whose tail exceeds [`TAIL_TOLERANCE`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::split_series;

/// Default bound on the probability mass discarded by truncation.
pub const TAIL_TOLERANCE: f64 = 1e-9;

/// Default truncation for a state built from a coherent amplitude with mean
/// photon number `mean` interfered with `k` catalyst photons.
pub fn default_dim(mean: f64, k: usize) -> usize {
    let est = mean + 8.0 * (mean + 1.0).sqrt() + k as f64 + 5.0;
    (est.ceil() as usize).max(25)
}

/// Coherent-state amplitude `alpha`. Real non-negative values are the common
/// case, but any finite complex value is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitude(Complex64);

impl CoherentAmplitude {
    pub fn new(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha.norm(),
                reason: "must be finite",
            });
        }
        Ok(Self(alpha))
    }

    pub fn real(alpha: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0))
    }

    /// Real amplitude with the given mean photon number `|alpha|^2`.
    pub fn from_mean_photons(mean: f64) -> Result<Self> {
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mean photon number",
                value: mean,
                reason: "must be finite and non-negative",
            });
        }
        Self::real(mean.sqrt())
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    /// Mean photon number `|alpha|^2`.
    pub fn mean_photons(self) -> f64 {
        self.0.norm_sqr()
    }

    /// Unnormalized-by-truncation Fock amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)`.
    pub(crate) fn amplitudes(self) -> impl Iterator<Item = Complex64> {
        let alpha = self.0;
        let mut current = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        let mut n = 0usize;
        std::iter::from_fn(move || {
            let out = current;
            n += 1;
            current = current * alpha / (n as f64).sqrt();
            Some(out)
        })
    }
}

/// Pure single-mode state on a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: Vec<Complex64>,
    tail_mass: f64,
}

/// Which cat-state construction `FockState::css` builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CssConstruction {
    /// Literal expansion `((beta+alpha)^n + (beta-alpha)^n) / sqrt(n!)`,
    /// without the Gaussian prefactors of the two coherent branches.
    Literal,
    /// `|beta+alpha> + |beta-alpha>` with proper coherent-state weights.
    DisplacedEvenCat,
}

impl FockState {
    /// Builds a state from raw amplitudes and renormalizes it. `tail_mass` is
    /// the (relative) probability discarded before the window.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, tail_mass: f64) -> Result<Self> {
        Ok(Self::from_raw_parts(amplitudes, tail_mass)?.normalized())
    }

    /// Like [`FockState::from_amplitudes`] but keeps the amplitudes exactly
    /// as given, normalized or not.
    pub fn from_raw_parts(amplitudes: Vec<Complex64>, tail_mass: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidSpec("state needs dim >= 1".into()));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidSpec("non-finite amplitude".into()));
        }
        let state = Self {
            amplitudes,
            tail_mass,
        };
        if state.norm_sqr() == 0.0 {
            return Err(Error::VanishingProbability);
        }
        Ok(state)
    }

    /// Builds a state from an infinite amplitude series, keeping `dim` terms.
    /// Fails if the relative tail mass exceeds `tolerance`.
    pub(crate) fn from_series<I>(
        series: I,
        dim: usize,
        envelope_mean: f64,
        tolerance: f64,
    ) -> Result<(Self, f64)>
    where
        I: IntoIterator<Item = Complex64>,
    {
        if dim == 0 {
            return Err(Error::InvalidSpec("state needs dim >= 1".into()));
        }
        let (head, tail) = split_series(series, dim, envelope_mean);
        let head_mass: f64 = head.iter().map(|c| c.norm_sqr()).sum();
        let total = head_mass + tail;
        if total == 0.0 {
            return Err(Error::VanishingProbability);
        }
        let rel_tail = tail / total;
        if rel_tail > tolerance {
            return Err(Error::TruncationTooSmall {
                dim,
                tail_mass: rel_tail,
                tolerance,
            });
        }
        let state = Self {
            amplitudes: head,
            tail_mass: rel_tail,
        }
        .normalized();
        Ok((state, total))
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::fock(0, dim)
    }

    pub fn fock(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::OutOfRange {
                what: "photon number",
                value: k,
                limit: dim,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            tail_mass: 0.0,
        })
    }

    pub fn coherent(alpha: CoherentAmplitude, dim: usize) -> Result<Self> {
        Self::coherent_with_tolerance(alpha, dim, TAIL_TOLERANCE)
    }

    /// Coherent state with a caller-chosen truncation tolerance.
    pub fn coherent_with_tolerance(
        alpha: CoherentAmplitude,
        dim: usize,
        tolerance: f64,
    ) -> Result<Self> {
        let (state, _) =
            Self::from_series(alpha.amplitudes(), dim, alpha.mean_photons(), tolerance)?;
        Ok(state)
    }

    /// Displaced two-branch cat state with branch amplitude `alpha` and
    /// displacement `beta`.
    pub fn css(alpha: f64, beta: f64, dim: usize, construction: CssConstruction) -> Result<Self> {
        let plus = beta + alpha;
        let minus = beta - alpha;
        let envelope = plus.abs().max(minus.abs()).powi(2);
        let series: Box<dyn Iterator<Item = Complex64>> = match construction {
            CssConstruction::Literal => {
                // x^n / sqrt(n!) by recurrence for both branches
                let (mut a, mut b) = (1.0f64, 1.0f64);
                let mut n = 0usize;
                Box::new(std::iter::from_fn(move || {
                    let out = Complex64::new(a + b, 0.0);
                    n += 1;
                    let s = (n as f64).sqrt();
                    a *= plus / s;
                    b *= minus / s;
                    Some(out)
                }))
            }
            CssConstruction::DisplacedEvenCat => {
                let p = CoherentAmplitude::real(plus)?.amplitudes();
                let m = CoherentAmplitude::real(minus)?.amplitudes();
                Box::new(p.zip(m).map(|(x, y)| x + y))
            }
        };
        let (state, _) = Self::from_series(series, dim, envelope, TAIL_TOLERANCE)?;
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    /// Relative probability mass discarded by truncation before renormalizing.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 && norm != 1.0 {
            for c in &mut self.amplitudes {
                *c /= norm;
            }
        }
        self
    }

    /// Zero-pads (never truncates) to `dim`.
    pub fn padded(&self, dim: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        if dim > amplitudes.len() {
            amplitudes.resize(dim, Complex64::new(0.0, 0.0));
        }
        Self {
            amplitudes,
            tail_mass: self.tail_mass,
        }
    }

    /// `<self|other>`, zero-padding the shorter state.
    pub fn inner_product(&self, other: &FockState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`, clamped into `[0, 1]`.
    pub fn fidelity(&self, other: &FockState) -> f64 {
        self.inner_product(other).norm_sqr().clamp(0.0, 1.0)
    }

    pub fn number_distribution(&self) -> PhotonNumberDistribution {
        PhotonNumberDistribution {
            probabilities: self.amplitudes.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    /// Fails if the recorded truncation tail exceeds `tolerance`.
    pub fn check_tail(&self, tolerance: f64) -> Result<()> {
        if self.tail_mass > tolerance {
            return Err(Error::TruncationTooSmall {
                dim: self.dim(),
                tail_mass: self.tail_mass,
                tolerance,
            });
        }
        Ok(())
    }
}

/// Probability vector over photon number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonNumberDistribution {
    probabilities: Vec<f64>,
}

impl PhotonNumberDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probabilities
            .iter()
            .find(|p| !(**p >= -1e-15 && **p <= 1.0 + 1e-15))
        {
            return Err(Error::InvalidDistribution(format!("entry {p} outside [0,1]")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self { probabilities })
    }

    /// Renormalizes arbitrary non-negative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidDistribution("weights must be non-negative with positive sum".into()));
        }
        Ok(Self {
            probabilities: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    /// Poisson distribution truncated at `dim` and renormalized.
    pub fn poisson(mean: f64, dim: usize) -> Result<Self> {
        Ok(FockState::coherent(CoherentAmplitude::from_mean_photons(mean)?, dim)?
            .number_distribution())
    }

    /// Bose-Einstein (thermal) distribution truncated at `dim` and renormalized.
    pub fn thermal(mean: f64, dim: usize) -> Result<Self> {
        let ratio = mean / (1.0 + mean);
        Self::from_weights((0..dim).map(|n| ratio.powi(n as i32)).collect())
    }

    pub fn vacuum() -> Self {
        Self {
            probabilities: vec![1.0],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// `<n(n-1)>`.
    pub fn second_factorial_moment(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p)
            .sum()
    }

    /// Factorial moment of order 1 (`<n>`) or 2 (`<n(n-1)>`).
    pub fn moment(&self, order: u32) -> Result<f64> {
        match order {
            1 => Ok(self.mean()),
            2 => Ok(self.second_factorial_moment()),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn alpha(a: f64) -> CoherentAmplitude {
        CoherentAmplitude::real(a).unwrap()
    }

    #[test]
    fn coherent_vacuum_limit() {
        let s = FockState::coherent(alpha(0.0), 10).unwrap();
        assert_eq!(s.amplitude(0), Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn coherent_ground_amplitude() {
        let s = FockState::coherent(alpha(1.0), 25).unwrap();
        assert_abs_diff_eq!(s.amplitude(0).re, (-0.5f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn coherent_large_amplitude_mean() {
        let s = FockState::coherent(alpha(2.7), 60).unwrap();
        assert!(s.tail_mass() < 1e-9);
        // direct Poisson series sum
        let mu: f64 = 2.7 * 2.7;
        let mut p = (-mu).exp();
        let mut mean = 0.0;
        for n in 1..200 {
            p *= mu / n as f64;
            mean += n as f64 * p;
        }
        assert_abs_diff_eq!(mean, 7.29, epsilon = 1e-9);
        assert_abs_diff_eq!(s.number_distribution().mean(), mean, epsilon = 1e-6);
    }

    #[test]
    fn coherent_rejects_small_truncation() {
        let err = FockState::coherent(alpha(3.0), 8).unwrap_err();
        assert!(matches!(err, Error::TruncationTooSmall { dim: 8, .. }));
        assert!(FockState::coherent_with_tolerance(alpha(3.0), 8, 1.0).is_ok());
    }

    #[test]
    fn fock_constructors() {
        assert_eq!(FockState::fock(0, 5).unwrap(), FockState::vacuum(5).unwrap());
        let one = FockState::fock(1, 5).unwrap();
        assert_eq!(one.amplitude(1), Complex64::new(1.0, 0.0));
        assert!(matches!(
            FockState::fock(6, 4),
            Err(Error::OutOfRange { value: 6, limit: 4, .. })
        ));
    }

    #[test]
    fn css_trivial_cases() {
        for c in [CssConstruction::Literal, CssConstruction::DisplacedEvenCat] {
            let vac = FockState::css(0.0, 0.0, 5, c).unwrap();
            assert_abs_diff_eq!(vac.amplitude(0).re, 1.0, epsilon = 1e-15);
            let even = FockState::css(0.9, 0.0, 20, c).unwrap();
            for n in (1..20).step_by(2) {
                assert_eq!(even.amplitude(n), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn css_displaced_fixture() {
        // ((b+a)^n + (b-a)^n)/sqrt(n!) summed and normalized independently
        let s = FockState::css(0.9, 0.8, 25, CssConstruction::Literal).unwrap();
        let expected = [
            0.4396858759581766,
            0.3517487007665413,
            0.45081205349886205,
            0.440854473685734,
        ];
        for (n, e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(s.amplitude(n).re, *e, epsilon = 1e-12);
        }
        let cat = FockState::css(0.9, 0.8, 40, CssConstruction::DisplacedEvenCat).unwrap();
        let expected = [
            0.7951477219048947,
            0.19463755339974434,
            0.31579049306670637,
            0.30522303812137763,
        ];
        for (n, e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(cat.amplitude(n).re, *e, epsilon = 1e-12);
        }
    }

    #[test]
    fn inner_products() {
        let v = FockState::vacuum(4).unwrap();
        let one = FockState::fock(1, 6).unwrap();
        assert_eq!(v.inner_product(&v), Complex64::new(1.0, 0.0));
        assert_eq!(one.inner_product(&v), Complex64::new(0.0, 0.0));
        let c = FockState::coherent(alpha(1.0), 30).unwrap();
        assert_abs_diff_eq!(c.inner_product(&c).re, 1.0, epsilon = 1e-12);
        assert_eq!(v.fidelity(&one), 0.0);
    }

    #[test]
    fn distributions_and_moments() {
        let one = FockState::fock(1, 4).unwrap().number_distribution();
        assert_eq!(one.probabilities(), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(one.moment(2).unwrap(), 0.0);
        let two = FockState::fock(2, 4).unwrap().number_distribution();
        assert_eq!(two.moment(2).unwrap(), 2.0);
        assert!(matches!(two.moment(3), Err(Error::UnsupportedOrder(3))));

        let mu = 1.11;
        let d = FockState::coherent(CoherentAmplitude::from_mean_photons(mu).unwrap(), 30)
            .unwrap()
            .number_distribution();
        let mut p = (-mu).exp();
        for n in 0..10 {
            assert_abs_diff_eq!(d.get(n), p, epsilon = 1e-12);
            p *= mu / (n + 1) as f64;
        }
        assert_abs_diff_eq!(d.mean(), mu, epsilon = 1e-10);
        assert_abs_diff_eq!(d.moment(2).unwrap(), mu * mu, epsilon = 1e-10);
    }

    #[test]
    fn distribution_validation() {
        assert!(PhotonNumberDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(PhotonNumberDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(PhotonNumberDistribution::new(vec![]).is_err());
        assert!(PhotonNumberDistribution::new(vec![0.25, 0.75]).is_ok());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(re in proptest::collection::vec(-3.0f64..3.0, 1..12),
                                   im in proptest::collection::vec(-3.0f64..3.0, 12)) {
            let amps: Vec<_> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
            prop_assume!(amps.iter().any(|c| c.norm() > 1e-6));
            let once = FockState::from_amplitudes(amps, 0.0).unwrap();
            prop_assert!((once.norm_sqr() - 1.0).abs() < 1e-12);
            let twice = once.clone().normalized();
            for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
                prop_assert!((a - b).norm() <= 1e-15);
            }
        }

        #[test]
        fn constructors_normalized_and_truncation_stable(a in 0.0f64..2.7, b in -1.0f64..1.0) {
            let dim = default_dim(a * a, 0);
            let c = FockState::coherent(alpha(a), dim).unwrap();
            let c10 = FockState::coherent(alpha(a), dim + 10).unwrap();
            prop_assert!((c.norm_sqr() - 1.0).abs() < 1e-12);
            for n in 0..dim {
                prop_assert!((c.amplitude(n) - c10.amplitude(n)).norm() < 1e-9);
            }
            let dim = default_dim((a + b.abs()).powi(2), 0) + 10;
            for con in [CssConstruction::Literal, CssConstruction::DisplacedEvenCat] {
                let s = FockState::css(a, b, dim, con).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
                let s10 = FockState::css(a, b, dim + 10, con).unwrap();
                for n in 0..dim {
                    prop_assert!((s.amplitude(n) - s10.amplitude(n)).norm() < 1e-9);
                }
            }
        }

        #[test]
        fn css_without_displacement_has_no_odd_terms(a in 0.0f64..2.5) {
            let s = FockState::css(a, 0.0, 40, CssConstruction::Literal).unwrap();
            for n in (1..40).step_by(2) {
                prop_assert_eq!(s.amplitude(n), Complex64::new(0.0, 0.0));
            }
        }

        #[test]
        fn fidelity_symmetric(a in 0.0f64..2.0, b in 0.0f64..2.0) {
            let x = FockState::coherent(alpha(a), 40).unwrap();
            let y = FockState::css(b, 0.3, 40, CssConstruction::Literal).unwrap();
            prop_assert!((x.fidelity(&y) - y.fidelity(&x)).abs() < 1e-15);
            prop_assert!((x.fidelity(&x) - 1.0).abs() < 1e-12);
        }
    }
}
