//! Nonclassicality metrics: quadrature variances and squeezing, the
//! closed-form single-catalyst variances and their extremal loci, `g2(0)`,
//! and Wigner functions.
//!
//! Quadratures follow `X = (a + a†)/2`, `P = (a - a†)/(2i)`, so the vacuum
//! variance is 1/4 and squeezing is quoted as `10 log10(var / (1/4))` dB.

pub mod wigner;

use serde::Serialize;

use crate::catalysis::single_photon_bracket;
use crate::error::{Error, Result};
use crate::fock::{FockState, PhotonNumberDistribution, TAIL_TOLERANCE};

pub use wigner::{wigner, wigner_negativity, GridSpec, Negativity, WignerGrid};

pub const VACUUM_VARIANCE: f64 = 0.25;

/// Variance relative to the vacuum, in dB.
pub fn to_db(variance: f64) -> f64 {
    10.0 * (variance / VACUUM_VARIANCE).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureStats {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub product: f64,
    pub squeeze_db_x: f64,
    pub squeeze_db_p: f64,
}

/// Quadrature moments from the ladder-operator matrix elements.
pub fn quadrature_variances(s: &FockState) -> Result<QuadratureStats> {
    s.check_tail(TAIL_TOLERANCE)?;
    Ok(quadrature_moments(s))
}

/// Same as [`quadrature_variances`] without the truncation gate.
pub(crate) fn quadrature_moments(s: &FockState) -> QuadratureStats {
    let c = s.amplitudes();
    let norm = s.norm_sqr();
    let mut a = num_complex::Complex64::new(0.0, 0.0);
    let mut a2 = num_complex::Complex64::new(0.0, 0.0);
    let mut n_mean = 0.0;
    for n in 0..c.len() {
        n_mean += n as f64 * c[n].norm_sqr();
        if n + 1 < c.len() {
            a += c[n].conj() * c[n + 1] * ((n + 1) as f64).sqrt();
        }
        if n + 2 < c.len() {
            a2 += c[n].conj() * c[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt();
        }
    }
    a /= norm;
    a2 /= norm;
    n_mean /= norm;

    let mean_x = a.re;
    let mean_p = a.im;
    let x2 = (2.0 * a2.re + 2.0 * n_mean + 1.0) / 4.0;
    let p2 = (-2.0 * a2.re + 2.0 * n_mean + 1.0) / 4.0;
    let var_x = x2 - mean_x * mean_x;
    let var_p = p2 - mean_p * mean_p;
    QuadratureStats {
        mean_x,
        mean_p,
        var_x,
        var_p,
        product: var_x * var_p,
        squeeze_db_x: to_db(var_x),
        squeeze_db_p: to_db(var_p),
    }
}

fn check_r2(r2: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r2) {
        return Err(Error::InvalidParameter {
            name: "r2",
            value: r2,
            reason: "intensity reflectivity must lie in [0, 1]",
        });
    }
    Ok(())
}

fn denominator(x: f64, r2: f64) -> Result<f64> {
    let d = single_photon_bracket(x, r2);
    if d.abs() < 1e-14 {
        return Err(Error::Pole(d.abs()));
    }
    Ok(d)
}

/// Closed-form `Var(X)` of the single-catalyst state (real `alpha`, `r2` the
/// intensity reflectivity).
pub fn variance_x_closed_form(alpha: f64, r2: f64) -> Result<f64> {
    check_r2(r2)?;
    let x = alpha * alpha;
    let d = denominator(x, r2)?;
    let t2 = 1.0 - r2;
    let t4 = t2 * t2;
    let num = t4 - 4.0 * r2 * t4 * x
        + 3.0 * r2.powi(2) * (2.0 - 4.0 * r2 + 3.0 * r2 * r2) * x.powi(2)
        - 4.0 * r2.powi(3) * t4 * x.powi(3)
        + r2.powi(4) * t4 * x.powi(4);
    Ok(num / (4.0 * d * d))
}

/// Closed-form `Var(P)` of the single-catalyst state.
pub fn variance_p_closed_form(alpha: f64, r2: f64) -> Result<f64> {
    check_r2(r2)?;
    let x = alpha * alpha;
    let d = denominator(x, r2)?;
    Ok(0.25 + r2 * r2 * x / (2.0 * d))
}

/// Both amplitudes `alpha` at which `Var(X)` touches its global minimum 3/16
/// for a given intensity reflectivity `r2 ∈ (0, 1)`:
///
/// ```text
/// alpha^2 = ((2 + r2) ± sqrt(3 r2 (4 - r2))) / (2 r2 (1 - r2))
/// ```
///
/// Returned as `(upper, lower)`.
pub fn locus_alpha_min(r2: f64) -> Result<(f64, f64)> {
    if !(r2 > 0.0 && r2 < 1.0) {
        return Err(Error::Domain {
            value: r2,
            lower: 0.0,
            upper: 1.0,
        });
    }
    let root = (3.0 * r2 * (4.0 - r2)).sqrt();
    let den = 2.0 * r2 * (1.0 - r2);
    let upper = ((2.0 + r2 + root) / den).sqrt();
    // (2 + r2)^2 - 3 r2 (4 - r2) = 4 (1 - r2)^2, so the lower radicand is >= 0
    let lower = ((2.0 + r2 - root).max(0.0) / den).sqrt();
    Ok((upper, lower))
}

/// Amplitude at which `Var(X)` reaches its maximum 3/4: `|alpha|^2 r2 = 1`.
pub fn locus_alpha_max(r2: f64) -> Result<f64> {
    if !(r2 > 0.0 && r2 <= 1.0) {
        return Err(Error::Domain {
            value: r2,
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok(1.0 / r2.sqrt())
}

/// Normalized second-order correlation `<n(n-1)> / <n>^2`.
pub fn g2(d: &PhotonNumberDistribution) -> Result<f64> {
    let mean = d.mean();
    if mean <= 0.0 {
        return Err(Error::UndefinedG2);
    }
    Ok(d.second_factorial_moment() / (mean * mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalysis::{pcoc_state, CatalysisConfig};
    use crate::fock::CoherentAmplitude;
    use crate::optimize::golden_section_minimize;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_and_coherent_are_minimum_uncertainty() {
        let v = quadrature_variances(&FockState::vacuum(5).unwrap()).unwrap();
        assert_eq!(v.var_x, 0.25);
        assert_eq!(v.var_p, 0.25);
        let c = FockState::coherent(CoherentAmplitude::real(1.0).unwrap(), 30).unwrap();
        let q = quadrature_variances(&c).unwrap();
        assert_abs_diff_eq!(q.var_x, 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(q.var_p, 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(q.mean_x, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn complex_coherent_means() {
        let alpha = CoherentAmplitude::new(num_complex::Complex64::new(0.5, -1.0)).unwrap();
        let c = FockState::coherent(alpha, 40).unwrap();
        let q = quadrature_variances(&c).unwrap();
        assert_abs_diff_eq!(q.mean_x, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(q.mean_p, -1.0, epsilon = 1e-10);
    }

    #[test]
    fn maximum_squeezing_point() {
        // alpha = 1 on the minimum locus: r2^3 + 3 r2 - 1 = 0
        let r2 = 0.3221853546260856;
        assert_abs_diff_eq!(r2 * r2 * r2 + 3.0 * r2 - 1.0, 0.0, epsilon = 1e-14);
        let s = pcoc_state(&CatalysisConfig::real(1.0, r2, 1).unwrap()).unwrap();
        let q = quadrature_variances(&s.state).unwrap();
        assert_abs_diff_eq!(q.var_x, 3.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.squeeze_db_x, -1.249387366, epsilon = 1e-8);
    }

    #[test]
    fn truncation_gate() {
        let s = FockState::coherent_with_tolerance(CoherentAmplitude::real(3.0).unwrap(), 8, 1.0).unwrap();
        assert!(matches!(quadrature_variances(&s), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn closed_form_limits() {
        for a in [0.0, 0.5, 1.0, 2.7] {
            assert_abs_diff_eq!(variance_x_closed_form(a, 0.0).unwrap(), 0.25, epsilon = 1e-15);
            assert_abs_diff_eq!(variance_p_closed_form(a, 0.0).unwrap(), 0.25, epsilon = 1e-15);
        }
        assert!(variance_x_closed_form(1.0, 1.5).is_err());
    }

    #[test]
    fn closed_form_pole() {
        // alpha = 0, r2 = 1: the herald can never fire
        assert!(matches!(variance_x_closed_form(0.0, 1.0), Err(Error::Pole(_))));
    }

    #[test]
    fn closed_form_minimum_over_reflectivity() {
        let (r2, v) = golden_section_minimize(|r2| variance_x_closed_form(1.0, r2).unwrap(), 0.05, 0.95, 1e-10);
        assert_abs_diff_eq!(v, 3.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r2, 0.3221853546260856, epsilon = 1e-6);
    }

    #[test]
    fn antisqueezing_locus() {
        for i in 1..=20 {
            let r2 = i as f64 / 21.0;
            let a = locus_alpha_max(r2).unwrap();
            assert_abs_diff_eq!(variance_x_closed_form(a, r2).unwrap(), 0.75, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(locus_alpha_max(0.25).unwrap(), 2.0);
        assert!(locus_alpha_max(0.0).is_err());
    }

    #[test]
    fn minimum_locus_against_numeric_minimizer() {
        for r2 in [0.2, 0.332, 0.5] {
            let (upper, lower) = locus_alpha_min(r2).unwrap();
            // bracket each branch by a coarse scan, then refine
            for branch in [upper, lower] {
                let (a, v) = golden_section_minimize(
                    |a| variance_x_closed_form(a, r2).unwrap(),
                    branch * 0.8,
                    branch * 1.2,
                    1e-8,
                );
                assert_abs_diff_eq!(v, 3.0 / 16.0, epsilon = 1e-12);
                assert_abs_diff_eq!(a, branch, epsilon = 1e-4);
            }
        }
        assert_abs_diff_eq!(locus_alpha_min(0.3221853546260856).unwrap().1, 1.0, epsilon = 1e-12);
        assert!(matches!(locus_alpha_min(0.0), Err(Error::Domain { .. })));
        assert!(locus_alpha_min(1.0).is_err());
    }

    #[test]
    fn g2_benchmarks() {
        let p = PhotonNumberDistribution::poisson(1.3, 40).unwrap();
        assert_abs_diff_eq!(g2(&p).unwrap(), 1.0, epsilon = 1e-10);
        let one = FockState::fock(1, 3).unwrap().number_distribution();
        assert_eq!(g2(&one).unwrap(), 0.0);
        assert!(matches!(g2(&PhotonNumberDistribution::vacuum()), Err(Error::UndefinedG2)));
    }

    #[test]
    fn closed_form_matches_state_variances() {
        for i in 0..20 {
            for j in 0..20 {
                let alpha = 0.2 + 1.8 * i as f64 / 19.0;
                let r2 = 0.05 + 0.9 * j as f64 / 19.0;
                let s = pcoc_state(&CatalysisConfig::real(alpha, r2, 1).unwrap()).unwrap();
                let q = quadrature_variances(&s.state).unwrap();
                assert_abs_diff_eq!(q.var_x, variance_x_closed_form(alpha, r2).unwrap(), epsilon = 1e-8);
                assert_abs_diff_eq!(q.var_p, variance_p_closed_form(alpha, r2).unwrap(), epsilon = 1e-8);
                assert!(q.var_p >= 0.25 - 1e-12);
                assert!(q.product >= 1.0 / 16.0 - 1e-9);
            }
        }
    }

    #[test]
    fn weak_reflectivity_is_near_minimum_uncertainty() {
        for i in 1..=15 {
            let r2 = i as f64 / 100.0;
            let s = pcoc_state(&CatalysisConfig::real(1.0, r2, 1).unwrap()).unwrap();
            let q = quadrature_variances(&s.state).unwrap();
            assert!((q.product - 1.0 / 16.0).abs() <= 0.02 / 16.0, "r2={r2} product={}", q.product);
        }
    }
}
