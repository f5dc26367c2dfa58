//! Photon catalysis of coherent states in a truncated Fock basis.
//!
//! A coherent state and a Fock-state catalyst interfere on a beam splitter;
//! conditioning on the catalyst photon number coming back out leaves the
//! signal mode in a non-Gaussian state. This crate computes those states
//! (closed form and by brute-force two-mode evolution), their squeezing,
//! `g2(0)` and Wigner functions, the click statistics a time-multiplexed
//! detector would record, and searches reflectivities for target states.

// negated float comparisons below are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod catalysis;
pub mod design;
pub mod detector;
pub mod error;
pub mod export;
pub mod fock;
pub mod optimize;
pub mod special;

pub use analysis::{
    g2, locus_alpha_max, locus_alpha_min, quadrature_variances, to_db, variance_p_closed_form,
    variance_x_closed_form, wigner, wigner_negativity, GridSpec, Negativity, QuadratureStats,
    WignerGrid, VACUUM_VARIANCE,
};
pub use catalysis::{
    catalysis_coefficient, compare_with_oracle, iterated_pcoc, pcoc_oracle, pcoc_state,
    success_probability_closed_form, two_mode_output, BeamSplitter, CatalysisConfig, Heralded,
    IteratedConfig, Stage,
};
pub use design::{
    optimize_reflectivities, sweep, AlphaSpec, Axis, DesignProblem, DesignResult, Metric,
    StageBounds, SweepParameter, SweepSpec, SweepTable,
};
pub use detector::{
    apply_loss, g2_from_clicks, heralded_g2, heralded_signal_distribution,
    joint_output_distribution, tmd_click_distribution, ClickDistribution,
    JointClickDistribution, LossChannel, TmdConfig,
};
pub use error::{Error, Result};
pub use fock::{CoherentAmplitude, CssConstruction, FockState, PhotonNumberDistribution};
