//! Quantum-limited demodulation of coherent-state pulse-position-modulation
//! (PPM) codewords.
//!
//! The crate provides exact outcome statistics for direct detection, the
//! Generalized Kennedy receiver and the conditional pulse nulling (CPN)
//! receiver, Helstrom/square-root-measurement bounds, a calibrated detector
//! noise model, frame-level Monte Carlo simulation with deterministic
//! parallel substreams, and Reed-Solomon errors-and-erasures outer-code
//! planning.

pub mod montecarlo;
mod optimize;
pub mod outer_code;
pub mod photon;
pub mod receivers;

pub use photon::{
    click_probability, coherent_overlap, effective_mean_photons, CoherentAmplitude,
    DetectorModel, InterferenceModel, MismatchModel,
};
pub use receivers::{
    binary_helstrom, cpn_error, cpn_optimize_null, cpn_outcome_distribution, dd_ppm_error,
    dd_ppm_outcomes, gk_error, gk_optimize, improvement_db, ppm_helstrom, CpnRates, Decision,
    DecisionRule, GkOptimum, NullOptimum, NullingStrategy, OutcomeDistribution, PpmCodeword,
};

/// Error type for model construction and operation arguments.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
