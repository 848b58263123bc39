//! Detection statistics of displaced coherent states under a calibrated
//! noise model.
//!
//! Everything downstream (receiver trees, Monte Carlo frames) consumes only
//! the click probabilities computed here.

use crate::{ensure, Result};

/// Real amplitude of a coherent state; the mean photon number is the square
/// of the amplitude. Phase offsets are handled separately by
/// [`MismatchModel`], so a negative amplitude simply encodes a displacement
/// in the opposite direction (as used by the Generalized Kennedy receiver).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude(f64);

impl CoherentAmplitude {
    pub fn new(amplitude: f64) -> Self {
        CoherentAmplitude(amplitude)
    }

    /// Amplitude `sqrt(n)` for a mean photon number `n >= 0`.
    pub fn from_mean_photons(mean_photons: f64) -> Result<Self> {
        ensure(mean_photons >= 0.0 && mean_photons.is_finite(), || {
            format!("mean photon number must be finite and >= 0, got {mean_photons}")
        })?;
        Ok(CoherentAmplitude(mean_photons.sqrt()))
    }

    pub fn amplitude(&self) -> f64 {
        self.0
    }

    pub fn mean_photons(&self) -> f64 {
        self.0 * self.0
    }
}

/// Single-photon detector with quantum efficiency `eta` and background-click
/// leakage proportional to the photon numbers prepared in the signal and
/// nulling arms (`c_sig`, `c_null`), plus a constant dark term `c_dark`.
///
/// The calibrated defaults are `c_sig = 0.0042`, `c_null = 0.0129`,
/// `c_dark = 0`: the constant dark rate of the physical detector is three
/// orders of magnitude below the leakage terms over one pulse slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub eta: f64,
    pub c_sig: f64,
    pub c_null: f64,
    pub c_dark: f64,
}

impl DetectorModel {
    pub fn new(eta: f64, c_sig: f64, c_null: f64, c_dark: f64) -> Result<Self> {
        ensure((0.0..=1.0).contains(&eta), || {
            format!("detector efficiency must be in [0, 1], got {eta}")
        })?;
        for (name, v) in [("c_sig", c_sig), ("c_null", c_null), ("c_dark", c_dark)] {
            ensure(v >= 0.0 && v.is_finite(), || {
                format!("{name} must be finite and >= 0, got {v}")
            })?;
        }
        Ok(DetectorModel { eta, c_sig, c_null, c_dark })
    }

    /// Unit-efficiency detector with no background or dark clicks.
    pub fn ideal() -> Self {
        DetectorModel { eta: 1.0, c_sig: 0.0, c_null: 0.0, c_dark: 0.0 }
    }

    /// Background model fitted to the demonstration data. Photon numbers are
    /// detector-plane (efficiency-normalized), hence `eta = 1`.
    pub fn calibrated() -> Self {
        DetectorModel { eta: 1.0, c_sig: 0.0042, c_null: 0.0129, c_dark: 0.0 }
    }

    /// Combined background-click probability for a slot, given the photon
    /// numbers incident from the signal and nulling arms. Clamped to [0, 1].
    pub fn background_probability(&self, n_p_incident: f64, n_null_incident: f64) -> f64 {
        (self.c_dark + self.c_sig * n_p_incident + self.c_null * n_null_incident).min(1.0)
    }
}

/// How the fraction of signal power that fails to interfere with the nulling
/// field is accounted for in the detected mean photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceModel {
    /// The mismatched fraction does not interfere at all: detected mean is
    /// `(sqrt(N_p (1-D)) - sqrt(N_null))^2 + D N_p`. Canonical model; it
    /// reproduces the residual `D N_p` under exact nulling and reduces to a
    /// pure displacement at `D = 0`.
    #[default]
    NonInterfering,
    /// Reduced-visibility cross term: detected mean is
    /// `N_p + N_null - 2 sqrt(N_p N_null) (1 - D/2)`. Kept as a
    /// sensitivity-analysis alternative.
    Visibility,
}

/// Mode and phase mismatch between the signal and nulling fields. The
/// effective mismatch fraction is `D = delta_m + 2 (1 - cos theta)` and must
/// lie in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchModel {
    delta_m: f64,
    theta: f64,
    interference: InterferenceModel,
}

impl MismatchModel {
    pub fn new(delta_m: f64, theta: f64) -> Result<Self> {
        ensure((0.0..=1.0).contains(&delta_m), || {
            format!("mode mismatch fraction must be in [0, 1], got {delta_m}")
        })?;
        ensure(theta.is_finite(), || format!("phase offset must be finite, got {theta}"))?;
        let total = delta_m + 2.0 * (1.0 - theta.cos());
        ensure(total <= 1.0, || {
            format!("effective mismatch {total} exceeds 1; the interference model requires D <= 1")
        })?;
        Ok(MismatchModel { delta_m, theta, interference: InterferenceModel::default() })
    }

    /// Perfect mode and phase matching.
    pub fn ideal() -> Self {
        MismatchModel { delta_m: 0.0, theta: 0.0, interference: InterferenceModel::default() }
    }

    /// Lump the whole mismatch budget into the mode term, as done when
    /// fitting a single free parameter.
    pub fn from_total(delta: f64) -> Result<Self> {
        MismatchModel::new(delta, 0.0)
    }

    pub fn with_interference(mut self, interference: InterferenceModel) -> Self {
        self.interference = interference;
        self
    }

    pub fn delta_m(&self) -> f64 {
        self.delta_m
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn interference(&self) -> InterferenceModel {
        self.interference
    }

    /// Effective mismatch fraction `delta_m + 2 (1 - cos theta)`.
    pub fn effective_fraction(&self) -> f64 {
        self.delta_m + 2.0 * (1.0 - self.theta.cos())
    }
}

/// Probability that the detector does *not* click on a slot with
/// `mean_photons` in the detected mode and the given incident photon numbers
/// feeding the background model. Kept separate from [`click_probability`] so
/// the receiver enumerations can form no-click products without cancellation.
pub(crate) fn no_click_probability(
    mean_photons: f64,
    detector: &DetectorModel,
    n_p_incident: f64,
    n_null_incident: f64,
) -> Result<f64> {
    for (name, v) in [
        ("mean_photons", mean_photons),
        ("n_p_incident", n_p_incident),
        ("n_null_incident", n_null_incident),
    ] {
        ensure(v >= 0.0 && v.is_finite(), || {
            format!("{name} must be finite and >= 0, got {v}")
        })?;
    }
    let p_bg = detector.background_probability(n_p_incident, n_null_incident);
    Ok((-detector.eta * mean_photons).exp() * (1.0 - p_bg))
}

/// Probability of at least one click on a slot: Poisson on-off statistics of
/// the detected mode, combined with independent background clicks.
///
/// Returns `1 - exp(-eta * mean_photons) * (1 - P_bg)` with
/// `P_bg = min(1, c_dark + c_sig * n_p_incident + c_null * n_null_incident)`.
pub fn click_probability(
    mean_photons: f64,
    detector: &DetectorModel,
    n_p_incident: f64,
    n_null_incident: f64,
) -> Result<f64> {
    Ok(1.0 - no_click_probability(mean_photons, detector, n_p_incident, n_null_incident)?)
}

/// Mean photon number reaching the detector on a nulled slot.
///
/// With the signal absent the nulling pulse passes through unchanged. With
/// the signal present the matched fraction interferes with the nulling field
/// while the mismatched fraction `D * N_p` adds incoherently (or reduces the
/// interference visibility, depending on the configured model).
pub fn effective_mean_photons(
    signal_present: bool,
    n_p: f64,
    n_null: f64,
    mismatch: &MismatchModel,
) -> Result<f64> {
    for (name, v) in [("n_p", n_p), ("n_null", n_null)] {
        ensure(v >= 0.0 && v.is_finite(), || {
            format!("{name} must be finite and >= 0, got {v}")
        })?;
    }
    if !signal_present {
        return Ok(n_null);
    }
    let delta = mismatch.effective_fraction();
    let mean = match mismatch.interference() {
        InterferenceModel::NonInterfering => {
            let interfering = (n_p * (1.0 - delta)).sqrt() - n_null.sqrt();
            interfering * interfering + delta * n_p
        }
        InterferenceModel::Visibility => {
            n_p + n_null - 2.0 * (n_p * n_null).sqrt() * (1.0 - delta / 2.0)
        }
    };
    Ok(mean.max(0.0))
}

/// Overlap `|<a|b>|` of two coherent states with real amplitudes:
/// `exp(-(a - b)^2 / 2)`. Always positive, so perfect discrimination is
/// impossible for distinct finite amplitudes.
pub fn coherent_overlap(a: CoherentAmplitude, b: CoherentAmplitude) -> f64 {
    let d = a.amplitude() - b.amplitude();
    (-d * d / 2.0).exp()
}
