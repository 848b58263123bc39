//! Exact outcome distributions and error probabilities for direct detection,
//! the Generalized Kennedy receiver, the conditional pulse nulling receiver,
//! and the Helstrom/square-root-measurement bounds.
//!
//! All receiver probabilities are computed by exact enumeration of the click
//! patterns, so closed forms appear only in the test oracles.

use crate::optimize::grid_then_golden;
use crate::photon::no_click_probability;
use crate::{ensure, CoherentAmplitude, DetectorModel, MismatchModel, Result};

/// Largest supported PPM order; enumerations are exponential in the order.
pub const MAX_ORDER: usize = 20;

/// One M-ary PPM codeword: exactly one of the `order` slots carries the
/// signal pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PpmCodeword {
    order: usize,
    pulse_position: usize,
}

impl PpmCodeword {
    pub fn new(order: usize, pulse_position: usize) -> Result<Self> {
        ensure((2..=MAX_ORDER).contains(&order), || {
            format!("PPM order must be in [2, {MAX_ORDER}], got {order}")
        })?;
        ensure((1..=order).contains(&pulse_position), || {
            format!("pulse position must be in [1, {order}], got {pulse_position}")
        })?;
        Ok(PpmCodeword { order, pulse_position })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn pulse_position(&self) -> usize {
        self.pulse_position
    }
}

/// Final receiver output for one frame: a codeword index in `1..=M`, or an
/// erasure (no decision).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decision {
    Word(usize),
    Erasure,
}

/// Probabilities over all decisions, conditioned on the transmitted word.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    conditioned_on: usize,
    word_probs: Vec<f64>,
    erasure: f64,
}

impl OutcomeDistribution {
    fn new(conditioned_on: usize, word_probs: Vec<f64>, erasure: f64) -> Self {
        OutcomeDistribution { conditioned_on, word_probs, erasure }
    }

    pub fn order(&self) -> usize {
        self.word_probs.len()
    }

    /// The true codeword this distribution is conditioned on (1-based).
    pub fn conditioned_on(&self) -> usize {
        self.conditioned_on
    }

    pub fn probability(&self, decision: Decision) -> f64 {
        match decision {
            Decision::Word(w) => self.word_probs[w - 1],
            Decision::Erasure => self.erasure,
        }
    }

    pub fn correct_probability(&self) -> f64 {
        self.word_probs[self.conditioned_on - 1]
    }

    /// Probability of a hard wrong decision (erasures excluded).
    pub fn error_probability(&self) -> f64 {
        let mut p = 0.0;
        for (i, &q) in self.word_probs.iter().enumerate() {
            if i + 1 != self.conditioned_on {
                p += q;
            }
        }
        p
    }

    pub fn erasure_probability(&self) -> f64 {
        self.erasure
    }

    /// Error probability when erasures are converted to uniform random
    /// guesses, as when quoting a plain symbol error rate.
    pub fn hard_error_probability(&self) -> f64 {
        let m = self.order() as f64;
        self.error_probability() + self.erasure * (m - 1.0) / m
    }

    pub fn total(&self) -> f64 {
        self.word_probs.iter().sum::<f64>() + self.erasure
    }
}

/// Nulling amplitude policy for the CPN receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NullingStrategy {
    /// Null with the signal amplitude itself (`N_null = N_p`).
    Exact,
    /// Null every hypothesized slot with one fixed mean photon number.
    FixedAmplitude { n_null: f64 },
}

impl NullingStrategy {
    pub fn fixed(n_null: f64) -> Result<Self> {
        ensure(n_null >= 0.0 && n_null.is_finite(), || {
            format!("nulling photon number must be finite and >= 0, got {n_null}")
        })?;
        Ok(NullingStrategy::FixedAmplitude { n_null })
    }

    pub fn n_null(&self, n_p: f64) -> f64 {
        match self {
            NullingStrategy::Exact => n_p,
            NullingStrategy::FixedAmplitude { n_null } => *n_null,
        }
    }
}

/// No-click probabilities for the four kinds of slot a receiver encounters.
///
/// Background convention: the signal-arm leakage `c_sig * N_p` is present in
/// every slot of the frame (the modulator suppresses, but does not remove,
/// the carrier), while the nulling-arm term `c_null * N_null` applies only
/// to the slot where the nulling pulse is actually fired.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SlotProbs {
    pub(crate) null_pulse: f64,
    pub(crate) null_empty: f64,
    pub(crate) dd_pulse: f64,
    pub(crate) dd_empty: f64,
}

impl SlotProbs {
    pub(crate) fn new(
        n_p: f64,
        n_null: f64,
        detector: &DetectorModel,
        mismatch: &MismatchModel,
    ) -> Result<Self> {
        let mean_pulse = crate::effective_mean_photons(true, n_p, n_null, mismatch)?;
        let mean_empty = crate::effective_mean_photons(false, n_p, n_null, mismatch)?;
        Ok(SlotProbs {
            null_pulse: no_click_probability(mean_pulse, detector, n_p, n_null)?,
            null_empty: no_click_probability(mean_empty, detector, n_p, n_null)?,
            dd_pulse: no_click_probability(n_p, detector, n_p, 0.0)?,
            dd_empty: no_click_probability(0.0, detector, n_p, 0.0)?,
        })
    }
}

fn validate_order(m: usize) -> Result<()> {
    ensure((2..=MAX_ORDER).contains(&m), || {
        format!("PPM order must be in [2, {MAX_ORDER}], got {m}")
    })
}

/// Direct-detection outcome distribution for one transmitted word, with the
/// zero-click pattern recorded as an erasure. Maximum-likelihood decoding:
/// a single click decides that slot, multiple clicks decide uniformly among
/// the clicked slots.
///
/// Every word is equivalent by symmetry; the returned distribution is
/// conditioned on word 1.
pub fn dd_ppm_outcomes(
    m: usize,
    n_p: f64,
    detector: &DetectorModel,
) -> Result<OutcomeDistribution> {
    validate_order(m)?;
    let q_pulse = no_click_probability(n_p, detector, n_p, 0.0)?;
    let q_empty = no_click_probability(0.0, detector, n_p, 0.0)?;
    let true_word = 1usize;

    let mut word_probs = vec![0.0; m];
    let mut erasure = 0.0;
    for mask in 0u32..(1 << m) {
        let mut p = 1.0;
        for slot in 1..=m {
            let q = if slot == true_word { q_pulse } else { q_empty };
            p *= if mask >> (slot - 1) & 1 == 1 { 1.0 - q } else { q };
        }
        if p == 0.0 {
            continue;
        }
        let clicked: Vec<usize> = (1..=m).filter(|s| mask >> (s - 1) & 1 == 1).collect();
        if clicked.is_empty() {
            erasure += p;
        } else {
            let share = p / clicked.len() as f64;
            for s in clicked {
                word_probs[s - 1] += share;
            }
        }
    }
    Ok(OutcomeDistribution::new(true_word, word_probs, erasure))
}

/// Average direct-detection word error probability with zero-click frames
/// decoded by a uniform guess. Without background terms this equals
/// `((M-1)/M) exp(-eta N_p)`.
pub fn dd_ppm_error(m: usize, n_p: f64, detector: &DetectorModel) -> Result<f64> {
    Ok(dd_ppm_outcomes(m, n_p, detector)?.hard_error_probability())
}

/// Which hypothesis a click supports in the displaced on-off binary test.
/// The two rules correspond to displacing the constellation in opposite
/// directions; their optima are related by `beta <-> alpha - beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionRule {
    ClickMeansZero,
    ClickMeansAlpha,
}

/// Error probability of the Generalized Kennedy receiver discriminating
/// `{|0>, |alpha>}` with equal priors after displacing by `beta`:
/// `(1/2) [exp(-(alpha-beta)^2) + 1 - exp(-beta^2)]` for
/// [`DecisionRule::ClickMeansZero`], and the complementary expression for
/// the other rule.
pub fn gk_error(alpha: CoherentAmplitude, beta: f64, rule: DecisionRule) -> f64 {
    let a = alpha.amplitude();
    let shifted = (a - beta) * (a - beta);
    match rule {
        DecisionRule::ClickMeansZero => 0.5 * ((-shifted).exp() + 1.0 - (-beta * beta).exp()),
        DecisionRule::ClickMeansAlpha => 0.5 * (1.0 - (-shifted).exp() + (-beta * beta).exp()),
    }
}

/// Result of optimizing the Generalized Kennedy displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkOptimum {
    pub beta: f64,
    pub rule: DecisionRule,
    pub error: f64,
}

/// Globally minimize the Generalized Kennedy error over the displacement and
/// both decision rules. Among numerically tied optima the smallest |beta| is
/// reported.
pub fn gk_optimize(alpha: CoherentAmplitude) -> GkOptimum {
    let a = alpha.amplitude().abs();
    let half = a + 3.0;
    let mut candidates: Vec<GkOptimum> = Vec::new();
    for rule in [DecisionRule::ClickMeansZero, DecisionRule::ClickMeansAlpha] {
        let (beta, error) =
            grid_then_golden(|b| gk_error(alpha, b, rule), -half, half, 0.01, 1e-6, 4);
        candidates.push(GkOptimum { beta, rule, error });
        // the reflected point beta -> alpha - beta attains the same error
        // under the complementary rule; evaluate it so tie-breaking sees both
        let reflected = alpha.amplitude() - beta;
        let other = match rule {
            DecisionRule::ClickMeansZero => DecisionRule::ClickMeansAlpha,
            DecisionRule::ClickMeansAlpha => DecisionRule::ClickMeansZero,
        };
        candidates.push(GkOptimum { beta: reflected, rule: other, error: gk_error(alpha, reflected, other) });
    }
    let best = candidates.iter().map(|c| c.error).fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .filter(|c| c.error <= best + 1e-9)
        .min_by(|x, y| x.beta.abs().total_cmp(&y.beta.abs()))
        .expect("at least one candidate")
}

/// Minimum error probability for discriminating `{|0>, |alpha>}` with equal
/// priors over all physical measurements:
/// `(1/2)(1 - sqrt(1 - exp(-alpha^2)))`.
pub fn binary_helstrom(alpha: CoherentAmplitude) -> f64 {
    let overlap_sq = (-alpha.mean_photons()).exp();
    0.5 * (1.0 - (1.0 - overlap_sq).sqrt())
}

/// Minimum average error for M-ary PPM codeword discrimination. The
/// codewords are a geometrically uniform pure-state set with pairwise
/// overlap `s = exp(-N_p)`, for which the square-root measurement is
/// optimal:
/// `1 - (1/M^2) (sqrt(1 + (M-1) s) + (M-1) sqrt(1 - s))^2`.
pub fn ppm_helstrom(m: usize, n_p: f64) -> Result<f64> {
    validate_order(m)?;
    ensure(n_p >= 0.0 && n_p.is_finite(), || {
        format!("n_p must be finite and >= 0, got {n_p}")
    })?;
    let mf = m as f64;
    let s = (-n_p).exp();
    let root = (1.0 + (mf - 1.0) * s).sqrt() + (mf - 1.0) * (1.0 - s).sqrt();
    Ok(1.0 - (root / mf) * (root / mf))
}

/// Exact outcome distribution of the CPN receiver conditioned on the
/// transmitted word.
///
/// The receiver nulls slots sequentially: at stage `i` it nulls slot `i` and
/// detects. No click confirms hypothesis `i`; the remaining slots are then
/// direct-detected and a click at a later slot `k` overrides the decision to
/// `k` (ties broken uniformly among clicked slots). A click at the nulled
/// slot rejects hypothesis `i` and the receiver advances to stage `i + 1`.
/// Clicks at all `M` nulled stages leave no surviving hypothesis: erasure.
pub fn cpn_outcome_distribution(
    m: usize,
    true_word: usize,
    n_p: f64,
    strategy: &NullingStrategy,
    detector: &DetectorModel,
    mismatch: &MismatchModel,
) -> Result<OutcomeDistribution> {
    validate_order(m)?;
    ensure((1..=m).contains(&true_word), || {
        format!("true word must be in [1, {m}], got {true_word}")
    })?;
    let probs = SlotProbs::new(n_p, strategy.n_null(n_p), detector, mismatch)?;
    Ok(cpn_distribution(m, true_word, &probs))
}

pub(crate) fn cpn_distribution(m: usize, true_word: usize, probs: &SlotProbs) -> OutcomeDistribution {
    let mut word_probs = vec![0.0; m];
    let mut prefix = 1.0; // probability that every nulled stage so far clicked
    for stage in 1..=m {
        let q_null = if stage == true_word { probs.null_pulse } else { probs.null_empty };
        let p_branch = prefix * q_null; // no click at this nulled stage
        if p_branch > 0.0 {
            // direct-detect the remaining slots under hypothesis `stage`
            let suffix: Vec<usize> = (stage + 1..=m).collect();
            for mask in 0u32..(1 << suffix.len()) {
                let mut p = p_branch;
                let mut clicked: Vec<usize> = Vec::new();
                for (bit, &slot) in suffix.iter().enumerate() {
                    let q = if slot == true_word { probs.dd_pulse } else { probs.dd_empty };
                    if mask >> bit & 1 == 1 {
                        p *= 1.0 - q;
                        clicked.push(slot);
                    } else {
                        p *= q;
                    }
                }
                if p == 0.0 {
                    continue;
                }
                if clicked.is_empty() {
                    word_probs[stage - 1] += p;
                } else {
                    let share = p / clicked.len() as f64;
                    for slot in clicked {
                        word_probs[slot - 1] += share;
                    }
                }
            }
        }
        prefix *= 1.0 - q_null;
    }
    OutcomeDistribution::new(true_word, word_probs, prefix)
}

/// Word-averaged error and erasure probabilities of a receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpnRates {
    order: usize,
    /// Hard wrong decisions (erasures excluded).
    pub error: f64,
    pub erasure: f64,
}

impl CpnRates {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Error rate with erasures converted to uniform guesses; this is the
    /// quantity compared against direct detection in dB improvements.
    pub fn hard_error(&self) -> f64 {
        let m = self.order as f64;
        self.error + self.erasure * (m - 1.0) / m
    }
}

/// Uniform average of [`cpn_outcome_distribution`] over the transmitted
/// word.
pub fn cpn_error(
    m: usize,
    n_p: f64,
    strategy: &NullingStrategy,
    detector: &DetectorModel,
    mismatch: &MismatchModel,
) -> Result<CpnRates> {
    validate_order(m)?;
    let probs = SlotProbs::new(n_p, strategy.n_null(n_p), detector, mismatch)?;
    let mut error = 0.0;
    let mut erasure = 0.0;
    for w in 1..=m {
        let dist = cpn_distribution(m, w, &probs);
        error += dist.error_probability();
        erasure += dist.erasure_probability();
    }
    Ok(CpnRates { order: m, error: error / m as f64, erasure: erasure / m as f64 })
}

/// Result of the nulling photon number optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullOptimum {
    pub n_null: f64,
    /// Hard wrong-decision probability at the optimum (erasures excluded).
    pub error: f64,
    pub erasure: f64,
    /// The minimized objective: error with erasures converted to guesses.
    pub hard_error: f64,
}

/// Minimize the CPN word error over the nulling photon number on
/// `[0, 4 N_p + 2]` (grid step 0.01, golden-section refinement to 1e-4).
///
/// The objective is the hard-decision error rate (erasures decoded by a
/// uniform guess): minimizing the wrong-decision probability alone is
/// degenerate, since arbitrarily bright nulling pushes every frame into the
/// all-click erasure record. Exact nulling is always included as a
/// candidate, so the optimum never exceeds the exact-nulling error.
pub fn cpn_optimize_null(
    m: usize,
    n_p: f64,
    detector: &DetectorModel,
    mismatch: &MismatchModel,
) -> Result<NullOptimum> {
    validate_order(m)?;
    ensure(n_p >= 0.0 && n_p.is_finite(), || {
        format!("n_p must be finite and >= 0, got {n_p}")
    })?;
    let objective = |n_null: f64| -> f64 {
        let strategy = NullingStrategy::FixedAmplitude { n_null };
        match cpn_error(m, n_p, &strategy, detector, mismatch) {
            Ok(r) => r.hard_error(),
            Err(_) => f64::INFINITY,
        }
    };
    let hi = 4.0 * n_p + 2.0;
    let (mut n_null, mut best) = grid_then_golden(&objective, 0.0, hi, 0.01, 1e-4, 3);
    // exact nulling as an explicit candidate
    let at_exact = objective(n_p);
    if at_exact <= best {
        n_null = n_p;
        best = at_exact;
    }
    let rates = cpn_error(m, n_p, &NullingStrategy::FixedAmplitude { n_null }, detector, mismatch)?;
    Ok(NullOptimum { n_null, error: rates.error, erasure: rates.erasure, hard_error: best })
}

/// Error-rate improvement of `p_test` over `p_ref` in decibels:
/// `10 log10(p_ref / p_test)`.
pub fn improvement_db(p_ref: f64, p_test: f64) -> Result<f64> {
    for (name, v) in [("p_ref", p_ref), ("p_test", p_test)] {
        ensure(v > 0.0 && v <= 1.0, || {
            format!("{name} must be a probability in (0, 1], got {v}")
        })?;
    }
    Ok(10.0 * (p_ref / p_test).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ideal() -> (DetectorModel, MismatchModel) {
        (DetectorModel::ideal(), MismatchModel::ideal())
    }

    #[test]
    fn dd_uniform_guess_at_zero_photons() {
        let det = DetectorModel::ideal();
        assert_abs_diff_eq!(dd_ppm_error(4, 0.0, &det).unwrap(), 0.75, epsilon = 1e-15);
        let out = dd_ppm_outcomes(4, 0.0, &det).unwrap();
        assert_abs_diff_eq!(out.erasure_probability(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dd_vanishes_at_large_photons() {
        let det = DetectorModel::ideal();
        assert!(dd_ppm_error(4, 50.0, &det).unwrap() < 1e-20);
    }

    #[test]
    fn dd_outcomes_split_ideal() {
        // no background: all failures are zero-click erasures
        let det = DetectorModel::ideal();
        let out = dd_ppm_outcomes(4, 1.25, &det).unwrap();
        assert_abs_diff_eq!(out.error_probability(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.erasure_probability(), (-1.25f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(out.total(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn dd_background_produces_small_hard_errors() {
        let det = DetectorModel::calibrated();
        let out = dd_ppm_outcomes(4, 1.25, &det).unwrap();
        let err = out.error_probability();
        // same order as the demonstration's 0.004
        assert!(err > 1e-3 && err < 4e-2, "err = {err}");
    }

    #[test]
    fn gk_worked_example() {
        let alpha = CoherentAmplitude::new(0.2);
        let p = gk_error(alpha, -0.61, DecisionRule::ClickMeansZero);
        assert_abs_diff_eq!(p, 0.415, epsilon = 5e-4);
        // beta = 0: direct detection
        let dd = gk_error(alpha, 0.0, DecisionRule::ClickMeansZero);
        assert_abs_diff_eq!(dd, 0.480, epsilon = 5e-4);
        assert_abs_diff_eq!(dd, 0.5 * (-0.04f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn gk_identical_hypotheses() {
        let alpha = CoherentAmplitude::new(0.0);
        let opt = gk_optimize(alpha);
        assert_abs_diff_eq!(opt.error, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn gk_optimum_reports_smallest_displacement() {
        let opt = gk_optimize(CoherentAmplitude::new(0.2));
        assert_abs_diff_eq!(opt.beta, -0.61, epsilon = 0.01);
        assert_abs_diff_eq!(opt.error, 0.415, epsilon = 5e-4);
        assert!(opt.error >= binary_helstrom(CoherentAmplitude::new(0.2)));
    }

    #[test]
    fn gk_beats_dd_prefactor_at_large_alpha() {
        for a in [2.0, 3.0] {
            let alpha = CoherentAmplitude::new(a);
            let opt = gk_optimize(alpha);
            assert!(opt.error < 0.5 * (-a * a).exp());
            assert!(opt.error >= binary_helstrom(alpha));
        }
    }

    #[test]
    fn binary_helstrom_values() {
        assert_abs_diff_eq!(binary_helstrom(CoherentAmplitude::new(0.0)), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(binary_helstrom(CoherentAmplitude::new(0.2)), 0.401, epsilon = 5e-4);
    }

    #[test]
    fn ppm_helstrom_degenerate_and_value() {
        assert_abs_diff_eq!(ppm_helstrom(4, 0.0).unwrap(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(ppm_helstrom(4, 1.0).unwrap(), 0.08052, epsilon = 5e-6);
    }

    #[test]
    fn cpn_certain_under_ideal_exact_nulling_word_one() {
        let (det, mm) = ideal();
        let d = cpn_outcome_distribution(4, 1, 1.25, &NullingStrategy::Exact, &det, &mm).unwrap();
        assert_abs_diff_eq!(d.probability(Decision::Word(1)), 1.0, epsilon = 1e-14);
        assert_eq!(d.erasure_probability(), 0.0);
    }

    #[test]
    fn cpn_ideal_erasure_free() {
        let (det, mm) = ideal();
        for np in [0.3, 1.25, 3.0] {
            let r = cpn_error(4, np, &NullingStrategy::Exact, &det, &mm).unwrap();
            assert_eq!(r.erasure, 0.0);
        }
    }

    #[test]
    fn cpn_degenerates_to_uniform_guess_at_vanishing_photons() {
        let (det, mm) = ideal();
        let r = cpn_error(4, 1e-6, &NullingStrategy::Exact, &det, &mm).unwrap();
        assert_abs_diff_eq!(r.error, 0.75, epsilon = 1e-5);
    }

    #[test]
    fn cpn_distributions_sum_to_one() {
        let det = DetectorModel::calibrated();
        let mm = MismatchModel::from_total(0.05).unwrap();
        let strat = NullingStrategy::fixed(1.6).unwrap();
        for w in 1..=4 {
            let d = cpn_outcome_distribution(4, w, 1.25, &strat, &det, &mm).unwrap();
            assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cpn_matches_fig4_ideal_optimal_nulling_pair() {
        // noiseless model at the reported optimum nulling amplitude
        let (det, mm) = ideal();
        let strat = NullingStrategy::fixed(1.6).unwrap();
        let r = cpn_error(4, 1.25, &strat, &det, &mm).unwrap();
        assert_abs_diff_eq!(r.error, 0.082, epsilon = 0.01);
        assert_abs_diff_eq!(r.erasure, 0.011, epsilon = 0.01);
    }

    #[test]
    fn optimize_null_tracks_reported_optima() {
        let det = DetectorModel::calibrated();
        let mm = MismatchModel::from_total(0.03).unwrap();
        let opt = cpn_optimize_null(4, 0.64, &det, &mm).unwrap();
        assert_abs_diff_eq!(opt.n_null, 1.2, epsilon = 0.2);
        assert_abs_diff_eq!(opt.error, 0.24, epsilon = 0.02);
        let opt = cpn_optimize_null(4, 1.25, &det, &mm).unwrap();
        assert_abs_diff_eq!(opt.n_null, 1.4, epsilon = 0.2);
    }

    #[test]
    fn optimize_null_never_worse_than_exact() {
        let (det, mm) = ideal();
        for np in [0.2, 1.0, 3.0] {
            let exact = cpn_error(4, np, &NullingStrategy::Exact, &det, &mm).unwrap();
            let opt = cpn_optimize_null(4, np, &det, &mm).unwrap();
            assert!(opt.hard_error <= exact.hard_error() + 1e-12);
        }
    }

    #[test]
    fn improvement_db_values() {
        assert_abs_diff_eq!(improvement_db(0.3, 0.3).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(improvement_db(1.0, 0.6).unwrap(), 2.218, epsilon = 1e-3);
        assert!(improvement_db(0.0, 0.5).is_err());
        assert!(improvement_db(0.5, -0.1).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        let (det, mm) = ideal();
        assert!(dd_ppm_error(1, 1.0, &det).is_err());
        assert!(cpn_outcome_distribution(4, 0, 1.0, &NullingStrategy::Exact, &det, &mm).is_err());
        assert!(cpn_outcome_distribution(4, 5, 1.0, &NullingStrategy::Exact, &det, &mm).is_err());
        assert!(PpmCodeword::new(4, 5).is_err());
        assert!(PpmCodeword::new(1, 1).is_err());
        assert!(NullingStrategy::fixed(-1.0).is_err());
    }
}
