//! Frame-level Monte Carlo simulation of the direct-detection and
//! conditional pulse nulling receivers.
//!
//! Each frame draws its own counter-based random stream from the master
//! seed, the receiver tag, the transmitted word and the frame index, so the
//! estimates are independent of thread count and scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::photon::no_click_probability;
use crate::receivers::{cpn_distribution, SlotProbs};
use crate::{ensure, Decision, DetectorModel, MismatchModel, NullingStrategy, Result};

/// Signal parameters for one simulated PPM link.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseParams {
    pub order: usize,
    pub n_p: f64,
    pub strategy: NullingStrategy,
}

/// Full configuration of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub params: PulseParams,
    pub detector: DetectorModel,
    pub mismatch: MismatchModel,
    /// Frames simulated per transmitted word (the demonstration recorded
    /// 832 frames per word).
    pub frames_per_word: u64,
    pub master_seed: u64,
}

impl TrialConfig {
    pub fn new(
        params: PulseParams,
        detector: DetectorModel,
        mismatch: MismatchModel,
        frames_per_word: u64,
        master_seed: u64,
    ) -> Result<Self> {
        ensure((2..=crate::receivers::MAX_ORDER).contains(&params.order), || {
            format!("PPM order must be in [2, {}], got {}", crate::receivers::MAX_ORDER, params.order)
        })?;
        ensure(params.n_p >= 0.0 && params.n_p.is_finite(), || {
            format!("n_p must be finite and >= 0, got {}", params.n_p)
        })?;
        ensure(frames_per_word >= 1, || "frames_per_word must be >= 1".to_string())?;
        Ok(TrialConfig { params, detector, mismatch, frames_per_word, master_seed })
    }
}

/// Which receiver a frame (or estimate) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReceiverKind {
    DirectDetection,
    ConditionalNulling,
}

impl ReceiverKind {
    fn tag(self) -> u64 {
        match self {
            ReceiverKind::DirectDetection => 0x9d3a_1c55,
            ReceiverKind::ConditionalNulling => 0x51f0_77e2,
        }
    }
}

/// Everything observed in one simulated frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRecord {
    pub true_word: usize,
    /// Click outcome of each slot in detection order.
    pub clicks: Vec<bool>,
    /// Slots that were nulled before detection (empty for direct detection).
    pub nulled: Vec<usize>,
    pub decision: Decision,
    /// The decision with erasures resolved by a uniform random guess.
    pub hard_decision: usize,
}

impl FrameRecord {
    pub fn is_error(&self) -> bool {
        matches!(self.decision, Decision::Word(w) if w != self.true_word)
    }

    pub fn is_erasure(&self) -> bool {
        self.decision == Decision::Erasure
    }

    pub fn is_hard_error(&self) -> bool {
        self.hard_decision != self.true_word
    }
}

/// A binomial proportion with its 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_trials: u64,
}

/// Estimated error, erasure and hard-error rates for one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverEstimates {
    pub error: ErrorEstimate,
    pub erasure: ErrorEstimate,
    pub hard_error: ErrorEstimate,
}

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% confidence. At the `k = 0` and `k = n`
/// boundaries the one-sided exact (Clopper-Pearson) bound replaces the
/// Wilson endpoint, so an all-success run still reports a meaningful upper
/// limit (`1 - 0.025^(1/n)`, about `3.69 / n`).
pub fn wilson_interval(successes: u64, trials: u64) -> Result<ErrorEstimate> {
    ensure(trials >= 1, || "trials must be >= 1".to_string())?;
    ensure(successes <= trials, || {
        format!("successes ({successes}) must not exceed trials ({trials})")
    })?;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let mut lo = (center - half).max(0.0);
    let mut hi = (center + half).min(1.0);
    if successes == 0 {
        lo = 0.0;
        hi = 1.0 - 0.025f64.powf(1.0 / n);
    } else if successes == trials {
        lo = 0.025f64.powf(1.0 / n);
        hi = 1.0;
    }
    Ok(ErrorEstimate { p_hat: p, ci_low: lo, ci_high: hi, n_trials: trials })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent per-frame stream derived from the master seed, receiver tag,
/// transmitted word and frame index.
pub fn frame_rng(master_seed: u64, receiver: ReceiverKind, word: usize, frame: u64) -> ChaCha8Rng {
    let mut s = splitmix64(master_seed ^ 0x6a09_e667_f3bc_c908);
    s = splitmix64(s ^ receiver.tag());
    s = splitmix64(s ^ word as u64);
    s = splitmix64(s ^ frame);
    let mut seed = [0u8; 32];
    let mut x = s;
    for chunk in seed.chunks_exact_mut(8) {
        x = splitmix64(x);
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

fn guess_if_erased<R: Rng>(decision: Decision, m: usize, rng: &mut R) -> usize {
    match decision {
        Decision::Word(w) => w,
        Decision::Erasure => rng.gen_range(1..=m),
    }
}

fn click<R: Rng>(no_click_prob: f64, rng: &mut R) -> bool {
    rng.gen::<f64>() >= no_click_prob
}

/// Simulate one direct-detection frame.
pub fn simulate_dd_frame<R: Rng>(config: &TrialConfig, true_word: usize, rng: &mut R) -> Result<FrameRecord> {
    let m = config.params.order;
    ensure((1..=m).contains(&true_word), || {
        format!("true word must be in [1, {m}], got {true_word}")
    })?;
    let n_p = config.params.n_p;
    let q_pulse = no_click_probability(n_p, &config.detector, n_p, 0.0)?;
    let q_empty = no_click_probability(0.0, &config.detector, n_p, 0.0)?;

    let mut clicks = Vec::with_capacity(m);
    for slot in 1..=m {
        let q = if slot == true_word { q_pulse } else { q_empty };
        clicks.push(click(q, rng));
    }
    let clicked: Vec<usize> = (1..=m).filter(|&s| clicks[s - 1]).collect();
    let decision = match clicked.len() {
        0 => Decision::Erasure,
        1 => Decision::Word(clicked[0]),
        k => Decision::Word(clicked[rng.gen_range(0..k)]),
    };
    let hard_decision = guess_if_erased(decision, m, rng);
    Ok(FrameRecord { true_word, clicks, nulled: Vec::new(), decision, hard_decision })
}

/// Simulate one conditional pulse nulling frame, following the same decision
/// tree as the exact enumeration: sequential null-and-detect stages, then
/// direct detection of the remaining slots once a stage fails to click.
pub fn simulate_cpn_frame<R: Rng>(config: &TrialConfig, true_word: usize, rng: &mut R) -> Result<FrameRecord> {
    let m = config.params.order;
    ensure((1..=m).contains(&true_word), || {
        format!("true word must be in [1, {m}], got {true_word}")
    })?;
    let probs = SlotProbs::new(
        config.params.n_p,
        config.params.strategy.n_null(config.params.n_p),
        &config.detector,
        &config.mismatch,
    )?;

    let mut clicks = Vec::with_capacity(m);
    let mut nulled = Vec::new();
    let mut decision = Decision::Erasure;
    for stage in 1..=m {
        let q = if stage == true_word { probs.null_pulse } else { probs.null_empty };
        nulled.push(stage);
        if click(q, rng) {
            clicks.push(true);
            continue;
        }
        clicks.push(false);
        // hypothesis `stage` survives; direct-detect the rest
        let mut late_clicks: Vec<usize> = Vec::new();
        for slot in stage + 1..=m {
            let q = if slot == true_word { probs.dd_pulse } else { probs.dd_empty };
            let c = click(q, rng);
            clicks.push(c);
            if c {
                late_clicks.push(slot);
            }
        }
        decision = match late_clicks.len() {
            0 => Decision::Word(stage),
            1 => Decision::Word(late_clicks[0]),
            k => Decision::Word(late_clicks[rng.gen_range(0..k)]),
        };
        break;
    }
    let hard_decision = guess_if_erased(decision, m, rng);
    Ok(FrameRecord { true_word, clicks, nulled, decision, hard_decision })
}

/// Estimate the error, erasure and hard-error rates of a receiver over
/// `frames_per_word` frames for each of the `M` words. Frames run in
/// parallel; the result is identical for any thread count because every
/// frame owns a counter-derived stream and the tallies are commutative.
pub fn estimate_rates(config: &TrialConfig, receiver: ReceiverKind) -> Result<ReceiverEstimates> {
    let m = config.params.order;
    let per_word = config.frames_per_word;
    let total = per_word * m as u64;

    let (errors, erasures, hard_errors) = (0..total)
        .into_par_iter()
        .map(|i| {
            let word = (i / per_word) as usize + 1;
            let frame = i % per_word;
            let mut rng = frame_rng(config.master_seed, receiver, word, frame);
            let rec = match receiver {
                ReceiverKind::DirectDetection => simulate_dd_frame(config, word, &mut rng),
                ReceiverKind::ConditionalNulling => simulate_cpn_frame(config, word, &mut rng),
            }
            .expect("config validated before dispatch");
            (
                rec.is_error() as u64,
                rec.is_erasure() as u64,
                rec.is_hard_error() as u64,
            )
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    Ok(ReceiverEstimates {
        error: wilson_interval(errors, total)?,
        erasure: wilson_interval(erasures, total)?,
        hard_error: wilson_interval(hard_errors, total)?,
    })
}

/// Exact model rates in the same shape as [`estimate_rates`], for
/// theory-vs-simulation comparisons.
pub fn exact_rates(config: &TrialConfig, receiver: ReceiverKind) -> Result<(f64, f64, f64)> {
    let m = config.params.order;
    match receiver {
        ReceiverKind::DirectDetection => {
            let out = crate::dd_ppm_outcomes(m, config.params.n_p, &config.detector)?;
            Ok((out.error_probability(), out.erasure_probability(), out.hard_error_probability()))
        }
        ReceiverKind::ConditionalNulling => {
            let probs = SlotProbs::new(
                config.params.n_p,
                config.params.strategy.n_null(config.params.n_p),
                &config.detector,
                &config.mismatch,
            )?;
            let mut err = 0.0;
            let mut eras = 0.0;
            for w in 1..=m {
                let d = cpn_distribution(m, w, &probs);
                err += d.error_probability();
                eras += d.erasure_probability();
            }
            err /= m as f64;
            eras /= m as f64;
            Ok((err, eras, err + eras * (m as f64 - 1.0) / m as f64))
        }
    }
}
