//! Reed-Solomon errors-and-erasures outer-code planning over the PPM
//! errors-and-erasures channel.
//!
//! An `(n, k)` Reed-Solomon code with minimum distance `d = n - k + 1`
//! decodes any pattern of `t` symbol errors and `e` erasures with
//! `2 t + e < d`; block decoding fails exactly when `2 t + e >= d`. The
//! block failure probability is the trinomial tail over the i.i.d. symbol
//! channel, evaluated in the log domain.

use statrs::function::gamma::ln_gamma;

use crate::{ensure, Result};

/// Errors-and-erasures Reed-Solomon code parameters. The MDS property is
/// assumed; symbol alphabet size is not modeled beyond the PPM order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsCode {
    n: u64,
    k: u64,
}

impl RsCode {
    pub fn new(n: u64, k: u64) -> Result<Self> {
        ensure(n >= 2, || format!("block length must be >= 2, got {n}"))?;
        ensure(k >= 1 && k < n, || {
            format!("message length must satisfy 1 <= k < n, got k = {k}, n = {n}")
        })?;
        Ok(RsCode { n, k })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Minimum distance `n - k + 1`.
    pub fn distance(&self) -> u64 {
        self.n - self.k + 1
    }
}

/// Symbol-level channel seen by the outer code: each PPM frame is decoded
/// to a wrong word with probability `p_err`, erased with probability
/// `p_eras`, and correct otherwise, independently across frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    pub order: usize,
    pub p_err: f64,
    pub p_eras: f64,
}

impl ChannelStats {
    pub fn new(order: usize, p_err: f64, p_eras: f64) -> Result<Self> {
        ensure(order >= 2, || format!("PPM order must be >= 2, got {order}"))?;
        for (name, v) in [("p_err", p_err), ("p_eras", p_eras)] {
            ensure((0.0..=1.0).contains(&v), || {
                format!("{name} must be a probability in [0, 1], got {v}")
            })?;
        }
        ensure(p_err + p_eras <= 1.0 + 1e-12, || {
            format!("p_err + p_eras must not exceed 1, got {}", p_err + p_eras)
        })?;
        Ok(ChannelStats { order, p_err, p_eras })
    }

    pub fn p_correct(&self) -> f64 {
        (1.0 - self.p_err - self.p_eras).max(0.0)
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

// k * ln(p) with the convention 0 * ln(0) = 0, so zero-probability outcomes
// with zero multiplicity do not poison the sum with NaN
fn xlny(k: u64, ln_p: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln_p
    }
}

/// Natural log of the block failure probability; `f64::NEG_INFINITY` when
/// failure is impossible (error-free channel with `d > n` erasures needed).
///
/// Computed as `ln sum_{2t + e >= d} C(n; t, e) p_err^t p_eras^e
/// p_c^(n-t-e)` with a streaming log-sum-exp. The inner sum over `t` for
/// each erasure count `e` starts at the failure boundary and stops once the
/// terms fall far below the running peak, so the cost stays near-linear in
/// `n` for channels that are not failure-dominated.
pub fn rs_block_error_ln(code: &RsCode, stats: &ChannelStats) -> f64 {
    let n = code.n;
    let d = code.distance();
    let (p_t, p_e, p_c) = (stats.p_err, stats.p_eras, stats.p_correct());
    let (ln_t, ln_e, ln_c) = (p_t.ln(), p_e.ln(), p_c.ln());

    // streaming log-sum-exp accumulator
    let mut max_ln = f64::NEG_INFINITY;
    let mut sum = 0.0f64;
    let mut add = |ln_term: f64| {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term > max_ln {
            sum = sum * (max_ln - ln_term).exp() + 1.0;
            max_ln = ln_term;
        } else {
            sum += (ln_term - max_ln).exp();
        }
    };

    for e in 0..=n {
        if p_e == 0.0 && e > 0 {
            break;
        }
        let t_min = if e >= d { 0 } else { (d - e).div_ceil(2) };
        if t_min > n - e {
            continue;
        }
        let ln_e_part = ln_choose(n, e) + xlny(e, ln_e);
        if p_t == 0.0 {
            if t_min == 0 {
                add(ln_e_part + xlny(n - e, ln_c));
            }
            continue;
        }
        let mut peak = f64::NEG_INFINITY;
        let mut prev = f64::NEG_INFINITY;
        for t in t_min..=(n - e) {
            let ln_term = ln_e_part
                + ln_choose(n - e, t)
                + xlny(t, ln_t)
                + xlny(n - e - t, ln_c);
            add(ln_term);
            if ln_term > peak {
                peak = ln_term;
            }
            // terms are unimodal in t; stop once they are negligible
            if ln_term < prev && ln_term < peak - 50.0 {
                break;
            }
            prev = ln_term;
        }
    }

    if sum == 0.0 {
        f64::NEG_INFINITY
    } else {
        max_ln + sum.ln()
    }
}

/// Block failure probability of the outer code: the probability that a
/// received block has `2 t + e >= d`.
pub fn rs_block_error(code: &RsCode, stats: &ChannelStats) -> f64 {
    rs_block_error_ln(code, stats).exp().min(1.0)
}

/// Outcome of the minimum-block-length search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinBlockLength {
    Found(u64),
    /// No block length up to `n_max_tried` achieves the target; the channel
    /// cannot support the requested rate.
    Infeasible { n_max_tried: u64 },
}

const N_SEARCH_MAX: u64 = 10_000_000;

fn code_at_rate(n: u64, rate: f64) -> Result<RsCode> {
    let k = ((rate * n as f64).round() as u64).clamp(1, n - 1);
    RsCode::new(n, k)
}

/// Smallest block length `n` such that the rate-`rate` Reed-Solomon code
/// (`k = round(rate * n)`, clamped to `[1, n - 1]`) achieves block failure
/// probability at most `target`.
///
/// Rates at or above the channel's achievable information rate are reported
/// [`MinBlockLength::Infeasible`] immediately; otherwise the search doubles
/// `n` until the target is met (up to 10^7), bisects, and scans the nearby
/// lengths to absorb the rounding of `k`.
pub fn min_block_length(stats: &ChannelStats, rate: f64, target: f64) -> Result<MinBlockLength> {
    ensure(rate > 0.0 && rate < 1.0, || {
        format!("code rate must be in (0, 1), got {rate}")
    })?;
    ensure(target > 0.0 && target < 1.0, || {
        format!("target block error must be in (0, 1), got {target}")
    })?;

    // A rate at or above capacity can never be driven to arbitrarily small
    // failure probability; treat the near-capacity region as infeasible
    // rather than searching to the cap.
    if rate >= shannon_rate(stats) - 1e-12 {
        return Ok(MinBlockLength::Infeasible { n_max_tried: N_SEARCH_MAX });
    }

    let ln_target = target.ln();
    let meets = |n: u64| -> Result<bool> {
        Ok(rs_block_error_ln(&code_at_rate(n, rate)?, stats) <= ln_target)
    };

    // exponential search for a feasible length
    let mut hi = 2u64;
    loop {
        if meets(hi)? {
            break;
        }
        if hi >= N_SEARCH_MAX {
            return Ok(MinBlockLength::Infeasible { n_max_tried: N_SEARCH_MAX });
        }
        hi = (hi * 2).min(N_SEARCH_MAX);
    }

    let mut lo = hi / 2; // lo failed (or is 1, below the minimum length)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // k = round(rate * n) makes feasibility non-monotone over a few
    // neighboring lengths; scan a small window below the bisection answer
    let mut best = hi;
    let low = best.saturating_sub(8).max(2);
    for n in low..best {
        if meets(n)? {
            best = n;
            break;
        }
    }
    Ok(MinBlockLength::Found(best))
}

/// Achievable information rate of the symbol channel, in code-rate units:
/// mutual information of the M-input errors-and-erasures channel divided by
/// `log2 M`. For an error-free channel this is exactly `1 - p_eras`.
pub fn shannon_rate(stats: &ChannelStats) -> f64 {
    let m = stats.order as f64;
    let (p_t, p_e, p_c) = (stats.p_err, stats.p_eras, stats.p_correct());
    if p_t == 0.0 {
        return p_c;
    }
    if p_c == 0.0 && p_t > 0.0 {
        // wrong decisions are uniform over the other M-1 words; with no
        // correct path the output still leaks which word was *not* sent
        let leak = (m / (m - 1.0)).log2();
        return (p_t * leak / m.log2()).max(0.0);
    }
    // Input X uniform over M words; output Y is the decided word or the
    // erasure flag. Wrong decisions land uniformly on the other M-1 words.
    // I(X;Y) = H(Y) - H(Y|X); the erasure term cancels.
    let p_wrong_each = p_t / (m - 1.0);
    // H(Y|X): entropy of {p_c, p_e, p_t split over M-1 words}
    let mut h_y_given_x = 0.0;
    for p in [p_c, p_e] {
        if p > 0.0 {
            h_y_given_x -= p * p.log2();
        }
    }
    if p_wrong_each > 0.0 {
        h_y_given_x -= p_t * p_wrong_each.log2();
    }
    // H(Y): each word is decided with probability (p_c + p_t)/M
    let p_word = (p_c + p_t) / m;
    let mut h_y = 0.0;
    if p_word > 0.0 {
        h_y -= (p_c + p_t) * p_word.log2();
    }
    if p_e > 0.0 {
        h_y -= p_e * p_e.log2();
    }
    ((h_y - h_y_given_x) / m.log2()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn code_parameters() {
        let c = RsCode::new(255, 191).unwrap();
        assert_eq!(c.distance(), 65);
        assert_abs_diff_eq!(c.rate(), 191.0 / 255.0, epsilon = 1e-15);
        assert!(RsCode::new(10, 10).is_err());
        assert!(RsCode::new(10, 0).is_err());
        assert!(RsCode::new(1, 1).is_err());
    }

    #[test]
    fn perfect_channel_never_fails() {
        let stats = ChannelStats::new(4, 0.0, 0.0).unwrap();
        let c = RsCode::new(16, 8).unwrap();
        assert_eq!(rs_block_error(&c, &stats), 0.0);
        assert_eq!(rs_block_error_ln(&c, &stats), f64::NEG_INFINITY);
    }

    #[test]
    fn erasure_only_channel_is_binomial_tail() {
        // failure iff at least d erasures
        let stats = ChannelStats::new(4, 0.0, 0.1).unwrap();
        let c = RsCode::new(10, 8).unwrap(); // d = 3
        let p = rs_block_error(&c, &stats);
        let mut expected = 0.0;
        for e in 3u64..=10 {
            let choose: f64 = (0..e).map(|i| (10 - i) as f64 / (i + 1) as f64).product();
            expected += choose * 0.1f64.powi(e as i32) * 0.9f64.powi((10 - e) as i32);
        }
        assert_abs_diff_eq!(p, expected, epsilon = 1e-12);
    }

    #[test]
    fn error_only_small_code_by_hand() {
        // n = 4, k = 2, d = 3: failure iff t >= 2
        let stats = ChannelStats::new(4, 0.2, 0.0).unwrap();
        let c = RsCode::new(4, 2).unwrap();
        let p = rs_block_error(&c, &stats);
        let q: f64 = 0.8;
        let expected = 6.0 * 0.04 * q * q + 4.0 * 0.008 * q + 0.0016;
        assert_abs_diff_eq!(p, expected, epsilon = 1e-12);
    }

    #[test]
    fn mixed_channel_small_code_by_hand() {
        // n = 3, k = 1, d = 3: failure iff 2t + e >= 3
        let stats = ChannelStats::new(4, 0.1, 0.2).unwrap();
        let c = RsCode::new(3, 1).unwrap();
        let (pt, pe, pc) = (0.1, 0.2, 0.7);
        // success: (t, e) in {(0,0), (0,1), (0,2), (1,0)}
        let success = pc * pc * pc
            + 3.0 * pe * pc * pc
            + 3.0 * pe * pe * pc
            + 3.0 * pt * pc * pc;
        assert_abs_diff_eq!(rs_block_error(&c, &stats), 1.0 - success, epsilon = 1e-12);
    }

    #[test]
    fn hopeless_channel_always_fails() {
        let stats = ChannelStats::new(4, 1.0, 0.0).unwrap();
        let c = RsCode::new(8, 4).unwrap();
        assert_abs_diff_eq!(rs_block_error(&c, &stats), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn block_error_decreases_with_distance() {
        let stats = ChannelStats::new(4, 0.05, 0.1).unwrap();
        let mut prev = 1.1;
        for k in [56, 48, 40, 32, 24] {
            let p = rs_block_error(&RsCode::new(64, k).unwrap(), &stats);
            assert!(p < prev, "k = {k}: {p} >= {prev}");
            prev = p;
        }
    }

    #[test]
    fn min_block_length_erasure_only() {
        let stats = ChannelStats::new(4, 0.0, 0.1).unwrap();
        match min_block_length(&stats, 0.5, 1e-6).unwrap() {
            MinBlockLength::Found(n) => {
                assert!(meets_target(n, &stats, 0.5, 1e-6));
                if n > 2 {
                    assert!(!meets_target(n - 1, &stats, 0.5, 1e-6), "n = {n} not minimal");
                }
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    fn meets_target(n: u64, stats: &ChannelStats, rate: f64, target: f64) -> bool {
        rs_block_error_ln(&code_at_rate(n, rate).unwrap(), stats) <= target.ln()
    }

    #[test]
    fn min_block_length_brute_force_agreement() {
        let stats = ChannelStats::new(4, 0.02, 0.15).unwrap();
        let (rate, target) = (0.6, 1e-4);
        let brute = (2u64..5000)
            .find(|&n| meets_target(n, &stats, rate, target))
            .expect("brute force found a length");
        match min_block_length(&stats, rate, target).unwrap() {
            MinBlockLength::Found(n) => assert_eq!(n, brute),
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn above_capacity_is_infeasible() {
        let stats = ChannelStats::new(4, 0.0, 0.3).unwrap();
        assert_abs_diff_eq!(shannon_rate(&stats), 0.7, epsilon = 1e-15);
        match min_block_length(&stats, 0.75, 1e-3).unwrap() {
            MinBlockLength::Infeasible { .. } => {}
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn shannon_rate_limits() {
        let perfect = ChannelStats::new(4, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(shannon_rate(&perfect), 1.0, epsilon = 1e-15);
        let useless = ChannelStats::new(4, 0.75, 0.0).unwrap();
        // uniform output independent of input
        assert_abs_diff_eq!(shannon_rate(&useless), 0.0, epsilon = 1e-12);
        let erased = ChannelStats::new(4, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(shannon_rate(&erased), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn shannon_rate_monotone_in_degradation() {
        let mut prev = f64::INFINITY;
        for p in [0.0, 0.05, 0.1, 0.2, 0.4] {
            let r = shannon_rate(&ChannelStats::new(4, p, 0.1).unwrap());
            assert!(r < prev || p == 0.0);
            prev = r;
        }
    }

    #[test]
    fn rejects_bad_channel_and_search_args() {
        assert!(ChannelStats::new(4, 0.6, 0.6).is_err());
        assert!(ChannelStats::new(4, -0.1, 0.0).is_err());
        assert!(ChannelStats::new(1, 0.1, 0.0).is_err());
        let stats = ChannelStats::new(4, 0.01, 0.1).unwrap();
        assert!(min_block_length(&stats, 0.0, 1e-3).is_err());
        assert!(min_block_length(&stats, 1.0, 1e-3).is_err());
        assert!(min_block_length(&stats, 0.5, 0.0).is_err());
    }
}
