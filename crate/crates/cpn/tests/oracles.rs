//! Independent cross-checks: every closed form or enumeration in the crate
//! is compared against an oracle built by a different method (sampling,
//! eigendecomposition, or a combinatorial identity).

use cpn::{
    binary_helstrom, click_probability, cpn_error, dd_ppm_outcomes, gk_error, gk_optimize,
    ppm_helstrom, CoherentAmplitude, DecisionRule, DetectorModel, MismatchModel, NullingStrategy,
};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

#[test]
fn click_probability_against_poisson_sampling() {
    let det = DetectorModel::new(0.8, 0.004, 0.013, 0.001).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let trials = 400_000u64;
    for (mean, np_inc, nn_inc) in [(0.0, 1.25, 0.0), (0.7, 0.7, 0.0), (1.3, 1.25, 1.6)] {
        let p_bg = det.background_probability(np_inc, nn_inc);
        let mut clicks = 0u64;
        for _ in 0..trials {
            let photons = if mean > 0.0 {
                Poisson::new(det.eta * mean).unwrap().sample(&mut rng) as u64
            } else {
                0
            };
            let bg = rng.gen::<f64>() < p_bg;
            if photons > 0 || bg {
                clicks += 1;
            }
        }
        let p_hat = clicks as f64 / trials as f64;
        let p = click_probability(mean, &det, np_inc, nn_inc).unwrap();
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (p_hat - p).abs() < 4.0 * sigma,
            "mean {mean}: sampled {p_hat} vs model {p}"
        );
    }
}

/// Square-root-measurement success probability from the Gram matrix
/// spectrum: `P_succ = (sum_i sqrt(lambda_i))^2 / M^2`.
fn srm_error_from_gram(m: usize, n_p: f64) -> f64 {
    let s = (-n_p).exp();
    let gram = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { s });
    let eig = gram.symmetric_eigen();
    let sum_sqrt: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    1.0 - (sum_sqrt / m as f64).powi(2)
}

#[test]
fn ppm_helstrom_against_gram_spectrum() {
    for m in [2usize, 3, 4, 7, 12] {
        for i in 0..15 {
            let n_p = 0.05 + i as f64 * 0.4;
            let closed = ppm_helstrom(m, n_p).unwrap();
            let spectral = srm_error_from_gram(m, n_p);
            assert!(
                (closed - spectral).abs() < 1e-10,
                "M = {m}, N_p = {n_p}: {closed} vs {spectral}"
            );
        }
    }
}

/// Helstrom bound from the trace norm of `(rho_1 - rho_0)/2`, evaluated in
/// an orthonormal basis for the span of the two states.
fn helstrom_from_trace_norm(alpha: CoherentAmplitude) -> f64 {
    let s = cpn::coherent_overlap(CoherentAmplitude::new(0.0), alpha);
    // basis: |0>, (|alpha> - s|0>) / sqrt(1 - s^2)
    let c = (1.0 - s * s).sqrt();
    if c == 0.0 {
        return 0.5;
    }
    // rho_0 = |0><0|, rho_1 = |alpha><alpha| with |alpha> = (s, c)
    let d = DMatrix::from_row_slice(2, 2, &[s * s - 1.0, s * c, s * c, c * c]) * 0.5;
    let trace_norm: f64 = d.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum();
    0.5 * (1.0 - trace_norm)
}

#[test]
fn binary_helstrom_against_trace_norm() {
    for a in [0.0, 0.1, 0.2, 0.5, 1.0, 2.0] {
        let alpha = CoherentAmplitude::new(a);
        let closed = binary_helstrom(alpha);
        let spectral = helstrom_from_trace_norm(alpha);
        assert!(
            (closed - spectral).abs() < 1e-12,
            "alpha {a}: {closed} vs {spectral}"
        );
    }
}

/// Direct-detection outcome probabilities by conditioning on the number of
/// clicking empty slots, instead of enumerating click patterns.
fn dd_oracle(m: usize, q_pulse: f64, q_empty: f64) -> (f64, f64) {
    let e = m - 1;
    let mut correct = 0.0;
    // pulse slot clicks alongside k clicking empties: decided correctly
    // with probability 1/(k+1)
    for k in 0..=e {
        let choose: f64 = (0..k).map(|i| (e - i) as f64 / (i + 1) as f64).product();
        let p_k = choose * (1.0 - q_empty).powi(k as i32) * q_empty.powi((e - k) as i32);
        correct += (1.0 - q_pulse) * p_k / (k + 1) as f64;
    }
    let erasure = q_pulse * q_empty.powi(e as i32);
    (1.0 - correct - erasure, erasure)
}

#[test]
fn dd_outcomes_against_conditioning_oracle() {
    let det = DetectorModel::calibrated();
    for m in [2usize, 4, 8, 12] {
        for n_p in [0.1, 0.64, 1.25, 3.0] {
            let out = dd_ppm_outcomes(m, n_p, &det).unwrap();
            let q_pulse = 1.0 - click_probability(n_p, &det, n_p, 0.0).unwrap();
            let q_empty = 1.0 - click_probability(0.0, &det, n_p, 0.0).unwrap();
            let (err, eras) = dd_oracle(m, q_pulse, q_empty);
            assert!((out.error_probability() - err).abs() < 1e-12);
            assert!((out.erasure_probability() - eras).abs() < 1e-12);
        }
    }
}

/// CPN receiver as a plain recursion on the remaining hypothesis list,
/// written independently of the library's stage/suffix enumeration.
fn cpn_recursive_oracle(
    m: usize,
    true_word: usize,
    q_null_pulse: f64,
    q_null_empty: f64,
    q_dd_pulse: f64,
    q_dd_empty: f64,
) -> (f64, f64) {
    fn go(
        stage: usize,
        m: usize,
        true_word: usize,
        qs: (f64, f64, f64, f64),
        weight: f64,
        err: &mut f64,
        eras: &mut f64,
    ) {
        if weight == 0.0 {
            return;
        }
        if stage > m {
            *eras += weight;
            return;
        }
        let (qnp, qne, qdp, qde) = qs;
        let q_null = if stage == true_word { qnp } else { qne };
        // click at the nulled slot: hypothesis rejected, next stage
        go(stage + 1, m, true_word, qs, weight * (1.0 - q_null), err, eras);
        // no click: direct-detect the suffix slot by slot
        let mut patterns: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), weight * q_null)];
        for slot in stage + 1..=m {
            let q = if slot == true_word { qdp } else { qde };
            let mut next = Vec::new();
            for (clicked, w) in patterns {
                next.push((clicked.clone(), w * q));
                let mut with = clicked;
                with.push(slot);
                next.push((with, w * (1.0 - q)));
            }
            patterns = next;
        }
        for (clicked, w) in patterns {
            if clicked.is_empty() {
                if stage != true_word {
                    *err += w;
                }
            } else {
                let wrong = clicked.iter().filter(|&&s| s != true_word).count();
                *err += w * wrong as f64 / clicked.len() as f64;
            }
        }
    }
    let mut err = 0.0;
    let mut eras = 0.0;
    go(
        1,
        m,
        true_word,
        (q_null_pulse, q_null_empty, q_dd_pulse, q_dd_empty),
        1.0,
        &mut err,
        &mut eras,
    );
    (err, eras)
}

#[test]
fn cpn_enumeration_against_recursive_oracle() {
    let det = DetectorModel::calibrated();
    for (m, n_p, n_null, delta) in [
        (2usize, 0.5, 0.5, 0.0),
        (4, 1.25, 1.25, 0.05),
        (4, 1.25, 1.6, 0.05),
        (4, 0.64, 1.2, 0.03),
        (8, 2.0, 1.0, 0.1),
    ] {
        let mm = MismatchModel::from_total(delta).unwrap();
        let strategy = NullingStrategy::fixed(n_null).unwrap();
        let rates = cpn_error(m, n_p, &strategy, &det, &mm).unwrap();

        let mean_pulse = cpn::effective_mean_photons(true, n_p, n_null, &mm).unwrap();
        let qnp = 1.0 - click_probability(mean_pulse, &det, n_p, n_null).unwrap();
        let qne = 1.0 - click_probability(n_null, &det, n_p, n_null).unwrap();
        let qdp = 1.0 - click_probability(n_p, &det, n_p, 0.0).unwrap();
        let qde = 1.0 - click_probability(0.0, &det, n_p, 0.0).unwrap();

        let mut err = 0.0;
        let mut eras = 0.0;
        for w in 1..=m {
            let (e, r) = cpn_recursive_oracle(m, w, qnp, qne, qdp, qde);
            err += e;
            eras += r;
        }
        err /= m as f64;
        eras /= m as f64;
        assert!(
            (rates.error - err).abs() < 1e-12 && (rates.erasure - eras).abs() < 1e-12,
            "M = {m}, N_p = {n_p}, N_null = {n_null}: ({}, {}) vs oracle ({err}, {eras})",
            rates.error,
            rates.erasure
        );
    }
}

#[test]
fn gk_optimum_against_fine_brute_force() {
    for a in [0.2, 0.5, 1.0, 1.7] {
        let alpha = CoherentAmplitude::new(a);
        let opt = gk_optimize(alpha);
        let mut brute = f64::INFINITY;
        for rule in [DecisionRule::ClickMeansZero, DecisionRule::ClickMeansAlpha] {
            let mut b = -(a + 3.0);
            while b <= a + 3.0 {
                brute = brute.min(gk_error(alpha, b, rule));
                b += 1e-4;
            }
        }
        assert!(
            opt.error <= brute + 1e-9,
            "alpha {a}: optimizer {} vs brute {brute}",
            opt.error
        );
    }
}
