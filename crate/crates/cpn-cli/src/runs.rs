//! Implementations of the subcommands.

use cpn::montecarlo::{estimate_rates, exact_rates, PulseParams, ReceiverKind, TrialConfig};
use cpn::outer_code::{
    min_block_length, rs_block_error_ln, shannon_rate, ChannelStats, MinBlockLength, RsCode,
};
use cpn::{
    binary_helstrom, cpn_error, cpn_optimize_null, dd_ppm_error, gk_error, gk_optimize,
    ppm_helstrom, CoherentAmplitude, DecisionRule, DetectorModel, MismatchModel, NullingStrategy,
};

use crate::output::{Table, Value};
use crate::{
    emit, provenance, Cli, Command, Figure, ModelArgs, NpAxis, OutputArgs, RunError, StatsPreset,
};

impl ModelArgs {
    /// Resolved detector and mismatch models. With the detector-plane axis
    /// (the demonstration's convention) photon numbers already include the
    /// efficiency, so the detector model runs at unit efficiency.
    fn build(&self) -> Result<(DetectorModel, MismatchModel), RunError> {
        let eta = match self.np_axis {
            NpAxis::Detector => 1.0,
            NpAxis::Source => self.eta,
        };
        let det = DetectorModel::new(eta, self.c_sig, self.c_null, self.c_dark)?;
        let mm = MismatchModel::new(self.delta_m, self.theta)?;
        Ok((det, mm))
    }
}

fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, RunError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(RunError::Config(format!(
            "invalid grid: start {start}, stop {stop}, step {step}"
        )));
    }
    let n = ((stop - start) / step).round() as u64;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

struct Schema {
    columns: Vec<&'static str>,
    descriptions: Vec<&'static str>,
}

fn schema_for(cmd: &Command) -> Schema {
    let (columns, descriptions): (Vec<&'static str>, Vec<&'static str>) = match cmd {
        Command::Binary { .. } => (
            vec!["alpha", "dd", "gk", "gk_beta", "helstrom"],
            vec![
                "coherent amplitude of the on hypothesis",
                "direct-detection (photon counting) error probability",
                "Generalized Kennedy error at the optimal displacement",
                "optimal displacement amplitude",
                "Helstrom minimum error probability",
            ],
        ),
        Command::Helstrom { .. } => (
            vec!["order", "np", "helstrom"],
            vec![
                "PPM order M",
                "pulse mean photon number",
                "square-root-measurement word error probability",
            ],
        ),
        Command::SweepNp { .. } => (
            vec![
                "np",
                "dd",
                "cpn_exact_err",
                "cpn_exact_eras",
                "cpn_exact_hard",
                "cpn_opt_null",
                "cpn_opt_err",
                "cpn_opt_eras",
                "cpn_opt_hard",
                "helstrom",
            ],
            vec![
                "pulse mean photon number",
                "direct-detection word error (erasures guessed)",
                "exact-nulling CPN wrong-decision probability",
                "exact-nulling CPN erasure probability",
                "exact-nulling CPN error with erasures guessed",
                "optimal nulling photon number",
                "optimal-nulling CPN wrong-decision probability",
                "optimal-nulling CPN erasure probability",
                "optimal-nulling CPN error with erasures guessed",
                "square-root-measurement limit",
            ],
        ),
        Command::SweepNull { .. } => (
            vec!["nnull", "err", "eras", "hard"],
            vec![
                "nulling mean photon number",
                "CPN wrong-decision probability",
                "CPN erasure probability",
                "CPN error with erasures guessed",
            ],
        ),
        Command::Montecarlo { .. } => (
            vec![
                "receiver",
                "frames",
                "p_err",
                "err_lo",
                "err_hi",
                "p_eras",
                "eras_lo",
                "eras_hi",
                "p_hard",
                "hard_lo",
                "hard_hi",
                "model_err",
                "model_eras",
                "model_hard",
            ],
            vec![
                "dd or cpn",
                "total simulated frames",
                "simulated wrong-decision rate",
                "95% interval low edge",
                "95% interval high edge",
                "simulated erasure rate",
                "95% interval low edge",
                "95% interval high edge",
                "simulated rate with erasures guessed",
                "95% interval low edge",
                "95% interval high edge",
                "exact model wrong-decision probability",
                "exact model erasure probability",
                "exact model error with erasures guessed",
            ],
        ),
        Command::OuterCode { .. } => (
            vec![
                "stats", "order", "p_err", "p_eras", "shannon_rate", "rate", "target", "n_min",
                "block_error",
            ],
            vec![
                "channel statistics label",
                "PPM order M",
                "per-frame wrong-decision probability",
                "per-frame erasure probability",
                "achievable code rate of the channel",
                "requested Reed-Solomon code rate",
                "target block failure probability",
                "minimum block length, or `infeasible`",
                "block failure probability at n_min",
            ],
        ),
        Command::Reproduce { figure, .. } => match figure {
            Figure::Fig1c => (
                vec!["np", "dd", "cpn_exact", "cpn_opt", "helstrom"],
                vec![
                    "pulse mean photon number (detector plane)",
                    "ideal direct-detection word error",
                    "ideal exact-nulling CPN word error",
                    "ideal optimal-nulling CPN word error",
                    "square-root-measurement limit",
                ],
            ),
            Figure::Fig3a => (
                vec![
                    "np",
                    "dd_ideal",
                    "cpn_ideal",
                    "dd_noisy",
                    "cpn_noisy_exact",
                    "cpn_noisy_opt",
                    "helstrom",
                ],
                vec![
                    "pulse mean photon number (detector plane)",
                    "ideal direct-detection word error",
                    "ideal exact-nulling CPN word error",
                    "direct detection with the fitted background",
                    "exact-nulling CPN with background and mismatch",
                    "optimal-nulling CPN with background and mismatch",
                    "square-root-measurement limit",
                ],
            ),
            Figure::Fig3b => (
                vec!["nnull", "err", "eras", "hard", "mc_err", "mc_eras", "mc_hard"],
                vec![
                    "nulling mean photon number",
                    "model CPN wrong-decision probability",
                    "model CPN erasure probability",
                    "model CPN error with erasures guessed",
                    "simulated wrong-decision rate (832 frames/word)",
                    "simulated erasure rate",
                    "simulated rate with erasures guessed",
                ],
            ),
            Figure::Fig4 => (
                vec!["stats", "p_err", "p_eras", "shannon_rate", "rate", "n_min"],
                vec![
                    "channel statistics preset",
                    "per-frame wrong-decision probability",
                    "per-frame erasure probability",
                    "achievable code rate of the channel",
                    "Reed-Solomon code rate",
                    "minimum block length for 1e-6 block failure, or `infeasible`",
                ],
            ),
        },
    };
    Schema { columns, descriptions }
}

fn print_schema(schema: &Schema) {
    for (c, d) in schema.columns.iter().zip(&schema.descriptions) {
        println!("{c}: {d}");
    }
}

fn out_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Binary { out, .. }
        | Command::Helstrom { out, .. }
        | Command::SweepNp { out, .. }
        | Command::SweepNull { out, .. }
        | Command::Montecarlo { out, .. }
        | Command::OuterCode { out, .. }
        | Command::Reproduce { out, .. } => out,
    }
}

pub fn run(cli: Cli, argv: &[String]) -> Result<(), RunError> {
    let schema = schema_for(&cli.command);
    let out = out_args(&cli.command);
    if out.schema {
        print_schema(&schema);
        return Ok(());
    }
    if let Some(workers) = out.workers {
        if workers == 0 {
            return Err(RunError::Config("--workers must be >= 1".into()));
        }
        // ignore the error if a pool already exists (tests call run twice)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let mut table = Table::new(provenance(argv), schema.columns);

    match &cli.command {
        Command::Binary { alpha, out } => {
            let a = CoherentAmplitude::new(*alpha);
            let dd = gk_error(a, 0.0, DecisionRule::ClickMeansZero);
            let gk = gk_optimize(a);
            table.push(vec![
                Value::Float(*alpha),
                Value::Float(dd),
                Value::Float(gk.error),
                Value::Float(gk.beta),
                Value::Float(binary_helstrom(a)),
            ]);
            emit(table, out)
        }
        Command::Helstrom { order, np, out } => {
            let p = ppm_helstrom(*order, *np)?;
            table.push(vec![
                Value::Int(*order as u64),
                Value::Float(*np),
                Value::Float(p),
            ]);
            emit(table, out)
        }
        Command::SweepNp { np_start, np_stop, np_step, model, out } => {
            let (det, mm) = model.build()?;
            for np in grid(*np_start, *np_stop, *np_step)? {
                let dd = dd_ppm_error(model.order, np, &det)?;
                let exact = cpn_error(model.order, np, &NullingStrategy::Exact, &det, &mm)?;
                let opt = cpn_optimize_null(model.order, np, &det, &mm)?;
                let hel = ppm_helstrom(model.order, det.eta * np)?;
                table.push(vec![
                    Value::Float(np),
                    Value::Float(dd),
                    Value::Float(exact.error),
                    Value::Float(exact.erasure),
                    Value::Float(exact.hard_error()),
                    Value::Float(opt.n_null),
                    Value::Float(opt.error),
                    Value::Float(opt.erasure),
                    Value::Float(opt.hard_error),
                    Value::Float(hel),
                ]);
            }
            emit(table, out)
        }
        Command::SweepNull { np, null_start, null_stop, null_step, model, out } => {
            let (det, mm) = model.build()?;
            for nnull in grid(*null_start, *null_stop, *null_step)? {
                let strategy = NullingStrategy::fixed(nnull)?;
                let rates = cpn_error(model.order, *np, &strategy, &det, &mm)?;
                table.push(vec![
                    Value::Float(nnull),
                    Value::Float(rates.error),
                    Value::Float(rates.erasure),
                    Value::Float(rates.hard_error()),
                ]);
            }
            emit(table, out)
        }
        Command::Montecarlo { np, null, frames, seed, model, out } => {
            let (det, mm) = model.build()?;
            let strategy = match null {
                Some(n) => NullingStrategy::fixed(*n)?,
                None => NullingStrategy::Exact,
            };
            let cfg = TrialConfig::new(
                PulseParams { order: model.order, n_p: *np, strategy },
                det,
                mm,
                *frames,
                *seed,
            )?;
            for (label, kind) in [
                ("dd", ReceiverKind::DirectDetection),
                ("cpn", ReceiverKind::ConditionalNulling),
            ] {
                let est = estimate_rates(&cfg, kind)?;
                let (m_err, m_eras, m_hard) = exact_rates(&cfg, kind)?;
                table.push(vec![
                    Value::Text(label.into()),
                    Value::Int(est.error.n_trials),
                    Value::Float(est.error.p_hat),
                    Value::Float(est.error.ci_low),
                    Value::Float(est.error.ci_high),
                    Value::Float(est.erasure.p_hat),
                    Value::Float(est.erasure.ci_low),
                    Value::Float(est.erasure.ci_high),
                    Value::Float(est.hard_error.p_hat),
                    Value::Float(est.hard_error.ci_low),
                    Value::Float(est.hard_error.ci_high),
                    Value::Float(m_err),
                    Value::Float(m_eras),
                    Value::Float(m_hard),
                ]);
            }
            emit(table, out)
        }
        Command::OuterCode { stats, p_err, p_eras, order, rate, target, out } => {
            let (label, preset) = match stats {
                Some(s) => (s.name().to_string(), Some(s.rates())),
                None => ("custom".to_string(), None),
            };
            let (pt, pe) = match (preset, p_err, p_eras) {
                (_, Some(t), Some(e)) => (*t, *e),
                (Some((t, e)), pt, pe) => (pt.unwrap_or(t), pe.unwrap_or(e)),
                _ => {
                    return Err(RunError::Config(
                        "outer-code needs --stats or both --p-err and --p-eras".into(),
                    ))
                }
            };
            let ch = ChannelStats::new(*order, pt, pe)?;
            let r_max = shannon_rate(&ch);
            let result = min_block_length(&ch, *rate, *target)?;
            let (n_cell, perr_cell) = match result {
                MinBlockLength::Found(n) => {
                    let k = ((rate * n as f64).round() as u64).clamp(1, n - 1);
                    let ln_p = rs_block_error_ln(&RsCode::new(n, k)?, &ch);
                    (Value::Text(n.to_string()), Value::LnProb(ln_p))
                }
                MinBlockLength::Infeasible { .. } => {
                    (Value::Text("infeasible".into()), Value::Text(String::new()))
                }
            };
            table.push(vec![
                Value::Text(label),
                Value::Int(*order as u64),
                Value::Float(pt),
                Value::Float(pe),
                Value::Float(r_max),
                Value::Float(*rate),
                Value::Float(*target),
                n_cell,
                perr_cell,
            ]);
            emit(table, out)?;
            if matches!(result, MinBlockLength::Infeasible { .. }) {
                return Err(RunError::Infeasible(format!(
                    "rate {rate} is not achievable (channel supports up to {r_max:.4})"
                )));
            }
            Ok(())
        }
        Command::Reproduce { figure, seed, out } => {
            reproduce(*figure, *seed, &mut table)?;
            emit(table, out)
        }
    }
}

fn reproduce(figure: Figure, seed: u64, table: &mut Table) -> Result<(), RunError> {
    let order = 4;
    let ideal_det = DetectorModel::ideal();
    let ideal_mm = MismatchModel::ideal();
    let fitted_det = DetectorModel::calibrated();
    match figure {
        Figure::Fig1c => {
            for np in grid(0.05, 6.0, 0.05)? {
                let dd = dd_ppm_error(order, np, &ideal_det)?;
                let exact =
                    cpn_error(order, np, &NullingStrategy::Exact, &ideal_det, &ideal_mm)?;
                let opt = cpn_optimize_null(order, np, &ideal_det, &ideal_mm)?;
                table.push(vec![
                    Value::Float(np),
                    Value::Float(dd),
                    Value::Float(exact.hard_error()),
                    Value::Float(opt.hard_error),
                    Value::Float(ppm_helstrom(order, np)?),
                ]);
            }
        }
        Figure::Fig3a => {
            let mm = MismatchModel::from_total(0.05)?;
            for np in grid(0.05, 4.0, 0.05)? {
                let dd_ideal = dd_ppm_error(order, np, &ideal_det)?;
                let cpn_ideal =
                    cpn_error(order, np, &NullingStrategy::Exact, &ideal_det, &ideal_mm)?;
                let dd_noisy = dd_ppm_error(order, np, &fitted_det)?;
                let cpn_exact = cpn_error(order, np, &NullingStrategy::Exact, &fitted_det, &mm)?;
                let cpn_opt = cpn_optimize_null(order, np, &fitted_det, &mm)?;
                table.push(vec![
                    Value::Float(np),
                    Value::Float(dd_ideal),
                    Value::Float(cpn_ideal.hard_error()),
                    Value::Float(dd_noisy),
                    Value::Float(cpn_exact.hard_error()),
                    Value::Float(cpn_opt.hard_error),
                    Value::Float(ppm_helstrom(order, np)?),
                ]);
            }
        }
        Figure::Fig3b => {
            let np = 0.64;
            let mm = MismatchModel::from_total(0.03)?;
            for nnull in grid(0.0, 3.0, 0.05)? {
                let strategy = NullingStrategy::fixed(nnull)?;
                let rates = cpn_error(order, np, &strategy, &fitted_det, &mm)?;
                let cfg = TrialConfig::new(
                    PulseParams { order, n_p: np, strategy },
                    fitted_det,
                    mm,
                    832,
                    seed,
                )?;
                let est = estimate_rates(&cfg, ReceiverKind::ConditionalNulling)?;
                table.push(vec![
                    Value::Float(nnull),
                    Value::Float(rates.error),
                    Value::Float(rates.erasure),
                    Value::Float(rates.hard_error()),
                    Value::Float(est.error.p_hat),
                    Value::Float(est.erasure.p_hat),
                    Value::Float(est.hard_error.p_hat),
                ]);
            }
        }
        Figure::Fig4 => {
            let target = 1e-6;
            for preset in [
                StatsPreset::IdealDd,
                StatsPreset::IdealCpn,
                StatsPreset::ExptDd,
                StatsPreset::ExptCpn,
            ] {
                let (pt, pe) = preset.rates();
                let ch = ChannelStats::new(order, pt, pe)?;
                let r_max = shannon_rate(&ch);
                for rate in grid(0.10, 0.65, 0.05)? {
                    let cell = match min_block_length(&ch, rate, target)? {
                        MinBlockLength::Found(n) => Value::Text(n.to_string()),
                        MinBlockLength::Infeasible { .. } => Value::Text("infeasible".into()),
                    };
                    table.push(vec![
                        Value::Text(preset.name().into()),
                        Value::Float(pt),
                        Value::Float(pe),
                        Value::Float(r_max),
                        Value::Float(rate),
                        cell,
                    ]);
                }
            }
        }
    }
    Ok(())
}
