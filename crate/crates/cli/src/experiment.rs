//! Experiment orchestration: data acquisition, model training, per-level
//! tuning and scoring, and report emission for the three forecasters.

use std::fs;
use std::path::{Path, PathBuf};

use picast::baselines::{
    ar_intervals, fit_ar, initial_state, kalman_fit, kalman_step, ArModel,
};
use picast::elm::{predict, train, ElmModel};
use picast::metrics::{
    evaluate, outside_stats, IntervalForecast, ObjectiveWeights, PiConfig, SharpnessWeights,
};
use picast::pso;
use picast::series::{load_csv, make_supervised, split, synthesize, TimeSeries};

use crate::config::{DataSource, ExperimentConfig};
use crate::error::CliError;
use crate::report::{
    pinc_label, write_bounds_csv, write_outside_tsv, write_report, ReportRow,
};

/// Everything a `run` leaves behind, for printing and for tests.
#[derive(Debug)]
pub struct RunOutput {
    pub rows: Vec<ReportRow>,
    pub files: Vec<PathBuf>,
}

/// Loads or synthesizes the input series per the config's data source.
pub fn obtain_series(config: &ExperimentConfig) -> Result<TimeSeries, CliError> {
    match &config.data {
        DataSource::Csv { path } => {
            load_csv(path).map_err(|e| CliError::stage("data loading", e))
        }
        DataSource::Synth { days, profile } => synthesize(*days, config.synth_seed(), profile)
            .map_err(|e| CliError::stage("data synthesis", e)),
    }
}

/// Forecast bounds from the two network outputs on the test features.
fn network_forecast(
    model: &ElmModel,
    test: &picast::series::SupervisedSet,
    pi: PiConfig,
) -> Result<IntervalForecast, CliError> {
    let bounds = predict(model, test.features()).map_err(|e| CliError::stage("forecasting", e))?;
    IntervalForecast::from_bounds(&bounds, test.targets(), pi)
        .map_err(|e| CliError::stage("forecasting", e))
}

/// Rolling one-step autoregressive intervals over the last `steps` points.
fn ar_forecast(
    model: &ArModel,
    history: &[f64],
    steps: usize,
    pi: PiConfig,
) -> Result<IntervalForecast, CliError> {
    let bounds = ar_intervals(model, history, steps, pi.alpha)
        .map_err(|e| CliError::stage("ar forecasting", e))?;
    IntervalForecast::from_bounds(&bounds, &history[history.len() - steps..], pi)
        .map_err(|e| CliError::stage("ar forecasting", e))
}

/// One-step-ahead filter intervals: warm the filter through the training
/// values (the first seeds the prior), then step across the test values,
/// emitting each interval before its observation updates the state.
fn kalman_forecast(
    train: &[f64],
    test: &[f64],
    noise: (f64, f64),
    pi: PiConfig,
) -> Result<IntervalForecast, CliError> {
    let (v, w) = noise;
    let mut state =
        initial_state(train, v, w).map_err(|e| CliError::stage("kalman forecasting", e))?;
    for &y in &train[1..] {
        let (_, next) =
            kalman_step(&state, y, pi.alpha).map_err(|e| CliError::stage("kalman forecasting", e))?;
        state = next;
    }
    let mut bounds = Vec::with_capacity(test.len());
    for &y in test {
        let (interval, next) =
            kalman_step(&state, y, pi.alpha).map_err(|e| CliError::stage("kalman forecasting", e))?;
        bounds.push(interval);
        state = next;
    }
    IntervalForecast::from_bounds(&bounds, test, pi)
        .map_err(|e| CliError::stage("kalman forecasting", e))
}

/// Runs the full protocol and writes the report plus per-level trace files
/// into `out_dir`. Report rows come out in a fixed order: levels as listed
/// in the config, and within each level the tuned network, then the
/// autoregressive baseline, then the filter baseline.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<RunOutput, CliError> {
    config.validate()?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", out_dir.display())))?;

    let series = obtain_series(config)?;
    let dataset = make_supervised(&series, &config.window, &config.band)
        .map_err(|e| CliError::stage("windowing", e))?;
    let (train_set, test_set) =
        split(&dataset, &config.split).map_err(|e| CliError::stage("splitting", e))?;

    let model = train(&train_set, &config.elm_config())
        .map_err(|e| CliError::stage("network training", e))?;

    // The first `train_len` window samples consume exactly this raw prefix;
    // the baselines train on the same information as the network.
    let train_raw_len = config.split.train_len + config.window.lag_n + config.window.horizon - 1;
    let values = series.values();
    let baseline_history = &values[..train_raw_len + config.split.test_len];
    let ar_model = fit_ar(&values[..train_raw_len], config.baselines.ar_max_order)
        .map_err(|e| CliError::stage("ar fitting", e))?;
    let kalman_noise = kalman_fit(&values[..train_raw_len], &config.baselines.kalman_grid)
        .map_err(|e| CliError::stage("kalman fitting", e))?;

    let ow: ObjectiveWeights = config.objective_weights;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let write_bounds = |files: &mut Vec<PathBuf>,
                            name: String,
                            forecast: &IntervalForecast|
     -> Result<(), CliError> {
        let path = out_dir.join(name);
        write_bounds_csv(&path, forecast)?;
        files.push(path);
        Ok(())
    };

    for &pinc in &config.pinc_levels {
        let label = pinc_label(pinc);
        let pi = PiConfig::from_pinc(pinc).map_err(|e| CliError::stage("level setup", e))?;
        let weights: SharpnessWeights = config
            .weights_for(pinc)
            .ok_or_else(|| CliError::config(format!("no sharpness_weights for pinc {pinc}")))?;

        let (tuned, swarm) = pso::run(&train_set, &model, &config.swarm_config(), pi, &weights, &ow)
            .map_err(|e| CliError::stage("swarm tuning", e))?;
        let forecast = network_forecast(&tuned, &test_set, pi)?;
        let evaluation =
            evaluate(&forecast, &weights, &ow).map_err(|e| CliError::stage("evaluation", e))?;

        write_bounds(&mut files, format!("bounds_pso_elm_{label}.csv"), &forecast)?;
        let history_path = out_dir.join(format!("pso_history_{label}.csv"));
        fs::write(&history_path, swarm.history_csv())
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", history_path.display())))?;
        files.push(history_path);
        let outside_path = out_dir.join(format!("outside_{label}.tsv"));
        write_outside_tsv(&outside_path, &outside_stats(&forecast))?;
        files.push(outside_path);
        rows.push(ReportRow {
            model: "pso_elm".into(),
            pinc,
            evaluation,
        });

        let ar_fc = ar_forecast(&ar_model, baseline_history, config.split.test_len, pi)?;
        let ar_eval =
            evaluate(&ar_fc, &weights, &ow).map_err(|e| CliError::stage("evaluation", e))?;
        write_bounds(&mut files, format!("bounds_ar_{label}.csv"), &ar_fc)?;
        rows.push(ReportRow {
            model: "ar".into(),
            pinc,
            evaluation: ar_eval,
        });

        let k_fc = kalman_forecast(
            &values[..train_raw_len],
            &baseline_history[train_raw_len..],
            kalman_noise,
            pi,
        )?;
        let k_eval =
            evaluate(&k_fc, &weights, &ow).map_err(|e| CliError::stage("evaluation", e))?;
        write_bounds(&mut files, format!("bounds_kalman_{label}.csv"), &k_fc)?;
        rows.push(ReportRow {
            model: "kalman".into(),
            pinc,
            evaluation: k_eval,
        });
    }

    let report_path = out_dir.join("report.tsv");
    write_report(&report_path, &rows)?;
    files.push(report_path);
    Ok(RunOutput { rows, files })
}
