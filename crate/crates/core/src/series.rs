//! Hourly series loading, synthesis, windowing, and train/test splitting.
//!
//! Data flows in as a two-column CSV (`timestamp,volume`, one row per hour
//! of the service day) or out of [`synthesize`]. [`make_supervised`] then
//! turns the flat series into lagged feature rows with one target per row,
//! plus a symmetric percentage band around each target that serves as the
//! initial lower/upper training signal. [`split`] slices the supervised set
//! chronologically.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate, NaiveDateTime, Timelike, Weekday};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Timestamp layout used by the CSV format: `YYYY-MM-DDTHH:00`.
const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";

/// First and last hour of the observed service day (inclusive).
const DAY_START_HOUR: u32 = 7;
const DAY_END_HOUR: u32 = 21;

/// Observations recorded per day: hours 7 through 21 inclusive.
pub const OBS_PER_DAY: usize = (DAY_END_HOUR - DAY_START_HOUR + 1) as usize;

// ---------------------------------------------------------------------------
// TimeSeries
// ---------------------------------------------------------------------------

/// An hourly volume series with strictly increasing timestamps.
///
/// Values are finite and non-negative; timestamps are carried for I/O and
/// inspection but never used as model features.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    timestamps: Vec<NaiveDateTime>,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, validating length agreement, timestamp order, and
    /// value range.
    pub fn new(timestamps: Vec<NaiveDateTime>, values: Vec<f64>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values", timestamps.len()),
                actual: format!("{} values", values.len()),
            });
        }
        for (i, pair) in timestamps.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                // Index + 2 converts to the 1-based CSV line the row would
                // occupy under a header.
                return Err(Error::NonMonotoneTimestamp { line: i + 2 });
            }
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite("series value"));
            }
            if v < 0.0 {
                return Err(Error::NegativeVolume { line: i + 2, value: v });
            }
        }
        Ok(TimeSeries { timestamps, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

/// Loads a `timestamp,volume` CSV.
///
/// The header must be exactly `timestamp,volume`; timestamps use the
/// `YYYY-MM-DDTHH:00` layout and must strictly increase; volumes must be
/// non-negative decimals. Errors name the offending 1-based line.
pub fn load_csv(path: &Path) -> Result<TimeSeries> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();

    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(Error::MalformedRow {
                line: 1,
                message: "missing header".into(),
            })
        }
    };
    if header.trim_end() != "timestamp,volume" {
        return Err(Error::MalformedRow {
            line: 1,
            message: format!("expected header 'timestamp,volume', got '{header}'"),
        });
    }

    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.splitn(2, ',');
        let ts_field = fields.next().unwrap_or("");
        let vol_field = match fields.next() {
            Some(f) => f,
            None => {
                return Err(Error::MalformedRow {
                    line: line_no,
                    message: "expected 2 comma-separated fields".into(),
                })
            }
        };

        let ts = NaiveDateTime::parse_from_str(ts_field, TIMESTAMP_FORMAT).map_err(|e| {
            Error::MalformedRow {
                line: line_no,
                message: format!("bad timestamp '{ts_field}': {e}"),
            }
        })?;
        if ts.minute() != 0 || ts.second() != 0 {
            return Err(Error::MalformedRow {
                line: line_no,
                message: format!("timestamp '{ts_field}' is not on the hour"),
            });
        }
        if let Some(&prev) = timestamps.last() {
            if ts <= prev {
                return Err(Error::NonMonotoneTimestamp { line: line_no });
            }
        }

        let volume: f64 = vol_field.trim().parse().map_err(|e| Error::MalformedRow {
            line: line_no,
            message: format!("bad volume '{vol_field}': {e}"),
        })?;
        if !volume.is_finite() {
            return Err(Error::MalformedRow {
                line: line_no,
                message: format!("volume '{vol_field}' is not finite"),
            });
        }
        if volume < 0.0 {
            return Err(Error::NegativeVolume {
                line: line_no,
                value: volume,
            });
        }

        timestamps.push(ts);
        values.push(volume);
    }

    TimeSeries::new(timestamps, values)
}

/// Writes a series in the same CSV layout accepted by [`load_csv`].
///
/// Volumes are printed with Rust's shortest round-trip float formatting, so
/// a write/load cycle reproduces the values bit-exactly.
pub fn write_csv(path: &Path, series: &TimeSeries) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "timestamp,volume")?;
    for (ts, v) in series.timestamps.iter().zip(&series.values) {
        writeln!(w, "{},{}", ts.format(TIMESTAMP_FORMAT), v)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Shape parameters for the synthetic hourly generator.
///
/// Each day contributes [`OBS_PER_DAY`] observations over hours 7..=21. The
/// deterministic part is a half-sine diurnal bump on top of a base level,
/// rescaled on weekends; Gaussian noise and (optionally) occasional signed
/// spikes are added on top, and the result is clipped at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthProfile {
    /// Volume floor at the edges of the service day.
    pub base_level: f64,
    /// Peak height of the half-sine diurnal bump (peaks at hour 14).
    pub diurnal_amplitude: f64,
    /// Multiplier applied to Saturday and Sunday levels.
    pub weekend_multiplier: f64,
    /// Standard deviation of additive Gaussian noise.
    pub noise_stddev: f64,
    /// Per-observation probability of an additive outlier spike.
    pub spike_probability: f64,
    /// Magnitude of a spike; its sign is drawn uniformly.
    pub spike_magnitude: f64,
    /// Calendar date of the first generated day.
    #[serde(default = "default_start_date")]
    pub start_date: NaiveDate,
}

fn default_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2014, 1, 1).expect("valid date")
}

impl Default for SynthProfile {
    fn default() -> Self {
        SynthProfile {
            base_level: 80.0,
            diurnal_amplitude: 400.0,
            weekend_multiplier: 0.9,
            noise_stddev: 2.0,
            spike_probability: 0.0,
            spike_magnitude: 80.0,
            start_date: default_start_date(),
        }
    }
}

impl SynthProfile {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("base_level", self.base_level),
            ("diurnal_amplitude", self.diurnal_amplitude),
            ("weekend_multiplier", self.weekend_multiplier),
            ("noise_stddev", self.noise_stddev),
            ("spike_magnitude", self.spike_magnitude),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    "synthetic profile",
                    format!("{name} must be a finite non-negative real, got {v}"),
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.spike_probability) {
            return Err(Error::invalid(
                "synthetic profile",
                format!(
                    "spike_probability must lie in [0, 1], got {}",
                    self.spike_probability
                ),
            ));
        }
        Ok(())
    }
}

/// Generates `days` synthetic days (15 hourly observations each, hours
/// 7..=21) deterministically from `seed`.
///
/// The generator draws from ChaCha8 in a fixed order (noise, spike gate,
/// spike sign), so a given `(days, seed, profile)` triple always produces
/// the identical series. Negative draws are clipped to zero.
pub fn synthesize(days: usize, seed: u64, profile: &SynthProfile) -> Result<TimeSeries> {
    if days == 0 {
        return Err(Error::invalid("days", "must be at least 1"));
    }
    profile.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut timestamps = Vec::with_capacity(days * OBS_PER_DAY);
    let mut values = Vec::with_capacity(days * OBS_PER_DAY);

    for d in 0..days {
        let date = profile
            .start_date
            .checked_add_days(Days::new(d as u64))
            .ok_or_else(|| Error::invalid("days", "date range overflow"))?;
        let weekend = matches!(date.weekday(), Weekday::Sat | Weekday::Sun);
        let day_scale = if weekend { profile.weekend_multiplier } else { 1.0 };

        for hour in DAY_START_HOUR..=DAY_END_HOUR {
            let phase = (hour - DAY_START_HOUR) as f64 / (DAY_END_HOUR - DAY_START_HOUR) as f64;
            let bump = (PI * phase).sin();
            let mut v = (profile.base_level + profile.diurnal_amplitude * bump) * day_scale;

            let noise: f64 = rng.sample(StandardNormal);
            v += profile.noise_stddev * noise;

            let gate: f64 = rng.gen();
            if gate < profile.spike_probability {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                v += sign * profile.spike_magnitude;
            }

            values.push(v.max(0.0));
            timestamps.push(
                date.and_hms_opt(hour, 0, 0)
                    .expect("hours 7..=21 are valid"),
            );
        }
    }

    TimeSeries::new(timestamps, values)
}

// ---------------------------------------------------------------------------
// Windowing
// ---------------------------------------------------------------------------

/// Lagged-window layout: each feature row holds `lag_n` consecutive values
/// and predicts the value `horizon` steps after the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub lag_n: usize,
    pub horizon: usize,
}

impl WindowConfig {
    pub fn new(lag_n: usize, horizon: usize) -> Result<Self> {
        let cfg = WindowConfig { lag_n, horizon };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lag_n < 1 {
            return Err(Error::invalid("window", "lag_n must be at least 1"));
        }
        if self.horizon < 1 {
            return Err(Error::invalid("window", "horizon must be at least 1"));
        }
        Ok(())
    }
}

/// Symmetric percentage band: a target `t` maps to bounds
/// `t * (1 - rho/100)` and `t * (1 + rho/100)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConfig {
    pub rho_percent: f64,
}

impl BandConfig {
    pub fn new(rho_percent: f64) -> Result<Self> {
        let cfg = BandConfig { rho_percent };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho_percent.is_finite() || self.rho_percent <= 0.0 || self.rho_percent >= 100.0 {
            return Err(Error::invalid(
                "band",
                format!("rho_percent must lie in (0, 100), got {}", self.rho_percent),
            ));
        }
        Ok(())
    }

    /// Lower and upper band bounds for one target value.
    pub fn band(&self, target: f64) -> (f64, f64) {
        let f = self.rho_percent / 100.0;
        (target * (1.0 - f), target * (1.0 + f))
    }
}

/// A windowed dataset: one feature row per sample plus the true target and
/// its percentage band.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedSet {
    features: DMatrix<f64>,
    targets: Vec<f64>,
    band_lower: Vec<f64>,
    band_upper: Vec<f64>,
}

impl SupervisedSet {
    /// Builds a set, validating shapes and the band ordering
    /// `lower <= target <= upper` for every sample.
    pub fn new(
        features: DMatrix<f64>,
        targets: Vec<f64>,
        band_lower: Vec<f64>,
        band_upper: Vec<f64>,
    ) -> Result<Self> {
        let n = features.nrows();
        if n == 0 {
            return Err(Error::SeriesTooShort { len: 0, need: 1 });
        }
        if targets.len() != n || band_lower.len() != n || band_upper.len() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n} targets and band entries"),
                actual: format!(
                    "{} targets, {} lower, {} upper",
                    targets.len(),
                    band_lower.len(),
                    band_upper.len()
                ),
            });
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        for i in 0..n {
            if !(targets[i].is_finite() && band_lower[i].is_finite() && band_upper[i].is_finite()) {
                return Err(Error::NonFinite("targets"));
            }
            if band_lower[i] > targets[i] || targets[i] > band_upper[i] {
                return Err(Error::BoundOrder {
                    index: i,
                    lower: band_lower[i],
                    upper: band_upper[i],
                });
            }
        }
        Ok(SupervisedSet {
            features,
            targets,
            band_lower,
            band_upper,
        })
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Feature dimension (lag count).
    pub fn input_dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn band_lower(&self) -> &[f64] {
        &self.band_lower
    }

    pub fn band_upper(&self) -> &[f64] {
        &self.band_upper
    }
}

/// Windows a series into `len - lag_n - horizon + 1` supervised samples.
///
/// Sample `i` has features `values[i .. i+lag_n]` and target
/// `values[i + lag_n + horizon - 1]`; band bounds come from `b`.
pub fn make_supervised(
    series: &TimeSeries,
    w: &WindowConfig,
    b: &BandConfig,
) -> Result<SupervisedSet> {
    w.validate()?;
    b.validate()?;
    let len = series.len();
    let need = w.lag_n + w.horizon;
    if len < need {
        return Err(Error::SeriesTooShort { len, need });
    }
    let n = len - w.lag_n - w.horizon + 1;
    let values = series.values();

    let features = DMatrix::from_fn(n, w.lag_n, |i, j| values[i + j]);
    let mut targets = Vec::with_capacity(n);
    let mut band_lower = Vec::with_capacity(n);
    let mut band_upper = Vec::with_capacity(n);
    for i in 0..n {
        let t = values[i + w.lag_n + w.horizon - 1];
        let (lo, hi) = b.band(t);
        targets.push(t);
        band_lower.push(lo);
        band_upper.push(hi);
    }

    SupervisedSet::new(features, targets, band_lower, band_upper)
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

/// Chronological split sizes over window-samples: the first `train_len`
/// samples train, the next `test_len` samples test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_len: usize,
    pub test_len: usize,
}

impl SplitSpec {
    pub fn new(train_len: usize, test_len: usize) -> Result<Self> {
        let spec = SplitSpec { train_len, test_len };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.train_len < 1 {
            return Err(Error::invalid("split", "train_len must be at least 1"));
        }
        if self.test_len < 1 {
            return Err(Error::invalid("split", "test_len must be at least 1 (test must be nonempty)"));
        }
        Ok(())
    }
}

/// Splits a supervised set into a training prefix and the test samples that
/// immediately follow it. Samples are never shuffled.
pub fn split(ds: &SupervisedSet, spec: &SplitSpec) -> Result<(SupervisedSet, SupervisedSet)> {
    spec.validate()?;
    let n = ds.len();
    if spec.train_len + spec.test_len > n {
        return Err(Error::SplitTooLarge {
            train_len: spec.train_len,
            test_len: spec.test_len,
            available: n,
        });
    }

    let take = |start: usize, count: usize| -> Result<SupervisedSet> {
        SupervisedSet::new(
            ds.features.rows(start, count).into_owned(),
            ds.targets[start..start + count].to_vec(),
            ds.band_lower[start..start + count].to_vec(),
            ds.band_upper[start..start + count].to_vec(),
        )
    };

    Ok((take(0, spec.train_len)?, take(spec.train_len, spec.test_len)?))
}
