//! Report and trace-file writers. All files are UTF-8 with LF line endings;
//! numbers use shortest round-trip formatting so every file parses back to
//! the exact floats that produced it.

use std::fs;
use std::io::Write;
use std::path::Path;

use picast::metrics::{Evaluation, IntervalForecast, OutsideStats, PiConfig};

use crate::error::CliError;

/// One line of the summary report: a model scored at one nominal level.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub model: String,
    pub pinc: f64,
    pub evaluation: Evaluation,
}

/// Percent label used in output file names: 0.90 -> "90", 0.925 -> "92.5".
pub fn pinc_label(pinc: f64) -> String {
    let pct = pinc * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("{}", pct.round() as i64)
    } else {
        format!("{pct}")
    }
}

/// Writes the summary TSV: a header plus one row per (model, level).
pub fn write_report(path: &Path, rows: &[ReportRow]) -> Result<(), CliError> {
    let mut text = String::from(Evaluation::TSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.evaluation.tsv_row(&row.model, row.pinc));
        text.push('\n');
    }
    fs::write(path, text)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

/// Writes one forecast trace: `index,lower,upper,actual,covered` with
/// `covered` as 1/0 under the closed-interval rule.
pub fn write_bounds_csv(path: &Path, forecast: &IntervalForecast) -> Result<(), CliError> {
    let mut out = Vec::new();
    writeln!(out, "index,lower,upper,actual,covered").expect("vec write");
    for i in 0..forecast.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            i,
            forecast.lower()[i],
            forecast.upper()[i],
            forecast.actual()[i],
            u8::from(forecast.covered_at(i)),
        )
        .expect("vec write");
    }
    fs::write(path, out)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

/// Reads a bounds CSV produced by [`write_bounds_csv`] (the `covered`
/// column is optional) back into a forecast for re-scoring.
pub fn read_bounds_csv(path: &Path, pi: PiConfig) -> Result<IntervalForecast, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header))
            if header == "index,lower,upper,actual,covered"
                || header == "index,lower,upper,actual" => {}
        Some((_, header)) => {
            return Err(CliError::data(format!(
                "{}: unexpected header {header:?}",
                path.display()
            )))
        }
        None => return Err(CliError::data(format!("{}: empty file", path.display()))),
    }

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut actual = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 && fields.len() != 5 {
            return Err(CliError::data(format!(
                "{} line {}: expected 4 or 5 fields, found {}",
                path.display(),
                idx + 1,
                fields.len()
            )));
        }
        let parse = |what: &str, s: &str| -> Result<f64, CliError> {
            s.parse::<f64>().map_err(|_| {
                CliError::data(format!(
                    "{} line {}: cannot parse {what} {s:?}",
                    path.display(),
                    idx + 1
                ))
            })
        };
        lower.push(parse("lower", fields[1])?);
        upper.push(parse("upper", fields[2])?);
        actual.push(parse("actual", fields[3])?);
    }
    if lower.is_empty() {
        return Err(CliError::data(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    IntervalForecast::new(lower, upper, actual, pi).map_err(|e| CliError::stage("bounds file", e))
}

/// Writes the uncovered-point summary: count and mean distance to the
/// violated bound, per side.
pub fn write_outside_tsv(path: &Path, stats: &OutsideStats) -> Result<(), CliError> {
    let text = format!(
        "relationship\tcount\tmean_distance\nabove_upper\t{}\t{}\nbelow_lower\t{}\t{}\n",
        stats.above_count, stats.above_mean_dist, stats.below_count, stats.below_mean_dist
    );
    fs::write(path, text)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}
