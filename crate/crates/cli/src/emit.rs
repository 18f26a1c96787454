//! CSV and gnuplot renderings of sweep results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use decoy_akg::keyrate::Direction;
use decoy_akg::scenario::{BoundDarkModel, DarkMode, SweepResult};

use crate::CliError;

pub const CSV_COLUMNS: &str = "scenario,L_km,optimal_mu,rate_bits_per_pulse,rate_signed,q1_min,b1_max,q1_min_source_j,b1_max_source_j";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    GnuplotData,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::GnuplotData => "dat",
        }
    }
}

pub fn direction_label(d: Direction) -> &'static str {
    match d {
        Direction::Forward => "forward",
        Direction::Reverse => "reverse",
    }
}

pub fn dark_label(mode: DarkMode) -> String {
    match mode {
        DarkMode::Zero => "pd-zero".into(),
        DarkMode::EqualsP0 => "pd-equals-p0".into(),
        DarkMode::Explicit(pd) => format!("pd-{pd:e}"),
    }
}

fn bound_dark_label(model: BoundDarkModel) -> &'static str {
    match model {
        BoundDarkModel::Inclusive => "inclusive",
        BoundDarkModel::Subtracted => "subtracted",
    }
}

/// Unique file stem for a result.
pub fn stem(result: &SweepResult) -> String {
    format!(
        "{}_{}_{}",
        result.label(),
        direction_label(result.spec.direction),
        dark_label(result.spec.dark_mode)
    )
}

fn describe(result: &SweepResult) -> String {
    let spec = &result.spec;
    let ch = spec.effective_channel().unwrap_or(spec.channel);
    let decoys: Vec<String> = spec.decoy_mus.iter().map(|m| format!("{m}")).collect();
    format!(
        "# scenario={} direction={} dark_mode={} bound_dark={} decoys=[{}] signal_bound={} achievable_distance_km={:.2}\n\
         # channel theta={} a0_db={} a1_db_per_km={} p0={:e} p_dark={:e} s={}\n",
        result.label(),
        direction_label(spec.direction),
        dark_label(spec.dark_mode),
        bound_dark_label(spec.bound_dark),
        decoys.join(","),
        spec.signal_bound,
        result.achievable_distance_km,
        ch.theta,
        ch.a0_db,
        ch.a1_db_per_km,
        ch.p0,
        ch.p_dark,
        ch.s,
    )
}

fn csv_rows(out: &mut String, result: &SweepResult) {
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{:.4},{:.8},{:.10e},{:.10e},{:.10e},{:.10e},{},{}",
            result.label(),
            r.l_km,
            r.optimal_mu,
            r.rate,
            r.rate_signed,
            r.q1_min,
            r.b1_max,
            r.q1_source,
            r.b1_source
        );
    }
}

fn gnuplot_block(out: &mut String, result: &SweepResult) {
    out.push_str(&describe(result));
    out.push_str("# L_km optimal_mu rate_bits_per_pulse rate_signed q1_min b1_max q1_min_source_j b1_max_source_j\n");
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{:.4} {:.8} {:.10e} {:.10e} {:.10e} {:.10e} {} {}",
            r.l_km, r.optimal_mu, r.rate, r.rate_signed, r.q1_min, r.b1_max, r.q1_source, r.b1_source
        );
    }
}

/// Renders one or more results into a single document.
pub fn render(results: &[SweepResult], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            for r in results {
                out.push_str(&describe(r));
            }
            out.push_str(CSV_COLUMNS);
            out.push('\n');
            for r in results {
                csv_rows(&mut out, r);
            }
        }
        Format::GnuplotData => {
            for (i, r) in results.iter().enumerate() {
                if i > 0 {
                    out.push_str("\n\n");
                }
                gnuplot_block(&mut out, r);
            }
        }
    }
    out
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, CliError> {
    std::fs::write(&path, text).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes one file per result plus `<combined>.<ext>` holding all of them.
pub fn emit(results: &[SweepResult], format: Format, dir: &Path, combined: &str) -> Result<Vec<PathBuf>, CliError> {
    if results.is_empty() {
        return Err(CliError::Config("nothing to write".into()));
    }
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let ext = format.extension();
    let mut written = Vec::with_capacity(results.len() + 1);
    for r in results {
        let text = render(std::slice::from_ref(r), format);
        written.push(write(dir.join(format!("{}.{ext}", stem(r))), &text)?);
    }
    written.push(write(dir.join(format!("{combined}.{ext}")), &render(results, format))?);
    Ok(written)
}

pub fn write_combined(results: &[SweepResult], format: Format, path: &Path) -> Result<PathBuf, CliError> {
    write(path.to_path_buf(), &render(results, format))
}

/// Table of achievable distances, one row per result.
pub fn distance_table(results: &[SweepResult]) -> String {
    let mut out = String::from("scenario,direction,dark_mode,achievable_distance_km\n");
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{:.2}",
            r.label(),
            direction_label(r.spec.direction),
            dark_label(r.spec.dark_mode),
            r.achievable_distance_km
        );
    }
    out
}

pub fn write_distance_table(results: &[SweepResult], path: &Path) -> Result<PathBuf, CliError> {
    write(path.to_path_buf(), &distance_table(results))
}
