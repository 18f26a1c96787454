//! `decoy-akg`: key-rate sweeps for decoy-state QKD with advantage key
//! generation.

mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decoy_akg::channel::ChannelParams;
use decoy_akg::keyrate::Direction;
use decoy_akg::scenario::{
    run_scenario, BoundDarkModel, DarkMode, DistanceRange, ScenarioKind, ScenarioSpec, SweepResult,
};

use config::ConfigFile;
use emit::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] decoy_akg::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use decoy_akg::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(
                E::Config(_)
                | E::InvalidGrid(_)
                | E::InvalidParams(_)
                | E::InvalidStats(_)
                | E::DegeneratePoints { .. }
                | E::UnorderedPoints { .. }
                | E::EmptyPoints,
            ) => 2,
            CliError::Core(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "decoy-akg", version, about = "Decoy-state key-rate sweeps with advantage key generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep one or more scenarios over a distance range.
    Run(RunArgs),
    /// Regenerate the standard comparison datasets and distance tables.
    PaperFigures(FigureArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario label (k2, k3-ma, k3-wang, k3-ours, k4, universal, custom) or `all`.
    #[arg(long = "scenario")]
    scenarios: Vec<String>,
    /// Decoy intensities for the custom scenario, comma separated.
    #[arg(long, value_delimiter = ',')]
    decoys: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    #[arg(long, value_enum)]
    dark_mode: Option<DarkArg>,
    /// Dark-count rate for `--dark-mode explicit`.
    #[arg(long)]
    p_dark: Option<f64>,
    /// How the estimators treat the dark rate.
    #[arg(long, value_enum)]
    bound_dark: Option<BoundDarkArg>,
    #[arg(long)]
    l_min: Option<f64>,
    #[arg(long)]
    l_max: Option<f64>,
    #[arg(long)]
    l_step: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// TOML file with [channel], [scenario] and [sweep] tables.
    #[arg(long)]
    params_file: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long, default_value = "figures")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, default_value_t = 1.0)]
    l_step: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DirectionArg {
    Forward,
    Reverse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DarkArg {
    PdZero,
    PdEqualsP0,
    Explicit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoundDarkArg {
    Inclusive,
    Subtracted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    GnuplotData,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Reverse => Direction::Reverse,
        }
    }
}

impl From<BoundDarkArg> for BoundDarkModel {
    fn from(b: BoundDarkArg) -> Self {
        match b {
            BoundDarkArg::Inclusive => BoundDarkModel::Inclusive,
            BoundDarkArg::Subtracted => BoundDarkModel::Subtracted,
        }
    }
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::GnuplotData => Format::GnuplotData,
        }
    }
}

/// Flag value if given, else the file value parsed with the flag's grammar.
fn pick<T: ValueEnum>(flag: Option<T>, file: Option<&str>, key: &str) -> Result<Option<T>, CliError> {
    match (flag, file) {
        (Some(v), _) => Ok(Some(v)),
        (None, Some(s)) => T::from_str(s, true)
            .map(Some)
            .map_err(|_| CliError::Config(format!("invalid value '{s}' for {key}"))),
        (None, None) => Ok(None),
    }
}

fn resolve_kinds(names: &[String], file: Option<&str>) -> Result<Vec<ScenarioKind>, CliError> {
    let names: Vec<&str> = if names.is_empty() {
        file.into_iter().collect()
    } else {
        names.iter().map(String::as_str).collect()
    };
    if names.is_empty() {
        return Err(CliError::Config("no scenario given; use --scenario".into()));
    }
    let mut kinds = Vec::new();
    for name in names {
        let batch = if name == "all" {
            ScenarioKind::PRESETS.to_vec()
        } else {
            vec![ScenarioKind::from_label(name)
                .ok_or_else(|| CliError::Config(format!("unknown scenario '{name}'")))?]
        };
        for k in batch {
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
    }
    Ok(kinds)
}

fn build_specs(args: &RunArgs, file: &ConfigFile) -> Result<(Vec<ScenarioSpec>, DistanceRange, Format), CliError> {
    let sc = &file.scenario;
    let sw = &file.sweep;
    let channel: ChannelParams = file.channel.resolve()?;
    let direction: Direction = pick(args.direction, sc.direction.as_deref(), "direction")?
        .unwrap_or(DirectionArg::Forward)
        .into();
    let dark = pick(args.dark_mode, sc.dark_mode.as_deref(), "dark_mode")?.unwrap_or(DarkArg::PdZero);
    let p_dark = args.p_dark.or(sc.p_dark);
    let dark_mode = match dark {
        DarkArg::PdZero => DarkMode::Zero,
        DarkArg::PdEqualsP0 => DarkMode::EqualsP0,
        DarkArg::Explicit => DarkMode::Explicit(
            p_dark.ok_or_else(|| CliError::Config("--dark-mode explicit needs --p-dark".into()))?,
        ),
    };
    if p_dark.is_some() && !matches!(dark, DarkArg::Explicit) {
        return Err(CliError::Config("--p-dark is only used with --dark-mode explicit".into()));
    }
    let bound_dark: BoundDarkModel = pick(args.bound_dark, sc.bound_dark.as_deref(), "bound_dark")?
        .unwrap_or(BoundDarkArg::Inclusive)
        .into();
    let format: Format = pick(args.format, sw.format.as_deref(), "format")?
        .unwrap_or(FormatArg::Csv)
        .into();
    let range = DistanceRange::new(
        args.l_min.or(sw.l_min).unwrap_or(0.0),
        args.l_max.or(sw.l_max).unwrap_or(250.0),
        args.l_step.or(sw.l_step).unwrap_or(1.0),
    )?;

    let decoys = args.decoys.clone().or_else(|| sc.decoys.clone());
    let kinds = resolve_kinds(&args.scenarios, sc.name.as_deref())?;
    if decoys.is_some() && !kinds.contains(&ScenarioKind::Custom) {
        return Err(CliError::Config("--decoys only applies to the custom scenario".into()));
    }
    let specs = kinds
        .into_iter()
        .map(|kind| {
            let spec = match kind {
                ScenarioKind::Custom => {
                    let mus = decoys
                        .clone()
                        .ok_or_else(|| CliError::Config("the custom scenario needs --decoys".into()))?;
                    ScenarioSpec::custom(mus, direction, channel, dark_mode)?
                }
                kind => ScenarioSpec::preset(kind, direction, dark_mode)?.with_channel(channel)?,
            };
            Ok(spec.with_bound_dark(bound_dark))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok((specs, range, format))
}

/// Runs every spec on its own thread; results keep the input order.
fn sweep_all(specs: &[ScenarioSpec], range: &DistanceRange) -> Result<Vec<SweepResult>, CliError> {
    std::thread::scope(|s| {
        let handles: Vec<_> = specs
            .iter()
            .map(|spec| s.spawn(move || run_scenario(spec, range)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep thread panicked").map_err(CliError::from))
            .collect()
    })
}

fn report(results: &[SweepResult], files: &[PathBuf]) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    for r in results {
        let _ = writeln!(out, "{} achievable distance {:.2} km", emit::stem(r), r.achievable_distance_km);
    }
    for f in files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let file = match &args.params_file {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let (specs, range, format) = build_specs(&args, &file)?;
    let results = sweep_all(&specs, &range)?;
    let files = emit::emit(&results, format, &args.out, "combined")?;
    report(&results, &files);
    Ok(())
}

fn paper_figures(args: FigureArgs) -> Result<(), CliError> {
    let range = DistanceRange::new(0.0, 250.0, args.l_step)?;
    let format: Format = args.format.into();
    let five = [
        ScenarioKind::K2,
        ScenarioKind::K3Wang,
        ScenarioKind::K3Ours,
        ScenarioKind::K4,
        ScenarioKind::Universal,
    ];
    let settings: [(&str, Direction, DarkMode, &[ScenarioKind]); 3] = [
        ("fig1_forward_pd_zero", Direction::Forward, DarkMode::Zero, &ScenarioKind::PRESETS),
        ("fig2_forward_pd_equals_p0", Direction::Forward, DarkMode::EqualsP0, &five),
        ("fig3_reverse_pd_equals_p0", Direction::Reverse, DarkMode::EqualsP0, &five),
    ];
    let mut files = Vec::new();
    let mut all = Vec::new();
    for (name, direction, dark, kinds) in settings {
        let specs = kinds
            .iter()
            .map(|&k| ScenarioSpec::preset(k, direction, dark))
            .collect::<Result<Vec<_>, _>>()?;
        let results = sweep_all(&specs, &range)?;
        files.extend(emit::emit(&results, format, &args.out.join(name), name)?);
        let table = args.out.join(format!("distances_{}.csv", &name[5..]));
        files.push(emit::write_distance_table(&results, &table)?);
        if direction == Direction::Reverse {
            // The optimal-intensity figure plots the optimal_mu column of these runs.
            let path = args
                .out
                .join(format!("fig4_optimal_mu_reverse_pd_equals_p0.{}", format.extension()));
            files.push(emit::write_combined(&results, format, &path)?);
        }
        all.extend(results);
    }
    report(&all, &files);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::PaperFigures(args) => paper_figures(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
