//! `trajkit`: smooth a broken line, sample it and compute its fastest speed
//! profile from the command line.

mod config;
mod formats;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use trajkit::{
    discretize, ingest, interpolate, solve, split_acute, BrokenLine, DiscretizeError, DiscretizedPath,
    InterpolateError, ProfileError, SmoothPath, SpeedProfile,
};

use config::PipelineConfig;

#[derive(Parser)]
#[command(name = "trajkit", version, about = "Trajectory synthesis for differential-drive robots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Input file.
    #[arg(long)]
    input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// `key value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Smoothing {
    /// Split corners sharper than a right angle before smoothing.
    #[arg(long)]
    split_acute: bool,
    /// Round corners with circle arcs only.
    #[arg(long)]
    arc_only: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Broken line in, table of curve pieces out.
    Interpolate {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        smoothing: Smoothing,
    },
    /// Table of curve pieces in, configuration CSV out.
    Discretize {
        #[command(flatten)]
        io: Io,
        /// Target step length in meters; overrides the config.
        #[arg(long, value_parser = positive_step, allow_hyphen_values = true)]
        step: Option<f64>,
    },
    /// Configuration CSV in, speed profile CSV out.
    Profile {
        #[command(flatten)]
        io: Io,
        /// Also write `<output>.path.svg` and `<output>.speed.svg`.
        #[arg(long)]
        svg: bool,
    },
    /// All three stages, handing over text exactly as the separate commands do.
    Pipeline {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        smoothing: Smoothing,
        #[arg(long, value_parser = positive_step, allow_hyphen_values = true)]
        step: Option<f64>,
        #[arg(long)]
        svg: bool,
    },
    /// Times each stage on a broken line and prints a table in microseconds.
    Bench {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        smoothing: Smoothing,
        #[arg(long, value_parser = positive_step, allow_hyphen_values = true)]
        step: Option<f64>,
        /// Number of timed runs; medians are reported.
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
    },
}

fn positive_step(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("the step must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

/// A failed command and its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Convergence(String),
    Infeasible(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Convergence(_) => 4,
            Failure::Infeasible(_) => 5,
            Failure::Io(_) => 6,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Convergence(m) | Failure::Infeasible(m) => {
                f.write_str(m)
            }
            Failure::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<InterpolateError> for Failure {
    fn from(e: InterpolateError) -> Self {
        match e {
            InterpolateError::NonConvergence { .. } => Failure::Convergence(e.to_string()),
            InterpolateError::Invalid(ref v) if v.iter().any(|v| matches!(v, trajkit::Violation::AcuteTurn { .. })) => {
                Failure::Validation(format!("{e} (--split-acute can fix acute corners)"))
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<DiscretizeError> for Failure {
    fn from(e: DiscretizeError) -> Self {
        match e {
            DiscretizeError::NonPositiveStep(_) => Failure::Usage(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<ProfileError> for Failure {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::InvalidConstraint(_) | ProfileError::UnboundedCap { .. } => Failure::Usage(e.to_string()),
            ProfileError::InfeasibleCap { .. }
            | ProfileError::InfeasibleInitialSpeed { .. }
            | ProfileError::StalledStep { .. } => Failure::Infeasible(e.to_string()),
            ProfileError::LengthMismatch { .. } => Failure::Validation(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig, Failure> {
    match path {
        None => Ok(PipelineConfig::default()),
        Some(p) => PipelineConfig::parse(&read(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
    }
}

fn target_step(flag: Option<f64>, cfg: &PipelineConfig) -> Result<f64, Failure> {
    flag.or(cfg.target_step)
        .ok_or_else(|| Failure::Usage("no step length: pass --step or set `step` in the config".into()))
}

fn parse_line(text: &str, split: bool, cfg: &PipelineConfig) -> Result<BrokenLine, Failure> {
    let line = formats::parse_broken_line(text).map_err(|e| Failure::Validation(format!("broken line: {e}")))?;
    if split {
        Ok(split_acute(&line, cfg.min_chamfer)?)
    } else {
        Ok(line)
    }
}

fn smooth(line: &BrokenLine, cfg: &PipelineConfig, smoothing: &Smoothing) -> Result<SmoothPath, Failure> {
    let path = interpolate(line, &cfg.interpolate_options(smoothing.arc_only))?;
    for i in path.unsmoothed() {
        eprintln!("trajkit: corner {i}: clothoid fit did not converge, rounded with a circle arc");
    }
    Ok(path)
}

fn stage_interpolate(text: &str, cfg: &PipelineConfig, smoothing: &Smoothing) -> Result<String, Failure> {
    let line = parse_line(text, smoothing.split_acute, cfg)?;
    Ok(formats::write_pieces(&smooth(&line, cfg, smoothing)?))
}

fn stage_discretize(text: &str, step: f64) -> Result<String, Failure> {
    let path = formats::parse_pieces(text).map_err(|e| Failure::Validation(format!("piece table: {e}")))?;
    Ok(formats::write_configs(&discretize(&path, step)?))
}

fn stage_profile(text: &str, cfg: &PipelineConfig) -> Result<(DiscretizedPath, SpeedProfile, String), Failure> {
    let poses = formats::parse_configs(text).map_err(|e| Failure::Validation(format!("configurations: {e}")))?;
    let path = ingest(poses, false)?;
    let cs = cfg.constraint_set().map_err(Failure::Usage)?;
    let profile = solve(&path, &cs, cfg.z0, cfg.z_final_max)?;
    let csv = formats::write_profile(&path, &profile, cs.geometry.track_width);
    Ok((path, profile, csv))
}

fn finish_profile(
    output: Option<&Path>,
    svg: bool,
    (path, profile, csv): (DiscretizedPath, SpeedProfile, String),
) -> Result<(), Failure> {
    if svg {
        let out = output.ok_or_else(|| Failure::Usage("--svg needs --output".into()))?;
        write(&out.with_extension("path.svg"), &svg::path_plot(&path, &profile))?;
        write(&out.with_extension("speed.svg"), &svg::speed_plot(&path, &profile))?;
    }
    emit(output, &csv)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn bench(line: &BrokenLine, cfg: &PipelineConfig, smoothing: &Smoothing, step: f64, reps: u32) -> Result<(), Failure> {
    let opts = cfg.interpolate_options(smoothing.arc_only);
    let cs = cfg.constraint_set().map_err(Failure::Usage)?;
    let mut samples = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    let mut points = 0;
    for _ in 0..reps {
        let t0 = Instant::now();
        let path = interpolate(line, &opts)?;
        let t1 = Instant::now();
        let d = discretize(&path, step)?;
        let t2 = Instant::now();
        let p = solve(&d, &cs, cfg.z0, cfg.z_final_max)?;
        let t3 = Instant::now();
        std::hint::black_box(p);
        points = d.configs().len();
        for (k, (a, b)) in [(t0, t1), (t1, t2), (t2, t3), (t0, t3)].into_iter().enumerate() {
            samples[k].push((b - a).as_secs_f64() * 1e6);
        }
    }
    let [synthesis, discretization, profile, total] = samples.map(median);
    println!(
        "{:>8}  {:>14}  {:>17}  {:>13}  {:>10}",
        "points", "synthesis_us", "discretization_us", "profile_us", "total_us"
    );
    println!("{points:>8}  {synthesis:>14.1}  {discretization:>17.1}  {profile:>13.1}  {total:>10.1}");
    if reps == 1 {
        println!("single run");
    } else {
        println!("medians over {reps} runs");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Interpolate { io, smoothing } => {
            let cfg = load_config(io.config.as_deref())?;
            let table = stage_interpolate(&read(&io.input)?, &cfg, &smoothing)?;
            emit(io.output.as_deref(), &table)
        }
        Command::Discretize { io, step } => {
            let cfg = load_config(io.config.as_deref())?;
            let step = target_step(step, &cfg)?;
            let configs = stage_discretize(&read(&io.input)?, step)?;
            emit(io.output.as_deref(), &configs)
        }
        Command::Profile { io, svg } => {
            let cfg = load_config(io.config.as_deref())?;
            let result = stage_profile(&read(&io.input)?, &cfg)?;
            finish_profile(io.output.as_deref(), svg, result)
        }
        Command::Pipeline {
            io,
            smoothing,
            step,
            svg,
        } => {
            let cfg = load_config(io.config.as_deref())?;
            let step = target_step(step, &cfg)?;
            let table = stage_interpolate(&read(&io.input)?, &cfg, &smoothing)?;
            let configs = stage_discretize(&table, step)?;
            let result = stage_profile(&configs, &cfg)?;
            finish_profile(io.output.as_deref(), svg, result)
        }
        Command::Bench {
            input,
            config,
            smoothing,
            step,
            reps,
        } => {
            let cfg = load_config(config.as_deref())?;
            let step = target_step(step, &cfg)?;
            let line = parse_line(&read(&input)?, smoothing.split_acute, &cfg)?;
            bench(&line, &cfg, &smoothing, step, reps)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("trajkit: {f}");
            ExitCode::from(f.code())
        }
    }
}
