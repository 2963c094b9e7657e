//! `rowswitch` command-line driver.
//!
//! Machine-readable results go to stdout, logs to stderr. Set
//! `ROWSWITCH_LOG` (e.g. `info`, `debug`) to change log verbosity.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rowswitch::batch::{alternating_schedule, run_batch};
use rowswitch::field::{generate_field, inter_row_distance, FieldSpec};
use rowswitch::fsm::{run_trial, Setup, SwitchState, TrialSpec};
use rowswitch::metrics::plot::error_svg;
use rowswitch::metrics::{alpha_table, read_errors_csv, transition_errors, write_report};
use rowswitch::profile::NoiseProfile;
use rowswitch::reentry::{locate_reentry, overlay, Turn};
use rowswitch::sensor::{detect_eor, render, DepthImage, Intrinsics, SegMask};
use rowswitch::{Error, Result};

use crate::config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "rowswitch", version, about = "Crop-row switching simulator and re-entry detector")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (TOML); flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed: field seed for generate-field, trial seed for run-trial, base
    /// seed for run-batch (trial k uses seed + k).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `none` switches every disturbance off regardless of the profile.
    #[arg(long, global = true, value_enum)]
    noise: Option<Noise>,
    /// Named noise profile: none or paper-calibrated.
    #[arg(long, global = true, value_name = "NAME")]
    profile: Option<String>,
    /// Output file (generate-field, detect) or directory (run-trial,
    /// run-batch, report).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Noise {
    None,
    Full,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic field and write it as a TOML fixture.
    GenerateField {
        #[arg(long)]
        rows: Option<usize>,
        /// Nominal inter-row spacing (m).
        #[arg(long)]
        spacing: Option<f64>,
        /// No spacing or angle jitter, no gaps, flat headland.
        #[arg(long)]
        regular: bool,
    },
    /// Run one row-switching trial and print its outcome and errors.
    RunTrial {
        #[arg(long)]
        row: usize,
        #[arg(long)]
        turn: Turn,
        /// Field fixture; generated from the config when omitted.
        #[arg(long, value_name = "FILE")]
        field: Option<PathBuf>,
        /// Heading error injected at state A (deg, counter-clockwise positive).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        heading_error: f64,
    },
    /// Run a batch of trials and write trajectories, errors, summary and plots.
    RunBatch {
        /// Number of trials, alternating left and right turns across the interior rows.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_name = "FILE")]
        field: Option<PathBuf>,
    },
    /// Locate the re-entry point in a mask/depth pair.
    Detect {
        #[arg(long, value_name = "FILE")]
        mask: PathBuf,
        #[arg(long, value_name = "FILE")]
        depth: PathBuf,
        #[arg(long, value_name = "FILE")]
        intrinsics: PathBuf,
        #[arg(long)]
        turn: Turn,
    },
    /// Rebuild the error table from a run directory's errors.csv.
    Report {
        /// Directory written by run-batch or run-trial.
        #[arg(value_name = "DIR")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ROWSWITCH_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.common.profile {
        cfg.profile = p.clone();
        cfg.noise = None;
    }
    let c = &cli.common;
    match cli.command {
        Command::GenerateField { rows, spacing, regular } => generate(&mut cfg, c, rows, spacing, regular),
        Command::RunTrial { row, turn, field, heading_error } => {
            let setup = setup(&cfg, c, field.as_deref())?;
            let mut spec = TrialSpec::new(row, turn, c.seed.unwrap_or(1));
            spec.options.heading_error_at_a_deg = heading_error;
            trial(&setup, &spec, c.out.as_deref().or(cfg.out.as_deref()))
        }
        Command::RunBatch { trials, field } => {
            let setup = setup(&cfg, c, field.as_deref())?;
            let specs = if cfg.trials.is_empty() || trials.is_some() || c.seed.is_some() {
                let n = trials.unwrap_or(cfg.schedule.count);
                alternating_schedule(n, setup.field.rows.len(), c.seed.unwrap_or(cfg.schedule.base_seed))?
            } else {
                cfg.trials.clone()
            };
            let out = c.out.clone().or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("rowswitch-out"));
            batch(&setup, &specs, &out)
        }
        Command::Detect { mask, depth, intrinsics, turn } => {
            detect(&mask, &depth, &intrinsics, turn, c.out.as_deref().unwrap_or(Path::new("overlay.png")))
        }
        Command::Report { input } => report(&input, c.out.as_deref()),
    }
}

fn profile(cfg: &RunConfig, c: &Common) -> Result<NoiseProfile> {
    let p = match &cfg.noise {
        Some(p) => p.clone(),
        None => NoiseProfile::by_name(&cfg.profile)?,
    };
    Ok(if c.noise == Some(Noise::None) { p.silenced() } else { p })
}

fn setup(cfg: &RunConfig, c: &Common, field: Option<&Path>) -> Result<Setup> {
    let field = match field.or(cfg.field.as_deref()) {
        Some(p) => FieldSpec::load(p)?,
        None => generate_field(&cfg.field_config, cfg.field_seed)?,
    };
    let mut setup = Setup::new(field, profile(cfg, c)?);
    setup.controller = cfg.controller.clone();
    setup.robot = cfg.robot.clone();
    setup.camera = cfg.camera.clone();
    setup.validate()?;
    log::info!("profile {}, {} rows", setup.profile.name, setup.field.rows.len());
    Ok(setup)
}

fn generate(cfg: &mut RunConfig, c: &Common, rows: Option<usize>, spacing: Option<f64>, regular: bool) -> Result<()> {
    let mut fc = cfg.field_config.clone();
    if regular {
        fc = rowswitch::field::FieldConfig {
            roughness: fc.roughness.clone(),
            ..rowswitch::field::FieldConfig::regular(fc.row_count, fc.nominal_inter_row)
        };
        fc.roughness.amplitude = 0.0;
    }
    if let Some(r) = rows {
        fc.row_count = r;
    }
    if let Some(s) = spacing {
        fc.nominal_inter_row = s;
    }
    let seed = c.seed.unwrap_or(cfg.field_seed);
    let field = generate_field(&fc, seed)?;
    let out = c.out.clone().unwrap_or_else(|| PathBuf::from("field.toml"));
    field.save(&out)?;
    let spacings: Vec<f64> = (1..field.rows.len())
        .map(|i| inter_row_distance(&field, i - 1, i))
        .collect::<Result<_>>()?;
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let min = spacings.iter().copied().fold(f64::INFINITY, f64::min);
    let max = spacings.iter().copied().fold(0.0, f64::max);
    println!("file = {:?}", out.display().to_string());
    println!("seed = {seed}");
    println!("rows = {}", field.rows.len());
    println!("gaps = {}", field.rows.iter().map(|r| r.gaps.len()).sum::<usize>());
    println!("spacing_min = {min:.4}");
    println!("spacing_mean = {mean:.4}");
    println!("spacing_max = {max:.4}");
    Ok(())
}

fn trial(setup: &Setup, spec: &TrialSpec, out: Option<&Path>) -> Result<()> {
    let r = run_trial(setup, spec)?;
    let errors = transition_errors(&r, 0, &setup.field, &setup.robot)?;
    println!("row = {}", spec.row);
    println!("turn = \"{}\"", spec.turn);
    println!("seed = {}", spec.seed);
    println!("target_row = {}", r.target_row);
    println!("final_state = \"{}\"", r.final_state);
    match r.d_r {
        Some(d) => println!("d_r = {d:.4}"),
        None => println!("# d_r unavailable"),
    }
    for e in errors.entries.iter().flatten() {
        println!("error.\"{}\" = {:.6}  # {}", e.transition, e.error, e.transition.unit());
    }
    if let Some(dir) = out {
        write_report(dir, std::slice::from_ref(&r), &setup.field, &setup.robot)?;
        // The frame the detector used at A, for replaying with `detect`.
        if let Some(a) = r.anchor(SwitchState::A) {
            let (mask, depth) = render(&setup.field, &setup.robot.camera_pose(&a.pose), &setup.camera)?;
            mask.save_pgm(&dir.join("mask_a.pgm"))?;
            depth.save_pgm(&dir.join("depth_a.pgm"))?;
            Intrinsics::new(setup.camera.clone()).save(&dir.join("intrinsics.toml"))?;
        }
        log::info!("wrote {}", dir.display());
    }
    Ok(())
}

fn batch(setup: &Setup, specs: &[TrialSpec], out: &Path) -> Result<()> {
    let results = run_batch(setup, specs)?;
    let summary = write_report(out, &results, &setup.field, &setup.robot)?;
    print!("{}", summary.render());
    log::info!("wrote {}", out.display());
    Ok(())
}

fn detect(mask: &Path, depth: &Path, intrinsics: &Path, turn: Turn, out: &Path) -> Result<()> {
    let intr = Intrinsics::load(intrinsics)?;
    let mask = SegMask::load(mask)?;
    let depth = DepthImage::load_scaled(depth, intr.depth_scale)?;
    let eor = detect_eor(&mask);
    let result = locate_reentry(&mask, &depth, &eor, &intr.camera, turn)?;
    print!("{}", result.to_toml());
    overlay(&mask, &eor, &result).save(out)?;
    log::info!("overlay written to {}", out.display());
    Ok(())
}

fn report(input: &Path, out: Option<&Path>) -> Result<()> {
    let errors = read_errors_csv(&input.join("errors.csv"))?;
    let table = alpha_table(&errors)?;
    print!("{}", table.render());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
        table.write_csv(&dir.join("summary.csv"))?;
        error_svg(&dir.join("errors.svg"), &errors)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use rowswitch::profile::PROFILE_NAMES;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn profile_names_resolve() {
        for name in PROFILE_NAMES {
            assert!(NoiseProfile::by_name(name).is_ok());
        }
    }
}
