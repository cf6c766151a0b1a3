use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use idform_cli::config::{load_config, ExperimentConfig, Mode, GENERATORS};
use idform_cli::error::CliError;
use idform_cli::experiment::run_experiment;
use idform_cli::plot::{energy_svg, physical_trace, snapshot_svg};
use idform_cli::trajectory::{parse_energy, TrajectoryFile};
use idform_cli::verify::run_verify;

#[derive(Parser)]
#[command(name = "idform", version, about = "Multi-robot shape formation by intermittent diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seed grid described by a config file.
    Run {
        config: PathBuf,
        /// Replaces the config's seed list; repeatable.
        #[arg(long)]
        seed: Vec<u64>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Gradient oracles, collision certificates and the Gibbs check.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Smaller sample sizes, a few seconds in total.
        #[arg(long)]
        quick: bool,
    },
    /// Render snapshot and energy plots from run outputs.
    Plot {
        /// Config that produced the runs; supplies the shape and `M`.
        config: PathBuf,
        #[arg(long)]
        traj: Vec<PathBuf>,
        #[arg(long)]
        energy: Vec<PathBuf>,
        /// Snapshot iterations, comma separated. Defaults to first and last.
        #[arg(long, value_delimiter = ',')]
        iterations: Vec<u64>,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
    /// List the built-in shapes or write one as a point file.
    Shapes {
        /// Generator to emit; lists all generators when absent.
        name: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        spacing: f64,
        #[arg(long, default_value_t = 4.0)]
        radius: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Print the capacity estimate for this robot radius.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Run { config, seed, mode, out, jobs } => {
            let mut cfg = load_config(&config)?;
            if !seed.is_empty() {
                cfg.seeds = Some(seed);
            }
            if mode.is_some() {
                cfg.mode = mode;
            }
            if out.is_some() {
                cfg.out = out;
            }
            let report = run_experiment(&cfg, jobs)?;
            print!("{}", report.summary);
            println!("wrote {} files", report.files.len());
            Ok(if report.failed() > 0 { 2 } else { 0 })
        }
        Command::Verify { seed, quick } => {
            let checks = run_verify(quick, seed)?;
            for c in &checks {
                println!("{c}");
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 2 })
        }
        Command::Plot { config, traj, energy, iterations, out } => plot(&config, &traj, &energy, &iterations, &out),
        Command::Shapes { name, spacing, radius, points, r, out } => {
            let Some(name) = name else {
                for (g, doc) in GENERATORS {
                    println!("{g:<8} {doc}");
                }
                return Ok(0);
            };
            let cfg = ExperimentConfig {
                shape: Some(name),
                shape_spacing: Some(spacing),
                shape_radius: Some(radius),
                shape_points: Some(points),
                r,
                n: Some(1),
                ..ExperimentConfig::default()
            };
            let shape = cfg.build_shape()?;
            match out {
                Some(p) => std::fs::write(&p, shape.to_text())?,
                None => print!("{}", shape.to_text()),
            }
            eprintln!("{} points, resolution {}", shape.len(), shape.resolution());
            if r.is_some() {
                let cfg = cfg.resolve(Path::new("."))?;
                eprintln!("capacity {} robots", cfg.capacity(&shape));
            }
            Ok(0)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or("").to_string()
}

fn plot(config: &Path, traj: &[PathBuf], energy: &[PathBuf], iterations: &[u64], out: &Path) -> Result<u8, CliError> {
    let cfg = load_config(config)?;
    let shape = cfg.build_shape()?;
    let m = cfg.domain_m.unwrap_or(6.0);
    std::fs::create_dir_all(out)?;
    for path in traj {
        let file = TrajectoryFile::parse(&read(path)?)?;
        let available = file.iterations();
        let wanted: Vec<u64> = if iterations.is_empty() {
            let mut v = vec![available.first().copied().unwrap_or(0), available.last().copied().unwrap_or(0)];
            v.dedup();
            v
        } else {
            iterations.to_vec()
        };
        let missing: Vec<u64> = wanted.iter().copied().filter(|i| !available.contains(i)).collect();
        if !missing.is_empty() {
            eprintln!("{}: no snapshot at iterations {missing:?}, skipped", path.display());
        }
        for it in wanted.iter().filter(|i| available.contains(i)) {
            let (phase, pos) = file.positions_at(*it).expect("iteration is present");
            let title = format!("{} iteration {it} ({})", stem(path), phase.label());
            let target = out.join(format!("{}_it{it}.svg", stem(path)));
            std::fs::write(&target, snapshot_svg(&shape, &pos, m, &title))?;
            println!("{}", target.display());
        }
    }
    if !energy.is_empty() {
        let mut series = Vec::new();
        for path in energy {
            series.push((stem(path), physical_trace(&parse_energy(&read(path)?)?)));
        }
        let target = out.join("energy.svg");
        std::fs::write(&target, energy_svg(&series))?;
        println!("{}", target.display());
    }
    Ok(0)
}
