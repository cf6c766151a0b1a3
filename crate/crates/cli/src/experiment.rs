//! Seed-by-mode experiment grids.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use idform_core::analysis::{collision_certificate, descent_violations, run_metrics, Verdict};
use idform_core::planner::{plan_gd, plan_id, PlannerParams, RunRecord, Termination};
use idform_core::potentials::PotentialParams;
use idform_core::shape::Shape;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;
use crate::trajectory::{energy_rows, serialize_energy, Header, TrajectoryFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Planner {
    Id,
    Gd,
}

impl Planner {
    pub fn label(self) -> &'static str {
        match self {
            Planner::Id => "id",
            Planner::Gd => "gd",
        }
    }
}

/// Records produced for one seed.
#[derive(Debug, Clone, Default)]
pub struct SeedRuns {
    pub id: Option<RunRecord>,
    pub gd: Option<RunRecord>,
}

/// Scalar outcome of one run, written as `<planner>_seed<k>.metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub planner: Planner,
    pub seed: u64,
    pub status: String,
    pub cycles: usize,
    pub physical_iterations: usize,
    pub psi: f64,
    pub f: f64,
    pub g: f64,
    pub min_distance: f64,
    pub on_shape_fraction: f64,
    pub nn_cv: f64,
    pub certificate: String,
    pub descent_violations: usize,
}

#[derive(Debug, Clone)]
pub struct SeedResult {
    pub seed: u64,
    /// `Err` holds the failure message for the whole seed.
    pub runs: Result<Vec<RunSummary>, String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub seeds: Vec<SeedResult>,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn failed(&self) -> usize {
        self.seeds.iter().filter(|s| s.runs.is_err()).count()
    }
}

/// Hex SHA-256 of everything that determines a run except the seed.
pub fn params_hash(cfg: &ExperimentConfig, pot: &PotentialParams, params: &PlannerParams) -> String {
    let p = PlannerParams { seed: 0, ..*params };
    let text = format!(
        "{}|n={:?}|init={:?}|spacing={:?}|side={:?}|{pot:?}|{p:?}",
        cfg.shape_id(),
        cfg.n,
        cfg.init,
        cfg.init_spacing,
        cfg.corner_side
    );
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs the planners the config asks for on one seed. With both modes and
/// no explicit `gd_cap`, the baseline gets the ID run's physical iteration
/// count.
pub fn plan_seed(cfg: &ExperimentConfig, shape: &Shape, pot: &PotentialParams, seed: u64) -> Result<SeedRuns, CliError> {
    let x0 = cfg.initial(seed)?;
    let params = cfg.planner_params(seed)?;
    let mut runs = SeedRuns::default();
    if cfg.mode().runs_id() {
        runs.id = Some(plan_id(&x0, shape, pot, &params)?);
    }
    if cfg.mode().runs_gd() {
        let gd_cap = match (&runs.id, cfg.gd_cap) {
            (_, Some(cap)) => cap,
            (Some(id), None) => id.physical_iterations().max(1),
            (None, None) => params.gd_cap,
        };
        runs.gd = Some(plan_gd(&x0, shape, pot, &PlannerParams { gd_cap, ..params })?);
    }
    Ok(runs)
}

fn status_label(t: Termination) -> &'static str {
    match t {
        Termination::ConvergedEpsilon => "converged",
        Termination::OuterCapReached => "outer_cap",
        Termination::Stalled => "stalled",
        Termination::IterationCapReached => "iteration_cap",
    }
}

fn summarize(
    planner: Planner,
    seed: u64,
    rec: &RunRecord,
    shape: &Shape,
    pot: &PotentialParams,
    epsilon: f64,
) -> Result<RunSummary, CliError> {
    let m = run_metrics(rec, shape, pot, epsilon)?;
    let cert = collision_certificate(rec, pot)?;
    Ok(RunSummary {
        planner,
        seed,
        status: status_label(rec.status).into(),
        cycles: rec.cycles,
        physical_iterations: rec.physical_iterations(),
        psi: m.energy,
        f: m.f,
        g: m.g,
        min_distance: m.min_distance,
        on_shape_fraction: m.on_shape_fraction,
        nn_cv: m.nn_cv,
        certificate: match cert.verdict {
            Verdict::Pass => "pass".into(),
            Verdict::Fail { iteration, .. } => format!("fail@{iteration}"),
            Verdict::PreconditionUnmet => "precondition_unmet".into(),
        },
        descent_violations: descent_violations(rec, 1e-12).len(),
    })
}

fn write(path: PathBuf, text: &str, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    files.push(path);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn write_seed(
    cfg: &ExperimentConfig,
    shape: &Shape,
    pot: &PotentialParams,
    hash: &str,
    seed: u64,
    runs: &SeedRuns,
    out: &Path,
    files: &mut Vec<PathBuf>,
) -> Result<Vec<RunSummary>, CliError> {
    let epsilon = cfg.epsilon.unwrap_or(0.0);
    let mut summaries = Vec::new();
    for (planner, rec) in [(Planner::Id, &runs.id), (Planner::Gd, &runs.gd)] {
        let Some(rec) = rec else { continue };
        let stem = format!("{}_seed{seed}", planner.label());
        let header = Header {
            n: rec.initial.len(),
            shape_id: cfg.shape_id(),
            params_hash: hash.to_string(),
            seed,
            mode: planner.label().into(),
        };
        let traj = TrajectoryFile::from_record(header, rec);
        write(out.join(format!("{stem}.traj.csv")), &traj.serialize(), files)?;
        let energy = energy_rows(rec, shape, pot)?;
        write(out.join(format!("{stem}.energy.csv")), &serialize_energy(&energy), files)?;
        let s = summarize(planner, seed, rec, shape, pot, epsilon)?;
        let json = serde_json::to_string_pretty(&s).map_err(|e| CliError::Io(e.to_string()))?;
        write(out.join(format!("{stem}.metrics.json")), &(json + "\n"), files)?;
        summaries.push(s);
    }
    Ok(summaries)
}

pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentReport, CliError> {
    let shape = cfg.build_shape()?;
    let pot = cfg.pot_params()?;
    run_experiment_with(cfg, jobs, |c, seed| plan_seed(c, &shape, &pot, seed))
}

/// [`run_experiment`] with a caller-supplied per-seed runner. A seed whose
/// runner fails is reported as failed; the other seeds are unaffected.
pub fn run_experiment_with<F>(cfg: &ExperimentConfig, jobs: usize, cell: F) -> Result<ExperimentReport, CliError>
where
    F: Fn(&ExperimentConfig, u64) -> Result<SeedRuns, CliError> + Sync,
{
    let shape = cfg.build_shape()?;
    let pot = cfg.pot_params()?;
    let hash = params_hash(cfg, &pot, &cfg.planner_params(0)?);
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let results: Vec<(SeedResult, Vec<PathBuf>)> = pool.install(|| {
        cfg.seeds()
            .par_iter()
            .map(|&seed| {
                let mut files = Vec::new();
                let runs = cell(cfg, seed)
                    .and_then(|r| write_seed(cfg, &shape, &pot, &hash, seed, &r, &out, &mut files))
                    .map_err(|e| e.to_string());
                (SeedResult { seed, runs }, files)
            })
            .collect()
    });
    let mut files = Vec::new();
    let mut seeds = Vec::new();
    for (s, f) in results {
        seeds.push(s);
        files.extend(f);
    }
    let summary = summary_table(cfg, &seeds);
    write(out.join("summary.txt"), &summary, &mut files)?;
    Ok(ExperimentReport { seeds, summary, files })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Terminal energies aggregated over seeds, one row per planner, followed by
/// the per-seed values.
pub fn summary_table(cfg: &ExperimentConfig, seeds: &[SeedResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "shape {}  r {}  N {}  kernel {}  init {}  seeds {}",
        cfg.shape_id(),
        cfg.r.unwrap_or(f64::NAN),
        cfg.n.unwrap_or(0),
        cfg.kernel.as_deref().unwrap_or("?"),
        cfg.init.as_deref().unwrap_or("?"),
        seeds.len()
    );
    let planners: Vec<Planner> = match cfg.mode() {
        Mode::Id => vec![Planner::Id],
        Mode::Gd => vec![Planner::Gd],
        Mode::Both => vec![Planner::Id, Planner::Gd],
    };
    let _ = writeln!(s, "\n{:<8}{:>6}{:>8}{:>14}{:>14}{:>14}", "planner", "runs", "failed", "mean psi", "min psi", "median psi");
    for &p in &planners {
        let mut psi: Vec<f64> = seeds
            .iter()
            .filter_map(|r| r.runs.as_ref().ok())
            .flat_map(|v| v.iter().filter(|x| x.planner == p).map(|x| x.psi))
            .collect();
        let failed = seeds.len() - psi.len();
        if psi.is_empty() {
            let _ = writeln!(s, "{:<8}{:>6}{:>8}{:>14}{:>14}{:>14}", p.label(), 0, failed, "-", "-", "-");
            continue;
        }
        let mean = psi.iter().sum::<f64>() / psi.len() as f64;
        let min = psi.iter().copied().fold(f64::INFINITY, f64::min);
        let med = median(&mut psi);
        let _ = writeln!(
            s,
            "{:<8}{:>6}{:>8}{:>14.6e}{:>14.6e}{:>14.6e}",
            p.label(),
            psi.len(),
            failed,
            mean,
            min,
            med
        );
    }
    let _ = write!(s, "\n{:<8}", "seed");
    for p in &planners {
        let _ = write!(s, "{:>14}", format!("psi {}", p.label()));
    }
    s.push('\n');
    for r in seeds {
        let _ = write!(s, "{:<8}", r.seed);
        match &r.runs {
            Ok(v) => {
                for p in &planners {
                    match v.iter().find(|x| x.planner == *p) {
                        Some(x) => {
                            let _ = write!(s, "{:>14.6e}", x.psi);
                        }
                        None => {
                            let _ = write!(s, "{:>14}", "-");
                        }
                    }
                }
            }
            Err(msg) => {
                for _ in &planners {
                    let _ = write!(s, "{:>14}", "FAILED");
                }
                let _ = write!(s, "  {}", msg.lines().next().unwrap_or(""));
            }
        }
        s.push('\n');
    }
    s
}
