//! Trajectory and energy-trace files.
//!
//! Both are comma-separated text with a `#` header block. Floats use Rust's
//! shortest round-trip formatting, so parse then serialize is the identity
//! on any file this module wrote.

use std::fmt::Write as _;

use idform_core::planner::{evaluate_energy, Phase, RunRecord};
use idform_core::potentials::PotentialParams;
use idform_core::shape::Shape;
use idform_core::Vec2;

use crate::error::CliError;

pub const TRAJECTORY_SCHEMA: &str = "idform-trajectory v1";
pub const ENERGY_SCHEMA: &str = "idform-energy v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub n: usize,
    pub shape_id: String,
    pub params_hash: String,
    pub seed: u64,
    pub mode: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajRow {
    pub iteration: u64,
    pub phase: Phase,
    pub robot: usize,
    pub pos: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFile {
    pub header: Header,
    /// Sorted by `(iteration, robot)`.
    pub rows: Vec<TrajRow>,
}

impl TrajectoryFile {
    /// One row per robot for every snapshot in `record`.
    pub fn from_record(header: Header, record: &RunRecord) -> Self {
        let mut rows = Vec::new();
        for s in &record.snapshots {
            for (robot, p) in s.config.positions().iter().enumerate() {
                rows.push(TrajRow {
                    iteration: s.iteration,
                    phase: s.phase,
                    robot,
                    pos: *p,
                });
            }
        }
        TrajectoryFile { header, rows }
    }

    pub fn iterations(&self) -> Vec<u64> {
        let mut its: Vec<u64> = self.rows.iter().map(|r| r.iteration).collect();
        its.dedup();
        its
    }

    /// Positions at `iteration`, in robot order.
    pub fn positions_at(&self, iteration: u64) -> Option<(Phase, Vec<Vec2>)> {
        let rows: Vec<&TrajRow> = self.rows.iter().filter(|r| r.iteration == iteration).collect();
        let first = rows.first()?;
        Some((first.phase, rows.iter().map(|r| r.pos).collect()))
    }

    pub fn serialize(&self) -> String {
        let h = &self.header;
        let mut s = format!(
            "# {TRAJECTORY_SCHEMA}\n# n={}\n# shape={}\n# params={}\n# seed={}\n# mode={}\niteration,phase,robot,x,y\n",
            h.n, h.shape_id, h.params_hash, h.seed, h.mode
        );
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.iteration, r.phase.label(), r.robot, r.pos.x, r.pos.y);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines().enumerate();
        let mut next_header = |key: &str| -> Result<String, CliError> {
            let (ln, line) = lines.next().ok_or(CliError::Parse {
                line: 0,
                msg: "truncated header".into(),
            })?;
            let body = line.strip_prefix("# ").ok_or_else(|| perr(ln, "expected header line"))?;
            if key.is_empty() {
                return Ok(body.to_string());
            }
            body.strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| perr(ln, format!("expected `{key}=`")))
        };
        let schema = next_header("")?;
        if schema != TRAJECTORY_SCHEMA {
            return Err(perr(0, format!("unsupported schema {schema:?}")));
        }
        let n = next_header("n")?.parse().map_err(|_| perr(1, "bad n"))?;
        let shape_id = next_header("shape")?;
        let params_hash = next_header("params")?;
        let seed = next_header("seed")?.parse().map_err(|_| perr(4, "bad seed"))?;
        let mode = next_header("mode")?;
        match lines.next() {
            Some((_, "iteration,phase,robot,x,y")) => {}
            Some((ln, _)) => return Err(perr(ln, "expected column names")),
            None => return Err(perr(6, "missing column names")),
        }
        let mut rows: Vec<TrajRow> = Vec::new();
        for (ln, line) in lines {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(perr(ln, format!("expected 5 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| perr(ln, format!("bad number {s:?}")));
            let row = TrajRow {
                iteration: f[0].parse().map_err(|_| perr(ln, "bad iteration"))?,
                phase: Phase::from_label(f[1]).ok_or_else(|| perr(ln, format!("unknown phase {:?}", f[1])))?,
                robot: f[2].parse().map_err(|_| perr(ln, "bad robot index"))?,
                pos: Vec2::new(num(f[3])?, num(f[4])?),
            };
            if let Some(prev) = rows.last() {
                if (prev.iteration, prev.robot) >= (row.iteration, row.robot) {
                    return Err(perr(ln, "rows not sorted by (iteration, robot)"));
                }
            }
            rows.push(row);
        }
        Ok(TrajectoryFile {
            header: Header {
                n,
                shape_id,
                params_hash,
                seed,
                mode,
            },
            rows,
        })
    }
}

fn perr(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        line: line + 1,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow {
    pub iteration: u64,
    pub phase: Phase,
    pub psi: f64,
    pub f: f64,
    pub g: f64,
    pub min_distance: f64,
}

/// Energy rows of `record`, starting with the initial configuration.
pub fn energy_rows(record: &RunRecord, shape: &Shape, pot: &PotentialParams) -> Result<Vec<EnergyRow>, CliError> {
    let ev = evaluate_energy(&record.initial, shape, pot)?;
    let mut out = vec![EnergyRow {
        iteration: 0,
        phase: Phase::Initial,
        psi: ev.energy(),
        f: ev.f,
        g: ev.g,
        min_distance: ev.min_distance,
    }];
    out.extend(record.rows.iter().map(|r| EnergyRow {
        iteration: r.iteration,
        phase: r.phase,
        psi: r.energy,
        f: r.f,
        g: r.g,
        min_distance: r.min_distance,
    }));
    Ok(out)
}

pub fn serialize_energy(rows: &[EnergyRow]) -> String {
    let mut s = format!("# {ENERGY_SCHEMA}\niteration,phase,psi,f,g,min_distance\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.iteration,
            r.phase.label(),
            r.psi,
            r.f,
            r.g,
            r.min_distance
        );
    }
    s
}

pub fn parse_energy(text: &str) -> Result<Vec<EnergyRow>, CliError> {
    let mut lines = text.lines().enumerate();
    if lines.next().map(|(_, l)| l) != Some(&format!("# {ENERGY_SCHEMA}")) {
        return Err(perr(0, "not an energy trace"));
    }
    lines.next();
    let mut out = Vec::new();
    for (ln, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(perr(ln, format!("expected 6 fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| perr(ln, format!("bad number {s:?}")));
        out.push(EnergyRow {
            iteration: f[0].parse().map_err(|_| perr(ln, "bad iteration"))?,
            phase: Phase::from_label(f[1]).ok_or_else(|| perr(ln, format!("unknown phase {:?}", f[1])))?,
            psi: num(f[2])?,
            f: num(f[3])?,
            g: num(f[4])?,
            min_distance: num(f[5])?,
        });
    }
    Ok(out)
}
