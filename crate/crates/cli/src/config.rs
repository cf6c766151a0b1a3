//! Experiment configuration files.
//!
//! A config is a flat TOML table. Every key except `r` and the shape source
//! has a default; [`load_config`] fills them in so that serializing the
//! result and parsing it again gives an equal value.
//!
//! ```toml
//! shape = "q"          # built-in generator, or
//! # shape_file = "letter.txt"   (text points or P5 graymap)
//! r = 0.1
//! n = 50
//! init = "random"
//! seeds = [0, 1, 2]
//! mode = "both"
//! ```

use std::path::{Path, PathBuf};

use idform_core::init::{self, InitMode};
use idform_core::planner::{default_epsilon, PlannerParams};
use idform_core::potentials::{Configuration, Kernel, PotentialParams};
use idform_core::shape::Shape;
use idform_core::Vec2;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Id,
    Gd,
    Both,
}

impl Mode {
    pub fn runs_id(self) -> bool {
        matches!(self, Mode::Id | Mode::Both)
    }

    pub fn runs_gd(self) -> bool {
        matches!(self, Mode::Gd | Mode::Both)
    }
}

/// Built-in shape generators.
pub const GENERATORS: [(&str, &str); 2] = [
    ("q", "thick loop with a diagonal tail, sampled on a grid of `shape_spacing`"),
    ("circle", "`shape_points` points on a circle of radius `shape_radius` at the origin"),
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Generator name, exclusive with `shape_file`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape_file: Option<PathBuf>,
    pub shape_spacing: Option<f64>,
    pub shape_radius: Option<f64>,
    pub shape_points: Option<usize>,
    /// Gray level below which a bitmap pixel is a shape point.
    pub bitmap_threshold: Option<u16>,

    pub r: Option<f64>,
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    #[serde(rename = "G0")]
    pub g0: Option<f64>,
    pub kernel: Option<String>,
    pub m: Option<f64>,
    pub n: Option<usize>,

    pub epsilon: Option<f64>,
    pub tau: Option<f64>,
    pub dt: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub s_max: Option<usize>,
    pub step4_cap: Option<usize>,
    pub outer_cap: Option<usize>,
    /// Baseline iteration cap. When unset and both modes run, the baseline
    /// gets the same number of physical iterations as the ID run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gd_cap: Option<usize>,
    #[serde(rename = "M")]
    pub domain_m: Option<f64>,
    pub snapshot_every: Option<usize>,

    pub init: Option<String>,
    /// Minimum pairwise spacing of the initial placement.
    pub init_spacing: Option<f64>,
    /// Side of the corner box.
    pub corner_side: Option<f64>,
    pub seeds: Option<Vec<u64>>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
}

fn bad(key: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn req<T: Copy>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| bad(key, "missing (load the config through load_config)"))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let key = msg
                .strip_prefix("unknown field `")
                .and_then(|s| s.split('`').next())
                .unwrap_or("config")
                .to_string();
            CliError::Config { key, msg }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Validates the given keys and fills every unset one. Relative shape
    /// paths are resolved against `base`.
    pub fn resolve(mut self, base: &Path) -> Result<Self, CliError> {
        let r = self.r.ok_or_else(|| bad("r", "r is required"))?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(bad("r", format!("r must be positive, got {r}")));
        }
        match (&self.shape, &self.shape_file) {
            (Some(_), Some(_)) => return Err(bad("shape", "give either shape or shape_file, not both")),
            (None, None) => return Err(bad("shape", "a shape generator or shape_file is required")),
            (Some(g), None) if !GENERATORS.iter().any(|(n, _)| n == g) => {
                return Err(bad("shape", format!("unknown generator {g:?}")));
            }
            _ => {}
        }
        if let Some(p) = &self.shape_file {
            let p = if p.is_relative() { base.join(p) } else { p.clone() };
            if !p.exists() {
                return Err(bad("shape_file", format!("{} does not exist", p.display())));
            }
            self.shape_file = Some(p);
        }
        self.shape_spacing.get_or_insert(0.1);
        self.shape_radius.get_or_insert(4.0);
        self.shape_points.get_or_insert(200);
        self.bitmap_threshold.get_or_insert(128);

        let big_r = *self.big_r.get_or_insert(10.0 * r);
        if !(big_r > r) {
            return Err(bad("R", "R must exceed r"));
        }
        let kernel: Kernel = self
            .kernel
            .get_or_insert_with(|| Kernel::Cotangent.to_string())
            .parse()
            .map_err(|e: idform_core::Error| bad("kernel", e.to_string()))?;
        let g0 = *self.g0.get_or_insert(0.01);
        let mut pot = PotentialParams::new(r, big_r, g0, kernel).map_err(|e| bad("G0", e.to_string()))?;
        if let Some(m) = self.m {
            pot = pot.with_m(m).map_err(|e| bad("m", e.to_string()))?;
        }
        self.m = Some(pot.m);
        if self.n.is_none_or(|n| n == 0) {
            return Err(bad("n", "n (robot count) is required and positive"));
        }

        let shape = self.build_shape()?;
        self.epsilon.get_or_insert(default_epsilon(&shape));
        self.tau.get_or_insert(1e-4 * r);
        self.dt.get_or_insert(0.1 * r);
        self.alpha.get_or_insert(r);
        self.beta.get_or_insert(10.0);
        let s_max = *self.s_max.get_or_insert(2000);
        self.step4_cap.get_or_insert(10 * s_max);
        self.outer_cap.get_or_insert(100);
        self.domain_m.get_or_insert(6.0);
        self.snapshot_every.get_or_insert(0);
        let mode: InitMode = self
            .init
            .get_or_insert_with(|| "random".into())
            .parse()
            .map_err(|e: idform_core::Error| bad("init", e.to_string()))?;
        if mode == InitMode::OnShape {
            return Err(bad("init", "init must be corner or random"));
        }
        self.init_spacing.get_or_insert(pot.barrier_distance());
        self.corner_side.get_or_insert(2.0 * big_r);
        if self.seeds.get_or_insert_with(|| vec![0]).is_empty() {
            return Err(bad("seeds", "at least one seed"));
        }
        self.mode.get_or_insert(Mode::Both);
        self.out.get_or_insert_with(|| PathBuf::from("out"));
        self.planner_params(0)?.validate().map_err(|e| bad(param_key(&e), e.to_string()))?;
        Ok(self)
    }

    pub fn build_shape(&self) -> Result<Shape, CliError> {
        let spacing = self.shape_spacing.unwrap_or(0.1);
        let shape = match (&self.shape, &self.shape_file) {
            (Some(g), _) if g == "q" => Shape::q_like(1.0, spacing),
            (Some(g), _) if g == "circle" => Shape::circle(
                Vec2::zeros(),
                self.shape_radius.unwrap_or(4.0),
                self.shape_points.unwrap_or(200),
            ),
            (Some(g), _) => return Err(bad("shape", format!("unknown generator {g:?}"))),
            (None, Some(p)) => {
                let bytes = std::fs::read(p).map_err(|e| bad("shape_file", format!("{}: {e}", p.display())))?;
                if bytes.starts_with(b"P5") {
                    Shape::from_pgm(&bytes, self.bitmap_threshold.unwrap_or(128), self.domain_m.unwrap_or(6.0))
                } else {
                    Shape::load(p)
                }
            }
            (None, None) => return Err(bad("shape", "no shape source")),
        };
        shape.map_err(|e| bad(if self.shape.is_some() { "shape" } else { "shape_file" }, e.to_string()))
    }

    /// Stable description of the shape source.
    pub fn shape_id(&self) -> String {
        match (&self.shape, &self.shape_file) {
            (Some(g), _) if g == "circle" => format!(
                "circle(radius={},points={})",
                self.shape_radius.unwrap_or(4.0),
                self.shape_points.unwrap_or(200)
            ),
            (Some(g), _) => format!("{g}(spacing={})", self.shape_spacing.unwrap_or(0.1)),
            (None, Some(p)) => format!(
                "file({})",
                p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
            ),
            (None, None) => String::new(),
        }
    }

    pub fn pot_params(&self) -> Result<PotentialParams, CliError> {
        let kernel: Kernel = self
            .kernel
            .as_deref()
            .unwrap_or("cot")
            .parse()
            .map_err(|e: idform_core::Error| bad("kernel", e.to_string()))?;
        let r = req(self.r, "r")?;
        let p = PotentialParams::new(r, req(self.big_r, "R")?, req(self.g0, "G0")?, kernel)
            .map_err(|e| bad("R", e.to_string()))?;
        match self.m {
            Some(m) => p.with_m(m).map_err(|e| bad("m", e.to_string())),
            None => Ok(p),
        }
    }

    /// Planner settings for one seed. `gd_cap` falls back to the largest
    /// possible ID budget.
    pub fn planner_params(&self, seed: u64) -> Result<PlannerParams, CliError> {
        let s_max = req(self.s_max, "s_max")?;
        let step4_cap = req(self.step4_cap, "step4_cap")?;
        let outer_cap = req(self.outer_cap, "outer_cap")?;
        Ok(PlannerParams {
            epsilon: req(self.epsilon, "epsilon")?,
            tau: req(self.tau, "tau")?,
            dt: req(self.dt, "dt")?,
            alpha: req(self.alpha, "alpha")?,
            beta: req(self.beta, "beta")?,
            s_max,
            step4_cap,
            domain_m: req(self.domain_m, "M")?,
            outer_cap,
            gd_cap: self.gd_cap.unwrap_or(outer_cap * (s_max + step4_cap)),
            seed,
            snapshot_every: req(self.snapshot_every, "snapshot_every")?,
        })
    }

    pub fn initial(&self, seed: u64) -> Result<Configuration, idform_core::Error> {
        let n = self.n.unwrap_or(0);
        let m = self.domain_m.unwrap_or(6.0);
        let spacing = self.init_spacing.unwrap_or(0.0);
        match self.init.as_deref().unwrap_or("random").parse()? {
            InitMode::Corner => init::corner(n, m, self.corner_side.unwrap_or(2.0), spacing, seed),
            _ => init::random(n, m, spacing, seed),
        }
    }

    pub fn seeds(&self) -> &[u64] {
        self.seeds.as_deref().unwrap_or(&[0])
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Both)
    }

    /// Shape capacity estimate `floor(points * spacing / m)`, in robots.
    pub fn capacity(&self, shape: &Shape) -> usize {
        let pot_m = self.pot_params().map(|p| p.barrier_distance()).unwrap_or(1.0);
        (shape.len() as f64 * shape.resolution() / pot_m).floor() as usize
    }
}

fn param_key(e: &idform_core::Error) -> &'static str {
    match e {
        idform_core::Error::InvalidParameter { name, .. } => name,
        _ => "config",
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, CliError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    ExperimentConfig::parse(&text)?.resolve(base)
}
