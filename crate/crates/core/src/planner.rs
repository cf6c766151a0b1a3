//! Intermittent-diffusion motion planning and the plain gradient-descent
//! baseline.
//!
//! One ID cycle:
//!
//! 1. sample `sigma = alpha d`, `V = beta t` with `d, t` uniform on `(0, 1)`;
//! 2. simulate the diffusion offline from `X_opt` for `floor(V / dt)`
//!    Euler–Maruyama steps and keep only the endpoint `Y^`;
//! 3. move the robots by gradient descent on `F^ + G` toward `Y^`;
//! 4. descend on `F + G` toward the shape, updating `X_opt` on every strict
//!    improvement.
//!
//! Cycles repeat until `Psi(X_opt) <= epsilon` or `outer_cap` cycles ran.
//! Steps 3 and 4 stop once the largest per-robot displacement of an
//! iteration drops below `tau`, or at their iteration caps.

use crate::dynamics::{
    boundary_map, euler_maruyama_step, euler_step, min_pairwise_distance, neighbor_pairs,
    RngStream, StepParams,
};
use crate::error::{invalid, Error, Result};
use crate::potentials::{
    add_grad_repelling, repelling, Configuration, PotentialParams, TargetSet,
};
use crate::shape::Shape;
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerParams {
    pub epsilon: f64,
    pub tau: f64,
    pub dt: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Iteration cap of the descent toward the diffusion targets.
    pub s_max: usize,
    /// Iteration cap of the descent toward the shape.
    pub step4_cap: usize,
    pub domain_m: f64,
    /// Maximum number of ID cycles.
    pub outer_cap: usize,
    /// Iteration cap of the gradient-descent baseline.
    pub gd_cap: usize,
    pub seed: u64,
    /// Store a physical snapshot every this many iterations (0: phase
    /// boundaries only).
    pub snapshot_every: usize,
}

impl PlannerParams {
    /// Tabulated settings for robot radius `r` (`dt = 0.1 r`, `alpha = r`,
    /// `beta = 10`, `M = 6`) plus this crate's defaults for the rest.
    pub fn table1(r: f64, shape: &Shape) -> Self {
        let s_max = 2000;
        let step4_cap = 10 * s_max;
        let outer_cap = 100;
        PlannerParams {
            epsilon: default_epsilon(shape),
            tau: 1e-4 * r,
            dt: 0.1 * r,
            alpha: r,
            beta: 10.0,
            s_max,
            step4_cap,
            domain_m: 6.0,
            outer_cap,
            gd_cap: outer_cap * (s_max + step4_cap),
            seed: 0,
            snapshot_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("tau", self.tau),
            ("dt", self.dt),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("M", self.domain_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("s_max", self.s_max),
            ("step4_cap", self.step4_cap),
            ("outer_cap", self.outer_cap),
            ("gd_cap", self.gd_cap),
        ] {
            if v == 0 {
                return Err(invalid(name, "must be at least 1"));
            }
        }
        Ok(())
    }

    fn step(&self, sigma: f64) -> Result<StepParams> {
        StepParams::new(self.dt, sigma, self.domain_m)
    }
}

/// `2 h^2` for shape resolution `h`; `1e-6` for single-point shapes.
pub fn default_epsilon(shape: &Shape) -> f64 {
    let h = shape.resolution();
    if h > 0.0 {
        2.0 * h * h
    } else {
        1e-6
    }
}

/// Diffusion strength and duration of one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdSchedule {
    pub cycle: usize,
    pub sigma: f64,
    pub duration: f64,
}

impl IdSchedule {
    pub fn sample(cycle: usize, alpha: f64, beta: f64, rng: &mut RngStream) -> Self {
        let d = rng.uniform_open(2 * cycle as u64);
        let t = rng.uniform_open(2 * cycle as u64 + 1);
        IdSchedule {
            cycle,
            sigma: alpha * d,
            duration: beta * t,
        }
    }

    pub fn steps(&self, dt: f64) -> usize {
        (self.duration / dt).floor() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Snapshot label for the starting configuration.
    Initial,
    VirtualDiffusion,
    DescendToTargets,
    DescendToShape,
}

impl Phase {
    pub fn is_physical(self) -> bool {
        !matches!(self, Phase::VirtualDiffusion)
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::Initial => "initial",
            Phase::VirtualDiffusion => "virtual",
            Phase::DescendToTargets => "targets",
            Phase::DescendToShape => "shape",
        }
    }

    pub fn from_label(s: &str) -> Option<Phase> {
        Some(match s {
            "initial" => Phase::Initial,
            "virtual" => Phase::VirtualDiffusion,
            "targets" => Phase::DescendToTargets,
            "shape" => Phase::DescendToShape,
            _ => return None,
        })
    }
}

/// State after one iteration. `iteration` counts all rows of a run, virtual
/// ones included, starting at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub iteration: u64,
    pub cycle: usize,
    pub phase: Phase,
    pub energy: f64,
    pub f: f64,
    pub g: f64,
    pub min_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: u64,
    pub phase: Phase,
    pub config: Configuration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ConvergedEpsilon,
    OuterCapReached,
    /// Baseline only: an iteration moved every robot less than `tau`.
    Stalled,
    /// Baseline only.
    IterationCapReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub initial: Configuration,
    pub initial_energy: f64,
    pub initial_min_distance: f64,
    pub rows: Vec<Row>,
    pub snapshots: Vec<Snapshot>,
    pub x_opt: Configuration,
    pub x_opt_energy: f64,
    pub status: Termination,
    pub cycles: usize,
    pub aborted_cycles: usize,
    pub step4_cap_hits: usize,
    pub schedules: Vec<IdSchedule>,
}

impl RunRecord {
    fn start(initial: &Configuration, eval: &Evaluation) -> Self {
        RunRecord {
            initial: initial.clone(),
            initial_energy: eval.energy(),
            initial_min_distance: eval.min_distance,
            rows: Vec::new(),
            snapshots: vec![Snapshot {
                iteration: 0,
                phase: Phase::Initial,
                config: initial.clone(),
            }],
            x_opt: initial.clone(),
            x_opt_energy: eval.energy(),
            status: Termination::OuterCapReached,
            cycles: 0,
            aborted_cycles: 0,
            step4_cap_hits: 0,
            schedules: Vec::new(),
        }
    }

    fn next_iteration(&self) -> u64 {
        self.rows.last().map_or(1, |r| r.iteration + 1)
    }

    fn push(&mut self, cycle: usize, phase: Phase, eval: &Evaluation) -> u64 {
        let iteration = self.next_iteration();
        self.rows.push(Row {
            iteration,
            cycle,
            phase,
            energy: eval.energy(),
            f: eval.f,
            g: eval.g,
            min_distance: eval.min_distance,
        });
        iteration
    }

    fn snapshot(&mut self, iteration: u64, phase: Phase, config: &Configuration) {
        if self.snapshots.last().is_some_and(|s| s.iteration == iteration) {
            return;
        }
        self.snapshots.push(Snapshot {
            iteration,
            phase,
            config: config.clone(),
        });
    }

    pub fn physical_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.phase.is_physical())
    }

    pub fn physical_iterations(&self) -> usize {
        self.physical_rows().count()
    }

    /// Configuration after the last physical iteration.
    pub fn final_config(&self) -> &Configuration {
        self.snapshots
            .iter()
            .rev()
            .find(|s| s.phase.is_physical())
            .map_or(&self.initial, |s| &s.config)
    }
}

/// What the attraction gradient pulls toward.
#[derive(Clone, Copy)]
enum Pull<'a> {
    Shape,
    Targets(&'a TargetSet),
}

/// Energy terms, gradient and closest pair at one configuration.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub f: f64,
    pub g: f64,
    pub grad: Vec<Vec2>,
    pub min_distance: f64,
}

impl Evaluation {
    pub fn energy(&self) -> f64 {
        self.f + self.g
    }
}

fn evaluate(
    config: &Configuration,
    shape: &Shape,
    params: &PotentialParams,
    pull: Pull<'_>,
) -> Result<Evaluation> {
    let n = config.len() as f64;
    let pairs = neighbor_pairs(config, params.cutoff_distance());
    let mut f = 0.0;
    let mut grad = Vec::with_capacity(config.len());
    for (i, x) in config.positions().iter().enumerate() {
        let (k, d2) = shape.nearest(*x);
        f += d2;
        let toward = match pull {
            Pull::Shape => shape.points()[k],
            Pull::Targets(t) => t.targets[i],
        };
        grad.push((x - toward) * (2.0 / n));
    }
    f /= n;
    let g = repelling(config, params, &pairs);
    add_grad_repelling(config, params, &pairs, &mut grad)?;
    let min_distance = if pairs.is_empty() {
        min_pairwise_distance(config)
    } else {
        pairs.min_distance(config)
    };
    Ok(Evaluation {
        f,
        g,
        grad,
        min_distance,
    })
}

/// `Psi`, its gradient and the closest pair distance at `config`.
pub fn evaluate_energy(
    config: &Configuration,
    shape: &Shape,
    params: &PotentialParams,
) -> Result<Evaluation> {
    evaluate(config, shape, params, Pull::Shape)
}

fn check_targets(config: &Configuration, targets: &TargetSet) -> Result<()> {
    if targets.len() != config.len() {
        return Err(Error::LengthMismatch {
            expected: config.len(),
            got: targets.len(),
        });
    }
    Ok(())
}

/// Offline diffusion from `start`; returns the endpoint as targets. Rows are
/// appended to `record` labelled [`Phase::VirtualDiffusion`].
#[allow(clippy::too_many_arguments)]
pub fn virtual_diffusion(
    start: &Configuration,
    shape: &Shape,
    pot: &PotentialParams,
    schedule: &IdSchedule,
    dt: f64,
    domain_m: f64,
    rng: &mut RngStream,
    record: Option<&mut RunRecord>,
) -> Result<TargetSet> {
    let step = StepParams::new(dt, schedule.sigma, domain_m)?;
    let mut y = Configuration::new(
        start
            .positions()
            .iter()
            .map(|p| boundary_map(*p, domain_m))
            .collect(),
    )?;
    let mut rows = Vec::new();
    let mut ev = evaluate(&y, shape, pot, Pull::Shape)?;
    for _ in 0..schedule.steps(dt) {
        y = euler_maruyama_step(&y, &ev.grad, &step, rng)?;
        ev = evaluate(&y, shape, pot, Pull::Shape)?;
        rows.push(ev.clone());
    }
    if let Some(rec) = record {
        let mut last = None;
        for ev in &rows {
            last = Some(rec.push(schedule.cycle, Phase::VirtualDiffusion, ev));
        }
        if let Some(it) = last {
            rec.snapshot(it, Phase::VirtualDiffusion, &y);
        }
    }
    Ok(TargetSet::from(&y))
}

#[allow(clippy::too_many_arguments)]
fn descend(
    start: &Configuration,
    shape: &Shape,
    pot: &PotentialParams,
    pull: Pull<'_>,
    params: &PlannerParams,
    cap: usize,
    phase: Phase,
    cycle: usize,
    record: &mut RunRecord,
) -> Result<(Configuration, bool)> {
    let step = params.step(0.0)?;
    let mut x = start.clone();
    let mut ev = evaluate(&x, shape, pot, pull)?;
    let mut hit_cap = true;
    let mut last = None;
    for k in 1..=cap {
        let next = euler_step(&x, &ev.grad, &step)?;
        let moved = next.max_displacement(&x);
        ev = evaluate(&next, shape, pot, pull)?;
        x = next;
        let it = record.push(cycle, phase, &ev);
        last = Some(it);
        if phase == Phase::DescendToShape && ev.energy() < record.x_opt_energy {
            record.x_opt = x.clone();
            record.x_opt_energy = ev.energy();
        }
        if params.snapshot_every > 0 && k % params.snapshot_every == 0 {
            record.snapshot(it, phase, &x);
        }
        if moved < params.tau {
            hit_cap = false;
            break;
        }
    }
    if let Some(it) = last {
        record.snapshot(it, phase, &x);
    }
    Ok((x, hit_cap))
}

/// Gradient descent on `F^ + G` toward `targets`.
pub fn descend_to_targets(
    start: &Configuration,
    targets: &TargetSet,
    shape: &Shape,
    pot: &PotentialParams,
    params: &PlannerParams,
    cycle: usize,
    record: &mut RunRecord,
) -> Result<Configuration> {
    check_targets(start, targets)?;
    descend(
        start,
        shape,
        pot,
        Pull::Targets(targets),
        params,
        params.s_max,
        Phase::DescendToTargets,
        cycle,
        record,
    )
    .map(|(x, _)| x)
}

/// Gradient descent on `F + G`, updating the record's `X_opt`.
pub fn descend_to_shape(
    start: &Configuration,
    shape: &Shape,
    pot: &PotentialParams,
    params: &PlannerParams,
    cycle: usize,
    record: &mut RunRecord,
) -> Result<Configuration> {
    let (x, hit_cap) = descend(
        start,
        shape,
        pot,
        Pull::Shape,
        params,
        params.step4_cap,
        Phase::DescendToShape,
        cycle,
        record,
    )?;
    if hit_cap {
        record.step4_cap_hits += 1;
    }
    Ok(x)
}

/// Full intermittent-diffusion planner.
pub fn plan_id(
    initial: &Configuration,
    shape: &Shape,
    pot: &PotentialParams,
    params: &PlannerParams,
) -> Result<RunRecord> {
    params.validate()?;
    pot.validate()?;
    let ev0 = evaluate(initial, shape, pot, Pull::Shape)?;
    let mut record = RunRecord::start(initial, &ev0);
    let mut rng = RngStream::new(params.seed);
    let mut x = initial.clone();
    while record.x_opt_energy > params.epsilon && record.cycles < params.outer_cap {
        record.cycles += 1;
        let cycle = record.cycles;
        let schedule = IdSchedule::sample(cycle, params.alpha, params.beta, &mut rng);
        record.schedules.push(schedule);
        let start = record.x_opt.clone();
        let targets = match virtual_diffusion(
            &start,
            shape,
            pot,
            &schedule,
            params.dt,
            params.domain_m,
            &mut rng,
            Some(&mut record),
        ) {
            Ok(t) => t,
            Err(Error::SingularPair { .. } | Error::NonFiniteGradient { .. }) => {
                record.aborted_cycles += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        x = descend_to_targets(&x, &targets, shape, pot, params, cycle, &mut record)?;
        x = descend_to_shape(&x, shape, pot, params, cycle, &mut record)?;
    }
    record.status = if record.x_opt_energy <= params.epsilon {
        Termination::ConvergedEpsilon
    } else {
        Termination::OuterCapReached
    };
    Ok(record)
}

/// Gradient descent on `Psi` alone.
pub fn plan_gd(
    initial: &Configuration,
    shape: &Shape,
    pot: &PotentialParams,
    params: &PlannerParams,
) -> Result<RunRecord> {
    params.validate()?;
    pot.validate()?;
    let ev0 = evaluate(initial, shape, pot, Pull::Shape)?;
    let mut record = RunRecord::start(initial, &ev0);
    let (_, hit_cap) = descend(
        initial,
        shape,
        pot,
        Pull::Shape,
        params,
        params.gd_cap,
        Phase::DescendToShape,
        0,
        &mut record,
    )?;
    record.status = if hit_cap {
        Termination::IterationCapReached
    } else {
        Termination::Stalled
    };
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Kernel;
    use approx::assert_relative_eq;

    fn one(x: f64, y: f64) -> Configuration {
        Configuration::new(vec![Vec2::new(x, y)]).unwrap()
    }

    fn params(shape: &Shape) -> PlannerParams {
        let mut p = PlannerParams::table1(0.1, shape);
        p.s_max = 200;
        p.step4_cap = 2000;
        p.outer_cap = 5;
        p.gd_cap = 5000;
        p
    }

    fn pot() -> PotentialParams {
        PotentialParams::table1(0.1, Kernel::Cotangent).unwrap()
    }

    #[test]
    fn table1_defaults() {
        let s = Shape::circle(Vec2::zeros(), 2.0, 100).unwrap();
        let p = PlannerParams::table1(0.1, &s);
        assert_relative_eq!(p.dt, 0.01);
        assert_relative_eq!(p.alpha, 0.1);
        assert_eq!(p.beta, 10.0);
        assert_eq!(p.domain_m, 6.0);
        assert_eq!(p.step4_cap, 10 * p.s_max);
        let h = s.resolution();
        assert_relative_eq!(p.epsilon, 2.0 * h * h);
        p.validate().unwrap();
        assert!(PlannerParams { tau: 0.0, ..p }.validate().is_err());
        assert!(PlannerParams { s_max: 0, ..p }.validate().is_err());
    }

    #[test]
    fn schedule_bounds() {
        let mut rng = RngStream::new(5);
        for k in 1..200 {
            let s = IdSchedule::sample(k, 0.1, 10.0, &mut rng);
            assert!(s.sigma > 0.0 && s.sigma < 0.1);
            assert!(s.duration > 0.0 && s.duration < 10.0);
        }
    }

    #[test]
    fn zero_duration_diffusion_returns_start() {
        let s = Shape::new(vec![Vec2::zeros()]).unwrap();
        let c = one(1.0, 2.0);
        let sched = IdSchedule {
            cycle: 1,
            sigma: 1e-9,
            duration: 0.005,
        };
        let mut rng = RngStream::new(0);
        let t = virtual_diffusion(&c, &s, &pot(), &sched, 0.01, 6.0, &mut rng, None).unwrap();
        assert_eq!(t.targets, c.positions());
    }

    #[test]
    fn diffusion_is_seeded() {
        let s = Shape::circle(Vec2::zeros(), 2.0, 64).unwrap();
        let c = Configuration::new(vec![Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.5)]).unwrap();
        let sched = IdSchedule {
            cycle: 1,
            sigma: 0.3,
            duration: 1.0,
        };
        let run = |seed| {
            let mut rng = RngStream::new(seed);
            virtual_diffusion(&c, &s, &pot(), &sched, 0.01, 6.0, &mut rng, None).unwrap()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn descend_to_targets_examples() {
        let s = Shape::new(vec![Vec2::new(5.0, 5.0)]).unwrap();
        let p = params(&s);
        let c = one(1.0, 0.0);
        let mut rec = RunRecord::start(&c, &evaluate_energy(&c, &s, &pot()).unwrap());
        // target = start: one iteration, no motion
        let x = descend_to_targets(&c, &TargetSet::from(&c), &s, &pot(), &p, 1, &mut rec).unwrap();
        assert_eq!(x, c);
        assert_eq!(rec.rows.len(), 1);

        // x_{n+1} = x_n (1 - 2 dt / N), stop when the step is below tau
        let origin = TargetSet::new(vec![Vec2::zeros()]);
        let p = PlannerParams { s_max: 10_000, ..p };
        let mut rec = RunRecord::start(&c, &evaluate_energy(&c, &s, &pot()).unwrap());
        let x = descend_to_targets(&c, &origin, &s, &pot(), &p, 1, &mut rec).unwrap();
        let k = rec.rows.len() as i32;
        let q: f64 = 1.0 - 2.0 * p.dt;
        assert_relative_eq!(x[0].x, q.powi(k), max_relative = 1e-10);
        assert!(q.powi(k - 1) * 2.0 * p.dt < p.tau);
        assert!(q.powi(k - 2) * 2.0 * p.dt >= p.tau);

        // cap of one iteration dominates tau
        let capped = PlannerParams { s_max: 1, ..p };
        let mut rec = RunRecord::start(&c, &evaluate_energy(&c, &s, &pot()).unwrap());
        descend_to_targets(&c, &origin, &s, &pot(), &capped, 1, &mut rec).unwrap();
        assert_eq!(rec.rows.len(), 1);
    }

    #[test]
    fn descend_to_shape_recurrence() {
        let s = Shape::new(vec![Vec2::zeros()]).unwrap();
        let p = PlannerParams { dt: 0.1, ..params(&s) };
        let c = one(1.0, 0.0);
        let mut rec = RunRecord::start(&c, &evaluate_energy(&c, &s, &pot()).unwrap());
        descend_to_shape(&c, &s, &pot(), &p, 1, &mut rec).unwrap();
        for (n, row) in rec.rows.iter().enumerate() {
            let x = 0.8f64.powi(n as i32 + 1);
            assert_relative_eq!(row.energy, x * x, max_relative = 1e-10);
        }
        assert_relative_eq!(rec.x_opt_energy, rec.rows.last().unwrap().energy);
    }

    #[test]
    fn on_shape_start_converges_immediately() {
        let s = Shape::circle(Vec2::zeros(), 3.0, 120).unwrap();
        let pot = pot();
        let c = crate::init::on_shape(6, &s, pot.cutoff_distance() * 1.01, 1).unwrap();
        let p = params(&s);
        let rec = plan_id(&c, &s, &pot, &p).unwrap();
        assert_eq!(rec.status, Termination::ConvergedEpsilon);
        assert_eq!(rec.cycles, 0);
        assert!(rec.rows.is_empty());
        let mut rec = RunRecord::start(&c, &evaluate_energy(&c, &s, &pot).unwrap());
        let x = descend_to_shape(&c, &s, &pot, &p, 1, &mut rec).unwrap();
        assert_eq!(x, c);
        assert_eq!(rec.rows.len(), 1);
        assert_eq!(rec.rows[0].energy, 0.0);
    }

    #[test]
    fn id_run_is_reproducible_and_ordered() {
        let s = Shape::circle(Vec2::zeros(), 2.0, 100).unwrap();
        let pot = pot();
        let c = crate::init::corner(8, 6.0, 2.0, pot.barrier_distance(), 3).unwrap();
        let p = PlannerParams { seed: 21, ..params(&s) };
        let a = plan_id(&c, &s, &pot, &p).unwrap();
        let b = plan_id(&c, &s, &pot, &p).unwrap();
        assert_eq!(a, b);
        assert!(a.cycles >= 1);
        // phases of each cycle appear in order
        let mut last = (0usize, 0u8);
        for row in &a.rows {
            let rank = match row.phase {
                Phase::VirtualDiffusion => 0,
                Phase::DescendToTargets => 1,
                Phase::DescendToShape => 2,
                Phase::Initial => unreachable!(),
            };
            assert!((row.cycle, rank) >= last);
            last = (row.cycle, rank);
        }
        // X_opt is the best of the initial and the descend-to-shape energies
        let best = a
            .rows
            .iter()
            .filter(|r| r.phase == Phase::DescendToShape)
            .map(|r| r.energy)
            .fold(a.initial_energy, f64::min);
        assert_eq!(a.x_opt_energy, best);
    }

    #[test]
    fn gd_is_monotone_and_convex_case_matches_id() {
        let s = Shape::new(vec![Vec2::new(0.5, -0.5)]).unwrap();
        let pot = pot();
        let c = one(2.0, 1.0);
        let p = params(&s);
        let gd = plan_gd(&c, &s, &pot, &p).unwrap();
        let mut prev = gd.initial_energy;
        for r in &gd.rows {
            assert!(r.energy <= prev);
            prev = r.energy;
        }
        let id = plan_id(&c, &s, &pot, &PlannerParams { epsilon: 1e-4, ..p }).unwrap();
        let a = gd.final_config()[0];
        let b = id.x_opt[0];
        // both end within the tau-implied radius of the single minimiser
        let radius = p.tau / (2.0 * p.dt) * 1.5;
        assert!((a - s.points()[0]).norm() < radius.max(1e-2));
        assert!((b - s.points()[0]).norm() < 1e-2);
    }
}
