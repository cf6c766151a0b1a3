//! The `verify` suite: gradient oracles, collision certificates and the
//! Gibbs sampling check, each reduced to a pass/fail line.

use idform_core::analysis::{
    collision_certificate, descent_violations, estimate_lipschitz, fd_gradient, gibbs_check, relative_error,
    GibbsCheck, GibbsSettings, Sampler,
};
use idform_core::dynamics::{neighbor_pairs, RngStream};
use idform_core::init;
use idform_core::planner::{plan_gd, plan_id, PlannerParams};
use idform_core::potentials::{
    grad_repelling, grad_shape_potential, grad_target_potential, repelling, shape_potential, target_potential,
    Configuration, Kernel, PotentialParams, TargetSet,
};
use idform_core::shape::Shape;
use idform_core::Vec2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-5;
/// Shape queries closer than this to a tie between two shape points are
/// skipped by the shape-gradient oracle.
pub const TIE_MARGIN: f64 = 1e-3;

/// Worst relative error over the instances checked for one gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub instances: usize,
    pub skipped: usize,
    pub worst: f64,
}

fn tie_gap(shape: &Shape, x: Vec2) -> f64 {
    let mut best = [f64::INFINITY; 2];
    for p in shape.points() {
        let d = (x - p).norm();
        if d < best[0] {
            best = [d, best[0]];
        } else if d < best[1] {
            best[1] = d;
        }
    }
    best[1] - best[0]
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, spacing: f64) -> Result<Configuration, CliError> {
    let half = spacing * (n as f64).sqrt();
    Ok(init::in_box(
        n,
        Vec2::new(-half, -half),
        Vec2::new(half, half),
        spacing,
        rng.gen(),
    )?)
}

/// Analytic against central-difference gradients on `instances` random
/// feasible configurations with at most 20 robots. Returns results for
/// `F`, `G` (exp), `G` (cot) and `F^` in that order.
pub fn gradient_oracles(instances: usize, seed: u64) -> Result<Vec<(&'static str, OracleResult)>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut res = OracleResult { instances: 0, skipped: 0, worst: 0.0 };
    while res.instances < instances {
        let pts: Vec<Vec2> = (0..rng.gen_range(20..200))
            .map(|_| Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
            .collect();
        let shape = Shape::new(pts)?;
        let n = rng.gen_range(1..=20);
        let c = random_instance(&mut rng, n, 0.3)?;
        if c.positions().iter().any(|x| tie_gap(&shape, *x) <= TIE_MARGIN) {
            res.skipped += 1;
            continue;
        }
        let fd = fd_gradient(|x| shape_potential(x, &shape), &c, FD_STEP)?;
        res.worst = res.worst.max(relative_error(&fd, &grad_shape_potential(&c, &shape), 1e-8));
        res.instances += 1;
    }
    out.push(("grad F", res));

    for (name, kernel) in [("grad G (exp)", Kernel::ExpBump), ("grad G (cot)", Kernel::Cotangent)] {
        let pot = PotentialParams::table1(0.1, kernel)?;
        let mut res = OracleResult { instances: 0, skipped: 0, worst: 0.0 };
        for _ in 0..instances {
            let n = rng.gen_range(2..=20);
            // packed at the barrier distance so most pairs interact
            let c = random_instance(&mut rng, n, pot.barrier_distance())?;
            let pairs = |x: &Configuration| neighbor_pairs(x, pot.cutoff_distance());
            let fd = fd_gradient(|x| repelling(x, &pot, &pairs(x)), &c, FD_STEP)?;
            let exact = grad_repelling(&c, &pot, &pairs(&c))?;
            res.worst = res.worst.max(relative_error(&fd, &exact, 1e-8));
            res.instances += 1;
        }
        out.push((name, res));
    }

    let mut res = OracleResult { instances: 0, skipped: 0, worst: 0.0 };
    for _ in 0..instances {
        let n = rng.gen_range(1..=20);
        let c = random_instance(&mut rng, n, 0.1)?;
        let t = TargetSet::new(
            (0..n)
                .map(|_| Vec2::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)))
                .collect(),
        );
        let fd = fd_gradient(|x| target_potential(x, &t).unwrap_or(f64::NAN), &c, FD_STEP)?;
        res.worst = res.worst.max(relative_error(&fd, &grad_target_potential(&c, &t)?, 1e-8));
        res.instances += 1;
    }
    out.push(("grad F^", res));
    Ok(out)
}

/// The two-well Gibbs check: one robot, shape `{(-1, 0), (1, 0)}`.
pub fn two_well_gibbs(n_steps: usize, seed: u64) -> Result<GibbsCheck, CliError> {
    let shape = Shape::new(vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)])?;
    let settings = GibbsSettings {
        sigma: 0.8,
        dt: 1e-3,
        n_steps,
        burn_in: 100_000,
        grid_resolution: 32,
        domain_m: 6.0,
        start: Vec2::zeros(),
    };
    Ok(gibbs_check(&shape, &settings, &mut RngStream::new(seed))?)
}

/// Relative difference of the two half-plane masses.
pub fn well_asymmetry(g: &GibbsCheck) -> f64 {
    let (l, r) = g.empirical_halves();
    (l - r).abs() / l.max(r)
}

/// Runs the whole suite. `quick` shrinks every check to a few seconds.
pub fn run_verify(quick: bool, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (name, r) in gradient_oracles(if quick { 20 } else { 100 }, seed)? {
        checks.push(Check {
            name: name.to_string(),
            passed: r.worst <= FD_TOLERANCE,
            detail: format!(
                "{} instances, {} skipped near ties, worst relative error {:.2e} (tolerance {FD_TOLERANCE:.0e})",
                r.instances, r.skipped, r.worst
            ),
        });
    }

    let shape = Shape::circle(Vec2::zeros(), 4.5, 200)?;
    let pot = PotentialParams::table1(0.1, Kernel::ExpBump)?;
    let mut params = PlannerParams::table1(0.1, &shape);
    params.s_max = if quick { 100 } else { 500 };
    params.step4_cap = 5 * params.s_max;
    params.outer_cap = 3;
    params.gd_cap = 3000;
    let runs = if quick { 2 } else { 10 };
    let (mut certified, mut violations, mut worst_l) = (0, 0, 0.0f64);
    for k in 0..runs {
        let x0 = init::random(30, params.domain_m, 1.2, seed + k)?;
        let p = PlannerParams { seed: seed + k, ..params };
        for rec in [plan_id(&x0, &shape, &pot, &p)?, plan_gd(&x0, &shape, &pot, &p)?] {
            if collision_certificate(&rec, &pot)?.passed() {
                certified += 1;
            }
            violations += descent_violations(&rec, 1e-12).len();
            let anchors: Vec<Configuration> = rec.snapshots.iter().map(|s| s.config.clone()).collect();
            let est = estimate_lipschitz(&shape, &pot, &Sampler::Around { anchors, radius: 0.01 }, 20, seed + k)?;
            worst_l = worst_l.max(est.l_hat);
        }
    }
    checks.push(Check {
        name: "collision certificate".into(),
        passed: certified == 2 * runs,
        detail: format!("{certified}/{} runs certified", 2 * runs),
    });
    checks.push(Check {
        name: "monotone descent".into(),
        passed: violations == 0,
        detail: format!(
            "{violations} increases above 1e-12; dt {} vs 1/L_hat {:.3e}",
            params.dt,
            1.0 / worst_l
        ),
    });

    let g = two_well_gibbs(if quick { 200_000 } else { 2_000_000 }, seed)?;
    let asym = well_asymmetry(&g);
    checks.push(Check {
        name: "gibbs".into(),
        passed: g.tv_distance <= 0.1 && asym <= 0.1,
        detail: format!("tv {:.4} (<= 0.1), well asymmetry {:.3} (<= 0.1)", g.tv_distance, asym),
    });
    Ok(checks)
}
