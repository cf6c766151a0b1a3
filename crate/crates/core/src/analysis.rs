//! Verification oracles and run diagnostics.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{euler_maruyama_step, RngStream, StepParams};
use crate::error::{invalid, Error, Result};
use crate::init;
use crate::planner::{evaluate_energy, Phase, RunRecord};
use crate::potentials::{barrier_level, Configuration, PotentialParams};
use crate::shape::Shape;
use crate::Vec2;

/// Multiplier applied to the largest sampled gradient ratio.
pub const LIPSCHITZ_SAFETY: f64 = 2.0;

/// Central differences of `potential` with step `h`, one probe pair per
/// coordinate.
pub fn fd_gradient<P>(potential: P, config: &Configuration, h: f64) -> Result<Vec<Vec2>>
where
    P: Fn(&Configuration) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("h", format!("step must be positive, got {h}")));
    }
    let mut pos = config.positions().to_vec();
    let mut grad = vec![Vec2::zeros(); pos.len()];
    for i in 0..pos.len() {
        for axis in 0..2 {
            let orig = pos[i][axis];
            let mut probe = |v: f64| -> Result<f64> {
                pos[i][axis] = v;
                let val = potential(&Configuration::new(pos.clone())?);
                if val.is_finite() {
                    Ok(val)
                } else {
                    Err(Error::InfeasibleProbe { index: i, axis })
                }
            };
            let plus = probe(orig + h);
            let minus = probe(orig - h);
            pos[i][axis] = orig;
            grad[i][axis] = (plus? - minus?) / (2.0 * h);
        }
    }
    Ok(grad)
}

/// `|a - b| / max(|b|, floor)` with both sides flattened to one vector.
pub fn relative_error(a: &[Vec2], b: &[Vec2], floor: f64) -> f64 {
    let diff: Vec<Vec2> = a.iter().zip(b).map(|(u, v)| u - v).collect();
    flat_norm(&diff) / flat_norm(b).max(floor)
}

#[derive(Debug, Clone)]
pub struct LipschitzEstimate {
    /// Largest sampled ratio times [`LIPSCHITZ_SAFETY`].
    pub l_hat: f64,
    pub sample_count: usize,
    pub max_ratio_pair: Option<(Configuration, Configuration)>,
}

impl LipschitzEstimate {
    pub fn step_ok(&self, dt: f64) -> bool {
        dt * self.l_hat <= 1.0
    }
}

fn flat_norm(v: &[Vec2]) -> f64 {
    v.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt()
}

/// Lipschitz estimate of `grad` from explicit configuration pairs. Pairs at
/// zero distance are ignored.
pub fn lipschitz_from_pairs<G>(grad: G, pairs: &[(Configuration, Configuration)]) -> Result<LipschitzEstimate>
where
    G: Fn(&Configuration) -> Result<Vec<Vec2>>,
{
    let mut best = 0.0;
    let mut arg = None;
    let mut count = 0;
    for (x, z) in pairs {
        let dist = x.distance(z);
        if dist == 0.0 {
            continue;
        }
        let gx = grad(x)?;
        let gz = grad(z)?;
        let diff: Vec<Vec2> = gx.iter().zip(&gz).map(|(a, b)| a - b).collect();
        let ratio = flat_norm(&diff) / dist;
        count += 1;
        if ratio > best {
            best = ratio;
            arg = Some((x.clone(), z.clone()));
        }
    }
    Ok(LipschitzEstimate {
        l_hat: LIPSCHITZ_SAFETY * best,
        sample_count: count,
        max_ratio_pair: arg,
    })
}

/// Where [`estimate_lipschitz`] draws its base configurations.
#[derive(Debug, Clone)]
pub enum Sampler {
    /// `n` robots uniform on `[-M, M]^2`, pairwise farther apart than the
    /// barrier distance.
    Domain { n: usize, domain_m: f64 },
    /// Anchors jittered uniformly by up to `radius` per coordinate.
    Around { anchors: Vec<Configuration>, radius: f64 },
}

/// Perturbation scales for the nearby pairs.
const PERTURB: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Empirical Lipschitz constant of `grad Psi`.
///
/// Each base sample is paired with the next sample and with small random
/// perturbations of itself. Perturbation pairs that change any robot's
/// nearest shape point, or whose closest robots sit inside the barrier
/// distance, are discarded: the distance field is only piecewise smooth and
/// the estimate targets the region the planner actually visits.
pub fn estimate_lipschitz(
    shape: &Shape,
    pot: &PotentialParams,
    sampler: &Sampler,
    n_samples: usize,
    seed: u64,
) -> Result<LipschitzEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = pot.barrier_distance();
    let mut bases = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let x = match sampler {
            Sampler::Domain { n, domain_m } => init::random(*n, *domain_m, floor, rng.gen())?,
            Sampler::Around { anchors, radius } => {
                if anchors.is_empty() {
                    return Err(invalid("anchors", "no anchor configurations"));
                }
                let a = &anchors[k % anchors.len()];
                let jittered = a
                    .positions()
                    .iter()
                    .map(|p| p + Vec2::new(rng.gen_range(-radius..=*radius), rng.gen_range(-radius..=*radius)))
                    .collect();
                Configuration::new(jittered)?
            }
        };
        if crate::dynamics::min_pairwise_distance(&x) > floor {
            bases.push(x);
        }
    }
    let assignment = |c: &Configuration| -> Vec<usize> { c.positions().iter().map(|p| shape.nearest(*p).0).collect() };
    let mut pairs = Vec::new();
    for (k, x) in bases.iter().enumerate() {
        if let Some(next) = bases.get(k + 1) {
            if next.len() == x.len() {
                pairs.push((x.clone(), next.clone()));
            }
        }
        let ax = assignment(x);
        for &eps in &PERTURB {
            let z = Configuration::new(
                x.positions()
                    .iter()
                    .map(|p| p + Vec2::new(rng.gen_range(-eps..=eps), rng.gen_range(-eps..=eps)))
                    .collect(),
            )?;
            if assignment(&z) == ax && crate::dynamics::min_pairwise_distance(&z) > floor {
                pairs.push((x.clone(), z));
            }
        }
    }
    lipschitz_from_pairs(|c| evaluate_energy(c, shape, pot).map(|e| e.grad), &pairs)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    /// First physical iterate closer than the collision distance.
    Fail { iteration: u64, distance: f64 },
    /// `Psi(X0) >= E_m`; the certificate makes no claim.
    PreconditionUnmet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub initial_energy: f64,
    pub barrier: f64,
    pub collision_distance: f64,
    pub min_distance: f64,
    pub checked_iterates: usize,
    pub verdict: Verdict,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Energy-barrier collision certificate over the physical iterates of a run
/// (the initial configuration counts as iteration 0).
pub fn collision_certificate(record: &RunRecord, pot: &PotentialParams) -> Result<CertificateReport> {
    let barrier = barrier_level(pot)?;
    let limit = pot.collision_distance();
    let mut min_distance = record.initial_min_distance;
    let mut checked = 1;
    let mut violation = (record.initial_min_distance < limit).then_some((0, record.initial_min_distance));
    for row in record.physical_rows() {
        checked += 1;
        min_distance = min_distance.min(row.min_distance);
        if violation.is_none() && !(row.min_distance >= limit) {
            violation = Some((row.iteration, row.min_distance));
        }
    }
    let verdict = if !(record.initial_energy < barrier) {
        Verdict::PreconditionUnmet
    } else if let Some((iteration, distance)) = violation {
        Verdict::Fail { iteration, distance }
    } else {
        Verdict::Pass
    };
    Ok(CertificateReport {
        initial_energy: record.initial_energy,
        barrier,
        collision_distance: limit,
        min_distance,
        checked_iterates: checked,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentViolation {
    pub iteration: u64,
    pub previous: f64,
    pub current: f64,
}

/// Steps inside descent-to-shape phases whose energy rose by more than
/// `tol`. Each phase's first step is compared with the preceding physical
/// iterate, or with the initial energy.
pub fn descent_violations(record: &RunRecord, tol: f64) -> Vec<DescentViolation> {
    let mut out = Vec::new();
    let mut prev = record.initial_energy;
    for row in record.physical_rows() {
        if row.phase == Phase::DescendToShape && row.energy > prev + tol {
            out.push(DescentViolation {
                iteration: row.iteration,
                previous: prev,
                current: row.energy,
            });
        }
        prev = row.energy;
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct GibbsSettings {
    pub sigma: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub burn_in: usize,
    /// Cells per axis.
    pub grid_resolution: usize,
    pub domain_m: f64,
    pub start: Vec2,
}

#[derive(Debug, Clone)]
pub struct GibbsCheck {
    pub grid_resolution: usize,
    pub domain_m: f64,
    /// Row-major, row 0 at `y = -M`.
    pub empirical_mass: Vec<f64>,
    pub gibbs_mass: Vec<f64>,
    pub tv_distance: f64,
}

impl GibbsCheck {
    fn cell_center(&self, k: usize) -> Vec2 {
        let n = self.grid_resolution;
        let w = 2.0 * self.domain_m / n as f64;
        Vec2::new(
            -self.domain_m + ((k % n) as f64 + 0.5) * w,
            -self.domain_m + ((k / n) as f64 + 0.5) * w,
        )
    }

    /// Empirical mass in the half planes `x < 0` and `x > 0`.
    pub fn empirical_halves(&self) -> (f64, f64) {
        self.halves(&self.empirical_mass)
    }

    pub fn gibbs_halves(&self) -> (f64, f64) {
        self.halves(&self.gibbs_mass)
    }

    fn halves(&self, mass: &[f64]) -> (f64, f64) {
        let (mut l, mut r) = (0.0, 0.0);
        for (k, m) in mass.iter().enumerate() {
            let x = self.cell_center(k).x;
            if x < 0.0 {
                l += m;
            } else if x > 0.0 {
                r += m;
            }
        }
        (l, r)
    }
}

/// Single-particle Langevin chain for a potential given by `value` and
/// `grad`, histogrammed against the density `exp(-2 value / sigma^2)`
/// normalised over the domain by midpoint quadrature.
pub fn gibbs_check_with<V, G>(value: V, grad: G, settings: &GibbsSettings, rng: &mut RngStream) -> Result<GibbsCheck>
where
    V: Fn(Vec2) -> f64,
    G: Fn(Vec2) -> Vec2,
{
    let s = settings;
    if !(s.sigma > 0.0) {
        return Err(invalid("sigma", "must be positive for a stationary density"));
    }
    if s.grid_resolution == 0 || s.n_steps == 0 {
        return Err(invalid("gibbs", "grid_resolution and n_steps must be positive"));
    }
    let step = StepParams::new(s.dt, s.sigma, s.domain_m)?;
    let n = s.grid_resolution;
    let w = 2.0 * s.domain_m / n as f64;
    let cell = |p: Vec2| -> usize {
        let ix = (((p.x + s.domain_m) / w) as usize).min(n - 1);
        let iy = (((p.y + s.domain_m) / w) as usize).min(n - 1);
        iy * n + ix
    };
    let mut counts = vec![0u64; n * n];
    let mut x = Configuration::new(vec![s.start])?;
    for k in 0..s.burn_in + s.n_steps {
        let g = grad(x[0]);
        x = euler_maruyama_step(&x, &[g], &step, rng)?;
        if k >= s.burn_in {
            counts[cell(x[0])] += 1;
        }
    }
    let total = s.n_steps as f64;
    let empirical_mass: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let mut check = GibbsCheck {
        grid_resolution: n,
        domain_m: s.domain_m,
        empirical_mass,
        gibbs_mass: Vec::new(),
        tv_distance: 0.0,
    };
    let beta = 2.0 / (s.sigma * s.sigma);
    let raw: Vec<f64> = (0..n * n).map(|k| (-beta * value(check.cell_center(k))).exp()).collect();
    let z: f64 = raw.iter().sum();
    check.gibbs_mass = raw.iter().map(|v| v / z).collect();
    check.tv_distance = 0.5
        * check
            .empirical_mass
            .iter()
            .zip(&check.gibbs_mass)
            .map(|(e, g)| (e - g).abs())
            .sum::<f64>();
    Ok(check)
}

/// [`gibbs_check_with`] for one robot attracted to `shape`, where `Psi = mu`.
pub fn gibbs_check(shape: &Shape, settings: &GibbsSettings, rng: &mut RngStream) -> Result<GibbsCheck> {
    gibbs_check_with(|p| shape.mu(p), |p| shape.grad_mu(p), settings, rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub energy: f64,
    pub f: f64,
    pub g: f64,
    pub min_distance: f64,
    /// Share of robots with `mu < epsilon / N`.
    pub on_shape_fraction: f64,
    /// Coefficient of variation of robot nearest-neighbour distances.
    pub nn_cv: f64,
}

impl RunMetrics {
    /// Componentwise `self - other`.
    pub fn delta(&self, other: &RunMetrics) -> RunMetrics {
        RunMetrics {
            energy: self.energy - other.energy,
            f: self.f - other.f,
            g: self.g - other.g,
            min_distance: self.min_distance - other.min_distance,
            on_shape_fraction: self.on_shape_fraction - other.on_shape_fraction,
            nn_cv: self.nn_cv - other.nn_cv,
        }
    }
}

pub fn config_metrics(config: &Configuration, shape: &Shape, pot: &PotentialParams, epsilon: f64) -> Result<RunMetrics> {
    let ev = evaluate_energy(config, shape, pot)?;
    let n = config.len();
    let on = config
        .positions()
        .iter()
        .filter(|p| shape.mu(**p) < epsilon / n as f64)
        .count();
    Ok(RunMetrics {
        energy: ev.energy(),
        f: ev.f,
        g: ev.g,
        min_distance: ev.min_distance,
        on_shape_fraction: on as f64 / n as f64,
        nn_cv: nearest_neighbor_cv(config),
    })
}

/// Metrics of the run's best configuration.
pub fn run_metrics(record: &RunRecord, shape: &Shape, pot: &PotentialParams, epsilon: f64) -> Result<RunMetrics> {
    config_metrics(&record.x_opt, shape, pot, epsilon)
}

/// Zero for fewer than two robots.
pub fn nearest_neighbor_cv(config: &Configuration) -> f64 {
    let x = config.positions();
    if x.len() < 2 {
        return 0.0;
    }
    let nn: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, p)| {
            x.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| (p - q).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mean = nn.iter().sum::<f64>() / nn.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    let var = nn.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / nn.len() as f64;
    var.sqrt() / mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::neighbor_pairs;
    use crate::planner::{plan_gd, plan_id, PlannerParams, Row};
    use crate::potentials::{
        grad_repelling, grad_shape_potential, grad_target_potential, repelling, shape_potential, target_potential,
        Kernel, TargetSet,
    };
    use approx::assert_relative_eq;

    fn cfg(p: &[(f64, f64)]) -> Configuration {
        Configuration::new(p.iter().map(|&(x, y)| Vec2::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn fd_of_quadratic_and_constant() {
        let t = TargetSet::new(vec![Vec2::new(1.0, -2.0), Vec2::new(0.5, 0.5)]);
        let c = cfg(&[(0.3, 0.1), (-1.0, 2.0)]);
        let fd = fd_gradient(|x| target_potential(x, &t).unwrap(), &c, 1e-4).unwrap();
        let exact = grad_target_potential(&c, &t).unwrap();
        assert!(relative_error(&fd, &exact, 1e-12) < 1e-9);
        let zero = fd_gradient(|_| 3.5, &c, 1e-5).unwrap();
        assert!(zero.iter().all(|g| *g == Vec2::zeros()));
    }

    #[test]
    fn fd_reports_infeasible_probe() {
        let pot = PotentialParams::table1(0.1, Kernel::Cotangent).unwrap();
        let c = cfg(&[(0.0, 0.0), (1e-5, 0.0)]);
        let g = |x: &Configuration| repelling(x, &pot, &neighbor_pairs(x, pot.cutoff_distance()));
        assert_eq!(fd_gradient(g, &c, 1e-5), Err(Error::InfeasibleProbe { index: 0, axis: 0 }));
        assert!(fd_gradient(|_| 0.0, &c, 0.0).is_err());
    }

    #[test]
    fn fd_matches_repelling_gradient_both_kernels() {
        for kernel in [Kernel::ExpBump, Kernel::Cotangent] {
            let pot = PotentialParams::table1(0.1, kernel).unwrap();
            let c = init::in_box(8, Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), pot.barrier_distance(), 3).unwrap();
            let pairs = |x: &Configuration| neighbor_pairs(x, pot.cutoff_distance());
            let fd = fd_gradient(|x| repelling(x, &pot, &pairs(x)), &c, 1e-5).unwrap();
            let exact = grad_repelling(&c, &pot, &pairs(&c)).unwrap();
            let err = relative_error(&fd, &exact, 1e-3);
            assert!(err < 1e-5, "{kernel} {err}");
        }
    }

    #[test]
    fn fd_matches_shape_gradient() {
        let s = Shape::circle(Vec2::zeros(), 2.0, 50).unwrap();
        let c = cfg(&[(3.0, 0.4), (0.2, -0.9)]);
        let fd = fd_gradient(|x| shape_potential(x, &s), &c, 1e-5).unwrap();
        assert!(relative_error(&fd, &grad_shape_potential(&c, &s), 1e-8) < 1e-5);
    }

    #[test]
    fn lipschitz_of_target_potential_is_two_over_n() {
        let n = 10;
        let t = TargetSet::new((0..n).map(|i| Vec2::new(i as f64, 0.0)).collect());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rand_cfg = || {
            Configuration::new(
                (0..n)
                    .map(|_| Vec2::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)))
                    .collect(),
            )
            .unwrap()
        };
        let pairs: Vec<_> = (0..20).map(|_| (rand_cfg(), rand_cfg())).collect();
        let est = lipschitz_from_pairs(|x| grad_target_potential(x, &t), &pairs).unwrap();
        let exact = 2.0 / n as f64;
        assert_eq!(est.sample_count, 20);
        assert!(est.l_hat >= exact && est.l_hat <= 2.0 * exact * (1.0 + 1e-9));
        assert!(est.max_ratio_pair.is_some());
    }

    #[test]
    fn lipschitz_scales_with_g0() {
        let pot = PotentialParams::table1(0.1, Kernel::Cotangent).unwrap();
        let pot2 = pot.with_g0(2.0 * pot.g0).unwrap();
        let pairs: Vec<_> = (0..10)
            .map(|k| {
                let x = init::in_box(6, Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), 0.3, k).unwrap();
                let z = init::in_box(6, Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), 0.3, k + 100).unwrap();
                (x, z)
            })
            .collect();
        let g = |p: PotentialParams| {
            move |x: &Configuration| grad_repelling(x, &p, &neighbor_pairs(x, p.cutoff_distance()))
        };
        let a = lipschitz_from_pairs(g(pot), &pairs).unwrap();
        let b = lipschitz_from_pairs(g(pot2), &pairs).unwrap();
        assert_relative_eq!(b.l_hat, 2.0 * a.l_hat, max_relative = 1e-12);
    }

    #[test]
    fn lipschitz_on_domain_samples() {
        let s = Shape::circle(Vec2::zeros(), 3.0, 200).unwrap();
        let pot = PotentialParams::table1(0.1, Kernel::ExpBump).unwrap();
        let est = estimate_lipschitz(&s, &pot, &Sampler::Domain { n: 10, domain_m: 6.0 }, 100, 0).unwrap();
        assert!(est.l_hat.is_finite() && est.l_hat > 0.0);
        assert!(est.sample_count >= 99);
        let _ = est.step_ok(0.01);
    }

    fn record_with(rows: &[(Phase, f64, f64)], n: usize) -> RunRecord {
        let s = Shape::circle(Vec2::zeros(), 3.0, 100).unwrap();
        let pot = PotentialParams::table1(0.1, Kernel::ExpBump).unwrap();
        let pts: Vec<Vec2> = (0..n).map(|i| Vec2::new(3.0 * i as f64 - 3.0, 0.0)).collect();
        let x0 = Configuration::new(pts).unwrap();
        let mut p = PlannerParams::table1(0.1, &s);
        p.gd_cap = 1;
        let mut rec = plan_gd(&x0, &s, &pot, &p).unwrap();
        rec.initial_energy = 1e-3;
        rec.rows = rows
            .iter()
            .enumerate()
            .map(|(k, &(phase, energy, min_distance))| Row {
                iteration: k as u64 + 1,
                cycle: 1,
                phase,
                energy,
                f: energy,
                g: 0.0,
                min_distance,
            })
            .collect();
        rec
    }

    #[test]
    fn certificate_single_robot_passes() {
        let pot = PotentialParams::table1(0.1, Kernel::ExpBump).unwrap();
        let rec = record_with(&[(Phase::DescendToShape, 0.5, f64::INFINITY)], 1);
        assert!(collision_certificate(&rec, &pot).unwrap().passed());
    }

    #[test]
    fn certificate_flags_injected_violation() {
        let pot = PotentialParams::table1(0.1, Kernel::Cotangent).unwrap();
        let rec = record_with(
            &[
                (Phase::DescendToTargets, 0.9, 0.5),
                (Phase::VirtualDiffusion, 0.9, 0.01),
                (Phase::DescendToShape, 0.8, pot.r / 2.0),
                (Phase::DescendToShape, 0.7, pot.r / 4.0),
            ],
            3,
        );
        let rep = collision_certificate(&rec, &pot).unwrap();
        assert_eq!(
            rep.verdict,
            Verdict::Fail {
                iteration: 3,
                distance: pot.r / 2.0
            }
        );
        assert_eq!(rep.checked_iterates, 4);
    }

    #[test]
    fn certificate_requires_energy_below_barrier() {
        let pot = PotentialParams::table1(0.1, Kernel::Cotangent).unwrap();
        let mut rec = record_with(&[(Phase::DescendToShape, 0.5, 1.0)], 3);
        rec.initial_energy = 2.0 * barrier_level(&pot).unwrap();
        assert_eq!(collision_certificate(&rec, &pot).unwrap().verdict, Verdict::PreconditionUnmet);
    }

    #[test]
    fn descent_violations_compare_across_phase_starts() {
        let rec = record_with(
            &[
                (Phase::DescendToTargets, 1.2, 1.0),
                (Phase::VirtualDiffusion, 0.1, 1.0),
                (Phase::DescendToShape, 1.1, 1.0),
                (Phase::DescendToShape, 1.1 + 1e-13, 1.0),
                (Phase::DescendToShape, 1.3, 1.0),
            ],
            3,
        );
        let v = descent_violations(&rec, 1e-12);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].iteration, 5);
        assert_eq!(v[0].previous, 1.1 + 1e-13);
    }

    #[test]
    fn real_runs_descend_and_stay_apart() {
        let s = Shape::circle(Vec2::zeros(), 3.0, 200).unwrap();
        let pot = PotentialParams::table1(0.1, Kernel::ExpBump).unwrap();
        let mut p = PlannerParams::table1(0.1, &s);
        p.s_max = 100;
        p.step4_cap = 300;
        p.outer_cap = 2;
        p.gd_cap = 500;
        let x0 = init::random(8, 6.0, 1.0, 5).unwrap();
        for rec in [plan_id(&x0, &s, &pot, &p).unwrap(), plan_gd(&x0, &s, &pot, &p).unwrap()] {
            assert!(collision_certificate(&rec, &pot).unwrap().passed());
            assert!(descent_violations(&rec, 1e-12).is_empty());
        }
    }

    fn gibbs_settings(n_steps: usize) -> GibbsSettings {
        GibbsSettings {
            sigma: 1.0,
            dt: 1e-2,
            n_steps,
            burn_in: 1000,
            grid_resolution: 8,
            domain_m: 2.0,
            start: Vec2::zeros(),
        }
    }

    #[test]
    fn gibbs_masses_are_normalised() {
        let s = Shape::new(vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)]).unwrap();
        let g = gibbs_check(&s, &gibbs_settings(20_000), &mut RngStream::new(2)).unwrap();
        assert_relative_eq!(g.empirical_mass.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(g.gibbs_mass.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        assert!((0.0..=1.0).contains(&g.tv_distance));
        let (l, r) = g.gibbs_halves();
        assert_relative_eq!(l, r, max_relative = 1e-12);
    }

    #[test]
    fn gibbs_flat_potential_is_uniform() {
        let g = gibbs_check_with(|_| 0.0, |_| Vec2::zeros(), &gibbs_settings(200_000), &mut RngStream::new(4)).unwrap();
        let u = 1.0 / 64.0;
        assert!(g.gibbs_mass.iter().all(|m| (m - u).abs() < 1e-15));
        assert!(g.tv_distance < 0.1, "tv {}", g.tv_distance);
    }

    #[test]
    fn gibbs_rejects_zero_sigma() {
        let s = Shape::new(vec![Vec2::zeros()]).unwrap();
        let mut st = gibbs_settings(10);
        st.sigma = 0.0;
        assert!(gibbs_check(&s, &st, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn gibbs_tv_shrinks_with_longer_chains() {
        let s = Shape::new(vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)]).unwrap();
        let mean_tv = |n| {
            (0..5)
                .map(|seed| gibbs_check(&s, &gibbs_settings(n), &mut RngStream::new(seed)).unwrap().tv_distance)
                .sum::<f64>()
                / 5.0
        };
        let short = mean_tv(2_000);
        let long = mean_tv(20_000);
        assert!(long < short, "{long} vs {short}");
    }

    #[test]
    fn metrics_of_even_circle() {
        let s = Shape::circle(Vec2::zeros(), 3.0, 240).unwrap();
        let pot = PotentialParams::table1(0.1, Kernel::Cotangent).unwrap();
        let c = Configuration::new((0..12).map(|k| s.points()[20 * k]).collect()).unwrap();
        let m = config_metrics(&c, &s, &pot, 1e-6).unwrap();
        assert_eq!(m.on_shape_fraction, 1.0);
        assert!(m.nn_cv < 1e-9);
        assert_eq!(m.f, 0.0);
        let d = m.delta(&m);
        assert_eq!(d.energy, 0.0);
        assert_eq!(d.nn_cv, 0.0);
    }
}
