//! Time stepping: explicit Euler gradient steps, Euler–Maruyama steps with a
//! counter-based normal generator, the reflecting domain boundary and
//! fixed-radius neighbor search by uniform spatial hashing.

use std::collections::HashMap;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::potentials::Configuration;
use crate::Vec2;

/// Ordered index pairs `(i, j)`, `i != j`, closer than some radius. Both
/// orientations of every close pair are present, sorted lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairList {
    pairs: Vec<(usize, usize)>,
}

impl PairList {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Smallest distance over the listed pairs, infinite if there are none.
    pub fn min_distance(&self, config: &Configuration) -> f64 {
        let x = config.positions();
        self.pairs
            .iter()
            .filter(|(i, j)| i < j)
            .map(|&(i, j)| (x[i] - x[j]).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

fn cell_key(p: Vec2, cell: f64) -> (i64, i64) {
    ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
}

/// All ordered pairs at distance strictly below `radius`, found with a hash
/// grid of cell size `radius`.
pub fn neighbor_pairs(config: &Configuration, radius: f64) -> PairList {
    let x = config.positions();
    let mut pairs = Vec::new();
    if x.len() < 2 || !(radius > 0.0) {
        return PairList { pairs };
    }
    let rr = radius * radius;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in x.iter().enumerate() {
        grid.entry(cell_key(*p, radius)).or_default().push(i);
    }
    for (i, p) in x.iter().enumerate() {
        let (cx, cy) = cell_key(*p, radius);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let key = (cx.saturating_add(dx), cy.saturating_add(dy));
                if let Some(bucket) = grid.get(&key) {
                    for &j in bucket {
                        if j != i && (x[j] - p).norm_squared() < rr {
                            pairs.push((i, j));
                        }
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    PairList { pairs }
}

/// Minimum distance over unordered pairs; infinite for a single robot.
///
/// Searches with growing radii so sparse configurations do not fall back to
/// a full quadratic scan unless the radius already covers everything.
pub fn min_pairwise_distance(config: &Configuration) -> f64 {
    let x = config.positions();
    if x.len() < 2 {
        return f64::INFINITY;
    }
    let mut lo = x[0];
    let mut hi = x[0];
    for p in x {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let diag = (hi - lo).norm();
    if diag == 0.0 {
        return 0.0;
    }
    let mut radius = diag / (x.len() as f64).sqrt();
    while radius < diag {
        let pairs = neighbor_pairs(config, radius);
        if !pairs.is_empty() {
            return pairs.min_distance(config);
        }
        radius *= 2.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            best = best.min((x[i] - x[j]).norm());
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub dt: f64,
    pub sigma: f64,
    pub domain_m: f64,
}

impl StepParams {
    pub fn new(dt: f64, sigma: f64, domain_m: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", "must be non-negative"));
        }
        if !(domain_m > 0.0 && domain_m.is_finite()) {
            return Err(invalid("M", "must be positive"));
        }
        Ok(StepParams { dt, sigma, domain_m })
    }
}

/// Seeded source of standard normal 2-vectors indexed by `(step, robot)`.
///
/// The bits for robot `i` at step `n` are words `4n..4n+4` of ChaCha8 stream
/// `i` keyed by the seed. Two 53-bit uniforms `u1 in (0, 1]`, `u2 in [0, 1)`
/// go through the Box–Muller transform
/// `(sqrt(-2 ln u1) cos(2 pi u2), sqrt(-2 ln u1) sin(2 pi u2))`.
/// Results depend only on `(seed, step, robot)`, never on draw order.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    step: u64,
    gen: ChaCha8Rng,
}

const UNIFORM_STREAM: u64 = u64::MAX;

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            step: 0,
            gen: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Index of the next step to be drawn.
    pub fn step(&self) -> u64 {
        self.step
    }

    fn words(&mut self, stream: u64, pos: u64) -> (u64, u64) {
        self.gen.set_stream(stream);
        self.gen.set_word_pos(pos as u128 * 4);
        (self.gen.next_u64(), self.gen.next_u64())
    }

    /// Deviate for `robot` at `step`; does not advance the stream.
    pub fn normal_at(&mut self, step: u64, robot: usize) -> Vec2 {
        let (a, b) = self.words(robot as u64, step);
        let u1 = ((a >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let rad = (-2.0 * u1.ln()).sqrt();
        let ang = std::f64::consts::TAU * u2;
        Vec2::new(rad * ang.cos(), rad * ang.sin())
    }

    /// One deviate per robot for the current step, then advance.
    pub fn next_deviates(&mut self, n: usize) -> Vec<Vec2> {
        let step = self.step;
        let out = (0..n).map(|i| self.normal_at(step, i)).collect();
        self.step += 1;
        out
    }

    /// Uniform on the open interval `(0, 1)`, indexed by `k` on a stream
    /// reserved for non-robot draws.
    pub fn uniform_open(&mut self, k: u64) -> f64 {
        let (a, _) = self.words(UNIFORM_STREAM, k);
        ((a >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Reflect out-of-range coordinates about the wall of `[-M, M]^2`:
/// `c <- c - 2 sgn(c) (|c| mod M)`. Coordinates at or beyond `2M` clamp to
/// `sgn(c) M`.
pub fn boundary_map(x: Vec2, m: f64) -> Vec2 {
    let fix = |c: f64| -> f64 {
        if c.abs() <= m {
            c
        } else if c.abs() < 2.0 * m {
            c - 2.0 * c.signum() * (c.abs() % m)
        } else {
            c.signum() * m
        }
    };
    Vec2::new(fix(x.x), fix(x.y))
}

fn check_grad(config: &Configuration, grad: &[Vec2]) -> Result<()> {
    if grad.len() != config.len() {
        return Err(Error::LengthMismatch {
            expected: config.len(),
            got: grad.len(),
        });
    }
    if let Some(index) = grad.iter().position(|g| !(g.x.is_finite() && g.y.is_finite())) {
        return Err(Error::NonFiniteGradient { index });
    }
    Ok(())
}

/// `X_i <- boundary(X_i - dt * grad_i)`.
pub fn euler_step(config: &Configuration, grad: &[Vec2], step: &StepParams) -> Result<Configuration> {
    check_grad(config, grad)?;
    let next = config
        .positions()
        .iter()
        .zip(grad)
        .map(|(x, g)| boundary_map(x - g * step.dt, step.domain_m))
        .collect();
    Configuration::new(next)
}

/// `Y_i <- boundary(Y_i - dt * grad_i + sigma sqrt(dt) xi_i)`. With
/// `sigma == 0` no deviates are drawn and the result equals [`euler_step`].
pub fn euler_maruyama_step(
    config: &Configuration,
    grad: &[Vec2],
    step: &StepParams,
    rng: &mut RngStream,
) -> Result<Configuration> {
    if step.sigma == 0.0 {
        return euler_step(config, grad, step);
    }
    check_grad(config, grad)?;
    let xi = rng.next_deviates(config.len());
    let amp = step.sigma * step.dt.sqrt();
    let next = config
        .positions()
        .iter()
        .zip(grad)
        .zip(&xi)
        .map(|((x, g), e)| boundary_map(x - g * step.dt + e * amp, step.domain_m))
        .collect();
    Configuration::new(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(p: &[(f64, f64)]) -> Configuration {
        Configuration::new(p.iter().map(|&(x, y)| Vec2::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn pair_examples() {
        assert!(neighbor_pairs(&cfg(&[(0.0, 0.0), (2.0, 0.0)]), 1.0).is_empty());
        let p = neighbor_pairs(&cfg(&[(0.0, 0.0), (0.5, 0.0)]), 1.0);
        assert_eq!(p.pairs(), &[(0, 1), (1, 0)]);
        // strictly closer than the radius
        assert!(neighbor_pairs(&cfg(&[(0.0, 0.0), (1.0, 0.0)]), 1.0).is_empty());
    }

    #[test]
    fn min_distance_examples() {
        assert_eq!(min_pairwise_distance(&cfg(&[(0.0, 0.0), (3.0, 4.0)])), 5.0);
        assert_eq!(min_pairwise_distance(&cfg(&[(1.0, 1.0)])), f64::INFINITY);
        assert_eq!(min_pairwise_distance(&cfg(&[(1.0, 1.0), (1.0, 1.0)])), 0.0);
    }

    #[test]
    fn boundary_examples() {
        let m = 6.0;
        assert_eq!(boundary_map(Vec2::new(3.0, -1.8), m), Vec2::new(3.0, -1.8));
        assert_eq!(boundary_map(Vec2::new(6.5, 0.0), m), Vec2::new(5.5, 0.0));
        assert_eq!(boundary_map(Vec2::new(0.0, -7.0), m), Vec2::new(0.0, -5.0));
        assert_eq!(boundary_map(Vec2::new(13.0, -40.0), m), Vec2::new(6.0, -6.0));
        assert_eq!(boundary_map(Vec2::new(6.0, -6.0), m), Vec2::new(6.0, -6.0));
    }

    #[test]
    fn euler_examples() {
        let s = StepParams::new(0.1, 0.0, 6.0).unwrap();
        let c = cfg(&[(1.0, 1.0)]);
        assert_eq!(euler_step(&c, &[Vec2::zeros()], &s).unwrap(), c);
        let n = euler_step(&c, &[Vec2::new(2.0, 0.0)], &s).unwrap();
        assert_relative_eq!(n[0].x, 0.8, epsilon = 1e-15);
        assert_eq!(n[0].y, 1.0);
        assert_eq!(
            euler_step(&cfg(&[(0.0, 0.0), (1.0, 0.0)]), &[Vec2::zeros(), Vec2::new(f64::NAN, 0.0)], &s)
                .unwrap_err(),
            Error::NonFiniteGradient { index: 1 }
        );
        assert!(matches!(
            euler_step(&c, &[], &s),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn quadratic_bowl_contracts_geometrically() {
        // F^ with target at origin, N = 1: x_{n+1} = (1 - 2 dt) x_n
        let s = StepParams::new(0.1, 0.0, 6.0).unwrap();
        let mut c = cfg(&[(1.0, -0.5)]);
        for n in 1..=20 {
            let g = vec![c[0] * 2.0];
            c = euler_step(&c, &g, &s).unwrap();
            let f = 0.8f64.powi(n);
            assert_relative_eq!(c[0].x, f, max_relative = 1e-12);
            assert_relative_eq!(c[0].y, -0.5 * f, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_sigma_is_bit_identical_to_euler() {
        let c = cfg(&[(0.3, -0.2), (1.0, 2.0)]);
        let g = [Vec2::new(0.1, 0.2), Vec2::new(-3.0, 0.5)];
        let s = StepParams::new(0.05, 0.0, 6.0).unwrap();
        let mut rng = RngStream::new(3);
        assert_eq!(
            euler_maruyama_step(&c, &g, &s, &mut rng).unwrap(),
            euler_step(&c, &g, &s).unwrap()
        );
    }

    #[test]
    fn seeded_deviates_reproduce() {
        let c = cfg(&[(0.0, 0.0), (1.0, 1.0)]);
        let g = [Vec2::zeros(); 2];
        let s = StepParams::new(0.01, 0.7, 6.0).unwrap();
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        let ya = euler_maruyama_step(&c, &g, &s, &mut a).unwrap();
        let yb = euler_maruyama_step(&c, &g, &s, &mut b).unwrap();
        assert_eq!(ya, yb);
        let mut rec = RngStream::new(42);
        let xi = rec.next_deviates(2);
        for i in 0..2 {
            assert_eq!(ya[i], c[i] + xi[i] * (0.7 * 0.1));
        }
        // draw order does not matter
        let mut r = RngStream::new(42);
        assert_eq!(r.normal_at(0, 1), xi[1]);
        assert_ne!(RngStream::new(43).normal_at(0, 0), xi[0]);
    }

    #[test]
    fn brownian_increment_variance() {
        // sample variance of sigma sqrt(dt) xi per coordinate is sigma^2 dt
        let s = StepParams::new(0.01, 1.0, 1e9).unwrap();
        let mut rng = RngStream::new(11);
        let mut c = cfg(&[(0.0, 0.0)]);
        let n = 10_000;
        let (mut sum, mut sq) = (Vec2::zeros(), Vec2::zeros());
        for _ in 0..n {
            let next = euler_maruyama_step(&c, &[Vec2::zeros()], &s, &mut rng).unwrap();
            let d = next[0] - c[0];
            sum += d;
            sq += d.component_mul(&d);
            c = next;
        }
        for k in 0..2 {
            let mean = sum[k] / n as f64;
            let var = sq[k] / n as f64 - mean * mean;
            assert!((var / 0.01 - 1.0).abs() < 0.05, "var {var}");
        }
    }

    #[test]
    fn uniform_open_in_range() {
        let mut r = RngStream::new(1);
        for k in 0..1000 {
            let u = r.uniform_open(k);
            assert!(u > 0.0 && u < 1.0);
        }
        assert_eq!(r.uniform_open(5), RngStream::new(1).uniform_open(5));
    }
}
