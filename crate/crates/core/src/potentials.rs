//! Attraction and repulsion potentials and their analytic gradients.
//!
//! `F(X) = (1/N) sum_i mu(X_i)` pulls robots onto the shape,
//! `F^(X) = (1/N) sum_i |X_i - Y_i|^2` pulls them to intermediate targets and
//! `G` is a short-range pairwise barrier summed over *ordered* pairs, so every
//! unordered pair contributes twice.
//!
//! Units differ per kernel:
//!
//! * [`Kernel::ExpBump`] evaluates `phi(d / 2)` with
//!   `phi(x) = exp(1/(x^2 - r^2) - 1/(R^2 - x^2))`; `r`, `R` and `m` are
//!   half-distances, so the singular distance is `2r` and the cutoff `2R`.
//! * [`Kernel::Cotangent`] evaluates `cot(pi/2 * d^2 / R^2)` on the full
//!   distance; it is singular only at `d = 0`, cuts off at `d = R`, and `r`,
//!   `m` are plain distances. Its slope does not vanish at the cutoff.

use std::f64::consts::FRAC_PI_2;

use crate::dynamics::PairList;
use crate::error::{invalid, Error, Result};
use crate::shape::Shape;
use crate::Vec2;

/// Positions of all robots; robot `i` sits at index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    positions: Vec<Vec2>,
}

impl Configuration {
    pub fn new(positions: Vec<Vec2>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if let Some(index) = positions
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(Error::NonFinitePosition { index });
        }
        Ok(Configuration { positions })
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn into_positions(self) -> Vec<Vec2> {
        self.positions
    }

    /// Largest per-robot displacement between two configurations of equal size.
    pub fn max_displacement(&self, other: &Configuration) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Euclidean norm of the difference over the whole stacked configuration.
    pub fn distance(&self, other: &Configuration) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| (a - b).norm_squared())
            .sum::<f64>()
            .sqrt()
    }
}

impl std::ops::Index<usize> for Configuration {
    type Output = Vec2;
    fn index(&self, i: usize) -> &Vec2 {
        &self.positions[i]
    }
}

/// Intermediate destinations, one per robot.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    pub targets: Vec<Vec2>,
}

impl TargetSet {
    pub fn new(targets: Vec<Vec2>) -> Self {
        TargetSet { targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.targets.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: self.targets.len(),
            });
        }
        Ok(())
    }
}

impl From<&Configuration> for TargetSet {
    fn from(c: &Configuration) -> Self {
        TargetSet::new(c.positions().to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    ExpBump,
    Cotangent,
}

impl std::str::FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" | "exp_bump" | "expbump" => Ok(Kernel::ExpBump),
            "cot" | "cotangent" => Ok(Kernel::Cotangent),
            _ => Err(invalid("kernel", format!("unknown kernel {s:?} (use exp or cot)"))),
        }
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kernel::ExpBump => "exp",
            Kernel::Cotangent => "cot",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    /// Hard collision radius (kernel units).
    pub r: f64,
    /// Sensing radius (kernel units).
    pub big_r: f64,
    pub g0: f64,
    pub kernel: Kernel,
    /// Smallest allowable separation used for the energy barrier, `r < m < R`.
    pub m: f64,
}

impl PotentialParams {
    /// `m` defaults to `r + 0.1 (R - r)`.
    pub fn new(r: f64, big_r: f64, g0: f64, kernel: Kernel) -> Result<Self> {
        let p = PotentialParams {
            r,
            big_r,
            g0,
            kernel,
            m: r + 0.1 * (big_r - r),
        };
        p.validate()?;
        Ok(p)
    }

    /// Tabulated experiment settings: `G0 = 0.01`, `R = 10 r`.
    pub fn table1(r: f64, kernel: Kernel) -> Result<Self> {
        PotentialParams::new(r, 10.0 * r, 0.01, kernel)
    }

    pub fn with_m(mut self, m: f64) -> Result<Self> {
        self.m = m;
        self.validate()?;
        Ok(self)
    }

    pub fn with_g0(mut self, g0: f64) -> Result<Self> {
        self.g0 = g0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.r, self.big_r, self.g0, self.m]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("potential", "parameters must be finite"));
        }
        if self.r <= 0.0 {
            return Err(invalid("r", "must be positive"));
        }
        if self.big_r <= self.r {
            return Err(invalid("R", "R must exceed r"));
        }
        if self.g0 <= 0.0 {
            return Err(invalid("G0", "must be positive"));
        }
        if !(self.r < self.m && self.m < self.big_r) {
            return Err(invalid("m", format!("must lie in (r, R) = ({}, {})", self.r, self.big_r)));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        match self.kernel {
            Kernel::ExpBump => 2.0,
            Kernel::Cotangent => 1.0,
        }
    }

    /// Pair distance beyond which robots do not interact.
    pub fn cutoff_distance(&self) -> f64 {
        self.scale() * self.big_r
    }

    /// Pair distance at or below which the kernel is infinite.
    pub fn singular_distance(&self) -> f64 {
        match self.kernel {
            Kernel::ExpBump => 2.0 * self.r,
            Kernel::Cotangent => 0.0,
        }
    }

    /// Minimum pair distance an admissible configuration must keep.
    pub fn collision_distance(&self) -> f64 {
        self.scale() * self.r
    }

    /// Pair distance corresponding to `m`.
    pub fn barrier_distance(&self) -> f64 {
        self.scale() * self.m
    }

    /// Kernel value (without `G0`) for one ordered pair at distance `d`.
    pub fn pair_phi(&self, d: f64) -> f64 {
        match self.kernel {
            Kernel::ExpBump => phi_exp(d / 2.0, self.r, self.big_r),
            Kernel::Cotangent => phi_cot(d * d, self.big_r),
        }
    }

    /// Gradient of `G0 * pair_phi(|diff|)` with respect to the first robot,
    /// where `diff = X_i - X_j`.
    fn pair_grad(&self, diff: Vec2) -> Option<Vec2> {
        let sq = diff.norm_squared();
        if sq >= self.cutoff_distance().powi(2) {
            return Some(Vec2::zeros());
        }
        let g = match self.kernel {
            Kernel::ExpBump => {
                let d = sq.sqrt();
                if d <= self.singular_distance() {
                    return None;
                }
                // d/dX_i phi(d/2) = phi'(d/2) / 2 * diff / d
                let dphi = dphi_exp(d / 2.0, self.r, self.big_r);
                diff * (self.g0 * dphi / (2.0 * d))
            }
            Kernel::Cotangent => {
                if sq <= 0.0 {
                    return None;
                }
                // d/dX_i cot(a sq) = phi'(sq) * 2 diff
                diff * (2.0 * self.g0 * dphi_cot(sq, self.big_r))
            }
        };
        (g.x.is_finite() && g.y.is_finite()).then_some(g)
    }
}

/// Bump kernel on half-distances: infinite for `x <= r`, zero for `x >= R`.
pub fn phi_exp(x: f64, r: f64, big_r: f64) -> f64 {
    if x <= r {
        return f64::INFINITY;
    }
    if x >= big_r {
        return 0.0;
    }
    (1.0 / (x * x - r * r) - 1.0 / (big_r * big_r - x * x)).exp()
}

pub fn dphi_exp(x: f64, r: f64, big_r: f64) -> f64 {
    if x <= r {
        return f64::NEG_INFINITY;
    }
    let phi = phi_exp(x, r, big_r);
    if phi == 0.0 {
        return 0.0;
    }
    let a = x * x - r * r;
    let c = big_r * big_r - x * x;
    phi * (-2.0 * x / (a * a) - 2.0 * x / (c * c))
}

/// `cot(pi/2 * sq / R^2)` for `0 < sq < R^2`, zero beyond, infinite at zero.
pub fn phi_cot(sq_dist: f64, big_r: f64) -> f64 {
    let rr = big_r * big_r;
    if sq_dist >= rr {
        return 0.0;
    }
    if sq_dist <= 0.0 {
        return f64::INFINITY;
    }
    let t = FRAC_PI_2 * sq_dist / rr;
    t.cos() / t.sin()
}

/// Derivative of [`phi_cot`] with respect to the squared distance.
pub fn dphi_cot(sq_dist: f64, big_r: f64) -> f64 {
    let rr = big_r * big_r;
    if sq_dist >= rr {
        return 0.0;
    }
    if sq_dist <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let s = (FRAC_PI_2 * sq_dist / rr).sin();
    -FRAC_PI_2 / (rr * s * s)
}

/// `F`.
pub fn shape_potential(config: &Configuration, shape: &Shape) -> f64 {
    let n = config.len() as f64;
    config.positions().iter().map(|x| shape.mu(*x)).sum::<f64>() / n
}

pub fn grad_shape_potential(config: &Configuration, shape: &Shape) -> Vec<Vec2> {
    let n = config.len() as f64;
    config
        .positions()
        .iter()
        .map(|x| shape.grad_mu(*x) / n)
        .collect()
}

/// `F^`.
pub fn target_potential(config: &Configuration, targets: &TargetSet) -> Result<f64> {
    targets.check(config.len())?;
    let n = config.len() as f64;
    Ok(config
        .positions()
        .iter()
        .zip(&targets.targets)
        .map(|(x, y)| (x - y).norm_squared())
        .sum::<f64>()
        / n)
}

pub fn grad_target_potential(config: &Configuration, targets: &TargetSet) -> Result<Vec<Vec2>> {
    targets.check(config.len())?;
    let n = config.len() as f64;
    Ok(config
        .positions()
        .iter()
        .zip(&targets.targets)
        .map(|(x, y)| (x - y) * (2.0 / n))
        .collect())
}

/// `G`, summed over the ordered pairs in `pairs`. Infinite when any pair is
/// at or inside the singular radius.
pub fn repelling(config: &Configuration, params: &PotentialParams, pairs: &PairList) -> f64 {
    let x = config.positions();
    let mut sum = 0.0;
    for &(i, j) in pairs.pairs() {
        let d = (x[i] - x[j]).norm();
        sum += params.pair_phi(d);
    }
    params.g0 * sum
}

/// Analytic gradient of [`repelling`]. Errors on a pair inside the singular
/// radius rather than returning an infinite vector.
pub fn grad_repelling(
    config: &Configuration,
    params: &PotentialParams,
    pairs: &PairList,
) -> Result<Vec<Vec2>> {
    let mut grad = vec![Vec2::zeros(); config.len()];
    add_grad_repelling(config, params, pairs, &mut grad)?;
    Ok(grad)
}

pub(crate) fn add_grad_repelling(
    config: &Configuration,
    params: &PotentialParams,
    pairs: &PairList,
    grad: &mut [Vec2],
) -> Result<()> {
    let x = config.positions();
    for &(i, j) in pairs.pairs() {
        let diff = x[i] - x[j];
        let g = params.pair_grad(diff).ok_or(Error::SingularPair {
            i,
            j,
            distance: diff.norm(),
        })?;
        grad[i] += g;
        grad[j] -= g;
    }
    Ok(())
}

/// `Psi = F + G`.
pub fn energy(config: &Configuration, shape: &Shape, params: &PotentialParams, pairs: &PairList) -> f64 {
    shape_potential(config, shape) + repelling(config, params, pairs)
}

/// `E_m = G0 * phi(m)` for the active kernel.
pub fn barrier_level(params: &PotentialParams) -> Result<f64> {
    params.validate()?;
    let phi = match params.kernel {
        Kernel::ExpBump => phi_exp(params.m, params.r, params.big_r),
        Kernel::Cotangent => phi_cot(params.m * params.m, params.big_r),
    };
    Ok(params.g0 * phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{neighbor_pairs, PairList};
    use approx::assert_relative_eq;

    fn cfg(p: &[(f64, f64)]) -> Configuration {
        Configuration::new(p.iter().map(|&(x, y)| Vec2::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn configuration_validation() {
        assert_eq!(Configuration::new(vec![]).unwrap_err(), Error::EmptyConfiguration);
        assert_eq!(
            Configuration::new(vec![Vec2::zeros(), Vec2::new(f64::NAN, 0.0)]).unwrap_err(),
            Error::NonFinitePosition { index: 1 }
        );
    }

    #[test]
    fn phi_exp_values() {
        assert_eq!(phi_exp(2.0, 1.0, 2.0), 0.0);
        assert_eq!(phi_exp(4.0, 1.0, 2.0), 0.0);
        assert_eq!(phi_exp(1.0, 1.0, 2.0), f64::INFINITY);
        // exp(1/1.25 - 1/1.75), evaluated independently: 1.25693...
        let expected = (0.8f64 - 0.571_428_571_428_571_4).exp();
        assert_relative_eq!(phi_exp(1.5, 1.0, 2.0), expected, max_relative = 1e-14);
        assert_relative_eq!(phi_exp(1.5, 1.0, 2.0), 1.2569, epsilon = 1e-4);
        // flat approach to the cutoff
        assert!(phi_exp(1.999, 1.0, 2.0) < 1e-100);
        assert_eq!(dphi_exp(1.999_999_999, 1.0, 2.0), 0.0);
    }

    #[test]
    fn phi_cot_values() {
        let r = 0.7;
        assert_eq!(phi_cot(r * r, r), 0.0);
        assert_relative_eq!(phi_cot(r * r / 2.0, r), 1.0, epsilon = 1e-14);
        assert_relative_eq!(phi_cot(r * r / 3.0, r), 3f64.sqrt(), epsilon = 1e-14);
        assert_eq!(phi_cot(0.0, r), f64::INFINITY);
        assert_eq!(phi_cot(2.0 * r * r, r), 0.0);
    }

    #[test]
    fn shape_potential_examples() {
        let shape = Shape::new(vec![Vec2::zeros()]).unwrap();
        let c = cfg(&[(3.0, 4.0), (0.0, 0.0)]);
        assert_eq!(shape_potential(&c, &shape), 12.5);
        let g = grad_shape_potential(&cfg(&[(3.0, 4.0)]), &shape);
        assert_eq!(g[0], Vec2::new(6.0, 8.0));
        let g = grad_shape_potential(&c, &shape);
        assert_eq!(g[1], Vec2::zeros());
    }

    #[test]
    fn target_potential_examples() {
        let t = TargetSet::new(vec![Vec2::zeros(), Vec2::zeros()]);
        let c = cfg(&[(1.0, 0.0), (0.0, 2.0)]);
        assert_eq!(target_potential(&c, &t).unwrap(), 2.5);
        assert_eq!(target_potential(&c, &TargetSet::from(&c)).unwrap(), 0.0);
        assert!(matches!(
            target_potential(&c, &TargetSet::new(vec![Vec2::zeros()])),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn repelling_examples() {
        let p = PotentialParams::new(0.1, 1.0, 0.01, Kernel::Cotangent).unwrap();
        let d = (0.5f64).sqrt();
        let c = cfg(&[(0.0, 0.0), (d, 0.0)]);
        let pairs = neighbor_pairs(&c, p.cutoff_distance());
        assert_relative_eq!(repelling(&c, &p, &pairs), 0.02, epsilon = 1e-15);
        let far = cfg(&[(0.0, 0.0), (1.5, 0.0)]);
        assert_eq!(repelling(&far, &p, &neighbor_pairs(&far, 1.0)), 0.0);
        let one = cfg(&[(0.0, 0.0)]);
        assert_eq!(repelling(&one, &p, &PairList::default()), 0.0);
        let g = grad_repelling(&c, &p, &pairs).unwrap();
        assert_relative_eq!((g[0] + g[1]).norm(), 0.0, epsilon = 1e-15);
        // repulsion pushes robot 0 away from robot 1
        assert!(g[0].x > 0.0);
    }

    #[test]
    fn singular_pair_is_an_error() {
        let p = PotentialParams::new(0.1, 1.0, 0.01, Kernel::ExpBump).unwrap();
        let c = cfg(&[(0.0, 0.0), (0.15, 0.0)]);
        let pairs = neighbor_pairs(&c, p.cutoff_distance());
        assert_eq!(repelling(&c, &p, &pairs), f64::INFINITY);
        assert!(matches!(
            grad_repelling(&c, &p, &pairs),
            Err(Error::SingularPair { i: 0, j: 1, .. })
        ));
        let p = p.with_m(0.5).unwrap();
        let same = cfg(&[(1.0, 1.0), (1.0, 1.0)]);
        let pc = PotentialParams { kernel: Kernel::Cotangent, ..p };
        let pairs = neighbor_pairs(&same, pc.cutoff_distance());
        assert_eq!(repelling(&same, &pc, &pairs), f64::INFINITY);
        assert!(grad_repelling(&same, &pc, &pairs).is_err());
    }

    #[test]
    fn barrier_level_examples() {
        let p = PotentialParams::new(1.0, 2.0, 1.0, Kernel::ExpBump)
            .unwrap()
            .with_m(1.5)
            .unwrap();
        assert_relative_eq!(barrier_level(&p).unwrap(), 1.2569, epsilon = 1e-4);
        let p2 = p.with_g0(2.0).unwrap();
        assert_relative_eq!(barrier_level(&p2).unwrap(), 2.0 * barrier_level(&p).unwrap());
        let c = PotentialParams::new(0.1, 1.0, 0.01, Kernel::Cotangent)
            .unwrap()
            .with_m(0.5f64.sqrt())
            .unwrap();
        assert_relative_eq!(barrier_level(&c).unwrap(), 0.01, epsilon = 1e-15);
        let bad = PotentialParams { m: 3.0, ..p };
        assert!(barrier_level(&bad).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(PotentialParams::new(0.1, 0.05, 0.01, Kernel::Cotangent).is_err());
        assert!(PotentialParams::new(0.1, 1.0, 0.0, Kernel::Cotangent).is_err());
        assert!(PotentialParams::new(-0.1, 1.0, 0.01, Kernel::ExpBump).is_err());
        let p = PotentialParams::table1(0.1, Kernel::Cotangent).unwrap();
        assert_relative_eq!(p.big_r, 1.0);
        assert_relative_eq!(p.m, 0.19);
        assert_eq!("cot".parse::<Kernel>().unwrap(), Kernel::Cotangent);
        assert!("gauss".parse::<Kernel>().is_err());
    }

    #[test]
    fn barrier_dominates_close_pairs() {
        for kernel in [Kernel::ExpBump, Kernel::Cotangent] {
            let p = PotentialParams::table1(0.1, kernel).unwrap();
            let em = barrier_level(&p).unwrap();
            let lo = p.singular_distance();
            let hi = p.barrier_distance();
            for k in 1..=50 {
                let d = lo + (hi - lo) * k as f64 / 50.0;
                let c = cfg(&[(0.0, 0.0), (d, 0.0)]);
                let pairs = neighbor_pairs(&c, p.cutoff_distance());
                assert!(repelling(&c, &p, &pairs) >= em, "{kernel} d={d}");
            }
        }
    }
}
