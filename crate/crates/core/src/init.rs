//! Initial robot placements.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::potentials::Configuration;
use crate::shape::Shape;
use crate::Vec2;

const ATTEMPTS_PER_ROBOT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// Uniform in a square of side `box_side` at the `(-M, -M)` corner.
    Corner,
    /// Uniform on the whole domain.
    Random,
    /// On distinct shape points.
    OnShape,
}

impl std::str::FromStr for InitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corner" => Ok(InitMode::Corner),
            "random" => Ok(InitMode::Random),
            "shape" | "on_shape" => Ok(InitMode::OnShape),
            _ => Err(invalid("init", format!("unknown mode {s:?} (corner, random, shape)"))),
        }
    }
}

impl std::fmt::Display for InitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InitMode::Corner => "corner",
            InitMode::Random => "random",
            InitMode::OnShape => "shape",
        })
    }
}

/// Random sequential placement in `[lo, hi]^2` keeping every pair strictly
/// farther apart than `min_spacing`.
pub fn in_box(n: usize, lo: Vec2, hi: Vec2, min_spacing: f64, seed: u64) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed: Vec<Vec2> = Vec::with_capacity(n);
    let s2 = min_spacing * min_spacing;
    let mut attempts = 0;
    while placed.len() < n {
        if attempts >= ATTEMPTS_PER_ROBOT * n {
            return Err(Error::Placement {
                placed: placed.len(),
                wanted: n,
                attempts,
            });
        }
        attempts += 1;
        let p = Vec2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if placed.iter().all(|q| (p - q).norm_squared() > s2) {
            placed.push(p);
        }
    }
    Configuration::new(placed)
}

/// Cluster in the lower-left corner box of side `side`.
pub fn corner(n: usize, domain_m: f64, side: f64, min_spacing: f64, seed: u64) -> Result<Configuration> {
    let side = side.min(2.0 * domain_m);
    let lo = Vec2::new(-domain_m, -domain_m);
    in_box(n, lo, lo + Vec2::new(side, side), min_spacing, seed)
}

pub fn random(n: usize, domain_m: f64, min_spacing: f64, seed: u64) -> Result<Configuration> {
    in_box(
        n,
        Vec2::new(-domain_m, -domain_m),
        Vec2::new(domain_m, domain_m),
        min_spacing,
        seed,
    )
}

/// Robots on shape points visited in seeded random order, skipping points
/// within `min_spacing` of an already chosen one.
pub fn on_shape(n: usize, shape: &Shape, min_spacing: f64, seed: u64) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..shape.len()).collect();
    order.shuffle(&mut rng);
    let s2 = min_spacing * min_spacing;
    let mut placed: Vec<Vec2> = Vec::with_capacity(n);
    for &k in &order {
        let p = shape.points()[k];
        if placed.iter().all(|q| (p - q).norm_squared() > s2) {
            placed.push(p);
            if placed.len() == n {
                return Configuration::new(placed);
            }
        }
    }
    Err(Error::Placement {
        placed: placed.len(),
        wanted: n,
        attempts: order.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::min_pairwise_distance;

    #[test]
    fn corner_cluster_respects_spacing_and_box() {
        let c = corner(50, 6.0, 2.0, 0.19, 4).unwrap();
        assert_eq!(c.len(), 50);
        assert!(min_pairwise_distance(&c) > 0.19);
        assert!(c.positions().iter().all(|p| p.x <= -4.0 && p.y <= -4.0));
        assert_eq!(c, corner(50, 6.0, 2.0, 0.19, 4).unwrap());
    }

    #[test]
    fn impossible_packing_reports_placement_error() {
        assert!(matches!(
            corner(100, 6.0, 1.0, 0.5, 0),
            Err(Error::Placement { wanted: 100, .. })
        ));
    }

    #[test]
    fn on_shape_points_belong_to_shape() {
        let s = Shape::circle(Vec2::zeros(), 3.0, 200).unwrap();
        let c = on_shape(20, &s, 0.5, 9).unwrap();
        assert!(min_pairwise_distance(&c) > 0.5);
        for p in c.positions() {
            assert_eq!(s.mu(*p), 0.0);
        }
        assert!(on_shape(200, &s, 0.5, 9).is_err());
    }
}
