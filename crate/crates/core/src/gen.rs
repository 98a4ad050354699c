//! Synthetic point sets for experiments and tests.

use rand::Rng as _;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::PointSet;
use crate::rng::{seeded_rng, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointDistribution {
    /// Uniform on `[0, 1]^d`.
    UniformSquare,
    /// Equal-weight mixture of three unit Gaussians centred at `0`, `6 e_1`
    /// and `6 e_2` (`6 e_1` and `-6 e_1` when `d = 1`).
    GaussianMixture,
    /// Uniform on the unit sphere `S^{d-1}` (the unit circle when `d = 2`).
    Circle,
    /// Five tight Gaussian clusters with random centres in `[0, 10]^d` and
    /// uneven weights.
    Clustered,
    /// Uniform in the unit ball.
    Ball,
}

impl std::str::FromStr for PointDistribution {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform-square" => PointDistribution::UniformSquare,
            "gaussian-mixture" => PointDistribution::GaussianMixture,
            "circle" => PointDistribution::Circle,
            "clustered" => PointDistribution::Clustered,
            "ball" => PointDistribution::Ball,
            _ => return Err(domain(format!("unknown distribution {s:?}"))),
        })
    }
}

/// `n` points in `R^d` drawn from `dist`.
pub fn generate(dist: PointDistribution, n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if n == 0 || d == 0 {
        return Err(domain(format!("need n >= 1 and d >= 1, got n = {n}, d = {d}")));
    }
    let mut rng = seeded_rng(seed);
    let mut flat = Vec::with_capacity(n * d);
    match dist {
        PointDistribution::UniformSquare => {
            flat.extend((0..n * d).map(|_| rng.random::<f64>()));
        }
        PointDistribution::GaussianMixture => {
            for _ in 0..n {
                let mut x = gaussian(&mut rng, d);
                match rng.random_range(0..3) {
                    0 => {}
                    1 => x[0] += 6.0,
                    _ if d == 1 => x[0] -= 6.0,
                    _ => x[1] += 6.0,
                }
                flat.extend(x);
            }
        }
        PointDistribution::Circle => {
            for _ in 0..n {
                flat.extend(on_sphere(&mut rng, d));
            }
        }
        PointDistribution::Clustered => {
            const K: usize = 5;
            let centres: Vec<Vec<f64>> = (0..K).map(|_| (0..d).map(|_| 10.0 * rng.random::<f64>()).collect()).collect();
            // Weights proportional to 1, 2, ..., K.
            let total = (K * (K + 1) / 2) as u32;
            for _ in 0..n {
                let mut u = rng.random_range(0..total);
                let mut k = 0;
                while u > k as u32 {
                    u -= k as u32 + 1;
                    k += 1;
                }
                let x = gaussian(&mut rng, d);
                flat.extend(x.iter().zip(&centres[k]).map(|(a, c)| c + 0.3 * a));
            }
        }
        PointDistribution::Ball => {
            for _ in 0..n {
                let r = rng.random::<f64>().powf(1.0 / d as f64);
                flat.extend(on_sphere(&mut rng, d).into_iter().map(|c| c * r));
            }
        }
    }
    PointSet::from_flat(d, flat)
}

fn gaussian(rng: &mut Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

fn on_sphere(rng: &mut Rng, d: usize) -> Vec<f64> {
    loop {
        let x = gaussian(rng, d);
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return x.into_iter().map(|c| c / norm).collect();
        }
    }
}
