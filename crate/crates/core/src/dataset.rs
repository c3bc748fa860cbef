//! Labelled qudit-phase datasets for the classification task.
//!
//! Points are three-dimensional phase vectors in `[0, 2π)³` with ±1 labels.
//! Three generator families are bundled: linearly separable Gaussian
//! clusters, concentric spheres, and overlapping clusters. Generator
//! parameters are fixed here so dataset geometry is reproducible from a
//! seed alone.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::qudit::wrap_phase_vector;
use crate::seed::seed_mix;

/// One labelled phase vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataPoint {
    /// Qudit phases, canonical form in `[0, 2π)`.
    pub x: [f64; 3],
    /// Binary label, `+1` or `−1`.
    pub label: i8,
}

/// Generator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    /// Two isotropic Gaussian clusters, linearly separable.
    Separate,
    /// Inner ball (−1) versus spherical shell (+1) around a common centre.
    Spherical,
    /// Two Gaussian clusters close enough to overlap.
    Overlapping,
}

impl DatasetKind {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::Separate => "separate",
            DatasetKind::Spherical => "spherical",
            DatasetKind::Overlapping => "overlapping",
        }
    }
}

impl core::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separate" => Ok(DatasetKind::Separate),
            "spherical" => Ok(DatasetKind::Spherical),
            "overlapping" => Ok(DatasetKind::Overlapping),
            _ => Err(Error::Parameter("unknown dataset kind")),
        }
    }
}

// Separate: cluster centres and spread.
const SEPARATE_CENTERS: ([f64; 3], [f64; 3]) =
    ([PI / 2.0, PI / 2.0, PI / 2.0], [3.0 * PI / 2.0, 3.0 * PI / 2.0, 3.0 * PI / 2.0]);
const SEPARATE_SIGMA: f64 = 0.35;

// Spherical: common centre, inner/shell radii and radial jitter. The
// shell sits where the overlap kernel of the default amplitude profile
// has decayed, so the classes separate already at the soft slack C = 0.8.
const SPHERICAL_CENTER: [f64; 3] = [PI, PI, PI];
const SPHERICAL_INNER_RADIUS: f64 = 0.5;
const SPHERICAL_SHELL_RADIUS: f64 = 2.4;
const SPHERICAL_RADIAL_SIGMA: f64 = 0.12;

// Overlapping: centres offset by 1.1 per coordinate, wider spread.
const OVERLAPPING_HALF_OFFSET: f64 = 0.55;
const OVERLAPPING_SIGMA: f64 = 0.55;

fn gaussian_point(center: [f64; 3], sigma: f64, rng: &mut ChaCha8Rng) -> [f64; 3] {
    let normal = Normal::new(0.0, sigma).expect("valid normal");
    [
        center[0] + normal.sample(rng),
        center[1] + normal.sample(rng),
        center[2] + normal.sample(rng),
    ]
}

fn sphere_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    loop {
        let v = [normal.sample(rng), normal.sample(rng), normal.sample(rng)];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-9 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

/// Generates `n` points (label-balanced, shuffled) of the given family.
/// Deterministic in `seed`.
pub fn gen_dataset(kind: DatasetKind, n: usize, seed: u64) -> Result<Vec<DataPoint>> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::Parameter("dataset size must be even and at least 4"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = n / 2;
    let mut points = Vec::with_capacity(n);
    match kind {
        DatasetKind::Separate => {
            for _ in 0..half {
                points.push(DataPoint {
                    x: gaussian_point(SEPARATE_CENTERS.0, SEPARATE_SIGMA, &mut rng),
                    label: 1,
                });
            }
            for _ in 0..half {
                points.push(DataPoint {
                    x: gaussian_point(SEPARATE_CENTERS.1, SEPARATE_SIGMA, &mut rng),
                    label: -1,
                });
            }
        }
        DatasetKind::Spherical => {
            let jitter = Normal::new(0.0, SPHERICAL_RADIAL_SIGMA).expect("valid normal");
            for (radius, label, count) in [
                (SPHERICAL_INNER_RADIUS, -1i8, half),
                (SPHERICAL_SHELL_RADIUS, 1i8, half),
            ] {
                for _ in 0..count {
                    let dir = sphere_direction(&mut rng);
                    let r = (radius + jitter.sample(&mut rng)).max(0.0);
                    points.push(DataPoint {
                        x: [
                            SPHERICAL_CENTER[0] + r * dir[0],
                            SPHERICAL_CENTER[1] + r * dir[1],
                            SPHERICAL_CENTER[2] + r * dir[2],
                        ],
                        label,
                    });
                }
            }
        }
        DatasetKind::Overlapping => {
            let up = SPHERICAL_CENTER.map(|c| c + OVERLAPPING_HALF_OFFSET);
            let down = SPHERICAL_CENTER.map(|c| c - OVERLAPPING_HALF_OFFSET);
            for _ in 0..half {
                points.push(DataPoint {
                    x: gaussian_point(up, OVERLAPPING_SIGMA, &mut rng),
                    label: 1,
                });
            }
            for _ in 0..half {
                points.push(DataPoint {
                    x: gaussian_point(down, OVERLAPPING_SIGMA, &mut rng),
                    label: -1,
                });
            }
        }
    }
    for p in points.iter_mut() {
        p.x = wrap_phase_vector(p.x);
    }
    points.shuffle(&mut rng);
    Ok(points)
}

/// Random half/half split into training and test subsets.
pub fn split_train_test(data: &[DataPoint], split_seed: u64) -> (Vec<DataPoint>, Vec<DataPoint>) {
    let mut indices: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed_mix(split_seed, &[0x5B]));
    indices.shuffle(&mut rng);
    let half = data.len() / 2;
    let train = indices[..half].iter().map(|&i| data[i]).collect();
    let test = indices[half..].iter().map(|&i| data[i]).collect();
    (train, test)
}
