//! Thermal-crosstalk noise model for the phaseshifter grid.
//!
//! The phase a shifter actually acquires differs from the phase it was set
//! to because heat leaks from neighbouring shifters:
//!
//! ```text
//! θ_ij = θ̃_ij + (Σ_{(l,m)≠(i,j)} K_{(i,j),(l,m)} θ̃_lm) · (1 + η_ij θ̃_ij) + ε_ij
//! ```
//!
//! Leak coefficients `K` depend on a baseline per neighbour order times a
//! per-pair factor `ξ ~ N(1, 0.05)`; `η_ij ~ N(η, 0.1η)` captures a small
//! nonlinearity, and `ε_ij` is a residual calibration error with mean `±ε`
//! (sign chosen per shifter with equal probability) and std 0.01 rad. All
//! random factors are frozen at construction so an experiment reuses one
//! realisation; the same seed reproduces the same chip.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::mesh::{MeshSettings, ShifterAddress, MESH_COLS, MESH_MODES};

const GRID: usize = MESH_MODES * MESH_COLS;

/// Baseline crosstalk strengths and error scales.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrosstalkParams {
    /// Nearest-neighbour leak fraction.
    pub k1: f64,
    /// Second-nearest leak fraction.
    pub k2: f64,
    /// Third-nearest leak fraction.
    pub k3: f64,
    /// Global leak fraction for all remaining pairs.
    pub k4: f64,
    /// Baseline nonlinear coefficient.
    pub eta: f64,
    /// Calibration-error scale in radians.
    pub eps: f64,
}

impl CrosstalkParams {
    /// All couplings off; [`apply_crosstalk`] becomes the identity.
    pub fn none() -> Self {
        Self { k1: 0.0, k2: 0.0, k3: 0.0, k4: 0.0, eta: 0.0, eps: 0.0 }
    }
}

impl Default for CrosstalkParams {
    /// Default noise level of the simulated processor
    /// (K1 1.6%, K2 0.4%, K3 0.16%, K4 0.05%, η 1%, ε 0.02 rad).
    fn default() -> Self {
        Self { k1: 0.016, k2: 0.004, k3: 0.0016, k4: 0.0005, eta: 0.01, eps: 0.02 }
    }
}

/// Neighbour classification between two shifters, 1 to 4.
///
/// The grid metric (vertical pitch is much smaller than the column pitch):
/// order 1 is vertically adjacent in the same column, which includes the two
/// arms of one MZI; order 2 is the same row in the adjacent MZI column
/// (`|Δcol| = 2`) or a diagonal neighbour; order 3 is the rest of the
/// two-ring Chebyshev shell; everything farther is order 4 (global).
pub fn neighbor_order(a: ShifterAddress, b: ShifterAddress) -> Result<u8> {
    if a == b {
        return Err(Error::IdenticalAddresses);
    }
    let dr = a.row.abs_diff(b.row);
    let dc = a.col.abs_diff(b.col);
    let order = if dc == 0 && dr == 1 {
        1
    } else if (dc == 2 && dr == 0) || (dc == 1 && dr == 1) {
        2
    } else if dr <= 2 && dc <= 2 {
        3
    } else {
        4
    };
    Ok(order)
}

/// One frozen realisation of the crosstalk noise.
#[derive(Clone, Debug)]
pub struct CrosstalkModel {
    params: CrosstalkParams,
    seed: u64,
    /// ξ per (victim, aggressor) pair, row-major `victim*100 + aggressor`.
    xi: Vec<f64>,
    /// η per shifter.
    eta: Vec<f64>,
    /// ε per shifter (signed mean already applied).
    eps: Vec<f64>,
}

impl CrosstalkModel {
    /// Draws and freezes the noise realisation. Draw order is fixed
    /// (ξ table, then η, then ε) so a seed pins the chip exactly.
    pub fn new(params: CrosstalkParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi_dist = Normal::new(1.0, 0.05).expect("valid normal");
        let xi: Vec<f64> = (0..GRID * GRID).map(|_| xi_dist.sample(&mut rng)).collect();

        let eta_dist = Normal::new(params.eta, 0.1 * params.eta.abs()).expect("valid normal");
        let eta: Vec<f64> = (0..GRID).map(|_| eta_dist.sample(&mut rng)).collect();

        // ε = 0 means calibration is taken as perfect and the whole error
        // term vanishes; the per-shifter jitter only rides on a non-zero
        // scale.
        let eps_noise = Normal::new(0.0, 0.01).expect("valid normal");
        let eps: Vec<f64> = (0..GRID)
            .map(|_| {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let jitter = eps_noise.sample(&mut rng);
                if params.eps == 0.0 {
                    0.0
                } else {
                    sign * params.eps + jitter
                }
            })
            .collect();

        Self { params, seed, xi, eta, eps }
    }

    pub fn params(&self) -> CrosstalkParams {
        self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn baseline(&self, order: u8) -> f64 {
        match order {
            1 => self.params.k1,
            2 => self.params.k2,
            3 => self.params.k3,
            _ => self.params.k4,
        }
    }

    /// Perturbs a full mesh configuration: intended per-shifter phases in,
    /// actual phases out, then the settings are rebuilt per MZI.
    pub fn perturb_settings(&self, settings: &MeshSettings) -> MeshSettings {
        let actual = apply_crosstalk(self, &settings.driven_phases());
        MeshSettings::from_shifter_phases(&actual)
    }
}

/// Applies the crosstalk map to intended phases. Shifters missing from
/// `intended` are undriven and contribute `θ̃ = 0` to every sum.
pub fn apply_crosstalk(
    model: &CrosstalkModel,
    intended: &BTreeMap<ShifterAddress, f64>,
) -> BTreeMap<ShifterAddress, f64> {
    // Dense copy of the drive; aggressor sums only visit driven shifters.
    let mut drive = vec![0.0f64; GRID];
    for (shifter, &phase) in intended {
        drive[shifter.flat()] = phase;
    }
    let driven: Vec<ShifterAddress> = intended
        .iter()
        .filter(|(_, &phase)| phase != 0.0)
        .map(|(s, _)| *s)
        .collect();

    let mut out = BTreeMap::new();
    for victim in ShifterAddress::grid() {
        let vi = victim.flat();
        let mut leak = 0.0;
        for &aggressor in &driven {
            if aggressor == victim {
                continue;
            }
            let order = neighbor_order(victim, aggressor).expect("distinct addresses");
            leak += model.baseline(order)
                * model.xi[vi * GRID + aggressor.flat()]
                * drive[aggressor.flat()];
        }
        let intended_here = drive[vi];
        let actual =
            intended_here + leak * (1.0 + model.eta[vi] * intended_here) + model.eps[vi];
        out.insert(victim, actual);
    }
    out
}
