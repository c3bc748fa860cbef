//! Phase-encoded four-mode qudits.
//!
//! A qudit is a single photon in superposition over four modes with fixed
//! real amplitudes `A0..A3` and three tunable relative phases. The phases
//! accumulate along the modes: the state is
//! `A0·a†_0 + A1·e^{iθ1}·a†_1 + A2·e^{i(θ1+θ2)}·a†_2 + A3·e^{i(θ1+θ2+θ3)}·a†_3`
//! acting on vacuum.

use alloc::vec;
use core::f64::consts::TAU;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::PhotonicState;

const NORM_TOL: f64 = 1e-12;

/// Encoding angles from which [`QuditSpec::default`] derives its amplitude
/// profile; chosen to balance classification accuracy across the bundled
/// dataset generators.
pub const DEFAULT_ENCODING_ANGLES: [f64; 3] = [0.862_317_13, 1.342_305_03, 1.661_999_45];

/// Fixed amplitude profile of a four-mode qudit: non-negative entries with
/// `Σ A_i² = 1 ± 1e-12`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuditSpec {
    amplitudes: [f64; 4],
}

impl QuditSpec {
    pub fn new(amplitudes: [f64; 4]) -> Result<Self> {
        if amplitudes.iter().any(|a| *a < 0.0 || !a.is_finite()) {
            return Err(Error::Parameter("qudit amplitudes must be non-negative and finite"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> [f64; 4] {
        self.amplitudes
    }

    /// Uniform profile `A_i = 1/2`.
    pub fn uniform() -> Self {
        Self { amplitudes: [0.5; 4] }
    }
}

impl Default for QuditSpec {
    fn default() -> Self {
        amplitudes_from_angles(
            DEFAULT_ENCODING_ANGLES[0],
            DEFAULT_ENCODING_ANGLES[1],
            DEFAULT_ENCODING_ANGLES[2],
        )
        .expect("default encoding angles are in range")
    }
}

/// Half-angle parameterisation of a normalised amplitude vector:
///
/// ```text
/// A0 = sin(φ1/2)
/// A1 = cos(φ1/2)·sin(φ2/2)
/// A2 = cos(φ1/2)·cos(φ2/2)·sin(φ3/2)
/// A3 = cos(φ1/2)·cos(φ2/2)·cos(φ3/2)
/// ```
///
/// Each angle must lie in `[0, π]` so that all amplitudes are non-negative;
/// `Σ A_i² = 1` holds identically.
pub fn amplitudes_from_angles(phi1: f64, phi2: f64, phi3: f64) -> Result<QuditSpec> {
    for phi in [phi1, phi2, phi3] {
        if !(0.0..=core::f64::consts::PI).contains(&phi) {
            return Err(Error::Parameter("encoding angles must lie in [0, pi]"));
        }
    }
    let (h1, h2, h3) = (phi1 / 2.0, phi2 / 2.0, phi3 / 2.0);
    QuditSpec::new([
        h1.sin(),
        h1.cos() * h2.sin(),
        h1.cos() * h2.cos() * h3.sin(),
        h1.cos() * h2.cos() * h3.cos(),
    ])
}

/// Cumulative component phases `[0, θ1, θ1+θ2, θ1+θ2+θ3]`.
pub fn cumulative_phases(theta: [f64; 3]) -> [f64; 4] {
    [0.0, theta[0], theta[0] + theta[1], theta[0] + theta[1] + theta[2]]
}

/// Wraps each coordinate of a phase vector into `[0, 2π)`.
pub fn wrap_phase_vector(theta: [f64; 3]) -> [f64; 3] {
    theta.map(|t| {
        let r = t % TAU;
        if r < 0.0 {
            r + TAU
        } else {
            r
        }
    })
}

/// The qudit as a four-mode single-photon [`PhotonicState`] in canonical
/// basis order.
pub fn qudit_state(spec: &QuditSpec, theta: [f64; 3]) -> PhotonicState {
    let phases = cumulative_phases(theta);
    let amps: vec::Vec<Complex64> = spec
        .amplitudes
        .iter()
        .zip(phases)
        .map(|(&a, p)| Complex64::from_polar(a, p))
        .collect();
    // Canonical order for (M=4, K=1) is modes 0,1,2,3 top to bottom.
    PhotonicState::new(4, 1, amps).expect("qudit amplitudes are normalised")
}

/// Squared inner product of two qudits with the same amplitude profile:
/// `|Σ_i A_i² e^{i(Θ_i − Φ_i)}|²`.
pub fn qudit_overlap(spec: &QuditSpec, theta: [f64; 3], phi: [f64; 3]) -> f64 {
    let tp = cumulative_phases(theta);
    let pp = cumulative_phases(phi);
    let inner: Complex64 = spec
        .amplitudes
        .iter()
        .zip(tp.iter().zip(pp.iter()))
        .map(|(&a, (&t, &p))| Complex64::from_polar(a * a, t - p))
        .sum();
    inner.norm_sqr()
}
