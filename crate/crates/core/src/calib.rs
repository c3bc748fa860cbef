//! Simulated calibration of a chip with hidden residual phases.
//!
//! Every phaseshifter carries an unknown residual phase `b` (its phase at
//! zero drive) and every MZI carries small directional-coupler errors. The
//! calibration routines recover these from intensity sweeps:
//!
//! - a single-MZI sweep of one internal shifter traces a sinusoid whose
//!   phase offset is the residual difference `b_up − b_low`;
//! - a four-MZI "meta-MZI" sweep recovers the residual of the `Σ` phase of
//!   a target MZI relative to the companion MZI two rows above it.
//!
//! The simulator works directly in phase space; the hardware's
//! current-to-phase polynomial is deliberately bypassed, so recovered
//! quantities are residual phases rather than drive currents.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::UnitaryMatrix;
use crate::mesh::{mzi_transfer, wrap_signed, MziAddress, ShifterAddress, DELTA_BALANCED};

/// Hidden per-shifter residual phases and per-MZI DC errors. The ground
/// truth a calibration run tries to recover.
#[derive(Clone, Debug)]
pub struct ChipResiduals {
    residual: BTreeMap<ShifterAddress, f64>,
    dc_errors: BTreeMap<MziAddress, (f64, f64)>,
}

impl ChipResiduals {
    /// Random chip: residuals uniform in `(-π, π]`, DC errors normal with
    /// the given spread.
    pub fn random(seed: u64, dc_sigma: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let residual = ShifterAddress::grid()
            .map(|s| (s, rng.random_range(-core::f64::consts::PI..core::f64::consts::PI)))
            .collect();
        let dc = Normal::new(0.0, dc_sigma.abs()).expect("valid normal");
        let dc_errors = MziAddress::grid()
            .map(|m| (m, (dc.sample(&mut rng), dc.sample(&mut rng))))
            .collect();
        Self { residual, dc_errors }
    }

    /// Perfect chip: all residuals and DC errors zero.
    pub fn ideal() -> Self {
        Self {
            residual: ShifterAddress::grid().map(|s| (s, 0.0)).collect(),
            dc_errors: MziAddress::grid().map(|m| (m, (0.0, 0.0))).collect(),
        }
    }

    pub fn residual(&self, shifter: ShifterAddress) -> f64 {
        self.residual.get(&shifter).copied().unwrap_or(0.0)
    }

    pub fn dc_errors(&self, mzi: MziAddress) -> (f64, f64) {
        self.dc_errors.get(&mzi).copied().unwrap_or((0.0, 0.0))
    }

    pub fn set_residual(&mut self, shifter: ShifterAddress, value: f64) {
        self.residual.insert(shifter, value);
    }

    pub fn set_dc_errors(&mut self, mzi: MziAddress, alpha: f64, beta: f64) {
        self.dc_errors.insert(mzi, (alpha, beta));
    }

    /// Residual of the internal phase difference, `(b_up − b_low)/2`.
    pub fn delta_residual(&self, mzi: MziAddress) -> f64 {
        (self.residual(mzi.upper_shifter()) - self.residual(mzi.lower_shifter())) / 2.0
    }

    /// Residual of the MZI phase, `(b_up + b_low)/2`.
    pub fn sigma_residual(&self, mzi: MziAddress) -> f64 {
        (self.residual(mzi.upper_shifter()) + self.residual(mzi.lower_shifter())) / 2.0
    }

    /// Transfer matrix under raw drive phases (residuals added blindly).
    fn transfer_raw(&self, mzi: MziAddress, drive_up: f64, drive_low: f64) -> UnitaryMatrix {
        let (alpha, beta) = self.dc_errors(mzi);
        mzi_transfer(
            drive_up + self.residual(mzi.upper_shifter()),
            drive_low + self.residual(mzi.lower_shifter()),
            alpha,
            beta,
        )
    }

    /// Transfer matrix for a commanded `(Σ, δ)` after the internal sweep
    /// has calibrated out the δ residual: the actual internal phase equals
    /// the command exactly, while the Σ residual is still unknown.
    pub fn transfer_delta_compensated(
        &self,
        mzi: MziAddress,
        sigma_cmd: f64,
        delta_cmd: f64,
    ) -> UnitaryMatrix {
        let r = self.delta_residual(mzi);
        self.transfer_raw(mzi, sigma_cmd + delta_cmd - r, sigma_cmd - delta_cmd + r)
    }
}

/// Upper-output power of a single MZI fed on its lower port:
/// `P = sin²(β−α) + ½(cos²(β+α) − sin²(β−α))·(cos(θ1−θ2) + 1)`.
fn mzi_sweep_power(theta1: f64, theta2: f64, alpha: f64, beta: f64) -> f64 {
    let vis_floor = (beta - alpha).sin().powi(2);
    let span = ((beta + alpha).cos().powi(2) - vis_floor) / 2.0;
    vis_floor + span * ((theta1 - theta2).cos() + 1.0)
}

/// Sweeps the upper internal shifter of `mzi` through `[0, 2π)` with the
/// lower shifter undriven and records `(commanded phase, output power)`.
/// The sinusoid's fitted phase recovers the residual difference
/// `b_up − b_low`.
pub fn simulate_internal_sweep(
    chip: &ChipResiduals,
    mzi: MziAddress,
    n_points: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_points < 8 {
        return Err(Error::Parameter("internal sweep needs at least 8 points"));
    }
    let (alpha, beta) = chip.dc_errors(mzi);
    let b_up = chip.residual(mzi.upper_shifter());
    let b_low = chip.residual(mzi.lower_shifter());
    Ok((0..n_points)
        .map(|k| {
            let x = TAU * k as f64 / n_points as f64;
            (x, mzi_sweep_power(x + b_up, b_low, alpha, beta))
        })
        .collect())
}

/// Result of the linear sinusoid fit `y = offset + amplitude·cos(x + phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinusoidFit {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// Least-squares fit of `y = offset + p·cos x + q·sin x`, reported as
/// `offset + amplitude·cos(x + phase)` with `amplitude ≥ 0` and
/// `phase ∈ (−π, π]`. Constant data fit with amplitude 0 and phase 0.
pub fn fit_sinusoid(samples: &[(f64, f64)]) -> Result<SinusoidFit> {
    if samples.len() < 4 {
        return Err(Error::Parameter("sinusoid fit needs at least 4 samples"));
    }
    // Normal equations for the design [1, cos x, sin x].
    let mut a = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(x, y) in samples {
        let row = [1.0, x.cos(), x.sin()];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * y;
        }
    }
    let det = |m: &[[f64; 3]; 3]| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&a);
    let scale: f64 = samples.len() as f64;
    if d.abs() < 1e-9 * scale {
        return Err(Error::FitDegenerate);
    }
    let mut solution = [0.0f64; 3];
    for (k, slot) in solution.iter_mut().enumerate() {
        let mut m = a;
        for i in 0..3 {
            m[i][k] = rhs[i];
        }
        *slot = det(&m) / d;
    }
    let [offset, p, q] = solution;
    let amplitude = p.hypot(q);
    let phase = if amplitude < 1e-12 { 0.0 } else { (-q).atan2(p) };
    Ok(SinusoidFit { offset, amplitude, phase })
}

/// Meta-MZI recovery of the Σ residual of `target`, relative to its
/// companion two rows above.
#[derive(Clone, Copy, Debug)]
pub struct MetaMziOutcome {
    /// Fitted relative Σ residual (target minus companion), in `(−π, π]`.
    pub recovered: f64,
    /// Hidden ground truth for the same quantity.
    pub truth: f64,
}

/// Builds a meta-MZI around `target = (i, j)` from its companions
/// `(i−2, j)` (reference arm), `(i−1, j−1)` and `(i−1, j+1)` (balanced
/// couplers), sweeps the commanded Σ of the target and fits the output
/// sinusoid. Both arm MZIs run in the pass-through state with their δ
/// residual already compensated, so the fit isolates the Σ residuals.
/// DC errors in the balanced companions bias the fit by a small phase.
pub fn calibrate_meta_mzi(
    chip: &ChipResiduals,
    target: MziAddress,
    n_points: usize,
) -> Result<MetaMziOutcome> {
    if n_points < 8 {
        return Err(Error::Parameter("meta-MZI sweep needs at least 8 points"));
    }
    let (i, j) = (target.row(), target.col());
    if i < 2 || j == 0 || j + 1 >= crate::mesh::MESH_COLS {
        return Err(Error::UnsupportedAddress(target));
    }
    let above = MziAddress::new(i - 2, j)?;
    let left = MziAddress::new(i - 1, j - 1)?;
    let right = MziAddress::new(i - 1, j + 1)?;

    let samples: Vec<(f64, f64)> = (0..n_points)
        .map(|k| {
            let sigma_cmd = TAU * k as f64 / n_points as f64;
            let power = meta_mzi_power(chip, target, above, left, right, sigma_cmd);
            (sigma_cmd, power)
        })
        .collect();
    let fit = fit_sinusoid(&samples)?;
    Ok(MetaMziOutcome {
        recovered: wrap_signed(fit.phase),
        truth: wrap_signed(chip.sigma_residual(target) - chip.sigma_residual(above)),
    })
}

/// Upper output power of the meta-MZI at one commanded target Σ.
///
/// Light enters the lower port of `left`; the upper branch (mode i−1)
/// crosses the lower arm of `above`, the lower branch (mode i) crosses the
/// upper arm of `target`; `right` recombines them. Amplitude leaking out of
/// the pass-through MZIs exits the interferometer and only reduces
/// visibility.
fn meta_mzi_power(
    chip: &ChipResiduals,
    target: MziAddress,
    above: MziAddress,
    left: MziAddress,
    right: MziAddress,
    sigma_cmd: f64,
) -> f64 {
    let t_left = chip.transfer_delta_compensated(left, 0.0, DELTA_BALANCED);
    let t_right = chip.transfer_delta_compensated(right, 0.0, DELTA_BALANCED);
    let t_above = chip.transfer_delta_compensated(above, 0.0, FRAC_PI_2);
    let t_target = chip.transfer_delta_compensated(target, sigma_cmd, FRAC_PI_2);

    // Split on `left` (lower-port input), pick up the pass-through arm
    // elements, recombine on `right`.
    let upper_in = t_left.as_matrix()[(0, 1)];
    let lower_in = t_left.as_matrix()[(1, 1)];
    let upper_arm = upper_in * t_above.as_matrix()[(1, 1)];
    let lower_arm = lower_in * t_target.as_matrix()[(0, 0)];
    let out =
        t_right.as_matrix()[(0, 0)] * upper_arm + t_right.as_matrix()[(0, 1)] * lower_arm;
    out.norm_sqr()
}

/// Convenience: fidelity-style check that `meta_mzi_power` is a clean
/// sinusoid also under DC errors; exposed for the calibration CLI.
pub fn meta_mzi_dc_bias(chip: &ChipResiduals, target: MziAddress, n_points: usize) -> Result<f64> {
    // Same sweep on a residual-free twin of the chip: the fitted phase is
    // then purely the DC-induced bias.
    let mut twin = chip.clone();
    for s in ShifterAddress::grid() {
        twin.set_residual(s, 0.0);
    }
    Ok(calibrate_meta_mzi(&twin, target, n_points)?.recovered)
}
