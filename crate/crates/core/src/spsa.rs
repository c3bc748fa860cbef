//! Online learning of an unknown qudit by simultaneous perturbation
//! stochastic approximation.
//!
//! The cost is the measured infidelity `c(θ) = 1 − Ỹ(θ, target)`, so each
//! iteration consumes two overlap evaluations: one at `θ + t_k·Δ` and one
//! at `θ − t_k·Δ` for a random sign vector `Δ ∈ {±1}³`. Parameters follow
//! the decaying schedules
//!
//! ```text
//! a_k = a / (A + k + 1)^α       t_k = t / (k + 1)^γ
//! ```
//!
//! The perturbation scale `t` is calibrated at the start of a run from the
//! spread of five repeated cost evaluations (twice their standard
//! deviation), falling back to 0.1 rad when the evaluations are noiseless.
//! The sign-vector stream and the shot-noise seeds are independent.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::estimator::OverlapExperiment;
use crate::qudit::qudit_overlap;
use crate::seed::seed_mix;

/// Perturbation scale used when the cost evaluator shows zero spread.
pub const PERTURBATION_FALLBACK: f64 = 0.1;

/// Schedule constants and run shape.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpsaConfig {
    /// Gain numerator `a`.
    pub gain: f64,
    /// Stability constant `A`.
    pub stability: f64,
    /// Gain decay exponent `α`.
    pub gain_decay: f64,
    /// Perturbation decay exponent `γ`.
    pub perturb_decay: f64,
    /// Iterations per optimisation run.
    pub iterations: usize,
    /// Shots per overlap (cost) evaluation.
    pub shots_per_eval: u64,
    /// Gradient estimates averaged per iteration (plain SPSA uses 1).
    pub gradient_reps: usize,
    /// Perturbation scale `t`; `None` calibrates it at run time.
    pub perturbation: Option<f64>,
    /// Seed of the run (initial point, sign vectors, shot noise).
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            gain: 1.6,
            stability: 10.0,
            gain_decay: 0.602,
            perturb_decay: 0.101,
            iterations: 500,
            shots_per_eval: 100,
            gradient_reps: 1,
            perturbation: None,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    /// Gain `a_k = a / (A + k + 1)^α`.
    pub fn gain_at(&self, k: usize) -> f64 {
        self.gain / (self.stability + k as f64 + 1.0).powf(self.gain_decay)
    }

    /// Perturbation `t_k = t / (k + 1)^γ`.
    pub fn perturb_at(&self, k: usize, t: f64) -> f64 {
        t / (k as f64 + 1.0).powf(self.perturb_decay)
    }
}

/// Calibrates the perturbation scale: five evaluations of the cost at the
/// initial point, `t = 2 × sample std`, with the documented fallback for
/// zero spread.
pub fn init_t(cost: &mut impl FnMut([f64; 3]) -> f64, theta0: [f64; 3]) -> f64 {
    let samples: Vec<f64> = (0..5).map(|_| cost(theta0)).collect();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
        / (samples.len() - 1) as f64;
    let t = 2.0 * var.sqrt();
    if t < 1e-12 {
        PERTURBATION_FALLBACK
    } else {
        t
    }
}

/// What one iteration measured and did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub cost_plus: f64,
    pub cost_minus: f64,
    pub gradient: [f64; 3],
}

/// One SPSA update. Draws `Δ ∈ {±1}³` from `rng`, evaluates the cost at
/// both perturbations, and steps against the gradient estimate
/// `g_j = (c₊ − c₋) / (2·t_k·Δ_j)`.
pub fn spsa_step(
    theta: [f64; 3],
    k: usize,
    t: f64,
    config: &SpsaConfig,
    cost: &mut impl FnMut([f64; 3]) -> f64,
    rng: &mut ChaCha8Rng,
) -> ([f64; 3], StepRecord) {
    let t_k = config.perturb_at(k, t);
    let reps = config.gradient_reps.max(1);
    let mut gradient = [0.0f64; 3];
    let mut last_plus = 0.0;
    let mut last_minus = 0.0;
    for _ in 0..reps {
        let delta: [f64; 3] =
            [0.0; 3].map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 });
        let plus = theta.zip_add(delta.map(|d| d * t_k));
        let minus = theta.zip_add(delta.map(|d| -d * t_k));
        let c_plus = cost(plus);
        let c_minus = cost(minus);
        for j in 0..3 {
            gradient[j] += (c_plus - c_minus) / (2.0 * t_k * delta[j]) / reps as f64;
        }
        last_plus = c_plus;
        last_minus = c_minus;
    }
    let a_k = config.gain_at(k);
    let next = [
        theta[0] - a_k * gradient[0],
        theta[1] - a_k * gradient[1],
        theta[2] - a_k * gradient[2],
    ];
    (next, StepRecord { cost_plus: last_plus, cost_minus: last_minus, gradient })
}

trait ZipAdd {
    fn zip_add(self, rhs: [f64; 3]) -> [f64; 3];
}

impl ZipAdd for [f64; 3] {
    fn zip_add(self, rhs: [f64; 3]) -> [f64; 3] {
        [self[0] + rhs[0], self[1] + rhs[1], self[2] + rhs[2]]
    }
}

/// Full record of one optimisation run.
#[derive(Clone, Debug)]
pub struct SpsaTrace {
    /// Visited points, `iterations + 1` entries including the start.
    pub points: Vec<[f64; 3]>,
    /// Per-iteration measurements, `iterations` entries.
    pub records: Vec<StepRecord>,
    /// Noiseless infidelity against the target at every point; a
    /// diagnostic only — the optimiser never sees these values.
    pub true_infidelity: Vec<f64>,
    /// Perturbation scale the run settled on.
    pub perturbation: f64,
}

impl SpsaTrace {
    pub fn final_infidelity(&self) -> f64 {
        *self.true_infidelity.last().expect("trace has at least one point")
    }
}

/// Learns the target phases online. The initial point is uniform in
/// `[0, 2π)³`; every cost evaluation is one simulated overlap experiment
/// with `shots_per_eval` post-selected events on the (optionally noisy)
/// chip, where the target is re-prepared through the same noise model at
/// each evaluation. Deterministic in `config.seed`.
pub fn run_online_learning(
    target: [f64; 3],
    config: &SpsaConfig,
    experiment: &OverlapExperiment,
) -> Result<SpsaTrace> {
    let mut sign_rng = ChaCha8Rng::seed_from_u64(seed_mix(config.seed, &[0]));
    let theta0: [f64; 3] = [0.0; 3].map(|_| sign_rng.random_range(0.0..TAU));

    let failure = core::cell::RefCell::new(None);
    let mut eval_counter: u64 = 0;
    let mut cost = |theta: [f64; 3]| -> f64 {
        let seed = seed_mix(config.seed, &[1, eval_counter]);
        eval_counter += 1;
        match experiment.simulate(theta, target, config.shots_per_eval, seed) {
            Ok(est) => 1.0 - est.value(),
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    };

    let t = match config.perturbation {
        Some(t) => t,
        None => init_t(&mut cost, theta0),
    };
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }

    let infidelity =
        |theta: [f64; 3]| 1.0 - qudit_overlap(&experiment.amplitudes, theta, target);

    let mut points = Vec::with_capacity(config.iterations + 1);
    let mut records = Vec::with_capacity(config.iterations);
    let mut true_infidelity = Vec::with_capacity(config.iterations + 1);
    let mut theta = theta0;
    points.push(theta);
    true_infidelity.push(infidelity(theta));

    for k in 0..config.iterations {
        let (next, record) = spsa_step(theta, k, t, config, &mut cost, &mut sign_rng);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        theta = next;
        points.push(theta);
        records.push(record);
        true_infidelity.push(infidelity(theta));
    }

    Ok(SpsaTrace { points, records, true_infidelity, perturbation: t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_match_closed_forms_and_decay() {
        let config = SpsaConfig::default();
        assert!((config.perturb_at(0, 0.7) - 0.7).abs() < 1e-15);
        assert!((config.gain_at(0) - 1.6 / 11.0f64.powf(0.602)).abs() < 1e-15);
        for k in 0..100 {
            assert!(config.gain_at(k + 1) < config.gain_at(k));
            assert!(config.perturb_at(k + 1, 0.7) < config.perturb_at(k, 0.7));
        }
    }

    #[test]
    fn init_t_uses_spread_and_fallback() {
        let mut constant = |_: [f64; 3]| 0.42;
        assert_eq!(init_t(&mut constant, [0.0; 3]), PERTURBATION_FALLBACK);

        let mut sequence = [0.1, 0.2, 0.3, 0.4, 0.5].into_iter();
        let mut noisy = move |_: [f64; 3]| sequence.next().unwrap();
        // Sample std of 0.1..0.5 is sqrt(0.025) ≈ 0.1581.
        let t = init_t(&mut noisy, [0.0; 3]);
        assert!((t - 2.0 * 0.025f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn constant_cost_freezes_the_iterate() {
        let config = SpsaConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cost = |_: [f64; 3]| 0.5;
        let theta = [1.0, 2.0, 3.0];
        let (next, record) = spsa_step(theta, 0, 0.1, &config, &mut cost, &mut rng);
        assert_eq!(next, theta);
        assert_eq!(record.gradient, [0.0; 3]);
    }

    #[test]
    fn linear_cost_yields_exact_directional_gradient() {
        // For c(θ) = w·θ the two-point rule recovers g_j = (w·Δ)/Δ_j
        // exactly; its expectation over Δ is w.
        let config = SpsaConfig::default();
        let w = [0.3, -0.7, 0.2];
        let mut cost = |x: [f64; 3]| x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let theta = [0.0; 3];
        let mut mean = [0.0f64; 3];
        let reps = 4000;
        for k in 0..reps {
            let (_, record) = spsa_step(theta, k % 17, 0.05, &config, &mut cost, &mut rng);
            // Every single-step estimate satisfies g_j·Δ_j = w·Δ; check the
            // product structure by verifying g ∈ {±w·Δ} componentwise.
            for j in 0..3 {
                mean[j] += record.gradient[j] / reps as f64;
            }
        }
        for j in 0..3 {
            assert!(
                (mean[j] - w[j]).abs() < 0.05,
                "gradient expectation {mean:?} vs {w:?}"
            );
        }
    }

    #[test]
    fn quadratic_cost_converges_to_minimiser() {
        let config = SpsaConfig { iterations: 500, ..SpsaConfig::default() };
        let target = [2.0, -1.0, 0.5];
        let mut cost = |x: [f64; 3]| {
            x.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * 0.5
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut theta = [0.0; 3];
        let t = PERTURBATION_FALLBACK;
        for k in 0..config.iterations {
            theta = spsa_step(theta, k, t, &config, &mut cost, &mut rng).0;
        }
        let dist: f64 = theta
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-2, "final distance {dist}");
    }

    #[test]
    fn quadratic_trace_matches_reference_implementation() {
        // Plain re-implementation of the update loop; same rng stream must
        // give bit-identical iterates.
        let config = SpsaConfig::default();
        let cost_fn = |x: [f64; 3]| (x[0] * x[0] + 2.0 * x[1] * x[1] + 0.5 * x[2] * x[2]) * 0.5;
        let t = 0.2;

        let mut rng_lib = ChaCha8Rng::seed_from_u64(4);
        let mut rng_ref = ChaCha8Rng::seed_from_u64(4);
        let mut theta_lib = [1.0, -0.5, 2.0];
        let mut theta_ref = theta_lib;
        for k in 0..50 {
            let mut cost = cost_fn;
            theta_lib = spsa_step(theta_lib, k, t, &config, &mut cost, &mut rng_lib).0;

            // Reference step.
            let delta: [f64; 3] =
                [0.0; 3].map(|_| if rng_ref.random_bool(0.5) { 1.0 } else { -1.0 });
            let t_k = t / (k as f64 + 1.0).powf(config.perturb_decay);
            let plus = [
                theta_ref[0] + delta[0] * t_k,
                theta_ref[1] + delta[1] * t_k,
                theta_ref[2] + delta[2] * t_k,
            ];
            let minus = [
                theta_ref[0] - delta[0] * t_k,
                theta_ref[1] - delta[1] * t_k,
                theta_ref[2] - delta[2] * t_k,
            ];
            let diff = cost_fn(plus) - cost_fn(minus);
            let a_k = config.gain / (config.stability + k as f64 + 1.0).powf(config.gain_decay);
            for j in 0..3 {
                let g = diff / (2.0 * t_k * delta[j]);
                theta_ref[j] -= a_k * g;
            }
            assert_eq!(theta_lib, theta_ref, "diverged at iteration {k}");
        }
    }

    #[test]
    fn noiseless_run_starting_at_target_stays_there() {
        let experiment = OverlapExperiment::noiseless();
        // Find the θ0 that this seed draws and use it as the target.
        let config = SpsaConfig { shots_per_eval: 1000, seed: 77, ..SpsaConfig::default() };
        let mut probe_rng = ChaCha8Rng::seed_from_u64(seed_mix(config.seed, &[0]));
        let theta0: [f64; 3] = [0.0; 3].map(|_| probe_rng.random_range(0.0..TAU));

        let trace = run_online_learning(theta0, &config, &experiment).unwrap();
        assert!(trace.true_infidelity[0] < 1e-12);
        assert!(
            trace.final_infidelity() < 1e-2,
            "drifted away from the target: {}",
            trace.final_infidelity()
        );
    }

    #[test]
    fn runs_are_deterministic_in_the_seed() {
        let experiment = OverlapExperiment::noiseless();
        let config = SpsaConfig {
            iterations: 20,
            shots_per_eval: 50,
            seed: 5,
            ..SpsaConfig::default()
        };
        let a = run_online_learning([1.0, 2.0, 3.0], &config, &experiment).unwrap();
        let b = run_online_learning([1.0, 2.0, 3.0], &config, &experiment).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.true_infidelity, b.true_infidelity);
    }

    #[test]
    fn trace_shape_matches_iteration_count() {
        let experiment = OverlapExperiment::noiseless();
        let config = SpsaConfig {
            iterations: 0,
            shots_per_eval: 10,
            seed: 6,
            ..SpsaConfig::default()
        };
        let trace = run_online_learning([0.4, 0.5, 0.6], &config, &experiment).unwrap();
        assert_eq!(trace.points.len(), 1);
        assert_eq!(trace.records.len(), 0);
        assert_eq!(trace.true_infidelity.len(), 1);
    }

    #[test]
    fn median_infidelity_trend_is_non_increasing_in_windows() {
        // Ten noiseless runs, medians smoothed over 50-iteration windows.
        let experiment = OverlapExperiment::noiseless();
        let mut traces = Vec::new();
        for run in 0..10u64 {
            let config = SpsaConfig {
                iterations: 300,
                shots_per_eval: 1000,
                seed: seed_mix(31, &[run]),
                ..SpsaConfig::default()
            };
            let target = {
                let mut rng = ChaCha8Rng::seed_from_u64(seed_mix(32, &[run]));
                [0.0; 3].map(|_| rng.random_range(0.0..TAU))
            };
            traces.push(run_online_learning(target, &config, &experiment).unwrap());
        }
        let median_at = |k: usize| {
            let mut vals: Vec<f64> =
                traces.iter().map(|t| t.true_infidelity[k]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            (vals[4] + vals[5]) / 2.0
        };
        let window = 50;
        let mut smoothed = Vec::new();
        let mut k = 0;
        while k + window <= 300 {
            let avg: f64 =
                (k..k + window).map(median_at).sum::<f64>() / window as f64;
            smoothed.push(avg);
            k += window;
        }
        for pair in smoothed.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-9,
                "windowed median increased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }
}
