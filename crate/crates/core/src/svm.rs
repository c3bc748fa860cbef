//! Soft-margin SVM on measured kernels: dual training by sequential
//! minimal optimisation, prediction, and bootstrap accuracy errors.
//!
//! The dual program is
//!
//! ```text
//! max_β Σ β_i − ½ ΣΣ β_i β_j y_i y_j K_ij
//! s.t.  0 ≤ β_i ≤ C,  Σ β_i y_i = 0
//! ```
//!
//! Pairs are selected by maximal KKT violation and updated analytically.
//! Measured kernels can be slightly indefinite; the pair curvature is
//! floored at a small positive value so the solver still reaches a
//! stationary point instead of being rejected.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Hypergeometric};

use crate::error::{Error, Result};
use crate::kernel::{KernelMatrix, TestKernel, TrainKernel};
use crate::seed::seed_mix;

/// Slack constant used throughout the bundled experiments.
pub const DEFAULT_SLACK: f64 = 0.8;
/// KKT tolerance at which training stops.
pub const KKT_TOL: f64 = 1e-6;
/// Cap on pair updates before the solver reports divergence.
pub const MAX_PAIR_UPDATES: usize = 100_000;
/// β below this is not counted as a support vector.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Curvature floor for indefinite pair subproblems.
const CURVATURE_FLOOR: f64 = 1e-12;

/// Trained classifier.
#[derive(Clone, Debug)]
pub struct SvmModel {
    beta: Vec<f64>,
    /// Bias from averaging the margin residual over all training points.
    bias: f64,
    /// Bias from the final KKT interval midpoint; the one that makes the
    /// stationarity conditions tight.
    kkt_bias: f64,
    slack: f64,
    labels: Vec<i8>,
    support: Vec<usize>,
    iterations: usize,
    residual: f64,
    /// Dual objective sampled every few hundred updates (for the
    /// monotonicity invariant).
    pub objective_trace: Vec<f64>,
}

impl SvmModel {
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kkt_bias(&self) -> f64 {
        self.kkt_bias
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    /// Indices with `β > tolerance`; prediction only needs these entries.
    pub fn support_indices(&self) -> &[usize] {
        &self.support
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Remaining KKT violation when training stopped.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Decision value `Σ_{i ∈ support} β_i y_i k_i + b`. Non-support
    /// entries of `k_row` are ignored and may be NaN; a NaN support entry
    /// is a missing measurement and rejected.
    pub fn decision_value(&self, k_row: &[f64]) -> Result<f64> {
        if k_row.len() != self.beta.len() {
            return Err(Error::DimensionMismatch("kernel row length != training size"));
        }
        let mut acc = self.bias;
        for &i in &self.support {
            let k = k_row[i];
            if k.is_nan() {
                return Err(Error::MissingKernelEntry(i));
            }
            acc += self.beta[i] * self.labels[i] as f64 * k;
        }
        Ok(acc)
    }

    /// Decision value with the KKT bias; used by the stationarity checks.
    pub fn decision_value_kkt(&self, k_row: &[f64]) -> Result<f64> {
        Ok(self.decision_value(k_row)? - self.bias + self.kkt_bias)
    }
}

/// Predicted label of a point given its overlaps with the training set;
/// an exact zero breaks towards `+1`.
pub fn svm_predict(model: &SvmModel, k_row: &[f64]) -> Result<i8> {
    Ok(if model.decision_value(k_row)? >= 0.0 { 1 } else { -1 })
}

/// Trains the dual by sequential two-variable optimisation with maximal
/// KKT-violating pair selection.
pub fn svm_train(kernel: &KernelMatrix, labels: &[i8], slack: f64) -> Result<SvmModel> {
    let m = kernel.dim();
    if labels.len() != m {
        return Err(Error::DimensionMismatch("labels length != kernel dimension"));
    }
    if !(slack > 0.0 && slack.is_finite()) {
        return Err(Error::Parameter("slack constant must be positive"));
    }
    if labels.iter().any(|y| *y != 1 && *y != -1) {
        return Err(Error::Parameter("labels must be +1 or -1"));
    }

    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    let q = |i: usize, j: usize| y[i] * y[j] * kernel.get(i, j);

    // Minimise f(β) = ½βᵀQβ − Σβ; gradient starts at −1.
    let mut beta = vec![0.0f64; m];
    let mut grad = vec![-1.0f64; m];
    let mut objective_trace = Vec::new();
    let objective = |beta: &[f64], grad: &[f64]| -> f64 {
        0.5 * beta
            .iter()
            .zip(grad)
            .map(|(b, g)| b * (g - 1.0))
            .sum::<f64>()
    };

    let mut iterations = 0;
    let (residual, upper, lower) = loop {
        // Working-set selection: most violating pair.
        let mut up_val = f64::NEG_INFINITY;
        let mut up_idx = None;
        let mut low_val = f64::INFINITY;
        let mut low_idx = None;
        for t in 0..m {
            let v = -y[t] * grad[t];
            let in_up = (y[t] > 0.0 && beta[t] < slack) || (y[t] < 0.0 && beta[t] > 0.0);
            let in_low = (y[t] < 0.0 && beta[t] < slack) || (y[t] > 0.0 && beta[t] > 0.0);
            if in_up && v > up_val {
                up_val = v;
                up_idx = Some(t);
            }
            if in_low && v < low_val {
                low_val = v;
                low_idx = Some(t);
            }
        }
        if up_val - low_val <= KKT_TOL || up_idx.is_none() || low_idx.is_none() {
            break (up_val - low_val, up_val, low_val);
        }
        if iterations >= MAX_PAIR_UPDATES {
            return Err(Error::SolverDiverged { residual: up_val - low_val });
        }
        let i = up_idx.expect("checked above");
        let j = low_idx.expect("checked above");

        // Two-variable subproblem along the equality constraint.
        let mut curvature = q(i, i) + q(j, j) - 2.0 * y[i] * y[j] * kernel.get(i, j);
        if curvature <= 0.0 {
            curvature = CURVATURE_FLOOR;
        }
        let step = (-y[i] * grad[i] + y[j] * grad[j]) / curvature;
        let old_i = beta[i];
        let old_j = beta[j];
        let conserved = y[i] * old_i + y[j] * old_j;
        let mut new_i = old_i + y[i] * step;
        let mut new_j;
        // Clip into the box while keeping y·β fixed.
        new_i = new_i.clamp(0.0, slack);
        new_j = y[j] * (conserved - y[i] * new_i);
        if !(0.0..=slack).contains(&new_j) {
            new_j = new_j.clamp(0.0, slack);
            new_i = y[i] * (conserved - y[j] * new_j);
            new_i = new_i.clamp(0.0, slack);
        }
        let d_i = new_i - old_i;
        let d_j = new_j - old_j;
        beta[i] = new_i;
        beta[j] = new_j;
        for t in 0..m {
            grad[t] += q(t, i) * d_i + q(t, j) * d_j;
        }

        iterations += 1;
        if iterations % 200 == 0 {
            objective_trace.push(objective(&beta, &grad));
        }
    };
    objective_trace.push(objective(&beta, &grad));

    // Decision values without bias, for both bias conventions.
    let margins: Vec<f64> = (0..m)
        .map(|t| (0..m).map(|i| beta[i] * y[i] * kernel.get(t, i)).sum())
        .collect();
    let bias =
        (0..m).map(|t| y[t] - margins[t]).sum::<f64>() / m as f64;
    let kkt_bias = if upper.is_finite() && lower.is_finite() {
        (upper + lower) / 2.0
    } else {
        bias
    };
    let support: Vec<usize> = (0..m).filter(|&i| beta[i] > SUPPORT_TOL).collect();

    Ok(SvmModel {
        beta,
        bias,
        kkt_bias,
        slack,
        labels: labels.to_vec(),
        support,
        iterations,
        residual: residual.max(0.0),
        objective_trace,
    })
}

/// Bootstrap accuracy statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapResult {
    pub mean: f64,
    pub std: f64,
    /// Set when fewer than two resamples make the spread undefined;
    /// the reported std is then 0 by convention.
    pub degenerate: bool,
}

/// Resamples the per-entry coincidence pools, re-derives kernels, retrains
/// and re-predicts, returning accuracy mean ± std over the resamples.
///
/// Each kernel entry must retain its measurement pool (tallies), and each
/// pool must hold at least `resample_events` events.
pub fn bootstrap_accuracy(
    train: &TrainKernel,
    train_labels: &[i8],
    test: &TestKernel,
    test_labels: &[i8],
    slack: f64,
    resample_events: u64,
    resamples: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    let train_tallies = train
        .tallies
        .as_ref()
        .ok_or(Error::Parameter("bootstrap requires sampled kernels with retained tallies"))?;
    let test_tallies = test
        .tallies
        .as_ref()
        .ok_or(Error::Parameter("bootstrap requires sampled kernels with retained tallies"))?;
    if resamples == 0 {
        return Err(Error::Parameter("bootstrap needs at least one resample"));
    }
    let pool_ok = train_tallies
        .iter()
        .chain(test_tallies.iter().flatten())
        .all(|t| t.n_total() >= resample_events && resample_events > 0);
    if !pool_ok {
        return Err(Error::Parameter("per-entry pools are smaller than the resample size"));
    }

    let m = train.matrix.dim();
    let resample_value = |tally: &crate::estimator::ParityTally,
                          bunching_r: f64,
                          rng: &mut ChaCha8Rng| {
        let odd = if tally.n_total() == resample_events {
            tally.n_odd()
        } else {
            Hypergeometric::new(tally.n_total(), tally.n_odd(), resample_events)
                .expect("valid hypergeometric")
                .sample(rng)
        };
        1.0 - 2.0 * (1.0 - bunching_r) * odd as f64 / resample_events as f64
    };

    let mut accuracies = Vec::with_capacity(resamples);
    for r in 0..resamples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_mix(seed, &[r as u64]));
        let mut upper = Vec::with_capacity(train_tallies.len());
        for tally in train_tallies {
            upper.push(resample_value(tally, train.bunching_r, &mut rng));
        }
        let matrix = KernelMatrix::from_upper_triangle(m, |i, j| {
            upper[i * m - i * (i + 1) / 2 + j]
        });
        let model = svm_train(&matrix, train_labels, slack)?;
        let mut correct = 0usize;
        for (t, tally_row) in test_tallies.iter().enumerate() {
            let row: Vec<f64> = tally_row
                .iter()
                .map(|tl| resample_value(tl, test.bunching_r, &mut rng).clamp(0.0, 1.0))
                .collect();
            if svm_predict(&model, &row)? == test_labels[t] {
                correct += 1;
            }
        }
        accuracies.push(correct as f64 / test_labels.len() as f64);
    }

    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    if accuracies.len() < 2 {
        return Ok(BootstrapResult { mean, std: 0.0, degenerate: true });
    }
    let var = accuracies.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>()
        / (accuracies.len() - 1) as f64;
    Ok(BootstrapResult { mean, std: var.sqrt(), degenerate: false })
}
