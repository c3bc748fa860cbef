//! Quantum-kernel evaluation: overlap Gram matrices from exact or
//! shot-sampled estimators.
//!
//! Kernel entries are `K(x, x′) = |⟨ψ(x)|ψ(x′)⟩|²`. In sampled mode every
//! unordered pair (including the diagonal) is measured, mirroring an
//! experiment that trusts nothing; entries are clipped to `[0, 1]` and
//! symmetrised. Per-entry seeds derive from the base seed and the index
//! pair, so parallel evaluation cannot change any value.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::DataPoint;
use crate::error::Result;
use crate::estimator::{OverlapExperiment, ParityTally};
use crate::qudit::qudit_overlap;
use crate::seed::seed_mix;

/// Seed namespace tags for train/test kernel entries.
const TRAIN_TAG: u64 = 0;
const TEST_TAG: u64 = 1;

/// Symmetric Gram matrix with entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl KernelMatrix {
    /// Builds from an upper-triangle generator; the matrix is symmetric by
    /// construction and entries are clipped to `[0, 1]`.
    pub fn from_upper_triangle(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j).clamp(0.0, 1.0);
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Largest `|K_ij − K_ji|`; zero by construction here, kept for the
    /// invariant suite.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// How kernel entries are produced.
#[derive(Clone, Debug)]
pub enum KernelEvaluator {
    /// Closed-form overlaps on an ideal chip; diagonal is exactly 1.
    Exact(OverlapExperiment),
    /// Shot-sampled interference experiment; every entry is measured.
    Sampled { experiment: OverlapExperiment, shots: u64 },
}

impl KernelEvaluator {
    fn experiment(&self) -> &OverlapExperiment {
        match self {
            KernelEvaluator::Exact(e) => e,
            KernelEvaluator::Sampled { experiment, .. } => experiment,
        }
    }

    /// Raw (unclipped) overlap value plus the tally when sampled.
    pub fn evaluate(
        &self,
        x: [f64; 3],
        y: [f64; 3],
        seed: u64,
    ) -> Result<(f64, Option<ParityTally>)> {
        match self {
            KernelEvaluator::Exact(experiment) => {
                Ok((qudit_overlap(&experiment.amplitudes, x, y), None))
            }
            KernelEvaluator::Sampled { experiment, shots } => {
                let est = experiment.simulate(x, y, *shots, seed)?;
                Ok((est.value(), Some(est.tally())))
            }
        }
    }

    pub fn bunching_r(&self) -> f64 {
        crate::estimator::bunching_probability(&self.experiment().amplitudes)
    }
}

fn upper_index(i: usize, j: usize, dim: usize) -> usize {
    debug_assert!(i <= j && j < dim);
    i * dim - i * (i + 1) / 2 + j
}

/// Training Gram matrix with the raw tallies retained for bootstrapping.
#[derive(Clone, Debug)]
pub struct TrainKernel {
    pub matrix: KernelMatrix,
    /// Upper-triangle tallies (row-major, `i ≤ j`) when sampled.
    pub tallies: Option<Vec<ParityTally>>,
    pub bunching_r: f64,
}

impl TrainKernel {
    pub fn tally(&self, i: usize, j: usize) -> Option<ParityTally> {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.tallies
            .as_ref()
            .map(|t| t[upper_index(a, b, self.matrix.dim())])
    }
}

/// Rectangular test-against-training kernel.
#[derive(Clone, Debug)]
pub struct TestKernel {
    /// `rows[t][i]` = clipped overlap of test point `t` with training
    /// point `i`.
    pub rows: Vec<Vec<f64>>,
    pub tallies: Option<Vec<Vec<ParityTally>>>,
    pub bunching_r: f64,
}

/// Evaluates all `m(m+1)/2` unordered training pairs.
/// Per-entry seed: `mix(base_seed, [0, i, j])`.
pub fn train_kernel(
    data: &[DataPoint],
    evaluator: &KernelEvaluator,
    base_seed: u64,
) -> Result<TrainKernel> {
    let dim = data.len();
    let mut raw = vec![0.0f64; dim * (dim + 1) / 2];
    let mut tallies = matches!(evaluator, KernelEvaluator::Sampled { .. })
        .then(|| Vec::with_capacity(raw.len()));
    for i in 0..dim {
        for j in i..dim {
            let seed = seed_mix(base_seed, &[TRAIN_TAG, i as u64, j as u64]);
            let (value, tally) = evaluator.evaluate(data[i].x, data[j].x, seed)?;
            raw[upper_index(i, j, dim)] = value;
            if let (Some(list), Some(t)) = (tallies.as_mut(), tally) {
                list.push(t);
            }
        }
    }
    let matrix = KernelMatrix::from_upper_triangle(dim, |i, j| raw[upper_index(i, j, dim)]);
    Ok(TrainKernel { matrix, tallies, bunching_r: evaluator.bunching_r() })
}

/// Evaluates every test point against every training point.
/// Per-entry seed: `mix(base_seed, [1, t, i])`.
pub fn test_kernel(
    test: &[DataPoint],
    train: &[DataPoint],
    evaluator: &KernelEvaluator,
    base_seed: u64,
) -> Result<TestKernel> {
    let sampled = matches!(evaluator, KernelEvaluator::Sampled { .. });
    let mut rows = Vec::with_capacity(test.len());
    let mut tallies = sampled.then(Vec::new);
    for (t, test_point) in test.iter().enumerate() {
        let mut row = Vec::with_capacity(train.len());
        let mut tally_row = sampled.then(Vec::new);
        for (i, train_point) in train.iter().enumerate() {
            let seed = seed_mix(base_seed, &[TEST_TAG, t as u64, i as u64]);
            let (value, tally) = evaluator.evaluate(test_point.x, train_point.x, seed)?;
            row.push(value.clamp(0.0, 1.0));
            if let (Some(list), Some(tl)) = (tally_row.as_mut(), tally) {
                list.push(tl);
            }
        }
        rows.push(row);
        if let (Some(list), Some(tr)) = (tallies.as_mut(), tally_row) {
            list.push(tr);
        }
    }
    Ok(TestKernel { rows, tallies, bunching_r: evaluator.bunching_r() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_dataset, DatasetKind};
    use crate::estimator::hoeffding_samples;

    #[test]
    fn noiseless_kernel_has_unit_diagonal_and_symmetry() {
        let data = gen_dataset(DatasetKind::Separate, 16, 1).unwrap();
        let evaluator = KernelEvaluator::Exact(OverlapExperiment::noiseless());
        let k = train_kernel(&data, &evaluator, 0).unwrap();
        for i in 0..16 {
            assert!((k.matrix.get(i, i) - 1.0).abs() < 1e-12);
        }
        assert_eq!(k.matrix.symmetry_defect(), 0.0);
        assert!(k.tallies.is_none());
    }

    #[test]
    fn equal_phase_pair_gives_unit_entry() {
        let mut data = gen_dataset(DatasetKind::Separate, 4, 2).unwrap();
        data[1].x = data[0].x;
        let evaluator = KernelEvaluator::Exact(OverlapExperiment::noiseless());
        let k = train_kernel(&data, &evaluator, 0).unwrap();
        assert!((k.matrix.get(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_entries_concentrate_around_exact_values() {
        let data = gen_dataset(DatasetKind::Overlapping, 12, 3).unwrap();
        let shots = 1000;
        let sampled = KernelEvaluator::Sampled {
            experiment: OverlapExperiment::noiseless(),
            shots,
        };
        let exact = KernelEvaluator::Exact(OverlapExperiment::noiseless());
        let noisy = train_kernel(&data, &sampled, 5).unwrap();
        let truth = train_kernel(&data, &exact, 5).unwrap();
        let radius = (2.0 * 6.0f64.ln() / shots as f64).sqrt();
        let n = hoeffding_samples(0.1, 1.0 / 3.0).unwrap();
        assert!(n > 0);
        let mut within = 0;
        let mut total = 0;
        for i in 0..12 {
            for j in i..12 {
                total += 1;
                if (noisy.matrix.get(i, j) - truth.matrix.get(i, j)).abs() <= radius {
                    within += 1;
                }
            }
        }
        assert!(
            within as f64 >= total as f64 * 2.0 / 3.0,
            "only {within}/{total} entries within the Hoeffding radius"
        );
        // Tallies retained for every unordered pair.
        assert_eq!(noisy.tallies.as_ref().unwrap().len(), 12 * 13 / 2);
    }

    #[test]
    fn per_entry_seeds_make_results_schedule_independent() {
        let data = gen_dataset(DatasetKind::Spherical, 10, 4).unwrap();
        let evaluator = KernelEvaluator::Sampled {
            experiment: OverlapExperiment::noiseless(),
            shots: 200,
        };
        let a = train_kernel(&data, &evaluator, 9).unwrap();
        let b = train_kernel(&data, &evaluator, 9).unwrap();
        assert_eq!(a.matrix, b.matrix);
        // Individual entries are reproducible in isolation.
        let seed = seed_mix(9, &[TRAIN_TAG, 2, 7]);
        let (value, _) = evaluator.evaluate(data[2].x, data[7].x, seed).unwrap();
        assert_eq!(a.matrix.get(2, 7), value.clamp(0.0, 1.0));
    }
}
