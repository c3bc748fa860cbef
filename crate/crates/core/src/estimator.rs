//! Overlap estimators and sample-complexity calculators.
//!
//! The measurement scheme interferes two states pairwise on balanced
//! beamsplitters and reads the total photon-number parity of one output
//! register; its expectation equals the trace overlap of the inputs. With
//! two photons and click detectors, odd parity is a coincidence between
//! the two registers and bunched events are lost to post-selection, which
//! the estimator corrects with the bunching probability `R = Σ A_i⁴`:
//!
//! ```text
//! Ỹ = 1 − 2(1−R)·N_odd / N
//! ```
//!
//! Estimates are deliberately not clipped to `[0, 1]`; shot noise may push
//! raw values slightly outside and consumers clip where they need to.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use num_complex::Complex64;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::{build_overlap_circuit, INPUT_MODES, REGISTER_B_MODES};
use crate::crosstalk::CrosstalkModel;
use crate::error::{Error, Result};
use crate::fock::PhotonicState;
use crate::matrix::UnitaryMatrix;
use crate::mesh::{compose_mesh, DcErrorMap};
use crate::qudit::{qudit_overlap, QuditSpec};

/// Counts of post-selected two-photon events by parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityTally {
    n_total: u64,
    n_odd: u64,
}

impl ParityTally {
    pub fn new(n_total: u64, n_odd: u64) -> Result<Self> {
        if n_odd > n_total {
            return Err(Error::Parameter("odd-parity count exceeds total"));
        }
        Ok(Self { n_total, n_odd })
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn n_odd(&self) -> u64 {
        self.n_odd
    }
}

/// An overlap estimate together with the raw tally it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapEstimate {
    value: f64,
    tally: ParityTally,
    bunching_r: f64,
}

impl OverlapEstimate {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn tally(&self) -> ParityTally {
        self.tally
    }

    pub fn bunching_r(&self) -> f64 {
        self.bunching_r
    }

    /// Additive-error radius `sqrt(2·ln(2/δ) / N)` at confidence `1 − δ`.
    pub fn hoeffding_radius(&self, delta: f64) -> f64 {
        (2.0 * (2.0 / delta).ln() / self.tally.n_total as f64).sqrt()
    }
}

/// Mean of raw `±1` parity shots: the photon-number-resolving estimator
/// without any bunching correction.
pub fn parity_estimator(shots: &[i8]) -> Result<OverlapEstimate> {
    if shots.is_empty() {
        return Err(Error::EmptyInput("parity shots"));
    }
    if shots.iter().any(|s| *s != 1 && *s != -1) {
        return Err(Error::Parameter("parity shots must be +1 or -1"));
    }
    let n_odd = shots.iter().filter(|s| **s == -1).count() as u64;
    let tally = ParityTally::new(shots.len() as u64, n_odd)?;
    coincidence_estimator(tally, 0.0)
}

/// Click-detector estimator `Ỹ = 1 − 2(1−R)·n_odd/n_total`, where `R` is
/// the bunching probability invisible to non-number-resolving detectors.
pub fn coincidence_estimator(tally: ParityTally, bunching_r: f64) -> Result<OverlapEstimate> {
    if !(0.0..1.0).contains(&bunching_r) {
        return Err(Error::Parameter("bunching probability must satisfy 0 <= R < 1"));
    }
    if tally.n_total == 0 {
        return Err(Error::EmptyInput("parity tally"));
    }
    let value = 1.0 - 2.0 * (1.0 - bunching_r) * tally.n_odd as f64 / tally.n_total as f64;
    Ok(OverlapEstimate { value, tally, bunching_r })
}

/// Shots sufficient for additive error `ε` at confidence `1 − δ`:
/// `⌈2·ε⁻²·ln(2/δ)⌉` by Hoeffding's inequality.
pub fn hoeffding_samples(eps: f64, delta: f64) -> Result<u64> {
    check_eps_delta(eps, delta)?;
    Ok((2.0 * eps.powi(-2) * (2.0 / delta).ln()).ceil() as u64)
}

/// Information-theoretic lower bound `⌈ε⁻²·(1/2 − δ)²⌉` from optimal
/// two-state discrimination. Vanishes as `δ → 1/2`.
pub fn helstrom_lower_bound(eps: f64, delta: f64) -> Result<u64> {
    check_eps_delta(eps, delta)?;
    Ok((eps.powi(-2) * (0.5 - delta).powi(2)).ceil() as u64)
}

fn check_eps_delta(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Parameter("eps must lie in (0, 1/2)"));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Parameter("delta must lie in (0, 1/2)"));
    }
    Ok(())
}

/// Probability that both photons exit the same mode: `R = Σ A_i⁴`.
/// Independent of the encoded phases for equal amplitude profiles.
pub fn bunching_probability(spec: &QuditSpec) -> f64 {
    spec.amplitudes().iter().map(|a| a.powi(4)).sum()
}

/// Squared inner product of two pure states over the same Fock basis.
pub fn exact_overlap(a: &PhotonicState, b: &PhotonicState) -> Result<f64> {
    if a.modes() != b.modes() || a.photons() != b.photons() {
        return Err(Error::BasisMismatch);
    }
    let inner: Complex64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(inner.norm_sqr())
}

/// Two-photon output distribution over unordered mode pairs `(k ≤ l)`.
#[derive(Clone, Debug)]
pub struct TwoPhotonDistribution {
    pairs: Vec<(usize, usize)>,
    probs: Vec<f64>,
}

impl TwoPhotonDistribution {
    /// Distribution of two photons injected on `in_a`, `in_b` after `u`,
    /// blended between indistinguishable and fully distinguishable photons
    /// by the interference `visibility`.
    pub fn compute(u: &UnitaryMatrix, in_a: usize, in_b: usize, visibility: f64) -> Self {
        let m = u.dim();
        let mat = u.as_matrix();
        let mut pairs = Vec::with_capacity(m * (m + 1) / 2);
        let mut probs = Vec::with_capacity(m * (m + 1) / 2);
        for k in 0..m {
            for l in k..m {
                let a_k = mat[(k, in_a)];
                let a_l = mat[(l, in_a)];
                let b_k = mat[(k, in_b)];
                let b_l = mat[(l, in_b)];
                let (quantum, classical) = if k == l {
                    (2.0 * (a_k * b_k).norm_sqr(), (a_k * b_k).norm_sqr())
                } else {
                    ((a_k * b_l + a_l * b_k).norm_sqr(), (a_k * b_l).norm_sqr() + (a_l * b_k).norm_sqr())
                };
                pairs.push((k, l));
                probs.push(visibility * quantum + (1.0 - visibility) * classical);
            }
        }
        Self { pairs, probs }
    }

    pub fn outcomes(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.pairs.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability that both photons share one mode.
    pub fn bunched(&self) -> f64 {
        self.outcomes().filter(|((k, l), _)| k == l).map(|(_, p)| p).sum()
    }
}

/// Post-selected coincidence distribution over distinct detector pairs
/// `k < l` within modes 1..=8, renormalised to the retained events.
#[derive(Clone, Debug)]
pub struct CoincidenceDistribution {
    pairs: Vec<(usize, usize)>,
    probs: Vec<f64>,
    retained: f64,
    p_odd: f64,
}

impl CoincidenceDistribution {
    pub fn from_two_photon(dist: &TwoPhotonDistribution) -> Self {
        let detector = 1..=8usize;
        let mut pairs = Vec::new();
        let mut probs = Vec::new();
        let mut retained = 0.0;
        for ((k, l), p) in dist.outcomes() {
            if k != l && detector.contains(&k) && detector.contains(&l) {
                pairs.push((k, l));
                probs.push(p);
                retained += p;
            }
        }
        for p in probs.iter_mut() {
            *p /= retained;
        }
        let p_odd = pairs
            .iter()
            .zip(&probs)
            .filter(|((k, l), _)| (k + l) % 2 == 1)
            .map(|(_, p)| p)
            .sum();
        Self { pairs, probs, retained, p_odd }
    }

    pub fn outcomes(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.pairs.iter().copied().zip(self.probs.iter().copied())
    }

    /// Fraction of two-photon events surviving post-selection.
    pub fn retained(&self) -> f64 {
        self.retained
    }

    /// Conditional probability of a cross-register coincidence.
    pub fn p_odd(&self) -> f64 {
        self.p_odd
    }

    /// Bhattacharyya fidelity `Σ √(p_i·q_i)` against another coincidence
    /// distribution over the same pair set.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p * q).sqrt())
            .sum()
    }
}

/// One fully configured overlap experiment: amplitude profile, interference
/// visibility and optional crosstalk noise.
#[derive(Clone, Debug)]
pub struct OverlapExperiment {
    pub amplitudes: QuditSpec,
    pub visibility: f64,
    pub crosstalk: Option<CrosstalkModel>,
}

impl OverlapExperiment {
    /// Ideal chip with the default amplitude profile.
    pub fn noiseless() -> Self {
        Self { amplitudes: QuditSpec::default(), visibility: 1.0, crosstalk: None }
    }

    pub fn with_crosstalk(model: CrosstalkModel) -> Self {
        Self { crosstalk: Some(model), ..Self::noiseless() }
    }

    /// Closed-form overlap of the two encoded qudits; the ground truth the
    /// sampled estimator is judged against.
    pub fn exact_overlap(&self, theta: [f64; 3], phi: [f64; 3]) -> f64 {
        qudit_overlap(&self.amplitudes, theta, phi)
    }

    /// Composes the (possibly crosstalk-perturbed) circuit unitary.
    pub fn circuit_unitary(&self, theta: [f64; 3], phi: [f64; 3]) -> Result<UnitaryMatrix> {
        let settings = build_overlap_circuit(theta, phi, &self.amplitudes);
        let settings = match &self.crosstalk {
            Some(model) => model.perturb_settings(&settings),
            None => settings,
        };
        compose_mesh(&settings, &DcErrorMap::new())
    }

    /// Post-selected coincidence distribution at the chip output.
    pub fn coincidence_distribution(
        &self,
        theta: [f64; 3],
        phi: [f64; 3],
    ) -> Result<CoincidenceDistribution> {
        let u = self.circuit_unitary(theta, phi)?;
        let dist = TwoPhotonDistribution::compute(&u, INPUT_MODES.0, INPUT_MODES.1, self.visibility);
        Ok(CoincidenceDistribution::from_two_photon(&dist))
    }

    /// Samples `n_shots` post-selected events and builds the corrected
    /// estimator. Deterministic in `seed`.
    pub fn simulate(
        &self,
        theta: [f64; 3],
        phi: [f64; 3],
        n_shots: u64,
        seed: u64,
    ) -> Result<OverlapEstimate> {
        if n_shots == 0 {
            return Err(Error::Parameter("n_shots must be at least 1"));
        }
        let dist = self.coincidence_distribution(theta, phi)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_odd = Binomial::new(n_shots, dist.p_odd().clamp(0.0, 1.0))
            .expect("valid binomial")
            .sample(&mut rng);
        let tally = ParityTally::new(n_shots, n_odd)?;
        coincidence_estimator(tally, bunching_probability(&self.amplitudes))
    }
}

/// Convenience wrapper around [`OverlapExperiment::simulate`] with the
/// default amplitude profile.
pub fn simulate_overlap_experiment(
    theta: [f64; 3],
    phi: [f64; 3],
    n_shots: u64,
    crosstalk: Option<&CrosstalkModel>,
    visibility: f64,
    seed: u64,
) -> Result<OverlapEstimate> {
    let experiment = OverlapExperiment {
        amplitudes: QuditSpec::default(),
        visibility,
        crosstalk: crosstalk.cloned(),
    };
    experiment.simulate(theta, phi, n_shots, seed)
}

/// Parity of the photon count that lands in register B (even output
/// modes); exposed for the exhaustive register-parity equivalence check.
pub fn register_b_photon_count(pair: (usize, usize)) -> usize {
    [pair.0, pair.1]
        .iter()
        .filter(|m| REGISTER_B_MODES.contains(m))
        .count()
}
