//! Continuous-variable states, characteristic functions and phase-space
//! Monte-Carlo overlap estimation.
//!
//! The overlap of two M-mode states is the phase-space integral
//! `π^{-M} ∫ χ_A(α) χ_B(−α) d^{2M}α`. For energy-bounded states the
//! integral is truncated to a 2M-ball of radius `√(κM)` and estimated by
//! uniform Monte-Carlo sampling; [`distributed_plan`] sizes the point count
//! and per-point precision so the distributed protocol meets a target
//! additive error.
//!
//! The closed-form characteristic functions below are a convention choice
//! (squeezing operator `exp(½(ξ̄a² − ξa†²))`); each one is validated against
//! the truncated displacement-matrix oracle in the tests rather than taken
//! on faith.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use num_complex::Complex64;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::seed::seed_mix;

/// Squeezing of one mode: magnitude `r ≥ 0` and axis angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Squeeze {
    pub r: f64,
    pub angle: f64,
}

/// Catalogue of CV states with analytic characteristic functions.
/// All variants are products over modes.
#[derive(Clone, Debug, PartialEq)]
pub enum CvState {
    /// Coherent state with one displacement per mode.
    Coherent(Vec<Complex64>),
    /// Squeezed vacuum, one squeeze per mode.
    SqueezedVacuum(Vec<Squeeze>),
    /// Number state, one photon count per mode.
    FockNumber(Vec<u32>),
    /// Even cat state `N(|β⟩ + |−β⟩)`, one β per mode.
    EvenCat(Vec<Complex64>),
}

impl CvState {
    pub fn vacuum(modes: usize) -> Self {
        CvState::Coherent(vec![Complex64::ZERO; modes])
    }

    pub fn modes(&self) -> usize {
        match self {
            CvState::Coherent(b) => b.len(),
            CvState::SqueezedVacuum(s) => s.len(),
            CvState::FockNumber(n) => n.len(),
            CvState::EvenCat(b) => b.len(),
        }
    }

    /// Every catalogue variant has a reflection symmetry in phase space,
    /// which is what makes its characteristic function efficiently
    /// learnable; states outside the catalogue are not representable.
    pub fn is_self_reflective(&self) -> bool {
        true
    }

    /// Mean photon number, summed over modes; used to sanity-check the
    /// energy bound κ of a hypersphere against the states put inside it.
    pub fn mean_photons(&self) -> f64 {
        match self {
            CvState::Coherent(b) => b.iter().map(|z| z.norm_sqr()).sum(),
            CvState::SqueezedVacuum(s) => s.iter().map(|sq| sq.r.sinh().powi(2)).sum(),
            CvState::FockNumber(n) => n.iter().map(|&k| k as f64).sum(),
            CvState::EvenCat(b) => b
                .iter()
                .map(|z| {
                    let t = z.norm_sqr();
                    // ⟨n⟩ of the even cat: |β|²·tanh(|β|²)
                    t * t.tanh()
                })
                .sum(),
        }
    }

    /// Characteristic function `χ(α) = Tr[D(α) ρ]`, evaluated in closed
    /// form as a product of single-mode factors. `|χ| ≤ 1` everywhere.
    pub fn char_fn(&self, alpha: &[Complex64]) -> Complex64 {
        debug_assert_eq!(alpha.len(), self.modes(), "α must have one entry per mode");
        match self {
            CvState::Coherent(betas) => alpha
                .iter()
                .zip(betas)
                .map(|(&a, &b)| {
                    let exponent = -0.5 * a.norm_sqr() + a * b.conj() - a.conj() * b;
                    exponent.exp()
                })
                .product(),
            CvState::SqueezedVacuum(squeezes) => alpha
                .iter()
                .zip(squeezes)
                .map(|(&a, s)| {
                    let rot = a * a * Complex64::from_polar(1.0, -s.angle);
                    let exponent =
                        -0.5 * ((2.0 * s.r).cosh() * a.norm_sqr() + (2.0 * s.r).sinh() * rot.re);
                    Complex64::new(exponent.exp(), 0.0)
                })
                .product(),
            CvState::FockNumber(counts) => alpha
                .iter()
                .zip(counts)
                .map(|(&a, &n)| {
                    let x = a.norm_sqr();
                    Complex64::new((-0.5 * x).exp() * laguerre(n, 0, x), 0.0)
                })
                .product(),
            CvState::EvenCat(betas) => alpha
                .iter()
                .zip(betas)
                .map(|(&a, &b)| {
                    let norm_sq = 1.0 / (2.0 * (1.0 + (-2.0 * b.norm_sqr()).exp()));
                    let mut sum = Complex64::ZERO;
                    for from in [b, -b] {
                        for to in [b, -b] {
                            sum += displaced_coherent_overlap(to, a, from);
                        }
                    }
                    norm_sq * sum
                })
                .product(),
        }
    }
}

/// `⟨to| D(α) |from⟩` for coherent states.
fn displaced_coherent_overlap(to: Complex64, alpha: Complex64, from: Complex64) -> Complex64 {
    let weyl = 0.5 * (alpha * from.conj() - alpha.conj() * from);
    let shifted = from + alpha;
    let overlap = -0.5 * to.norm_sqr() - 0.5 * shifted.norm_sqr() + to.conj() * shifted;
    (weyl + overlap).exp()
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)` by the stable upward
/// recurrence.
fn laguerre(n: u32, k: u32, x: f64) -> f64 {
    let kf = k as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + kf - x;
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + kf - x) * cur - (mf + kf) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n as u64).map(|k| (k as f64).ln()).sum()
}

/// Matrix elements `⟨m|D(α)|n⟩` of the single-mode displacement operator on
/// the truncated Fock space `0..cutoff`. Requires `cutoff ≥ 4(1+|α|²)` so
/// the low-photon block stays numerically unitary.
pub fn displacement_matrix(alpha: Complex64, cutoff: usize) -> Result<ComplexMatrix> {
    if (cutoff as f64) < 4.0 * (1.0 + alpha.norm_sqr()) {
        return Err(Error::Capacity { what: "displacement cutoff below 4(1+|α|²)" });
    }
    let gauss = (-0.5 * alpha.norm_sqr()).exp();
    let m = ComplexMatrix::from_fn(cutoff, cutoff, |row, col| {
        let (big, small, diff) = if row >= col {
            (row as u32, col as u32, (row - col) as u32)
        } else {
            (col as u32, row as u32, (col - row) as u32)
        };
        let ratio = (0.5 * (ln_factorial(small) - ln_factorial(big))).exp();
        let poly = laguerre(small, diff, alpha.norm_sqr());
        let base = if row >= col {
            alpha.powu(diff)
        } else {
            (-alpha.conj()).powu(diff)
        };
        base * (ratio * gauss * poly)
    });
    Ok(m)
}

/// Energy-bounded integration region: the 2M-ball of radius `√(κ·M)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypersphereSpec {
    pub modes: usize,
    pub kappa: f64,
}

impl HypersphereSpec {
    pub fn new(modes: usize, kappa: f64) -> Result<Self> {
        if modes == 0 {
            return Err(Error::Parameter("hypersphere needs at least one mode"));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Parameter("kappa must be positive and finite"));
        }
        Ok(Self { modes, kappa })
    }

    pub fn radius(&self) -> f64 {
        (self.kappa * self.modes as f64).sqrt()
    }

    /// `(π·κ·M)^M / M!`, as a running product to avoid premature overflow.
    pub fn volume(&self) -> Result<f64> {
        let mut acc = 1.0f64;
        let base = PI * self.kappa * self.modes as f64;
        for k in 1..=self.modes {
            acc *= base / k as f64;
            if !acc.is_finite() {
                return Err(Error::Capacity { what: "hypersphere volume overflows f64" });
            }
        }
        Ok(acc)
    }

    /// `ln` of the volume; usable far beyond the f64 range of [`volume`].
    pub fn log_volume(&self) -> f64 {
        let m = self.modes as f64;
        let mut ln_fact = 0.0;
        for k in 1..=self.modes {
            ln_fact += (k as f64).ln();
        }
        m * (PI * self.kappa * m).ln() - ln_fact
    }
}

/// `L` points uniform in the 2M-ball: isotropic Gaussian direction with
/// radius `R·u^{1/(2M)}`. Deterministic in `seed`.
pub fn sample_hypersphere(spec: &HypersphereSpec, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = spec.radius();
    let dims = 2 * spec.modes;
    (0..count)
        .map(|_| {
            let raw: Vec<f64> = (0..dims).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            let u: f64 = rng.random_range(0.0..1.0);
            let scale = radius * u.powf(1.0 / dims as f64) / norm;
            (0..spec.modes)
                .map(|k| Complex64::new(raw[2 * k] * scale, raw[2 * k + 1] * scale))
                .collect()
        })
        .collect()
}

/// Kahan-compensated complex accumulator; keeps the Monte-Carlo sums
/// reproducible to ~1e-12 regardless of evaluation order.
#[derive(Clone, Copy, Default)]
struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    fn add(&mut self, value: Complex64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Monte-Carlo overlap estimate with its internal diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McOverlapEstimate {
    /// Real part of the scaled Monte-Carlo mean: the overlap estimate.
    pub value: f64,
    /// Imaginary residual of the same mean; statistically consistent with
    /// zero since the exact integral is real.
    pub imag_residual: f64,
    /// Sample spread `σ̃_L` of the integrand values.
    pub sigma_l: f64,
    /// Number of phase-space points used.
    pub points: usize,
}

impl McOverlapEstimate {
    /// Estimated standard error of `value`: `σ̃_L·|A| / (π^M·√L)`.
    pub fn std_error(&self, spec: &HypersphereSpec) -> Result<f64> {
        let scale = spec.volume()? / PI.powi(spec.modes as i32);
        Ok(self.sigma_l * scale / (self.points as f64).sqrt())
    }
}

/// Monte-Carlo estimate of `Tr[ρ_A ρ_B]` over the hypersphere:
/// `Ỹ = Re[(|A| / (π^M·L)) Σ_i χ̃_A(α_i)·χ̃_B(−α_i)]`.
///
/// `chi_noise` simulates the finite-precision characteristic-function
/// estimates of the distributed protocol: each evaluation is displaced by
/// an independent uniform draw from the complex disk of that radius.
/// Zero noise evaluates the analytic χ exactly.
pub fn mc_overlap(
    a: &CvState,
    b: &CvState,
    spec: &HypersphereSpec,
    points: usize,
    chi_noise: f64,
    seed: u64,
) -> Result<McOverlapEstimate> {
    if a.modes() != b.modes() || a.modes() != spec.modes {
        return Err(Error::DimensionMismatch("states and hypersphere must share mode count"));
    }
    if points < 2 {
        return Err(Error::Parameter("mc_overlap needs at least 2 points"));
    }
    if chi_noise < 0.0 {
        return Err(Error::Parameter("chi noise radius must be non-negative"));
    }
    let volume = spec.volume()?;
    let samples = sample_hypersphere(spec, points, seed_mix(seed, &[0]));
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed_mix(seed, &[1]));
    let disk = move |rng: &mut ChaCha8Rng| -> Complex64 {
        if chi_noise == 0.0 {
            return Complex64::ZERO;
        }
        let r = chi_noise * rng.random_range(0.0f64..1.0).sqrt();
        let phi = rng.random_range(0.0..TAU);
        Complex64::from_polar(r, phi)
    };

    let mut values = Vec::with_capacity(points);
    let mut sum = KahanSum::default();
    for alpha in &samples {
        let neg: Vec<Complex64> = alpha.iter().map(|z| -z).collect();
        let chi_a = a.char_fn(alpha) + disk(&mut noise_rng);
        let chi_b = b.char_fn(&neg) + disk(&mut noise_rng);
        let f = chi_a * chi_b;
        values.push(f);
        sum.add(f);
    }
    let mean = sum.sum / points as f64;

    let mut spread = KahanSum::default();
    for f in &values {
        let d = f - mean;
        spread.add(Complex64::new(d.norm_sqr(), 0.0));
    }
    let sigma_l = (spread.sum.re / (points as f64 - 1.0)).sqrt();

    let scale = volume / PI.powi(spec.modes as i32);
    Ok(McOverlapEstimate {
        value: scale * mean.re,
        imag_residual: scale * mean.im,
        sigma_l,
        points,
    })
}

/// Resource plan for distributed overlap estimation to additive error
/// `eps` with failure probability `delta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistributedPlan {
    /// Required per-point precision of the characteristic-function
    /// estimates: `ε̃ = π^M·ε / (8|A|)`.
    pub eps_tilde: f64,
    /// Phase-space points: `L = (4·σ_L·|A| / (π^M·ε))²`.
    pub points: f64,
    /// State copies per party: `⌈c·ε̃⁻⁴·ln(2L/δ)⌉`. The leading constant
    /// is not pinned by the analysis, so it is exposed as `lemma_constant`.
    pub copies: f64,
    /// Monte-Carlo spread fed into the plan.
    pub sigma_l: f64,
    /// Hypersphere volume `|A|`.
    pub volume: f64,
}

impl DistributedPlan {
    /// The planned point count as a usable loop bound, when it fits.
    pub fn feasible_points(&self) -> Option<usize> {
        (self.points.is_finite() && self.points <= 1e9).then(|| (self.points as usize).max(2))
    }
}

/// Sizes `(ε̃, L, N)` for the distributed protocol.
pub fn distributed_plan(
    eps: f64,
    delta: f64,
    spec: &HypersphereSpec,
    sigma_l: f64,
    lemma_constant: f64,
) -> Result<DistributedPlan> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Parameter("eps must lie in (0, 1/2)"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter("delta must lie in (0, 1)"));
    }
    if sigma_l < 0.0 || lemma_constant <= 0.0 {
        return Err(Error::Parameter("sigma_l must be >= 0 and the constant positive"));
    }
    let volume = spec.volume()?;
    let pi_m = PI.powi(spec.modes as i32);
    let eps_tilde = pi_m * eps / (8.0 * volume);
    let points = (4.0 * sigma_l * volume / (pi_m * eps)).powi(2).ceil().max(1.0);
    let copies = (lemma_constant * eps_tilde.powi(-4) * (2.0 * points / delta).ln()).ceil();
    Ok(DistributedPlan { eps_tilde, points, copies, sigma_l, volume })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Truncated-Fock oracle: χ(α) = Tr[D(α)ρ] from the displacement
    /// matrix and explicit single-mode Fock amplitudes.
    fn chi_oracle(fock_amps: &[Complex64], alpha: Complex64, cutoff: usize) -> Complex64 {
        let d = displacement_matrix(alpha, cutoff).unwrap();
        let mut chi = Complex64::ZERO;
        for m in 0..cutoff.min(fock_amps.len()) {
            for n in 0..cutoff.min(fock_amps.len()) {
                // ρ_{nm} = c_n · c̄_m ; Tr[Dρ] = Σ_{mn} D_{mn} ρ_{nm}
                chi += d[(m, n)] * fock_amps[n] * fock_amps[m].conj();
            }
        }
        chi
    }

    fn coherent_amps(beta: Complex64, len: usize) -> Vec<Complex64> {
        // c_n = β^n · e^{−|β|²/2} / √(n!)
        (0..len)
            .map(|n| {
                let scale = (-0.5 * beta.norm_sqr() - 0.5 * ln_factorial(n as u32)).exp();
                beta.powu(n as u32) * scale
            })
            .collect()
    }

    fn grid_alphas() -> Vec<Complex64> {
        let mut out = Vec::new();
        for re in [-1.5, -0.4, 0.0, 0.7, 1.9] {
            for im in [-1.2, 0.0, 0.5, 1.4] {
                out.push(Complex64::new(re, im));
            }
        }
        out
    }

    #[test]
    fn chi_is_one_at_origin_for_all_variants() {
        let states = [
            CvState::Coherent(vec![Complex64::new(0.7, -0.3); 2]),
            CvState::SqueezedVacuum(vec![Squeeze { r: 0.6, angle: 1.1 }; 2]),
            CvState::FockNumber(vec![3, 1]),
            CvState::EvenCat(vec![Complex64::new(1.2, 0.4); 2]),
        ];
        let origin = [Complex64::ZERO; 2];
        for state in states {
            let chi = state.char_fn(&origin);
            assert!((chi - Complex64::ONE).norm() < 1e-12, "{state:?}");
        }
    }

    #[test]
    fn fock_one_chi_vanishes_at_unit_radius() {
        // e^{-1/2}·L_1(1) = e^{-1/2}·(1−1) = 0.
        let state = CvState::FockNumber(vec![1]);
        let chi = state.char_fn(&[Complex64::new(1.0, 0.0)]);
        assert!(chi.norm() < 1e-12);
    }

    #[test]
    fn coherent_chi_matches_oracle() {
        let beta = Complex64::new(0.8, -0.6);
        let state = CvState::Coherent(vec![beta]);
        let amps = coherent_amps(beta, 36);
        for alpha in grid_alphas() {
            let closed = state.char_fn(&[alpha]);
            let oracle = chi_oracle(&amps, alpha, 36);
            assert!((closed - oracle).norm() < 1e-8, "α = {alpha}: {closed} vs {oracle}");
        }
    }

    #[test]
    fn squeezed_chi_matches_oracle() {
        let squeeze = Squeeze { r: 0.55, angle: 0.9 };
        // S(ξ)|0⟩ = (cosh r)^{-1/2} Σ_k (−e^{iφ}·tanh r)^k √(2k)!/(2^k k!) |2k⟩
        let mut amps = vec![Complex64::ZERO; 40];
        let tanh = squeeze.r.tanh();
        for k in 0..20u32 {
            let ln_mag = 0.5 * ln_factorial(2 * k) - k as f64 * 2.0f64.ln() - ln_factorial(k)
                + (k as f64) * tanh.ln()
                - 0.5 * squeeze.r.cosh().ln();
            let phase = Complex64::from_polar(1.0, squeeze.angle * k as f64);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            amps[(2 * k) as usize] = sign * phase * ln_mag.exp();
        }
        let state = CvState::SqueezedVacuum(vec![squeeze]);
        for alpha in grid_alphas() {
            let closed = state.char_fn(&[alpha]);
            let oracle = chi_oracle(&amps, alpha, 40);
            assert!((closed - oracle).norm() < 1e-7, "α = {alpha}: {closed} vs {oracle}");
        }
    }

    #[test]
    fn fock_chi_matches_oracle() {
        for n in [0u32, 1, 2, 4] {
            let mut amps = vec![Complex64::ZERO; 40];
            amps[n as usize] = Complex64::ONE;
            let state = CvState::FockNumber(vec![n]);
            for alpha in grid_alphas() {
                let closed = state.char_fn(&[alpha]);
                let oracle = chi_oracle(&amps, alpha, 40);
                assert!((closed - oracle).norm() < 1e-7, "n={n}, α={alpha}");
            }
        }
    }

    #[test]
    fn cat_chi_matches_oracle() {
        let beta = Complex64::new(1.1, 0.3);
        let norm = (2.0 * (1.0 + (-2.0 * beta.norm_sqr()).exp())).sqrt();
        let mut amps = vec![Complex64::ZERO; 44];
        for n in 0..44u32 {
            if n % 2 == 0 {
                let scale = (-0.5 * beta.norm_sqr() - 0.5 * ln_factorial(n)).exp();
                amps[n as usize] = 2.0 / norm * beta.powu(n) * scale;
            }
        }
        let state = CvState::EvenCat(vec![beta]);
        for alpha in grid_alphas() {
            let closed = state.char_fn(&[alpha]);
            let oracle = chi_oracle(&amps, alpha, 44);
            assert!((closed - oracle).norm() < 1e-7, "α={alpha}: {closed} vs {oracle}");
        }
    }

    #[test]
    fn chi_is_bounded_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let states = [
            CvState::Coherent(vec![Complex64::new(0.5, 1.1), Complex64::new(-0.2, 0.3)]),
            CvState::SqueezedVacuum(vec![
                Squeeze { r: 0.4, angle: 2.0 },
                Squeeze { r: 0.9, angle: -1.2 },
            ]),
            CvState::FockNumber(vec![2, 3]),
            CvState::EvenCat(vec![Complex64::new(0.9, -0.5), Complex64::new(0.3, 0.8)]),
        ];
        for state in &states {
            for _ in 0..200 {
                let alpha: Vec<Complex64> = (0..2)
                    .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                    .collect();
                let neg: Vec<Complex64> = alpha.iter().map(|z| -z).collect();
                let chi = state.char_fn(&alpha);
                assert!(chi.norm() <= 1.0 + 1e-12, "|χ| > 1 for {state:?}");
                assert!(
                    (state.char_fn(&neg) - chi.conj()).norm() < 1e-12,
                    "χ(−α) != χ̄(α) for {state:?}"
                );
            }
        }
    }

    #[test]
    fn displacement_identity_and_vacuum_element() {
        let id = displacement_matrix(Complex64::ZERO, 8).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-12);

        let alpha = Complex64::new(0.6, -0.9);
        let d = displacement_matrix(alpha, 24).unwrap();
        let expected = (-0.5 * alpha.norm_sqr()).exp();
        assert!((d[(0, 0)] - Complex64::new(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn displacement_is_unitary_on_safe_block() {
        let alpha = Complex64::new(0.7, 0.5);
        let cutoff = 40;
        let d = displacement_matrix(alpha, cutoff).unwrap();
        for col in 0..cutoff / 2 {
            let norm: f64 = (0..cutoff).map(|row| d[(row, col)].norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-8, "column {col} norm {norm}");
        }
    }

    #[test]
    fn displacement_rejects_small_cutoff() {
        assert!(matches!(
            displacement_matrix(Complex64::new(2.0, 0.0), 8),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn hypersphere_volume_reference_values() {
        let disk = HypersphereSpec::new(1, 1.0).unwrap();
        assert!((disk.volume().unwrap() - PI).abs() < 1e-12);

        // M = 2, κ = 1: the 4-ball of radius √2 has volume π²r⁴/2 = 2π².
        let four_ball = HypersphereSpec::new(2, 1.0).unwrap();
        assert!((four_ball.volume().unwrap() - 2.0 * PI * PI).abs() < 1e-10);

        let big = HypersphereSpec::new(10, 1.0).unwrap();
        let direct = big.volume().unwrap().ln();
        assert!((direct - big.log_volume()).abs() < 1e-9);
    }

    #[test]
    fn volume_matches_even_ball_formula() {
        for modes in 1..=8 {
            for kappa in [0.5, 1.0, 2.7] {
                let spec = HypersphereSpec::new(modes, kappa).unwrap();
                let r = spec.radius();
                let ball = PI.powi(modes as i32) * r.powi(2 * modes as i32)
                    / (1..=modes).map(|k| k as f64).product::<f64>();
                let v = spec.volume().unwrap();
                assert!((v - ball).abs() <= 1e-12 * ball, "M={modes} κ={kappa}");
            }
        }
    }

    #[test]
    fn samples_stay_inside_ball_and_replay() {
        let spec = HypersphereSpec::new(3, 2.0).unwrap();
        let pts = sample_hypersphere(&spec, 2000, 9);
        let bound = spec.kappa * spec.modes as f64 + 1e-12;
        for p in &pts {
            let norm: f64 = p.iter().map(|z| z.norm_sqr()).sum();
            assert!(norm <= bound);
        }
        assert_eq!(pts, sample_hypersphere(&spec, 2000, 9));
        assert_ne!(pts, sample_hypersphere(&spec, 2000, 10));
    }

    #[test]
    fn radial_cdf_matches_area_law_in_one_mode() {
        // For M = 1 the radial CDF is r²/R²; KS distance at L = 1e5 stays
        // well under 0.02.
        let spec = HypersphereSpec::new(1, 1.0).unwrap();
        let n = 100_000;
        let mut radii: Vec<f64> = sample_hypersphere(&spec, n, 13)
            .into_iter()
            .map(|p| p[0].norm())
            .collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let r_max = spec.radius();
        let mut ks: f64 = 0.0;
        for (i, r) in radii.iter().enumerate() {
            let empirical = (i + 1) as f64 / n as f64;
            let model = (r / r_max).powi(2);
            ks = ks.max((empirical - model).abs());
        }
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn vacuum_self_overlap_is_one() {
        let spec = HypersphereSpec::new(1, 8.0).unwrap();
        let vac = CvState::vacuum(1);
        let est = mc_overlap(&vac, &vac, &spec, 100_000, 0.0, 2).unwrap();
        assert!((est.value - 1.0).abs() < 0.02, "estimate {}", est.value);
        assert!(est.imag_residual.abs() < 0.02);
    }

    #[test]
    fn displaced_coherent_overlap_matches_closed_form() {
        // Tr[|0⟩⟨0| · |1⟩⟨1|] = e^{−1}.
        let spec = HypersphereSpec::new(1, 8.0).unwrap();
        let a = CvState::vacuum(1);
        let b = CvState::Coherent(vec![Complex64::ONE]);
        let est = mc_overlap(&a, &b, &spec, 100_000, 0.0, 3).unwrap();
        assert!((est.value - (-1.0f64).exp()).abs() < 0.02, "estimate {}", est.value);
    }

    #[test]
    fn fock_one_self_overlap_matches_analytic_integral() {
        // ∫₀^∞ e^{−t}(1−t)² dt = 1, i.e. the state overlaps itself fully.
        let spec = HypersphereSpec::new(1, 10.0).unwrap();
        let f1 = CvState::FockNumber(vec![1]);
        let est = mc_overlap(&f1, &f1, &spec, 100_000, 0.0, 4).unwrap();
        assert!((est.value - 1.0).abs() < 0.03, "estimate {}", est.value);
    }

    #[test]
    fn mc_rejects_mode_mismatch() {
        let spec = HypersphereSpec::new(2, 1.0).unwrap();
        let a = CvState::vacuum(2);
        let b = CvState::vacuum(1);
        assert!(matches!(
            mc_overlap(&a, &b, &spec, 100, 0.0, 0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn plan_reference_values() {
        // M = 1, κ = 1: |A| = π, so ε̃ = π·ε/(8π) = ε/8.
        let spec = HypersphereSpec::new(1, 1.0).unwrap();
        let plan = distributed_plan(0.1, 1.0 / 3.0, &spec, 1.0, 1.0).unwrap();
        assert!((plan.eps_tilde - 0.0125).abs() < 1e-12);

        // L scales with σ_L².
        let doubled = distributed_plan(0.1, 1.0 / 3.0, &spec, 2.0, 1.0).unwrap();
        assert!((doubled.points / plan.points - 4.0).abs() < 1e-9);
    }

    #[test]
    fn plan_copies_grow_exponentially_with_modes() {
        // κ = e makes ln N grow linearly in M.
        let kappa = core::f64::consts::E;
        let mut lns = Vec::new();
        for modes in 1..=6 {
            let spec = HypersphereSpec::new(modes, kappa).unwrap();
            let plan = distributed_plan(0.1, 1.0 / 3.0, &spec, 1.0, 1.0).unwrap();
            lns.push(plan.copies.ln());
        }
        let diffs: Vec<f64> = lns.windows(2).map(|w| w[1] - w[0]).collect();
        for d in &diffs {
            assert!(*d > 1.0, "ln N growth step {d} too small for exponential scaling");
        }
        // Slope stabilises: later steps stay within 40% of their mean.
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        for d in &diffs[1..] {
            assert!((d - mean).abs() < 0.4 * mean, "step {d} vs mean {mean}");
        }
    }

    #[test]
    fn catalogue_is_self_reflective() {
        assert!(CvState::Coherent(vec![Complex64::new(0.3, 0.2)]).is_self_reflective());
        assert!(CvState::FockNumber(vec![2]).is_self_reflective());
        assert!(CvState::SqueezedVacuum(vec![Squeeze { r: 0.2, angle: 0.4 }])
            .is_self_reflective());
        assert!(CvState::EvenCat(vec![Complex64::ONE]).is_self_reflective());
    }
}
