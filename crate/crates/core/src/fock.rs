//! Fock occupations, photonic states and evolution under linear optics.
//!
//! The canonical basis order for `M` modes and `K` photons is descending
//! lexicographic on occupation vectors, starting at `(K, 0, …, 0)` and ending
//! at `(0, …, 0, K)`. That order fixes the amplitude-vector layout everywhere
//! a state is serialised or compared.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, UnitaryMatrix};
use crate::permanent::permanent;

/// Hard cap on the Fock-space dimension produced by [`fock_basis`].
pub const MAX_BASIS_DIM: u64 = 1_000_000;
/// Photon cap for [`evolve_fock`]; keeps the permanents cheap.
pub const MAX_EVOLVE_PHOTONS: u32 = 6;
/// Fock-space cap for the brute-force oracle.
pub const MAX_BRUTE_FORCE_DIM: u64 = 5000;

const NORMALIZATION_TOL: f64 = 1e-9;

/// Photon counts per mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FockOccupation(Vec<u32>);

impl FockOccupation {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// Total photon number K.
    pub fn photons(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// Single photon in `mode` out of `modes` total.
    pub fn single_photon(modes: usize, mode: usize) -> Self {
        let mut v = vec![0; modes];
        v[mode] = 1;
        Self(v)
    }
}

/// `binomial(m + k - 1, k)`, the dimension of the K-photon sector,
/// or `None` on overflow.
pub fn fock_dimension(modes: usize, photons: u32) -> Option<u64> {
    let n = modes as u128 + photons as u128 - 1;
    let k = photons as u128;
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Canonical enumeration of all occupations of `photons` over `modes`,
/// descending lexicographic.
pub fn fock_basis(modes: usize, photons: u32) -> Result<Vec<FockOccupation>> {
    if modes == 0 {
        return Err(Error::Parameter("fock_basis requires at least one mode"));
    }
    let dim = fock_dimension(modes, photons)
        .filter(|&d| d <= MAX_BASIS_DIM)
        .ok_or(Error::Capacity { what: "Fock basis larger than 10^6 states" })?;

    let mut basis = Vec::with_capacity(dim as usize);
    let mut occ = vec![0u32; modes];
    occ[0] = photons;
    loop {
        basis.push(FockOccupation(occ.clone()));
        // Successor in descending lex order: decrement the rightmost
        // non-terminal non-zero entry and pile everything after it onto
        // the next mode.
        let Some(j) = (0..modes - 1).rev().find(|&j| occ[j] > 0) else {
            break;
        };
        let tail: u32 = occ[j + 1..].iter().sum();
        occ[j] -= 1;
        for slot in occ[j + 1..].iter_mut() {
            *slot = 0;
        }
        occ[j + 1] = tail + 1;
    }
    debug_assert_eq!(basis.len() as u64, dim);
    Ok(basis)
}

/// Pure state over the canonical `(modes, photons)` Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonicState {
    modes: usize,
    photons: u32,
    amplitudes: Vec<Complex64>,
}

impl PhotonicState {
    /// Builds a state from amplitudes in canonical basis order.
    /// Fails unless `Σ|a|² = 1 ± 1e-9`.
    pub fn new(modes: usize, photons: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = fock_dimension(modes, photons)
            .ok_or(Error::Capacity { what: "Fock dimension overflow" })?;
        if amplitudes.len() as u64 != dim {
            return Err(Error::DimensionMismatch("amplitude vector length != basis size"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { modes, photons, amplitudes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> u32 {
        self.photons
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The canonical basis this state's amplitudes refer to.
    pub fn basis(&self) -> Vec<FockOccupation> {
        fock_basis(self.modes, self.photons).expect("state was constructed within caps")
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|k| k as f64).product()
}

/// Evolves `input` through the interferometer `u` using the permanent
/// formula: the amplitude into occupation `n⃗` is
/// `perm(U[rows(n⃗), cols(input)]) / sqrt(Π n_i! · Π m_j!)`.
pub fn evolve_fock(u: &UnitaryMatrix, input: &FockOccupation) -> Result<PhotonicState> {
    let modes = u.dim();
    if input.modes() != modes {
        return Err(Error::DimensionMismatch("input occupation has wrong mode count"));
    }
    let photons = input.photons();
    if photons > MAX_EVOLVE_PHOTONS {
        return Err(Error::Capacity { what: "evolve_fock photon cap is 6" });
    }

    // Column selection with multiplicity from the input occupation.
    let in_modes: Vec<usize> = input
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(mode, &n)| core::iter::repeat(mode).take(n as usize))
        .collect();
    let in_norm: f64 = input.counts().iter().map(|&n| factorial(n)).product();

    let basis = fock_basis(modes, photons)?;
    let mut amplitudes = Vec::with_capacity(basis.len());
    for out in &basis {
        let out_modes: Vec<usize> = out
            .counts()
            .iter()
            .enumerate()
            .flat_map(|(mode, &n)| core::iter::repeat(mode).take(n as usize))
            .collect();
        let sub = ComplexMatrix::from_fn(out_modes.len(), in_modes.len(), |r, c| {
            u.as_matrix()[(out_modes[r], in_modes[c])]
        });
        let out_norm: f64 = out.counts().iter().map(|&n| factorial(n)).product();
        let amp = permanent(&sub)? / (out_norm * in_norm).sqrt();
        amplitudes.push(amp);
    }
    PhotonicState::new(modes, photons, amplitudes)
}

/// Second-quantised oracle for [`evolve_fock`].
///
/// Expands the input state as a product of transformed creation operators
/// `Π_k (Σ_j U_jk a_j†)^{n_k} |0⟩` and collects amplitudes term by term.
/// No permanents are involved, so agreement with `evolve_fock` is a real
/// cross-check rather than a reimplementation.
pub fn brute_force_evolve(u: &UnitaryMatrix, input: &FockOccupation) -> Result<PhotonicState> {
    let modes = u.dim();
    if input.modes() != modes {
        return Err(Error::DimensionMismatch("input occupation has wrong mode count"));
    }
    let photons = input.photons();
    let dim = fock_dimension(modes, photons)
        .filter(|&d| d <= MAX_BRUTE_FORCE_DIM)
        .ok_or(Error::Capacity { what: "brute-force Fock space larger than 5000" })?;

    // Map occupation -> amplitude, starting from the vacuum.
    let mut state: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    state.insert(vec![0u32; modes], Complex64::ONE);

    for (mode, &count) in input.counts().iter().enumerate() {
        for _ in 0..count {
            let mut next: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
            for (occ, amp) in &state {
                for j in 0..modes {
                    let coeff = u.as_matrix()[(j, mode)];
                    if coeff == Complex64::ZERO {
                        continue;
                    }
                    let mut bumped = occ.clone();
                    bumped[j] += 1;
                    // a†|n⟩ = sqrt(n+1)|n+1⟩
                    let contrib = amp * coeff * (bumped[j] as f64).sqrt();
                    *next.entry(bumped).or_insert(Complex64::ZERO) += contrib;
                }
            }
            state = next;
        }
    }

    // |n⃗_in⟩ = Π (a†)^{n_k} / sqrt(n_k!) |0⟩
    let in_norm: f64 = input.counts().iter().map(|&n| factorial(n)).product::<f64>().sqrt();
    let basis = fock_basis(modes, photons)?;
    let mut amplitudes = Vec::with_capacity(dim as usize);
    for occ in &basis {
        let amp = state.get(occ.counts()).copied().unwrap_or(Complex64::ZERO);
        amplitudes.push(amp / in_norm);
    }
    PhotonicState::new(modes, photons, amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::dc_transfer;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> UnitaryMatrix {
        // QR-style orthonormalisation of a random complex matrix.
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        for j in 0..n {
            for k in 0..j {
                let proj: Complex64 =
                    (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..n {
                    let sub = proj * cols[k][i];
                    cols[j][i] -= sub;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                cols[j][i] /= norm;
            }
        }
        UnitaryMatrix::new(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])).unwrap()
    }

    #[test]
    fn basis_m4_k2_has_ten_states() {
        let basis = fock_basis(4, 2).unwrap();
        assert_eq!(basis.len(), 10);
        assert_eq!(basis[0].counts(), &[2, 0, 0, 0]);
        assert_eq!(basis[9].counts(), &[0, 0, 0, 2]);
    }

    #[test]
    fn basis_m1_k3_is_single_state() {
        let basis = fock_basis(1, 3).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].counts(), &[3]);
    }

    #[test]
    fn basis_m8_k2_has_36_states() {
        assert_eq!(fock_basis(8, 2).unwrap().len(), 36);
        assert_eq!(fock_dimension(8, 2), Some(36));
    }

    #[test]
    fn basis_is_descending_lexicographic() {
        let basis = fock_basis(3, 3).unwrap();
        for pair in basis.windows(2) {
            assert!(pair[0] > pair[1], "order violated: {:?} then {:?}", pair[0], pair[1]);
        }
        assert_eq!(basis.len(), 10);
    }

    #[test]
    fn basis_capacity_error() {
        // binomial(30+14-1, 14) ≈ 1.4e11 >> 1e6
        assert!(matches!(fock_basis(30, 14), Err(Error::Capacity { .. })));
    }

    #[test]
    fn single_photon_splits_on_balanced_coupler() {
        let bs = dc_transfer(0.0);
        let out = evolve_fock(&bs, &FockOccupation::single_photon(2, 0)).unwrap();
        let probs = out.probabilities();
        assert!((probs[0] - 0.5).abs() < 1e-12);
        assert!((probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_photons_bunch_on_balanced_coupler() {
        // Hong-Ou-Mandel: (1,1) never comes out as a coincidence.
        let bs = dc_transfer(0.0);
        let out = evolve_fock(&bs, &FockOccupation::new(vec![1, 1])).unwrap();
        let basis = out.basis();
        let probs = out.probabilities();
        for (occ, p) in basis.iter().zip(&probs) {
            match occ.counts() {
                [1, 1] => assert!(p.abs() < 1e-12),
                _ => assert!((p - 0.5).abs() < 1e-12),
            }
        }
    }

    #[test]
    fn identity_preserves_input() {
        let u = UnitaryMatrix::identity(3);
        let input = FockOccupation::new(vec![2, 0, 1]);
        let out = brute_force_evolve(&u, &input).unwrap();
        let basis = out.basis();
        for (occ, amp) in basis.iter().zip(out.amplitudes()) {
            if occ == &input {
                assert!((amp - Complex64::ONE).norm() < 1e-12);
            } else {
                assert!(amp.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn permutation_moves_occupation() {
        // Swap modes 0 and 2.
        let mut m = ComplexMatrix::zeros(3, 3);
        m[(0, 2)] = Complex64::ONE;
        m[(1, 1)] = Complex64::ONE;
        m[(2, 0)] = Complex64::ONE;
        let u = UnitaryMatrix::new(m).unwrap();
        let out = brute_force_evolve(&u, &FockOccupation::new(vec![2, 1, 0])).unwrap();
        let expected = FockOccupation::new(vec![0, 1, 2]);
        for (occ, amp) in out.basis().iter().zip(out.amplitudes()) {
            if occ == &expected {
                assert!((amp.norm() - 1.0).abs() < 1e-12);
            } else {
                assert!(amp.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn evolve_agrees_with_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..30 {
            let modes = rng.random_range(2..=4);
            let photons = rng.random_range(1..=3u32);
            let u = random_unitary(modes, &mut rng);
            // Random occupation with the right total.
            let mut occ = vec![0u32; modes];
            for _ in 0..photons {
                occ[rng.random_range(0..modes)] += 1;
            }
            let input = FockOccupation::new(occ);
            let fast = evolve_fock(&u, &input).unwrap();
            let slow = brute_force_evolve(&u, &input).unwrap();
            let dev = fast
                .amplitudes()
                .iter()
                .zip(slow.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-10, "trial {trial}: oracle deviation {dev}");
        }
    }

    #[test]
    fn evolve_output_is_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(4, &mut rng);
        let out = evolve_fock(&u, &FockOccupation::new(vec![1, 1, 0, 0])).unwrap();
        assert!((out.norm_sq() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn evolve_rejects_wrong_mode_count() {
        let u = UnitaryMatrix::identity(3);
        let input = FockOccupation::new(vec![1, 0]);
        assert!(matches!(evolve_fock(&u, &input), Err(Error::DimensionMismatch(_))));
    }
}
