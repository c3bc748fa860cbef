//! Matrix permanents via Ryser's formula with Gray-code subset iteration.
//!
//! The permanent of the mode-selected submatrix gives the transition
//! amplitude between Fock states under a linear-optical unitary, so this is
//! the workhorse behind [`crate::fock::evolve_fock`]. Ryser costs
//! `O(2^n · n)`; the naive `O(n! · n)` expansion is kept in the tests as an
//! independent oracle.

use alloc::vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest matrix order accepted; beyond this the `2^n` loop is unreasonable.
pub const MAX_PERMANENT_DIM: usize = 20;

/// Permanent of a square complex matrix.
///
/// `perm(I_2) = 1`, `perm(J_3) = 3! = 6`, and an empty matrix has
/// permanent 1 by convention.
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("permanent requires a square matrix"));
    }
    let n = m.rows();
    if n > MAX_PERMANENT_DIM {
        return Err(Error::Capacity { what: "permanent order exceeds 20" });
    }
    if n == 0 {
        return Ok(Complex64::ONE);
    }

    // Ryser: perm(A) = (-1)^n Σ_{S ≠ ∅} (-1)^{|S|} Π_i Σ_{j∈S} a_ij.
    // Gray-code iteration updates the row sums with one column per step.
    let mut row_sums = vec![Complex64::ZERO; n];
    let mut total = Complex64::ZERO;
    let mut prev_gray: u64 = 0;
    for k in 1..(1u64 << n) {
        let gray = k ^ (k >> 1);
        let changed = (gray ^ prev_gray).trailing_zeros() as usize;
        if gray & (1 << changed) != 0 {
            for i in 0..n {
                row_sums[i] += m[(i, changed)];
            }
        } else {
            for i in 0..n {
                row_sums[i] -= m[(i, changed)];
            }
        }
        prev_gray = gray;

        let mut prod = Complex64::ONE;
        for &s in &row_sums {
            prod *= s;
        }
        if gray.count_ones() % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}
