//! The programmable 10-mode MZI mesh: transfer matrices, grid addressing
//! and Bell-scheme composition.
//!
//! Grid conventions. Phaseshifters live on a 10×10 grid addressed `(row,
//! col)`. An MZI is labelled by its upper internal phaseshifter, so MZI
//! `(i, j)` requires `i + j` even, couples modes `i` and `i+1`, and owns
//! shifters `(i, j)` and `(i+1, j)`. Standalone shifters on rows 0 and 9 of
//! odd columns exist on the physical chip but are omitted here: with Fock
//! inputs and phase-insensitive detection they do not affect any outcome.
//!
//! Each MZI is driven by two phases `θ1, θ2`, reparameterised as
//! `Σ = (θ1+θ2)/2` and `δ = (θ1−θ2)/2`. The MZI is in the cross, bar or
//! balanced state at `δ = 0, π/2, π/4` respectively.

use alloc::collections::BTreeMap;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::fmt;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, UnitaryMatrix};

/// Mode count of the simulated processor.
pub const MESH_MODES: usize = 10;
/// Column count of the phaseshifter grid.
pub const MESH_COLS: usize = 10;

/// Internal phase of the MZI cross state.
pub const DELTA_CROSS: f64 = 0.0;
/// Internal phase of the MZI bar state.
pub const DELTA_BAR: f64 = FRAC_PI_2;
/// Internal phase of the balanced-beamsplitter state.
pub const DELTA_BALANCED: f64 = PI / 4.0;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x % TAU;
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_signed(x: f64) -> f64 {
    let r = wrap_angle(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Directional-coupler transfer matrix with fabrication error `alpha_err`:
/// `[[cos(π/4+α), i·sin(π/4+α)], [i·sin(π/4+α), cos(π/4+α)]]`.
///
/// `alpha_err = 0` is the ideal 50:50 coupler. Callers keep `|α| < π/4`.
pub fn dc_transfer(alpha_err: f64) -> UnitaryMatrix {
    debug_assert!(alpha_err.abs() < PI / 4.0 + 1e-12);
    let c = Complex64::new((PI / 4.0 + alpha_err).cos(), 0.0);
    let s = Complex64::new(0.0, (PI / 4.0 + alpha_err).sin());
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = c;
    m[(0, 1)] = s;
    m[(1, 0)] = s;
    m[(1, 1)] = c;
    UnitaryMatrix::new(m).expect("DC transfer is unitary for real alpha")
}

/// Symmetric-MZI transfer matrix `DC(β) · diag(e^{iθ1}, e^{iθ2}) · DC(α)`.
///
/// For `α = β = 0` this equals `i·e^{iΣ} [[sin δ, cos δ], [cos δ, −sin δ]]`
/// with `Σ = (θ1+θ2)/2` and `δ = (θ1−θ2)/2`; the prefactor is kept literally.
pub fn mzi_transfer(theta1: f64, theta2: f64, alpha_err: f64, beta_err: f64) -> UnitaryMatrix {
    let first = dc_transfer(alpha_err);
    let second = dc_transfer(beta_err);
    let mut phases = ComplexMatrix::zeros(2, 2);
    phases[(0, 0)] = Complex64::from_polar(1.0, theta1);
    phases[(1, 1)] = Complex64::from_polar(1.0, theta2);
    let m = second.as_matrix().mul(&phases).mul(first.as_matrix());
    UnitaryMatrix::new(m).expect("product of unitaries is unitary")
}

/// Address of one phaseshifter on the 10×10 grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShifterAddress {
    pub row: usize,
    pub col: usize,
}

impl ShifterAddress {
    pub fn new(row: usize, col: usize) -> Result<Self> {
        if row < MESH_MODES && col < MESH_COLS {
            Ok(Self { row, col })
        } else {
            Err(Error::InvalidAddress { row, col })
        }
    }

    /// Flat index in row-major order; used by the crosstalk tables.
    pub fn flat(&self) -> usize {
        self.row * MESH_COLS + self.col
    }

    /// All 100 shifters in row-major order.
    pub fn grid() -> impl Iterator<Item = ShifterAddress> {
        (0..MESH_MODES)
            .flat_map(|row| (0..MESH_COLS).map(move |col| ShifterAddress { row, col }))
    }
}

impl fmt::Display for ShifterAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Address of one MZI: `row + col` even, rows 0..=8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MziAddress {
    row: usize,
    col: usize,
}

impl MziAddress {
    pub fn new(row: usize, col: usize) -> Result<Self> {
        if row + 1 < MESH_MODES && col < MESH_COLS && (row + col) % 2 == 0 {
            Ok(Self { row, col })
        } else {
            Err(Error::InvalidAddress { row, col })
        }
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn col(&self) -> usize {
        self.col
    }

    /// Upper and lower mode coupled by this MZI.
    pub fn modes(&self) -> (usize, usize) {
        (self.row, self.row + 1)
    }

    pub fn upper_shifter(&self) -> ShifterAddress {
        ShifterAddress { row: self.row, col: self.col }
    }

    pub fn lower_shifter(&self) -> ShifterAddress {
        ShifterAddress { row: self.row + 1, col: self.col }
    }

    /// All 45 MZIs of the grid, column-major then top-down.
    pub fn grid() -> impl Iterator<Item = MziAddress> {
        (0..MESH_COLS).flat_map(|col| {
            (0..MESH_MODES - 1)
                .filter(move |row| (row + col) % 2 == 0)
                .map(move |row| MziAddress { row, col })
        })
    }
}

impl fmt::Display for MziAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// One MZI drive setting. `sigma` is stored in `[0, 2π)`, `delta` in `(-π, π]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MziSetting {
    sigma: f64,
    delta: f64,
}

impl MziSetting {
    pub fn new(sigma: f64, delta: f64) -> Self {
        Self { sigma: wrap_angle(sigma), delta: wrap_signed(delta) }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Internal phases `(θ1, θ2) = (Σ+δ, Σ−δ)`, wrapped into `[0, 2π)`.
    /// These are the phases the drive electronics actually set, and the
    /// quantities the crosstalk model perturbs.
    pub fn internal_phases(&self) -> (f64, f64) {
        (wrap_angle(self.sigma + self.delta), wrap_angle(self.sigma - self.delta))
    }

    pub fn cross(sigma: f64) -> Self {
        Self::new(sigma, DELTA_CROSS)
    }

    pub fn bar(sigma: f64) -> Self {
        Self::new(sigma, DELTA_BAR)
    }

    pub fn balanced(sigma: f64) -> Self {
        Self::new(sigma, DELTA_BALANCED)
    }
}

/// Per-MZI directional-coupler errors `(α, β)`; MZIs absent from the map
/// are taken as ideal.
pub type DcErrorMap = BTreeMap<MziAddress, (f64, f64)>;

/// Drive settings for the whole mesh.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeshSettings {
    settings: BTreeMap<MziAddress, MziSetting>,
}

impl MeshSettings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every MZI of the grid in the same state.
    pub fn uniform(setting: MziSetting) -> Self {
        let mut s = Self::new();
        for addr in MziAddress::grid() {
            s.insert(addr, setting);
        }
        s
    }

    pub fn insert(&mut self, addr: MziAddress, setting: MziSetting) {
        self.settings.insert(addr, setting);
    }

    pub fn get(&self, addr: MziAddress) -> Option<MziSetting> {
        self.settings.get(&addr).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MziAddress, MziSetting)> + '_ {
        self.settings.iter().map(|(a, s)| (*a, *s))
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    /// Intended phase per shifter: `θ1 = Σ+δ` on the upper arm, `θ2 = Σ−δ`
    /// on the lower arm, both wrapped into `[0, 2π)`. Shifters not covered
    /// by any configured MZI (including the standalone edge shifters) are
    /// undriven and report 0.
    pub fn driven_phases(&self) -> BTreeMap<ShifterAddress, f64> {
        let mut map: BTreeMap<ShifterAddress, f64> =
            ShifterAddress::grid().map(|s| (s, 0.0)).collect();
        for (addr, setting) in self.iter() {
            let (theta1, theta2) = setting.internal_phases();
            map.insert(addr.upper_shifter(), theta1);
            map.insert(addr.lower_shifter(), theta2);
        }
        map
    }

    /// Rebuilds settings from per-shifter phases (e.g. after crosstalk).
    pub fn from_shifter_phases(phases: &BTreeMap<ShifterAddress, f64>) -> Self {
        let mut s = Self::new();
        for addr in MziAddress::grid() {
            let theta1 = phases.get(&addr.upper_shifter()).copied().unwrap_or(0.0);
            let theta2 = phases.get(&addr.lower_shifter()).copied().unwrap_or(0.0);
            s.insert(addr, MziSetting::new((theta1 + theta2) / 2.0, (theta1 - theta2) / 2.0));
        }
        s
    }
}

/// Applies the 2×2 block `t` to rows `(i, i+1)` of `acc` from the left.
fn apply_block(acc: &mut ComplexMatrix, t: &ComplexMatrix, i: usize) {
    for j in 0..acc.cols() {
        let a = acc[(i, j)];
        let b = acc[(i + 1, j)];
        acc[(i, j)] = t[(0, 0)] * a + t[(0, 1)] * b;
        acc[(i + 1, j)] = t[(1, 0)] * a + t[(1, 1)] * b;
    }
}

/// Composes the full mesh into a 10×10 unitary, columns applied left to
/// right as light propagates. `settings` must cover every MZI of the grid.
pub fn compose_mesh(settings: &MeshSettings, dc_errors: &DcErrorMap) -> Result<UnitaryMatrix> {
    compose_mesh_columns(settings, dc_errors, 0, MESH_COLS - 1)
}

/// Composition restricted to columns `first..=last`; used by the circuit
/// builder to inspect the state before the final interference column.
pub(crate) fn compose_mesh_columns(
    settings: &MeshSettings,
    dc_errors: &DcErrorMap,
    first: usize,
    last: usize,
) -> Result<UnitaryMatrix> {
    let mut acc = ComplexMatrix::identity(MESH_MODES);
    for col in first..=last {
        for addr in MziAddress::grid().filter(|a| a.col() == col) {
            let setting = settings.get(addr).ok_or(Error::MissingMzi(addr))?;
            let (alpha, beta) = dc_errors.get(&addr).copied().unwrap_or((0.0, 0.0));
            let (theta1, theta2) = (setting.sigma + setting.delta, setting.sigma - setting.delta);
            let t = mzi_transfer(theta1, theta2, alpha, beta);
            apply_block(&mut acc, t.as_matrix(), addr.row());
        }
    }
    UnitaryMatrix::new(acc)
}
