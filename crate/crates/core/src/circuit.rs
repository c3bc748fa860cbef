//! Builder for the two-qudit overlap-estimation circuit.
//!
//! Two photons enter the mesh on modes 4 and 5. Columns 0–4 carry them
//! through bar-state MZIs; columns 5–8 fan each photon out into a four-mode
//! qudit via a tree of splitter MZIs and waveguide-style crossings; column 9
//! interferes the two qudits pairwise on balanced beamsplitters.
//!
//! After column 8 the first qudit occupies modes 1,3,5,7 and the second
//! modes 2,4,6,8. Six MZI `Σ` phases — on (0,8), (2,8), (1,7), (6,8), (7,7)
//! and (8,8) — encode the six tunable relative phases of the two qudits;
//! MZI (4,8) and the pair (3,7)/(5,7) stay at `Σ = 0` and act as the phase
//! references, anchoring the convention to output modes 4 and 5. Everything
//! off the light path is left undriven.

use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)] // float math comes from libm in no_std builds
use num_traits::Float;

use crate::mesh::{
    compose_mesh_columns, DcErrorMap, MeshSettings, MziAddress, MziSetting, DELTA_BALANCED,
};
use crate::qudit::{cumulative_phases, QuditSpec};

/// Input modes of the two photons.
pub const INPUT_MODES: (usize, usize) = (4, 5);
/// Output modes carrying the first qudit (register A).
pub const REGISTER_A_MODES: [usize; 4] = [1, 3, 5, 7];
/// Output modes carrying the second qudit (register B).
pub const REGISTER_B_MODES: [usize; 4] = [2, 4, 6, 8];
/// Last column before the interference stage.
pub const ENCODING_LAST_COL: usize = 8;

/// Amplitudes below this are treated as exactly zero when solving phases.
const ZERO_AMP: f64 = 1e-7;

fn addr(row: usize, col: usize) -> MziAddress {
    MziAddress::new(row, col).expect("circuit table uses valid addresses")
}

/// Splitter setting: `δ` chosen so the two output magnitudes are
/// `(upper, lower)` up to normalisation, with the single-shifter drive
/// convention `Σ = δ` (lower arm undriven).
fn splitter(upper: f64, lower: f64, from_lower: bool) -> MziSetting {
    // From the lower port the outputs are (cos δ, −sin δ); from the upper
    // port they are (sin δ, cos δ).
    let delta = if from_lower { lower.atan2(upper) } else { upper.atan2(lower) };
    MziSetting::new(delta, delta)
}

/// Builds mesh settings that prepare `|ψ(θ)⟩` on modes 1,3,5,7 and
/// `|ψ(φ)⟩` on modes 2,4,6,8 ahead of the balanced column-9 beamsplitters.
/// Both qudits use the same amplitude profile.
pub fn build_overlap_circuit(theta: [f64; 3], phi: [f64; 3], spec: &QuditSpec) -> MeshSettings {
    debug_assert!(theta.iter().chain(phi.iter()).all(|p| p.is_finite()));
    let a = spec.amplitudes();

    // Subtree weights of the two fan-out trees.
    let w012 = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let w01 = (a[0] * a[0] + a[1] * a[1]).sqrt();
    let w123 = (a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt();
    let w23 = (a[2] * a[2] + a[3] * a[3]).sqrt();

    let mut settings = MeshSettings::uniform(MziSetting::cross(0.0));

    // Columns 0-4: bar state on the photon route, single-shifter drive.
    for (row, col) in [(4, 0), (3, 1), (5, 1), (4, 2), (3, 3), (5, 3), (4, 4)] {
        settings.insert(addr(row, col), MziSetting::new(FRAC_PI_2, FRAC_PI_2));
    }

    // Fan-out trees (columns 5-7) and the routing column 8. The six
    // encoding MZIs start at Σ = 0 so the baseline pass below measures
    // their paths' fixed phases directly.
    settings.insert(addr(3, 5), splitter(w012, a[3], true));
    settings.insert(addr(5, 5), splitter(a[0], w123, false));
    settings.insert(addr(2, 6), splitter(w01, a[2], true));
    settings.insert(addr(4, 6), MziSetting::cross(0.0));
    settings.insert(addr(6, 6), splitter(a[1], w23, false));
    settings.insert(addr(1, 7), MziSetting::new(0.0, a[1].atan2(a[0])));
    settings.insert(addr(3, 7), MziSetting::cross(0.0));
    settings.insert(addr(5, 7), MziSetting::cross(0.0));
    settings.insert(addr(7, 7), MziSetting::new(0.0, a[2].atan2(a[3])));
    settings.insert(addr(0, 8), MziSetting::new(0.0, FRAC_PI_2));
    settings.insert(addr(2, 8), MziSetting::cross(0.0));
    settings.insert(addr(4, 8), MziSetting::cross(0.0));
    settings.insert(addr(6, 8), MziSetting::cross(0.0));
    settings.insert(addr(8, 8), MziSetting::new(0.0, FRAC_PI_2));

    // Column 9: balanced beamsplitters interfering the two registers.
    for row in [1, 3, 5, 7] {
        settings.insert(addr(row, 9), MziSetting::new(DELTA_BALANCED, DELTA_BALANCED));
    }

    solve_encoding_phases(&mut settings, theta, phi, &a);
    settings
}

/// Baseline phase of each qudit component with all encoding `Σ` at their
/// defaults, then a sequential solve of the six encoding phases.
///
/// Component phases are linear in the `Σ` of the MZIs along each path:
///
/// ```text
/// A0 (out 1): Σ(1,7) + Σ(0,8)      B0 (out 2): Σ(2,8)
/// A1 (out 3): Σ(1,7) + Σ(2,8)      B1 (out 4): —        (reference)
/// A2 (out 5): —        (reference) B2 (out 6): Σ(7,7) + Σ(6,8)
/// A3 (out 7): Σ(6,8)               B3 (out 8): Σ(7,7) + Σ(8,8)
/// ```
///
/// One global phase per register is free; components with zero amplitude
/// impose no constraint and their phases default to zero.
fn solve_encoding_phases(
    settings: &mut MeshSettings,
    theta: [f64; 3],
    phi: [f64; 3],
    amps: &[f64; 4],
) {
    let baseline = compose_mesh_columns(settings, &DcErrorMap::new(), 0, ENCODING_LAST_COL)
        .expect("grid settings are complete");

    let mut f_a = [0.0f64; 4];
    let mut f_b = [0.0f64; 4];
    for k in 0..4 {
        let ca = baseline.as_matrix()[(REGISTER_A_MODES[k], INPUT_MODES.0)];
        let cb = baseline.as_matrix()[(REGISTER_B_MODES[k], INPUT_MODES.1)];
        debug_assert!(
            (ca.norm() - amps[k]).abs() < 1e-9 && (cb.norm() - amps[k]).abs() < 1e-9,
            "fan-out magnitudes disagree with the amplitude profile"
        );
        f_a[k] = ca.arg();
        f_b[k] = cb.arg();
    }

    let want_a = cumulative_phases(theta);
    let want_b = cumulative_phases(phi);
    let live = |k: usize| amps[k] > ZERO_AMP;

    // Register A global phase, anchored on the reference component A2.
    let mut g_a = live(2).then(|| f_a[2] - want_a[2]);
    let mut g_b = live(1).then(|| f_b[1] - want_b[1]);

    let mut sig_68 = 0.0;
    if live(3) {
        match g_a {
            Some(g) => sig_68 = want_a[3] + g - f_a[3],
            None => g_a = Some(f_a[3] - want_a[3]),
        }
    }
    let mut sig_28 = 0.0;
    if live(0) {
        match g_b {
            Some(g) => sig_28 = want_b[0] + g - f_b[0],
            None => g_b = Some(f_b[0] - want_b[0]),
        }
    }
    let mut sig_17 = 0.0;
    if live(1) {
        match g_a {
            Some(g) => sig_17 = want_a[1] + g - f_a[1] - sig_28,
            None => g_a = Some(f_a[1] + sig_28 - want_a[1]),
        }
    }
    let mut sig_08 = 0.0;
    if live(0) {
        if let Some(g) = g_a {
            sig_08 = want_a[0] + g - f_a[0] - sig_17;
        }
    }
    let mut sig_77 = 0.0;
    if live(2) {
        match g_b {
            Some(g) => sig_77 = want_b[2] + g - f_b[2] - sig_68,
            None => g_b = Some(f_b[2] + sig_68 - want_b[2]),
        }
    }
    let mut sig_88 = 0.0;
    if live(3) {
        if let Some(g) = g_b {
            sig_88 = want_b[3] + g - f_b[3] - sig_77;
        }
    }

    for (address, sigma) in [
        (addr(0, 8), sig_08),
        (addr(1, 7), sig_17),
        (addr(2, 8), sig_28),
        (addr(6, 8), sig_68),
        (addr(7, 7), sig_77),
        (addr(8, 8), sig_88),
    ] {
        let delta = settings.get(address).expect("encoding MZI present").delta();
        settings.insert(address, MziSetting::new(sigma, delta));
    }
}
