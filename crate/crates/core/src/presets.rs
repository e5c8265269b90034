//! Reference species and the working numbers used by the bundled configs.

use std::f64::consts::{PI, TAU};

use crate::clock::ClockSpecies;
use crate::units::{nanokelvin, HBAR};

/// Rubidium-87 hyperfine clock: 86.91 u, 6.8 GHz.
pub fn rb87() -> ClockSpecies {
    ClockSpecies::from_mass_u_hz("Rb-87", 86.91, 6.8e9).expect("valid preset")
}

/// Ytterbium-174 optical clock: Compton frequency 3.92e25 Hz, clock 522 THz.
pub fn yb174() -> ClockSpecies {
    ClockSpecies::from_mean_frequency("Yb-174", TAU * 3.92e25, TAU * 522e12).expect("valid preset")
}

/// Mean barrier height used for the Rb Larmor comparison (J).
pub const RB_LARMOR_BARRIER: f64 = 1.3e-31;
/// Larmor frequency of the Rb comparison (rad/s).
pub const RB_LARMOR_FREQUENCY: f64 = TAU * 200.0;

/// Height of the Rb Gaussian barrier: `k_B * 200 nK`.
pub fn rb_gaussian_height() -> f64 {
    nanokelvin(200.0)
}

/// Yb working point `(E, V)` near maximal tunneling delay.
pub const YB_WORKING_POINT: (f64, f64) = (1.4, 4.0);
/// Two-photon recoil wavenumber of a 759.35 nm lattice (1/m).
pub const YB_RECOIL_WAVENUMBER: f64 = 4.0 * PI / 759.35e-9;
/// Atoms per run in the Yb budget.
pub const YB_ATOMS_PER_RUN: f64 = 1e5;
/// State-dependent height shift of the boosted Yb budget (J), `hbar * 1/s`.
pub const YB_BARRIER_SHIFT: f64 = HBAR * 1.0;

/// Incident momentum `hbar k` of the Yb working point.
pub fn yb_momentum() -> f64 {
    HBAR * YB_RECOIL_WAVENUMBER
}
