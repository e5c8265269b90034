//! Physical constants and the map between SI parameters and the scaled
//! kinetic energy / barrier parameter pair used by the closed forms.

use serde::Serialize;

use crate::barrier::BarrierProfile;
use crate::clock::ClockSpecies;
use crate::error::{domain, Result};

/// CODATA 2018 exact and recommended values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Atomic mass unit, kg.
    pub u: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    k_b: 1.380_649e-23,
    u: 1.660_539_066_60e-27,
};

pub const HBAR: f64 = CONSTANTS.hbar;
pub const C: f64 = CONSTANTS.c;
pub const K_B: f64 = CONSTANTS.k_b;
pub const U: f64 = CONSTANTS.u;

/// Thermal energy `k_B T` of a temperature given in nanokelvin.
pub fn nanokelvin(t_nk: f64) -> f64 {
    K_B * t_nk * 1e-9
}

/// Scaled kinetic energy `E/V0` and barrier parameter (opacity) of one
/// scattering configuration. Both are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessPoint {
    e_bar: f64,
    v_bar: f64,
}

impl DimensionlessPoint {
    pub fn new(e_bar: f64, v_bar: f64) -> Result<Self> {
        if !(e_bar.is_finite() && e_bar > 0.0) {
            return domain(format!("scaled energy must be positive and finite, got {e_bar}"));
        }
        if !(v_bar.is_finite() && v_bar > 0.0) {
            return domain(format!("barrier parameter must be positive and finite, got {v_bar}"));
        }
        Ok(Self { e_bar, v_bar })
    }

    #[inline]
    pub fn e_bar(&self) -> f64 {
        self.e_bar
    }

    #[inline]
    pub fn v_bar(&self) -> f64 {
        self.v_bar
    }
}

/// Which length a barrier geometry is parameterized by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShapeKind {
    /// Width `a` of a rectangular barrier.
    Rectangular,
    /// Standard deviation `sigma` of a Gaussian barrier.
    Gaussian,
}

/// Scaled coordinates of a momentum `p` incident on `barrier`.
pub fn to_dimensionless(
    p: f64,
    barrier: &BarrierProfile,
    species: &ClockSpecies,
) -> Result<DimensionlessPoint> {
    if p == 0.0 || !p.is_finite() {
        return domain(format!("momentum must be non-zero and finite, got {p}"));
    }
    let v0 = barrier.peak_height();
    if v0 <= 0.0 {
        return domain(format!("barrier peak height must be positive, got {v0}"));
    }
    let e_bar = p * p / (2.0 * species.mean_mass() * v0);
    DimensionlessPoint::new(e_bar, barrier.opacity(species)?)
}

/// Inverse of [`to_dimensionless`] for a barrier of height `v0`: returns the
/// incident momentum and the barrier length (`a` or `sigma`).
pub fn from_dimensionless(
    point: DimensionlessPoint,
    v0: f64,
    species: &ClockSpecies,
    shape: ShapeKind,
) -> Result<(f64, f64)> {
    if !(v0 > 0.0 && v0.is_finite()) {
        return domain(format!("barrier height must be positive, got {v0}"));
    }
    let m = species.mean_mass();
    let p = (2.0 * m * v0 * point.e_bar()).sqrt();
    let root = (2.0 * m * v0).sqrt();
    let length = match shape {
        ShapeKind::Rectangular => point.v_bar() * HBAR / root,
        ShapeKind::Gaussian => point.v_bar() * HBAR / (2.0 * std::f64::consts::PI.sqrt() * root),
    };
    Ok((p, length))
}
