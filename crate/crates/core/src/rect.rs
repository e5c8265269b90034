//! Closed-form scattering on a rectangular barrier in scaled units.
//!
//! With `w = V^2 (1 - E)` every closed form is written through the entire
//! functions `C(w) = cosh(sqrt w)` and `S(w) = sinh(sqrt w)/sqrt w`, which
//! continue to `cos` and `sin(x)/x` above the barrier. The transmission
//! amplitude is
//!
//! ```text
//! t = exp(-i V sqrt(E)) / (C(w) - i (2E - 1) V S(w) / (2 sqrt E))
//! ```
//!
//! so there is no branch switch at `E = 1`. The quotients that are
//! removable-singular at `E = 1` (tunneling time and the momentum
//! coefficient) fall back to Taylor series inside [`GUARD_BAND`].

use num_complex::Complex64;
use serde::Serialize;

use crate::clock::ClockSpecies;
use crate::units::{DimensionlessPoint, HBAR};

/// Half-width of the band `|E - 1| < GUARD_BAND` evaluated by series.
pub const GUARD_BAND: f64 = 1e-7;

/// Relative step of the finite differences behind `T_m`, `T_V`, `T_p`.
pub const FD_STEP: f64 = 1e-6;

/// Scattering data of a single energy and internal state.
///
/// `kappa0` and `kappa1` are in units of the inverse barrier width for the
/// closed forms, and in 1/m for the transfer-matrix solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringSolution {
    pub t: Complex64,
    pub r: Complex64,
    pub transmission: f64,
    pub phase: f64,
    pub kappa0: f64,
    pub kappa1: Complex64,
}

impl ScatteringSolution {
    pub fn unitarity_defect(&self) -> f64 {
        (self.t.norm_sqr() + self.r.norm_sqr() - 1.0).abs()
    }
}

/// First-order expansion coefficients of phase and transmission in the
/// relative mass, height and momentum splittings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionCoefficients {
    pub phi_m: f64,
    pub phi_v: f64,
    pub phi_p: f64,
    pub t_m: f64,
    pub t_v: f64,
    pub t_p: f64,
}

pub(crate) fn cosh_root(w: f64) -> f64 {
    if w >= 0.0 {
        w.sqrt().cosh()
    } else {
        (-w).sqrt().cos()
    }
}

pub(crate) fn sinhc_root(w: f64) -> f64 {
    if w.abs() < 1e-3 {
        1.0 + sinhc_root_minus_one(w)
    } else if w > 0.0 {
        let x = w.sqrt();
        x.sinh() / x
    } else {
        let x = (-w).sqrt();
        x.sin() / x
    }
}

// sum_{n>=1} w^n / (2n+1)!
fn sinhc_root_minus_one(w: f64) -> f64 {
    if w.abs() > 1.0 {
        return sinhc_root(w) - 1.0;
    }
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..14 {
        term *= w / ((2 * n) as f64 * (2 * n + 1) as f64);
        sum += term;
    }
    sum
}

// sum_{n>=1} w^n / (2n)!
fn cosh_root_minus_one(w: f64) -> f64 {
    if w.abs() > 1.0 {
        return cosh_root(w) - 1.0;
    }
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..14 {
        term *= w / ((2 * n - 1) as f64 * (2 * n) as f64);
        sum += term;
    }
    sum
}

/// `T S(w)^2 = 1 / (S^-2 + V^2/4E)`, finite for any opacity.
fn t_times_s_sq(e: f64, v: f64, s: f64) -> f64 {
    1.0 / (1.0 / (s * s) + v * v / (4.0 * e))
}

/// `T S(4w) = T S(w) C(w)`, overflow-safe deep below the barrier.
fn t_times_s4(e: f64, v: f64, w: f64) -> f64 {
    let s = sinhc_root(w);
    if w > 100.0 {
        let x = w.sqrt();
        t_times_s_sq(e, v, s) * x / x.tanh()
    } else {
        mean_transmission_raw(e, v) * s * cosh_root(w)
    }
}

fn mean_transmission_raw(e: f64, v: f64) -> f64 {
    let s = sinhc_root(v * v * (1.0 - e));
    1.0 / (1.0 + v * v * s * s / (4.0 * e))
}

/// Transmission and reflection amplitudes; `t` carries the propagation
/// factor `exp(-i V sqrt E)` and `r` is referred to the left barrier edge.
pub fn amplitude(point: DimensionlessPoint) -> ScatteringSolution {
    let (e, v) = (point.e_bar(), point.v_bar());
    let w = v * v * (1.0 - e);
    let k = v * e.sqrt();
    let s = sinhc_root(w);
    let half = v / (2.0 * e.sqrt());
    let (t, r) = if w > 100.0 {
        // D = C (1 - i u/C); keep only bounded ratios.
        let x = w.sqrt();
        let th = x.tanh();
        let inv_c = 2.0 * (-x).exp() / (1.0 + (-2.0 * x).exp());
        let d = Complex64::new(1.0, -(2.0 * e - 1.0) * half * th / x);
        (
            Complex64::from_polar(inv_c, -k) / d,
            Complex64::new(0.0, -half * th / x) / d,
        )
    } else {
        let d = Complex64::new(cosh_root(w), -(2.0 * e - 1.0) * half * s);
        (
            Complex64::from_polar(1.0, -k) / d,
            Complex64::new(0.0, -half * s) / d,
        )
    };
    ScatteringSolution {
        t,
        r,
        transmission: t.norm_sqr(),
        phase: phase(point),
        kappa0: k,
        kappa1: Complex64::new(1.0 - e, 0.0).sqrt() * v,
    }
}

/// Mean transmission `1 / (1 + V^2 S(w)^2 / 4E)`.
pub fn mean_transmission(point: DimensionlessPoint) -> f64 {
    mean_transmission_raw(point.e_bar(), point.v_bar())
}

/// Transmission phase without the free-propagation term `-V sqrt(E)`.
pub fn phase_without_propagation(point: DimensionlessPoint) -> f64 {
    let (e, v) = (point.e_bar(), point.v_bar());
    let w = v * v * (1.0 - e);
    let half = v / (2.0 * e.sqrt());
    if w > 100.0 {
        let x = w.sqrt();
        ((2.0 * e - 1.0) * half * x.tanh() / x).atan()
    } else {
        ((2.0 * e - 1.0) * half * sinhc_root(w)).atan2(cosh_root(w))
    }
}

/// Transmission phase `arg t`, i.e. `arctan(...) - V sqrt(E)`; principal
/// branch of the arctangent part. Use [`unwrap_phase`] along scans.
pub fn phase(point: DimensionlessPoint) -> f64 {
    phase_without_propagation(point) - point.v_bar() * point.e_bar().sqrt()
}

/// Shift `phase` by a multiple of 2 pi to the branch nearest `previous`.
pub fn unwrap_phase(previous: f64, phase: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    phase - tau * ((phase - previous) / tau).round()
}

// T (2 + G) where G = (S(4w) - 1) / (1 - E).
fn tau_factor(e: f64, v: f64) -> f64 {
    let d = 1.0 - e;
    let w4 = 4.0 * v * v * d;
    let t = mean_transmission_raw(e, v);
    if d.abs() < GUARD_BAND {
        let c = 4.0 * v * v;
        let g = c / 6.0 + c * c / 120.0 * d + c * c * c / 5040.0 * d * d;
        t * (2.0 + g)
    } else if w4.abs() <= 1.0 {
        t * (2.0 + sinhc_root_minus_one(w4) / d)
    } else {
        2.0 * t + (t_times_s4(e, v, v * v * d) - t) / d
    }
}

/// Scaled tunneling time `omega_bar * tau`.
pub fn scaled_tunneling_time(point: DimensionlessPoint) -> f64 {
    let (e, v) = (point.e_bar(), point.v_bar());
    v * tau_factor(e, v) / (4.0 * e.sqrt())
}

/// Tunneling time in seconds for the species' mean (Compton) frequency.
pub fn tunneling_time(point: DimensionlessPoint, species: &ClockSpecies) -> f64 {
    scaled_tunneling_time(point) / species.mean_frequency()
}

/// Mass (and barrier-height) phase coefficient, negative everywhere.
pub fn phi_m(point: DimensionlessPoint) -> f64 {
    let (e, v) = (point.e_bar(), point.v_bar());
    -(v * tau_factor(e, v) / (4.0 * e.sqrt()))
}

/// Momentum phase coefficient `p d(phi)/dp`.
pub fn phi_p(point: DimensionlessPoint) -> f64 {
    let (e, v) = (point.e_bar(), point.v_bar());
    let d = 1.0 - e;
    let w = v * v * d;
    let w4 = 4.0 * w;
    let t = mean_transmission_raw(e, v);
    // T * B / (1 - E) with B = 1 - 4E - C(4w) + 4 S(4w).
    let tb_over_d = if d.abs() < GUARD_BAND {
        let c = 4.0 * v * v;
        let coeff = |n: i32, fact_odd: f64, fact_even: f64| c.powi(n) * (4.0 / fact_odd - 1.0 / fact_even);
        let series = 4.0
            + coeff(1, 6.0, 2.0)
            + coeff(2, 120.0, 24.0) * d
            + coeff(3, 5040.0, 720.0) * d * d;
        t * series
    } else if w4.abs() <= 1.0 {
        t * (4.0 + (4.0 * sinhc_root_minus_one(w4) - cosh_root_minus_one(w4)) / d)
    } else {
        let s = sinhc_root(w);
        (-4.0 * e * t - 2.0 * w * t_times_s_sq(e, v, s) + 4.0 * t_times_s4(e, v, w)) / d
    };
    v * tb_over_d / (8.0 * e.sqrt())
}

/// Scaled coordinates after multiplying mass, height and momentum by the
/// given factors (barrier width fixed).
pub fn rescaled(point: DimensionlessPoint, mass: f64, height: f64, momentum: f64) -> DimensionlessPoint {
    let e = point.e_bar() * momentum * momentum / (mass * height);
    let v = point.v_bar() * (mass * height).sqrt();
    DimensionlessPoint::new(e, v).expect("positive scale factors keep the point valid")
}

pub fn expansion_coefficients(point: DimensionlessPoint) -> ExpansionCoefficients {
    let h = FD_STEP;
    let (up, down) = (1.0 + 0.5 * h, 1.0 - 0.5 * h);
    let t_of = |p: DimensionlessPoint| mean_transmission(p);
    let t_m = (t_of(rescaled(point, up, 1.0, 1.0)) - t_of(rescaled(point, down, 1.0, 1.0))) / h;
    let t_v = (t_of(rescaled(point, 1.0, up, 1.0)) - t_of(rescaled(point, 1.0, down, 1.0))) / h;
    let t_p = (t_of(rescaled(point, 1.0, 1.0, up)) - t_of(rescaled(point, 1.0, 1.0, down))) / h;
    let phi_m = phi_m(point);
    ExpansionCoefficients {
        phi_m,
        phi_v: phi_m,
        phi_p: phi_p(point),
        t_m,
        t_v,
        t_p,
    }
}

/// Wigner phase time `hbar d(phi)/dE = hbar Phi_p / (2 E)` for barrier
/// height `v0` in joules.
pub fn wigner_phase_time(point: DimensionlessPoint, v0: f64) -> f64 {
    HBAR * phi_p(point) / (2.0 * point.e_bar() * v0)
}

/// Scaled energies `1 + (n pi / V)^2` of the above-barrier resonances
/// (`T = 1`) up to `e_max`.
pub fn resonance_energies(v_bar: f64, e_max: f64) -> Vec<f64> {
    (1..)
        .map(|n| 1.0 + (n as f64 * std::f64::consts::PI / v_bar).powi(2))
        .take_while(|&e| e <= e_max)
        .collect()
}
