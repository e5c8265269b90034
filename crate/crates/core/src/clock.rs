//! Ramsey clock model: mass defect, transmitted internal states, the
//! first-order phase budget and the interference signal.
//!
//! Phases follow the transmitted-state convention
//! `|j_T> = sqrt(T_j) exp[-i (w_j t - p_j^2 t / (2 m_j hbar) - phi_j)] |j_in>`
//! and the measured phase is `arg <e_T|g_T>`. The first-order budget below is
//! the linearization of exactly that expression, so it can be checked term by
//! term against [`transmitted_states`].

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::rect;
use crate::units::{DimensionlessPoint, C, HBAR, U};

/// Largest relative splitting accepted by the first-order formulas.
pub const PERTURBATION_CAP: f64 = 1e-3;

/// Largest `dw / w_bar` accepted for a clock species.
pub const MAX_CLOCK_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClockSpecies {
    name: String,
    mean_mass: f64,
    clock_frequency: f64,
    mean_frequency: f64,
}

impl ClockSpecies {
    /// Species with mean mass `mean_mass` (kg) and clock transition
    /// `clock_frequency` (rad/s). The mean frequency is `m c^2 / hbar`.
    pub fn from_mass(name: impl Into<String>, mean_mass: f64, clock_frequency: f64) -> Result<Self> {
        if !(mean_mass > 0.0 && mean_mass.is_finite()) {
            return domain(format!("mean mass must be positive, got {mean_mass}"));
        }
        Self::build(name.into(), mean_mass, clock_frequency, mean_mass * C * C / HBAR)
    }

    /// Species defined by its mean (Compton) frequency in rad/s.
    pub fn from_mean_frequency(
        name: impl Into<String>,
        mean_frequency: f64,
        clock_frequency: f64,
    ) -> Result<Self> {
        if !(mean_frequency > 0.0 && mean_frequency.is_finite()) {
            return domain(format!("mean frequency must be positive, got {mean_frequency}"));
        }
        Self::build(name.into(), mean_frequency * HBAR / (C * C), clock_frequency, mean_frequency)
    }

    /// Species from a mass in atomic mass units and the clock transition in Hz.
    pub fn from_mass_u_hz(name: impl Into<String>, mass_u: f64, clock_hz: f64) -> Result<Self> {
        Self::from_mass(name, mass_u * U, std::f64::consts::TAU * clock_hz)
    }

    fn build(name: String, mean_mass: f64, clock_frequency: f64, mean_frequency: f64) -> Result<Self> {
        if !(clock_frequency > 0.0 && clock_frequency.is_finite()) {
            return domain(format!("clock frequency must be positive, got {clock_frequency}"));
        }
        let ratio = clock_frequency / mean_frequency;
        if ratio >= MAX_CLOCK_RATIO {
            return domain(format!(
                "clock frequency ratio {ratio:e} is not small against the mean frequency"
            ));
        }
        Ok(Self {
            name,
            mean_mass,
            clock_frequency,
            mean_frequency,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    /// kg
    pub fn mean_mass(&self) -> f64 {
        self.mean_mass
    }
    /// rad/s
    pub fn clock_frequency(&self) -> f64 {
        self.clock_frequency
    }
    /// rad/s
    pub fn mean_frequency(&self) -> f64 {
        self.mean_frequency
    }
    /// `dw / w_bar`, which equals the relative mass defect.
    pub fn clock_ratio(&self) -> f64 {
        self.clock_frequency / self.mean_frequency
    }
}

/// Ground and excited rest masses `m (1 -/+ dw / 2 w_bar)`.
pub fn state_masses(species: &ClockSpecies) -> (f64, f64) {
    let half = 0.5 * species.clock_ratio();
    let m = species.mean_mass();
    (m * (1.0 - half), m * (1.0 + half))
}

/// Relative state splittings `dm/m`, `dp/p`, `dV/V` on top of the mass
/// defect. Each must stay below [`PERTURBATION_CAP`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PerturbationSet {
    mass_rel: f64,
    momentum_rel: f64,
    barrier_rel: f64,
}

impl PerturbationSet {
    pub fn new(mass_rel: f64, momentum_rel: f64, barrier_rel: f64) -> Result<Self> {
        for (name, value) in [
            ("mass_rel", mass_rel),
            ("momentum_rel", momentum_rel),
            ("barrier_rel", barrier_rel),
        ] {
            if !value.is_finite() || value.abs() >= PERTURBATION_CAP {
                return Err(Error::PerturbationTooLarge {
                    name,
                    value,
                    cap: PERTURBATION_CAP,
                });
            }
        }
        Ok(Self {
            mass_rel,
            momentum_rel,
            barrier_rel,
        })
    }

    pub fn none() -> Self {
        Self::default()
    }
    /// Extra mass asymmetry added to the relativistic mass defect.
    pub fn mass_rel(&self) -> f64 {
        self.mass_rel
    }
    pub fn momentum_rel(&self) -> f64 {
        self.momentum_rel
    }
    pub fn barrier_rel(&self) -> f64 {
        self.barrier_rel
    }
}

/// Laser phase `phi(t)` of the Ramsey fields.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub enum LaserPhase {
    /// Fields locked to the transition, `phi = 0`.
    #[default]
    Locked,
    /// `phi(t) = phi0 + detuning * t`.
    Linear { offset: f64, detuning: f64 },
}

impl LaserPhase {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            LaserPhase::Locked => 0.0,
            LaserPhase::Linear { offset, detuning } => offset + detuning * t,
        }
    }

    /// `phi(t) - phi(0)`
    pub fn increment(&self, t: f64) -> f64 {
        self.at(t) - self.at(0.0)
    }
}

/// Relativistic time dilation `(p / m c)^2 t / 2` of a momentum eigenstate.
pub fn time_dilation(p: f64, t: f64, species: &ClockSpecies) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("lab time must be non-negative, got {t}"));
    }
    let beta = p / (species.mean_mass() * C);
    Ok(0.5 * beta * beta * t)
}

/// Phase terms of the Ramsey readout, in radians. `total` is their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseBudget {
    /// `dw t`
    pub clock: f64,
    /// `dw dt`, time dilation of the moving clock.
    pub dilation: f64,
    /// `dw tau`, tunneling delay read at the clock frequency.
    pub tunnel: f64,
    /// `tau_L w_L`, from state-dependent barrier heights.
    pub larmor: f64,
    /// Differential Doppler phase from state-dependent momenta.
    pub doppler: f64,
    /// Contribution `-(phi(t) - phi(0))` of the Ramsey fields.
    pub laser: f64,
    pub total: f64,
    pub lab_time: f64,
    pub momentum: f64,
    pub species: String,
}

impl PhaseBudget {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        clock: f64,
        dilation: f64,
        tunnel: f64,
        larmor: f64,
        doppler: f64,
        laser: f64,
        lab_time: f64,
        momentum: f64,
        species: &ClockSpecies,
    ) -> Self {
        Self {
            clock,
            dilation,
            tunnel,
            larmor,
            doppler,
            laser,
            total: clock + dilation + tunnel + larmor + doppler + laser,
            lab_time,
            momentum,
            species: species.name().to_owned(),
        }
    }

    /// Everything except the clock term, which dominates the total.
    pub fn excess(&self) -> f64 {
        self.dilation + self.tunnel + self.larmor + self.doppler + self.laser
    }
}

/// Barrier height (J) implied by momentum `p` at scaled energy `e_bar`.
pub fn barrier_height(point: DimensionlessPoint, p: f64, species: &ClockSpecies) -> f64 {
    p * p / (2.0 * species.mean_mass() * point.e_bar())
}

fn check_inputs(p: f64, t: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return domain(format!("momentum must be positive, got {p}"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("lab time must be non-negative, got {t}"));
    }
    Ok(())
}

/// Transmitted amplitudes of both internal states from the exact
/// state-dependent rectangular amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmittedStates {
    pub ground: Complex64,
    pub excited: Complex64,
    pub transmission_ground: f64,
    pub transmission_excited: f64,
    /// `phi_e - phi_g`, taken from `t_e conj(t_g)`.
    pub scattering_phase_difference: f64,
    /// `-(t / 2 hbar) (p_e^2/m_e - p_g^2/m_g)`.
    pub kinetic_phase: f64,
    pub clock_phase: f64,
    pub laser_phase: f64,
}

impl TransmittedStates {
    /// `arg <e_T|g_T>` without reduction modulo 2 pi.
    pub fn phase_difference(&self) -> f64 {
        self.clock_phase + self.excess_phase()
    }

    /// Unwrapped phase difference minus the clock term `dw t`.
    pub fn excess_phase(&self) -> f64 {
        self.kinetic_phase - self.scattering_phase_difference + self.laser_phase
    }

    pub fn signal(&self) -> RamseySignal {
        let n_t = 0.5 * (self.transmission_excited + self.transmission_ground);
        let overlap = (self.transmission_excited * self.transmission_ground).sqrt();
        RamseySignal {
            n_t,
            contrast: if n_t > 0.0 { (overlap / n_t).min(1.0) } else { 0.0 },
            phase: self.phase_difference(),
        }
    }
}

/// Exact transmitted states for a mean point `(E, V)`, mean momentum `p`
/// and lab time `t`. Each state is scattered with its own mass, momentum
/// and barrier height; no expansion is made.
pub fn transmitted_states(
    point: DimensionlessPoint,
    p: f64,
    t: f64,
    species: &ClockSpecies,
    perturb: &PerturbationSet,
) -> Result<TransmittedStates> {
    transmitted_states_with_laser(point, p, t, species, perturb, &LaserPhase::Locked)
}

pub fn transmitted_states_with_laser(
    point: DimensionlessPoint,
    p: f64,
    t: f64,
    species: &ClockSpecies,
    perturb: &PerturbationSet,
    laser: &LaserPhase,
) -> Result<TransmittedStates> {
    check_inputs(p, t)?;
    let dm = species.clock_ratio() + perturb.mass_rel();
    let (bm, bp, bv) = (0.5 * dm, 0.5 * perturb.momentum_rel(), 0.5 * perturb.barrier_rel());
    let excited = rect::rescaled(point, 1.0 + bm, 1.0 + bv, 1.0 + bp);
    let ground = rect::rescaled(point, 1.0 - bm, 1.0 - bv, 1.0 - bp);
    let te = rect::amplitude(excited).t;
    let tg = rect::amplitude(ground).t;

    let m = species.mean_mass();
    // p_e^2/m_e - p_g^2/m_g = (p^2/m) [4 bp - 2 bm (1 + bp^2)] / (1 - bm^2)
    let kinetic_diff = (p * p / m) * (4.0 * bp - 2.0 * bm * (1.0 + bp * bp)) / (1.0 - bm * bm);
    let kinetic_phase = -t * kinetic_diff / (2.0 * HBAR);

    let omega = species.mean_frequency();
    let half = 0.5 * species.clock_frequency();
    // exp(-i w_j t) with w_j = w_bar +/- dw/2; the common w_bar t drops out of <e|g>.
    let free_e = Complex64::from_polar(1.0, -(omega + half) * t % std::f64::consts::TAU);
    let free_g = Complex64::from_polar(1.0, -(omega - half) * t % std::f64::consts::TAU);
    let kin_e = Complex64::from_polar(1.0, (p * p * (1.0 + bp).powi(2) * t / (2.0 * m * (1.0 + bm) * HBAR)) % std::f64::consts::TAU);
    let kin_g = Complex64::from_polar(1.0, (p * p * (1.0 - bp).powi(2) * t / (2.0 * m * (1.0 - bm) * HBAR)) % std::f64::consts::TAU);

    Ok(TransmittedStates {
        ground: tg * free_g * kin_g,
        excited: te * free_e * kin_e,
        transmission_ground: tg.norm_sqr(),
        transmission_excited: te.norm_sqr(),
        scattering_phase_difference: (te * tg.conj()).arg(),
        kinetic_phase,
        clock_phase: species.clock_frequency() * t,
        laser_phase: -laser.increment(t),
    })
}

/// First-order phase budget at mean point `(E, V)`, momentum `p` (kg m/s),
/// lab time `t` (s) and Larmor frequency `larmor` (rad/s).
///
/// The Larmor frequency must equal `dV / hbar` for the height split in
/// `perturb`; a mismatch is a domain error.
pub fn phase_budget(
    point: DimensionlessPoint,
    p: f64,
    t: f64,
    species: &ClockSpecies,
    perturb: &PerturbationSet,
    larmor: f64,
) -> Result<PhaseBudget> {
    phase_budget_with_laser(point, p, t, species, perturb, larmor, &LaserPhase::Locked)
}

pub fn phase_budget_with_laser(
    point: DimensionlessPoint,
    p: f64,
    t: f64,
    species: &ClockSpecies,
    perturb: &PerturbationSet,
    larmor: f64,
    laser: &LaserPhase,
) -> Result<PhaseBudget> {
    check_inputs(p, t)?;
    let v0 = barrier_height(point, p, species);
    let expected = perturb.barrier_rel() * v0 / HBAR;
    let scale = expected.abs().max(larmor.abs());
    if (larmor - expected).abs() > 1e-9 * scale {
        return domain(format!(
            "Larmor frequency {larmor:e} rad/s does not match dV/hbar = {expected:e} rad/s"
        ));
    }
    let m = species.mean_mass();
    let dw = species.clock_frequency();
    let coeffs = rect::expansion_coefficients(point);

    let clock = dw * t;
    // dw dt, plus the same kinetic mechanism for any extra mass asymmetry.
    let dilation = dw * time_dilation(p, t, species)? + p * p * t / (2.0 * HBAR * m) * perturb.mass_rel();
    let tunnel = coeffs.phi_m.abs() * (species.clock_ratio() + perturb.mass_rel());
    let larmor_term = HBAR * coeffs.phi_v.abs() / v0 * larmor;
    let doppler_rate = p * (perturb.momentum_rel() * p) / (HBAR * m);
    let wigner = rect::wigner_phase_time(point, v0);
    let doppler = -(t + wigner) * doppler_rate;

    Ok(PhaseBudget::assemble(
        clock,
        dilation,
        tunnel,
        larmor_term,
        doppler,
        -laser.increment(t),
        t,
        p,
        species,
    ))
}

/// Budget of a barrier-free reference clock with the same `|p|`, `t` and
/// preparation: no tunneling, no Larmor term, and only the free part of
/// the Doppler phase.
pub fn reference_budget(
    p: f64,
    t: f64,
    species: &ClockSpecies,
    perturb: &PerturbationSet,
) -> Result<PhaseBudget> {
    reference_budget_with_laser(p, t, species, perturb, &LaserPhase::Locked)
}

pub fn reference_budget_with_laser(
    p: f64,
    t: f64,
    species: &ClockSpecies,
    perturb: &PerturbationSet,
    laser: &LaserPhase,
) -> Result<PhaseBudget> {
    let p = p.abs();
    check_inputs(p, t)?;
    let m = species.mean_mass();
    let dw = species.clock_frequency();
    let dilation = dw * time_dilation(p, t, species)? + p * p * t / (2.0 * HBAR * m) * perturb.mass_rel();
    let doppler = -t * p * (perturb.momentum_rel() * p) / (HBAR * m);
    Ok(PhaseBudget::assemble(
        dw * t,
        dilation,
        0.0,
        0.0,
        doppler,
        -laser.increment(t),
        t,
        p,
        species,
    ))
}

/// `w_eff = dw (1 + (w_bar/dw)(dV/V))` for mean barrier height `v_bar_j`.
pub fn effective_clock_frequency(species: &ClockSpecies, v_bar_j: f64, delta_v: f64) -> Result<f64> {
    if !(v_bar_j > 0.0 && v_bar_j.is_finite()) {
        return domain(format!("mean barrier height must be positive, got {v_bar_j}"));
    }
    let dw = species.clock_frequency();
    Ok(dw * (1.0 + species.mean_frequency() / dw * (delta_v / v_bar_j)))
}

/// Ratio of the Larmor phase to the mass-defect tunneling phase,
/// `(hbar w_bar / V)(w_L / dw)`; the shared expansion coefficient cancels.
pub fn larmor_ratio(species: &ClockSpecies, v_bar_j: f64, larmor: f64) -> Result<f64> {
    if !(v_bar_j > 0.0) {
        return domain(format!("mean barrier height must be positive, got {v_bar_j}"));
    }
    Ok(HBAR * species.mean_frequency() / v_bar_j * larmor / species.clock_frequency())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamseySignal {
    /// Mean transmitted number per incident atom.
    pub n_t: f64,
    /// `|<e_T|g_T>| / N_T`
    pub contrast: f64,
    pub phase: f64,
}

/// Ground-state population `(N_T/2) [1 + contrast cos(total + laser_phase)]`.
pub fn ramsey_intensity(budget: &PhaseBudget, n_t: f64, contrast: f64, laser_phase: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&contrast) {
        return domain(format!("contrast must lie in [0, 1], got {contrast}"));
    }
    if !(n_t >= 0.0) {
        return domain(format!("transmitted number must be non-negative, got {n_t}"));
    }
    Ok(0.5 * n_t * (1.0 + contrast * (budget.total + laser_phase).cos()))
}
