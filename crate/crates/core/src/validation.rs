//! Self-checks of the numerical invariants, runnable from the command line.

use std::time::Instant;

use serde::Serialize;

use crate::barrier::{solve_gaussian_width, BarrierProfile};
use crate::clock::{
    phase_budget_with_laser, reference_budget_with_laser, LaserPhase, PerturbationSet,
};
use crate::design::differential_phase;
use crate::error::Result;
use crate::presets;
use crate::rect::{self, GUARD_BAND};
use crate::solver::BarrierSolver;
use crate::transfer;
use crate::units::{from_dimensionless, DimensionlessPoint, ShapeKind};
use crate::wavepacket::{self, MomentumDistribution};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Largest observed deviation.
    pub worst: f64,
    pub tolerance: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> Check {
    let start = Instant::now();
    let worst = f().unwrap_or(f64::INFINITY);
    Check {
        name: name.to_owned(),
        passed: worst <= tolerance,
        worst,
        tolerance,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub(crate) fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn pt(e: f64, v: f64) -> Result<DimensionlessPoint> {
    DimensionlessPoint::new(e, v)
}

/// `|t|^2 + |r|^2 - 1` of the closed form on a grid covering both regimes.
pub fn closed_form_unitarity() -> Result<f64> {
    let mut worst = 0.0_f64;
    for e in grid(0.01, 5.0, 60) {
        for v in grid(0.1, 12.0, 60) {
            worst = worst.max(rect::amplitude(pt(e, v)?).unitarity_defect());
        }
    }
    Ok(worst)
}

fn gaussian_profile(v_bar: f64) -> Result<BarrierProfile> {
    let rb = presets::rb87();
    let v0 = presets::rb_gaussian_height();
    BarrierProfile::gaussian(v0, solve_gaussian_width(v_bar, v0, &rb)?)
}

/// Unitarity of slab products for a Gaussian barrier.
pub fn transfer_unitarity() -> Result<f64> {
    let m = presets::rb87().mean_mass();
    let mut worst = 0.0_f64;
    for v in [1.0, 4.0, 6.0] {
        let g = gaussian_profile(v)?;
        let d = transfer::decompose(&g, 1024)?;
        for e in [0.2, 0.8, 1.0, 1.4, 3.0] {
            worst = worst.max(transfer::amplitude(&d, e * g.peak_height(), m)?.unitarity_defect());
        }
    }
    Ok(worst)
}

/// `|log |det M||` for moderate opacities.
pub fn unit_determinant() -> Result<f64> {
    let m = presets::rb87().mean_mass();
    let mut worst = 0.0_f64;
    for v in [0.5, 2.0, 3.0] {
        let g = gaussian_profile(v)?;
        let d = transfer::decompose(&g, 512)?;
        for e in [0.3, 1.0, 2.0] {
            let full = transfer::transfer_matrix(&d, e * g.peak_height(), m)?;
            worst = worst.max(full.log_abs_determinant().abs());
        }
    }
    Ok(worst)
}

/// Relative jump of the delay and momentum coefficient across `E = 1`,
/// including both edges of the series guard band.
pub fn barrier_height_continuity() -> Result<f64> {
    let offsets = [1e-12, 1e-10, 1e-8, 0.999 * GUARD_BAND, 1.001 * GUARD_BAND, 1e-6];
    let mut worst = 0.0_f64;
    for v in [0.5, 1.5, 4.0, 6.0, 10.0] {
        let at = pt(1.0, v)?;
        let (tau0, phi0) = (rect::scaled_tunneling_time(at), rect::phi_p(at));
        for d in offsets {
            for e in [1.0 - d, 1.0 + d] {
                let p = pt(e, v)?;
                worst = worst
                    .max((rect::scaled_tunneling_time(p) / tau0 - 1.0).abs())
                    .max((rect::phi_p(p) - phi0).abs() / phi0.abs().max(1.0));
            }
        }
    }
    Ok(worst)
}

/// Packets with `delta_p / p0 = 1e-4` against momentum eigenstates.
pub fn eigenstate_recovery() -> Result<f64> {
    let rb = presets::rb87();
    let v0 = presets::rb_gaussian_height();
    let mut worst = 0.0_f64;
    for (e, v) in [(1.4, 4.0), (0.7, 2.0), (2.0, 1.0)] {
        let point = pt(e, v)?;
        let (p, a) = from_dimensionless(point, v0, &rb, ShapeKind::Rectangular)?;
        let solver = BarrierSolver::new(BarrierProfile::rectangular(v0, a)?, rb.clone())?;
        let dist = MomentumDistribution::gaussian(p, 1e-4 * p)?;
        let n = wavepacket::transmitted_number(&dist, &solver)?;
        let tau = wavepacket::packet_tunneling_time(&dist, &solver)?;
        let dt = wavepacket::packet_time_dilation(&dist, &solver, 1.0)?;
        worst = worst
            .max((n / rect::mean_transmission(point) - 1.0).abs())
            .max((tau / rect::tunneling_time(point, &rb) - 1.0).abs())
            .max((dt / crate::clock::time_dilation(p, 1.0, &rb)? - 1.0).abs());
    }
    Ok(worst)
}

/// Differential phase against the tunnel term; shared terms must cancel
/// exactly, so any non-zero residue counts as failure.
pub fn differential_cancellation() -> Result<f64> {
    let yb = presets::yb174();
    let none = PerturbationSet::none();
    let laser = LaserPhase::Linear {
        offset: 0.4,
        detuning: 3.0,
    };
    let mut worst = 0.0_f64;
    for (e, v) in [(1.4, 4.0), (0.6, 2.0), (3.0, 1.0)] {
        for t in [0.0, 1e-3, 0.7] {
            let point = pt(e, v)?;
            let p = presets::yb_momentum();
            let tunnel = phase_budget_with_laser(point, p, t, &yb, &none, 0.0, &laser)?;
            let reference = reference_budget_with_laser(-p, t, &yb, &none, &laser)?;
            let d = differential_phase(&tunnel, &reference)?;
            worst = worst.max((d - tunnel.tunnel).abs());
        }
    }
    Ok(worst)
}

/// Left versus right incidence on an asymmetric tabulated profile.
pub fn reciprocity() -> Result<f64> {
    let v0 = presets::rb_gaussian_height();
    let samples = vec![
        (0.0, 0.0),
        (0.3e-6, 0.8 * v0),
        (0.5e-6, v0),
        (1.4e-6, 0.3 * v0),
        (2.5e-6, 0.0),
    ];
    let profile = BarrierProfile::tabulated(samples)?;
    let m = presets::rb87().mean_mass();
    let d = transfer::decompose(&profile, 800)?;
    let mut worst = 0.0_f64;
    for e in [0.2, 0.9, 1.1, 2.0] {
        let a = transfer::amplitude(&d, e * v0, m)?.transmission;
        let b = transfer::amplitude(&d.mirrored(), e * v0, m)?.transmission;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

/// Single-slab transfer matrix against the closed form, `|t|` relative and
/// phase absolute.
pub fn single_slab_oracle(n: usize) -> Result<f64> {
    let rb = presets::rb87();
    let v0 = presets::rb_gaussian_height();
    let mut worst = 0.0_f64;
    for e in grid(0.05, 3.0, n) {
        for v in grid(0.1, 8.0, n) {
            let point = pt(e, v)?;
            let (p, a) = from_dimensionless(point, v0, &rb, ShapeKind::Rectangular)?;
            let d = transfer::decompose(&BarrierProfile::rectangular(v0, a)?, 1)?;
            let m = rb.mean_mass();
            let tm = transfer::amplitude(&d, p * p / (2.0 * m), m)?;
            let cf = rect::amplitude(point);
            let dn = (tm.t.norm() / cf.t.norm() - 1.0).abs();
            let dphi = (tm.t * cf.t.conj()).arg().abs();
            worst = worst.max(dn).max(dphi);
        }
    }
    Ok(worst)
}

/// Largest value of the mass coefficient on the scan grid; must be negative.
pub fn mass_coefficient_sign() -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for e in grid(0.01, 10.0, 120) {
        for v in grid(0.05, 10.0, 120) {
            worst = worst.max(rect::phi_m(pt(e, v)?));
        }
    }
    Ok(worst)
}

/// All invariants with their tolerances.
pub fn run_invariants() -> ValidationReport {
    let sign = check("mass coefficient negative (max value)", -f64::MIN_POSITIVE, mass_coefficient_sign);
    let checks = vec![
        check("closed-form unitarity", 1e-12, closed_form_unitarity),
        check("transfer-matrix unitarity", 1e-10, transfer_unitarity),
        check("transfer-matrix unit determinant", 1e-10, unit_determinant),
        check("continuity at barrier height", 1e-4, barrier_height_continuity),
        check("packet eigenstate recovery", 1e-6, eigenstate_recovery),
        check("differential-phase cancellation", 0.0, differential_cancellation),
        check("reciprocity", 1e-10, reciprocity),
        check("single-slab oracle", 1e-12, || single_slab_oracle(20)),
        sign,
    ];
    ValidationReport { checks }
}
