//! Experiment design: differential phase isolation, working points of large
//! delay and high transmission, and shot-noise run budgets.

use serde::Serialize;

use crate::barrier::BarrierProfile;
use crate::clock::{self, ClockSpecies, PhaseBudget, PERTURBATION_CAP};
use crate::error::{domain, Error, Result};
use crate::optimize::log_scan_max;
use crate::rect;
use crate::transfer;
use crate::units::DimensionlessPoint;

pub const SCAN_POINTS: usize = 512;
pub const SCAN_LO: f64 = 1e-3;
pub const SCAN_HI: f64 = 10.0;
pub const ARGMAX_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkingPoint {
    pub e_bar: f64,
    pub v_bar: f64,
    /// s
    pub tau: f64,
    pub t_bar: f64,
    /// `|dT/dp| * delta_p`
    pub flatness: f64,
    /// Incident momentum (kg m/s).
    pub momentum: f64,
    /// Mean barrier height (J).
    pub barrier_height: f64,
}

impl WorkingPoint {
    /// Rectangular working point at momentum `p` with relative packet width
    /// `delta_p_rel`.
    pub fn new(point: DimensionlessPoint, species: &ClockSpecies, p: f64, delta_p_rel: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return domain(format!("momentum must be positive, got {p}"));
        }
        if !(delta_p_rel >= 0.0) {
            return domain(format!("relative momentum width must be non-negative, got {delta_p_rel}"));
        }
        let coeffs = rect::expansion_coefficients(point);
        Ok(Self {
            e_bar: point.e_bar(),
            v_bar: point.v_bar(),
            tau: rect::tunneling_time(point, species),
            t_bar: rect::mean_transmission(point),
            flatness: coeffs.t_p.abs() * delta_p_rel,
            momentum: p,
            barrier_height: clock::barrier_height(point, p, species),
        })
    }

    pub fn point(&self) -> DimensionlessPoint {
        DimensionlessPoint::new(self.e_bar, self.v_bar).expect("validated at construction")
    }
}

/// Tunnel-arm total minus reference-arm total, summed term by term so that
/// shared terms cancel exactly.
pub fn differential_phase(tunnel: &PhaseBudget, reference: &PhaseBudget) -> Result<f64> {
    if tunnel.lab_time != reference.lab_time {
        return Err(Error::IncompatibleBudgets(format!(
            "lab times differ: {:e} s vs {:e} s",
            tunnel.lab_time, reference.lab_time
        )));
    }
    if tunnel.species != reference.species {
        return Err(Error::IncompatibleBudgets(format!(
            "species differ: {} vs {}",
            tunnel.species, reference.species
        )));
    }
    if tunnel.momentum.abs() != reference.momentum.abs() {
        return Err(Error::IncompatibleBudgets(format!(
            "momenta differ: {:e} vs {:e}",
            tunnel.momentum, reference.momentum
        )));
    }
    Ok((tunnel.clock - reference.clock)
        + (tunnel.dilation - reference.dilation)
        + (tunnel.tunnel - reference.tunnel)
        + (tunnel.larmor - reference.larmor)
        + (tunnel.doppler - reference.doppler)
        + (tunnel.laser - reference.laser))
}

/// Location and size of the largest delay at opacity `v_bar`:
/// `(e_star, tau_max)` with `tau_max` in seconds.
pub fn max_tunneling_time(v_bar: f64, species: &ClockSpecies) -> Result<(f64, f64)> {
    if !(v_bar > 0.0 && v_bar.is_finite()) {
        return domain(format!("opacity must be positive, got {v_bar}"));
    }
    let (e, scaled) = log_scan_max(
        |e| Ok(rect::scaled_tunneling_time(DimensionlessPoint::new(e, v_bar)?)),
        SCAN_LO,
        SCAN_HI,
        SCAN_POINTS,
        ARGMAX_TOL,
    )?;
    Ok((e, scaled / species.mean_frequency()))
}

/// [`max_tunneling_time`] for an arbitrary profile via the transfer matrix;
/// `e_star` is relative to the peak height. `points` sets the coarse scan.
pub fn max_tunneling_time_of(
    profile: &BarrierProfile,
    species: &ClockSpecies,
    points: usize,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if profile.is_rectangular() {
        return max_tunneling_time(profile.opacity(species)?, species);
    }
    log_scan_max(
        |e| transfer::gaussian_tunneling_time(profile, e, species, rel_tol),
        SCAN_LO,
        SCAN_HI,
        points,
        ARGMAX_TOL,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunBudget {
    pub atoms_per_run: f64,
    pub phase: f64,
    pub runs_required: u64,
    pub assumptions: String,
}

/// Shot-noise limited runs: `ceil(1 / (N phase^2))`.
pub fn runs_to_resolve(phase: f64, atoms_per_run: f64) -> Result<RunBudget> {
    runs_to_resolve_with_contrast(phase, atoms_per_run, 1.0)
}

/// As [`runs_to_resolve`] with the sensitivity degraded by `contrast`.
pub fn runs_to_resolve_with_contrast(phase: f64, atoms_per_run: f64, contrast: f64) -> Result<RunBudget> {
    let phase = phase.abs();
    if !(phase > 0.0 && phase.is_finite()) {
        return domain(format!("phase must be non-zero and finite, got {phase}"));
    }
    if !(atoms_per_run >= 1.0) {
        return domain(format!("need at least one atom per run, got {atoms_per_run}"));
    }
    if !(contrast > 0.0 && contrast <= 1.0) {
        return domain(format!("contrast must lie in (0, 1], got {contrast}"));
    }
    let required = (1.0 / (atoms_per_run * phase * phase * contrast * contrast)).ceil().max(1.0);
    if !(required < u64::MAX as f64) {
        return Err(Error::RunCountOverflow { required });
    }
    Ok(RunBudget {
        atoms_per_run,
        phase,
        runs_required: required as u64,
        assumptions: if contrast == 1.0 {
            "shot-noise limited".to_owned()
        } else {
            format!("shot-noise limited, contrast {contrast}")
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoostedBudget {
    /// rad/s
    pub effective_frequency: f64,
    /// `w_eff / dw`
    pub boost: f64,
    /// `tau * w_eff`
    pub phase: f64,
    pub runs: RunBudget,
}

/// Tunneling phase and run count after a state-dependent barrier shift
/// `delta_v` (J) raises the effective clock frequency.
pub fn boosted_budget(
    wp: &WorkingPoint,
    species: &ClockSpecies,
    delta_v: f64,
    atoms_per_run: f64,
) -> Result<BoostedBudget> {
    if !(delta_v.abs() < PERTURBATION_CAP * wp.barrier_height) {
        return Err(Error::PerturbationTooLarge {
            name: "delta_v",
            value: delta_v / wp.barrier_height,
            cap: PERTURBATION_CAP,
        });
    }
    let w_eff = clock::effective_clock_frequency(species, wp.barrier_height, delta_v)?;
    let phase = wp.tau * w_eff;
    Ok(BoostedBudget {
        effective_frequency: w_eff,
        boost: w_eff / species.clock_frequency(),
        phase,
        runs: runs_to_resolve(phase, atoms_per_run)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{phase_budget, reference_budget, PerturbationSet};
    use crate::presets;

    fn yb_point() -> (ClockSpecies, WorkingPoint) {
        let yb = presets::yb174();
        let (e, v) = presets::YB_WORKING_POINT;
        let wp = WorkingPoint::new(DimensionlessPoint::new(e, v).unwrap(), &yb, presets::yb_momentum(), 0.0)
            .unwrap();
        (yb, wp)
    }

    #[test]
    fn identical_budgets_cancel() {
        let (yb, wp) = yb_point();
        let b = reference_budget(wp.momentum, 1e-3, &yb, &PerturbationSet::none()).unwrap();
        assert_eq!(differential_phase(&b, &b).unwrap(), 0.0);
    }

    #[test]
    fn differential_is_tunnel_term() {
        let (yb, wp) = yb_point();
        let none = PerturbationSet::none();
        let t = phase_budget(wp.point(), wp.momentum, 2e-3, &yb, &none, 0.0).unwrap();
        let r = reference_budget(wp.momentum, 2e-3, &yb, &none).unwrap();
        let d = differential_phase(&t, &r).unwrap();
        assert_eq!(d, t.tunnel);
        assert!((d / (yb.clock_frequency() * wp.tau) - 1.0).abs() < 1e-13);
        let other = reference_budget(wp.momentum, 1e-3, &yb, &none).unwrap();
        assert!(differential_phase(&t, &other).is_err());
    }

    #[test]
    fn run_counts() {
        assert_eq!(runs_to_resolve(1.0, 1.0).unwrap().runs_required, 1);
        let r = runs_to_resolve(1e-4, 1e5).unwrap().runs_required;
        assert_eq!(r, 1000);
        assert!(runs_to_resolve(1e-4, 1e5).unwrap().runs_required > runs_to_resolve(2e-4, 1e5).unwrap().runs_required);
        assert!(runs_to_resolve_with_contrast(1e-4, 1e5, 0.5).unwrap().runs_required == 4000);
        assert!(matches!(runs_to_resolve(1e-20, 1.0), Err(Error::RunCountOverflow { .. })));
        assert!(runs_to_resolve(0.0, 1.0).is_err());
    }

    #[test]
    fn boost_is_affine_in_shift() {
        let (yb, wp) = yb_point();
        let b0 = boosted_budget(&wp, &yb, 0.0, 1e5).unwrap();
        assert_eq!(b0.boost, 1.0);
        let b1 = boosted_budget(&wp, &yb, 1e-35, 1e5).unwrap();
        let b2 = boosted_budget(&wp, &yb, 2e-35, 1e5).unwrap();
        assert!(((b2.boost - 1.0) / (b1.boost - 1.0) - 2.0).abs() < 1e-9);
        assert!(boosted_budget(&wp, &yb, wp.barrier_height * 2e-3, 1e5).is_err());
    }

    #[test]
    fn ridge_moves_above_one() {
        let yb = presets::yb174();
        let (e_half, _) = max_tunneling_time(0.5, &yb).unwrap();
        let (e_three, _) = max_tunneling_time(3.0, &yb).unwrap();
        assert!(e_half < 1.0 && e_three > 1.0);
    }
}
