//! Averages over the momentum distribution of a localized clock.
//!
//! All averages are weighted by the transmitted density `T(p) |psi(p)|^2`
//! and normalized by the transmitted number `N_T`.

use std::cell::RefCell;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_breakpoints, QuadEstimate, QuadOptions};
use crate::solver::BarrierSolver;
use crate::units::C;

/// Gaussian tails are cut at this many widths.
pub const TAIL_WIDTHS: f64 = 8.0;
/// Smallest transmitted number that still normalizes an average.
pub const MIN_TRANSMITTED: f64 = 1e-30;
pub const PACKET_REL_TOL: f64 = 1e-8;

/// Momentum density `|psi(p)|^2` on positive momenta, normalized to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MomentumDistribution {
    /// Density with mean `p0` and standard deviation `delta_p`.
    Gaussian { p0: f64, delta_p: f64 },
    /// Piecewise-linear density through `(p, weight)` samples.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl MomentumDistribution {
    pub fn gaussian(p0: f64, delta_p: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0.is_finite()) {
            return domain(format!("center momentum must be positive, got {p0}"));
        }
        if !(delta_p > 0.0 && delta_p.is_finite()) {
            return domain(format!("momentum width must be positive, got {delta_p}"));
        }
        if p0 - TAIL_WIDTHS * delta_p <= 0.0 {
            return domain(format!(
                "packet reaches negative momenta: p0 = {p0:e} < {TAIL_WIDTHS} * delta_p = {:e}",
                TAIL_WIDTHS * delta_p
            ));
        }
        Ok(Self::Gaussian { p0, delta_p })
    }

    /// Tabulated density; weights are rescaled to unit area.
    pub fn tabulated(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return domain("need at least two momentum samples");
        }
        if samples[0].0 <= 0.0 || samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return domain("momenta must be positive and strictly increasing");
        }
        if samples.iter().any(|s| !(s.1 >= 0.0 && s.1.is_finite())) {
            return domain("weights must be finite and non-negative");
        }
        let area: f64 = samples
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum();
        if !(area > 0.0) {
            return domain("weights integrate to zero");
        }
        for s in &mut samples {
            s.1 /= area;
        }
        Ok(Self::Tabulated { samples })
    }

    pub fn density(&self, p: f64) -> f64 {
        match self {
            Self::Gaussian { p0, delta_p } => {
                let z = (p - p0) / delta_p;
                if z.abs() > TAIL_WIDTHS {
                    0.0
                } else {
                    (-0.5 * z * z).exp() / ((2.0 * std::f64::consts::PI).sqrt() * delta_p)
                }
            }
            Self::Tabulated { samples } => {
                let i = samples.partition_point(|s| s.0 <= p);
                if i == 0 || i == samples.len() {
                    return if i == samples.len() && p == samples[i - 1].0 {
                        samples[i - 1].1
                    } else {
                        0.0
                    };
                }
                let ((x0, y0), (x1, y1)) = (samples[i - 1], samples[i]);
                y0 + (y1 - y0) * (p - x0) / (x1 - x0)
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Gaussian { p0, delta_p } => (p0 - TAIL_WIDTHS * delta_p, p0 + TAIL_WIDTHS * delta_p),
            Self::Tabulated { samples } => (samples[0].0, samples[samples.len() - 1].0),
        }
    }

    pub fn center(&self) -> f64 {
        match self {
            Self::Gaussian { p0, .. } => *p0,
            Self::Tabulated { samples } => samples
                .windows(2)
                .map(|w| {
                    let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                    // exact integral of p * linear density
                    (x1 - x0) * (y0 * (2.0 * x0 + x1) + y1 * (x0 + 2.0 * x1)) / 6.0
                })
                .sum(),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Gaussian { p0, delta_p } => (-8..=8).map(|k| p0 + k as f64 * delta_p).collect(),
            Self::Tabulated { samples } => samples.iter().map(|s| s.0).collect(),
        }
    }
}

/// `int T(p) |psi(p)|^2 g(p) dp`, with the rectangle resonances added as
/// breakpoints.
pub fn transmitted_integral<G: Fn(&BarrierSolver, f64) -> Result<f64>>(
    dist: &MomentumDistribution,
    solver: &BarrierSolver,
    g: G,
    rel_tol: f64,
) -> Result<QuadEstimate> {
    let (lo, hi) = dist.support();
    let mut points = dist.breakpoints();
    points.extend(solver.resonance_momenta(lo, hi));
    points.sort_by(f64::total_cmp);
    points.dedup();
    let failure = RefCell::new(None);
    let mut integrand = |p: f64| {
        let w = dist.density(p);
        if w == 0.0 || failure.borrow().is_some() {
            return 0.0;
        }
        match solver.transmission(p).and_then(|t| Ok(t * g(solver, p)?)) {
            Ok(v) => w * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let opts = QuadOptions {
        rel_tol,
        abs_tol: 0.0,
        max_subdivisions: 4000,
    };
    let est = integrate_breakpoints(&mut integrand, &points, opts);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(est),
    }
}

/// `N_T = int T(p) |psi(p)|^2 dp`
pub fn transmitted_number(dist: &MomentumDistribution, solver: &BarrierSolver) -> Result<f64> {
    Ok(transmitted_integral(dist, solver, |_, _| Ok(1.0), PACKET_REL_TOL)?.value)
}

fn normalized<G: Fn(&BarrierSolver, f64) -> Result<f64>>(
    dist: &MomentumDistribution,
    solver: &BarrierSolver,
    g: G,
) -> Result<f64> {
    let n = transmitted_number(dist, solver)?;
    if !(n >= MIN_TRANSMITTED) {
        return Err(Error::DegenerateTransmission(n));
    }
    Ok(transmitted_integral(dist, solver, g, PACKET_REL_TOL)?.value / n)
}

/// Time dilation `(t / 2 N_T) int T |psi|^2 (p / m c)^2 dp` (s).
pub fn packet_time_dilation(dist: &MomentumDistribution, solver: &BarrierSolver, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("lab time must be non-negative, got {t}"));
    }
    let mc = solver.species().mean_mass() * C;
    Ok(0.5 * t * normalized(dist, solver, |_, p| Ok((p / mc).powi(2)))?)
}

/// Transmission-weighted eigenstate tunneling delay (s).
pub fn packet_tunneling_time(dist: &MomentumDistribution, solver: &BarrierSolver) -> Result<f64> {
    normalized(dist, solver, |s, p| s.tunneling_time(p))
}

/// Mean momentum of the transmitted part of the packet.
pub fn transmitted_mean_momentum(dist: &MomentumDistribution, solver: &BarrierSolver) -> Result<f64> {
    normalized(dist, solver, |_, p| Ok(p))
}

/// `|dT/dp|_{p0} * delta_p`; small values mean the transmission factor
/// cancels between the clock states.
pub fn flatness_check(dist: &MomentumDistribution, solver: &BarrierSolver) -> Result<f64> {
    let MomentumDistribution::Gaussian { p0, delta_p } = *dist else {
        return domain("flatness is defined for Gaussian packets");
    };
    let h = 1e-4 * p0;
    let slope = (solver.transmission(p0 + h)? - solver.transmission(p0 - h)?) / (2.0 * h);
    Ok(slope.abs() * delta_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::BarrierProfile;
    use crate::presets;
    use crate::rect;
    use crate::units::{from_dimensionless, DimensionlessPoint, ShapeKind};

    fn rect_solver(e: f64, v: f64) -> (BarrierSolver, f64) {
        let rb = presets::rb87();
        let v0 = presets::rb_gaussian_height();
        let point = DimensionlessPoint::new(e, v).unwrap();
        let (p, a) = from_dimensionless(point, v0, &rb, ShapeKind::Rectangular).unwrap();
        (BarrierSolver::new(BarrierProfile::rectangular(v0, a).unwrap(), rb).unwrap(), p)
    }

    #[test]
    fn gaussian_validation() {
        assert!(MomentumDistribution::gaussian(1.0, 0.2).is_err());
        assert!(MomentumDistribution::gaussian(1.0, 0.1).is_ok());
        assert!(MomentumDistribution::gaussian(-1.0, 0.01).is_err());
    }

    #[test]
    fn tabulated_is_normalized() {
        let d = MomentumDistribution::tabulated(vec![(1.0, 0.0), (2.0, 4.0), (3.0, 0.0)]).unwrap();
        assert!((d.density(2.0) - 1.0).abs() < 1e-15);
        assert!((d.center() - 2.0).abs() < 1e-15);
        assert_eq!(d.density(0.5), 0.0);
        assert!(MomentumDistribution::tabulated(vec![(1.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn narrow_packet_recovers_eigenstate() {
        let (s, p) = rect_solver(1.4, 4.0);
        let d = MomentumDistribution::gaussian(p, 1e-4 * p).unwrap();
        let point = DimensionlessPoint::new(1.4, 4.0).unwrap();
        let n = transmitted_number(&d, &s).unwrap();
        assert!((n / rect::mean_transmission(point) - 1.0).abs() < 1e-6);
        let tau = packet_tunneling_time(&d, &s).unwrap();
        assert!((tau / rect::tunneling_time(point, s.species()) - 1.0).abs() < 1e-6);
        let dt = packet_time_dilation(&d, &s, 1.0).unwrap();
        let eig = crate::clock::time_dilation(p, 1.0, s.species()).unwrap();
        assert!((dt / eig - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wide_packet_is_delayed_less_than_peak() {
        let (s, p) = rect_solver(1.33, 4.0);
        let d = MomentumDistribution::gaussian(p, 0.05 * p).unwrap();
        let tau = packet_tunneling_time(&d, &s).unwrap();
        assert!(tau < s.tunneling_time(p).unwrap());
    }

    #[test]
    fn tunneling_filters_fast_components() {
        let (s, p) = rect_solver(0.5, 3.0);
        let narrow = MomentumDistribution::gaussian(p, 0.02 * p).unwrap();
        let wide = MomentumDistribution::gaussian(p, 0.08 * p).unwrap();
        let m1 = transmitted_mean_momentum(&narrow, &s).unwrap();
        let m2 = transmitted_mean_momentum(&wide, &s).unwrap();
        assert!(m1 > p && m2 > m1);
        let dt = packet_time_dilation(&wide, &s, 1.0).unwrap();
        assert!(dt > crate::clock::time_dilation(p, 1.0, s.species()).unwrap());
    }

    #[test]
    fn flatness_vanishes_high_above_barrier() {
        let (s, p) = rect_solver(50.0, 1.0);
        let d = MomentumDistribution::gaussian(p, 0.01 * p).unwrap();
        assert!(flatness_check(&d, &s).unwrap() < 1e-4);
        let (s, p) = rect_solver(0.9, 4.0);
        let d = MomentumDistribution::gaussian(p, 0.01 * p).unwrap();
        assert!(flatness_check(&d, &s).unwrap() > 1e-3);
    }

    #[test]
    fn opaque_barrier_is_degenerate() {
        let (s, p) = rect_solver(0.01, 2000.0);
        let d = MomentumDistribution::gaussian(p, 1e-3 * p).unwrap();
        assert!(matches!(packet_tunneling_time(&d, &s), Err(Error::DegenerateTransmission(_))));
    }
}
