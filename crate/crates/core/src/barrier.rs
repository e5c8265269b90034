//! Barrier profiles, their opacity and the state-dependent height split.
//!
//! Rectangular barriers occupy `[0, a]`, Gaussian barriers are centered on
//! the origin, tabulated barriers are piecewise linear between samples.
//! The height split `delta_v` scales the whole profile: the excited state
//! sees `V(x) (1 + dV/2V0)` and the ground state `V(x) (1 - dV/2V0)`, with
//! `V0` the peak height.

use serde::Serialize;

use crate::clock::ClockSpecies;
use crate::error::{domain, Result};
use crate::quad::{integrate_breakpoints, QuadOptions};
use crate::units::HBAR;

/// `V(x_c)/V0` at the Gaussian truncation radius used for scattering.
pub const GAUSSIAN_TRUNCATION: f64 = 1e-8;

/// `sqrt(V(x)/V0)` at the radius where the opacity integral is cut off.
const OPACITY_CUTOFF: f64 = 1e-17;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Shape {
    Rectangular { height: f64, width: f64 },
    Gaussian { height: f64, sigma: f64 },
    Tabulated { samples: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierProfile {
    shape: Shape,
    delta_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InternalState {
    Ground,
    Excited,
}

impl InternalState {
    /// `+1` for the excited state, `-1` for the ground state.
    pub fn sign(self) -> f64 {
        match self {
            InternalState::Ground => -1.0,
            InternalState::Excited => 1.0,
        }
    }
}

impl BarrierProfile {
    pub fn rectangular(height: f64, width: f64) -> Result<Self> {
        check_positive("barrier height", height)?;
        check_positive("barrier width", width)?;
        Ok(Self {
            shape: Shape::Rectangular { height, width },
            delta_v: 0.0,
        })
    }

    pub fn gaussian(height: f64, sigma: f64) -> Result<Self> {
        check_positive("barrier height", height)?;
        check_positive("gaussian width", sigma)?;
        Ok(Self {
            shape: Shape::Gaussian { height, sigma },
            delta_v: 0.0,
        })
    }

    /// Piecewise-linear profile through `(x, V)` samples. `x` must increase
    /// strictly, `V` must be non-negative and vanish at both ends.
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return domain("tabulated barrier needs at least two samples");
        }
        if samples.iter().any(|&(x, v)| !x.is_finite() || !v.is_finite()) {
            return domain("tabulated barrier has non-finite samples");
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return domain("tabulated barrier positions must increase strictly");
        }
        if let Some(&(x, v)) = samples.iter().find(|s| s.1 < 0.0) {
            return domain(format!("tabulated barrier has negative sample V({x}) = {v}"));
        }
        let peak = samples.iter().fold(0.0_f64, |m, s| m.max(s.1));
        if peak <= 0.0 {
            return domain("tabulated barrier has zero peak height");
        }
        let ends = samples[0].1.max(samples[samples.len() - 1].1);
        if ends > 1e-8 * peak {
            return domain("tabulated barrier must vanish at both ends");
        }
        Ok(Self {
            shape: Shape::Tabulated { samples },
            delta_v: 0.0,
        })
    }

    /// Attach the state-dependent height difference `dV = V_e - V_g` (J).
    pub fn with_delta_v(mut self, delta_v: f64) -> Result<Self> {
        if !delta_v.is_finite() || delta_v.abs() >= 2.0 * self.peak_height() {
            return domain(format!(
                "height split {delta_v:e} J would make a state potential negative"
            ));
        }
        self.delta_v = delta_v;
        Ok(self)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn delta_v(&self) -> f64 {
        self.delta_v
    }

    pub fn is_rectangular(&self) -> bool {
        matches!(self.shape, Shape::Rectangular { .. })
    }

    pub fn peak_height(&self) -> f64 {
        match &self.shape {
            Shape::Rectangular { height, .. } | Shape::Gaussian { height, .. } => *height,
            Shape::Tabulated { samples } => samples.iter().fold(0.0_f64, |m, s| m.max(s.1)),
        }
    }

    /// Mean potential at `x` (J).
    pub fn potential(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Rectangular { height, width } => {
                if (0.0..=*width).contains(&x) {
                    *height
                } else {
                    0.0
                }
            }
            Shape::Gaussian { height, sigma } => height * (-0.5 * (x / sigma).powi(2)).exp(),
            Shape::Tabulated { samples } => interpolate(samples, x),
        }
    }

    /// Interval outside of which the potential is treated as zero in
    /// scattering calculations.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Rectangular { width, .. } => (0.0, *width),
            Shape::Gaussian { sigma, .. } => {
                let xc = sigma * (-2.0 * GAUSSIAN_TRUNCATION.ln()).sqrt();
                (-xc, xc)
            }
            Shape::Tabulated { samples } => (samples[0].0, samples[samples.len() - 1].0),
        }
    }

    /// Copy with every height multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let shape = match &self.shape {
            Shape::Rectangular { height, width } => Shape::Rectangular {
                height: height * factor,
                width: *width,
            },
            Shape::Gaussian { height, sigma } => Shape::Gaussian {
                height: height * factor,
                sigma: *sigma,
            },
            Shape::Tabulated { samples } => Shape::Tabulated {
                samples: samples.iter().map(|&(x, v)| (x, v * factor)).collect(),
            },
        };
        Self {
            shape,
            delta_v: self.delta_v * factor,
        }
    }

    /// Profile mirrored about the center of its support.
    pub fn mirrored(&self) -> Self {
        let shape = match &self.shape {
            Shape::Tabulated { samples } => {
                let (lo, hi) = self.support();
                Shape::Tabulated {
                    samples: samples.iter().rev().map(|&(x, v)| (lo + hi - x, v)).collect(),
                }
            }
            other => other.clone(),
        };
        Self {
            shape,
            delta_v: self.delta_v,
        }
    }

    pub fn state_potential(&self, state: InternalState) -> StatePotential {
        StatePotential {
            base: self.clone(),
            state,
        }
    }

    /// Barrier parameter `int sqrt(2 m V(x)) dx / hbar` for the mean mass.
    ///
    /// Closed forms for rectangular and tabulated profiles, adaptive
    /// quadrature for Gaussians.
    pub fn opacity(&self, species: &ClockSpecies) -> Result<f64> {
        let root_m = (2.0 * species.mean_mass()).sqrt();
        match &self.shape {
            Shape::Rectangular { height, width } => Ok(width * root_m * height.sqrt() / HBAR),
            Shape::Gaussian { .. } => self.opacity_by_quadrature(species),
            Shape::Tabulated { samples } => {
                let total: f64 = samples
                    .windows(2)
                    .map(|w| segment_root_integral(w[1].0 - w[0].0, w[0].1, w[1].1))
                    .sum();
                Ok(total * root_m / HBAR)
            }
        }
    }

    /// The opacity integral evaluated by adaptive quadrature for any shape.
    pub fn opacity_by_quadrature(&self, species: &ClockSpecies) -> Result<f64> {
        let breakpoints: Vec<f64> = match &self.shape {
            Shape::Rectangular { width, .. } => vec![0.0, *width],
            Shape::Gaussian { sigma, .. } => {
                let x = sigma * (-4.0 * OPACITY_CUTOFF.ln()).sqrt();
                vec![-x, 0.0, x]
            }
            Shape::Tabulated { samples } => samples.iter().map(|s| s.0).collect(),
        };
        let peak_root = self.peak_height().sqrt();
        let span = breakpoints[breakpoints.len() - 1] - breakpoints[0];
        let opts = QuadOptions {
            abs_tol: 1e-13 * peak_root * span,
            rel_tol: 1e-13,
            max_subdivisions: 4000,
        };
        let est = integrate_breakpoints(&mut |x| self.potential(x).max(0.0).sqrt(), &breakpoints, opts);
        Ok(est.value * (2.0 * species.mean_mass()).sqrt() / HBAR)
    }
}

/// Potential of one internal state: the mean profile scaled by
/// `1 +/- dV / (2 V0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatePotential {
    base: BarrierProfile,
    state: InternalState,
}

impl StatePotential {
    pub fn scale_factor(&self) -> f64 {
        1.0 + self.state.sign() * self.base.delta_v / (2.0 * self.base.peak_height())
    }

    pub fn peak_height(&self) -> f64 {
        self.base.peak_height() * self.scale_factor()
    }

    pub fn profile(&self) -> BarrierProfile {
        let mut p = self.base.scaled(self.scale_factor());
        p.delta_v = 0.0;
        p
    }
}

/// Gaussian width whose opacity for height `v0` equals `target_v_bar`.
pub fn solve_gaussian_width(target_v_bar: f64, v0: f64, species: &ClockSpecies) -> Result<f64> {
    check_positive("target barrier parameter", target_v_bar)?;
    check_positive("barrier height", v0)?;
    let sigma0 = gaussian_width_closed_form(target_v_bar, v0, species);
    // Opacity is linear in sigma, so one rescaling absorbs the quadrature error.
    let achieved = BarrierProfile::gaussian(v0, sigma0)?.opacity(species)?;
    Ok(sigma0 * target_v_bar / achieved)
}

/// `sigma = V hbar / (2 sqrt(2 pi m V0))`.
pub fn gaussian_width_closed_form(target_v_bar: f64, v0: f64, species: &ClockSpecies) -> f64 {
    target_v_bar * HBAR / (2.0 * (2.0 * std::f64::consts::PI * species.mean_mass() * v0).sqrt())
}

fn check_positive(what: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        domain(format!("{what} must be positive and finite, got {value}"))
    }
}

fn interpolate(samples: &[(f64, f64)], x: f64) -> f64 {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if x <= first.0 || x >= last.0 {
        return 0.0;
    }
    let i = samples.partition_point(|s| s.0 <= x);
    let (x0, v0) = samples[i - 1];
    let (x1, v1) = samples[i];
    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
}

/// `int_0^L sqrt(V(x)) dx` for `V` linear from `va` to `vb`.
fn segment_root_integral(len: f64, va: f64, vb: f64) -> f64 {
    let (ra, rb) = (va.sqrt(), vb.sqrt());
    if ra + rb == 0.0 {
        return 0.0;
    }
    2.0 * len / 3.0 * (va + ra * rb + vb) / (ra + rb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::units::nanokelvin;

    #[test]
    fn gaussian_opacity_matches_closed_form() {
        let rb = presets::rb87();
        let v0 = nanokelvin(200.0);
        let sigma = 3.7e-7;
        let numeric = BarrierProfile::gaussian(v0, sigma).unwrap().opacity(&rb).unwrap();
        let exact = 2.0 * sigma * (2.0 * std::f64::consts::PI * rb.mean_mass() * v0).sqrt() / HBAR;
        assert!((numeric / exact - 1.0).abs() < 1e-9, "{numeric} vs {exact}");
    }

    #[test]
    fn rectangular_quadrature_matches_closed_form() {
        let rb = presets::rb87();
        let b = BarrierProfile::rectangular(nanokelvin(200.0), 2.5e-7).unwrap();
        let closed = b.opacity(&rb).unwrap();
        let quad = b.opacity_by_quadrature(&rb).unwrap();
        assert!((quad / closed - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vanishing_height_vanishing_opacity() {
        let rb = presets::rb87();
        let mut last = f64::INFINITY;
        for k in 1..8 {
            let v = BarrierProfile::rectangular(10f64.powi(-30 - 2 * k), 1e-6)
                .unwrap()
                .opacity(&rb)
                .unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn width_solve_hits_target_and_scales_linearly() {
        let rb = presets::rb87();
        let v0 = nanokelvin(200.0);
        let s4 = solve_gaussian_width(4.0, v0, &rb).unwrap();
        let s8 = solve_gaussian_width(8.0, v0, &rb).unwrap();
        let achieved = BarrierProfile::gaussian(v0, s4).unwrap().opacity(&rb).unwrap();
        assert!((achieved / 4.0 - 1.0).abs() < 1e-10);
        assert!((s8 / s4 - 2.0).abs() < 1e-9);
        let closed = gaussian_width_closed_form(4.0, v0, &rb);
        assert!((s4 / closed - 1.0).abs() < 1e-9);
        let tiny = solve_gaussian_width(1e-9, v0, &rb).unwrap();
        assert!(tiny < 1e-9 * s4);
    }

    #[test]
    fn tabulated_validation() {
        assert!(BarrierProfile::tabulated(vec![(0.0, 0.0), (1.0, -1.0), (2.0, 0.0)]).is_err());
        assert!(BarrierProfile::tabulated(vec![(0.0, 0.0), (0.0, 1.0), (2.0, 0.0)]).is_err());
        assert!(BarrierProfile::tabulated(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(BarrierProfile::tabulated(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).is_ok());
    }

    #[test]
    fn tabulated_opacity_is_additive() {
        let rb = presets::rb87();
        let h = nanokelvin(100.0);
        let left = vec![(0.0, 0.0), (1e-7, h), (3e-7, 0.3 * h), (4e-7, 0.0)];
        let right = vec![(5e-7, 0.0), (6e-7, 2.0 * h), (8e-7, 0.0)];
        let joined: Vec<_> = left.iter().chain(right.iter()).copied().collect();
        let ol = BarrierProfile::tabulated(left).unwrap().opacity(&rb).unwrap();
        let or = BarrierProfile::tabulated(right).unwrap().opacity(&rb).unwrap();
        let b = BarrierProfile::tabulated(joined).unwrap();
        let oj = b.opacity(&rb).unwrap();
        assert!((oj / (ol + or) - 1.0).abs() < 1e-9);
        // Closed-form segments agree with the quadrature route.
        assert!((b.opacity_by_quadrature(&rb).unwrap() / oj - 1.0).abs() < 1e-9);
    }

    #[test]
    fn height_split_preserves_mean_square_opacity() {
        let rb = presets::rb87();
        let v0 = nanokelvin(200.0);
        let split = 1e-6 * v0;
        let b = BarrierProfile::gaussian(v0, 3e-7).unwrap().with_delta_v(split).unwrap();
        let mean = b.opacity(&rb).unwrap();
        let e = b.state_potential(InternalState::Excited).profile().opacity(&rb).unwrap();
        let g = b.state_potential(InternalState::Ground).profile().opacity(&rb).unwrap();
        // Opacity squared is linear in the height, so the average is exact up to rounding.
        let avg = 0.5 * (e * e + g * g);
        assert!((avg / (mean * mean) - 1.0).abs() < 1e-11);
        assert!(e > mean && g < mean);
    }

    #[test]
    fn height_split_must_keep_potentials_non_negative() {
        let b = BarrierProfile::rectangular(1.0, 1.0).unwrap();
        assert!(b.clone().with_delta_v(2.0).is_err());
        assert!(b.clone().with_delta_v(-2.5).is_err());
        let sp = b.with_delta_v(0.5).unwrap().state_potential(InternalState::Ground);
        assert!((sp.peak_height() - 0.75).abs() < 1e-15);
    }
}
