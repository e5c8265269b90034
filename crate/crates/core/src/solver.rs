//! Momentum-resolved transmission and delay of a physical barrier, using the
//! closed forms for rectangles and the transfer matrix for everything else.

use crate::barrier::BarrierProfile;
use crate::clock::ClockSpecies;
use crate::error::{domain, Result};
use crate::rect;
use crate::transfer;
use crate::units::DimensionlessPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSolver {
    profile: BarrierProfile,
    species: ClockSpecies,
    v_bar: f64,
    rel_tol: f64,
}

impl BarrierSolver {
    pub fn new(profile: BarrierProfile, species: ClockSpecies) -> Result<Self> {
        Self::with_tolerance(profile, species, transfer::DEFAULT_REL_TOL)
    }

    /// `rel_tol` is the slab-refinement tolerance for non-rectangular profiles.
    pub fn with_tolerance(profile: BarrierProfile, species: ClockSpecies, rel_tol: f64) -> Result<Self> {
        if !(profile.peak_height() > 0.0) {
            return domain("barrier must have a positive peak height");
        }
        if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
            return domain(format!("relative tolerance must lie in (0, 1e-2], got {rel_tol}"));
        }
        let v_bar = profile.opacity(&species)?;
        Ok(Self {
            profile,
            species,
            v_bar,
            rel_tol,
        })
    }

    pub fn profile(&self) -> &BarrierProfile {
        &self.profile
    }
    pub fn species(&self) -> &ClockSpecies {
        &self.species
    }
    pub fn opacity(&self) -> f64 {
        self.v_bar
    }

    /// Scaled energy of momentum `p` against the peak height.
    pub fn e_bar(&self, p: f64) -> f64 {
        p * p / (2.0 * self.species.mean_mass() * self.profile.peak_height())
    }

    pub fn point(&self, p: f64) -> Result<DimensionlessPoint> {
        DimensionlessPoint::new(self.e_bar(p), self.v_bar)
    }

    /// Mean transmission probability at momentum `p`.
    pub fn transmission(&self, p: f64) -> Result<f64> {
        if self.profile.is_rectangular() {
            return Ok(rect::mean_transmission(self.point(p)?));
        }
        let m = self.species.mean_mass();
        let energy = p * p / (2.0 * m);
        Ok(transfer::adaptive_amplitude(&self.profile, energy, m, self.rel_tol)?
            .solution
            .transmission)
    }

    /// Tunneling delay (s) at momentum `p`.
    pub fn tunneling_time(&self, p: f64) -> Result<f64> {
        if self.profile.is_rectangular() {
            return Ok(rect::tunneling_time(self.point(p)?, &self.species));
        }
        transfer::gaussian_tunneling_time(&self.profile, self.e_bar(p), &self.species, self.rel_tol)
    }

    /// Momenta of the unit-transmission resonances of a rectangle inside
    /// `(lo, hi)`; empty for other shapes.
    pub fn resonance_momenta(&self, lo: f64, hi: f64) -> Vec<f64> {
        if !self.profile.is_rectangular() {
            return Vec::new();
        }
        let scale = 2.0 * self.species.mean_mass() * self.profile.peak_height();
        rect::resonance_energies(self.v_bar, hi * hi / scale)
            .into_iter()
            .map(|e| (e * scale).sqrt())
            .filter(|&p| p > lo && p < hi)
            .collect()
    }
}
