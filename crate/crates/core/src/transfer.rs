//! Scattering off arbitrary profiles by constant-potential slabs and 2x2
//! transfer-matrix products.
//!
//! In slab `j` the wave is `A exp(i q (x - x_j)) + B exp(-i q (x - x_j))`
//! with `x_j` the left slab edge. Propagation across a slab of width `L` is
//! `diag(exp(i q L), exp(-i q L))`; for evanescent slabs the growing
//! exponential is pulled out into a running log-scale so that only bounded
//! numbers are ever formed.

use num_complex::Complex64;
use serde::Serialize;

use crate::barrier::{BarrierProfile, Shape};
use crate::clock::ClockSpecies;
use crate::error::{domain, Error, Result};
use crate::rect::ScatteringSolution;
use crate::units::HBAR;

/// Relative closeness `|E - V_slab| / V0` below which the slab is treated as
/// sitting `EDGE_GUARD * V0` under the energy.
pub const EDGE_GUARD: f64 = 1e-12;
pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const INITIAL_SLABS: usize = 64;
pub const MAX_SLABS: usize = 1 << 20;
/// Relative mass step of the tunneling-time finite difference.
pub const MASS_STEP: f64 = 1e-6;

const RENORMALIZE_ABOVE: f64 = 1e100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlabDecomposition {
    boundaries: Vec<f64>,
    heights: Vec<f64>,
}

impl SlabDecomposition {
    pub fn new(boundaries: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if heights.is_empty() || boundaries.len() != heights.len() + 1 {
            return domain(format!(
                "{} boundaries cannot bound {} slabs",
                boundaries.len(),
                heights.len()
            ));
        }
        if boundaries.iter().any(|x| !x.is_finite()) || boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return domain("slab boundaries must be finite and strictly increasing");
        }
        if heights.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return domain("slab heights must be finite and non-negative");
        }
        Ok(Self { boundaries, heights })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }
    pub fn count(&self) -> usize {
        self.heights.len()
    }
    pub fn width(&self) -> f64 {
        self.boundaries[self.count()] - self.boundaries[0]
    }
    pub fn peak_height(&self) -> f64 {
        self.heights.iter().copied().fold(0.0, f64::max)
    }

    /// Same slabs in reverse order, left edge kept in place.
    pub fn mirrored(&self) -> Self {
        let (lo, hi) = (self.boundaries[0], self.boundaries[self.count()]);
        Self {
            boundaries: self.boundaries.iter().rev().map(|x| lo + hi - x).collect(),
            heights: self.heights.iter().rev().copied().collect(),
        }
    }
}

/// Midpoint-sampled slabs over the truncated support. Rectangular profiles
/// always give their single exact slab.
pub fn decompose(profile: &BarrierProfile, n_slabs: usize) -> Result<SlabDecomposition> {
    if n_slabs == 0 {
        return domain("need at least one slab");
    }
    if let Shape::Rectangular { height, width } = profile.shape() {
        return SlabDecomposition::new(vec![0.0, *width], vec![*height]);
    }
    let (lo, hi) = profile.support();
    let h = (hi - lo) / n_slabs as f64;
    let mut boundaries: Vec<f64> = (0..=n_slabs).map(|i| lo + h * i as f64).collect();
    boundaries[n_slabs] = hi;
    let heights = boundaries
        .windows(2)
        .map(|w| profile.potential(0.5 * (w[0] + w[1])).max(0.0))
        .collect();
    SlabDecomposition::new(boundaries, heights)
}

/// 2x2 complex matrix mapping `(A, B)` on the left to `(A, B)` on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self {
            m11: one,
            m12: zero,
            m21: zero,
            m22: one,
        }
    }

    /// Matching of value and derivative from wavenumber `q_from` to `q_to`.
    pub fn interface(q_from: Complex64, q_to: Complex64) -> Self {
        let rho = q_from / q_to;
        let plus = 0.5 * (1.0 + rho);
        let minus = 0.5 * (1.0 - rho);
        Self {
            m11: plus,
            m12: minus,
            m21: minus,
            m22: plus,
        }
    }

    /// Propagation over `length` divided by `exp(|Im q| length)`; returns the
    /// matrix and the log of the factor taken out.
    pub fn propagation_scaled(q: Complex64, length: f64) -> (Self, f64) {
        let growth = q.im.abs() * length;
        let phase = Complex64::new(0.0, 1.0) * q * length;
        let zero = Complex64::new(0.0, 0.0);
        (
            Self {
                m11: (phase - growth).exp(),
                m12: zero,
                m21: zero,
                m22: (-phase - growth).exp(),
            },
            growth,
        )
    }

    /// `self * rhs`
    pub fn then_after(&self, rhs: &Self) -> Self {
        Self {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    fn max_norm(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn scale(&self, f: f64) -> Self {
        Self {
            m11: self.m11 * f,
            m12: self.m12 * f,
            m21: self.m21 * f,
            m22: self.m22 * f,
        }
    }
}

/// Transfer matrix `exp(log_scale) * matrix` of a whole decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledTransferMatrix {
    pub matrix: TransferMatrix,
    pub log_scale: f64,
    /// Free wavenumber outside the barrier (1/m).
    pub k: f64,
    /// Wavenumber in the highest slab (1/m).
    pub q_peak: Complex64,
}

impl ScaledTransferMatrix {
    /// `log |det|` of the unscaled product; zero when flux is conserved.
    pub fn log_abs_determinant(&self) -> f64 {
        self.matrix.determinant().norm().ln() + 2.0 * self.log_scale
    }
}

fn wavenumber(diff: f64, mass: f64) -> Complex64 {
    let q = (2.0 * mass * diff.abs()).sqrt() / HBAR;
    if diff >= 0.0 {
        Complex64::new(q, 0.0)
    } else {
        Complex64::new(0.0, q)
    }
}

/// Full product for incident energy `energy` (J) and mass `mass` (kg).
pub fn transfer_matrix(decomp: &SlabDecomposition, energy: f64, mass: f64) -> Result<ScaledTransferMatrix> {
    if !(energy > 0.0 && energy.is_finite()) {
        return domain(format!("energy must be positive, got {energy}"));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return domain(format!("mass must be positive, got {mass}"));
    }
    let guard = EDGE_GUARD * decomp.peak_height();
    let k = wavenumber(energy, mass);
    let mut product = TransferMatrix::identity();
    let mut log_scale = 0.0;
    let mut q_prev = k;
    let mut q_peak = k;
    let peak = decomp.peak_height();
    for (j, &v) in decomp.heights().iter().enumerate() {
        let mut diff = energy - v;
        if diff.abs() < guard {
            diff = guard;
        }
        let q = wavenumber(diff, mass);
        if v == peak {
            q_peak = q;
        }
        let length = decomp.boundaries()[j + 1] - decomp.boundaries()[j];
        let (prop, growth) = TransferMatrix::propagation_scaled(q, length);
        product = prop.then_after(&TransferMatrix::interface(q_prev, q).then_after(&product));
        log_scale += growth;
        let norm = product.max_norm();
        if !(norm < RENORMALIZE_ABOVE && norm > 1.0 / RENORMALIZE_ABOVE) {
            product = product.scale(1.0 / norm);
            log_scale += norm.ln();
        }
        q_prev = q;
    }
    product = TransferMatrix::interface(q_prev, k).then_after(&product);
    Ok(ScaledTransferMatrix {
        matrix: product,
        log_scale,
        k: k.re,
        q_peak,
    })
}

/// Amplitudes for left incidence. `t` is referred to free propagation from
/// the left edge (it carries `exp(-i k W)`), `r` to the left edge itself.
pub fn amplitude(decomp: &SlabDecomposition, energy: f64, mass: f64) -> Result<ScatteringSolution> {
    let full = transfer_matrix(decomp, energy, mass)?;
    let m = full.matrix;
    let kw = full.k * decomp.width();
    // t' = 1 / M22 for the unscaled product.
    let t_edge = Complex64::from_polar((-full.log_scale).exp(), 0.0) / m.m22;
    let t = t_edge * Complex64::from_polar(1.0, -kw);
    let r = -m.m21 / m.m22;
    Ok(ScatteringSolution {
        t,
        r,
        transmission: t.norm_sqr(),
        phase: t_edge.arg() - kw,
        kappa0: full.k,
        kappa1: full.q_peak,
    })
}

/// Converged amplitude together with the slab count that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptiveSolution {
    pub solution: ScatteringSolution,
    pub slabs: usize,
}

fn settled(a: &ScatteringSolution, b: &ScatteringSolution, rel_tol: f64) -> bool {
    let (na, nb) = (a.t.norm(), b.t.norm());
    let dn = (na - nb).abs() <= rel_tol * nb.max(f64::MIN_POSITIVE);
    // Phase change measured modulo 2 pi, against a unit scale.
    let dphi = (a.t * b.t.conj()).arg().abs() <= rel_tol * b.phase.abs().max(1.0);
    dn && dphi
}

/// Doubles the slab count from [`INITIAL_SLABS`] until `|t|` and `arg t`
/// settle to `rel_tol` between refinements.
pub fn adaptive_amplitude(
    profile: &BarrierProfile,
    energy: f64,
    mass: f64,
    rel_tol: f64,
) -> Result<AdaptiveSolution> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
        return domain(format!("relative tolerance must lie in (0, 1e-2], got {rel_tol}"));
    }
    if profile.is_rectangular() {
        let d = decompose(profile, 1)?;
        return Ok(AdaptiveSolution {
            solution: amplitude(&d, energy, mass)?,
            slabs: 1,
        });
    }
    let mut n = INITIAL_SLABS;
    let mut previous = amplitude(&decompose(profile, n)?, energy, mass)?;
    loop {
        n *= 2;
        let current = amplitude(&decompose(profile, n)?, energy, mass)?;
        if settled(&current, &previous, rel_tol) {
            return Ok(AdaptiveSolution {
                solution: current,
                slabs: n,
            });
        }
        if n >= MAX_SLABS {
            return Err(Error::NonConvergence {
                slabs: n,
                last: (current.t.re, current.t.im),
                previous: (previous.t.re, previous.t.im),
            });
        }
        previous = current;
    }
}

/// Tunneling delay (s) of an arbitrary profile at scaled energy `e_bar`
/// (relative to the peak height), from the phase change under a symmetric
/// mass split `m (1 +/- eps/2)` at fixed momentum.
pub fn gaussian_tunneling_time(
    profile: &BarrierProfile,
    e_bar: f64,
    species: &ClockSpecies,
    rel_tol: f64,
) -> Result<f64> {
    tunneling_time_with_step(profile, e_bar, species, rel_tol, MASS_STEP)
}

pub fn tunneling_time_with_step(
    profile: &BarrierProfile,
    e_bar: f64,
    species: &ClockSpecies,
    rel_tol: f64,
    eps: f64,
) -> Result<f64> {
    Ok(mass_phase_coefficient(profile, e_bar, species, rel_tol, eps)?.abs() / species.mean_frequency())
}

/// `d(arg t) / d(ln m)` at fixed momentum by central differences.
pub fn mass_phase_coefficient(
    profile: &BarrierProfile,
    e_bar: f64,
    species: &ClockSpecies,
    rel_tol: f64,
    eps: f64,
) -> Result<f64> {
    if !(e_bar > 0.0 && e_bar.is_finite()) {
        return domain(format!("scaled energy must be positive, got {e_bar}"));
    }
    if !(eps > 0.0 && eps < 1e-2) {
        return domain(format!("mass step must lie in (0, 1e-2), got {eps}"));
    }
    let m = species.mean_mass();
    let v0 = profile.peak_height();
    if !(v0 > 0.0) {
        return domain("profile has no barrier");
    }
    let energy = e_bar * v0;
    let slabs = adaptive_amplitude(profile, energy, m, rel_tol)?.slabs;
    let decomp = decompose(profile, slabs)?;
    // E = p^2 / 2m at fixed p.
    let (up, down) = (1.0 + 0.5 * eps, 1.0 - 0.5 * eps);
    let t_up = amplitude(&decomp, energy / up, m * up)?.t;
    let t_down = amplitude(&decomp, energy / down, m * down)?.t;
    Ok((t_up * t_down.conj()).arg() / eps)
}
