//! Run configuration: one TOML file per run, every numeric default visible.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tunclock_core::barrier::{solve_gaussian_width, BarrierProfile};
use tunclock_core::units::{nanokelvin, HBAR};
use tunclock_core::{presets, rect, transfer, wavepacket, ClockSpecies};

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub species: SpeciesConfig,
    pub barrier: BarrierConfig,
    pub grid: GridConfig,
    pub scan: ScanConfig,
    pub packet: PacketConfig,
    pub perturbations: PerturbationConfig,
    pub budget: BudgetConfig,
    pub larmor: Option<LarmorConfig>,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpeciesConfig {
    /// `yb174`, `rb87` or `custom`.
    pub preset: String,
    pub name: Option<String>,
    pub mass_u: Option<f64>,
    pub clock_hz: Option<f64>,
    /// Overrides the mass when given.
    pub mean_frequency_hz: Option<f64>,
}

impl Default for SpeciesConfig {
    fn default() -> Self {
        Self {
            preset: "yb174".into(),
            name: None,
            mass_u: None,
            clock_hz: None,
            mean_frequency_hz: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BarrierShape {
    Rectangular,
    Gaussian,
    Tabulated,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BarrierConfig {
    pub shape: BarrierShape,
    /// Peak height in J; `height_nk` gives it as a temperature instead.
    pub height_j: Option<f64>,
    pub height_nk: Option<f64>,
    pub width_m: Option<f64>,
    pub sigma_m: Option<f64>,
    /// Opacity to match; sets the width or sigma from the height.
    pub v_bar: Option<f64>,
    /// `[x (m), V (J)]` pairs.
    pub samples: Option<Vec<[f64; 2]>>,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        Self {
            shape: BarrierShape::Rectangular,
            height_j: None,
            height_nk: Some(200.0),
            width_m: None,
            sigma_m: None,
            v_bar: None,
            samples: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub e_min: f64,
    pub e_max: f64,
    pub e_count: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub v_count: usize,
    pub spacing: Spacing,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            e_min: 0.1,
            e_max: 3.0,
            e_count: 200,
            v_min: 0.5,
            v_max: 6.0,
            v_count: 200,
            spacing: Spacing::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Transmission,
    TunnelingTime,
    Phase,
    PacketTau,
    Budget,
    /// Rectangle and Gaussian of equal opacity side by side.
    Compare,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub quantity: Quantity,
    /// Add the per-opacity argmax of the delay as a column.
    pub ridge: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            quantity: Quantity::TunnelingTime,
            ridge: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacketConfig {
    /// `delta_p / p0`
    pub delta_p_rel: f64,
    pub rel_tol: f64,
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self {
            delta_p_rel: 0.01,
            rel_tol: wavepacket::PACKET_REL_TOL,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerturbationConfig {
    pub mass_rel: f64,
    pub momentum_rel: f64,
    pub barrier_rel: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub e_bar: f64,
    pub v_bar: f64,
    /// Incident momentum as a wavenumber (1/m); `hbar * k`.
    pub wavenumber: f64,
    pub lab_time_s: f64,
    pub atoms_per_run: f64,
    pub contrast: f64,
    /// State-dependent height shift for the boosted budget, as `hbar * f`
    /// with `f` in 1/s.
    pub shift_hbar_per_s: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        let (e_bar, v_bar) = presets::YB_WORKING_POINT;
        Self {
            e_bar,
            v_bar,
            wavenumber: presets::YB_RECOIL_WAVENUMBER,
            lab_time_s: 0.0,
            atoms_per_run: presets::YB_ATOMS_PER_RUN,
            contrast: 1.0,
            shift_hbar_per_s: presets::YB_BARRIER_SHIFT / HBAR,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LarmorConfig {
    /// Mean barrier height (J).
    pub barrier_j: f64,
    pub frequency_hz: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Slab refinement tolerance.
    pub rel_tol: f64,
    pub initial_slabs: usize,
    pub max_slabs: usize,
    pub edge_guard: f64,
    pub series_guard_band: f64,
    pub fd_step: f64,
    pub mass_step: f64,
    /// Coarse points of the delay maximization.
    pub scan_points: usize,
    /// Coarse points for non-rectangular profiles, where each point costs a
    /// slab refinement.
    pub profile_scan_points: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            rel_tol: transfer::DEFAULT_REL_TOL,
            initial_slabs: transfer::INITIAL_SLABS,
            max_slabs: transfer::MAX_SLABS,
            edge_guard: transfer::EDGE_GUARD,
            series_guard_band: rect::GUARD_BAND,
            fd_step: rect::FD_STEP,
            mass_step: transfer::MASS_STEP,
            scan_points: tunclock_core::design::SCAN_POINTS,
            profile_scan_points: 128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: None,
            format: Format::Csv,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Config = toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Checks the numerics block against the values compiled into the core
    /// crate; they are reported, not tunable per run.
    pub fn check(&self) -> Result<()> {
        let n = &self.numerics;
        let d = NumericsConfig::default();
        let fixed = [
            ("initial_slabs", n.initial_slabs as f64, d.initial_slabs as f64),
            ("max_slabs", n.max_slabs as f64, d.max_slabs as f64),
            ("edge_guard", n.edge_guard, d.edge_guard),
            ("series_guard_band", n.series_guard_band, d.series_guard_band),
            ("fd_step", n.fd_step, d.fd_step),
            ("mass_step", n.mass_step, d.mass_step),
        ];
        for (key, got, want) in fixed {
            if got != want {
                bail!("numerics.{key} = {got:e} differs from the built-in value {want:e}; it is listed for inspection only");
            }
        }
        if !(n.rel_tol > 0.0 && n.rel_tol <= 1e-2) {
            bail!("numerics.rel_tol must lie in (0, 1e-2], got {}", n.rel_tol);
        }
        if n.scan_points < 3 || n.profile_scan_points < 3 {
            bail!("numerics scan points must be at least 3");
        }
        let g = &self.grid;
        if g.e_count < 2 || g.v_count < 1 {
            bail!("grid.e_count must be >= 2 and grid.v_count >= 1");
        }
        if !(g.e_min > 0.0 && g.e_max > g.e_min) {
            bail!("grid energy range must be positive and ordered: [{}, {}]", g.e_min, g.e_max);
        }
        if !(g.v_min > 0.0 && g.v_max >= g.v_min) {
            bail!("grid opacity range must be positive and ordered: [{}, {}]", g.v_min, g.v_max);
        }
        Ok(())
    }

    pub fn species(&self) -> Result<ClockSpecies> {
        let s = &self.species;
        let species = match s.preset.as_str() {
            "yb174" => presets::yb174(),
            "rb87" => presets::rb87(),
            "custom" => {
                let name = s.name.clone().unwrap_or_else(|| "custom".into());
                let clock = s.clock_hz.context("species.clock_hz is required for a custom species")?;
                let tau = std::f64::consts::TAU;
                match (s.mean_frequency_hz, s.mass_u) {
                    (Some(f), _) => ClockSpecies::from_mean_frequency(name, tau * f, tau * clock)?,
                    (None, Some(m)) => ClockSpecies::from_mass_u_hz(name, m, clock)?,
                    (None, None) => bail!("species needs mass_u or mean_frequency_hz"),
                }
            }
            other => bail!("unknown species preset `{other}` (expected yb174, rb87 or custom)"),
        };
        Ok(species)
    }

    pub fn barrier_height(&self) -> Result<f64> {
        match (self.barrier.height_j, self.barrier.height_nk) {
            (Some(h), _) => Ok(h),
            (None, Some(t)) => Ok(nanokelvin(t)),
            (None, None) => bail!("barrier needs height_j or height_nk"),
        }
    }

    /// Physical barrier; `v_bar` overrides the explicit width.
    pub fn barrier(&self, species: &ClockSpecies) -> Result<BarrierProfile> {
        let b = &self.barrier;
        let profile = match b.shape {
            BarrierShape::Rectangular => {
                let h = self.barrier_height()?;
                let width = match (b.v_bar, b.width_m) {
                    (Some(v), _) => v * HBAR / (2.0 * species.mean_mass() * h).sqrt(),
                    (None, Some(w)) => w,
                    (None, None) => bail!("rectangular barrier needs width_m or v_bar"),
                };
                BarrierProfile::rectangular(h, width)?
            }
            BarrierShape::Gaussian => {
                let h = self.barrier_height()?;
                let sigma = match (b.v_bar, b.sigma_m) {
                    (Some(v), _) => solve_gaussian_width(v, h, species)?,
                    (None, Some(s)) => s,
                    (None, None) => bail!("gaussian barrier needs sigma_m or v_bar"),
                };
                BarrierProfile::gaussian(h, sigma)?
            }
            BarrierShape::Tabulated => {
                let samples = b.samples.as_ref().context("tabulated barrier needs samples")?;
                BarrierProfile::tabulated(samples.iter().map(|s| (s[0], s[1])).collect())?
            }
        };
        Ok(profile)
    }

    pub fn e_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        axis(g.e_min, g.e_max, g.e_count, g.spacing)
    }

    pub fn v_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        if g.v_count == 1 {
            return vec![g.v_min];
        }
        axis(g.v_min, g.v_max, g.v_count, g.spacing)
    }
}

fn axis(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    let f = |i: usize| i as f64 / (n - 1) as f64;
    match spacing {
        Spacing::Linear => (0..n).map(|i| lo + (hi - lo) * f(i)).collect(),
        Spacing::Log => (0..n).map(|i| lo * (hi / lo).powf(f(i))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = Config::default();
        c.check().unwrap();
        assert_eq!(c.e_grid().len(), 200);
        assert!(c.species().unwrap().name().starts_with("Yb"));
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = toml::from_str::<Config>("[grid]\ne_mni = 1.0\n").unwrap_err().to_string();
        assert!(err.contains("e_mni") && err.contains("line 2"), "{err}");
    }

    #[test]
    fn numerics_are_read_only() {
        let c: Config = toml::from_str("[numerics]\nedge_guard = 1e-6\n").unwrap();
        assert!(c.check().is_err());
    }

    #[test]
    fn matched_opacity_round_trips() {
        let mut c = Config::default();
        c.species.preset = "rb87".into();
        c.barrier.v_bar = Some(4.0);
        let rb = c.species().unwrap();
        for shape in [BarrierShape::Rectangular, BarrierShape::Gaussian] {
            c.barrier.shape = shape;
            let v = c.barrier(&rb).unwrap().opacity(&rb).unwrap();
            assert!((v - 4.0).abs() < 1e-8, "{shape:?}: {v}");
        }
    }

    #[test]
    fn log_axis_hits_ends() {
        let a = axis(1e-3, 10.0, 5, Spacing::Log);
        assert!((a[0] - 1e-3).abs() < 1e-18 && (a[4] - 10.0).abs() < 1e-12);
    }
}
