use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use tunclock_core::clock::{self, phase_budget, reference_budget, PerturbationSet};
use tunclock_core::design::{self, boosted_budget, runs_to_resolve_with_contrast, BoostedBudget, RunBudget, WorkingPoint};
use tunclock_core::error::Error;
use tunclock_core::solver::BarrierSolver;
use tunclock_core::units::HBAR;
use tunclock_core::validation::{self, ValidationReport};
use tunclock_core::wavepacket::{self, MomentumDistribution};
use tunclock_core::{rect, ClockSpecies, DimensionlessPoint, PhaseBudget};

use crate::config::{BarrierShape, Config, Format, Quantity};
use crate::output::{sink, write_json, Table};

fn point(e: f64, v: f64) -> Result<DimensionlessPoint> {
    Ok(DimensionlessPoint::new(e, v)?)
}

/// Solver for the configured barrier at opacity `v_bar` (ignored for
/// tabulated profiles, whose opacity is fixed by the samples).
fn solver_at(cfg: &Config, species: &ClockSpecies, shape: BarrierShape, v_bar: f64) -> Result<BarrierSolver> {
    let mut c = cfg.clone();
    c.barrier.shape = shape;
    if shape != BarrierShape::Tabulated {
        c.barrier.v_bar = Some(v_bar);
    }
    let profile = c.barrier(species)?;
    Ok(BarrierSolver::with_tolerance(profile, species.clone(), cfg.numerics.rel_tol)?)
}

fn momentum(solver: &BarrierSolver, e_bar: f64) -> f64 {
    (2.0 * solver.species().mean_mass() * solver.profile().peak_height() * e_bar).sqrt()
}

/// `(e_star, tau_max)` of the delay along one opacity.
fn ridge(cfg: &Config, solver: &BarrierSolver) -> Result<(f64, f64)> {
    let points = if solver.profile().is_rectangular() {
        cfg.numerics.scan_points
    } else {
        cfg.numerics.profile_scan_points
    };
    Ok(design::max_tunneling_time_of(solver.profile(), solver.species(), points, cfg.numerics.rel_tol)?)
}

fn columns(q: Quantity, ridge: bool) -> Vec<&'static str> {
    let mut c = match q {
        Quantity::Transmission => vec!["eBar", "vBar", "T"],
        Quantity::TunnelingTime => vec!["eBar", "vBar", "T", "omega_tau"],
        Quantity::Phase => vec!["eBar", "vBar", "phase", "phi_m", "phi_v", "phi_p"],
        Quantity::PacketTau => vec!["eBar", "vBar", "tau_s", "packet_tau_s", "transmitted"],
        Quantity::Budget => vec!["eBar", "vBar", "T", "tunnel_phase", "runs_required"],
        Quantity::Compare => vec!["eBar", "vBar", "T_rect", "T_gauss", "omega_tau_rect", "omega_tau_gauss"],
    };
    if ridge {
        c.push("ridge_eBar");
    }
    c
}

/// One row of a scan. Every entry is computed by the core crate; this only
/// arranges it.
fn row(cfg: &Config, q: Quantity, solver: &BarrierSolver, other: Option<&BarrierSolver>, e: f64) -> Result<Vec<f64>> {
    let species = solver.species();
    let w = species.mean_frequency();
    let v = solver.opacity();
    let p = momentum(solver, e);
    Ok(match q {
        Quantity::Transmission => vec![e, v, solver.transmission(p)?],
        Quantity::TunnelingTime => vec![e, v, solver.transmission(p)?, w * solver.tunneling_time(p)?],
        Quantity::Phase => {
            if !solver.profile().is_rectangular() {
                bail!("the phase scan needs a rectangular barrier");
            }
            let pt = point(e, v)?;
            let c = rect::expansion_coefficients(pt);
            vec![e, v, rect::phase(pt), c.phi_m, c.phi_v, c.phi_p]
        }
        Quantity::PacketTau => {
            let packet = MomentumDistribution::gaussian(p, cfg.packet.delta_p_rel * p)?;
            vec![
                e,
                v,
                solver.tunneling_time(p)?,
                wavepacket::packet_tunneling_time(&packet, solver)?,
                wavepacket::transmitted_number(&packet, solver)?,
            ]
        }
        Quantity::Budget => {
            let phase = solver.tunneling_time(p)? * species.clock_frequency();
            let b = &cfg.budget;
            let runs = match runs_to_resolve_with_contrast(phase, b.atoms_per_run, b.contrast) {
                Ok(r) => r.runs_required as f64,
                Err(Error::RunCountOverflow { required }) => required,
                Err(e) => return Err(e.into()),
            };
            vec![e, v, solver.transmission(p)?, phase, runs]
        }
        Quantity::Compare => {
            let g = other.expect("compare scans carry both solvers");
            let pg = momentum(g, e);
            vec![
                e,
                v,
                solver.transmission(p)?,
                g.transmission(pg)?,
                w * solver.tunneling_time(p)?,
                w * g.tunneling_time(pg)?,
            ]
        }
    })
}

pub fn scan(cfg: &Config, quantity: Option<Quantity>) -> Result<Table> {
    let species = cfg.species()?;
    let q = quantity.unwrap_or(cfg.scan.quantity);
    let shape = cfg.barrier.shape;
    if q == Quantity::Compare && shape == BarrierShape::Tabulated {
        bail!("compare scans pair a rectangle with a Gaussian; a tabulated barrier has no partner");
    }
    let opacities = if shape == BarrierShape::Tabulated {
        vec![f64::NAN]
    } else {
        cfg.v_grid()
    };
    let energies = cfg.e_grid();

    // Per-opacity setup (solvers and ridge) first, then the full grid.
    let lines: Vec<(BarrierSolver, Option<BarrierSolver>, Option<f64>)> = opacities
        .par_iter()
        .map(|&v| {
            let (first, second) = if q == Quantity::Compare {
                (BarrierShape::Rectangular, Some(BarrierShape::Gaussian))
            } else {
                (shape, None)
            };
            let s = solver_at(cfg, &species, first, v)?;
            let g = second.map(|sh| solver_at(cfg, &species, sh, v)).transpose()?;
            let r = if cfg.scan.ridge {
                Some(ridge(cfg, &s).with_context(|| format!("ridge at vBar = {}", s.opacity()))?.0)
            } else {
                None
            };
            Ok((s, g, r))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, f64)> = (0..lines.len())
        .flat_map(|i| energies.iter().map(move |&e| (i, e)))
        .collect();
    let rows: Vec<Result<Vec<f64>>> = cells
        .par_iter()
        .map(|&(i, e)| {
            let (s, g, r) = &lines[i];
            let mut values = row(cfg, q, s, g.as_ref(), e)
                .with_context(|| format!("at eBar = {e}, vBar = {}", s.opacity()))?;
            values.extend(r.iter());
            Ok(values)
        })
        .collect();

    let mut table = Table::new(columns(q, cfg.scan.ridge));
    for (values, &(i, e)) in rows.into_iter().zip(&cells) {
        table.push(values?, || format!("eBar = {e}, vBar = {}", lines[i].0.opacity()))?;
    }
    Ok(table)
}

#[derive(Debug, Serialize)]
pub struct WorkingPointReport {
    pub species: String,
    pub working_point: WorkingPoint,
    pub omega_tau: f64,
    pub clock_phase: f64,
    pub phi_m: f64,
    pub phi_v: f64,
    pub phi_p: f64,
    /// Largest delay along the same opacity.
    pub ridge_e_bar: f64,
    pub ridge_tau: f64,
}

fn incident_momentum(cfg: &Config) -> Result<f64> {
    let k = cfg.budget.wavenumber;
    if !(k > 0.0 && k.is_finite()) {
        bail!("budget.wavenumber must be positive, got {k}");
    }
    Ok(HBAR * k)
}

pub fn working_point(cfg: &Config) -> Result<WorkingPointReport> {
    let species = cfg.species()?;
    let pt = point(cfg.budget.e_bar, cfg.budget.v_bar)?;
    let wp = WorkingPoint::new(pt, &species, incident_momentum(cfg)?, cfg.packet.delta_p_rel)?;
    let c = rect::expansion_coefficients(pt);
    let (ridge_e_bar, ridge_tau) = design::max_tunneling_time(pt.v_bar(), &species)?;
    Ok(WorkingPointReport {
        species: species.name().to_owned(),
        omega_tau: rect::scaled_tunneling_time(pt),
        clock_phase: wp.tau * species.clock_frequency(),
        phi_m: c.phi_m,
        phi_v: c.phi_v,
        phi_p: c.phi_p,
        ridge_e_bar,
        ridge_tau,
        working_point: wp,
    })
}

#[derive(Debug, Serialize)]
pub struct LarmorReport {
    pub barrier_j: f64,
    pub frequency: f64,
    /// Larmor phase over mass-defect tunneling phase.
    pub ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct BudgetReport {
    pub working_point: WorkingPointReport,
    pub tunnel_arm: PhaseBudget,
    pub reference_arm: PhaseBudget,
    pub differential_phase: f64,
    /// `None` when the count overflows; `runs_required` still holds it.
    pub runs: Option<RunBudget>,
    pub runs_required: f64,
    pub atoms_per_run: f64,
    /// Absent when no height shift is configured.
    pub boosted: Option<BoostedBudget>,
    pub larmor: Option<LarmorReport>,
}

pub fn budget(cfg: &Config) -> Result<BudgetReport> {
    let species = cfg.species()?;
    let wp = working_point(cfg)?;
    let w = &wp.working_point;
    let b = &cfg.budget;
    let per = &cfg.perturbations;
    let per = PerturbationSet::new(per.mass_rel, per.momentum_rel, per.barrier_rel)?;
    let larmor_freq = per.barrier_rel() * w.barrier_height / HBAR;
    let tunnel = phase_budget(w.point(), w.momentum, b.lab_time_s, &species, &per, larmor_freq)?;
    let reference = reference_budget(-w.momentum, b.lab_time_s, &species, &per)?;
    let diff = design::differential_phase(&tunnel, &reference)?;
    let (runs, runs_required) = match runs_to_resolve_with_contrast(diff, b.atoms_per_run, b.contrast) {
        Ok(r) => (Some(r.clone()), r.runs_required as f64),
        Err(Error::RunCountOverflow { required }) => (None, required),
        Err(e) => return Err(e.into()),
    };
    let boosted = if b.shift_hbar_per_s != 0.0 {
        Some(boosted_budget(w, &species, b.shift_hbar_per_s * HBAR, b.atoms_per_run)?)
    } else {
        None
    };
    let larmor = cfg
        .larmor
        .as_ref()
        .map(|l| {
            let frequency = std::f64::consts::TAU * l.frequency_hz;
            clock::larmor_ratio(&species, l.barrier_j, frequency).map(|ratio| LarmorReport {
                barrier_j: l.barrier_j,
                frequency,
                ratio,
            })
        })
        .transpose()?;
    Ok(BudgetReport {
        working_point: wp,
        tunnel_arm: tunnel,
        reference_arm: reference,
        differential_phase: diff,
        runs,
        runs_required,
        atoms_per_run: b.atoms_per_run,
        boosted,
        larmor,
    })
}

pub fn validate(preset: &str) -> Result<ValidationReport> {
    if !matches!(preset, "yb174" | "rb87") {
        bail!("unknown preset `{preset}` (expected yb174 or rb87)");
    }
    Ok(validation::run_invariants())
}

// Text reports and key/value tables for the single-point commands.

pub fn working_point_pairs(r: &WorkingPointReport) -> Vec<(&'static str, f64)> {
    let w = &r.working_point;
    vec![
        ("eBar", w.e_bar),
        ("vBar", w.v_bar),
        ("T", w.t_bar),
        ("omega_tau", r.omega_tau),
        ("tau_s", w.tau),
        ("clock_phase", r.clock_phase),
        ("flatness", w.flatness),
        ("momentum", w.momentum),
        ("barrier_height_j", w.barrier_height),
        ("phi_m", r.phi_m),
        ("phi_v", r.phi_v),
        ("phi_p", r.phi_p),
        ("ridge_eBar", r.ridge_e_bar),
        ("ridge_tau_s", r.ridge_tau),
    ]
}

pub fn budget_pairs(r: &BudgetReport) -> Vec<(&'static str, f64)> {
    let t = &r.tunnel_arm;
    let mut v = working_point_pairs(&r.working_point);
    v.extend([
        ("lab_time_s", t.lab_time),
        ("clock", t.clock),
        ("dilation", t.dilation),
        ("tunnel", t.tunnel),
        ("larmor", t.larmor),
        ("doppler", t.doppler),
        ("reference_doppler", r.reference_arm.doppler),
        ("differential_phase", r.differential_phase),
        ("atoms_per_run", r.atoms_per_run),
        ("runs_required", r.runs_required),
    ]);
    if let Some(b) = &r.boosted {
        v.extend([
            ("boost", b.boost),
            ("boosted_phase", b.phase),
            ("boosted_runs_required", b.runs.runs_required as f64),
        ]);
    }
    if let Some(l) = &r.larmor {
        v.push(("larmor_ratio", l.ratio));
    }
    v
}

pub fn pairs_table(pairs: &[(&'static str, f64)]) -> Result<Table> {
    let mut t = Table::new(pairs.iter().map(|p| p.0).collect());
    t.push(pairs.iter().map(|p| p.1).collect(), || "the working point".into())?;
    Ok(t)
}

pub fn print_pairs(title: &str, pairs: &[(&'static str, f64)]) {
    println!("{title}");
    for (k, v) in pairs {
        println!("  {k:<24} {:.6e}", v + 0.0);
    }
}

/// Writes a single-point result: the table as CSV, or `json` verbatim.
pub fn emit(out: Option<&Path>, format: Format, table: &Table, json: &impl Serialize) -> Result<()> {
    let Some(path) = out else { return Ok(()) };
    let w = sink(Some(path))?;
    match format {
        Format::Csv => table.write(w, Format::Csv),
        Format::Json => write_json(w, json),
    }
}
