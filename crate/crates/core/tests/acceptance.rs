//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use tunclock_core::barrier::solve_gaussian_width;
use tunclock_core::clock::larmor_ratio;
use tunclock_core::design::{self, boosted_budget, runs_to_resolve, WorkingPoint};
use tunclock_core::error::Result;
use tunclock_core::units::{from_dimensionless, ShapeKind};
use tunclock_core::{presets, rect, transfer, validation};
use tunclock_core::{BarrierProfile, DimensionlessPoint};

type Criterion = (&'static str, f64, fn() -> Result<Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn pt(e: f64, v: f64) -> DimensionlessPoint {
    DimensionlessPoint::new(e, v).unwrap()
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value / target - 1.0).abs() <= rel
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn working_point() -> Result<Outcome> {
    let p = pt(1.4, 4.0);
    let tau = rect::scaled_tunneling_time(p);
    let t = rect::mean_transmission(p);
    Ok(Outcome {
        passed: within(tau, std::f64::consts::PI, 0.05) && t >= 0.95,
        detail: format!("omega*tau = {tau:.6} (target pi +/- 5%), T = {t:.6} (target >= 0.95)"),
    })
}

fn headline_phase() -> Result<Outcome> {
    let yb = presets::yb174();
    let (e, v) = presets::YB_WORKING_POINT;
    let tau = rect::tunneling_time(pt(e, v), &yb);
    let phase = tau * yb.clock_frequency();
    Ok(Outcome {
        passed: within(tau, 1.3e-26, 0.10) && within(phase, 4.2e-11, 0.10),
        detail: format!("tau = {tau:.4e} s (target 1.3e-26 +/- 10%), tau*dw = {phase:.4e} (target 4.2e-11 +/- 10%)"),
    })
}

fn larmor() -> Result<Outcome> {
    let rb = presets::rb87();
    let ratio = larmor_ratio(&rb, presets::RB_LARMOR_BARRIER, presets::RB_LARMOR_FREQUENCY)?;
    Ok(Outcome {
        passed: within(ratio, 3.1e14, 0.05),
        detail: format!("ratio = {ratio:.4e} (target 3.1e14 +/- 5%)"),
    })
}

fn run_budgets() -> Result<Outcome> {
    let yb = presets::yb174();
    let (e, v) = presets::YB_WORKING_POINT;
    let wp = WorkingPoint::new(pt(e, v), &yb, presets::yb_momentum(), 0.0)?;
    let plain = runs_to_resolve(wp.tau * yb.clock_frequency(), presets::YB_ATOMS_PER_RUN)?;
    let boosted = boosted_budget(&wp, &yb, presets::YB_BARRIER_SHIFT, presets::YB_ATOMS_PER_RUN)?;
    let n0 = plain.runs_required as f64;
    let n1 = boosted.runs.runs_required as f64;
    Ok(Outcome {
        passed: (1e15..1e16).contains(&n0)
            && within(boosted.boost, 2e6, 0.5)
            && (1e2..=1e4).contains(&n1),
        detail: format!(
            "unboosted runs = {n0:.3e} (target [1e15, 1e16)), boost = {:.3e} (target 2e6 +/- 50%), \
             boosted phase = {:.3e}, boosted runs = {n1:.3e} (target [1e2, 1e4])",
            boosted.boost, boosted.phase
        ),
    })
}

fn single_slab() -> Result<Outcome> {
    let worst = validation::single_slab_oracle(50)?;
    Ok(Outcome {
        passed: worst <= 1e-12,
        detail: format!("worst |t| / phase deviation on 50x50 grid = {worst:.3e} (target <= 1e-12)"),
    })
}

// Exact phase difference of two states split by `eps` in mass or momentum.
fn split_phase(p: DimensionlessPoint, eps: f64, momentum: bool) -> f64 {
    let (up, down) = (1.0 + 0.5 * eps, 1.0 - 0.5 * eps);
    let (a, b) = if momentum {
        (rect::rescaled(p, 1.0, 1.0, up), rect::rescaled(p, 1.0, 1.0, down))
    } else {
        (rect::rescaled(p, up, 1.0, 1.0), rect::rescaled(p, down, 1.0, 1.0))
    };
    (rect::amplitude(a).t * rect::amplitude(b).t.conj()).arg()
}

fn expansion_oracle() -> Result<Outcome> {
    let points: Vec<_> = [0.2, 0.6, 0.95, 1.05, 1.4, 2.5]
        .iter()
        .flat_map(|&e| [0.7, 2.0, 4.0].map(|v| pt(e, v)))
        .collect();
    let mut worst_fd = 0.0_f64;
    let mut worst_ratio_dev = 0.0_f64;
    for &p in &points {
        for (momentum, closed) in [(false, rect::phi_m(p)), (true, rect::phi_p(p))] {
            let fd = split_phase(p, 1e-6, momentum) / 1e-6;
            worst_fd = worst_fd.max((fd / closed - 1.0).abs());
            // Richardson: halving the step quarters the truncation error.
            let err = |h: f64| split_phase(p, h, momentum) / h - closed;
            let ratio = err(8e-4) / err(4e-4);
            worst_ratio_dev = worst_ratio_dev.max((ratio / 4.0 - 1.0).abs());
        }
    }
    Ok(Outcome {
        passed: worst_fd <= 1e-5 && worst_ratio_dev <= 0.05,
        detail: format!(
            "{} points: worst relative deviation = {worst_fd:.3e} (target <= 1e-5), \
             worst Richardson ratio deviation from 4 = {worst_ratio_dev:.3e} (target <= 5%)",
            points.len()
        ),
    })
}

fn figure_properties() -> Result<Outcome> {
    let rb = presets::rb87();
    // (a)
    let phi_max = validation::mass_coefficient_sign()?;
    let a = phi_max < 0.0;
    // (b)
    let (e_transparent, _) = design::max_tunneling_time(0.5, &rb)?;
    let (e_opaque, _) = design::max_tunneling_time(6.0, &rb)?;
    let b = e_transparent < 1.0 && (e_opaque - 1.0).abs() < 0.05;
    // (c) Gaussian of the same opacity as a V = 4 rectangle.
    let v_bar = 4.0;
    let v0 = presets::rb_gaussian_height();
    let gauss = BarrierProfile::gaussian(v0, solve_gaussian_width(v_bar, v0, &rb)?)?;
    let (e_rect, tau_rect) = design::max_tunneling_time(v_bar, &rb)?;
    let (e_gauss, tau_gauss) = design::max_tunneling_time_of(&gauss, &rb, 128, transfer::DEFAULT_REL_TOL)?;
    let c = tau_gauss < tau_rect && e_gauss < e_rect;
    // (d) above-barrier transmission
    let resonances = rect::resonance_energies(v_bar, 10.0);
    let rect_peak = resonances
        .iter()
        .map(|&e| (rect::mean_transmission(pt(e, v_bar)) - 1.0).abs())
        .fold(0.0, f64::max);
    let m = rb.mean_mass();
    let curve: Vec<f64> = grid(1.0, 10.0, 400)
        .map(|e| transfer::adaptive_amplitude(&gauss, e * v0, m, transfer::DEFAULT_REL_TOL).map(|s| s.solution.transmission))
        .collect::<Result<_>>()?;
    let gauss_peaks = curve
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2] && w[1] >= 1.0 - 1e-9)
        .count();
    let d = !resonances.is_empty() && rect_peak < 1e-12 && gauss_peaks == 0;
    let tag = |ok: bool| if ok { "ok" } else { "FAIL" };
    Ok(Outcome {
        passed: a && b && c && d,
        detail: format!(
            "(a) {} max mass coefficient = {phi_max:.3e}; \
             (b) {} e* = {e_transparent:.4} at V=0.5 (< 1), e* = {e_opaque:.4} at V=6 (|e*-1| < 0.05); \
             (c) {} Gaussian tau_max = {tau_gauss:.4e} s at e* = {e_gauss:.4} vs rectangle {tau_rect:.4e} s at e* = {e_rect:.4}; \
             (d) {} {} rectangle resonances with |T-1| <= {rect_peak:.1e}, {gauss_peaks} Gaussian maxima reaching 1",
            tag(a),
            tag(b),
            tag(c),
            tag(d),
            resonances.len()
        ),
    })
}

fn invariants() -> Result<Outcome> {
    let report = validation::run_invariants();
    let failed: Vec<_> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({:.3e} > {:.1e})", c.name, c.worst, c.tolerance))
        .collect();
    Ok(Outcome {
        passed: report.all_passed(),
        detail: if failed.is_empty() {
            format!("{} invariant checks passed", report.checks.len())
        } else {
            format!("failed: {}", failed.join(", "))
        },
    })
}

fn main() -> ExitCode {
    // Sanity of the scale conversion used throughout.
    let rb = presets::rb87();
    assert!(from_dimensionless(pt(1.0, 1.0), 1e-30, &rb, ShapeKind::Rectangular).is_ok());

    let criteria: [Criterion; 8] = [
        ("working point", 1.0, working_point),
        ("headline phase", 1.0, headline_phase),
        ("Larmor ratio", 1.0, larmor),
        ("run budgets", 1.0, run_budgets),
        ("single-slab oracle", 10.0, single_slab),
        ("expansion-coefficient oracle", 5.0, expansion_oracle),
        ("figure properties", 60.0, figure_properties),
        ("invariant suites", 120.0, invariants),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (passed, detail) = match outcome {
            Ok(o) => (o.passed && secs < *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {} [{}] {name}: {detail} ({secs:.3} s, budget {budget} s)",
            i + 1,
            if passed { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
