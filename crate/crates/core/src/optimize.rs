//! Derivative-free one-dimensional maximization.

use crate::error::{domain, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`,
/// stopping when the bracket is narrower than `tol`.
pub fn golden_section_max<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a < b) || !(tol > 0.0) {
        return domain(format!("invalid bracket [{a}, {b}] or tolerance {tol}"));
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// Maximum of `f` over `[lo, hi]` (both positive): scan `points` log-spaced
/// abscissae, then refine around the best one by golden section.
pub fn log_scan_max<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(lo > 0.0 && hi > lo) || points < 3 {
        return domain(format!("invalid scan [{lo}, {hi}] with {points} points"));
    }
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| lo * (ratio * i as f64).exp()).collect();
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let i = best.0;
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(points - 1)];
    let (x, v) = golden_section_max(&mut f, a, b, tol)?;
    // The scan point can beat the refinement when the peak sits on an edge.
    Ok(if v >= best.1 { (x, v) } else { (grid[i], best.1) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let (x, v) = golden_section_max(|x| Ok(-(x - 0.3f64).powi(2) + 2.0), 0.0, 1.0, 1e-10).unwrap();
        // Flat top: the argmax is only resolvable to about sqrt(eps).
        assert!((x - 0.3).abs() < 1e-7 && (v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scan_finds_narrow_peak() {
        let f = |x: f64| Ok(1.0 / (1.0 + ((x - 2.7) / 0.05).powi(2)));
        let (x, _) = log_scan_max(f, 1e-3, 10.0, 512, 1e-10).unwrap();
        assert!((x - 2.7).abs() < 1e-8);
    }

    #[test]
    fn edge_maximum() {
        let (x, _) = log_scan_max(|x| Ok(-x), 1.0, 2.0, 16, 1e-9).unwrap();
        assert!((x - 1.0).abs() < 1e-8);
    }
}
