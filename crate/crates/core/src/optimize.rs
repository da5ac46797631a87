//! One-dimensional minimization and root bracketing.

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Location and value of a minimum found by a 1-D search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[lo, hi]` until the bracket is narrower than
/// `tol * max(1, |x|)`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Minimum> {
    if !(lo < hi) {
        return Err(Error::domain("golden-section bracket must satisfy lo < hi", hi - lo));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol * 1.0f64.max(0.5 * (a + b).abs()) {
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                routine: "golden-section search",
                iterations,
                detail: alloc::format!("bracket [{a:e}, {b:e}] still wider than tolerance"),
            });
        }
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok(Minimum { x, value, iterations })
}

/// Index of the smallest finite value, ties broken towards the front.
pub fn argmin(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

/// Scan `grid` for the smallest value of `f`, then refine by golden section
/// between the neighbours of the best grid point.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64, max_iter: usize) -> Result<Minimum> {
    let values: alloc::vec::Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let best = argmin(&values).ok_or(Error::NonConvergence {
        routine: "grid scan",
        iterations: grid.len(),
        detail: "objective was NaN on every grid point".into(),
    })?;
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let grid_min = Minimum {
        x: grid[best],
        value: values[best],
        iterations: grid.len(),
    };
    if !(lo < hi) {
        return Ok(grid_min);
    }
    let refined = golden_section(&mut f, lo, hi, tol, max_iter)?;
    Ok(if refined.value <= grid_min.value {
        Minimum {
            iterations: refined.iterations + grid.len(),
            ..refined
        }
    } else {
        grid_min
    })
}

/// Logarithmically spaced grid with `n ≥ 2` points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> alloc::vec::Vec<f64> {
    let (la, lb) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Root of an increasing function on `[lo, hi]` by bisection to absolute
/// width `tol`. `g(lo) ≤ 0 ≤ g(hi)` is required.
pub fn bisect_increasing<F: FnMut(f64) -> f64>(mut g: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (glo, ghi) = (g(lo), g(hi));
    if glo > 0.0 || ghi < 0.0 {
        return Err(Error::NonConvergence {
            routine: "bisection",
            iterations: 0,
            detail: alloc::format!("root not bracketed: g({lo})={glo:e}, g({hi})={ghi:e}"),
        });
    }
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || iterations > 400 {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-10, 200).unwrap();
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_reports_budget_exhaustion() {
        let err = golden_section(|x| x * x, -1.0, 1.0, 1e-14, 3).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 3, .. }));
    }

    #[test]
    fn grid_scan_escapes_local_minimum() {
        // local minimum near -1, global near 2
        let f = |x: f64| (x + 1.0).powi(2) * (x - 2.0).powi(2) + 0.1 * (x - 2.0).powi(2);
        let grid: alloc::vec::Vec<f64> = (0..200).map(|i| -3.0 + 6.0 * i as f64 / 199.0).collect();
        let m = grid_then_golden(f, &grid, 1e-10, 200).unwrap();
        assert!((m.x - 2.0).abs() < 1e-6);
    }

    #[test]
    fn bisection_solves_cubic() {
        let r = bisect_increasing(|x| x * x * x - 2.0, 0.0, 2.0, 1e-13).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
        assert!(bisect_increasing(|x| x + 5.0, 0.0, 1.0, 1e-6).is_err());
    }
}
