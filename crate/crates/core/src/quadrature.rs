//! Numerical integration: adaptive Gauss–Kronrod on finite and infinite
//! ranges, plus Gauss–Legendre and Gauss–Hermite rules.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

/// Value of an integral together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

// Kronrod 15-point nodes (symmetric half) and weights, Gauss 7-point weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { a, b, value, error }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::domain("abs_tol must be positive", abs_tol));
        }
        if !(rel_tol > 0.0) {
            return Err(Error::domain("rel_tol must be positive", rel_tol));
        }
        if max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be at least 1", 0.0));
        }
        Ok(Quadrature {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// Adaptive integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Adaptive integral over consecutive panels `[p0, p1], [p1, p2], ...`.
    ///
    /// Placing breakpoints at known kinks or jumps keeps the bisection from
    /// chasing them.
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(&self, mut f: F, points: &[f64]) -> Result<Estimate> {
        if points.len() < 2 {
            return Err(Error::InvalidConfig("need at least two integration limits".into()));
        }
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            heap.push(gk15(&mut f, w[0], w[1]));
            evaluations += 15;
        }
        let mut subdivisions = heap.len();
        loop {
            let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target {
                return Ok(Estimate {
                    value,
                    abs_error: error,
                    evaluations,
                });
            }
            if subdivisions >= self.max_subdivisions {
                return Err(Error::NonConvergence {
                    routine: "adaptive Gauss-Kronrod",
                    iterations: subdivisions,
                    detail: alloc::format!("estimate {value:e} with error {error:e}"),
                });
            }
            let worst = match heap.pop() {
                Some(s) => s,
                None => {
                    return Ok(Estimate {
                        value: 0.0,
                        abs_error: 0.0,
                        evaluations,
                    })
                }
            };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval exhausted at machine resolution; accept as is
                heap.push(Segment { error: 0.0, ..worst });
                subdivisions += 1;
                continue;
            }
            heap.push(gk15(&mut f, worst.a, mid));
            heap.push(gk15(&mut f, mid, worst.b));
            evaluations += 30;
            subdivisions += 1;
        }
    }

    /// Integral over `[a, ∞)` via the substitution `t = a + u / (1 - u)`.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64) -> Result<Estimate> {
        self.integrate(
            |u| {
                if u >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - u;
                let v = f(a + u / s) / (s * s);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
        )
    }

    /// Integral over the whole real line, split at zero.
    pub fn integrate_real_line<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<Estimate> {
        let right = self.integrate_to_infinity(&mut f, 0.0)?;
        let left = self.integrate_to_infinity(|t| f(-t), 0.0)?;
        Ok(Estimate {
            value: right.value + left.value,
            abs_error: right.abs_error + left.abs_error,
            evaluations: right.evaluations + left.evaluations,
        })
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Hermite rule for the standard normal weight: `Σ w_i f(x_i) ≈ E f(Z)`.
///
/// Nodes come from Newton iteration on the orthonormal Hermite recurrence for
/// the weight `e^{-x²}`, then are rescaled by `√2`; weights sum to one.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    let scale = core::f64::consts::SQRT_2;
    let norm = core::f64::consts::PI.sqrt();
    let mut nodes: Vec<f64> = x.iter().rev().map(|v| v * scale).collect();
    let mut weights: Vec<f64> = w.iter().rev().map(|v| v / norm).collect();
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    nodes.shrink_to_fit();
    weights.shrink_to_fit();
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_polynomials_and_gaussian() {
        let q = Quadrature::default();
        let est = q.integrate(|x| x * x * x - x, 0.0, 2.0).unwrap();
        assert!((est.value - 2.0).abs() < 1e-13);
        let est = q.integrate_real_line(|x| (-0.5 * x * x).exp()).unwrap();
        assert!((est.value - (2.0 * core::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let q = Quadrature::default();
        let est = q
            .integrate_with_breaks(|x| if x < 0.3 { 1.0 } else { 2.0 }, &[0.0, 0.3, 1.0])
            .unwrap();
        assert!((est.value - 1.7).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_tolerances() {
        assert!(Quadrature::new(0.0, 1e-3, 10).is_err());
        assert!(Quadrature::new(1e-3, -1.0, 10).is_err());
        assert!(Quadrature::new(1e-3, 1e-3, 0).is_err());
    }

    #[test]
    fn legendre_weights_sum_to_two() {
        for n in [1, 2, 7, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let moment: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
            if n >= 3 {
                assert!((moment - 0.4).abs() < 1e-13, "n={n}");
            }
        }
    }

    #[test]
    fn hermite_reproduces_normal_moments() {
        for n in [4, 16, 32, 64, 100] {
            let (x, w) = gauss_hermite(n);
            let m0: f64 = w.iter().sum();
            let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
            let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
            assert!((m0 - 1.0).abs() < 1e-12, "n={n} m0={m0}");
            assert!((m2 - 1.0).abs() < 1e-11, "n={n} m2={m2}");
            if n >= 3 {
                assert!((m4 - 3.0).abs() < 1e-10, "n={n} m4={m4}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
