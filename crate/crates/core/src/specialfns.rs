//! Scalar special functions: Gaussian densities and tails, the Mills ratio,
//! the infimum function `I(y) = inf_{x≥0} (x y + R(x))`, the constants
//! `c_r = ∫|φ^{(r)}|`, and radial Gaussian moments.
//!
//! Every routine targets at least ten correct significant digits.

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::optimize::bisect_increasing;
use crate::{Error, Result};

/// 1/√(2π)
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// √(π/2) = R(0)
pub const SQRT_PI_OVER_2: f64 = 1.253_314_137_315_500_3;
/// √(2/π) = 2 φ(0), the maximal Gaussian perimeter in one dimension.
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Standard univariate normal density.
#[inline]
pub fn phi(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard `d`-variate normal density at `x`, with `d = x.len()`.
pub fn gaussian_density(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    (-0.5 * d * LN_2PI - 0.5 * sq).exp()
}

/// `r`-th derivative of the univariate standard normal density,
/// `φ^{(r)}(z) = (-1)^r He_r(z) φ(z)` with probabilists' Hermite `He_r`.
pub fn phi_derivative(r: u32, z: f64) -> f64 {
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    sign * hermite_he(r, z) * phi(z)
}

/// Probabilists' Hermite polynomial `He_r(z)`.
pub fn hermite_he(r: u32, z: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, z);
    if r == 0 {
        return prev;
    }
    for k in 1..r {
        let next = z * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Mills ratio and its derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MillsEval {
    pub x: f64,
    pub value: f64,
    pub derivative: f64,
}

/// `R(x) = e^{x²/2} ∫_x^∞ e^{-z²/2} dz` without forming the tail probability.
///
/// Taylor series of the ODE `R' = xR − 1` below 2, Laplace's continued
/// fraction (evaluated backwards) above.
pub fn mills_value(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x < 0.0 {
        // R(-x) = √(2π) e^{x²/2} − R(x)
        let y = -x;
        return (2.0 * core::f64::consts::PI).sqrt() * (0.5 * y * y).exp() - mills_value(y);
    }
    if x < 2.0 {
        let (mut a_prev, mut a_cur) = (SQRT_PI_OVER_2, -1.0);
        let mut sum = a_prev + a_cur * x;
        let mut power = x;
        let mut k = 1usize;
        loop {
            // (k+1) a_{k+1} = a_{k-1}
            let next = a_prev / (k + 1) as f64;
            power *= x;
            let term = next * power;
            sum += term;
            a_prev = a_cur;
            a_cur = next;
            k += 1;
            if term.abs() < 1e-17 * sum.abs() && k > 4 {
                break;
            }
        }
        return sum;
    }
    let depth = if x < 3.0 {
        160
    } else if x < 6.0 {
        80
    } else {
        40
    };
    let mut tail = 0.0;
    for k in (1..=depth).rev() {
        tail = k as f64 / (x + tail);
    }
    1.0 / (x + tail)
}

/// Mills ratio with derivative `R'(x) = x R(x) − 1`.
pub fn mills_ratio(x: f64) -> MillsEval {
    let value = mills_value(x);
    MillsEval {
        x,
        value,
        derivative: x * value - 1.0,
    }
}

/// Upper tail `P(Z > x)` of the standard normal.
pub fn normal_sf(x: f64) -> f64 {
    if x >= 0.0 {
        phi(x) * mills_value(x)
    } else {
        1.0 - phi(-x) * mills_value(-x)
    }
}

/// Standard normal CDF `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    normal_sf(-x)
}

/// `Φ(b) − Φ(a)` for `a ≤ b`, taking differences on the side with small tails.
pub fn normal_interval(a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_cdf(a) - normal_sf(b)
    }
}

/// Inverse of `Φ`: Acklam's rational approximation polished by one Halley step.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let plow = 0.02425;
    let x = if p < plow {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - plow {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = if p < 0.5 {
        normal_cdf(x) - p
    } else {
        (1.0 - p) - normal_sf(x)
    };
    let u = e / phi(x);
    x - u / (1.0 + 0.5 * x * u)
}

/// `I(y) = inf_{x ≥ 0} (x y + R(x))` together with the minimizer.
///
/// For `y ≥ 1` the minimizer is `x = 0` because `R' ≥ −1`. Otherwise the
/// stationarity condition `x R(x) − 1 = −y` has a unique root since
/// `R'' > 0`.
pub fn inf_mills_argmin(y: f64) -> Result<(f64, f64)> {
    if !(y > 0.0) {
        return Err(Error::domain("inf_mills requires y > 0", y));
    }
    if y >= 1.0 {
        return Ok((SQRT_PI_OVER_2, 0.0));
    }
    // x R(x) ≈ 1 − 1/x², so the root sits near 1/√y
    let hi = 40f64.max(4.0 / y.sqrt());
    let x = bisect_increasing(|x| x * mills_value(x) - 1.0 + y, 0.0, hi, 1e-12 * hi.max(1.0))?;
    Ok((x * y + mills_value(x), x))
}

/// `I(y) = inf_{x ≥ 0} (x y + R(x))`.
pub fn inf_mills(y: f64) -> Result<f64> {
    inf_mills_argmin(y).map(|(v, _)| v)
}

/// `c_r = ∫ |φ^{(r)}(z)| dz` for `r ≤ 3`, in closed form as the total
/// variation of `φ^{(r-1)}` between the zeros of `φ^{(r)}`.
pub fn c_constant(r: u32) -> Result<f64> {
    match r {
        0 => Ok(1.0),
        1 => Ok(2.0 * phi(0.0)),
        2 => Ok(4.0 * phi(1.0)),
        3 => Ok(2.0 * phi(0.0) + 8.0 * phi(3f64.sqrt())),
        _ => Err(Error::domain("c_constant supports orders 0..=3", r as f64)),
    }
}

/// `ln Γ(a)` for `a > 0`.
pub fn ln_gamma(a: f64) -> f64 {
    libm::lgamma(a)
}

/// `ln γ(a, x)`, the log of the lower incomplete gamma integral
/// `∫_0^x t^{a-1} e^{-t} dt`; series below `x = a + 1`, continued fraction
/// for the complement above.
pub fn ln_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == f64::INFINITY {
        return ln_gamma(a);
    }
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        -x + a * x.ln() + sum.ln()
    } else {
        let q = upper_regularized_cf(a, x);
        ln_gamma(a) + (-q).ln_1p()
    }
}

/// Regularized upper incomplete gamma `Q(a, x)` by Lentz's continued fraction.
fn upper_regularized_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        (ln_lower_gamma(a, x) - ln_gamma(a)).exp()
    } else {
        1.0 - upper_regularized_cf(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 − P(a, x)`.
pub fn regularized_upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - regularized_lower_gamma(a, x)
    } else {
        upper_regularized_cf(a, x)
    }
}

/// `∫_0^r t^{d-1} e^{-t²/2} dt = 2^{d/2-1} γ(d/2, r²/2)`; `r = ∞` gives
/// `2^{d/2-1} Γ(d/2)`.
pub fn radial_moment(d: u32, r: f64) -> f64 {
    ln_radial_moment(d, r).exp()
}

/// Natural log of [`radial_moment`], finite for dimensions where the value
/// itself overflows.
pub fn ln_radial_moment(d: u32, r: f64) -> f64 {
    let a = 0.5 * d as f64;
    (a - 1.0) * core::f64::consts::LN_2 + ln_lower_gamma(a, 0.5 * r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Quadrature;

    fn mills_by_quadrature(x: f64) -> f64 {
        Quadrature::default()
            .integrate_to_infinity(|t| (-t * x - 0.5 * t * t).exp(), 0.0)
            .unwrap()
            .value
    }

    #[test]
    fn density_examples() {
        assert!((gaussian_density(&[0.0]) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((gaussian_density(&[0.0, 0.0]) - 0.159_154_943_091_895_35).abs() < 1e-15);
        // |x| = √3 in one dimension
        let v = gaussian_density(&[3f64.sqrt()]);
        assert!((v - phi(3f64.sqrt())).abs() < 1e-16);
        assert!((v - 0.089_016_054_915_951_5).abs() < 1e-12);
        let q = Quadrature::default()
            .integrate_real_line(|z| gaussian_density(&[z]))
            .unwrap();
        assert!((q.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mills_examples() {
        let r0 = mills_ratio(0.0);
        assert!((r0.value - SQRT_PI_OVER_2).abs() < 1e-15);
        assert_eq!(r0.derivative, -1.0);
        let r10 = mills_ratio(10.0).value;
        assert!(r10 >= 2.0 / (10.0 + 104f64.sqrt()) && r10 <= 0.1);
        let r1 = mills_ratio(1.0).value;
        assert!((r1 - mills_by_quadrature(1.0)).abs() < 1e-10);
        assert!((r1 - 0.655_680).abs() < 1e-6);
    }

    #[test]
    fn mills_agrees_with_quadrature_across_branch_switch() {
        for &x in &[0.0, 0.3, 1.0, 1.99, 2.0, 2.01, 2.5, 3.0, 5.5, 6.5, 12.0, 30.0] {
            let q = mills_by_quadrature(x);
            let v = mills_value(x);
            assert!(((v - q) / q).abs() < 1e-10, "x={x}: {v} vs {q}");
        }
    }

    #[test]
    fn mills_at_large_argument_does_not_overflow() {
        let v = mills_value(1e6);
        assert!((v * 1e6 - 1.0).abs() < 1e-11);
        assert!(mills_value(40.0).is_finite());
    }

    #[test]
    fn mills_derivative_range() {
        for i in 1..2000 {
            let x = i as f64 * 0.01;
            let d = mills_ratio(x).derivative;
            assert!(d > -1.0 && d < 0.0, "x={x} d={d}");
        }
    }

    #[test]
    fn tails_and_quantiles() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-14);
        assert!((normal_sf(10.0) - 7.619_853_024_160_527e-24).abs() < 1e-36);
        for &p in &[1e-12, 1e-5, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
            let x = normal_quantile(p);
            assert!((normal_cdf(x) - p).abs() < 1e-14 * p.max(1e-3), "p={p}");
        }
        assert!((normal_interval(-1.0, 1.0) - 0.682_689_492_137_085_9).abs() < 1e-14);
    }

    #[test]
    fn inf_mills_examples() {
        assert!((inf_mills(1.0).unwrap() - SQRT_PI_OVER_2).abs() < 1e-15);
        assert!((inf_mills(3.0).unwrap() - SQRT_PI_OVER_2).abs() < 1e-15);
        // dense grid oracle on [0, 20]
        let oracle = (0..=2_000_000)
            .map(|i| {
                let x = i as f64 * 1e-5;
                0.5 * x + mills_value(x)
            })
            .fold(f64::INFINITY, f64::min);
        let v = inf_mills(0.5).unwrap();
        assert!(v <= oracle + 1e-12 && oracle - v < 1e-9, "{v} vs {oracle}");
        assert!((v - 1.122_990_808_108_61).abs() < 1e-10);
        assert!(inf_mills(0.25).unwrap() >= 2.0 * (0.25f64 * 0.75).sqrt());
        assert!(matches!(inf_mills(0.0), Err(Error::Domain { .. })));
        assert!(inf_mills(-1.0).is_err());
    }

    #[test]
    fn inf_mills_tiny_argument() {
        let y = 1e-8;
        let (v, x) = inf_mills_argmin(y).unwrap();
        assert!(x > 1e3);
        assert!(v >= 2.0 * (y * (1.0 - y)).sqrt());
    }

    #[test]
    fn c_constants_closed_form() {
        assert_eq!(c_constant(0).unwrap(), 1.0);
        assert!((c_constant(1).unwrap() - SQRT_2_OVER_PI).abs() < 1e-15);
        assert!((c_constant(3).unwrap() - 1.510_013).abs() < 1e-6);
        assert!(c_constant(4).is_err());
    }

    #[test]
    fn hermite_derivatives_match_finite_differences() {
        let h = 1e-4;
        for r in 1..=3u32 {
            for &z in &[-2.1, -0.4, 0.0, 0.7, 1.9] {
                let fd = (phi_derivative(r - 1, z + h) - phi_derivative(r - 1, z - h)) / (2.0 * h);
                assert!((fd - phi_derivative(r, z)).abs() < 1e-7, "r={r} z={z}");
            }
        }
    }

    #[test]
    fn radial_moment_examples() {
        assert!((radial_moment(1, f64::INFINITY) - SQRT_PI_OVER_2).abs() < 1e-14);
        for &r in &[0.1, 1.0, 2.5, 6.0] {
            assert!((radial_moment(2, r) - (1.0 - (-0.5 * r * r).exp())).abs() < 1e-14);
        }
        let q = Quadrature::default()
            .integrate(|t| t.powi(4) * (-0.5 * t * t).exp(), 0.0, 2.0)
            .unwrap();
        assert!((radial_moment(5, 2.0) - q.value).abs() < 1e-10);
    }

    #[test]
    fn incomplete_gamma_consistency() {
        for &a in &[0.5, 1.0, 2.5, 10.0, 500.0] {
            for &x in &[0.01, 0.5, a, a + 1.0, 3.0 * a + 5.0] {
                let p = regularized_lower_gamma(a, x);
                let q = regularized_upper_gamma(a, x);
                assert!((p + q - 1.0).abs() < 1e-13, "a={a} x={x}");
            }
        }
        // P(1, x) = 1 − e^{−x}
        assert!((regularized_lower_gamma(1.0, 0.3) - (1.0 - (-0.3f64).exp())).abs() < 1e-15);
    }
}
