//! The Berry–Esseen constant bootstrap.
//!
//! A smoothing argument plus Stein's method yields a self-referential bound on
//! the best constant `K`; solving it gives the fixed-point inequalities
//! evaluated here. The threshold `β*` is a free parameter (default `1/27`).

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::perimeter::theorem2_linear;
use crate::specialfns::c_constant;
use crate::{Error, Result};

/// Default Lyapunov threshold.
pub const DEFAULT_BETA_STAR: f64 = 1.0 / 27.0;
/// Rounded coefficient when the class is closed under expanding symmetric maps.
pub const AFFINE_COEFFICIENT: f64 = 50.0;
/// Rounded coefficient for the general class.
pub const GENERAL_COEFFICIENT: f64 = 53.0;
/// `κ` of the class of all convex sets.
pub const CONVEX_KAPPA: f64 = 1.0;

/// `σ* = (1 − β*^{2/3})^{1/2}`.
pub fn sigma_star(beta_star: f64) -> Result<f64> {
    check_beta(beta_star)?;
    Ok((1.0 - beta_star.powf(2.0 / 3.0)).sqrt())
}

fn check_beta(beta_star: f64) -> Result<()> {
    if !(beta_star > 0.0 && beta_star < 1.0) {
        return Err(Error::domain("beta_star must lie in (0, 1)", beta_star));
    }
    Ok(())
}

fn check_nonneg(what: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::domain(what, v));
    }
    Ok(())
}

fn c1c3() -> (f64, f64) {
    (
        c_constant(1).expect("order 1 is supported"),
        c_constant(3).expect("order 3 is supported"),
    )
}

/// The three numbers behind the rounded coefficients 50 and 53.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCertificate {
    pub beta_star: f64,
    pub sigma_star: f64,
    /// `c₃ / (2σ*³)`, must be at most 1.
    pub stein_term: f64,
    /// `√(2c₁c₃)(3/σ* + 24/σ*³)`, must be at most 50.
    pub affine_exact: f64,
    /// `√(2c₁c₃)(3/σ*² + 24/σ*⁴)`, must be at most 53.
    pub general_exact: f64,
}

impl CoefficientCertificate {
    pub fn new(beta_star: f64) -> Result<Self> {
        let s = sigma_star(beta_star)?;
        let (c1, c3) = c1c3();
        let root = (2.0 * c1 * c3).sqrt();
        Ok(CoefficientCertificate {
            beta_star,
            sigma_star: s,
            stein_term: c3 / (2.0 * s.powi(3)),
            affine_exact: root * (3.0 / s + 24.0 / s.powi(3)),
            general_exact: root * (3.0 / (s * s) + 24.0 / s.powi(4)),
        })
    }

    /// Whether `1/β* ≤ 27` and the three rounded inequalities hold.
    pub fn holds(&self) -> bool {
        1.0 / self.beta_star <= 27.0 + 1e-12
            && self.stein_term <= 1.0
            && self.affine_exact <= AFFINE_COEFFICIENT
            && self.general_exact <= GENERAL_COEFFICIENT
    }
}

/// Every intermediate of one constant evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantBundle {
    pub beta_star: f64,
    pub sigma_star: f64,
    pub c1: f64,
    pub c3: f64,
    pub kappa: f64,
    pub gamma_star: f64,
    /// Normalizer of the general case; `None` in the affine-closed case.
    pub gamma0: Option<f64>,
    pub affine: bool,
    /// `1/β*` (scaled by `1/γ₀` in the general case).
    pub first_branch: f64,
    /// The Stein/smoothing branch of the maximum.
    pub second_branch: f64,
    /// `max(first_branch, second_branch)`.
    pub k_value: f64,
    /// Constant multiplying the Lyapunov sum in the set-probability bound.
    pub set_constant: f64,
    /// `max{27, 1 + coefficient · γ* √(1+κ)}` with the rounded coefficient.
    pub rounded_constant: f64,
    pub rounded_coefficient: f64,
    /// The exact expression the rounded coefficient replaces.
    pub exact_coefficient: f64,
}

/// `max{1/β*, c₃/(2σ*³) + γ* √(2(1+κ)c₁c₃)(3/σ* + 24/σ*³)}`.
pub fn k_bound_affine(gamma_star: f64, kappa: f64, beta_star: f64) -> Result<f64> {
    affine_bundle(gamma_star, kappa, beta_star).map(|b| b.k_value)
}

/// Full bundle for the affine-closed case.
pub fn affine_bundle(gamma_star: f64, kappa: f64, beta_star: f64) -> Result<ConstantBundle> {
    check_nonneg("gamma_star must be a finite non-negative number", gamma_star)?;
    check_nonneg("kappa must be a finite non-negative number", kappa)?;
    let s = sigma_star(beta_star)?;
    let (c1, c3) = c1c3();
    let root = (2.0 * (1.0 + kappa) * c1 * c3).sqrt();
    let first = 1.0 / beta_star;
    let second = c3 / (2.0 * s.powi(3)) + gamma_star * root * (3.0 / s + 24.0 / s.powi(3));
    let k = first.max(second);
    let cert = CoefficientCertificate::new(beta_star)?;
    Ok(ConstantBundle {
        beta_star,
        sigma_star: s,
        c1,
        c3,
        kappa,
        gamma_star,
        gamma0: None,
        affine: true,
        first_branch: first,
        second_branch: second,
        k_value: k,
        set_constant: k,
        rounded_constant: 27f64.max(1.0 + AFFINE_COEFFICIENT * gamma_star * (1.0 + kappa).sqrt()),
        rounded_coefficient: AFFINE_COEFFICIENT,
        exact_coefficient: cert.affine_exact,
    })
}

/// `K(β₀, γ₀) ≤ max{1/(β*γ₀), c₃/(2σ*³γ₀) + √(2(1+κ)c₁c₃)(3/σ*² + 24/σ*⁴)}`.
pub fn k_bound_general(kappa: f64, beta_star: f64, gamma0: f64) -> Result<f64> {
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(Error::domain("gamma0 must be positive", gamma0));
    }
    check_nonneg("kappa must be a finite non-negative number", kappa)?;
    let s = sigma_star(beta_star)?;
    let (c1, c3) = c1c3();
    let root = (2.0 * (1.0 + kappa) * c1 * c3).sqrt();
    let first = 1.0 / (beta_star * gamma0);
    let second = c3 / (2.0 * s.powi(3) * gamma0) + root * (3.0 / (s * s) + 24.0 / s.powi(4));
    Ok(first.max(second))
}

/// Full bundle for the general case. `gamma0` defaults to `γ*`; the set
/// constant is `γ₀ K(β₀, γ₀)`.
pub fn general_bundle(gamma_star: f64, kappa: f64, beta_star: f64, gamma0: Option<f64>) -> Result<ConstantBundle> {
    check_nonneg("gamma_star must be a finite non-negative number", gamma_star)?;
    let g0 = gamma0.unwrap_or(gamma_star);
    let k = k_bound_general(kappa, beta_star, g0)?;
    let s = sigma_star(beta_star)?;
    let (c1, c3) = c1c3();
    let root = (2.0 * (1.0 + kappa) * c1 * c3).sqrt();
    let first = 1.0 / (beta_star * g0);
    let second = c3 / (2.0 * s.powi(3) * g0) + root * (3.0 / (s * s) + 24.0 / s.powi(4));
    let cert = CoefficientCertificate::new(beta_star)?;
    Ok(ConstantBundle {
        beta_star,
        sigma_star: s,
        c1,
        c3,
        kappa,
        gamma_star,
        gamma0: Some(g0),
        affine: false,
        first_branch: first,
        second_branch: second,
        k_value: k,
        set_constant: g0 * k,
        rounded_constant: 27f64.max(1.0 + GENERAL_COEFFICIENT * gamma_star * (1.0 + kappa).sqrt()),
        rounded_coefficient: GENERAL_COEFFICIENT,
        exact_coefficient: cert.general_exact,
    })
}

/// Set-probability constant of the general case at `γ₀ = γ*`, continuous
/// down to `γ* = 0`:
/// `max{1/β*, c₃/(2σ*³) + γ* √(2(1+κ)c₁c₃)(3/σ*² + 24/σ*⁴)}`.
pub fn general_set_constant(gamma_star: f64, kappa: f64, beta_star: f64) -> Result<f64> {
    check_nonneg("gamma_star must be a finite non-negative number", gamma_star)?;
    check_nonneg("kappa must be a finite non-negative number", kappa)?;
    let s = sigma_star(beta_star)?;
    let (c1, c3) = c1c3();
    let root = (2.0 * (1.0 + kappa) * c1 * c3).sqrt();
    Ok((1.0 / beta_star).max(c3 / (2.0 * s.powi(3)) + gamma_star * root * (3.0 / (s * s) + 24.0 / s.powi(4))))
}

/// `max{27, 1 + 50 γ* √(1+κ)}`.
pub fn rounded_affine_constant(gamma_star: f64, kappa: f64) -> f64 {
    27f64.max(1.0 + AFFINE_COEFFICIENT * gamma_star * (1.0 + kappa).sqrt())
}

/// `max{27, 1 + 53 γ* √(1+κ)}`.
pub fn rounded_general_constant(gamma_star: f64, kappa: f64) -> f64 {
    27f64.max(1.0 + GENERAL_COEFFICIENT * gamma_star * (1.0 + kappa).sqrt())
}

/// `K` from the affine-closed bound for each threshold in `betas`.
pub fn beta_sweep(gamma_star: f64, kappa: f64, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
    betas
        .iter()
        .map(|&b| k_bound_affine(gamma_star, kappa, b).map(|k| (b, k)))
        .collect()
}

/// Constant for all convex sets assembled from the perimeter bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Bound {
    pub d: u32,
    /// `max{27, 1 + 50√2 (0.59 d^{1/4} + 0.21)}`.
    pub assembled: f64,
    /// `42 d^{1/4} + 16`.
    pub headline: f64,
    pub dominated: bool,
}

/// Berry–Esseen constant for the class of all convex sets in dimension `d`.
pub fn theorem1_bound(d: u32) -> Result<Theorem1Bound> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1", 0.0));
    }
    let assembled = rounded_affine_constant(theorem2_linear(d), CONVEX_KAPPA);
    let headline = 42.0 * (d as f64).powf(0.25) + 16.0;
    Ok(Theorem1Bound {
        d,
        assembled,
        headline,
        dominated: assembled <= headline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfns::FRAC_1_SQRT_2PI;

    #[test]
    fn sigma_star_at_default_threshold() {
        let s = sigma_star(DEFAULT_BETA_STAR).unwrap();
        assert!((s - (8.0f64 / 9.0).sqrt()).abs() < 1e-15);
        assert!(sigma_star(0.0).is_err() && sigma_star(1.0).is_err());
    }

    #[test]
    fn certificate_at_default_threshold() {
        let c = CoefficientCertificate::new(DEFAULT_BETA_STAR).unwrap();
        assert!(c.holds());
        assert!((c.affine_exact - 49.393_851).abs() < 1e-5);
        assert!((c.general_exact - 52.390_091).abs() < 1e-5);
        assert!((c.stein_term - 0.900_906).abs() < 1e-5);
    }

    #[test]
    fn half_line_constant() {
        let k = k_bound_affine(FRAC_1_SQRT_2PI, 1.0, DEFAULT_BETA_STAR).unwrap();
        assert!((k - 28.768_402).abs() < 1e-5);
        assert!(k <= 1.0 + 50.0 * FRAC_1_SQRT_2PI * 2f64.sqrt());
        assert!(k <= 29.3);
    }

    #[test]
    fn zero_perimeter_hits_threshold_branch() {
        let b = affine_bundle(0.0, 0.0, DEFAULT_BETA_STAR).unwrap();
        assert!((b.k_value - 27.0).abs() < 1e-12);
        assert!(b.second_branch < 1.0);
    }

    #[test]
    fn general_bound_examples() {
        let s = sigma_star(DEFAULT_BETA_STAR).unwrap();
        let (c1, c3) = c1c3();
        assert!((3.0 / (s * s) + 24.0 / s.powi(4) - 33.75).abs() < 1e-12);
        let k = k_bound_general(0.0, DEFAULT_BETA_STAR, 1.0).unwrap();
        let expected = 27f64.max(c3 / (2.0 * s.powi(3)) + (2.0 * c1 * c3).sqrt() * 33.75);
        assert!((k - expected).abs() < 1e-12);
        assert!(k_bound_general(1.0, DEFAULT_BETA_STAR, 0.0).is_err());
        assert!(k_bound_general(1.0, DEFAULT_BETA_STAR, -1.0).is_err());
    }

    #[test]
    fn general_bound_scaling_in_gamma0() {
        let (kappa, beta) = (0.7, DEFAULT_BETA_STAR);
        let lambda = 3.0;
        let b1 = general_bundle(0.4, kappa, beta, Some(0.4)).unwrap();
        let b2 = general_bundle(0.4, kappa, beta, Some(0.4 * lambda)).unwrap();
        assert!((b2.first_branch - b1.first_branch / lambda).abs() < 1e-12);
        let s = b1.sigma_star;
        let stein1 = b1.c3 / (2.0 * s.powi(3) * 0.4);
        let stein2 = b2.c3 / (2.0 * s.powi(3) * 0.4 * lambda);
        assert!((stein2 - stein1 / lambda).abs() < 1e-12);
        assert!(((b1.second_branch - stein1) - (b2.second_branch - stein2)).abs() < 1e-10);
    }

    #[test]
    fn wrapper_matches_scaled_general_bound() {
        for &g in &[0.1, 0.4, 2.0] {
            let b = general_bundle(g, 1.0, DEFAULT_BETA_STAR, None).unwrap();
            let direct = general_set_constant(g, 1.0, DEFAULT_BETA_STAR).unwrap();
            assert!((b.set_constant - direct).abs() < 1e-10 * direct);
        }
    }

    #[test]
    fn theorem1_examples() {
        let t = theorem1_bound(1).unwrap();
        assert!((t.assembled - 57.568_542).abs() < 1e-5);
        assert_eq!(t.headline, 58.0);
        assert!(t.dominated);
        let t = theorem1_bound(10_000).unwrap();
        assert!((t.assembled - (1.0 + 50.0 * 2f64.sqrt() * (0.59 * 10.0 + 0.21))).abs() < 1e-9);
        assert!(t.dominated);
        assert!(50.0 * 2f64.sqrt() * 0.59 <= 42.0);
        assert!(1.0 + 50.0 * 2f64.sqrt() * 0.21 <= 16.0);
    }

    #[test]
    fn beta_sweep_is_minimal_near_default_for_half_lines() {
        let betas: Vec<f64> = (10..60).map(|k| 1.0 / k as f64).collect();
        let sweep = beta_sweep(FRAC_1_SQRT_2PI, 1.0, &betas).unwrap();
        let best = sweep.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert!((1.0 / best.0 - 27.0).abs() <= 2.0, "best 1/beta = {}", 1.0 / best.0);
    }
}
