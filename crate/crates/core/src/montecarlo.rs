//! Normalized sums `W = Σ Xᵢ` of independent mean-zero vectors with
//! `Σ Var Xᵢ = I_d`, their sup error over a finite grid of test sets, and the
//! annulus inequality for shifted, scaled Gaussians.
//!
//! Lattice-valued sums with at most `2²⁰` atoms are enumerated exactly;
//! everything else is sampled in fixed-size chunks, chunk `j` drawing from
//! ChaCha8 stream `j` of the master seed. Chunk results are integer hit
//! counts, so any reduction order gives bit-identical reports.

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constants::{k_bound_affine, rounded_general_constant, theorem1_bound, DEFAULT_BETA_STAR};
use crate::geometry::{interval_measure, interval_union_perimeter_bound, Offset, TestSet, Variant};
use crate::quadrature::Quadrature;
use crate::specialfns::{
    ln_gamma, normal_cdf, normal_interval, normal_quantile, regularized_lower_gamma, FRAC_1_SQRT_2PI,
};
use crate::{Error, Result};

/// Largest atom count enumerated exactly.
pub const EXACT_ATOM_LIMIT: u64 = 1 << 20;
/// Samples per independently seeded chunk.
pub const CHUNK_SAMPLES: u64 = 1 << 16;
/// Two-sided 99% standard-normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SummandKind {
    /// `εᵢ e_k / √n_k`, summands dealt round-robin over the axes.
    RademacherAxes,
    /// `√(d/n) Uᵢ` with `Uᵢ` uniform on the unit sphere.
    UniformSphere,
    /// Standardized two-point law on the axes: `√((1−p)/p)` with probability
    /// `p`, `−√(p/(1−p))` otherwise.
    TwoPointAsymmetric { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummandSpec {
    #[serde(flatten)]
    pub kind: SummandKind,
    pub n: u64,
    pub d: u32,
}

impl SummandSpec {
    pub fn new(kind: SummandKind, n: u64, d: u32) -> Result<Self> {
        let s = SummandSpec { kind, n, d };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("summand count must be at least 1".into()));
        }
        if self.on_axes() && self.n < self.d as u64 {
            return Err(Error::InvalidConfig(format!(
                "axis summands need n >= d so every axis gets one (n = {}, d = {})",
                self.n, self.d
            )));
        }
        if let SummandKind::TwoPointAsymmetric { p } = self.kind {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "two-point probability must lie in (0, 1), got {p}"
                )));
            }
        }
        Ok(())
    }

    fn on_axes(&self) -> bool {
        !matches!(self.kind, SummandKind::UniformSphere) || self.d == 1
    }

    /// Number of summands on each axis.
    pub fn axis_counts(&self) -> Vec<u64> {
        let d = self.d as u64;
        (0..d).map(|k| self.n / d + u64::from(k < self.n % d)).collect()
    }

    /// `(p, up, down)`: probability of the upper value and the two values of
    /// the standardized one-dimensional law.
    fn two_point(&self) -> (f64, f64, f64) {
        match self.kind {
            SummandKind::TwoPointAsymmetric { p } => (p, ((1.0 - p) / p).sqrt(), (p / (1.0 - p)).sqrt()),
            _ => (0.5, 1.0, 1.0),
        }
    }

    /// `Σᵢ E|Xᵢ|³` in closed form.
    pub fn lyapunov_sum(&self) -> f64 {
        if !self.on_axes() {
            let (d, n) = (self.d as f64, self.n as f64);
            return d.powf(1.5) / n.sqrt();
        }
        let (p, up, down) = self.two_point();
        let third = p * up.powi(3) + (1.0 - p) * down.powi(3);
        self.axis_counts().iter().map(|&m| third / (m as f64).sqrt()).sum()
    }

    /// `Σᵢ Var Xᵢ`, accumulated summand by summand (row-major `d × d`).
    pub fn covariance(&self) -> Vec<f64> {
        let d = self.d as usize;
        let mut cov = alloc::vec![0.0; d * d];
        if !self.on_axes() {
            // Var U = I/d for uniform U on the sphere
            let per = (d as f64 / self.n as f64) / d as f64;
            for _ in 0..self.n {
                for k in 0..d {
                    cov[k * d + k] += per;
                }
            }
            return cov;
        }
        let (p, up, down) = self.two_point();
        let var1 = p * up * up + (1.0 - p) * down * down;
        let counts = self.axis_counts();
        for i in 0..self.n as usize {
            let k = i % d;
            cov[k * d + k] += var1 / counts[k] as f64;
        }
        cov
    }

    /// Number of distinct values of `W`, or `None` for a continuous law.
    pub fn atom_count(&self) -> Option<u64> {
        if !self.on_axes() {
            return None;
        }
        self.axis_counts()
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m + 1))
            .or(Some(u64::MAX))
    }
}

/// Which constant `K` multiplies the Lyapunov sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constant", rename_all = "snake_case")]
pub enum BoundConstant {
    /// Picked from the set family: half-lines, convex sets, or interval unions.
    Auto,
    /// Half-lines: `K` from the affine-closed bound with `γ* = 1/√(2π)`, `κ = 1`.
    HalfLine,
    /// All convex sets in dimension `d`.
    Convex,
    /// Interval unions: `max{27, 1 + 53 γ* √(1+κ)}` with the class perimeter bound.
    IntervalUnion,
    Explicit {
        k: f64,
    },
}

fn resolve_constant(choice: BoundConstant, d: u32, sets: &[TestSet]) -> Result<(f64, String)> {
    let choice = match choice {
        BoundConstant::Auto => {
            if sets.iter().any(|s| s.variant() == Variant::IntervalUnion) {
                BoundConstant::IntervalUnion
            } else if d == 1 && sets.iter().all(|s| s.variant() == Variant::HalfSpace) {
                BoundConstant::HalfLine
            } else {
                BoundConstant::Convex
            }
        }
        other => other,
    };
    match choice {
        BoundConstant::HalfLine => Ok((
            k_bound_affine(FRAC_1_SQRT_2PI, 1.0, DEFAULT_BETA_STAR)?,
            "half-line".into(),
        )),
        BoundConstant::Convex => Ok((theorem1_bound(d)?.assembled, format!("convex sets, d = {d}"))),
        BoundConstant::IntervalUnion => {
            let delta = sets
                .iter()
                .filter_map(|s| match s {
                    TestSet::IntervalUnion { delta, .. } => Some(*delta),
                    _ => None,
                })
                .fold(f64::INFINITY, f64::min);
            let gamma = interval_union_perimeter_bound(delta)?;
            Ok((
                rounded_general_constant(gamma, 0.5),
                format!("interval unions, delta = {delta}"),
            ))
        }
        BoundConstant::Explicit { k } => {
            if !(k > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "explicit constant must be positive, got {k}"
                )));
            }
            Ok((k, "explicit".into()))
        }
        BoundConstant::Auto => unreachable!(),
    }
}

fn default_true() -> bool {
    true
}

fn default_constant() -> BoundConstant {
    BoundConstant::Auto
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub spec: SummandSpec,
    pub sets: Vec<TestSet>,
    pub samples: u64,
    pub seed: u64,
    /// Enumerate exactly when the atom count permits.
    #[serde(default = "default_true")]
    pub exact: bool,
    #[serde(default = "default_constant")]
    pub constant: BoundConstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl SimulationConfig {
    pub fn method(&self) -> Method {
        match self.spec.atom_count() {
            Some(a) if self.exact && a <= EXACT_ATOM_LIMIT => Method::Exact,
            _ => Method::MonteCarlo,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.sets.is_empty() {
            return Err(Error::InvalidConfig("simulation needs at least one test set".into()));
        }
        for (i, s) in self.sets.iter().enumerate() {
            s.validate()?;
            if s.dim() != self.spec.d as usize {
                return Err(Error::InvalidConfig(format!(
                    "set {i} has dimension {} but the summands have dimension {}",
                    s.dim(),
                    self.spec.d
                )));
            }
        }
        if self.method() == Method::MonteCarlo && self.samples < 10_000 {
            return Err(Error::InvalidConfig(format!(
                "Monte Carlo needs at least 10^4 samples, got {}",
                self.samples
            )));
        }
        resolve_constant(self.constant, self.spec.d, &self.sets)?;
        Ok(())
    }

    /// Number of sampling chunks (zero for exact enumeration).
    pub fn chunk_count(&self) -> u64 {
        match self.method() {
            Method::Exact => 0,
            Method::MonteCarlo => self.samples.div_ceil(CHUNK_SAMPLES),
        }
    }
}

/// A Gaussian measure with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub value: f64,
    pub abs_error: f64,
}

impl Measure {
    fn exact(value: f64) -> Self {
        Measure { value, abs_error: 0.0 }
    }
}

/// `N(0, I_d){A}`.
pub fn normal_measure(set: &TestSet) -> Result<Measure> {
    gaussian_measure(set, None, 1.0)
}

/// `N(μ, σ² I_d){A}`; `mu = None` means the origin.
pub fn gaussian_measure(set: &TestSet, mu: Option<&[f64]>, sigma: f64) -> Result<Measure> {
    if !(sigma > 0.0) {
        return Err(Error::domain("sigma must be positive", sigma));
    }
    let d = set.dim();
    let zero = alloc::vec![0.0; d];
    let mu = mu.unwrap_or(&zero);
    if mu.len() != d {
        return Err(Error::InvalidConfig(format!(
            "mean has dimension {} but the set has {d}",
            mu.len()
        )));
    }
    match set {
        TestSet::HalfSpace { normal, offset } => {
            let shift: f64 = normal.iter().zip(mu).map(|(a, b)| a * b).sum();
            Ok(Measure::exact(normal_cdf((offset - shift) / sigma)))
        }
        TestSet::IntervalUnion { intervals, .. } => Ok(Measure::exact(interval_measure(intervals, mu[0], sigma))),
        TestSet::Ball { center, radius } => {
            let m = center
                .iter()
                .zip(mu)
                .map(|(c, u)| (c - u) * (c - u))
                .sum::<f64>()
                .sqrt()
                / sigma;
            let r = radius / sigma;
            ball_measure(d as u32, m, r)
        }
    }
}

/// `P(|Z − c| ≤ r)` for `Z ~ N(0, I_d)` and `|c| = m`.
fn ball_measure(d: u32, m: f64, r: f64) -> Result<Measure> {
    if m == 0.0 {
        return Ok(Measure::exact(regularized_lower_gamma(0.5 * d as f64, 0.5 * r * r)));
    }
    if d == 1 {
        return Ok(Measure::exact(normal_interval(m - r, m + r)));
    }
    // |Z − c|² = (Z₁ − m)² + χ²_{d−1}; substitute Z₁ = m + r sin θ
    let a = 0.5 * (d - 1) as f64;
    let q = Quadrature {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    };
    let est = q.integrate(
        |t| {
            let (s, c) = (t.sin(), t.cos());
            let z = m + r * s;
            crate::specialfns::phi(z) * regularized_lower_gamma(a, 0.5 * r * r * c * c) * r * c
        },
        -FRAC_PI_2,
        FRAC_PI_2,
    )?;
    Ok(Measure {
        value: est.value,
        abs_error: est.abs_error,
    })
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut v = 0.0;
    while i > 0 {
        v += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    v
}

/// Randomized quasi-Monte Carlo estimate of `N(0, I_d){B(center, radius)}`:
/// `replicates` randomly shifted Halton point sets of `points / replicates`
/// points each, error = standard error across replicates.
pub fn qmc_ball_measure(center: &[f64], radius: f64, points: u64, replicates: u32, seed: u64) -> Result<Measure> {
    let d = center.len();
    if d == 0 || d > PRIMES.len() {
        return Err(Error::domain("quasi-Monte Carlo supports dimensions 1..=16", d as f64));
    }
    if replicates < 2 || points < replicates as u64 {
        return Err(Error::InvalidConfig(
            "need at least two replicates with one point each".into(),
        ));
    }
    let per = points / replicates as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimates = Vec::with_capacity(replicates as usize);
    let mut z = alloc::vec![0.0; d];
    for _ in 0..replicates {
        let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let mut hits = 0u64;
        for i in 1..=per {
            for k in 0..d {
                let mut u = radical_inverse(i, PRIMES[k]) + shift[k];
                if u >= 1.0 {
                    u -= 1.0;
                }
                z[k] = normal_quantile(u.clamp(1e-300, 1.0 - 1e-16));
            }
            let r2: f64 = z.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            hits += u64::from(r2 <= radius * radius);
        }
        estimates.push(hits as f64 / per as f64);
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let var = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
    Ok(Measure {
        value: mean,
        abs_error: (var / n).sqrt(),
    })
}

/// Wilson score interval `(center, half_width)` at confidence `z`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    (center, half)
}

/// Hit counts of one sampling chunk, one per set.
pub fn simulate_chunk(config: &SimulationConfig, chunk: u64) -> Vec<u64> {
    let spec = &config.spec;
    let start = chunk * CHUNK_SAMPLES;
    let count = CHUNK_SAMPLES.min(config.samples.saturating_sub(start));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(chunk);
    let d = spec.d as usize;
    let mut hits = alloc::vec![0u64; config.sets.len()];
    let mut w = alloc::vec![0.0; d];
    if spec.on_axes() {
        let (p, up, down) = spec.two_point();
        let axes: Vec<(Binomial, f64)> = spec
            .axis_counts()
            .into_iter()
            .map(|m| (Binomial::new(m, p).expect("validated probability"), m as f64))
            .collect();
        for _ in 0..count {
            for (k, (law, m)) in axes.iter().enumerate() {
                let j = law.sample(&mut rng) as f64;
                w[k] = lattice_value(j, *m, up, down);
            }
            tally(&config.sets, &w, &mut hits);
        }
    } else {
        let scale = (d as f64 / spec.n as f64).sqrt();
        let mut u = alloc::vec![0.0; d];
        for _ in 0..count {
            w.iter_mut().for_each(|v| *v = 0.0);
            for _ in 0..spec.n {
                for v in u.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                for (wk, uk) in w.iter_mut().zip(&u) {
                    *wk += scale * uk / len;
                }
            }
            tally(&config.sets, &w, &mut hits);
        }
    }
    hits
}

/// Value of an axis coordinate with `j` upper steps out of `m`.
fn lattice_value(j: f64, m: f64, up: f64, down: f64) -> f64 {
    if up == down {
        // symmetric case kept on the exact lattice (2j − m)/√m
        (2.0 * j - m) * up / m.sqrt()
    } else {
        (j * up - (m - j) * down) / m.sqrt()
    }
}

fn tally(sets: &[TestSet], w: &[f64], hits: &mut [u64]) {
    for (h, s) in hits.iter_mut().zip(sets) {
        *h += u64::from(s.contains(w));
    }
}

fn binomial_pmf(m: u64, p: f64) -> Vec<f64> {
    let mf = m as f64;
    let ln_norm = ln_gamma(mf + 1.0);
    (0..=m)
        .map(|j| {
            let jf = j as f64;
            (ln_norm - ln_gamma(jf + 1.0) - ln_gamma(mf - jf + 1.0) + jf * p.ln() + (mf - jf) * (1.0 - p).ln()).exp()
        })
        .collect()
}

/// `P(W ∈ A)` for every set by enumerating the lattice of atoms.
pub fn exact_probabilities(config: &SimulationConfig) -> Result<Vec<f64>> {
    let spec = &config.spec;
    match spec.atom_count() {
        Some(a) if a <= EXACT_ATOM_LIMIT => {}
        _ => {
            return Err(Error::InvalidConfig(
                "summand law is too rich for exact enumeration".into(),
            ))
        }
    }
    let (p, up, down) = spec.two_point();
    let axes: Vec<Vec<(f64, f64)>> = spec
        .axis_counts()
        .into_iter()
        .map(|m| {
            binomial_pmf(m, p)
                .into_iter()
                .enumerate()
                .map(|(j, pr)| (lattice_value(j as f64, m as f64, up, down), pr))
                .collect()
        })
        .collect();
    let d = axes.len();
    let mut idx = alloc::vec![0usize; d];
    let mut w = alloc::vec![0.0; d];
    let mut probs = alloc::vec![0.0; config.sets.len()];
    loop {
        let mut mass = 1.0;
        for k in 0..d {
            w[k] = axes[k][idx[k]].0;
            mass *= axes[k][idx[k]].1;
        }
        for (pr, s) in probs.iter_mut().zip(&config.sets) {
            if s.contains(&w) {
                *pr += mass;
            }
        }
        let mut k = 0;
        loop {
            if k == d {
                return Ok(probs);
            }
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetResult {
    pub index: usize,
    pub set: TestSet,
    pub probability: f64,
    pub normal: f64,
    pub normal_error: f64,
    pub error: f64,
    /// 99% Wilson half-width of the probability (0 when exact).
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub spec: SummandSpec,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub lyapunov_sum: f64,
    pub constant: f64,
    pub constant_source: String,
    pub bound: f64,
    /// Largest error over the finite set grid ("grid-sup").
    pub grid_sup_error: f64,
    pub grid_sup_index: usize,
    pub grid_sup_half_width: f64,
    /// `max_A (error_A − half_width_A)`, the quantity compared to the bound.
    pub conservative_sup: f64,
    pub verdict: Verdict,
    pub sets: Vec<SetResult>,
}

/// Builds the report from per-set probabilities or pooled hit counts.
pub fn assemble_report(config: &SimulationConfig, hits: Option<&[u64]>) -> Result<SimulationReport> {
    let (constant, constant_source) = resolve_constant(config.constant, config.spec.d, &config.sets)?;
    let method = config.method();
    let probs: Vec<(f64, f64)> = match (method, hits) {
        (Method::Exact, _) => exact_probabilities(config)?.into_iter().map(|p| (p, 0.0)).collect(),
        (Method::MonteCarlo, Some(h)) => {
            if h.len() != config.sets.len() {
                return Err(Error::InvalidConfig("hit counts do not match the set list".into()));
            }
            h.iter()
                .map(|&k| {
                    (
                        k as f64 / config.samples as f64,
                        wilson_interval(k, config.samples, Z_99).1,
                    )
                })
                .collect()
        }
        (Method::MonteCarlo, None) => return Err(Error::InvalidConfig("sampling needs hit counts".into())),
    };
    let mut sets = Vec::with_capacity(config.sets.len());
    for (i, (s, (p, hw))) in config.sets.iter().zip(probs).enumerate() {
        let m = normal_measure(s)?;
        sets.push(SetResult {
            index: i,
            set: s.clone(),
            probability: p,
            normal: m.value,
            normal_error: m.abs_error,
            error: (p - m.value).abs(),
            half_width: hw + m.abs_error,
        });
    }
    let (mut sup, mut at) = (0.0, 0);
    let mut conservative = f64::NEG_INFINITY;
    for r in &sets {
        if r.error > sup {
            sup = r.error;
            at = r.index;
        }
        conservative = conservative.max(r.error - r.half_width);
    }
    let beta = config.spec.lyapunov_sum();
    let bound = constant * beta;
    Ok(SimulationReport {
        spec: config.spec,
        method,
        samples: if method == Method::Exact { 0 } else { config.samples },
        seed: config.seed,
        lyapunov_sum: beta,
        constant,
        constant_source,
        bound,
        grid_sup_error: sup,
        grid_sup_index: at,
        grid_sup_half_width: sets[at].half_width,
        conservative_sup: conservative,
        verdict: if conservative <= bound {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        sets,
    })
}

/// Runs a simulation on the calling thread.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    match config.method() {
        Method::Exact => assemble_report(config, None),
        Method::MonteCarlo => {
            let mut hits = alloc::vec![0u64; config.sets.len()];
            for c in 0..config.chunk_count() {
                for (h, x) in hits.iter_mut().zip(simulate_chunk(config, c)) {
                    *h += x;
                }
            }
            assemble_report(config, Some(&hits))
        }
    }
}

/// Half-lines `(−∞, t]` for each offset.
pub fn half_lines(offsets: &[f64]) -> Vec<TestSet> {
    offsets
        .iter()
        .map(|&t| TestSet::HalfSpace {
            normal: alloc::vec![1.0],
            offset: t,
        })
        .collect()
}

/// `count` half-lines with offsets `k/100` centred on 0; the offsets are
/// computed by one division so that lattice atoms `j/10` are hit exactly.
pub fn half_line_grid(count: usize) -> Vec<TestSet> {
    let first = -((count as i64 - 1) / 2);
    let offsets: Vec<f64> = (0..count as i64).map(|i| (first + i) as f64 / 100.0).collect();
    half_lines(&offsets)
}

/// `count` half-spaces with normals spread around the circle (d = 2) or
/// drawn at random (other d), and offsets in `[−2.5, 2.5]`.
pub fn half_space_grid(d: u32, count: usize, seed: u64) -> Vec<TestSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut n: Vec<f64> = if d == 1 {
                alloc::vec![if i % 2 == 0 { 1.0 } else { -1.0 }]
            } else {
                (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
            };
            let len = n.iter().map(|v| v * v).sum::<f64>().sqrt();
            n.iter_mut().for_each(|v| *v /= len);
            let offset = -2.5 + 5.0 * (i as f64 + 0.5) / count as f64;
            TestSet::HalfSpace { normal: n, offset }
        })
        .collect()
}

/// Balls centred at the origin with radii spread over `(0, 2√d]`.
pub fn origin_ball_grid(d: u32, count: usize) -> Vec<TestSet> {
    let top = 2.0 * (d as f64).sqrt();
    (1..=count)
        .map(|i| TestSet::Ball {
            center: alloc::vec![0.0; d as usize],
            radius: top * i as f64 / count as f64,
        })
        .collect()
}

/// One row of the annulus check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRow {
    pub epsilon: f64,
    /// `N(μ, σ²I){A^{ε|ρ} \ A}`.
    pub outer: f64,
    /// `N(μ, σ²I){A \ A^{−ε|ρ}}`.
    pub inner: f64,
    /// Numerical error allowance on both measures.
    pub margin: f64,
    /// `γ* ε / σ`.
    pub limit: f64,
    /// Sampled cross-check of `outer` for `d ≥ 2` (absent in one dimension).
    pub sampled_outer: Option<f64>,
    pub sampled_half_width: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusReport {
    pub set: TestSet,
    pub sigma: f64,
    pub mu: Vec<f64>,
    pub gamma_star_bound: f64,
    pub seed: u64,
    pub rows: Vec<AnnulusRow>,
    /// Largest `max{outer, inner} σ / ε`.
    pub sup_ratio: f64,
    pub pass: bool,
    /// Rows where the sampled cross-check disagrees with the deterministic
    /// value by more than its half-width (99% jointly over all rows) plus
    /// the margin.
    pub cross_check_failures: usize,
}

/// Checks `N(μ, σ²I){A^{ε|ρ} \ A} ≤ γ* ε/σ` and the inner counterpart for
/// every `ε` in the grid.
///
/// Measures of the offset sets are deterministic for all supported classes;
/// in `d ≥ 2`, `samples` Gaussian draws additionally cross-check the outer
/// annulus.
pub fn annulus_inequality_check(
    set: &TestSet,
    sigma: f64,
    mu: &[f64],
    eps_grid: &[f64],
    gamma_star_bound: f64,
    samples: u64,
    seed: u64,
) -> Result<AnnulusReport> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::domain("sigma must lie in (0, 1]", sigma));
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidConfig(
            "epsilon grid must be non-empty and positive".into(),
        ));
    }
    set.validate()?;
    let d = set.dim();
    let base = gaussian_measure(set, Some(mu), sigma)?;
    let measure_of = |o: Offset| -> Result<Measure> {
        match o {
            Offset::Set(b) => gaussian_measure(&b, Some(mu), sigma),
            Offset::Empty => Ok(Measure::exact(0.0)),
            Offset::FullSpace => Ok(Measure::exact(1.0)),
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(eps_grid.len());
    let mut sup_ratio: f64 = 0.0;
    let mut cross = 0;
    let mut z = alloc::vec![0.0; d];
    // Bonferroni: the 99% level holds jointly over the rows
    let z_rows = normal_quantile(1.0 - 0.005 / eps_grid.len().max(1) as f64);
    for &eps in eps_grid {
        let up = measure_of(set.offset(eps))?;
        let down = measure_of(set.offset(-eps))?;
        let outer = (up.value - base.value).max(0.0);
        let inner = (base.value - down.value).max(0.0);
        let margin = 2.0 * base.abs_error + up.abs_error + down.abs_error + 1e-14;
        let limit = gamma_star_bound * eps / sigma;
        let (mut so, mut sh) = (None, None);
        if d >= 2 && samples > 0 {
            let mut hits = 0u64;
            for _ in 0..samples {
                for (k, zk) in z.iter_mut().enumerate() {
                    *zk = mu[k] + sigma * rng.sample::<f64, _>(StandardNormal);
                }
                let r = set.rho(&z);
                hits += u64::from(r > 0.0 && r <= eps);
            }
            let (_, hw) = wilson_interval(hits, samples, z_rows);
            let est = hits as f64 / samples as f64;
            if (est - outer).abs() > hw + margin {
                cross += 1;
            }
            so = Some(est);
            sh = Some(hw);
        }
        sup_ratio = sup_ratio.max(outer.max(inner) * sigma / eps);
        rows.push(AnnulusRow {
            epsilon: eps,
            outer,
            inner,
            margin,
            limit,
            sampled_outer: so,
            sampled_half_width: sh,
            pass: outer - margin <= limit && inner - margin <= limit,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(AnnulusReport {
        set: set.clone(),
        sigma,
        mu: mu.to_vec(),
        gamma_star_bound,
        seed,
        rows,
        sup_ratio,
        pass,
        cross_check_failures: cross,
    })
}
