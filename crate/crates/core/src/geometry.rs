//! Test sets with generalized signed-distance functions `ρ_A`, their offsets
//! `A^{t|ρ} = {x : ρ_A(x) ≤ t}`, and the `C^{1,1}` smoothed indicators built
//! from them.
//!
//! Three set classes are provided. Half-spaces and balls use the ordinary
//! signed Euclidean distance (`κ = 1`). Unions of intervals on the line whose
//! midpoints are at least `Δ` apart use a smoother function (`κ = 1/2`):
//! linear outside the hull, a parabolic bridge across each gap and a tent of
//! half slope inside each interval, so that `A^{-ε|ρ} = A^{-2ε}`.

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use alloc::format;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::specialfns::{normal_interval, FRAC_1_SQRT_2PI};
use crate::{Error, Result};

const UNIT_NORM_TOL: f64 = 1e-12;

/// A member of one of the supported set classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TestSetRepr", into = "TestSetRepr")]
pub enum TestSet {
    /// `{x : ⟨n, x⟩ ≤ offset}` with unit normal `n`.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Sorted disjoint closed intervals whose midpoints are `≥ delta` apart.
    IntervalUnion { intervals: Vec<[f64; 2]>, delta: f64 },
}

/// Wire form of [`TestSet`]; validated on the way in.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum TestSetRepr {
    HalfSpace { normal: Vec<f64>, offset: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    IntervalUnion { intervals: Vec<[f64; 2]>, delta: f64 },
}

impl TryFrom<TestSetRepr> for TestSet {
    type Error = Error;
    fn try_from(r: TestSetRepr) -> Result<Self> {
        let set = match r {
            TestSetRepr::HalfSpace { normal, offset } => TestSet::HalfSpace { normal, offset },
            TestSetRepr::Ball { center, radius } => TestSet::Ball { center, radius },
            TestSetRepr::IntervalUnion { intervals, delta } => TestSet::IntervalUnion { intervals, delta },
        };
        set.validate()?;
        Ok(set)
    }
}

impl From<TestSet> for TestSetRepr {
    fn from(s: TestSet) -> Self {
        match s {
            TestSet::HalfSpace { normal, offset } => TestSetRepr::HalfSpace { normal, offset },
            TestSet::Ball { center, radius } => TestSetRepr::Ball { center, radius },
            TestSet::IntervalUnion { intervals, delta } => TestSetRepr::IntervalUnion { intervals, delta },
        }
    }
}

/// Result of taking a sublevel set of `ρ_A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "set", rename_all = "snake_case")]
pub enum Offset<S = TestSet> {
    Set(S),
    Empty,
    FullSpace,
}

impl<S> Offset<S> {
    pub fn as_set(&self) -> Option<&S> {
        match self {
            Offset::Set(s) => Some(s),
            _ => None,
        }
    }
}

/// Which class a [`TestSet`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    HalfSpace,
    Ball,
    IntervalUnion,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl TestSet {
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let s = TestSet::HalfSpace { normal, offset };
        s.validate()?;
        Ok(s)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let s = TestSet::Ball { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn interval_union(intervals: Vec<[f64; 2]>, delta: f64) -> Result<Self> {
        let s = TestSet::IntervalUnion { intervals, delta };
        s.validate()?;
        Ok(s)
    }

    /// `[-2, 0] ∪ [2, 5]` with `Δ = 4.5`, the running non-convex example.
    pub fn figure_one() -> Self {
        TestSet::IntervalUnion {
            intervals: alloc::vec![[-2.0, 0.0], [2.0, 5.0]],
            delta: 4.5,
        }
    }

    /// Checks the class invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            TestSet::HalfSpace { normal, offset } => {
                if normal.is_empty() {
                    return Err(Error::InvalidConfig("half-space normal is empty".into()));
                }
                let n = norm(normal);
                if (n - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::InvalidConfig(format!(
                        "half-space normal must have unit norm, got {n}"
                    )));
                }
                if !offset.is_finite() {
                    return Err(Error::InvalidConfig("half-space offset must be finite".into()));
                }
            }
            TestSet::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::InvalidConfig("ball center is empty".into()));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidConfig("ball center must be finite".into()));
                }
            }
            TestSet::IntervalUnion { intervals, delta } => {
                if !(*delta > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "midpoint gap delta must be positive, got {delta}"
                    )));
                }
                if intervals.is_empty() {
                    return Err(Error::InvalidConfig("interval union has no intervals".into()));
                }
                for iv in intervals {
                    if !(iv[0] < iv[1]) || !iv[0].is_finite() || !iv[1].is_finite() {
                        return Err(Error::InvalidConfig(format!(
                            "interval [{}, {}] is not a proper finite interval",
                            iv[0], iv[1]
                        )));
                    }
                }
                for w in intervals.windows(2) {
                    if !(w[0][1] < w[1][0]) {
                        return Err(Error::InvalidConfig(format!(
                            "intervals [{}, {}] and [{}, {}] are not sorted and disjoint",
                            w[0][0], w[0][1], w[1][0], w[1][1]
                        )));
                    }
                    let gap = 0.5 * (w[1][0] + w[1][1]) - 0.5 * (w[0][0] + w[0][1]);
                    if gap < delta * (1.0 - 1e-12) {
                        return Err(Error::InvalidConfig(format!(
                            "midpoints {} and {} are closer than delta = {delta}",
                            0.5 * (w[0][0] + w[0][1]),
                            0.5 * (w[1][0] + w[1][1])
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn variant(&self) -> Variant {
        match self {
            TestSet::HalfSpace { .. } => Variant::HalfSpace,
            TestSet::Ball { .. } => Variant::Ball,
            TestSet::IntervalUnion { .. } => Variant::IntervalUnion,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestSet::HalfSpace { normal, .. } => normal.len(),
            TestSet::Ball { center, .. } => center.len(),
            TestSet::IntervalUnion { .. } => 1,
        }
    }

    /// Class constant `κ` of the gradient-modulus assumption.
    pub fn kappa(&self) -> f64 {
        match self {
            TestSet::HalfSpace { .. } | TestSet::Ball { .. } => 1.0,
            TestSet::IntervalUnion { .. } => 0.5,
        }
    }

    /// Membership decided from the set description, independently of `ρ`.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            TestSet::HalfSpace { normal, offset } => normal.iter().zip(x).map(|(n, v)| n * v).sum::<f64>() <= *offset,
            TestSet::Ball { center, radius } => dist(x, center) <= *radius,
            TestSet::IntervalUnion { intervals, .. } => intervals.iter().any(|iv| iv[0] <= x[0] && x[0] <= iv[1]),
        }
    }

    /// Generalized signed distance `ρ_A(x)`: `≤ 0` on `A`, `≥ 0` off `A`.
    pub fn rho(&self, x: &[f64]) -> f64 {
        match self {
            TestSet::HalfSpace { normal, offset } => normal.iter().zip(x).map(|(n, v)| n * v).sum::<f64>() - offset,
            TestSet::Ball { center, radius } => dist(x, center) - radius,
            TestSet::IntervalUnion { intervals, .. } => interval_union_rho(intervals, x[0]),
        }
    }

    /// `A + y`.
    pub fn translated(&self, y: &[f64]) -> TestSet {
        match self {
            TestSet::HalfSpace { normal, offset } => TestSet::HalfSpace {
                normal: normal.clone(),
                offset: offset + normal.iter().zip(y).map(|(n, v)| n * v).sum::<f64>(),
            },
            TestSet::Ball { center, radius } => TestSet::Ball {
                center: center.iter().zip(y).map(|(c, v)| c + v).collect(),
                radius: *radius,
            },
            TestSet::IntervalUnion { intervals, delta } => TestSet::IntervalUnion {
                intervals: intervals.iter().map(|iv| [iv[0] + y[0], iv[1] + y[0]]).collect(),
                delta: *delta,
            },
        }
    }

    /// `qA = {q x : x ∈ A}` for `q > 0`.
    pub fn scaled(&self, q: f64) -> TestSet {
        match self {
            TestSet::HalfSpace { normal, offset } => TestSet::HalfSpace {
                normal: normal.clone(),
                offset: q * offset,
            },
            TestSet::Ball { center, radius } => TestSet::Ball {
                center: center.iter().map(|c| q * c).collect(),
                radius: q * radius,
            },
            TestSet::IntervalUnion { intervals, delta } => TestSet::IntervalUnion {
                intervals: intervals.iter().map(|iv| [q * iv[0], q * iv[1]]).collect(),
                delta: *delta,
            },
        }
    }

    /// Sublevel set `A^{t|ρ}`.
    ///
    /// Interval unions may have intervals merge (dilation) or vanish
    /// (erosion); the result keeps the original `Δ` and is not re-validated
    /// here, so callers that need class membership should call
    /// [`TestSet::validate`] on it.
    pub fn offset(&self, t: f64) -> Offset {
        match self {
            TestSet::HalfSpace { normal, offset } => Offset::Set(TestSet::HalfSpace {
                normal: normal.clone(),
                offset: offset + t,
            }),
            TestSet::Ball { center, radius } => {
                let r = radius + t;
                // a radius-0 ball is a single point; treated as empty
                if r <= 0.0 {
                    Offset::Empty
                } else {
                    Offset::Set(TestSet::Ball {
                        center: center.clone(),
                        radius: r,
                    })
                }
            }
            TestSet::IntervalUnion { intervals, delta } => match interval_union_offset(intervals, t) {
                Some(ivs) => Offset::Set(TestSet::IntervalUnion {
                    intervals: ivs,
                    delta: *delta,
                }),
                None => Offset::Empty,
            },
        }
    }

    /// Typical length scale, used to size random perturbations.
    pub fn length_scale(&self) -> f64 {
        match self {
            TestSet::HalfSpace { offset, .. } => 1.0 + offset.abs(),
            TestSet::Ball { radius, .. } => *radius,
            TestSet::IntervalUnion { intervals, .. } => {
                let span = intervals[intervals.len() - 1][1] - intervals[0][0];
                span / intervals.len() as f64
            }
        }
    }

    /// Draws a point near the boundary of the set, spread over roughly
    /// `spread` length units on either side, with occasional far points.
    pub fn sample_near<R: Rng + ?Sized>(&self, rng: &mut R, spread: f64) -> Vec<f64> {
        let s = rng.gen_range(-spread..spread);
        let far = rng.gen_bool(0.15);
        match self {
            TestSet::HalfSpace { normal, offset } => {
                let d = normal.len();
                let mut x: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal) * 2.0).collect();
                let along: f64 = normal.iter().zip(&x).map(|(n, v)| n * v).sum();
                let target = offset + if far { 4.0 * s } else { s };
                for (xi, ni) in x.iter_mut().zip(normal) {
                    *xi += (target - along) * ni;
                }
                x
            }
            TestSet::Ball { center, radius } => {
                let d = center.len();
                let mut u: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let n = norm(&u).max(1e-300);
                let rad = if far {
                    rng.gen_range(0.0..(6.0 * radius + 4.0 * spread))
                } else {
                    (radius + s).max(0.0)
                };
                for (ui, ci) in u.iter_mut().zip(center) {
                    *ui = ci + *ui / n * rad;
                }
                u
            }
            TestSet::IntervalUnion { intervals, .. } => {
                let lo = intervals[0][0];
                let hi = intervals[intervals.len() - 1][1];
                if far {
                    let pad = 2.0 * spread + 0.5 * (hi - lo);
                    alloc::vec![rng.gen_range((lo - pad)..(hi + pad))]
                } else {
                    let j = rng.gen_range(0..intervals.len());
                    let end = intervals[j][rng.gen_range(0..2)];
                    alloc::vec![end + s]
                }
            }
        }
    }
}

fn interval_union_rho(intervals: &[[f64; 2]], x: f64) -> f64 {
    let first = intervals[0][0];
    let last = intervals[intervals.len() - 1][1];
    if x >= last {
        return x - last;
    }
    if x <= first {
        return first - x;
    }
    // first interval whose right end is ≥ x
    let j = intervals.partition_point(|iv| iv[1] < x);
    let [a, b] = intervals[j];
    if x >= a {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        -0.5 * (half - (x - mid).abs())
    } else {
        // gap between intervals[j-1] and intervals[j]
        let left = intervals[j - 1][1];
        (x - left) * (a - x) / (a - left)
    }
}

/// Interval endpoints of `{ρ ≤ t}`, or `None` when empty.
fn interval_union_offset(intervals: &[[f64; 2]], t: f64) -> Option<Vec<[f64; 2]>> {
    if t == 0.0 {
        return Some(intervals.to_vec());
    }
    if t < 0.0 {
        // inside an interval ρ is half the distance to the complement
        let e = -2.0 * t;
        let out: Vec<[f64; 2]> = intervals
            .iter()
            .filter_map(|iv| {
                let (a, b) = (iv[0] + e, iv[1] - e);
                (a < b).then_some([a, b])
            })
            .collect();
        return (!out.is_empty()).then_some(out);
    }
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(intervals.len());
    let mut current = [intervals[0][0] - t, intervals[0][1]];
    for w in intervals.windows(2) {
        let gap = w[1][0] - w[0][1];
        if t >= 0.25 * gap {
            // the bridge never exceeds gap/4: merge
            current[1] = w[1][1];
        } else {
            let s = 2.0 * t * gap / (gap + (gap * (gap - 4.0 * t)).sqrt());
            current[1] = w[0][1] + s;
            out.push(current);
            current = [w[1][0] - s, w[1][1]];
        }
    }
    current[1] += t;
    out.push(current);
    Some(out)
}

/// The profile `g`: 1 below 0, `1 − 2u²` on `[0, ½]`, `2(1 − u)²` on
/// `[½, 1]`, 0 above 1. `C¹` with `M₁(g) = 2`, `M₂(g) = 4`.
pub fn smoothing_g(u: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u <= 0.5 {
        1.0 - 2.0 * u * u
    } else if u <= 1.0 {
        2.0 * (1.0 - u) * (1.0 - u)
    } else {
        0.0
    }
}

pub fn smoothing_g_derivative(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else if u <= 0.5 {
        -4.0 * u
    } else {
        -4.0 * (1.0 - u)
    }
}

/// Inverse of `g` on `(0, 1)`.
pub fn smoothing_g_inverse(v: f64) -> f64 {
    if v >= 0.5 {
        ((1.0 - v) / 2.0).sqrt()
    } else {
        1.0 - (v / 2.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingSign {
    /// `f_A^ε`: 1 on `A`, 0 off `A^{ε|ρ}`.
    Outer,
    /// `f_A^{-ε}`: 1 on `A^{-ε|ρ}`, 0 off `A`.
    Inner,
}

/// A smoothed indicator `f_A^{±ε}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingProfile {
    pub set: TestSet,
    pub epsilon: f64,
    pub sign: SmoothingSign,
    /// `A^{-ε|ρ}` for the inner profile.
    #[serde(skip)]
    eroded: Option<Offset>,
}

impl SmoothingProfile {
    pub fn new(set: TestSet, epsilon: f64, sign: SmoothingSign) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::domain("smoothing epsilon must be positive", epsilon));
        }
        set.validate()?;
        let eroded = match sign {
            SmoothingSign::Outer => None,
            SmoothingSign::Inner => Some(set.offset(-epsilon)),
        };
        Ok(SmoothingProfile {
            set,
            epsilon,
            sign,
            eroded,
        })
    }

    /// `f(x)`, always within `[0, 1]`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self.sign {
            SmoothingSign::Outer => smoothing_g(self.set.rho(x) / self.epsilon),
            SmoothingSign::Inner => match self.eroded.as_ref() {
                Some(Offset::Set(b)) => smoothing_g(b.rho(x) / self.epsilon),
                Some(Offset::FullSpace) => 1.0,
                _ => 0.0,
            },
        }
    }

    /// Lipschitz bound `2/ε` on the function.
    pub fn m1_bound(&self) -> f64 {
        2.0 / self.epsilon
    }

    /// Lipschitz bound `4(1+κ)/ε²` on the gradient.
    pub fn m2_bound(&self) -> f64 {
        4.0 * (1.0 + self.set.kappa()) / (self.epsilon * self.epsilon)
    }

    /// Set whose `ρ` drives the profile (`A` or `A^{-ε|ρ}`).
    fn driver(&self) -> Option<&TestSet> {
        match self.sign {
            SmoothingSign::Outer => Some(&self.set),
            SmoothingSign::Inner => self.eroded.as_ref().and_then(Offset::as_set),
        }
    }
}

/// `f_A^{±ε}(x)` for a profile.
pub fn smooth_indicator(profile: &SmoothingProfile, x: &[f64]) -> f64 {
    profile.value(x)
}

/// Sampled Lipschitz constants of a smoothed indicator and of its gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    pub m1_hat: f64,
    pub m2_hat: f64,
    pub m1_bound: f64,
    pub m2_bound: f64,
    pub samples: usize,
}

fn fd_gradient(profile: &SmoothingProfile, x: &[f64], h: f64, out: &mut [f64]) {
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        probe[k] = x[k] + h;
        let up = profile.value(&probe);
        probe[k] = x[k] - h;
        let down = profile.value(&probe);
        probe[k] = x[k];
        out[k] = (up - down) / (2.0 * h);
    }
}

/// Estimates `M₁` and `M₂` of the profile from random pairs placed around
/// `∂A` and across the smoothing band, with gradients by central differences
/// at step `1e-6 ε`.
pub fn lipschitz_probe(profile: &SmoothingProfile, samples: usize, seed: u64) -> Result<LipschitzEstimate> {
    if samples < 1000 {
        return Err(Error::domain(
            "lipschitz_probe needs at least 1000 samples",
            samples as f64,
        ));
    }
    let eps = profile.epsilon;
    let d = profile.set.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6 * eps;
    let (mut m1, mut m2) = (0.0f64, 0.0f64);
    let mut gx = alloc::vec![0.0; d];
    let mut gy = alloc::vec![0.0; d];
    let driver = profile.driver().cloned();
    for _ in 0..samples {
        let x = match &driver {
            Some(set) => {
                // shift so that ρ/ε covers the band [0, 1] and a margin
                let mut p = set.sample_near(&mut rng, 1.5 * eps);
                if set.variant() == Variant::Ball || set.variant() == Variant::HalfSpace {
                    let r = set.rho(&p);
                    let target = rng.gen_range(-0.5 * eps..1.5 * eps);
                    if r.abs() < 3.0 * eps {
                        shift_along_gradient(set, &mut p, target - r);
                    }
                }
                p
            }
            None => profile.set.sample_near(&mut rng, 2.0 * eps),
        };
        let mut dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = norm(&dir).max(1e-300);
        let step = eps * 10f64.powf(rng.gen_range(-3.0..-0.3));
        for v in dir.iter_mut() {
            *v *= step / n;
        }
        let y: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + b).collect();
        let gap = dist(&x, &y);
        let diff = (profile.value(&x) - profile.value(&y)).abs();
        m1 = m1.max(diff / gap);
        fd_gradient(profile, &x, h, &mut gx);
        fd_gradient(profile, &y, h, &mut gy);
        m2 = m2.max(dist(&gx, &gy) / gap);
    }
    Ok(LipschitzEstimate {
        m1_hat: m1,
        m2_hat: m2,
        m1_bound: profile.m1_bound(),
        m2_bound: profile.m2_bound(),
        samples,
    })
}

/// Moves `x` by `amount` along the normal direction of a convex set.
fn shift_along_gradient(set: &TestSet, x: &mut [f64], amount: f64) {
    match set {
        TestSet::HalfSpace { normal, .. } => {
            for (xi, ni) in x.iter_mut().zip(normal) {
                *xi += amount * ni;
            }
        }
        TestSet::Ball { center, .. } => {
            let r = dist(x, center);
            if r > 1e-12 {
                let scale = ((r + amount).max(0.0)) / r;
                for (xi, ci) in x.iter_mut().zip(center) {
                    *xi = ci + (*xi - ci) * scale;
                }
            }
        }
        TestSet::IntervalUnion { .. } => {}
    }
}

/// `16/√(2π) + 4/Δ`, an upper bound on the generalized Gaussian perimeter of
/// the interval-union class.
pub fn interval_union_perimeter_bound(delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::domain("delta must be positive", delta));
    }
    Ok(16.0 * FRAC_1_SQRT_2PI + 4.0 / delta)
}

/// `N(μ, σ²)` measure of a union of disjoint intervals.
pub fn interval_measure(intervals: &[[f64; 2]], mu: f64, sigma: f64) -> f64 {
    intervals
        .iter()
        .map(|iv| normal_interval((iv[0] - mu) / sigma, (iv[1] - mu) / sigma))
        .sum()
}

/// `N(μ, σ²){A^{ε|ρ} \ A}` and `N(μ, σ²){A \ A^{-ε|ρ}}` for an interval union.
pub fn interval_annuli(set: &TestSet, epsilon: f64, mu: f64, sigma: f64) -> Result<(f64, f64)> {
    let TestSet::IntervalUnion { intervals, .. } = set else {
        return Err(Error::InvalidConfig("interval_annuli needs an interval union".into()));
    };
    let base = interval_measure(intervals, mu, sigma);
    let outer = match set.offset(epsilon) {
        Offset::Set(TestSet::IntervalUnion { intervals, .. }) => interval_measure(&intervals, mu, sigma),
        Offset::FullSpace => 1.0,
        _ => base,
    };
    let inner = match set.offset(-epsilon) {
        Offset::Set(TestSet::IntervalUnion { intervals, .. }) => interval_measure(&intervals, mu, sigma),
        _ => 0.0,
    };
    Ok(((outer - base).max(0.0), (base - inner).max(0.0)))
}

/// `sup_ε max{N{A^{ε|ρ} \ A}, N{A \ A^{-ε|ρ}}} / ε` over `eps_grid`, standard
/// normal, together with the maximizing `ε`.
pub fn interval_annulus_sup(set: &TestSet, eps_grid: &[f64]) -> Result<(f64, f64)> {
    let mut best = (0.0, f64::NAN);
    for &e in eps_grid {
        let (o, i) = interval_annuli(set, e, 0.0, 1.0)?;
        let r = o.max(i) / e;
        if r > best.0 {
            best = (r, e);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig() -> TestSet {
        TestSet::figure_one()
    }

    #[test]
    fn figure_one_rho_values() {
        let a = fig();
        assert!((a.rho(&[1.0]) - 0.5).abs() < 1e-15);
        assert!((a.rho(&[-1.0]) + 0.5).abs() < 1e-15);
        assert!((a.rho(&[3.5]) + 0.75).abs() < 1e-15);
        assert!((a.rho(&[6.0]) - 1.0).abs() < 1e-15);
        assert!((a.rho(&[-3.0]) - 1.0).abs() < 1e-15);
        for &x in &[-2.0, 0.0, 2.0, 5.0] {
            assert!(a.rho(&[x]).abs() < 1e-15);
        }
    }

    #[test]
    fn ball_boundary_rho_is_zero() {
        let b = TestSet::ball(alloc::vec![0.0, 0.0], 1.0).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!(b.rho(&[s, s]).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_sets() {
        assert!(TestSet::half_space(alloc::vec![1.0, 1.0], 0.0).is_err());
        assert!(TestSet::ball(alloc::vec![0.0], 0.0).is_err());
        assert!(TestSet::interval_union(alloc::vec![[0.0, 1.0], [0.5, 2.0]], 0.1).is_err());
        assert!(TestSet::interval_union(alloc::vec![[0.0, 1.0], [1.5, 2.0]], 5.0).is_err());
        assert!(TestSet::interval_union(alloc::vec![[1.0, 1.0]], 1.0).is_err());
        assert!(TestSet::interval_union(alloc::vec![], 1.0).is_err());
    }

    #[test]
    fn ball_offsets() {
        let b = TestSet::ball(alloc::vec![0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(
            b.offset(0.5),
            Offset::Set(TestSet::Ball {
                center: alloc::vec![0.0, 0.0, 0.0],
                radius: 1.5
            })
        );
        assert_eq!(b.offset(-1.0), Offset::Empty);
        assert_eq!(b.offset(-3.0), Offset::Empty);
    }

    #[test]
    fn figure_one_erosion_matches_scan() {
        // erosion by 0.9 is the sublevel set at t = -0.45
        let off = fig().offset(-0.45);
        let Offset::Set(TestSet::IntervalUnion { intervals, .. }) = off else {
            panic!("expected a union")
        };
        assert_eq!(intervals.len(), 2);
        let expected = [[-1.1, -0.9], [2.9, 4.1]];
        for (iv, ex) in intervals.iter().zip(&expected) {
            assert!((iv[0] - ex[0]).abs() < 1e-12 && (iv[1] - ex[1]).abs() < 1e-12);
        }
        // brute-force 1-D scan oracle at step 1e-5
        let a = fig();
        let mut inside = false;
        let mut edges = Vec::new();
        let mut x = -4.0;
        while x <= 7.0 {
            let now = a.rho(&[x]) <= -0.45;
            if now != inside {
                edges.push(x);
                inside = now;
            }
            x += 1e-5;
        }
        assert_eq!(edges.len(), 4);
        let flat = [-1.1, -0.9, 2.9, 4.1];
        for (e, f) in edges.iter().zip(&flat) {
            assert!((e - f).abs() < 2e-5, "{e} vs {f}");
        }
    }

    #[test]
    fn dilation_merges_and_widens() {
        let a = fig();
        // gap is 2, bridge height 0.5
        let Offset::Set(TestSet::IntervalUnion { intervals, .. }) = a.offset(0.5) else {
            panic!()
        };
        assert_eq!(intervals, alloc::vec![[-2.5, 5.5]]);
        let Offset::Set(TestSet::IntervalUnion { intervals, .. }) = a.offset(0.3) else {
            panic!()
        };
        assert_eq!(intervals.len(), 2);
        for iv in &intervals {
            for &e in iv {
                assert!((a.rho(&[e]) - 0.3).abs() < 1e-12, "endpoint {e}");
            }
        }
        assert_eq!(a.offset(-5.0), Offset::Empty);
    }

    #[test]
    fn g_profile_values_and_continuity() {
        assert_eq!(smoothing_g(0.0), 1.0);
        assert_eq!(smoothing_g(1.0), 0.0);
        assert_eq!(smoothing_g(0.5), 0.5);
        assert_eq!(smoothing_g(0.25), 0.875);
        let h = 1e-7;
        for &u in &[0.0, 0.5, 1.0] {
            let left = (smoothing_g(u) - smoothing_g(u - h)) / h;
            let right = (smoothing_g(u + h) - smoothing_g(u)) / h;
            assert!((left - right).abs() < 1e-6, "u={u}");
        }
        for i in 1..100 {
            let v = i as f64 / 100.0;
            assert!((smoothing_g(smoothing_g_inverse(v)) - v).abs() < 1e-14);
        }
    }

    #[test]
    fn smooth_indicator_examples() {
        let b = TestSet::ball(alloc::vec![0.0, 0.0], 1.0).unwrap();
        let p = SmoothingProfile::new(b.clone(), 0.5, SmoothingSign::Outer).unwrap();
        assert!((p.value(&[1.25, 0.0]) - 0.5).abs() < 1e-15);
        assert_eq!(p.value(&[0.3, 0.2]), 1.0);
        let inner = SmoothingProfile::new(b, 2.0, SmoothingSign::Inner).unwrap();
        for &x in &[[0.0, 0.0], [0.5, 0.1], [3.0, 0.0]] {
            assert_eq!(inner.value(&x), 0.0);
        }
        assert!(SmoothingProfile::new(fig(), 0.0, SmoothingSign::Outer).is_err());
    }

    #[test]
    fn inner_profile_vanishes_off_set() {
        let p = SmoothingProfile::new(fig(), 0.3, SmoothingSign::Inner).unwrap();
        let mut x = -4.0;
        while x < 7.0 {
            let v = p.value(&[x]);
            if !fig().contains(&[x]) {
                assert_eq!(v, 0.0, "x={x}");
            }
            if let Some(Offset::Set(b)) = fig().offset(-0.3).into() {
                if b.contains(&[x]) {
                    assert_eq!(v, 1.0);
                }
            }
            x += 1e-3;
        }
    }

    #[test]
    fn lipschitz_probe_rejects_small_sample() {
        let p = SmoothingProfile::new(fig(), 0.3, SmoothingSign::Outer).unwrap();
        assert!(lipschitz_probe(&p, 10, 1).is_err());
    }

    #[test]
    fn lipschitz_probe_examples() {
        let b = TestSet::ball(alloc::vec![0.0, 0.0], 1.0).unwrap();
        let p = SmoothingProfile::new(b, 0.25, SmoothingSign::Outer).unwrap();
        let est = lipschitz_probe(&p, 4000, 7).unwrap();
        assert!(est.m1_hat <= 2.0 / 0.25 * (1.0 + 1e-3));
        assert!(est.m2_hat <= 4.0 * 2.0 / 0.0625 * (1.0 + 1e-2));
        assert!(est.m1_hat > 0.9 * 2.0 / 0.25, "probe should get close: {}", est.m1_hat);

        let h = TestSet::half_space(alloc::vec![0.6, 0.8], 0.3).unwrap();
        let p = SmoothingProfile::new(h, 0.4, SmoothingSign::Outer).unwrap();
        let est = lipschitz_probe(&p, 4000, 8).unwrap();
        assert!(est.m2_hat <= 4.0 / 0.16 * (1.0 + 1e-2), "{}", est.m2_hat);

        let p = SmoothingProfile::new(fig(), 0.3, SmoothingSign::Outer).unwrap();
        let est = lipschitz_probe(&p, 4000, 9).unwrap();
        assert!(est.m2_hat <= 4.0 * 1.5 / 0.09 * (1.0 + 1e-2));
    }

    #[test]
    fn interval_perimeter_bound_examples() {
        let v = interval_union_perimeter_bound(1.0).unwrap();
        assert!((v - 10.383_076_486_422_92).abs() < 1e-10);
        assert!((interval_union_perimeter_bound(1e12).unwrap() - 16.0 * FRAC_1_SQRT_2PI).abs() < 1e-10);
        assert!(interval_union_perimeter_bound(0.0).is_err());
    }
}
