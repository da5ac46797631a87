//! JSON configuration of every subcommand. Each report embeds the effective
//! configuration, which parses back to an equal value.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use clt_bounds_core::constants::DEFAULT_BETA_STAR;
use clt_bounds_core::geometry::{TestSet, Variant};
use clt_bounds_core::perimeter::REFERENCE_TABLE;

use crate::error::{CliError, CliResult};

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// SplitMix64 step: decorrelated sub-seeds from one master seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn default_p_grid() -> usize {
    512
}
fn default_r_grid() -> usize {
    2048
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerimeterTableConfig {
    pub dims: Vec<u32>,
    #[serde(default = "default_p_grid")]
    pub p_grid: usize,
    #[serde(default = "default_r_grid")]
    pub r_grid: usize,
}

impl PerimeterTableConfig {
    /// The dimensions of the published table.
    pub fn reference() -> Self {
        PerimeterTableConfig {
            dims: REFERENCE_TABLE.iter().map(|r| r.0).collect(),
            p_grid: default_p_grid(),
            r_grid: default_r_grid(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    /// Class closed under symmetric maps with eigenvalues at least one.
    Affine,
    General,
}

fn default_beta_star() -> f64 {
    DEFAULT_BETA_STAR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantConfig {
    pub gamma_star: f64,
    pub kappa: f64,
    #[serde(default = "default_beta_star")]
    pub beta_star: f64,
    pub mode: ConstantMode,
    #[serde(default)]
    pub gamma0: Option<f64>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingAuditConfig {
    pub variants: Vec<Variant>,
    /// Dimension of half-spaces and balls (interval unions are 1-D).
    pub dim: usize,
    pub family_size: usize,
    pub trials: usize,
    /// Number of randomized `(set, ε)` smoothing profiles.
    pub profiles: usize,
    pub probe_samples: usize,
    #[serde(default = "default_true")]
    pub negative_control: bool,
    /// Explicit sets to audit instead of random families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<TestSet>>,
    pub seed: u64,
}

impl SmoothingAuditConfig {
    pub fn standard(seed: u64) -> Self {
        SmoothingAuditConfig {
            variants: vec![Variant::HalfSpace, Variant::Ball, Variant::IntervalUnion],
            dim: 3,
            family_size: 32,
            trials: 10_000,
            profiles: 20,
            probe_samples: 4000,
            negative_control: true,
            sets: None,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlepianCase {
    pub function: String,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteinCheckConfig {
    pub slepian: Vec<SlepianCase>,
    pub tolerance: f64,
    pub pairing_cases: usize,
    pub pairing_seed: u64,
}

impl SteinCheckConfig {
    pub fn standard() -> Self {
        let functions = ["sin", "tanh_cubic", "bump", "arctan", "gaussian_bump"];
        SteinCheckConfig {
            slepian: functions
                .iter()
                .flat_map(|f| {
                    [4, 8, 12].map(|n| SlepianCase {
                        function: f.to_string(),
                        n,
                    })
                })
                .collect(),
            tolerance: 1e-4,
            pairing_cases: 100,
            pairing_seed: 0,
        }
    }
}

fn default_annulus_samples() -> u64 {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusConfig {
    pub set: TestSet,
    pub sigma: f64,
    /// Mean of the Gaussian; the origin when omitted.
    #[serde(default)]
    pub mu: Option<Vec<f64>>,
    pub eps_grid: Vec<f64>,
    /// Perimeter bound `γ*`; derived from the set class when omitted.
    #[serde(default)]
    pub gamma_star_bound: Option<f64>,
    #[serde(default = "default_annulus_samples")]
    pub samples: u64,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) {
        let text = serde_json::to_string(v).unwrap();
        assert_eq!(&serde_json::from_str::<T>(&text).unwrap(), v);
    }

    #[test]
    fn configs_round_trip() {
        round_trip(&PerimeterTableConfig::reference());
        round_trip(&SmoothingAuditConfig::standard(3));
        round_trip(&SteinCheckConfig::standard());
        round_trip(&ConstantConfig {
            gamma_star: 0.4,
            kappa: 0.5,
            beta_star: 0.03,
            mode: ConstantMode::General,
            gamma0: Some(0.3),
        });
        round_trip(&AnnulusConfig {
            set: TestSet::figure_one(),
            sigma: 0.5,
            mu: Some(vec![0.1]),
            eps_grid: vec![0.5, 0.25],
            gamma_star_bound: None,
            samples: 10,
            seed: 1,
        });
    }

    #[test]
    fn defaults_fill_optional_fields() {
        let c: ConstantConfig = serde_json::from_str(r#"{"gamma_star":0.4,"kappa":1,"mode":"affine"}"#).unwrap();
        assert_eq!(c.beta_star, DEFAULT_BETA_STAR);
        let p: PerimeterTableConfig = serde_json::from_str(r#"{"dims":[3]}"#).unwrap();
        assert_eq!((p.p_grid, p.r_grid), (512, 2048));
        assert!(serde_json::from_str::<PerimeterTableConfig>(r#"{"dims":[3],"typo":1}"#).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 1), derive_seed(1, 2));
        assert_ne!(derive_seed(1, 1), derive_seed(2, 1));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
