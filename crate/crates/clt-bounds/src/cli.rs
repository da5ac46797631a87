//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use clt_bounds_core::geometry::{TestSet, Variant};
use clt_bounds_core::montecarlo::{
    half_line_grid, half_space_grid, origin_ball_grid, BoundConstant, SimulationConfig, SummandKind, SummandSpec,
};

use crate::commands;
use crate::config::{
    self, AnnulusConfig, ConstantConfig, ConstantMode, PerimeterTableConfig, SlepianCase, SmoothingAuditConfig,
    SteinCheckConfig,
};
use crate::error::{CliError, CliResult};
use crate::output::{Format, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "clt-bounds",
    version,
    about = "Explicit constants for the multivariate Berry-Esseen theorem"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the artifact here (atomically) instead of standard output
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bounds on the Gaussian perimeter of convex sets in R^d
    PerimeterTable(PerimeterTableArgs),
    /// Berry-Esseen constant from a perimeter bound
    Constant(ConstantArgs),
    /// Audit the smoothing assumptions and Lipschitz bounds on random sets
    SmoothingAudit(SmoothingAuditArgs),
    /// Numerical checks of the Slepian interpolation identity and derivative pairings
    SteinCheck(SteinCheckArgs),
    /// Compare a normalized sum with its Gaussian limit on a family of sets
    Simulate(SimulateArgs),
    /// Check the Gaussian annulus inequality for one set
    AnnulusCheck(AnnulusArgs),
}

#[derive(Debug, Args)]
pub struct PerimeterTableArgs {
    /// JSON configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// All dimensions 1..=DMAX
    #[arg(long, conflicts_with_all = ["config", "dims", "reference"])]
    pub dmax: Option<u32>,
    /// Explicit dimensions, comma separated
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["config", "reference"])]
    pub dims: Vec<u32>,
    /// The dimensions of the published table (the default)
    #[arg(long, conflicts_with = "config")]
    pub reference: bool,
    #[arg(long, conflicts_with = "config")]
    pub p_grid: Option<usize>,
    #[arg(long, conflicts_with = "config")]
    pub r_grid: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConstantArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Perimeter bound of the set class
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub gamma_star: Option<f64>,
    /// Smoothing constant of the set class
    #[arg(long, conflicts_with = "config", default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, conflicts_with = "config")]
    pub beta_star: Option<f64>,
    /// Class closed under expanding symmetric linear maps (the default)
    #[arg(long, conflicts_with_all = ["config", "general"])]
    pub affine: bool,
    /// General class
    #[arg(long, conflicts_with = "config")]
    pub general: bool,
    /// Lower bound on the optimal constant (general class only)
    #[arg(long, conflicts_with = "config", requires = "general")]
    pub gamma0: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SmoothingAuditArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Set classes: half_space, ball, interval_union
    #[arg(long, value_delimiter = ',', value_parser = parse_variant, conflicts_with = "config")]
    pub variants: Vec<Variant>,
    #[arg(long, conflicts_with = "config")]
    pub dim: Option<usize>,
    #[arg(long, conflicts_with = "config")]
    pub family_size: Option<usize>,
    #[arg(long, conflicts_with = "config")]
    pub trials: Option<usize>,
    #[arg(long, conflicts_with = "config")]
    pub profiles: Option<usize>,
    #[arg(long, conflicts_with = "config")]
    pub probe_samples: Option<usize>,
    /// Skip the corrupted-kappa control run
    #[arg(long, conflicts_with = "config")]
    pub no_negative_control: bool,
    /// Master seed (overrides the configuration file)
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SteinCheckArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Test functions for the interpolation identity
    #[arg(long, value_delimiter = ',', conflicts_with = "config")]
    pub functions: Vec<String>,
    /// Numbers of summands
    #[arg(long, value_delimiter = ',', conflicts_with = "config")]
    pub n: Vec<u32>,
    #[arg(long, conflicts_with = "config")]
    pub tolerance: Option<f64>,
    /// Number of randomized derivative-pairing cases
    #[arg(long, conflicts_with = "config")]
    pub pairing_cases: Option<usize>,
    /// Seed of the randomized pairing suite (overrides the configuration file)
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    RademacherAxes,
    UniformSphere,
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// `(-inf, t]` for a grid of offsets (d = 1)
    HalfLines,
    /// Random half-spaces through a grid of offsets
    HalfSpaces,
    /// Centred balls over a grid of radii
    OriginBalls,
    /// The two-interval example set (d = 1)
    FigureOne,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "config", default_value_t = KindArg::RademacherAxes)]
    pub kind: KindArg,
    /// Probability of the positive atom of the two-point summand
    #[arg(long, conflicts_with = "config", default_value_t = 0.25)]
    pub p: f64,
    /// Number of summands
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub n: Option<u64>,
    #[arg(long, conflicts_with = "config", default_value_t = 1)]
    pub d: u32,
    #[arg(long, value_enum, conflicts_with = "config", default_value_t = FamilyArg::HalfLines)]
    pub family: FamilyArg,
    /// Number of sets in the family
    #[arg(long, conflicts_with = "config", default_value_t = 64)]
    pub count: usize,
    /// Monte Carlo sample count
    #[arg(long, conflicts_with = "config", default_value_t = 1_000_000)]
    pub samples: u64,
    /// Always sample, even when exact enumeration is possible
    #[arg(long, conflicts_with = "config")]
    pub no_exact: bool,
    /// auto, half-line, convex, interval-union, or a number
    #[arg(long, conflicts_with = "config", default_value = "auto", value_parser = parse_constant)]
    pub constant: BoundConstant,
    /// Master seed (required unless the configuration file has one)
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnnulusArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Test set as JSON, e.g. '{"type":"ball","center":[0,0],"radius":1}'
    #[arg(long, conflicts_with_all = ["config", "figure_one"], value_parser = parse_set)]
    pub set: Option<TestSet>,
    /// Use the two-interval example set
    #[arg(long, conflicts_with = "config")]
    pub figure_one: bool,
    #[arg(long, conflicts_with = "config", default_value_t = 1.0)]
    pub sigma: f64,
    /// Mean, comma separated (origin by default)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "config")]
    pub mu: Vec<f64>,
    /// Smoothing radii, comma separated (default 2^-k, k = 1..=10)
    #[arg(long, value_delimiter = ',', conflicts_with = "config")]
    pub eps: Vec<f64>,
    /// Perimeter bound; derived from the set class when omitted
    #[arg(long, conflicts_with = "config")]
    pub gamma_star: Option<f64>,
    /// Samples of the cross-check
    #[arg(long, conflicts_with = "config", default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown set class {s:?} (expected half_space, ball or interval_union)"))
}

fn parse_set(s: &str) -> Result<TestSet, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

fn parse_constant(s: &str) -> Result<BoundConstant, String> {
    Ok(match s {
        "auto" => BoundConstant::Auto,
        "half-line" => BoundConstant::HalfLine,
        "convex" => BoundConstant::Convex,
        "interval-union" => BoundConstant::IntervalUnion,
        other => {
            let k: f64 = other.parse().map_err(|_| format!("invalid constant {other:?}"))?;
            BoundConstant::Explicit { k }
        }
    })
}

fn need_seed(seed: Option<u64>) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::Usage("a seed is required: pass --seed".into()))
}

fn simulation_config(a: &SimulateArgs) -> CliResult<SimulationConfig> {
    if let Some(path) = &a.config {
        let mut cfg: SimulationConfig = config::load(path)?;
        if let Some(s) = a.seed {
            cfg.seed = s;
        }
        return Ok(cfg);
    }
    let seed = need_seed(a.seed)?;
    let n = a.n.expect("clap enforces --n");
    let kind = match a.kind {
        KindArg::RademacherAxes => SummandKind::RademacherAxes,
        KindArg::UniformSphere => SummandKind::UniformSphere,
        KindArg::TwoPoint => SummandKind::TwoPointAsymmetric { p: a.p },
    };
    let spec = SummandSpec::new(kind, n, a.d)?;
    let sets = match a.family {
        FamilyArg::HalfLines => {
            if a.d != 1 {
                return Err(CliError::Usage("half-lines need --d 1".into()));
            }
            half_line_grid(a.count)
        }
        FamilyArg::HalfSpaces => half_space_grid(a.d, a.count, config::derive_seed(seed, 7)),
        FamilyArg::OriginBalls => origin_ball_grid(a.d, a.count),
        FamilyArg::FigureOne => {
            if a.d != 1 {
                return Err(CliError::Usage("the two-interval set needs --d 1".into()));
            }
            vec![TestSet::figure_one()]
        }
    };
    Ok(SimulationConfig {
        spec,
        sets,
        samples: a.samples,
        seed,
        exact: !a.no_exact,
        constant: a.constant,
    })
}

fn default_eps_grid() -> Vec<f64> {
    (1..=10).map(|k| 0.5f64.powi(k)).collect()
}

/// Runs one parsed command; also reports the seed that was used.
pub fn execute(command: &Command) -> CliResult<(Outcome, &OutputArgs)> {
    Ok(match command {
        Command::PerimeterTable(a) => {
            let cfg = match &a.config {
                Some(p) => config::load(p)?,
                None => {
                    let mut c = PerimeterTableConfig::reference();
                    if let Some(d) = a.dmax {
                        if d == 0 {
                            return Err(CliError::Usage("--dmax must be at least 1".into()));
                        }
                        c.dims = (1..=d).collect();
                    } else if !a.dims.is_empty() {
                        c.dims = a.dims.clone();
                    }
                    c.p_grid = a.p_grid.unwrap_or(c.p_grid);
                    c.r_grid = a.r_grid.unwrap_or(c.r_grid);
                    c
                }
            };
            (commands::perimeter_table(&cfg)?, &a.out)
        }
        Command::Constant(a) => {
            let cfg = match &a.config {
                Some(p) => config::load(p)?,
                None => ConstantConfig {
                    gamma_star: a.gamma_star.expect("clap enforces --gamma-star"),
                    kappa: a.kappa,
                    beta_star: a.beta_star.unwrap_or(clt_bounds_core::constants::DEFAULT_BETA_STAR),
                    mode: if a.general {
                        ConstantMode::General
                    } else {
                        ConstantMode::Affine
                    },
                    gamma0: a.gamma0,
                },
            };
            (commands::constant(&cfg)?, &a.out)
        }
        Command::SmoothingAudit(a) => {
            let cfg = match &a.config {
                Some(p) => {
                    let mut c: SmoothingAuditConfig = config::load(p)?;
                    if let Some(s) = a.seed {
                        c.seed = s;
                    }
                    c
                }
                None => {
                    let mut c = SmoothingAuditConfig::standard(need_seed(a.seed)?);
                    if !a.variants.is_empty() {
                        c.variants = a.variants.clone();
                    }
                    c.dim = a.dim.unwrap_or(c.dim);
                    c.family_size = a.family_size.unwrap_or(c.family_size);
                    c.trials = a.trials.unwrap_or(c.trials);
                    c.profiles = a.profiles.unwrap_or(c.profiles);
                    c.probe_samples = a.probe_samples.unwrap_or(c.probe_samples);
                    c.negative_control = !a.no_negative_control;
                    c
                }
            };
            (commands::smoothing_audit(&cfg)?, &a.out)
        }
        Command::SteinCheck(a) => {
            let mut cfg = match &a.config {
                Some(p) => config::load(p)?,
                None => {
                    let mut c = SteinCheckConfig::standard();
                    if !a.functions.is_empty() || !a.n.is_empty() {
                        let mut fs: Vec<String> = c.slepian.iter().map(|s| s.function.clone()).collect();
                        fs.dedup();
                        if !a.functions.is_empty() {
                            fs = a.functions.clone();
                        }
                        let ns = if a.n.is_empty() { vec![4, 8, 12] } else { a.n.clone() };
                        c.slepian = fs
                            .iter()
                            .flat_map(|f| ns.iter().map(|&n| SlepianCase { function: f.clone(), n }))
                            .collect();
                    }
                    c.tolerance = a.tolerance.unwrap_or(c.tolerance);
                    c.pairing_cases = a.pairing_cases.unwrap_or(c.pairing_cases);
                    c
                }
            };
            if let Some(s) = a.seed {
                cfg.pairing_seed = s;
            }
            (commands::stein_check(&cfg)?, &a.out)
        }
        Command::Simulate(a) => (commands::simulate(&simulation_config(a)?)?, &a.out),
        Command::AnnulusCheck(a) => {
            let cfg = match &a.config {
                Some(p) => {
                    let mut c: AnnulusConfig = config::load(p)?;
                    if let Some(s) = a.seed {
                        c.seed = s;
                    }
                    c
                }
                None => {
                    let set = match (&a.set, a.figure_one) {
                        (Some(s), _) => s.clone(),
                        (None, true) => TestSet::figure_one(),
                        (None, false) => return Err(CliError::Usage("pass --set, --figure-one or --config".into())),
                    };
                    AnnulusConfig {
                        set,
                        sigma: a.sigma,
                        mu: if a.mu.is_empty() { None } else { Some(a.mu.clone()) },
                        eps_grid: if a.eps.is_empty() {
                            default_eps_grid()
                        } else {
                            a.eps.clone()
                        },
                        gamma_star_bound: a.gamma_star,
                        samples: a.samples,
                        seed: need_seed(a.seed)?,
                    }
                }
            };
            (commands::annulus_check(&cfg)?, &a.out)
        }
    })
}
