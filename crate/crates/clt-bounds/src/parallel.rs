//! Multi-threaded drivers over the core kernels. Work is split into
//! independently seeded chunks whose results are combined by sums and
//! maxima, so reports do not depend on the number of workers.

use rayon::prelude::*;

use clt_bounds_core::audit::{audit_chunk, AuditReport, SetModel, TRIALS_PER_CHUNK};
use clt_bounds_core::montecarlo::{assemble_report, simulate_chunk, Method, SimulationConfig, SimulationReport};
use clt_bounds_core::perimeter::{gamma_bar_d, PerimeterQuery, PerimeterResult};

use crate::error::{CliError, CliResult};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "CLT_BOUNDS_WORKERS";

/// Thread pool sized from `CLT_BOUNDS_WORKERS`, or rayon's default.
pub fn pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// `γ̄_d` for every query, in input order.
pub fn perimeter_results(queries: &[PerimeterQuery]) -> CliResult<Vec<PerimeterResult>> {
    let out: Result<Vec<_>, _> = pool()?.install(|| queries.par_iter().map(gamma_bar_d).collect());
    Ok(out?)
}

/// Simulation with chunks spread over the pool.
pub fn run_simulation(config: &SimulationConfig) -> CliResult<SimulationReport> {
    config.validate()?;
    if config.method() == Method::Exact {
        return Ok(assemble_report(config, None)?);
    }
    let n_sets = config.sets.len();
    let hits = pool()?.install(|| {
        (0..config.chunk_count())
            .into_par_iter()
            .map(|c| simulate_chunk(config, c))
            .reduce(
                || vec![0u64; n_sets],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    });
    Ok(assemble_report(config, Some(&hits))?)
}

/// Assumption audit with chunks spread over the pool; identical to the
/// sequential core audit for the same seed.
pub fn assumption_audit<S: SetModel + Sync>(family: &[S], trials: usize, seed: u64) -> CliResult<AuditReport> {
    // the core function validates arguments; reuse it for the error cases
    if trials < 1000 || family.is_empty() {
        return Ok(clt_bounds_core::audit::assumption_audit(family, trials, seed)?);
    }
    let chunks: Vec<(u64, usize)> = (0..trials)
        .step_by(TRIALS_PER_CHUNK)
        .enumerate()
        .map(|(i, start)| (i as u64, TRIALS_PER_CHUNK.min(trials - start)))
        .collect();
    let parts: Vec<AuditReport> = pool()?.install(|| {
        chunks
            .par_iter()
            .map(|&(stream, n)| audit_chunk(family, n, seed, stream))
            .collect()
    });
    let mut iter = parts.into_iter();
    let mut rep = iter.next().expect("at least one chunk");
    for p in iter {
        rep.merge(p);
    }
    Ok(rep)
}
