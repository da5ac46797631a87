use clt_bounds_core::montecarlo::{
    assemble_report, half_space_grid, run_simulation, simulate_chunk, BoundConstant, Method, SimulationConfig,
    SummandKind, SummandSpec,
};

fn config() -> SimulationConfig {
    SimulationConfig {
        spec: SummandSpec::new(SummandKind::UniformSphere, 25, 2).unwrap(),
        sets: half_space_grid(2, 12, 4),
        samples: 300_000,
        seed: 17,
        exact: true,
        constant: BoundConstant::Auto,
    }
}

#[test]
fn chunk_order_is_irrelevant() {
    let cfg = config();
    assert_eq!(cfg.method(), Method::MonteCarlo);
    let mut hits = vec![0u64; cfg.sets.len()];
    for c in (0..cfg.chunk_count()).rev() {
        for (h, x) in hits.iter_mut().zip(simulate_chunk(&cfg, c)) {
            *h += x;
        }
    }
    assert_eq!(
        assemble_report(&cfg, Some(&hits)).unwrap(),
        run_simulation(&cfg).unwrap()
    );
}

#[test]
fn seeds_change_samples_not_exact_results() {
    let a = run_simulation(&config()).unwrap();
    let mut other = config();
    other.seed = 18;
    let b = run_simulation(&other).unwrap();
    assert_ne!(a.sets[3].probability, b.sets[3].probability);

    let mut exact = config();
    exact.spec = SummandSpec::new(SummandKind::RademacherAxes, 30, 2).unwrap();
    let x = run_simulation(&exact).unwrap();
    exact.seed = 99;
    let y = run_simulation(&exact).unwrap();
    assert_eq!(x.method, Method::Exact);
    assert_eq!(x.sets, y.sets);
}
