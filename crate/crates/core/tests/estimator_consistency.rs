use gmixup::estimation::{estimate, mse, EstimatorConfig, Method};
use gmixup::mixup::sample_graph;
use gmixup::{Graph, StepGraphon};

/// Two equal-sized blocks whose expected degrees (0.5 and 0.2) are far
/// apart relative to their spread, so degree sorting recovers the blocks.
fn separated(x: f64, y: f64) -> f64 {
    match (x < 0.5, y < 0.5) {
        (true, true) => 0.9,
        (false, false) => 0.3,
        _ => 0.1,
    }
}

fn samples(w: &StepGraphon, count: usize, n: usize, seed: u64) -> Vec<Graph> {
    (0..count).map(|i| sample_graph(w, n, seed + i as u64).unwrap()).collect()
}

fn mse_of(graphs: &[Graph], config: &EstimatorConfig, k: usize, truth: fn(f64, f64) -> f64) -> f64 {
    let refs: Vec<&Graph> = graphs.iter().collect();
    let est = estimate(&refs, config).unwrap();
    assert_eq!(est.k(), k);
    mse(est.w(), StepGraphon::from_fn(k, truth).unwrap().w())
}

#[test]
fn lg_recovers_well_separated_blocks() {
    let graphs = samples(&StepGraphon::from_fn(2, separated).unwrap(), 200, 100, 10);
    let config = EstimatorConfig {
        lg_blocks: Some(2),
        ..EstimatorConfig::new(Method::Lg).with_k(20)
    };
    let err = mse_of(&graphs, &config, 20, separated);
    assert!(err <= 0.01, "LG MSE {err}");
    let sas = mse_of(&graphs, &EstimatorConfig::new(Method::Sas).with_k(20), 20, separated);
    assert!(sas.is_finite() && sas >= err, "SAS {sas} vs LG {err}");
}

#[test]
fn mean_recovers_well_separated_blocks_at_k2() {
    let graphs = samples(&StepGraphon::from_fn(2, separated).unwrap(), 200, 100, 10);
    let err = mse_of(&graphs, &EstimatorConfig::new(Method::Mean).with_k(2), 2, separated);
    assert!(err <= 0.01, "mean MSE {err}");
}

#[test]
fn usvt_recovers_a_constant_graphon() {
    let truth = |_: f64, _: f64| 0.3;
    let w = StepGraphon::constant(1, 0.3).unwrap();
    let graphs = samples(&w, 200, 60, 40);
    let config = EstimatorConfig::new(Method::Usvt).with_k(60);
    let errs: Vec<f64> = [10, 50, 200]
        .iter()
        .map(|&m| mse_of(&graphs[..m], &config, 60, truth))
        .collect();
    assert!(errs.iter().all(|&e| e <= 0.02), "USVT MSE {errs:?}");
}

#[test]
fn estimators_are_deterministic_and_valid() {
    let graphs = samples(&StepGraphon::from_fn(8, |x, y| x * y).unwrap(), 30, 40, 70);
    let refs: Vec<&Graph> = graphs.iter().collect();
    for method in [Method::Mean, Method::Lg, Method::Usvt, Method::Sas] {
        let config = EstimatorConfig::new(method);
        let a = estimate(&refs, &config).unwrap();
        let b = estimate(&refs, &config).unwrap();
        assert_eq!(a, b, "{method}");
        assert_eq!(a.k(), 40);
        assert_eq!(a.w(), &a.w().transpose(), "{method}");
        assert!(a.w().iter().all(|v| (0.0..=1.0).contains(v)), "{method}");
        assert_eq!(a.x().nrows(), 40);
    }
}
