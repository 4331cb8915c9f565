//! Estimate a class graphon with each estimator and compare against the
//! generating graphon.
//!
//! cargo run --example estimate_graphon

use gmixup::estimation::{estimate, mse, EstimatorConfig, Method};
use gmixup::mixup::sample_graph;
use gmixup::{Graph, StepGraphon};

fn main() -> gmixup::Result<()> {
    // W(x, y) = xy, sorted by decreasing degree becomes (1 - x)(1 - y)
    let truth = StepGraphon::from_fn(200, |x, y| x * y)?;
    let graphs: Vec<Graph> = (0..20).map(|s| sample_graph(&truth, 150, s)).collect::<Result<_, _>>()?;
    let class: Vec<&Graph> = graphs.iter().collect();

    let k = 32;
    let target = StepGraphon::from_fn(k, |x, y| (1.0 - x) * (1.0 - y))?;
    for method in [Method::Mean, Method::Lg, Method::Usvt, Method::Sas] {
        let w = estimate(&class, &EstimatorConfig::new(method).with_k(k))?;
        println!("{method:>5}: mse = {:.5}", mse(w.w(), target.w()));
        for warning in &w.meta.warnings {
            println!("       warning: {warning}");
        }
    }
    Ok(())
}
