//! Mix two class graphons and draw labeled synthetic graphs from the
//! mixture.
//!
//! cargo run --example mix_and_sample

use gmixup::analysis::{hom_density_graph, hom_density_graphon, Motif};
use gmixup::mixup::{generate_set, mix_graphons};
use gmixup::{LabeledGraphon, MixupConfig, StepGraphon};
use nalgebra::DMatrix;

fn main() -> gmixup::Result<()> {
    // class 0: two dense communities; class 1: a core-periphery shape
    let communities = StepGraphon::from_matrix(DMatrix::from_row_slice(2, 2, &[0.8, 0.05, 0.05, 0.8]))?;
    let core = StepGraphon::from_matrix(DMatrix::from_row_slice(2, 2, &[0.9, 0.4, 0.4, 0.05]))?;
    let g = LabeledGraphon::one_hot(communities, 0, 2)?;
    let h = LabeledGraphon::one_hot(core, 1, 2)?;

    let mixed = mix_graphons(&g, &h, 0.15)?;
    println!("mixed graphon:{}", mixed.graphon.w());
    println!("soft label: {:?}", mixed.label());

    let config = MixupConfig { lambda: 0.15, k: 60, count: 5, seed: 42 };
    let triangle = Motif::triangle();
    println!("t(triangle, W) = {:.4}", hom_density_graphon(&triangle, &mixed.graphon)?);
    for (i, (graph, label)) in generate_set(&mixed, &config)?.iter().enumerate() {
        println!(
            "graph {i}: {} edges, class {:?}, t(triangle, G) = {:.4}, soft label {label:?}",
            graph.edge_count(),
            graph.label(),
            hom_density_graph(&triangle, graph)
        );
    }
    Ok(())
}
