//! Baseline augmenters and corruption protocols side by side.
//!
//! cargo run --example augment_baselines

use gmixup::augment::{corrupt, drop_edge, drop_node, subgraph_rw, CorruptionKind, CorruptionSpec};
use gmixup::mixup::{dropedge_degenerate, sample_graph};
use gmixup::{Dataset, StepGraphon};

fn main() -> gmixup::Result<()> {
    let w = StepGraphon::from_fn(4, |x, y| 0.6 - 0.4 * (x - y).abs())?;
    let g = sample_graph(&w, 40, 1)?;
    println!("original: {} nodes, {} edges", g.node_count(), g.edge_count());

    let e = drop_edge(&g, 0.2, 2)?;
    println!("drop_edge(0.2): {} edges", e.edge_count());
    let n = drop_node(&g, 0.2, 3)?;
    println!("drop_node(0.2): {} nodes, {} edges", n.node_count(), n.edge_count());
    let s = subgraph_rw(&g, 0.5, 4)?;
    println!("subgraph(0.5): {} nodes, truncated = {}", s.graph.node_count(), s.truncated);
    let keep = StepGraphon::constant(4, 0.8)?;
    println!("graphon edge perturbation: {} edges", dropedge_degenerate(&g, &keep, 5).edge_count());

    let graphs = (0..20).map(|i| sample_graph(&w, 30, 100 + i).map(|g| g.with_label(i as usize % 2)));
    let ds = Dataset::new("demo", graphs.collect::<Result<_, _>>()?, 2)?;
    for kind in [CorruptionKind::Label, CorruptionKind::EdgeRemove, CorruptionKind::EdgeAdd] {
        let out = corrupt(&ds, &CorruptionSpec { kind, ratio: 0.3, seed: 9 })?;
        let flipped = ds.graphs.iter().zip(&out.graphs).filter(|(a, b)| a.label() != b.label()).count();
        let edges: usize = out.graphs.iter().map(|g| g.edge_count()).sum();
        println!("{kind:?}: {flipped} labels flipped, {edges} edges in total");
    }
    Ok(())
}
