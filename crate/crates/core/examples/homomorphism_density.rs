//! Homomorphism counts and densities of small motifs.
//!
//! cargo run --example homomorphism_density

use gmixup::analysis::{degree_function, hom_count, hom_density_graph, hom_density_graphon, Motif};
use gmixup::{Graph, StepGraphon};

fn main() -> gmixup::Result<()> {
    let petersen = Graph::new(
        10,
        [
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
        ],
    )?;
    for name in ["node", "edge", "path3", "triangle", "square", "star4"] {
        let m = Motif::named(name).expect("built-in motif");
        println!("{name:>8}: hom = {:>5}, t = {:.5}", hom_count(&m, &petersen), hom_density_graph(&m, &petersen));
    }

    // custom motif in text form: a triangle with a pendant edge
    let paw: Motif = "v=4; 0-1 1-2 2-0 2-3".parse()?;
    let w = StepGraphon::from_fn(6, |x, y| 0.2 + 0.6 * (x * y))?;
    println!("t({paw}, W) = {:.6}", hom_density_graphon(&paw, &w)?);
    println!("degree function: {:.3?}", degree_function(&w));
    Ok(())
}
