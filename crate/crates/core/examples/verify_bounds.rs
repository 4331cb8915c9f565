//! Numerical checks of the counting lemma and of the density bounds for
//! mixed graphons and their samples.
//!
//! cargo run --release --example verify_bounds

use gmixup::analysis::{
    check_lemma1, check_theorem1, check_theorem2, collision_probability, random_graphon, Motif,
};
use gmixup::mixup::mix_graphons;
use gmixup::{rng, LabeledGraphon};

fn main() -> gmixup::Result<()> {
    let mut r = rng::from_seed(2024);
    let wg = random_graphon(6, &mut r);
    let wh = random_graphon(6, &mut r);

    for motif in [Motif::edge(), Motif::triangle(), Motif::path3()] {
        let lemma = check_lemma1(&motif, &wg, &wh)?;
        println!("counting lemma, {motif}: {:.5} <= {:.5} ({})", lemma.lhs, lemma.rhs, lemma.satisfied);
        for lambda in [0.1, 0.5, 0.9] {
            let rep = check_theorem1(&wg, &wh, &motif, lambda)?;
            println!(
                "  lambda {lambda}: G side {:.5} <= {:.5}, H side {:.5} <= {:.5}",
                rep.g_side.lhs, rep.g_side.rhs, rep.h_side.lhs, rep.h_side.rhs
            );
        }
    }

    let mixed = mix_graphons(&LabeledGraphon::one_hot(wg, 0, 2)?, &LabeledGraphon::one_hot(wh, 1, 2)?, 0.5)?;
    let rep = check_theorem2(&mixed.graphon, &Motif::triangle(), 800, 0.3, 100, 1)?;
    println!(
        "sampling: {} of {} samples beyond epsilon, bound {:.4}, t(W) = {:.4}, mean t(G) = {:.4}",
        rep.exceedances, rep.trials, rep.bound.rhs, rep.graphon_density, rep.mean_sample_density
    );
    let c = collision_probability(&mixed.graphon);
    println!("collision probability: {:e} (log {:.2})", c.probability, c.log_probability);
    Ok(())
}
