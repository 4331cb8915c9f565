//! Graphon theory, made executable.
//!
//! Homomorphism counts and densities for graphs and step graphons, the cut
//! norm of step kernels, and empirical checkers for the counting lemma, the
//! density-preservation bounds for mixed graphons and their samples, and
//! collision probabilities of W-random graphs.

mod bounds;
mod cutnorm;
mod fsum;
mod hom;
mod motif;

pub use bounds::{
    check_lemma1, check_theorem1, check_theorem2, collision_probability,
    edge_density_consistency, monte_carlo_collision_rate, random_graphon, sample_bernoulli_matrix,
    step_approx_error, BoundReport, Collision, DensityConsistency, Theorem1Report,
    Theorem2Report, DEFAULT_TOLERANCE,
};
pub use cutnorm::{cut_norm_exact, cut_norm_lower_bound, MAX_EXACT_CUT_K};
pub use hom::{
    degree_function, hom_count, hom_count_bits, hom_density_bits, hom_density_graph,
    hom_density_graphon, GRAPHON_TERM_LIMIT,
};
pub use motif::{Motif, MAX_MOTIF_NODES};
