//! Baseline augmenters and dataset corruption protocols.

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};
use crate::rng;

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "{name} must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// Removes each edge independently with probability `p`.
pub fn drop_edge(g: &Graph, p: f64, seed: u64) -> Result<Graph> {
    check_probability("drop probability", p)?;
    let mut r = rng::from_seed(seed);
    let kept = g
        .edges()
        .iter()
        .copied()
        .filter(|_| r.random::<f64>() >= p)
        .collect();
    Ok(g.with_edges_unchecked(kept))
}

/// Removes `ceil(p * n)` uniformly chosen nodes and their edges. Surviving
/// nodes keep their relative order.
pub fn drop_node(g: &Graph, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "node drop ratio must lie in [0, 1), got {p}"
        )));
    }
    let n = g.node_count();
    let remove = (p * n as f64).ceil() as usize;
    if remove >= n {
        return Err(Error::InvalidArgument(format!(
            "dropping {remove} of {n} nodes would leave an empty graph"
        )));
    }
    let mut r = rng::from_seed(seed);
    let mut gone = vec![false; n];
    for v in index::sample(&mut r, n, remove) {
        gone[v] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&v| !gone[v]).collect();
    Ok(g.induced_subgraph(&keep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Probability of jumping back to the start node at each step.
    pub restart: f64,
    /// The walk stops after `stall_factor * n` steps.
    pub stall_factor: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            restart: 0.15,
            stall_factor: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subgraph {
    pub graph: Graph,
    /// Set when the walk hit its step cap before visiting enough nodes.
    pub truncated: bool,
}

/// Random-walk-with-restart subgraph with the default walk parameters.
pub fn subgraph_rw(g: &Graph, keep_ratio: f64, seed: u64) -> Result<Subgraph> {
    subgraph_rw_with(g, keep_ratio, seed, WalkConfig::default())
}

/// Walks from a uniformly chosen start node until `ceil(keep_ratio * n)`
/// distinct nodes are visited, and returns the induced subgraph on them in
/// original node order.
pub fn subgraph_rw_with(g: &Graph, keep_ratio: f64, seed: u64, walk: WalkConfig) -> Result<Subgraph> {
    if !(keep_ratio > 0.0 && keep_ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "keep ratio must lie in (0, 1], got {keep_ratio}"
        )));
    }
    check_probability("restart probability", walk.restart)?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidGraph("cannot walk an empty graph".into()));
    }
    let target = ((keep_ratio * n as f64).ceil() as usize).clamp(1, n);
    let adj = g.neighbors();
    let mut r = rng::from_seed(seed);
    let start = r.random_range(0..n);
    let mut visited = vec![false; n];
    visited[start] = true;
    let mut count = 1;
    let mut current = start;
    let cap = walk.stall_factor.saturating_mul(n);
    let mut steps = 0;
    while count < target && steps < cap {
        steps += 1;
        current = if adj[current].is_empty() || r.random::<f64>() < walk.restart {
            start
        } else {
            adj[current][r.random_range(0..adj[current].len())]
        };
        if !visited[current] {
            visited[current] = true;
            count += 1;
        }
    }
    let nodes: Vec<usize> = (0..n).filter(|&v| visited[v]).collect();
    Ok(Subgraph {
        graph: g.induced_subgraph(&nodes),
        truncated: count < target,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    Label,
    EdgeRemove,
    EdgeAdd,
}

impl std::str::FromStr for CorruptionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "label" => Ok(CorruptionKind::Label),
            "edge_remove" | "edge-remove" => Ok(CorruptionKind::EdgeRemove),
            "edge_add" | "edge-add" => Ok(CorruptionKind::EdgeAdd),
            _ => Err(Error::InvalidArgument(format!("unknown corruption kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub ratio: f64,
    pub seed: u64,
}

/// Applies a corruption protocol to a copy of `dataset`.
///
/// - `Label`: exactly `round(ratio * |D|)` graphs, chosen uniformly, get a
///   uniformly random different label. Soft labels of those graphs become
///   one-hot on the new label.
/// - `EdgeRemove`: every graph loses `round(ratio * |E|)` uniformly chosen
///   edges.
/// - `EdgeAdd`: every graph gains `round(ratio * |E|)` uniformly chosen
///   non-edges.
///
/// Graph `i` draws from child stream `i` of the seed.
pub fn corrupt(dataset: &Dataset, spec: &CorruptionSpec) -> Result<Dataset> {
    check_probability("corruption ratio", spec.ratio)?;
    let mut out = dataset.clone();
    match spec.kind {
        CorruptionKind::Label => {
            let total = out.len();
            let flips = (spec.ratio * total as f64).round() as usize;
            if flips > 0 && out.num_classes < 2 {
                return Err(Error::InvalidArgument(
                    "label corruption needs at least two classes".into(),
                ));
            }
            let mut r = rng::from_seed(spec.seed);
            let mut chosen: Vec<usize> = index::sample(&mut r, total, flips).into_vec();
            chosen.sort_unstable();
            for i in chosen {
                let old = out.graphs[i].label().expect("validated dataset");
                let mut new = r.random_range(0..out.num_classes - 1);
                if new >= old {
                    new += 1;
                }
                out.graphs[i].set_label(Some(new));
                if let Some(soft) = out.soft_labels.as_mut() {
                    soft[i] = vec![0.0; out.num_classes];
                    soft[i][new] = 1.0;
                }
            }
        }
        CorruptionKind::EdgeRemove => {
            for (i, g) in out.graphs.iter_mut().enumerate() {
                let m = g.edge_count();
                let drop = (spec.ratio * m as f64).round() as usize;
                let mut r = rng::child(spec.seed, i as u64);
                let mut gone = vec![false; m];
                for e in index::sample(&mut r, m, drop) {
                    gone[e] = true;
                }
                let kept = g
                    .edges()
                    .iter()
                    .zip(&gone)
                    .filter(|(_, &x)| !x)
                    .map(|(&e, _)| e)
                    .collect();
                *g = g.with_edges_unchecked(kept);
            }
        }
        CorruptionKind::EdgeAdd => {
            for (i, g) in out.graphs.iter_mut().enumerate() {
                let add = (spec.ratio * g.edge_count() as f64).round() as usize;
                let non_edges: Vec<(usize, usize)> = {
                    let n = g.node_count();
                    (0..n)
                        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                        .filter(|&(a, b)| !g.has_edge(a, b))
                        .collect()
                };
                if add > non_edges.len() {
                    return Err(Error::InvalidArgument(format!(
                        "graph {i} has only {} non-edges, cannot add {add}",
                        non_edges.len()
                    )));
                }
                let mut r = rng::child(spec.seed, i as u64);
                let mut edges = g.edges().to_vec();
                edges.extend(index::sample(&mut r, non_edges.len(), add).into_iter().map(|j| non_edges[j]));
                edges.sort_unstable();
                *g = g.with_edges_unchecked(edges);
            }
        }
    }
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drop_edge_extremes() {
        let g = Graph::complete(6);
        assert_eq!(drop_edge(&g, 0.0, 1).unwrap(), g);
        assert_eq!(drop_edge(&g, 1.0, 1).unwrap().edge_count(), 0);
        assert!(drop_edge(&g, 1.5, 1).is_err());
    }

    #[test]
    fn drop_edge_survival_is_binomial() {
        let g = Graph::complete(100);
        let m = g.edge_count() as f64;
        let one = drop_edge(&g, 0.5, 3).unwrap().edge_count() as f64;
        assert!((one - m / 2.0).abs() <= 3.0 * (m * 0.25).sqrt());
        // mean over many trials, sparser graph
        let g = Graph::cycle(40);
        let trials = 1000;
        let mean = (0..trials)
            .map(|s| drop_edge(&g, 0.3, s).unwrap().edge_count() as f64)
            .sum::<f64>()
            / trials as f64;
        let se = (40.0 * 0.3 * 0.7 / trials as f64).sqrt();
        assert!((mean - 28.0).abs() <= 3.0 * se, "{mean}");
    }

    #[test]
    fn drop_node_cases() {
        let g = Graph::path(3);
        assert_eq!(drop_node(&g, 0.0, 3).unwrap(), g);
        assert_eq!(g.induced_subgraph(&[0, 2]).edge_count(), 0);
        let big = Graph::cycle(100);
        assert_eq!(drop_node(&big, 0.5, 3).unwrap().node_count(), 50);
        assert!(drop_node(&Graph::empty(1), 0.5, 0).is_err());
        assert!(drop_node(&big, 1.0, 0).is_err());
    }

    #[test]
    fn drop_node_removes_the_middle_of_a_path() {
        // one node out of three; find a seed that picks node 1
        let g = Graph::path(3);
        let hit = (0..64)
            .map(|s| drop_node(&g, 0.2, s).unwrap())
            .find(|h| h.node_count() == 2 && h.edge_count() == 0)
            .expect("some seed removes the middle node");
        assert_eq!(hit, Graph::empty(2));
    }

    #[test]
    fn subgraph_cases() {
        let g = Graph::cycle(9);
        let s = subgraph_rw(&g, 1.0, 4).unwrap();
        assert_eq!(s.graph, g);
        assert!(!s.truncated);
        let one = subgraph_rw(&Graph::empty(1), 0.5, 0).unwrap();
        assert_eq!(one.graph.node_count(), 1);
        let k5 = subgraph_rw(&Graph::complete(10), 0.5, 7).unwrap();
        assert_eq!(k5.graph, Graph::complete(5));
    }

    #[test]
    fn subgraph_flags_disconnected_shortfall() {
        let g = Graph::empty(10);
        let s = subgraph_rw(&g, 0.5, 1).unwrap();
        assert_eq!(s.graph.node_count(), 1);
        assert!(s.truncated);
    }

    fn two_class(n: usize) -> Dataset {
        let graphs = (0..n).map(|i| Graph::cycle(6).with_label(i % 2)).collect();
        Dataset::new("d", graphs, 2).unwrap()
    }

    #[test]
    fn corrupt_zero_ratio_is_identity() {
        let d = two_class(10);
        for kind in [CorruptionKind::Label, CorruptionKind::EdgeRemove, CorruptionKind::EdgeAdd] {
            assert_eq!(corrupt(&d, &CorruptionSpec { kind, ratio: 0.0, seed: 1 }).unwrap(), d);
        }
    }

    #[test]
    fn label_corruption_flips_exact_count() {
        let d = two_class(50);
        let spec = CorruptionSpec { kind: CorruptionKind::Label, ratio: 0.4, seed: 9 };
        let out = corrupt(&d, &spec).unwrap();
        let flipped = d
            .graphs
            .iter()
            .zip(&out.graphs)
            .filter(|(a, b)| a.label() != b.label())
            .count();
        assert_eq!(flipped, 20);
        assert_eq!(corrupt(&d, &spec).unwrap(), out);
    }

    #[test]
    fn edge_add_and_remove_counts() {
        let g = crate::mixup::sample_graph(&crate::StepGraphon::constant(1, 0.2).unwrap(), 75, 3)
            .unwrap()
            .with_label(0);
        let m = g.edge_count();
        let d = Dataset::new("d", vec![g], 1).unwrap();
        let add = corrupt(&d, &CorruptionSpec { kind: CorruptionKind::EdgeAdd, ratio: 0.1, seed: 2 }).unwrap();
        let expected = (0.1 * m as f64).round() as usize;
        assert_eq!(add.graphs[0].edge_count(), m + expected);
        assert!(Graph::new(75, add.graphs[0].edges().iter().copied()).is_ok());
        let rem = corrupt(&d, &CorruptionSpec { kind: CorruptionKind::EdgeRemove, ratio: 0.1, seed: 2 }).unwrap();
        assert_eq!(rem.graphs[0].edge_count(), m - expected);
    }

    #[test]
    fn edge_add_on_complete_graph_fails() {
        let d = Dataset::new("d", vec![Graph::complete(5).with_label(0)], 1).unwrap();
        let spec = CorruptionSpec { kind: CorruptionKind::EdgeAdd, ratio: 0.5, seed: 0 };
        assert!(corrupt(&d, &spec).is_err());
    }
}
