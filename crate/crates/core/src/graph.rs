//! Simple undirected graphs, labeled datasets, and degree-sorted alignment.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Undirected simple graph with optional node features and class label.
///
/// Edges are stored once per unordered pair as `(i, j)` with `i < j`, sorted
/// lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    features: Option<DMatrix<f64>>,
    label: Option<usize>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, out-of-range endpoints and
    /// repeated unordered pairs.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on node {a}")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Graph {
            n,
            edges: out,
            features: None,
            label: None,
        })
    }

    /// Builds from pre-validated sorted edges.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(a, b)| a < b && b < n));
        Graph {
            n,
            edges,
            features: None,
            label: None,
        }
    }

    pub fn empty(n: usize) -> Self {
        Graph::from_sorted_unchecked(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph::from_sorted_unchecked(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Graph::from_sorted_unchecked(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.edges.push((0, n - 1));
            g.edges.sort_unstable();
        }
        g
    }

    /// Star with center 0.
    pub fn star(n: usize) -> Self {
        Graph::from_sorted_unchecked(n, (1..n).map(|i| (0, i)).collect())
    }

    pub fn with_features(mut self, features: DMatrix<f64>) -> Result<Self> {
        if features.nrows() != self.n {
            return Err(Error::InvalidGraph(format!(
                "feature matrix has {} rows, graph has {} nodes",
                features.nrows(),
                self.n
            )));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub(crate) fn set_label(&mut self, label: Option<usize>) {
        self.label = label;
    }

    pub(crate) fn set_features(&mut self, features: Option<DMatrix<f64>>) {
        debug_assert!(features.as_ref().is_none_or(|f| f.nrows() == self.n));
        self.features = features;
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn features(&self) -> Option<&DMatrix<f64>> {
        self.features.as_ref()
    }

    pub fn feature_dim(&self) -> Option<usize> {
        self.features.as_ref().map(|f| f.ncols())
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        a != b && self.edges.binary_search(&key).is_ok()
    }

    /// Edge density `|E| / C(n, 2)`; zero for graphs with fewer than two nodes.
    pub fn edge_density(&self) -> f64 {
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        if pairs == 0 {
            0.0
        } else {
            self.edges.len() as f64 / pairs as f64
        }
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(a, b) in &self.edges {
            m[(a, b)] = 1.0;
            m[(b, a)] = 1.0;
        }
        m
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        degree_sequence(self)
    }

    /// Subgraph induced by `nodes`, renumbered in the order given. Features
    /// follow the nodes; the label is kept.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                let (x, y) = (index[a], index[b]);
                (x != usize::MAX && y != usize::MAX).then(|| (x.min(y), x.max(y)))
            })
            .collect();
        edges.sort_unstable();
        let mut g = Graph::from_sorted_unchecked(nodes.len(), edges);
        g.features = self
            .features
            .as_ref()
            .map(|f| f.select_rows(nodes.iter()));
        g.label = self.label;
        g
    }

    /// Same graph with a different edge set over the same nodes.
    pub(crate) fn with_edges_unchecked(&self, edges: Vec<(usize, usize)>) -> Graph {
        let mut g = Graph::from_sorted_unchecked(self.n, edges);
        g.features = self.features.clone();
        g.label = self.label;
        g
    }
}

/// Number of edges incident to each node.
pub fn degree_sequence(g: &Graph) -> Vec<usize> {
    let mut deg = vec![0; g.n];
    for &(a, b) in &g.edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg
}

/// A graph's adjacency and features reordered by descending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedGraph {
    /// `permutation[r]` is the original id of the node placed at rank `r`.
    pub permutation: Vec<usize>,
    pub sorted_adjacency: DMatrix<f64>,
    pub sorted_features: Option<DMatrix<f64>>,
}

/// Orders nodes by descending degree, ties broken by ascending original id.
pub fn align_by_degree(g: &Graph) -> AlignedGraph {
    let deg = degree_sequence(g);
    let mut permutation: Vec<usize> = (0..g.n).collect();
    permutation.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    let mut rank = vec![0; g.n];
    for (r, &v) in permutation.iter().enumerate() {
        rank[v] = r;
    }
    let mut sorted_adjacency = DMatrix::zeros(g.n, g.n);
    for &(a, b) in &g.edges {
        sorted_adjacency[(rank[a], rank[b])] = 1.0;
        sorted_adjacency[(rank[b], rank[a])] = 1.0;
    }
    let sorted_features = g.features.as_ref().map(|f| f.select_rows(permutation.iter()));
    AlignedGraph {
        permutation,
        sorted_adjacency,
        sorted_features,
    }
}

/// Row-wise bitset adjacency, used by the counting and sampling kernels.
#[derive(Debug, Clone)]
pub struct BitAdjacency {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitAdjacency {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitAdjacency {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn from_graph(g: &Graph) -> Self {
        let mut adj = BitAdjacency::new(g.n);
        for &(a, b) in &g.edges {
            adj.insert(a, b);
        }
        adj
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
        self.bits[b * self.words + a / 64] |= 1 << (a % 64);
    }

    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        let total: u64 = self.bits.iter().map(|w| w.count_ones() as u64).sum();
        (total / 2) as usize
    }

    pub fn to_graph(&self) -> Graph {
        let mut edges = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.contains(a, b) {
                    edges.push((a, b));
                }
            }
        }
        Graph::from_sorted_unchecked(self.n, edges)
    }
}

/// Ordered collection of labeled graphs.
///
/// `label_values[c]` is the raw label that dense class `c` was read from.
/// `soft_labels`, when present, holds one length-`num_classes` probability
/// row per graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub num_classes: usize,
    pub label_values: Vec<i64>,
    pub soft_labels: Option<Vec<Vec<f64>>>,
    /// Set when the features are the constant column synthesized for a
    /// featureless input; such features are not written back out.
    pub features_synthesized: bool,
}

impl Dataset {
    /// Builds a dataset whose raw labels are the dense class indices.
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>, num_classes: usize) -> Result<Self> {
        let ds = Dataset {
            name: name.into(),
            graphs,
            num_classes,
            label_values: (0..num_classes as i64).collect(),
            soft_labels: None,
            features_synthesized: false,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.label_values.len() != self.num_classes {
            return Err(Error::InvalidDataset(format!(
                "{} label values for {} classes",
                self.label_values.len(),
                self.num_classes
            )));
        }
        let mut dim = None;
        for (i, g) in self.graphs.iter().enumerate() {
            match g.label {
                Some(c) if c < self.num_classes => {}
                Some(c) => {
                    return Err(Error::InvalidDataset(format!(
                        "graph {i} has label {c}, expected < {}",
                        self.num_classes
                    )))
                }
                None => return Err(Error::InvalidDataset(format!("graph {i} has no label"))),
            }
            let d = g.feature_dim();
            if i == 0 {
                dim = d;
            } else if d != dim {
                return Err(Error::InvalidDataset(format!(
                    "graph {i} has feature dimension {d:?}, expected {dim:?}"
                )));
            }
        }
        if let Some(soft) = &self.soft_labels {
            if soft.len() != self.graphs.len() {
                return Err(Error::InvalidDataset(format!(
                    "{} soft labels for {} graphs",
                    soft.len(),
                    self.graphs.len()
                )));
            }
            for (i, row) in soft.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                if row.len() != self.num_classes
                    || row.iter().any(|&p| p < 0.0)
                    || (sum - 1.0).abs() > 1e-9
                {
                    return Err(Error::InvalidDataset(format!(
                        "soft label of graph {i} is not a distribution over {} classes",
                        self.num_classes
                    )));
                }
            }
        }
        Ok(())
    }

    /// Graphs whose hard label is `class`, in dataset order.
    pub fn class_graphs(&self, class: usize) -> Vec<&Graph> {
        self.graphs
            .iter()
            .filter(|g| g.label == Some(class))
            .collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for g in &self.graphs {
            if let Some(c) = g.label {
                counts[c] += 1;
            }
        }
        counts
    }

    pub fn average_node_count(&self) -> f64 {
        if self.graphs.is_empty() {
            return 0.0;
        }
        self.graphs.iter().map(|g| g.n as f64).sum::<f64>() / self.graphs.len() as f64
    }

    /// Soft label of graph `i`: the stored row, or one-hot of its hard label.
    pub fn soft_label(&self, i: usize) -> Vec<f64> {
        if let Some(soft) = &self.soft_labels {
            return soft[i].clone();
        }
        let mut row = vec![0.0; self.num_classes];
        if let Some(c) = self.graphs[i].label {
            row[c] = 1.0;
        }
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn permuted_adjacency(g: &Graph, perm: &[usize]) -> DMatrix<f64> {
        let a = g.adjacency_matrix();
        DMatrix::from_fn(g.n, g.n, |r, c| a[(perm[r], perm[c])])
    }

    #[test]
    fn constructor_rejects_bad_edges() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        let g = Graph::new(3, [(2, 0), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn degree_sequences() {
        assert_eq!(Graph::complete(3).degree_sequence(), vec![2, 2, 2]);
        assert_eq!(Graph::path(3).degree_sequence(), vec![1, 2, 1]);
        assert_eq!(Graph::star(4).degree_sequence(), vec![3, 1, 1, 1]);
    }

    #[test]
    fn align_path_matches_enumerated_rule() {
        let g = Graph::path(3);
        // Oracle: among all 3! orders keep those with non-increasing row sums,
        // then take the lexicographically smallest (the ascending-id tie rule).
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let deg = g.degree_sequence();
        let valid: Vec<_> = perms
            .iter()
            .filter(|p| p.windows(2).all(|w| deg[w[0]] >= deg[w[1]]))
            .filter(|p| {
                p.windows(2)
                    .all(|w| deg[w[0]] != deg[w[1]] || w[0] < w[1])
            })
            .collect();
        assert_eq!(valid.len(), 1);
        let aligned = align_by_degree(&g);
        assert_eq!(aligned.permutation, valid[0].to_vec());
        assert_eq!(aligned.permutation, vec![1, 0, 2]);
        let expected = DMatrix::from_row_slice(3, 3, &[0., 1., 1., 1., 0., 0., 1., 0., 0.]);
        assert_eq!(aligned.sorted_adjacency, expected);
    }

    #[test]
    fn align_regular_and_star() {
        assert_eq!(align_by_degree(&Graph::cycle(5)).permutation, vec![0, 1, 2, 3, 4]);
        let star = Graph::new(4, [(3, 0), (3, 1), (3, 2)]).unwrap();
        assert_eq!(align_by_degree(&star).permutation[0], 3);
    }

    #[test]
    fn align_permutes_features() {
        let f = DMatrix::from_row_slice(3, 1, &[10.0, 20.0, 30.0]);
        let g = Graph::path(3).with_features(f).unwrap();
        let aligned = align_by_degree(&g);
        assert_eq!(
            aligned.sorted_features.unwrap().as_slice(),
            &[20.0, 10.0, 30.0]
        );
    }

    #[test]
    fn induced_subgraph_renumbers() {
        let g = Graph::path(3);
        let sub = g.induced_subgraph(&[0, 2]);
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 0);
        let sub = Graph::complete(4).induced_subgraph(&[3, 1]);
        assert_eq!(sub.edges(), &[(0, 1)]);
    }

    #[test]
    fn dataset_validation() {
        let g = Graph::path(2).with_label(2);
        assert!(Dataset::new("x", vec![g.clone()], 2).is_err());
        assert!(Dataset::new("x", vec![g], 3).is_ok());
        assert!(Dataset::new("x", vec![Graph::path(2)], 1).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec(proptest::bool::ANY, n * (n - 1) / 2).prop_map(move |bits| {
                let mut edges = Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[k] {
                            edges.push((i, j));
                        }
                        k += 1;
                    }
                }
                Graph::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn aligned_rows_are_non_increasing(g in arb_graph()) {
            let aligned = align_by_degree(&g);
            let sums: Vec<f64> = aligned.sorted_adjacency.row_iter().map(|r| r.sum()).collect();
            prop_assert!(sums.windows(2).all(|w| w[0] >= w[1]));
            prop_assert_eq!(&aligned.sorted_adjacency, &permuted_adjacency(&g, &aligned.permutation));
        }

        #[test]
        fn bit_adjacency_round_trips(g in arb_graph()) {
            let bits = BitAdjacency::from_graph(&g);
            prop_assert_eq!(bits.edge_count(), g.edge_count());
            prop_assert_eq!(bits.to_graph(), g);
        }
    }
}
