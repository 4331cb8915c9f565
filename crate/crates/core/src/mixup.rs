//! Graphon mixup and W-random graph generation.

use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{resize_to_grid, GraphonMeta, StepGraphon};
use crate::graph::{align_by_degree, BitAdjacency, Graph};
use crate::rng::{self, Rng};

/// A step graphon paired with a soft class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraphon {
    pub graphon: StepGraphon,
    label: Vec<f64>,
}

impl LabeledGraphon {
    pub fn new(graphon: StepGraphon, label: Vec<f64>) -> Result<Self> {
        let sum: f64 = label.iter().sum();
        if label.is_empty() || label.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "label {label:?} is not a probability vector"
            )));
        }
        Ok(LabeledGraphon { graphon, label })
    }

    /// Graphon of class `class` out of `num_classes`, with a one-hot label.
    pub fn one_hot(graphon: StepGraphon, class: usize, num_classes: usize) -> Result<Self> {
        if class >= num_classes {
            return Err(Error::InvalidArgument(format!(
                "class {class} out of range for {num_classes} classes"
            )));
        }
        let mut label = vec![0.0; num_classes];
        label[class] = 1.0;
        LabeledGraphon::new(graphon, label)
    }

    pub fn label(&self) -> &[f64] {
        &self.label
    }

    /// Index of the largest label entry; the first one on ties.
    pub fn hard_label(&self) -> usize {
        argmax(&self.label)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GraphonFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<GraphonFile>(text)?.try_into()
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        LabeledGraphon::from_json(&text)
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in v.iter().enumerate() {
        if p > v[best] {
            best = i;
        }
    }
    best
}

/// On-disk graphon record; matrices are row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphonFile {
    pub k: usize,
    pub d: usize,
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub label: Vec<f64>,
    #[serde(default)]
    pub meta: GraphonMeta,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

impl From<&LabeledGraphon> for GraphonFile {
    fn from(g: &LabeledGraphon) -> Self {
        GraphonFile {
            k: g.graphon.k(),
            d: g.graphon.feature_dim(),
            w: row_major(g.graphon.w()),
            x: row_major(g.graphon.x()),
            label: g.label.clone(),
            meta: g.graphon.meta.clone(),
        }
    }
}

impl TryFrom<GraphonFile> for LabeledGraphon {
    type Error = Error;
    fn try_from(f: GraphonFile) -> Result<Self> {
        if f.w.len() != f.k * f.k || f.x.len() != f.k * f.d {
            return Err(Error::DimensionMismatch(format!(
                "graphon file declares k = {}, d = {} but has {} w and {} x entries",
                f.k,
                f.d,
                f.w.len(),
                f.x.len()
            )));
        }
        let w = DMatrix::from_row_slice(f.k, f.k, &f.w);
        let x = DMatrix::from_row_slice(f.k, f.d, &f.x);
        let graphon = StepGraphon::new(w, x)?.with_meta(f.meta);
        LabeledGraphon::new(graphon, f.label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixupConfig {
    pub lambda: f64,
    pub k: usize,
    pub count: usize,
    pub seed: u64,
}

impl MixupConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(())
    }
}

fn resized(g: &StepGraphon, k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    if g.k() == k {
        (g.w().clone(), g.x().clone())
    } else {
        resize_to_grid(g.w(), g.x(), k)
    }
}

/// `lambda * a + (1 - lambda) * b` on graphon, features and label.
///
/// Graphons of different resolution are first block-resized to the rounded
/// mean of the two resolutions.
pub fn mix_graphons(a: &LabeledGraphon, b: &LabeledGraphon, lambda: f64) -> Result<LabeledGraphon> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    if a.graphon.feature_dim() != b.graphon.feature_dim() {
        return Err(Error::DimensionMismatch(format!(
            "graphon feature dimensions {} and {} differ",
            a.graphon.feature_dim(),
            b.graphon.feature_dim()
        )));
    }
    if a.label.len() != b.label.len() {
        return Err(Error::DimensionMismatch(format!(
            "label lengths {} and {} differ",
            a.label.len(),
            b.label.len()
        )));
    }
    let k = if a.graphon.k() == b.graphon.k() {
        a.graphon.k()
    } else {
        ((a.graphon.k() + b.graphon.k()) as f64 / 2.0).round() as usize
    };
    let (wa, xa) = resized(&a.graphon, k);
    let (wb, xb) = resized(&b.graphon, k);
    let mu = 1.0 - lambda;
    let w = (wa * lambda + wb * mu).map(|v| v.min(1.0));
    let x = xa * lambda + xb * mu;
    let label = a
        .label
        .iter()
        .zip(&b.label)
        .map(|(p, q)| lambda * p + mu * q)
        .collect();
    let meta = GraphonMeta {
        estimator: a.graphon.meta.estimator.clone(),
        ..Default::default()
    };
    let graphon = StepGraphon::new(w, x)?.with_meta(meta);
    LabeledGraphon::new(graphon, label)
}

/// Block of a latent position `u` in `[0, 1)` on a uniform `k`-partition.
#[inline]
pub fn block_index(u: f64, k: usize) -> usize {
    ((u * k as f64) as usize).min(k - 1)
}

/// Draws latent blocks for `n` nodes and then one Bernoulli per unordered
/// pair, in row-major order of `i < j`. Returns the node blocks.
fn sample_pairs(w: &StepGraphon, n: usize, rng: &mut Rng, mut emit: impl FnMut(usize, usize)) -> Vec<usize> {
    let k = w.k();
    let blocks: Vec<usize> = (0..n).map(|_| block_index(rng.random::<f64>(), k)).collect();
    let m = w.w();
    for i in 0..n {
        let bi = blocks[i];
        for j in i + 1..n {
            if rng.random::<f64>() < m[(bi, blocks[j])] {
                emit(i, j);
            }
        }
    }
    blocks
}

pub(crate) fn sample_graph_with(w: &StepGraphon, n: usize, rng: &mut Rng) -> Graph {
    let mut edges = Vec::new();
    let blocks = sample_pairs(w, n, rng, |i, j| edges.push((i, j)));
    let mut g = Graph::from_sorted_unchecked(n, edges);
    g.set_features(Some(w.x().select_rows(blocks.iter())));
    g
}

/// Samples a bitset adjacency from `G(n, W)` with the same draw sequence as
/// [`sample_graph`].
pub fn sample_adjacency(w: &StepGraphon, n: usize, rng: &mut Rng) -> BitAdjacency {
    let mut adj = BitAdjacency::new(n);
    sample_pairs(w, n, rng, |i, j| adj.insert(i, j));
    adj
}

/// One W-random graph on `n` nodes. Node features are copied from the
/// graphon feature row of each node's block.
pub fn sample_graph(w: &StepGraphon, n: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("node count must be at least 1".into()));
    }
    Ok(sample_graph_with(w, n, &mut rng::from_seed(seed)))
}

/// `config.count` independent graphs, graph `i` drawn from child stream `i`
/// of `config.seed`, each paired with the graphon's soft label and labeled
/// with its argmax.
pub fn generate_set(g: &LabeledGraphon, config: &MixupConfig) -> Result<Vec<(Graph, Vec<f64>)>> {
    config.validate()?;
    let hard = g.hard_label();
    Ok((0..config.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::child(config.seed, i as u64);
            let graph = sample_graph_with(&g.graphon, config.k, &mut rng).with_label(hard);
            (graph, g.label.clone())
        })
        .collect())
}

/// Keeps each edge of `g` with the graphon probability at the degree-sorted
/// blocks of its endpoints. No edges are added.
pub fn dropedge_degenerate(g: &Graph, w: &StepGraphon, seed: u64) -> Graph {
    let n = g.node_count();
    let k = w.k();
    let aligned = align_by_degree(g);
    let mut block = vec![0; n];
    for (r, &v) in aligned.permutation.iter().enumerate() {
        block[v] = r * k / n;
    }
    let mut rng = rng::from_seed(seed);
    let m = w.w();
    let kept = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| rng.random::<f64>() < m[(block[a], block[b])])
        .collect();
    g.with_edges_unchecked(kept)
}
