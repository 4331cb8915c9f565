//! Step-graphon estimation from a class of graphs.
//!
//! Every estimator starts from the same preprocessing: each graph is aligned
//! by descending degree, its sorted adjacency is block-averaged onto a common
//! `k`-grid, and the grids are averaged across graphs. The estimators differ
//! in how they denoise that empirical-mean matrix:
//!
//! - [`Method::Mean`]: no denoising.
//! - [`Method::Lg`]: block model with boundaries at the largest gaps of the
//!   sorted degree profile.
//! - [`Method::Usvt`]: singular values below `eta * sqrt(k)` are discarded.
//! - [`Method::Sas`]: box-filter smoothing of the sorted matrix.
//!
//! Node features are pooled alongside: each graph's degree-sorted feature
//! rows are block-averaged onto the same grid and averaged across graphs.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{align_by_degree, Graph};

/// Provenance attached to an estimated graphon.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphonMeta {
    pub estimator: Option<String>,
    pub source_class: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Step function on a uniform `k`-partition of `[0, 1]`.
///
/// `w` is the symmetric `k x k` matrix of block edge probabilities and `x` the
/// `k x d` matrix of graphon node features.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    w: DMatrix<f64>,
    x: DMatrix<f64>,
    pub meta: GraphonMeta,
}

impl StepGraphon {
    pub fn new(w: DMatrix<f64>, x: DMatrix<f64>) -> Result<Self> {
        let k = w.nrows();
        if k == 0 || w.ncols() != k {
            return Err(Error::InvalidArgument(format!(
                "graphon matrix must be square and non-empty, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        if x.nrows() != k {
            return Err(Error::DimensionMismatch(format!(
                "feature matrix has {} rows, graphon has k = {k}",
                x.nrows()
            )));
        }
        for i in 0..k {
            for j in 0..k {
                let v = w[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "w[{i}][{j}] = {v} is outside [0, 1]"
                    )));
                }
                if v != w[(j, i)] {
                    return Err(Error::InvalidArgument(format!(
                        "w is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(StepGraphon {
            w,
            x,
            meta: GraphonMeta::default(),
        })
    }

    /// Graphon with a single constant feature column.
    pub fn from_matrix(w: DMatrix<f64>) -> Result<Self> {
        let k = w.nrows();
        StepGraphon::new(w, DMatrix::from_element(k, 1, 1.0))
    }

    pub fn constant(k: usize, p: f64) -> Result<Self> {
        StepGraphon::from_matrix(DMatrix::from_element(k, k, p))
    }

    /// Discretizes a symmetric graphon function at the cell midpoints of a
    /// `k`-grid.
    pub fn from_fn(k: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mid = |i: usize| (i as f64 + 0.5) / k as f64;
        StepGraphon::from_matrix(DMatrix::from_fn(k, k, |i, j| f(mid(i), mid(j))))
    }

    pub fn with_meta(mut self, meta: GraphonMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn k(&self) -> usize {
        self.w.nrows()
    }

    pub fn feature_dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// Builds from matrices already known to satisfy the invariants up to
    /// rounding: symmetrizes and clips `w`.
    pub(crate) fn from_estimate(w: DMatrix<f64>, x: DMatrix<f64>) -> Self {
        let sym = (&w + w.transpose()) * 0.5;
        let w = sym.map(|v| v.clamp(0.0, 1.0));
        StepGraphon {
            w,
            x,
            meta: GraphonMeta::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mean,
    Lg,
    Usvt,
    Sas,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Method::Mean),
            "lg" => Ok(Method::Lg),
            "usvt" => Ok(Method::Usvt),
            "sas" => Ok(Method::Sas),
            _ => Err(Error::InvalidArgument(format!("unknown estimator {s:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mean => "mean",
            Method::Lg => "lg",
            Method::Usvt => "usvt",
            Method::Sas => "sas",
        })
    }
}

/// Grid resolution: a fixed count, or the rounded average node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl KChoice {
    pub fn resolve<'a>(self, graphs: impl IntoIterator<Item = &'a Graph>) -> usize {
        match self {
            KChoice::Fixed(k) => k,
            KChoice::Auto => auto_k(graphs),
        }
    }
}

impl FromStr for KChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KChoice::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(KChoice::Fixed(k)),
            _ => Err(Error::InvalidArgument(format!(
                "k must be \"auto\" or a positive integer, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KChoice::Auto => f.write_str("auto"),
            KChoice::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for KChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KChoice::Auto => s.serialize_str("auto"),
            KChoice::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for KChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            serde_json::Value::Number(n) => match n.as_u64() {
                Some(k) if k >= 1 => Ok(KChoice::Fixed(k as usize)),
                _ => Err(D::Error::custom("k must be a positive integer")),
            },
            other => Err(D::Error::custom(format!("invalid k: {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub method: Method,
    pub k: KChoice,
    pub usvt_eta: f64,
    pub sas_window: usize,
    /// Block count for LG; `None` means `ceil(sqrt(k))`.
    pub lg_blocks: Option<usize>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            method: Method::Lg,
            k: KChoice::Auto,
            usvt_eta: 2.02,
            sas_window: 5,
            lg_blocks: None,
        }
    }
}

impl EstimatorConfig {
    pub fn new(method: Method) -> Self {
        EstimatorConfig {
            method,
            ..Default::default()
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = KChoice::Fixed(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == KChoice::Fixed(0) {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if self.sas_window == 0 || self.sas_window % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "sas_window must be odd and positive, got {}",
                self.sas_window
            )));
        }
        if !(self.usvt_eta.is_finite() && self.usvt_eta >= 0.0) {
            return Err(Error::InvalidArgument("usvt_eta must be finite and >= 0".into()));
        }
        if self.lg_blocks == Some(0) {
            return Err(Error::InvalidArgument("lg_blocks must be at least 1".into()));
        }
        Ok(())
    }
}

/// Rounded mean node count, at least 1.
pub fn auto_k<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> usize {
    let (count, total) = graphs
        .into_iter()
        .fold((0usize, 0usize), |(c, t), g| (c + 1, t + g.node_count()));
    if count == 0 {
        return 1;
    }
    ((total as f64 / count as f64).round() as usize).max(1)
}

/// Source indices that land in each of the `k` target blocks: index `i`
/// goes to block `floor(i * k / n)`. When `k > n` some blocks receive no
/// index; those take the single source cell under their midpoint.
fn block_members(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); k];
    for i in 0..n {
        members[i * k / n].push(i);
    }
    for (a, m) in members.iter_mut().enumerate() {
        if m.is_empty() {
            let mid = ((2 * a + 1) * n) / (2 * k);
            m.push(mid.min(n - 1));
        }
    }
    members
}

/// Block-averages an `n x n` matrix and its `n x d` row features onto a
/// `k`-grid.
pub fn resize_to_grid(
    matrix: &DMatrix<f64>,
    features: &DMatrix<f64>,
    k: usize,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = matrix.nrows();
    assert!(n >= 1 && k >= 1, "resize_to_grid needs n >= 1 and k >= 1");
    assert_eq!(matrix.ncols(), n);
    assert_eq!(features.nrows(), n);
    if n == k {
        return (matrix.clone(), features.clone());
    }
    let members = block_members(n, k);
    // rows first: k x n partial means
    let mut rows = DMatrix::<f64>::zeros(k, n);
    for (a, m) in members.iter().enumerate() {
        for &i in m {
            for j in 0..n {
                rows[(a, j)] += matrix[(i, j)];
            }
        }
        let len = m.len() as f64;
        for j in 0..n {
            rows[(a, j)] /= len;
        }
    }
    let mut out = DMatrix::zeros(k, k);
    for a in 0..k {
        for (b, m) in members.iter().enumerate() {
            let s: f64 = m.iter().map(|&j| rows[(a, j)]).sum();
            out[(a, b)] = s / m.len() as f64;
        }
    }
    let d = features.ncols();
    let mut feats = DMatrix::zeros(k, d);
    for (a, m) in members.iter().enumerate() {
        for c in 0..d {
            let s: f64 = m.iter().map(|&i| features[(i, c)]).sum();
            feats[(a, c)] = s / m.len() as f64;
        }
    }
    (out, feats)
}

/// Resizes a square matrix alone.
pub fn resize_matrix(matrix: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let dummy = DMatrix::zeros(matrix.nrows(), 0);
    resize_to_grid(matrix, &dummy, k).0
}

/// Features of `g`, or a constant column when it has none.
fn features_or_constant(g: &Graph) -> DMatrix<f64> {
    g.features()
        .cloned()
        .unwrap_or_else(|| DMatrix::from_element(g.node_count(), 1, 1.0))
}

fn check_class(graphs: &[&Graph]) -> Result<usize> {
    if graphs.is_empty() {
        return Err(Error::EmptyClass("no graphs to estimate from".into()));
    }
    if let Some(g) = graphs.iter().find(|g| g.node_count() == 0) {
        return Err(Error::InvalidGraph(format!(
            "cannot estimate from a graph with no nodes ({} edges)",
            g.edge_count()
        )));
    }
    let d = graphs[0].feature_dim().unwrap_or(1);
    if graphs.iter().any(|g| g.feature_dim().unwrap_or(1) != d) {
        return Err(Error::DimensionMismatch(
            "graphs in a class must share a feature dimension".into(),
        ));
    }
    Ok(d)
}

const CHUNK: usize = 16;

/// Mean of the aligned, grid-resized adjacency and feature matrices.
///
/// Summation runs over fixed-size chunks in a fixed order, so the result is
/// bit-identical regardless of thread count.
fn mean_aligned(graphs: &[&Graph], k: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let d = check_class(graphs)?;
    let partials: Vec<(DMatrix<f64>, DMatrix<f64>)> = graphs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut w = DMatrix::zeros(k, k);
            let mut x = DMatrix::zeros(k, d);
            for g in chunk {
                let mut aligned = align_by_degree(g);
                let feats = aligned
                    .sorted_features
                    .take()
                    .unwrap_or_else(|| features_or_constant(g));
                let (gw, gx) = resize_to_grid(&aligned.sorted_adjacency, &feats, k);
                w += gw;
                x += gx;
            }
            (w, x)
        })
        .collect();
    let mut w = DMatrix::zeros(k, k);
    let mut x = DMatrix::zeros(k, d);
    for (pw, px) in partials {
        w += pw;
        x += px;
    }
    let m = graphs.len() as f64;
    Ok((w / m, x / m))
}

fn meta(method: Method) -> GraphonMeta {
    GraphonMeta {
        estimator: Some(method.to_string()),
        ..Default::default()
    }
}

/// Plain average of the aligned adjacency matrices.
pub fn empirical_mean_graphon(graphs: &[&Graph], k: usize) -> Result<StepGraphon> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (w, x) = mean_aligned(graphs, k)?;
    Ok(StepGraphon::from_estimate(w, x).with_meta(meta(Method::Mean)))
}

/// Contiguous blocks of `0..k` separated at the largest gaps of `profile`.
///
/// With `blocks == k` every index is its own block. Otherwise only strictly
/// positive gaps are cut, so a flat profile yields a single block.
pub(crate) fn largest_gap_blocks(profile: &[f64], blocks: usize) -> Vec<std::ops::Range<usize>> {
    let k = profile.len();
    if blocks >= k {
        return (0..k).map(|i| i..i + 1).collect();
    }
    let mut gaps: Vec<(f64, usize)> = profile
        .windows(2)
        .enumerate()
        .map(|(i, w)| ((w[0] - w[1]).abs(), i + 1))
        .collect();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut cuts: Vec<usize> = gaps
        .iter()
        .take(blocks - 1)
        .filter(|(g, _)| *g > 0.0)
        .map(|&(_, i)| i)
        .collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for c in cuts {
        out.push(start..c);
        start = c;
    }
    out.push(start..k);
    out
}

/// Mean of `m` over a block pair, leaving out diagonal cells unless the
/// pair contains nothing else.
fn block_mean(m: &DMatrix<f64>, rows: &std::ops::Range<usize>, cols: &std::ops::Range<usize>) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    let (mut dsum, mut dcount) = (0.0, 0usize);
    for i in rows.clone() {
        for j in cols.clone() {
            if i == j {
                dsum += m[(i, j)];
                dcount += 1;
            } else {
                sum += m[(i, j)];
                count += 1;
            }
        }
    }
    if count > 0 {
        sum / count as f64
    } else {
        dsum / dcount as f64
    }
}

/// Largest-gap block model.
pub fn estimate_lg(graphs: &[&Graph], config: &EstimatorConfig) -> Result<StepGraphon> {
    config.validate()?;
    check_class(graphs)?;
    let k = config.k.resolve(graphs.iter().copied());
    let blocks = config
        .lg_blocks
        .unwrap_or_else(|| (k as f64).sqrt().ceil() as usize);
    if blocks > k {
        return Err(Error::InvalidArgument(format!(
            "LG block count {blocks} exceeds k = {k}"
        )));
    }
    let (m, x) = mean_aligned(graphs, k)?;
    let profile: Vec<f64> = m.row_iter().map(|r| r.sum()).collect();
    let ranges = largest_gap_blocks(&profile, blocks);
    let mut index = vec![0; k];
    for (b, r) in ranges.iter().enumerate() {
        for i in r.clone() {
            index[i] = b;
        }
    }
    let nb = ranges.len();
    let probs = DMatrix::from_fn(nb, nb, |a, b| block_mean(&m, &ranges[a], &ranges[b]));
    let w = DMatrix::from_fn(k, k, |i, j| probs[(index[i], index[j])]);
    Ok(StepGraphon::from_estimate(w, x).with_meta(meta(Method::Lg)))
}

/// Hard-thresholds the singular values of `m` at `threshold` and rebuilds it.
/// Returns `None` if the decomposition does not converge.
pub(crate) fn singular_value_threshold(m: &DMatrix<f64>, threshold: f64) -> Option<DMatrix<f64>> {
    let svd = m.clone().try_svd(true, true, f64::EPSILON, 10_000)?;
    let mut sigma = svd.singular_values.clone();
    for s in sigma.iter_mut() {
        if *s < threshold {
            *s = 0.0;
        }
    }
    let u = svd.u?;
    let v_t = svd.v_t?;
    Some(u * DMatrix::from_diagonal(&sigma) * v_t)
}

/// Universal singular value thresholding.
pub fn estimate_usvt(graphs: &[&Graph], config: &EstimatorConfig) -> Result<StepGraphon> {
    config.validate()?;
    check_class(graphs)?;
    let k = config.k.resolve(graphs.iter().copied());
    let (m, x) = mean_aligned(graphs, k)?;
    let threshold = config.usvt_eta * (k as f64).sqrt();
    let mut info = meta(Method::Usvt);
    let w = match singular_value_threshold(&m, threshold) {
        Some(w) => w,
        None => {
            log::warn!("USVT: SVD did not converge, using the empirical mean");
            info.warnings
                .push("svd did not converge; fell back to empirical mean".into());
            m
        }
    };
    Ok(StepGraphon::from_estimate(w, x).with_meta(info))
}

/// Mean of `m` over a `window x window` box around each cell, truncated at
/// the borders.
pub(crate) fn box_filter(m: &DMatrix<f64>, window: usize) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let h = window / 2;
    // summed-area table with a zero border
    let mut sat = DMatrix::<f64>::zeros(r + 1, c + 1);
    for i in 0..r {
        for j in 0..c {
            sat[(i + 1, j + 1)] = m[(i, j)] + sat[(i, j + 1)] + sat[(i + 1, j)] - sat[(i, j)];
        }
    }
    DMatrix::from_fn(r, c, |i, j| {
        let (i0, i1) = (i.saturating_sub(h), (i + h + 1).min(r));
        let (j0, j1) = (j.saturating_sub(h), (j + h + 1).min(c));
        let s = sat[(i1, j1)] - sat[(i0, j1)] - sat[(i1, j0)] + sat[(i0, j0)];
        s / ((i1 - i0) * (j1 - j0)) as f64
    })
}

/// Sort-and-smooth with a box filter standing in for total-variation
/// denoising.
pub fn estimate_sas(graphs: &[&Graph], config: &EstimatorConfig) -> Result<StepGraphon> {
    config.validate()?;
    check_class(graphs)?;
    let k = config.k.resolve(graphs.iter().copied());
    let (m, x) = mean_aligned(graphs, k)?;
    let w = box_filter(&m, config.sas_window);
    Ok(StepGraphon::from_estimate(w, x).with_meta(meta(Method::Sas)))
}

/// Runs the estimator selected by `config`.
pub fn estimate(graphs: &[&Graph], config: &EstimatorConfig) -> Result<StepGraphon> {
    config.validate()?;
    match config.method {
        Method::Mean => {
            check_class(graphs)?;
            empirical_mean_graphon(graphs, config.k.resolve(graphs.iter().copied()))
        }
        Method::Lg => estimate_lg(graphs, config),
        Method::Usvt => estimate_usvt(graphs, config),
        Method::Sas => estimate_sas(graphs, config),
    }
}

/// Mean squared error between two equally sized matrices.
pub fn mse(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).map(|v| v * v).mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ones(n: usize, d: usize) -> DMatrix<f64> {
        DMatrix::from_element(n, d, 1.0)
    }

    #[test]
    fn resize_identity_and_constant() {
        let m = DMatrix::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 / 4.0);
        let f = DMatrix::from_fn(5, 2, |i, j| (i + j) as f64);
        let (rm, rf) = resize_to_grid(&m, &f, 5);
        assert_eq!(rm, m);
        assert_eq!(rf, f);
        let (rm, _) = resize_to_grid(&ones(4, 4), &ones(4, 1), 2);
        assert_eq!(rm, ones(2, 2));
    }

    #[test]
    fn resize_two_by_two_to_one() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let (rm, _) = resize_to_grid(&m, &ones(2, 1), 1);
        assert_eq!(rm[(0, 0)], 0.5);
    }

    #[test]
    fn resize_upsamples_by_nearest_cell() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        let f = DMatrix::from_row_slice(2, 1, &[3.0, 5.0]);
        let (rm, rf) = resize_to_grid(&m, &f, 4);
        let expected = DMatrix::from_fn(4, 4, |i, j| m[(i / 2, j / 2)]);
        assert_eq!(rm, expected);
        assert_eq!(rf.as_slice(), &[3.0, 3.0, 5.0, 5.0]);
    }

    #[test]
    fn resize_preserves_mean_when_k_divides_n() {
        let m = DMatrix::from_fn(12, 12, |i, j| ((i * 31 + j * 17) % 11) as f64 / 10.0);
        for k in [1, 2, 3, 4, 6, 12] {
            let r = resize_matrix(&m, k);
            assert_abs_diff_eq!(r.mean(), m.mean(), epsilon = 1e-12);
        }
    }

    #[test]
    fn empirical_mean_single_and_repeated() {
        let g = Graph::complete(4);
        let w = empirical_mean_graphon(&[&g], 4).unwrap();
        let expected = DMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 });
        assert_eq!(w.w(), &expected);
        let h = Graph::path(5);
        let one = empirical_mean_graphon(&[&h], 3).unwrap();
        let two = empirical_mean_graphon(&[&h, &h], 3).unwrap();
        assert_eq!(one.w(), two.w());
        assert!(matches!(
            empirical_mean_graphon(&[], 3),
            Err(Error::EmptyClass(_))
        ));
    }

    #[test]
    fn lg_constant_profile_is_single_block() {
        let g = Graph::complete(6);
        let cfg = EstimatorConfig::new(Method::Lg).with_k(6);
        let w = estimate_lg(&[&g], &cfg).unwrap();
        assert_eq!(w.w(), &ones(6, 6));
    }

    #[test]
    fn lg_with_k_blocks_is_empirical_mean() {
        let graphs = [Graph::path(6), Graph::star(6), Graph::cycle(6)];
        let refs: Vec<&Graph> = graphs.iter().collect();
        let cfg = EstimatorConfig {
            lg_blocks: Some(6),
            ..EstimatorConfig::new(Method::Lg).with_k(6)
        };
        let lg = estimate_lg(&refs, &cfg).unwrap();
        let mean = empirical_mean_graphon(&refs, 6).unwrap();
        assert_eq!(lg.w(), mean.w());
    }

    #[test]
    fn lg_rejects_too_many_blocks() {
        let g = Graph::path(4);
        let cfg = EstimatorConfig {
            lg_blocks: Some(5),
            ..EstimatorConfig::new(Method::Lg).with_k(4)
        };
        assert!(estimate_lg(&[&g], &cfg).is_err());
    }

    #[test]
    fn largest_gap_cuts() {
        let blocks = largest_gap_blocks(&[5.0, 4.9, 2.0, 1.9, 1.8, 0.1], 3);
        assert_eq!(blocks, vec![0..2, 2..5, 5..6]);
    }

    #[test]
    fn svt_rank_one_constant() {
        // Analytic SVD of the constant matrix: one singular value p*k with
        // the all-ones direction, the rest zero.
        let k = 50;
        let m = DMatrix::from_element(k, k, 0.7);
        let r = singular_value_threshold(&m, 2.02 * (k as f64).sqrt()).unwrap();
        for v in r.iter() {
            assert_abs_diff_eq!(*v, 0.7, epsilon = 1e-6);
        }
        let z = singular_value_threshold(&DMatrix::zeros(5, 5), 1.0).unwrap();
        assert_eq!(z, DMatrix::zeros(5, 5));
    }

    #[test]
    fn usvt_zero_graphs_give_zero() {
        let graphs = [Graph::empty(5), Graph::empty(5)];
        let refs: Vec<&Graph> = graphs.iter().collect();
        let w = estimate_usvt(&refs, &EstimatorConfig::new(Method::Usvt)).unwrap();
        assert_eq!(w.w(), &DMatrix::zeros(5, 5));
    }

    #[test]
    fn box_filter_constant_and_impulse() {
        let c = DMatrix::from_element(6, 6, 0.3);
        for v in box_filter(&c, 5).iter() {
            assert_abs_diff_eq!(*v, 0.3, epsilon = 1e-15);
        }
        let mut imp = DMatrix::zeros(5, 5);
        imp[(2, 2)] = 1.0;
        let out = box_filter(&imp, 3);
        for i in 0..5 {
            for j in 0..5 {
                let inside = (1..=3).contains(&i) && (1..=3).contains(&j);
                let expected = if inside { 1.0 / 9.0 } else { 0.0 };
                assert_abs_diff_eq!(out[(i, j)], expected, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn sas_window_must_be_odd() {
        let g = Graph::path(4);
        let cfg = EstimatorConfig {
            sas_window: 4,
            ..EstimatorConfig::new(Method::Sas)
        };
        assert!(estimate_sas(&[&g], &cfg).is_err());
    }

    #[test]
    fn auto_k_rounds_mean() {
        let a = Graph::empty(10);
        let b = Graph::empty(20);
        assert_eq!(auto_k([&a, &b]), 15);
        assert_eq!(auto_k([&Graph::empty(7)]), 7);
        assert_eq!(auto_k(std::iter::empty()), 1);
    }

    #[test]
    fn k_choice_parses_and_serializes() {
        assert_eq!("auto".parse::<KChoice>().unwrap(), KChoice::Auto);
        assert_eq!("12".parse::<KChoice>().unwrap(), KChoice::Fixed(12));
        assert!("0".parse::<KChoice>().is_err());
        let cfg: EstimatorConfig = serde_json::from_str(r#"{"method":"usvt","k":8}"#).unwrap();
        assert_eq!(cfg.k, KChoice::Fixed(8));
        assert_eq!(cfg.sas_window, 5);
        let text = serde_json::to_string(&EstimatorConfig::default()).unwrap();
        assert!(text.contains(r#""k":"auto""#));
    }

    #[test]
    fn step_graphon_invariants() {
        assert!(StepGraphon::from_matrix(DMatrix::from_row_slice(2, 2, &[0., 1., 0., 0.])).is_err());
        assert!(StepGraphon::from_matrix(DMatrix::from_element(2, 2, 1.5)).is_err());
        assert!(StepGraphon::new(DMatrix::zeros(2, 2), DMatrix::zeros(3, 1)).is_err());
    }
}
