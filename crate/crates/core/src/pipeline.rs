//! Whole-set and batched augmentation pipelines.
//!
//! Both modes share one code path: the dataset is cut into consecutive
//! batches (a single batch in whole mode), per-class graphons are estimated
//! inside each batch, and every synthetic graph is one mixup event that
//! draws an ordered pair of distinct classes and a mixing weight.

use std::path::PathBuf;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{estimate, EstimatorConfig, GraphonMeta, KChoice};
use crate::graph::{Dataset, Graph};
use crate::mixup::{mix_graphons, sample_graph_with, LabeledGraphon};
use crate::rng;
use crate::tudataset::{load_tu_dataset, save_tu_dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Whole,
    Batch,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole" => Ok(Mode::Whole),
            "batch" => Ok(Mode::Batch),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

/// Settings for [`run_gmixup`] and [`run_gmixup_batch`]. Every field has a
/// default, so a JSON config may list only what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Directory holding the TUDataset files.
    pub dataset: Option<PathBuf>,
    pub name: String,
    pub estimator: EstimatorConfig,
    pub lambda_low: f64,
    pub lambda_high: f64,
    /// Synthetic graphs per original graph.
    pub aug_ratio: f64,
    /// Graphon resolution; `auto` is the mean node count of the whole set.
    /// Overrides `estimator.k`.
    pub k: KChoice,
    /// Node count of generated graphs; `auto` uses the graphon resolution.
    pub sample_k: KChoice,
    pub mode: Mode,
    pub batch_size: usize,
    pub seed: u64,
    /// Output directory; the augmented set is written as `<name>_gmixup`.
    pub output: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dataset: None,
            name: String::new(),
            estimator: EstimatorConfig::default(),
            lambda_low: 0.1,
            lambda_high: 0.2,
            aug_ratio: 0.2,
            k: KChoice::Auto,
            sample_k: KChoice::Auto,
            mode: Mode::Whole,
            batch_size: 128,
            seed: 0,
            output: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.lambda_low, self.lambda_high);
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= lambda_low <= lambda_high <= 1, got [{lo}, {hi}]"
            )));
        }
        if !(self.aug_ratio.is_finite() && self.aug_ratio >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "aug_ratio must be finite and >= 0, got {}",
                self.aug_ratio
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be at least 1".into()));
        }
        if self.k == KChoice::Fixed(0) || self.sample_k == KChoice::Fixed(0) {
            return Err(Error::InvalidArgument("k and sample_k must be at least 1".into()));
        }
        self.estimator.validate()
    }

    pub fn output_name(&self) -> String {
        format!("{}_gmixup", self.name)
    }
}

/// One synthetic graph to be drawn.
struct Event {
    first: usize,
    second: usize,
    lambda: f64,
    seed: u64,
}

/// Splits `total` over the eligible batches: equal shares, remainder to the
/// last eligible batch.
fn quotas(eligible: &[bool], total: usize) -> Vec<usize> {
    let live: Vec<usize> = (0..eligible.len()).filter(|&b| eligible[b]).collect();
    let mut out = vec![0; eligible.len()];
    if let Some(&last) = live.last() {
        let share = total / live.len();
        for &b in &live {
            out[b] = share;
        }
        out[last] += total - share * live.len();
    }
    out
}

fn check_input(dataset: &Dataset) -> Result<()> {
    dataset.validate()?;
    if dataset.num_classes < 2 {
        return Err(Error::InvalidDataset(
            "mixup needs at least two classes".into(),
        ));
    }
    if let Some(c) = dataset.class_counts().iter().position(|&n| n == 0) {
        return Err(Error::EmptyClass(format!("class {c} has no graphs")));
    }
    Ok(())
}

/// Synthetic graphs for one batch, in event order.
fn augment_batch(
    graphs: &[Graph],
    batch: usize,
    quota: usize,
    num_classes: usize,
    estimator: &EstimatorConfig,
    config: &PipelineConfig,
) -> Result<Vec<(Graph, Vec<f64>)>> {
    let present: Vec<usize> = (0..num_classes)
        .filter(|&c| graphs.iter().any(|g| g.label() == Some(c)))
        .collect();
    let graphons: Vec<Option<LabeledGraphon>> = (0..num_classes)
        .into_par_iter()
        .map(|c| {
            let members: Vec<&Graph> = graphs.iter().filter(|g| g.label() == Some(c)).collect();
            if members.is_empty() {
                return Ok(None);
            }
            let mut w = estimate(&members, estimator)?;
            w.meta = GraphonMeta {
                source_class: Some(c),
                ..w.meta
            };
            LabeledGraphon::one_hot(w, c, num_classes).map(Some)
        })
        .collect::<Result<_>>()?;

    let mut r = rng::child(config.seed, batch as u64);
    let events: Vec<Event> = (0..quota)
        .map(|_| {
            let pick = index::sample(&mut r, present.len(), 2);
            let lambda = if config.lambda_low == config.lambda_high {
                config.lambda_low
            } else {
                r.random_range(config.lambda_low..=config.lambda_high)
            };
            Event {
                first: present[pick.index(0)],
                second: present[pick.index(1)],
                lambda,
                seed: rng::next_seed(&mut r),
            }
        })
        .collect();

    events
        .par_iter()
        .map(|e| {
            let a = graphons[e.first].as_ref().expect("class present in batch");
            let b = graphons[e.second].as_ref().expect("class present in batch");
            let mixed = mix_graphons(a, b, e.lambda)?;
            let n = match config.sample_k {
                KChoice::Auto => mixed.graphon.k(),
                KChoice::Fixed(n) => n,
            };
            let mut g = sample_graph_with(&mixed.graphon, n, &mut rng::from_seed(e.seed));
            g.set_label(Some(mixed.hard_label()));
            Ok((g, mixed.label().to_vec()))
        })
        .collect()
}

/// Augments `dataset` with `round(aug_ratio * |S|)` synthetic graphs using
/// batches of `batch_size` consecutive graphs.
///
/// Originals come first and are untouched; the result carries a soft label
/// for every graph. A batch that holds a single class produces nothing and
/// its quota moves to the other batches.
pub fn augment_batched(dataset: &Dataset, config: &PipelineConfig, batch_size: usize) -> Result<Dataset> {
    config.validate()?;
    check_input(dataset)?;
    if batch_size == 0 {
        return Err(Error::InvalidArgument("batch_size must be at least 1".into()));
    }
    let total = (config.aug_ratio * dataset.len() as f64).round() as usize;
    let mut estimator = config.estimator.clone();
    estimator.k = KChoice::Fixed(config.k.resolve(&dataset.graphs));

    let batches: Vec<&[Graph]> = dataset.graphs.chunks(batch_size).collect();
    let eligible: Vec<bool> = batches
        .iter()
        .enumerate()
        .map(|(b, graphs)| {
            let first = graphs[0].label();
            let mixed = graphs.iter().any(|g| g.label() != first);
            if !mixed {
                log::warn!("batch {b} holds a single class; skipping it");
            }
            mixed
        })
        .collect();
    if total > 0 && !eligible.iter().any(|&e| e) {
        return Err(Error::InvalidDataset(
            "every batch holds a single class; try a larger batch size".into(),
        ));
    }
    let quota = quotas(&eligible, total);

    let mut out = dataset.clone();
    let mut soft: Vec<Vec<f64>> = (0..dataset.len()).map(|i| dataset.soft_label(i)).collect();
    let featureless = dataset.graphs.first().is_some_and(|g| g.features().is_none());
    for (b, graphs) in batches.iter().enumerate() {
        if quota[b] == 0 {
            continue;
        }
        log::info!("batch {b}: {} graphs, {} synthetic", graphs.len(), quota[b]);
        for (mut g, label) in augment_batch(graphs, b, quota[b], dataset.num_classes, &estimator, config)? {
            if featureless {
                g.set_features(None);
            }
            out.graphs.push(g);
            soft.push(label);
        }
    }
    out.soft_labels = Some(soft);
    out.validate()?;
    Ok(out)
}

/// Whole-set augmentation: one batch spanning the dataset.
pub fn gmixup(dataset: &Dataset, config: &PipelineConfig) -> Result<Dataset> {
    augment_batched(dataset, config, dataset.len().max(1))
}

fn load(config: &PipelineConfig) -> Result<Dataset> {
    let root = config
        .dataset
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("no dataset directory given".into()))?;
    load_tu_dataset(root, &config.name)
}

fn store(config: &PipelineConfig, out: &Dataset) -> Result<()> {
    if let Some(dir) = &config.output {
        save_tu_dataset(out, dir, &config.output_name())?;
    }
    Ok(())
}

/// Loads the configured dataset, augments it in whole mode and writes the
/// result when an output directory is set.
pub fn run_gmixup(config: &PipelineConfig) -> Result<Dataset> {
    let out = gmixup(&load(config)?, config)?;
    store(config, &out)?;
    Ok(out)
}

/// As [`run_gmixup`] with batches of `config.batch_size`.
pub fn run_gmixup_batch(config: &PipelineConfig) -> Result<Dataset> {
    let out = augment_batched(&load(config)?, config, config.batch_size)?;
    store(config, &out)?;
    Ok(out)
}

/// Dispatches on `config.mode`.
pub fn run(config: &PipelineConfig) -> Result<Dataset> {
    match config.mode {
        Mode::Whole => run_gmixup(config),
        Mode::Batch => run_gmixup_batch(config),
    }
}
