//! Graphon-based mixup for graph classification datasets.
//!
//! The crate estimates a step-function graphon for each class of a graph
//! dataset, interpolates the graphons (and soft labels) of class pairs, and
//! samples synthetic labeled graphs from the mixture. It also ships the
//! machinery needed to check the underlying graphon theory numerically:
//! homomorphism densities, the cut norm, and empirical checkers for the
//! counting lemma and the density-preservation bounds.
//!
//! Module map:
//!
//! - [`graph`]: graphs, datasets, degree alignment.
//! - [`tudataset`]: TUDataset text-layout reader/writer.
//! - [`estimation`]: step-graphon estimators (mean, LG, USVT, SAS).
//! - [`mixup`]: graphon/label mixing and W-random graph sampling.
//! - [`analysis`]: homomorphism densities, cut norm, bound checkers.
//! - [`augment`]: baseline augmenters and corruption protocols.
//! - [`pipeline`]: the whole-set and batched augmentation pipelines.

pub mod analysis;
pub mod augment;
pub mod error;
pub mod estimation;
pub mod graph;
pub mod mixup;
pub mod pipeline;
pub mod rng;
pub mod tudataset;

pub use error::{Error, Result};
pub use estimation::{EstimatorConfig, Method, StepGraphon};
pub use graph::{AlignedGraph, Dataset, Graph};
pub use mixup::{LabeledGraphon, MixupConfig};
