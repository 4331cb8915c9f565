//! Empirical checkers for the graphon bounds behind graphon mixup.

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimation::{resize_matrix, StepGraphon};
use crate::mixup::sample_adjacency;
use crate::rng;

use super::cutnorm::{cut_norm_exact, MAX_EXACT_CUT_K};
use super::hom::{hom_density_bits, hom_density_graphon};
use super::motif::Motif;

/// Slack absorbing floating-point summation error in bound comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub satisfied: bool,
    /// True when `rhs >= 1` and the lhs is a probability.
    pub vacuous: bool,
    /// SHA-256 prefix of the inputs, for matching reports to runs.
    pub digest: String,
}

impl BoundReport {
    fn new(lhs: f64, rhs: f64, tolerance: f64, digest: String) -> Self {
        BoundReport {
            lhs,
            rhs,
            tolerance,
            satisfied: lhs <= rhs + tolerance,
            vacuous: false,
            digest,
        }
    }

    /// Re-evaluates the report under a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.satisfied = self.lhs <= self.rhs + tolerance;
        self
    }
}

#[derive(Default)]
struct DigestInput(Sha256);

impl DigestInput {
    fn tag(mut self, s: &str) -> Self {
        self.0.update(s.as_bytes());
        self.0.update([0u8]);
        self
    }

    fn num(mut self, v: f64) -> Self {
        self.0.update(v.to_le_bytes());
        self
    }

    fn int(mut self, v: u64) -> Self {
        self.0.update(v.to_le_bytes());
        self
    }

    fn matrix(mut self, m: &DMatrix<f64>) -> Self {
        self.0.update((m.nrows() as u64).to_le_bytes());
        for v in m.iter() {
            self.0.update(v.to_le_bytes());
        }
        self
    }

    fn finish(self) -> String {
        self.0.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn check_cut_size(k: usize) -> Result<()> {
    if k > MAX_EXACT_CUT_K {
        return Err(Error::InvalidArgument(format!(
            "bound checks use the exact cut norm, K <= {MAX_EXACT_CUT_K}, got {k}"
        )));
    }
    Ok(())
}

fn check_same_k(a: &StepGraphon, b: &StepGraphon) -> Result<usize> {
    if a.k() != b.k() {
        return Err(Error::DimensionMismatch(format!(
            "graphons have k = {} and k = {}",
            a.k(),
            b.k()
        )));
    }
    check_cut_size(a.k())?;
    Ok(a.k())
}

/// Symmetric `k x k` graphon with iid uniform entries on and above the
/// diagonal, drawn in row-major order.
pub fn random_graphon(k: usize, r: &mut rng::Rng) -> StepGraphon {
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v: f64 = r.random();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    StepGraphon::from_matrix(m).expect("entries lie in [0, 1)")
}

/// Counting lemma: `|t(F, W) - t(F, W')| <= e(F) * ||W - W'||_cut`.
pub fn check_lemma1(f: &Motif, w: &StepGraphon, w2: &StepGraphon) -> Result<BoundReport> {
    check_same_k(w, w2)?;
    let lhs = (hom_density_graphon(f, w)? - hom_density_graphon(f, w2)?).abs();
    let rhs = f.edge_count() as f64 * cut_norm_exact(&(w.w() - w2.w()))?;
    let digest = DigestInput::default()
        .tag("lemma1")
        .tag(&f.to_string())
        .matrix(w.w())
        .matrix(w2.w())
        .finish();
    Ok(BoundReport::new(lhs, rhs, DEFAULT_TOLERANCE, digest))
}

/// Both sides of the mixed-graphon density bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    /// `|t(F, W_I) - t(F, W_G)| <= (1 - lambda) e(F) ||W_H - W_G||_cut`
    pub g_side: BoundReport,
    /// `|t(F, W_I) - t(F, W_H)| <= lambda e(F) ||W_H - W_G||_cut`
    pub h_side: BoundReport,
    pub cut_norm: f64,
}

impl Theorem1Report {
    pub fn satisfied(&self) -> bool {
        self.g_side.satisfied && self.h_side.satisfied
    }
}

/// Checks the density bound for `W_I = lambda W_G + (1 - lambda) W_H`.
pub fn check_theorem1(
    wg: &StepGraphon,
    wh: &StepGraphon,
    f: &Motif,
    lambda: f64,
) -> Result<Theorem1Report> {
    check_same_k(wg, wh)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let mixed = StepGraphon::from_matrix(
        (wg.w() * lambda + wh.w() * (1.0 - lambda)).map(|v| v.min(1.0)),
    )?;
    let t_mixed = hom_density_graphon(f, &mixed)?;
    let t_g = hom_density_graphon(f, wg)?;
    let t_h = hom_density_graphon(f, wh)?;
    let cut = cut_norm_exact(&(wh.w() - wg.w()))?;
    let e = f.edge_count() as f64;
    let digest = DigestInput::default()
        .tag("theorem1")
        .tag(&f.to_string())
        .num(lambda)
        .matrix(wg.w())
        .matrix(wh.w())
        .finish();
    Ok(Theorem1Report {
        g_side: BoundReport::new(
            (t_mixed - t_g).abs(),
            (1.0 - lambda) * e * cut,
            DEFAULT_TOLERANCE,
            digest.clone(),
        ),
        h_side: BoundReport::new(
            (t_mixed - t_h).abs(),
            lambda * e * cut,
            DEFAULT_TOLERANCE,
            digest,
        ),
        cut_norm: cut,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Report {
    /// lhs: fraction of trials with `|t(F, G) - t(F, W)| > epsilon`;
    /// rhs: `2 exp(-epsilon^2 n / (8 v(F)^2))`; tolerance: one binomial
    /// standard error of that probability at the trial count.
    pub bound: BoundReport,
    pub graphon_density: f64,
    pub mean_sample_density: f64,
    pub exceedances: usize,
    pub trials: usize,
}

/// Sampling concentration: draws `trials` graphs from `G(n, W)` and compares
/// the exceedance frequency with the exponential tail bound.
pub fn check_theorem2(
    w: &StepGraphon,
    f: &Motif,
    n: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<Theorem2Report> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument("n and trials must be at least 1".into()));
    }
    let target = hom_density_graphon(f, w)?;
    let densities: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::child(seed, i as u64);
            hom_density_bits(f, &sample_adjacency(w, n, &mut r))
        })
        .collect();
    let exceedances = densities
        .iter()
        .filter(|&&t| (t - target).abs() > epsilon)
        .count();
    let lhs = exceedances as f64 / trials as f64;
    let v = f.node_count() as f64;
    let rhs = 2.0 * (-(epsilon * epsilon) * n as f64 / (8.0 * v * v)).exp();
    let p = rhs.min(1.0);
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    let digest = DigestInput::default()
        .tag("theorem2")
        .tag(&f.to_string())
        .num(epsilon)
        .int(n as u64)
        .int(trials as u64)
        .int(seed)
        .matrix(w.w())
        .finish();
    let mut bound = BoundReport::new(lhs, rhs, se + DEFAULT_TOLERANCE, digest);
    bound.vacuous = rhs >= 1.0;
    Ok(Theorem2Report {
        bound,
        graphon_density: target,
        mean_sample_density: densities.iter().sum::<f64>() / trials as f64,
        exceedances,
        trials,
    })
}

/// Mean edge density of `m` samples from `G(n, W)` against `t(edge, W)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityConsistency {
    pub target: f64,
    pub mean: f64,
    /// `sqrt(t (1 - t) / (m * C(n, 2)))`: exact when `W` is constant.
    pub binomial_se: f64,
    /// Sample standard deviation of the per-graph densities over `sqrt(m)`.
    pub empirical_se: f64,
}

impl DensityConsistency {
    pub fn z_binomial(&self) -> f64 {
        (self.mean - self.target).abs() / self.binomial_se
    }

    pub fn z_empirical(&self) -> f64 {
        (self.mean - self.target).abs() / self.empirical_se
    }
}

pub fn edge_density_consistency(w: &StepGraphon, n: usize, m: usize, seed: u64) -> Result<DensityConsistency> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidArgument("need n >= 2 nodes and m >= 2 samples".into()));
    }
    let target = hom_density_graphon(&Motif::edge(), w)?;
    let pairs = (n * (n - 1) / 2) as f64;
    let densities: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let adj = sample_adjacency(w, n, &mut rng::child(seed, i as u64));
            adj.edge_count() as f64 / pairs
        })
        .collect();
    let mf = m as f64;
    let mean = densities.iter().sum::<f64>() / mf;
    let var = densities.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (mf - 1.0);
    Ok(DensityConsistency {
        target,
        mean,
        binomial_se: (target * (1.0 - target) / (mf * pairs)).sqrt(),
        empirical_se: (var / mf).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Collision {
    pub probability: f64,
    pub log_probability: f64,
}

/// Probability that two independent `K x K` matrices with entries
/// `Bernoulli(w_ij)` coincide: the product over all `K^2` cells of
/// `w^2 + (1 - w)^2`.
pub fn collision_probability(w: &StepGraphon) -> Collision {
    let factors = w.w().iter().map(|&p| p * p + (1.0 - p) * (1.0 - p));
    let log_probability: f64 = factors.clone().map(f64::ln).sum();
    let direct: f64 = factors.product();
    let probability = if direct >= f64::MIN_POSITIVE {
        direct
    } else {
        log_probability.exp()
    };
    Collision {
        probability,
        log_probability,
    }
}

/// All `K^2` cells drawn independently as `Bernoulli(w_ij)`, row-major.
pub fn sample_bernoulli_matrix(w: &StepGraphon, rng: &mut rng::Rng) -> Vec<bool> {
    w.w()
        .transpose()
        .iter()
        .map(|&p| rng.random::<f64>() < p)
        .collect()
}

/// Fraction of `pairs` independent matrix pairs that coincide.
pub fn monte_carlo_collision_rate(w: &StepGraphon, pairs: usize, seed: u64) -> f64 {
    if pairs == 0 {
        return 0.0;
    }
    let hits: usize = (0..pairs)
        .into_par_iter()
        .filter(|&i| {
            let mut r = rng::child(seed, i as u64);
            sample_bernoulli_matrix(w, &mut r) == sample_bernoulli_matrix(w, &mut r)
        })
        .count();
    hits as f64 / pairs as f64
}

/// Cut distance between `w_fine` and its block average on a uniform
/// `k_coarse` grid (re-expanded onto the fine grid).
///
/// This illustrates step-function approximation; it is not a certificate
/// of the weak regularity bound, since a uniform partition need not be the
/// optimal one.
pub fn step_approx_error(w_fine: &StepGraphon, k_coarse: usize) -> Result<f64> {
    let k = w_fine.k();
    if k_coarse == 0 || k_coarse > k {
        return Err(Error::InvalidArgument(format!(
            "k_coarse must lie in [1, {k}], got {k_coarse}"
        )));
    }
    check_cut_size(k)?;
    let coarse = resize_matrix(w_fine.w(), k_coarse);
    let expanded = DMatrix::from_fn(k, k, |i, j| coarse[(i * k_coarse / k, j * k_coarse / k)]);
    cut_norm_exact(&(w_fine.w() - expanded))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem1_trivial_cases() {
        let mut r = rng::from_seed(1);
        let w = random_graphon(5, &mut r);
        let rep = check_theorem1(&w, &w, &Motif::triangle(), 0.3).unwrap();
        assert_eq!(rep.g_side.lhs, 0.0);
        assert_eq!(rep.g_side.rhs, 0.0);
        assert!(rep.satisfied());
        let h = random_graphon(5, &mut r);
        let rep = check_theorem1(&w, &h, &Motif::edge(), 1.0).unwrap();
        assert_eq!(rep.g_side.lhs, 0.0);
        assert_eq!(rep.g_side.rhs, 0.0);
        assert!(rep.satisfied());
        let other = random_graphon(4, &mut r);
        assert!(check_theorem1(&w, &other, &Motif::edge(), 0.5).is_err());
    }

    #[test]
    fn theorem2_closed_form_rhs_and_zero_graphon() {
        let w = StepGraphon::constant(3, 0.0).unwrap();
        let rep = check_theorem2(&w, &Motif::triangle(), 200, 0.3, 5, 0).unwrap();
        assert_eq!(rep.bound.lhs, 0.0);
        approx::assert_relative_eq!(rep.bound.rhs, 2.0 * (-0.09f64 * 200.0 / 72.0).exp(), max_relative = 1e-14);
        assert!(rep.bound.satisfied);
        assert!(check_theorem2(&w, &Motif::edge(), 10, 1.0, 5, 0).is_err());
    }

    #[test]
    fn theorem2_vacuous_flag() {
        let w = StepGraphon::constant(2, 0.5).unwrap();
        let rep = check_theorem2(&w, &Motif::triangle(), 10, 0.9, 4, 0).unwrap();
        assert!(rep.bound.rhs >= 1.0);
        assert!(rep.bound.vacuous && rep.bound.satisfied);
    }

    #[test]
    fn collision_examples() {
        assert_eq!(collision_probability(&StepGraphon::constant(2, 0.5).unwrap()).probability, 0.0625);
        assert_eq!(collision_probability(&StepGraphon::constant(3, 1.0).unwrap()).probability, 1.0);
        assert_eq!(collision_probability(&StepGraphon::constant(3, 0.0).unwrap()).probability, 1.0);
        let tiny = collision_probability(&StepGraphon::constant(40, 0.5).unwrap());
        approx::assert_relative_eq!(tiny.log_probability, 1600.0 * 0.5f64.ln(), max_relative = 1e-12);
        assert!(tiny.probability >= 0.0);
    }

    #[test]
    fn step_error_trivial_cases() {
        let w = StepGraphon::from_fn(8, |x, y| x * y).unwrap();
        assert_eq!(step_approx_error(&w, 8).unwrap(), 0.0);
        let c = StepGraphon::constant(8, 0.3).unwrap();
        for k in 1..=8 {
            assert!(step_approx_error(&c, k).unwrap() < 1e-15);
        }
        assert!(step_approx_error(&w, 9).is_err());
    }

    #[test]
    fn step_error_monotone_on_product_graphon() {
        let w = StepGraphon::from_fn(16, |x, y| x * y).unwrap();
        let errs: Vec<f64> = [2, 4, 8].iter().map(|&k| step_approx_error(&w, k).unwrap()).collect();
        assert!(errs[0] >= errs[1] && errs[1] >= errs[2], "{errs:?}");
        assert!(errs[2] > 0.0);
    }

    #[test]
    fn lemma1_holds_on_random_pair() {
        let mut r = rng::from_seed(3);
        let (a, b) = (random_graphon(6, &mut r), random_graphon(6, &mut r));
        for name in ["edge", "triangle", "path3", "square"] {
            assert!(check_lemma1(&Motif::named(name).unwrap(), &a, &b).unwrap().satisfied);
        }
    }

    #[test]
    fn digest_is_stable() {
        let w = StepGraphon::constant(2, 0.5).unwrap();
        let a = check_lemma1(&Motif::edge(), &w, &w).unwrap();
        let b = check_lemma1(&Motif::edge(), &w, &w).unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(a.digest.len(), 16);
    }
}
