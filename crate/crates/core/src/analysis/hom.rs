use crate::error::{Error, Result};
use crate::estimation::StepGraphon;
use crate::graph::{BitAdjacency, Graph};

use super::motif::Motif;

/// Largest `K^v(F)` that [`hom_density_graphon`] will enumerate.
pub const GRAPHON_TERM_LIMIT: f64 = 1e8;

/// Matching order for the motif's vertices: each next vertex has as many
/// already placed neighbors as possible. `prior[p]` lists the earlier
/// positions adjacent to position `p`.
struct Plan {
    order: Vec<usize>,
    prior: Vec<Vec<usize>>,
}

impl Plan {
    fn new(f: &Graph) -> Plan {
        let v = f.node_count();
        let adj = f.neighbors();
        let mut placed = vec![false; v];
        let mut order = Vec::with_capacity(v);
        for _ in 0..v {
            let next = (0..v)
                .filter(|&u| !placed[u])
                .max_by_key(|&u| {
                    let back = adj[u].iter().filter(|&&w| placed[w]).count();
                    (back, adj[u].len(), std::cmp::Reverse(u))
                })
                .expect("unplaced vertex remains");
            placed[next] = true;
            order.push(next);
        }
        let mut position = vec![0; v];
        for (p, &u) in order.iter().enumerate() {
            position[u] = p;
        }
        let prior = order
            .iter()
            .enumerate()
            .map(|(p, &u)| {
                let mut back: Vec<usize> = adj[u]
                    .iter()
                    .map(|&w| position[w])
                    .filter(|&q| q < p)
                    .collect();
                back.sort_unstable();
                back
            })
            .collect();
        Plan { order, prior }
    }
}

fn popcount(a: &[u64]) -> u64 {
    a.iter().map(|w| w.count_ones() as u64).sum()
}

fn and_popcount_portable(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn and_popcount_native(a: &[u64], b: &[u64]) -> u64 {
    and_popcount_portable(a, b)
}

/// `|a & b|`, using the hardware popcount when the CPU has one.
fn and_popcount(a: &[u64], b: &[u64]) -> u64 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("popcnt") {
            // SAFETY: the feature was detected at runtime
            return unsafe { and_popcount_native(a, b) };
        }
    }
    and_popcount_portable(a, b)
}

struct BitCounter<'a> {
    g: &'a BitAdjacency,
    prior: &'a [Vec<usize>],
    images: Vec<usize>,
    cand: Vec<Vec<u64>>,
    full: Vec<u64>,
}

impl BitCounter<'_> {
    fn fill(&mut self, p: usize) {
        let words = self.g.words();
        let buf = &mut self.cand[p];
        match self.prior[p].split_first() {
            None => buf.copy_from_slice(&self.full),
            Some((&first, rest)) => {
                buf.copy_from_slice(self.g.row(self.images[first]));
                for &q in rest {
                    let row = self.g.row(self.images[q]);
                    for w in 0..words {
                        buf[w] &= row[w];
                    }
                }
            }
        }
    }

    /// Size of the candidate set at the final position, without storing it.
    fn count_last(&self, p: usize) -> u128 {
        let row = |q: usize| self.g.row(self.images[q]);
        let ones = match self.prior[p].as_slice() {
            [] => popcount(&self.full),
            &[a] => popcount(row(a)),
            &[a, b] => and_popcount(row(a), row(b)),
            &[a, ref rest @ ..] => {
                let first = row(a);
                (0..first.len())
                    .map(|w| rest.iter().fold(first[w], |acc, &q| acc & row(q)[w]).count_ones() as u64)
                    .sum()
            }
        };
        ones as u128
    }

    fn count(&mut self, p: usize) -> u128 {
        if p + 1 == self.prior.len() {
            return self.count_last(p);
        }
        self.fill(p);
        let mut total = 0u128;
        for w in 0..self.g.words() {
            let mut bits = self.cand[p][w];
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                self.images[p] = w * 64 + b;
                total += self.count(p + 1);
            }
        }
        total
    }
}

/// Number of homomorphisms from `f` into the graph held in `g`.
pub fn hom_count_bits(f: &Motif, g: &BitAdjacency) -> u128 {
    let n = g.node_count();
    if n == 0 {
        return 0;
    }
    let plan = Plan::new(f.graph());
    let words = g.words();
    let mut full = vec![u64::MAX; words];
    if n % 64 != 0 {
        full[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut counter = BitCounter {
        g,
        prior: &plan.prior,
        images: vec![0; plan.order.len()],
        cand: vec![vec![0; words]; plan.order.len()],
        full,
    };
    counter.count(0)
}

/// `hom(F, G)`: maps `V(F) -> V(G)` sending every edge of `F` to an edge of
/// `G`, counted by backtracking with bitset candidate pruning.
pub fn hom_count(f: &Motif, g: &Graph) -> u128 {
    hom_count_bits(f, &BitAdjacency::from_graph(g))
}

pub fn hom_density_bits(f: &Motif, g: &BitAdjacency) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    hom_count_bits(f, g) as f64 / (n as f64).powi(f.node_count() as i32)
}

/// `t(F, G) = hom(F, G) / v(G)^v(F)`.
pub fn hom_density_graph(f: &Motif, g: &Graph) -> f64 {
    hom_density_bits(f, &BitAdjacency::from_graph(g))
}

/// `t(F, W)` for a step graphon: the average over all block assignments of
/// the product of `w` over the motif's edges. Exact for step functions on a
/// uniform partition.
pub fn hom_density_graphon(f: &Motif, w: &StepGraphon) -> Result<f64> {
    let k = w.k();
    let v = f.node_count();
    let terms = (k as f64).powi(v as i32);
    if terms > GRAPHON_TERM_LIMIT {
        return Err(Error::GuardExceeded {
            terms,
            limit: GRAPHON_TERM_LIMIT,
        });
    }
    let plan = Plan::new(f.graph());
    let m = w.w();
    let mut assign = vec![0usize; v];

    fn rec(p: usize, prod: f64, assign: &mut [usize], prior: &[Vec<usize>], m: &nalgebra::DMatrix<f64>, k: usize) -> f64 {
        if p == prior.len() {
            return prod;
        }
        let mut sum = 0.0;
        for b in 0..k {
            let mut factor = prod;
            for &q in &prior[p] {
                factor *= m[(assign[q], b)];
            }
            if factor == 0.0 {
                continue;
            }
            assign[p] = b;
            sum += rec(p + 1, factor, assign, prior, m, k);
        }
        sum
    }

    Ok(rec(0, 1.0, &mut assign, &plan.prior, m, k) / terms)
}

/// Degree function of a step graphon: the mean of each row.
pub fn degree_function(w: &StepGraphon) -> Vec<f64> {
    w.w().row_iter().map(|r| r.mean()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    /// Exhaustive oracle over all `n^v` vertex maps.
    fn brute_hom(f: &Graph, g: &Graph) -> u128 {
        let (v, n) = (f.node_count(), g.node_count());
        let mut phi = vec![0usize; v];
        let mut count = 0;
        let total = (n as u128).pow(v as u32);
        for mut code in 0..total {
            for slot in phi.iter_mut() {
                *slot = (code % n as u128) as usize;
                code /= n as u128;
            }
            if f.edges().iter().all(|&(a, b)| g.has_edge(phi[a], phi[b])) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn textbook_identities() {
        let k3 = Graph::complete(3);
        assert_eq!(hom_count(&Motif::node(), &k3), 3);
        assert_eq!(hom_count(&Motif::edge(), &k3), 6);
        assert_eq!(hom_count(&Motif::triangle(), &k3), 6);
        assert_eq!(hom_density_graph(&Motif::node(), &k3), 1.0);
        assert_eq!(hom_density_graph(&Motif::edge(), &k3), 6.0 / 9.0);
        assert_eq!(hom_density_graph(&Motif::edge(), &Graph::empty(5)), 0.0);
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        let graphs = [Graph::path(5), Graph::cycle(6), Graph::star(5), Graph::complete(4)];
        let motifs = ["path3", "square", "star4", "k4", "v=3; 0-1", "v=4; 0-1 2-3"];
        for g in &graphs {
            for m in motifs {
                let m: Motif = m.parse().unwrap();
                assert_eq!(hom_count(&m, g), brute_hom(m.graph(), g), "{m} in {g:?}");
            }
        }
    }

    #[test]
    fn counts_past_one_word() {
        let g = Graph::complete(130);
        assert_eq!(hom_count(&Motif::edge(), &g), 130 * 129);
        assert_eq!(hom_count(&Motif::triangle(), &g), 130 * 129 * 128);
    }

    #[test]
    fn graphon_density_constant() {
        let w = StepGraphon::constant(3, 0.4).unwrap();
        approx::assert_relative_eq!(hom_density_graphon(&Motif::edge(), &w).unwrap(), 0.4, max_relative = 1e-14);
        approx::assert_relative_eq!(hom_density_graphon(&Motif::triangle(), &w).unwrap(), 0.064, max_relative = 1e-14);
    }

    #[test]
    fn graphon_density_two_block_identity() {
        let w = StepGraphon::from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(hom_density_graphon(&Motif::edge(), &w).unwrap(), 0.5);
    }

    #[test]
    fn graphon_density_guard() {
        let w = StepGraphon::constant(100, 0.5).unwrap();
        let m = Motif::named("benzene").unwrap();
        assert!(matches!(hom_density_graphon(&m, &w), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn degree_function_row_means() {
        let w = StepGraphon::from_matrix(DMatrix::from_row_slice(2, 2, &[0.2, 0.4, 0.4, 0.8])).unwrap();
        let d = degree_function(&w);
        approx::assert_abs_diff_eq!(d[0], 0.3, epsilon = 1e-15);
        approx::assert_abs_diff_eq!(d[1], 0.6, epsilon = 1e-15);
        assert_eq!(degree_function(&StepGraphon::constant(3, 0.0).unwrap()), vec![0.0; 3]);
    }
}
