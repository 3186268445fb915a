//! Oracles shared by the integration tests. Everything here is computed from
//! full statistic evaluations and explicit enumeration, never from change
//! statistics or the samplers under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use statrs::distribution::{ChiSquared, ContinuousCDF};
use stergm_core::{Dyad, EdgeAgeState, ModelSpec, Network, Phase};

/// Edge set as a sorted list of actor pairs.
pub type EdgeSet = BTreeSet<(u32, u32)>;

pub fn edge_set(y: &Network) -> EdgeSet {
    y.edges().map(|d| (d.lo(), d.hi())).collect()
}

pub fn network(n: usize, edges: &EdgeSet) -> Network {
    Network::from_edges(n, edges.iter().copied()).unwrap()
}

pub fn all_pairs(n: u32) -> Vec<(u32, u32)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

pub fn subsets(items: &[(u32, u32)]) -> Vec<EdgeSet> {
    (0u64..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

/// Exact conditional distribution of one phase by enumerating every reachable
/// network and normalising `exp(η · g(y))`.
pub fn phase_distribution(y_prev: &Network, ages: &EdgeAgeState, spec: &ModelSpec) -> BTreeMap<EdgeSet, f64> {
    let n = y_prev.n();
    let prev = edge_set(y_prev);
    let outcomes: Vec<EdgeSet> = match spec.phase() {
        Phase::Formation => {
            let empty: Vec<_> = all_pairs(n as u32)
                .into_iter()
                .filter(|p| !prev.contains(p))
                .collect();
            subsets(&empty)
                .into_iter()
                .map(|added| prev.union(&added).copied().collect())
                .collect()
        }
        Phase::Dissolution => subsets(&prev.iter().copied().collect::<Vec<_>>()),
    };
    let log_weights: Vec<f64> = outcomes
        .iter()
        .map(|y| {
            let g = spec.eval(&network(n, y), ages).unwrap();
            g.iter().zip(spec.canonical()).map(|(a, b)| a * b).sum()
        })
        .collect();
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = log_weights.iter().map(|w| (w - max).exp()).sum();
    outcomes
        .into_iter()
        .zip(log_weights)
        .map(|(y, w)| (y, (w - max).exp() / total))
        .collect()
}

pub fn count<I: IntoIterator<Item = EdgeSet>>(draws: I) -> BTreeMap<EdgeSet, u64> {
    let mut counts = BTreeMap::new();
    for y in draws {
        *counts.entry(y).or_insert(0) += 1;
    }
    counts
}

/// Pearson chi-square goodness of fit. Cells with expected count below 5 are
/// pooled. Panics if a draw falls outside the support.
pub fn chi_square_p(expected: &BTreeMap<EdgeSet, f64>, observed: &BTreeMap<EdgeSet, u64>) -> f64 {
    let total: u64 = observed.values().sum();
    for y in observed.keys() {
        assert!(expected.contains_key(y), "draw {y:?} is outside the support");
    }
    let mut stat = 0.0;
    let mut cells = 0;
    let (mut pooled_e, mut pooled_o) = (0.0, 0.0);
    for (y, &p) in expected {
        let e = p * total as f64;
        let o = *observed.get(y).unwrap_or(&0) as f64;
        if e < 5.0 {
            pooled_e += e;
            pooled_o += o;
        } else {
            stat += (o - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_e > 0.0 {
        if pooled_e >= 1.0 {
            stat += (pooled_o - pooled_e).powi(2) / pooled_e;
            cells += 1;
        } else {
            assert!(
                pooled_o <= 5.0,
                "{pooled_o} draws in cells with expected mass {pooled_e}"
            );
        }
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

pub fn total_variation(a: &BTreeMap<EdgeSet, f64>, b: &BTreeMap<EdgeSet, f64>) -> f64 {
    let keys: BTreeSet<_> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

pub fn frequencies(counts: &BTreeMap<EdgeSet, u64>) -> BTreeMap<EdgeSet, f64> {
    let total: u64 = counts.values().sum();
    counts
        .iter()
        .map(|(k, &v)| (k.clone(), v as f64 / total as f64))
        .collect()
}

pub fn dyad(a: u32, b: u32) -> Dyad {
    Dyad::new(a, b).unwrap()
}

/// Ages given explicitly per edge, as seen from `clock`.
pub fn ages_from(clock: u64, edge_ages: &[((u32, u32), u64)]) -> EdgeAgeState {
    EdgeAgeState::from_parts(
        clock,
        edge_ages
            .iter()
            .map(|&((a, b), age)| (dyad(a, b), clock - age))
            .collect(),
        Default::default(),
    )
}

/// `|x - expected| <= k * sqrt(expected (1 - expected) / n)`.
pub fn within_binomial_band(x: f64, expected: f64, n: f64, k: f64) -> bool {
    (x - expected).abs() <= k * (expected * (1.0 - expected) / n).sqrt()
}
