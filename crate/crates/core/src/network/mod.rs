//! Undirected network state on `n` labelled actors.
//!
//! Actors are indexed `0..n` in the API; file formats use 1-based labels.

mod ages;
mod spells;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ages::EdgeAgeState;
pub use spells::{Spell, SpellLog, SPELL_CSV_HEADER};

/// Networks with at most this many actors use a dense bit matrix.
pub const DEFAULT_DENSE_THRESHOLD: usize = 4096;

/// An unordered actor pair, stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dyad {
    lo: u32,
    hi: u32,
}

impl Dyad {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Dyad { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(Dyad { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a)),
        }
    }

    /// Caller guarantees `lo < hi`.
    pub(crate) fn ordered(lo: u32, hi: u32) -> Self {
        debug_assert!(lo < hi);
        Dyad { lo, hi }
    }

    pub fn lo(self) -> u32 {
        self.lo
    }

    pub fn hi(self) -> u32 {
        self.hi
    }
}

impl fmt::Display for Dyad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug)]
enum Adjacency {
    /// Symmetric `n x n` bit matrix, `words_per_row` u64 words per actor.
    Dense {
        words_per_row: usize,
        bits: Vec<u64>,
    },
    Sparse(Vec<BTreeSet<u32>>),
}

/// Undirected simple graph with cached degrees.
#[derive(Clone, Debug)]
pub struct Network {
    n: usize,
    adjacency: Adjacency,
    degree: Vec<u32>,
    edge_count: usize,
}

impl Network {
    pub fn empty(n: usize) -> Result<Self> {
        Self::with_dense_threshold(n, DEFAULT_DENSE_THRESHOLD)
    }

    /// Empty network that uses the bit-matrix representation when `n <= dense_threshold`
    /// and per-actor neighbour sets otherwise.
    pub fn with_dense_threshold(n: usize, dense_threshold: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewActors(n));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!("actor count {n} too large")));
        }
        let adjacency = if n <= dense_threshold {
            let words_per_row = n.div_ceil(64);
            Adjacency::Dense {
                words_per_row,
                bits: vec![0; words_per_row * n],
            }
        } else {
            Adjacency::Sparse(vec![BTreeSet::new(); n])
        };
        Ok(Network {
            n,
            adjacency,
            degree: vec![0; n],
            edge_count: 0,
        })
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut net = Network::empty(n)?;
        for (a, b) in edges {
            let d = net.dyad(a, b)?;
            net.add_edge(d);
        }
        Ok(net)
    }

    /// Checked dyad constructor for this network's actor range.
    pub fn dyad(&self, a: u32, b: u32) -> Result<Dyad> {
        for actor in [a, b] {
            if actor as usize >= self.n {
                return Err(Error::ActorOutOfRange { actor, n: self.n });
            }
        }
        Dyad::new(a, b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.adjacency, Adjacency::Dense { .. })
    }

    pub fn dyad_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn density(&self) -> f64 {
        self.edge_count as f64 / self.dyad_count() as f64
    }

    pub fn degree(&self, actor: u32) -> u32 {
        self.degree[actor as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    /// Number of actors with exactly one tie.
    pub fn degree1_count(&self) -> usize {
        self.degree.iter().filter(|&&d| d == 1).count()
    }

    pub fn has_edge(&self, d: Dyad) -> bool {
        match &self.adjacency {
            Adjacency::Dense { words_per_row, bits } => {
                let word = bits[d.lo as usize * words_per_row + (d.hi as usize >> 6)];
                word >> (d.hi & 63) & 1 == 1
            }
            Adjacency::Sparse(sets) => sets[d.lo as usize].contains(&d.hi),
        }
    }

    /// Returns false if the edge was already present.
    pub fn add_edge(&mut self, d: Dyad) -> bool {
        if self.has_edge(d) {
            return false;
        }
        self.set_bits(d, true);
        self.degree[d.lo as usize] += 1;
        self.degree[d.hi as usize] += 1;
        self.edge_count += 1;
        true
    }

    /// Returns false if the edge was absent.
    pub fn remove_edge(&mut self, d: Dyad) -> bool {
        if !self.has_edge(d) {
            return false;
        }
        self.set_bits(d, false);
        self.degree[d.lo as usize] -= 1;
        self.degree[d.hi as usize] -= 1;
        self.edge_count -= 1;
        true
    }

    /// Flips the dyad; returns whether it is now an edge.
    pub fn toggle(&mut self, d: Dyad) -> bool {
        if self.has_edge(d) {
            self.remove_edge(d);
            false
        } else {
            self.add_edge(d);
            true
        }
    }

    fn set_bits(&mut self, d: Dyad, on: bool) {
        match &mut self.adjacency {
            Adjacency::Dense { words_per_row, bits } => {
                for (row, col) in [(d.lo, d.hi), (d.hi, d.lo)] {
                    let word = &mut bits[row as usize * *words_per_row + (col as usize >> 6)];
                    let mask = 1u64 << (col & 63);
                    if on {
                        *word |= mask;
                    } else {
                        *word &= !mask;
                    }
                }
            }
            Adjacency::Sparse(sets) => {
                if on {
                    sets[d.lo as usize].insert(d.hi);
                    sets[d.hi as usize].insert(d.lo);
                } else {
                    sets[d.lo as usize].remove(&d.hi);
                    sets[d.hi as usize].remove(&d.lo);
                }
            }
        }
    }

    /// Neighbours of `actor` in increasing order.
    pub fn neighbors(&self, actor: u32) -> Neighbors<'_> {
        match &self.adjacency {
            Adjacency::Dense { words_per_row, bits } => {
                let start = actor as usize * words_per_row;
                let row = &bits[start..start + words_per_row];
                Neighbors::Dense {
                    row,
                    word_index: 0,
                    current: row.first().copied().unwrap_or(0),
                }
            }
            Adjacency::Sparse(sets) => Neighbors::Sparse(sets[actor as usize].iter()),
        }
    }

    /// Edges in lexicographic `(lo, hi)` order.
    pub fn edges(&self) -> impl Iterator<Item = Dyad> + '_ {
        (0..self.n as u32).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&j| j > i)
                .map(move |j| Dyad::ordered(i, j))
        })
    }

    /// All `n(n-1)/2` dyads in lexicographic order.
    pub fn dyads(&self) -> impl Iterator<Item = Dyad> {
        let n = self.n as u32;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| Dyad::ordered(i, j)))
    }

    /// Dyads not currently tied, in lexicographic order.
    pub fn empty_dyads(&self) -> impl Iterator<Item = Dyad> + '_ {
        self.dyads().filter(move |&d| !self.has_edge(d))
    }

    pub fn is_subset_of(&self, other: &Network) -> bool {
        self.n == other.n && self.edge_count <= other.edge_count && self.edges().all(|d| other.has_edge(d))
    }

    /// Edges of `self` that are absent from `other`.
    pub fn difference<'a>(&'a self, other: &'a Network) -> impl Iterator<Item = Dyad> + 'a {
        self.edges().filter(move |&d| !other.has_edge(d))
    }

    /// Same edge set with the requested representation.
    pub fn with_representation(&self, dense_threshold: usize) -> Network {
        let mut out =
            Network::with_dense_threshold(self.n, dense_threshold).expect("actor count already validated");
        for d in self.edges() {
            out.add_edge(d);
        }
        out
    }
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edge_count == other.edge_count && self.edges().all(|d| other.has_edge(d))
    }
}

impl Eq for Network {}

pub enum Neighbors<'a> {
    Dense {
        row: &'a [u64],
        word_index: usize,
        current: u64,
    },
    Sparse(std::collections::btree_set::Iter<'a, u32>),
}

impl Iterator for Neighbors<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        match self {
            Neighbors::Dense {
                row,
                word_index,
                current,
            } => loop {
                if *current != 0 {
                    let bit = current.trailing_zeros();
                    *current &= *current - 1;
                    return Some((*word_index as u32) * 64 + bit);
                }
                *word_index += 1;
                *current = *row.get(*word_index)?;
            },
            Neighbors::Sparse(it) => it.next().copied(),
        }
    }
}

/// Applies a formation draw and a dissolution draw to the previous network:
/// the result keeps the surviving ties of `y_minus` and adds the ties newly
/// formed in `y_plus`.
pub fn combine(y_prev: &Network, y_plus: &Network, y_minus: &Network) -> Result<Network> {
    if y_plus.n != y_prev.n {
        return Err(Error::SizeMismatch(y_prev.n, y_plus.n));
    }
    if y_minus.n != y_prev.n {
        return Err(Error::SizeMismatch(y_prev.n, y_minus.n));
    }
    if !y_prev.is_subset_of(y_plus) {
        return Err(Error::Containment(
            "formation network must contain the previous network",
        ));
    }
    if !y_minus.is_subset_of(y_prev) {
        return Err(Error::Containment(
            "dissolution network must be contained in the previous network",
        ));
    }
    let mut out = y_minus.clone();
    for d in y_plus.difference(y_prev) {
        out.add_edge(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn net(n: usize, edges: &[(u32, u32)]) -> Network {
        Network::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn empty_network_sizes() {
        let y = Network::empty(50).unwrap();
        assert_eq!(y.edge_count(), 0);
        assert_eq!(y.dyad_count(), 1225);
        assert_eq!(y.density(), 0.0);
        assert_eq!(Network::empty(2).unwrap().dyad_count(), 1);
        assert!(matches!(Network::empty(1), Err(Error::TooFewActors(1))));
        assert!(matches!(Network::empty(0), Err(Error::TooFewActors(0))));
    }

    #[test]
    fn rejects_bad_dyads() {
        let y = Network::empty(3).unwrap();
        assert!(matches!(y.dyad(1, 1), Err(Error::SelfLoop(1))));
        assert!(matches!(
            y.dyad(0, 3),
            Err(Error::ActorOutOfRange { actor: 3, .. })
        ));
        assert_eq!(y.dyad(2, 0).unwrap(), Dyad::new(0, 2).unwrap());
    }

    #[test]
    fn degrees_and_toggles() {
        let mut y = net(4, &[(0, 1), (1, 2)]);
        assert_eq!(y.degrees(), &[1, 2, 1, 0]);
        assert_eq!(y.degree1_count(), 2);
        let d = y.dyad(2, 3).unwrap();
        assert!(y.toggle(d));
        assert!(!y.add_edge(d));
        assert_eq!(y.edge_count(), 3);
        assert!(!y.toggle(d));
        assert!(!y.remove_edge(d));
        assert_eq!(y.edge_count(), 2);
    }

    #[test]
    fn neighbors_cross_word_boundary() {
        let mut y = Network::empty(130).unwrap();
        for j in [1u32, 63, 64, 65, 127, 129] {
            y.add_edge(Dyad::new(0, j).unwrap());
        }
        assert_eq!(y.neighbors(0).collect::<Vec<_>>(), vec![1, 63, 64, 65, 127, 129]);
        assert_eq!(y.neighbors(129).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn combine_examples() {
        // a=0, b=1, c=2, d=3
        let prev = net(4, &[(0, 1)]);
        let plus = net(4, &[(0, 1), (2, 3)]);
        let minus = net(4, &[]);
        assert_eq!(combine(&prev, &plus, &minus).unwrap(), net(4, &[(2, 3)]));

        let y = net(4, &[(0, 1), (1, 3)]);
        assert_eq!(combine(&y, &y, &y).unwrap(), y);
    }

    #[test]
    fn combine_rejects_containment_violations() {
        let prev = net(4, &[(0, 1)]);
        let bad_plus = net(4, &[(2, 3)]);
        let bad_minus = net(4, &[(0, 1), (1, 2)]);
        assert!(matches!(
            combine(&prev, &bad_plus, &prev),
            Err(Error::Containment(_))
        ));
        assert!(matches!(
            combine(&prev, &prev, &bad_minus),
            Err(Error::Containment(_))
        ));
    }

    fn edge_mask(n: usize) -> impl Strategy<Value = Vec<bool>> {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)
    }

    fn from_mask(n: usize, mask: &[bool], threshold: usize) -> Network {
        let mut y = Network::with_dense_threshold(n, threshold).unwrap();
        let dyads: Vec<_> = y.dyads().collect();
        for (d, &on) in dyads.into_iter().zip(mask) {
            if on {
                y.add_edge(d);
            }
        }
        y
    }

    proptest! {
        #[test]
        fn dense_and_sparse_agree(mask in edge_mask(9)) {
            let dense = from_mask(9, &mask, 100);
            let sparse = from_mask(9, &mask, 0);
            prop_assert!(dense.is_dense() && !sparse.is_dense());
            prop_assert_eq!(&dense, &sparse);
            prop_assert_eq!(dense.edges().collect::<Vec<_>>(), sparse.edges().collect::<Vec<_>>());
            prop_assert_eq!(dense.degrees(), sparse.degrees());
            let edges: Vec<_> = dense.edges().collect();
            prop_assert!(edges.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(edges.len(), mask.iter().filter(|&&b| b).count());
        }

        #[test]
        fn combine_lies_between_minus_and_plus(
            prev in edge_mask(6), add in edge_mask(6), keep in edge_mask(6)
        ) {
            let y_prev = from_mask(6, &prev, 100);
            let plus_mask: Vec<bool> = prev.iter().zip(&add).map(|(&p, &a)| p || a).collect();
            let minus_mask: Vec<bool> = prev.iter().zip(&keep).map(|(&p, &k)| p && k).collect();
            let y_plus = from_mask(6, &plus_mask, 100);
            let y_minus = from_mask(6, &minus_mask, 0);
            let out = combine(&y_prev, &y_plus, &y_minus).unwrap();
            prop_assert!(y_minus.is_subset_of(&out));
            prop_assert!(out.is_subset_of(&y_plus));
        }
    }
}
