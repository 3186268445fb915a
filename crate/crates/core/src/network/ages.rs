use std::collections::HashMap;

use super::{Dyad, Network, Spell};

/// Tie formation times and per-dyad toggle times.
///
/// `clock` is the time step about to be sampled. An extant edge formed at
/// step `s` has age `clock - s`, which is at least 1. Edges of a seeded
/// initial network are recorded as formed at step 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeAgeState {
    clock: u64,
    formation_time: HashMap<Dyad, u64>,
    last_toggle_time: HashMap<Dyad, u64>,
}

impl EdgeAgeState {
    /// State for a run starting from `initial` at step 1.
    pub fn new(initial: &Network) -> Self {
        EdgeAgeState {
            clock: 1,
            formation_time: initial.edges().map(|d| (d, 0)).collect(),
            last_toggle_time: HashMap::new(),
        }
    }

    pub fn from_parts(
        clock: u64,
        formation_time: HashMap<Dyad, u64>,
        last_toggle_time: HashMap<Dyad, u64>,
    ) -> Self {
        EdgeAgeState {
            clock,
            formation_time,
            last_toggle_time,
        }
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn formation_time(&self, d: Dyad) -> Option<u64> {
        self.formation_time.get(&d).copied()
    }

    pub fn last_toggle_time(&self, d: Dyad) -> Option<u64> {
        self.last_toggle_time.get(&d).copied()
    }

    /// Age of an extant tie as seen by the step at `clock`.
    pub fn edge_age(&self, d: Dyad) -> Option<u64> {
        self.formation_time(d).map(|s| self.clock - s)
    }

    /// Steps since the dyad last changed state; `None` if it never has.
    pub fn dyad_age(&self, d: Dyad) -> Option<u64> {
        self.last_toggle_time(d).map(|s| self.clock - s)
    }

    /// Records the transition `y_prev -> y_new` made at step `t` and moves the
    /// clock to `t + 1`. Returns the spells closed by this step.
    pub fn advance(&mut self, y_prev: &Network, y_new: &Network, t: u64) -> Vec<Spell> {
        debug_assert!(t >= 1);
        let mut closed = Vec::new();
        for d in y_prev.difference(y_new) {
            let onset = self
                .formation_time
                .remove(&d)
                .expect("dissolved tie has no formation time");
            closed.push(Spell {
                tail: d.lo(),
                head: d.hi(),
                onset,
                terminus: Some(t),
                censored: onset == 0,
            });
            self.last_toggle_time.insert(d, t);
        }
        for d in y_new.difference(y_prev) {
            self.formation_time.insert(d, t);
            self.last_toggle_time.insert(d, t);
        }
        self.clock = t + 1;
        closed
    }

    /// Still-open spells of `y`, sorted by dyad; marked censored.
    pub fn open_spells(&self, y: &Network) -> Vec<Spell> {
        y.edges()
            .map(|d| Spell {
                tail: d.lo(),
                head: d.hi(),
                onset: self.formation_time(d).unwrap_or(0),
                terminus: None,
                censored: true,
            })
            .collect()
    }

    /// Every edge of `y` has a formation time before `clock`, and no other dyad has one.
    pub fn is_consistent_with(&self, y: &Network) -> bool {
        self.formation_time.len() == y.edge_count()
            && y.edges().all(|d| {
                self.formation_time(d).is_some_and(|s| s < self.clock)
                    && self
                        .last_toggle_time(d)
                        .is_none_or(|l| l >= self.formation_time[&d])
            })
    }
}
