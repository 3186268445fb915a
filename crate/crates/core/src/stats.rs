//! Sufficient statistics for the formation and dissolution models and their
//! change statistics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::duration::{curved_eta, MixtureModel};
use crate::error::{Error, Result};
use crate::network::{Dyad, EdgeAgeState, Network};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Formation,
    Dissolution,
}

/// One statistic term. Age terms read tie ages from [`EdgeAgeState`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StatTerm {
    /// Number of ties.
    Edges,
    /// Number of actors with exactly one tie.
    Degree1,
    /// Ties whose age is in `ages`. Dissolution only.
    AgeInSet { ages: BTreeSet<u64> },
    /// One count per age `1..a0`, the last bucket collecting ages `>= a0`. Dissolution only.
    AgeBuckets { a0: u64 },
    /// Sum over ties of `min(age, a0)`. Dissolution only.
    LinearAge { a0: u64 },
    /// Ties whose dyad last toggled a number of steps ago that is in `ages`. Formation only.
    DyadAgeInSet { ages: BTreeSet<u64> },
}

impl StatTerm {
    pub fn validate(&self) -> Result<()> {
        match self {
            StatTerm::AgeInSet { ages } | StatTerm::DyadAgeInSet { ages } => {
                if ages.is_empty() {
                    return Err(Error::InvalidTerm("age set must not be empty".into()));
                }
                if ages.contains(&0) {
                    return Err(Error::InvalidTerm("ages must be positive".into()));
                }
            }
            StatTerm::AgeBuckets { a0 } | StatTerm::LinearAge { a0 } => {
                if *a0 == 0 {
                    return Err(Error::InvalidTerm("a0 must be at least 1".into()));
                }
            }
            StatTerm::Edges | StatTerm::Degree1 => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            StatTerm::Edges => "edges",
            StatTerm::Degree1 => "degree1",
            StatTerm::AgeInSet { .. } => "age_in_set",
            StatTerm::AgeBuckets { .. } => "age_buckets",
            StatTerm::LinearAge { .. } => "linear_age",
            StatTerm::DyadAgeInSet { .. } => "dyad_age_in_set",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            StatTerm::AgeBuckets { a0 } => *a0 as usize,
            _ => 1,
        }
    }

    pub fn allowed_in(&self, phase: Phase) -> bool {
        match self {
            StatTerm::Edges | StatTerm::Degree1 => true,
            StatTerm::AgeInSet { .. } | StatTerm::AgeBuckets { .. } | StatTerm::LinearAge { .. } => {
                phase == Phase::Dissolution
            }
            StatTerm::DyadAgeInSet { .. } => phase == Phase::Formation,
        }
    }

    /// Whether the change statistic of a dyad ignores the rest of the network.
    pub fn is_dyad_independent(&self) -> bool {
        !matches!(self, StatTerm::Degree1)
    }

    /// Writes `g(y ∪ {d}) - g(y \ {d})` into `out` (length `dimension()`).
    ///
    /// Age terms contribute zero for dyads without a recorded tie age.
    pub fn change_into(&self, y: &Network, ages: &EdgeAgeState, d: Dyad, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dimension());
        match self {
            StatTerm::Edges => out[0] = 1.0,
            StatTerm::Degree1 => out[0] = degree1_change(y, d),
            StatTerm::AgeInSet { ages: set } => {
                out[0] = indicator(ages.edge_age(d).is_some_and(|a| set.contains(&a)));
            }
            StatTerm::AgeBuckets { a0 } => {
                out.fill(0.0);
                if let Some(age) = ages.edge_age(d) {
                    out[(age.min(*a0) - 1) as usize] = 1.0;
                }
            }
            StatTerm::LinearAge { a0 } => {
                out[0] = ages.edge_age(d).map_or(0.0, |a| a.min(*a0) as f64);
            }
            StatTerm::DyadAgeInSet { ages: set } => {
                out[0] = indicator(ages.dyad_age(d).is_some_and(|a| set.contains(&a)));
            }
        }
    }

    /// `coef · Δ_d g` without allocating.
    pub fn change_dot(&self, y: &Network, ages: &EdgeAgeState, d: Dyad, coef: &[f64]) -> f64 {
        match self {
            StatTerm::Edges => coef[0],
            StatTerm::Degree1 => coef[0] * degree1_change(y, d),
            StatTerm::AgeInSet { ages: set } => {
                if ages.edge_age(d).is_some_and(|a| set.contains(&a)) {
                    coef[0]
                } else {
                    0.0
                }
            }
            StatTerm::AgeBuckets { a0 } => ages.edge_age(d).map_or(0.0, |a| coef[(a.min(*a0) - 1) as usize]),
            StatTerm::LinearAge { a0 } => ages.edge_age(d).map_or(0.0, |a| coef[0] * a.min(*a0) as f64),
            StatTerm::DyadAgeInSet { ages: set } => {
                if ages.dyad_age(d).is_some_and(|a| set.contains(&a)) {
                    coef[0]
                } else {
                    0.0
                }
            }
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Change in the count of degree-1 actors from adding `d` to `y \ {d}`.
fn degree1_change(y: &Network, d: Dyad) -> f64 {
    let present = u32::from(y.has_edge(d));
    let endpoint = |deg: u32| match deg - present {
        0 => 1.0,
        1 => -1.0,
        _ => 0.0,
    };
    endpoint(y.degree(d.lo())) + endpoint(y.degree(d.hi()))
}

/// Full evaluation of one term on `y`.
pub fn eval_stat(term: &StatTerm, y: &Network, ages: &EdgeAgeState) -> Result<Vec<f64>> {
    let mut out = vec![0.0; term.dimension()];
    match term {
        StatTerm::Edges => out[0] = y.edge_count() as f64,
        StatTerm::Degree1 => out[0] = y.degree1_count() as f64,
        StatTerm::AgeInSet { ages: set } => {
            for d in y.edges() {
                if set.contains(&edge_age(ages, d)?) {
                    out[0] += 1.0;
                }
            }
        }
        StatTerm::AgeBuckets { a0 } => {
            for d in y.edges() {
                out[(edge_age(ages, d)?.min(*a0) - 1) as usize] += 1.0;
            }
        }
        StatTerm::LinearAge { a0 } => {
            for d in y.edges() {
                out[0] += edge_age(ages, d)?.min(*a0) as f64;
            }
        }
        StatTerm::DyadAgeInSet { ages: set } => {
            out[0] = y
                .edges()
                .filter(|&d| ages.dyad_age(d).is_some_and(|a| set.contains(&a)))
                .count() as f64;
        }
    }
    Ok(out)
}

fn edge_age(ages: &EdgeAgeState, d: Dyad) -> Result<u64> {
    ages.edge_age(d).ok_or(Error::MissingAge(d))
}

/// `g(y ∪ {d}) - g(y \ {d})` for one term.
pub fn change_stat(term: &StatTerm, y: &Network, ages: &EdgeAgeState, d: Dyad) -> Vec<f64> {
    let mut out = vec![0.0; term.dimension()];
    term.change_into(y, ages, d, &mut out);
    out
}

/// Maps model parameters to canonical (natural) parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eta {
    /// Parameters are already canonical.
    #[default]
    Identity,
    /// `theta = (omega_1..omega_m, pi_1..pi_m)` of a geometric mixture, mapped
    /// to per-age log-odds of preservation for a single `age_buckets` term.
    GeometricMixture,
}

/// Ordered statistic terms with their parameters, for one phase.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    phase: Phase,
    terms: Vec<StatTerm>,
    theta: Vec<f64>,
    eta: Eta,
    canonical: Vec<f64>,
    offsets: Vec<usize>,
}

impl ModelSpec {
    pub fn new(phase: Phase, terms: Vec<StatTerm>, theta: Vec<f64>) -> Result<Self> {
        Self::curved(phase, terms, theta, Eta::Identity)
    }

    pub fn curved(phase: Phase, terms: Vec<StatTerm>, theta: Vec<f64>, eta: Eta) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidModel("at least one term is required".into()));
        }
        for term in &terms {
            term.validate()?;
            if !term.allowed_in(phase) {
                return Err(Error::InvalidModel(format!(
                    "term `{}` is not allowed in a {:?} model",
                    term.name(),
                    phase
                )));
            }
        }
        if let Some(bad) = theta.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidModel(format!("parameter {bad} is not finite")));
        }
        let mut offsets = Vec::with_capacity(terms.len());
        let mut dimension = 0;
        for term in &terms {
            offsets.push(dimension);
            dimension += term.dimension();
        }
        let canonical = match eta {
            Eta::Identity => theta.clone(),
            Eta::GeometricMixture => {
                let a0 = match terms.as_slice() {
                    [StatTerm::AgeBuckets { a0 }] => *a0,
                    _ => {
                        return Err(Error::InvalidModel(
                            "geometric_mixture mapping needs exactly one age_buckets term".into(),
                        ))
                    }
                };
                if theta.is_empty() || !theta.len().is_multiple_of(2) {
                    return Err(Error::InvalidModel(
                        "geometric_mixture parameters are (omega_1..omega_m, pi_1..pi_m)".into(),
                    ));
                }
                let (omega, pi) = theta.split_at(theta.len() / 2);
                let model = MixtureModel::new(omega.to_vec(), pi.to_vec())?;
                curved_eta(&model, a0)?
            }
        };
        if canonical.len() != dimension {
            return Err(Error::InvalidModel(format!(
                "{} canonical parameters for {} statistics",
                canonical.len(),
                dimension
            )));
        }
        Ok(ModelSpec {
            phase,
            terms,
            theta,
            eta,
            canonical,
            offsets,
        })
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn terms(&self) -> &[StatTerm] {
        &self.terms
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn eta(&self) -> &Eta {
        &self.eta
    }

    /// `η(θ)`.
    pub fn canonical(&self) -> &[f64] {
        &self.canonical
    }

    pub fn dimension(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_dyad_independent(&self) -> bool {
        dyad_independent(self)
    }

    /// Like [`dyad_independent`], but ignores dependent terms whose canonical
    /// coefficients are all zero, since they leave the kernel unchanged.
    pub fn is_effectively_dyad_independent(&self) -> bool {
        self.blocks()
            .all(|(term, coef)| term.is_dyad_independent() || coef.iter().all(|&c| c == 0.0))
    }

    fn blocks(&self) -> impl Iterator<Item = (&StatTerm, &[f64])> {
        self.terms
            .iter()
            .zip(&self.offsets)
            .map(|(term, &start)| (term, &self.canonical[start..start + term.dimension()]))
    }

    /// `η(θ) · Δ_d g(y)`: log-odds of `d` being tied given the rest of `y`.
    pub fn change_score(&self, y: &Network, ages: &EdgeAgeState, d: Dyad) -> f64 {
        self.blocks()
            .map(|(term, coef)| term.change_dot(y, ages, d, coef))
            .sum()
    }

    pub fn change_vector(&self, y: &Network, ages: &EdgeAgeState, d: Dyad) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        for (term, &start) in self.terms.iter().zip(&self.offsets) {
            term.change_into(y, ages, d, &mut out[start..start + term.dimension()]);
        }
        out
    }

    pub fn eval(&self, y: &Network, ages: &EdgeAgeState) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.dimension());
        for term in &self.terms {
            out.extend(eval_stat(term, y, ages)?);
        }
        Ok(out)
    }
}

/// True iff every term's change statistic ignores the rest of the network.
pub fn dyad_independent(spec: &ModelSpec) -> bool {
    spec.terms.iter().all(StatTerm::is_dyad_independent)
}
