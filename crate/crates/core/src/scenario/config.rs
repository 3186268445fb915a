use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::sampler::{SamplerConfig, DEFAULT_MH_SWEEPS};
use crate::stats::{Eta, ModelSpec, Phase, StatTerm};

pub const DEFAULT_HAZARD_MAX_AGE: u64 = 15;

/// Terms and parameters of one phase, as written in a scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseModelConfig {
    pub terms: Vec<StatTerm>,
    pub theta: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_identity")]
    pub eta: Eta,
}

fn is_identity(eta: &Eta) -> bool {
    *eta == Eta::Identity
}

impl PhaseModelConfig {
    pub fn new(terms: Vec<StatTerm>, theta: Vec<f64>) -> Self {
        PhaseModelConfig {
            terms,
            theta,
            eta: Eta::Identity,
        }
    }

    pub fn to_spec(&self, phase: Phase) -> Result<ModelSpec> {
        ModelSpec::curved(phase, self.terms.clone(), self.theta.clone(), self.eta.clone())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmptyNetwork {
    #[default]
    #[serde(rename = "empty")]
    Empty,
}

/// `"empty"` or a list of `[tail, head]` pairs with 1-based actor labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialNetwork {
    Named(EmptyNetwork),
    Edges(Vec<[u32; 2]>),
}

impl Default for InitialNetwork {
    fn default() -> Self {
        InitialNetwork::Named(EmptyNetwork::Empty)
    }
}

impl InitialNetwork {
    pub fn build(&self, n: usize) -> Result<Option<Network>> {
        match self {
            InitialNetwork::Named(EmptyNetwork::Empty) => Ok(None),
            InitialNetwork::Edges(edges) => {
                let mut y = Network::empty(n)?;
                for &[a, b] in edges {
                    if a == 0 || b == 0 {
                        return Err(Error::Config("actor labels start at 1".into()));
                    }
                    let d = y.dyad(a - 1, b - 1)?;
                    y.add_edge(d);
                }
                Ok(Some(y))
            }
        }
    }
}

/// Sampler settings as written in a scenario file; the seed lives at the top level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSettings {
    pub mh_sweeps: u32,
    pub exact_when_independent: bool,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        SamplerSettings {
            mh_sweeps: DEFAULT_MH_SWEEPS,
            exact_when_independent: true,
        }
    }
}

impl SamplerSettings {
    pub fn with_seed(&self, seed: u64) -> SamplerConfig {
        SamplerConfig {
            mh_sweeps: self.mh_sweeps,
            seed,
            exact_when_independent: self.exact_when_independent,
        }
    }
}

fn one() -> usize {
    1
}

fn default_hazard_max_age() -> u64 {
    DEFAULT_HAZARD_MAX_AGE
}

/// A simulation scenario: network size, run length, both phase models and
/// how many independent replicates to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub steps: u64,
    #[serde(default)]
    pub burn_in: u64,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub initial: InitialNetwork,
    pub formation: PhaseModelConfig,
    pub dissolution: PhaseModelConfig,
    #[serde(default)]
    pub sampler: SamplerSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<PathBuf>,
    #[serde(default = "default_hazard_max_age")]
    pub hazard_max_age: u64,
}

impl ScenarioConfig {
    /// Parses and validates a JSON scenario. Messages carry the line of the
    /// offending input where it can be located.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        config.validate().map_err(|(field, err)| {
            let msg = match err {
                Error::Config(m) => m,
                other => other.to_string(),
            };
            match line_of_key(text, field) {
                Some(line) => Error::Config(format!("line {line}: `{field}`: {msg}")),
                None => Error::Config(format!("`{field}`: {msg}")),
            }
        })?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every invariant; on failure names the top-level field at fault.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, Error)> {
        if self.n < 2 {
            return Err(("n", Error::TooFewActors(self.n)));
        }
        if self.steps < 1 {
            return Err(("steps", Error::Config("steps must be at least 1".into())));
        }
        if self.burn_in >= self.steps {
            return Err((
                "burn_in",
                Error::Config(format!(
                    "burn_in ({}) must be smaller than steps ({})",
                    self.burn_in, self.steps
                )),
            ));
        }
        if self.replicates < 1 {
            return Err((
                "replicates",
                Error::Config("replicates must be at least 1".into()),
            ));
        }
        if self.hazard_max_age < 1 {
            return Err((
                "hazard_max_age",
                Error::Config("hazard_max_age must be at least 1".into()),
            ));
        }
        if self.sampler.mh_sweeps < 1 {
            return Err(("mh_sweeps", Error::Config("mh_sweeps must be at least 1".into())));
        }
        self.formation
            .to_spec(Phase::Formation)
            .map_err(|e| ("formation", e))?;
        self.dissolution
            .to_spec(Phase::Dissolution)
            .map_err(|e| ("dissolution", e))?;
        self.initial.build(self.n).map_err(|e| ("initial", e))?;
        Ok(())
    }

    pub fn specs(&self) -> Result<(ModelSpec, ModelSpec)> {
        Ok((
            self.formation.to_spec(Phase::Formation)?,
            self.dissolution.to_spec(Phase::Dissolution)?,
        ))
    }
}

fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}

/// The monogamy-bias model with coefficients
/// `(formation edges, formation degree1, dissolution edges, dissolution degree1)`.
pub fn monogamy_scenario(
    theta: [f64; 4],
    n: usize,
    steps: u64,
    burn_in: u64,
    replicates: usize,
    seed: u64,
) -> ScenarioConfig {
    ScenarioConfig {
        n,
        steps,
        burn_in,
        replicates,
        seed,
        initial: InitialNetwork::default(),
        formation: PhaseModelConfig::new(vec![StatTerm::Edges, StatTerm::Degree1], theta[..2].to_vec()),
        dissolution: PhaseModelConfig::new(vec![StatTerm::Edges, StatTerm::Degree1], theta[2..].to_vec()),
        sampler: SamplerSettings::default(),
        outputs: None,
        hazard_max_age: DEFAULT_HAZARD_MAX_AGE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
  "n": 50,
  "steps": 200,
  "burn_in": 20,
  "replicates": 2,
  "seed": 7,
  "initial": [[1, 2], [3, 4]],
  "formation": {"terms": [{"kind": "edges"}, {"kind": "dyad_age_in_set", "ages": [1, 2]}], "theta": [-6, -3]},
  "dissolution": {"terms": [{"kind": "edges"}, {"kind": "age_in_set", "ages": [1,2,3,4,5,6]}], "theta": [2.1972, -0.8109]},
  "sampler": {"mh_sweeps": 5}
}"#;

    #[test]
    fn parses_and_round_trips() {
        let config = ScenarioConfig::from_json(EXAMPLE).unwrap();
        assert_eq!(config.sampler.mh_sweeps, 5);
        assert!(config.sampler.exact_when_independent);
        assert_eq!(config.hazard_max_age, 15);
        let y0 = config.initial.build(config.n).unwrap().unwrap();
        assert_eq!(y0.edge_count(), 2);
        let again = ScenarioConfig::from_json(&config.to_json()).unwrap();
        assert_eq!(again, config);
    }

    #[test]
    fn empty_initial_forms() {
        let text = EXAMPLE.replace(r#"[[1, 2], [3, 4]]"#, r#""empty""#);
        let config = ScenarioConfig::from_json(&text).unwrap();
        assert_eq!(config.initial, InitialNetwork::default());
        assert!(config.initial.build(5).unwrap().is_none());
    }

    #[test]
    fn burn_in_must_precede_end() {
        let text = EXAMPLE.replace(r#""burn_in": 20"#, r#""burn_in": 200"#);
        let err = ScenarioConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("burn_in"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = EXAMPLE.replace(r#""seed": 7,"#, r#""seed": 7,,"#);
        let err = ScenarioConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("line 6"), "{err}");
    }

    #[test]
    fn model_errors_are_reported() {
        let wrong_len = EXAMPLE.replace("[-6, -3]", "[-6]");
        let err = ScenarioConfig::from_json(&wrong_len).unwrap_err().to_string();
        assert!(err.contains("line 8") && err.contains("formation"), "{err}");

        let wrong_phase = EXAMPLE.replace(r#""kind": "dyad_age_in_set""#, r#""kind": "age_in_set""#);
        assert!(ScenarioConfig::from_json(&wrong_phase).is_err());

        let bad_edge = EXAMPLE.replace("[3, 4]]", "[3, 3]]");
        assert!(ScenarioConfig::from_json(&bad_edge).is_err());
        let out_of_range = EXAMPLE.replace("[3, 4]]", "[3, 51]]");
        assert!(ScenarioConfig::from_json(&out_of_range).is_err());

        let unknown = EXAMPLE.replace(r#""seed": 7"#, r#""sede": 7"#);
        assert!(ScenarioConfig::from_json(&unknown).is_err());
    }
}
