//! One-step formation/dissolution sampling and trajectory simulation.
//!
//! Each phase draws from its conditional model given the previous network:
//! formation may only add ties, dissolution may only remove them. Models whose
//! change statistics ignore the rest of the network are sampled dyad by dyad
//! from their exact marginals; other models use a toggle chain over the
//! phase's toggleable dyads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::duration::ilogit;
use crate::error::{Error, Result};
use crate::network::{combine, Dyad, EdgeAgeState, Network, Spell, SpellLog};
use crate::stats::{ModelSpec, Phase};

pub const DEFAULT_MH_SWEEPS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Passes over the toggleable dyads per phase when sampling by MCMC.
    pub mh_sweeps: u32,
    pub seed: u64,
    /// Sample dyad-independent models exactly instead of by MCMC.
    pub exact_when_independent: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            mh_sweeps: DEFAULT_MH_SWEEPS,
            seed: 0,
            exact_when_independent: true,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mh_sweeps == 0 {
            return Err(Error::Config("mh_sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Generator for one phase of one step, keyed by the run seed and a stream
/// derived from `(t, phase)`, so any step can be regenerated independently.
pub fn phase_rng(seed: u64, t: u64, phase: Phase) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase_bit = match phase {
        Phase::Formation => 0,
        Phase::Dissolution => 1,
    };
    rng.set_stream((t << 1) | phase_bit);
    rng
}

fn check_phase(spec: &ModelSpec, phase: Phase) -> Result<()> {
    if spec.phase() != phase {
        return Err(Error::InvalidModel(format!(
            "expected a {phase:?} model, got a {:?} model",
            spec.phase()
        )));
    }
    Ok(())
}

fn use_exact(spec: &ModelSpec, cfg: &SamplerConfig) -> bool {
    cfg.exact_when_independent && spec.is_effectively_dyad_independent()
}

/// Random-scan toggle chain over `toggleable`, `sweeps * len` proposals.
///
/// A proposed dyad is set on with its conditional probability given the rest
/// of `y` (Barker acceptance), which leaves the phase's conditional ERGM
/// invariant and, unlike min(1, ratio) acceptance, cannot cycle with period 2.
fn toggle_chain<R: Rng + ?Sized>(
    y: &mut Network,
    toggleable: &[Dyad],
    ages: &EdgeAgeState,
    spec: &ModelSpec,
    sweeps: u32,
    rng: &mut R,
) {
    if toggleable.is_empty() {
        return;
    }
    let proposals = sweeps as usize * toggleable.len();
    for _ in 0..proposals {
        let d = toggleable[rng.random_range(0..toggleable.len())];
        let p_on = ilogit(spec.change_score(y, ages, d));
        let on = rng.random::<f64>() < p_on;
        if on != y.has_edge(d) {
            y.toggle(d);
        }
    }
}

/// Draws `y+ ⊇ y_prev` from the formation model.
pub fn formation_phase<R: Rng + ?Sized>(
    y_prev: &Network,
    ages: &EdgeAgeState,
    spec: &ModelSpec,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Network> {
    check_phase(spec, Phase::Formation)?;
    let empty: Vec<Dyad> = y_prev.empty_dyads().collect();
    let mut y = y_prev.clone();
    if use_exact(spec, cfg) {
        for d in empty {
            if rng.random::<f64>() < ilogit(spec.change_score(y_prev, ages, d)) {
                y.add_edge(d);
            }
        }
    } else {
        toggle_chain(&mut y, &empty, ages, spec, cfg.mh_sweeps, rng);
    }
    Ok(y)
}

/// Draws `y- ⊆ y_prev` from the dissolution model.
pub fn dissolution_phase<R: Rng + ?Sized>(
    y_prev: &Network,
    ages: &EdgeAgeState,
    spec: &ModelSpec,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Network> {
    check_phase(spec, Phase::Dissolution)?;
    let extant: Vec<Dyad> = y_prev.edges().collect();
    let mut y = y_prev.clone();
    if use_exact(spec, cfg) {
        for d in extant {
            let survive = ilogit(spec.change_score(y_prev, ages, d));
            if rng.random::<f64>() >= survive {
                y.remove_edge(d);
            }
        }
    } else {
        toggle_chain(&mut y, &extant, ages, spec, cfg.mh_sweeps, rng);
    }
    Ok(y)
}

/// Network plus tie ages at the start of step `ages.clock()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimState {
    pub network: Network,
    pub ages: EdgeAgeState,
}

impl SimState {
    pub fn new(initial: Network) -> Self {
        let ages = EdgeAgeState::new(&initial);
        SimState {
            network: initial,
            ages,
        }
    }

    /// Next step to be sampled.
    pub fn time(&self) -> u64 {
        self.ages.clock()
    }
}

/// Samples step `t` with the caller's generators; returns spells closed at `t`.
pub fn step_with<R: Rng + ?Sized>(
    state: &mut SimState,
    formation: &ModelSpec,
    dissolution: &ModelSpec,
    cfg: &SamplerConfig,
    t: u64,
    formation_rng: &mut R,
    dissolution_rng: &mut R,
) -> Result<Vec<Spell>> {
    if t != state.time() {
        return Err(Error::InvalidArgument(format!(
            "state is at step {}, asked to sample step {t}",
            state.time()
        )));
    }
    let y_plus = formation_phase(&state.network, &state.ages, formation, cfg, formation_rng)?;
    let y_minus = dissolution_phase(&state.network, &state.ages, dissolution, cfg, dissolution_rng)?;
    let next = combine(&state.network, &y_plus, &y_minus)?;
    let closed = state.ages.advance(&state.network, &next, t);
    state.network = next;
    Ok(closed)
}

/// Samples step `t` with generators derived from `cfg.seed`.
pub fn step(
    state: &mut SimState,
    formation: &ModelSpec,
    dissolution: &ModelSpec,
    cfg: &SamplerConfig,
    t: u64,
) -> Result<Vec<Spell>> {
    let mut f_rng = phase_rng(cfg.seed, t, Phase::Formation);
    let mut d_rng = phase_rng(cfg.seed, t, Phase::Dissolution);
    step_with(state, formation, dissolution, cfg, t, &mut f_rng, &mut d_rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub edges: usize,
    pub degree1: usize,
    pub density: f64,
    pub prop_degree1: f64,
}

impl StepStats {
    pub fn of(y: &Network) -> Self {
        let degree1 = y.degree1_count();
        StepStats {
            edges: y.edge_count(),
            degree1,
            density: y.density(),
            prop_degree1: degree1 as f64 / y.n() as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Statistics of `y_1 ..= y_steps`.
    pub stats_series: Vec<StepStats>,
    /// Closed spells in the order they ended, then spells still open at the end.
    pub spell_log: SpellLog,
    pub final_state: SimState,
}

impl Trajectory {
    pub fn steps(&self) -> u64 {
        self.stats_series.len() as u64
    }
}

/// Runs `steps` transitions from `initial` (empty when `None`).
pub fn simulate(
    n: usize,
    steps: u64,
    formation: &ModelSpec,
    dissolution: &ModelSpec,
    cfg: &SamplerConfig,
    initial: Option<&Network>,
) -> Result<Trajectory> {
    if steps < 1 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    cfg.validate()?;
    let start = match initial {
        Some(y) if y.n() != n => return Err(Error::SizeMismatch(n, y.n())),
        Some(y) => y.clone(),
        None => Network::empty(n)?,
    };
    let mut state = SimState::new(start);
    let mut stats_series = Vec::with_capacity(steps as usize);
    let mut spell_log = SpellLog::new();
    for t in 1..=steps {
        spell_log.extend(step(&mut state, formation, dissolution, cfg, t)?);
        stats_series.push(StepStats::of(&state.network));
    }
    spell_log.extend(state.ages.open_spells(&state.network));
    Ok(Trajectory {
        stats_series,
        spell_log,
        final_state: state,
    })
}
