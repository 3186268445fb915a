//! Scenario files, multi-replicate runs and their output files.

mod config;
mod curves;
mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hazard::{empirical_hazard, equilibrium_stats, EquilibriumStats, HazardTable, HAZARD_CSV_HEADER};
use crate::network::{SpellLog, SPELL_CSV_HEADER};
use crate::sampler::simulate;

pub use config::{
    monogamy_scenario, EmptyNetwork, InitialNetwork, PhaseModelConfig, SamplerSettings, ScenarioConfig,
    DEFAULT_HAZARD_MAX_AGE,
};
pub use curves::{write_curve_csv, CurvePoint, DurationModel, DurationModelConfig, CURVE_CSV_HEADER};
pub use output::{sha256_hex, validate_csv, write_atomic, Column};

pub const SPELLS_FILE: &str = "spells.csv";
pub const HAZARD_FILE: &str = "hazard.csv";
pub const STATS_FILE: &str = "stats.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const HAZARD_CURVES_FILE: &str = "hazard_curves.csv";
pub const EQUILIBRIUM_TABLE_FILE: &str = "equilibrium_table.csv";

const SPELL_EXCLUSION_NOTE: &str =
    "hazard estimates use spells formed after burn-in that ended before the last step; \
     spells still open at the end and spells of the initial network are excluded";

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of replicate `r` of a run seeded with `seed`.
pub fn replicate_seed(seed: u64, replicate: usize) -> u64 {
    splitmix64(seed ^ splitmix64(replicate as u64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub seed: u64,
    pub spells: SpellLog,
    pub final_time: u64,
    pub equilibrium: EquilibriumStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub replicates: Vec<ReplicateResult>,
    /// Pooled over replicates.
    pub hazard: HazardTable,
    /// Averaged over replicates.
    pub equilibrium: EquilibriumStats,
}

/// Runs every replicate of a scenario and summarizes them.
pub fn execute_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    config
        .validate()
        .map_err(|(field, e)| Error::Config(format!("`{field}`: {e}")))?;
    let (formation, dissolution) = config.specs()?;
    let initial = config.initial.build(config.n)?;
    let replicates = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let seed = replicate_seed(config.seed, r);
            let sampler = config.sampler.with_seed(seed);
            let trajectory = simulate(
                config.n,
                config.steps,
                &formation,
                &dissolution,
                &sampler,
                initial.as_ref(),
            )?;
            let equilibrium = equilibrium_stats(&trajectory, config.burn_in)?;
            Ok(ReplicateResult {
                replicate: r,
                seed,
                spells: trajectory.spell_log,
                final_time: config.steps,
                equilibrium,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let hazard = empirical_hazard(
        replicates.iter().flat_map(|r| r.spells.iter()),
        config.burn_in,
        config.hazard_max_age,
    )?;
    let k = replicates.len() as f64;
    let equilibrium = EquilibriumStats {
        density_mean: replicates.iter().map(|r| r.equilibrium.density_mean).sum::<f64>() / k,
        prop_degree1_mean: replicates
            .iter()
            .map(|r| r.equilibrium.prop_degree1_mean)
            .sum::<f64>()
            / k,
        n_steps_used: config.steps - config.burn_in,
    };
    Ok(ScenarioResult {
        config: config.clone(),
        replicates,
        hazard,
        equilibrium,
    })
}

#[derive(Serialize)]
struct ReplicateStats {
    replicate: usize,
    seed: u64,
    density_mean: f64,
    prop_degree1_mean: f64,
    n_steps_used: u64,
}

/// Contents of `stats.json`. `n_steps_used` counts steps per replicate.
#[derive(Serialize)]
struct StatsFile {
    density_mean: f64,
    prop_degree1_mean: f64,
    n_steps_used: u64,
    n_replicates: usize,
    replicates: Vec<ReplicateStats>,
    n_eligible_spells: u64,
    spell_exclusions: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: ScenarioConfig,
    pub replicate_seeds: Vec<u64>,
    /// SHA-256 of every other output file.
    pub files: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

/// What was written to an output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct WrittenOutputs {
    pub files: BTreeMap<String, String>,
    pub manifest_sha256: String,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn render<F>(f: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

/// Writes spells, hazard table, equilibrium stats and manifest for one scenario.
pub fn write_scenario_outputs(result: &ScenarioResult, dir: &Path) -> Result<WrittenOutputs> {
    create_dir(dir)?;
    let spells = render(|w| {
        use std::io::Write;
        writeln!(w, "{SPELL_CSV_HEADER}")?;
        for r in &result.replicates {
            r.spells.write_csv_rows(w, r.replicate, r.final_time)?;
        }
        Ok(())
    });
    let hazard = render(|w| result.hazard.write_csv(w));
    let stats = StatsFile {
        density_mean: result.equilibrium.density_mean,
        prop_degree1_mean: result.equilibrium.prop_degree1_mean,
        n_steps_used: result.equilibrium.n_steps_used,
        n_replicates: result.replicates.len(),
        replicates: result
            .replicates
            .iter()
            .map(|r| ReplicateStats {
                replicate: r.replicate,
                seed: r.seed,
                density_mean: r.equilibrium.density_mean,
                prop_degree1_mean: r.equilibrium.prop_degree1_mean,
                n_steps_used: r.equilibrium.n_steps_used,
            })
            .collect(),
        n_eligible_spells: result.hazard.n_spells,
        spell_exclusions: SPELL_EXCLUSION_NOTE,
    };
    let stats = serde_json::to_vec_pretty(&stats)?;

    let mut files = BTreeMap::new();
    for (name, bytes) in [
        (SPELLS_FILE, &spells),
        (HAZARD_FILE, &hazard),
        (STATS_FILE, &stats),
    ] {
        write_atomic(dir, name, bytes)?;
        files.insert(name.to_string(), sha256_hex(bytes));
    }
    validate_csv(
        &dir.join(SPELLS_FILE),
        SPELL_CSV_HEADER,
        &[
            Column::Int,
            Column::Int,
            Column::Int,
            Column::Int,
            Column::Int,
            Column::Flag,
        ],
    )?;
    validate_csv(
        &dir.join(HAZARD_FILE),
        HAZARD_CSV_HEADER,
        &[Column::Int, Column::Int, Column::Int, Column::OptFloat],
    )?;

    let mut config = result.config.clone();
    config.outputs = None;
    let manifest = RunManifest {
        tool: "stergm".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config,
        replicate_seeds: result.replicates.iter().map(|r| r.seed).collect(),
        files: files.clone(),
        notes: vec![SPELL_EXCLUSION_NOTE.into()],
    };
    let manifest = serde_json::to_vec_pretty(&manifest)?;
    write_atomic(dir, MANIFEST_FILE, &manifest)?;
    Ok(WrittenOutputs {
        files,
        manifest_sha256: sha256_hex(&manifest),
    })
}

/// Runs a scenario and writes its outputs to `dir`.
pub fn run_scenario(config: &ScenarioConfig, dir: &Path) -> Result<(ScenarioResult, WrittenOutputs)> {
    let result = execute_scenario(config)?;
    let written = write_scenario_outputs(&result, dir)?;
    Ok((result, written))
}

/// The four monogamy-bias configurations `(formation edges, formation degree1,
/// dissolution edges, dissolution degree1)`: total dyadic independence,
/// dependent dissolution, dependent formation, and both dependent.
pub const PAPER_CONFIGURATIONS: [(&str, [f64; 4]); 4] = [
    ("I", [-6.0, 0.0, 2.0, 0.0]),
    ("D", [-6.0, 0.0, 2.0, 2.0]),
    ("F", [-6.0, 2.0, 2.0, 0.0]),
    ("B", [-6.0, 2.0, 2.0, 2.0]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReproduceOptions {
    pub seed: u64,
    pub replicates: usize,
    pub n: usize,
    pub steps: u64,
    pub burn_in: u64,
    pub mh_sweeps: u32,
    pub hazard_max_age: u64,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            seed: 0,
            replicates: 4,
            n: 50,
            steps: 11_000,
            burn_in: 1_000,
            mh_sweeps: crate::sampler::DEFAULT_MH_SWEEPS,
            hazard_max_age: DEFAULT_HAZARD_MAX_AGE,
        }
    }
}

/// Scenario configs for the four built-in configurations, each with its own derived seed.
pub fn paper_scenarios(opts: &ReproduceOptions) -> Vec<(&'static str, ScenarioConfig)> {
    PAPER_CONFIGURATIONS
        .iter()
        .enumerate()
        .map(|(i, &(name, theta))| {
            let mut config = monogamy_scenario(
                theta,
                opts.n,
                opts.steps,
                opts.burn_in,
                opts.replicates,
                splitmix64(opts.seed.wrapping_add(i as u64)),
            );
            config.sampler.mh_sweeps = opts.mh_sweeps;
            config.hazard_max_age = opts.hazard_max_age;
            (name, config)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReproduceReport {
    pub results: Vec<(&'static str, ScenarioResult)>,
    pub manifest_sha256: String,
}

impl ReproduceReport {
    pub fn get(&self, name: &str) -> Option<&ScenarioResult> {
        self.results.iter().find(|(n, _)| *n == name).map(|(_, r)| r)
    }
}

/// Runs the four built-in configurations without writing anything.
pub fn execute_paper(opts: &ReproduceOptions) -> Result<Vec<(&'static str, ScenarioResult)>> {
    paper_scenarios(opts)
        .into_par_iter()
        .map(|(name, config)| Ok((name, execute_scenario(&config)?)))
        .collect()
}

/// Runs the four built-in configurations; writes one directory per
/// configuration plus the combined hazard curves and equilibrium table.
pub fn reproduce_paper(out_dir: &Path, opts: &ReproduceOptions) -> Result<ReproduceReport> {
    let results = execute_paper(opts)?;
    create_dir(out_dir)?;
    let mut files = BTreeMap::new();
    for (name, result) in &results {
        let written = write_scenario_outputs(result, &out_dir.join(name))?;
        for (file, hash) in written.files {
            files.insert(format!("{name}/{file}"), hash);
        }
        files.insert(format!("{name}/{MANIFEST_FILE}"), written.manifest_sha256);
    }

    let curves = render(|w| {
        use std::io::Write;
        writeln!(w, "configuration,{HAZARD_CSV_HEADER}")?;
        for (name, result) in &results {
            for row in &result.hazard.rows {
                write!(
                    w,
                    "{name},{},{},{},",
                    row.age, row.n_terminated_at, row.n_terminated_ge
                )?;
                match row.hazard {
                    Some(h) => writeln!(w, "{h}")?,
                    None => writeln!(w, "NA")?,
                }
            }
        }
        Ok(())
    });
    let table = render(|w| {
        use std::io::Write;
        writeln!(w, "configuration,density,prop_degree1,n_steps_used")?;
        for (name, result) in &results {
            let eq = &result.equilibrium;
            writeln!(
                w,
                "{name},{},{},{}",
                eq.density_mean, eq.prop_degree1_mean, eq.n_steps_used
            )?;
        }
        Ok(())
    });
    for (name, bytes) in [(HAZARD_CURVES_FILE, &curves), (EQUILIBRIUM_TABLE_FILE, &table)] {
        write_atomic(out_dir, name, bytes)?;
        files.insert(name.to_string(), sha256_hex(bytes));
    }
    validate_csv(
        &out_dir.join(HAZARD_CURVES_FILE),
        &format!("configuration,{HAZARD_CSV_HEADER}"),
        &[
            Column::Text,
            Column::Int,
            Column::Int,
            Column::Int,
            Column::OptFloat,
        ],
    )?;
    validate_csv(
        &out_dir.join(EQUILIBRIUM_TABLE_FILE),
        "configuration,density,prop_degree1,n_steps_used",
        &[Column::Text, Column::Float, Column::Float, Column::Int],
    )?;

    #[derive(Serialize)]
    struct PaperManifest<'a> {
        tool: &'a str,
        version: &'a str,
        seed: u64,
        replicates: usize,
        n: usize,
        steps: u64,
        burn_in: u64,
        mh_sweeps: u32,
        configurations: BTreeMap<&'a str, [f64; 4]>,
        files: &'a BTreeMap<String, String>,
    }
    let manifest = serde_json::to_vec_pretty(&PaperManifest {
        tool: "stergm",
        version: env!("CARGO_PKG_VERSION"),
        seed: opts.seed,
        replicates: opts.replicates,
        n: opts.n,
        steps: opts.steps,
        burn_in: opts.burn_in,
        mh_sweeps: opts.mh_sweeps,
        configurations: PAPER_CONFIGURATIONS.iter().copied().collect(),
        files: &files,
    })?;
    write_atomic(out_dir, MANIFEST_FILE, &manifest)?;
    Ok(ReproduceReport {
        results,
        manifest_sha256: sha256_hex(&manifest),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ScenarioConfig {
        let mut c = monogamy_scenario([-3.0, 1.0, 1.5, 1.0], 15, 120, 20, 3, 11);
        c.sampler.mh_sweeps = 2;
        c
    }

    #[test]
    fn replicate_seeds_are_distinct() {
        let seeds: std::collections::BTreeSet<_> = (0..100).map(|r| replicate_seed(5, r)).collect();
        assert_eq!(seeds.len(), 100);
    }

    #[test]
    fn run_writes_valid_files_and_is_reproducible() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let (result, written) = run_scenario(&small_config(), a.path()).unwrap();
        let (_, again) = run_scenario(&small_config(), b.path()).unwrap();
        assert_eq!(written, again);
        for name in [SPELLS_FILE, HAZARD_FILE, STATS_FILE, MANIFEST_FILE] {
            let x = fs::read(a.path().join(name)).unwrap();
            let y = fs::read(b.path().join(name)).unwrap();
            assert_eq!(x, y, "{name}");
        }
        assert_eq!(result.replicates.len(), 3);
        let stats: serde_json::Value =
            serde_json::from_slice(&fs::read(a.path().join(STATS_FILE)).unwrap()).unwrap();
        assert_eq!(stats["n_steps_used"], 100);
        assert!(stats["density_mean"].as_f64().unwrap() > 0.0);
        let manifest: RunManifest =
            serde_json::from_slice(&fs::read(a.path().join(MANIFEST_FILE)).unwrap()).unwrap();
        assert_eq!(manifest.replicate_seeds.len(), 3);
        assert_eq!(manifest.files[HAZARD_FILE], written.files[HAZARD_FILE]);
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let mut c = small_config();
        c.burn_in = c.steps;
        assert!(matches!(execute_scenario(&c), Err(Error::Config(_))));
    }

    #[test]
    fn unwritable_output_directory_fails() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let err = run_scenario(&small_config(), &blocker.join("sub")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
