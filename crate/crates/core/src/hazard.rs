//! Empirical discrete hazard of tie durations and equilibrium summaries.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Spell;
use crate::sampler::Trajectory;

pub const HAZARD_CSV_HEADER: &str = "age,n_terminated_at,n_terminated_ge,hazard";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HazardRow {
    pub age: u64,
    pub n_terminated_at: u64,
    pub n_terminated_ge: u64,
    /// `None` when no eligible tie reached this age.
    pub hazard: Option<f64>,
}

/// Per-age counts of terminated ties and the estimated hazard
/// `#{duration = x} / #{duration >= x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HazardTable {
    pub rows: Vec<HazardRow>,
    /// Number of eligible (terminated, uncensored, post-burn-in) spells.
    pub n_spells: u64,
    /// Eligible spells with duration beyond the last tabulated age.
    pub n_beyond: u64,
}

impl HazardTable {
    pub fn get(&self, age: u64) -> Option<&HazardRow> {
        age.checked_sub(1).and_then(|i| self.rows.get(i as usize))
    }

    pub fn hazard(&self, age: u64) -> Option<f64> {
        self.get(age).and_then(|r| r.hazard)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{HAZARD_CSV_HEADER}")?;
        for r in &self.rows {
            write!(w, "{},{},{},", r.age, r.n_terminated_at, r.n_terminated_ge)?;
            match r.hazard {
                Some(h) => writeln!(w, "{h}")?,
                None => writeln!(w, "NA")?,
            }
        }
        Ok(())
    }
}

/// Hazard table for ages `1..=x_max` from spells that started after
/// `burn_in` and were observed to end. Censored spells are left out entirely.
pub fn empirical_hazard<'a, I>(spells: I, burn_in: u64, x_max: u64) -> Result<HazardTable>
where
    I: IntoIterator<Item = &'a Spell>,
{
    if x_max < 1 {
        return Err(Error::InvalidArgument("x_max must be at least 1".into()));
    }
    let mut at = vec![0u64; x_max as usize];
    let mut n_spells = 0u64;
    let mut n_beyond = 0u64;
    for s in spells {
        if s.censored || s.onset <= burn_in {
            continue;
        }
        let Some(duration) = s.duration() else {
            continue;
        };
        n_spells += 1;
        if duration > x_max {
            n_beyond += 1;
        } else {
            at[duration as usize - 1] += 1;
        }
    }
    let mut remaining = n_spells;
    let rows = at
        .iter()
        .enumerate()
        .map(|(i, &n_at)| {
            let row = HazardRow {
                age: i as u64 + 1,
                n_terminated_at: n_at,
                n_terminated_ge: remaining,
                hazard: (remaining > 0).then(|| n_at as f64 / remaining as f64),
            };
            remaining -= n_at;
            row
        })
        .collect();
    Ok(HazardTable {
        rows,
        n_spells,
        n_beyond,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumStats {
    pub density_mean: f64,
    pub prop_degree1_mean: f64,
    pub n_steps_used: u64,
}

/// Time averages of density and degree-1 proportion over steps after `burn_in`.
pub fn equilibrium_stats(trajectory: &Trajectory, burn_in: u64) -> Result<EquilibriumStats> {
    if trajectory.steps() <= burn_in {
        return Err(Error::InvalidArgument(format!(
            "trajectory of {} steps is not longer than burn-in {burn_in}",
            trajectory.steps()
        )));
    }
    let used = &trajectory.stats_series[burn_in as usize..];
    let n = used.len() as f64;
    Ok(EquilibriumStats {
        density_mean: used.iter().map(|s| s.density).sum::<f64>() / n,
        prop_degree1_mean: used.iter().map(|s| s.prop_degree1).sum::<f64>() / n,
        n_steps_used: used.len() as u64,
    })
}
