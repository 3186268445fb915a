use std::collections::BTreeSet;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::duration::{pmf_from_hazard, MixtureModel, PiecewiseModel};
use crate::error::{Error, Result};

pub const CURVE_CSV_HEADER: &str = "x,f,F,h";

/// Duration model as written in a model file for the `pmf` and `hazard` commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DurationModelConfig {
    /// Preservation log-odds `theta1`, plus `theta2` while age is in `ages`.
    Piecewise {
        theta1: f64,
        theta2: f64,
        ages: BTreeSet<u64>,
    },
    /// The same model given by its two hazard levels.
    PiecewiseHazards {
        baseline_hazard: f64,
        in_set_hazard: f64,
        ages: BTreeSet<u64>,
    },
    /// Geometric mixture with class hazards `omega` and incidences `pi`.
    Mixture { omega: Vec<f64>, pi: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DurationModel {
    Piecewise(PiecewiseModel),
    Mixture(MixtureModel),
}

impl DurationModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn build(&self) -> Result<DurationModel> {
        Ok(match self {
            DurationModelConfig::Piecewise { theta1, theta2, ages } => {
                DurationModel::Piecewise(PiecewiseModel::new(*theta1, *theta2, ages.clone())?)
            }
            DurationModelConfig::PiecewiseHazards {
                baseline_hazard,
                in_set_hazard,
                ages,
            } => DurationModel::Piecewise(PiecewiseModel::from_hazards(
                *baseline_hazard,
                *in_set_hazard,
                ages.clone(),
            )?),
            DurationModelConfig::Mixture { omega, pi } => {
                DurationModel::Mixture(MixtureModel::new(omega.clone(), pi.clone())?)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: u64,
    pub f: f64,
    #[serde(rename = "F")]
    pub cdf: f64,
    pub h: f64,
}

impl DurationModel {
    /// pmf, cdf and hazard at `x = 1..=x_max`.
    pub fn curve(&self, x_max: u64) -> Result<Vec<CurvePoint>> {
        if x_max < 1 {
            return Err(Error::InvalidArgument("x_max must be at least 1".into()));
        }
        Ok(match self {
            DurationModel::Piecewise(model) => {
                let hazards: Vec<f64> = (1..=x_max).map(|x| model.hazard(x)).collect::<Result<_>>()?;
                let table = pmf_from_hazard(|x| hazards[x as usize - 1], x_max);
                let mut cdf = 0.0;
                table
                    .pmf
                    .iter()
                    .zip(&hazards)
                    .enumerate()
                    .map(|(i, (&f, &h))| {
                        cdf += f;
                        CurvePoint {
                            x: i as u64 + 1,
                            f,
                            cdf,
                            h,
                        }
                    })
                    .collect()
            }
            DurationModel::Mixture(model) => (1..=x_max)
                .map(|x| CurvePoint {
                    x,
                    f: model.pmf(x),
                    cdf: model.cdf(x),
                    h: model.hazard(x),
                })
                .collect(),
        })
    }
}

pub fn write_curve_csv<W: Write>(w: &mut W, points: &[CurvePoint]) -> io::Result<()> {
    writeln!(w, "{CURVE_CSV_HEADER}")?;
    for p in points {
        writeln!(w, "{},{},{},{}", p.x, p.f, p.cdf, p.h)?;
    }
    Ok(())
}
