//! Closed-form tie-duration distributions and discrete hazards.
//!
//! Durations are positive integers. The discrete hazard at age `x` is
//! `P(X = x | X >= x)`; the pmf follows from it by
//! `f(x) = h(x) * (1 - F(x - 1))`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse logit, `1 / (1 + exp(-x))`, without overflow for large `|x|`.
pub fn ilogit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(ilogit(x))`, accurate in both tails.
pub fn ln_ilogit(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

pub fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Dot product with error-free transformations (Ogita, Rump and Oishi's Dot2).
fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut err = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let p_err = x.mul_add(y, -p);
        let s = sum + p;
        let z = s - sum;
        err += (sum - (s - z)) + (p - z) + p_err;
        sum = s;
    }
    sum + err
}

/// Dissolution model with a baseline preservation log-odds `theta1` and an
/// offset `theta2` applied while the tie's age is in `ages`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseModel {
    theta1: f64,
    theta2: f64,
    ages: BTreeSet<u64>,
    baseline_hazard: f64,
    in_set_hazard: f64,
}

impl PiecewiseModel {
    pub fn new(theta1: f64, theta2: f64, ages: BTreeSet<u64>) -> Result<Self> {
        if ages.is_empty() || ages.contains(&0) {
            return Err(Error::InvalidModel(
                "age set must be a non-empty set of positive integers".into(),
            ));
        }
        if !theta1.is_finite() || !theta2.is_finite() {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        Self::from_parts(theta1, theta2, ages, ilogit(-theta1), ilogit(-theta1 - theta2))
    }

    fn from_parts(
        theta1: f64,
        theta2: f64,
        ages: BTreeSet<u64>,
        baseline_hazard: f64,
        in_set_hazard: f64,
    ) -> Result<Self> {
        for h in [baseline_hazard, in_set_hazard] {
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::InvalidModel(format!(
                    "hazard {h} is not strictly inside (0, 1)"
                )));
            }
        }
        Ok(PiecewiseModel {
            theta1,
            theta2,
            ages,
            baseline_hazard,
            in_set_hazard,
        })
    }

    /// Builds the model from its two hazard levels.
    pub fn from_hazards(baseline: f64, in_set: f64, ages: BTreeSet<u64>) -> Result<Self> {
        for h in [baseline, in_set] {
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::InvalidModel(format!("hazard {h} must lie in (0, 1)")));
            }
        }
        if ages.is_empty() || ages.contains(&0) {
            return Err(Error::InvalidModel(
                "age set must be a non-empty set of positive integers".into(),
            ));
        }
        let theta1 = logit(1.0 - baseline);
        Self::from_parts(theta1, logit(1.0 - in_set) - theta1, ages, baseline, in_set)
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn ages(&self) -> &BTreeSet<u64> {
        &self.ages
    }

    /// Largest age in the set; the model is Markov of order `a0 + 1`.
    pub fn a0(&self) -> u64 {
        *self.ages.last().expect("non-empty by construction")
    }

    /// Whether the age set is `{1, ..., a0}`.
    pub fn is_prefix(&self) -> bool {
        self.ages.len() as u64 == self.a0()
    }

    pub fn baseline_hazard(&self) -> f64 {
        self.baseline_hazard
    }

    pub fn in_set_hazard(&self) -> f64 {
        self.in_set_hazard
    }

    pub fn hazard(&self, x: u64) -> Result<f64> {
        if x < 1 {
            return Err(Error::InvalidArgument("age must be at least 1".into()));
        }
        Ok(if self.ages.contains(&x) {
            self.in_set_hazard()
        } else {
            self.baseline_hazard()
        })
    }

    /// Closed-form duration pmf; requires a contiguous age set `{1..a0}`.
    pub fn pmf(&self, x: u64) -> Result<f64> {
        if x < 1 {
            return Err(Error::InvalidArgument("duration must be at least 1".into()));
        }
        if !self.is_prefix() {
            return Err(Error::InvalidModel(
                "closed-form pmf needs the age set {1, ..., a0}".into(),
            ));
        }
        let a0 = self.a0();
        let (early, late) = (self.in_set_hazard, self.baseline_hazard);
        let ln_f = if x <= a0 {
            (x - 1) as f64 * (-early).ln_1p() + early.ln()
        } else {
            a0 as f64 * (-early).ln_1p() + (x - a0 - 1) as f64 * (-late).ln_1p() + late.ln()
        };
        Ok(ln_f.exp())
    }
}

/// Duration pmf for ages `1..=x_max` plus the mass beyond `x_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct PmfTable {
    pub pmf: Vec<f64>,
    pub tail_mass: f64,
}

/// Runs the hazard-to-pmf recursion `f(1) = h(1)`, `f(x) = h(x) (1 - Σ_{i<x} f(i))`.
///
/// The running survival `1 - Σ f` is carried as a product of `1 - h` terms so
/// that deep tails keep relative precision.
pub fn pmf_from_hazard<H>(mut hazard: H, x_max: u64) -> PmfTable
where
    H: FnMut(u64) -> f64,
{
    let mut pmf = Vec::with_capacity(x_max as usize);
    let mut survival = 1.0;
    for x in 1..=x_max {
        let h = hazard(x);
        pmf.push(h * survival);
        survival *= 1.0 - h;
    }
    PmfTable {
        pmf,
        tail_mass: survival,
    }
}

/// Finite mixture of geometric durations: class `k` has hazard `omega[k]`
/// and incidence `pi[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    omega: Vec<f64>,
    pi: Vec<f64>,
}

impl MixtureModel {
    pub fn new(omega: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        if omega.is_empty() || omega.len() != pi.len() {
            return Err(Error::InvalidModel(
                "omega and pi must be non-empty and of equal length".into(),
            ));
        }
        if let Some(w) = omega.iter().find(|&&w| !(w > 0.0 && w < 1.0)) {
            return Err(Error::InvalidModel(format!(
                "class hazard {w} must lie in (0, 1)"
            )));
        }
        if let Some(p) = pi.iter().find(|&&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidModel(format!("incidence {p} must be positive")));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("incidences sum to {total}, not 1")));
        }
        Ok(MixtureModel { omega, pi })
    }

    /// Single geometric distribution with hazard `p`.
    pub fn geometric(p: f64) -> Result<Self> {
        Self::new(vec![p], vec![1.0])
    }

    pub fn classes(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// `ln(pi_k (1 - omega_k)^x)` for each class.
    fn ln_class_survival(&self, x: u64) -> impl Iterator<Item = f64> + Clone + '_ {
        self.omega
            .iter()
            .zip(&self.pi)
            .map(move |(&w, &p)| p.ln() + x as f64 * (-w).ln_1p())
    }

    /// `P(X > x)`.
    pub fn survival(&self, x: u64) -> f64 {
        log_sum_exp(self.ln_class_survival(x)).exp()
    }

    pub fn pmf(&self, x: u64) -> f64 {
        if x == 0 {
            return 0.0;
        }
        let terms = self
            .ln_class_survival(x - 1)
            .zip(&self.omega)
            .map(|(ls, &w)| ls + w.ln());
        log_sum_exp(terms).exp()
    }

    /// `Σ pi_k (1 - (1 - omega_k)^x)`, accurate for small as well as large `x`.
    pub fn cdf(&self, x: u64) -> f64 {
        let failed: Vec<f64> = self
            .omega
            .iter()
            .map(|&w| -(x as f64 * (-w).ln_1p()).exp_m1())
            .collect();
        compensated_dot(&self.pi, &failed).min(1.0)
    }

    /// `f(x) / (1 - F(x - 1))`: the class hazards averaged with weights
    /// `pi_k (1 - omega_k)^(x-1)`.
    ///
    /// Evaluated as `min omega + Σ_k (omega_k - min omega) / Σ_j w_j / w_k`, with
    /// each log weight ratio formed as `c_jk + (x - 1) δ_jk`. Every rounded step
    /// is then monotone in `x`, so for two classes the computed hazard is exactly
    /// nonincreasing all the way down to the limit.
    pub fn hazard(&self, x: u64) -> f64 {
        if x == 0 {
            return 0.0;
        }
        if x == 1 {
            let total: f64 = self.pi.iter().sum();
            return self.initial_hazard() / total;
        }
        let floor = self.limiting_hazard();
        let steps = (x - 1) as f64;
        let ln_keep: Vec<f64> = self.omega.iter().map(|&w| (-w).ln_1p()).collect();
        let mut excess = 0.0;
        for k in 0..self.classes() {
            let gap = self.omega[k] - floor;
            if gap <= 0.0 {
                continue;
            }
            let ratio: f64 = (0..self.classes())
                .map(|j| {
                    if j == k {
                        1.0
                    } else {
                        let c = self.pi[j].ln() - self.pi[k].ln();
                        (c + steps * (ln_keep[j] - ln_keep[k])).exp()
                    }
                })
                .sum();
            excess += gap / ratio;
        }
        floor + excess
    }

    /// Hazard at a tie's first dissolution phase, `Σ pi_k omega_k`, computed
    /// with a compensated dot product so the result is (nearly) correctly rounded.
    pub fn initial_hazard(&self) -> f64 {
        compensated_dot(&self.omega, &self.pi)
    }

    /// Limit of the hazard as age grows: the slowest class hazard.
    pub fn limiting_hazard(&self) -> f64 {
        self.omega.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Canonical dissolution parameters for an `age_buckets(a0)` statistic that
/// reproduce the mixture hazard at ages `1..a0` and hold the age-`a0` hazard after.
pub fn curved_eta(model: &MixtureModel, a0: u64) -> Result<Vec<f64>> {
    if a0 < 1 {
        return Err(Error::InvalidArgument("a0 must be at least 1".into()));
    }
    Ok((1..=a0).map(|k| -logit(model.hazard(k))).collect())
}

/// Search limit for [`choose_cutoff`].
pub const MAX_CUTOFF_SCAN: u64 = 10_000_000;

/// Smallest age whose hazard is within `eps` (strictly) of the limiting hazard.
pub fn choose_cutoff(model: &MixtureModel, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let limit = model.limiting_hazard();
    (1..=MAX_CUTOFF_SCAN)
        .find(|&a| (model.hazard(a) - limit).abs() < eps)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "hazard not within {eps} of its limit by age {MAX_CUTOFF_SCAN}"
            ))
        })
}

/// Least-squares fit of a capped linear age effect to a mixture's
/// preservation log-odds over ages `1..=a0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearAgeFit {
    pub theta1: f64,
    pub theta2: f64,
    /// Root-mean-square residual on the log-odds scale.
    pub rms_error: f64,
    /// Largest absolute hazard difference over ages `1..=a0`.
    pub max_hazard_error: f64,
}

impl LinearAgeFit {
    pub fn hazard(&self, x: u64, a0: u64) -> f64 {
        ilogit(-self.theta1 - self.theta2 * x.min(a0) as f64)
    }
}

pub fn fit_linear_age(model: &MixtureModel, a0: u64) -> Result<LinearAgeFit> {
    if a0 < 1 {
        return Err(Error::InvalidArgument("a0 must be at least 1".into()));
    }
    let points: Vec<(f64, f64)> = (1..=a0).map(|x| (x as f64, -logit(model.hazard(x)))).collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let theta2 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let theta1 = mean_y - theta2 * mean_x;
    let rms_error = (points
        .iter()
        .map(|&(x, y)| (y - theta1 - theta2 * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let fit = LinearAgeFit {
        theta1,
        theta2,
        rms_error,
        max_hazard_error: 0.0,
    };
    let max_hazard_error = (1..=a0)
        .map(|x| (fit.hazard(x, a0) - model.hazard(x)).abs())
        .fold(0.0, f64::max);
    Ok(LinearAgeFit {
        max_hazard_error,
        ..fit
    })
}
