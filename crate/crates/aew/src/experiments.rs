//! Monte Carlo verification harness.
//!
//! Runs a classification procedure many times against a distribution whose
//! risks are computable in closed form, so every replication yields an
//! exact excess risk with no test-set noise. On top of that sit two
//! reports: a log-log rate fit whose slope is compared with the
//! theoretical exponent, and an oracle-gap tally that counts how often the
//! aggregate beats twice the best dictionary member plus a residual of
//! order (log M / n)^(kappa/(2 kappa - 1)).
//!
//! Determinism contract: the seed stream for replication r at sample size
//! n depends only on (master seed, n, r), so reports are bit-identical
//! across runs and independent of scheduling order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptive::adaptive_plugin_aggregate;
use crate::aggregation::{aew_aggregate, Dictionary};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::plugin::plugin_classifier;
use crate::seeding::derive_seed;

/// Probe constants for the oracle-gap report. The theory's residual
/// constant is not identifiable, so the report states, for each probe c,
/// the fraction of replications with gap <= c * residual.
pub const PROBE_CONSTANTS: [f64; 4] = [1.0, 2.0, 5.0, 10.0];

/// The procedure a replication builds on its sampled dataset.
#[derive(Clone)]
pub enum Procedure {
    /// Exponential-weights aggregation over a fixed dictionary.
    Aew { dictionary: Dictionary },
    /// Plug-in classifier at a declared smoothness.
    Plugin { beta: f64 },
    /// The split-validate-aggregate plug-in pipeline.
    AdaptivePlugin,
}

impl Procedure {
    fn validate(&self) -> Result<()> {
        match self {
            Procedure::Aew { dictionary } => {
                if dictionary.len() == 0 {
                    return Err(Error::Config("empty dictionary".into()));
                }
            }
            Procedure::Plugin { beta } => {
                if !beta.is_finite() || *beta <= 0.0 {
                    return Err(Error::Config(format!("smoothness must be positive, got {beta}")));
                }
            }
            Procedure::AdaptivePlugin => {}
        }
        Ok(())
    }
}

/// A full experiment: distribution, procedure, sample-size grid,
/// replication count, master seed, and the declared theoretical parameters
/// used for slope targets and residuals.
#[derive(Clone)]
pub struct ExperimentConfig {
    pub distribution: Distribution,
    pub procedure: Procedure,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    /// Declared margin parameter, used in the residual exponent.
    pub kappa: f64,
    /// Declared smoothness, used for the plug-in slope target.
    pub beta: Option<f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("empty sample-size grid".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("sample-size grid must be strictly increasing".into()));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::Config("sample sizes must be positive".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("need at least one replication".into()));
        }
        if !self.kappa.is_finite() || self.kappa < 1.0 {
            return Err(Error::Config(format!(
                "margin parameter must be >= 1, got {}",
                self.kappa
            )));
        }
        self.procedure.validate()
    }
}

/// Mean exact excess risk at one sample size, with the Monte Carlo
/// standard error (sample standard deviation over sqrt(replications)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: usize,
    pub mean_excess: f64,
    pub stderr: f64,
    pub replications: usize,
    /// True when a standard error could not be estimated (one replication).
    pub stderr_degenerate: bool,
}

impl RatePoint {
    /// A noiseless point, for fitting synthetic or closed-form curves.
    pub fn exact(n: usize, mean_excess: f64) -> RatePoint {
        RatePoint { n, mean_excess, stderr: 0.0, replications: 1, stderr_degenerate: true }
    }
}

fn run_once(cfg: &ExperimentConfig, n: usize, r: u64) -> Result<f64> {
    let seed = derive_seed(cfg.seed, n, r);
    let data = cfg.distribution.sample(n, seed)?;
    let score = match &cfg.procedure {
        Procedure::Aew { dictionary } => {
            aew_aggregate(&data, dictionary)?.as_score_function()
        }
        Procedure::Plugin { beta } => {
            plugin_classifier(&data, *beta)?.as_score_function().clone()
        }
        Procedure::AdaptivePlugin => adaptive_plugin_aggregate(&data)?.score(),
    };
    Ok(cfg.distribution.exact_risks(&score)?.excess_r)
}

/// Runs the full (n, replication) grid and reduces each sample size to a
/// mean excess risk and standard error. Replications are independent and
/// may run in parallel; the reduction is by (n, r) order, so the result
/// does not depend on scheduling.
pub fn excess_risk_mc(cfg: &ExperimentConfig) -> Result<Vec<RatePoint>> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.replications as u64).map(move |r| (n, r)))
        .collect();
    let excesses: Vec<f64> = jobs
        .par_iter()
        .map(|&(n, r)| run_once(cfg, n, r))
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(cfg.n_grid.len());
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let chunk = &excesses[i * cfg.replications..(i + 1) * cfg.replications];
        points.push(reduce_point(n, chunk));
    }
    Ok(points)
}

fn reduce_point(n: usize, excesses: &[f64]) -> RatePoint {
    let reps = excesses.len();
    let mean = excesses.iter().sum::<f64>() / reps as f64;
    if reps < 2 {
        return RatePoint {
            n,
            mean_excess: mean,
            stderr: 0.0,
            replications: reps,
            stderr_degenerate: true,
        };
    }
    let var = excesses.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    RatePoint {
        n,
        mean_excess: mean,
        stderr: (var / reps as f64).sqrt(),
        replications: reps,
        stderr_degenerate: false,
    }
}

/// Result of fitting log(excess) against log(n) by ordinary least squares
/// and comparing the slope with a theoretical target.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateReport {
    /// Points that entered the fit.
    pub points: Vec<RatePoint>,
    /// Points dropped for nonpositive mean excess (log undefined).
    pub excluded: Vec<RatePoint>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Theoretical log-log slope; negative for decaying excess risk.
    pub target_exponent: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

/// Fits log(excess) on log(n). Points with nonpositive mean excess are
/// excluded and reported; fewer than 3 surviving points is an error. A
/// grid of constant excesses fits slope 0 with R^2 = 1 (the line is
/// exact).
pub fn rate_fit(points: &[RatePoint], target_exponent: f64, tolerance: f64) -> Result<RateReport> {
    if !target_exponent.is_finite() || !tolerance.is_finite() || tolerance < 0.0 {
        return Err(Error::Config("target and tolerance must be finite, tolerance >= 0".into()));
    }
    let (used, excluded): (Vec<RatePoint>, Vec<RatePoint>) =
        points.iter().partition(|p| p.mean_excess > 0.0);
    if used.len() < 3 {
        return Err(Error::Domain(format!(
            "rate fit needs at least 3 points with positive excess, got {} (excluded {})",
            used.len(),
            excluded.len()
        )));
    }

    let xs: Vec<f64> = used.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.mean_excess.ln()).collect();
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("rate fit needs at least two distinct sample sizes".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };

    Ok(RateReport {
        points: used,
        excluded,
        slope,
        intercept,
        r_squared,
        target_exponent,
        tolerance,
        within_tolerance: (slope - target_exponent).abs() <= tolerance,
    })
}

/// The aggregation rate exponent kappa / (2 kappa - 1): excess risk of the
/// exponentially weighted aggregate decays like (log M / n) to this power.
pub fn aew_rate_exponent(kappa: f64) -> f64 {
    kappa / (2.0 * kappa - 1.0)
}

/// The plug-in rate exponent beta kappa / ((kappa - 1)(2 beta + d)).
/// Requires kappa > 1; the exponent diverges as the margin assumption
/// degenerates.
pub fn plugin_rate_exponent(beta: f64, kappa: f64, d: usize) -> Result<f64> {
    if !(kappa > 1.0) {
        return Err(Error::Domain(format!(
            "plug-in rate exponent needs kappa > 1, got {kappa}"
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("smoothness must be positive, got {beta}")));
    }
    Ok(beta * kappa / ((kappa - 1.0) * (2.0 * beta + d as f64)))
}

/// One replication's oracle-gap accounting.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GapSample {
    pub n: usize,
    pub replication: u64,
    pub aggregate_excess: f64,
    pub min_member_excess: f64,
    /// (log M / n)^(kappa / (2 kappa - 1)).
    pub residual: f64,
    /// aggregate_excess - 2 (1 + a) * min_member_excess.
    pub gap: f64,
}

/// Fraction of replications whose gap is at most probe * residual.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbeFraction {
    pub probe: f64,
    pub fraction: f64,
}

/// Empirical check of the oracle inequality
/// excess(aggregate) <= 2 (1 + a) min_j excess(f_j) + C (log M / n)^(kappa/(2 kappa - 1)).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleGapReport {
    pub a: f64,
    pub samples: Vec<GapSample>,
    pub probe_fractions: Vec<ProbeFraction>,
}

/// Runs the replication grid for a dictionary procedure and tallies, for
/// each probe constant, how often the aggregate's excess stays within
/// 2(1 + a) times the best member's excess plus probe * residual. Member
/// excesses are exact and replication-independent (the dictionary is
/// fixed), so they are computed once.
pub fn oracle_gap(cfg: &ExperimentConfig, a: f64) -> Result<OracleGapReport> {
    cfg.validate()?;
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Config(format!("probe parameter a must be positive, got {a}")));
    }
    let dictionary = match &cfg.procedure {
        Procedure::Aew { dictionary } => dictionary,
        _ => {
            return Err(Error::Config(
                "oracle-gap reports need a dictionary procedure".into(),
            ))
        }
    };

    let min_member_excess = dictionary
        .members()
        .iter()
        .map(|f| cfg.distribution.exact_risks(f).map(|r| r.excess_r))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let log_m = (dictionary.len() as f64).ln();
    let exponent = aew_rate_exponent(cfg.kappa);

    let jobs: Vec<(usize, u64)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.replications as u64).map(move |r| (n, r)))
        .collect();
    let samples: Vec<GapSample> = jobs
        .par_iter()
        .map(|&(n, r)| {
            let aggregate_excess = run_once(cfg, n, r)?;
            let residual = (log_m / n as f64).powf(exponent);
            Ok(GapSample {
                n,
                replication: r,
                aggregate_excess,
                min_member_excess,
                residual,
                gap: aggregate_excess - 2.0 * (1.0 + a) * min_member_excess,
            })
        })
        .collect::<Result<_>>()?;

    for s in &samples {
        if !(s.gap.is_finite() && s.residual.is_finite()) {
            return Err(Error::InvariantViolation(format!(
                "non-finite oracle-gap entry at n = {}, replication {}",
                s.n, s.replication
            )));
        }
    }
    let total = samples.len() as f64;
    let probe_fractions = PROBE_CONSTANTS
        .iter()
        .map(|&probe| ProbeFraction {
            probe,
            fraction: samples.iter().filter(|s| s.gap <= probe * s.residual).count() as f64
                / total,
        })
        .collect();

    Ok(OracleGapReport { a, samples, probe_fractions })
}
