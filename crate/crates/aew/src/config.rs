//! Versioned JSON configuration schemas and their resolution into runtime
//! objects.
//!
//! Every config file carries a `schema_version` field; parsers reject
//! unknown fields and report the JSON path of the first problem. Specs are
//! plain data: resolving one revalidates everything through the library
//! constructors, so a hand-edited file cannot smuggle in an invalid
//! distribution or rule. The concrete file layouts are documented in
//! docs/formats.md.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::aggregation::Dictionary;
use crate::distributions::holder::{HolderDistribution, HolderEtaSpec};
use crate::distributions::{lower_bound_family, Atom, Distribution, FiniteDistribution};
use crate::error::{Error, Result};
use crate::experiments::{
    aew_rate_exponent, plugin_rate_exponent, ExperimentConfig, Procedure,
};
use crate::plugin::{Kernel, PluginConfig};
use crate::score::PredictionRule;

/// Version of every JSON schema in this crate (configs, reports,
/// manifests). Readers reject any other value.
pub const SCHEMA_VERSION: u32 = 1;

pub fn check_schema_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema_version {v}, this build reads version {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

/// Parses a JSON file into a config type, reporting the JSON path of the
/// first offending field on failure.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    parse_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses a JSON string, reporting the JSON path of the first offending
/// field on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            Error::Parse(format!("{}", e.inner()))
        } else {
            Error::Parse(format!("at {path}: {}", e.inner()))
        }
    })
}

/// A distribution described as data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DistributionSpec {
    /// Explicit atoms: masses and conditional probabilities.
    Finite { dim: usize, atoms: Vec<Atom> },
    /// The hard hypercube-style family parameterized by (m, n, kappa,
    /// sigma); m is the dictionary cardinality the family is built for.
    LowerBound { m: usize, n: usize, kappa: f64, sigma: Vec<f64> },
    /// Smooth sinusoid conditional probability on [0,1]^d.
    HolderSinusoid {
        d: usize,
        amplitude: f64,
        frequency: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    /// One-sided polynomial bump conditional probability.
    HolderBump {
        d: usize,
        amplitude: f64,
        center: f64,
        exponent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
}

impl DistributionSpec {
    pub fn resolve(&self) -> Result<Distribution> {
        match self {
            DistributionSpec::Finite { dim, atoms } => {
                Ok(Distribution::Finite(FiniteDistribution::new(*dim, atoms.clone())?))
            }
            DistributionSpec::LowerBound { m, n, kappa, sigma } => {
                let (_, dist) = lower_bound_family(*m, *n, *kappa, sigma)?;
                Ok(Distribution::Finite(dist))
            }
            DistributionSpec::HolderSinusoid { d, amplitude, frequency, resolution } => {
                let spec = HolderEtaSpec::Sinusoid {
                    d: *d,
                    amplitude: *amplitude,
                    frequency: *frequency,
                };
                Ok(Distribution::Holder(holder_with(spec, *resolution)?))
            }
            DistributionSpec::HolderBump { d, amplitude, center, exponent, resolution } => {
                let spec = HolderEtaSpec::PolynomialBump {
                    d: *d,
                    amplitude: *amplitude,
                    center: *center,
                    exponent: *exponent,
                };
                Ok(Distribution::Holder(holder_with(spec, *resolution)?))
            }
        }
    }
}

fn holder_with(spec: HolderEtaSpec, resolution: Option<usize>) -> Result<HolderDistribution> {
    match resolution {
        Some(r) => HolderDistribution::with_resolution(spec, r),
        None => HolderDistribution::new(spec),
    }
}

/// A prediction rule described as data. All variants resolve to
/// {-1, +1}-valued rules; the sign convention is sign(0) = +1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum RuleSpec {
    /// Always predicts `label` (+1 or -1).
    Constant { label: i64 },
    /// direction * sign(x[coordinate] - threshold); direction is +1 or -1.
    Threshold { coordinate: usize, threshold: f64, direction: i64 },
    /// sign(weights . x + intercept).
    Linear { weights: Vec<f64>, intercept: f64 },
    /// Exact-match lookup table; `default` applies off the listed points.
    Tabulated { points: Vec<Vec<f64>>, values: Vec<f64>, default: f64 },
}

impl RuleSpec {
    pub fn resolve(&self, dim: usize) -> Result<PredictionRule> {
        match self {
            RuleSpec::Constant { label } => {
                Ok(PredictionRule::constant(crate::data::Label::from_int(*label)?))
            }
            RuleSpec::Threshold { coordinate, threshold, direction } => {
                if *coordinate >= dim {
                    return Err(Error::Config(format!(
                        "threshold coordinate {coordinate} out of range for dimension {dim}"
                    )));
                }
                if !threshold.is_finite() {
                    return Err(Error::Config("threshold must be finite".into()));
                }
                let dir = crate::data::Label::from_int(*direction)?.to_f64();
                let (c, t) = (*coordinate, *threshold);
                Ok(PredictionRule::from_fn(move |x: &[f64]| {
                    let base = if x[c] - t >= 0.0 { 1.0 } else { -1.0 };
                    dir * base
                }))
            }
            RuleSpec::Linear { weights, intercept } => {
                if weights.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: weights.len() });
                }
                if !weights.iter().all(|w| w.is_finite()) || !intercept.is_finite() {
                    return Err(Error::Config("linear rule coefficients must be finite".into()));
                }
                let (w, b) = (weights.clone(), *intercept);
                Ok(PredictionRule::from_fn(move |x: &[f64]| {
                    let s: f64 = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
                    if s >= 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }))
            }
            RuleSpec::Tabulated { points, values, default } => {
                if points.len() != values.len() {
                    return Err(Error::Config(format!(
                        "tabulated rule has {} points but {} values",
                        points.len(),
                        values.len()
                    )));
                }
                for (i, p) in points.iter().enumerate() {
                    if p.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
                    }
                    if !p.iter().all(|v| v.is_finite()) {
                        return Err(Error::Config(format!("tabulated point {i} is not finite")));
                    }
                    if points[..i].contains(p) {
                        return Err(Error::Config(format!("tabulated point {i} is a duplicate")));
                    }
                }
                for v in values.iter().chain(std::iter::once(default)) {
                    if *v != 1.0 && *v != -1.0 {
                        return Err(Error::Config(format!(
                            "tabulated values must be -1 or +1, got {v}"
                        )));
                    }
                }
                let (pts, vals, def) = (points.clone(), values.clone(), *default);
                Ok(PredictionRule::from_fn(move |x: &[f64]| {
                    pts.iter()
                        .position(|p| p.as_slice() == x)
                        .map_or(def, |i| vals[i])
                }))
            }
        }
    }
}

/// A dictionary file: named list of rule specs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryConfig {
    pub schema_version: u32,
    pub members: Vec<RuleSpec>,
}

impl DictionaryConfig {
    pub fn resolve(&self, dim: usize) -> Result<Dictionary> {
        check_schema_version(self.schema_version)?;
        let members = self
            .members
            .iter()
            .map(|r| Ok(r.resolve(dim)?.as_score_function().clone()))
            .collect::<Result<Vec<_>>>()?;
        Dictionary::new(members)
    }
}

/// Config for the `simulate` subcommand: a distribution and a sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub schema_version: u32,
    pub distribution: DistributionSpec,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Config for the `plugin` subcommand: declared smoothness plus optional
/// overrides of the derived bandwidth, the kernel, and the ridge term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PluginRunConfig {
    pub schema_version: u32,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Kernel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
}

impl PluginRunConfig {
    pub fn resolve(&self, d: usize, n: usize) -> Result<PluginConfig> {
        check_schema_version(self.schema_version)?;
        let mut cfg = PluginConfig::for_beta(self.beta, d, n)?;
        if let Some(h) = self.bandwidth {
            cfg = cfg.with_bandwidth(h)?;
        }
        if let Some(k) = self.kernel {
            cfg = cfg.with_kernel(k);
        }
        if let Some(r) = self.ridge {
            cfg = cfg.with_ridge(r)?;
        }
        Ok(cfg)
    }
}

/// The procedure an experiment builds per replication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ProcedureSpec {
    Aew { dictionary: Vec<RuleSpec> },
    Plugin { beta: f64 },
    AdaptivePlugin,
}

impl ProcedureSpec {
    pub fn resolve(&self, dim: usize) -> Result<Procedure> {
        match self {
            ProcedureSpec::Aew { dictionary } => {
                let members = dictionary
                    .iter()
                    .map(|r| Ok(r.resolve(dim)?.as_score_function().clone()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Procedure::Aew { dictionary: Dictionary::new(members)? })
            }
            ProcedureSpec::Plugin { beta } => Ok(Procedure::Plugin { beta: *beta }),
            ProcedureSpec::AdaptivePlugin => Ok(Procedure::AdaptivePlugin),
        }
    }
}

fn default_tolerance() -> f64 {
    0.25
}

/// Which report an experiment emits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ReportSpec {
    /// Log-log rate fit. When `target_exponent` is omitted it is derived
    /// from the declared kappa (and beta, for plug-in procedures).
    Rates {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target_exponent: Option<f64>,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
    },
    /// Oracle-gap probe tally at the given a > 0.
    OracleGap { a: f64 },
}

/// `ReportSpec` with the slope target made concrete.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ResolvedReport {
    Rates { target_exponent: f64, tolerance: f64 },
    OracleGap { a: f64 },
}

/// Config for the `experiment` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub distribution: DistributionSpec,
    pub procedure: ProcedureSpec,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub report: ReportSpec,
}

/// A fully validated experiment: the runtime config, the concrete report
/// request, and the spec with the effective seed filled in (what the run
/// manifest records).
pub struct ResolvedExperiment {
    pub config: ExperimentConfig,
    pub report: ResolvedReport,
    pub spec: ExperimentSpec,
}

impl ExperimentSpec {
    /// Validates the spec and resolves it into runtime objects. A
    /// command-line seed overrides the config seed; one of the two must be
    /// present.
    pub fn resolve(&self, seed_override: Option<u64>) -> Result<ResolvedExperiment> {
        check_schema_version(self.schema_version)?;
        let seed = seed_override.or(self.seed).ok_or_else(|| {
            Error::Config("no seed: set \"seed\" in the config or pass --seed".into())
        })?;
        let distribution = self.distribution.resolve()?;
        let procedure = self.procedure.resolve(distribution.dim())?;
        let config = ExperimentConfig {
            distribution,
            procedure,
            n_grid: self.n_grid.clone(),
            replications: self.replications,
            seed,
            kappa: self.kappa,
            beta: self.beta,
        };
        config.validate()?;

        let report = match &self.report {
            ReportSpec::Rates { target_exponent, tolerance } => {
                if !tolerance.is_finite() || *tolerance < 0.0 {
                    return Err(Error::Config(format!(
                        "tolerance must be nonnegative, got {tolerance}"
                    )));
                }
                let target = match target_exponent {
                    Some(t) => *t,
                    None => -self.derived_exponent(&config)?,
                };
                ResolvedReport::Rates { target_exponent: target, tolerance: *tolerance }
            }
            ReportSpec::OracleGap { a } => {
                if !a.is_finite() || *a <= 0.0 {
                    return Err(Error::Config(format!("oracle-gap a must be positive, got {a}")));
                }
                ResolvedReport::OracleGap { a: *a }
            }
        };

        let mut spec = self.clone();
        spec.seed = Some(seed);
        Ok(ResolvedExperiment { config, report, spec })
    }

    /// The theoretical decay exponent implied by the declared parameters:
    /// kappa/(2 kappa - 1) for dictionary aggregation, beta kappa /
    /// ((kappa - 1)(2 beta + d)) for plug-in procedures.
    fn derived_exponent(&self, config: &ExperimentConfig) -> Result<f64> {
        match &config.procedure {
            Procedure::Aew { .. } => Ok(aew_rate_exponent(self.kappa)),
            Procedure::Plugin { beta } => {
                plugin_rate_exponent(self.beta.unwrap_or(*beta), self.kappa, config.distribution.dim())
            }
            Procedure::AdaptivePlugin => {
                let beta = self.beta.ok_or_else(|| {
                    Error::Config(
                        "adaptive experiments need a declared \"beta\" to derive the slope target"
                            .into(),
                    )
                })?;
                plugin_rate_exponent(beta, self.kappa, config.distribution.dim())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_specs_round_trip_and_resolve() {
        let text = r#"{
            "finite": {
                "dim": 1,
                "atoms": [
                    {"x": [0.2], "p": 0.5, "eta": 0.9},
                    {"x": [0.8], "p": 0.5, "eta": 0.1}
                ]
            }
        }"#;
        let spec: DistributionSpec = parse_json(text).unwrap();
        let dist = spec.resolve().unwrap();
        assert_eq!(dist.dim(), 1);
        let back: DistributionSpec =
            parse_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);

        let lb: DistributionSpec = parse_json(
            r#"{"lower_bound": {"m": 8, "n": 100, "kappa": 2.0, "sigma": [1.0, -1.0]}}"#,
        )
        .unwrap();
        assert_eq!(lb.resolve().unwrap().dim(), 1);

        let sin: DistributionSpec = parse_json(
            r#"{"holder_sinusoid": {"d": 1, "amplitude": 0.4, "frequency": 1.0}}"#,
        )
        .unwrap();
        assert_eq!(sin.resolve().unwrap().dim(), 1);

        let bump: DistributionSpec = parse_json(
            r#"{"holder_bump": {"d": 2, "amplitude": 0.3, "center": 0.5,
                "exponent": 1.0, "resolution": 64}}"#,
        )
        .unwrap();
        assert_eq!(bump.resolve().unwrap().dim(), 2);
    }

    #[test]
    fn parse_errors_name_the_json_path() {
        let err = parse_json::<DistributionSpec>(
            r#"{"finite": {"dim": 1, "atoms": [{"x": [0.2], "p": 0.5, "eta": "high"}]}}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("atoms[0].eta"), "unhelpful error: {msg}");

        let err = parse_json::<SimulateConfig>(
            r#"{"schema_version": 1, "n": 10, "distribution":
                {"lower_bound": {"m": 8, "n": 100, "kappa": 2.0, "sigma": [1.0, -1.0]}},
                "extra": true}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("extra"), "unhelpful error: {err}");
    }

    #[test]
    fn rule_specs_resolve_to_sign_rules() {
        let th = RuleSpec::Threshold { coordinate: 0, threshold: 0.5, direction: 1 }
            .resolve(2)
            .unwrap();
        assert_eq!(th.eval(&[0.5, 0.0]), 1.0);
        assert_eq!(th.eval(&[0.49, 0.0]), -1.0);
        let th_neg = RuleSpec::Threshold { coordinate: 1, threshold: 0.0, direction: -1 }
            .resolve(2)
            .unwrap();
        assert_eq!(th_neg.eval(&[0.0, 0.2]), -1.0);
        assert_eq!(th_neg.eval(&[0.0, -0.2]), 1.0);

        let lin = RuleSpec::Linear { weights: vec![1.0, -1.0], intercept: 0.0 }
            .resolve(2)
            .unwrap();
        assert_eq!(lin.eval(&[0.7, 0.2]), 1.0);
        assert_eq!(lin.eval(&[0.2, 0.7]), -1.0);
        assert_eq!(lin.eval(&[0.5, 0.5]), 1.0);

        let tab = RuleSpec::Tabulated {
            points: vec![vec![0.25], vec![0.75]],
            values: vec![1.0, -1.0],
            default: 1.0,
        }
        .resolve(1)
        .unwrap();
        assert_eq!(tab.eval(&[0.75]), -1.0);
        assert_eq!(tab.eval(&[0.33]), 1.0);

        let c = RuleSpec::Constant { label: -1 }.resolve(3).unwrap();
        assert_eq!(c.eval(&[1.0, 2.0, 3.0]), -1.0);
    }

    #[test]
    fn rule_spec_validation() {
        assert!(RuleSpec::Constant { label: 2 }.resolve(1).is_err());
        assert!(RuleSpec::Threshold { coordinate: 3, threshold: 0.5, direction: 1 }
            .resolve(2)
            .is_err());
        assert!(RuleSpec::Threshold { coordinate: 0, threshold: f64::NAN, direction: 1 }
            .resolve(1)
            .is_err());
        assert!(RuleSpec::Linear { weights: vec![1.0], intercept: 0.0 }.resolve(2).is_err());
        assert!(RuleSpec::Tabulated {
            points: vec![vec![0.1]],
            values: vec![1.0, -1.0],
            default: 1.0
        }
        .resolve(1)
        .is_err());
        assert!(RuleSpec::Tabulated {
            points: vec![vec![0.1], vec![0.1]],
            values: vec![1.0, 1.0],
            default: 1.0
        }
        .resolve(1)
        .is_err());
        assert!(RuleSpec::Tabulated {
            points: vec![vec![0.1]],
            values: vec![0.5],
            default: 1.0
        }
        .resolve(1)
        .is_err());
    }

    #[test]
    fn dictionary_config_resolves() {
        let text = r#"{
            "schema_version": 1,
            "members": [
                {"constant": {"label": 1}},
                {"threshold": {"coordinate": 0, "threshold": 0.5, "direction": 1}}
            ]
        }"#;
        let cfg: DictionaryConfig = parse_json(text).unwrap();
        let dict = cfg.resolve(1).unwrap();
        assert_eq!(dict.len(), 2);

        let stale = DictionaryConfig { schema_version: 99, members: vec![] };
        assert!(stale.resolve(1).is_err());
    }

    #[test]
    fn plugin_run_config_resolves_with_overrides() {
        let cfg: PluginRunConfig = parse_json(
            r#"{"schema_version": 1, "beta": 1.0, "bandwidth": 0.2,
                "kernel": "epanechnikov", "ridge": 1e-6}"#,
        )
        .unwrap();
        let resolved = cfg.resolve(1, 100).unwrap();
        assert_eq!(resolved.bandwidth(), 0.2);
        assert_eq!(resolved.kernel(), Kernel::Epanechnikov);
        assert_eq!(resolved.ridge(), 1e-6);

        let bare: PluginRunConfig =
            parse_json(r#"{"schema_version": 1, "beta": 1.0}"#).unwrap();
        let resolved = bare.resolve(1, 100).unwrap();
        assert_eq!(resolved.kernel(), Kernel::UniformBall);
        assert!(bare.resolve(1, 0).is_err());
    }

    fn experiment_text(report: &str) -> String {
        format!(
            r#"{{
            "schema_version": 1,
            "distribution": {{"lower_bound": {{"m": 8, "n": 128, "kappa": 1.0,
                              "sigma": [1.0, -1.0]}}}},
            "procedure": {{"aew": {{"dictionary": [
                {{"constant": {{"label": 1}}}},
                {{"threshold": {{"coordinate": 0, "threshold": 0.9, "direction": -1}}}}
            ]}}}},
            "n_grid": [32, 64, 128],
            "replications": 4,
            "seed": 5,
            "kappa": 1.0,
            "report": {report}
        }}"#
        )
    }

    #[test]
    fn experiment_spec_resolves_and_derives_targets() {
        let spec: ExperimentSpec =
            parse_json(&experiment_text(r#"{"rates": {}}"#)).unwrap();
        let resolved = spec.resolve(None).unwrap();
        match resolved.report {
            ResolvedReport::Rates { target_exponent, tolerance } => {
                // kappa = 1 aggregation target: slope -1, default tolerance.
                assert!((target_exponent + 1.0).abs() <= 1e-15);
                assert_eq!(tolerance, 0.25);
            }
            _ => panic!("expected a rates report"),
        }
        assert_eq!(resolved.config.seed, 5);
        assert_eq!(resolved.spec.seed, Some(5));

        // The command line wins over the config seed.
        let resolved = spec.resolve(Some(11)).unwrap();
        assert_eq!(resolved.config.seed, 11);
        assert_eq!(resolved.spec.seed, Some(11));

        let gap: ExperimentSpec =
            parse_json(&experiment_text(r#"{"oracle_gap": {"a": 1.0}}"#)).unwrap();
        assert!(matches!(
            gap.resolve(None).unwrap().report,
            ResolvedReport::OracleGap { a } if a == 1.0
        ));
    }

    #[test]
    fn experiment_spec_rejects_bad_inputs() {
        let mut spec: ExperimentSpec =
            parse_json(&experiment_text(r#"{"rates": {}}"#)).unwrap();
        spec.seed = None;
        assert!(spec.resolve(None).is_err());
        assert!(spec.resolve(Some(1)).is_ok());

        spec.seed = Some(5);
        spec.n_grid = vec![64, 64];
        assert!(spec.resolve(None).is_err());

        let gap: ExperimentSpec =
            parse_json(&experiment_text(r#"{"oracle_gap": {"a": 0.0}}"#)).unwrap();
        assert!(gap.resolve(None).is_err());

        // Adaptive rate targets need a declared beta.
        let text = r#"{
            "schema_version": 1,
            "distribution": {"holder_sinusoid": {"d": 1, "amplitude": 0.4,
                             "frequency": 1.0}},
            "procedure": "adaptive_plugin",
            "n_grid": [64, 128, 256],
            "replications": 2,
            "seed": 1,
            "kappa": 2.0,
            "report": {"rates": {}}
        }"#;
        let spec: ExperimentSpec = parse_json(text).unwrap();
        assert!(spec.resolve(None).is_err());
        let mut with_beta = spec.clone();
        with_beta.beta = Some(1.0);
        let resolved = with_beta.resolve(None).unwrap();
        match resolved.report {
            ResolvedReport::Rates { target_exponent, .. } => {
                assert!((target_exponent + 2.0 / 3.0).abs() <= 1e-15);
            }
            _ => panic!("expected a rates report"),
        }
    }
}
