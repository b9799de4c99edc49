//! Sample-splitting adaptive aggregation.
//!
//! The pipeline splits the data into a training prefix of size m and a
//! validation suffix of size l = ceil(n / log n), trains one classifier per
//! candidate configuration on the prefix, and combines the trained rules
//! with exponential weights computed on the validation suffix alone. The
//! weights therefore never see training labels, which is what makes the
//! aggregate adapt: whichever candidate matches the unknown smoothness
//! collects the weight.
//!
//! The built-in candidate family is a plug-in classifier per point of the
//! smoothness grid beta_k = k d / (Delta - 2k), Delta = log n; a generic
//! entry point accepts arbitrary user-supplied trainers.

use serde::{Deserialize, Serialize};

use crate::aggregation::{aew_weights, AggregateScore, Dictionary, WeightVector};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::plugin::plugin_classifier;
use crate::risk::empirical_zero_one_risk;
use crate::score::{sign_classifier, PredictionRule, ScoreFunction};

/// Sizes of a validation split: l = ceil(n / log n) examples for
/// validation, the remaining m = n - l for training.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub n: usize,
    pub l: usize,
    pub m: usize,
}

/// Computes the split sizes for n examples. Requires n >= 3 and a nonempty
/// training part; n = 3 already fails because ceil(3 / log 3) = 3 leaves
/// nothing to train on.
pub fn split_plan(n: usize) -> Result<SplitPlan> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "splitting needs n >= 3 so that log n > 1, got {n}"
        )));
    }
    let l = (n as f64 / (n as f64).ln()).ceil() as usize;
    if l >= n {
        return Err(Error::Domain(format!(
            "validation share ceil(n / log n) = {l} leaves no training data at n = {n}"
        )));
    }
    Ok(SplitPlan { n, l, m: n - l })
}

/// Splits the data into its training prefix and validation suffix,
/// preserving order.
pub fn split(data: &Dataset) -> Result<(Dataset, Dataset, SplitPlan)> {
    let plan = split_plan(data.len())?;
    let (train, validation) = data.split_at(plan.m)?;
    Ok((train, validation, plan))
}

/// The smoothness grid beta_k = k d / (Delta - 2k) over valid indices k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaGrid {
    pub delta: f64,
    pub ks: Vec<usize>,
    pub betas: Vec<f64>,
}

impl BetaGrid {
    /// Grid at an explicit Delta; `beta_grid` derives Delta = log n. Valid
    /// indices are k >= 1 with Delta - 2k > 0, which keeps every beta
    /// finite and positive and drops the zero-denominator endpoint.
    pub fn from_delta(delta: f64, d: usize) -> Result<BetaGrid> {
        if d == 0 {
            return Err(Error::Domain("feature dimension must be at least 1".into()));
        }
        if !delta.is_finite() || delta <= 2.0 {
            return Err(Error::Domain(format!(
                "no valid smoothness index: needs Delta > 2, got Delta = {delta}"
            )));
        }
        let mut ks = Vec::new();
        let mut betas = Vec::new();
        let mut k = 1usize;
        while delta - 2.0 * k as f64 > 0.0 {
            ks.push(k);
            betas.push(k as f64 * d as f64 / (delta - 2.0 * k as f64));
            k += 1;
        }
        Ok(BetaGrid { delta, ks, betas })
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }
}

/// The smoothness grid for n examples in dimension d; requires n >= 8 so
/// that Delta = log n exceeds 2.
pub fn beta_grid(n: usize, d: usize) -> Result<BetaGrid> {
    BetaGrid::from_delta((n as f64).ln(), d)
}

/// The margin-exponent grid phi_k = k / Delta for k = 1..floor(Delta / 2);
/// all values lie in (0, 1/2] with uniform gap 1/Delta. Companion of the
/// epsilon-net radii m^(-phi); the net itself is never materialized (its
/// cardinality is exponential), so this type only enumerates the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiGrid {
    pub delta: f64,
    pub phis: Vec<f64>,
}

impl PhiGrid {
    pub fn from_delta(delta: f64) -> Result<PhiGrid> {
        if !delta.is_finite() || delta < 2.0 {
            return Err(Error::Domain(format!(
                "no valid margin index: needs Delta >= 2, got Delta = {delta}"
            )));
        }
        let top = (delta / 2.0).floor() as usize;
        let phis = (1..=top).map(|k| k as f64 / delta).collect();
        Ok(PhiGrid { delta, phis })
    }

    /// Approximation radii m^(-phi) for a training size m.
    pub fn radii(&self, m: usize) -> Vec<f64> {
        self.phis.iter().map(|phi| (m as f64).powf(-phi)).collect()
    }
}

/// The margin-exponent grid for n examples; requires n >= 8.
pub fn phi_grid(n: usize) -> Result<PhiGrid> {
    PhiGrid::from_delta((n as f64).ln())
}

/// Exponential weights over trained rules, computed on the validation
/// subsample only. Same contract as `aggregation::aew_weights`; this alias
/// exists to mark the information boundary at call sites.
pub fn validation_aew(validation: &Dataset, family: &Dictionary) -> Result<WeightVector> {
    aew_weights(validation, family)
}

/// A named training procedure producing a prediction rule.
pub struct Trainer {
    label: String,
    run: Box<dyn Fn(&Dataset) -> Result<PredictionRule> + Send + Sync>,
}

impl Trainer {
    pub fn new(
        label: impl Into<String>,
        run: impl Fn(&Dataset) -> Result<PredictionRule> + Send + Sync + 'static,
    ) -> Trainer {
        Trainer { label: label.into(), run: Box::new(run) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn train(&self, data: &Dataset) -> Result<PredictionRule> {
        (self.run)(data)
    }
}

impl std::fmt::Debug for Trainer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Trainer({})", self.label)
    }
}

/// One aggregated candidate: its validation weight and empirical risk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberRecord {
    pub label: String,
    pub weight: f64,
    pub validation_risk: f64,
}

/// A candidate dropped before aggregation, with the capacity error that
/// excluded it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkippedMember {
    pub label: String,
    pub reason: String,
}

/// Result of the split-validate-aggregate pipeline.
pub struct AdaptiveFit {
    pub aggregate: AggregateScore,
    pub plan: SplitPlan,
    /// Smoothness grid, present when the plug-in family was used.
    pub grid: Option<BetaGrid>,
    pub members: Vec<MemberRecord>,
    pub skipped: Vec<SkippedMember>,
}

impl AdaptiveFit {
    /// The aggregate as a score function in [-1, 1].
    pub fn score(&self) -> ScoreFunction {
        self.aggregate.as_score_function()
    }

    /// The final classifier: the sign of the aggregate score.
    pub fn rule(&self) -> PredictionRule {
        sign_classifier(&self.score())
    }
}

/// Split-validate-aggregate over arbitrary trainers. Trainers failing with
/// a capacity error are skipped and recorded; any other training error
/// aborts. At least one trainer must survive.
pub fn adaptive_generic_aggregate(data: &Dataset, trainers: &[Trainer]) -> Result<AdaptiveFit> {
    if trainers.is_empty() {
        return Err(Error::Domain("need at least one trainer".into()));
    }
    let (train, validation, plan) = split(data)?;
    let mut rules: Vec<(String, PredictionRule)> = Vec::with_capacity(trainers.len());
    let mut skipped = Vec::new();
    for t in trainers {
        match t.train(&train) {
            Ok(rule) => rules.push((t.label().to_string(), rule)),
            Err(Error::Capacity(reason)) => {
                skipped.push(SkippedMember { label: t.label().to_string(), reason });
            }
            Err(e) => return Err(e),
        }
    }
    if rules.is_empty() {
        return Err(Error::Domain(format!(
            "every trainer was skipped ({} capacity errors)",
            skipped.len()
        )));
    }

    let dict = Dictionary::new(rules.iter().map(|(_, r)| r.as_score_function().clone()).collect())?;
    let weights = validation_aew(&validation, &dict)?;
    let mut members = Vec::with_capacity(rules.len());
    for (j, (label, rule)) in rules.iter().enumerate() {
        members.push(MemberRecord {
            label: label.clone(),
            weight: weights.get(j),
            validation_risk: empirical_zero_one_risk(&validation, rule)?,
        });
    }
    let aggregate = AggregateScore::new(dict, weights)?;
    Ok(AdaptiveFit { aggregate, plan, grid: None, members, skipped })
}

/// The adaptive plug-in pipeline: one plug-in classifier per beta on the
/// smoothness grid of the full sample size, trained on the prefix with
/// bandwidths derived from the prefix size, weighted on the suffix. Grid
/// members whose degree exceeds the estimator's capacity are skipped and
/// recorded.
pub fn adaptive_plugin_aggregate(data: &Dataset) -> Result<AdaptiveFit> {
    let grid = beta_grid(data.len(), data.dim())?;
    let trainers: Vec<Trainer> = grid
        .ks
        .iter()
        .zip(&grid.betas)
        .map(|(k, beta)| {
            let beta = *beta;
            Trainer::new(format!("plugin k={k} beta={beta:.6}"), move |train: &Dataset| {
                plugin_classifier(train, beta)
            })
        })
        .collect();
    let mut fit = adaptive_generic_aggregate(data, &trainers)?;
    fit.grid = Some(grid);
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Label, LabeledExample};
    use crate::distributions::holder::{HolderDistribution, HolderEtaSpec};
    use crate::score::ScoreFunction;

    fn line_dataset(n: usize) -> Dataset {
        Dataset::new(
            1,
            (0..n)
                .map(|i| LabeledExample {
                    x: vec![i as f64 / n as f64],
                    y: if i % 2 == 0 { Label::Plus } else { Label::Minus },
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn split_plan_frozen_sizes() {
        let p = split_plan(100).unwrap();
        assert_eq!((p.l, p.m), (22, 78));
        let p = split_plan(1000).unwrap();
        assert_eq!((p.l, p.m), (145, 855));
        let p = split_plan(4).unwrap();
        assert_eq!((p.l, p.m), (3, 1));
        assert!(split_plan(3).is_err());
        assert!(split_plan(2).is_err());
        assert!(split_plan(0).is_err());
    }

    #[test]
    fn split_is_an_ordered_partition() {
        let data = line_dataset(100);
        let (train, validation, plan) = split(&data).unwrap();
        assert_eq!(train.len(), plan.m);
        assert_eq!(validation.len(), plan.l);
        assert_eq!(plan.l + plan.m, 100);
        assert_eq!(train.examples(), &data.examples()[..78]);
        assert_eq!(validation.examples(), &data.examples()[78..]);
    }

    #[test]
    fn beta_grid_closed_form() {
        let g = BetaGrid::from_delta(9.0, 1).unwrap();
        assert_eq!(g.ks, vec![1, 2, 3, 4]);
        let expected = [1.0 / 7.0, 2.0 / 5.0, 1.0, 4.0];
        for (b, e) in g.betas.iter().zip(expected) {
            assert!((b - e).abs() <= 1e-15);
        }
        // Linear in d.
        let g2 = BetaGrid::from_delta(9.0, 2).unwrap();
        for (b2, b1) in g2.betas.iter().zip(&g.betas) {
            assert!((b2 - 2.0 * b1).abs() <= 1e-15);
        }
        // Even Delta: the endpoint k = Delta/2 has a zero denominator and
        // is excluded.
        let g = BetaGrid::from_delta(8.0, 1).unwrap();
        assert_eq!(g.ks, vec![1, 2, 3]);
        assert!(g.betas.iter().all(|b| b.is_finite() && *b > 0.0));
    }

    #[test]
    fn beta_grid_needs_enough_data() {
        assert!(beta_grid(7, 1).is_err());
        let g = beta_grid(8, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert!(BetaGrid::from_delta(2.0, 1).is_err());
        assert!(BetaGrid::from_delta(9.0, 0).is_err());
    }

    #[test]
    fn phi_grid_spacing() {
        let g = PhiGrid::from_delta(9.0).unwrap();
        assert_eq!(g.phis.len(), 4);
        for (k, phi) in (1..=4).zip(&g.phis) {
            assert!((phi - k as f64 / 9.0).abs() <= 1e-15);
        }
        assert!(g.phis.iter().all(|p| *p > 0.0 && *p <= 0.5));
        // Delta = 8: the endpoint phi = 1/2 is included.
        let g = PhiGrid::from_delta(8.0).unwrap();
        assert_eq!(g.phis.last().copied(), Some(0.5));
        let radii = g.radii(100);
        assert!((radii[0] - 100f64.powf(-1.0 / 8.0)).abs() <= 1e-15);
        assert!(phi_grid(7).is_err());
        assert!(phi_grid(8).is_ok());
    }

    #[test]
    fn validation_weights_favor_the_perfect_rule() {
        let data = line_dataset(20);
        let perfect = ScoreFunction::from_fn(|x: &[f64]| {
            if (x[0] * 20.0).round() as usize % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        let wrong = ScoreFunction::from_fn(|x: &[f64]| {
            if (x[0] * 20.0).round() as usize % 2 == 0 {
                -1.0
            } else {
                1.0
            }
        });
        let dict = Dictionary::new(vec![perfect, wrong]).unwrap();
        let w = validation_aew(&data, &dict).unwrap();
        // Score gap 2l = 40: the perfect rule holds all the weight.
        assert!((w.get(0) - 1.0).abs() <= 1e-12);

        let single = Dictionary::new(vec![ScoreFunction::constant(1.0)]).unwrap();
        assert_eq!(validation_aew(&data, &single).unwrap().as_slice(), &[1.0]);

        let same = Dictionary::new(vec![
            ScoreFunction::constant(1.0),
            ScoreFunction::constant(1.0),
            ScoreFunction::constant(1.0),
        ])
        .unwrap();
        let w = validation_aew(&data, &same).unwrap();
        assert!(w.as_slice().iter().all(|v| (v - 1.0 / 3.0).abs() <= 1e-15));
    }

    #[test]
    fn single_trainer_aggregate_is_that_rule() {
        let data = line_dataset(30);
        let trainers =
            vec![Trainer::new("constant plus", |_: &Dataset| Ok(PredictionRule::constant(Label::Plus)))];
        let fit = adaptive_generic_aggregate(&data, &trainers).unwrap();
        assert_eq!(fit.members.len(), 1);
        assert!((fit.members[0].weight - 1.0).abs() <= 1e-15);
        assert_eq!(fit.aggregate.eval(&[0.4]), 1.0);
        assert_eq!(fit.rule().eval(&[0.4]), 1.0);
    }

    #[test]
    fn identical_trainers_share_weight_and_agree() {
        let data = line_dataset(30);
        let mk = || {
            Trainer::new("threshold", |_: &Dataset| {
                Ok(PredictionRule::from_fn(|x: &[f64]| if x[0] < 0.5 { 1.0 } else { -1.0 }))
            })
        };
        let trainers = vec![mk(), mk()];
        let fit = adaptive_generic_aggregate(&data, &trainers).unwrap();
        assert!((fit.members[0].weight - 0.5).abs() <= 1e-15);
        assert!((fit.members[1].weight - 0.5).abs() <= 1e-15);
        assert_eq!(fit.aggregate.eval(&[0.2]), 1.0);
        assert_eq!(fit.aggregate.eval(&[0.8]), -1.0);
    }

    #[test]
    fn weights_ignore_training_labels() {
        // Fixed rules (trainers that never read the data): flipping every
        // training label must leave the validation weights unchanged.
        let data = line_dataset(50);
        let plan = split_plan(50).unwrap();
        let mut flipped_examples = data.examples().to_vec();
        for e in flipped_examples.iter_mut().take(plan.m) {
            e.y = e.y.flip();
        }
        let flipped = Dataset::new(1, flipped_examples).unwrap();

        let mk_trainers = || {
            vec![
                Trainer::new("always plus", |_: &Dataset| Ok(PredictionRule::constant(Label::Plus))),
                Trainer::new("low half", |_: &Dataset| {
                    Ok(PredictionRule::from_fn(|x: &[f64]| if x[0] < 0.5 { 1.0 } else { -1.0 }))
                }),
            ]
        };
        let a = adaptive_generic_aggregate(&data, &mk_trainers()).unwrap();
        let b = adaptive_generic_aggregate(&flipped, &mk_trainers()).unwrap();
        for (ma, mb) in a.members.iter().zip(&b.members) {
            assert_eq!(ma.weight, mb.weight);
            assert_eq!(ma.validation_risk, mb.validation_risk);
        }
    }

    #[test]
    fn capacity_failures_are_skipped_and_recorded() {
        let data = line_dataset(30);
        let trainers = vec![
            Trainer::new("too big", |_: &Dataset| {
                Err(Error::Capacity("degree beyond capacity".into()))
            }),
            Trainer::new("fine", |_: &Dataset| Ok(PredictionRule::constant(Label::Plus))),
        ];
        let fit = adaptive_generic_aggregate(&data, &trainers).unwrap();
        assert_eq!(fit.members.len(), 1);
        assert_eq!(fit.skipped.len(), 1);
        assert_eq!(fit.skipped[0].label, "too big");
        assert!((fit.members[0].weight - 1.0).abs() <= 1e-15);

        let all_skip = vec![Trainer::new("too big", |_: &Dataset| {
            Err(Error::Capacity("degree beyond capacity".into()))
        })];
        assert!(adaptive_generic_aggregate(&data, &all_skip).is_err());

        let hard_fail = vec![Trainer::new("broken", |_: &Dataset| {
            Err(Error::Domain("no rule".into()))
        })];
        assert!(matches!(
            adaptive_generic_aggregate(&data, &hard_fail),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn plugin_pipeline_on_the_sinusoid() {
        let dist = HolderDistribution::new(HolderEtaSpec::Sinusoid {
            d: 1,
            amplitude: 0.4,
            frequency: 1.0,
        })
        .unwrap();
        let data = dist.sample(512, 11).unwrap();
        let fit = adaptive_plugin_aggregate(&data).unwrap();
        let grid = fit.grid.as_ref().unwrap();
        // Delta = ln 512 = 6.24: valid ks are 1, 2 and 3 (the last with
        // beta = 3 / 0.238 = 12.6, i.e. a degree-12 member).
        assert_eq!(grid.ks, vec![1, 2, 3]);
        assert_eq!(fit.members.len(), 3);
        assert!(fit.skipped.is_empty());
        assert_eq!(fit.plan.n, 512);
        let total: f64 = fit.members.iter().map(|m| m.weight).sum();
        assert!((total - 1.0).abs() <= 1e-12);
        // The aggregate is a convex combination of sign rules.
        for q in [0.1, 0.3, 0.6, 0.9] {
            let v = fit.aggregate.eval(&[q]);
            assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn plugin_pipeline_minimal_size() {
        let data = line_dataset(8);
        let fit = adaptive_plugin_aggregate(&data).unwrap();
        assert_eq!(fit.members.len(), 1);
        assert!(adaptive_plugin_aggregate(&line_dataset(7)).is_err());
    }
}
