//! Randomized property tests for the aggregation and risk invariants.

use proptest::prelude::*;

use aew::aggregation::{
    aew_aggregate, aew_weights, aggregation_certificate, cumulative_scores, weights_from_scores,
    Dictionary,
};
use aew::adaptive::split_plan;
use aew::data::{Dataset, Label, LabeledExample};
use aew::distributions::{Atom, FiniteDistribution};
use aew::plugin::{plugin_classifier, PluginConfig};
use aew::risk::{empirical_hinge_risk, empirical_zero_one_risk};
use aew::score::ScoreFunction;

fn dataset_strategy(max_n: usize) -> impl Strategy<Value = Dataset> {
    (1usize..=3).prop_flat_map(move |dim| {
        prop::collection::vec(
            (prop::collection::vec(-1.0f64..1.0, dim), prop::bool::ANY),
            1..=max_n,
        )
        .prop_map(move |rows| {
            let examples = rows
                .into_iter()
                .map(|(x, plus)| LabeledExample {
                    x,
                    y: if plus { Label::Plus } else { Label::Minus },
                })
                .collect();
            Dataset::new(dim, examples).unwrap()
        })
    })
}

/// Affine sign rules: deterministic, cheap, and dimension-generic.
fn rule_params(dim: usize) -> impl Strategy<Value = (Vec<f64>, f64)> {
    (prop::collection::vec(-1.0f64..1.0, dim), -1.0f64..1.0)
}

fn affine_rule(w: Vec<f64>, b: f64) -> ScoreFunction {
    ScoreFunction::from_fn(move |x: &[f64]| {
        let s: f64 = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
        if s >= 0.0 {
            1.0
        } else {
            -1.0
        }
    })
}

fn data_and_rules(
    max_n: usize,
    max_m: usize,
) -> impl Strategy<Value = (Dataset, Vec<(Vec<f64>, f64)>)> {
    dataset_strategy(max_n).prop_flat_map(move |data| {
        let dim = data.dim();
        (Just(data), prop::collection::vec(rule_params(dim), 1..=max_m))
    })
}

fn dictionary_of(params: &[(Vec<f64>, f64)]) -> Dictionary {
    Dictionary::new(params.iter().map(|(w, b)| affine_rule(w.clone(), *b)).collect()).unwrap()
}

proptest! {
    #[test]
    fn weights_form_a_distribution((data, params) in data_and_rules(40, 8)) {
        let dict = dictionary_of(&params);
        let w = aew_weights(&data, &dict).unwrap();
        let sum: f64 = w.as_slice().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9);
        prop_assert!(w.as_slice().iter().all(|v| (0.0..=1.0).contains(v) && v.is_finite()));
    }

    #[test]
    fn weights_ignore_a_common_score_shift(
        (data, params) in data_and_rules(30, 6),
        shift in -5.0f64..5.0,
    ) {
        // Adding the same constant to every member shifts all cumulative
        // scores equally, which the softmax must cancel. Clipping would
        // destroy the shift, so the dictionaries stay unclipped.
        let plain = Dictionary::new_unclipped(
            params.iter().map(|(w, b)| affine_rule(w.clone(), *b)).collect(),
        )
        .unwrap();
        let shifted = Dictionary::new_unclipped(
            params
                .iter()
                .map(|(w, b)| {
                    let base = affine_rule(w.clone(), *b);
                    ScoreFunction::from_fn(move |x: &[f64]| base.eval(x) + shift)
                })
                .collect(),
        )
        .unwrap();
        let wa = aew_weights(&data, &plain).unwrap();
        let wb = aew_weights(&data, &shifted).unwrap();
        for (a, b) in wa.as_slice().iter().zip(wb.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn weights_commute_with_member_permutation((data, params) in data_and_rules(30, 6)) {
        let dict = dictionary_of(&params);
        let w = aew_weights(&data, &dict).unwrap();
        let mut reversed = params.clone();
        reversed.reverse();
        let w_rev = aew_weights(&data, &dictionary_of(&reversed)).unwrap();
        let m = params.len();
        for j in 0..m {
            prop_assert!((w.get(j) - w_rev.get(m - 1 - j)).abs() <= 1e-12);
        }
    }

    #[test]
    fn higher_cumulative_score_means_higher_weight((data, params) in data_and_rules(30, 6)) {
        let dict = dictionary_of(&params);
        let scores = cumulative_scores(&data, &dict).unwrap();
        let w = weights_from_scores(&scores).unwrap();
        for j in 0..scores.len() {
            for k in 0..scores.len() {
                if scores[j] > scores[k] {
                    prop_assert!(w.get(j) >= w.get(k));
                }
            }
        }
    }

    #[test]
    fn certificate_slack_is_never_negative((data, params) in data_and_rules(40, 8)) {
        let dict = dictionary_of(&params);
        let cert = aggregation_certificate(&data, &dict).unwrap();
        prop_assert!(cert.slack >= -1e-9);
    }

    #[test]
    fn aggregate_stays_inside_the_member_hull(
        (data, params) in data_and_rules(20, 6),
        query in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let dict = dictionary_of(&params);
        let agg = aew_aggregate(&data, &dict).unwrap();
        let x = &query[..data.dim()];
        let value = agg.eval(x);
        let members: Vec<f64> = dict.members().iter().map(|f| f.eval(x)).collect();
        let lo = members.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = members.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(value >= lo - 1e-12 && value <= hi + 1e-12);
        prop_assert!(value.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn hinge_risk_doubles_zero_one_risk_for_sign_rules((data, params) in data_and_rules(40, 1)) {
        let (w, b) = params[0].clone();
        let score = affine_rule(w, b);
        let rule = aew::score::sign_classifier(&score);
        let hinge = empirical_hinge_risk(&data, &score).unwrap();
        let zero_one = empirical_zero_one_risk(&data, &rule).unwrap();
        prop_assert!((hinge - 2.0 * zero_one).abs() <= 1e-12);
    }

    #[test]
    fn hinge_excess_dominates_zero_one_excess_on_random_finite_distributions(
        raw_atoms in prop::collection::vec(
            ((0.001f64..1.0), (0.0f64..=1.0), -1.0f64..1.0), 1..=6),
        values in prop::collection::vec(-1.0f64..=1.0, 6),
    ) {
        // Distinct 1-d atom positions j/6; random masses normalized.
        let total: f64 = raw_atoms.iter().map(|(p, _, _)| p).sum();
        let atoms: Vec<Atom> = raw_atoms
            .iter()
            .enumerate()
            .map(|(j, (p, eta, _))| Atom { x: vec![j as f64 / 6.0], p: p / total, eta: *eta })
            .collect();
        let dist = FiniteDistribution::new(1, atoms).unwrap();
        let vals: Vec<f64> = values[..raw_atoms.len()].to_vec();
        let positions: Vec<f64> = (0..raw_atoms.len()).map(|j| j as f64 / 6.0).collect();
        let score = ScoreFunction::from_fn(move |x: &[f64]| {
            positions
                .iter()
                .position(|p| *p == x[0])
                .map_or(0.0, |i| vals[i])
        });
        let risks = dist.exact_risks(&score).unwrap();
        prop_assert!(risks.excess_r <= risks.excess_a + 1e-12);
        prop_assert!((risks.a_star - 2.0 * risks.r_star).abs() <= 1e-12);
    }

    #[test]
    fn split_plan_partitions_every_size(n in 4usize..5000) {
        let plan = split_plan(n).unwrap();
        prop_assert_eq!(plan.l + plan.m, n);
        prop_assert!(plan.l >= 1 && plan.m >= 1);
        let expected = (n as f64 / (n as f64).ln()).ceil() as usize;
        prop_assert_eq!(plan.l, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plugin_estimates_stay_in_unit_interval(
        data in dataset_strategy(60),
        beta in 0.3f64..3.0,
        query in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let config = PluginConfig::for_beta(beta, data.dim(), data.len()).unwrap();
        let estimator = aew::plugin::LocalPolyEstimator::fit(&data, config).unwrap();
        let est = estimator.estimate(&query[..data.dim()]).unwrap();
        prop_assert!((0.0..=1.0).contains(&est.eta), "eta out of range: {}", est.eta);
        prop_assert!(est.raw.is_finite());

        let rule = plugin_classifier(&data, beta).unwrap();
        let v = rule.eval(&query[..data.dim()]);
        prop_assert!(v == 1.0 || v == -1.0);
    }
}
