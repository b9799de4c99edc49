//! Aggregation with exponential weights over a finite dictionary.
//!
//! Given examples (X_i, Y_i) and a dictionary f_1..f_M, each member gets the
//! weight
//!
//! ```text
//!     w_j = exp(S_j) / sum_k exp(S_k),   S_j = sum_i Y_i f_j(X_i),
//! ```
//!
//! and the aggregate is the convex combination sum_j w_j f_j. For {-1,+1}
//! valued members S_j = n (1 - 2 R_n(f_j)), so the same weights can be read
//! as exp(-n A_n(f_j)) up to a common factor, where A_n is the empirical
//! hinge risk; the softmax here computes that quantity stably.
//!
//! The aggregate comes with a deterministic certificate: its empirical hinge
//! risk never exceeds min_j A_n(f_j) + log(M)/n, for every realization of
//! the data. A violation beyond floating-point tolerance is reported as an
//! invariant-violation error, not a warning.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::risk::{empirical_hinge_risk, empirical_zero_one_risk};
use crate::score::{clip_to_unit, sign_classifier, Score, ScoreFunction};

/// Tolerance on the certificate slack before it is treated as a broken
/// invariant rather than accumulated rounding.
pub const PROP_SLACK_TOL: f64 = 1e-9;

/// Weights are floored at this value before normalization so that no member
/// vanishes outright even when its cumulative score trails the leader by
/// more than exp can represent. The redistribution this causes is below any
/// tolerance used in this crate.
const WEIGHT_FLOOR: f64 = 1e-300;

/// An ordered, finite dictionary of score functions.
///
/// Members are clipped to [-1, 1] on ingest by default. Clipping never
/// increases hinge risk, so any hinge-risk guarantee stated for the clipped
/// members extends to the originals. `new_unclipped` skips the projection
/// and records that fact.
#[derive(Clone, Debug)]
pub struct Dictionary {
    members: Vec<ScoreFunction>,
    clipped: bool,
}

impl Dictionary {
    pub fn new(members: Vec<ScoreFunction>) -> Result<Dictionary> {
        if members.is_empty() {
            return Err(Error::Domain("dictionary needs at least one member".into()));
        }
        let members = members.iter().map(clip_to_unit).collect();
        Ok(Dictionary { members, clipped: true })
    }

    /// Keeps members exactly as given. The dictionary is marked unclipped so
    /// downstream reports can surface that the hinge-risk reduction argument
    /// for clipping was deliberately skipped.
    pub fn new_unclipped(members: Vec<ScoreFunction>) -> Result<Dictionary> {
        if members.is_empty() {
            return Err(Error::Domain("dictionary needs at least one member".into()));
        }
        Ok(Dictionary { members, clipped: false })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ScoreFunction] {
        &self.members
    }

    pub fn member(&self, j: usize) -> &ScoreFunction {
        &self.members[j]
    }

    pub fn is_clipped(&self) -> bool {
        self.clipped
    }
}

/// A probability vector over dictionary members: entries in [0, 1] summing
/// to 1 within 1e-12.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<WeightVector> {
        if w.is_empty() {
            return Err(Error::Domain("weight vector must be nonempty".into()));
        }
        if w.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::InvariantViolation(
                "weights must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "weights must sum to 1, got {total}"
            )));
        }
        Ok(WeightVector { w })
    }

    pub fn uniform(m: usize) -> Result<WeightVector> {
        if m == 0 {
            return Err(Error::Domain("weight vector must be nonempty".into()));
        }
        WeightVector::new(vec![1.0 / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn get(&self, j: usize) -> f64 {
        self.w[j]
    }
}

/// Cumulative scores S_j = sum_i Y_i f_j(X_i), one per dictionary member,
/// computed in example order.
pub fn cumulative_scores(data: &Dataset, dict: &Dictionary) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut scores = vec![0.0; dict.len()];
    for ex in data.examples() {
        let y = ex.y.to_f64();
        for (j, f) in dict.members().iter().enumerate() {
            let v = f.eval(&ex.x);
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "member {j} produced a non-finite score"
                )));
            }
            scores[j] += y * v;
        }
    }
    Ok(scores)
}

/// Stable softmax of cumulative scores: subtract the maximum, exponentiate,
/// floor, normalize. Invariant under adding a constant to every score, and
/// equivariant under permuting members.
pub fn weights_from_scores(scores: &[f64]) -> Result<WeightVector> {
    if scores.is_empty() {
        return Err(Error::Domain("need at least one score".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Domain("cumulative scores must be finite".into()));
    }
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp().max(WEIGHT_FLOOR)).collect();
    let total: f64 = exps.iter().sum();
    WeightVector::new(exps.iter().map(|e| e / total).collect())
}

/// Exponential weights for the dictionary on the given sample.
pub fn aew_weights(data: &Dataset, dict: &Dictionary) -> Result<WeightVector> {
    let scores = cumulative_scores(data, dict)?;
    weights_from_scores(&scores)
}

/// A weighted dictionary, evaluating to sum_j w_j f_j(x).
#[derive(Clone)]
pub struct AggregateScore {
    dictionary: Dictionary,
    weights: WeightVector,
}

impl AggregateScore {
    pub fn new(dictionary: Dictionary, weights: WeightVector) -> Result<AggregateScore> {
        if dictionary.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: dictionary.len(),
                got: weights.len(),
            });
        }
        Ok(AggregateScore { dictionary, weights })
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.dictionary
            .members()
            .iter()
            .zip(self.weights.as_slice())
            .map(|(f, w)| w * f.eval(x))
            .sum()
    }

    pub fn as_score_function(&self) -> ScoreFunction {
        ScoreFunction::new(self.clone())
    }
}

impl Score for AggregateScore {
    fn eval(&self, x: &[f64]) -> f64 {
        AggregateScore::eval(self, x)
    }
    fn range_bound(&self) -> Option<f64> {
        if self.dictionary.is_clipped() {
            Some(1.0)
        } else {
            None
        }
    }
}

impl std::fmt::Debug for AggregateScore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AggregateScore(m={})", self.dictionary.len())
    }
}

/// Exponential-weights aggregate of the dictionary on the given sample.
pub fn aew_aggregate(data: &Dataset, dict: &Dictionary) -> Result<AggregateScore> {
    let weights = aew_weights(data, dict)?;
    AggregateScore::new(dict.clone(), weights)
}

/// Index (0-based) of the member with the smallest empirical zero-one risk,
/// ties broken by the lowest index. Real-valued members are classified
/// through their sign first, so for {-1,+1} members this is plain empirical
/// risk minimization.
pub fn erm_select(data: &Dataset, dict: &Dictionary) -> Result<usize> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut best = 0usize;
    let mut best_risk = f64::INFINITY;
    for (j, f) in dict.members().iter().enumerate() {
        let rule = sign_classifier(f);
        let risk = empirical_zero_one_risk(data, &rule)?;
        if risk < best_risk {
            best = j;
            best_risk = risk;
        }
    }
    Ok(best)
}

/// The deterministic guarantee attached to an exponential-weights aggregate.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct AggregationCertificate {
    /// Empirical hinge risk of the aggregate, A_n(aggregate).
    pub aggregate_hinge_risk: f64,
    /// min_j A_n(f_j) over dictionary members.
    pub min_member_hinge_risk: f64,
    /// log(M) / n.
    pub log_m_over_n: f64,
    /// min + log(M)/n - A_n(aggregate); nonnegative up to rounding.
    pub slack: f64,
}

/// Certifies the aggregate's empirical hinge risk against
/// min_j A_n(f_j) + log(M)/n. Slack below -1e-9 is an invariant violation.
pub fn aggregation_certificate(data: &Dataset, dict: &Dictionary) -> Result<AggregationCertificate> {
    let aggregate = aew_aggregate(data, dict)?;
    let aggregate_hinge_risk = empirical_hinge_risk(data, &aggregate.as_score_function())?;
    let mut min_member_hinge_risk = f64::INFINITY;
    for f in dict.members() {
        let a = empirical_hinge_risk(data, f)?;
        if a < min_member_hinge_risk {
            min_member_hinge_risk = a;
        }
    }
    let log_m_over_n = (dict.len() as f64).ln() / data.len() as f64;
    let slack = min_member_hinge_risk + log_m_over_n - aggregate_hinge_risk;
    let cert = AggregationCertificate {
        aggregate_hinge_risk,
        min_member_hinge_risk,
        log_m_over_n,
        slack,
    };
    if slack < -PROP_SLACK_TOL {
        return Err(Error::InvariantViolation(format!(
            "aggregate hinge risk {aggregate_hinge_risk} exceeds min member {min_member_hinge_risk} + log(M)/n {log_m_over_n} by more than {PROP_SLACK_TOL}"
        )));
    }
    Ok(cert)
}
