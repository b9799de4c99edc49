//! Empirical risks: zero-one and hinge.
//!
//! For {-1, +1}-valued rules the two are tied together pointwise:
//! hinge(y f(x)) = 2 * 1{y f(x) <= 0}, so the empirical hinge risk of a rule
//! is exactly twice its empirical zero-one risk.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::score::{PredictionRule, ScoreFunction};

/// Hinge loss phi(m) = max(0, 1 - m) at margin m = y f(x).
pub fn hinge_loss(margin: f64) -> Result<f64> {
    if !margin.is_finite() {
        return Err(Error::Domain(format!(
            "hinge loss needs a finite margin, got {margin}"
        )));
    }
    Ok((1.0 - margin).max(0.0))
}

/// Fraction of examples with y f(x) <= 0.
pub fn empirical_zero_one_risk(data: &Dataset, rule: &PredictionRule) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut wrong = 0usize;
    for ex in data.examples() {
        if ex.y.to_f64() * rule.eval(&ex.x) <= 0.0 {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / data.len() as f64)
}

/// Mean hinge loss of a score function over the dataset.
pub fn empirical_hinge_risk(data: &Dataset, f: &ScoreFunction) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    for ex in data.examples() {
        total += hinge_loss(ex.y.to_f64() * f.eval(&ex.x))?;
    }
    Ok(total / data.len() as f64)
}
