//! Score functions and prediction rules.
//!
//! A score function is any measurable f: R^d -> R; a prediction rule is a
//! score function whose values are exactly -1 or +1. Rules are a refinement
//! of scores, not a separate hierarchy: every rule can be used wherever a
//! score is expected.

use std::sync::Arc;

use crate::data::Label;

/// Object-safe evaluation interface. Implementations must be pure: the same
/// input always yields the same output.
pub trait Score: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;

    /// An upper bound on |eval| if one is known (1.0 after clipping).
    fn range_bound(&self) -> Option<f64> {
        None
    }
}

/// Shared, cheaply clonable handle to a score function.
#[derive(Clone)]
pub struct ScoreFunction {
    inner: Arc<dyn Score>,
}

impl ScoreFunction {
    pub fn new(score: impl Score + 'static) -> ScoreFunction {
        ScoreFunction { inner: Arc::new(score) }
    }

    pub fn from_fn(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> ScoreFunction {
        struct FnScore<F>(F);
        impl<F: Fn(&[f64]) -> f64 + Send + Sync> Score for FnScore<F> {
            fn eval(&self, x: &[f64]) -> f64 {
                (self.0)(x)
            }
        }
        ScoreFunction::new(FnScore(f))
    }

    pub fn constant(value: f64) -> ScoreFunction {
        struct Constant(f64);
        impl Score for Constant {
            fn eval(&self, _x: &[f64]) -> f64 {
                self.0
            }
            fn range_bound(&self) -> Option<f64> {
                Some(self.0.abs())
            }
        }
        ScoreFunction::new(Constant(value))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.inner.eval(x)
    }

    pub fn range_bound(&self) -> Option<f64> {
        self.inner.range_bound()
    }
}

impl std::fmt::Debug for ScoreFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ScoreFunction(bound={:?})", self.range_bound())
    }
}

struct Clipped {
    inner: ScoreFunction,
}

impl Score for Clipped {
    fn eval(&self, x: &[f64]) -> f64 {
        self.inner.eval(x).clamp(-1.0, 1.0)
    }
    fn range_bound(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Pointwise projection onto [-1, 1]. Idempotent, and harmless for hinge
/// risk: the clipped score never has larger hinge risk than the original.
pub fn clip_to_unit(f: &ScoreFunction) -> ScoreFunction {
    if let Some(b) = f.range_bound() {
        if b <= 1.0 {
            return f.clone();
        }
    }
    ScoreFunction::new(Clipped { inner: f.clone() })
}

struct SignOf {
    inner: ScoreFunction,
}

impl Score for SignOf {
    fn eval(&self, x: &[f64]) -> f64 {
        if self.inner.eval(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
    fn range_bound(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// A score function guaranteed to take values in {-1, +1}.
#[derive(Clone, Debug)]
pub struct PredictionRule {
    score: ScoreFunction,
}

impl PredictionRule {
    /// Wraps a closure that the caller promises is {-1, +1}-valued.
    pub fn from_fn(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> PredictionRule {
        PredictionRule { score: ScoreFunction::from_fn(f) }
    }

    pub fn constant(label: Label) -> PredictionRule {
        PredictionRule { score: ScoreFunction::constant(label.to_f64()) }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.score.eval(x)
    }

    pub fn label(&self, x: &[f64]) -> Label {
        Label::from_sign(self.eval(x))
    }

    pub fn as_score_function(&self) -> &ScoreFunction {
        &self.score
    }
}

/// The classifier induced by a score: sign(f), with sign(0) = +1.
pub fn sign_classifier(f: &ScoreFunction) -> PredictionRule {
    PredictionRule {
        score: ScoreFunction::new(SignOf { inner: f.clone() }),
    }
}
