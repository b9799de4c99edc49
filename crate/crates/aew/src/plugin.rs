//! Local polynomial estimation of the conditional probability eta and the
//! induced plug-in classifier.
//!
//! The estimator solves, at each query point x, the kernel-weighted least
//! squares fit of a polynomial of total degree strictly below the declared
//! smoothness beta, over the full multi-index basis in the scaled offsets
//! (u - x)/h. The fitted intercept is the estimate of eta(x); the plug-in
//! classifier thresholds it at 1/2. The default bandwidth is
//! n^(-1/(2 beta + d)) where n is the size of the training set actually
//! supplied, which matters under sample splitting.
//!
//! Degenerate local designs are handled by a fixed ladder: plain normal
//! equations, then a 1e-8 ridge, then a local constant fit, and an empty
//! window yields 1/2. Every estimate reports which rung produced it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::score::PredictionRule;

/// Largest permitted local polynomial degree. The multi-index basis and the
/// per-query normal equations grow combinatorially past this.
pub const MAX_DEGREE: usize = 30;

/// Ridge added to the normal equations when the plain solve fails.
const FALLBACK_RIDGE: f64 = 1e-8;

/// Smoothing kernel on the unit ball of scaled offsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Weight 1 on ||t|| <= 1, else 0.
    UniformBall,
    /// Weight max(0, 1 - ||t||^2).
    Epanechnikov,
}

impl Kernel {
    /// Weight as a function of the squared scaled distance ||t||^2.
    fn weight(self, sq_dist: f64) -> f64 {
        match self {
            Kernel::UniformBall => {
                if sq_dist <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Kernel::Epanechnikov => (1.0 - sq_dist).max(0.0),
        }
    }
}

/// The maximal integer strictly less than beta, so beta = 1 gives degree 0
/// and beta = 3 gives degree 2.
pub fn degree_for(beta: f64) -> Result<usize> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::Domain(format!("smoothness must be positive, got {beta}")));
    }
    let floor = beta.floor();
    let degree = if floor == beta { floor - 1.0 } else { floor };
    if degree > MAX_DEGREE as f64 {
        return Err(Error::Capacity(format!(
            "smoothness {beta} needs polynomial degree {degree}, above the supported {MAX_DEGREE}"
        )));
    }
    Ok(degree.max(0.0) as usize)
}

/// The bandwidth n^(-1/(2 beta + d)).
pub fn default_bandwidth(beta: f64, d: usize, n: usize) -> f64 {
    (n as f64).powf(-1.0 / (2.0 * beta + d as f64))
}

/// Configuration of one local polynomial estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PluginConfig {
    beta: f64,
    degree: usize,
    bandwidth: f64,
    kernel: Kernel,
    ridge: f64,
}

impl PluginConfig {
    /// Degree and bandwidth derived from the smoothness beta, the feature
    /// dimension, and the training-set size; uniform kernel, no ridge.
    pub fn for_beta(beta: f64, d: usize, n: usize) -> Result<PluginConfig> {
        if d == 0 {
            return Err(Error::Domain("feature dimension must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::Domain("training-set size must be at least 1".into()));
        }
        let degree = degree_for(beta)?;
        Ok(PluginConfig {
            beta,
            degree,
            bandwidth: default_bandwidth(beta, d, n),
            kernel: Kernel::UniformBall,
            ridge: 0.0,
        })
    }

    pub fn with_bandwidth(mut self, bandwidth: f64) -> Result<PluginConfig> {
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::Domain(format!("bandwidth must be positive, got {bandwidth}")));
        }
        self.bandwidth = bandwidth;
        Ok(self)
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> PluginConfig {
        self.kernel = kernel;
        self
    }

    pub fn with_ridge(mut self, ridge: f64) -> Result<PluginConfig> {
        if !ridge.is_finite() || ridge < 0.0 {
            return Err(Error::Domain(format!("ridge must be nonnegative, got {ridge}")));
        }
        self.ridge = ridge;
        Ok(self)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }
}

/// Which rung of the degeneracy ladder produced an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitPath {
    /// Plain weighted least squares.
    Full,
    /// Least squares after adding the fallback ridge.
    Ridged,
    /// Kernel-weighted window mean.
    LocalConstant,
    /// No training point carries positive kernel weight; value 1/2.
    EmptyWindow,
}

/// One conditional-probability estimate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EtaEstimate {
    /// Fitted intercept clipped to [0, 1].
    pub eta: f64,
    /// Fitted intercept before clipping.
    pub raw: f64,
    pub path: FitPath,
}

enum TrainStore {
    /// d = 1: points sorted by coordinate, with response prefix sums for
    /// the degree-0 uniform-kernel shortcut. Windows are contiguous runs.
    Sorted1D { xs: Vec<f64>, zs: Vec<f64>, prefix_z: Vec<f64> },
    General { points: Vec<Vec<f64>>, zs: Vec<f64> },
}

/// A fitted local polynomial estimator, queryable at arbitrary points.
pub struct LocalPolyEstimator {
    dim: usize,
    config: PluginConfig,
    store: TrainStore,
    /// Multi-index exponents of the basis, intercept first.
    basis: Vec<Vec<usize>>,
}

impl LocalPolyEstimator {
    /// Fits to labeled examples, regressing the {0,1}-mapped labels
    /// z = (y + 1)/2 so the intercept estimates eta.
    pub fn fit(train: &Dataset, config: PluginConfig) -> Result<LocalPolyEstimator> {
        if train.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let points: Vec<Vec<f64>> = train.examples().iter().map(|e| e.x.clone()).collect();
        let responses: Vec<f64> =
            train.examples().iter().map(|e| (e.y.to_f64() + 1.0) / 2.0).collect();
        LocalPolyEstimator::fit_responses(points, responses, config)
    }

    /// Fits to arbitrary real responses. `estimate` still clips to [0, 1];
    /// use `raw_estimate` for plain regression values.
    pub fn fit_responses(
        points: Vec<Vec<f64>>,
        responses: Vec<f64>,
        config: PluginConfig,
    ) -> Result<LocalPolyEstimator> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if points.len() != responses.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: responses.len() });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::Domain("feature dimension must be at least 1".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain("training points must be finite".into()));
            }
        }
        if responses.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain("responses must be finite".into()));
        }

        let basis = multi_indices(dim, config.degree);
        let store = if dim == 1 {
            let mut order: Vec<usize> = (0..points.len()).collect();
            order.sort_by(|&i, &j| points[i][0].total_cmp(&points[j][0]));
            let xs: Vec<f64> = order.iter().map(|&i| points[i][0]).collect();
            let zs: Vec<f64> = order.iter().map(|&i| responses[i]).collect();
            let mut prefix_z = Vec::with_capacity(zs.len() + 1);
            prefix_z.push(0.0);
            let mut acc = 0.0;
            for z in &zs {
                acc += z;
                prefix_z.push(acc);
            }
            TrainStore::Sorted1D { xs, zs, prefix_z }
        } else {
            TrainStore::General { points, zs: responses }
        };
        Ok(LocalPolyEstimator { dim, config, store, basis })
    }

    pub fn config(&self) -> &PluginConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Fitted intercept at x before clipping, with the ladder rung that
    /// produced it.
    pub fn raw_estimate(&self, x: &[f64]) -> Result<(f64, FitPath)> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        match &self.store {
            TrainStore::Sorted1D { xs, zs, prefix_z } => {
                let h = self.config.bandwidth;
                let q = x[0];
                let lo = xs.partition_point(|&u| u < q - h);
                let hi = xs.partition_point(|&u| u <= q + h);
                if lo >= hi {
                    return Ok((0.5, FitPath::EmptyWindow));
                }
                if self.config.degree == 0
                    && self.config.kernel == Kernel::UniformBall
                    && self.config.ridge == 0.0
                {
                    let count = (hi - lo) as f64;
                    return Ok(((prefix_z[hi] - prefix_z[lo]) / count, FitPath::Full));
                }
                self.solve_window_1d(&xs[lo..hi], &zs[lo..hi], q)
            }
            TrainStore::General { points, zs } => self.solve_window_general(points, zs, x),
        }
    }

    /// Estimate of eta(x): the fitted intercept clipped to [0, 1].
    pub fn estimate(&self, x: &[f64]) -> Result<EtaEstimate> {
        let (raw, path) = self.raw_estimate(x)?;
        Ok(EtaEstimate { eta: raw.clamp(0.0, 1.0), raw, path })
    }

    /// d = 1 window fit via power-moment accumulation: the normal-equation
    /// matrix is the Hankel matrix of kernel moments mu_0..mu_{2 deg}, so
    /// one pass over the window suffices.
    fn solve_window_1d(&self, xs: &[f64], zs: &[f64], q: f64) -> Result<(f64, FitPath)> {
        let deg = self.config.degree;
        let h = self.config.bandwidth;
        let mut mu = vec![0.0; 2 * deg + 1];
        let mut rho = vec![0.0; deg + 1];
        for (&u, &z) in xs.iter().zip(zs) {
            let t = (u - q) / h;
            let w = self.config.kernel.weight(t * t);
            if w == 0.0 {
                continue;
            }
            let mut pw = w;
            mu[0] += pw;
            rho[0] += pw * z;
            for k in 1..=2 * deg {
                pw *= t;
                mu[k] += pw;
                if k <= deg {
                    rho[k] += pw * z;
                }
            }
        }
        if mu[0] <= 0.0 {
            return Ok((0.5, FitPath::EmptyWindow));
        }
        let b = deg + 1;
        let gram = DMatrix::from_fn(b, b, |i, j| mu[i + j]);
        let rhs = DVector::from_fn(b, |i, _| rho[i]);
        Ok(self.solve_ladder(gram, rhs))
    }

    /// General-dimension window fit: accumulate the Gram matrix of the
    /// multi-index basis over positive-weight points.
    fn solve_window_general(
        &self,
        points: &[Vec<f64>],
        zs: &[f64],
        x: &[f64],
    ) -> Result<(f64, FitPath)> {
        let h = self.config.bandwidth;
        let b = self.basis.len();
        let mut gram = DMatrix::zeros(b, b);
        let mut rhs = DVector::zeros(b);
        let mut phi = vec![0.0; b];
        let mut t = vec![0.0; self.dim];
        let mut weight_seen = false;
        for (p, &z) in points.iter().zip(zs) {
            let mut sq = 0.0;
            for k in 0..self.dim {
                t[k] = (p[k] - x[k]) / h;
                sq += t[k] * t[k];
            }
            let w = self.config.kernel.weight(sq);
            if w == 0.0 {
                continue;
            }
            weight_seen = true;
            for (slot, exps) in phi.iter_mut().zip(&self.basis) {
                let mut m = 1.0;
                for (k, &e) in exps.iter().enumerate() {
                    for _ in 0..e {
                        m *= t[k];
                    }
                }
                *slot = m;
            }
            for i in 0..b {
                let wi = w * phi[i];
                rhs[i] += wi * z;
                for j in i..b {
                    gram[(i, j)] += wi * phi[j];
                }
            }
        }
        if !weight_seen {
            return Ok((0.5, FitPath::EmptyWindow));
        }
        for i in 0..b {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        Ok(self.solve_ladder(gram, rhs))
    }

    /// Plain solve, then ridge, then local constant. The intercept of the
    /// fit in scaled offsets is the estimate at the query point.
    fn solve_ladder(&self, gram: DMatrix<f64>, rhs: DVector<f64>) -> (f64, FitPath) {
        let b = gram.nrows();
        let mut first = gram.clone();
        if self.config.ridge > 0.0 {
            for i in 0..b {
                first[(i, i)] += self.config.ridge;
            }
        }
        if let Some(chol) = first.cholesky() {
            let c = chol.solve(&rhs);
            if c[0].is_finite() {
                return (c[0], FitPath::Full);
            }
        }
        let mut ridged = gram.clone();
        for i in 0..b {
            ridged[(i, i)] += self.config.ridge + FALLBACK_RIDGE;
        }
        if let Some(chol) = ridged.cholesky() {
            let c = chol.solve(&rhs);
            if c[0].is_finite() {
                return (c[0], FitPath::Ridged);
            }
        }
        (rhs[0] / gram[(0, 0)], FitPath::LocalConstant)
    }
}

/// All exponent vectors of total degree at most `degree` over `dim`
/// variables, ordered by total degree then lexicographically; the zero
/// index (intercept) comes first.
fn multi_indices(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; dim];
    for total in 0..=degree {
        fill_indices(dim, total, 0, &mut current, &mut out);
    }
    out
}

fn fill_indices(
    dim: usize,
    remaining: usize,
    pos: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if pos == dim - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_indices(dim, remaining - e, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// Plug-in rule with everything derived from beta: degree strictly below
/// beta and bandwidth n^(-1/(2 beta + d)) from the given training set.
pub fn plugin_classifier(train: &Dataset, beta: f64) -> Result<PredictionRule> {
    let config = PluginConfig::for_beta(beta, train.dim(), train.len())?;
    plugin_classifier_with(train, config)
}

/// Plug-in rule x -> +1 iff the estimated eta(x) >= 1/2 (so an empty
/// window's 1/2 maps to +1), with an explicit estimator configuration.
///
/// The returned rule panics if queried at a point of the wrong dimension.
pub fn plugin_classifier_with(train: &Dataset, config: PluginConfig) -> Result<PredictionRule> {
    let est = LocalPolyEstimator::fit(train, config)?;
    Ok(PredictionRule::from_fn(move |x: &[f64]| {
        let e = est.estimate(x).expect("query dimension must match training dimension");
        if e.eta >= 0.5 {
            1.0
        } else {
            -1.0
        }
    }))
}
