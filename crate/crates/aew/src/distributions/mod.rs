//! Exact probability models for binary classification.
//!
//! A [`FiniteDistribution`] is a joint law of (X, Y) supported on finitely
//! many feature atoms, each carrying a mass and a conditional probability
//! eta(x) = P(Y = +1 | X = x). Finite support makes every risk quantity a
//! finite sum, so misclassification and hinge risks, Bayes risks, margin
//! constants, and low-noise exponents are all computed exactly rather than
//! estimated.
//!
//! The module also builds the hypercube-style family of hard distributions
//! used to probe optimal aggregation rates: N - 1 atoms with conditional
//! probabilities (1 +/- h)/2 and one heavy deterministic atom, with N, h
//! and the small-atom mass tied to the sample size and margin parameter.

pub mod holder;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, LabeledExample};
use crate::error::{Error, Result};
use crate::risk::hinge_loss;
use crate::score::{PredictionRule, ScoreFunction};

/// Brute-force margin certification enumerates all 2^N sign patterns on the
/// support; N above this is refused rather than left to run for hours.
pub const MAX_MARGIN_SUPPORT: usize = 16;

/// One support point of a finite joint law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    /// Feature vector of the atom.
    pub x: Vec<f64>,
    /// Marginal mass P(X = x), strictly positive.
    pub p: f64,
    /// Conditional probability P(Y = +1 | X = x), in [0, 1].
    pub eta: f64,
}

/// A finite-support joint distribution of (X, Y).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    dim: usize,
    atoms: Vec<Atom>,
}

impl FiniteDistribution {
    /// Validates masses (positive, summing to 1 within 1e-12), conditional
    /// probabilities (in [0, 1]), finite coordinates of the stated
    /// dimension, and distinctness of the support points.
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<FiniteDistribution> {
        if dim == 0 {
            return Err(Error::Domain("feature dimension must be at least 1".into()));
        }
        if atoms.is_empty() {
            return Err(Error::Domain("a distribution needs at least one atom".into()));
        }
        let mut total = 0.0;
        for (i, a) in atoms.iter().enumerate() {
            if a.x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: a.x.len() });
            }
            if a.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("atom {i} has a non-finite coordinate")));
            }
            if !a.p.is_finite() || a.p <= 0.0 {
                return Err(Error::Domain(format!("atom {i} mass must be positive, got {}", a.p)));
            }
            if !a.eta.is_finite() || a.eta < 0.0 || a.eta > 1.0 {
                return Err(Error::Domain(format!(
                    "atom {i} conditional probability must lie in [0, 1], got {}",
                    a.eta
                )));
            }
            total += a.p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("atom masses must sum to 1, got {total}")));
        }
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                if atoms[i].x == atoms[j].x {
                    return Err(Error::Domain(format!("atoms {i} and {j} share a support point")));
                }
            }
        }
        Ok(FiniteDistribution { dim, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    /// Misclassification risk, hinge risk, and their optima for a score
    /// function, all as exact finite sums. Scores are classified through
    /// sign with sign(0) = +1.
    pub fn exact_risks(&self, f: &ScoreFunction) -> Result<RiskReport> {
        let mut r = 0.0;
        let mut r_star = 0.0;
        let mut a = 0.0;
        for atom in &self.atoms {
            let v = f.eval(&atom.x);
            let predicts_plus = v >= 0.0;
            r += atom.p * if predicts_plus { 1.0 - atom.eta } else { atom.eta };
            r_star += atom.p * atom.eta.min(1.0 - atom.eta);
            a += atom.p
                * (atom.eta * hinge_loss(v)? + (1.0 - atom.eta) * hinge_loss(-v)?);
        }
        let a_star = 2.0 * r_star;
        Ok(RiskReport {
            r,
            r_star,
            a,
            a_star,
            excess_r: r - r_star,
            excess_a: a - a_star,
        })
    }

    /// Bayes risk R* = sum_i p_i min(eta_i, 1 - eta_i).
    pub fn bayes_risk(&self) -> f64 {
        self.atoms.iter().map(|a| a.p * a.eta.min(1.0 - a.eta)).sum()
    }

    /// The Bayes rule sign(2 eta(x) - 1), with ties going to +1. Off the
    /// support the rule returns +1; it is only meaningful on support points.
    pub fn bayes_rule(&self) -> PredictionRule {
        self.tabulated_rule_unchecked(
            self.atoms.iter().map(|a| if 2.0 * a.eta - 1.0 >= 0.0 { 1.0 } else { -1.0 }).collect(),
        )
    }

    /// A prediction rule given by one value in {-1, +1} per atom, in atom
    /// order; +1 off the support.
    pub fn tabulated_rule(&self, values: &[f64]) -> Result<PredictionRule> {
        if values.len() != self.atoms.len() {
            return Err(Error::DimensionMismatch { expected: self.atoms.len(), got: values.len() });
        }
        if values.iter().any(|v| *v != 1.0 && *v != -1.0) {
            return Err(Error::Domain("tabulated rule values must be -1 or +1".into()));
        }
        Ok(self.tabulated_rule_unchecked(values.to_vec()))
    }

    fn tabulated_rule_unchecked(&self, values: Vec<f64>) -> PredictionRule {
        let table: Vec<(Vec<f64>, f64)> =
            self.atoms.iter().map(|a| a.x.clone()).zip(values).collect();
        PredictionRule::from_fn(move |x: &[f64]| {
            for (pt, v) in &table {
                if pt.as_slice() == x {
                    return *v;
                }
            }
            1.0
        })
    }

    /// Draws n i.i.d. examples: an atom by its mass, then a label +1 with
    /// probability eta. Deterministic given the seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut examples = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut chosen = self.atoms.len() - 1;
            for (i, a) in self.atoms.iter().enumerate() {
                acc += a.p;
                if u < acc {
                    chosen = i;
                    break;
                }
            }
            let atom = &self.atoms[chosen];
            let y = if rng.random_bool(atom.eta) { Label::Plus } else { Label::Minus };
            examples.push(LabeledExample { x: atom.x.clone(), y });
        }
        Dataset::new(self.dim, examples)
    }

    /// Smallest margin constant c0 such that every sign rule f on the
    /// support satisfies E|f(X) - f*(X)| <= c0 (R(f) - R*)^(1/kappa), or the
    /// verdict that no finite c0 works (an atom with eta = 1/2 gives zero
    /// excess risk but positive disagreement).
    ///
    /// Brute force over all 2^N sign patterns; supports of more than
    /// [`MAX_MARGIN_SUPPORT`] atoms are refused.
    pub fn margin_c0(&self, kappa: f64) -> Result<MarginVerdict> {
        if !kappa.is_finite() || kappa < 1.0 {
            return Err(Error::Domain(format!("margin parameter must be >= 1, got {kappa}")));
        }
        let n = self.atoms.len();
        if n > MAX_MARGIN_SUPPORT {
            return Err(Error::Capacity(format!(
                "margin certification enumerates 2^N rules; support size {n} exceeds {MAX_MARGIN_SUPPORT}"
            )));
        }
        if self.atoms.iter().any(|a| a.eta == 0.5) {
            return Ok(MarginVerdict::Infeasible);
        }
        // Every rule is f* with some atoms flipped; enumerate the nonempty
        // flip sets. Disagreement mass and excess risk are additive over
        // flipped atoms, and the all-flipped pattern needs no special case.
        let mut c0 = 0.0f64;
        for mask in 1u32..(1u32 << n) {
            let mut disagreement = 0.0;
            let mut excess = 0.0;
            for (i, a) in self.atoms.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    disagreement += 2.0 * a.p;
                    excess += a.p * (2.0 * a.eta - 1.0).abs();
                }
            }
            c0 = c0.max(disagreement / excess.powf(1.0 / kappa));
        }
        Ok(MarginVerdict::Feasible(MarginSpec { kappa, c0 }))
    }

    /// Checks the low-noise condition P(|2 eta(X) - 1| <= t) <= c t^(1/(kappa-1))
    /// on [0, 1): at every jump point t = |2 eta_i - 1| < 1 the inclusive
    /// probability is tested, and at t = 1 the left limit P(|2 eta - 1| < 1)
    /// is tested against c (mass at full margin never violates low noise).
    pub fn noise_exponent_check(&self, kappa: f64, c: f64) -> Result<bool> {
        if !kappa.is_finite() || kappa <= 1.0 {
            return Err(Error::Domain(format!(
                "noise exponent check needs kappa > 1, got {kappa}"
            )));
        }
        if !c.is_finite() || c < 0.0 {
            return Err(Error::Domain(format!("constant must be nonnegative, got {c}")));
        }
        let exponent = 1.0 / (kappa - 1.0);
        let margins: Vec<f64> = self.atoms.iter().map(|a| (2.0 * a.eta - 1.0).abs()).collect();
        for t in margins.iter().filter(|t| **t < 1.0) {
            let prob: f64 = self
                .atoms
                .iter()
                .zip(&margins)
                .filter(|(_, m)| *m <= t)
                .map(|(a, _)| a.p)
                .sum();
            if prob > c * t.powf(exponent) + 1e-12 {
                return Ok(false);
            }
        }
        let below_one: f64 = self
            .atoms
            .iter()
            .zip(&margins)
            .filter(|(_, m)| **m < 1.0)
            .map(|(a, _)| a.p)
            .sum();
        Ok(below_one <= c + 1e-12)
    }
}

/// Exact risk quantities of a score function under a distribution.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RiskReport {
    /// Misclassification risk R(f) of the induced sign rule.
    pub r: f64,
    /// Bayes risk R*.
    pub r_star: f64,
    /// Hinge risk A(f).
    pub a: f64,
    /// Optimal hinge risk A* = 2 R*.
    pub a_star: f64,
    /// R(f) - R*.
    pub excess_r: f64,
    /// A(f) - A*.
    pub excess_a: f64,
}

/// A certified margin (low-noise) constant: every sign rule f satisfies
/// E|f(X) - f*(X)| <= c0 (R(f) - R*)^(1/kappa).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MarginSpec {
    pub kappa: f64,
    pub c0: f64,
}

/// Outcome of margin certification over a finite support.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum MarginVerdict {
    /// The smallest constant that works, attained by at least one rule.
    Feasible(MarginSpec),
    /// No finite constant works for this margin parameter.
    Infeasible,
}

impl MarginVerdict {
    pub fn c0(&self) -> Option<f64> {
        match self {
            MarginVerdict::Feasible(spec) => Some(spec.c0),
            MarginVerdict::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, MarginVerdict::Feasible(_))
    }
}

/// Parameters of the hard hypercube-style family tied to a dictionary size
/// M, sample size n, and margin parameter kappa.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowerBoundParams {
    /// Number of support atoms, ceil(log2 M).
    pub support_size: usize,
    /// Mass of each of the first N - 1 atoms.
    pub w: f64,
    /// Margin gap: the small atoms have |2 eta - 1| = h.
    pub h: f64,
    pub kappa: f64,
    /// Signs of the small-atom margins, one per small atom.
    pub sigma: Vec<f64>,
    /// Set when the parameters leave the regime in which the family's
    /// low-noise membership argument is valid (the construction itself is
    /// still a well-formed distribution).
    pub regime_warning: bool,
}

/// Builds the hard family for dictionary size m and sample size n.
///
/// N = ceil(log2 m) atoms sit at i/N for i = 1..N. For kappa > 1 the margin
/// gap is h = (N/n)^((kappa-1)/(2kappa-1)); for kappa = 1 it is h = 1/2. In
/// both cases the small-atom mass is w = 1/(n h^2). The first N - 1 atoms
/// have eta = (1 + sigma_j h)/2 and mass w; the last atom is deterministic
/// (eta = 1) and absorbs the remaining mass.
///
/// Requires m >= 2, log m <= n, and sigma of length N - 1 with entries in
/// {-1, +1}. Parameter combinations yielding an invalid distribution
/// (h >= 1 or no mass left for the last atom) are errors; combinations that
/// are merely outside the low-noise regime (w >= 1/N, only possible when
/// kappa = 1) set `regime_warning` instead.
pub fn lower_bound_family(
    m: usize,
    n: usize,
    kappa: f64,
    sigma: &[f64],
) -> Result<(LowerBoundParams, FiniteDistribution)> {
    if m < 2 {
        return Err(Error::Domain(format!("dictionary size must be at least 2, got {m}")));
    }
    if n == 0 || (m as f64).ln() > n as f64 {
        return Err(Error::Domain(format!(
            "the family requires log m <= n, got m = {m}, n = {n}"
        )));
    }
    if !kappa.is_finite() || kappa < 1.0 {
        return Err(Error::Domain(format!("margin parameter must be >= 1, got {kappa}")));
    }
    let support_size = (m as f64).log2().ceil() as usize;
    if sigma.len() + 1 != support_size {
        return Err(Error::DimensionMismatch { expected: support_size - 1, got: sigma.len() });
    }
    if sigma.iter().any(|s| *s != 1.0 && *s != -1.0) {
        return Err(Error::Domain("sigma entries must be -1 or +1".into()));
    }

    let h = if kappa == 1.0 {
        0.5
    } else {
        (support_size as f64 / n as f64).powf((kappa - 1.0) / (2.0 * kappa - 1.0))
    };
    if h >= 1.0 {
        return Err(Error::Domain(format!(
            "margin gap h = {h} >= 1; the family needs n > N = {support_size}"
        )));
    }
    let w = 1.0 / (n as f64 * h * h);
    let heavy_mass = 1.0 - (support_size as f64 - 1.0) * w;
    if heavy_mass <= 0.0 {
        return Err(Error::Domain(format!(
            "small atoms exhaust all mass (w = {w}, N = {support_size}); increase n"
        )));
    }

    // For kappa > 1 the membership condition (N-1) w <= h^(1/(kappa-1))
    // reduces to (N-1)/n <= N/n and always holds; only w < 1/N can fail,
    // and for kappa > 1 that would force h >= 1, caught above.
    let regime_warning = w >= 1.0 / support_size as f64
        || (kappa > 1.0
            && (support_size as f64 - 1.0) * w > h.powf(1.0 / (kappa - 1.0)) + 1e-12);

    let mut atoms = Vec::with_capacity(support_size);
    for (j, s) in sigma.iter().enumerate() {
        atoms.push(Atom {
            x: vec![(j + 1) as f64 / support_size as f64],
            p: w,
            eta: (1.0 + s * h) / 2.0,
        });
    }
    atoms.push(Atom { x: vec![1.0], p: heavy_mass, eta: 1.0 });

    let params = LowerBoundParams {
        support_size,
        w,
        h,
        kappa,
        sigma: sigma.to_vec(),
        regime_warning,
    };
    Ok((params, FiniteDistribution::new(1, atoms)?))
}

/// Either concrete distribution behind one handle, so that samplers and
/// exact-risk consumers (experiments, the CLI) need not care which family
/// they were given.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Finite(FiniteDistribution),
    Holder(holder::HolderDistribution),
}

impl Distribution {
    pub fn dim(&self) -> usize {
        match self {
            Distribution::Finite(d) => d.dim(),
            Distribution::Holder(d) => d.dim(),
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        match self {
            Distribution::Finite(d) => d.sample(n, seed),
            Distribution::Holder(d) => d.sample(n, seed),
        }
    }

    pub fn exact_risks(&self, f: &ScoreFunction) -> Result<RiskReport> {
        match self {
            Distribution::Finite(d) => d.exact_risks(f),
            Distribution::Holder(d) => d.exact_risks(f),
        }
    }

    pub fn bayes_risk(&self) -> f64 {
        match self {
            Distribution::Finite(d) => d.bayes_risk(),
            Distribution::Holder(d) => d.bayes_risk(),
        }
    }

    pub fn bayes_rule(&self) -> PredictionRule {
        match self {
            Distribution::Finite(d) => d.bayes_rule(),
            Distribution::Holder(d) => d.bayes_rule(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_atom(eta: f64) -> FiniteDistribution {
        FiniteDistribution::new(1, vec![Atom { x: vec![0.0], p: 1.0, eta }]).unwrap()
    }

    fn two_atoms() -> FiniteDistribution {
        FiniteDistribution::new(
            1,
            vec![
                Atom { x: vec![0.0], p: 0.5, eta: 0.9 },
                Atom { x: vec![1.0], p: 0.5, eta: 0.3 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        let ok = Atom { x: vec![0.0], p: 1.0, eta: 0.5 };
        assert!(FiniteDistribution::new(0, vec![ok.clone()]).is_err());
        assert!(FiniteDistribution::new(1, vec![]).is_err());
        assert!(FiniteDistribution::new(2, vec![ok.clone()]).is_err());
        assert!(FiniteDistribution::new(
            1,
            vec![Atom { x: vec![0.0], p: 0.5, eta: 0.5 }, Atom { x: vec![1.0], p: 0.6, eta: 0.5 }]
        )
        .is_err());
        assert!(FiniteDistribution::new(1, vec![Atom { eta: 1.5, ..ok.clone() }]).is_err());
        assert!(FiniteDistribution::new(1, vec![Atom { p: 0.0, ..ok.clone() }]).is_err());
        assert!(FiniteDistribution::new(1, vec![Atom { p: -1.0, ..ok.clone() }]).is_err());
        assert!(FiniteDistribution::new(1, vec![Atom { x: vec![f64::NAN], ..ok.clone() }]).is_err());
        // duplicate support points
        assert!(FiniteDistribution::new(
            1,
            vec![
                Atom { x: vec![0.0], p: 0.5, eta: 0.2 },
                Atom { x: vec![0.0], p: 0.5, eta: 0.8 },
            ]
        )
        .is_err());
    }

    #[test]
    fn single_atom_risks_constant_plus() {
        let pi = single_atom(0.8);
        let rep = pi.exact_risks(&ScoreFunction::constant(1.0)).unwrap();
        assert!((rep.r - 0.2).abs() <= 1e-15);
        assert!((rep.r_star - 0.2).abs() <= 1e-15);
        assert!(rep.excess_r.abs() <= 1e-15);
        assert!((rep.a - 0.4).abs() <= 1e-15);
        assert!((rep.a_star - 0.4).abs() <= 1e-15);
    }

    #[test]
    fn single_atom_risks_constant_minus() {
        let pi = single_atom(0.8);
        let rep = pi.exact_risks(&ScoreFunction::constant(-1.0)).unwrap();
        assert!((rep.r - 0.8).abs() <= 1e-15);
        assert!((rep.excess_r - 0.6).abs() <= 1e-15);
        assert!((rep.a - 1.6).abs() <= 1e-15);
        assert!((rep.excess_a - 1.2).abs() <= 1e-15);
        assert!(rep.excess_r <= rep.excess_a + 1e-12);
    }

    #[test]
    fn two_atom_risks_constant_plus() {
        let rep = two_atoms().exact_risks(&ScoreFunction::constant(1.0)).unwrap();
        assert!((rep.r - 0.4).abs() <= 1e-15);
        assert!((rep.r_star - 0.2).abs() <= 1e-15);
        assert!((rep.a_star - 0.4).abs() <= 1e-15);
        assert!((rep.a - 0.8).abs() <= 1e-12);
        assert!(rep.excess_r <= rep.excess_a + 1e-12);
    }

    #[test]
    fn bayes_rule_attains_bayes_risk() {
        let pi = two_atoms();
        let rule = pi.bayes_rule();
        assert_eq!(rule.eval(&[0.0]), 1.0);
        assert_eq!(rule.eval(&[1.0]), -1.0);
        let rep = pi.exact_risks(&rule.as_score_function()).unwrap();
        assert!(rep.excess_r.abs() <= 1e-15);
        // eta = 1/2 tie goes to +1
        assert_eq!(single_atom(0.5).bayes_rule().eval(&[0.0]), 1.0);
    }

    #[test]
    fn sampling_degenerate_labels() {
        let data = single_atom(1.0).sample(200, 7).unwrap();
        assert!(data.examples().iter().all(|e| e.y == Label::Plus));
        let data = single_atom(0.0).sample(200, 7).unwrap();
        assert!(data.examples().iter().all(|e| e.y == Label::Minus));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let pi = two_atoms();
        let a = pi.sample(100, 42).unwrap();
        let b = pi.sample(100, 42).unwrap();
        let c = pi.sample(100, 43).unwrap();
        assert_eq!(a.examples(), b.examples());
        assert_ne!(a.examples(), c.examples());
        assert!(pi.sample(0, 1).is_err());
    }

    #[test]
    fn sampling_atom_frequencies() {
        let pi = two_atoms();
        let n = 100_000;
        let data = pi.sample(n, 2024).unwrap();
        let at_zero =
            data.examples().iter().filter(|e| e.x[0] == 0.0).count() as f64 / n as f64;
        assert!((at_zero - 0.5).abs() < 0.01, "frequency {at_zero} too far from 0.5");
    }

    #[test]
    fn margin_constant_single_atom_closed_forms() {
        let pi = single_atom(0.8);
        let c1 = pi.margin_c0(1.0).unwrap().c0().unwrap();
        assert!((c1 - 10.0 / 3.0).abs() <= 1e-12);
        let c2 = pi.margin_c0(2.0).unwrap().c0().unwrap();
        assert!((c2 - 2.581_988_897_471_611).abs() <= 1e-12);
        assert!((c2 - 2.0 / 0.6_f64.sqrt()).abs() <= 1e-15);
        let c3 = pi.margin_c0(3.0).unwrap().c0().unwrap();
        assert!((c3 - 2.371_262_202_993_375).abs() <= 1e-12);
    }

    #[test]
    fn margin_constant_infeasible_at_even_odds() {
        let pi = FiniteDistribution::new(
            1,
            vec![
                Atom { x: vec![0.0], p: 0.5, eta: 0.5 },
                Atom { x: vec![1.0], p: 0.5, eta: 0.9 },
            ],
        )
        .unwrap();
        assert!(!pi.margin_c0(2.0).unwrap().is_feasible());
        assert!(pi.margin_c0(0.5).is_err());
    }

    #[test]
    fn margin_constant_capacity_limit() {
        let atoms: Vec<Atom> = (0..17)
            .map(|i| Atom { x: vec![i as f64], p: 1.0 / 17.0, eta: 0.9 })
            .collect();
        let pi = FiniteDistribution::new(1, atoms).unwrap();
        assert!(matches!(pi.margin_c0(1.0), Err(Error::Capacity(_))));
    }

    #[test]
    fn margin_constant_is_tight() {
        // The certified constant must be attained: some rule has
        // disagreement exactly c0 * excess^(1/kappa).
        let pi = two_atoms();
        let kappa = 2.0;
        let c0 = pi.margin_c0(kappa).unwrap().c0().unwrap();
        let patterns: [[f64; 2]; 3] = [[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]];
        let f_star = pi.bayes_rule();
        let mut attained = false;
        for values in patterns {
            let rule = pi.tabulated_rule(&values).unwrap();
            let rep = pi.exact_risks(&rule.as_score_function()).unwrap();
            let disagreement: f64 = pi
                .atoms()
                .iter()
                .map(|a| a.p * (rule.eval(&a.x) - f_star.eval(&a.x)).abs())
                .sum();
            assert!(disagreement <= c0 * rep.excess_r.powf(1.0 / kappa) + 1e-12);
            if (disagreement - c0 * rep.excess_r.powf(1.0 / kappa)).abs() <= 1e-12 {
                attained = true;
            }
        }
        assert!(attained);
    }

    #[test]
    fn noise_exponent_basic_cases() {
        // All mass at full margin: nothing below t = 1, true even for c = 0.
        assert!(single_atom(1.0).noise_exponent_check(2.0, 0.0).unwrap());
        // Mass at zero margin violates any polynomial bound.
        assert!(!single_atom(0.5).noise_exponent_check(1.5, 0.9).unwrap());
        assert!(!single_atom(0.5).noise_exponent_check(1.5, 5.0).unwrap());
        // kappa must exceed 1.
        assert!(single_atom(0.8).noise_exponent_check(1.0, 1.0).is_err());
    }

    #[test]
    fn family_kappa_two_frozen_values() {
        let (params, pi) = lower_bound_family(8, 100, 2.0, &[1.0, -1.0]).unwrap();
        assert_eq!(params.support_size, 3);
        assert!((params.h - 0.310_723_250_595_385_9).abs() <= 1e-15);
        assert!((params.w - 0.103_574_416_865_128_6).abs() <= 1e-15);
        assert!(!params.regime_warning);
        assert_eq!(pi.support_size(), 3);
        let last = &pi.atoms()[2];
        assert_eq!(last.eta, 1.0);
        assert!((last.p - 0.792_851_166_269_742_8).abs() <= 1e-15);
        assert!((pi.atoms()[0].eta - (1.0 + params.h) / 2.0).abs() <= 1e-15);
        assert!((pi.atoms()[1].eta - (1.0 - params.h) / 2.0).abs() <= 1e-15);
        assert!(pi.noise_exponent_check(2.0, 1.0).unwrap());
    }

    #[test]
    fn family_kappa_one_uses_half_gap() {
        let (params, pi) = lower_bound_family(8, 100, 1.0, &[1.0, 1.0]).unwrap();
        assert_eq!(params.support_size, 3);
        assert_eq!(params.h, 0.5);
        assert!((params.w - 0.04).abs() <= 1e-15);
        assert!(!params.regime_warning);
        // sigma all +1: Bayes rule is +1 on the small atoms.
        let rule = pi.bayes_rule();
        assert_eq!(rule.eval(&[1.0 / 3.0]), 1.0);
        assert_eq!(rule.eval(&[2.0 / 3.0]), 1.0);
    }

    #[test]
    fn family_rejects_invalid_parameters() {
        assert!(lower_bound_family(1, 100, 2.0, &[]).is_err());
        // log m > n
        assert!(lower_bound_family(8, 2, 2.0, &[1.0, 1.0]).is_err());
        // wrong sigma length
        assert!(lower_bound_family(8, 100, 2.0, &[1.0]).is_err());
        // sigma entries outside {-1, +1}
        assert!(lower_bound_family(8, 100, 2.0, &[0.5, 1.0]).is_err());
        // n = N forces h = 1
        assert!(lower_bound_family(8, 3, 2.0, &[1.0, 1.0]).is_err());
        // kappa = 1, n = 8: w = 1/2 and the two small atoms exhaust all mass
        assert!(lower_bound_family(8, 8, 1.0, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn family_flags_out_of_regime_parameters() {
        // kappa = 1, n = 10: w = 0.4 >= 1/3, valid distribution but outside
        // the low-noise regime.
        let (params, pi) = lower_bound_family(8, 10, 1.0, &[1.0, -1.0]).unwrap();
        assert!(params.regime_warning);
        assert_eq!(pi.support_size(), 3);
    }

    #[test]
    fn family_log2_boundary_sizes() {
        // Powers of two and their neighbors must not gain or lose an atom
        // to floating-point log rounding.
        for (m, expect) in [(2usize, 1usize), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (64, 6)] {
            let sigma = vec![1.0; expect - 1];
            let (params, _) = lower_bound_family(m, 1000, 2.0, &sigma).unwrap();
            assert_eq!(params.support_size, expect, "m = {m}");
        }
    }

    #[test]
    fn tabulated_rules_cover_support() {
        let pi = two_atoms();
        let rule = pi.tabulated_rule(&[-1.0, 1.0]).unwrap();
        assert_eq!(rule.eval(&[0.0]), -1.0);
        assert_eq!(rule.eval(&[1.0]), 1.0);
        assert_eq!(rule.eval(&[0.25]), 1.0); // off support
        assert!(pi.tabulated_rule(&[1.0]).is_err());
        assert!(pi.tabulated_rule(&[1.0, 0.0]).is_err());
    }
}
