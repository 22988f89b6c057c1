//! Rough inclusions: graded containment relations and their maximal
//! degrees `rs*(x, y)`.
//!
//! Every inclusion here reports the maximal degree; the relation
//! `rsubst(x, y, r)` is recovered as `rs*(x, y) ≥ r` (see [`holds`]).

use num_rational::Ratio;
use thiserror::Error;

use crate::dataset::{dis_count, InformationSystem};
use crate::mereology::{Entity, MaybeEntity, MereologyError, WeightFn};
use crate::DEGREE_TOL;

#[derive(Debug, Error, PartialEq)]
pub enum InclusionError {
    #[error("rough inclusion of the empty entity is undefined")]
    EmptyFirstArgument,
    #[error(transparent)]
    Mereology(#[from] MereologyError),
    #[error("degree {0} is zero or outside (0, 1]; the composition bound diverges")]
    DegreeUnderflow(f64),
    #[error("feature weights must be positive and finite")]
    InvalidFeatureWeight,
    #[error("expected {expected} feature weights, got {found}")]
    WeightArity { expected: usize, found: usize },
}

pub type Result<T, E = InclusionError> = std::result::Result<T, E>;

/// `rsubst(x, y, r)` from a maximal degree, with the crate tolerance.
pub fn holds(degree: f64, r: f64) -> bool {
    degree >= r - DEGREE_TOL
}

/// Anything that can grade the containment of one `T` in another.
pub trait RoughInclusion<T: ?Sized> {
    fn degree(&self, x: &T, y: &T) -> f64;

    fn holds(&self, x: &T, y: &T, r: f64) -> bool {
        holds(self.degree(x, y), r)
    }
}

// ---------------------------------------------------------------------------
// weight ratio

/// `rs*_w(x, y) = w(x·y) / w(x)`.
pub fn rs_star_weight(x: MaybeEntity, y: &Entity, w: &WeightFn) -> Result<f64> {
    let x = x.entity().ok_or(InclusionError::EmptyFirstArgument)?;
    let prod = x.product(y)?;
    Ok(w.weight(prod) / w.weight(x))
}

/// Weight-ratio inclusion on entities of one carrier.
#[derive(Debug, Clone)]
pub struct WeightRatio<'a>(pub &'a WeightFn);

impl RoughInclusion<Entity> for WeightRatio<'_> {
    fn degree(&self, x: &Entity, y: &Entity) -> f64 {
        rs_star_weight((*x).into(), y, self.0).expect("entities are nonempty")
    }
}

// ---------------------------------------------------------------------------
// t-norms on the unit interval

/// Łukasiewicz t-norm `max(0, a + b − 1)`.
pub fn t_lukasiewicz(a: f64, b: f64) -> f64 {
    (a + b - 1.0).max(0.0)
}

/// Łukasiewicz residuum `min(1, 1 − a + b)`.
pub fn residuum_lukasiewicz(a: f64, b: f64) -> f64 {
    (1.0 - a + b).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TNorm {
    Lukasiewicz,
    Product,
    Minimum,
}

impl TNorm {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            TNorm::Lukasiewicz => t_lukasiewicz(a, b),
            TNorm::Product => a * b,
            TNorm::Minimum => a.min(b),
        }
    }

    /// `a ⇒ b = sup{c : T(a, c) ≤ b}`.
    pub fn residuum(self, a: f64, b: f64) -> f64 {
        if a <= b {
            return 1.0;
        }
        match self {
            TNorm::Lukasiewicz => residuum_lukasiewicz(a, b),
            TNorm::Product => b / a,
            TNorm::Minimum => b,
        }
    }
}

/// Unit-interval rough subset induced by a residuum.
pub fn rs_star_residual(a: f64, b: f64, tnorm: TNorm) -> f64 {
    tnorm.residuum(a, b)
}

/// Additive generator pair of an Archimedean t-norm,
/// `T(x, y) = h(g(x) + g(y))`.
pub trait ArchimedeanGenerator {
    fn h(&self, t: f64) -> f64;
    fn g(&self, t: f64) -> f64;

    fn tnorm(&self, a: f64, b: f64) -> f64 {
        self.h(self.g(a) + self.g(b))
    }
}

/// `h(t) = max(0, 1 − t)`, `g(t) = 1 − t`, generating the Łukasiewicz t-norm.
#[derive(Debug, Clone, Copy, Default)]
pub struct LukasiewiczGenerator;

impl ArchimedeanGenerator for LukasiewiczGenerator {
    fn h(&self, t: f64) -> f64 {
        (1.0 - t).max(0.0)
    }

    fn g(&self, t: f64) -> f64 {
        1.0 - t
    }
}

/// `h(|a − b|)`.
pub fn rs_star_archimedean<G: ArchimedeanGenerator + ?Sized>(a: f64, b: f64, gen: &G) -> f64 {
    gen.h((a - b).abs())
}

// ---------------------------------------------------------------------------
// information-system inclusions

/// Łukasiewicz inclusion on objects: `h(|Dis(x,y)| / |F|)` with `h(t) = 1 − t`.
pub fn rs_star_is(x: usize, y: usize, system: &InformationSystem) -> f64 {
    is_degree(system.row(x), system.row(y))
}

/// Exact rational form of [`rs_star_is`].
pub fn rs_star_is_exact(x: usize, y: usize, system: &InformationSystem) -> Ratio<usize> {
    let f = system.n_features().max(1);
    Ratio::from_integer(1) - Ratio::new(system.dis_count(x, y), f)
}

/// Łukasiewicz inclusion on two aligned rows.
pub fn is_degree<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    LukasiewiczGenerator.h(dis_count(a, b) as f64 / a.len() as f64)
}

/// Positive per-feature weights for the exponential inclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeights(Vec<f64>);

impl FeatureWeights {
    /// `1/|F|` for every feature.
    pub fn uniform(n_features: usize) -> Self {
        FeatureWeights(vec![1.0 / n_features.max(1) as f64; n_features])
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(InclusionError::InvalidFeatureWeight);
        }
        Ok(FeatureWeights(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation for a fused feature set `F_b ⊔ F_c ⊔ …`, rescaled by
    /// `|F_part| / |F_total|` so that the fused discernibility mass is the
    /// size-weighted mean of the parts' masses.
    pub fn fused(parts: &[&FeatureWeights]) -> Self {
        let total: usize = parts.iter().map(|p| p.len()).sum();
        let mut out = Vec::with_capacity(total);
        for p in parts {
            let scale = p.len() as f64 / total as f64;
            out.extend(p.0.iter().map(|w| w * scale));
        }
        FeatureWeights(out)
    }
}

/// `exp(−(Σ_{f ∈ Dis(x,y)} w_f)²)` on two aligned rows.
pub fn exp_degree<T: PartialEq>(a: &[T], b: &[T], weights: &FeatureWeights) -> f64 {
    let mass: f64 = a
        .iter()
        .zip(b)
        .zip(&weights.0)
        .filter(|((x, y), _)| x != y)
        .map(|(_, w)| w)
        .sum();
    (-(mass * mass)).exp()
}

/// Exponential inclusion on objects of a system.
pub fn rs_star_exp(x: usize, y: usize, system: &InformationSystem, weights: &FeatureWeights) -> f64 {
    exp_degree(system.row(x), system.row(y), weights)
}

/// Composition bound: `rs*(x,y) ≥ r ∧ rs*(y,z) ≥ s ⊃ rs*(x,z) ≥ α(r,s)`
/// for the exponential inclusion, with
/// `α(r, s) = r·s·exp(−2·√(ln r · ln s))`, i.e.
/// `exp(−(√(−ln r) + √(−ln s))²)`.
pub fn exp_compose(r: f64, s: f64) -> Result<f64> {
    for v in [r, s] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(InclusionError::DegreeUnderflow(v));
        }
    }
    let (lr, ls) = (r.ln(), s.ln());
    Ok(r * s * (-2.0 * (lr * ls).sqrt()).exp())
}

/// Object-level inclusions used by granulation and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectInclusion {
    Lukasiewicz,
    Exponential(FeatureWeights),
}

impl ObjectInclusion {
    /// Exponential inclusion with uniform weights over `n_features`.
    pub fn exponential_uniform(n_features: usize) -> Self {
        ObjectInclusion::Exponential(FeatureWeights::uniform(n_features))
    }

    pub fn rows<T: PartialEq>(&self, a: &[T], b: &[T]) -> f64 {
        match self {
            ObjectInclusion::Lukasiewicz => is_degree(a, b),
            ObjectInclusion::Exponential(w) => exp_degree(a, b, w),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectInclusion::Lukasiewicz => "lukasiewicz",
            ObjectInclusion::Exponential(_) => "exp",
        }
    }
}

/// An [`ObjectInclusion`] bound to a system.
#[derive(Debug, Clone, Copy)]
pub struct OnSystem<'a> {
    pub system: &'a InformationSystem,
    pub kind: &'a ObjectInclusion,
}

impl RoughInclusion<usize> for OnSystem<'_> {
    fn degree(&self, x: &usize, y: &usize) -> f64 {
        self.kind.rows(self.system.row(*x), self.system.row(*y))
    }
}

/// Symmetrization `θ(x, y) = min(rs*(x, y), rs*(y, x))`.
pub fn fuzzy_similarity<T: ?Sized, I: RoughInclusion<T> + ?Sized>(x: &T, y: &T, inclusion: &I) -> f64 {
    inclusion.degree(x, y).min(inclusion.degree(y, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mereology::Carrier;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn weight_ratio_examples() {
        let c = Carrier::new(&["a", "b", "c", "d"]).unwrap();
        let w = WeightFn::uniform(&c);
        let ab = c.entity(&["a", "b"]).unwrap();
        let bc = c.entity(&["b", "c"]).unwrap();
        let abc = c.entity(&["a", "b", "c"]).unwrap();
        let d = c.entity(&["d"]).unwrap();
        assert!(close(rs_star_weight(ab.into(), &abc, &w).unwrap(), 1.0));
        assert!(close(rs_star_weight(ab.into(), &d, &w).unwrap(), 0.0));
        assert!(close(rs_star_weight(ab.into(), &bc, &w).unwrap(), 0.5));
        assert_eq!(
            rs_star_weight(MaybeEntity::Empty, &d, &w),
            Err(InclusionError::EmptyFirstArgument)
        );
    }

    #[test]
    fn lukasiewicz_examples() {
        for x in [0.0, 0.3, 1.0] {
            assert!(close(t_lukasiewicz(1.0, x), x));
        }
        assert!(close(t_lukasiewicz(0.7, 0.5), 0.2));
        assert!(close(residuum_lukasiewicz(0.7, 0.5), 0.8));
        assert!(close(residuum_lukasiewicz(0.4, 0.5), 1.0));
    }

    #[test]
    fn residual_examples() {
        assert_eq!(rs_star_residual(0.3, 0.9, TNorm::Lukasiewicz), 1.0);
        assert!(close(rs_star_residual(0.9, 0.3, TNorm::Lukasiewicz), 0.4));
        assert_eq!(rs_star_residual(1.0, 0.0, TNorm::Lukasiewicz), 0.0);
        assert!(close(rs_star_residual(0.8, 0.4, TNorm::Product), 0.5));
        assert_eq!(rs_star_residual(0.8, 0.4, TNorm::Minimum), 0.4);
    }

    #[test]
    fn archimedean_examples() {
        let g = LukasiewiczGenerator;
        assert_eq!(rs_star_archimedean(0.4, 0.4, &g), 1.0);
        assert!(close(rs_star_archimedean(0.2, 0.9, &g), 0.3));
        assert_eq!(rs_star_archimedean(0.0, 1.0, &g), 0.0);
        // the generator pair reproduces the Łukasiewicz t-norm
        for a in [0.0, 0.25, 0.6, 1.0] {
            for b in [0.0, 0.5, 0.9, 1.0] {
                assert!(close(g.tnorm(a, b), t_lukasiewicz(a, b)));
            }
        }
    }

    fn toy() -> InformationSystem {
        InformationSystem::from_rows(
            &["a", "b", "c"],
            &[&["1", "0", "1"], &["1", "1", "1"], &["0", "1", "0"], &["1", "0", "1"]],
        )
        .unwrap()
    }

    #[test]
    fn information_system_inclusion() {
        let s = toy();
        assert_eq!(rs_star_is(0, 3, &s), 1.0);
        assert!(close(rs_star_is(0, 1, &s), 2.0 / 3.0));
        assert_eq!(rs_star_is_exact(0, 1, &s), Ratio::new(2, 3));
        assert_eq!(rs_star_is_exact(0, 2, &s), Ratio::new(0, 1));
    }

    #[test]
    fn exponential_inclusion() {
        let s = toy();
        let w = FeatureWeights::uniform(3);
        assert_eq!(rs_star_exp(0, 3, &s, &w), 1.0);
        // exp(-1/9) and exp(-1)
        assert!((rs_star_exp(0, 1, &s, &w) - 0.894_839_316_814_370_5).abs() < 1e-6);
        assert!((rs_star_exp(0, 2, &s, &w) - 0.367_879_441_171_442_3).abs() < 1e-6);
        assert_eq!(rs_star_exp(0, 1, &s, &w), rs_star_exp(1, 0, &s, &w));
        assert_eq!(
            FeatureWeights::new(vec![0.5, 0.0]),
            Err(InclusionError::InvalidFeatureWeight)
        );
    }

    #[test]
    fn composition_bound() {
        for s in [0.1, 0.5, 1.0] {
            assert!(close(exp_compose(1.0, s).unwrap(), s));
        }
        let e1 = (-1.0f64).exp();
        assert!((exp_compose(e1, e1).unwrap() - 0.018_315_638_888_734_18).abs() < 1e-9);
        assert!(matches!(exp_compose(0.0, 0.5), Err(InclusionError::DegreeUnderflow(_))));
        assert!(matches!(exp_compose(0.5, 1.5), Err(InclusionError::DegreeUnderflow(_))));
        let (r, s) = (0.7, 0.4);
        assert!(close(exp_compose(r, s).unwrap(), exp_compose(s, r).unwrap()));
        assert!(exp_compose(r, s).unwrap() <= r.min(s));
    }

    #[test]
    fn fused_weights_average() {
        let b = FeatureWeights::uniform(2);
        let c = FeatureWeights::uniform(3);
        let a = FeatureWeights::fused(&[&b, &c]);
        for w in a.as_slice() {
            assert!(close(*w, 0.2));
        }
    }

    #[test]
    fn similarity_examples() {
        let c = Carrier::new(&["a", "b", "c", "d"]).unwrap();
        let w = WeightFn::uniform(&c);
        let inc = WeightRatio(&w);
        let ab = c.entity(&["a", "b"]).unwrap();
        let b = c.entity(&["b"]).unwrap();
        assert_eq!(fuzzy_similarity(&ab, &ab, &inc), 1.0);
        assert!(close(fuzzy_similarity(&ab, &b, &inc), 0.5));

        let s = toy();
        let kind = ObjectInclusion::Lukasiewicz;
        let on = OnSystem {
            system: &s,
            kind: &kind,
        };
        assert_eq!(fuzzy_similarity(&0, &1, &on), on.degree(&0, &1));
    }
}
