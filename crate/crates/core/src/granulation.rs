//! Granules, irreducible coverings, granular reflections and the
//! cross-validated granular decider.
//!
//! Pipeline for one radius `r`:
//! 1. compute `g(x, r)` for every training object `x`;
//! 2. pick an irreducible sub-covering of the training universe;
//! 3. mirror every feature (and the decision) onto the covering granules
//!    by majority vote;
//! 4. classify test objects by the nearest mirrored row.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{dis_count, DecisionSystem, InformationSystem};
use crate::inclusion::{holds, ObjectInclusion};
use crate::objset::ObjectSet;

#[derive(Debug, Error, PartialEq)]
pub enum GranulationError {
    #[error("need at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("fold {fold} leaves an empty {part} part ({objects} objects, {folds} folds)")]
    FoldError {
        fold: usize,
        part: &'static str,
        objects: usize,
        folds: usize,
    },
    #[error("radius {0} is outside [0, 1]")]
    InvalidRadius(f64),
    #[error("test row has {found} values, reflection has {expected} features")]
    RowArity { expected: usize, found: usize },
}

pub type Result<T, E = GranulationError> = std::result::Result<T, E>;

/// `g(center, radius) = {y : rs*(y, center) ≥ radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Granule {
    pub center: usize,
    pub radius: f64,
    pub members: ObjectSet,
}

impl Granule {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn granule(center: usize, radius: f64, inclusion: &ObjectInclusion, system: &InformationSystem) -> Granule {
    let c = system.row(center);
    let members = ObjectSet::from_indices(
        system.n_objects(),
        (0..system.n_objects()).filter(|&y| holds(inclusion.rows(system.row(y), c), radius)),
    );
    Granule {
        center,
        radius,
        members,
    }
}

/// Radii `{1/|F|, 2/|F|, …, 1}`.
pub fn radius_grid(n_features: usize) -> Vec<f64> {
    let n = n_features.max(1);
    (1..=n).map(|k| k as f64 / n as f64).collect()
}

/// One granule per object, in object order.
pub fn all_granules(radius: f64, inclusion: &ObjectInclusion, system: &InformationSystem) -> Vec<Granule> {
    DegreeMatrix::new(inclusion, system).granules(radius)
}

/// Pairwise inclusion degrees `rs*(y, x)` over one system.
#[derive(Debug, Clone)]
pub struct DegreeMatrix {
    n: usize,
    degrees: Vec<f64>,
}

impl DegreeMatrix {
    pub fn new(inclusion: &ObjectInclusion, system: &InformationSystem) -> Self {
        let n = system.n_objects();
        let row_degrees =
            |x: usize| -> Vec<f64> { (0..n).map(|y| inclusion.rows(system.row(y), system.row(x))).collect() };
        #[cfg(feature = "parallel")]
        let rows: Vec<Vec<f64>> = {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(row_degrees).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let rows: Vec<Vec<f64>> = (0..n).map(row_degrees).collect();
        DegreeMatrix {
            n,
            degrees: rows.concat(),
        }
    }

    /// `rs*(y, x)`.
    pub fn degree(&self, y: usize, x: usize) -> f64 {
        self.degrees[x * self.n + y]
    }

    pub fn granule(&self, center: usize, radius: f64) -> Granule {
        let row = &self.degrees[center * self.n..(center + 1) * self.n];
        Granule {
            center,
            radius,
            members: ObjectSet::from_indices(
                self.n,
                row.iter()
                    .enumerate()
                    .filter(|(_, &d)| holds(d, radius))
                    .map(|(y, _)| y),
            ),
        }
    }

    pub fn granules(&self, radius: f64) -> Vec<Granule> {
        (0..self.n).map(|x| self.granule(x, radius)).collect()
    }
}

/// A set of granules whose union is the universe.
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    pub granules: Vec<Granule>,
    pub universe: usize,
}

impl Covering {
    pub fn union(&self) -> ObjectSet {
        let mut u = ObjectSet::empty(self.universe);
        for g in &self.granules {
            u.union_with(&g.members);
        }
        u
    }

    pub fn covers(&self) -> bool {
        self.union().len() == self.universe
    }

    /// No granule can be dropped without uncovering some object.
    pub fn is_irreducible(&self) -> bool {
        (0..self.granules.len()).all(|skip| {
            let mut u = ObjectSet::empty(self.universe);
            for (i, g) in self.granules.iter().enumerate() {
                if i != skip {
                    u.union_with(&g.members);
                }
            }
            u.len() < self.universe
        })
    }

    pub fn len(&self) -> usize {
        self.granules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.granules.is_empty()
    }
}

/// Greedy irreducible covering.
///
/// Candidates are scanned by descending size (ties: lower center) and
/// kept when they cover something new; a reverse pass then drops every
/// kept granule whose members are all covered by the others.
pub fn irreducible_covering(granules: &[Granule], universe: usize) -> Covering {
    let mut order: Vec<usize> = (0..granules.len()).collect();
    order.sort_by(|&a, &b| {
        granules[b]
            .len()
            .cmp(&granules[a].len())
            .then(granules[a].center.cmp(&granules[b].center))
    });

    let mut covered = ObjectSet::empty(universe);
    let mut chosen: Vec<usize> = Vec::new();
    for i in order {
        if covered.len() == universe {
            break;
        }
        if !granules[i].members.is_subset(&covered) {
            covered.union_with(&granules[i].members);
            chosen.push(i);
        }
    }

    // multiplicity of coverage per object
    let mut count = vec![0u32; universe];
    for &i in &chosen {
        for o in granules[i].members.iter() {
            count[o] += 1;
        }
    }
    let mut keep = vec![true; chosen.len()];
    for k in (0..chosen.len()).rev() {
        let g = &granules[chosen[k]].members;
        if g.iter().all(|o| count[o] > 1) {
            keep[k] = false;
            for o in g.iter() {
                count[o] -= 1;
            }
        }
    }
    Covering {
        granules: chosen
            .iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(&i, _)| granules[i].clone())
            .collect(),
        universe,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Voting {
    /// Most frequent value; ties go to the smallest value token.
    #[default]
    Majority,
}

/// Compressed decision table: one mirrored row per covering granule.
#[derive(Debug, Clone)]
pub struct GranularReflection {
    pub covering: Covering,
    /// Mirrored conditional codes, one row per granule.
    pub rows: Vec<Vec<u32>>,
    /// Mirrored decision codes.
    pub decisions: Vec<u32>,
    pub strategy: Voting,
}

fn majority<'a>(codes: impl Iterator<Item = u32>, token: impl Fn(u32) -> &'a str) -> u32 {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for c in codes {
        *counts.entry(c).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|(ca, na), (cb, nb)| na.cmp(nb).then_with(|| token(*cb).cmp(token(*ca))))
        .map(|(c, _)| c)
        .expect("granules are nonempty")
}

pub fn granular_mirror(covering: &Covering, system: &DecisionSystem, strategy: Voting) -> GranularReflection {
    let base = system.base();
    let mut rows = Vec::with_capacity(covering.len());
    let mut decisions = Vec::with_capacity(covering.len());
    for g in &covering.granules {
        let row = (0..base.n_features())
            .map(|f| majority(g.members.iter().map(|o| base.code(o, f)), |c| base.token(f, c)))
            .collect();
        rows.push(row);
        decisions.push(majority(g.members.iter().map(|o| system.decision(o)), |c| {
            system.decision_token(c)
        }));
    }
    GranularReflection {
        covering: covering.clone(),
        rows,
        decisions,
        strategy,
    }
}

impl GranularReflection {
    /// Decision of the mirrored row agreeing with `row` on the most
    /// features. Among tied rows the majority decision wins; remaining
    /// ties go to the decision of the lowest granule index.
    pub fn classify(&self, row: &[u32]) -> Result<u32> {
        let n_features = self.rows.first().map_or(row.len(), Vec::len);
        if row.len() != n_features {
            return Err(GranulationError::RowArity {
                expected: n_features,
                found: row.len(),
            });
        }
        let best = self.rows.iter().map(|r| dis_count(r, row)).min().unwrap_or(0);
        let tied: Vec<usize> = (0..self.rows.len())
            .filter(|&i| dis_count(&self.rows[i], row) == best)
            .collect();
        // (count, first granule index) per decision
        let mut votes: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
        for &i in &tied {
            let e = votes.entry(self.decisions[i]).or_insert((0, i));
            e.0 += 1;
        }
        let decision = votes
            .into_iter()
            .max_by(|(_, (na, ia)), (_, (nb, ib))| na.cmp(nb).then(ib.cmp(ia)))
            .map(|(d, _)| d)
            .expect("reflection has at least one row");
        Ok(decision)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// CSV dump: granule center, size, mirrored features and decision.
    pub fn to_csv(&self, system: &DecisionSystem) -> String {
        let base = system.base();
        let mut out = String::from("center,size");
        for f in base.features() {
            out.push(',');
            out.push_str(f);
        }
        out.push(',');
        out.push_str(system.decision_name());
        out.push('\n');
        for (i, g) in self.covering.granules.iter().enumerate() {
            out.push_str(&format!("{},{}", g.center, g.len()));
            for (f, &c) in self.rows[i].iter().enumerate() {
                out.push(',');
                out.push_str(base.token(f, c));
            }
            out.push(',');
            out.push_str(system.decision_token(self.decisions[i]));
            out.push('\n');
        }
        out
    }
}

/// Granulate a whole decision system at one radius.
pub fn reflect(system: &DecisionSystem, radius: f64, inclusion: &ObjectInclusion) -> GranularReflection {
    let granules = all_granules(radius, inclusion, system.base());
    let covering = irreducible_covering(&granules, system.n_objects());
    granular_mirror(&covering, system, Voting::Majority)
}

/// Stratified fold assignment: each class is shuffled and dealt
/// round-robin, continuing the deal across classes.
pub fn stratified_folds(labels: &[u32], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for (_, mut members) in by_class {
        members.shuffle(&mut rng);
        for m in members {
            out[next % folds].push(m);
            next += 1;
        }
    }
    for f in out.iter_mut() {
        f.sort_unstable();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeciderConfig {
    pub folds: usize,
    pub seed: u64,
    /// Defaults to [`radius_grid`] over the conditional features.
    pub radii: Option<Vec<f64>>,
    pub inclusion: ObjectInclusion,
}

impl Default for DeciderConfig {
    fn default() -> Self {
        DeciderConfig {
            folds: 5,
            seed: 0,
            radii: None,
            inclusion: ObjectInclusion::Lukasiewicz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub radius: f64,
    pub accuracy: f64,
    pub coverage: f64,
    /// Mean covering size over folds.
    pub granules: f64,
    /// Mean `|C| / |U_train|` over folds.
    pub reduction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeciderReport {
    pub per_radius: Vec<RadiusResult>,
    pub best_radius: f64,
}

impl DeciderReport {
    pub fn best(&self) -> &RadiusResult {
        self.per_radius
            .iter()
            .find(|r| r.radius == self.best_radius)
            .expect("best radius is one of the evaluated radii")
    }
}

struct Fold {
    train: DecisionSystem,
    test: DecisionSystem,
    degrees: DegreeMatrix,
}

/// Stratified k-fold evaluation of the granular decider over each radius.
/// Granulation only ever sees the training part of a fold.
pub fn run_decider(system: &DecisionSystem, config: &DeciderConfig) -> Result<DeciderReport> {
    if config.folds < 2 {
        return Err(GranulationError::TooFewFolds(config.folds));
    }
    let radii = config
        .radii
        .clone()
        .unwrap_or_else(|| radius_grid(system.base().n_features()));
    if let Some(&bad) = radii.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(GranulationError::InvalidRadius(bad));
    }
    let n = system.n_objects();
    let assignment = stratified_folds(system.decisions(), config.folds, config.seed);
    let mut folds = Vec::with_capacity(config.folds);
    for (k, test_idx) in assignment.iter().enumerate() {
        let train_idx: Vec<usize> = assignment
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        for (part, idx) in [("test", test_idx), ("training", &train_idx)] {
            if idx.is_empty() {
                return Err(GranulationError::FoldError {
                    fold: k,
                    part,
                    objects: n,
                    folds: config.folds,
                });
            }
        }
        let mut train_idx = train_idx;
        train_idx.sort_unstable();
        let train = system.select_rows(&train_idx);
        let degrees = DegreeMatrix::new(&config.inclusion, train.base());
        folds.push(Fold {
            train,
            test: system.select_rows(test_idx),
            degrees,
        });
    }

    let evaluate = |&radius: &f64| -> RadiusResult {
        let mut correct = 0usize;
        let mut classified = 0usize;
        let mut tested = 0usize;
        let mut granule_sum = 0.0;
        let mut reduction_sum = 0.0;
        for fold in &folds {
            let granules = fold.degrees.granules(radius);
            let covering = irreducible_covering(&granules, fold.train.n_objects());
            let reflection = granular_mirror(&covering, &fold.train, Voting::Majority);
            for o in 0..fold.test.n_objects() {
                if let Ok(predicted) = reflection.classify(fold.test.base().row(o)) {
                    classified += 1;
                    if predicted == fold.test.decision(o) {
                        correct += 1;
                    }
                }
                tested += 1;
            }
            granule_sum += covering.len() as f64;
            reduction_sum += covering.len() as f64 / fold.train.n_objects() as f64;
        }
        let k = folds.len() as f64;
        RadiusResult {
            radius,
            accuracy: correct as f64 / tested as f64,
            coverage: classified as f64 / tested as f64,
            granules: granule_sum / k,
            reduction: reduction_sum / k,
        }
    };

    #[cfg(feature = "parallel")]
    let per_radius: Vec<RadiusResult> = {
        use rayon::prelude::*;
        radii.par_iter().map(evaluate).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_radius: Vec<RadiusResult> = radii.iter().map(evaluate).collect();

    let best_radius = per_radius
        .iter()
        .max_by(|a, b| {
            a.accuracy
                .partial_cmp(&b.accuracy)
                .unwrap_or(Ordering::Equal)
                .then(b.reduction.partial_cmp(&a.reduction).unwrap_or(Ordering::Equal))
                .then(b.radius.partial_cmp(&a.radius).unwrap_or(Ordering::Equal))
        })
        .map(|r| r.radius)
        .unwrap_or(0.0);
    Ok(DeciderReport {
        per_radius,
        best_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> InformationSystem {
        InformationSystem::from_rows(&["p", "q"], &[&["1", "0"], &["1", "1"], &["0", "1"]]).unwrap()
    }

    fn set(n: usize, items: &[usize]) -> ObjectSet {
        ObjectSet::from_indices(n, items.iter().copied())
    }

    #[test]
    fn granule_examples() {
        let s = three();
        let inc = ObjectInclusion::Lukasiewicz;
        assert_eq!(granule(0, 0.0, &inc, &s).members, ObjectSet::full(3));
        assert_eq!(granule(0, 0.5, &inc, &s).members, set(3, &[0, 1]));
        assert_eq!(granule(0, 1.0, &inc, &s).members, set(3, &[0]));

        let dup = InformationSystem::from_rows(&["p"], &[&["a"], &["b"], &["a"]]).unwrap();
        assert_eq!(granule(2, 1.0, &inc, &dup).members, set(3, &[0, 2]));
    }

    #[test]
    fn grid() {
        let g = radius_grid(3);
        assert_eq!(g.len(), 3);
        assert!((g[0] - 1.0 / 3.0).abs() < 1e-12 && (g[1] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(g[2], 1.0);
        let s = three();
        let all = all_granules(0.0, &ObjectInclusion::Lukasiewicz, &s);
        assert!(all.iter().all(|g| g.members == ObjectSet::full(3)));
        assert_eq!(all.iter().map(|g| g.center).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    fn g(center: usize, members: &[usize], n: usize) -> Granule {
        Granule {
            center,
            radius: 0.5,
            members: set(n, members),
        }
    }

    #[test]
    fn covering_examples() {
        let cands = vec![g(0, &[0, 1], 3), g(1, &[1, 2], 3), g(2, &[0, 1, 2], 3)];
        let c = irreducible_covering(&cands, 3);
        assert_eq!(c.granules.len(), 1);
        assert_eq!(c.granules[0].center, 2);

        let singles: Vec<Granule> = (0..4).map(|i| g(i, &[i], 4)).collect();
        let c = irreducible_covering(&singles, 4);
        assert_eq!(c.len(), 4);
        assert!(c.is_irreducible());

        let whole = vec![g(0, &[0], 3), g(1, &[0, 1, 2], 3)];
        let c = irreducible_covering(&whole, 3);
        assert_eq!(c.granules.iter().map(|g| g.center).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn reverse_pass_drops_redundant_granules() {
        let cands = vec![g(0, &[0, 1, 2], 6), g(1, &[3, 4, 5], 6), g(2, &[2, 3], 6)];
        let c = irreducible_covering(&cands, 6);
        assert!(c.covers());
        assert!(c.is_irreducible());
        assert_eq!(c.len(), 2);

        let cands = vec![
            g(0, &[0, 1, 2, 3], 6),
            g(1, &[2, 3, 4], 6),
            g(2, &[4, 5], 6),
            g(3, &[0, 5], 6),
        ];
        let c = irreducible_covering(&cands, 6);
        assert!(c.covers() && c.is_irreducible());
    }

    fn ds(rows: &[&[&str]], d: &[&str]) -> DecisionSystem {
        let n = rows[0].len();
        let names: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let base = InformationSystem::from_rows(&names, rows).unwrap();
        DecisionSystem::new(base, "d", d).unwrap()
    }

    #[test]
    fn mirror_majority_and_ties() {
        let s = ds(&[&["A"], &["A"], &["B"], &["B"]], &["y", "y", "n", "n"]);
        let cov = Covering {
            granules: vec![g(0, &[0, 1, 2], 4), g(3, &[2, 3], 4)],
            universe: 4,
        };
        let r = granular_mirror(&cov, &s, Voting::Majority);
        assert_eq!(s.base().token(0, r.rows[0][0]), "A");
        assert_eq!(s.decision_token(r.decisions[0]), "y");
        // tie (B, B)… and (n, n): second granule is pure
        assert_eq!(s.base().token(0, r.rows[1][0]), "B");

        // a genuine tie goes to the smaller token
        let t = ds(&[&["B"], &["A"]], &["z", "a"]);
        let cov = Covering {
            granules: vec![g(0, &[0, 1], 2)],
            universe: 2,
        };
        let r = granular_mirror(&cov, &t, Voting::Majority);
        assert_eq!(t.base().token(0, r.rows[0][0]), "A");
        assert_eq!(t.decision_token(r.decisions[0]), "a");
    }

    #[test]
    fn classify_examples() {
        let s = ds(&[&["1", "0", "1"], &["0", "0", "0"]], &["yes", "no"]);
        let cov = Covering {
            granules: vec![g(0, &[0], 2), g(1, &[1], 2)],
            universe: 2,
        };
        let r = granular_mirror(&cov, &s, Voting::Majority);
        assert_eq!(r.classify(s.base().row(0)).unwrap(), s.decision(0));
        // agreement 2/3 with row 0, 1/3 with row 1
        let probe = ds(
            &[&["1", "1", "1"], &["1", "0", "1"], &["0", "0", "0"]],
            &["?", "yes", "no"],
        );
        let mut q = vec![];
        for f in 0..3 {
            q.push(s.base().lookup(f, probe.base().value(0, f)).unwrap_or(u32::MAX));
        }
        assert_eq!(s.decision_token(r.classify(&q).unwrap()), "yes");

        let single = Covering {
            granules: vec![g(0, &[0, 1], 2)],
            universe: 2,
        };
        let r1 = granular_mirror(&single, &s, Voting::Majority);
        for o in 0..2 {
            assert_eq!(r1.classify(s.base().row(o)).unwrap(), r1.decisions[0]);
        }
        assert!(r1.classify(&[0]).is_err());
    }

    #[test]
    fn stratified_folds_balance_classes() {
        let labels: Vec<u32> = (0..20).map(|i| (i % 4 == 0) as u32).collect();
        let folds = stratified_folds(&labels, 5, 7);
        assert_eq!(folds.iter().map(Vec::len).sum::<usize>(), 20);
        for f in &folds {
            assert_eq!(f.len(), 4);
            assert_eq!(f.iter().filter(|&&i| labels[i] == 1).count(), 1);
        }
        assert_eq!(folds, stratified_folds(&labels, 5, 7));
    }

    #[test]
    fn decider_errors() {
        let s = ds(&[&["1"], &["0"]], &["a", "b"]);
        let cfg = DeciderConfig {
            folds: 1,
            ..DeciderConfig::default()
        };
        assert_eq!(run_decider(&s, &cfg), Err(GranulationError::TooFewFolds(1)));
        let cfg = DeciderConfig {
            folds: 3,
            ..DeciderConfig::default()
        };
        assert!(matches!(run_decider(&s, &cfg), Err(GranulationError::FoldError { .. })));
        let cfg = DeciderConfig {
            radii: Some(vec![1.5]),
            folds: 2,
            ..DeciderConfig::default()
        };
        assert_eq!(run_decider(&s, &cfg), Err(GranulationError::InvalidRadius(1.5)));
    }
}
