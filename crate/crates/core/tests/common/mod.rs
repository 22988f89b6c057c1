#![allow(dead_code)]

//! Brute-force reference implementations shared by the integration tests.
//! Nothing here computes through the library under test.

pub mod corpora;
pub mod formulas;
pub mod generators;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rows = Vec<Vec<String>>;

pub fn feature_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("f{i}")).collect()
}

/// `objects × features` table with values drawn from `v0..v{arity-1}`.
pub fn random_rows(rng: &mut ChaCha8Rng, objects: usize, features: usize, arity: usize) -> Rows {
    (0..objects)
        .map(|_| (0..features).map(|_| format!("v{}", rng.gen_range(0..arity))).collect())
        .collect()
}

pub fn disagreements(a: &[String], b: &[String]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn agreements(a: &[String], b: &[String]) -> usize {
    a.len() - disagreements(a, b)
}

/// Members of the Łukasiewicz granule around `center` with radius
/// `num/den`, decided in integers: `agree/|F| ≥ num/den`.
pub fn luk_granule(rows: &Rows, center: usize, num: usize, den: usize) -> Vec<usize> {
    let f = rows[center].len();
    (0..rows.len())
        .filter(|&y| agreements(&rows[y], &rows[center]) * den >= num * f)
        .collect()
}

pub fn exp_mass(a: &[String], b: &[String], weights: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(weights)
        .filter(|((x, y), _)| x != y)
        .map(|(_, w)| *w)
        .sum()
}

pub fn exp_degree(a: &[String], b: &[String], weights: &[f64]) -> f64 {
    let m = exp_mass(a, b, weights);
    (-m * m).exp()
}

pub fn luk(a: f64, b: f64) -> f64 {
    (a + b - 1.0).max(0.0)
}

pub fn mask_weight(mask: u64, masses: &[f64]) -> f64 {
    let total: f64 = masses.iter().sum();
    let part: f64 = (0..masses.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| masses[i])
        .sum();
    part / total
}

pub fn subsets(n: usize) -> impl Iterator<Item = u64> {
    1..(1u64 << n)
}

pub fn mask_members(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Axis-aligned rectangle as `[x1, y1, x2, y2]`.
pub type Box4 = [f64; 4];

pub fn hull(a: Box4, b: Box4) -> Box4 {
    [a[0].min(b[0]), a[1].min(b[1]), a[2].max(b[2]), a[3].max(b[3])]
}

pub fn inside(inner: Box4, outer: Box4, eps: f64) -> bool {
    inner[0] >= outer[0] - eps && inner[1] >= outer[1] - eps && inner[2] <= outer[2] + eps && inner[3] <= outer[3] + eps
}

pub fn overlap_area(a: Box4, b: Box4) -> f64 {
    let w = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let h = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    w * h
}

pub fn area(a: Box4) -> f64 {
    (a[2] - a[0]) * (a[3] - a[1])
}
