//! Row-by-row formula evaluation and formula enumeration.

use std::collections::BTreeMap;

use mereoml::logic::Formula;

use super::Rows;

/// Direct evaluation of a formula on one row.
pub fn sat(phi: &Formula, features: &[String], row: &[String]) -> bool {
    match phi {
        Formula::Atom { feature, value } => {
            let i = features.iter().position(|f| f == feature).unwrap();
            row[i] == *value
        }
        Formula::Not(a) => !sat(a, features, row),
        Formula::And(a, b) => sat(a, features, row) && sat(b, features, row),
        Formula::Or(a, b) => sat(a, features, row) || sat(b, features, row),
        Formula::Implies(a, b) => !sat(a, features, row) || sat(b, features, row),
    }
}

pub fn oracle_mask(phi: &Formula, features: &[String], rows: &Rows) -> u64 {
    rows.iter()
        .enumerate()
        .filter(|(_, r)| sat(phi, features, r))
        .fold(0, |m, (i, _)| m | 1 << i)
}

pub fn atoms(features: &[String]) -> Vec<Formula> {
    features
        .iter()
        .flat_map(|f| ["v0", "v1"].map(|v| Formula::atom(f.clone(), v)))
        .collect()
}

/// Every formula of depth ≤ 2 over the atoms.
pub fn all_formulas_depth2(atoms: &[Formula]) -> Vec<Formula> {
    let grow = |lower: &[Formula], newest: &[Formula]| -> Vec<Formula> {
        let mut out: Vec<Formula> = newest.iter().map(|a| a.clone().not()).collect();
        for a in lower {
            for b in lower {
                if newest.contains(a) || newest.contains(b) {
                    out.push(a.clone().and(b.clone()));
                    out.push(a.clone().or(b.clone()));
                    out.push(a.clone().implies(b.clone()));
                }
            }
        }
        out
    };
    let d1 = grow(atoms, atoms);
    let upto1: Vec<Formula> = atoms.iter().chain(&d1).cloned().collect();
    let d2 = grow(&upto1, &d1);
    upto1.into_iter().chain(d2).collect()
}

/// One representative formula per meaning, for all meanings reachable at
/// depth ≤ 3. Meanings only depend on the meanings of the immediate
/// subformulas, so closing depth-2 representatives under one more
/// connective reaches every depth-3 meaning.
pub fn representatives(features: &[String], rows: &Rows) -> (BTreeMap<u64, Formula>, BTreeMap<u64, Formula>) {
    let mut d2: BTreeMap<u64, Formula> = BTreeMap::new();
    for phi in all_formulas_depth2(&atoms(features)) {
        d2.entry(oracle_mask(&phi, features, rows)).or_insert(phi);
    }
    let mut d3 = d2.clone();
    let reps: Vec<Formula> = d2.values().cloned().collect();
    for a in &reps {
        d3.entry(oracle_mask(&a.clone().not(), features, rows))
            .or_insert_with(|| a.clone().not());
        for b in &reps {
            for phi in [
                a.clone().and(b.clone()),
                a.clone().or(b.clone()),
                a.clone().implies(b.clone()),
            ] {
                d3.entry(oracle_mask(&phi, features, rows)).or_insert(phi);
            }
        }
    }
    (d2, d3)
}
