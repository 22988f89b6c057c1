//! proptest generators for formulas and formations.

use mereoml::geometry::{Constraint, Formation, RobotRef};
use mereoml::logic::Formula;
use proptest::prelude::*;

fn ident() -> impl Strategy<Value = String> {
    "[a-zA-Z_][a-zA-Z0-9_]{0,6}"
}

fn value() -> impl Strategy<Value = String> {
    "-?[a-zA-Z0-9_.]{1,5}"
}

pub fn formula() -> impl Strategy<Value = Formula> {
    let leaf = (ident(), value()).prop_map(|(f, v)| Formula::atom(f, v));
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.implies(b)),
        ]
    })
}

fn robot() -> impl Strategy<Value = RobotRef> {
    ("[a-z][a-z0-9_-]{0,6}", 0u32..12).prop_map(|(kind, id)| RobotRef { kind, id })
}

fn delta() -> impl Strategy<Value = f64> {
    prop_oneof![(1u32..2000).prop_map(|k| k as f64 / 100.0), 1e-6f64..1e3]
}

fn constraint() -> impl Strategy<Value = Constraint> {
    prop_oneof![
        (robot(), robot(), robot()).prop_map(|(z, a, b)| Constraint::Between { z, a, b }),
        (robot(), robot(), robot()).prop_map(|(z, a, b)| Constraint::NotBetween { z, a, b }),
        (delta(), robot(), robot(), robot(), robot()).prop_map(|(delta, robot, z, a, b)| Constraint::MaxDist {
            delta,
            robot,
            z,
            a,
            b
        }),
    ]
}

pub fn formation() -> impl Strategy<Value = Formation> {
    ("[a-zA-Z_][a-zA-Z0-9_-]{0,8}", prop::collection::vec(constraint(), 0..8))
        .prop_map(|(name, constraints)| Formation { name, constraints })
}
