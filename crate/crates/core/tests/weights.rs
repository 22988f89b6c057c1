mod common;

use mereoml::mereology::{lifted, Carrier, MaybeEntity, WeightFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{mask_weight, subsets};

const TOL: f64 = 1e-9;

fn mask_of(m: MaybeEntity) -> u64 {
    m.entity().map_or(0, |e| e.mask())
}

fn weight_fns(carrier: &Carrier, rng: &mut ChaCha8Rng) -> Vec<(Vec<f64>, WeightFn)> {
    let n = carrier.size();
    let mut out = vec![(vec![1.0; n], WeightFn::uniform(carrier))];
    for _ in 0..3 {
        let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..5.0)).collect();
        out.push((masses.clone(), WeightFn::new(carrier, masses).unwrap()));
    }
    out
}

#[test]
fn boolean_operations_match_bitmasks() {
    for n in 1..=5 {
        let c = Carrier::with_size(n).unwrap();
        let full = (1u64 << n) - 1;
        for a in subsets(n) {
            let x = c.from_mask(a).unwrap();
            assert_eq!(mask_of(x.complement()), !a & full);
            for b in subsets(n) {
                let y = c.from_mask(b).unwrap();
                assert_eq!(x.sum(&y).unwrap().mask(), a | b);
                assert_eq!(mask_of(x.product(&y).unwrap()), a & b);
                assert_eq!(mask_of(x.implication(&y).unwrap()), (!a & full) | b);
                assert_eq!(x.subst(&y).unwrap(), a & !b == 0);
                assert_eq!(x.part(&y).unwrap(), a & !b == 0 && a != b);
                assert_eq!(x.overlap(&y).unwrap(), a & b != 0);
            }
        }
    }
}

#[test]
fn implication_characterizes_parthood() {
    for n in 1..=5 {
        let c = Carrier::with_size(n).unwrap();
        for x in c.entities() {
            for y in c.entities() {
                let subst = x.subst(&y).unwrap();
                assert_eq!(subst, x.product(&y).unwrap() == MaybeEntity::Entity(x));
                assert_eq!(subst, x.is_valid_implication(&y).unwrap());
                assert_eq!(subst, x.sum(&y).unwrap() == y);
            }
        }
    }
}

#[test]
fn weight_matches_mass_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=5 {
        let c = Carrier::with_size(n).unwrap();
        for (masses, w) in weight_fns(&c, &mut rng) {
            assert_eq!(w.weight(MaybeEntity::Empty), 0.0);
            for a in subsets(n) {
                let x = c.from_mask(a).unwrap();
                assert!((w.weight(x) - mask_weight(a, &masses)).abs() < TOL);
            }
        }
    }
}

/// All nine weight identities, every pair of entities, carriers of up to
/// five atoms, uniform plus three random weight functions.
#[test]
fn nine_weight_identities_hold_exhaustively() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0usize;
    for n in 1..=5 {
        let c = Carrier::with_size(n).unwrap();
        for (_, w) in weight_fns(&c, &mut rng) {
            for x in c.entities() {
                for y in c.entities() {
                    let subst = x.subst(&y).unwrap();
                    let xy = x.product(&y).unwrap();
                    let nx = x.complement();
                    let nx_y = lifted::product(nx, y.into());
                    let x_plus_y = x.sum(&y).unwrap();
                    let imp = x.implication(&y).unwrap();
                    let x_minus_y = lifted::product(x.into(), y.complement());
                    let eq = |a: f64, b: f64| (a - b).abs() < TOL;

                    assert_eq!(subst, xy == MaybeEntity::Entity(x), "item 1");
                    assert_eq!(subst, x.is_valid_implication(&y).unwrap(), "item 2");
                    assert!(!subst || w.weight(x) <= w.weight(y) + TOL, "item 3");
                    assert!(eq(w.weight(x_plus_y), w.weight(x) + w.weight(nx_y)), "item 4");
                    assert_eq!(
                        xy.is_empty(),
                        eq(w.weight(x_plus_y), w.weight(x) + w.weight(y)),
                        "item 5"
                    );
                    assert!(eq(w.weight(x) + w.weight(nx), 1.0), "item 6");
                    assert!(eq(w.weight(y), w.weight(xy) + w.weight(nx_y)), "item 7");
                    assert_eq!(subst, eq(w.weight(imp), 1.0), "item 8");
                    assert!(eq(w.weight(imp), 1.0 - w.weight(x_minus_y)), "item 9");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 4000);
}
