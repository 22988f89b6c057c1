use std::collections::BTreeSet;

use mereoml::geometry::{navigate, parse_formation, parse_world, NavStatus, StepKind};

fn shipped() -> (mereoml::geometry::World, mereoml::geometry::Formation) {
    let world = parse_world(include_str!("../../../data/corridor.world")).unwrap();
    let ids: BTreeSet<u32> = world.robots.keys().copied().collect();
    let formation = parse_formation(include_str!("../../../data/cross.frm"), Some(&ids)).unwrap();
    (world, formation)
}

#[test]
fn cross_reaches_goal_safely() {
    let (world, formation) = shipped();
    let log = navigate(&world, &formation, 1000).unwrap();
    assert_eq!(log.status, NavStatus::Reached, "{} steps", log.steps.len());
    assert_eq!(log.obstacle_overlaps(&world), 0);
    assert_eq!(log.final_step().violations, 0);
}

#[test]
fn leader_potential_never_rises() {
    let (world, formation) = shipped();
    let log = navigate(&world, &formation, 1000).unwrap();
    for w in log.steps.windows(2) {
        let (before, after) = (w[0].robots[0].potential, w[1].robots[0].potential);
        assert!(after <= before);
        if w[1].kind == StepKind::Advance {
            assert!(after < before);
        }
    }
}

#[test]
fn navigation_is_deterministic() {
    let (world, formation) = shipped();
    let a = navigate(&world, &formation, 1000).unwrap();
    let b = navigate(&world, &formation, 1000).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
}
