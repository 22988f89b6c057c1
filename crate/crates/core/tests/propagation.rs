mod common;

use mereoml::inclusion::{rs_star_is, t_lukasiewicz, FeatureWeights};
use mereoml::logic::{ExactDegree, Formula, NuMode, Semantics};
use mereoml::synthesis::{fuse_formulas, Agent, Network, SynthesisError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{agreements, exp_degree, exp_mass, random_rows, Rows};

fn s(v: &[&str]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

struct Producer {
    agent: Agent,
    rows: Rows,
    weights: Vec<f64>,
}

fn producer(rng: &mut ChaCha8Rng, id: &str, max_objects: usize) -> Producer {
    let f = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=max_objects);
    let rows = random_rows(rng, n, f, 3);
    let weights: Vec<f64> = (0..f).map(|_| rng.gen_range(0.05..1.5)).collect();
    let targets = vec![rows[rng.gen_range(0..n)].clone()];
    let agent = Agent::input(
        id,
        names(id, f),
        &rows,
        &targets,
        Some(FeatureWeights::new(weights.clone()).unwrap()),
    )
    .unwrap();
    Producer { agent, rows, weights }
}

#[test]
fn fused_degree_never_drops_below_lukasiewicz_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..1000 {
        let b = producer(&mut rng, "b", 5);
        let c = producer(&mut rng, "c", 5);
        let a = Agent::consumer("a", &[&b.agent, &c.agent], None).unwrap();
        let (xb, yb) = (rng.gen_range(0..b.rows.len()), rng.gen_range(0..b.rows.len()));
        let (xc, yc) = (rng.gen_range(0..c.rows.len()), rng.gen_range(0..c.rows.len()));
        let r_b = exp_degree(&b.rows[xb], &b.rows[yb], &b.weights);
        let r_c = exp_degree(&c.rows[xc], &c.rows[yc], &c.weights);

        let x = a.fuse_entities(&[b.rows[xb].clone(), c.rows[xc].clone()]).unwrap();
        let y = a.object_of(&[yb, yc]).unwrap();
        let fused = a.degree_to(&x, y).unwrap();

        let (fb, fc) = (b.weights.len() as f64, c.weights.len() as f64);
        let mass = (fb * exp_mass(&b.rows[xb], &b.rows[yb], &b.weights)
            + fc * exp_mass(&c.rows[xc], &c.rows[yc], &c.weights))
            / (fb + fc);
        assert!((fused - (-mass * mass).exp()).abs() < 1e-12);
        assert!(fused >= t_lukasiewicz(r_b, r_c) - 1e-9);
        assert!(fused >= r_b.min(r_c) - 1e-9);

        // the same bound for the agreement-count inclusion on the product
        let xo = a.object_of(&[xb, xc]).unwrap();
        let luk_b = agreements(&b.rows[xb], &b.rows[yb]) as f64 / fb;
        let luk_c = agreements(&c.rows[xc], &c.rows[yc]) as f64 / fc;
        assert!(rs_star_is(xo, y, a.universe()) >= t_lukasiewicz(luk_b, luk_c) - 1e-9);
    }
}

#[test]
fn extension_of_conjunction_is_product_on_product_universes() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let mut checked = 0;
    for _ in 0..40 {
        let b = producer(&mut rng, "b", 5);
        let c = producer(&mut rng, "c", 5);
        let a = Agent::consumer("a", &[&b.agent, &c.agent], None).unwrap();
        assert_eq!(a.universe().n_objects(), b.rows.len() * c.rows.len());
        let sem_a = Semantics::new(a.universe());
        let sem_b = Semantics::new(b.agent.universe());
        let sem_c = Semantics::new(c.agent.universe());
        for gb_center in 0..b.rows.len() {
            for gc_center in 0..c.rows.len() {
                for (rb, rc) in [(0.0, 0.0), (0.5, 0.3), (0.9, 0.7), (1.0, 1.0)] {
                    let gb = b.agent.granule(gb_center, rb);
                    let gc = c.agent.granule(gc_center, rc);
                    let g = a.fuse_granules(&[&gb, &gc]).unwrap();
                    assert_eq!(g.len(), gb.len() * gc.len());
                    assert!((g.radius - t_lukasiewicz(rb, rc)).abs() < 1e-12);
                    let direct = a.granule(g.center, g.radius);
                    assert!(g.members.is_subset(&direct.members));
                    for vb in ["v0", "v1", "v2"] {
                        for vc in ["v0", "v1", "v2"] {
                            let phi_b = Formula::atom("b0", vb);
                            let phi_c = Formula::atom("c0", vc);
                            let lhs = sem_a
                                .extension(&g.members, &fuse_formulas(&phi_b, &phi_c), NuMode::NuL)
                                .unwrap();
                            let rhs = sem_b.extension(&gb.members, &phi_b, NuMode::NuL).unwrap()
                                * sem_c.extension(&gc.members, &phi_c, NuMode::NuL).unwrap();
                            assert_eq!(lhs, rhs);
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn regularity_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    for _ in 0..200 {
        let b = producer(&mut rng, "b", 4);
        let c = producer(&mut rng, "c", 4);
        let a = Agent::consumer("a", &[&b.agent, &c.agent], None).unwrap();
        let sem = Semantics::new(a.universe());
        for xb in 0..b.rows.len() {
            for xb2 in 0..b.rows.len() {
                for xc in 0..c.rows.len() {
                    for xc2 in 0..c.rows.len() {
                        let x = a.fuse_entities(&[b.rows[xb].clone(), c.rows[xc].clone()]).unwrap();
                        let x2 = a.fuse_entities(&[b.rows[xb2].clone(), c.rows[xc2].clone()]).unwrap();
                        if b.rows[xb] == b.rows[xb2] && c.rows[xc] == c.rows[xc2] {
                            assert_eq!(x, x2);
                        }
                    }
                }
                let phi_b = Formula::atom("b0", b.rows[xb][0].clone());
                for xc in 0..c.rows.len() {
                    let phi_c = Formula::atom("c0", c.rows[xc][0].clone());
                    let o = a.object_of(&[xb, xc]).unwrap();
                    assert!(sem.meaning(&fuse_formulas(&phi_b, &phi_c)).unwrap().contains(o));
                }
            }
        }
    }
}

#[test]
fn hand_computed_two_producer_network() {
    let b = Agent::input(
        "b",
        s(&["p", "q"]),
        &[s(&["0", "0"]), s(&["0", "1"]), s(&["1", "1"])],
        &[s(&["0", "1"]), s(&["1", "1"])],
        None,
    )
    .unwrap();
    let c = Agent::input("c", s(&["r"]), &[s(&["0"]), s(&["1"])], &[s(&["1"])], None).unwrap();
    let a = Agent::consumer("a", &[&b, &c], None).unwrap();
    assert_eq!(a.targets().len(), 2);
    let net = Network::new(vec![vec![b, c], vec![a]]).unwrap();
    let trace = net.propagate(&[s(&["0", "0"]), s(&["0"])]).unwrap();

    // b: (0,0) vs (0,1) differs on q, mass 1/2
    let r_b = (-0.25f64).exp();
    // c: 0 vs 1, mass 1
    let r_c = (-1.0f64).exp();
    // a: (0,0,0) vs (0,1,1), fused weights 1/3 each, mass 2/3
    let r_a = (-4.0f64 / 9.0).exp();
    assert!((trace.layers[0][0].degree - r_b).abs() < 1e-12);
    assert_eq!(trace.layers[0][0].target, s(&["0", "1"]));
    assert!((trace.layers[0][1].degree - r_c).abs() < 1e-12);
    assert!((trace.output_degree - r_a).abs() < 1e-12);
    assert_eq!(trace.output_target, s(&["0", "1", "1"]));
    let step = &trace.layers[1][0];
    assert!((step.bound.unwrap() - t_lukasiewicz(r_b, r_c)).abs() < 1e-12);
    assert_eq!(step.meets_max, Some(false));
    assert!(trace.output_degree >= step.bound.unwrap());
}

#[test]
fn inputs_on_targets_give_degree_one_throughout() {
    let b = Agent::input("b", s(&["p"]), &[s(&["0"]), s(&["1"])], &[s(&["1"])], None).unwrap();
    let c = Agent::input("c", s(&["r"]), &[s(&["0"]), s(&["1"])], &[s(&["0"])], None).unwrap();
    let a = Agent::consumer("a", &[&b, &c], None).unwrap();
    let net = Network::new(vec![vec![b, c], vec![a]]).unwrap();
    let trace = net.propagate(&[s(&["1"]), s(&["0"])]).unwrap();
    assert!(trace.layers.iter().flatten().all(|st| st.degree == 1.0));
    assert_eq!(trace.layers[1][0].meets_max, Some(true));
}

#[test]
fn classification_prefers_the_nearer_target() {
    let w0 = (-(0.9f64).ln()).sqrt();
    let w1 = (-(0.4f64).ln()).sqrt() - w0;
    let agent = Agent::input(
        "t",
        s(&["a", "b", "c"]),
        &[s(&["0", "0", "0"]), s(&["1", "0", "0"]), s(&["1", "1", "0"])],
        &[s(&["1", "0", "0"]), s(&["1", "1", "0"])],
        Some(FeatureWeights::new(vec![w0, w1, 1.0]).unwrap()),
    )
    .unwrap();
    let entity = s(&["0", "0", "0"]);
    assert!((agent.degree_to(&entity, 1).unwrap() - 0.9).abs() < 1e-12);
    assert!((agent.degree_to(&entity, 2).unwrap() - 0.4).abs() < 1e-12);
    let (pos, degree) = agent.classify_to_target(&entity).unwrap();
    assert_eq!(pos, 0);
    assert!((degree - 0.9).abs() < 1e-12);

    let single = Network::new(vec![vec![agent.clone()]]).unwrap();
    let trace = single.propagate(std::slice::from_ref(&entity)).unwrap();
    assert_eq!(trace.output_target, s(&["1", "0", "0"]));
    assert_eq!(trace.output_degree, degree);
}

#[test]
fn network_files_round_into_networks() {
    let text = r#"
[[layer]]
[[layer.agent]]
id = "left"
features = ["a"]
objects = [["0"], ["1"]]
targets = [["1"]]

[[layer.agent]]
id = "right"
features = ["b"]
targets = [["0"], ["1"]]

[[layer]]
[[layer.agent]]
id = "top"
"#;
    let net = Network::from_toml(text).unwrap();
    assert_eq!(net.output().universe().n_objects(), 4);
    let trace = net.propagate(&[s(&["1"]), s(&["1"])]).unwrap();
    assert_eq!(trace.output_degree, 1.0);

    for bad in [
        "layer = 3",
        "[[layer]]\n[[layer.agent]]\nid = \"x\"\nfeatures = [\"a\"]\n",
        "[[layer]]\n[[layer.agent]]\nid = \"x\"\nfeatures = [\"a\"]\ntargets = [[\"0\"]]\n[[layer.agent]]\nid = \"x\"\nfeatures = [\"b\"]\ntargets = [[\"0\"]]\n",
        "[[layer]]\n[[layer.agent]]\nid = \"x\"\nfeatures = [\"a\"]\ntargets = [[\"0\"]]\nbogus = 1\n",
    ] {
        assert!(Network::from_toml(bad).is_err(), "{bad}");
    }
    let unknown = "[[layer]]\n[[layer.agent]]\nid = \"x\"\nfeatures = [\"a\"]\ntargets = [[\"0\"]]\n[[layer]]\n[[layer.agent]]\nid = \"y\"\ninputs = [\"z\"]\n";
    assert!(matches!(
        Network::from_toml(unknown),
        Err(SynthesisError::UnknownProducer { .. })
    ));
}

#[test]
fn exact_extension_identity_example() {
    let b = Agent::input("b", s(&["p"]), &[s(&["0"]), s(&["1"])], &[s(&["0"])], None).unwrap();
    let c = Agent::input("c", s(&["r"]), &[s(&["0"]), s(&["1"]), s(&["2"])], &[s(&["0"])], None).unwrap();
    let a = Agent::consumer("a", &[&b, &c], None).unwrap();
    let gb = b.granule(0, 0.0);
    let gc = c.granule(0, 0.0);
    let g = a.fuse_granules(&[&gb, &gc]).unwrap();
    assert_eq!(g.len(), 6);
    let sem = Semantics::new(a.universe());
    let phi = fuse_formulas(&Formula::atom("p", "0"), &Formula::atom("r", "2"));
    assert_eq!(
        sem.extension(&g.members, &phi, NuMode::NuL).unwrap(),
        ExactDegree::new(1, 6)
    );
}
