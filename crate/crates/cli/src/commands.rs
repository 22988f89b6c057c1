use std::fs;
use std::path::{Path, PathBuf};

use mereoml::dataset::{load_decision_csv, LoadOptions};
use mereoml::geometry::{navigate, parse_formation, parse_world};
use mereoml::granulation::{irreducible_covering, reflect, run_decider, DeciderConfig, DegreeMatrix};
use mereoml::inclusion::{rs_star_weight, ObjectInclusion};
use mereoml::logic::{parse_formula, serialize_degree, ExactDegree, Formula, GranuleSet, NuMode, RuleAudit, Semantics};
use mereoml::mereology::{Carrier, WeightFn};
use mereoml::synthesis::Network;
use mereoml::DecisionSystem;
use serde::Serialize;

use crate::{
    ClassifyArgs, Command, DemoArgs, GranulateArgs, InclusionKind, LoadArgs, LogicArgs, Mode, NetArgs, SimArgs,
    TableArgs,
};

pub enum Failure {
    Usage(String),
    Data(String),
}

type Outcome = Result<(), Failure>;

fn data(e: impl ToString) -> Failure {
    Failure::Data(e.to_string())
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Load(a) => load(a),
        Command::Classify(a) => classify(a),
        Command::Granulate(a) => granulate(a),
        Command::Logic(a) => logic(a),
        Command::Net(a) => net(a),
        Command::Sim(a) => sim(a),
        Command::Demo(a) => demo(a),
    }
}

fn check_input(path: &Path) -> Outcome {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Data(format!("{}: no such file", path.display())))
    }
}

fn check_output(path: &Path) -> Outcome {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(Failure::Data(format!("{}: directory does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

fn check_outputs(paths: &[&Option<PathBuf>]) -> Outcome {
    paths.iter().filter_map(|p| p.as_deref()).try_for_each(check_output)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).map_err(data)?;
    text.push('\n');
    emit(&text, out)
}

fn parse_discretize(specs: &[String]) -> Result<Vec<(String, usize)>, Failure> {
    specs
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (col, bins) = s
                .rsplit_once(':')
                .ok_or_else(|| Failure::Usage(format!("--discretize expects column:bins, got `{s}`")))?;
            let bins = bins
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("bad bin count in `{s}`")))?;
            Ok((col.to_string(), bins))
        })
        .collect()
}

fn load_table(t: &TableArgs) -> Result<DecisionSystem, Failure> {
    let plan = parse_discretize(&t.discretize)?;
    check_input(&t.csv)?;
    let opts = LoadOptions { na_token: t.na.clone() };
    let mut ds = load_decision_csv(&t.csv, &t.decision, &opts).map_err(data)?;
    for (col, bins) in plan {
        ds = ds.discretize(&[col.as_str()], bins).map_err(data)?;
    }
    Ok(ds)
}

fn inclusion_for(kind: InclusionKind, ds: &DecisionSystem) -> ObjectInclusion {
    match kind {
        InclusionKind::Lukasiewicz => ObjectInclusion::Lukasiewicz,
        InclusionKind::Exp => ObjectInclusion::exponential_uniform(ds.base().n_features()),
    }
}

#[derive(Serialize)]
struct ClassCount<'a> {
    value: &'a str,
    count: usize,
}

#[derive(Serialize)]
struct LoadSummary<'a> {
    objects: usize,
    features: usize,
    decision: &'a str,
    decision_classes: usize,
    feature_names: &'a [String],
    classes: Vec<ClassCount<'a>>,
}

fn load(a: LoadArgs) -> Outcome {
    let ds = load_table(&a.table)?;
    let classes = ds
        .decision_values()
        .iter()
        .enumerate()
        .map(|(code, value)| ClassCount {
            value,
            count: ds.decisions().iter().filter(|&&d| d as usize == code).count(),
        })
        .collect();
    let summary = LoadSummary {
        objects: ds.n_objects(),
        features: ds.base().n_features(),
        decision: ds.decision_name(),
        decision_classes: ds.decision_values().len(),
        feature_names: ds.base().features(),
        classes,
    };
    emit_json(&summary, None)
}

fn classify(a: ClassifyArgs) -> Outcome {
    if a.folds < 2 {
        return Err(Failure::Usage("--folds must be at least 2".into()));
    }
    if let Some(r) = a.radii.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Failure::Usage(format!("radius {r} outside [0, 1]")));
    }
    check_outputs(&[&a.out])?;
    let ds = load_table(&a.table)?;
    let config = DeciderConfig {
        folds: a.folds,
        seed: a.seed,
        radii: (!a.radii.is_empty()).then(|| a.radii.clone()),
        inclusion: inclusion_for(a.inclusion, &ds),
    };
    let report = run_decider(&ds, &config).map_err(data)?;
    emit_json(&report, a.out.as_deref())
}

fn granulate(a: GranulateArgs) -> Outcome {
    if !(0.0..=1.0).contains(&a.radius) {
        return Err(Failure::Usage(format!("radius {} outside [0, 1]", a.radius)));
    }
    check_outputs(&[&a.out])?;
    let ds = load_table(&a.table)?;
    let reflection = reflect(&ds, a.radius, &inclusion_for(a.inclusion, &ds));
    emit(&reflection.to_csv(&ds), a.out.as_deref())
}

fn parse_granules_from(text: &str) -> Result<(f64, InclusionKind), Failure> {
    let bad = || Failure::Usage(format!("--granules-from expects radius,inclusion, got `{text}`"));
    let (r, kind) = text.split_once(',').ok_or_else(bad)?;
    let r: f64 = r.trim().parse().map_err(|_| bad())?;
    if !(0.0..=1.0).contains(&r) {
        return Err(bad());
    }
    let kind = match kind.trim() {
        "lukasiewicz" => InclusionKind::Lukasiewicz,
        "exp" => InclusionKind::Exp,
        _ => return Err(bad()),
    };
    Ok((r, kind))
}

#[derive(Serialize)]
struct GranuleVerdict {
    center: usize,
    members: Vec<usize>,
    #[serde(serialize_with = "serialize_degree")]
    extension: ExactDegree,
    true_at: bool,
    false_at: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<RuleAudit>,
}

#[derive(Serialize)]
struct LogicReport {
    formula: String,
    mode: &'static str,
    radius: f64,
    granules: Vec<GranuleVerdict>,
    valid: bool,
}

fn logic(a: LogicArgs) -> Outcome {
    let (radius, kind) = parse_granules_from(&a.granules_from)?;
    let phi = parse_formula(&a.formula).map_err(|e| Failure::Usage(e.to_string()))?;
    check_outputs(&[&a.out])?;
    let ds = load_table(&a.table)?;
    let view = ds.full_view();
    phi.validate(&view, true).map_err(data)?;
    let matrix = DegreeMatrix::new(&inclusion_for(kind, &ds), ds.base());
    let covering = irreducible_covering(&matrix.granules(radius), ds.n_objects());
    let sem = Semantics::new(&view);
    let mode = match a.mode {
        Mode::Nu3 => NuMode::Nu3,
        Mode::Nul => NuMode::NuL,
    };
    let mut granules = Vec::with_capacity(covering.granules.len());
    for g in &covering.granules {
        let rule = match &phi {
            Formula::Implies(alpha, beta) => Some(sem.rule_audit(&g.members, alpha, beta, mode).map_err(data)?),
            _ => None,
        };
        granules.push(GranuleVerdict {
            center: g.center,
            members: g.members.iter().collect(),
            extension: sem.extension(&g.members, &phi, mode).map_err(data)?,
            true_at: sem.is_true_at(&g.members, &phi).map_err(data)?,
            false_at: sem.is_false_at(&g.members, &phi, mode).map_err(data)?,
            rule,
        });
    }
    let set = GranuleSet::new(covering.granules.iter().map(|g| g.members.clone()));
    let report = LogicReport {
        formula: phi.to_string(),
        mode: match a.mode {
            Mode::Nu3 => "nu3",
            Mode::Nul => "nul",
        },
        radius,
        granules,
        valid: sem.is_valid(&set, &phi).map_err(data)?,
    };
    emit_json(&report, a.out.as_deref())
}

fn net(a: NetArgs) -> Outcome {
    check_input(&a.netfile)?;
    check_outputs(&[&a.out])?;
    let network = Network::from_toml(&read(&a.netfile)?).map_err(data)?;
    let input: Vec<Vec<String>> = a
        .input
        .iter()
        .map(|row| row.split(',').map(|c| c.trim().to_string()).collect())
        .collect();
    let trace = network.propagate(&input).map_err(data)?;
    emit_json(&trace, a.out.as_deref())
}

#[derive(Serialize)]
struct SimSummary {
    status: mereoml::geometry::NavStatus,
    leader: u32,
    steps: usize,
    robots: usize,
    obstacle_overlaps: usize,
    final_violations: usize,
    final_potential: f64,
}

fn sim(a: SimArgs) -> Outcome {
    check_input(&a.world)?;
    check_input(&a.formation)?;
    check_output(&a.out)?;
    check_output(&a.svg)?;
    let world = parse_world(&read(&a.world)?).map_err(|e| Failure::Data(format!("{}: {e}", a.world.display())))?;
    let known = world.robots.keys().copied().collect();
    let formation = parse_formation(&read(&a.formation)?, Some(&known))
        .map_err(|e| Failure::Data(format!("{}: {e}", a.formation.display())))?;
    let log = navigate(&world, &formation, a.steps).map_err(data)?;
    write(&a.out, &log.to_csv())?;
    write(&a.svg, &log.to_svg(&world))?;
    let last = log.final_step();
    let leader = last.robots.iter().find(|r| r.id == log.leader);
    let summary = SimSummary {
        status: log.status,
        leader: log.leader,
        steps: log.steps.len() - 1,
        robots: last.robots.len(),
        obstacle_overlaps: log.obstacle_overlaps(&world),
        final_violations: last.violations,
        final_potential: leader.map_or(f64::INFINITY, |r| r.potential),
    };
    emit_json(&summary, None)
}

#[derive(Serialize)]
struct EntityRow {
    label: String,
    mask: u64,
    weight: f64,
    complement: Option<String>,
}

#[derive(Serialize)]
struct Relation {
    x: String,
    y: String,
    part: bool,
    overlap: bool,
    inclusion: f64,
    implication: Option<String>,
}

#[derive(Serialize)]
struct DemoReport {
    atoms: Vec<String>,
    masses: Vec<f64>,
    entities: Vec<EntityRow>,
    relations: Vec<Relation>,
}

const DEMO_MAX_ATOMS: usize = 6;

fn demo(a: DemoArgs) -> Outcome {
    if a.labels.len() > DEMO_MAX_ATOMS {
        return Err(Failure::Usage(format!("demo takes at most {DEMO_MAX_ATOMS} labels")));
    }
    let carrier = Carrier::new(&a.labels).map_err(|e| Failure::Usage(e.to_string()))?;
    let weights = if a.masses.is_empty() {
        WeightFn::uniform(&carrier)
    } else {
        WeightFn::new(&carrier, a.masses.clone()).map_err(|e| Failure::Usage(e.to_string()))?
    };
    let label = |m: mereoml::mereology::MaybeEntity| m.entity().map(|e| carrier.label(&e));
    let all: Vec<_> = carrier.entities().collect();
    let entities = all
        .iter()
        .map(|x| EntityRow {
            label: carrier.label(x),
            mask: x.mask(),
            weight: weights.weight(*x),
            complement: label(x.complement()),
        })
        .collect();
    let mut relations = Vec::with_capacity(all.len() * all.len());
    for x in &all {
        for y in &all {
            relations.push(Relation {
                x: carrier.label(x),
                y: carrier.label(y),
                part: x.part(y).map_err(data)?,
                overlap: x.overlap(y).map_err(data)?,
                inclusion: rs_star_weight((*x).into(), y, &weights).map_err(data)?,
                implication: label(x.implication(y).map_err(data)?),
            });
        }
    }
    let report = DemoReport {
        atoms: carrier.atoms().to_vec(),
        masses: weights.masses().to_vec(),
        entities,
        relations,
    };
    emit_json(&report, None)
}
