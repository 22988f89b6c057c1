//! Layered networks of granular agents.
//!
//! An input agent owns a small information system with a set of target
//! objects. A consumer agent's objects are fusions (concatenations) of its
//! producers' objects, either the full Cartesian product or an explicit
//! selector list, and its targets are the fusions of producer targets.
//! Every agent grades objects with the exponential inclusion; consumer
//! weights are the size-weighted fusion of producer weights.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DataError, InformationSystem};
use crate::granulation::{granule, Granule};
use crate::inclusion::{exp_degree, t_lukasiewicz, FeatureWeights, InclusionError, ObjectInclusion};
use crate::logic::Formula;
use crate::objset::ObjectSet;
use crate::DEGREE_TOL;

/// Largest consumer universe built from a Cartesian product.
pub const MAX_PRODUCT: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("agent `{0}` has no targets")]
    NoTargets(String),
    #[error("agent `{0}` has no features")]
    NoFeatures(String),
    #[error("duplicate agent id `{0}`")]
    DuplicateAgent(String),
    #[error("feature `{feature}` belongs to both `{first}` and `{second}`")]
    OverlappingFeature {
        feature: String,
        first: String,
        second: String,
    },
    #[error("agent `{agent}` expects {expected} parts, got {found}")]
    Arity {
        agent: String,
        expected: usize,
        found: usize,
    },
    #[error("agent `{agent}` expects entities with {expected} values, got {found}")]
    EntityWidth {
        agent: String,
        expected: usize,
        found: usize,
    },
    #[error("target {target:?} of `{agent}` is not one of its objects")]
    TargetNotObject { agent: String, target: Vec<String> },
    #[error("agent `{agent}` consumes unknown producer `{producer}`")]
    UnknownProducer { agent: String, producer: String },
    #[error("agent `{agent}`: selector {selector:?} does not match its producers")]
    BadSelector { agent: String, selector: Vec<usize> },
    #[error("agent `{agent}`: fusion of producer targets {parts:?} is not a target")]
    TargetFusionMissing { agent: String, parts: Vec<usize> },
    #[error("agent `{agent}`: fused center {parts:?} is not an object")]
    CenterNotObject { agent: String, parts: Vec<usize> },
    #[error("product universe of `{0}` exceeds {MAX_PRODUCT} objects")]
    ProductTooLarge(String),
    #[error("agent `{0}` is an input agent and fuses nothing")]
    NotAConsumer(String),
    #[error("layer 0 agent `{0}` cannot consume producers")]
    InputWithProducers(String),
    #[error("layer {0} agent `{1}` needs producers")]
    ConsumerWithoutProducers(usize, String),
    #[error("network has no layers")]
    EmptyNetwork,
    #[error("last layer must hold exactly one agent, found {0}")]
    OutputLayer(usize),
    #[error("expected {expected} input entities, got {found}")]
    InputArity { expected: usize, found: usize },
    #[error("agent `{agent}`: degree {degree} fell below the fused bound {bound}")]
    BoundViolated { agent: String, degree: f64, bound: f64 },
    #[error("network file: {0}")]
    Parse(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Inclusion(#[from] InclusionError),
}

pub type Result<T, E = SynthesisError> = std::result::Result<T, E>;

/// Łukasiewicz fusion of degrees, the guaranteed lower bound on the
/// degree of a fused containment.
pub fn fuse_degrees(r_b: f64, r_c: f64) -> f64 {
    t_lukasiewicz(r_b, r_c)
}

/// Conjunction of component formulas.
pub fn fuse_formulas(phi_b: &Formula, phi_c: &Formula) -> Formula {
    phi_b.clone().and(phi_c.clone())
}

#[derive(Debug, Clone)]
struct Wiring {
    producers: Vec<String>,
    widths: Vec<usize>,
    /// Per consumer object, the producer objects it fuses.
    components: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

#[derive(Debug, Clone)]
pub struct Agent {
    id: String,
    universe: InformationSystem,
    targets: Vec<usize>,
    inclusion: ObjectInclusion,
    wiring: Option<Wiring>,
}

impl Agent {
    /// Input agent. `targets` must be rows of `objects`.
    pub fn input(
        id: &str,
        features: Vec<String>,
        objects: &[Vec<String>],
        targets: &[Vec<String>],
        weights: Option<FeatureWeights>,
    ) -> Result<Agent> {
        if features.is_empty() {
            return Err(SynthesisError::NoFeatures(id.into()));
        }
        if targets.is_empty() {
            return Err(SynthesisError::NoTargets(id.into()));
        }
        let n = features.len();
        let universe = InformationSystem::new(features, objects)?;
        let weights = match weights {
            Some(w) if w.len() != n => {
                return Err(InclusionError::WeightArity {
                    expected: n,
                    found: w.len(),
                }
                .into())
            }
            Some(w) => w,
            None => FeatureWeights::uniform(n),
        };
        let mut target_ids = Vec::new();
        for t in targets {
            if t.len() != n {
                return Err(SynthesisError::EntityWidth {
                    agent: id.into(),
                    expected: n,
                    found: t.len(),
                });
            }
            let found = (0..universe.n_objects()).find(|&o| universe.row_tokens(o) == *t);
            match found {
                Some(o) if !target_ids.contains(&o) => target_ids.push(o),
                Some(_) => {}
                None => {
                    return Err(SynthesisError::TargetNotObject {
                        agent: id.into(),
                        target: t.clone(),
                    })
                }
            }
        }
        Ok(Agent {
            id: id.into(),
            universe,
            targets: target_ids,
            inclusion: ObjectInclusion::Exponential(weights),
            wiring: None,
        })
    }

    /// Consumer of `producers`. Its objects are the fusions listed in
    /// `selectors` (one producer object index per producer) or, when
    /// `None`, the whole Cartesian product.
    pub fn consumer(id: &str, producers: &[&Agent], selectors: Option<Vec<Vec<usize>>>) -> Result<Agent> {
        if producers.is_empty() {
            return Err(SynthesisError::Arity {
                agent: id.into(),
                expected: 1,
                found: 0,
            });
        }
        let mut owner: HashMap<&str, &str> = HashMap::new();
        for p in producers {
            for f in p.features() {
                if let Some(first) = owner.insert(f, &p.id) {
                    return Err(SynthesisError::OverlappingFeature {
                        feature: f.clone(),
                        first: first.into(),
                        second: p.id.clone(),
                    });
                }
            }
        }
        let sizes: Vec<usize> = producers.iter().map(|p| p.universe.n_objects()).collect();
        let components = match selectors {
            Some(sel) => {
                for s in &sel {
                    if s.len() != producers.len() || s.iter().zip(&sizes).any(|(i, n)| i >= n) {
                        return Err(SynthesisError::BadSelector {
                            agent: id.into(),
                            selector: s.clone(),
                        });
                    }
                }
                let mut seen = HashSet::new();
                sel.into_iter().filter(|s| seen.insert(s.clone())).collect()
            }
            None => {
                let total = sizes
                    .iter()
                    .try_fold(1usize, |acc, &n| acc.checked_mul(n).filter(|&t| t <= MAX_PRODUCT))
                    .ok_or_else(|| SynthesisError::ProductTooLarge(id.into()))?;
                let ranges: Vec<Vec<usize>> = sizes.iter().map(|&n| (0..n).collect()).collect();
                let out = cartesian(&ranges);
                debug_assert_eq!(out.len(), total);
                out
            }
        };
        let index: HashMap<Vec<usize>, usize> = components.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();

        let features: Vec<String> = producers.iter().flat_map(|p| p.features().iter().cloned()).collect();
        let rows: Vec<Vec<String>> = components
            .iter()
            .map(|c| {
                producers
                    .iter()
                    .zip(c)
                    .flat_map(|(p, &o)| p.universe.row_tokens(o).into_iter().map(String::from))
                    .collect()
            })
            .collect();
        let universe = InformationSystem::new(features, &rows)?;

        let target_sets: Vec<Vec<usize>> = producers.iter().map(|p| p.targets.clone()).collect();
        let mut targets = Vec::new();
        for parts in cartesian(&target_sets) {
            match index.get(&parts) {
                Some(&o) => targets.push(o),
                None => {
                    return Err(SynthesisError::TargetFusionMissing {
                        agent: id.into(),
                        parts,
                    })
                }
            }
        }
        let weights: Vec<&FeatureWeights> = producers.iter().map(|p| p.weights()).collect();
        Ok(Agent {
            id: id.into(),
            universe,
            targets,
            inclusion: ObjectInclusion::Exponential(FeatureWeights::fused(&weights)),
            wiring: Some(Wiring {
                producers: producers.iter().map(|p| p.id.clone()).collect(),
                widths: producers.iter().map(|p| p.universe.n_features()).collect(),
                components,
                index,
            }),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn features(&self) -> &[String] {
        self.universe.features()
    }

    pub fn universe(&self) -> &InformationSystem {
        &self.universe
    }

    /// Target object ids, in declaration order.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn weights(&self) -> &FeatureWeights {
        match &self.inclusion {
            ObjectInclusion::Exponential(w) => w,
            ObjectInclusion::Lukasiewicz => unreachable!("agents grade with the exponential inclusion"),
        }
    }

    pub fn inclusion(&self) -> &ObjectInclusion {
        &self.inclusion
    }

    /// Producer ids, empty for input agents.
    pub fn producers(&self) -> &[String] {
        self.wiring.as_ref().map_or(&[], |w| &w.producers)
    }

    /// Producer objects fused into consumer object `o`.
    pub fn components(&self, o: usize) -> Option<&[usize]> {
        self.wiring.as_ref().map(|w| w.components[o].as_slice())
    }

    /// Consumer object fusing the given producer objects.
    pub fn object_of(&self, parts: &[usize]) -> Option<usize> {
        self.wiring.as_ref().and_then(|w| w.index.get(parts).copied())
    }

    fn wiring(&self) -> Result<&Wiring> {
        self.wiring
            .as_ref()
            .ok_or_else(|| SynthesisError::NotAConsumer(self.id.clone()))
    }

    fn check_width(&self, entity: &[String]) -> Result<()> {
        if entity.len() != self.universe.n_features() {
            return Err(SynthesisError::EntityWidth {
                agent: self.id.clone(),
                expected: self.universe.n_features(),
                found: entity.len(),
            });
        }
        Ok(())
    }

    /// Concatenation of one entity per producer.
    pub fn fuse_entities(&self, parts: &[Vec<String>]) -> Result<Vec<String>> {
        let w = self.wiring()?;
        if parts.len() != w.widths.len() {
            return Err(SynthesisError::Arity {
                agent: self.id.clone(),
                expected: w.widths.len(),
                found: parts.len(),
            });
        }
        for (p, (part, &width)) in parts.iter().zip(&w.widths).enumerate() {
            if part.len() != width {
                return Err(SynthesisError::EntityWidth {
                    agent: w.producers[p].clone(),
                    expected: width,
                    found: part.len(),
                });
            }
        }
        Ok(parts.concat())
    }

    /// Exponential degree of `entity` in object `o`.
    pub fn degree_to(&self, entity: &[String], o: usize) -> Result<f64> {
        self.check_width(entity)?;
        Ok(exp_degree(
            &as_strs(entity),
            &self.universe.row_tokens(o),
            self.weights(),
        ))
    }

    /// Nearest target by exponential degree; ties go to the earlier
    /// target. Returns the target's position in [`Agent::targets`].
    pub fn classify_to_target(&self, entity: &[String]) -> Result<(usize, f64)> {
        self.check_width(entity)?;
        let entity = as_strs(entity);
        let mut best = (0, f64::NEG_INFINITY);
        for (i, &t) in self.targets.iter().enumerate() {
            let d = exp_degree(&entity, &self.universe.row_tokens(t), self.weights());
            if d > best.1 {
                best = (i, d);
            }
        }
        Ok(best)
    }

    /// Granule of this agent's universe around object `center`.
    pub fn granule(&self, center: usize, radius: f64) -> Granule {
        granule(center, radius, &self.inclusion, &self.universe)
    }

    /// Fusion of one granule per producer: every consumer object whose
    /// parts lie in the respective granules, centered at the fused
    /// centers, with the Łukasiewicz-fused radius.
    pub fn fuse_granules(&self, parts: &[&Granule]) -> Result<Granule> {
        let w = self.wiring()?;
        if parts.len() != w.widths.len() {
            return Err(SynthesisError::Arity {
                agent: self.id.clone(),
                expected: w.widths.len(),
                found: parts.len(),
            });
        }
        let centers: Vec<usize> = parts.iter().map(|g| g.center).collect();
        let center = *w.index.get(&centers).ok_or_else(|| SynthesisError::CenterNotObject {
            agent: self.id.clone(),
            parts: centers.clone(),
        })?;
        let radius = parts
            .iter()
            .skip(1)
            .fold(parts[0].radius, |r, g| fuse_degrees(r, g.radius));
        let members = ObjectSet::from_indices(
            w.components.len(),
            w.components
                .iter()
                .enumerate()
                .filter(|(_, c)| {
                    c.iter()
                        .zip(parts)
                        .all(|(&o, g)| o < g.members.capacity() && g.members.contains(o))
                })
                .map(|(i, _)| i),
        );
        Ok(Granule {
            center,
            radius,
            members,
        })
    }
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn cartesian(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for set in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                set.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// One agent's step in a propagation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentStep {
    pub agent: String,
    pub entity: Vec<String>,
    /// Position of the chosen target among the agent's targets.
    pub target_index: usize,
    pub target: Vec<String>,
    pub degree: f64,
    /// Łukasiewicz fusion of the producers' degrees.
    pub bound: Option<f64>,
    /// Whether the degree reaches the largest producer degree.
    pub meets_max: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeTrace {
    pub layers: Vec<Vec<AgentStep>>,
    pub output_target: Vec<String>,
    pub output_degree: f64,
}

/// Agents in layers; every consumer reads agents of the layer below.
#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<Vec<Agent>>,
    /// For each consumer, positions of its producers in the layer below.
    inputs: Vec<Vec<Vec<usize>>>,
}

impl Network {
    pub fn new(layers: Vec<Vec<Agent>>) -> Result<Network> {
        let last = layers.last().ok_or(SynthesisError::EmptyNetwork)?;
        if last.len() != 1 {
            return Err(SynthesisError::OutputLayer(last.len()));
        }
        let mut ids = HashSet::new();
        let mut inputs = Vec::with_capacity(layers.len());
        for (i, layer) in layers.iter().enumerate() {
            let mut layer_inputs = Vec::with_capacity(layer.len());
            for agent in layer {
                if !ids.insert(agent.id.clone()) {
                    return Err(SynthesisError::DuplicateAgent(agent.id.clone()));
                }
                match (i, &agent.wiring) {
                    (0, None) => layer_inputs.push(Vec::new()),
                    (0, Some(_)) => return Err(SynthesisError::InputWithProducers(agent.id.clone())),
                    (_, None) => return Err(SynthesisError::ConsumerWithoutProducers(i, agent.id.clone())),
                    (_, Some(w)) => {
                        let below = &layers[i - 1];
                        let mut pos = Vec::with_capacity(w.producers.len());
                        for (k, pid) in w.producers.iter().enumerate() {
                            let p = below.iter().position(|a| a.id == *pid).ok_or_else(|| {
                                SynthesisError::UnknownProducer {
                                    agent: agent.id.clone(),
                                    producer: pid.clone(),
                                }
                            })?;
                            if below[p].universe.n_features() != w.widths[k] {
                                return Err(SynthesisError::UnknownProducer {
                                    agent: agent.id.clone(),
                                    producer: pid.clone(),
                                });
                            }
                            pos.push(p);
                        }
                        layer_inputs.push(pos);
                    }
                }
            }
            inputs.push(layer_inputs);
        }
        Ok(Network { layers, inputs })
    }

    pub fn layers(&self) -> &[Vec<Agent>] {
        &self.layers
    }

    pub fn output(&self) -> &Agent {
        &self.layers[self.layers.len() - 1][0]
    }

    /// Classifies each input at its agent, fuses the entities forward and
    /// classifies again at every layer. Fails if a consumer's degree drops
    /// below the fused producer bound.
    pub fn propagate(&self, input: &[Vec<String>]) -> Result<DegreeTrace> {
        let first = &self.layers[0];
        if input.len() != first.len() {
            return Err(SynthesisError::InputArity {
                expected: first.len(),
                found: input.len(),
            });
        }
        let mut entities: Vec<Vec<String>> = input.to_vec();
        let mut trace: Vec<Vec<AgentStep>> = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                let below = &trace[i - 1];
                entities = layer
                    .iter()
                    .zip(&self.inputs[i])
                    .map(|(agent, pos)| {
                        let parts: Vec<Vec<String>> = pos.iter().map(|&p| below[p].entity.clone()).collect();
                        agent.fuse_entities(&parts)
                    })
                    .collect::<Result<_>>()?;
            }
            let mut steps = Vec::with_capacity(layer.len());
            for (k, (agent, entity)) in layer.iter().zip(&entities).enumerate() {
                let (target_index, degree) = agent.classify_to_target(entity)?;
                let (bound, meets_max) = if i == 0 {
                    (None, None)
                } else {
                    let degrees: Vec<f64> = self.inputs[i][k].iter().map(|&p| trace[i - 1][p].degree).collect();
                    let bound = degrees.iter().skip(1).fold(degrees[0], |r, &d| fuse_degrees(r, d));
                    let max = degrees.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if degree < bound - DEGREE_TOL {
                        return Err(SynthesisError::BoundViolated {
                            agent: agent.id.clone(),
                            degree,
                            bound,
                        });
                    }
                    (Some(bound), Some(degree >= max - DEGREE_TOL))
                };
                let t = agent.targets[target_index];
                steps.push(AgentStep {
                    agent: agent.id.clone(),
                    entity: entity.clone(),
                    target_index,
                    target: agent.universe.row_tokens(t).into_iter().map(String::from).collect(),
                    degree,
                    bound,
                    meets_max,
                });
            }
            trace.push(steps);
        }
        let out = &trace[trace.len() - 1][0];
        Ok(DegreeTrace {
            output_target: out.target.clone(),
            output_degree: out.degree,
            layers: trace,
        })
    }

    /// Reads the TOML network description:
    ///
    /// ```toml
    /// [[layer]]
    /// [[layer.agent]]
    /// id = "left"
    /// features = ["a", "b"]
    /// objects = [["0", "0"], ["0", "1"], ["1", "1"]]   # optional, defaults to targets
    /// targets = [["0", "0"], ["1", "1"]]
    /// weights = [0.5, 0.5]                            # optional
    ///
    /// [[layer]]
    /// [[layer.agent]]
    /// id = "top"
    /// inputs = ["left", "right"]      # optional, defaults to the whole layer below
    /// selectors = [[0, 0], [2, 1]]    # optional, defaults to the full product
    /// ```
    pub fn from_toml(text: &str) -> Result<Network> {
        let file: NetworkFile = toml::from_str(text).map_err(|e| SynthesisError::Parse(e.to_string()))?;
        let mut layers: Vec<Vec<Agent>> = Vec::with_capacity(file.layer.len());
        for (i, layer) in file.layer.into_iter().enumerate() {
            let mut agents = Vec::with_capacity(layer.agent.len());
            for entry in layer.agent {
                let agent = if i == 0 {
                    if entry.inputs.is_some() || entry.selectors.is_some() {
                        return Err(SynthesisError::InputWithProducers(entry.id));
                    }
                    let features = entry
                        .features
                        .ok_or_else(|| SynthesisError::Parse(format!("agent `{}` needs `features`", entry.id)))?;
                    let targets = entry
                        .targets
                        .ok_or_else(|| SynthesisError::Parse(format!("agent `{}` needs `targets`", entry.id)))?;
                    let objects = entry.objects.unwrap_or_else(|| targets.clone());
                    let weights = entry.weights.map(FeatureWeights::new).transpose()?;
                    Agent::input(&entry.id, features, &objects, &targets, weights)?
                } else {
                    if entry.features.is_some()
                        || entry.objects.is_some()
                        || entry.targets.is_some()
                        || entry.weights.is_some()
                    {
                        return Err(SynthesisError::Parse(format!(
                            "consumer `{}` takes only `inputs` and `selectors`",
                            entry.id
                        )));
                    }
                    let below = &layers[i - 1];
                    let producers: Vec<&Agent> = match &entry.inputs {
                        None => below.iter().collect(),
                        Some(names) => names
                            .iter()
                            .map(|n| {
                                below
                                    .iter()
                                    .find(|a| a.id == *n)
                                    .ok_or_else(|| SynthesisError::UnknownProducer {
                                        agent: entry.id.clone(),
                                        producer: n.clone(),
                                    })
                            })
                            .collect::<Result<_>>()?,
                    };
                    Agent::consumer(&entry.id, &producers, entry.selectors)?
                };
                agents.push(agent);
            }
            layers.push(agents);
        }
        Network::new(layers)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    #[serde(default)]
    layer: Vec<LayerFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    #[serde(default)]
    agent: Vec<AgentFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentFile {
    id: String,
    features: Option<Vec<String>>,
    objects: Option<Vec<Vec<String>>>,
    targets: Option<Vec<Vec<String>>>,
    weights: Option<Vec<f64>>,
    inputs: Option<Vec<String>>,
    selectors: Option<Vec<Vec<usize>>>,
}
