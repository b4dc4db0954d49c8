//! The multistage survey loop: target, collect responses, grow the sample,
//! evaluate it against the reference profile, and repeat until the score
//! drops to the goal. Also the greedy pruning pass over a finished sample.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::{
    bin_index, check_weights, smoothed_kl, Distribution, Evaluation, KlDirection, DEFAULT_BINS,
    DEFAULT_EPSILON,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::measures::MEASURE_COUNT;
use crate::profile::NetworkProfile;
use crate::strategy::{KBinsMode, Selector, Strategy, TargetSet};

/// Probability that a targeted node answers:
/// `min(1, rate * (degree / avg_degree)^bias_exponent)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseModel {
    pub rate: f64,
    pub bias_exponent: f64,
}

impl Default for ResponseModel {
    fn default() -> Self {
        ResponseModel {
            rate: 1.0,
            bias_exponent: 0.0,
        }
    }
}

impl ResponseModel {
    pub fn probability(&self, degree: usize, avg_degree: f64) -> f64 {
        let ratio = if avg_degree > 0.0 {
            degree as f64 / avg_degree
        } else {
            1.0
        };
        (self.rate * ratio.powf(self.bias_exponent)).clamp(0.0, 1.0)
    }
}

/// Total degree per node plus the network mean.
#[derive(Clone, Debug)]
pub struct DegreeTable {
    pub degree: HashMap<NodeId, usize>,
    pub average: f64,
}

impl DegreeTable {
    pub fn from_graph(g: &Graph) -> Self {
        let degree: HashMap<NodeId, usize> = g
            .node_ids()
            .iter()
            .map(|&id| (id, g.indegree(id).unwrap() + g.outdegree(id).unwrap()))
            .collect();
        let average = if g.node_count() == 0 {
            0.0
        } else {
            2.0 * g.edge_count() as f64 / g.node_count() as f64
        };
        DegreeTable { degree, average }
    }
}

/// Draws the responders among `targets`; each target answers independently.
pub fn respond(
    targets: &TargetSet,
    model: &ResponseModel,
    degrees: &DegreeTable,
    seed: u64,
) -> BTreeSet<NodeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    respond_with(
        targets,
        model,
        |id| degrees.degree.get(&id).copied().unwrap_or(0),
        degrees.average,
        &mut rng,
    )
}

fn respond_with<R: Rng>(
    targets: &TargetSet,
    model: &ResponseModel,
    degree_of: impl Fn(NodeId) -> usize,
    avg_degree: f64,
    rng: &mut R,
) -> BTreeSet<NodeId> {
    targets
        .iter()
        .filter(|&id| {
            // one draw per target keeps streams aligned across rates
            let u: f64 = rng.gen();
            u < model.probability(degree_of(id), avg_degree)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControllerConfig {
    /// Stop once the score is at or below this value.
    pub ev_opt: f64,
    /// Number of extension stages allowed after the initial survey.
    pub max_stages: usize,
    pub target_size: usize,
    pub strategy: Strategy,
    /// Strategy for the initial target set.
    pub initial: Strategy,
    pub weights: Vec<f64>,
    pub bins: usize,
    pub kbins: KBinsMode,
    pub epsilon: f64,
    pub direction: KlDirection,
    pub response: ResponseModel,
    /// Response rate overrides keyed by stage number.
    pub rate_overrides: BTreeMap<usize, f64>,
    /// Also stop once the sample covers this fraction of the network.
    pub stop_fraction: Option<f64>,
    pub seed: u64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            ev_opt: 0.0,
            max_stages: 100,
            target_size: 10,
            strategy: Strategy::KBins,
            initial: Strategy::Random,
            weights: vec![1.0; MEASURE_COUNT],
            bins: DEFAULT_BINS,
            kbins: KBinsMode::default(),
            epsilon: DEFAULT_EPSILON,
            direction: KlDirection::ReferenceFirst,
            response: ResponseModel::default(),
            rate_overrides: BTreeMap::new(),
            stop_fraction: None,
            seed: 0,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ev_opt.is_nan() || self.ev_opt < 0.0 {
            return Err(Error::config("ev_opt must be >= 0"));
        }
        if self.target_size == 0 {
            return Err(Error::config("target size must be at least one"));
        }
        if self.bins == 0 || self.kbins.k == 0 {
            return Err(Error::config("bin counts must be at least one"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config("epsilon must be a positive number"));
        }
        check_weights(&self.weights, MEASURE_COUNT)?;
        let rate_ok = |r: f64| (0.0..=1.0).contains(&r);
        if !rate_ok(self.response.rate) || self.rate_overrides.values().any(|&r| !rate_ok(r)) {
            return Err(Error::config("response rate must lie in [0, 1]"));
        }
        if self.stop_fraction.is_some_and(|f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::config("stop fraction must lie in (0, 1]"));
        }
        if !self.response.bias_exponent.is_finite() {
            return Err(Error::config("bias exponent must be finite"));
        }
        Ok(())
    }

    fn response_for(&self, stage: usize) -> ResponseModel {
        ResponseModel {
            rate: self
                .rate_overrides
                .get(&stage)
                .copied()
                .unwrap_or(self.response.rate),
            ..self.response
        }
    }

    /// Stage-specific generator: stream `stage` of the run seed.
    fn stage_rng(&self, stage: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stage as u64);
        rng
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleState {
    pub surveyed: BTreeSet<NodeId>,
    /// Last completed stage; `None` before the initial survey.
    pub stage: Option<usize>,
    pub last_evaluation: Evaluation,
}

impl SampleState {
    pub fn new(weights: &[f64]) -> Self {
        SampleState {
            surveyed: BTreeSet::new(),
            stage: None,
            last_evaluation: Evaluation::undefined(weights),
        }
    }

    fn next_stage(&self) -> usize {
        self.stage.map_or(0, |t| t + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub stage: usize,
    pub targeted: usize,
    pub responded: usize,
    pub sample_size: usize,
    pub sample_fraction: f64,
    pub kl: Vec<f64>,
    pub ev: f64,
}

/// Selectors and the profile for one network, shared by runs on it.
#[derive(Clone, Debug)]
pub struct Engine<'a> {
    pub profile: &'a NetworkProfile,
    strategy: Selector,
    initial: Selector,
}

impl<'a> Engine<'a> {
    pub fn new(profile: &'a NetworkProfile, config: &ControllerConfig) -> Result<Self> {
        config.validate()?;
        if config.bins != profile.bins() {
            return Err(Error::config(format!(
                "profile has {} bins, config asks for {}",
                profile.bins(),
                config.bins
            )));
        }
        Ok(Engine {
            profile,
            strategy: Selector::new(config.strategy, profile, config.kbins),
            initial: Selector::new(config.initial, profile, config.kbins),
        })
    }
}

/// Scores a sample against the profile's reference distributions.
pub fn evaluate_nodes(
    profile: &NetworkProfile,
    nodes: &BTreeSet<NodeId>,
    config: &ControllerConfig,
) -> Result<Evaluation> {
    if nodes.is_empty() {
        return Ok(Evaluation::undefined(&config.weights));
    }
    let counts = SampleCounts::from_nodes(profile, nodes)?;
    Ok(counts.evaluate(profile.reference(), config))
}

/// Runs the next stage: stage 0 uses the initial strategy over all nodes,
/// later stages the configured strategy over unsurveyed nodes.
pub fn run_stage(
    state: SampleState,
    engine: &Engine<'_>,
    config: &ControllerConfig,
) -> Result<(SampleState, StageRecord)> {
    let stage = state.next_stage();
    let profile = engine.profile;
    let mut rng = config.stage_rng(stage);
    let selector = if stage == 0 {
        &engine.initial
    } else {
        &engine.strategy
    };
    let targets = selector.select(&state.surveyed, config.target_size, &mut rng);
    let responders = respond_with(
        &targets,
        &config.response_for(stage),
        |id| profile.get(id).map(|m| m.degree).unwrap_or(0),
        profile.avg_degree(),
        &mut rng,
    );

    let SampleState {
        mut surveyed,
        last_evaluation,
        ..
    } = state;
    let evaluation = if responders.is_empty() {
        last_evaluation
    } else {
        surveyed.extend(responders.iter().copied());
        evaluate_nodes(profile, &surveyed, config)?
    };
    let record = StageRecord {
        stage,
        targeted: targets.len(),
        responded: responders.len(),
        sample_size: surveyed.len(),
        sample_fraction: surveyed.len() as f64 / profile.node_count() as f64,
        kl: evaluation.kl.clone(),
        ev: evaluation.ev,
    };
    Ok((
        SampleState {
            surveyed,
            stage: Some(stage),
            last_evaluation: evaluation,
        },
        record,
    ))
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub records: Vec<StageRecord>,
    pub state: SampleState,
}

pub fn run_mscs(graph: &Graph, config: &ControllerConfig) -> Result<RunResult> {
    config.validate()?;
    let profile = NetworkProfile::new(graph, config.bins)?;
    run_mscs_on(&profile, config)
}

/// Runs the loop on a precomputed profile; stops when the score reaches
/// `ev_opt`, after `max_stages` extension stages, once every node is
/// surveyed, or once `stop_fraction` is reached.
pub fn run_mscs_on(profile: &NetworkProfile, config: &ControllerConfig) -> Result<RunResult> {
    let engine = Engine::new(profile, config)?;
    let mut state = SampleState::new(&config.weights);
    let mut records = Vec::new();
    loop {
        let (next, record) = run_stage(state, &engine, config)?;
        state = next;
        records.push(record);
        let t = state.stage.expect("a stage has run");
        let fraction = state.surveyed.len() as f64 / profile.node_count() as f64;
        if state.last_evaluation.ev <= config.ev_opt
            || t >= config.max_stages
            || state.surveyed.len() == profile.node_count()
            || config.stop_fraction.is_some_and(|f| fraction >= f)
        {
            break;
        }
    }
    Ok(RunResult { records, state })
}

/// Greedily removes the surveyed node whose removal lowers the score most,
/// while the score strictly improves and the sample stays above `min_size`.
pub fn prune_sample(
    state: SampleState,
    profile: &NetworkProfile,
    config: &ControllerConfig,
    min_size: usize,
) -> Result<SampleState> {
    config.validate()?;
    let min_size = min_size.max(1);
    if state.surveyed.len() <= min_size {
        return Ok(state);
    }
    let reference = profile.reference();
    let mut counts = SampleCounts::from_nodes(profile, &state.surveyed)?;
    let mut current = counts.evaluate(reference, config);
    let mut surveyed = state.surveyed;

    while surveyed.len() > min_size {
        let mut best: Option<(NodeId, Evaluation)> = None;
        for &id in &surveyed {
            let bins = counts.bins_of(profile, id)?;
            counts.remove(&bins);
            let candidate = counts.evaluate(reference, config);
            counts.add(&bins);
            if best.as_ref().is_none_or(|(_, b)| candidate.ev < b.ev) {
                best = Some((id, candidate));
            }
        }
        let (id, evaluation) = best.expect("sample is non-empty");
        if evaluation.ev >= current.ev {
            break;
        }
        let bins = counts.bins_of(profile, id)?;
        counts.remove(&bins);
        surveyed.remove(&id);
        current = evaluation;
    }
    Ok(SampleState {
        surveyed,
        stage: state.stage,
        last_evaluation: current,
    })
}

/// Per-measure bin counts of a sample.
#[derive(Clone, Debug)]
struct SampleCounts {
    counts: Vec<Vec<usize>>,
}

impl SampleCounts {
    fn from_nodes(profile: &NetworkProfile, nodes: &BTreeSet<NodeId>) -> Result<Self> {
        let mut counts = SampleCounts {
            counts: vec![vec![0; profile.bins()]; MEASURE_COUNT],
        };
        for &id in nodes {
            let bins = counts.bins_of(profile, id)?;
            counts.add(&bins);
        }
        Ok(counts)
    }

    fn bins_of(&self, profile: &NetworkProfile, id: NodeId) -> Result<[usize; MEASURE_COUNT]> {
        let m = profile.get(id)?;
        Ok(m.normalized.map(|v| bin_index(v, 1.0, profile.bins())))
    }

    fn add(&mut self, bins: &[usize; MEASURE_COUNT]) {
        for (c, &b) in self.counts.iter_mut().zip(bins) {
            c[b] += 1;
        }
    }

    fn remove(&mut self, bins: &[usize; MEASURE_COUNT]) {
        for (c, &b) in self.counts.iter_mut().zip(bins) {
            c[b] -= 1;
        }
    }

    fn evaluate(&self, reference: &[Distribution], config: &ControllerConfig) -> Evaluation {
        let kl = reference
            .iter()
            .zip(&self.counts)
            .map(|(r, c)| {
                let sample = Distribution::from_counts(c);
                match config.direction {
                    KlDirection::ReferenceFirst => {
                        smoothed_kl(r.probs(), sample.probs(), config.epsilon)
                    }
                    KlDirection::SampleFirst => {
                        smoothed_kl(sample.probs(), r.probs(), config.epsilon)
                    }
                }
            })
            .collect();
        Evaluation::combine(kl, &config.weights)
    }
}
