//! Per-paper classification protocol and accuracy aggregation.
//!
//! Classifying one paper:
//!
//! 1. check the network is quiescent (state zero, plastic weights at their
//!    initial value, time at a window boundary)
//! 2. inject one spike into the paper's neuron at the first step of the window
//! 3. run the active window (`sim_steps`) with STDP live
//! 4. read the paper's column of the topic→paper plastic block and pick the
//!    most depressed topic
//! 5. run the reset window, then restore all plastic weights
//!
//! Topics fire after the paper they are reached from, so the topic→paper
//! synapse of a topic that lights up early and keeps firing collects the
//! largest depression.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphnet::{CitationGraph, NetworkParams, Split, TEST, TOPIC, VALIDATION};
use crate::runtime::{ProcessGraph, SpikeEncoderConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalSet {
    Validation,
    Test,
}

impl EvalSet {
    pub fn cluster_name(self) -> &'static str {
        match self {
            EvalSet::Validation => VALIDATION,
            EvalSet::Test => TEST,
        }
    }

    pub fn papers(self, split: &Split) -> &[usize] {
        match self {
            EvalSet::Validation => &split.validation,
            EvalSet::Test => &split.test,
        }
    }
}

impl std::fmt::Display for EvalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.cluster_name())
    }
}

impl std::str::FromStr for EvalSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            VALIDATION => Ok(EvalSet::Validation),
            TEST => Ok(EvalSet::Test),
            other => Err(Error::param("eval_set", format!("`{other}` is not validation|test"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperEvalResult {
    pub paper: usize,
    pub predicted: usize,
    pub truth: usize,
    /// Topic→paper weights at the end of the active window, one per topic.
    pub weights: Vec<i32>,
    /// The minimum weight was shared by more than one topic.
    pub tie: bool,
    /// Spikes per topic neuron during the active window.
    pub topic_spikes: Vec<u32>,
    /// Most active topic; diagnostic only.
    pub rate_prediction: usize,
}

impl PaperEvalResult {
    pub fn correct(&self) -> bool {
        self.predicted == self.truth
    }
}

/// Index of the lowest weight; ties resolve to the lowest index and set the
/// flag.
pub fn decode_label(weights: &[i32]) -> (usize, bool) {
    let Some(&min) = weights.iter().min() else {
        return (0, false);
    };
    let first = weights.iter().position(|&w| w == min).unwrap_or(0);
    let tie = weights.iter().filter(|&&w| w == min).count() > 1;
    (first, tie)
}

fn argmax_first(values: &[u32]) -> usize {
    let max = values.iter().copied().max().unwrap_or(0);
    values.iter().position(|&v| v == max).unwrap_or(0)
}

/// Runs the full inject/propagate/decode/reset protocol for one paper.
pub fn evaluate_paper(net: &mut ProcessGraph, graph: &CitationGraph, paper: usize) -> Result<PaperEvalResult> {
    net.check_quiescent()?;
    let (cluster, index) = net
        .placement(paper)
        .ok_or_else(|| Error::param("paper", format!("paper {paper} is not in the network")))?;
    let cluster_name = net.cluster_names()[cluster].clone();
    let topic = net
        .cluster(TOPIC)
        .ok_or_else(|| Error::param("network", "no topic cluster"))?;
    if net.plastic_block(TOPIC, &cluster_name).is_none() {
        return Err(Error::param(
            "paper",
            format!("paper {paper} sits in `{cluster_name}`, which has no learnable topic synapses"),
        ));
    }
    let config = *net.cluster_config(cluster);
    let truth = graph
        .papers
        .get(paper)
        .ok_or_else(|| Error::param("paper", format!("paper {paper} outside the graph")))?
        .topic;

    net.set_encoder(Some(SpikeEncoderConfig {
        cluster,
        index,
        injection_step: 0,
        amplitude: net.encoder_amplitude(),
    }))?;
    let obs = net.run_window(u64::from(config.reset_interval));
    let weights = net
        .plastic_block(TOPIC, &cluster_name)
        .expect("checked above")
        .dense()
        .column(index);
    net.set_encoder(None)?;
    inter_paper_reset(net, u64::from(config.reset_length));

    let (predicted, tie) = decode_label(&weights);
    let topic_spikes = obs.neuron_totals[topic].clone();
    Ok(PaperEvalResult {
        paper,
        predicted,
        truth,
        weights,
        tie,
        rate_prediction: argmax_first(&topic_spikes),
        topic_spikes,
    })
}

/// Lets the network discharge through its reset window, then restores
/// plastic weights, traces and delay lines. Static weights are untouched.
pub fn inter_paper_reset(net: &mut ProcessGraph, reset_length: u64) {
    net.advance(reset_length);
    net.reset_learning_state();
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub set: EvalSet,
    pub topics: Vec<String>,
    pub params: NetworkParams,
    pub split_seed: u64,
    pub results: Vec<PaperEvalResult>,
    /// `confusion[truth][predicted]`.
    pub confusion: Vec<Vec<u32>>,
    pub saturation_events: u64,
}

impl EvalReport {
    fn new(
        set: EvalSet,
        graph: &CitationGraph,
        params: NetworkParams,
        split_seed: u64,
        results: Vec<PaperEvalResult>,
        saturation_events: u64,
    ) -> Self {
        let k = graph.topic_count();
        let mut confusion = vec![vec![0; k]; k];
        for r in &results {
            confusion[r.truth][r.predicted] += 1;
        }
        EvalReport {
            set,
            topics: graph.topics.clone(),
            params,
            split_seed,
            results,
            confusion,
            saturation_events,
        }
    }

    pub fn evaluated(&self) -> usize {
        self.results.len()
    }

    pub fn correct(&self) -> usize {
        self.results.iter().filter(|r| r.correct()).count()
    }

    pub fn ties(&self) -> usize {
        self.results.iter().filter(|r| r.tie).count()
    }

    /// `None` for an empty report.
    pub fn accuracy(&self) -> Option<f64> {
        (!self.results.is_empty()).then(|| self.correct() as f64 / self.results.len() as f64)
    }

    /// Accuracy of the spike-rate decoder, for comparison.
    pub fn rate_accuracy(&self) -> Option<f64> {
        let hits = self.results.iter().filter(|r| r.rate_prediction == r.truth).count();
        (!self.results.is_empty()).then(|| hits as f64 / self.results.len() as f64)
    }
}

/// Evaluates `papers` one after another on a single network.
pub fn evaluate_papers(
    net: &mut ProcessGraph,
    graph: &CitationGraph,
    papers: &[usize],
    set: EvalSet,
    params: NetworkParams,
    split_seed: u64,
) -> Result<EvalReport> {
    let before = net.saturation_events();
    let results = papers
        .iter()
        .map(|&p| evaluate_paper(net, graph, p))
        .collect::<Result<Vec<_>>>()?;
    let saturation = net.saturation_events() - before;
    Ok(EvalReport::new(set, graph, params, split_seed, results, saturation))
}

/// Sequential evaluation of a whole split set.
pub fn evaluate_set(net: &mut ProcessGraph, graph: &CitationGraph, split: &Split, set: EvalSet) -> Result<EvalReport> {
    let params = *net.params();
    evaluate_papers(net, graph, set.papers(split), set, params, split.seed)
}

/// Fans the set out over `workers` independent copies of `net`. The report
/// is identical to [`evaluate_set`].
pub fn evaluate_set_parallel(
    net: &ProcessGraph,
    graph: &CitationGraph,
    split: &Split,
    set: EvalSet,
    workers: usize,
) -> Result<EvalReport> {
    let params = *net.params();
    let papers = set.papers(split);
    if workers <= 1 || papers.len() < 2 {
        return evaluate_set(&mut net.clone(), graph, split, set);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;
    let chunk = papers.len().div_ceil(workers);
    let parts: Vec<Result<(Vec<PaperEvalResult>, u64)>> = pool.install(|| {
        papers
            .par_chunks(chunk)
            .map(|chunk| {
                let mut copy = net.clone();
                let before = copy.saturation_events();
                let r = chunk
                    .iter()
                    .map(|&p| evaluate_paper(&mut copy, graph, p))
                    .collect::<Result<Vec<_>>>()?;
                Ok((r, copy.saturation_events() - before))
            })
            .collect()
    });
    let mut results = Vec::with_capacity(papers.len());
    let mut saturation = 0;
    for part in parts {
        let (r, s) = part?;
        results.extend(r);
        saturation += s;
    }
    Ok(EvalReport::new(set, graph, params, split.seed, results, saturation))
}
