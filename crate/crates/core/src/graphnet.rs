//! Citation graphs and their compilation into spiking networks.
//!
//! Input files use the Cora layout:
//!
//! - content: one paper per line, `id feature... label`, whitespace separated;
//!   features are read and discarded
//! - cites: one citation per line, `cited citing`
//!
//! Compilation places every paper in one of three clusters (train,
//! validation, test) and adds a seven-neuron topic cluster. Each citation
//! becomes a pair of static synapses (both directions), each training paper
//! is wired to and from its topic neuron, and the validation and test
//! clusters get dense plastic blocks to and from the topic cluster.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fxp::STATE_MAX;
use crate::neuron::LifLongResetConfig;
use crate::synapse::{StdpConfig, TRACE_CAP, WEIGHT_LIMIT};

pub const TRAIN: &str = "train";
pub const VALIDATION: &str = "validation";
pub const TEST: &str = "test";
pub const TOPIC: &str = "topic";

/// Generator used for every seeded draw in this crate.
pub const RNG_NAME: &str = "ChaCha8Rng";
/// ChaCha stream reserved for split sampling.
pub const SPLIT_STREAM: u64 = 0;

const TOY_CONTENT: &str = include_str!("../data/toy/toy.content");
const TOY_CITES: &str = include_str!("../data/toy/toy.cites");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paper {
    pub id: String,
    pub topic: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationGraph {
    pub papers: Vec<Paper>,
    /// Topic labels, sorted; a paper's `topic` indexes this list.
    pub topics: Vec<String>,
    /// Directed `(citing, cited)` paper indices, in file order.
    pub edges: Vec<(usize, usize)>,
    /// Self-citations found in the cites file and dropped.
    pub dropped_self_citations: usize,
}

/// Parses a content file into `(paper id, topic label)` records.
pub fn parse_content(bytes: &[u8]) -> Result<Vec<(String, String)>> {
    const FILE: &str = "content";
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        file: FILE,
        line: 0,
        reason: format!("not UTF-8: {e}"),
    })?;
    let mut records = Vec::new();
    let mut fields_per_line: Option<usize> = None;
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                file: FILE,
                line: line_no,
                reason: "expected an id, features and a label".into(),
            });
        }
        match fields_per_line {
            None => fields_per_line = Some(fields.len()),
            Some(expected) if expected != fields.len() => {
                return Err(Error::Parse {
                    file: FILE,
                    line: line_no,
                    reason: format!("expected {expected} fields, found {}", fields.len()),
                });
            }
            Some(_) => {}
        }
        records.push((fields[0].to_string(), fields[fields.len() - 1].to_string()));
    }
    if records.is_empty() {
        return Err(Error::EmptyFile { file: FILE });
    }
    Ok(records)
}

/// Parses a cites file (`cited citing` per line) into directed
/// `(citing, cited)` index pairs. Self-citations are dropped and counted.
pub fn parse_cites(bytes: &[u8], index: &HashMap<String, usize>) -> Result<(Vec<(usize, usize)>, usize)> {
    const FILE: &str = "cites";
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        file: FILE,
        line: 0,
        reason: format!("not UTF-8: {e}"),
    })?;
    let mut edges = Vec::new();
    let mut self_citations = 0;
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                file: FILE,
                line: line_no,
                reason: format!("expected `cited citing`, found {} fields", fields.len()),
            });
        }
        let lookup = |id: &str| {
            index.get(id).copied().ok_or_else(|| Error::UnknownNode {
                line: line_no,
                id: id.to_string(),
            })
        };
        let cited = lookup(fields[0])?;
        let citing = lookup(fields[1])?;
        if cited == citing {
            log::warn!("cites line {line_no}: dropping self-citation of `{}`", fields[0]);
            self_citations += 1;
            continue;
        }
        edges.push((citing, cited));
    }
    if edges.is_empty() && self_citations == 0 {
        return Err(Error::EmptyFile { file: FILE });
    }
    Ok((edges, self_citations))
}

impl CitationGraph {
    pub fn from_bytes(content: &[u8], cites: &[u8]) -> Result<Self> {
        let records = parse_content(content)?;
        let mut topics: Vec<String> = records.iter().map(|(_, t)| t.clone()).collect();
        topics.sort();
        topics.dedup();
        let topic_index: HashMap<&str, usize> = topics.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();

        let mut index = HashMap::with_capacity(records.len());
        let mut papers = Vec::with_capacity(records.len());
        for (id, label) in &records {
            if index.insert(id.clone(), papers.len()).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
            papers.push(Paper {
                id: id.clone(),
                topic: topic_index[label.as_str()],
            });
        }
        let (edges, dropped_self_citations) = parse_cites(cites, &index)?;
        Ok(CitationGraph {
            papers,
            topics,
            edges,
            dropped_self_citations,
        })
    }

    pub fn load(content: &Path, cites: &Path) -> Result<Self> {
        let read = |p: &Path| {
            std::fs::read(p).map_err(|e| Error::Io {
                path: p.display().to_string(),
                reason: e.to_string(),
            })
        };
        Self::from_bytes(&read(content)?, &read(cites)?)
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn topic_count(&self) -> usize {
        self.topics.len()
    }

    /// Paper indices grouped by topic, each group in index order.
    pub fn members_by_topic(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.topics.len()];
        for (i, p) in self.papers.iter().enumerate() {
            groups[p.topic].push(i);
        }
        groups
    }
}

/// The bundled 24-paper, 3-topic dataset.
pub fn toy_dataset() -> Result<CitationGraph> {
    CitationGraph::from_bytes(TOY_CONTENT.as_bytes(), TOY_CITES.as_bytes())
}

/// Raw text of the bundled dataset, `(content, cites)`.
pub fn toy_dataset_files() -> (&'static str, &'static str) {
    (TOY_CONTENT, TOY_CITES)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SplitSizes {
    pub train_per_topic: usize,
    pub validation: usize,
}

impl SplitSizes {
    pub fn new(train_per_topic: usize, validation: usize) -> Self {
        SplitSizes {
            train_per_topic,
            validation,
        }
    }
}

impl Default for SplitSizes {
    fn default() -> Self {
        SplitSizes::new(20, 140)
    }
}

/// Disjoint train/validation/test paper index sets, each sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Splits `total` into parts proportional to `weights` by largest remainder;
/// ties on the remainder go to the lower index.
pub fn largest_remainder(total: usize, weights: &[usize]) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    if sum == 0 {
        return vec![0; weights.len()];
    }
    let mut quotas: Vec<usize> = weights.iter().map(|&w| total * w / sum).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&k| (std::cmp::Reverse(total * weights[k] % sum), k));
    let short = total - quotas.iter().sum::<usize>();
    for &k in order.iter().take(short) {
        quotas[k] += 1;
    }
    quotas
}

/// Draws `train_per_topic` papers per topic for training, then a
/// topic-proportional validation set from the remainder; everything else is
/// test. Seeded and deterministic.
pub fn make_split(graph: &CitationGraph, sizes: SplitSizes, seed: u64) -> Result<Split> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SPLIT_STREAM);

    let mut train = Vec::new();
    let mut remainders = Vec::new();
    for (topic, mut members) in graph.members_by_topic().into_iter().enumerate() {
        if members.len() < sizes.train_per_topic {
            return Err(Error::TopicTooSmall {
                topic: graph.topics[topic].clone(),
                available: members.len(),
                required: sizes.train_per_topic,
            });
        }
        members.shuffle(&mut rng);
        let rest = members.split_off(sizes.train_per_topic);
        train.extend(members);
        remainders.push(rest);
    }

    let available: usize = remainders.iter().map(Vec::len).sum();
    if sizes.validation > available {
        return Err(Error::ValidationQuotaUnreachable {
            requested: sizes.validation,
            available,
        });
    }
    let counts: Vec<usize> = remainders.iter().map(Vec::len).collect();
    let quotas = largest_remainder(sizes.validation, &counts);

    let mut validation = Vec::new();
    let mut test = Vec::new();
    for (mut rest, quota) in remainders.into_iter().zip(quotas) {
        let tail = rest.split_off(quota);
        validation.extend(rest);
        test.extend(tail);
    }
    train.sort_unstable();
    validation.sort_unstable();
    test.sort_unstable();
    Ok(Split {
        train,
        validation,
        test,
        seed,
    })
}

/// Parameters of a compiled network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkParams {
    pub paper_to_paper_w: i32,
    pub train_to_topic_w: i32,
    /// Sets both STDP time constants.
    pub tau: u32,
    /// Active propagation steps per paper; also the reset interval.
    pub sim_steps: u32,
    pub delay: u32,
    pub reset_length: u32,
    pub lr: i32,
    pub a_plus: i32,
    pub a_minus: i32,
    pub trace_impulse: i32,
    pub initial_plastic_weight: i32,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            paper_to_paper_w: 100,
            train_to_topic_w: 1,
            tau: 30,
            sim_steps: 20,
            delay: 0,
            reset_length: 7,
            lr: 2,
            a_plus: 1,
            a_minus: -1,
            trace_impulse: 16,
            initial_plastic_weight: 0,
        }
    }
}

impl NetworkParams {
    pub fn stdp(&self) -> StdpConfig {
        StdpConfig {
            lr: self.lr,
            a_plus: self.a_plus,
            a_minus: self.a_minus,
            tau_plus: self.tau,
            tau_minus: self.tau,
            trace_impulse: self.trace_impulse,
            w_min: -WEIGHT_LIMIT,
            w_max: WEIGHT_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("paper_to_paper_w", self.paper_to_paper_w),
            ("train_to_topic_w", self.train_to_topic_w),
        ] {
            if !(1..=STATE_MAX).contains(&w) {
                return Err(Error::param(name, format!("{w} outside 1..={STATE_MAX}")));
            }
        }
        if self.sim_steps == 0 {
            return Err(Error::param("sim_steps", "must be positive"));
        }
        if self.reset_length >= self.sim_steps {
            return Err(Error::param(
                "reset_length",
                format!(
                    "{} must be shorter than sim_steps {}",
                    self.reset_length, self.sim_steps
                ),
            ));
        }
        if !(1..=TRACE_CAP).contains(&self.trace_impulse) {
            return Err(Error::param("trace_impulse", format!("outside 1..={TRACE_CAP}")));
        }
        if self.initial_plastic_weight.abs() > WEIGHT_LIMIT {
            return Err(Error::param(
                "initial_plastic_weight",
                format!("outside ±{WEIGHT_LIMIT}"),
            ));
        }
        self.stdp().validate()?;
        self.paper_config().validate()
    }

    /// Train and topic neurons: leak off, threshold 1, no refractory period.
    pub fn relay_config(&self) -> LifLongResetConfig {
        LifLongResetConfig::leak_off(self.sim_steps, self.reset_length)
    }

    /// Validation and test neurons: as relays, but refractory for longer
    /// than one evaluation window so they fire at most once per paper.
    pub fn paper_config(&self) -> LifLongResetConfig {
        self.relay_config().with_refractory(self.sim_steps + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSpec {
    pub name: String,
    pub size: usize,
    pub config: LifLongResetConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticBlockSpec {
    pub src: usize,
    pub dst: usize,
    /// `(pre, post, weight)`; duplicates add.
    pub entries: Vec<(u32, u32, i32)>,
    pub delay: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlasticBlockSpec {
    pub src: usize,
    pub dst: usize,
    pub initial_weight: i32,
    pub delay: u32,
    pub stdp: StdpConfig,
}

/// A runnable network description: clusters plus synapse blocks between
/// them, referenced by cluster index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    pub clusters: Vec<ClusterSpec>,
    pub static_blocks: Vec<StaticBlockSpec>,
    pub plastic_blocks: Vec<PlasticBlockSpec>,
    /// Current delivered by the spike encoder to the paper under evaluation.
    pub encoder_amplitude: i32,
    /// `(cluster, local index)` of every paper, by paper index.
    pub placement: Vec<(usize, usize)>,
    pub params: NetworkParams,
}

impl NetworkSpec {
    pub fn cluster_index(&self, name: &str) -> Option<usize> {
        self.clusters.iter().position(|c| c.name == name)
    }

    pub fn static_synapse_count(&self) -> usize {
        self.static_blocks.iter().map(|b| b.entries.len()).sum()
    }

    pub fn block_name(&self, src: usize, dst: usize) -> String {
        format!("{}->{}", self.clusters[src].name, self.clusters[dst].name)
    }
}

/// Compiles a graph and split into a network.
pub fn compile(graph: &CitationGraph, split: &Split, params: &NetworkParams) -> Result<NetworkSpec> {
    params.validate()?;
    if graph.topic_count() == 0 {
        return Err(Error::param("graph", "no topics"));
    }

    let mut placement = vec![None; graph.len()];
    let mut clusters = Vec::new();
    for (name, members, config) in [
        (TRAIN, &split.train, params.relay_config()),
        (VALIDATION, &split.validation, params.paper_config()),
        (TEST, &split.test, params.paper_config()),
    ] {
        if members.is_empty() {
            continue;
        }
        let c = clusters.len();
        for (local, &paper) in members.iter().enumerate() {
            let slot = placement
                .get_mut(paper)
                .ok_or_else(|| Error::param("split", format!("paper index {paper} outside the graph")))?;
            if slot.replace((c, local)).is_some() {
                return Err(Error::param("split", format!("paper {paper} assigned twice")));
            }
        }
        clusters.push(ClusterSpec {
            name: name.to_string(),
            size: members.len(),
            config,
        });
    }
    let placement: Vec<(usize, usize)> = placement
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| Error::param("split", format!("paper {i} not assigned"))))
        .collect::<Result<_>>()?;
    let topic = clusters.len();
    clusters.push(ClusterSpec {
        name: TOPIC.to_string(),
        size: graph.topic_count(),
        config: params.relay_config(),
    });

    let n = clusters.len();
    let mut blocks: Vec<Vec<(u32, u32, i32)>> = vec![Vec::new(); n * n];
    let mut connect = |a: (usize, usize), b: (usize, usize), w: i32| {
        blocks[a.0 * n + b.0].push((a.1 as u32, b.1 as u32, w));
    };
    for &(citing, cited) in &graph.edges {
        let (a, b) = (placement[citing], placement[cited]);
        connect(a, b, params.paper_to_paper_w);
        connect(b, a, params.paper_to_paper_w);
    }
    for &paper in &split.train {
        let p = placement[paper];
        let t = (topic, graph.papers[paper].topic);
        connect(p, t, params.train_to_topic_w);
        connect(t, p, params.train_to_topic_w);
    }
    let static_blocks = blocks
        .into_iter()
        .enumerate()
        .filter(|(_, e)| !e.is_empty())
        .map(|(k, entries)| StaticBlockSpec {
            src: k / n,
            dst: k % n,
            entries,
            delay: params.delay,
        })
        .collect();

    let stdp = params.stdp();
    let mut plastic_blocks = Vec::new();
    for (c, cluster) in clusters.iter().enumerate().take(topic) {
        if cluster.name == TRAIN {
            continue;
        }
        for (src, dst) in [(c, topic), (topic, c)] {
            plastic_blocks.push(PlasticBlockSpec {
                src,
                dst,
                initial_weight: params.initial_plastic_weight,
                delay: params.delay,
                stdp,
            });
        }
    }

    Ok(NetworkSpec {
        clusters,
        static_blocks,
        plastic_blocks,
        encoder_amplitude: params.paper_to_paper_w,
        placement,
        params: *params,
    })
}
