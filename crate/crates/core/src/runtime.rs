//! Lockstep process graph.
//!
//! A compiled [`NetworkSpec`] becomes a set of processes that own their state
//! and talk only through single-value channels:
//!
//! - one spike encoder, injecting the evaluation spike
//! - one neuron process per cluster
//! - one dense process per static block and one learning-dense process per
//!   plastic block
//!
//! Every timestep runs the same fixed schedule: encoder, then every synapse
//! (consuming the spikes neurons published on the previous step), then every
//! neuron (consuming the currents synapses published this step). A barrier
//! separates the phases and the steps. Within a phase processes are
//! independent, so they may run on a thread pool; integer current sums make
//! the result independent of execution order and thread count.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphnet::{NetworkParams, NetworkSpec};
use crate::neuron::{ClusterState, LifLongResetConfig};
use crate::synapse::{PlasticSynapse, SparseSynapse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    Encoder,
    NeuronCluster,
    Dense,
    LearningDense,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessInfo {
    pub name: String,
    pub kind: ProcessKind,
}

/// Single-producer, single-consumer slot holding one value per step. The
/// stamp records the step that produced the value so reads can be audited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel<T> {
    value: T,
    stamp: Option<u64>,
}

impl<T> Channel<T> {
    fn new(value: T) -> Self {
        Channel { value, stamp: None }
    }

    fn publish(&mut self, step: u64) -> &mut T {
        self.stamp = Some(step);
        &mut self.value
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn stamp(&self) -> Option<u64> {
        self.stamp
    }
}

/// Where and when the encoder injects its spike.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpikeEncoderConfig {
    pub cluster: usize,
    pub index: usize,
    /// Step within the target cluster's cycle.
    pub injection_step: u64,
    pub amplitude: i32,
}

/// One-hot spike vector of length `size` at `injection_step`, silence
/// otherwise.
pub fn encode(cfg: &SpikeEncoderConfig, size: usize, local_t: u64) -> Result<Vec<bool>> {
    if cfg.index >= size {
        return Err(Error::TargetOutOfRange {
            cluster: cfg.cluster.to_string(),
            index: cfg.index,
            size,
        });
    }
    let mut spikes = vec![false; size];
    spikes[cfg.index] = local_t == cfg.injection_step;
    Ok(spikes)
}

#[derive(Debug, Clone)]
struct NeuronProcess {
    name: String,
    config: LifLongResetConfig,
    state: ClusterState,
    /// Synapse processes feeding this cluster.
    incoming: Vec<usize>,
    input: Vec<i32>,
    input_acc: Vec<i64>,
    spikes: Channel<Vec<bool>>,
    saturation_events: u64,
}

#[derive(Debug, Clone)]
enum Block {
    Static(SparseSynapse),
    Plastic(PlasticSynapse),
}

#[derive(Debug, Clone)]
struct SynapseProcess {
    name: String,
    src: usize,
    dst: usize,
    block: Block,
    currents: Channel<Vec<i32>>,
}

/// Lockstep-soundness audit counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChannelAudit {
    pub reads: u64,
    /// Reads of a value produced later in the schedule than allowed.
    pub violations: u64,
}

/// Spike and weight observations from one [`ProcessGraph::run_window`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub start_t: u64,
    pub steps: u64,
    /// Cluster names, in the order used by the count vectors.
    pub clusters: Vec<String>,
    /// `spike_counts[step][cluster]`.
    pub spike_counts: Vec<Vec<u32>>,
    /// Spikes per neuron over the window, `neuron_totals[cluster][neuron]`.
    pub neuron_totals: Vec<Vec<u32>>,
    /// Final plastic weights, `(block name, row-major weights)`.
    pub plastic: Vec<(String, Vec<i32>)>,
    pub injected_spikes: u32,
    pub saturation_events: u64,
}

/// How a step's independent processes are executed.
#[derive(Clone, Default)]
pub enum Executor {
    #[default]
    Sequential,
    Pool(Arc<rayon::ThreadPool>),
}

impl Executor {
    pub fn threads(n: usize) -> Result<Self> {
        if n <= 1 {
            return Ok(Executor::Sequential);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|p| Executor::Pool(Arc::new(p)))
            .map_err(|e| Error::param("workers", e.to_string()))
    }
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Executor::Sequential => f.write_str("Sequential"),
            Executor::Pool(p) => write!(f, "Pool({})", p.current_num_threads()),
        }
    }
}

/// A built, runnable network.
#[derive(Debug, Clone)]
pub struct ProcessGraph {
    /// `(cluster process, local index)` per paper.
    placement: Vec<(usize, usize)>,
    encoder_amplitude: i32,
    params: NetworkParams,
    neurons: Vec<NeuronProcess>,
    synapses: Vec<SynapseProcess>,
    encoder: Option<SpikeEncoderConfig>,
    t: u64,
    executor: Executor,
    audit: ChannelAudit,
}

impl ProcessGraph {
    /// Wires one process per cluster and block. Processes are ordered by
    /// name, so the declaration order in `spec` does not affect execution.
    pub fn build(spec: &NetworkSpec) -> Result<Self> {
        if spec.clusters.is_empty() {
            return Err(Error::Build {
                block: "network".into(),
                reason: "no clusters".into(),
            });
        }
        let mut names: Vec<&str> = spec.clusters.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Build {
                block: w[0].to_string(),
                reason: "duplicate cluster name".into(),
            });
        }

        // Cluster order in the spec -> position in the name-sorted process list.
        let mut order: Vec<usize> = (0..spec.clusters.len()).collect();
        order.sort_by(|&a, &b| spec.clusters[a].name.cmp(&spec.clusters[b].name));
        let mut position = vec![0; order.len()];
        for (pos, &c) in order.iter().enumerate() {
            position[c] = pos;
        }

        let mut neurons = Vec::with_capacity(order.len());
        for &c in &order {
            let cs = &spec.clusters[c];
            let state = ClusterState::new(cs.size, &cs.config).map_err(|e| Error::Build {
                block: cs.name.clone(),
                reason: e.to_string(),
            })?;
            neurons.push(NeuronProcess {
                name: cs.name.clone(),
                config: cs.config,
                state,
                incoming: Vec::new(),
                input: vec![0; cs.size],
                input_acc: vec![0; cs.size],
                spikes: Channel::new(vec![false; cs.size]),
                saturation_events: 0,
            });
        }

        let endpoint = |src: usize, dst: usize, kind: &str| -> Result<(String, usize, usize)> {
            let name_of = |i: usize| spec.clusters.get(i).map(|c| c.name.clone());
            match (name_of(src), name_of(dst)) {
                (Some(s), Some(d)) => Ok((format!("{s}->{d}"), position[src], position[dst])),
                _ => Err(Error::Build {
                    block: format!("{kind} {src}->{dst}"),
                    reason: "dangling channel: cluster index out of range".into(),
                }),
            }
        };

        let mut synapses = Vec::new();
        for b in &spec.static_blocks {
            let (name, src, dst) = endpoint(b.src, b.dst, "static")?;
            let shape = (neurons[src].state.len(), neurons[dst].state.len());
            let block = SparseSynapse::new(shape.0, shape.1, &b.entries, b.delay).map_err(|e| Error::Build {
                block: name.clone(),
                reason: e.to_string(),
            })?;
            synapses.push((name, src, dst, Block::Static(block)));
        }
        for b in &spec.plastic_blocks {
            let (name, src, dst) = endpoint(b.src, b.dst, "plastic")?;
            let shape = (neurons[src].state.len(), neurons[dst].state.len());
            let block =
                PlasticSynapse::new(shape.0, shape.1, b.initial_weight, b.delay, b.stdp).map_err(|e| Error::Build {
                    block: format!("{name} (plastic)"),
                    reason: e.to_string(),
                })?;
            synapses.push((name, src, dst, Block::Plastic(block)));
        }
        synapses.sort_by(|a, b| {
            let kind = |blk: &Block| matches!(blk, Block::Plastic(_));
            (&a.0, kind(&a.3)).cmp(&(&b.0, kind(&b.3)))
        });
        if let Some(w) = synapses.windows(2).find(|w| {
            w[0].0 == w[1].0
                && matches!(
                    (&w[0].3, &w[1].3),
                    (Block::Static(_), Block::Static(_)) | (Block::Plastic(_), Block::Plastic(_))
                )
        }) {
            return Err(Error::Build {
                block: w[0].0.clone(),
                reason: "duplicate block between the same clusters".into(),
            });
        }

        let synapses: Vec<SynapseProcess> = synapses
            .into_iter()
            .map(|(name, src, dst, block)| SynapseProcess {
                currents: Channel::new(vec![0; neurons[dst].state.len()]),
                name,
                src,
                dst,
                block,
            })
            .collect();
        for (k, s) in synapses.iter().enumerate() {
            neurons[s.dst].incoming.push(k);
        }

        Ok(ProcessGraph {
            placement: spec.placement.iter().map(|&(c, i)| (position[c], i)).collect(),
            encoder_amplitude: spec.encoder_amplitude,
            params: spec.params,
            neurons,
            synapses,
            encoder: None,
            t: 0,
            executor: Executor::Sequential,
            audit: ChannelAudit::default(),
        })
    }

    pub fn with_executor(mut self, executor: Executor) -> Self {
        self.executor = executor;
        self
    }

    pub fn set_executor(&mut self, executor: Executor) {
        self.executor = executor;
    }

    /// Processes in schedule order.
    pub fn processes(&self) -> Vec<ProcessInfo> {
        let mut out = vec![ProcessInfo {
            name: "encoder".into(),
            kind: ProcessKind::Encoder,
        }];
        out.extend(self.synapses.iter().map(|s| ProcessInfo {
            name: s.name.clone(),
            kind: match s.block {
                Block::Static(_) => ProcessKind::Dense,
                Block::Plastic(_) => ProcessKind::LearningDense,
            },
        }));
        out.extend(self.neurons.iter().map(|n| ProcessInfo {
            name: n.name.clone(),
            kind: ProcessKind::NeuronCluster,
        }));
        out
    }

    /// `(cluster process, local index)` of a paper, if placed.
    pub fn placement(&self, paper: usize) -> Option<(usize, usize)> {
        self.placement.get(paper).copied()
    }

    /// Parameters the network was compiled from.
    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn encoder_amplitude(&self) -> i32 {
        self.encoder_amplitude
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn audit(&self) -> ChannelAudit {
        self.audit
    }

    pub fn cluster_names(&self) -> Vec<String> {
        self.neurons.iter().map(|n| n.name.clone()).collect()
    }

    /// Process position of a cluster, by name.
    pub fn cluster(&self, name: &str) -> Option<usize> {
        self.neurons.iter().position(|n| n.name == name)
    }

    pub fn cluster_state(&self, cluster: usize) -> &ClusterState {
        &self.neurons[cluster].state
    }

    pub fn cluster_config(&self, cluster: usize) -> &LifLongResetConfig {
        &self.neurons[cluster].config
    }

    /// Spikes the cluster published on the last step.
    pub fn last_spikes(&self, cluster: usize) -> &[bool] {
        self.neurons[cluster].spikes.value()
    }

    /// The plastic block from `src` to `dst`, by cluster name.
    pub fn plastic_block(&self, src: &str, dst: &str) -> Option<&PlasticSynapse> {
        let name = format!("{src}->{dst}");
        self.synapses.iter().find_map(|s| match &s.block {
            Block::Plastic(p) if s.name == name => Some(p),
            _ => None,
        })
    }

    /// Static blocks as `(name, block)`.
    pub fn static_blocks(&self) -> impl Iterator<Item = (&str, &SparseSynapse)> {
        self.synapses.iter().filter_map(|s| match &s.block {
            Block::Static(b) => Some((s.name.as_str(), b)),
            Block::Plastic(_) => None,
        })
    }

    /// Plastic blocks as `(name, block)`.
    pub fn plastic_blocks(&self) -> impl Iterator<Item = (&str, &PlasticSynapse)> {
        self.synapses.iter().filter_map(|s| match &s.block {
            Block::Plastic(b) => Some((s.name.as_str(), b)),
            Block::Static(_) => None,
        })
    }

    /// Arms the encoder; `None` disarms it.
    pub fn set_encoder(&mut self, cfg: Option<SpikeEncoderConfig>) -> Result<()> {
        if let Some(c) = &cfg {
            let n = self.neurons.get(c.cluster).ok_or_else(|| Error::TargetOutOfRange {
                cluster: c.cluster.to_string(),
                index: c.index,
                size: 0,
            })?;
            if c.index >= n.state.len() {
                return Err(Error::TargetOutOfRange {
                    cluster: n.name.clone(),
                    index: c.index,
                    size: n.state.len(),
                });
            }
        }
        self.encoder = cfg;
        Ok(())
    }

    /// Executes `steps` lockstep timesteps and reports what happened.
    pub fn run_window(&mut self, steps: u64) -> Observation {
        let start_t = self.t;
        let mut spike_counts = Vec::with_capacity(steps as usize);
        let mut neuron_totals: Vec<Vec<u32>> = self.neurons.iter().map(|n| vec![0; n.state.len()]).collect();
        let mut injected = 0;
        for _ in 0..steps {
            injected += u32::from(self.step());
            spike_counts.push(
                self.neurons
                    .iter()
                    .map(|n| n.spikes.value().iter().filter(|&&s| s).count() as u32)
                    .collect(),
            );
            for (tot, n) in neuron_totals.iter_mut().zip(&self.neurons) {
                for (c, _) in tot.iter_mut().zip(n.spikes.value()).filter(|(_, &s)| s) {
                    *c += 1;
                }
            }
        }
        Observation {
            start_t,
            steps,
            clusters: self.cluster_names(),
            spike_counts,
            neuron_totals,
            plastic: self
                .plastic_blocks()
                .map(|(name, p)| (name.to_string(), p.dense().weights().to_vec()))
                .collect(),
            injected_spikes: injected,
            saturation_events: self.saturation_events(),
        }
    }

    /// Runs `steps` timesteps without collecting an observation.
    pub fn advance(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    /// Total clamp events across all processes so far.
    pub fn saturation_events(&self) -> u64 {
        let neurons: u64 = self
            .neurons
            .iter()
            .map(|n| n.state.saturation_events + n.saturation_events)
            .sum();
        let synapses: u64 = self
            .synapses
            .iter()
            .map(|s| match &s.block {
                Block::Static(b) => b.saturation_events,
                Block::Plastic(p) => p.saturation_events(),
            })
            .sum();
        neurons + synapses
    }

    /// One lockstep timestep. Returns whether the encoder injected a spike.
    fn step(&mut self) -> bool {
        let t = self.t;

        // Encoder.
        let injection = self.encoder.and_then(|c| {
            let cycle = self.neurons[c.cluster].config.cycle_len();
            (t % cycle == c.injection_step).then_some(c)
        });

        // Synapses read spikes published on an earlier step.
        let neurons = &self.neurons;
        let violations = |s: &SynapseProcess| {
            let early = |c: &Channel<Vec<bool>>| u64::from(c.stamp().is_some_and(|st| st >= t));
            early(&neurons[s.src].spikes) + early(&neurons[s.dst].spikes)
        };
        let run_synapse = |s: &mut SynapseProcess| {
            let pre = neurons[s.src].spikes.value();
            let post = neurons[s.dst].spikes.value();
            let learn = !neurons[s.dst].config.in_reset_window(t);
            let out = s.currents.publish(t);
            let res = match &mut s.block {
                Block::Static(b) => b.forward_into(pre, out),
                Block::Plastic(p) => p.step_into(pre, post, learn, out),
            };
            res.expect("shapes are fixed at build time");
        };
        let mut reads = 0;
        let mut bad = 0;
        for s in &self.synapses {
            reads += 2;
            bad += violations(s);
        }
        match &self.executor {
            Executor::Sequential => self.synapses.iter_mut().for_each(run_synapse),
            Executor::Pool(pool) => {
                let synapses = &mut self.synapses;
                pool.install(|| synapses.par_iter_mut().for_each(run_synapse));
            }
        }

        // Neurons read currents published this step.
        let synapses = &self.synapses;
        for n in &self.neurons {
            for &k in &n.incoming {
                reads += 1;
                bad += u64::from(synapses[k].currents.stamp() != Some(t));
            }
        }
        let run_neuron = |(pos, n): (usize, &mut NeuronProcess)| {
            n.input_acc.fill(0);
            for &k in &n.incoming {
                for (a, &c) in n.input_acc.iter_mut().zip(synapses[k].currents.value()) {
                    *a += i64::from(c);
                }
            }
            if let Some(c) = injection.filter(|c| c.cluster == pos) {
                n.input_acc[c.index] += i64::from(c.amplitude);
            }
            for (x, &a) in n.input.iter_mut().zip(&n.input_acc) {
                let (v, s) = crate::fxp::saturate(a);
                *x = v;
                n.saturation_events += u64::from(s);
            }
            let spikes = n.spikes.publish(t);
            n.state
                .step_into(&n.input, &n.config, spikes)
                .expect("shapes are fixed at build time");
        };
        match &self.executor {
            Executor::Sequential => self.neurons.iter_mut().enumerate().for_each(run_neuron),
            Executor::Pool(pool) => {
                let neurons = &mut self.neurons;
                pool.install(|| neurons.par_iter_mut().enumerate().for_each(run_neuron));
            }
        }

        self.audit.reads += reads;
        self.audit.violations += bad;
        self.t += 1;
        injection.is_some()
    }

    /// Zeroes every cluster and clears all delay lines, traces and plastic
    /// weights (back to their initial values). Static weights are untouched.
    pub fn reset_learning_state(&mut self) {
        for n in &mut self.neurons {
            n.state.apply_reset();
            n.spikes.value.fill(false);
        }
        for s in &mut self.synapses {
            match &mut s.block {
                Block::Static(b) => b.clear_delay(),
                Block::Plastic(p) => {
                    let w0 = p.initial_weight();
                    p.reset_plastic(w0);
                }
            }
            s.currents.value.fill(0);
        }
    }

    /// Checks that the graph sits at a cycle boundary with all state cleared.
    pub fn check_quiescent(&self) -> Result<()> {
        for n in &self.neurons {
            if !self.t.is_multiple_of(n.config.cycle_len()) {
                return Err(Error::NotQuiescent(format!(
                    "t={} is not at a window boundary of `{}`",
                    self.t, n.name
                )));
            }
            if !n.state.is_quiescent() {
                return Err(Error::NotQuiescent(format!("cluster `{}` holds state", n.name)));
            }
        }
        for s in &self.synapses {
            let clean = match &s.block {
                Block::Static(b) => b.is_delay_clear(),
                Block::Plastic(p) => p.is_pristine(),
            };
            if !clean {
                return Err(Error::NotQuiescent(format!("block `{}` holds state", s.name)));
            }
        }
        Ok(())
    }
}
