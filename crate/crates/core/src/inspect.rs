//! Per-step neuron traces and weight dumps for external plotting.

use crate::error::{Error, Result};
use crate::fxp::Q12Decay;
use crate::neuron::{ClusterState, LifLongResetConfig};
use crate::runtime::ProcessGraph;
use crate::synapse::DenseSynapse;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub t: u64,
    pub neuron: String,
    pub u: i32,
    pub v: i32,
    pub spike: bool,
}

pub const TRACE_HEADER: &str = "t,neuron,u,v,spike";

pub fn render_trace(rows: &[TraceRow]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.t, r.neuron, r.u, r.v, u8::from(r.spike)));
    }
    out
}

/// The two-neuron demo: neuron 0 is driven on even steps, neuron 1 listens to
/// the same drive and to neuron 0 with a one-step lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoVariant {
    LongReset,
    /// Same network without reset windows.
    PlainLif,
}

pub const DEMO_DU: u16 = 2048;
pub const DEMO_DV: u16 = 512;
pub const DEMO_VTH: i32 = 1000;
pub const DEMO_RESET_INTERVAL: u32 = 10;
pub const DEMO_RESET_LENGTH: u32 = 4;
/// Drive per input spike, per neuron.
pub const DEMO_DRIVE: [i32; 2] = [400, 150];
pub const DEMO_COUPLING: i32 = 300;

pub fn demo_config(variant: DemoVariant) -> LifLongResetConfig {
    let reset_length = match variant {
        DemoVariant::LongReset => DEMO_RESET_LENGTH,
        DemoVariant::PlainLif => 0,
    };
    LifLongResetConfig {
        du: Q12Decay::new(DEMO_DU).expect("in range"),
        dv: Q12Decay::new(DEMO_DV).expect("in range"),
        vth: DEMO_VTH,
        refractory: 0,
        reset_interval: DEMO_RESET_INTERVAL,
        reset_length,
        bias: 0,
    }
}

/// Traces of the demo for `steps` steps, rows ordered by step then neuron.
pub fn reset_demo(steps: u64, variant: DemoVariant) -> Vec<TraceRow> {
    let config = demo_config(variant);
    let mut state = ClusterState::new(2, &config).expect("valid demo config");
    let mut previous = [false; 2];
    let mut rows = Vec::with_capacity(2 * steps as usize);
    for t in 0..steps {
        let drive = t % 2 == 0;
        let input = [
            if drive { DEMO_DRIVE[0] } else { 0 },
            if drive { DEMO_DRIVE[1] } else { 0 } + if previous[0] { DEMO_COUPLING } else { 0 },
        ];
        let spikes = state.step(&input, &config).expect("matching lengths");
        for (n, &spike) in spikes.iter().enumerate() {
            rows.push(TraceRow {
                t,
                neuron: n.to_string(),
                u: state.u[n],
                v: state.v[n],
                spike,
            });
        }
        previous = [spikes[0], spikes[1]];
    }
    rows
}

/// A neuron of a built network, `cluster:index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeuronRef {
    pub cluster: usize,
    pub index: usize,
    pub label: String,
}

/// Parses `cluster:index` selectors against `net`.
pub fn parse_selector(net: &ProcessGraph, selector: &str) -> Result<NeuronRef> {
    let bad = |reason: String| Error::param("neuron", format!("`{selector}`: {reason}"));
    let (name, index) = selector
        .split_once(':')
        .ok_or_else(|| bad("expected cluster:index".into()))?;
    let cluster = net
        .cluster(name)
        .ok_or_else(|| bad(format!("no cluster `{name}`, have {:?}", net.cluster_names())))?;
    let index: usize = index.parse().map_err(|_| bad("index is not a number".into()))?;
    let size = net.cluster_state(cluster).len();
    if index >= size {
        return Err(bad(format!("cluster `{name}` has {size} neurons")));
    }
    Ok(NeuronRef {
        cluster,
        index,
        label: selector.to_string(),
    })
}

/// Steps `net` and records the selected neurons after every step.
pub fn trace_network(net: &mut ProcessGraph, neurons: &[NeuronRef], steps: u64) -> Vec<TraceRow> {
    let mut rows = Vec::with_capacity(neurons.len() * steps as usize);
    for _ in 0..steps {
        let t = net.time();
        net.advance(1);
        for n in neurons {
            let s = net.cluster_state(n.cluster);
            rows.push(TraceRow {
                t,
                neuron: n.label.clone(),
                u: s.u[n.index],
                v: s.v[n.index],
                spike: net.last_spikes(n.cluster)[n.index],
            });
        }
    }
    rows
}

pub const WEIGHT_HEADER: &str = "pre,post,weight";

/// `(pre, post, weight)` rows in row-major order.
pub fn weight_rows(synapse: &DenseSynapse) -> Vec<(usize, usize, i32)> {
    let (pre, post) = synapse.shape();
    (0..pre)
        .flat_map(|i| (0..post).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, synapse.weight(i, j)))
        .collect()
}

pub fn render_weights(rows: &[(usize, usize, i32)]) -> String {
    let mut out = String::from(WEIGHT_HEADER);
    out.push('\n');
    for (i, j, w) in rows {
        out.push_str(&format!("{i},{j},{w}\n"));
    }
    out
}
