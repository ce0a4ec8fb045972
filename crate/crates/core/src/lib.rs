//! Integer-only spiking graph neural network for transductive citation-graph
//! classification.
//!
//! A citation graph is compiled directly into a network of spiking neurons:
//! one neuron per paper, one per topic, static synapses along citations and
//! STDP-learned synapses between unlabeled papers and topics. A paper is
//! classified by injecting a single spike into its neuron, letting activity
//! propagate for a fixed number of steps and reading which topic depressed
//! its topic→paper synapse the most. A periodic "long reset" returns the whole
//! network to quiescence between papers, so one compiled network serves every
//! evaluation.
//!
//! All state variables (currents, voltages, traces, weights) are integers;
//! decays use a Q12 fixed-point representation.
//!
//! Module map:
//!
//! - [`fxp`]: Q12 decay and 24-bit saturation kernels
//! - [`neuron`]: LIF neurons with periodic long-reset windows
//! - [`synapse`]: static, sparse and STDP-plastic synapse blocks
//! - [`runtime`]: lockstep process graph executing a compiled network
//! - [`graphnet`]: dataset parsing, splits and network compilation
//! - [`eval`]: per-paper inject/propagate/decode/reset protocol
//! - [`bopt`]: Gaussian-process Bayesian optimization over a discrete grid
//! - [`report`]: plain-text report writers
//!
//! ```
//! use spikegnn::graphnet::{self, NetworkParams, SplitSizes};
//! use spikegnn::{eval, runtime::ProcessGraph};
//!
//! let graph = graphnet::toy_dataset().unwrap();
//! let split = graphnet::make_split(&graph, SplitSizes::new(2, 6), 7).unwrap();
//! let params = NetworkParams { sim_steps: 14, ..NetworkParams::default() };
//! let spec = graphnet::compile(&graph, &split, &params).unwrap();
//! let mut net = ProcessGraph::build(&spec).unwrap();
//!
//! let report = eval::evaluate_set(&mut net, &graph, &split, eval::EvalSet::Validation).unwrap();
//! assert_eq!(report.evaluated(), 6);
//! ```

pub mod bopt;
pub mod error;
pub mod eval;
pub mod fxp;
pub mod graphnet;
pub mod inspect;
pub mod neuron;
pub mod report;
pub mod runtime;
pub mod synapse;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/fixed-point.md")]
    mod fixed_point {}
    #[doc = include_str!("../../../book/src/long-reset.md")]
    mod long_reset {}
    #[doc = include_str!("../../../book/src/stdp.md")]
    mod stdp {}
    #[doc = include_str!("../../../book/src/graph-construction.md")]
    mod graph_construction {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/runtime.md")]
    mod runtime {}
    #[doc = include_str!("../../../book/src/bayesian-optimization.md")]
    mod bayesian_optimization {}
}
