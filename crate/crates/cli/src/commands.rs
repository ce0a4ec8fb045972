use std::io::Write as _;
use std::path::Path;

use spikegnn::bopt::{optimize as bo_optimize, BoResult, BoSettings, SearchSpace, KNOWN_DIMENSIONS};
use spikegnn::eval::{evaluate_set_parallel, EvalReport, EvalSet};
use spikegnn::graphnet::{compile, make_split, toy_dataset, CitationGraph, NetworkParams, Split, TOPIC};
use spikegnn::inspect::{
    parse_selector, render_trace, render_weights, reset_demo, trace_network, weight_rows, DemoVariant,
};
use spikegnn::report::{render_eval, render_history};
use spikegnn::runtime::{ProcessGraph, SpikeEncoderConfig};

use crate::config::{Dataset, RunConfig};
use crate::error::{Failure, Kind};

pub fn load_graph(cfg: &RunConfig) -> Result<CitationGraph, Failure> {
    match cfg.dataset {
        Dataset::Toy => Ok(toy_dataset()?),
        Dataset::Files => {
            let (Some(content), Some(cites)) = (&cfg.content, &cfg.cites) else {
                return Err(Failure::new(
                    Kind::Config,
                    "dataset = \"files\" needs both `content` and `cites`",
                ));
            };
            Ok(CitationGraph::load(content, cites)?)
        }
    }
}

fn build(graph: &CitationGraph, split: &Split, params: &NetworkParams) -> Result<ProcessGraph, Failure> {
    Ok(ProcessGraph::build(&compile(graph, split, params)?)?)
}

/// Evaluates the configured set once.
pub fn evaluate(
    cfg: &RunConfig,
    graph: &CitationGraph,
    split: &Split,
    params: &NetworkParams,
) -> Result<EvalReport, Failure> {
    let net = build(graph, split, params)?;
    Ok(evaluate_set_parallel(
        &net,
        graph,
        split,
        EvalSet::from(cfg.eval_set),
        cfg.workers,
    )?)
}

pub struct RunOutput {
    pub report: EvalReport,
    pub text: String,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput, Failure> {
    let params = cfg.params();
    params.validate()?;
    let graph = load_graph(cfg)?;
    let split = make_split(&graph, cfg.split_sizes(), cfg.split_seed)?;
    let report = evaluate(cfg, &graph, &split, &params)?;
    let text = render_eval(&cfg.to_report_toml(), &report, &graph);
    Ok(RunOutput { report, text })
}

/// Reads a `dimension = [values]` grid file.
pub fn load_grid(path: &Path) -> Result<SearchSpace, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(Kind::Io, format!("cannot read grid {}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        Failure::new(Kind::Config, format!("{}: {}", path.display(), e.message().trim()))
    })?;
    let mut dims = Vec::new();
    for name in KNOWN_DIMENSIONS {
        if let Some(v) = table.get(name) {
            let values = v
                .as_array()
                .and_then(|a| a.iter().map(toml::Value::as_integer).collect::<Option<Vec<i64>>>())
                .ok_or_else(|| Failure::new(Kind::Config, format!("grid `{name}` must be an integer array")))?;
            dims.push((name.to_string(), values));
        }
    }
    if let Some(k) = table.keys().find(|k| !KNOWN_DIMENSIONS.contains(&k.as_str())) {
        return Err(Failure::new(
            Kind::Config,
            format!("unknown grid dimension `{k}`, expected one of {KNOWN_DIMENSIONS:?}"),
        ));
    }
    Ok(SearchSpace::new(dims)?)
}

pub struct OptimizeOutput {
    pub space: SearchSpace,
    pub result: BoResult,
    pub text: String,
}

pub fn optimize(cfg: &RunConfig) -> Result<OptimizeOutput, Failure> {
    cfg.params().validate()?;
    let space = match &cfg.grid {
        Some(p) => load_grid(p)?,
        None => SearchSpace::default_grid(),
    };
    let graph = load_graph(cfg)?;
    let split = make_split(&graph, cfg.split_sizes(), cfg.split_seed)?;
    let base = cfg.params();
    let settings = BoSettings {
        n_init: cfg.bo_init,
        n_iter: cfg.bo_iter,
        seed: cfg.bo_seed,
        eval_seed: cfg.split_seed,
    };
    let objective = |point: &spikegnn::bopt::GridPoint| -> Result<f64, Failure> {
        let params = space.apply(point, base)?;
        let report = evaluate(cfg, &graph, &split, &params)?;
        log::info!("{:?} -> {:?}", point.values, report.accuracy());
        report
            .accuracy()
            .ok_or_else(|| Failure::new(Kind::Runtime, "evaluation set is empty"))
    };
    let result = bo_optimize(objective, &space, settings)?;
    let text = render_history(&cfg.to_report_toml(), &space, &result);
    Ok(OptimizeOutput { space, result, text })
}

/// Selector values that run the built-in two-neuron demo.
pub const DEMO_SELECTOR: &str = "fig2-demo";
pub const PLAIN_SELECTOR: &str = "fig2-plain";

pub struct InspectOutput {
    pub trace: String,
    pub weights: Option<String>,
}

/// Traces the selected neurons for `steps` steps, injecting into `paper`
/// (a paper id) at step 0 when given.
pub fn inspect(cfg: &RunConfig, neurons: &[String], steps: u64, paper: Option<&str>) -> Result<InspectOutput, Failure> {
    if let [only] = neurons {
        let variant = match only.as_str() {
            DEMO_SELECTOR => Some(DemoVariant::LongReset),
            PLAIN_SELECTOR => Some(DemoVariant::PlainLif),
            _ => None,
        };
        if let Some(v) = variant {
            return Ok(InspectOutput {
                trace: render_trace(&reset_demo(steps, v)),
                weights: None,
            });
        }
    }
    if neurons.is_empty() {
        return Err(Failure::new(Kind::Config, "no neurons selected"));
    }
    let params = cfg.params();
    params.validate()?;
    let graph = load_graph(cfg)?;
    let split = make_split(&graph, cfg.split_sizes(), cfg.split_seed)?;
    let mut net = build(&graph, &split, &params)?;
    let refs = neurons
        .iter()
        .map(|s| parse_selector(&net, s).map_err(Failure::from))
        .collect::<Result<Vec<_>, _>>()?;
    let mut weights_of = None;
    if let Some(id) = paper {
        let index = graph
            .papers
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Failure::new(Kind::Params, format!("unknown paper id `{id}`")))?;
        let (cluster, local) = net.placement(index).expect("every paper is placed");
        net.set_encoder(Some(SpikeEncoderConfig {
            cluster,
            index: local,
            injection_step: 0,
            amplitude: net.encoder_amplitude(),
        }))?;
        weights_of = Some(net.cluster_names()[cluster].clone());
    }
    let trace = render_trace(&trace_network(&mut net, &refs, steps));
    let weights = weights_of.and_then(|dst| {
        net.plastic_block(TOPIC, &dst)
            .map(|b| render_weights(&weight_rows(b.dense())))
    });
    Ok(InspectOutput { trace, weights })
}

/// Writes `text` to `path` through a temporary sibling so a failed run
/// leaves no partial file; `None` writes to stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(Kind::Io, format!("stdout: {e}"))),
        Some(p) => {
            let mut tmp = p.as_os_str().to_owned();
            tmp.push(".partial");
            let tmp = std::path::PathBuf::from(tmp);
            std::fs::write(&tmp, text)
                .and_then(|()| std::fs::rename(&tmp, p))
                .map_err(|e| {
                    let _ = std::fs::remove_file(&tmp);
                    Failure::new(Kind::Io, format!("cannot write {}: {e}", p.display()))
                })
        }
    }
}
