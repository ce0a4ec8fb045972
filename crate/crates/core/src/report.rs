//! Plain-text reports.
//!
//! A report is a sequence of sections. `[config]` carries the caller's
//! effective configuration verbatim, `[summary]` holds `key = value` lines
//! and the remaining sections are CSV tables with a header row.

use std::fmt::Write as _;

use crate::bopt::{BoResult, SearchSpace};
use crate::eval::EvalReport;
use crate::graphnet::{CitationGraph, RNG_NAME, SPLIT_STREAM};

pub const CONFIG_SECTION: &str = "[config]";

/// Formats a fraction with fixed precision, or the empty marker.
pub fn format_fraction(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.6}"),
        None => "\"undefined\"".to_string(),
    }
}

fn csv_table(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

fn section(out: &mut String, name: &str, body: &str) {
    let _ = writeln!(out, "[{name}]");
    out.push_str(body);
    if !body.is_empty() && !body.ends_with('\n') {
        out.push('\n');
    }
    out.push('\n');
}

/// Evaluation report: config, summary, confusion matrix, one row per paper.
pub fn render_eval(config: &str, report: &EvalReport, graph: &CitationGraph) -> String {
    let mut out = String::new();
    section(&mut out, "config", config);

    let mut summary = String::new();
    let _ = writeln!(summary, "set = \"{}\"", report.set);
    let _ = writeln!(summary, "evaluated = {}", report.evaluated());
    let _ = writeln!(summary, "correct = {}", report.correct());
    let _ = writeln!(summary, "accuracy = {}", format_fraction(report.accuracy()));
    let _ = writeln!(summary, "ties = {}", report.ties());
    let _ = writeln!(
        summary,
        "rate_decoder_accuracy = {}",
        format_fraction(report.rate_accuracy())
    );
    let _ = writeln!(summary, "saturation_events = {}", report.saturation_events);
    let _ = writeln!(summary, "split_rng = \"{RNG_NAME}\"");
    let _ = writeln!(summary, "split_stream = {SPLIT_STREAM}");
    let _ = writeln!(summary, "split_seed = {}", report.split_seed);
    section(&mut out, "summary", &summary);

    let mut header = vec!["truth".to_string()];
    header.extend(report.topics.iter().cloned());
    let rows = report.topics.iter().zip(&report.confusion).map(|(t, row)| {
        let mut r = vec![t.clone()];
        r.extend(row.iter().map(u32::to_string));
        r
    });
    section(&mut out, "confusion", &csv_table(&header, rows));

    let mut header: Vec<String> = ["paper", "truth", "predicted", "correct", "tie", "rate_predicted"]
        .map(String::from)
        .to_vec();
    header.extend(report.topics.iter().map(|t| format!("w_{t}")));
    let rows = report.results.iter().map(|r| {
        let mut row = vec![
            graph.papers[r.paper].id.clone(),
            report.topics[r.truth].clone(),
            report.topics[r.predicted].clone(),
            r.correct().to_string(),
            r.tie.to_string(),
            report.topics[r.rate_prediction].clone(),
        ];
        row.extend(r.weights.iter().map(i32::to_string));
        row
    });
    section(&mut out, "papers", &csv_table(&header, rows));
    out
}

/// Optimization history: config, summary, one row per evaluation.
pub fn render_history(config: &str, space: &SearchSpace, result: &BoResult) -> String {
    let mut out = String::new();
    section(&mut out, "config", config);

    let mut summary = String::new();
    let _ = writeln!(summary, "evaluations = {}", result.history.len());
    let _ = writeln!(summary, "grid_size = {}", space.len());
    let _ = writeln!(summary, "exhausted = {}", result.exhausted);
    match result.best_observation() {
        Some(b) => {
            let _ = writeln!(summary, "best_iteration = {}", result.best.unwrap_or(0));
            for (d, v) in space.dims().iter().zip(&b.point.values) {
                let _ = writeln!(summary, "best_{} = {v}", d.name);
            }
            let _ = writeln!(summary, "best_accuracy = {}", format_fraction(Some(b.objective)));
        }
        None => {
            let _ = writeln!(summary, "best_accuracy = {}", format_fraction(None));
        }
    }
    section(&mut out, "summary", &summary);

    let mut header = vec!["iteration".to_string()];
    header.extend(space.dims().iter().map(|d| d.name.clone()));
    header.extend(["accuracy", "incumbent", "seed", "failure"].map(String::from));
    let rows = result
        .history
        .iter()
        .zip(&result.incumbent_trace)
        .enumerate()
        .map(|(i, (o, inc))| {
            let mut row = vec![i.to_string()];
            row.extend(o.point.values.iter().map(i64::to_string));
            row.push(format!("{:.6}", o.objective));
            row.push(inc.map_or_else(String::new, |v| format!("{v:.6}")));
            row.push(o.seed.to_string());
            row.push(o.failure.clone().unwrap_or_default());
            row
        });
    section(&mut out, "history", &csv_table(&header, rows));
    out
}

/// Body of the `[config]` section of a report, or `None` if it has none.
pub fn extract_config(report: &str) -> Option<String> {
    let mut lines = report.lines().skip_while(|l| l.trim() != CONFIG_SECTION);
    lines.next()?;
    let body: Vec<&str> = lines.take_while(|l| !l.trim_start().starts_with('[')).collect();
    Some(body.join("\n").trim().to_string() + "\n")
}

/// Lines of the named section, without its header.
pub fn section_lines<'a>(report: &'a str, name: &str) -> Vec<&'a str> {
    let header = format!("[{name}]");
    report
        .lines()
        .skip_while(|l| l.trim() != header)
        .skip(1)
        .take_while(|l| !l.trim_start().starts_with('['))
        .filter(|l| !l.is_empty())
        .collect()
}
