//! Text file formats: weights, scores, vertex lists and empirical priors, all
//! keyed by vertex label.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::bum::{ScoreVector, VertexWeights};
use crate::error::{Error, Result};
use crate::graph::{load_graph, Graph, Vertex, VertexSet};
use crate::posterior::ModulePrior;

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    load_graph(&read_text(path)?)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn lookup(index: &HashMap<&str, Vertex>, label: &str) -> Result<Vertex> {
    index
        .get(label)
        .copied()
        .ok_or_else(|| Error::UnknownVertex(label.to_owned()))
}

/// Parses `label<TAB>value` lines into a dense per-vertex vector. Every vertex
/// must appear exactly once.
fn parse_labelled_values(text: &str, g: &Graph, what: &str) -> Result<Vec<f64>> {
    let index = g.label_index();
    let mut values = vec![None; g.vertex_count()];
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        let [label, value] = fields.as_slice() else {
            return Err(Error::Parse {
                line,
                message: format!("expected `label<TAB>{what}`"),
            });
        };
        let v = lookup(&index, label)?;
        let x: f64 = value.parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse {what} `{value}`"),
        })?;
        if values[v].replace(x).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate {what} for vertex `{label}`"),
            });
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| Error::invalid(format!("no {what} for vertex `{}`", g.label(v)))))
        .collect()
}

fn format_labelled_values(g: &Graph, values: &[f64]) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        out.push_str(g.label(v));
        out.push('\t');
        out.push_str(&format!("{:?}", values[v]));
        out.push('\n');
    }
    out
}

pub fn parse_weights(text: &str, g: &Graph) -> Result<VertexWeights> {
    VertexWeights::new(parse_labelled_values(text, g, "weight")?)
}

/// Weight values of a weight file in file order, labels ignored. Used when
/// no graph is at hand.
pub fn parse_weight_values(text: &str) -> Result<VertexWeights> {
    let mut values = Vec::new();
    for (line, content) in content_lines(text) {
        let value = content.rsplit('\t').next().unwrap_or("").trim();
        values.push(value.parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse weight `{value}`"),
        })?);
    }
    VertexWeights::new(values)
}

pub fn format_weights(g: &Graph, weights: &VertexWeights) -> String {
    format_labelled_values(g, weights.as_slice())
}

pub fn parse_scores(text: &str, g: &Graph) -> Result<ScoreVector> {
    ScoreVector::new(parse_labelled_values(text, g, "score")?)
}

pub fn format_scores(g: &Graph, scores: &ScoreVector) -> String {
    format_labelled_values(g, scores.as_slice())
}

/// One label per line, order preserved. Repeated labels are rejected.
pub fn parse_vertex_list(text: &str, g: &Graph) -> Result<Vec<Vertex>> {
    let index = g.label_index();
    let mut seen = VertexSet::new(g.vertex_count());
    let mut out = Vec::new();
    for (line, label) in content_lines(text) {
        let v = lookup(&index, label)?;
        if seen.contains(v) {
            return Err(Error::Parse {
                line,
                message: format!("vertex `{label}` listed twice"),
            });
        }
        seen.insert(v);
        out.push(v);
    }
    Ok(out)
}

pub fn parse_vertex_set(text: &str, g: &Graph) -> Result<VertexSet> {
    Ok(VertexSet::from_vertices(g.vertex_count(), parse_vertex_list(text, g)?))
}

pub fn format_vertex_list(g: &Graph, vertices: impl IntoIterator<Item = Vertex>) -> String {
    let mut out = String::new();
    for v in vertices {
        out.push_str(g.label(v));
        out.push('\n');
    }
    out
}

/// Empirical prior: `label,label,...<TAB>mass` per line.
pub fn parse_prior(text: &str, g: &Graph) -> Result<ModulePrior> {
    let index = g.label_index();
    let mut entries = Vec::new();
    for (line, content) in content_lines(text) {
        let Some((set, mass)) = content.rsplit_once('\t') else {
            return Err(Error::Parse {
                line,
                message: "expected `labels<TAB>probability`".into(),
            });
        };
        let mut members = VertexSet::new(g.vertex_count());
        for label in set.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            members.insert(lookup(&index, label)?);
        }
        let mass: f64 = mass.trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse probability `{}`", mass.trim()),
        })?;
        entries.push((members, mass));
    }
    ModulePrior::empirical(entries)
}

pub fn format_prior(g: &Graph, prior: &ModulePrior) -> Result<String> {
    let ModulePrior::Empirical(entries) = prior else {
        return Err(Error::invalid("only empirical priors have a file form"));
    };
    let mut out = String::new();
    for (set, mass) in entries {
        let labels: Vec<&str> = set.iter().map(|v| g.label(v)).collect();
        out.push_str(&labels.join(","));
        out.push('\t');
        out.push_str(&format!("{mass:?}"));
        out.push('\n');
    }
    Ok(out)
}
