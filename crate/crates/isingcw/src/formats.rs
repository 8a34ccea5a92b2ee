//! Model files (JSON) and edge lists.
//!
//! Model:
//!
//! ```json
//! { "n": 5, "thresholds": [0, 0, 0, 0, 0], "edges": [{ "i": 0, "j": 1, "w": 1.0 }] }
//! ```
//!
//! `thresholds` may be omitted (all zero). Edge lists are plain text: a
//! `n <count>` line, then one whitespace-separated `i j` pair per line.
//! `#` starts a comment. Node ids are 0-based in both formats.

use std::fs;
use std::path::Path;

use isingcw_core::{Graph, IsingModel};
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

impl ModelFile {
    pub fn into_model(self) -> Result<IsingModel, AppError> {
        let thresholds = self.thresholds.unwrap_or_else(|| vec![0.0; self.n]);
        let edges: Vec<_> = self.edges.iter().map(|e| (e.i, e.j, e.w)).collect();
        Ok(IsingModel::from_weighted_edges(self.n, thresholds, &edges)?)
    }

    pub fn from_model(m: &IsingModel) -> Self {
        let edges = m.graph().edges().iter().zip(m.weights()).map(|(&(i, j), &w)| EdgeEntry { i, j, w }).collect();
        Self { n: m.node_count(), thresholds: Some(m.thresholds().to_vec()), edges }
    }
}

pub fn parse_model(text: &str, origin: &str) -> Result<IsingModel, AppError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| AppError::parse(origin, e.to_string()))?;
    file.into_model()
}

pub fn model_to_json(m: &IsingModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(m)).expect("model serializes")
}

pub fn read_model(path: &Path) -> Result<IsingModel, AppError> {
    parse_model(&read_text(path)?, &path.display().to_string())
}

pub fn parse_edge_list(text: &str, origin: &str) -> Result<Graph, AppError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| AppError::parse(format!("{origin}:{}", lineno + 1), msg);
        let fields: Vec<&str> = line.split_whitespace().collect();
        match (n, fields.as_slice()) {
            (None, ["n", count]) => {
                n = Some(count.parse::<usize>().map_err(|e| at(format!("bad node count {count:?}: {e}")))?);
            }
            (None, _) => return Err(at("expected `n <count>` header".into())),
            (Some(_), [a, b]) => {
                let parse = |s: &str| s.parse::<usize>().map_err(|e| at(format!("bad node id {s:?}: {e}")));
                edges.push((parse(a)?, parse(b)?));
            }
            (Some(_), _) => return Err(at(format!("expected `i j`, found {line:?}"))),
        }
    }
    let n = n.ok_or_else(|| AppError::parse(origin, "missing `n <count>` header"))?;
    Ok(Graph::new(n, &edges)?)
}

pub fn read_edge_list(path: &Path) -> Result<Graph, AppError> {
    parse_edge_list(&read_text(path)?, &path.display().to_string())
}

fn read_text(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}
