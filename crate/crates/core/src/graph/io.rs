//! Graph files: `{"n": int, "edges": [[u, v], ...]}` with `u < v` and the
//! pairs in strictly increasing lexicographic order. An optional `"meta"`
//! object may carry provenance; loaders ignore it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

impl Graph {
    pub fn to_json(&self, meta: Option<Value>) -> Result<String> {
        let file = GraphFile {
            n: self.n(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
            meta,
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        let mut prev: Option<[usize; 2]> = None;
        for &[u, v] in &file.edges {
            if u >= v {
                return Err(Error::InvalidGraph(format!("edge [{u}, {v}] must have u < v")));
            }
            if v >= file.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: file.n });
            }
            if let Some(p) = prev {
                if p >= [u, v] {
                    return Err(Error::InvalidGraph(format!(
                        "edge [{u}, {v}] out of lexicographic order"
                    )));
                }
            }
            prev = Some([u, v]);
        }
        Graph::from_edges(file.n, file.edges.iter().map(|&[u, v]| (u, v)))
    }

    pub fn write_json(&self, path: impl AsRef<Path>, meta: Option<Value>) -> Result<()> {
        fs::write(path, self.to_json(meta)?)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
