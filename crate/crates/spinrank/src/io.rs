//! JSON file formats used by the CLI and by reports.
//!
//! Graphs: `{ "vertices": n, "edges": [[u, v, multiplicity], ...] }` with
//! 1-indexed endpoints, `u <= v`, loops as `u == v`. Spin matrices:
//! `{ "n": n, "entries": [[scalar literal, ...], ...] }`. Marked graphs add
//! `"marks": [v_1, ..., v_k]`. Invariant tables map canonical graph keys to
//! scalar literals. Scalar literals are exact strings like `-1+2/3i`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marked::{FormalSum, MarkedGraph};
use crate::multigraph::Multigraph;
use crate::scalar::GaussianRational;
use crate::spin::SpinMatrix;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 3]>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<Multigraph> {
        Multigraph::new(self.vertices, self.edges.iter().map(|&[u, v, m]| (u, v, m)))
    }
}

impl From<&Multigraph> for GraphFile {
    fn from(g: &Multigraph) -> Self {
        GraphFile {
            vertices: g.vertex_count(),
            edges: g.edges().map(|(u, v, m)| [u, v, m]).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpinMatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<GaussianRational>>,
}

impl SpinMatrixFile {
    pub fn to_spin_matrix(&self) -> Result<SpinMatrix> {
        if self.entries.len() != self.n || self.entries.iter().any(|row| row.len() != self.n) {
            return Err(Error::InvalidInput(format!(
                "spin matrix entries are not {0}x{0}",
                self.n
            )));
        }
        SpinMatrix::from_rows(self.entries.clone())
    }
}

impl From<&SpinMatrix> for SpinMatrixFile {
    fn from(a: &SpinMatrix) -> Self {
        let n = a.state_count();
        SpinMatrixFile {
            n,
            entries: (0..n)
                .map(|i| (0..n).map(|j| a.entry(i, j).clone()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkedGraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 3]>,
    pub marks: Vec<usize>,
}

impl MarkedGraphFile {
    pub fn to_marked_graph(&self) -> Result<MarkedGraph> {
        let graph = Multigraph::new(self.vertices, self.edges.iter().map(|&[u, v, m]| (u, v, m)))?;
        MarkedGraph::new(graph, self.marks.clone())
    }
}

impl From<&MarkedGraph> for MarkedGraphFile {
    fn from(mg: &MarkedGraph) -> Self {
        MarkedGraphFile {
            vertices: mg.underlying().vertex_count(),
            edges: mg.underlying().edges().map(|(u, v, m)| [u, v, m]).collect(),
            marks: mg.marks().to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormalTermFile {
    pub coeff: GaussianRational,
    pub term: MarkedGraphFile,
}

/// A formal sum as a list of coefficient/term pairs.
pub type FormalSumFile = Vec<FormalTermFile>;

pub fn formal_sum_to_file(sum: &FormalSum) -> FormalSumFile {
    sum.terms()
        .map(|(term, coeff)| FormalTermFile {
            coeff: coeff.clone(),
            term: MarkedGraphFile::from(term),
        })
        .collect()
}

pub fn formal_sum_from_file(file: &FormalSumFile, k: usize) -> Result<FormalSum> {
    let mut sum = FormalSum::zero(k);
    for entry in file {
        sum.add_term(entry.coeff.clone(), entry.term.to_marked_graph()?)?;
    }
    Ok(sum)
}

/// Invariant table: canonical graph key to exact value.
pub type TableFile = BTreeMap<String, GaussianRational>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn load_graph(path: &Path) -> Result<Multigraph> {
    read_json::<GraphFile>(path)?.to_graph()
}

pub fn load_spin_matrix(path: &Path) -> Result<SpinMatrix> {
    read_json::<SpinMatrixFile>(path)?.to_spin_matrix()
}

pub fn load_table(path: &Path) -> Result<TableFile> {
    read_json(path)
}
