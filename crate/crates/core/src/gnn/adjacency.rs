use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::matrix::{Matrix, Real};
use crate::graph::Topology;

/// Degree convention for the symmetric GCN normalization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `d_i = deg(i) + 1`, the renormalization of `A + I`.
    #[default]
    SelfLoop,
    /// `d_i = deg(i)` while still aggregating the node itself.
    DegreeOnly,
}

impl std::str::FromStr for Normalization {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "self-loop" => Ok(Self::SelfLoop),
            "degree-only" => Ok(Self::DegreeOnly),
            other => Err(crate::error::Error::InvalidParameter(format!(
                "unknown normalization {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::SelfLoop => "self-loop",
            Self::DegreeOnly => "degree-only",
        })
    }
}

/// Sparse normalized propagation matrix with entries
/// `1 / sqrt(d_i d_j)` over `N(i) ∪ {i}`.
///
/// Built over a whole topology or over a node subset; for a subset the
/// degrees still come from the full topology so rows near the middle of the
/// subset see exactly the weights they would see in the whole graph.
#[derive(Clone, Debug, PartialEq)]
pub struct NormAdj<T = f32> {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<T>,
    /// Undirected non-self entries.
    edges: usize,
}

impl<T: Real> NormAdj<T> {
    pub fn new<G: Topology>(topo: &G, norm: Normalization) -> Self {
        let nodes: Vec<usize> = (0..topo.node_count()).collect();
        Self::build(topo, &nodes, norm, Some)
    }

    /// Rows and columns are `nodes` in the given order.
    pub fn restricted<G: Topology>(topo: &G, nodes: &[usize], norm: Normalization) -> Self {
        let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Self::build(topo, nodes, norm, |v| local.get(&v).copied())
    }

    fn build<G: Topology>(
        topo: &G,
        nodes: &[usize],
        norm: Normalization,
        local: impl Fn(usize) -> Option<usize>,
    ) -> Self {
        let degree = |v: usize| -> f64 {
            match norm {
                Normalization::SelfLoop => (topo.degree(v) + 1) as f64,
                Normalization::DegreeOnly => topo.degree(v).max(1) as f64,
            }
        };
        let deg: Vec<f64> = nodes.iter().map(|&v| degree(v)).collect();
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut off_diagonal = 0;
        for (i, &v) in nodes.iter().enumerate() {
            entries.clear();
            entries.push((i, 1.0 / deg[i]));
            for w in topo.neighbors(v) {
                if let Some(j) = local(w) {
                    entries.push((j, 1.0 / (deg[i] * deg[j]).sqrt()));
                }
            }
            off_diagonal += entries.len() - 1;
            entries.sort_unstable_by_key(|e| e.0);
            for &(j, w) in &entries {
                cols.push(j);
                weights.push(T::from_f64(w));
            }
            offsets.push(cols.len());
        }
        Self {
            offsets,
            cols,
            weights,
            edges: off_diagonal / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Undirected edges (excluding self-loops) the aggregation reads.
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.cols[r.clone()], &self.weights[r])
    }

    /// `A_hat * x`
    pub fn spmm(&self, x: &Matrix<T>) -> Matrix<T> {
        assert_eq!(
            x.rows(),
            self.node_count(),
            "row count differs from adjacency"
        );
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for i in 0..self.node_count() {
            let (cols, weights) = self.row(i);
            let dst = out.row_mut(i);
            for (&j, &w) in cols.iter().zip(weights) {
                for (d, &s) in dst.iter_mut().zip(x.row(j)) {
                    *d += w * s;
                }
            }
        }
        out
    }

    /// `A_hat * x` for a block of output rows only.
    pub fn spmm_rows(&self, x: &Matrix<T>, rows: std::ops::Range<usize>) -> Matrix<T> {
        let mut out = Matrix::zeros(rows.len(), x.cols());
        for (k, i) in rows.enumerate() {
            let (cols, weights) = self.row(i);
            let dst = out.row_mut(k);
            for (&j, &w) in cols.iter().zip(weights) {
                for (d, &s) in dst.iter_mut().zip(x.row(j)) {
                    *d += w * s;
                }
            }
        }
        out
    }
}
