//! Effective resistances: exact values from the Laplacian pseudoinverse,
//! Monte-Carlo per-edge estimates from spanning-tree inclusion, and the
//! resistance-weighted cut-size.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Graph, Labels};
use crate::rng::RngStream;
use crate::spanning::{edge_inclusion_frequencies, TreeGenerator};

/// Largest graph the dense exact path accepts by default.
pub const DEFAULT_DENSE_CAP: usize = 5_000;

/// Relative threshold below which Laplacian eigenvalues count as zero.
const ZERO_EIGEN_REL: f64 = 1e-9;

/// Combinatorial Laplacian `D - A`.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for v in 0..n {
        l[(v, v)] = g.neighbor_slice(v).len() as f64;
    }
    for &(u, v) in g.edges() {
        l[(u, v)] = -1.0;
        l[(v, u)] = -1.0;
    }
    l
}

/// Moore-Penrose pseudoinverse of the Laplacian via symmetric
/// eigendecomposition, dropping eigenvalues below `1e-9 * lambda_max`.
pub fn laplacian_pseudoinverse(g: &Graph, cap: usize) -> Result<DMatrix<f64>> {
    let n = g.node_count();
    if n > cap {
        return Err(Error::SizeCapExceeded { n, cap });
    }
    let l = laplacian(g);
    let eig = SymmetricEigen::try_new(l, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("eigensolver did not converge".into()))?;
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let threshold = ZERO_EIGEN_REL * lambda_max;
    let mut pinv = DMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= threshold {
            continue;
        }
        let u = eig.eigenvectors.column(k);
        pinv.ger(1.0 / lambda, &u, &u, 1.0);
    }
    Ok(pinv)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResistanceMethod {
    Exact,
    MonteCarlo { trees: u64 },
}

/// Pairwise effective resistances. Exact matrices hold every pair;
/// Monte-Carlo matrices hold edges only and report other pairs as missing.
#[derive(Clone, Debug)]
pub struct ResistanceMatrix {
    n: usize,
    method: ResistanceMethod,
    dense: Option<Vec<f64>>,
    edges: Vec<(usize, usize)>,
    edge_values: Vec<f64>,
    edge_stderr: Option<Vec<f64>>,
}

impl ResistanceMatrix {
    pub fn method(&self) -> ResistanceMethod {
        self.method
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// `r_ij`, or `None` when the pair was not estimated.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i >= self.n || j >= self.n {
            return None;
        }
        if let Some(d) = &self.dense {
            return Some(d[i * self.n + j]);
        }
        if i == j {
            return Some(0.0);
        }
        let key = (i.min(j), i.max(j));
        self.edges
            .binary_search(&key)
            .ok()
            .map(|k| self.edge_values[k])
    }

    /// Edge list the per-edge values are aligned with.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_values(&self) -> &[f64] {
        &self.edge_values
    }

    /// Binomial standard errors, Monte-Carlo estimates only.
    pub fn edge_stderr(&self) -> Option<&[f64]> {
        self.edge_stderr.as_deref()
    }
}

/// Exact resistances `L+_ii + L+_jj - 2 L+_ij` for every pair.
pub fn effective_resistance_exact(g: &Graph) -> Result<ResistanceMatrix> {
    effective_resistance_exact_capped(g, DEFAULT_DENSE_CAP)
}

pub fn effective_resistance_exact_capped(g: &Graph, cap: usize) -> Result<ResistanceMatrix> {
    let pinv = laplacian_pseudoinverse(g, cap)?;
    let n = g.node_count();
    let mut dense = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let r = (pinv[(i, i)] + pinv[(j, j)] - 2.0 * pinv[(i, j)]).max(0.0);
            dense[i * n + j] = r;
            dense[j * n + i] = r;
        }
    }
    let edge_values = g.edges().iter().map(|&(u, v)| dense[u * n + v]).collect();
    Ok(ResistanceMatrix {
        n,
        method: ResistanceMethod::Exact,
        dense: Some(dense),
        edges: g.edges().to_vec(),
        edge_values,
        edge_stderr: None,
    })
}

/// Per-edge estimates: the fraction of `trees` sampled spanning trees
/// containing each edge.
pub fn effective_resistance_mc(
    g: &Graph,
    trees: usize,
    generator: TreeGenerator,
    rng: RngStream,
) -> Result<ResistanceMatrix> {
    let table = edge_inclusion_frequencies(g, generator, trees, rng)?;
    let m = g.edge_count();
    Ok(ResistanceMatrix {
        n: g.node_count(),
        method: ResistanceMethod::MonteCarlo {
            trees: table.trials(),
        },
        dense: None,
        edges: g.edges().to_vec(),
        edge_values: table.frequencies(),
        edge_stderr: Some((0..m).map(|e| table.stderr(e)).collect()),
    })
}

/// Sum of `r_ij` over edges whose endpoints carry different labels.
pub fn resistance_weighted_cutsize(g: &Graph, y: &Labels, r: &ResistanceMatrix) -> Result<f64> {
    y.check_len(g.node_count())?;
    let labels = y.values();
    let mut total = 0.0;
    for &(u, v) in g.edges() {
        if labels[u] != labels[v] {
            total += r.get(u, v).ok_or(Error::MissingEdgeResistance(u, v))?;
        }
    }
    Ok(total)
}
