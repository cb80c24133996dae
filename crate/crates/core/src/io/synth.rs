//! Synthetic homophilic datasets: chains of cliques and stochastic block
//! models. Labels are the clique or block ids; features are the one-hot
//! class plus Gaussian noise.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::bundle::DatasetBundle;
use crate::error::{Error, Result};
use crate::gnn::Matrix;
use crate::graph::{Graph, Labels};

/// Standard deviation of the noise added to one-hot features.
pub const FEATURE_NOISE: f64 = 0.1;

const CONNECT_ATTEMPTS: usize = 20;

/// `cliques` copies of `K_size`, clique `c` on nodes `c*size..(c+1)*size`,
/// with a bridge from the last node of clique `c` to the first of `c + 1`.
pub fn clique_chain_edges(cliques: usize, size: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for c in 0..cliques {
        let base = c * size;
        for u in 0..size {
            for v in u + 1..size {
                edges.push((base + u, base + v));
            }
        }
        if c + 1 < cliques {
            edges.push((base + size - 1, base + size));
        }
    }
    edges
}

/// One-hot class indicators plus `N(0, FEATURE_NOISE^2)` noise.
pub fn noisy_one_hot<R: Rng + ?Sized>(y: &Labels, rng: &mut R) -> Matrix<f32> {
    let normal = Normal::new(0.0, FEATURE_NOISE).expect("positive std");
    let c = y.class_count();
    Matrix::from_fn(y.len(), c, |i, j| {
        let base = if y.get(i) == j { 1.0 } else { 0.0 };
        (base + normal.sample(rng)) as f32
    })
}

pub fn synth_clique_chain<R: Rng + ?Sized>(
    cliques: usize,
    size: usize,
    rng: &mut R,
) -> Result<DatasetBundle> {
    if cliques < 1 || size < 2 {
        return Err(Error::InvalidParameter(format!(
            "need cliques >= 1 and clique size >= 2, got {cliques} and {size}"
        )));
    }
    let n = cliques * size;
    let graph = Graph::from_edges(n, &clique_chain_edges(cliques, size))?;
    let labels = Labels::new((0..n).map(|v| v / size).collect(), cliques.max(2))?;
    let features = noisy_one_hot(&labels, rng);
    let mut bundle = DatasetBundle::new(
        format!("clique-chain-{cliques}x{size}"),
        graph,
        features,
        labels,
    )?;
    bundle
        .meta
        .insert("generator".into(), "clique-chain".into());
    Ok(bundle)
}

/// Edges of one stochastic block model draw, using geometric skips so the
/// cost is proportional to the number of edges produced.
pub fn sbm_edges<R: Rng + ?Sized>(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..blocks {
        let base_a = a * block_size;
        // Pairs inside a block, enumerated as (v, w) with w < v.
        let total = block_size * block_size.saturating_sub(1) / 2;
        for k in skip_indices(total, p_in, rng) {
            let v = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0).floor() as usize;
            // Guard against rounding in the triangular root.
            let v = if v * (v - 1) / 2 > k {
                v - 1
            } else if (v + 1) * v / 2 <= k {
                v + 1
            } else {
                v
            };
            let w = k - v * (v - 1) / 2;
            edges.push((base_a + w, base_a + v));
        }
        for b in a + 1..blocks {
            let base_b = b * block_size;
            for k in skip_indices(block_size * block_size, p_out, rng) {
                edges.push((base_a + k / block_size, base_b + k % block_size));
            }
        }
    }
    edges
}

/// Indices in `0..total` kept independently with probability `p`.
fn skip_indices<R: Rng + ?Sized>(total: usize, p: f64, rng: &mut R) -> Vec<usize> {
    if p <= 0.0 || total == 0 {
        return Vec::new();
    }
    if p >= 1.0 {
        return (0..total).collect();
    }
    let log_q = (1.0 - p).ln();
    let mut out = Vec::with_capacity((total as f64 * p * 1.1) as usize + 8);
    let mut k: usize = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (total - k) as f64 {
            break;
        }
        k += skip as usize;
        out.push(k);
        k += 1;
        if k >= total {
            break;
        }
    }
    out
}

/// Stochastic block model, redrawn until connected (at most 20 attempts).
pub fn synth_sbm<R: Rng + ?Sized>(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> Result<DatasetBundle> {
    if blocks < 1 || block_size < 1 {
        return Err(Error::InvalidParameter(
            "blocks and block size must be positive".into(),
        ));
    }
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "probability {p} outside [0, 1]"
            )));
        }
    }
    let n = blocks * block_size;
    for attempt in 1..=CONNECT_ATTEMPTS {
        let edges = sbm_edges(blocks, block_size, p_in, p_out, rng);
        match Graph::from_edges(n, &edges) {
            Ok(graph) => {
                let labels = Labels::new((0..n).map(|v| v / block_size).collect(), blocks.max(2))?;
                let features = noisy_one_hot(&labels, rng);
                let mut bundle = DatasetBundle::new(
                    format!("sbm-{blocks}x{block_size}"),
                    graph,
                    features,
                    labels,
                )?;
                bundle.meta.insert("generator".into(), "sbm".into());
                bundle.meta.insert("p_in".into(), p_in.to_string());
                bundle.meta.insert("p_out".into(), p_out.to_string());
                bundle.meta.insert("attempts".into(), attempt.to_string());
                return Ok(bundle);
            }
            Err(Error::DisconnectedGraph { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::CouldNotConnect {
        attempts: CONNECT_ATTEMPTS,
    })
}
