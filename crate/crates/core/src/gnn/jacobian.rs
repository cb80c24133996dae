//! Input-output influence of a GCN: `sum_u |d X^(t)_v / d X^(0)_u|_1` over a
//! source set, where `X^(t)` is the last layer's output before log-softmax.

use std::collections::VecDeque;

use super::adjacency::NormAdj;
use super::matrix::{Matrix, Real};
use super::model::GcnModel;
use crate::error::{Error, Result};

const UNSEEN: usize = usize::MAX;

/// Inference-mode activations of one model on one graph, reusable across
/// probe nodes.
pub struct InfluenceContext<'a, T: Real> {
    model: &'a GcnModel<T>,
    adj: &'a NormAdj<T>,
    pre: Vec<Matrix<T>>,
}

impl<'a, T: Real> InfluenceContext<'a, T> {
    pub fn new(model: &'a GcnModel<T>, adj: &'a NormAdj<T>, x: &Matrix<T>) -> Result<Self> {
        let pre = model.layer_outputs(adj, x)?;
        Ok(Self { model, adj, pre })
    }

    fn check_nodes(&self, v: usize, sources: &[usize]) -> Result<()> {
        let n = self.adj.node_count();
        match std::iter::once(&v).chain(sources).find(|&&u| u >= n) {
            Some(&index) => Err(Error::InvalidIndex { index, n }),
            None => Ok(()),
        }
    }

    /// Hop distance from the nearest source, up to `limit`.
    fn source_distance(&self, sources: &[usize], limit: usize) -> Vec<usize> {
        let mut dist = vec![UNSEEN; self.adj.node_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == UNSEEN {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            if dist[u] == limit {
                continue;
            }
            for &w in self.adj.row(u).0 {
                if dist[w] == UNSEEN {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Reverse mode, all output coordinates of `v` at once. Only nodes that
    /// lie both in the receptive field of `v` and within reach of a source
    /// are carried.
    pub fn influence(&self, v: usize, sources: &[usize]) -> Result<f64> {
        self.check_nodes(v, sources)?;
        let layers = self.model.weights();
        let t = layers.len();
        let s = layers[t - 1].cols();
        let n = self.adj.node_count();
        let dist = self.source_distance(sources, t);
        if dist[v] == UNSEEN {
            return Ok(0.0);
        }

        // Gradient rows are laid out as `slot * s + c` for active node `slot`.
        let mut active = vec![v];
        let mut grad = Matrix::from_fn(s, s, |i, j| if i == j { T::one() } else { T::zero() });
        let mut slot = vec![UNSEEN; n];
        for l in (0..t).rev() {
            let width = layers[l].cols();
            let block = s * width;
            // Propagate through the aggregation, keeping nodes within `l` hops of a source.
            let mut next_active = Vec::new();
            for &j in &active {
                for &i in self.adj.row(j).0 {
                    if dist[i] <= l && slot[i] == UNSEEN {
                        slot[i] = next_active.len();
                        next_active.push(i);
                    }
                }
            }
            let mut agg = vec![T::zero(); next_active.len() * block];
            for (k, &j) in active.iter().enumerate() {
                let src = &grad.data()[k * block..(k + 1) * block];
                let (cols, weights) = self.adj.row(j);
                for (&i, &w) in cols.iter().zip(weights) {
                    if slot[i] == UNSEEN {
                        continue;
                    }
                    let dst = &mut agg[slot[i] * block..(slot[i] + 1) * block];
                    for (d, &x) in dst.iter_mut().zip(src) {
                        *d += w * x;
                    }
                }
            }
            for &i in &next_active {
                slot[i] = UNSEEN;
            }
            active = next_active;
            if l == 0 {
                // Only source rows are needed for the input Jacobian.
                let mut rows = Vec::new();
                for (k, &i) in active.iter().enumerate() {
                    if dist[i] == 0 {
                        rows.extend_from_slice(&agg[k * block..(k + 1) * block]);
                    }
                }
                let count = rows.len() / width.max(1);
                let g = Matrix::from_vec(count, width, rows)?;
                let dx = g.matmul_t(&layers[0]);
                return Ok(dx.data().iter().map(|x| x.abs().as_f64()).sum());
            }
            let agg = Matrix::from_vec(active.len() * s, width, agg)?;
            grad = agg.matmul_t(&layers[l]);
            let z = &self.pre[l - 1];
            let d = layers[l].rows();
            for (k, &i) in active.iter().enumerate() {
                let mask = z.row(i);
                for c in 0..s {
                    let row = &mut grad.data_mut()[(k * s + c) * d..(k * s + c + 1) * d];
                    for (g, &m) in row.iter_mut().zip(mask) {
                        if m <= T::zero() {
                            *g = T::zero();
                        }
                    }
                }
            }
        }
        unreachable!("loop returns at the input layer")
    }

    /// Forward mode, one tangent per (source, input coordinate). Slow; kept
    /// as an independent check of [`InfluenceContext::influence`].
    pub fn influence_forward(&self, v: usize, sources: &[usize]) -> Result<f64> {
        self.check_nodes(v, sources)?;
        let layers = self.model.weights();
        let n = self.adj.node_count();
        let d0 = layers[0].rows();
        let mut unique = sources.to_vec();
        unique.sort_unstable();
        unique.dedup();
        let mut total = 0.0;
        for &u in &unique {
            for k in 0..d0 {
                let mut tangent = Matrix::zeros(n, d0);
                tangent.set(u, k, T::one());
                for (l, w) in layers.iter().enumerate() {
                    tangent = self.adj.spmm(&tangent.matmul(w));
                    if l + 1 < layers.len() {
                        for (x, &z) in tangent.data_mut().iter_mut().zip(self.pre[l].data()) {
                            if z <= T::zero() {
                                *x = T::zero();
                            }
                        }
                    }
                }
                total += tangent.row(v).iter().map(|x| x.abs().as_f64()).sum::<f64>();
            }
        }
        Ok(total)
    }
}

pub fn influence_l1<T: Real>(
    model: &GcnModel<T>,
    adj: &NormAdj<T>,
    x: &Matrix<T>,
    v: usize,
    sources: &[usize],
) -> Result<f64> {
    InfluenceContext::new(model, adj, x)?.influence(v, sources)
}

pub fn influence_l1_forward<T: Real>(
    model: &GcnModel<T>,
    adj: &NormAdj<T>,
    x: &Matrix<T>,
    v: usize,
    sources: &[usize],
) -> Result<f64> {
    InfluenceContext::new(model, adj, x)?.influence_forward(v, sources)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::adjacency::Normalization;
    use crate::graph::Graph;
    use crate::rng::RngStream;

    fn small_graph() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2), (1, 4)]).unwrap()
    }

    #[test]
    fn single_linear_layer_closed_form() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let adj: NormAdj<f64> = NormAdj::new(&g, Normalization::SelfLoop);
        let w = Matrix::from_vec(2, 2, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let model = GcnModel::from_weights(vec![w], 0.0).unwrap();
        let x = Matrix::from_vec(2, 2, vec![1.0, 2.0, -1.0, 0.5]).unwrap();
        // Each block is 1/2 * W^T, so its 1-norm is 6.5 / 2.
        assert!((influence_l1(&model, &adj, &x, 0, &[1]).unwrap() - 3.25).abs() < 1e-12);
        assert!((influence_l1(&model, &adj, &x, 0, &[0, 1]).unwrap() - 6.5).abs() < 1e-12);
    }

    #[test]
    fn reverse_matches_forward() {
        let g = small_graph();
        let adj: NormAdj<f64> = NormAdj::new(&g, Normalization::SelfLoop);
        for seed in 0..4 {
            let model =
                GcnModel::<f64>::glorot(&[3, 5, 4, 2], 0.0, &mut RngStream::from_seed(seed).rng())
                    .unwrap();
            let x = Matrix::from_fn(6, 3, |i, j| ((i * 3 + j) as f64 + seed as f64).sin());
            let ctx = InfluenceContext::new(&model, &adj, &x).unwrap();
            for v in 0..6 {
                for sources in [vec![v], vec![0, 5], vec![1, 2, 3], (0..6).collect()] {
                    let a = ctx.influence(v, &sources).unwrap();
                    let b = ctx.influence_forward(v, &sources).unwrap();
                    assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn matches_finite_differences() {
        let g = small_graph();
        let adj: NormAdj<f64> = NormAdj::new(&g, Normalization::SelfLoop);
        let model =
            GcnModel::<f64>::glorot(&[2, 4, 3], 0.0, &mut RngStream::from_seed(11).rng()).unwrap();
        let x = Matrix::from_fn(6, 2, |i, j| ((2 * i + j) as f64 * 0.7).cos());
        let (v, sources) = (3, [2usize, 4]);
        let h = 1e-6;
        let mut fd = 0.0;
        for &u in &sources {
            for k in 0..2 {
                let mut plus = x.clone();
                plus.set(u, k, x.get(u, k) + h);
                let mut minus = x.clone();
                minus.set(u, k, x.get(u, k) - h);
                let a = model.embed(&adj, &plus).unwrap();
                let b = model.embed(&adj, &minus).unwrap();
                fd += (0..3)
                    .map(|c| ((a.get(v, c) - b.get(v, c)) / (2.0 * h)).abs())
                    .sum::<f64>();
            }
        }
        let exact = influence_l1(&model, &adj, &x, v, &sources).unwrap();
        assert!((exact - fd).abs() <= 1e-4 * exact.abs(), "{exact} vs {fd}");
    }

    #[test]
    fn out_of_reach_sources_have_no_influence() {
        let path = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
        let adj: NormAdj<f32> = NormAdj::new(&path, Normalization::SelfLoop);
        let model =
            GcnModel::<f32>::glorot(&[3, 3, 3], 0.0, &mut RngStream::from_seed(2).rng()).unwrap();
        let x = Matrix::from_fn(7, 3, |i, j| (i + j) as f32 * 0.1);
        assert_eq!(influence_l1(&model, &adj, &x, 0, &[3, 6]).unwrap(), 0.0);
        assert!(influence_l1(&model, &adj, &x, 0, &[2]).unwrap() >= 0.0);
        assert!(influence_l1(&model, &adj, &x, 0, &[9]).is_err());
    }
}
