use rand::Rng;
use rand_distr::{Distribution, Uniform};

use super::adjacency::NormAdj;
use super::matrix::{Matrix, Real};
use crate::error::{Error, Result};
use crate::graph::Labels;

pub const DEFAULT_DROPOUT: f64 = 0.5;

/// Graph convolutional network: layer `l` maps `d_l` to `d_{l+1}` features
/// as `act(A_hat * dropout(H) * W_l)`, with ReLU on hidden layers and
/// log-softmax after the last.
#[derive(Clone, Debug, PartialEq)]
pub struct GcnModel<T = f32> {
    weights: Vec<Matrix<T>>,
    dropout: f64,
    /// Bumped on every parameter update; forward caches remember it.
    generation: u64,
}

impl<T: Real> GcnModel<T> {
    pub fn from_weights(weights: Vec<Matrix<T>>, dropout: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDims("model needs at least one layer".into()));
        }
        for pair in weights.windows(2) {
            if pair[0].cols() != pair[1].rows() {
                return Err(Error::InvalidDims(format!(
                    "layer output {} does not feed layer input {}",
                    pair[0].cols(),
                    pair[1].rows()
                )));
            }
        }
        if !(0.0..1.0).contains(&dropout) {
            return Err(Error::InvalidParameter(format!(
                "dropout must lie in [0, 1), got {dropout}"
            )));
        }
        Ok(Self {
            weights,
            dropout,
            generation: 0,
        })
    }

    /// Glorot-uniform weights, `U(-a, a)` with `a = sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot<R: Rng + ?Sized>(dims: &[usize], dropout: f64, rng: &mut R) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::InvalidDims(format!(
                "need at least two positive dims, got {dims:?}"
            )));
        }
        let weights = dims
            .windows(2)
            .map(|w| {
                let bound = (6.0 / (w[0] + w[1]) as f64).sqrt();
                let dist = Uniform::new(-bound, bound).expect("finite positive bound");
                Matrix::from_fn(w[0], w[1], |_, _| T::from_f64(dist.sample(rng)))
            })
            .collect();
        Self::from_weights(weights, dropout)
    }

    pub fn weights(&self) -> &[Matrix<T>] {
        &self.weights
    }

    pub fn dropout(&self) -> f64 {
        self.dropout
    }

    pub fn set_dropout(&mut self, dropout: f64) {
        self.dropout = dropout;
    }

    pub fn layer_count(&self) -> usize {
        self.weights.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.weights[0].rows()];
        dims.extend(self.weights.iter().map(|w| w.cols()));
        dims
    }

    pub fn class_count(&self) -> usize {
        self.weights.last().unwrap().cols()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub(crate) fn apply_update(&mut self, f: impl FnOnce(&mut [Matrix<T>])) {
        f(&mut self.weights);
        self.generation += 1;
    }

    pub fn cast<U: Real>(&self) -> GcnModel<U> {
        GcnModel {
            weights: self.weights.iter().map(|w| w.cast()).collect(),
            dropout: self.dropout,
            generation: self.generation,
        }
    }

    fn check_input(&self, adj: &NormAdj<T>, x: &Matrix<T>) -> Result<()> {
        if x.rows() != adj.node_count() {
            return Err(Error::ShapeMismatch(format!(
                "features have {} rows, graph has {} nodes",
                x.rows(),
                adj.node_count()
            )));
        }
        if x.cols() != self.weights[0].rows() {
            return Err(Error::ShapeMismatch(format!(
                "features have {} columns, first layer expects {}",
                x.cols(),
                self.weights[0].rows()
            )));
        }
        Ok(())
    }

    /// Pre-activation outputs `Z_l` of every layer in inference mode.
    pub fn layer_outputs(&self, adj: &NormAdj<T>, x: &Matrix<T>) -> Result<Vec<Matrix<T>>> {
        self.check_input(adj, x)?;
        let last = self.weights.len() - 1;
        let mut outs = Vec::with_capacity(self.weights.len());
        let mut h = x.clone();
        for (l, w) in self.weights.iter().enumerate() {
            let z = adj.spmm(&h.matmul(w));
            if !z.is_finite() {
                return Err(Error::NonFiniteActivation { layer: l });
            }
            if l < last {
                h = relu(&z);
            }
            outs.push(z);
        }
        Ok(outs)
    }

    /// Final-layer representation (no log-softmax), inference mode.
    pub fn embed(&self, adj: &NormAdj<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(self.layer_outputs(adj, x)?.pop().unwrap())
    }

    pub fn predict_log_probs(&self, adj: &NormAdj<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(log_softmax(&self.embed(adj, x)?))
    }

    /// Inference-mode log-probabilities computed one layer at a time over
    /// blocks of `block` rows.
    pub fn predict_log_probs_blockwise(
        &self,
        adj: &NormAdj<T>,
        x: &Matrix<T>,
        block: usize,
    ) -> Result<Matrix<T>> {
        self.check_input(adj, x)?;
        let block = block.max(1);
        let n = x.rows();
        let last = self.weights.len() - 1;
        let mut h = x.clone();
        for (l, w) in self.weights.iter().enumerate() {
            let y = h.matmul(w);
            let mut next = Matrix::zeros(n, w.cols());
            let mut start = 0;
            while start < n {
                let end = (start + block).min(n);
                let z = adj.spmm_rows(&y, start..end);
                for (k, r) in (start..end).enumerate() {
                    let src = z.row(k);
                    let dst = next.row_mut(r);
                    if l < last {
                        for (d, &s) in dst.iter_mut().zip(src) {
                            *d = s.max(T::zero());
                        }
                    } else {
                        dst.copy_from_slice(src);
                    }
                }
                start = end;
            }
            if !next.is_finite() {
                return Err(Error::NonFiniteActivation { layer: l });
            }
            h = next;
        }
        Ok(log_softmax(&h))
    }

    /// Training-mode forward pass with dropout on every layer input.
    pub fn forward_train<R: Rng + ?Sized>(
        &self,
        adj: &NormAdj<T>,
        x: &Matrix<T>,
        rng: &mut R,
    ) -> Result<(Matrix<T>, ForwardCache<T>)> {
        self.check_input(adj, x)?;
        let last = self.weights.len() - 1;
        let keep = 1.0 - self.dropout;
        let mut inputs = Vec::with_capacity(self.weights.len());
        let mut masks = Vec::with_capacity(self.weights.len());
        let mut pre = Vec::with_capacity(self.weights.len());
        let mut h = x.clone();
        for (l, w) in self.weights.iter().enumerate() {
            let mask = if self.dropout > 0.0 {
                let scale = T::from_f64(1.0 / keep);
                let mask: Vec<T> = (0..h.data().len())
                    .map(|_| {
                        if rng.random::<f64>() < keep {
                            scale
                        } else {
                            T::zero()
                        }
                    })
                    .collect();
                for (v, &m) in h.data_mut().iter_mut().zip(&mask) {
                    *v *= m;
                }
                Some(mask)
            } else {
                None
            };
            let z = adj.spmm(&h.matmul(w));
            if !z.is_finite() {
                return Err(Error::NonFiniteActivation { layer: l });
            }
            let next = if l < last { relu(&z) } else { z.clone() };
            inputs.push(h);
            masks.push(mask);
            pre.push(z);
            h = next;
        }
        let log_probs = log_softmax(&h);
        Ok((
            log_probs.clone(),
            ForwardCache {
                generation: self.generation,
                inputs,
                masks,
                pre,
                log_probs,
                adj: adj.clone(),
            },
        ))
    }

    /// Gradients of the mean cross-entropy over `subset` with respect to
    /// every weight matrix.
    pub fn backward(
        &self,
        cache: &ForwardCache<T>,
        y: &Labels,
        subset: &[usize],
    ) -> Result<Vec<Matrix<T>>> {
        if cache.generation != self.generation || cache.inputs.len() != self.weights.len() {
            return Err(Error::StaleCache);
        }
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let lp = &cache.log_probs;
        y.check_len(lp.rows())?;
        let inv = T::from_f64(1.0 / subset.len() as f64);
        // d loss / d logits = (softmax - onehot) / |S| on subset rows.
        let mut grad = Matrix::zeros(lp.rows(), lp.cols());
        for &i in subset {
            let row = grad.row_mut(i);
            for (g, &l) in row.iter_mut().zip(lp.row(i)) {
                *g += l.exp() * inv;
            }
            row[y.get(i)] -= inv;
        }
        let mut grads = vec![Matrix::zeros(0, 0); self.weights.len()];
        for l in (0..self.weights.len()).rev() {
            if l + 1 < self.weights.len() {
                // Through the ReLU of layer l.
                for (g, &z) in grad.data_mut().iter_mut().zip(cache.pre[l].data()) {
                    if z <= T::zero() {
                        *g = T::zero();
                    }
                }
            }
            let dy = cache.adj.spmm(&grad);
            grads[l] = cache.inputs[l].t_matmul(&dy);
            if l > 0 {
                grad = dy.matmul_t(&self.weights[l]);
                if let Some(mask) = &cache.masks[l] {
                    for (g, &m) in grad.data_mut().iter_mut().zip(mask) {
                        *g *= m;
                    }
                }
            }
        }
        Ok(grads)
    }
}

/// State saved by a training-mode forward pass for backpropagation.
#[derive(Clone, Debug)]
pub struct ForwardCache<T = f32> {
    generation: u64,
    /// Layer inputs after dropout.
    inputs: Vec<Matrix<T>>,
    masks: Vec<Option<Vec<T>>>,
    pre: Vec<Matrix<T>>,
    log_probs: Matrix<T>,
    adj: NormAdj<T>,
}

impl<T: Real> ForwardCache<T> {
    pub fn log_probs(&self) -> &Matrix<T> {
        &self.log_probs
    }
}

pub fn relu<T: Real>(z: &Matrix<T>) -> Matrix<T> {
    z.map(|v| v.max(T::zero()))
}

/// Row-wise log-softmax.
pub fn log_softmax<T: Real>(z: &Matrix<T>) -> Matrix<T> {
    let mut out = z.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let sum: T = row.iter().map(|&v| (v - max).exp()).sum();
        let lse = max + sum.ln();
        for v in row.iter_mut() {
            *v -= lse;
        }
    }
    out
}

/// Mean negative log-likelihood of the true classes over `subset`.
pub fn cross_entropy_loss<T: Real>(
    log_probs: &Matrix<T>,
    y: &Labels,
    subset: &[usize],
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    y.check_len(log_probs.rows())?;
    let total: f64 = subset
        .iter()
        .map(|&i| -log_probs.get(i, y.get(i)).as_f64())
        .sum();
    Ok(total / subset.len() as f64)
}

/// Fraction of `subset` whose most likely class is the true class.
pub fn accuracy<T: Real>(log_probs: &Matrix<T>, y: &Labels, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    y.check_len(log_probs.rows())?;
    let pred = log_probs.argmax_rows();
    let hits = subset.iter().filter(|&&i| pred[i] == y.get(i)).count();
    Ok(hits as f64 / subset.len() as f64)
}

/// Glorot-initialized `f32` model with the default dropout rate.
pub fn glorot_init<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<GcnModel<f32>> {
    GcnModel::glorot(dims, DEFAULT_DROPOUT, rng)
}

/// Forward pass in training (dropout active) or inference mode.
pub fn gcn_forward<T: Real, R: Rng + ?Sized>(
    model: &GcnModel<T>,
    adj: &NormAdj<T>,
    x: &Matrix<T>,
    training: bool,
    rng: &mut R,
) -> Result<(Matrix<T>, Option<ForwardCache<T>>)> {
    if training {
        let (lp, cache) = model.forward_train(adj, x, rng)?;
        Ok((lp, Some(cache)))
    } else {
        Ok((model.predict_log_probs(adj, x)?, None))
    }
}

pub fn gcn_backward<T: Real>(
    model: &GcnModel<T>,
    cache: &ForwardCache<T>,
    y: &Labels,
    subset: &[usize],
) -> Result<Vec<Matrix<T>>> {
    model.backward(cache, y, subset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::adjacency::Normalization;
    use crate::graph::Graph;
    use crate::rng::RngStream;

    fn pair_adj() -> NormAdj<f64> {
        NormAdj::new(
            &Graph::from_edges(2, &[(0, 1)]).unwrap(),
            Normalization::SelfLoop,
        )
    }

    #[test]
    fn glorot_bounds_and_shapes() {
        let mut rng = RngStream::from_seed(1).rng();
        let m = glorot_init(&[4, 2], &mut rng).unwrap();
        assert!(m.weights()[0].data().iter().all(|w| w.abs() < 1.0));
        let m = glorot_init(&[1433, 256, 40], &mut rng).unwrap();
        assert_eq!(m.weights()[0].shape(), (1433, 256));
        assert_eq!(m.weights()[1].shape(), (256, 40));
        assert_eq!(m.dims(), vec![1433, 256, 40]);
        assert!(glorot_init(&[4], &mut rng).is_err());
    }

    #[test]
    fn glorot_is_seeded() {
        let a = glorot_init(&[8, 5, 3], &mut RngStream::from_seed(4).rng()).unwrap();
        let b = glorot_init(&[8, 5, 3], &mut RngStream::from_seed(4).rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn two_node_linear_layer() {
        let adj = pair_adj();
        let model =
            GcnModel::from_weights(vec![Matrix::from_vec(1, 1, vec![1.0]).unwrap()], 0.0).unwrap();
        let x = Matrix::from_vec(2, 1, vec![1.0, 3.0]).unwrap();
        assert_eq!(model.embed(&adj, &x).unwrap().data(), &[2.0, 2.0]);
    }

    #[test]
    fn zero_weights_give_uniform_log_probs() {
        let adj = pair_adj();
        let model =
            GcnModel::from_weights(vec![Matrix::<f64>::zeros(3, 4), Matrix::zeros(4, 5)], 0.5)
                .unwrap();
        let x = Matrix::from_fn(2, 3, |i, j| (i + j) as f64);
        let lp = model.predict_log_probs(&adj, &x).unwrap();
        assert!(lp.data().iter().all(|&v| (v - (0.2f64).ln()).abs() < 1e-12));
        let y = Labels::new(vec![0, 3], 5).unwrap();
        let loss = cross_entropy_loss(&lp, &y, &[0, 1]).unwrap();
        assert!((loss - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn softmax_rows_normalize() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let adj: NormAdj<f32> = NormAdj::new(&g, Normalization::SelfLoop);
        let mut rng = RngStream::from_seed(2).rng();
        let model = glorot_init(&[6, 8, 3], &mut rng).unwrap();
        let x = Matrix::from_fn(5, 6, |i, j| ((i * 7 + j * 3) % 5) as f32 - 2.0);
        let lp = model.predict_log_probs(&adj, &x).unwrap();
        for r in 0..5 {
            let s: f64 = lp.row(r).iter().map(|v| (v.as_f64()).exp()).sum();
            assert!((s - 1.0).abs() <= 1e-6);
        }
        let (lp_train, _) = model.forward_train(&adj, &x, &mut rng).unwrap();
        for r in 0..5 {
            let s: f64 = lp_train.row(r).iter().map(|v| (v.as_f64()).exp()).sum();
            assert!((s - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn loss_examples() {
        let y = Labels::new(vec![0, 1], 2).unwrap();
        let quarter = Matrix::from_vec(
            2,
            2,
            vec![0.25f64.ln(), 0.75f64.ln(), 0.75f64.ln(), 0.25f64.ln()],
        )
        .unwrap();
        assert!((cross_entropy_loss(&quarter, &y, &[0, 1]).unwrap() - 4f64.ln()).abs() < 1e-12);
        let exact =
            Matrix::from_vec(2, 2, vec![0.0, f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0]).unwrap();
        assert_eq!(cross_entropy_loss(&exact, &y, &[0, 1]).unwrap(), 0.0);
        assert!(matches!(
            cross_entropy_loss(&exact, &y, &[]),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn shape_mismatch() {
        let adj = pair_adj();
        let model =
            GcnModel::<f64>::glorot(&[3, 2], 0.0, &mut RngStream::from_seed(0).rng()).unwrap();
        let x = Matrix::zeros(2, 4);
        assert!(matches!(
            model.embed(&adj, &x),
            Err(Error::ShapeMismatch(_))
        ));
        let x = Matrix::zeros(3, 3);
        assert!(matches!(
            model.embed(&adj, &x),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn stale_cache_rejected() {
        let adj = pair_adj();
        let mut rng = RngStream::from_seed(0).rng();
        let mut model = GcnModel::<f64>::glorot(&[2, 2], 0.0, &mut rng).unwrap();
        let x = Matrix::from_fn(2, 2, |i, j| (i + j) as f64);
        let (_, cache) = model.forward_train(&adj, &x, &mut rng).unwrap();
        let y = Labels::new(vec![0, 1], 2).unwrap();
        assert!(model.backward(&cache, &y, &[0]).is_ok());
        assert!(matches!(
            model.backward(&cache, &y, &[]),
            Err(Error::EmptySubset)
        ));
        model.apply_update(|_| {});
        assert!(matches!(
            model.backward(&cache, &y, &[0]),
            Err(Error::StaleCache)
        ));
    }

    #[test]
    fn one_hot_predictions_have_zero_gradient() {
        // Large weights push the softmax to an exact one-hot in f64.
        let adj = pair_adj();
        let w = Matrix::from_vec(2, 2, vec![1e3, -1e3, -1e3, 1e3]).unwrap();
        let model = GcnModel::from_weights(vec![w], 0.0).unwrap();
        let x = Matrix::from_vec(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let (_, cache) = model
            .forward_train(&adj, &x, &mut RngStream::from_seed(0).rng())
            .unwrap();
        let y = Labels::new(vec![0, 0], 2).unwrap();
        let grads = model.backward(&cache, &y, &[0, 1]).unwrap();
        assert!(grads[0].data().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn blockwise_matches_whole_graph() {
        let g = Graph::from_edges(
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 0),
                (1, 4),
            ],
        )
        .unwrap();
        let adj: NormAdj<f64> = NormAdj::new(&g, Normalization::SelfLoop);
        let model = GcnModel::<f64>::glorot(&[5, 6, 4, 3], 0.5, &mut RngStream::from_seed(8).rng())
            .unwrap();
        let x = Matrix::from_fn(7, 5, |i, j| ((i * 5 + j) as f64).sin());
        let whole = model.predict_log_probs(&adj, &x).unwrap();
        for block in [1, 2, 3, 7, 100] {
            assert_eq!(
                model.predict_log_probs_blockwise(&adj, &x, block).unwrap(),
                whole
            );
        }
    }
}
