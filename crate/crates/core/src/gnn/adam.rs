use super::matrix::{Matrix, Real};
use super::model::GcnModel;
use crate::error::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Adam moment accumulators, one pair per weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T = f32> {
    first: Vec<Matrix<T>>,
    second: Vec<Matrix<T>>,
    step: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(model: &GcnModel<T>) -> Self {
        let zeros: Vec<Matrix<T>> = model
            .weights()
            .iter()
            .map(|w| Matrix::zeros(w.rows(), w.cols()))
            .collect();
        Self {
            first: zeros.clone(),
            second: zeros,
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// One Adam update with coupled L2 decay: the gradient used is `g + wd * W`.
pub fn adam_step<T: Real>(
    model: &mut GcnModel<T>,
    grads: &[Matrix<T>],
    state: &mut AdamState<T>,
    lr: f64,
    weight_decay: f64,
) -> Result<()> {
    if grads.len() != model.layer_count() || state.first.len() != model.layer_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} gradients for {} layers",
            grads.len(),
            model.layer_count()
        )));
    }
    for ((g, w), m) in grads.iter().zip(model.weights()).zip(&state.first) {
        if g.shape() != w.shape() || m.shape() != w.shape() {
            return Err(Error::ShapeMismatch(format!(
                "gradient {:?} for weight {:?}",
                g.shape(),
                w.shape()
            )));
        }
    }
    state.step += 1;
    let t = state.step as i32;
    let correction1 = 1.0 - BETA1.powi(t);
    let correction2 = 1.0 - BETA2.powi(t);
    let (b1, b2) = (T::from_f64(BETA1), T::from_f64(BETA2));
    let (one_b1, one_b2) = (T::from_f64(1.0 - BETA1), T::from_f64(1.0 - BETA2));
    let wd = T::from_f64(weight_decay);
    let step_size = T::from_f64(lr / correction1);
    let inv_c2 = T::from_f64(1.0 / correction2);
    let eps = T::from_f64(EPSILON);
    let AdamState { first, second, .. } = state;
    model.apply_update(|weights| {
        for (l, w) in weights.iter_mut().enumerate() {
            let g = grads[l].data();
            let m = first[l].data_mut();
            let v = second[l].data_mut();
            for (k, wk) in w.data_mut().iter_mut().enumerate() {
                let gk = g[k] + wd * *wk;
                m[k] = b1 * m[k] + one_b1 * gk;
                v[k] = b2 * v[k] + one_b2 * gk * gk;
                *wk -= step_size * m[k] / ((v[k] * inv_c2).sqrt() + eps);
            }
        }
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn zero_gradient_no_decay_is_noop() {
        let mut model =
            GcnModel::<f64>::glorot(&[3, 2], 0.5, &mut RngStream::from_seed(1).rng()).unwrap();
        let before = model.weights().to_vec();
        let mut state = AdamState::new(&model);
        let grads = vec![Matrix::zeros(3, 2)];
        for _ in 0..5 {
            adam_step(&mut model, &grads, &mut state, 1e-2, 0.0).unwrap();
        }
        assert_eq!(model.weights(), &before[..]);
    }

    #[test]
    fn first_step_closed_form() {
        let w = Matrix::from_vec(1, 3, vec![0.5f64, -0.25, 1.0]).unwrap();
        let mut model = GcnModel::from_weights(vec![w.clone()], 0.0).unwrap();
        let mut state = AdamState::new(&model);
        let g = Matrix::from_vec(1, 3, vec![2.0, -0.001, 0.0]).unwrap();
        let lr = 0.01;
        adam_step(&mut model, std::slice::from_ref(&g), &mut state, lr, 0.0).unwrap();
        for k in 0..3 {
            let gk = g.data()[k];
            let want = w.data()[k] - lr * gk / (gk.abs() + EPSILON);
            assert!((model.weights()[0].data()[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn coupled_weight_decay() {
        let w = Matrix::from_vec(1, 1, vec![2.0f64]).unwrap();
        let mut model = GcnModel::from_weights(vec![w], 0.0).unwrap();
        let mut state = AdamState::new(&model);
        adam_step(&mut model, &[Matrix::zeros(1, 1)], &mut state, 0.1, 0.5).unwrap();
        // Effective gradient 1.0 gives a full lr-sized step.
        assert!((model.weights()[0].get(0, 0) - 1.9).abs() < 1e-7);
    }

    #[test]
    fn shape_checks() {
        let mut model =
            GcnModel::<f32>::glorot(&[3, 2], 0.5, &mut RngStream::from_seed(1).rng()).unwrap();
        let mut state = AdamState::new(&model);
        assert!(adam_step(&mut model, &[Matrix::zeros(2, 3)], &mut state, 0.1, 0.0).is_err());
        assert!(adam_step(&mut model, &[], &mut state, 0.1, 0.0).is_err());
    }

    #[test]
    fn bit_identical_runs() {
        let run = || {
            let mut rng = RngStream::from_seed(9).rng();
            let mut model = GcnModel::<f32>::glorot(&[4, 3], 0.0, &mut rng).unwrap();
            let mut state = AdamState::new(&model);
            for s in 0..100 {
                let g = Matrix::from_fn(4, 3, |i, j| ((i * 3 + j + s) as f32 * 0.37).sin());
                adam_step(&mut model, &[g], &mut state, 1e-2, 5e-4).unwrap();
            }
            model
        };
        assert_eq!(run(), run());
    }
}
