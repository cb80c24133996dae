//! Dense graph convolutional network with exact backpropagation, Adam,
//! binary checkpoints and Jacobian influence.

pub mod adam;
pub mod adjacency;
pub mod checkpoint;
pub mod jacobian;
pub mod matrix;
pub mod model;

pub use adam::{adam_step, AdamState};
pub use adjacency::{NormAdj, Normalization};
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use jacobian::{influence_l1, influence_l1_forward, InfluenceContext};
pub use matrix::{Matrix, Real};
pub use model::{
    accuracy, cross_entropy_loss, gcn_backward, gcn_forward, glorot_init, log_softmax,
    ForwardCache, GcnModel, DEFAULT_DROPOUT,
};
