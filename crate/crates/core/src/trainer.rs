//! Training loop: every epoch draws the next graph of a pre-generated pool of
//! random path graphs, runs one optimization step on the k-hop neighborhood
//! of the training nodes within that path, and validates on the full graph.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::mpsc::sync_channel;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::{
    accuracy, adam_step, cross_entropy_loss, AdamState, GcnModel, Matrix, NormAdj, Normalization,
    Real,
};
use crate::graph::{k_hop_nodes, Graph, Labels, Split, Topology};
use crate::linearize::{dfs_linearize, DfsStart, PathGraph};
use crate::rng::RngStream;
use crate::spanning::{SpanningTree, TreeGenerator, DEFAULT_BETA};

/// What each pool entry is trained on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolKind {
    /// Depth-first linearization of a sampled tree.
    #[default]
    Rpg,
    /// The sampled tree itself.
    Rst,
}

impl FromStr for PoolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rpg" => Ok(Self::Rpg),
            "rst" => Ok(Self::Rst),
            other => Err(Error::InvalidParameter(format!(
                "unknown pool kind {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for PoolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rpg => "rpg",
            Self::Rst => "rst",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Number of GCN layers, which is also the neighborhood radius.
    pub hops: usize,
    pub hidden: usize,
    pub pool_size: usize,
    pub pool_kind: PoolKind,
    pub generator: TreeGenerator,
    pub lr: f64,
    pub weight_decay: f64,
    pub lr_decay_factor: f64,
    pub patience: usize,
    pub lr_min: f64,
    pub max_steps_per_lr: usize,
    pub dropout: f64,
    pub normalization: Normalization,
    pub val_every: usize,
    /// Pool graphs generated ahead of the training loop.
    pub queue_bound: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_epochs: 10_000,
            hops: 2,
            hidden: 128,
            pool_size: 250,
            pool_kind: PoolKind::Rpg,
            generator: TreeGenerator::ARst { beta: DEFAULT_BETA },
            lr: 1e-2,
            weight_decay: 5e-4,
            lr_decay_factor: 10f64.powf(-0.5),
            patience: 100,
            lr_min: 1e-4,
            max_steps_per_lr: 1000,
            dropout: 0.5,
            normalization: Normalization::SelfLoop,
            val_every: 1,
            queue_bound: 16,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if self.hops == 0 {
            return bad("hops must be at least 1");
        }
        if self.hidden == 0 {
            return bad("hidden must be at least 1");
        }
        if self.pool_size == 0 {
            return bad("pool_size must be at least 1");
        }
        if !(self.lr_min > 0.0 && self.lr_min < self.lr) {
            return bad("need 0 < lr_min < lr");
        }
        if !(self.lr_decay_factor > 0.0 && self.lr_decay_factor < 1.0) {
            return bad("lr_decay_factor must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must lie in [0, 1)");
        }
        if self.val_every == 0 || self.queue_bound == 0 {
            return bad("val_every and queue_bound must be positive");
        }
        if let TreeGenerator::ARst { beta } = self.generator {
            if !(beta > 0.0 && beta <= 1.0) {
                return bad("beta must lie in (0, 1]");
            }
        }
        Ok(())
    }

    /// Sets one field from its `key=value` spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad value {value:?} for {key}")))
        }
        match key {
            "max_epochs" | "epochs" => self.max_epochs = parse(key, value)?,
            "hops" | "layers" => self.hops = parse(key, value)?,
            "hidden" => self.hidden = parse(key, value)?,
            "pool_size" => self.pool_size = parse(key, value)?,
            "pool_kind" => self.pool_kind = value.parse()?,
            "generator" => self.generator = value.parse()?,
            "beta" => {
                self.generator = TreeGenerator::ARst {
                    beta: parse(key, value)?,
                }
            }
            "lr" => self.lr = parse(key, value)?,
            "weight_decay" => self.weight_decay = parse(key, value)?,
            "lr_decay_factor" => self.lr_decay_factor = parse(key, value)?,
            "patience" => self.patience = parse(key, value)?,
            "lr_min" => self.lr_min = parse(key, value)?,
            "max_steps_per_lr" => self.max_steps_per_lr = parse(key, value)?,
            "dropout" => self.dropout = parse(key, value)?,
            "normalization" => self.normalization = value.parse()?,
            "val_every" => self.val_every = parse(key, value)?,
            "queue_bound" => self.queue_bound = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown config key {other:?}"
                )))
            }
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value, got {line:?}"))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Layer widths for `d0` input features and `classes` outputs.
    pub fn dims(&self, d0: usize, classes: usize) -> Vec<usize> {
        let mut dims = vec![d0];
        dims.extend(std::iter::repeat_n(self.hidden, self.hops - 1));
        dims.push(classes);
        dims
    }

    pub fn lr_at(&self, level: u32) -> f64 {
        self.lr * self.lr_decay_factor.powi(level as i32)
    }
}

/// A pool entry: the graph one training epoch runs on.
#[derive(Clone, Debug)]
pub enum PoolGraph {
    Path(PathGraph),
    Tree(SpanningTree),
}

impl Topology for PoolGraph {
    fn node_count(&self) -> usize {
        match self {
            Self::Path(p) => p.node_count(),
            Self::Tree(t) => t.node_count(),
        }
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (path, tree) = match self {
            Self::Path(p) => (Some(p.neighbors(v)), None),
            Self::Tree(t) => (None, Some(t.neighbor_slice(v).iter().copied())),
        };
        path.into_iter().flatten().chain(tree.into_iter().flatten())
    }

    fn degree(&self, v: usize) -> usize {
        match self {
            Self::Path(p) => p.degree(v),
            Self::Tree(t) => t.neighbor_slice(v).len(),
        }
    }
}

fn pool_entry(
    g: &Graph,
    generator: TreeGenerator,
    kind: PoolKind,
    rng: RngStream,
) -> Result<PoolGraph> {
    let mut rng = rng.rng();
    let tree = generator.sample(g, &mut rng)?;
    Ok(match kind {
        PoolKind::Rpg => PoolGraph::Path(dfs_linearize(&tree, DfsStart::Random, &mut rng)?),
        PoolKind::Rst => PoolGraph::Tree(tree),
    })
}

/// `count` random path graphs from A-RST trees; entry `i` uses child stream
/// `i` of `rng`.
pub fn generate_rpg_pool(
    g: &Graph,
    count: usize,
    beta: f64,
    rng: RngStream,
) -> Result<Vec<PathGraph>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "pool size must be at least 1".into(),
        ));
    }
    let generator = TreeGenerator::ARst { beta };
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng.child(i as u64).rng();
            let tree = generator.sample(g, &mut rng)?;
            dfs_linearize(&tree, DfsStart::Random, &mut rng)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
    pub lr: f64,
    /// Number of decays applied so far; `lr = lr0 * factor^lr_level`.
    pub lr_level: u32,
    pub pool_index: usize,
    pub train_nodes: usize,
    pub train_edges: usize,
    pub step_seconds: f64,
    pub epoch_seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxEpochs,
    LearningRateFloor,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
    pub best_epoch: Option<usize>,
    pub best_val_accuracy: Option<f64>,
    pub stop_reason: Option<StopReason>,
    /// Validation ran on the training nodes because the validation set was empty.
    pub validated_on_train: bool,
}

impl TrainHistory {
    /// Mean wall time of the optimization step, excluding validation.
    pub fn mean_step_seconds(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.step_seconds).sum::<f64>() / self.records.len() as f64
    }

    pub fn max_train_edges(&self) -> usize {
        self.records
            .iter()
            .map(|r| r.train_edges)
            .max()
            .unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "epoch,train_loss,val_loss,val_accuracy,lr,pool_index,train_nodes,train_edges,step_seconds,epoch_seconds\n",
        );
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.epoch,
                r.train_loss,
                opt(r.val_loss),
                opt(r.val_accuracy),
                r.lr,
                r.pool_index,
                r.train_nodes,
                r.train_edges,
                r.step_seconds,
                r.epoch_seconds
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LrDecision {
    pub lr: f64,
    pub lr_level: u32,
    pub stop: bool,
}

/// Learning rate for the epoch after the last record. Within the stretch
/// of trailing records at the current level, the rate decays once
/// `patience` of them have passed without a new best validation accuracy,
/// or once `max_steps_per_lr` of them have run. Training stops when the
/// decayed rate would fall below `lr_min`.
pub fn lr_schedule_step(history: &TrainHistory, cfg: &TrainConfig) -> LrDecision {
    let Some(last) = history.records.last() else {
        return LrDecision {
            lr: cfg.lr,
            lr_level: 0,
            stop: false,
        };
    };
    let level = last.lr_level;
    let start = history
        .records
        .iter()
        .rposition(|r| r.lr_level != level)
        .map_or(0, |i| i + 1);
    let mut best = history.records[..start]
        .iter()
        .filter_map(|r| r.val_accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut stale = 0;
    for r in &history.records[start..] {
        match r.val_accuracy {
            Some(a) if a > best => {
                best = a;
                stale = 0;
            }
            _ => stale += 1,
        }
    }
    let at_level = history.records.len() - start;
    if stale < cfg.patience && at_level < cfg.max_steps_per_lr {
        return LrDecision {
            lr: cfg.lr_at(level),
            lr_level: level,
            stop: false,
        };
    }
    let next = cfg.lr_at(level + 1);
    LrDecision {
        lr: next,
        lr_level: level + 1,
        stop: next < cfg.lr_min * (1.0 - 1e-9),
    }
}

/// Accuracy of `model` on `subset`, propagating over every edge of `g`.
pub fn evaluate<T: Real>(
    model: &GcnModel<T>,
    g: &Graph,
    x: &Matrix<T>,
    y: &Labels,
    subset: &[usize],
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let adj = NormAdj::new(g, Normalization::SelfLoop);
    accuracy(&model.predict_log_probs(&adj, x)?, y, subset)
}

/// Same as [`evaluate`], computing each layer over blocks of `block` rows.
pub fn evaluate_blockwise<T: Real>(
    model: &GcnModel<T>,
    g: &Graph,
    x: &Matrix<T>,
    y: &Labels,
    subset: &[usize],
    block: usize,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let adj = NormAdj::new(g, Normalization::SelfLoop);
    accuracy(
        &model.predict_log_probs_blockwise(&adj, x, block)?,
        y,
        subset,
    )
}

/// Everything one optimization step needs, restricted to a node subset.
pub struct StepInput<T = f32> {
    pub adj: NormAdj<T>,
    pub x: Matrix<T>,
    pub y: Labels,
    /// Training nodes in local indices.
    pub train: Vec<usize>,
}

impl<T: Real> StepInput<T> {
    /// Neighborhood of radius `hops` around `train` within `topo`.
    pub fn k_hop<G: Topology>(
        topo: &G,
        x: &Matrix<T>,
        y: &Labels,
        train: &[usize],
        hops: usize,
        norm: Normalization,
    ) -> Result<Self> {
        let nodes = k_hop_nodes(topo, train, hops)?;
        let adj = NormAdj::restricted(topo, &nodes, norm);
        let local: Vec<usize> = train
            .iter()
            .map(|v| nodes.binary_search(v).expect("seed lies in its own ball"))
            .collect();
        Ok(Self {
            adj,
            x: x.gather_rows(&nodes),
            y: Labels::new(nodes.iter().map(|&v| y.get(v)).collect(), y.class_count())?,
            train: local,
        })
    }

    /// The whole topology, as in ordinary full-graph training.
    pub fn full<G: Topology>(
        topo: &G,
        x: &Matrix<T>,
        y: &Labels,
        train: &[usize],
        norm: Normalization,
    ) -> Self {
        Self {
            adj: NormAdj::new(topo, norm),
            x: x.clone(),
            y: y.clone(),
            train: train.to_vec(),
        }
    }
}

/// Forward with dropout, cross-entropy on the training nodes, backward and
/// one Adam update. Returns the training loss.
pub fn training_step<T: Real, R: Rng + ?Sized>(
    model: &mut GcnModel<T>,
    adam: &mut AdamState<T>,
    input: &StepInput<T>,
    lr: f64,
    weight_decay: f64,
    rng: &mut R,
) -> Result<f64> {
    let (log_probs, cache) = model.forward_train(&input.adj, &input.x, rng)?;
    let loss = cross_entropy_loss(&log_probs, &input.y, &input.train)?;
    let grads = model.backward(&cache, &input.y, &input.train)?;
    adam_step(model, &grads, adam, lr, weight_decay)?;
    Ok(loss)
}

/// Training state for one run. Holds the model, optimizer, dropout stream and
/// the full-graph propagation matrix used for validation.
pub struct Trainer<'a> {
    x: &'a Matrix<f32>,
    y: &'a Labels,
    split: &'a Split,
    cfg: TrainConfig,
    model: GcnModel<f32>,
    adam: AdamState<f32>,
    dropout_rng: ChaCha8Rng,
    full_adj: NormAdj<f32>,
    history: TrainHistory,
    best: Option<GcnModel<f32>>,
}

impl<'a> Trainer<'a> {
    pub fn new(
        g: &'a Graph,
        x: &'a Matrix<f32>,
        y: &'a Labels,
        split: &'a Split,
        cfg: TrainConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let n = g.node_count();
        if x.rows() != n {
            return Err(Error::ShapeMismatch(format!(
                "features have {} rows, graph has {n} nodes",
                x.rows()
            )));
        }
        y.check_len(n)?;
        split.validate(n)?;
        let root = RngStream::from_seed(cfg.seed);
        let model = GcnModel::glorot(
            &cfg.dims(x.cols(), y.class_count()),
            cfg.dropout,
            &mut root.child(0).rng(),
        )?;
        let adam = AdamState::new(&model);
        let history = TrainHistory {
            validated_on_train: split.validation.is_empty(),
            ..Default::default()
        };
        Ok(Self {
            x,
            y,
            split,
            full_adj: NormAdj::new(g, cfg.normalization),
            dropout_rng: root.child(2).rng(),
            cfg,
            model,
            adam,
            history,
            best: None,
        })
    }

    pub fn model(&self) -> &GcnModel<f32> {
        &self.model
    }

    pub fn history(&self) -> &TrainHistory {
        &self.history
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    /// Nodes validation runs on.
    pub fn validation_nodes(&self) -> &[usize] {
        if self.split.validation.is_empty() {
            &self.split.train
        } else {
            &self.split.validation
        }
    }

    /// One optimization step on the k-hop neighborhood of the training
    /// nodes within `topo`. Returns (loss, nodes, edges, seconds).
    pub fn step<G: Topology>(
        &mut self,
        epoch: usize,
        topo: &G,
        lr: f64,
    ) -> Result<(f64, usize, usize, f64)> {
        let start = Instant::now();
        let input = StepInput::k_hop(
            topo,
            self.x,
            self.y,
            &self.split.train,
            self.cfg.hops,
            self.cfg.normalization,
        )?;
        let loss = training_step(
            &mut self.model,
            &mut self.adam,
            &input,
            lr,
            self.cfg.weight_decay,
            &mut self.dropout_rng,
        )?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        Ok((
            loss,
            input.adj.node_count(),
            input.adj.edge_count(),
            start.elapsed().as_secs_f64(),
        ))
    }

    /// Inference-mode loss and accuracy over the whole graph.
    pub fn validate(&self) -> Result<(f64, f64)> {
        let lp = self.model.predict_log_probs(&self.full_adj, self.x)?;
        let nodes = self.validation_nodes();
        Ok((
            cross_entropy_loss(&lp, self.y, nodes)?,
            accuracy(&lp, self.y, nodes)?,
        ))
    }

    /// Runs one full epoch on `topo` and appends its record. Returns the
    /// schedule decision for the next epoch.
    pub fn epoch<G: Topology>(
        &mut self,
        epoch: usize,
        topo: &G,
        pool_index: usize,
        lr: LrDecision,
    ) -> Result<LrDecision> {
        let start = Instant::now();
        let (train_loss, train_nodes, train_edges, step_seconds) = self.step(epoch, topo, lr.lr)?;
        let (val_loss, val_accuracy) =
            if epoch.is_multiple_of(self.cfg.val_every) || epoch + 1 == self.cfg.max_epochs {
                let (l, a) = self.validate()?;
                (Some(l), Some(a))
            } else {
                (None, None)
            };
        if let Some(a) = val_accuracy {
            if self.history.best_val_accuracy.is_none_or(|b| a > b) {
                self.history.best_val_accuracy = Some(a);
                self.history.best_epoch = Some(epoch);
                self.best = Some(self.model.clone());
            }
        }
        self.history.records.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            val_accuracy,
            lr: lr.lr,
            lr_level: lr.lr_level,
            pool_index,
            train_nodes,
            train_edges,
            step_seconds,
            epoch_seconds: start.elapsed().as_secs_f64(),
        });
        if epoch.is_multiple_of(100) {
            log::info!(
                "epoch {epoch}: loss {train_loss:.4}, val acc {:?}, lr {:.2e}",
                val_accuracy,
                lr.lr
            );
        }
        let next = lr_schedule_step(&self.history, &self.cfg);
        if next.stop {
            log::info!("epoch {epoch}: learning rate reached the floor, stopping");
        } else if next.lr_level != lr.lr_level {
            log::info!("epoch {epoch}: learning rate decayed to {:.2e}", next.lr);
        }
        Ok(next)
    }

    /// Best-validation snapshot (the current model if nothing was validated).
    pub fn finish(self) -> (GcnModel<f32>, TrainHistory) {
        (self.best.unwrap_or(self.model), self.history)
    }
}

/// Trains a GCN on a pool of random path graphs (or raw trees) and returns
/// the best-validation snapshot with the full history.
pub fn train_gern(
    g: &Graph,
    x: &Matrix<f32>,
    y: &Labels,
    split: &Split,
    cfg: &TrainConfig,
) -> Result<(GcnModel<f32>, TrainHistory)> {
    let mut trainer = Trainer::new(g, x, y, split, cfg.clone())?;
    let pool_rng = RngStream::from_seed(cfg.seed).child(1);
    let needed = cfg.pool_size.min(cfg.max_epochs);
    let (generator, kind) = (cfg.generator, cfg.pool_kind);
    std::thread::scope(|s| -> Result<()> {
        let (tx, rx) = sync_channel::<Result<PoolGraph>>(cfg.queue_bound);
        s.spawn(move || {
            let chunk = rayon::current_num_threads().max(1);
            let mut next = 0;
            while next < needed {
                let end = (next + chunk).min(needed);
                let batch: Vec<Result<PoolGraph>> = (next..end)
                    .into_par_iter()
                    .map(|i| pool_entry(g, generator, kind, pool_rng.child(i as u64)))
                    .collect();
                for item in batch {
                    if tx.send(item).is_err() {
                        return;
                    }
                }
                next = end;
            }
        });
        let mut pool: Vec<PoolGraph> = Vec::with_capacity(needed);
        let mut lr = lr_schedule_step(trainer.history(), cfg);
        for epoch in 0..cfg.max_epochs {
            let index = epoch % cfg.pool_size;
            if index == pool.len() {
                let item = rx
                    .recv()
                    .map_err(|_| Error::InvalidParameter("pool producer stopped early".into()))??;
                pool.push(item);
            }
            lr = trainer.epoch(epoch, &pool[index], index, lr)?;
            if lr.stop {
                trainer.history.stop_reason = Some(StopReason::LearningRateFloor);
                return Ok(());
            }
        }
        trainer.history.stop_reason = Some(StopReason::MaxEpochs);
        Ok(())
    })?;
    Ok(trainer.finish())
}

/// Flat `key -> value` view of a config, for run metadata.
pub fn config_entries(cfg: &TrainConfig) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("max_epochs".into(), cfg.max_epochs.to_string());
    m.insert("hops".into(), cfg.hops.to_string());
    m.insert("hidden".into(), cfg.hidden.to_string());
    m.insert("pool_size".into(), cfg.pool_size.to_string());
    m.insert("pool_kind".into(), cfg.pool_kind.to_string());
    m.insert("generator".into(), cfg.generator.to_string());
    m.insert("lr".into(), cfg.lr.to_string());
    m.insert("weight_decay".into(), cfg.weight_decay.to_string());
    m.insert("lr_decay_factor".into(), cfg.lr_decay_factor.to_string());
    m.insert("patience".into(), cfg.patience.to_string());
    m.insert("lr_min".into(), cfg.lr_min.to_string());
    m.insert("max_steps_per_lr".into(), cfg.max_steps_per_lr.to_string());
    m.insert("dropout".into(), cfg.dropout.to_string());
    m.insert("normalization".into(), cfg.normalization.to_string());
    m.insert("val_every".into(), cfg.val_every.to_string());
    m.insert("queue_bound".into(), cfg.queue_bound.to_string());
    m.insert("seed".into(), cfg.seed.to_string());
    m
}
