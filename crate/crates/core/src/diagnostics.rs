//! Smoothing and squashing measurements for randomly initialized GCNs on
//! the full graph, on a uniform random spanning tree and on its
//! linearization.

use std::str::FromStr;

use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gnn::{GcnModel, InfluenceContext, Matrix, NormAdj, Normalization, Real};
use crate::graph::{k_hop_nodes, Graph, Topology};
use crate::linearize::{dfs_linearize, DfsStart, PathGraph};
use crate::rng::RngStream;
use crate::spanning::{wilson, SpanningTree};
use crate::stats::mean_stderr;

/// Probe nodes per over-squashing trial.
pub const PROBES_PER_TRIAL: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Full,
    Rst,
    Rpg,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Full, Variant::Rst, Variant::Rpg];
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "rst" => Ok(Self::Rst),
            "rpg" => Ok(Self::Rpg),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::Rst => "rst",
            Self::Rpg => "rpg",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticRun {
    pub variant: Variant,
    pub depth: usize,
    pub trials: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
}

impl DiagnosticRun {
    fn new(variant: Variant, depth: usize, values: Vec<f64>) -> Self {
        let (mean, stderr) = mean_stderr(&values);
        Self {
            variant,
            depth,
            trials: values.len(),
            values,
            mean,
            stderr,
        }
    }
}

/// Lookup of the run for one variant and depth.
pub fn find_run(runs: &[DiagnosticRun], variant: Variant, depth: usize) -> Option<&DiagnosticRun> {
    runs.iter()
        .find(|r| r.variant == variant && r.depth == depth)
}

/// `|X - 1 (1^T X) / N|_F`: Frobenius norm of the row-mean-centered matrix.
pub fn oversmoothing_metric<T: Real>(x: &Matrix<T>) -> f64 {
    let (n, d) = x.shape();
    if n == 0 {
        return 0.0;
    }
    let mut mean = vec![0.0f64; d];
    for r in 0..n {
        for (m, v) in mean.iter_mut().zip(x.row(r)) {
            *m += v.as_f64();
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut total = 0.0;
    for r in 0..n {
        for (m, v) in mean.iter().zip(x.row(r)) {
            let c = v.as_f64() - m;
            total += c * c;
        }
    }
    total.sqrt()
}

/// The three topologies of one trial: a uniform random spanning tree and a
/// depth-first linearization of that same tree.
struct TrialGraphs {
    tree: SpanningTree,
    path: PathGraph,
}

impl TrialGraphs {
    fn draw(g: &Graph, rng: RngStream) -> Result<Self> {
        let mut rng = rng.rng();
        let tree = wilson(g, &mut rng)?;
        let path = dfs_linearize(&tree, DfsStart::Random, &mut rng)?;
        Ok(Self { tree, path })
    }

    fn adjacency(&self, g: &Graph, variant: Variant) -> NormAdj<f32> {
        match variant {
            Variant::Full => NormAdj::new(g, Normalization::SelfLoop),
            Variant::Rst => NormAdj::new(&self.tree, Normalization::SelfLoop),
            Variant::Rpg => NormAdj::new(&self.path, Normalization::SelfLoop),
        }
    }
}

fn gaussian_features(n: usize, d: usize, rng: RngStream) -> Matrix<f32> {
    let mut rng = rng.rng();
    Matrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng))
}

fn random_model(width: usize, depth: usize, rng: RngStream) -> Result<GcnModel<f32>> {
    GcnModel::glorot(&vec![width; depth + 1], 0.0, &mut rng.rng())
}

fn check_args(depths: &[usize], width: usize, trials: usize) -> Result<()> {
    if depths.is_empty() {
        return Err(Error::InvalidParameter("need at least one depth".into()));
    }
    if width == 0 || trials == 0 {
        return Err(Error::InvalidParameter(
            "width and trials must be positive".into(),
        ));
    }
    Ok(())
}

/// Smoothing metric of `X^(t)` for each variant and depth. Within a trial all
/// variants share the features, the weights of each depth and the tree.
pub fn oversmoothing_curve(
    g: &Graph,
    depths: &[usize],
    width: usize,
    trials: usize,
    variants: &[Variant],
    rng: RngStream,
) -> Result<Vec<DiagnosticRun>> {
    check_args(depths, width, trials)?;
    let n = g.node_count();
    // per_trial[trial][variant][depth]
    let per_trial: Vec<Vec<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let stream = rng.child(trial as u64);
            let x = gaussian_features(n, width, stream.child(0));
            let graphs = TrialGraphs::draw(g, stream.child(1))?;
            variants
                .iter()
                .map(|&variant| {
                    let adj = graphs.adjacency(g, variant);
                    depths
                        .iter()
                        .map(|&t| {
                            if t == 0 {
                                return Ok(oversmoothing_metric(&x));
                            }
                            let model = random_model(width, t, stream.child(2 + t as u64))?;
                            Ok(oversmoothing_metric(&model.embed(&adj, &x)?))
                        })
                        .collect()
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut runs = Vec::new();
    for (vi, &variant) in variants.iter().enumerate() {
        for (di, &depth) in depths.iter().enumerate() {
            let values = per_trial.iter().map(|t| t[vi][di]).collect();
            runs.push(DiagnosticRun::new(variant, depth, values));
        }
    }
    Ok(runs)
}

/// Influence of `sources` on the depth-`t` output of `v`, where `t` is the
/// model depth, propagating over `topo`.
pub fn oversquashing_influence<G: Topology>(
    model: &GcnModel<f32>,
    topo: &G,
    x: &Matrix<f32>,
    v: usize,
    sources: &[usize],
) -> Result<f64> {
    let adj = NormAdj::new(topo, Normalization::SelfLoop);
    InfluenceContext::new(model, &adj, x)?.influence(v, sources)
}

/// With no layers the Jacobian is the identity: `d0` if `v` is a source.
pub fn identity_influence(d0: usize, v: usize, sources: &[usize]) -> f64 {
    if sources.contains(&v) {
        d0 as f64
    } else {
        0.0
    }
}

/// One over-squashing trial: the probe nodes, their source sets per depth
/// (the `t`-hop ball on the trial's path graph) and the probe-averaged
/// influence for every variant and depth.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SquashingTrial {
    pub probes: Vec<usize>,
    /// `sources[depth_index][probe_index]`, shared by all variants.
    pub sources: Vec<Vec<Vec<usize>>>,
    /// `values[variant_index][depth_index]` in [`Variant::ALL`] order.
    pub values: Vec<Vec<f64>>,
}

pub fn oversquashing_trial(
    g: &Graph,
    depths: &[usize],
    width: usize,
    rng: RngStream,
) -> Result<SquashingTrial> {
    let n = g.node_count();
    let x = gaussian_features(n, width, rng.child(0));
    let graphs = TrialGraphs::draw(g, rng.child(1))?;
    let probes = sample(&mut rng.child(2).rng(), n, PROBES_PER_TRIAL.min(n)).into_vec();
    let sources: Vec<Vec<Vec<usize>>> = depths
        .iter()
        .map(|&t| {
            probes
                .iter()
                .map(|&v| k_hop_nodes(&graphs.path, &[v], t))
                .collect()
        })
        .collect::<Result<_>>()?;
    let models: Vec<Option<GcnModel<f32>>> = depths
        .iter()
        .map(|&t| {
            (t > 0)
                .then(|| random_model(width, t, rng.child(3 + t as u64)))
                .transpose()
        })
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(Variant::ALL.len());
    for variant in Variant::ALL {
        let adj = graphs.adjacency(g, variant);
        let mut per_depth = Vec::with_capacity(depths.len());
        for (di, model) in models.iter().enumerate() {
            let total: f64 = match model {
                None => probes
                    .iter()
                    .zip(&sources[di])
                    .map(|(&v, s)| identity_influence(width, v, s))
                    .sum(),
                Some(model) => {
                    let ctx = InfluenceContext::new(model, &adj, &x)?;
                    probes
                        .iter()
                        .zip(&sources[di])
                        .map(|(&v, s)| ctx.influence(v, s))
                        .sum::<Result<f64>>()?
                }
            };
            per_depth.push(total / probes.len() as f64);
        }
        values.push(per_depth);
    }
    Ok(SquashingTrial {
        probes,
        sources,
        values,
    })
}

/// Probe-averaged influence per variant and depth over `trials` trials.
pub fn oversquashing_experiment(
    g: &Graph,
    depths: &[usize],
    width: usize,
    trials: usize,
    rng: RngStream,
) -> Result<Vec<DiagnosticRun>> {
    check_args(depths, width, trials)?;
    let per_trial: Vec<SquashingTrial> = (0..trials)
        .into_par_iter()
        .map(|trial| oversquashing_trial(g, depths, width, rng.child(trial as u64)))
        .collect::<Result<_>>()?;
    let mut runs = Vec::new();
    for (vi, &variant) in Variant::ALL.iter().enumerate() {
        for (di, &depth) in depths.iter().enumerate() {
            let values = per_trial.iter().map(|t| t.values[vi][di]).collect();
            runs.push(DiagnosticRun::new(variant, depth, values));
        }
    }
    Ok(runs)
}

/// `variant,depth,mean,stderr` rows.
pub fn runs_to_csv(runs: &[DiagnosticRun]) -> String {
    let mut out = String::from("variant,depth,mean,stderr,trials\n");
    for r in runs {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.variant, r.depth, r.mean, r.stderr, r.trials
        ));
    }
    out
}
