//! Sequential node classification on a linearized path: each presented node
//! is predicted with the label of the nearest already-revealed node along
//! the path.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Labels};
use crate::linearize::{dfs_linearize, DfsStart, PathGraph};
use crate::rng::RngStream;
use crate::spanning::wilson;
use crate::stats::mean_stderr;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameTranscript {
    pub order: Vec<usize>,
    pub predictions: Vec<usize>,
    pub truths: Vec<usize>,
    pub mistakes: Vec<bool>,
    pub total_mistakes: usize,
}

/// Plays one game. The first prediction is `default_label`; afterwards the
/// nearest revealed node on the path wins, ties going to the one revealed
/// earlier.
pub fn wta_play(
    path: &PathGraph,
    y: &Labels,
    order: &[usize],
    default_label: usize,
) -> Result<GameTranscript> {
    let n = path.node_count();
    y.check_len(n)?;
    if order.len() != n {
        return Err(Error::InvalidPermutation { n });
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidPermutation { n });
        }
    }

    // position on the path -> step at which that node was revealed
    let mut revealed: BTreeMap<usize, usize> = BTreeMap::new();
    let mut predictions = Vec::with_capacity(n);
    let mut truths = Vec::with_capacity(n);
    let mut mistakes = Vec::with_capacity(n);
    for (step, &v) in order.iter().enumerate() {
        let q = path.position(v);
        let left = revealed
            .range(..q)
            .next_back()
            .map(|(&p, &s)| (q - p, s, p));
        let right = revealed.range(q + 1..).next().map(|(&p, &s)| (p - q, s, p));
        let nearest = match (left, right) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            // (distance, reveal step) ordering breaks ties by earlier reveal.
            (Some(a), Some(b)) => Some(if (a.0, a.1) <= (b.0, b.1) { a } else { b }),
        };
        let prediction = match nearest {
            Some((_, _, p)) => y.get(path.order()[p]),
            None => default_label,
        };
        let truth = y.get(v);
        predictions.push(prediction);
        truths.push(truth);
        mistakes.push(prediction != truth);
        revealed.insert(q, step);
    }
    let total_mistakes = mistakes.iter().filter(|&&m| m).count();
    Ok(GameTranscript {
        order: order.to_vec(),
        predictions,
        truths,
        mistakes,
        total_mistakes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMode {
    Random,
    /// Placeholder for adversarial presentation orders; currently draws a
    /// uniformly random order like [`OrderMode::Random`].
    AdversarialStub,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MistakeSummary {
    pub mean: f64,
    pub stderr: f64,
    pub per_trial: Vec<usize>,
}

/// Mean mistakes over `trials` games, each on a fresh Wilson tree, a fresh
/// random linearization and a fresh presentation order.
pub fn wta_expected_mistakes(
    g: &Graph,
    y: &Labels,
    trials: usize,
    mode: OrderMode,
    default_label: usize,
    rng: RngStream,
) -> Result<MistakeSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    y.check_len(g.node_count())?;
    let per_trial: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng.child(t as u64).rng();
            let tree = wilson(g, &mut rng)?;
            let path = dfs_linearize(&tree, DfsStart::Random, &mut rng)?;
            let mut order: Vec<usize> = (0..g.node_count()).collect();
            match mode {
                OrderMode::Random | OrderMode::AdversarialStub => order.shuffle(&mut rng),
            }
            Ok(wta_play(&path, y, &order, default_label)?.total_mistakes)
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = per_trial.iter().map(|&m| m as f64).collect();
    let (mean, stderr) = mean_stderr(&values);
    Ok(MistakeSummary {
        mean,
        stderr,
        per_trial,
    })
}
