//! Random spanning trees.
//!
//! Exact uniform samplers (Aldous-Broder random walk, Wilson's loop-erased
//! walks), the hybrid A-RST sampler that walks for a bounded number of steps
//! before handing the unreached nodes to Wilson, and a randomized BFS tree used
//! as a non-uniform baseline. Per-edge inclusion frequencies estimate effective
//! resistances.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Topology};
use crate::rng::RngStream;
use crate::stats;

pub const NO_PARENT: usize = usize::MAX;

/// Walk fraction used by A-RST when none is configured.
pub const DEFAULT_BETA: f64 = 0.5;

/// A spanning tree of a source [`Graph`], stored as parent pointers toward
/// `root` plus its own adjacency for traversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<usize>,
    /// Ids of tree edges in the source graph, ascending.
    edge_ids: Vec<usize>,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl SpanningTree {
    /// Validates parent pointers against `g`.
    pub fn from_parents(g: &Graph, root: usize, parent: Vec<usize>) -> Result<Self> {
        let n = g.node_count();
        if parent.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: parent.len(),
            });
        }
        if root >= n {
            return Err(Error::InvalidIndex { index: root, n });
        }
        let mut parent_edge = vec![NO_PARENT; n];
        for v in 0..n {
            if v == root {
                if parent[v] != NO_PARENT {
                    return Err(Error::InvalidTree("root has a parent".into()));
                }
                continue;
            }
            let p = parent[v];
            parent_edge[v] = g
                .edge_id(v, p)
                .ok_or_else(|| Error::InvalidTree(format!("({v}, {p}) is not a graph edge")))?;
        }
        Self::from_parent_edges(g, root, parent, &parent_edge)
    }

    fn from_parent_edges(
        g: &Graph,
        root: usize,
        parent: Vec<usize>,
        parent_edge: &[usize],
    ) -> Result<Self> {
        let n = g.node_count();
        let mut uf = UnionFind::new(n);
        let mut edge_ids = Vec::with_capacity(n.saturating_sub(1));
        for v in 0..n {
            if v == root {
                continue;
            }
            if parent[v] == NO_PARENT {
                return Err(Error::InvalidTree(format!("node {v} was never reached")));
            }
            if !uf.union(v, parent[v]) {
                return Err(Error::InvalidTree("parent pointers form a cycle".into()));
            }
            edge_ids.push(parent_edge[v]);
        }
        edge_ids.sort_unstable();
        let edges: Vec<(usize, usize)> = edge_ids.iter().map(|&e| g.edges()[e]).collect();

        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0; 2 * edges.len()];
        for &(u, v) in &edges {
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }
        for &(u, v) in &edges {
            targets[cursor[u]] = v;
            cursor[u] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Self {
            root,
            parent,
            edge_ids,
            edges,
            offsets,
            targets,
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p),
        }
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    /// Tree edges as source-graph edge ids, ascending.
    pub fn edge_ids(&self) -> &[usize] {
        &self.edge_ids
    }

    /// Canonical `(u, v)` pairs, `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbor_slice(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Same tree as a standalone [`Graph`].
    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.node_count(), &self.edges).expect("a spanning tree is connected")
    }

    /// Number of tree edges whose endpoints carry different labels.
    pub fn cutsize(&self, labels: &[usize]) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| labels[u] != labels[v])
            .count()
    }
}

impl Topology for SpanningTree {
    fn node_count(&self) -> usize {
        self.parent.len()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbor_slice(v).iter().copied()
    }

    fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Upper bound on random-walk transitions for one tree. Hitting it means a
/// bug, not bad luck.
pub fn step_cap(n: usize) -> u64 {
    (1e4 * n as f64 * ((n + 1) as f64).ln()).ceil() as u64
}

struct Walker<'a> {
    g: &'a Graph,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    in_tree: Vec<bool>,
    steps: u64,
    cap: u64,
}

impl<'a> Walker<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.node_count();
        Self {
            g,
            parent: vec![NO_PARENT; n],
            parent_edge: vec![NO_PARENT; n],
            in_tree: vec![false; n],
            steps: 0,
            cap: step_cap(n),
        }
    }

    #[inline]
    fn step<R: Rng + ?Sized>(&mut self, from: usize, rng: &mut R) -> Result<(usize, usize)> {
        self.steps += 1;
        if self.steps > self.cap {
            return Err(Error::StepCapExceeded { cap: self.cap });
        }
        let nbrs = self.g.neighbor_slice(from);
        let k = rng.random_range(0..nbrs.len());
        Ok((nbrs[k], self.g.neighbor_edge_ids(from)[k]))
    }

    /// Random-walk phase: walk from `start`, keeping first-entrance edges, for
    /// at most `max_steps` transitions or until every node is reached.
    fn first_entrance_walk<R: Rng + ?Sized>(
        &mut self,
        start: usize,
        max_steps: u64,
        rng: &mut R,
    ) -> Result<usize> {
        let n = self.g.node_count();
        self.in_tree[start] = true;
        let mut reached = 1;
        let mut cur = start;
        let mut taken = 0;
        while reached < n && taken < max_steps {
            let (next, edge) = self.step(cur, rng)?;
            taken += 1;
            if !self.in_tree[next] {
                self.in_tree[next] = true;
                self.parent[next] = cur;
                self.parent_edge[next] = edge;
                reached += 1;
            }
            cur = next;
        }
        Ok(reached)
    }

    /// Wilson phase: attach every node outside the current tree through a
    /// loop-erased random walk, scanning start nodes in ascending order.
    fn loop_erased_completion<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let n = self.g.node_count();
        let mut next = vec![NO_PARENT; n];
        let mut next_edge = vec![NO_PARENT; n];
        for i in 0..n {
            let mut u = i;
            while !self.in_tree[u] {
                let (w, e) = self.step(u, rng)?;
                // Overwriting the successor erases any loop through `u`.
                next[u] = w;
                next_edge[u] = e;
                u = w;
            }
            u = i;
            while !self.in_tree[u] {
                self.in_tree[u] = true;
                self.parent[u] = next[u];
                self.parent_edge[u] = next_edge[u];
                u = next[u];
            }
        }
        Ok(())
    }

    fn finish(self, root: usize) -> Result<SpanningTree> {
        SpanningTree::from_parent_edges(self.g, root, self.parent, &self.parent_edge)
    }
}

/// Uniform spanning tree by the random-walk (first-entrance) construction.
pub fn aldous_broder<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<SpanningTree> {
    let n = g.node_count();
    let start = rng.random_range(0..n);
    let mut walker = Walker::new(g);
    walker.first_entrance_walk(start, u64::MAX, rng)?;
    walker.finish(start)
}

/// Uniform spanning tree by Wilson's loop-erased random walks from a uniform root.
pub fn wilson<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<SpanningTree> {
    let n = g.node_count();
    let root = rng.random_range(0..n);
    let mut walker = Walker::new(g);
    walker.in_tree[root] = true;
    walker.loop_erased_completion(rng)?;
    walker.finish(root)
}

/// Approximate uniform spanning tree: `floor(beta * n)` random-walk
/// transitions of the first-entrance construction, then Wilson completion
/// rooted at the partial tree.
pub fn a_rst<R: Rng + ?Sized>(g: &Graph, beta: f64, rng: &mut R) -> Result<SpanningTree> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in (0, 1], got {beta}"
        )));
    }
    let n = g.node_count();
    let walk_steps = (beta * n as f64).floor() as u64;
    let start = rng.random_range(0..n);
    let mut walker = Walker::new(g);
    let reached = walker.first_entrance_walk(start, walk_steps, rng)?;
    if reached < n {
        walker.loop_erased_completion(rng)?;
    }
    walker.finish(start)
}

/// BFS tree from a uniform root, visiting each node's neighbors in shuffled order.
pub fn random_bfs_tree<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<SpanningTree> {
    let n = g.node_count();
    let root = rng.random_range(0..n);
    let mut parent = vec![NO_PARENT; n];
    let mut parent_edge = vec![NO_PARENT; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::with_capacity(n);
    let mut slots: Vec<(usize, usize)> = Vec::new();
    seen[root] = true;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        slots.clear();
        slots.extend(
            g.neighbor_slice(u)
                .iter()
                .copied()
                .zip(g.neighbor_edge_ids(u).iter().copied()),
        );
        slots.shuffle(rng);
        for &(w, e) in &slots {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                parent_edge[w] = e;
                queue.push_back(w);
            }
        }
    }
    SpanningTree::from_parent_edges(g, root, parent, &parent_edge)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TreeGenerator {
    Wilson,
    AldousBroder,
    ARst { beta: f64 },
    RandomBfs,
}

impl TreeGenerator {
    pub fn sample<R: Rng + ?Sized>(&self, g: &Graph, rng: &mut R) -> Result<SpanningTree> {
        match *self {
            TreeGenerator::Wilson => wilson(g, rng),
            TreeGenerator::AldousBroder => aldous_broder(g, rng),
            TreeGenerator::ARst { beta } => a_rst(g, beta, rng),
            TreeGenerator::RandomBfs => random_bfs_tree(g, rng),
        }
    }
}

impl fmt::Display for TreeGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeGenerator::Wilson => write!(f, "wilson"),
            TreeGenerator::AldousBroder => write!(f, "aldous-broder"),
            TreeGenerator::ARst { beta } => write!(f, "a-rst:{beta}"),
            TreeGenerator::RandomBfs => write!(f, "bfs"),
        }
    }
}

impl FromStr for TreeGenerator {
    type Err = Error;

    /// Accepts `wilson`, `aldous-broder`, `bfs`, `a-rst` or `a-rst:<beta>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "wilson" => Ok(TreeGenerator::Wilson),
            "aldous-broder" | "ab" => Ok(TreeGenerator::AldousBroder),
            "bfs" | "random-bfs" => Ok(TreeGenerator::RandomBfs),
            "a-rst" | "arst" => Ok(TreeGenerator::ARst { beta: DEFAULT_BETA }),
            other => {
                if let Some(beta) = other
                    .strip_prefix("a-rst:")
                    .or_else(|| other.strip_prefix("arst:"))
                {
                    let beta: f64 = beta
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad beta in {s:?}")))?;
                    Ok(TreeGenerator::ARst { beta })
                } else {
                    Err(Error::InvalidParameter(format!(
                        "unknown tree generator {s:?}"
                    )))
                }
            }
        }
    }
}

/// Draws `count` trees; tree `i` uses child stream `i` of `rng`, so the
/// result does not depend on scheduling.
pub fn sample_trees(
    g: &Graph,
    generator: TreeGenerator,
    count: usize,
    rng: RngStream,
) -> Result<Vec<SpanningTree>> {
    (0..count)
        .into_par_iter()
        .map(|i| generator.sample(g, &mut rng.child(i as u64).rng()))
        .collect()
}

/// Per-edge inclusion counts over a number of sampled trees.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFrequencyTable {
    edges: Vec<(usize, usize)>,
    counts: Vec<u64>,
    trials: u64,
}

impl EdgeFrequencyTable {
    pub fn new(g: &Graph) -> Self {
        Self {
            edges: g.edges().to_vec(),
            counts: vec![0; g.edge_count()],
            trials: 0,
        }
    }

    pub fn record(&mut self, tree: &SpanningTree) {
        for &e in tree.edge_ids() {
            self.counts[e] += 1;
        }
        self.trials += 1;
    }

    pub fn merge(mut self, other: &Self) -> Result<Self> {
        if self.edges != other.edges {
            return Err(Error::EdgeSetMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.trials += other.trials;
        Ok(self)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn frequency(&self, edge: usize) -> f64 {
        self.counts[edge] as f64 / self.trials as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.edges.len()).map(|e| self.frequency(e)).collect()
    }

    /// Binomial standard error sqrt(p (1 - p) / N).
    pub fn stderr(&self, edge: usize) -> f64 {
        let p = self.frequency(edge);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

const TALLY_CHUNKS: usize = 64;

/// Inclusion frequency of every edge over `trials` independent trees.
pub fn edge_inclusion_frequencies(
    g: &Graph,
    generator: TreeGenerator,
    trials: usize,
    rng: RngStream,
) -> Result<EdgeFrequencyTable> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let chunks = trials.min(TALLY_CHUNKS);
    let tables: Vec<EdgeFrequencyTable> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * trials / chunks;
            let hi = (c + 1) * trials / chunks;
            let mut rng = rng.child(c as u64).rng();
            let mut table = EdgeFrequencyTable::new(g);
            for _ in lo..hi {
                table.record(&generator.sample(g, &mut rng)?);
            }
            Ok(table)
        })
        .collect::<Result<_>>()?;
    tables
        .into_iter()
        .try_fold(EdgeFrequencyTable::new(g), |acc, t| acc.merge(&t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencyComparison {
    pub mean_abs_diff: f64,
    pub ks_statistic: f64,
    pub ks_pvalue: f64,
}

/// Mean absolute per-edge gap and a two-sample KS test on the two
/// collections of edge frequencies.
pub fn compare_frequency_tables(
    a: &EdgeFrequencyTable,
    b: &EdgeFrequencyTable,
) -> Result<FrequencyComparison> {
    if a.edges != b.edges || a.edges.is_empty() {
        return Err(Error::EdgeSetMismatch);
    }
    let fa = a.frequencies();
    let fb = b.frequencies();
    let mean_abs_diff =
        fa.iter().zip(&fb).map(|(x, y)| (x - y).abs()).sum::<f64>() / fa.len() as f64;
    let ks = stats::ks_two_sample(&fa, &fb);
    Ok(FrequencyComparison {
        mean_abs_diff,
        ks_statistic: ks.statistic,
        ks_pvalue: ks.p_value,
    })
}

/// Mean absolute gap between table frequencies and reference per-edge values.
pub fn mean_abs_gap(table: &EdgeFrequencyTable, reference: &[f64]) -> Result<f64> {
    if reference.len() != table.edges.len() {
        return Err(Error::LengthMismatch {
            expected: table.edges.len(),
            actual: reference.len(),
        });
    }
    Ok(table
        .frequencies()
        .iter()
        .zip(reference)
        .map(|(f, r)| (f - r).abs())
        .sum::<f64>()
        / reference.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    fn all_generators() -> [TreeGenerator; 5] {
        [
            TreeGenerator::Wilson,
            TreeGenerator::AldousBroder,
            TreeGenerator::ARst { beta: 0.5 },
            TreeGenerator::ARst { beta: 1.0 },
            TreeGenerator::RandomBfs,
        ]
    }

    #[test]
    fn tree_inputs_return_themselves() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s4 = star(4);
        let mut rng = RngStream::from_seed(3).rng();
        for gen in all_generators() {
            for g in [&p3, &s4] {
                for _ in 0..20 {
                    let t = gen.sample(g, &mut rng).unwrap();
                    assert_eq!(t.edges(), g.edges(), "{gen}");
                }
            }
        }
    }

    #[test]
    fn trees_are_valid_spanning_trees() {
        let g = complete(7);
        let mut rng = RngStream::from_seed(5).rng();
        for gen in all_generators() {
            for _ in 0..50 {
                let t = gen.sample(&g, &mut rng).unwrap();
                assert_eq!(t.edges().len(), 6);
                assert!(t.edges().iter().all(|&(u, v)| g.has_edge(u, v)));
                assert_eq!(t.to_graph().component_count(), 1);
                assert_eq!(t.parent(t.root()), None);
            }
        }
    }

    #[test]
    fn single_node_graph() {
        let g = Graph::from_edges(1, &[]).unwrap();
        let mut rng = RngStream::from_seed(0).rng();
        for gen in all_generators() {
            let t = gen.sample(&g, &mut rng).unwrap();
            assert!(t.edges().is_empty());
        }
    }

    #[test]
    fn from_parents_validates() {
        let g = complete(4);
        assert!(SpanningTree::from_parents(&g, 0, vec![NO_PARENT, 0, 0, 0]).is_ok());
        // Cycle 1 -> 2 -> 1.
        let err = SpanningTree::from_parents(&g, 0, vec![NO_PARENT, 2, 1, 0]).unwrap_err();
        assert!(matches!(err, Error::InvalidTree(_)));
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let err = SpanningTree::from_parents(&p4, 0, vec![NO_PARENT, 0, 0, 2]).unwrap_err();
        assert!(matches!(err, Error::InvalidTree(_)));
    }

    #[test]
    fn a_rst_rejects_bad_beta() {
        let g = complete(4);
        let mut rng = RngStream::from_seed(0).rng();
        assert!(a_rst(&g, 0.0, &mut rng).is_err());
        assert!(a_rst(&g, 1.5, &mut rng).is_err());
    }

    #[test]
    fn a_rst_full_beta_on_slow_cover_graph_still_spans() {
        // A long path: covering it takes far more than n walk steps.
        let n = 200;
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let mut rng = RngStream::from_seed(9).rng();
        let t = a_rst(&g, 1.0, &mut rng).unwrap();
        assert_eq!(t.edges(), g.edges());
    }

    #[test]
    fn generator_parse_roundtrip() {
        for gen in all_generators() {
            assert_eq!(gen.to_string().parse::<TreeGenerator>().unwrap(), gen);
        }
        assert_eq!(
            "a-rst".parse::<TreeGenerator>().unwrap(),
            TreeGenerator::ARst { beta: DEFAULT_BETA }
        );
        assert!("kruskal".parse::<TreeGenerator>().is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = complete(6);
        let a = sample_trees(&g, TreeGenerator::Wilson, 30, RngStream::new(4, 2)).unwrap();
        let b = sample_trees(&g, TreeGenerator::Wilson, 30, RngStream::new(4, 2)).unwrap();
        assert_eq!(a, b);
        let c = sample_trees(&g, TreeGenerator::Wilson, 30, RngStream::new(4, 3)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn frequencies_on_tree_are_one() {
        let g = star(5);
        let t = edge_inclusion_frequencies(&g, TreeGenerator::Wilson, 17, RngStream::from_seed(1))
            .unwrap();
        assert_eq!(t.trials(), 17);
        assert!(t.frequencies().iter().all(|&f| f == 1.0));
        assert!((0..5).all(|e| t.stderr(e) == 0.0));
    }

    #[test]
    fn compare_identical_tables() {
        let g = complete(4);
        let t = edge_inclusion_frequencies(&g, TreeGenerator::Wilson, 500, RngStream::from_seed(1))
            .unwrap();
        let c = compare_frequency_tables(&t, &t).unwrap();
        assert_eq!(c.mean_abs_diff, 0.0);
        assert_eq!(c.ks_statistic, 0.0);
        let other = EdgeFrequencyTable::new(&star(3));
        assert!(matches!(
            compare_frequency_tables(&t, &other),
            Err(Error::EdgeSetMismatch)
        ));
    }

    #[test]
    fn step_cap_grows_with_n() {
        assert!(step_cap(10) < step_cap(20));
        assert_eq!(step_cap(1), (1e4 * 2f64.ln()).ceil() as u64);
    }
}
