//! Simple undirected graphs in compressed adjacency form, labels, splits,
//! cut-size and k-hop neighborhoods.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// Read-only neighbor access shared by graphs, spanning trees and path graphs.
pub trait Topology {
    fn node_count(&self) -> usize;

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_;

    fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }
}

impl<T: Topology + ?Sized> Topology for &T {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (**self).neighbors(v)
    }

    fn degree(&self, v: usize) -> usize {
        (**self).degree(v)
    }
}

/// Counts of input pairs discarded while building a [`Graph`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Immutable simple undirected graph.
///
/// Neighbor lists are sorted ascending. Undirected edges are numbered in
/// lexicographic order of `(min, max)`; every adjacency slot remembers the id
/// of its edge so per-edge tallies never need a lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    slot_edges: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a connected graph, dropping self-loops and duplicate pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges_with_report(n, edges).map(|(g, _)| g)
    }

    pub fn from_edges_with_report(
        n: usize,
        edges: &[(usize, usize)],
    ) -> Result<(Self, BuildReport)> {
        let (g, report) = Self::build_unchecked(n, edges)?;
        let components = g.component_count();
        if components > 1 {
            return Err(Error::DisconnectedGraph { components });
        }
        if report.self_loops + report.duplicates > 0 {
            log::debug!(
                "dropped {} self-loops and {} duplicate edges",
                report.self_loops,
                report.duplicates
            );
        }
        Ok((g, report))
    }

    /// Same as [`Graph::from_edges_with_report`] without the connectivity
    /// check. Induced subgraphs and loader pre-passes use this.
    pub fn build_unchecked(n: usize, edges: &[(usize, usize)]) -> Result<(Self, BuildReport)> {
        let mut report = BuildReport::default();
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidIndex { index: x, n });
                }
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        report.duplicates = before - canon.len();

        let mut degree = vec![0usize; n];
        for &(u, v) in &canon {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0; 2 * canon.len()];
        let mut slot_edges = vec![0; 2 * canon.len()];
        // Edges are sorted by (u, v): writing the smaller endpoints first and
        // then the larger ones leaves every neighbor list sorted.
        for (id, &(u, v)) in canon.iter().enumerate() {
            targets[cursor[v]] = u;
            slot_edges[cursor[v]] = id;
            cursor[v] += 1;
        }
        for (id, &(u, v)) in canon.iter().enumerate() {
            targets[cursor[u]] = v;
            slot_edges[cursor[u]] = id;
            cursor[u] += 1;
        }
        Ok((
            Self {
                offsets,
                targets,
                slot_edges,
                edges: canon,
            },
            report,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(u, v)` pairs with `u < v`, indexed by edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbor_slice(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids aligned with [`Graph::neighbor_slice`].
    pub fn neighbor_edge_ids(&self, v: usize) -> &[usize] {
        &self.slot_edges[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.node_count() || v >= self.node_count() {
            return None;
        }
        let nbrs = self.neighbor_slice(u);
        nbrs.binary_search(&v)
            .ok()
            .map(|k| self.slot_edges[self.offsets[u] + k])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    /// Component id per node, ids numbered in order of their smallest node.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbor_slice(u) {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |c| c + 1)
    }

    /// Nodes of the largest component, ascending. Ties go to the component
    /// containing the smallest node.
    pub fn largest_component(&self) -> Vec<usize> {
        let comp = self.components();
        let count = comp.iter().max().map_or(0, |c| c + 1);
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)));
        match best {
            Some(b) => (0..comp.len()).filter(|&v| comp[v] == b).collect(),
            None => Vec::new(),
        }
    }

    /// Subgraph induced on `nodes`; local index `k` is `nodes[k]`.
    /// The result may be disconnected.
    pub fn induced(&self, nodes: &[usize]) -> Result<Graph> {
        induced_subgraph(self, nodes)
    }
}

impl Topology for Graph {
    fn node_count(&self) -> usize {
        Graph::node_count(self)
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbor_slice(v).iter().copied()
    }

    fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// Class labels in `[0, class_count)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    values: Vec<usize>,
    class_count: usize,
}

impl Labels {
    pub fn new(values: Vec<usize>, class_count: usize) -> Result<Self> {
        if class_count < 2 {
            return Err(Error::InvalidLabels(format!(
                "need at least 2 classes, got {class_count}"
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= class_count) {
            return Err(Error::InvalidLabels(format!(
                "label {bad} outside [0, {class_count})"
            )));
        }
        Ok(Self {
            values,
            class_count,
        })
    }

    /// Class count taken as `max + 1`, at least 2.
    pub fn infer(values: Vec<usize>) -> Result<Self> {
        let c = values.iter().max().map_or(2, |&m| (m + 1).max(2));
        Self::new(values, c)
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn get(&self, v: usize) -> usize {
        self.values[v]
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Disjoint train / validation / test node sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn new(
        train: Vec<usize>,
        validation: Vec<usize>,
        test: Vec<usize>,
        n: usize,
    ) -> Result<Self> {
        let split = Self {
            train,
            validation,
            test,
        };
        split.validate(n)?;
        Ok(split)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.train.is_empty() {
            return Err(Error::InvalidSplit("training set is empty".into()));
        }
        let mut seen = vec![false; n];
        for &v in self.train.iter().chain(&self.validation).chain(&self.test) {
            if v >= n {
                return Err(Error::InvalidIndex { index: v, n });
            }
            if seen[v] {
                return Err(Error::InvalidSplit(format!("node {v} appears twice")));
            }
            seen[v] = true;
        }
        Ok(())
    }
}

/// Number of edges whose endpoints carry different labels.
pub fn cutsize(g: &Graph, y: &Labels) -> Result<usize> {
    y.check_len(g.node_count())?;
    let labels = y.values();
    Ok(g.edges()
        .iter()
        .filter(|&&(u, v)| labels[u] != labels[v])
        .count())
}

/// Nodes within `k` hops of a seed set, with the induced subgraph.
#[derive(Clone, Debug)]
pub struct Neighborhood {
    /// Original indices, ascending. Local index `k` maps to `nodes[k]`.
    pub nodes: Vec<usize>,
    pub local: HashMap<usize, usize>,
    pub graph: Graph,
}

impl Neighborhood {
    pub fn local_index(&self, original: usize) -> Option<usize> {
        self.local.get(&original).copied()
    }
}

/// Breadth-first ball of radius `k` around `seeds`, as a sorted node list.
/// Work is proportional to the size of the ball, not to the topology.
pub fn k_hop_nodes<T: Topology>(topo: &T, seeds: &[usize], k: usize) -> Result<Vec<usize>> {
    let n = topo.node_count();
    let mut dist: HashMap<usize, usize> = HashMap::with_capacity(seeds.len() * (2 * k + 1));
    let mut queue = VecDeque::new();
    for &s in seeds {
        if s >= n {
            return Err(Error::InvalidIndex { index: s, n });
        }
        if dist.insert(s, 0).is_none() {
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if d == k {
            continue;
        }
        for w in topo.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                queue.push_back(w);
            }
        }
    }
    let mut nodes: Vec<usize> = dist.into_keys().collect();
    nodes.sort_unstable();
    Ok(nodes)
}

pub fn k_hop_neighborhood<T: Topology>(
    topo: &T,
    seeds: &[usize],
    k: usize,
) -> Result<Neighborhood> {
    let nodes = k_hop_nodes(topo, seeds, k)?;
    let graph = induced_subgraph(topo, &nodes)?;
    let local = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    Ok(Neighborhood {
        nodes,
        local,
        graph,
    })
}

fn induced_subgraph<T: Topology>(topo: &T, nodes: &[usize]) -> Result<Graph> {
    let n = topo.node_count();
    let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for (i, &v) in nodes.iter().enumerate() {
        if v >= n {
            return Err(Error::InvalidIndex { index: v, n });
        }
        for w in topo.neighbors(v) {
            if let Some(&j) = local.get(&w) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    Graph::build_unchecked(nodes.len(), &edges).map(|(g, _)| g)
}
