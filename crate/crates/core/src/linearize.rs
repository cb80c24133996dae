//! Depth-first linearization of spanning trees into random path graphs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Labels, Topology};
use crate::spanning::SpanningTree;

/// A path over all nodes: `order[t]` is the t-th node, and consecutive
/// entries are joined by path edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathGraph {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl PathGraph {
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (t, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(Error::InvalidPermutation { n });
            }
            position[v] = t;
        }
        Ok(Self { order, position })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn node_count(&self) -> usize {
        self.order.len()
    }

    /// `(order[t], order[t + 1])` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.order.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn to_graph(&self) -> Graph {
        let edges: Vec<_> = self.edges().collect();
        Graph::from_edges(self.node_count(), &edges).expect("a path is connected")
    }
}

impl Topology for PathGraph {
    fn node_count(&self) -> usize {
        self.order.len()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let t = self.position[v];
        let prev = t.checked_sub(1).map(|p| self.order[p]);
        let next = self.order.get(t + 1).copied();
        prev.into_iter().chain(next)
    }

    fn degree(&self, v: usize) -> usize {
        let t = self.position[v];
        usize::from(t > 0) + usize::from(t + 1 < self.order.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DfsStart {
    Random,
    Node(usize),
}

/// Depth-first preorder of `tree` from `start`, children visited in a
/// uniformly shuffled order.
pub fn dfs_linearize<R: Rng + ?Sized>(
    tree: &SpanningTree,
    start: DfsStart,
    rng: &mut R,
) -> Result<PathGraph> {
    let n = tree.node_count();
    let start = match start {
        DfsStart::Random => rng.random_range(0..n),
        DfsStart::Node(v) if v < n => v,
        DfsStart::Node(v) => return Err(Error::InvalidStart { start: v, n }),
    };
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut stack = vec![start];
    let mut children = Vec::new();
    visited[start] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        children.clear();
        children.extend(
            tree.neighbor_slice(u)
                .iter()
                .copied()
                .filter(|&w| !visited[w]),
        );
        children.shuffle(rng);
        for &w in &children {
            visited[w] = true;
        }
        // Reversed so the first shuffled child is popped next.
        stack.extend(children.iter().rev());
    }
    debug_assert_eq!(order.len(), n);
    PathGraph::from_order(order)
}

/// Number of consecutive path pairs with different labels.
pub fn path_cutsize(path: &PathGraph, y: &Labels) -> Result<usize> {
    y.check_len(path.node_count())?;
    let labels = y.values();
    Ok(path
        .edges()
        .filter(|&(u, v)| labels[u] != labels[v])
        .count())
}
