//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

/// All spanning trees of a small graph, each as a sorted list of edge
/// indices into `edges`. Brute force over `(n-1)`-subsets.
pub fn enumerate_spanning_trees(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let m = edges.len();
    let mut out = Vec::new();
    let k = n - 1;
    let mut pick: Vec<usize> = (0..k).collect();
    if k > m {
        return out;
    }
    loop {
        let mut root: Vec<usize> = (0..n).collect();
        fn find(root: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        let mut acyclic = true;
        for &e in &pick {
            let (a, b) = (find(&mut root, edges[e].0), find(&mut root, edges[e].1));
            if a == b {
                acyclic = false;
                break;
            }
            root[a] = b;
        }
        if acyclic {
            out.push(pick.clone());
        }
        // Next combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < m - k + i {
                pick[i] += 1;
                for j in i + 1..k {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Effective resistances by grounding node 0 and inverting the reduced
/// Laplacian with Gauss-Jordan elimination.
pub fn grounded_resistance(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let size = n - 1;
    let mut a = vec![vec![0.0f64; 2 * size]; size];
    for &(u, v) in edges {
        for (x, y) in [(u, v), (v, u)] {
            if x > 0 {
                a[x - 1][x - 1] += 1.0;
                if y > 0 {
                    a[x - 1][y - 1] -= 1.0;
                }
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[size + i] = 1.0;
    }
    for col in 0..size {
        let pivot = (col..size)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..size {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    let g = |i: usize, j: usize| -> f64 {
        if i == 0 || j == 0 {
            0.0
        } else {
            a[i - 1][size + j - 1]
        }
    };
    (0..n)
        .map(|i| (0..n).map(|j| g(i, i) + g(j, j) - 2.0 * g(i, j)).collect())
        .collect()
}

/// Canonical sorted edge list of a tree, for tallying.
pub fn tree_key(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut k: Vec<_> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    k.sort_unstable();
    k
}

pub fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            e.push((u, v));
        }
    }
    e
}

/// Index of every canonical tree edge set.
pub fn tree_index(n: usize, edges: &[(usize, usize)]) -> HashMap<Vec<(usize, usize)>, usize> {
    enumerate_spanning_trees(n, edges)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            (
                tree_key(&t.iter().map(|&e| edges[e]).collect::<Vec<_>>()),
                i,
            )
        })
        .collect()
}
