//! Entanglement width: min over subcubic trees of the largest edge-cut entropy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mask_entropy;
use crate::error::{Error, Result};
use crate::statevec::StateVector;

pub const MAX_WIDTH_QUBITS: usize = 8;

/// Vertices `0..n_leaves` are the leaves, vertex k carrying qubit k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcubicTree {
    n_leaves: usize,
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl SubcubicTree {
    pub fn new(n_leaves: usize, n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let bad = |m: String| Err(Error::Invalid(format!("not a subcubic tree: {m}")));
        if n_leaves == 0 || n_vertices < n_leaves {
            return bad("needs at least one leaf".into());
        }
        if edges.len() + 1 != n_vertices {
            return bad(format!("{} edges on {} vertices", edges.len(), n_vertices));
        }
        let mut deg = vec![0usize; n_vertices];
        let mut parent: Vec<usize> = (0..n_vertices).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        for &(u, v) in &edges {
            if u >= n_vertices || v >= n_vertices || u == v {
                return bad(format!("edge ({u}, {v})"));
            }
            deg[u] += 1;
            deg[v] += 1;
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                return bad("cycle".into());
            }
            parent[a] = b;
        }
        if let Some(v) = (0..n_vertices).find(|&v| deg[v] > 3) {
            return bad(format!("vertex {v} has degree {}", deg[v]));
        }
        if n_vertices > 1 {
            if let Some(v) = (0..n_leaves).find(|&v| deg[v] != 1) {
                return bad(format!("qubit {v} is not a leaf"));
            }
            if let Some(v) = (n_leaves..n_vertices).find(|&v| deg[v] < 2) {
                return bad(format!("unlabelled leaf {v}"));
            }
        }
        Ok(SubcubicTree { n_leaves, n_vertices, edges })
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Leaf mask on one side of each edge, in edge order.
    pub fn splits(&self) -> Vec<u64> {
        splits(self.n_leaves, self.n_vertices, &self.edges)
    }
}

fn splits(n_leaves: usize, n_vertices: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    let mut adj = vec![Vec::new(); n_vertices];
    for (i, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    // Iterative post-order from vertex 0; each edge takes its child's subtree mask.
    let mut mask: Vec<u64> = (0..n_vertices).map(|v| if v < n_leaves { 1 << v } else { 0 }).collect();
    let mut out = vec![0u64; edges.len()];
    let mut order = Vec::with_capacity(n_vertices);
    let mut up = vec![(usize::MAX, usize::MAX); n_vertices];
    let mut stack = vec![0usize];
    let mut seen = vec![false; n_vertices];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &(w, e) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                up[w] = (v, e);
                stack.push(w);
            }
        }
    }
    for &v in order.iter().rev() {
        let (p, e) = up[v];
        if p != usize::MAX {
            out[e] = mask[v];
            mask[p] |= mask[v];
        }
    }
    out
}

/// Every leaf-labelled tree whose internal vertices have degree 3, built by
/// inserting leaf k on each edge of every tree on leaves 0..k. Each labelled
/// tree appears once; there are (2n−5)!! of them for n ≥ 3.
pub fn enumerate_binary_trees(n: usize) -> Result<Vec<SubcubicTree>> {
    check_cap(n)?;
    let mut out = Vec::new();
    for_each_tree(n, &mut |nv, edges| {
        out.push(SubcubicTree { n_leaves: n, n_vertices: nv, edges: edges.to_vec() })
    });
    Ok(out)
}

fn check_cap(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("empty register".into()));
    }
    if n > MAX_WIDTH_QUBITS {
        return Err(Error::Cap { what: "qubits for tree enumeration", got: n, cap: MAX_WIDTH_QUBITS });
    }
    Ok(())
}

fn seed_tree(n: usize) -> (usize, Vec<(usize, usize)>) {
    match n {
        1 => (1, vec![]),
        2 => (2, vec![(0, 1)]),
        // Leaves 0..3 on internal vertex n; internals are numbered from n up.
        _ => (n + 1, vec![(0, n), (1, n), (2, n)]),
    }
}

fn for_each_tree(n: usize, visit: &mut dyn FnMut(usize, &[(usize, usize)])) {
    let (nv, mut edges) = seed_tree(n);
    if n <= 3 {
        visit(nv, &edges);
        return;
    }
    insert(n, 3, nv, &mut edges, visit);
}

fn insert(n: usize, k: usize, nv: usize, edges: &mut Vec<(usize, usize)>, visit: &mut dyn FnMut(usize, &[(usize, usize)])) {
    if k == n {
        visit(nv, edges);
        return;
    }
    let w = nv;
    for i in 0..edges.len() {
        let (u, v) = edges[i];
        edges[i] = (u, w);
        edges.push((w, v));
        edges.push((w, k));
        insert(n, k + 1, nv + 1, edges, visit);
        edges.truncate(edges.len() - 2);
        edges[i] = (u, v);
    }
}

/// Largest edge-cut entropy of one tree.
pub fn tree_width(state: &StateVector, tree: &SubcubicTree) -> Result<f64> {
    if tree.n_leaves != state.n_qubits() {
        return Err(Error::Dimension { expected: state.n_qubits(), got: tree.n_leaves });
    }
    Ok(tree.splits().into_iter().map(|m| mask_entropy(state, m)).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthResult {
    pub width: f64,
    pub tree: SubcubicTree,
    pub trees_examined: u64,
}

pub fn entanglement_width(state: &StateVector) -> Result<WidthResult> {
    let n = state.n_qubits();
    check_cap(n)?;
    let entropy: Vec<f64> = (0..1u64 << n).into_par_iter().map(|m| mask_entropy(state, m)).collect();
    let mut best: Option<(f64, usize, Vec<(usize, usize)>)> = None;
    let mut count = 0u64;
    for_each_tree(n, &mut |nv, edges| {
        count += 1;
        let w = splits(n, nv, edges).into_iter().map(|m| entropy[m as usize]).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| w < b.0 - 1e-12) {
            best = Some((w, nv, edges.to_vec()));
        }
    });
    let (width, nv, edges) = best.expect("at least one tree");
    Ok(WidthResult {
        width,
        tree: SubcubicTree { n_leaves: n, n_vertices: nv, edges },
        trees_examined: count,
    })
}
