use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Undirected multigraph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multigraph {
    n: usize,
    mult: BTreeMap<(usize, usize), usize>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { n, mult: BTreeMap::new() }
    }

    pub fn from_graph(g: &Graph) -> Self {
        Multigraph {
            n: g.n_vertices(),
            mult: g.edges().map(|e| (e, 1)).collect(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.add_edges(u, v, 1)
    }

    pub fn add_edges(&mut self, u: usize, v: usize, count: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::Vertex { v: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if count > 0 {
            *self.mult.entry((u.min(v), u.max(v))).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.mult.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Distinct vertex pairs with their multiplicities.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.mult.iter().map(|(&e, &m)| (e, m))
    }

    pub fn total_edges(&self) -> usize {
        self.mult.values().sum()
    }
}

/// Simple graph keeping exactly the odd-multiplicity pairs.
pub fn reduce_multigraph(mg: &Multigraph) -> Graph {
    let mut g = Graph::new(mg.n);
    for ((u, v), m) in mg.edges() {
        if m % 2 == 1 {
            g.add_edge(u, v).expect("multigraph pairs are valid");
        }
    }
    g
}

/// Merges each block of `partition` into one vertex; block i becomes vertex i.
/// Edges inside a block vanish, all others keep their multiplicity.
pub fn contract_edges(mg: &Multigraph, partition: &[Vec<usize>]) -> Result<Multigraph> {
    let mut block_of = vec![usize::MAX; mg.n];
    for (b, set) in partition.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::Partition(format!("block {b} is empty")));
        }
        for &v in set {
            if v >= mg.n {
                return Err(Error::Vertex { v, n: mg.n });
            }
            if block_of[v] != usize::MAX {
                return Err(Error::Partition(format!("vertex {v} appears twice")));
            }
            block_of[v] = b;
        }
    }
    if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
        return Err(Error::Partition(format!("vertex {v} is not covered")));
    }
    for (b, set) in partition.iter().enumerate() {
        if !block_connected(mg, set) {
            return Err(Error::DisconnectedMergeSet(b));
        }
    }
    let mut out = Multigraph::new(partition.len());
    for ((u, v), m) in mg.edges() {
        let (a, b) = (block_of[u], block_of[v]);
        if a != b {
            out.add_edges(a, b, m)?;
        }
    }
    Ok(out)
}

fn block_connected(mg: &Multigraph, set: &[usize]) -> bool {
    let mut seen = vec![set[0]];
    let mut stack = vec![set[0]];
    while let Some(v) = stack.pop() {
        for &w in set {
            if !seen.contains(&w) && mg.multiplicity(v, w) > 0 {
                seen.push(w);
                stack.push(w);
            }
        }
    }
    seen.len() == set.len()
}

/// Contracts a single edge (u, v). The merged vertex takes min(u, v)'s slot and
/// vertices above max(u, v) shift down by one.
pub fn contract_edge(mg: &Multigraph, u: usize, v: usize) -> Result<Multigraph> {
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    let (lo, hi) = (u.min(v), u.max(v));
    if hi >= mg.n {
        return Err(Error::Vertex { v: hi, n: mg.n });
    }
    let partition: Vec<Vec<usize>> = (0..mg.n)
        .filter(|&w| w != hi)
        .map(|w| if w == lo { vec![lo, hi] } else { vec![w] })
        .collect();
    contract_edges(mg, &partition)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_contraction_doubles_an_edge() {
        let mg = Multigraph::from_graph(&Graph::cycle(3));
        let c = contract_edge(&mg, 0, 1).unwrap();
        assert_eq!(c.n_vertices(), 2);
        assert_eq!(c.multiplicity(0, 1), 2);
        assert_eq!(reduce_multigraph(&c).n_edges(), 0);
    }

    #[test]
    fn parity_reduction() {
        let mut mg = Multigraph::new(3);
        mg.add_edges(0, 1, 2).unwrap();
        mg.add_edges(1, 2, 3).unwrap();
        let g = reduce_multigraph(&mg);
        assert!(!g.has_edge(0, 1));
        assert!(g.has_edge(1, 2));
        assert_eq!(mg.add_edge(2, 2), Err(Error::SelfLoop(2)));
    }

    #[test]
    fn trivial_partition_is_identity() {
        let mg = Multigraph::from_graph(&Graph::grid(2, 3));
        let p: Vec<Vec<usize>> = (0..6).map(|v| vec![v]).collect();
        assert_eq!(contract_edges(&mg, &p).unwrap(), mg);
    }

    #[test]
    fn hexagon_adjacent_pair() {
        let mg = Multigraph::from_graph(&Graph::cycle(6));
        let g = reduce_multigraph(&contract_edge(&mg, 0, 1).unwrap());
        assert_eq!(g, Graph::cycle(5));
    }

    #[test]
    fn disconnected_block_rejected() {
        let mg = Multigraph::from_graph(&Graph::path(3));
        let err = contract_edges(&mg, &[vec![0, 2], vec![1]]);
        assert_eq!(err, Err(Error::DisconnectedMergeSet(0)));
    }
}
