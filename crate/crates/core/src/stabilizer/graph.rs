use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph on vertices 0..n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, edges: BTreeSet::new() }
    }

    pub fn with_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::Vertex { v: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !self.edges.insert((u.min(v), u.max(v))) {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        Ok(())
    }

    /// Adds the edge if absent, removes it if present.
    pub fn toggle_edge(&mut self, u: usize, v: usize) -> Result<()> {
        match self.add_edge(u, v) {
            Err(Error::DuplicateEdge(a, b)) => {
                self.edges.remove(&(a, b));
                Ok(())
            }
            other => other,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Edges as (u, v) with u < v, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Drops v; vertices above it shift down by one.
    pub fn remove_vertex(&self, v: usize) -> Result<Graph> {
        if v >= self.n {
            return Err(Error::Vertex { v, n: self.n });
        }
        let shift = |w: usize| if w > v { w - 1 } else { w };
        Ok(Graph {
            n: self.n - 1,
            edges: self
                .edges
                .iter()
                .filter(|&&(a, b)| a != v && b != v)
                .map(|&(a, b)| (shift(a), shift(b)))
                .collect(),
        })
    }

    /// Subgraph induced on `keep`, relabelled in the given order.
    pub fn induced(&self, keep: &[usize]) -> Result<Graph> {
        let mut pos = vec![None; self.n];
        for (i, &v) in keep.iter().enumerate() {
            if v >= self.n {
                return Err(Error::Vertex { v, n: self.n });
            }
            if pos[v].replace(i).is_some() {
                return Err(Error::RepeatedQubit(v));
            }
        }
        let mut g = Graph::new(keep.len());
        for &(a, b) in &self.edges {
            if let (Some(x), Some(y)) = (pos[a], pos[b]) {
                g.add_edge(x, y)?;
            }
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Graph {
        Graph {
            n,
            edges: (1..n).map(|v| (v - 1, v)).collect(),
        }
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n > 2 {
            g.edges.insert((0, n - 1));
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        Graph {
            n,
            edges: (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
        }
    }

    pub fn star(n: usize) -> Graph {
        Graph {
            n,
            edges: (1..n).map(|v| (0, v)).collect(),
        }
    }

    /// Vertex (r, c) is r·cols + c.
    pub fn grid(rows: usize, cols: usize) -> Graph {
        let mut edges = BTreeSet::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.insert((v, v + 1));
                }
                if r + 1 < rows {
                    edges.insert((v, v + cols));
                }
            }
        }
        Graph { n: rows * cols, edges }
    }

    /// Edge-list text: header `n m`, then m lines `u v`, 0-indexed.
    /// Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut g = Graph::new(0);
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(|f| f.parse::<usize>().map_err(|_| err(format!("expected an integer, got {f:?}"))))
                .collect::<Result<_>>()?;
            if fields.len() != 2 {
                return Err(err(format!("expected 2 fields, got {}", fields.len())));
            }
            match header {
                None => {
                    header = Some((fields[0], fields[1]));
                    g = Graph::new(fields[0]);
                }
                Some((_, m)) => {
                    if g.n_edges() == m {
                        return Err(err(format!("more than the declared {m} edges")));
                    }
                    g.add_edge(fields[0], fields[1]).map_err(|e| err(e.to_string()))?;
                }
            }
        }
        match header {
            None => Err(Error::Parse { line: last_line.max(1), msg: "missing `n m` header".into() }),
            Some((_, m)) if g.n_edges() != m => Err(Error::Parse {
                line: last_line,
                msg: format!("declared {m} edges, found {}", g.n_edges()),
            }),
            Some(_) => Ok(g),
        }
    }

    /// Canonical edge-list text (sorted edges, u < v).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path() {
        let g = Graph::parse_edge_list("3 2\n0 1\n1 2").unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn rejects_bad_lists() {
        assert!(matches!(Graph::parse_edge_list("2 1\n0 0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse_edge_list("2 2\n0 1\n1 0"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(Graph::parse_edge_list("2 1\n0 5"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse_edge_list("3 2\n0 1"), Err(Error::Parse { .. })));
        assert!(matches!(Graph::parse_edge_list("3 x\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn canonical_text_round_trips() {
        let g = Graph::grid(2, 3);
        let text = g.to_edge_list();
        assert_eq!(Graph::parse_edge_list(&text).unwrap().to_edge_list(), text);
    }

    #[test]
    fn remove_vertex_compacts() {
        let g = Graph::path(3).remove_vertex(1).unwrap();
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.n_edges(), 0);
        let g = Graph::path(4).remove_vertex(0).unwrap();
        assert_eq!(g, Graph::path(3));
    }
}
