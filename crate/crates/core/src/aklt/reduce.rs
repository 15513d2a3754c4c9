//! From POVM outcomes to graphs: same-axis domains, parity reduction, and
//! the checks built on top of it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_povm, AkltState, Axis, Boundary, PovmMode, PovmOutcome, SpinKind};
use crate::entanglement::mask_entropy;
use crate::error::{Error, Result};
use crate::stabilizer::{contract_edges, graph_state, reduce_multigraph, Graph, Multigraph};

/// Sites allowed in a dense consistency check.
pub const MAX_CHECK_SITES: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub graph: Graph,
    /// Graph vertex of every site.
    pub domain_of: Vec<usize>,
    /// Sites of each graph vertex; ordered by smallest site.
    pub domains: Vec<Vec<usize>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Contracts same-axis edges, then keeps odd-multiplicity edges.
pub fn reduce_to_graph(lattice: &Graph, outcome: &PovmOutcome) -> Result<Reduction> {
    let n = lattice.n_vertices();
    let axes = outcome.axes();
    if axes.len() != n {
        return Err(Error::Dimension { expected: n, got: axes.len() });
    }
    let mut uf = UnionFind::new(n);
    for (u, v) in lattice.edges() {
        if axes[u] == axes[v] {
            uf.union(u, v);
        }
    }
    // Roots are block minima, so numbering roots in site order sorts blocks by smallest site.
    let mut id = vec![usize::MAX; n];
    let mut domains: Vec<Vec<usize>> = Vec::new();
    let mut domain_of = vec![0; n];
    for s in 0..n {
        let r = uf.find(s);
        if id[r] == usize::MAX {
            id[r] = domains.len();
            domains.push(Vec::new());
        }
        domain_of[s] = id[r];
        domains[id[r]].push(s);
    }
    let mg = contract_edges(&Multigraph::from_graph(lattice), &domains)?;
    Ok(Reduction { graph: reduce_multigraph(&mg), domain_of, domains })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub outcome: String,
    pub probability: f64,
    pub domains: usize,
    /// Domains pinned by a |0⟩ boundary leg; predicted to be unentangled.
    pub removed: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub bipartitions: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Compares the entropy of every domain bipartition of the post-POVM state
/// with the graph state predicted by `reduce_to_graph`.
///
/// With a |0⟩ boundary a z-domain that owns a dangling leg is pinned to a
/// product state, so it drops out of the prediction. With an open boundary
/// every ancilla counts as part of its host site's domain.
pub fn check_reduction_consistency(aklt: &AkltState, outcome: &PovmOutcome) -> Result<ConsistencyReport> {
    let n = aklt.n_sites();
    if n > MAX_CHECK_SITES {
        return Err(Error::Cap { what: "sites for a consistency check", got: n, cap: MAX_CHECK_SITES });
    }
    let post = sample_povm(aklt, &PovmMode::Forced(outcome.clone()))?;
    let red = reduce_to_graph(aklt.lattice(), outcome)?;
    let nd = red.domains.len();
    let removed: Vec<usize> = if aklt.boundary() == Boundary::Zero {
        (0..nd)
            .filter(|&d| red.domains[d].iter().any(|&s| outcome.axes()[s] == Axis::Z && aklt.dangling().contains(&s)))
            .collect()
    } else {
        vec![]
    };
    let keep: Vec<usize> = (0..nd).filter(|d| !removed.contains(d)).collect();
    let predicted = if keep.is_empty() { None } else { Some(graph_state(&red.graph.induced(&keep)?)?) };
    let party: Vec<u64> = red
        .domains
        .iter()
        .map(|sites| sites.iter().flat_map(|&s| aklt.party_qubits(s)).map(|q| 1u64 << q).sum())
        .collect();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    // Domain 0 always sits on side A; the complement gives the same entropy.
    for mask in (1u64..1 << nd).step_by(2) {
        if mask == (1 << nd) - 1 {
            continue;
        }
        let phys: u64 = (0..nd).filter(|d| mask >> d & 1 == 1).map(|d| party[d]).sum();
        let pred_mask: u64 = keep.iter().enumerate().filter(|(_, &d)| mask >> d & 1 == 1).map(|(i, _)| 1 << i).sum();
        let got = mask_entropy(&post.state, phys);
        let want = predicted.as_ref().map_or(0.0, |g| mask_entropy(g, pred_mask));
        worst = worst.max((got - want).abs());
        count += 1;
    }
    Ok(ConsistencyReport {
        outcome: outcome.to_string(),
        probability: post.probability,
        domains: nd,
        removed,
        edges: red.graph.edges().collect(),
        bipartitions: count,
        max_deviation: worst,
        pass: worst <= 1e-8,
    })
}

/// L×L brick-wall lattice: every horizontal bond, and a vertical bond below
/// (r, c) when r + c is even. Site (r, c) is r·L + c.
pub fn brick_wall(l: usize) -> Graph {
    let mut g = Graph::new(l * l);
    for r in 0..l {
        for c in 0..l {
            if c + 1 < l {
                g.add_edge(r * l + c, r * l + c + 1).expect("in range");
            }
            if r + 1 < l && (r + c) % 2 == 0 {
                g.add_edge(r * l + c, (r + 1) * l + c).expect("in range");
            }
        }
    }
    g
}

/// Whether some site in column 0 connects to some site in column L−1 in the
/// reduced graph.
pub fn spans(l: usize, axes: &[Axis]) -> Result<bool> {
    let red = reduce_to_graph(&brick_wall(l), &PovmOutcome(axes.to_vec()))?;
    let mut uf = UnionFind::new(red.domains.len());
    for (u, v) in red.graph.edges() {
        uf.union(u, v);
    }
    let left: Vec<usize> = (0..l).map(|r| uf.find(red.domain_of[r * l])).collect();
    Ok((0..l).any(|r| left.contains(&uf.find(red.domain_of[r * l + l - 1]))))
}

/// Site axes drawn independently with the given weights for x, y, z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisModel {
    pub weights: [f64; 3],
}

impl AxisModel {
    pub fn uniform() -> Self {
        AxisModel { weights: [1.0; 3] }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Axis {
        let total: f64 = self.weights.iter().sum();
        let u = rng.random::<f64>() * total;
        if u < self.weights[0] {
            Axis::X
        } else if u < self.weights[0] + self.weights[1] {
            Axis::Y
        } else {
            Axis::Z
        }
    }
}

impl Default for AxisModel {
    fn default() -> Self {
        AxisModel::uniform()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationResult {
    pub l: usize,
    pub trials: usize,
    pub spanning: usize,
    pub fraction: f64,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
}

pub fn percolation_mc(l: usize, model: &AxisModel, trials: usize, seed: u64) -> Result<PercolationResult> {
    if l == 0 || trials == 0 {
        return Err(Error::Invalid("lattice size and trials must be positive".into()));
    }
    if model.weights.iter().any(|&w| !(w >= 0.0)) || model.weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::Invalid("axis weights must be non-negative with a positive sum".into()));
    }
    let spanning = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let axes: Vec<Axis> = (0..l * l).map(|_| model.sample(&mut rng)).collect();
            spans(l, &axes).map(usize::from)
        })
        .sum::<Result<usize>>()?;
    let fraction = spanning as f64 / trials as f64;
    Ok(PercolationResult {
        l,
        trials,
        spanning,
        fraction,
        half_width: 1.96 * (fraction * (1.0 - fraction) / trials as f64).sqrt(),
    })
}

/// Consistency check for a spin-3/2 patch at a sampled outcome.
pub fn check_sampled(lattice: &Graph, boundary: Boundary, seed: u64) -> Result<ConsistencyReport> {
    let aklt = super::build_aklt(lattice, SpinKind::Spin3Half, boundary)?;
    let outcome = sample_povm(&aklt, &PovmMode::Sample(seed))?.outcome;
    check_reduction_consistency(&aklt, &outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(s: &str) -> PovmOutcome {
        s.parse().unwrap()
    }

    #[test]
    fn distinct_axes_keep_the_path() {
        let red = reduce_to_graph(&Graph::path(4), &outcome("xyxz")).unwrap();
        assert_eq!(red.graph, Graph::path(4));
    }

    #[test]
    fn hexagon_pair_gives_pentagon() {
        let red = reduce_to_graph(&Graph::cycle(6), &outcome("xxyzyz")).unwrap();
        assert_eq!(red.graph, Graph::cycle(5));
        assert_eq!(red.domains[0], vec![0, 1]);
    }

    #[test]
    fn uniform_hexagon_collapses() {
        let red = reduce_to_graph(&Graph::cycle(6), &outcome("zzzzzz")).unwrap();
        assert_eq!(red.graph.n_vertices(), 1);
        assert_eq!(red.graph.n_edges(), 0);
    }

    #[test]
    fn brick_wall_degrees() {
        let g = brick_wall(6);
        assert!((0..36).all(|v| g.degree(v) <= 3));
        assert_eq!(g.n_edges(), 6 * 5 + 15);
    }

    #[test]
    fn intact_lattice_spans() {
        assert!(spans(2, &[Axis::X, Axis::Y, Axis::Z, Axis::X]).unwrap());
        // A column of identical axes merges into one vertex that still spans.
        assert!(spans(3, &"xyzyzxzxy".chars().map(|c| c.to_string().parse().unwrap()).collect::<Vec<_>>()).unwrap());
    }
}
