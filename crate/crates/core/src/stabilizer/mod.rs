//! Graph states, Pauli algebra on bitmasks and the graph rewrite rules.

mod graph;
mod multigraph;
mod pauli;

pub use graph::Graph;
pub use multigraph::{contract_edge, contract_edges, reduce_multigraph, Multigraph};
pub use pauli::PauliOperator;

use crate::error::{Error, Result};
use crate::statevec::StateVector;

/// ∏ cPhase over the edges applied to |+⟩^⊗n.
pub fn graph_state(graph: &Graph) -> Result<StateVector> {
    let mut s = StateVector::plus(graph.n_vertices())?;
    for (a, b) in graph.edges() {
        s.apply_cphase(a, b)?;
    }
    Ok(s)
}

/// K_a = X_a ∏_{b ∈ N(a)} Z_b for every vertex a.
pub fn stabilizer_generators(graph: &Graph) -> Result<Vec<PauliOperator>> {
    let n = graph.n_vertices();
    (0..n)
        .map(|a| {
            let z: u64 = graph.neighbors(a).iter().map(|&b| 1u64 << b).sum();
            PauliOperator::new(n, 0, 1 << a, z)
        })
        .collect()
}

/// ⟨ψ|P|ψ⟩ for Hermitian P.
pub fn expectation(state: &StateVector, p: &PauliOperator) -> Result<f64> {
    if !p.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let v = state.inner(&p.apply(state)?)?;
    Ok(v.re)
}

/// cPhase_ab · P · cPhase_ab, using X_a → X_a Z_b, X_b → Z_a X_b, Z unchanged.
pub fn conjugate_by_cphase(p: &PauliOperator, a: usize, b: usize) -> Result<PauliOperator> {
    let n = p.n_qubits();
    if a == b {
        return Err(Error::RepeatedQubit(a));
    }
    for q in [a, b] {
        if q >= n {
            return Err(Error::QubitIndex { index: q, n });
        }
    }
    let rest = p.x_mask() & !(1 << a) & !(1 << b);
    let mut out = PauliOperator::new(n, p.phase(), rest, 0)?;
    if p.x_mask() >> a & 1 == 1 {
        out = out.mul(&PauliOperator::x(n, a)?.mul(&PauliOperator::z(n, b)?)?)?;
    }
    if p.x_mask() >> b & 1 == 1 {
        out = out.mul(&PauliOperator::z(n, a)?.mul(&PauliOperator::x(n, b)?)?)?;
    }
    out.mul(&PauliOperator::new(n, 0, 0, p.z_mask())?)
}

/// Removes v after a Z measurement with outcome s. The correction acts on the
/// compacted register and maps the measured post-state back to |G − v⟩.
pub fn delete_vertex_z(graph: &Graph, v: usize, s: u8) -> Result<(Graph, PauliOperator)> {
    let reduced = graph.remove_vertex(v)?;
    let n = reduced.n_vertices();
    let correction = if s & 1 == 0 {
        PauliOperator::identity(n)
    } else {
        let shifted: Vec<usize> = graph
            .neighbors(v)
            .into_iter()
            .map(|w| if w > v { w - 1 } else { w })
            .collect();
        PauliOperator::z_string(n, &shifted)?
    };
    Ok((reduced, correction))
}
