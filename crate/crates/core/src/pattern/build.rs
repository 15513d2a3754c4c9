use std::collections::{BTreeMap, BTreeSet};

use super::{AngleExpr, ByproductRule, MeasSpec, Measurement, MeasurementPattern, PatternParts, QubitId};
use crate::error::{Error, Result};
use crate::gates::Gate;

/// Linear chain of links, qubits 1..=k+1. Link j realizes H e^{iθ_j Z/2} once its
/// angle is sign-adapted to the X part of the byproduct accumulated so far.
fn link_chain(thetas: &[f64], reference: Vec<Gate>) -> MeasurementPattern {
    let k = thetas.len();
    let mut x: BTreeSet<QubitId> = BTreeSet::new();
    let mut z: BTreeSet<QubitId> = BTreeSet::new();
    let mut measurements = Vec::with_capacity(k);
    for (j, &theta) in thetas.iter().enumerate() {
        let q = j + 1;
        measurements.push(Measurement {
            qubit: q,
            spec: MeasSpec::Equatorial(AngleExpr::adaptive(theta, x.iter().copied())),
        });
        // H e^{iθZ/2} Z^{s} X^x Z^z = Z^x X^{z+s} H e^{iθZ/2} once the angle sign absorbs X^x.
        let mut nx = z.clone();
        toggle(&mut nx, q);
        z = std::mem::replace(&mut x, nx);
    }
    MeasurementPattern::new(PatternParts {
        qubits: (1..=k + 1).collect(),
        inputs: vec![1],
        outputs: vec![k + 1],
        edges: (1..=k).map(|q| (q, q + 1)).collect(),
        measurements,
        byproducts: vec![ByproductRule { z_deps: z, x_deps: x }],
        reference,
    })
    .expect("link chains are well formed")
}

fn toggle(set: &mut BTreeSet<QubitId>, q: QubitId) {
    if !set.remove(&q) {
        set.insert(q);
    }
}

fn sym_diff(set: &mut BTreeSet<QubitId>, other: &BTreeSet<QubitId>) {
    for &q in other {
        toggle(set, q);
    }
}

/// Five-qubit chain realizing e^{-iζX/2} e^{-iηZ/2} e^{-iξX/2}.
pub fn rotation_pattern(zeta: f64, eta: f64, xi: f64) -> MeasurementPattern {
    link_chain(&[0.0, -xi, -eta, -zeta], vec![Gate::Rot { q: 0, zeta, eta, xi }])
}

/// Four-qubit chain realizing H e^{iθ₃Z/2} H e^{iθ₂Z/2} H e^{iθ₁Z/2}.
pub fn three_link_pattern(theta1: f64, theta2: f64, theta3: f64) -> MeasurementPattern {
    let rz = |t: f64| Gate::Rot { q: 0, zeta: 0.0, eta: -t, xi: 0.0 };
    let h = Gate::H { q: 0 };
    link_chain(&[theta1, theta2, theta3], vec![rz(theta1), h, rz(theta2), h, rz(theta3), h])
}

/// Star on qubits 1..=4 centred on 3; control wire 1 → 1, target wire 2 → 4.
pub fn cnot_pattern() -> MeasurementPattern {
    let x = || MeasSpec::Equatorial(AngleExpr::fixed(0.0));
    MeasurementPattern::new(PatternParts {
        qubits: vec![1, 2, 3, 4],
        inputs: vec![1, 2],
        outputs: vec![1, 4],
        edges: vec![(1, 3), (2, 3), (3, 4)],
        measurements: vec![Measurement { qubit: 2, spec: x() }, Measurement { qubit: 3, spec: x() }],
        byproducts: vec![
            ByproductRule { z_deps: [2].into(), x_deps: BTreeSet::new() },
            ByproductRule { z_deps: [2].into(), x_deps: [3].into() },
        ],
        reference: vec![Gate::Cnot { control: 0, target: 1 }],
    })
    .expect("cnot pattern is well formed")
}

/// Zero-length wires: every input is its own output.
pub fn identity_pattern(width: usize) -> Result<MeasurementPattern> {
    MeasurementPattern::new(PatternParts {
        qubits: (0..width).collect(),
        inputs: (0..width).collect(),
        outputs: (0..width).collect(),
        edges: vec![],
        measurements: vec![],
        byproducts: vec![ByproductRule::default(); width],
        reference: vec![],
    })
}

fn relabel_parts(p: &PatternParts, map: &BTreeMap<QubitId, QubitId>) -> PatternParts {
    let f = |q: &QubitId| map[q];
    let set = |s: &BTreeSet<QubitId>| s.iter().map(f).collect::<BTreeSet<_>>();
    PatternParts {
        qubits: p.qubits.iter().map(f).collect(),
        inputs: p.inputs.iter().map(f).collect(),
        outputs: p.outputs.iter().map(f).collect(),
        edges: p.edges.iter().map(|(a, b)| (f(a), f(b))).collect(),
        measurements: p
            .measurements
            .iter()
            .map(|m| Measurement {
                qubit: f(&m.qubit),
                spec: match &m.spec {
                    MeasSpec::Z => MeasSpec::Z,
                    MeasSpec::Equatorial(a) => MeasSpec::Equatorial(AngleExpr {
                        base: a.base,
                        sign_deps: set(&a.sign_deps),
                        static_sign: a.static_sign,
                    }),
                },
            })
            .collect(),
        byproducts: p
            .byproducts
            .iter()
            .map(|r| ByproductRule { z_deps: set(&r.z_deps), x_deps: set(&r.x_deps) })
            .collect(),
        reference: p.reference.clone(),
    }
}

/// Pushes Paulis sitting on qubits of `parts` before its entangling step into its
/// measurement specs and byproduct rules.
struct Propagator<'a> {
    parts: &'a mut PatternParts,
}

impl Propagator<'_> {
    fn measurement(&mut self, q: QubitId) -> Option<&mut MeasSpec> {
        self.parts.measurements.iter_mut().find(|m| m.qubit == q).map(|m| &mut m.spec)
    }

    fn output_wire(&self, q: QubitId) -> Option<usize> {
        self.parts.outputs.iter().position(|&o| o == q)
    }

    /// Every later use of s_q now reads s_q ⊕ parity(flip).
    fn flip_outcome(&mut self, q: QubitId, flip: &BTreeSet<QubitId>) {
        for m in &mut self.parts.measurements {
            if let MeasSpec::Equatorial(a) = &mut m.spec {
                if a.sign_deps.contains(&q) {
                    sym_diff(&mut a.sign_deps, flip);
                }
            }
        }
        for r in &mut self.parts.byproducts {
            if r.z_deps.contains(&q) {
                sym_diff(&mut r.z_deps, flip);
            }
            if r.x_deps.contains(&q) {
                sym_diff(&mut r.x_deps, flip);
            }
        }
    }

    /// Z^{parity(set)} on q; commutes with every cPhase.
    fn push_z(&mut self, q: QubitId, set: &BTreeSet<QubitId>) {
        if set.is_empty() {
            return;
        }
        if let Some(w) = self.output_wire(q) {
            sym_diff(&mut self.parts.byproducts[w].z_deps, set);
            return;
        }
        if let Some(MeasSpec::Equatorial(_)) = self.measurement(q) {
            self.flip_outcome(q, set);
        }
    }

    /// X^{parity(set)} on q before the cPhases: becomes X_q ∏ Z_nb after them.
    fn push_x(&mut self, q: QubitId, set: &BTreeSet<QubitId>) {
        if set.is_empty() {
            return;
        }
        if let Some(w) = self.output_wire(q) {
            sym_diff(&mut self.parts.byproducts[w].x_deps, set);
        } else {
            match self.measurement(q) {
                Some(MeasSpec::Equatorial(a)) => sym_diff(&mut a.sign_deps, set),
                Some(MeasSpec::Z) => self.flip_outcome(q, set),
                None => {}
            }
        }
        let nbs: Vec<QubitId> = self
            .parts
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == q { Some(b) } else if b == q { Some(a) } else { None })
            .collect();
        for nb in nbs {
            self.push_z(nb, set);
        }
    }
}

fn next_free(parts: &PatternParts) -> QubitId {
    parts.qubits.iter().max().map_or(0, |m| m + 1)
}

/// Runs `p1` then `p2`; output wire k of `p1` feeds input wire `wiring[k]` of `p2`.
/// The result keeps `p1`'s wire numbering on both ends.
pub fn compose(p1: &MeasurementPattern, p2: &MeasurementPattern, wiring: &[usize]) -> Result<MeasurementPattern> {
    let w = p1.width();
    if p2.width() != w || wiring.len() != w {
        return Err(Error::Wiring(format!(
            "{} outputs, {} inputs, {} wiring entries",
            w,
            p2.width(),
            wiring.len()
        )));
    }
    let mut inverse = vec![usize::MAX; w];
    for (k, &j) in wiring.iter().enumerate() {
        if j >= w || inverse[j] != usize::MAX {
            return Err(Error::Wiring(format!("input wire {j} is hit twice or out of range")));
        }
        inverse[j] = k;
    }
    let a = p1.parts();
    let mut map = BTreeMap::new();
    for (j, &q) in p2.inputs().iter().enumerate() {
        map.insert(q, a.outputs[inverse[j]]);
    }
    let mut fresh = next_free(a);
    for &q in p2.qubits() {
        map.entry(q).or_insert_with(|| {
            fresh += 1;
            fresh - 1
        });
    }
    let mut b = relabel_parts(p2.parts(), &map);
    {
        let mut prop = Propagator { parts: &mut b };
        for (k, rule) in a.byproducts.iter().enumerate() {
            let q = a.outputs[k];
            prop.push_x(q, &rule.x_deps);
            prop.push_z(q, &rule.z_deps);
        }
    }
    let mut edges: BTreeSet<(QubitId, QubitId)> = BTreeSet::new();
    for &(u, v) in a.edges.iter().chain(&b.edges) {
        let e = (u.min(v), u.max(v));
        if !edges.remove(&e) {
            edges.insert(e);
        }
    }
    let mut qubits = a.qubits.clone();
    qubits.extend(b.qubits.iter().filter(|q| !a.qubits.contains(q)));
    let mut measurements = a.measurements.clone();
    measurements.extend(b.measurements);
    let mut reference = a.reference.clone();
    reference.extend(b.reference.iter().map(|g| g.relabel(|j| inverse[j])));
    MeasurementPattern::new(PatternParts {
        qubits,
        inputs: a.inputs.clone(),
        outputs: wiring.iter().map(|&j| b.outputs[j]).collect(),
        edges: edges.into_iter().collect(),
        measurements,
        byproducts: wiring.iter().map(|&j| b.byproducts[j].clone()).collect(),
        reference,
    })
}

/// Side-by-side patterns; `p2`'s wires follow `p1`'s.
pub fn tensor(p1: &MeasurementPattern, p2: &MeasurementPattern) -> Result<MeasurementPattern> {
    let a = p1.parts();
    let start = next_free(a);
    let map: BTreeMap<QubitId, QubitId> = p2.qubits().iter().enumerate().map(|(i, &q)| (q, start + i)).collect();
    let b = relabel_parts(p2.parts(), &map);
    let shift = a.inputs.len();
    let cat = |x: &[QubitId], y: &[QubitId]| x.iter().chain(y).copied().collect::<Vec<_>>();
    MeasurementPattern::new(PatternParts {
        qubits: cat(&a.qubits, &b.qubits),
        inputs: cat(&a.inputs, &b.inputs),
        outputs: cat(&a.outputs, &b.outputs),
        edges: a.edges.iter().chain(&b.edges).copied().collect(),
        measurements: a.measurements.iter().chain(&b.measurements).cloned().collect(),
        byproducts: a.byproducts.iter().chain(&b.byproducts).cloned().collect(),
        reference: a
            .reference
            .iter()
            .copied()
            .chain(b.reference.iter().map(|g| g.relabel(|q| q + shift)))
            .collect(),
    })
}

/// Places the pattern on a rows×cols grid cluster. Sites not in `placement` become
/// Z-measured fillers that run first; their outcomes are folded into the pattern's
/// angles and byproducts. The grid edges between placed sites must be exactly the
/// pattern's edges.
pub fn embed_in_grid(
    p: &MeasurementPattern,
    rows: usize,
    cols: usize,
    placement: &BTreeMap<QubitId, (usize, usize)>,
) -> Result<MeasurementPattern> {
    let mut site_of = BTreeMap::new();
    for &q in p.qubits() {
        let &(r, c) = placement
            .get(&q)
            .ok_or_else(|| Error::Invalid(format!("qubit {q} has no grid site")))?;
        if r >= rows || c >= cols {
            return Err(Error::Invalid(format!("site ({r}, {c}) is off the {rows}×{cols} grid")));
        }
        if site_of.insert((r, c), q).is_some() {
            return Err(Error::Invalid(format!("site ({r}, {c}) used twice")));
        }
    }
    let mut fresh = next_free(p.parts());
    let mut id = BTreeMap::new();
    let mut fillers = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let q = match site_of.get(&(r, c)) {
                Some(&q) => q,
                None => {
                    fresh += 1;
                    fillers.push(fresh - 1);
                    fresh - 1
                }
            };
            id.insert((r, c), q);
        }
    }
    let mut grid_edges = BTreeSet::new();
    for r in 0..rows {
        for c in 0..cols {
            for (dr, dc) in [(0, 1), (1, 0)] {
                if r + dr < rows && c + dc < cols {
                    let (u, v) = (id[&(r, c)], id[&(r + dr, c + dc)]);
                    grid_edges.insert((u.min(v), u.max(v)));
                }
            }
        }
    }
    let placed: BTreeSet<QubitId> = p.qubits().iter().copied().collect();
    let induced: BTreeSet<(QubitId, QubitId)> = grid_edges
        .iter()
        .copied()
        .filter(|(u, v)| placed.contains(u) && placed.contains(v))
        .collect();
    let wanted: BTreeSet<(QubitId, QubitId)> = p.edges().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    if induced != wanted {
        return Err(Error::Invalid("placement does not reproduce the pattern's edges".into()));
    }
    let mut parts = p.parts().clone();
    {
        let mut prop = Propagator { parts: &mut parts };
        for &f in &fillers {
            let set: BTreeSet<QubitId> = [f].into();
            for &(u, v) in &grid_edges {
                let nb = if u == f { v } else if v == f { u } else { continue };
                if placed.contains(&nb) {
                    prop.push_z(nb, &set);
                }
            }
        }
    }
    parts.qubits.extend(&fillers);
    parts.edges = grid_edges.into_iter().collect();
    let mut measurements: Vec<Measurement> = fillers.iter().map(|&q| Measurement { qubit: q, spec: MeasSpec::Z }).collect();
    measurements.extend(parts.measurements);
    parts.measurements = measurements;
    MeasurementPattern::new(parts)
}
