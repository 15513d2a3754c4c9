//! Measurement patterns with adaptive angles and byproduct tracking.
//!
//! A pattern acts on `w` logical wires: input wire i is qubit `inputs[i]`,
//! output wire i is qubit `outputs[i]`. After all measurements the raw output
//! equals Z^z X^x U |in⟩ up to a global phase, with z and x per wire given by the
//! parity of the outcomes listed in that wire's [`ByproductRule`].

mod build;
mod exec;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::stabilizer::PauliOperator;
use crate::statevec::StateVector;

pub use build::{
    cnot_pattern, compose, embed_in_grid, identity_pattern, rotation_pattern, tensor,
    three_link_pattern,
};
pub use exec::{enumerate_branches, fold_branches, run_pattern, AngleLogEntry, OutcomeRecord, Run, RunMode};

pub type QubitId = usize;

/// Effective angle = static_sign · (−1)^{Σ s_d over sign_deps} · base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleExpr {
    pub base: f64,
    #[serde(default)]
    pub sign_deps: BTreeSet<QubitId>,
    #[serde(default = "plus_one")]
    pub static_sign: i8,
}

fn plus_one() -> i8 {
    1
}

impl AngleExpr {
    pub fn fixed(base: f64) -> Self {
        AngleExpr { base, sign_deps: BTreeSet::new(), static_sign: 1 }
    }

    pub fn adaptive(base: f64, deps: impl IntoIterator<Item = QubitId>) -> Self {
        AngleExpr { base, sign_deps: deps.into_iter().collect(), static_sign: 1 }
    }

    pub fn evaluate(&self, outcomes: &BTreeMap<QubitId, u8>) -> Result<f64> {
        let parity = parity(&self.sign_deps, outcomes)?;
        let sign = f64::from(self.static_sign) * if parity == 1 { -1.0 } else { 1.0 };
        Ok(sign * self.base)
    }
}

pub(crate) fn parity(deps: &BTreeSet<QubitId>, outcomes: &BTreeMap<QubitId, u8>) -> Result<u8> {
    let mut p = 0;
    for d in deps {
        p ^= outcomes
            .get(d)
            .ok_or_else(|| Error::Pattern(format!("outcome of qubit {d} used before it is measured")))?;
    }
    Ok(p & 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "lowercase")]
pub enum MeasSpec {
    Z,
    Equatorial(AngleExpr),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub qubit: QubitId,
    pub spec: MeasSpec,
}

/// Parity sets for one output wire: correction Z^{Σ z_deps} X^{Σ x_deps}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByproductRule {
    #[serde(default)]
    pub z_deps: BTreeSet<QubitId>,
    #[serde(default)]
    pub x_deps: BTreeSet<QubitId>,
}

/// Materialized byproduct Z^z X^x per wire, phase ignored. Wire i is bit i.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ByproductOperator {
    pub width: usize,
    pub z: u64,
    pub x: u64,
}

impl ByproductOperator {
    pub fn identity(width: usize) -> Self {
        ByproductOperator { width, z: 0, x: 0 }
    }

    /// Exponents add mod 2.
    pub fn compose(&self, other: &ByproductOperator) -> Result<ByproductOperator> {
        if self.width != other.width {
            return Err(Error::Dimension { expected: self.width, got: other.width });
        }
        Ok(ByproductOperator { width: self.width, z: self.z ^ other.z, x: self.x ^ other.x })
    }

    pub fn to_pauli(&self) -> Result<PauliOperator> {
        PauliOperator::new(self.width, 0, self.x, self.z)
    }

    /// Undoes the byproduct on a raw output state.
    pub fn correct(&self, raw: &StateVector) -> Result<StateVector> {
        self.to_pauli()?.apply(raw)
    }
}

/// Unvalidated pattern fields; also the JSON shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternParts {
    pub qubits: Vec<QubitId>,
    pub inputs: Vec<QubitId>,
    pub outputs: Vec<QubitId>,
    pub edges: Vec<(QubitId, QubitId)>,
    pub measurements: Vec<Measurement>,
    pub byproducts: Vec<ByproductRule>,
    /// Circuit on the logical wires that the pattern simulates.
    pub reference: Vec<Gate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatternParts", into = "PatternParts")]
pub struct MeasurementPattern {
    parts: PatternParts,
}

impl From<MeasurementPattern> for PatternParts {
    fn from(p: MeasurementPattern) -> Self {
        p.parts
    }
}

impl TryFrom<PatternParts> for MeasurementPattern {
    type Error = Error;

    fn try_from(parts: PatternParts) -> Result<Self> {
        MeasurementPattern::new(parts)
    }
}

impl MeasurementPattern {
    /// Validates and stores measurements in a stable dependency order.
    pub fn new(mut parts: PatternParts) -> Result<Self> {
        let bad = |m: String| Err(Error::Pattern(m));
        let mut known = BTreeSet::new();
        for &q in &parts.qubits {
            if !known.insert(q) {
                return bad(format!("qubit {q} listed twice"));
            }
        }
        let w = parts.inputs.len();
        if w == 0 {
            return bad("a pattern needs at least one wire".into());
        }
        if parts.outputs.len() != w || parts.byproducts.len() != w {
            return bad(format!(
                "{} inputs, {} outputs, {} byproduct rules",
                w,
                parts.outputs.len(),
                parts.byproducts.len()
            ));
        }
        for (name, set) in [("input", &parts.inputs), ("output", &parts.outputs)] {
            let mut seen = BTreeSet::new();
            for q in set {
                if !known.contains(q) {
                    return bad(format!("{name} qubit {q} is not a pattern qubit"));
                }
                if !seen.insert(q) {
                    return bad(format!("{name} qubit {q} listed twice"));
                }
            }
        }
        let mut edge_set = BTreeSet::new();
        for &(a, b) in &parts.edges {
            if !known.contains(&a) || !known.contains(&b) {
                return bad(format!("edge ({a}, {b}) touches an unknown qubit"));
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !edge_set.insert((a.min(b), a.max(b))) {
                return Err(Error::DuplicateEdge(a.min(b), a.max(b)));
            }
        }
        let outputs: BTreeSet<QubitId> = parts.outputs.iter().copied().collect();
        let mut measured = BTreeSet::new();
        for m in &parts.measurements {
            if !known.contains(&m.qubit) {
                return bad(format!("measurement of unknown qubit {}", m.qubit));
            }
            if outputs.contains(&m.qubit) {
                return bad(format!("output qubit {} is measured", m.qubit));
            }
            if !measured.insert(m.qubit) {
                return bad(format!("qubit {} measured twice", m.qubit));
            }
            if let MeasSpec::Equatorial(a) = &m.spec {
                if a.static_sign.abs() != 1 {
                    return bad(format!("static sign of qubit {} must be ±1", m.qubit));
                }
                if !a.base.is_finite() {
                    return bad(format!("angle of qubit {} is not finite", m.qubit));
                }
            }
        }
        if let Some(q) = known.iter().find(|q| !outputs.contains(q) && !measured.contains(q)) {
            return bad(format!("non-output qubit {q} has no measurement"));
        }
        for m in &parts.measurements {
            if let MeasSpec::Equatorial(a) = &m.spec {
                if let Some(d) = a.sign_deps.iter().find(|d| !measured.contains(d)) {
                    return bad(format!("qubit {} depends on unmeasured qubit {d}", m.qubit));
                }
            }
        }
        for rule in &parts.byproducts {
            if let Some(d) = rule.z_deps.iter().chain(&rule.x_deps).find(|d| !measured.contains(d)) {
                return bad(format!("byproduct depends on unmeasured qubit {d}"));
            }
        }
        for g in &parts.reference {
            if let Some(&q) = g.wires().iter().find(|&&q| q >= w) {
                return bad(format!("reference gate acts on wire {q} of {w}"));
            }
            if let Gate::Cnot { control, target } = *g {
                if control == target {
                    return Err(Error::RepeatedQubit(control));
                }
            }
        }
        parts.measurements = topological_order(std::mem::take(&mut parts.measurements))?;
        Ok(MeasurementPattern { parts })
    }

    pub fn parts(&self) -> &PatternParts {
        &self.parts
    }

    pub fn into_parts(self) -> PatternParts {
        self.parts
    }

    pub fn width(&self) -> usize {
        self.parts.inputs.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.parts.qubits.len()
    }

    pub fn n_measured(&self) -> usize {
        self.parts.measurements.len()
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.parts.qubits
    }

    pub fn inputs(&self) -> &[QubitId] {
        &self.parts.inputs
    }

    pub fn outputs(&self) -> &[QubitId] {
        &self.parts.outputs
    }

    pub fn edges(&self) -> &[(QubitId, QubitId)] {
        &self.parts.edges
    }

    /// Measurements in execution order.
    pub fn measurements(&self) -> &[Measurement] {
        &self.parts.measurements
    }

    pub fn byproducts(&self) -> &[ByproductRule] {
        &self.parts.byproducts
    }

    pub fn reference(&self) -> &[Gate] {
        &self.parts.reference
    }

    pub fn spec(&self, q: QubitId) -> Option<&MeasSpec> {
        self.parts.measurements.iter().find(|m| m.qubit == q).map(|m| &m.spec)
    }

    pub fn byproduct_for(&self, outcomes: &BTreeMap<QubitId, u8>) -> Result<ByproductOperator> {
        let mut b = ByproductOperator::identity(self.width());
        for (i, rule) in self.parts.byproducts.iter().enumerate() {
            b.z |= u64::from(parity(&rule.z_deps, outcomes)?) << i;
            b.x |= u64::from(parity(&rule.x_deps, outcomes)?) << i;
        }
        Ok(b)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("patterns serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }
}

fn deps_of(m: &Measurement) -> Option<&BTreeSet<QubitId>> {
    match &m.spec {
        MeasSpec::Equatorial(a) => Some(&a.sign_deps),
        MeasSpec::Z => None,
    }
}

/// Stable Kahn ordering: the earliest listed measurement whose deps are done goes next.
fn topological_order(mut pending: Vec<Measurement>) -> Result<Vec<Measurement>> {
    let mut done = BTreeSet::new();
    let mut out = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let ready = pending
            .iter()
            .position(|m| deps_of(m).is_none_or(|d| d.iter().all(|q| done.contains(q))));
        match ready {
            Some(i) => {
                let m = pending.remove(i);
                done.insert(m.qubit);
                out.push(m);
            }
            None => return Err(Error::Cycle(pending[0].qubit)),
        }
    }
    Ok(out)
}

/// Layers by sign dependencies: round 0 holds every qubit with no adaptive angle.
pub fn temporal_rounds(p: &MeasurementPattern) -> Result<Vec<BTreeSet<QubitId>>> {
    let mut round: BTreeMap<QubitId, usize> = BTreeMap::new();
    for m in topological_order(p.measurements().to_vec())? {
        let r = deps_of(&m)
            .map(|d| d.iter().map(|q| round[q] + 1).max().unwrap_or(0))
            .unwrap_or(0);
        round.insert(m.qubit, r);
    }
    let depth = round.values().map(|r| r + 1).max().unwrap_or(0);
    let mut layers = vec![BTreeSet::new(); depth];
    for (q, r) in round {
        layers[r].insert(q);
    }
    Ok(layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_rounds() {
        let r = temporal_rounds(&rotation_pattern(0.0, 0.0, 0.0)).unwrap();
        let want: Vec<BTreeSet<QubitId>> = (1..=4).map(|q| [q].into_iter().collect()).collect();
        assert_eq!(r, want);
        assert_eq!(temporal_rounds(&cnot_pattern()).unwrap().len(), 1);
    }

    #[test]
    fn cycle_is_rejected() {
        let mut parts = rotation_pattern(0.1, 0.2, 0.3).into_parts();
        if let MeasSpec::Equatorial(a) = &mut parts.measurements[0].spec {
            a.sign_deps.insert(4);
        }
        assert!(matches!(MeasurementPattern::new(parts), Err(Error::Cycle(_))));
    }

    #[test]
    fn measured_output_is_rejected() {
        let mut parts = cnot_pattern().into_parts();
        parts.measurements.push(Measurement { qubit: 4, spec: MeasSpec::Z });
        assert!(matches!(MeasurementPattern::new(parts), Err(Error::Pattern(_))));
    }

    #[test]
    fn json_round_trip() {
        let p = rotation_pattern(0.3, -1.2, 2.0);
        let back = MeasurementPattern::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        assert!(MeasurementPattern::from_json("{\"qubits\": [1]}").is_err());
    }

    #[test]
    fn byproduct_composition_commutes() {
        let a = ByproductOperator { width: 2, z: 0b01, x: 0b11 };
        let b = ByproductOperator { width: 2, z: 0b10, x: 0b01 };
        assert_eq!(a.compose(&b).unwrap(), b.compose(&a).unwrap());
        assert_eq!(a.compose(&a).unwrap(), ByproductOperator::identity(2));
    }

    #[test]
    fn angle_evaluation() {
        let a = AngleExpr { base: 0.5, sign_deps: [1, 3].into_iter().collect(), static_sign: -1 };
        let out: BTreeMap<QubitId, u8> = [(1, 1), (3, 0)].into_iter().collect();
        assert_eq!(a.evaluate(&out).unwrap(), 0.5);
        assert!(a.evaluate(&BTreeMap::new()).is_err());
    }
}
