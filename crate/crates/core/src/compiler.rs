//! Lowering circuits over {Rot, CNOT, H} to one composed pattern, and checking the
//! result branch by branch against a dense circuit simulation.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::pattern::{
    cnot_pattern, compose, embed_in_grid, fold_branches, identity_pattern, rotation_pattern, run_pattern,
    temporal_rounds, tensor, ByproductOperator, MeasurementPattern, QubitId, RunMode,
};
use crate::statevec::StateVector;

pub const MAX_WIDTH: usize = 3;
/// Exhaustive verification enumerates 2^measured branches.
pub const MAX_EXHAUSTIVE_MEASURED: usize = 16;
const MAX_LISTED_BRANCHES: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::Cap { what: "circuit width", got: width, cap: MAX_WIDTH });
        }
        for g in &gates {
            let wires = g.wires();
            if let Some(&q) = wires.iter().find(|&&q| q >= width) {
                return Err(Error::QubitIndex { index: q, n: width });
            }
            if wires.len() == 2 && wires[0] == wires[1] {
                return Err(Error::RepeatedQubit(wires[0]));
            }
        }
        Ok(Circuit { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// One gate per line: `ROT q zeta eta xi`, `CNOT c t` or `H q`. An optional
    /// `QUBITS w` line fixes the width, otherwise it is the largest index + 1.
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Circuit> {
        let mut gates = Vec::new();
        let mut declared = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let idx = |k: usize| -> Result<usize> {
                fields[k].parse().map_err(|_| err(format!("bad qubit index {:?}", fields[k])))
            };
            let ang = |k: usize| -> Result<f64> {
                let v: f64 = fields[k].parse().map_err(|_| err(format!("bad angle {:?}", fields[k])))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(format!("angle {:?} is not finite", fields[k])))
                }
            };
            let arity = |n: usize| {
                if fields.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("{} takes {} arguments", fields[0], n - 1)))
                }
            };
            match fields[0].to_ascii_uppercase().as_str() {
                "QUBITS" => {
                    arity(2)?;
                    declared = Some(idx(1)?);
                }
                "ROT" => {
                    arity(5)?;
                    gates.push(Gate::Rot { q: idx(1)?, zeta: ang(2)?, eta: ang(3)?, xi: ang(4)? });
                }
                "CNOT" => {
                    arity(3)?;
                    gates.push(Gate::Cnot { control: idx(1)?, target: idx(2)? });
                }
                "H" => {
                    arity(2)?;
                    gates.push(Gate::H { q: idx(1)? });
                }
                other => return Err(err(format!("unknown gate {other:?}"))),
            }
        }
        let inferred = gates.iter().flat_map(Gate::wires).max().map_or(1, |m| m + 1);
        Circuit::new(declared.unwrap_or(inferred), gates)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("QUBITS {}\n", self.width);
        for g in &self.gates {
            let _ = match *g {
                Gate::Rot { q, zeta, eta, xi } => writeln!(out, "ROT {q} {zeta} {eta} {xi}"),
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
                Gate::H { q } => writeln!(out, "H {q}"),
            };
        }
        out
    }
}

/// Single-gate pattern on wires 0..k, in the gate's own wire order.
pub fn gate_pattern(g: &Gate) -> MeasurementPattern {
    match *g {
        Gate::Rot { zeta, eta, xi, .. } => rotation_pattern(zeta, eta, xi),
        Gate::Cnot { .. } => cnot_pattern(),
        Gate::H { .. } => {
            let mut parts = rotation_pattern(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).into_parts();
            parts.reference = vec![Gate::H { q: 0 }];
            MeasurementPattern::new(parts).expect("relabelled reference stays valid")
        }
    }
}

/// Sequential composition of gate patterns, idle wires carried by zero-length identities.
pub fn compile(c: &Circuit) -> Result<MeasurementPattern> {
    let w = c.width();
    let mut current = identity_pattern(w)?;
    for g in c.gates() {
        let active = g.wires();
        let idle: Vec<usize> = (0..w).filter(|q| !active.contains(q)).collect();
        let mut slice = gate_pattern(g);
        if !idle.is_empty() {
            slice = tensor(&slice, &identity_pattern(idle.len())?)?;
        }
        let order: Vec<usize> = active.iter().chain(&idle).copied().collect();
        let wiring: Vec<usize> = (0..w).map(|k| order.iter().position(|&q| q == k).expect("every wire")).collect();
        current = compose(&current, &slice, &wiring)?;
    }
    Ok(current)
}

/// Pattern size predicted by the composition rule.
pub fn expected_size(c: &Circuit) -> usize {
    c.width()
        + c
            .gates()
            .iter()
            .map(|g| {
                let p = gate_pattern(g);
                p.n_qubits() - p.width()
            })
            .sum::<usize>()
}

/// Applies the gate matrices in order.
pub fn reference_simulate(c: &Circuit, input: &StateVector) -> Result<StateVector> {
    simulate_gates(c.width(), c.gates(), input)
}

pub(crate) fn simulate_gates(width: usize, gates: &[Gate], input: &StateVector) -> Result<StateVector> {
    if input.n_qubits() != width {
        return Err(Error::Dimension { expected: width, got: input.n_qubits() });
    }
    let mut s = input.clone();
    for g in gates {
        g.apply(&mut s)?;
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchByproduct {
    /// Outcomes in measurement order, as a 0/1 string.
    pub outcomes: String,
    pub byproduct: ByproductOperator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompilationReport {
    pub total_qubits: usize,
    pub measured_qubits: usize,
    pub rounds: usize,
    pub inputs: usize,
    pub branches_verified: usize,
    /// min over (input, branch) of |⟨expected|corrected⟩|².
    pub min_fidelity: f64,
    pub mode: VerifyMode,
    /// Branches of the first input, capped at 4096 entries.
    pub byproducts: Vec<BranchByproduct>,
    pub byproducts_truncated: bool,
}

impl CompilationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_fidelity >= 1.0 - tol
    }
}

fn outcome_string(p: &MeasurementPattern, outcomes: &BTreeMap<QubitId, u8>) -> String {
    p.measurements()
        .iter()
        .map(|m| if outcomes[&m.qubit] == 1 { '1' } else { '0' })
        .collect()
}

/// Checks `p` against the circuit's gates on `n_inputs` Haar-random inputs.
pub fn verify_pattern(
    p: &MeasurementPattern,
    c: &Circuit,
    n_inputs: usize,
    mode: VerifyMode,
    input_seed: u64,
) -> Result<CompilationReport> {
    if p.width() != c.width() {
        return Err(Error::Dimension { expected: c.width(), got: p.width() });
    }
    if mode == VerifyMode::Exhaustive && p.n_measured() > MAX_EXHAUSTIVE_MEASURED {
        return Err(Error::Cap { what: "measured qubits", got: p.n_measured(), cap: MAX_EXHAUSTIVE_MEASURED });
    }
    if n_inputs == 0 {
        return Err(Error::Invalid("at least one input state is needed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(input_seed);
    let inputs: Vec<StateVector> = (0..n_inputs)
        .map(|_| StateVector::random(c.width(), &mut rng))
        .collect::<Result<_>>()?;
    let per_input: Vec<(usize, f64, Vec<BranchByproduct>)> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, input)| -> Result<(usize, f64, Vec<BranchByproduct>)> {
            let expected = reference_simulate(c, input)?;
            let keep = i == 0;
            let check = |run: crate::pattern::Run| -> Result<(usize, f64, Vec<BranchByproduct>)> {
                let f = expected.fidelity(&run.corrected()?)?;
                let listed = if keep {
                    vec![BranchByproduct { outcomes: outcome_string(p, &run.record.outcomes), byproduct: run.byproduct }]
                } else {
                    vec![]
                };
                Ok((1, f, listed))
            };
            let merge = |a: Result<(usize, f64, Vec<BranchByproduct>)>, b: Result<(usize, f64, Vec<BranchByproduct>)>| {
                let (mut a, b) = (a?, b?);
                a.0 += b.0;
                a.1 = a.1.min(b.1);
                if a.2.len() < MAX_LISTED_BRANCHES + 1 {
                    a.2.extend(b.2);
                }
                Ok(a)
            };
            match mode {
                VerifyMode::Exhaustive => fold_branches(p, input, check, merge)?
                    .unwrap_or_else(|| Err(Error::Pattern("no branch survived".into()))),
                VerifyMode::Sampled { trials, seed } => (0..trials)
                    .into_par_iter()
                    .map(|t| {
                        let s = seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (t as u64).rotate_left(32);
                        check(run_pattern(p, input, RunMode::Sample(s))?)
                    })
                    .reduce(|| Ok((0, 1.0, vec![])), merge),
            }
        })
        .collect::<Result<_>>()?;
    let mut byproducts = per_input[0].2.clone();
    let truncated = byproducts.len() > MAX_LISTED_BRANCHES;
    byproducts.truncate(MAX_LISTED_BRANCHES);
    Ok(CompilationReport {
        total_qubits: p.n_qubits(),
        measured_qubits: p.n_measured(),
        rounds: temporal_rounds(p)?.len(),
        inputs: n_inputs,
        branches_verified: per_input.iter().map(|r| r.0).sum(),
        min_fidelity: per_input.iter().map(|r| r.1).fold(1.0, f64::min),
        mode,
        byproducts,
        byproducts_truncated: truncated,
    })
}

/// Compiles `c` and verifies the pattern against it.
pub fn verify(c: &Circuit, n_inputs: usize, mode: VerifyMode, input_seed: u64) -> Result<CompilationReport> {
    verify_pattern(&compile(c)?, c, n_inputs, mode, input_seed)
}

#[derive(Clone, Debug)]
pub struct GridDemo {
    pub circuit: Circuit,
    pub pattern: MeasurementPattern,
    pub rows: usize,
    pub cols: usize,
    pub placement: BTreeMap<QubitId, (usize, usize)>,
}

/// CNOT(0,1) then Rot on wire 1, laid out on a 2×7 cluster. Row 1 carries the
/// target wire; the control sits at (0, 1) above the CNOT's centre qubit and
/// every other site of row 0 is Z-measured away.
pub fn grid_demo(zeta: f64, eta: f64, xi: f64) -> Result<GridDemo> {
    let circuit = Circuit::new(2, vec![Gate::Cnot { control: 0, target: 1 }, Gate::Rot { q: 1, zeta, eta, xi }])?;
    let compiled = compile(&circuit)?;
    let control = compiled.outputs()[0];
    let target_in = compiled.inputs()[1];
    let mut placement = BTreeMap::new();
    placement.insert(control, (0, 1));
    // Walk the target wire: input, CNOT centre, then the rotation chain.
    let mut prev = None;
    let mut cur = target_in;
    let mut col = 0;
    loop {
        placement.insert(cur, (1, col));
        let next = compiled
            .edges()
            .iter()
            .filter_map(|&(a, b)| if a == cur { Some(b) } else if b == cur { Some(a) } else { None })
            .find(|&q| Some(q) != prev && q != control);
        match next {
            Some(q) => {
                prev = Some(cur);
                cur = q;
                col += 1;
            }
            None => break,
        }
    }
    let (rows, cols) = (2, col + 1);
    let pattern = embed_in_grid(&compiled, rows, cols, &placement)?;
    Ok(GridDemo { circuit, pattern, rows, cols, placement })
}
