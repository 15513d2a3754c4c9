use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ByproductOperator, MeasSpec, MeasurementPattern, QubitId};
use crate::error::{Error, Result};
use crate::statevec::{Basis, EquatorialBasis, StateVector, PROB_EPS};

#[derive(Clone, Debug)]
pub enum RunMode {
    Sample(u64),
    /// Forced outcome for every measured qubit.
    Branch(BTreeMap<QubitId, u8>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleLogEntry {
    pub qubit: QubitId,
    /// Effective angle after sign adaptation; `None` for Z measurements.
    pub angle: Option<f64>,
    pub outcome: u8,
    pub probability: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub outcomes: BTreeMap<QubitId, u8>,
    /// Measurements in the order they were executed.
    pub log: Vec<AngleLogEntry>,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub record: OutcomeRecord,
    /// Output wires in order, before correction.
    pub output: StateVector,
    pub byproduct: ByproductOperator,
    /// Probability of this branch.
    pub probability: f64,
}

impl Run {
    pub fn corrected(&self) -> Result<StateVector> {
        self.byproduct.correct(&self.output)
    }
}

/// Partially executed pattern. Qubits join the register as |+⟩ only when a
/// neighbour is about to be measured, and an edge is applied just before the
/// first measurement of one of its ends.
#[derive(Clone)]
struct Node {
    state: StateVector,
    live: Vec<QubitId>,
    applied: BTreeSet<(QubitId, QubitId)>,
    record: OutcomeRecord,
    probability: f64,
}

struct Plan<'a> {
    pattern: &'a MeasurementPattern,
    adj: BTreeMap<QubitId, Vec<QubitId>>,
}

impl<'a> Plan<'a> {
    fn new(pattern: &'a MeasurementPattern, input: &StateVector) -> Result<(Self, Node)> {
        if input.n_qubits() != pattern.width() {
            return Err(Error::Dimension { expected: pattern.width(), got: input.n_qubits() });
        }
        let mut adj: BTreeMap<QubitId, Vec<QubitId>> = BTreeMap::new();
        for &(a, b) in pattern.edges() {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let node = Node {
            state: input.clone(),
            live: pattern.inputs().to_vec(),
            applied: BTreeSet::new(),
            record: OutcomeRecord::default(),
            probability: 1.0,
        };
        Ok((Plan { pattern, adj }, node))
    }

    fn neighbors(&self, q: QubitId) -> &[QubitId] {
        self.adj.get(&q).map(Vec::as_slice).unwrap_or(&[])
    }

    fn ensure_live(&self, node: &mut Node, q: QubitId) -> Result<()> {
        if !node.live.contains(&q) {
            node.state.push_plus()?;
            node.live.push(q);
        }
        Ok(())
    }

    fn entangle_around(&self, node: &mut Node, q: QubitId) -> Result<()> {
        self.ensure_live(node, q)?;
        for &nb in self.neighbors(q) {
            let e = (q.min(nb), q.max(nb));
            if node.applied.contains(&e) {
                continue;
            }
            self.ensure_live(node, nb)?;
            let pos = |x| node.live.iter().position(|&y| y == x).expect("live");
            let (i, j) = (pos(q), pos(nb));
            node.state.apply_cphase(i, j)?;
            node.applied.insert(e);
        }
        Ok(())
    }

    /// Prepares measurement `k`; returns the canonical basis, the label flip and the logged angle.
    fn prepare(&self, node: &mut Node, k: usize) -> Result<(usize, Basis, u8, Option<f64>)> {
        let m = &self.pattern.measurements()[k];
        self.entangle_around(node, m.qubit)?;
        let pos = node.live.iter().position(|&y| y == m.qubit).expect("live");
        Ok(match &m.spec {
            MeasSpec::Z => (pos, Basis::Z, 0, None),
            MeasSpec::Equatorial(expr) => {
                let phi = expr.evaluate(&node.record.outcomes)?;
                let (b, flipped) = EquatorialBasis::new(phi);
                (pos, Basis::Equatorial(b), u8::from(flipped), Some(phi))
            }
        })
    }

    fn commit(&self, node: &Node, k: usize, prep: (usize, Basis, u8, Option<f64>), s: u8) -> Result<Node> {
        let (pos, basis, flip, angle) = prep;
        let r = node.state.measure(pos, basis, s ^ flip)?;
        let q = self.pattern.measurements()[k].qubit;
        let mut next = Node {
            state: r.post_state,
            live: node.live.clone(),
            applied: node.applied.clone(),
            record: node.record.clone(),
            probability: node.probability * r.probability,
        };
        next.live.remove(pos);
        next.record.outcomes.insert(q, s);
        next.record.log.push(AngleLogEntry { qubit: q, angle, outcome: s, probability: r.probability });
        Ok(next)
    }

    fn finish(&self, mut node: Node) -> Result<Run> {
        for &q in self.pattern.outputs() {
            self.entangle_around(&mut node, q)?;
        }
        let order: Vec<usize> = self
            .pattern
            .outputs()
            .iter()
            .map(|q| node.live.iter().position(|y| y == q).expect("output is live"))
            .collect();
        let output = node.state.permute(&order)?;
        let byproduct = self.pattern.byproduct_for(&node.record.outcomes)?;
        Ok(Run { record: node.record, output, byproduct, probability: node.probability })
    }
}

/// Executes the pattern on `input` (one state per wire, wire i on qubit i).
pub fn run_pattern(p: &MeasurementPattern, input: &StateVector, mode: RunMode) -> Result<Run> {
    let (plan, mut node) = Plan::new(p, input)?;
    let mut rng = match &mode {
        RunMode::Sample(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        RunMode::Branch(_) => None,
    };
    for k in 0..p.n_measured() {
        let prep = plan.prepare(&mut node, k)?;
        let q = p.measurements()[k].qubit;
        let s = match (&mode, rng.as_mut()) {
            (RunMode::Branch(bits), _) => *bits
                .get(&q)
                .ok_or_else(|| Error::Pattern(format!("no forced outcome for qubit {q}")))?,
            (_, Some(rng)) => {
                let (pos, basis, flip, _) = prep;
                node.state.measure_random(pos, basis, rng)?.outcome ^ flip
            }
            _ => unreachable!(),
        };
        node = plan.commit(&node, k, prep, s)?;
    }
    plan.finish(node)
}

/// Every branch with probability above the noise threshold.
pub fn enumerate_branches(p: &MeasurementPattern, input: &StateVector) -> Result<Vec<Run>> {
    let runs = fold_branches(p, input, |r| vec![r], |mut a, b| {
        a.extend(b);
        a
    })?;
    Ok(runs.unwrap_or_default())
}

const PARALLEL_DEPTH: usize = 6;

/// Maps every surviving branch through `leaf` and reduces with `combine`.
/// Branch prefixes are shared; the first few levels run in parallel, so
/// `combine` should be associative.
pub fn fold_branches<T, F, C>(p: &MeasurementPattern, input: &StateVector, leaf: F, combine: C) -> Result<Option<T>>
where
    T: Send,
    F: Fn(Run) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    let (plan, node) = Plan::new(p, input)?;
    explore(&plan, node, 0, &leaf, &combine)
}

fn explore<T, F, C>(plan: &Plan<'_>, mut node: Node, k: usize, leaf: &F, combine: &C) -> Result<Option<T>>
where
    T: Send,
    F: Fn(Run) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    if k == plan.pattern.n_measured() {
        return Ok(Some(leaf(plan.finish(node)?)));
    }
    let prep = plan.prepare(&mut node, k)?;
    let (pos, basis, flip, _) = prep;
    let mut children = Vec::with_capacity(2);
    for s in 0..2u8 {
        if node.state.outcome_probability(pos, basis, s ^ flip)? >= PROB_EPS {
            children.push(plan.commit(&node, k, prep, s)?);
        }
    }
    drop(node);
    let mut it = children.into_iter();
    let (a, b) = (it.next(), it.next());
    let (ra, rb) = match (a, b) {
        (Some(a), Some(b)) if k < PARALLEL_DEPTH => rayon::join(
            || explore(plan, a, k + 1, leaf, combine),
            || explore(plan, b, k + 1, leaf, combine),
        ),
        (Some(a), Some(b)) => (
            explore(plan, a, k + 1, leaf, combine),
            explore(plan, b, k + 1, leaf, combine),
        ),
        (Some(a), None) => (explore(plan, a, k + 1, leaf, combine), Ok(None)),
        _ => (Ok(None), Ok(None)),
    };
    Ok(match (ra?, rb?) {
        (Some(x), Some(y)) => Some(combine(x, y)),
        (x, y) => x.or(y),
    })
}
