//! Reading graphs, circuits and states from files or builtin names.

use std::fs;
use std::path::Path;

use mbqc::bell::ghz_state;
use mbqc::stabilizer::{graph_state, Graph};
use mbqc::statevec::StateVector;
use mbqc::Complex64;

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Edge-list graph file.
pub fn load_graph(path: &Path) -> Result<Graph, CliError> {
    Graph::parse_edge_list(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn save_graph(path: &Path, g: &Graph) -> std::io::Result<()> {
    fs::write(path, g.to_edge_list())
}

pub fn load_circuit(path: &Path) -> Result<mbqc::compiler::Circuit, CliError> {
    mbqc::compiler::Circuit::parse(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn size(arg: &str, spec: &str) -> Result<usize, CliError> {
    arg.parse().map_err(|_| CliError::Usage(format!("bad size in state {spec:?}")))
}

/// `ghz:N`, `cluster:N`, `ring:N`, `grid:RxC`, `plus:N`, a `.csv` amplitude
/// dump, or an edge-list file whose graph state is taken.
pub fn load_state(spec: &str) -> Result<StateVector, CliError> {
    let bad = |e: mbqc::Error| CliError::Usage(format!("state {spec:?}: {e}"));
    if let Some((kind, arg)) = spec.split_once(':') {
        let g = match kind {
            "ghz" => {
                let n = size(arg, spec)?;
                if n == 3 {
                    return Ok(ghz_state());
                }
                if n == 0 || n > mbqc::statevec::MAX_QUBITS {
                    return Err(CliError::Usage(format!("state {spec:?}: size out of range")));
                }
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let mut a = vec![Complex64::new(0.0, 0.0); 1 << n];
                a[0] = Complex64::new(h, 0.0);
                a[(1 << n) - 1] = Complex64::new(h, 0.0);
                return StateVector::from_amplitudes(a).map_err(bad);
            }
            "plus" => return StateVector::plus(size(arg, spec)?).map_err(bad),
            "cluster" => Graph::path(size(arg, spec)?),
            "ring" => Graph::cycle(size(arg, spec)?),
            "grid" => {
                let (r, c) = arg.split_once('x').ok_or_else(|| CliError::Usage(format!("grid size {arg:?} is not RxC")))?;
                Graph::grid(size(r, spec)?, size(c, spec)?)
            }
            _ => return Err(CliError::Usage(format!("unknown builtin state {kind:?}"))),
        };
        return graph_state(&g).map_err(bad);
    }
    let path = Path::new(spec);
    if path.extension().is_some_and(|e| e == "csv") {
        StateVector::from_csv(&read(path)?).map_err(bad)
    } else {
        graph_state(&load_graph(path)?).map_err(bad)
    }
}
