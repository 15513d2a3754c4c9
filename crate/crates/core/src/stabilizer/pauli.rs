use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::StateVector;

/// i^phase · X^x Z^z over at most 64 qubits.
///
/// Every X factor sits to the left of every Z factor, so a single-site Y is
/// stored as phase 1 with both bits set (Y = iXZ). Products pick up
/// (−1)^{|z₁ ∧ x₂|} from moving the left operand's Z past the right operand's X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    n: usize,
    phase: u8,
    x: u64,
    z: u64,
}

fn site_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliOperator {
    pub fn new(n: usize, phase: u8, x: u64, z: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::Cap { what: "Pauli width", got: n, cap: 64 });
        }
        if (x | z) & !site_mask(n) != 0 {
            return Err(Error::Invalid(format!("Pauli masks exceed {n} qubits")));
        }
        Ok(PauliOperator { n, phase: phase % 4, x, z })
    }

    pub fn identity(n: usize) -> Self {
        PauliOperator { n, phase: 0, x: 0, z: 0 }
    }

    fn single(n: usize, q: usize, phase: u8, x: bool, z: bool) -> Result<Self> {
        if q >= n {
            return Err(Error::QubitIndex { index: q, n });
        }
        PauliOperator::new(n, phase, u64::from(x) << q, u64::from(z) << q)
    }

    pub fn x(n: usize, q: usize) -> Result<Self> {
        Self::single(n, q, 0, true, false)
    }

    pub fn y(n: usize, q: usize) -> Result<Self> {
        Self::single(n, q, 1, true, true)
    }

    pub fn z(n: usize, q: usize) -> Result<Self> {
        Self::single(n, q, 0, false, true)
    }

    /// ∏ Z over the listed qubits.
    pub fn z_string(n: usize, qubits: &[usize]) -> Result<Self> {
        let mut p = PauliOperator::identity(n);
        for &q in qubits {
            p = p.mul(&PauliOperator::z(n, q)?)?;
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Exponent k of the leading i^k.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn mul(&self, other: &PauliOperator) -> Result<PauliOperator> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        let swaps = (self.z & other.x).count_ones() as u8;
        Ok(PauliOperator {
            n: self.n,
            phase: (self.phase + other.phase + 2 * (swaps % 2)) % 4,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        })
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + (self.x & self.z).count_ones()) % 2 == 0
    }

    /// P² = ±I; returns the sign.
    pub fn square_sign(&self) -> i8 {
        let p = self.mul(self).expect("same width");
        if p.phase == 0 {
            1
        } else {
            -1
        }
    }

    /// Equal as operators up to a global phase.
    pub fn same_support(&self, other: &PauliOperator) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_qubits() != self.n {
            return Err(Error::Dimension { expected: self.n, got: state.n_qubits() });
        }
        let lead = Complex64::new(0.0, 1.0).powu(self.phase as u32);
        let src = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
        let (x, z) = (self.x as usize, self.z as usize);
        for (b, a) in src.iter().enumerate() {
            let sign = if (z & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ x] = a * lead * sign;
        }
        StateVector::from_amplitudes(out)
    }
}

impl fmt::Display for PauliOperator {
    /// Sign then one letter per qubit, qubit 0 first: `-iXYZI`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ys = (self.x & self.z).count_ones();
        let shown = (self.phase as u32 + 4 - ys % 4) % 4;
        f.write_str(["+", "+i", "-", "-i"][shown as usize])?;
        for q in 0..self.n {
            let c = match (self.x >> q & 1, self.z >> q & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut phase, body) = if let Some(r) = s.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s)
        };
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in body.chars().enumerate() {
            if q >= 64 {
                return Err(Error::Cap { what: "Pauli width", got: body.chars().count(), cap: 64 });
            }
            match c {
                'I' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                    phase += 1;
                }
                _ => return Err(Error::Invalid(format!("unexpected Pauli letter {c:?}"))),
            }
        }
        PauliOperator::new(body.chars().count(), phase % 4, x, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trip() {
        for s in ["+XYZI", "-iYY", "+iZ", "-XX"] {
            let p: PauliOperator = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
    }

    #[test]
    fn xz_anticommute() {
        let x = PauliOperator::x(1, 0).unwrap();
        let z = PauliOperator::z(1, 0).unwrap();
        let xz = x.mul(&z).unwrap();
        let zx = z.mul(&x).unwrap();
        assert_eq!((xz.phase() + 2) % 4, zx.phase());
        assert_eq!(PauliOperator::y(1, 0).unwrap().square_sign(), 1);
        assert_eq!(xz.square_sign(), -1);
    }

    #[test]
    fn hermiticity() {
        assert!("+XYZ".parse::<PauliOperator>().unwrap().is_hermitian());
        assert!(!"+iXYZ".parse::<PauliOperator>().unwrap().is_hermitian());
    }
}
