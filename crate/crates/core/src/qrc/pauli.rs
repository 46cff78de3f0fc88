//! Pauli-product basis on `N` qubits.
//!
//! Index `i ∈ [0, 4^N)` is read as `N` base-4 digits, qubit 1 being the most
//! significant, with digit `0 → I`, `1 → X`, `2 → Y`, `3 → Z`. The same
//! qubit-1-most-significant layout is used for computational basis states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the dense representation supports.
pub const MAX_QUBITS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn digit(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_digit(d: usize) -> Result<Self> {
        match d {
            0 => Ok(Pauli::I),
            1 => Ok(Pauli::X),
            2 => Ok(Pauli::Y),
            3 => Ok(Pauli::Z),
            _ => Err(Error::OutOfRange(format!("Pauli digit {d} is not in 0..4"))),
        }
    }
}

pub fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::OutOfRange(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Index of `P_1 ⊗ ... ⊗ P_N`.
pub fn pauli_index(paulis: &[Pauli]) -> usize {
    paulis.iter().fold(0, |acc, p| 4 * acc + p.digit())
}

/// Index from raw base-4 digits, qubit 1 first.
pub fn index_from_digits(digits: &[usize]) -> Result<usize> {
    digits.iter().try_fold(0, |acc, &d| {
        Pauli::from_digit(d).map(|p| 4 * acc + p.digit())
    })
}

/// Inverse of [`pauli_index`].
pub fn pauli_digits(index: usize, n: usize) -> Result<Vec<Pauli>> {
    if index >= 1 << (2 * n) {
        return Err(Error::OutOfRange(format!(
            "Pauli index {index} outside [0, 4^{n})"
        )));
    }
    (0..n)
        .map(|l| Pauli::from_digit((index >> (2 * (n - 1 - l))) & 3))
        .collect()
}

/// Index of `Z` on qubit `l` (1-based) with `I` elsewhere.
pub fn single_z_index(l: usize, n: usize) -> usize {
    3 << (2 * (n - l))
}

/// A Pauli product acting as `P |b⟩ = phase(b) |b ⊕ flip⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliString {
    pub flip: usize,
    pub sign_mask: usize,
    /// Number of `Y` factors; contributes `i^ys` to every phase.
    pub ys: u32,
}

impl PauliString {
    pub fn from_index(index: usize, n: usize) -> Self {
        let mut s = PauliString {
            flip: 0,
            sign_mask: 0,
            ys: 0,
        };
        for l in 0..n {
            let bit = 1 << (n - 1 - l);
            match (index >> (2 * (n - 1 - l))) & 3 {
                1 => s.flip |= bit,
                2 => {
                    s.flip |= bit;
                    s.sign_mask |= bit;
                    s.ys += 1;
                }
                3 => s.sign_mask |= bit,
                _ => {}
            }
        }
        s
    }

    /// Coefficient of `|b ⊕ flip⟩` in `P |b⟩`. Uses `Y = i X Z`.
    pub fn phase(&self, b: usize) -> Complex64 {
        let sign = if (b & self.sign_mask).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let i_pow = match self.ys % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        i_pow * sign
    }

    pub fn to_matrix(&self, n: usize) -> DMatrix<Complex64> {
        let dim = 1 << n;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            m[(b ^ self.flip, b)] = self.phase(b);
        }
        m
    }

    /// `Tr[P M]`.
    pub fn trace_with(&self, m: &DMatrix<Complex64>) -> Complex64 {
        // (P M)_{cc} = phase(c ⊕ flip) M_{c ⊕ flip, c}
        (0..m.nrows())
            .map(|c| self.phase(c ^ self.flip) * m[(c ^ self.flip, c)])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_order() {
        let order = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for (i, p) in order.iter().enumerate() {
            assert_eq!(pauli_index(&[*p]), i);
            assert_eq!(pauli_digits(i, 1).unwrap(), vec![*p]);
        }
    }

    #[test]
    fn two_qubit_z_on_first() {
        assert_eq!(pauli_index(&[Pauli::Z, Pauli::I]), 12);
        assert_eq!(single_z_index(1, 2), 12);
        assert_eq!(single_z_index(2, 2), 3);
        assert_eq!(index_from_digits(&[3, 0]).unwrap(), 0b1100);
    }

    #[test]
    fn digits_out_of_range() {
        assert!(index_from_digits(&[4]).is_err());
        assert!(pauli_digits(16, 2).is_err());
    }

    #[test]
    fn round_trip_all_three_qubit_indices() {
        for i in 0..64 {
            assert_eq!(pauli_index(&pauli_digits(i, 3).unwrap()), i);
        }
    }

    #[test]
    fn single_qubit_matrices() {
        let x = PauliString::from_index(1, 1).to_matrix(1);
        let y = PauliString::from_index(2, 1).to_matrix(1);
        let z = PauliString::from_index(3, 1).to_matrix(1);
        assert_eq!(
            x,
            DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
        );
        assert_eq!(
            y,
            DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
        );
        assert_eq!(
            z,
            DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
        );
    }

    #[test]
    fn products_are_kronecker_products() {
        let single: Vec<_> = (0..4)
            .map(|i| PauliString::from_index(i, 1).to_matrix(1))
            .collect();
        for i in 0..16 {
            let expected = single[i >> 2].kronecker(&single[i & 3]);
            assert_eq!(
                PauliString::from_index(i, 2).to_matrix(2),
                expected,
                "index {i}"
            );
        }
    }

    #[test]
    fn paulis_are_orthogonal_under_trace() {
        let n = 2;
        for i in 0..16 {
            let pi = PauliString::from_index(i, n).to_matrix(n);
            for j in 0..16 {
                let t = PauliString::from_index(j, n).trace_with(&pi);
                let expected = if i == j { 4.0 } else { 0.0 };
                assert!((t - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }
}
